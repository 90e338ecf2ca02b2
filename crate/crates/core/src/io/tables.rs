//! CSV files produced and consumed by the pipeline.
//!
//! | file            | columns                                          |
//! |-----------------|--------------------------------------------------|
//! | `curves.csv`    | `energy,n_mean,n_std,nu_mean,nu_std`             |
//! | `idos.csv`      | `energy,mean,std`                                |
//! | `nu.csv`        | `energy,mean,std`                                |
//! | `constants.csv` | `name,value,reciprocal,err2sigma`                |
//! | `scaling.csv`   | `curve,slope,intercept,r2,c5_eff,c6_eff`         |
//! | `ratio.csv`     | `energy,ratio`                                   |
//! | `landscape.csv` | `site,potential,u,w`                             |
//!
//! Floats are written in Rust's shortest round-trip form, so reading a file
//! back gives the exact values that were written. `err2sigma` is empty when
//! no error bars were computed. Every file is written to a temporary sibling
//! and renamed into place.

use std::fs;
use std::path::Path;

use crate::curve::{CurveKind, EnergyGrid, Spacing};
use crate::ensemble::EnsembleCurve;
use crate::error::{Error, Result};
use crate::fitting::ConstantsReport;
use crate::landscape::Landscape;
use crate::lattice::LatticeModel;
use crate::scaling::ScalingReport;

pub const CURVES_HEADER: [&str; 5] = ["energy", "n_mean", "n_std", "nu_mean", "nu_std"];
pub const SINGLE_CURVE_HEADER: [&str; 3] = ["energy", "mean", "std"];
pub const CONSTANTS_HEADER: [&str; 4] = ["name", "value", "reciprocal", "err2sigma"];
pub const SCALING_HEADER: [&str; 6] = ["curve", "slope", "intercept", "r2", "c5_eff", "c6_eff"];
pub const RATIO_HEADER: [&str; 2] = ["energy", "ratio"];
pub const LANDSCAPE_HEADER: [&str; 4] = ["site", "potential", "u", "w"];

/// Shortest decimal string that parses back to exactly `x`.
pub fn format_f64(x: f64) -> String {
    format!("{x:?}")
}

/// Write `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidArgument(format!("not a file path: {}", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

fn write_table<R, I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    write_atomic(path, &bytes)
}

fn read_table(path: &Path, header: &[&str]) -> Result<Vec<csv::StringRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    let found = r.headers()?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::InvalidArgument(format!(
            "{}: expected columns {}, found {}",
            path.display(),
            header.join(","),
            found.iter().collect::<Vec<_>>().join(",")
        )));
    }
    Ok(r.records().collect::<std::result::Result<_, _>>()?)
}

fn parse_field(path: &Path, record: &csv::StringRecord, column: usize) -> Result<f64> {
    let raw = record.get(column).unwrap_or("");
    raw.parse().map_err(|_| {
        let line = record.position().map_or(0, |p| p.line());
        Error::InvalidArgument(format!(
            "{} line {line}: cannot parse `{raw}` as a number",
            path.display()
        ))
    })
}

/// Log spacing if consecutive ratios agree, linear otherwise.
fn infer_grid(energies: Vec<f64>) -> Result<EnergyGrid> {
    let ratios: Vec<f64> = energies.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
    let uniform_log = ratios.iter().all(|r| (r - ratios[0]).abs() <= 1e-9 * ratios[0].abs());
    let spacing = if uniform_log { Spacing::Log } else { Spacing::Linear };
    EnergyGrid::from_values(energies, spacing)
}

/// Contents of `curves.csv`. Curves read back carry `n_realizations = 0`
/// because the count is not stored in the table.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub idos: EnsembleCurve,
    pub landscape_law: EnsembleCurve,
}

pub fn write_curves(path: &Path, idos: &EnsembleCurve, landscape_law: &EnsembleCurve) -> Result<()> {
    if idos.grid != landscape_law.grid {
        return Err(Error::InvalidArgument("curves must share one energy grid".into()));
    }
    let rows = (0..idos.grid.len()).map(|k| {
        [
            idos.grid.values()[k],
            idos.mean[k],
            idos.std[k],
            landscape_law.mean[k],
            landscape_law.std[k],
        ]
        .map(format_f64)
    });
    write_table(path, &CURVES_HEADER, rows)
}

pub fn read_curves(path: &Path) -> Result<CurveTable> {
    let records = read_table(path, &CURVES_HEADER)?;
    let mut columns: Vec<Vec<f64>> = (0..5).map(|_| Vec::with_capacity(records.len())).collect();
    for rec in &records {
        for (c, column) in columns.iter_mut().enumerate() {
            column.push(parse_field(path, rec, c)?);
        }
    }
    let nu_std = columns.pop().unwrap();
    let nu_mean = columns.pop().unwrap();
    let n_std = columns.pop().unwrap();
    let n_mean = columns.pop().unwrap();
    let grid = infer_grid(columns.pop().unwrap())?;
    Ok(CurveTable {
        idos: stored_curve(&grid, CurveKind::Idos, n_mean, n_std),
        landscape_law: stored_curve(&grid, CurveKind::LandscapeLaw, nu_mean, nu_std),
    })
}

fn stored_curve(grid: &EnergyGrid, kind: CurveKind, mean: Vec<f64>, std: Vec<f64>) -> EnsembleCurve {
    EnsembleCurve {
        grid: grid.clone(),
        mean,
        std,
        n_realizations: 0,
        kind,
    }
}

/// `idos.csv` or `nu.csv`.
pub fn write_single_curve(path: &Path, curve: &EnsembleCurve) -> Result<()> {
    let rows = (0..curve.grid.len()).map(|k| [curve.grid.values()[k], curve.mean[k], curve.std[k]].map(format_f64));
    write_table(path, &SINGLE_CURVE_HEADER, rows)
}

pub fn read_single_curve(path: &Path, kind: CurveKind) -> Result<EnsembleCurve> {
    let records = read_table(path, &SINGLE_CURVE_HEADER)?;
    let (mut e, mut mean, mut std) = (vec![], vec![], vec![]);
    for rec in &records {
        e.push(parse_field(path, rec, 0)?);
        mean.push(parse_field(path, rec, 1)?);
        std.push(parse_field(path, rec, 2)?);
    }
    Ok(stored_curve(&infer_grid(e)?, kind, mean, std))
}

pub fn write_constants(path: &Path, report: &ConstantsReport) -> Result<()> {
    let values = report.values();
    let reciprocals = report.reciprocals();
    let errors = report.error_bars.map(|e| e.as_array());
    let rows = ConstantsReport::names().into_iter().enumerate().map(|(k, name)| {
        vec![
            name.to_string(),
            format_f64(values[k]),
            format_f64(reciprocals[k]),
            errors.map_or(String::new(), |e| format_f64(e[k])),
        ]
    });
    write_table(path, &CONSTANTS_HEADER, rows)
}

/// One row of `constants.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantsRow {
    pub name: String,
    pub value: f64,
    pub reciprocal: f64,
    pub err2sigma: Option<f64>,
}

pub fn read_constants(path: &Path) -> Result<Vec<ConstantsRow>> {
    read_table(path, &CONSTANTS_HEADER)?
        .iter()
        .map(|rec| {
            let err = match rec.get(3) {
                Some("") | None => None,
                Some(_) => Some(parse_field(path, rec, 3)?),
            };
            Ok(ConstantsRow {
                name: rec.get(0).unwrap_or("").to_string(),
                value: parse_field(path, rec, 1)?,
                reciprocal: parse_field(path, rec, 2)?,
                err2sigma: err,
            })
        })
        .collect()
}

pub fn write_scaling(path: &Path, report: &ScalingReport) -> Result<()> {
    let rows = [("n", &report.fit_n), ("nu", &report.fit_nu)].map(|(name, fit)| {
        let mut row = vec![name.to_string()];
        row.extend([fit.slope, fit.intercept, fit.r_squared, report.c5_eff, report.c6_eff].map(format_f64));
        row
    });
    write_table(path, &SCALING_HEADER, rows)
}

pub fn write_ratio(path: &Path, ratio: &[(f64, f64)]) -> Result<()> {
    write_table(
        path,
        &RATIO_HEADER,
        ratio.iter().map(|&(e, r)| [format_f64(e), format_f64(r)]),
    )
}

pub fn read_ratio(path: &Path) -> Result<Vec<(f64, f64)>> {
    read_table(path, &RATIO_HEADER)?
        .iter()
        .map(|rec| Ok((parse_field(path, rec, 0)?, parse_field(path, rec, 1)?)))
        .collect()
}

pub fn write_landscape(path: &Path, model: &LatticeModel, land: &Landscape) -> Result<()> {
    let rows = (0..model.sites()).map(|i| {
        vec![
            i.to_string(),
            format_f64(model.potential()[i]),
            format_f64(land.u()[i]),
            format_f64(land.w()[i]),
        ]
    });
    write_table(path, &LANDSCAPE_HEADER, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 6.02e23, 0.0, f64::MIN_POSITIVE, 5.0] {
            assert_eq!(format_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn grid_spacing_inferred() {
        let log = EnergyGrid::log(0.01, 5.0, 30).unwrap();
        assert_eq!(infer_grid(log.values().to_vec()).unwrap().spacing(), Spacing::Log);
        let lin = EnergyGrid::linear(0.01, 5.0, 30).unwrap();
        assert_eq!(infer_grid(lin.values().to_vec()).unwrap().spacing(), Spacing::Linear);
    }

    #[test]
    fn wrong_header_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ratio.csv");
        fs::write(&path, "e,r\n1,2\n").unwrap();
        assert!(read_ratio(&path).is_err());
        fs::write(&path, "energy,ratio\n1,x\n").unwrap();
        let err = read_ratio(&path).unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn atomic_write_leaves_no_temporaries() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ratio.csv");
        write_ratio(&path, &[(0.5, 2.0), (1.0, 3.5)]).unwrap();
        write_ratio(&path, &[(0.5, 2.25)]).unwrap();
        assert_eq!(read_ratio(&path).unwrap(), vec![(0.5, 2.25)]);
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
