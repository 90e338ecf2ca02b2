//! End-to-end run: ensemble, constants, scaling, ratio, files.

use std::fs;
use std::path::{Path, PathBuf};

use crate::ensemble::{run_ensemble, split_error_bars, EnsembleRun};
use crate::error::{Error, Result};
use crate::fitting::{check_sandwich, fit_constants, universal_ratio, ConstantsReport, SandwichCheck};
use crate::io::config::RunConfig;
use crate::io::svg::emit_svg_loglog;
use crate::io::tables;
use crate::lattice::LatticeModel;
use crate::scaling::{scaling_analysis, ScalingReport, ScalingTransform};
use crate::spectral::{cross_check_dense, OracleSummary};

pub const CURVES_CSV: &str = "curves.csv";
pub const CONSTANTS_CSV: &str = "constants.csv";
pub const SCALING_CSV: &str = "scaling.csv";
pub const RATIO_CSV: &str = "ratio.csv";
pub const CURVES_SVG: &str = "curves.svg";
pub const RATIO_SVG: &str = "ratio.svg";
pub const MANIFEST: &str = "manifest.txt";

/// Energies closer than this to a dense eigenvalue are not cross-checked.
pub const ORACLE_GAP: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub run: EnsembleRun,
    pub constants: ConstantsReport,
    pub sandwich: SandwichCheck,
    pub scaling: ScalingReport,
    pub ratio: Vec<(f64, f64)>,
    pub oracle: Option<OracleSummary>,
    pub files: Vec<PathBuf>,
}

/// Run `f` on a pool with the configured number of workers.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(f))
}

/// Constants of an ensemble under the config's window and scan, with
/// split-sample error bars when `split_groups` is set.
pub fn fit_stage(config: &RunConfig, run: &EnsembleRun) -> Result<ConstantsReport> {
    let mut report = fit_constants(&run.idos, &run.landscape_law, &config.window, &config.c6_scan)?;
    if let Some(m) = config.split_groups {
        report.error_bars = Some(split_error_bars(run, m, |n, nu| {
            fit_constants(n, nu, &config.window, &config.c6_scan)
        })?);
    }
    Ok(report)
}

pub fn run_pipeline(config: &RunConfig, progress: bool) -> Result<PipelineOutput> {
    fs::create_dir_all(&config.output_dir)?;
    let spec = config.lattice();
    let dist = config.distribution();
    let grid = config.energy_grid();
    let options = config.ensemble_options(progress);

    let (run, oracle) = with_workers(config.workers, || -> Result<_> {
        let run = run_ensemble(spec, &dist, &grid, config.realizations, config.base_seed, &options)?;
        let oracle = if config.dense_oracle {
            let model = LatticeModel::sample(spec, &dist, config.base_seed);
            Some(cross_check_dense(&model, grid.values(), ORACLE_GAP)?)
        } else {
            None
        };
        Ok((run, oracle))
    })??;
    log::info!("ensemble of {} realizations done", config.realizations);

    let constants = fit_stage(config, &run)?;
    let sandwich = check_sandwich(&run.idos, &run.landscape_law, &constants, &constants.window)?;
    let scaling = scaling_analysis(
        &run.idos,
        &run.landscape_law,
        ScalingTransform::new(config.kind, config.dimension),
        config.window.e_min,
    )?;
    let ratio = universal_ratio(&run.idos, &run.landscape_law, config.dimension)?;

    let dir = &config.output_dir;
    let path = |name: &str| dir.join(name);
    tables::write_curves(&path(CURVES_CSV), &run.idos, &run.landscape_law)?;
    tables::write_constants(&path(CONSTANTS_CSV), &constants)?;
    tables::write_scaling(&path(SCALING_CSV), &scaling)?;
    tables::write_ratio(&path(RATIO_CSV), &ratio)?;
    write_charts(dir, &run, &ratio)?;
    write_manifest(&path(MANIFEST), config, &constants, &sandwich, oracle.as_ref())?;

    let files = [
        CURVES_CSV,
        CONSTANTS_CSV,
        SCALING_CSV,
        RATIO_CSV,
        CURVES_SVG,
        RATIO_SVG,
        MANIFEST,
    ]
    .into_iter()
    .filter(|&name| name != RATIO_SVG || !ratio.is_empty())
    .map(path)
    .collect();
    Ok(PipelineOutput {
        run,
        constants,
        sandwich,
        scaling,
        ratio,
        oracle,
        files,
    })
}

fn write_charts(dir: &Path, run: &EnsembleRun, ratio: &[(f64, f64)]) -> Result<()> {
    let pairs =
        |values: &[f64]| -> Vec<(f64, f64)> { run.grid.values().iter().copied().zip(values.iter().copied()).collect() };
    let n = pairs(&run.idos.mean);
    let nu = pairs(&run.landscape_law.mean);
    emit_svg_loglog(
        &[&n, &nu],
        &["N(E)", "N_u(E)"],
        "counting functions",
        &dir.join(CURVES_SVG),
    )?;
    if !ratio.is_empty() {
        emit_svg_loglog(
            &[ratio],
            &["N_u(E/(1+d/4)) / N(E)"],
            "universal ratio",
            &dir.join(RATIO_SVG),
        )?;
    }
    Ok(())
}

fn write_manifest(
    path: &Path,
    config: &RunConfig,
    constants: &ConstantsReport,
    sandwich: &SandwichCheck,
    oracle: Option<&OracleSummary>,
) -> Result<()> {
    let mut text = format!(
        "# {} {}\n# realization k uses seed base_seed + k (wrapping) for k = 0, ..., {}\n",
        env!("CARGO_PKG_NAME"),
        env!("CARGO_PKG_VERSION"),
        config.realizations - 1
    );
    text.push_str(&config.to_text());
    let w = &constants.window;
    text.push_str(&format!(
        "# fit window [{}, {}] with {} points\n# sandwich checked {} points, max N/N_u(C4 E) = {}, max C5 N_u(C6 E)/N = {}\n",
        w.e_min,
        w.e_max,
        w.len(),
        sandwich.checked,
        sandwich.upper,
        sandwich.lower
    ));
    if let Some(o) = oracle {
        text.push_str(&format!(
            "# dense oracle agreed at {} energies ({} skipped near eigenvalues)\n",
            o.checked, o.skipped
        ));
    }
    tables::write_atomic(path, text.as_bytes())
}
