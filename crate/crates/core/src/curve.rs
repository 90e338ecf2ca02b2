//! Energy grids and sampled counting functions.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Log,
    Linear,
}

impl std::str::FromStr for Spacing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "log" => Ok(Spacing::Log),
            "linear" => Ok(Spacing::Linear),
            other => Err(Error::InvalidArgument(format!(
                "unknown grid spacing `{other}` (expected log or linear)"
            ))),
        }
    }
}

impl std::fmt::Display for Spacing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Spacing::Log => "log",
            Spacing::Linear => "linear",
        })
    }
}

/// Strictly increasing, positive energies.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyGrid {
    values: Vec<f64>,
    spacing: Spacing,
}

impl EnergyGrid {
    pub fn new(e_lo: f64, e_hi: f64, points: usize, spacing: Spacing) -> Result<Self> {
        if points < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least 2 points, got {points}"
            )));
        }
        if !(e_lo > 0.0 && e_hi > e_lo && e_hi.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "grid bounds must satisfy 0 < e_lo < e_hi, got [{e_lo}, {e_hi}]"
            )));
        }
        let last = (points - 1) as f64;
        let mut values: Vec<f64> = match spacing {
            Spacing::Log => {
                let (a, b) = (e_lo.ln(), e_hi.ln());
                (0..points).map(|k| (a + (b - a) * k as f64 / last).exp()).collect()
            }
            Spacing::Linear => (0..points).map(|k| e_lo + (e_hi - e_lo) * k as f64 / last).collect(),
        };
        values[0] = e_lo;
        values[points - 1] = e_hi;
        Self::from_values(values, spacing)
    }

    pub fn log(e_lo: f64, e_hi: f64, points: usize) -> Result<Self> {
        Self::new(e_lo, e_hi, points, Spacing::Log)
    }

    pub fn linear(e_lo: f64, e_hi: f64, points: usize) -> Result<Self> {
        Self::new(e_lo, e_hi, points, Spacing::Linear)
    }

    pub fn from_values(values: Vec<f64>, spacing: Spacing) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidArgument("grid needs at least 2 points".into()));
        }
        if !values.iter().all(|&e| e > 0.0 && e.is_finite()) {
            return Err(Error::InvalidArgument(
                "grid energies must be positive and finite".into(),
            ));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "grid energies must be strictly increasing".into(),
            ));
        }
        Ok(Self { values, spacing })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn e_lo(&self) -> f64 {
        self.values[0]
    }

    pub fn e_hi(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Scale every energy by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::from_values(self.values.iter().map(|e| e * factor).collect(), self.spacing)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    /// Exact counting function N(E).
    Idos,
    /// Landscape law N_u(E).
    LandscapeLaw,
}

impl std::fmt::Display for CurveKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CurveKind::Idos => "idos",
            CurveKind::LandscapeLaw => "landscape_law",
        })
    }
}

/// Per-site counting function sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCurve {
    pub grid: EnergyGrid,
    pub counts: Vec<f64>,
    pub kind: CurveKind,
}

impl SpectralCurve {
    pub fn new(grid: EnergyGrid, counts: Vec<f64>, kind: CurveKind) -> Result<Self> {
        if counts.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "{} counts for a grid of {} energies",
                counts.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, counts, kind })
    }

    pub fn energies(&self) -> &[f64] {
        self.grid.values()
    }

    pub fn values(&self) -> &[f64] {
        &self.counts
    }

    pub fn is_monotone(&self) -> bool {
        self.counts.windows(2).all(|w| w[1] >= w[0])
    }
}

/// Anything that exposes values on an energy grid: single curves and ensemble means.
pub trait SampledCurve {
    fn energies(&self) -> &[f64];
    fn values(&self) -> &[f64];
}

impl SampledCurve for SpectralCurve {
    fn energies(&self) -> &[f64] {
        self.grid.values()
    }

    fn values(&self) -> &[f64] {
        &self.counts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_grid_endpoints_and_ratio() {
        let g = EnergyGrid::log(0.01, 10.0, 4).unwrap();
        assert_eq!(g.e_lo(), 0.01);
        assert_eq!(g.e_hi(), 10.0);
        let v = g.values();
        assert!((v[1] / v[0] - 10.0).abs() < 1e-12);
        assert!((v[2] / v[1] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_grids() {
        assert!(EnergyGrid::log(0.0, 1.0, 10).is_err());
        assert!(EnergyGrid::log(1.0, 0.5, 10).is_err());
        assert!(EnergyGrid::linear(0.1, 1.0, 1).is_err());
        assert!(EnergyGrid::from_values(vec![0.1, 0.1], Spacing::Linear).is_err());
    }
}
