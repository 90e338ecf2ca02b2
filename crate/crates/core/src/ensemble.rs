//! Seeded disorder ensembles and their per-energy statistics.
//!
//! Realization `k` is built from seed `base_seed + k` (wrapping). Realizations
//! run on the ambient rayon pool; results are collected and reduced in
//! realization order, so the statistics do not depend on the worker count.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::curve::{CurveKind, EnergyGrid, SampledCurve};
use crate::error::{Error, Result};
use crate::fitting::{ConstantsReport, ErrorBars};
use crate::landscape::{self, solve_landscape};
use crate::lattice::{LatticeModel, LatticeSpec, PotentialDistribution};
use crate::nu_counting::{landscape_law_curve, CubeRule};
use crate::spectral::idos_curve;

/// Per-energy mean and population standard deviation over realizations.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleCurve {
    pub grid: EnergyGrid,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub n_realizations: usize,
    pub kind: CurveKind,
}

impl EnsembleCurve {
    /// Aggregate realization curves, all sampled on `grid`, in the given order.
    pub fn from_realizations(grid: &EnergyGrid, kind: CurveKind, curves: &[&[f64]]) -> Result<Self> {
        if curves.is_empty() {
            return Err(Error::InvalidArgument("no realizations to aggregate".into()));
        }
        if let Some(bad) = curves.iter().find(|c| c.len() != grid.len()) {
            return Err(Error::InvalidArgument(format!(
                "realization curve has {} points, grid has {}",
                bad.len(),
                grid.len()
            )));
        }
        let n = curves.len() as f64;
        let mut column = vec![0.0; curves.len()];
        let mut mean = Vec::with_capacity(grid.len());
        let mut std = Vec::with_capacity(grid.len());
        for k in 0..grid.len() {
            for (slot, c) in column.iter_mut().zip(curves) {
                *slot = c[k];
            }
            let m = pairwise_sum(&column) / n;
            for v in column.iter_mut() {
                *v = (*v - m) * (*v - m);
            }
            mean.push(m);
            std.push((pairwise_sum(&column) / n).sqrt());
        }
        Ok(Self {
            grid: grid.clone(),
            mean,
            std,
            n_realizations: curves.len(),
            kind,
        })
    }

    /// Grid points with a strictly positive mean. Zero means are left as
    /// they are; log-based fits must skip them.
    pub fn positive_mask(&self) -> Vec<bool> {
        self.mean.iter().map(|&m| m > 0.0).collect()
    }
}

impl SampledCurve for EnsembleCurve {
    fn energies(&self) -> &[f64] {
        self.grid.values()
    }

    fn values(&self) -> &[f64] {
        &self.mean
    }
}

/// Sum in a fixed binary-tree order.
fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let (a, b) = values.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

#[derive(Debug, Clone)]
pub struct RealizationResult {
    pub index: u64,
    pub seed: u64,
    pub idos: Vec<f64>,
    pub landscape_law: Vec<f64>,
    pub min_w: f64,
}

#[derive(Debug, Clone)]
pub struct EnsembleRun {
    pub grid: EnergyGrid,
    pub idos: EnsembleCurve,
    pub landscape_law: EnsembleCurve,
    pub realizations: Vec<RealizationResult>,
}

#[derive(Debug, Clone, Copy)]
pub struct EnsembleOptions {
    pub landscape_tol: f64,
    pub cube_rule: CubeRule,
    /// Report completed realizations on standard error.
    pub progress: bool,
}

impl Default for EnsembleOptions {
    fn default() -> Self {
        Self {
            landscape_tol: landscape::DEFAULT_TOLERANCE,
            cube_rule: CubeRule::default(),
            progress: false,
        }
    }
}

/// Sample `n` realizations of `(spec, dist)` and average `N` and `N_u`.
pub fn run_ensemble(
    spec: LatticeSpec,
    dist: &PotentialDistribution,
    grid: &EnergyGrid,
    n: usize,
    base_seed: u64,
    options: &EnsembleOptions,
) -> Result<EnsembleRun> {
    run_ensemble_with(grid, n, base_seed, options, |seed| {
        Ok(LatticeModel::sample(spec, dist, seed))
    })
}

/// As [`run_ensemble`], with a custom model per seed.
pub fn run_ensemble_with<F>(
    grid: &EnergyGrid,
    n: usize,
    base_seed: u64,
    options: &EnsembleOptions,
    make_model: F,
) -> Result<EnsembleRun>
where
    F: Fn(u64) -> Result<LatticeModel> + Sync,
{
    let realizations = par_realizations(n, base_seed, options.progress, |index, seed| {
        run_one(grid, index, seed, options, &make_model)
    })?;

    let idos_rows: Vec<&[f64]> = realizations.iter().map(|r| r.idos.as_slice()).collect();
    let nu_rows: Vec<&[f64]> = realizations.iter().map(|r| r.landscape_law.as_slice()).collect();
    Ok(EnsembleRun {
        grid: grid.clone(),
        idos: EnsembleCurve::from_realizations(grid, CurveKind::Idos, &idos_rows)?,
        landscape_law: EnsembleCurve::from_realizations(grid, CurveKind::LandscapeLaw, &nu_rows)?,
        realizations,
    })
}

/// One ensemble-averaged curve without computing the other one: `Idos`
/// skips the landscape solve, `LandscapeLaw` skips the inertia counts.
pub fn ensemble_curve(
    spec: LatticeSpec,
    dist: &PotentialDistribution,
    grid: &EnergyGrid,
    n: usize,
    base_seed: u64,
    kind: CurveKind,
    options: &EnsembleOptions,
) -> Result<EnsembleCurve> {
    let rows = par_realizations(n, base_seed, options.progress, |_, seed| {
        let model = LatticeModel::sample(spec, dist, seed);
        Ok(match kind {
            CurveKind::Idos => idos_curve(&model, grid)?.counts,
            CurveKind::LandscapeLaw => {
                let land = solve_landscape(&model, options.landscape_tol)?;
                landscape_law_curve(&land, &spec, grid, options.cube_rule)?.counts
            }
        })
    })?;
    let rows: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
    EnsembleCurve::from_realizations(grid, kind, &rows)
}

/// Evaluate `f(index, seed)` for every realization on the ambient pool and
/// return the results in index order.
fn par_realizations<T, F>(n: usize, base_seed: u64, progress: bool, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, u64) -> Result<T> + Sync,
{
    if n == 0 {
        return Err(Error::InvalidArgument("ensemble needs at least one realization".into()));
    }
    let done = AtomicUsize::new(0);
    let report_every = (n / 20).max(1);
    (0..n as u64)
        .into_par_iter()
        .map(|index| {
            let seed = base_seed.wrapping_add(index);
            let result = f(index, seed).map_err(|e| Error::Realization {
                index,
                source: Box::new(e),
            });
            if progress {
                let k = done.fetch_add(1, Ordering::Relaxed) + 1;
                if k.is_multiple_of(report_every) || k == n {
                    eprintln!("realizations {k}/{n}");
                }
            }
            result
        })
        .collect()
}

fn run_one<F>(
    grid: &EnergyGrid,
    index: u64,
    seed: u64,
    options: &EnsembleOptions,
    make_model: &F,
) -> Result<RealizationResult>
where
    F: Fn(u64) -> Result<LatticeModel>,
{
    let model = make_model(seed)?;
    let land = solve_landscape(&model, options.landscape_tol)?;
    let idos = idos_curve(&model, grid)?;
    let nu = landscape_law_curve(&land, model.spec(), grid, options.cube_rule)?;
    Ok(RealizationResult {
        index,
        seed,
        idos: idos.counts,
        landscape_law: nu.counts,
        min_w: land.min_w(),
    })
}

/// Disjoint consecutive groups of realizations, each averaged on its own.
#[derive(Debug, Clone)]
pub struct SplitSamples {
    pub group_count: usize,
    pub group_size: usize,
    /// `(N, N_u)` averages per group.
    pub groups: Vec<(EnsembleCurve, EnsembleCurve)>,
}

impl SplitSamples {
    pub fn new(run: &EnsembleRun, group_count: usize) -> Result<Self> {
        let n = run.realizations.len();
        if group_count == 0 || !n.is_multiple_of(group_count) {
            return Err(Error::InvalidArgument(format!(
                "{group_count} groups do not divide {n} realizations"
            )));
        }
        let group_size = n / group_count;
        let groups = run
            .realizations
            .chunks(group_size)
            .map(|chunk| {
                let idos: Vec<&[f64]> = chunk.iter().map(|r| r.idos.as_slice()).collect();
                let nu: Vec<&[f64]> = chunk.iter().map(|r| r.landscape_law.as_slice()).collect();
                Ok((
                    EnsembleCurve::from_realizations(&run.grid, CurveKind::Idos, &idos)?,
                    EnsembleCurve::from_realizations(&run.grid, CurveKind::LandscapeLaw, &nu)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            group_count,
            group_size,
            groups,
        })
    }
}

/// Fit every group separately and report twice the sample standard
/// deviation across groups of `1/C4`, `1/C5`, `1/C5,fit` and `1/C6`.
pub fn split_error_bars<F>(run: &EnsembleRun, group_count: usize, fit: F) -> Result<ErrorBars>
where
    F: Fn(&EnsembleCurve, &EnsembleCurve) -> Result<ConstantsReport>,
{
    if group_count < 2 {
        return Err(Error::InvalidArgument("error bars need at least two groups".into()));
    }
    let samples = SplitSamples::new(run, group_count)?;
    let reports = samples
        .groups
        .iter()
        .map(|(n, nu)| fit(n, nu))
        .collect::<Result<Vec<_>>>()?;
    Ok(ErrorBars::from_reciprocals(
        &reports.iter().map(|r| r.reciprocals()).collect::<Vec<_>>(),
    ))
}
