//! Constants relating the exact IDOS `N` to the landscape law `N_u`:
//!
//! ```text
//! C5 · N_u(C6 E) ≤ N(E) ≤ N_u(C4 E),        N(E) ≈ C5,fit · N_u(C6 E)
//! ```
//!
//! All evaluations of `N_u` off the grid go through [`loglog_interpolate`].
//! Grid points where either curve is zero are masked out of every objective.

use crate::curve::SampledCurve;
use crate::error::{Error, Result};

/// Minimum number of usable window points for the C5/C6 objectives.
pub const MIN_USABLE_POINTS: usize = 5;

/// Relative slack allowed when checking the bounds a posteriori.
pub const BOUND_SLACK: f64 = 1e-9;

/// Linear interpolation in `(ln E, ln v)`. Exact at grid points.
pub fn loglog_interpolate<C: SampledCurve + ?Sized>(curve: &C, e: f64) -> Result<f64> {
    let es = curve.energies();
    let vs = curve.values();
    let (lo, hi) = (es[0], es[es.len() - 1]);
    if !(e >= lo && e <= hi) {
        return Err(Error::OutOfRange { energy: e, lo, hi });
    }
    let k = es.partition_point(|&x| x <= e);
    // es[k - 1] <= e < es[k], or k == len when e == hi.
    let left = k - 1;
    if es[left] == e {
        return Ok(vs[left]);
    }
    let (v0, v1) = (vs[left], vs[left + 1]);
    if !(v0 > 0.0 && v1 > 0.0) {
        return Err(Error::UndefinedRegion(e));
    }
    if v0 == v1 {
        return Ok(v0);
    }
    let (l0, l1) = (es[left].ln(), es[left + 1].ln());
    let t = (e.ln() - l0) / (l1 - l0);
    Ok((v0.ln() + t * (v1.ln() - v0.ln())).exp())
}

/// Interval of energies used by the fits, plus the grid points inside it
/// where both curves are positive.
#[derive(Debug, Clone, PartialEq)]
pub struct FitWindow {
    pub e_min: f64,
    pub e_max: f64,
    pub mask: Vec<bool>,
}

impl FitWindow {
    pub fn new<A, B>(n: &A, nu: &B, e_min: f64, e_max: f64) -> Result<Self>
    where
        A: SampledCurve + ?Sized,
        B: SampledCurve + ?Sized,
    {
        check_common_grid(n, nu)?;
        if !(e_min < e_max) {
            return Err(Error::InvalidArgument(format!(
                "fit window needs e_min < e_max, got [{e_min}, {e_max}]"
            )));
        }
        let mask: Vec<bool> = n
            .energies()
            .iter()
            .zip(n.values().iter().zip(nu.values()))
            .map(|(&e, (&a, &b))| e >= e_min && e <= e_max && a > 0.0 && b > 0.0)
            .collect();
        if !mask.iter().any(|&m| m) {
            return Err(Error::InsufficientData(format!(
                "no grid point in [{e_min}, {e_max}] has both curves positive"
            )));
        }
        Ok(Self { e_min, e_max, mask })
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i)
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// How the window edges are chosen before masking.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowBounds {
    pub e_min: f64,
    /// `None` selects the largest grid energy where both mean curves are
    /// still below 1.
    pub e_max: Option<f64>,
}

impl WindowBounds {
    /// `E > 0.02` in 1D, `E > 0.2` in 2D.
    pub fn default_for(dimension: usize) -> Self {
        Self {
            e_min: if dimension == 1 { 0.02 } else { 0.2 },
            e_max: None,
        }
    }

    pub fn resolve<A, B>(&self, n: &A, nu: &B) -> Result<FitWindow>
    where
        A: SampledCurve + ?Sized,
        B: SampledCurve + ?Sized,
    {
        let e_max = match self.e_max {
            Some(e) => e,
            None => n
                .energies()
                .iter()
                .zip(n.values().iter().zip(nu.values()))
                .filter(|(_, (&a, &b))| a < 1.0 && b < 1.0)
                .map(|(&e, _)| e)
                .fold(f64::NEG_INFINITY, f64::max),
        };
        FitWindow::new(n, nu, self.e_min, e_max)
    }
}

/// Scan range for `C6`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct C6Scan {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Default for C6Scan {
    fn default() -> Self {
        Self {
            lo: 0.5,
            hi: 1.0,
            steps: 200,
        }
    }
}

impl C6Scan {
    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.steps - 1) as f64
    }

    fn validate(&self) -> Result<()> {
        if !(self.lo > 0.0 && self.hi > self.lo && self.steps >= 2) {
            return Err(Error::InvalidArgument(format!(
                "C6 scan needs 0 < lo < hi and at least 2 steps, got {self:?}"
            )));
        }
        Ok(())
    }
}

fn check_common_grid<A, B>(n: &A, nu: &B) -> Result<()>
where
    A: SampledCurve + ?Sized,
    B: SampledCurve + ?Sized,
{
    if n.energies() != nu.energies() {
        return Err(Error::InvalidArgument("curves must share one energy grid".into()));
    }
    Ok(())
}

/// Smallest energy `E'` such that `N_u ≥ target` on all of `[E', e_hi]`,
/// located by log-log inversion of the last upward crossing.
fn invert_from_above<B: SampledCurve + ?Sized>(nu: &B, target: f64, at: f64) -> Result<f64> {
    let es = nu.energies();
    let vs = nu.values();
    let last = vs.len() - 1;
    if vs[last] < target {
        return Err(Error::WindowTooWide { energy: at, target });
    }
    let mut j = last;
    while j > 0 && vs[j - 1] >= target {
        j -= 1;
    }
    if j == 0 {
        return Ok(es[0]);
    }
    let (v0, v1) = (vs[j - 1], vs[j]);
    if v0 <= 0.0 {
        return Ok(es[j]);
    }
    let (l0, l1) = (es[j - 1].ln(), es[j].ln());
    let t = (target.ln() - v0.ln()) / (v1.ln() - v0.ln());
    Ok((l0 + t * (l1 - l0)).exp().min(es[j]))
}

/// Upper-bound constant: the largest over the window of the smallest `C`
/// with `N(E) ≤ N_u(C·E)`.
pub fn fit_c4<A, B>(n: &A, nu: &B, window: &FitWindow) -> Result<f64>
where
    A: SampledCurve + ?Sized,
    B: SampledCurve + ?Sized,
{
    check_common_grid(n, nu)?;
    let es = n.energies();
    let mut c4 = f64::NEG_INFINITY;
    for k in window.indices() {
        let e_star = invert_from_above(nu, n.values()[k], es[k])?;
        c4 = c4.max(e_star / es[k]);
    }
    Ok(c4)
}

/// Window points where `ln(N_u(C·E)/N(E))` is defined for every `C` in `[lo, hi]`.
fn usable_for_range<A, B>(n: &A, nu: &B, window: &FitWindow, lo: f64, hi: f64) -> Vec<usize>
where
    A: SampledCurve + ?Sized,
    B: SampledCurve + ?Sized,
{
    let es = n.energies();
    let e_hi = es[es.len() - 1];
    window
        .indices()
        .filter(|&k| {
            let e = es[k];
            if lo * e < es[0] || hi * e > e_hi {
                return false;
            }
            // N_u(C·E) must be positive over the whole bracket [lo·E, hi·E].
            let first = es.partition_point(|&x| x <= lo * e).saturating_sub(1);
            let last = es.partition_point(|&x| x < hi * e).min(es.len() - 1);
            nu.values()[first..=last].iter().all(|&v| v > 0.0)
        })
        .collect()
}

fn log_ratio_spread<A, B>(n: &A, nu: &B, points: &[usize], c: f64) -> Result<f64>
where
    A: SampledCurve + ?Sized,
    B: SampledCurve + ?Sized,
{
    let es = n.energies();
    let logs = points
        .iter()
        .map(|&k| Ok((loglog_interpolate(nu, c * es[k])? / n.values()[k]).ln()))
        .collect::<Result<Vec<f64>>>()?;
    let m = logs.iter().sum::<f64>() / logs.len() as f64;
    Ok((logs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / logs.len() as f64).sqrt())
}

/// Shift constant: the `C` minimising the spread of `ln(N_u(C·E)/N(E))`
/// over the window, by a grid scan followed by one finer scan around the
/// best grid value.
pub fn fit_c6<A, B>(n: &A, nu: &B, window: &FitWindow, scan: &C6Scan) -> Result<f64>
where
    A: SampledCurve + ?Sized,
    B: SampledCurve + ?Sized,
{
    check_common_grid(n, nu)?;
    scan.validate()?;
    let points = usable_for_range(n, nu, window, scan.lo, scan.hi);
    if points.len() < MIN_USABLE_POINTS {
        return Err(Error::InsufficientData(format!(
            "{} usable window points for the C6 scan, need {MIN_USABLE_POINTS}",
            points.len()
        )));
    }
    let best_of = |lo: f64, hi: f64| -> Result<f64> {
        let step = (hi - lo) / (scan.steps - 1) as f64;
        let mut best = (f64::INFINITY, lo);
        for i in 0..scan.steps {
            let c = lo + step * i as f64;
            let spread = log_ratio_spread(n, nu, &points, c)?;
            if spread < best.0 {
                best = (spread, c);
            }
        }
        Ok(best.1)
    };
    let coarse = best_of(scan.lo, scan.hi)?;
    let h = scan.step();
    best_of((coarse - h).max(scan.lo), (coarse + h).min(scan.hi))
}

/// Prefactors at a given shift: `C5 = min N(E)/N_u(C6·E)` and
/// `C5,fit = exp(mean ln(N(E)/N_u(C6·E)))`.
pub fn fit_c5<A, B>(n: &A, nu: &B, c6: f64, window: &FitWindow) -> Result<(f64, f64)>
where
    A: SampledCurve + ?Sized,
    B: SampledCurve + ?Sized,
{
    check_common_grid(n, nu)?;
    let points = usable_for_range(n, nu, window, c6, c6);
    if points.len() < MIN_USABLE_POINTS {
        return Err(Error::InsufficientData(format!(
            "{} usable window points for C5, need {MIN_USABLE_POINTS}",
            points.len()
        )));
    }
    let es = n.energies();
    let mut c5 = f64::INFINITY;
    let mut log_sum = 0.0;
    for &k in &points {
        let ratio = n.values()[k] / loglog_interpolate(nu, c6 * es[k])?;
        c5 = c5.min(ratio);
        log_sum += ratio.ln();
    }
    Ok((c5, (log_sum / points.len() as f64).exp()))
}

/// Twice the sample standard deviation across groups, per reciprocal constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBars {
    pub inv_c4: f64,
    pub inv_c5: f64,
    pub inv_c5_fit: f64,
    pub inv_c6: f64,
}

impl ErrorBars {
    /// `rows[g] = [1/C4, 1/C5, 1/C5,fit, 1/C6]` for group `g`.
    pub fn from_reciprocals(rows: &[[f64; 4]]) -> Self {
        let two_sigma = |j: usize| {
            let m = rows.len() as f64;
            if rows.len() < 2 {
                return 0.0;
            }
            let mean = rows.iter().map(|r| r[j]).sum::<f64>() / m;
            let var = rows.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / (m - 1.0);
            2.0 * var.sqrt()
        };
        Self {
            inv_c4: two_sigma(0),
            inv_c5: two_sigma(1),
            inv_c5_fit: two_sigma(2),
            inv_c6: two_sigma(3),
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.inv_c4, self.inv_c5, self.inv_c5_fit, self.inv_c6]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantsReport {
    pub c4: f64,
    pub c5: f64,
    pub c5_fit: f64,
    pub c6: f64,
    pub window: FitWindow,
    pub error_bars: Option<ErrorBars>,
}

impl ConstantsReport {
    /// `[1/C4, 1/C5, 1/C5,fit, 1/C6]`.
    pub fn reciprocals(&self) -> [f64; 4] {
        [1.0 / self.c4, 1.0 / self.c5, 1.0 / self.c5_fit, 1.0 / self.c6]
    }

    pub fn names() -> [&'static str; 4] {
        ["C4", "C5", "C5_fit", "C6"]
    }

    pub fn values(&self) -> [f64; 4] {
        [self.c4, self.c5, self.c5_fit, self.c6]
    }
}

/// Full constant extraction on a pair of averaged curves.
pub fn fit_constants<A, B>(n: &A, nu: &B, bounds: &WindowBounds, scan: &C6Scan) -> Result<ConstantsReport>
where
    A: SampledCurve + ?Sized,
    B: SampledCurve + ?Sized,
{
    let window = bounds.resolve(n, nu)?;
    let c4 = fit_c4(n, nu, &window)?;
    let c6 = fit_c6(n, nu, &window, scan)?;
    let (c5, c5_fit) = fit_c5(n, nu, c6, &window)?;
    Ok(ConstantsReport {
        c4,
        c5,
        c5_fit,
        c6,
        window,
        error_bars: None,
    })
}

/// Worst-case ratios of the two-sided bound over the window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichCheck {
    /// Window points where both sides could be evaluated.
    pub checked: usize,
    /// `max N(E) / N_u(C4·E)`; the upper bound holds when ≤ 1.
    pub upper: f64,
    /// `max C5·N_u(C6·E) / N(E)`; the lower bound holds when ≤ 1.
    pub lower: f64,
}

impl SandwichCheck {
    pub fn holds(&self, slack: f64) -> bool {
        self.checked > 0 && self.upper <= slack && self.lower <= slack
    }
}

/// Evaluate `C5·N_u(C6 E) ≤ N(E) ≤ N_u(C4 E)` at every window point of
/// `n`/`nu` (which may be different curves from the ones the constants were
/// fitted on). Points whose shifted energies fall off the grid are skipped.
pub fn check_sandwich<A, B>(n: &A, nu: &B, report: &ConstantsReport, window: &FitWindow) -> Result<SandwichCheck>
where
    A: SampledCurve + ?Sized,
    B: SampledCurve + ?Sized,
{
    check_common_grid(n, nu)?;
    let es = n.energies();
    let mut out = SandwichCheck {
        checked: 0,
        upper: 0.0,
        lower: 0.0,
    };
    for k in window.indices() {
        let e = es[k];
        let (upper, lower) = match (
            loglog_interpolate(nu, report.c4 * e),
            loglog_interpolate(nu, report.c6 * e),
        ) {
            (Ok(a), Ok(b)) => (a, b),
            _ => continue,
        };
        let nk = n.values()[k];
        out.checked += 1;
        out.upper = out.upper.max(if upper > 0.0 { nk / upper } else { f64::INFINITY });
        out.lower = out.lower.max(report.c5 * lower / nk);
    }
    Ok(out)
}

/// `R(E) = N_u(E / (1 + d/4)) / N(E)` at every grid point where it is defined.
pub fn universal_ratio<A, B>(n: &A, nu: &B, dimension: usize) -> Result<Vec<(f64, f64)>>
where
    A: SampledCurve + ?Sized,
    B: SampledCurve + ?Sized,
{
    check_common_grid(n, nu)?;
    let shift = 1.0 + dimension as f64 / 4.0;
    Ok(n.energies()
        .iter()
        .zip(n.values())
        .filter(|(_, &v)| v > 0.0)
        .filter_map(|(&e, &v)| {
            loglog_interpolate(nu, e / shift)
                .ok()
                .filter(|&x| x > 0.0)
                .map(|x| (e, x / v))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{CurveKind, EnergyGrid, SpectralCurve};

    fn curve(grid: &EnergyGrid, f: impl Fn(f64) -> f64) -> SpectralCurve {
        let counts = grid.values().iter().map(|&e| f(e)).collect();
        SpectralCurve::new(grid.clone(), counts, CurveKind::Idos).unwrap()
    }

    #[test]
    fn interpolation_exact_at_nodes_and_for_power_laws() {
        let grid = EnergyGrid::log(0.01, 10.0, 31).unwrap();
        let c = curve(&grid, |e| e * e);
        for (&e, &v) in grid.values().iter().zip(&c.counts) {
            assert_eq!(loglog_interpolate(&c, e).unwrap(), v);
        }
        for w in grid.values().windows(2) {
            let mid = (w[0] * w[1]).sqrt();
            let got = loglog_interpolate(&c, mid).unwrap();
            assert!((got / (mid * mid) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn interpolation_errors() {
        let grid = EnergyGrid::log(0.1, 1.0, 5).unwrap();
        let c = curve(&grid, |e| if e < 0.3 { 0.0 } else { e });
        assert!(matches!(loglog_interpolate(&c, 0.05), Err(Error::OutOfRange { .. })));
        assert!(matches!(loglog_interpolate(&c, 1.5), Err(Error::OutOfRange { .. })));
        assert!(matches!(loglog_interpolate(&c, 0.15), Err(Error::UndefinedRegion(_))));
    }

    #[test]
    fn identical_curves() {
        let grid = EnergyGrid::log(0.01, 5.0, 120).unwrap();
        let n = curve(&grid, |e| (-1.0 / e.sqrt()).exp());
        let window = FitWindow::new(&n, &n, 0.02, 4.0).unwrap();
        assert!((fit_c4(&n, &n, &window).unwrap() - 1.0).abs() < 1e-12);
        let (c5, c5_fit) = fit_c5(&n, &n, 1.0, &window).unwrap();
        assert!((c5 - 1.0).abs() < 1e-12 && (c5_fit - 1.0).abs() < 1e-12);
    }

    #[test]
    fn window_too_wide() {
        let grid = EnergyGrid::log(0.1, 1.0, 10).unwrap();
        let n = curve(&grid, |e| e);
        let nu = curve(&grid, |e| 0.5 * e);
        let window = FitWindow::new(&n, &nu, 0.1, 1.0).unwrap();
        assert!(matches!(fit_c4(&n, &nu, &window), Err(Error::WindowTooWide { .. })));
    }

    #[test]
    fn c6_needs_enough_points() {
        let grid = EnergyGrid::log(0.1, 1.0, 10).unwrap();
        let n = curve(&grid, |e| e);
        let window = FitWindow::new(&n, &n, 0.9, 1.0).unwrap();
        assert!(matches!(
            fit_c6(&n, &n, &window, &C6Scan::default()),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn error_bars_of_identical_groups_vanish() {
        let rows = vec![[1.2, 5.0, 4.0, 1.1]; 5];
        assert_eq!(ErrorBars::from_reciprocals(&rows).as_array(), [0.0; 4]);
    }

    #[test]
    fn flat_ratio_is_one() {
        let grid = EnergyGrid::log(0.1, 1.0, 10).unwrap();
        let n = curve(&grid, |_| 0.3);
        let r = universal_ratio(&n, &n, 1).unwrap();
        assert!(!r.is_empty());
        assert!(r.iter().all(|&(_, x)| x == 1.0));
    }
}
