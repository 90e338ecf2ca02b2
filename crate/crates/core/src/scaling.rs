//! Low-energy scaling of the counting functions.
//!
//! Near the bottom of the spectrum both curves are expected to follow
//!
//! ```text
//! binary:   N(E) ≈ e^a · E^{d/2} · exp(b · E^{-d/2})
//! uniform:  N(E) ≈ e^a · E^{d/2} · exp(b · E^{-d/2} |ln E|)
//! ```
//!
//! which become straight lines `y = a·x + b` under the transforms of
//! [`ScalingTransform`]. Matching the fitted lines of `N` and `N_u` through
//! `N(E) = C5 · N_u(C6 E)` yields effective values of `C5` and `C6`.

use crate::curve::SampledCurve;
use crate::error::{Error, Result};
use crate::lattice::DistributionKind;

/// Fraction of nonzero grid points required in the low-energy decade.
pub const DECADE_COVERAGE: f64 = 0.8;

/// Minimum points for a least-squares line.
pub const MIN_FIT_POINTS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScalingTransform {
    pub kind: DistributionKind,
    pub dimension: usize,
}

impl ScalingTransform {
    pub fn new(kind: DistributionKind, dimension: usize) -> Self {
        Self { kind, dimension }
    }

    /// `(x, y)` for one sample; `None` outside `0 < E < 1` or for `N ≤ 0`.
    pub fn apply(&self, e: f64, n: f64) -> Option<(f64, f64)> {
        if !(e > 0.0 && e < 1.0 && n > 0.0) {
            return None;
        }
        let half_d = self.dimension as f64 / 2.0;
        let weyl = e.powf(half_d);
        let x = match self.kind {
            DistributionKind::Binary => weyl,
            DistributionKind::Uniform => weyl / e.ln().abs(),
        };
        Some((x, x * (n.ln() - half_d * e.ln())))
    }
}

/// Transformed points of `curve` for energies in `[e_lo, e_hi] ⊂ (0, 1)`,
/// skipping zero counts.
pub fn transform_curve<C: SampledCurve + ?Sized>(
    curve: &C,
    transform: &ScalingTransform,
    e_lo: f64,
    e_hi: f64,
) -> Result<Vec<(f64, f64)>> {
    if !(e_lo > 0.0 && e_hi < 1.0 && e_lo < e_hi) {
        return Err(Error::InvalidArgument(format!(
            "scaling window [{e_lo}, {e_hi}] must lie inside (0, 1)"
        )));
    }
    let points: Vec<(f64, f64)> = curve
        .energies()
        .iter()
        .zip(curve.values())
        .filter(|(&e, _)| e >= e_lo && e <= e_hi)
        .filter_map(|(&e, &n)| transform.apply(e, n))
        .collect();
    if points.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no positive counts in [{e_lo}, {e_hi}]"
        )));
    }
    Ok(points)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn fit_affine(points: &[(f64, f64)]) -> Result<AffineFit> {
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData(format!(
            "{} points for a line fit, need {MIN_FIT_POINTS}",
            points.len()
        )));
    }
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = points.iter().map(|&(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(AffineFit {
        slope,
        intercept,
        r_squared,
    })
}

/// `(c5_eff, c6_eff)` from the fitted lines of `N` and `N_u`:
/// `c6 = (b_nu / b_n)^{2/d}`, `c5 = e^{a_n − a_nu} · b_n / b_nu`.
pub fn effective_constants(fit_n: &AffineFit, fit_nu: &AffineFit, dimension: usize) -> Result<(f64, f64)> {
    if !(fit_n.intercept < 0.0 && fit_nu.intercept < 0.0) {
        return Err(Error::ScalingRegime(format!(
            "intercepts must be negative, got {} (N) and {} (N_u)",
            fit_n.intercept, fit_nu.intercept
        )));
    }
    let ratio = fit_nu.intercept / fit_n.intercept;
    let c6 = ratio.powf(2.0 / dimension as f64);
    let c5 = (fit_n.slope - fit_nu.slope).exp() / ratio;
    Ok((c5, c6))
}

/// Lowest decade `[E, 10E] ∩ (0, 1)` with `E ≥ floor` in which at least 80%
/// of the grid points have both mean curves positive.
pub fn low_energy_window<A, B>(n: &A, nu: &B, floor: f64) -> Result<(f64, f64)>
where
    A: SampledCurve + ?Sized,
    B: SampledCurve + ?Sized,
{
    let es = n.energies();
    for (i, &start) in es.iter().enumerate() {
        if start < floor {
            continue;
        }
        if start >= 1.0 {
            break;
        }
        let end = (10.0 * start).min(1.0);
        let members: Vec<usize> = (i..es.len()).take_while(|&k| es[k] <= end && es[k] < 1.0).collect();
        if members.len() < MIN_FIT_POINTS {
            continue;
        }
        let positive = members
            .iter()
            .filter(|&&k| n.values()[k] > 0.0 && nu.values()[k] > 0.0)
            .count();
        if positive >= MIN_FIT_POINTS && positive as f64 >= DECADE_COVERAGE * members.len() as f64 {
            return Ok((start, es[*members.last().unwrap()]));
        }
    }
    Err(Error::InsufficientData(
        "no low-energy decade with enough positive counts".into(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingReport {
    pub transform: ScalingTransform,
    pub fit_n: AffineFit,
    pub fit_nu: AffineFit,
    pub c5_eff: f64,
    pub c6_eff: f64,
    pub e_lo: f64,
    pub e_hi: f64,
}

/// Full scaling analysis in an explicit window.
pub fn scaling_analysis_in<A, B>(
    n: &A,
    nu: &B,
    transform: ScalingTransform,
    e_lo: f64,
    e_hi: f64,
) -> Result<ScalingReport>
where
    A: SampledCurve + ?Sized,
    B: SampledCurve + ?Sized,
{
    let fit_n = fit_affine(&transform_curve(n, &transform, e_lo, e_hi)?)?;
    let fit_nu = fit_affine(&transform_curve(nu, &transform, e_lo, e_hi)?)?;
    let (c5_eff, c6_eff) = effective_constants(&fit_n, &fit_nu, transform.dimension)?;
    Ok(ScalingReport {
        transform,
        fit_n,
        fit_nu,
        c5_eff,
        c6_eff,
        e_lo,
        e_hi,
    })
}

/// Full scaling analysis in the lowest usable decade at or above `floor`.
pub fn scaling_analysis<A, B>(n: &A, nu: &B, transform: ScalingTransform, floor: f64) -> Result<ScalingReport>
where
    A: SampledCurve + ?Sized,
    B: SampledCurve + ?Sized,
{
    let (e_lo, e_hi) = low_energy_window(n, nu, floor)?;
    scaling_analysis_in(n, nu, transform, e_lo, e_hi)
}
