//! The landscape law `N_u(E)`: the per-site number of cubes of side
//! `E^{-1/2}` on which `min W ≤ E`.
//!
//! Cube `k` along an axis covers the sites `x` with `k·h ≤ x < (k+1)·h`,
//! anchored at site 0, where the side `h` is
//!
//! * [`CubeRule::Exact`] (default): `max(1, E^{-1/2})`, a real length, so
//!   neighbouring cubes hold `⌊h⌋` or `⌈h⌉` sites;
//! * [`CubeRule::Rounded`]: `max(1, round(E^{-1/2}))` sites, halves rounded
//!   away from zero.
//!
//! Only full cubes (`(k+1)·h ≤ L`) are used; the remainder strip is dropped.
//! The denominator is always `|Ω| = L^d`.

use std::collections::HashMap;

use crate::curve::{CurveKind, EnergyGrid, SpectralCurve};
use crate::error::{Error, Result};
use crate::landscape::Landscape;
use crate::lattice::LatticeSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CubeRule {
    #[default]
    Exact,
    Rounded,
}

impl std::str::FromStr for CubeRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(CubeRule::Exact),
            "rounded" => Ok(CubeRule::Rounded),
            other => Err(Error::InvalidArgument(format!(
                "unknown cube rule `{other}` (expected exact or rounded)"
            ))),
        }
    }
}

impl std::fmt::Display for CubeRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CubeRule::Exact => "exact",
            CubeRule::Rounded => "rounded",
        })
    }
}

/// Integer cube edge in sites for energy `e`: `max(1, round(e^{-1/2}))`.
pub fn cube_side(e: f64) -> Result<usize> {
    check_energy(e)?;
    Ok((1.0 / e.sqrt()).round().max(1.0) as usize)
}

/// Cube edge length for energy `e` under `rule`.
pub fn cube_extent(e: f64, rule: CubeRule) -> Result<f64> {
    check_energy(e)?;
    Ok(match rule {
        CubeRule::Exact => (1.0 / e.sqrt()).max(1.0),
        CubeRule::Rounded => cube_side(e)? as f64,
    })
}

fn check_energy(e: f64) -> Result<()> {
    if !(e > 0.0) || !e.is_finite() {
        return Err(Error::InvalidArgument(format!("energy must be positive, got {e}")));
    }
    Ok(())
}

/// Partition of one axis of length `L` into full cubes of side `h ≥ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubePartition {
    side: f64,
    /// `bounds[k]..bounds[k+1]` are the sites of cube `k`.
    bounds: Vec<usize>,
}

impl CubePartition {
    pub fn new(spec: &LatticeSpec, side: f64) -> Result<Self> {
        let l = spec.side() as f64;
        if !(side >= 1.0 && side <= l) {
            return Err(Error::InvalidArgument(format!("cube side {side} must lie in [1, {l}]")));
        }
        let mut m = (l / side).floor() as usize;
        while m as f64 * side > l {
            m -= 1;
        }
        while (m + 1) as f64 * side <= l {
            m += 1;
        }
        let bounds = (0..=m).map(|k| (k as f64 * side).ceil() as usize).collect();
        Ok(Self { side, bounds })
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn cubes_per_axis(&self) -> usize {
        self.bounds.len() - 1
    }

    pub fn segments(&self) -> impl Iterator<Item = std::ops::Range<usize>> + '_ {
        self.bounds.windows(2).map(|b| b[0]..b[1])
    }
}

fn segment_min(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Minimum of `w` over every cube, cube-major order. In 2D this runs one pass
/// along `x` per row and then one pass along `y` per cube column.
pub fn cube_minima(w: &[f64], spec: &LatticeSpec, partition: &CubePartition) -> Vec<f64> {
    let l = spec.side();
    let m = partition.cubes_per_axis();
    match spec.dimension() {
        1 => partition.segments().map(|r| segment_min(&w[r])).collect(),
        _ => {
            let rows = partition.bounds[m];
            let mut row_minima = vec![0.0; rows * m];
            for y in 0..rows {
                let row = &w[y * l..(y + 1) * l];
                for (c, r) in partition.segments().enumerate() {
                    row_minima[y * m + c] = segment_min(&row[r]);
                }
            }
            let mut out = vec![f64::INFINITY; m * m];
            for (r, ys) in partition.segments().enumerate() {
                for y in ys {
                    for c in 0..m {
                        let v = row_minima[y * m + c];
                        if v < out[r * m + c] {
                            out[r * m + c] = v;
                        }
                    }
                }
            }
            out
        }
    }
}

/// `N_u(E)` for a single energy.
pub fn landscape_law_value(w: &[f64], spec: &LatticeSpec, e: f64, rule: CubeRule) -> Result<f64> {
    check_len(w, spec)?;
    let h = cube_extent(e, rule)?;
    if h > spec.side() as f64 {
        return Ok(0.0);
    }
    let partition = CubePartition::new(spec, h)?;
    let hits = cube_minima(w, spec, &partition).into_iter().filter(|&m| m <= e).count();
    Ok(hits as f64 / spec.sites() as f64)
}

/// Direct enumeration: every site is assigned to its cube from its own
/// coordinates and marks that cube when `W ≤ E` there. Oracle for the
/// two-pass path, which works from partition boundaries instead.
pub fn landscape_law_value_brute_force(w: &[f64], spec: &LatticeSpec, e: f64, rule: CubeRule) -> Result<f64> {
    check_len(w, spec)?;
    let h = cube_extent(e, rule)?;
    let l = spec.side();
    let cubes = (0..).take_while(|&k| (k + 1) as f64 * h <= l as f64).count();
    let cube_of = |x: usize| -> Option<usize> {
        let x = x as f64;
        let mut k = (x / h).floor() as usize;
        while k > 0 && k as f64 * h > x {
            k -= 1;
        }
        while (k + 1) as f64 * h <= x {
            k += 1;
        }
        (k < cubes).then_some(k)
    };
    let mut qualifies = vec![false; cubes.pow(spec.dimension() as u32)];
    for (site, &value) in w.iter().enumerate() {
        if value > e {
            continue;
        }
        let cube = match spec.dimension() {
            1 => cube_of(site),
            _ => cube_of(site / l).zip(cube_of(site % l)).map(|(ky, kx)| ky * cubes + kx),
        };
        if let Some(c) = cube {
            qualifies[c] = true;
        }
    }
    let hits = qualifies.into_iter().filter(|&q| q).count();
    Ok(hits as f64 / spec.sites() as f64)
}

fn check_len(w: &[f64], spec: &LatticeSpec) -> Result<()> {
    if w.len() != spec.sites() {
        return Err(Error::InvalidArgument(format!(
            "effective potential has {} entries, lattice has {} sites",
            w.len(),
            spec.sites()
        )));
    }
    Ok(())
}

/// `N_u` over a whole grid. Cube minima are computed once per distinct cube
/// side and sorted, so each energy costs a binary search.
pub fn landscape_law_curve(
    land: &Landscape,
    spec: &LatticeSpec,
    grid: &EnergyGrid,
    rule: CubeRule,
) -> Result<SpectralCurve> {
    landscape_law_curve_from_w(land.w(), spec, grid, rule)
}

pub fn landscape_law_curve_from_w(
    w: &[f64],
    spec: &LatticeSpec,
    grid: &EnergyGrid,
    rule: CubeRule,
) -> Result<SpectralCurve> {
    check_len(w, spec)?;
    let sites = spec.sites() as f64;
    let mut sorted_minima: HashMap<u64, Vec<f64>> = HashMap::new();
    let mut counts = Vec::with_capacity(grid.len());
    for &e in grid.values() {
        let h = cube_extent(e, rule)?;
        if h > spec.side() as f64 {
            counts.push(0.0);
            continue;
        }
        let minima = match sorted_minima.get(&h.to_bits()) {
            Some(m) => m,
            None => {
                let partition = CubePartition::new(spec, h)?;
                let mut m = cube_minima(w, spec, &partition);
                m.sort_by(f64::total_cmp);
                sorted_minima.entry(h.to_bits()).or_insert(m)
            }
        };
        let hits = minima.partition_point(|&m| m <= e);
        counts.push(hits as f64 / sites);
    }
    let curve = SpectralCurve::new(grid.clone(), counts, CurveKind::LandscapeLaw)?;
    let drops: Vec<usize> = (1..curve.counts.len())
        .filter(|&k| curve.counts[k] < curve.counts[k - 1])
        .collect();
    if let Some(&first) = drops.first() {
        log::debug!(
            "landscape law decreases at {} of {} grid steps, first between E = {} and E = {}",
            drops.len(),
            grid.len() - 1,
            grid.values()[first - 1],
            grid.values()[first]
        );
    }
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_side_rounding() {
        assert_eq!(cube_side(1.0).unwrap(), 1);
        assert_eq!(cube_side(0.25).unwrap(), 2);
        assert_eq!(cube_side(0.02).unwrap(), 7);
        assert_eq!(cube_side(100.0).unwrap(), 1);
        assert!(cube_side(0.0).is_err());
        assert!(cube_side(-1.0).is_err());
    }

    #[test]
    fn cube_extent_rules() {
        assert_eq!(cube_extent(0.25, CubeRule::Exact).unwrap(), 2.0);
        assert!((cube_extent(0.02, CubeRule::Exact).unwrap() - 50f64.sqrt()).abs() < 1e-12);
        assert_eq!(cube_extent(0.02, CubeRule::Rounded).unwrap(), 7.0);
        assert_eq!(cube_extent(4.0, CubeRule::Exact).unwrap(), 1.0);
    }

    #[test]
    fn exact_partition_alternates_sizes() {
        let spec = LatticeSpec::new(1, 10).unwrap();
        let p = CubePartition::new(&spec, 2.5).unwrap();
        let sizes: Vec<usize> = p.segments().map(|r| r.len()).collect();
        assert_eq!(sizes, vec![3, 2, 3, 2]);
        let p = CubePartition::new(&spec, 3.0).unwrap();
        assert_eq!(p.cubes_per_axis(), 3);
        assert!(CubePartition::new(&spec, 0.5).is_err());
        assert!(CubePartition::new(&spec, 11.0).is_err());
    }

    #[test]
    fn constant_landscape() {
        let spec = LatticeSpec::new(1, 100).unwrap();
        let w = vec![1.0; 100];
        for rule in [CubeRule::Exact, CubeRule::Rounded] {
            assert_eq!(landscape_law_value(&w, &spec, 0.5, rule).unwrap(), 0.0);
            assert_eq!(landscape_law_value(&w, &spec, 1.0, rule).unwrap(), 1.0);
            let grid = EnergyGrid::from_values(vec![0.5, 1.0, 2.0], crate::Spacing::Linear).unwrap();
            let c = landscape_law_curve_from_w(&w, &spec, &grid, rule).unwrap();
            assert_eq!(c.counts, vec![0.0, 1.0, 1.0]);
        }
    }

    #[test]
    fn remainder_strip_is_dropped() {
        // L = 10, s = 3: cubes [0,3), [3,6), [6,9); site 9 never counts.
        let spec = LatticeSpec::new(1, 10).unwrap();
        let mut w = vec![5.0; 10];
        w[9] = 0.0;
        let e = 1.0 / 9.0;
        for rule in [CubeRule::Exact, CubeRule::Rounded] {
            assert_eq!(landscape_law_value(&w, &spec, e, rule).unwrap(), 0.0);
        }
        w[4] = 0.0;
        assert_eq!(landscape_law_value(&w, &spec, e, CubeRule::Rounded).unwrap(), 0.1);
    }

    #[test]
    fn cube_larger_than_domain_counts_nothing() {
        let spec = LatticeSpec::new(2, 4).unwrap();
        let w = vec![0.0; 16];
        assert_eq!(landscape_law_value(&w, &spec, 0.01, CubeRule::Exact).unwrap(), 0.0);
    }
}
