//! Exact integrated density of states by spectrum slicing.
//!
//! By Sylvester's law of inertia, the number of negative pivots in an
//! `LDLᵀ` factorization of `H − E·I` equals `#{λ(H) < E}`. In 1D the matrix
//! is periodic tridiagonal and is eliminated with one fill column. In 2D the
//! lattice rows are visited in folded order `0, L−1, 1, L−2, …` so that the
//! periodic wrap in `y` stays within a band of half-width `2L`, and a banded
//! `LDLᵀ` without pivoting is run over a rolling window of `2L + 1` rows.
//!
//! A pivot smaller than `1e-12 · (v_max + 4d)` triggers a retry at
//! `E · (1 + δ)` for δ = 1e-9, 1e-8, 1e-7 before giving up. The final pivot
//! is exempt: it eliminates nothing, and a zero there means `E` itself is an
//! eigenvalue, which `λ < E` does not count.

use rayon::prelude::*;

use crate::curve::{CurveKind, EnergyGrid, SpectralCurve};
use crate::cyclic::{self, PivotScan};
use crate::dense::{self, DenseMatrix};
use crate::error::{Error, Result};
use crate::lattice::{LatticeModel, DENSE_CAP};

const PIVOT_REL_THRESHOLD: f64 = 1e-12;
const RETRY_SHIFTS: [f64; 3] = [1e-9, 1e-8, 1e-7];

/// Reusable per-model state for repeated inertia counts.
pub struct InertiaCounter<'a> {
    model: &'a LatticeModel,
    diag: Vec<f64>,
    folded: Option<FoldedOrder>,
    threshold: f64,
}

struct FoldedOrder {
    side: usize,
    /// Ordering position → lattice site.
    site_at: Vec<usize>,
    /// Lattice site → ordering position.
    position: Vec<usize>,
}

impl FoldedOrder {
    fn new(side: usize) -> Self {
        let rows: Vec<usize> = (0..side)
            .map(|k| if k % 2 == 0 { k / 2 } else { side - 1 - k / 2 })
            .collect();
        let n = side * side;
        let mut site_at = Vec::with_capacity(n);
        for &y in &rows {
            site_at.extend((0..side).map(|x| y * side + x));
        }
        let mut position = vec![0; n];
        for (pos, &site) in site_at.iter().enumerate() {
            position[site] = pos;
        }
        Self {
            side,
            site_at,
            position,
        }
    }

    fn half_bandwidth(&self) -> usize {
        2 * self.side
    }
}

impl<'a> InertiaCounter<'a> {
    pub fn new(model: &'a LatticeModel) -> Self {
        let diag = (0..model.sites()).map(|i| model.diagonal(i)).collect();
        let folded = (model.spec().dimension() == 2).then(|| FoldedOrder::new(model.spec().side()));
        Self {
            model,
            diag,
            folded,
            threshold: PIVOT_REL_THRESHOLD * model.spectral_ceiling(),
        }
    }

    /// `#{λ(H) < energy}`.
    pub fn count_below(&self, energy: f64) -> Result<usize> {
        if energy <= 0.0 {
            return Ok(0);
        }
        if energy > self.model.spectral_ceiling() {
            return Ok(self.model.sites());
        }
        let mut last_pivot = 0.0;
        for delta in std::iter::once(0.0).chain(RETRY_SHIFTS) {
            let shift = energy * (1.0 + delta);
            match self.scan(shift) {
                PivotScan::Count(c) => return Ok(c),
                PivotScan::TinyPivot(p) => last_pivot = p,
            }
        }
        Err(Error::Factorization {
            energy,
            pivot: last_pivot,
        })
    }

    fn scan(&self, shift: f64) -> PivotScan {
        match &self.folded {
            None => cyclic::count_negative_pivots(&self.diag, shift, self.threshold),
            Some(order) => banded_negative_pivots(self.model, order, &self.diag, shift, self.threshold),
        }
    }
}

fn banded_negative_pivots(
    model: &LatticeModel,
    order: &FoldedOrder,
    diag: &[f64],
    shift: f64,
    threshold: f64,
) -> PivotScan {
    let n = order.site_at.len();
    let b = order.half_bandwidth().min(n - 1);
    let width = b + 1;
    // Row r of the active window holds A[r, r..=r+b] in slot r % width.
    let mut window = vec![0.0; width * width];
    let load = |window: &mut [f64], r: usize| {
        let row = &mut window[(r % width) * width..][..width];
        row.fill(0.0);
        let site = order.site_at[r];
        row[0] = diag[site] - shift;
        for nb in model.spec().neighbors(site) {
            let c = order.position[nb];
            if c > r {
                row[c - r] -= 1.0;
            }
        }
    };
    for r in 0..width.min(n) {
        load(&mut window, r);
    }

    let mut pivot_row = vec![0.0; width];
    let mut negatives = 0;
    for k in 0..n {
        pivot_row.copy_from_slice(&window[(k % width) * width..][..width]);
        let p = pivot_row[0];
        if k + 1 == n {
            if p < 0.0 {
                negatives += 1;
            }
            break;
        }
        if p.abs() < threshold {
            return PivotScan::TinyPivot(p);
        }
        if p < 0.0 {
            negatives += 1;
        }
        let inv = 1.0 / p;
        let reach = b.min(n - 1 - k);
        for i in 1..=reach {
            let a_ki = pivot_row[i];
            if a_ki == 0.0 {
                continue;
            }
            let factor = a_ki * inv;
            let dst = &mut window[((k + i) % width) * width..][..width - i];
            for (d, s) in dst.iter_mut().zip(&pivot_row[i..]) {
                *d -= factor * s;
            }
        }
        if k + width < n {
            load(&mut window, k + width);
        }
    }
    PivotScan::Count(negatives)
}

/// Number of eigenvalues of `H` strictly below `energy`.
pub fn count_eigenvalues_below(model: &LatticeModel, energy: f64) -> Result<usize> {
    InertiaCounter::new(model).count_below(energy)
}

/// `N(E)` per site on every grid energy, energies factored in parallel.
pub fn idos_curve(model: &LatticeModel, grid: &EnergyGrid) -> Result<SpectralCurve> {
    let counter = InertiaCounter::new(model);
    let sites = model.sites() as f64;
    let counts = grid
        .values()
        .par_iter()
        .map(|&e| counter.count_below(e).map(|c| c as f64 / sites))
        .collect::<Result<Vec<_>>>()?;
    SpectralCurve::new(grid.clone(), counts, CurveKind::Idos)
}

/// All eigenvalues of a small symmetric matrix, ascending (Jacobi oracle).
pub fn dense_eigenvalues(matrix: &DenseMatrix) -> Result<Vec<f64>> {
    if matrix.dim() > DENSE_CAP {
        return Err(Error::SizeLimit {
            sites: matrix.dim(),
            cap: DENSE_CAP,
        });
    }
    dense::jacobi_eigenvalues(matrix)
}

/// Outcome of comparing inertia counts against a dense eigendecomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleSummary {
    pub checked: usize,
    /// Energies within the exclusion gap of a dense eigenvalue.
    pub skipped: usize,
}

/// Compare [`count_eigenvalues_below`] with the count of dense eigenvalues
/// below each energy. Energies closer than `gap` to a dense eigenvalue are
/// skipped; the first disagreement is an [`Error::OracleMismatch`].
pub fn cross_check_dense(model: &LatticeModel, energies: &[f64], gap: f64) -> Result<OracleSummary> {
    let eigenvalues = dense_eigenvalues(&model.assemble_dense()?)?;
    let counter = InertiaCounter::new(model);
    let mut summary = OracleSummary { checked: 0, skipped: 0 };
    for &e in energies {
        let dense = eigenvalues.partition_point(|&l| l < e);
        let near = [dense.checked_sub(1), Some(dense)]
            .into_iter()
            .flatten()
            .filter_map(|k| eigenvalues.get(k))
            .any(|&l| (l - e).abs() <= gap);
        if near {
            summary.skipped += 1;
            continue;
        }
        let inertia = counter.count_below(e)?;
        if inertia != dense {
            return Err(Error::OracleMismatch {
                energy: e,
                inertia,
                dense,
            });
        }
        summary.checked += 1;
    }
    Ok(summary)
}
