//! Symmetric elimination of periodic tridiagonal systems.
//!
//! The matrix has diagonal `a_i`, `−1` on the first off-diagonals and `−1` in
//! the two corners. Rows are eliminated in natural order; the corner entry
//! becomes a fill column `f_i` coupling each row to the last unknown, so the
//! whole factorization is O(n) with no rank correction.

/// Outcome of a pivot scan: the inertia count or the first offending pivot.
pub(crate) enum PivotScan {
    Count(usize),
    TinyPivot(f64),
}

/// Count negative pivots of `A − shift·I` where `A` has diagonal `diag`.
/// Any pivot with `|p| < threshold` aborts the scan, except the final one.
pub(crate) fn count_negative_pivots(diag: &[f64], shift: f64, threshold: f64) -> PivotScan {
    let n = diag.len();
    debug_assert!(n >= 3);
    let mut negatives = 0usize;
    let mut p = diag[0] - shift;
    let mut f = -1.0;
    let mut last = diag[n - 1] - shift;
    for i in 0..n - 1 {
        if p.abs() < threshold {
            return PivotScan::TinyPivot(p);
        }
        if p < 0.0 {
            negatives += 1;
        }
        let inv = 1.0 / p;
        last -= f * f * inv;
        if i + 2 < n {
            let init = if i + 2 == n - 1 { -1.0 } else { 0.0 };
            f = init + f * inv;
            p = diag[i + 1] - shift - inv;
        }
    }
    // The final pivot eliminates nothing, so a zero here only means E is an
    // eigenvalue; it is not counted (λ < E is strict).
    if last < 0.0 {
        negatives += 1;
    }
    PivotScan::Count(negatives)
}

/// Solve `A x = b` for a positive-definite periodic tridiagonal `A`.
/// Returns `None` on a non-positive pivot.
pub(crate) fn solve(diag: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    debug_assert!(n >= 3 && b.len() == n);
    let mut pivots = vec![0.0; n - 1];
    let mut fill = vec![0.0; n - 1];
    let mut rhs = vec![0.0; n - 1];

    let mut p = diag[0];
    let mut f = -1.0;
    let mut r = b[0];
    let mut last = diag[n - 1];
    let mut r_last = b[n - 1];
    for i in 0..n - 1 {
        if p <= 0.0 || !p.is_finite() {
            return None;
        }
        pivots[i] = p;
        fill[i] = f;
        rhs[i] = r;
        let inv = 1.0 / p;
        last -= f * f * inv;
        r_last -= f * r * inv;
        if i + 2 < n {
            let init = if i + 2 == n - 1 { -1.0 } else { 0.0 };
            f = init + f * inv;
            r = b[i + 1] + r * inv;
            p = diag[i + 1] - inv;
        }
    }
    if last <= 0.0 || !last.is_finite() {
        return None;
    }

    let mut x = vec![0.0; n];
    x[n - 1] = r_last / last;
    x[n - 2] = (rhs[n - 2] - fill[n - 2] * x[n - 1]) / pivots[n - 2];
    for i in (0..n - 2).rev() {
        x[i] = (rhs[i] + x[i + 1] - fill[i] * x[n - 1]) / pivots[i];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_apply(diag: &[f64], x: &[f64]) -> Vec<f64> {
        let n = diag.len();
        (0..n)
            .map(|i| diag[i] * x[i] - x[(i + n - 1) % n] - x[(i + 1) % n])
            .collect()
    }

    #[test]
    fn solve_recovers_known_solution() {
        for n in [3, 4, 5, 17] {
            let diag: Vec<f64> = (0..n).map(|i| 2.0 + 0.3 * ((i * 5) % 7) as f64 + 0.1).collect();
            let x: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64).sin()).collect();
            let b = dense_apply(&diag, &x);
            let got = solve(&diag, &b).unwrap();
            for (g, e) in got.iter().zip(&x) {
                assert!((g - e).abs() < 1e-12, "n={n}: {g} vs {e}");
            }
        }
    }

    #[test]
    fn ring_inertia() {
        // V ≡ 1 ring of four: eigenvalues 1, 3, 3, 5.
        let diag = [3.0; 4];
        let count = |e| match count_negative_pivots(&diag, e, 1e-12) {
            PivotScan::Count(c) => c,
            PivotScan::TinyPivot(_) => panic!("tiny pivot at {e}"),
        };
        assert_eq!(count(0.5), 0);
        assert_eq!(count(1.5), 1);
        assert_eq!(count(4.5), 3);
        // E = 1 is an eigenvalue: only the final pivot vanishes.
        assert_eq!(count(1.0), 0);
        assert_eq!(count(6.0), 4);
    }
}
