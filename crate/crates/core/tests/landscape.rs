use landscape_idos::landscape::landscape_identity_residual;
use landscape_idos::spectral::dense_eigenvalues;
use landscape_idos::{solve_landscape, DistributionKind, LatticeModel, LatticeSpec, PotentialDistribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

const TOL: f64 = 1e-13;

/// Gaussian elimination with partial pivoting on a dense copy of `H`.
fn dense_solve(model: &LatticeModel, rhs: &[f64]) -> Vec<f64> {
    let n = model.sites();
    let a = model.assemble_dense().unwrap();
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            let mut row = a.mul_vec(&e);
            row.push(rhs[i]);
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            let pivot_row = m[col].clone();
            for (x, p) in m[r][col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * p;
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let tail: f64 = (r + 1..n).map(|c| m[r][c] * x[c]).sum();
        x[r] = (m[r][n] - tail) / m[r][r];
    }
    x
}

fn sample(d: usize, side: usize, kind: DistributionKind, seed: u64) -> LatticeModel {
    let spec = LatticeSpec::new(d, side).unwrap();
    LatticeModel::sample(spec, &PotentialDistribution::new(kind, 1.0).unwrap(), seed)
}

#[test]
fn five_site_ring_matches_gaussian_elimination() {
    let spec = LatticeSpec::new(1, 5).unwrap();
    let model = LatticeModel::from_potential(spec, vec![1.0, 0.0, 0.0, 2.0, 0.0]).unwrap();
    let land = solve_landscape(&model, TOL).unwrap();
    let want = dense_solve(&model, &[1.0; 5]);
    for (u, v) in land.u().iter().zip(&want) {
        assert!((u - v).abs() <= 1e-10 * v.abs(), "{u} vs {v}");
    }
}

#[test]
fn two_dimensional_solve_matches_gaussian_elimination() {
    let model = sample(2, 8, DistributionKind::Uniform, 4);
    let land = solve_landscape(&model, TOL).unwrap();
    let want = dense_solve(&model, &vec![1.0; model.sites()]);
    for (u, v) in land.u().iter().zip(&want) {
        assert!((u - v).abs() <= 1e-9 * v.abs(), "{u} vs {v}");
    }
}

#[test]
fn constant_four_gives_quarter_landscape() {
    for (d, side) in [(1, 17), (2, 6)] {
        let spec = LatticeSpec::new(d, side).unwrap();
        let model = LatticeModel::from_potential(spec, vec![4.0; spec.sites()]).unwrap();
        let land = solve_landscape(&model, TOL).unwrap();
        assert!(land.u().iter().all(|&u| (u - 0.25).abs() < 1e-12));
        assert!(land.w().iter().all(|&w| (w - 4.0).abs() < 1e-10));
    }
}

#[test]
fn identity_holds_for_gaussian_vectors_on_10x10() {
    let model = sample(2, 10, DistributionKind::Binary, 21);
    let land = solve_landscape(&model, TOL).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let psi: Vec<f64> = (0..model.sites()).map(|_| StandardNormal.sample(&mut rng)).collect();
        let r = landscape_identity_residual(&model, &land, &psi).unwrap();
        assert!(r <= 1e-11, "residual {r}");
    }
}

#[test]
fn landscape_itself_has_zero_gradient_term() {
    let model = sample(1, 64, DistributionKind::Uniform, 2);
    let land = solve_landscape(&model, TOL).unwrap();
    let r = landscape_identity_residual(&model, &land, land.u()).unwrap();
    assert!(r <= 1e-12);
    let zero = vec![0.0; model.sites()];
    assert_eq!(landscape_identity_residual(&model, &land, &zero).unwrap(), 0.0);
}

#[test]
fn landscape_is_positive_on_many_models() {
    for seed in 0..500 {
        for kind in [DistributionKind::Binary, DistributionKind::Uniform] {
            let model = if seed % 2 == 0 {
                sample(1, 100, kind, seed)
            } else {
                sample(2, 8, kind, seed)
            };
            let land = solve_landscape(&model, 1e-10).unwrap();
            assert!(land.u().iter().all(|&u| u > 0.0), "seed {seed}");
        }
    }
}

#[test]
fn ground_state_is_above_landscape_minimum() {
    for seed in 0..10 {
        for (d, side) in [(1, 60), (2, 7)] {
            let model = sample(d, side, DistributionKind::Binary, 100 + seed);
            let land = solve_landscape(&model, TOL).unwrap();
            let eig = dense_eigenvalues(&model.assemble_dense().unwrap()).unwrap();
            assert!(eig[0] - land.min_w() >= -1e-10);
        }
    }
}
