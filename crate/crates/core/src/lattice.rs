//! Anderson tight-binding models on periodic `d`-dimensional lattices.
//!
//! The Hamiltonian is
//!
//! ```text
//! (Hψ)_i = (V_i + 2d) ψ_i − Σ_{j ~ i} ψ_j
//! ```
//!
//! with unit hopping and periodic wrap along every axis. The `2d` uplift puts
//! the bottom of the spectrum at zero, so `spec(H) ⊂ [0, v_max + 4d]`.
//!
//! Random potentials come from ChaCha8 seeded through `seed_from_u64`; see
//! [`sample_potential`] for the exact bit mapping.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

/// Default largest model that may be assembled densely.
pub const DENSE_CAP: usize = 4096;

/// Geometry of a periodic hypercubic lattice with unit hopping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeSpec {
    dimension: usize,
    side: usize,
}

impl LatticeSpec {
    pub fn new(dimension: usize, side: usize) -> Result<Self> {
        if !(1..=2).contains(&dimension) {
            return Err(Error::InvalidArgument(format!(
                "dimension must be 1 or 2, got {dimension}"
            )));
        }
        if side < 3 {
            return Err(Error::InvalidArgument(format!("side must be at least 3, got {side}")));
        }
        Ok(Self { dimension, side })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn side(&self) -> usize {
        self.side
    }

    /// |Ω| = L^d.
    pub fn sites(&self) -> usize {
        self.side.pow(self.dimension as u32)
    }

    /// Diagonal shift 2d that makes the hopping Laplacian non-negative.
    pub fn uplift(&self) -> f64 {
        2.0 * self.dimension as f64
    }

    /// Hopping amplitude, fixed to 1.
    pub fn hopping(&self) -> f64 {
        1.0
    }

    /// Periodic nearest neighbours of `site`, in the order −x, +x, −y, +y.
    pub fn neighbors(&self, site: usize) -> impl Iterator<Item = usize> {
        let l = self.side;
        let x = site % l;
        let left = site - x + (x + l - 1) % l;
        let right = site - x + (x + 1) % l;
        let (down, up) = if self.dimension == 2 {
            let y = site / l;
            (Some(((y + l - 1) % l) * l + x), Some(((y + 1) % l) * l + x))
        } else {
            (None, None)
        };
        [Some(left), Some(right), down, up].into_iter().flatten()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistributionKind {
    Binary,
    Uniform,
}

impl std::str::FromStr for DistributionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "binary" => Ok(DistributionKind::Binary),
            "uniform" => Ok(DistributionKind::Uniform),
            other => Err(Error::InvalidArgument(format!(
                "unknown distribution kind `{other}` (expected binary or uniform)"
            ))),
        }
    }
}

impl std::fmt::Display for DistributionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DistributionKind::Binary => "binary",
            DistributionKind::Uniform => "uniform",
        })
    }
}

/// I.i.d. on-site law: `{0, v_max}` with equal weight, or uniform on `[0, v_max)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialDistribution {
    pub kind: DistributionKind,
    pub v_max: f64,
}

impl PotentialDistribution {
    pub fn new(kind: DistributionKind, v_max: f64) -> Result<Self> {
        if !(v_max >= 0.0 && v_max.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "v_max must be finite and non-negative, got {v_max}"
            )));
        }
        Ok(Self { kind, v_max })
    }

    /// Cumulative distribution P(V ≤ e).
    pub fn cdf(&self, e: f64) -> f64 {
        if e < 0.0 {
            return 0.0;
        }
        if e >= self.v_max {
            return 1.0;
        }
        match self.kind {
            DistributionKind::Binary => 0.5,
            DistributionKind::Uniform => e / self.v_max,
        }
    }

    /// Expected on-site value, `v_max / 2` for both laws.
    pub fn mean(&self) -> f64 {
        0.5 * self.v_max
    }
}

/// Draw `L^d` i.i.d. potential values.
///
/// Each value consumes one `u64` from a `ChaCha8Rng` seeded with
/// `seed_from_u64(seed)`. Binary uses the top bit (1 → `v_max`); uniform maps
/// the top 53 bits to `[0, 1)` and scales by `v_max`.
pub fn sample_potential(spec: &LatticeSpec, dist: &PotentialDistribution, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.sites();
    match dist.kind {
        DistributionKind::Binary => (0..n)
            .map(|_| if rng.next_u64() >> 63 == 1 { dist.v_max } else { 0.0 })
            .collect(),
        DistributionKind::Uniform => {
            const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
            (0..n)
                .map(|_| ((rng.next_u64() >> 11) as f64 * SCALE) * dist.v_max)
                .collect()
        }
    }
}

/// One disorder realization. Immutable once built.
#[derive(Debug, Clone)]
pub struct LatticeModel {
    spec: LatticeSpec,
    potential: Vec<f64>,
    v_max: f64,
    seed: Option<u64>,
}

impl LatticeModel {
    pub fn sample(spec: LatticeSpec, dist: &PotentialDistribution, seed: u64) -> Self {
        let potential = sample_potential(&spec, dist, seed);
        Self {
            spec,
            potential,
            v_max: dist.v_max,
            seed: Some(seed),
        }
    }

    /// Build a model from explicit pre-uplift on-site values.
    pub fn from_potential(spec: LatticeSpec, potential: Vec<f64>) -> Result<Self> {
        if potential.len() != spec.sites() {
            return Err(Error::InvalidArgument(format!(
                "potential has {} entries, lattice has {} sites",
                potential.len(),
                spec.sites()
            )));
        }
        if let Some(v) = potential.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "potential values must be finite and non-negative, found {v}"
            )));
        }
        let v_max = potential.iter().copied().fold(0.0, f64::max);
        Ok(Self {
            spec,
            potential,
            v_max,
            seed: None,
        })
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    pub fn sites(&self) -> usize {
        self.potential.len()
    }

    /// Upper end of the Gershgorin interval `[0, v_max + 4d]`.
    pub fn spectral_ceiling(&self) -> f64 {
        self.v_max + 2.0 * self.spec.uplift()
    }

    /// Uplifted diagonal entry `V_i + 2d`.
    #[inline]
    pub fn diagonal(&self, site: usize) -> f64 {
        self.potential[site] + self.spec.uplift()
    }

    pub fn apply_hamiltonian(&self, psi: &[f64]) -> Result<Vec<f64>> {
        if psi.len() != self.sites() {
            return Err(Error::InvalidArgument(format!(
                "vector has length {}, expected {}",
                psi.len(),
                self.sites()
            )));
        }
        let mut out = vec![0.0; psi.len()];
        self.apply_into(psi, &mut out);
        Ok(out)
    }

    /// `out = H psi`. Both slices must have length `|Ω|`.
    pub fn apply_into(&self, psi: &[f64], out: &mut [f64]) {
        let l = self.spec.side;
        let up = self.spec.uplift();
        match self.spec.dimension {
            1 => {
                for i in 0..l {
                    let left = psi[if i == 0 { l - 1 } else { i - 1 }];
                    let right = psi[if i + 1 == l { 0 } else { i + 1 }];
                    out[i] = (self.potential[i] + up) * psi[i] - left - right;
                }
            }
            _ => {
                for y in 0..l {
                    let row = y * l;
                    let below = if y == 0 { (l - 1) * l } else { row - l };
                    let above = if y + 1 == l { 0 } else { row + l };
                    for x in 0..l {
                        let xl = if x == 0 { l - 1 } else { x - 1 };
                        let xr = if x + 1 == l { 0 } else { x + 1 };
                        let i = row + x;
                        out[i] = (self.potential[i] + up) * psi[i]
                            - psi[row + xl]
                            - psi[row + xr]
                            - psi[below + x]
                            - psi[above + x];
                    }
                }
            }
        }
    }

    /// Dense `|Ω| × |Ω|` Hamiltonian, for oracle checks on small models.
    pub fn assemble_dense(&self) -> Result<DenseMatrix> {
        self.assemble_dense_capped(DENSE_CAP)
    }

    pub fn assemble_dense_capped(&self, cap: usize) -> Result<DenseMatrix> {
        let n = self.sites();
        if n > cap {
            return Err(Error::SizeLimit { sites: n, cap });
        }
        let mut m = DenseMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = self.diagonal(i);
            for j in self.spec.neighbors(i) {
                m[(i, j)] -= self.spec.hopping();
            }
        }
        Ok(m)
    }
}
