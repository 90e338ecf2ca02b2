//! Integrated density of states of Anderson tight-binding models.
//!
//! Two routes to the counting function are provided: the exact `N(E)` from
//! matrix inertia ([`spectral`]) and the landscape law `N_u(E)` built from the
//! effective potential `W = 1/u` ([`landscape`], [`nu_counting`]). The
//! [`fitting`] and [`scaling`] modules compare the two on ensemble-averaged
//! curves produced by [`ensemble`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curve;
mod cyclic;
pub mod dense;
pub mod ensemble;
pub mod error;
pub mod fitting;
pub mod io;
pub mod landscape;
pub mod lattice;
pub mod nu_counting;
pub mod scaling;
pub mod spectral;

pub use curve::{CurveKind, EnergyGrid, SampledCurve, Spacing, SpectralCurve};
pub use error::{Error, Result};
pub use landscape::{solve_landscape, Landscape};
pub use lattice::{DistributionKind, LatticeModel, LatticeSpec, PotentialDistribution};
