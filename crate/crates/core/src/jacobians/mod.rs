//! Local coordinates near multiple zeros: zeros and monic coefficients,
//! zero trees, period integrals with square-root endpoints, and the Jacobian
//! bounds relating them.

mod periods;
mod poly;
mod quadrature;
mod reports;
mod residue;
mod tree;

pub use periods::{
    period_integrals, period_integrals_with, period_jacobian_report, PeriodJacobianReport,
    PeriodSet,
};
pub use poly::{
    chain_constant, coeffs_from_edges, jacobian_chain_check, monic_coefficients,
    vandermonde_jacobian, vandermonde_sign, zeros_from_edges, zeros_to_coeffs, ChainReport,
    ZeroConfig,
};
pub use quadrature::{gauss_kronrod, QuadResult};
pub use reports::{
    collision_config, random_config, separated_clusters, vandermonde_check, verify, C64Pair,
    CheckRow, VandermondeCheck, VerifySettings,
};
pub use residue::{residue_b, ResidueResult};
pub use tree::{build_zero_tree, d_plus, strange_comb_ratio, ZeroTree};

use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

#[derive(Debug, Error, PartialEq)]
pub enum JacobianError {
    #[error("need at least 2 zeros, got {0}")]
    TooFew(usize),
    #[error("zeros sum to {0}, expected 0")]
    NotCentered(C64),
    #[error("zeros {0} and {1} coincide")]
    Repeated(usize, usize),
    #[error("edge {edge} passes through zero {zero}")]
    ThroughZero { edge: usize, zero: usize },
    #[error("quadrature on edge {edge} did not converge (error estimate {error:e})")]
    Quadrature { edge: usize, error: f64 },
    #[error("degree {0} is odd; the contour integral needs an even degree")]
    OddDegree(usize),
    #[error("branch of the square root jumps on the contour (radius {0})")]
    Branch(f64),
    #[error("contour winds {winding} times around the zeros, expected {expected}")]
    NotEnclosed { winding: i64, expected: usize },
    #[error("zeros {0} and {1} are too close for finite differences")]
    IllConditioned(usize, usize),
}
