//! Locally D-optimal designs for the Bradley–Terry paired-comparison model.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! * [`model`]: parameters in control coding, intensities, regression
//!   vectors, designs and information matrices;
//! * [`linalg`]: the small dense symmetric factorization behind `log det`
//!   and `M⁻¹ f`;
//! * [`optimality`]: directional derivatives, the Kiefer–Wolfowitz check and
//!   D-efficiency;
//! * [`graphs`]: the graph view of a design and the action of `S_m`;
//! * [`regions`]: optimality regions of saturated (path) designs for any `m`;
//! * [`four`]: the complete closed-form picture for four alternatives;
//! * [`solver`]: a multiplicative-update solver used as an independent oracle;
//! * [`sweep`]: efficiency of the uniform design along a line in parameter space.
//!
//! Alternatives are labelled `1..=m` throughout; `β_m = 0` is implicit.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod four;
pub mod graphs;
pub mod linalg;
mod math;
pub mod model;
pub mod optimality;
pub mod regions;
pub mod solver;
pub mod sweep;

pub use error::{Error, Result};
pub use four::{classify_m4, RegionKind, RegionLabel};
pub use graphs::{Permutation, SupportGraph};
pub use linalg::InfoMatrix;
pub use model::{intensity, Design, IntensityTable, Pair, Parameters};
pub use optimality::{d_efficiency, kw_check, KwCertificate};
pub use regions::{find_optimal_saturated, region_membership, PathDesign, RegionMembership};
pub use solver::{solve, solve_restricted, SolverConfig, SolverResult};
