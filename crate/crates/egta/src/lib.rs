//! Empirical game-theoretic analysis toolkit.
//!
//! Builds finite normal-form games, runs PSRO under interchangeable
//! meta-strategy solvers with an exact best-response oracle, computes
//! minimum-regret constrained profiles (MRCP) by projected amoeba search,
//! and evaluates strategy-exploration runs under a fixed evaluation solver.

pub mod error;
pub mod eval;
pub mod game;
pub mod library;
pub mod lp;
pub mod mrcp;
pub mod psro;
pub mod restriction;
pub mod solvers;

pub use error::Error;
pub use game::{MixedProfile, MixedStrategy, NormalFormGame};
pub use restriction::EmpiricalGame;
