//! Parallel algorithm portfolios of multi-objective evolutionary algorithms.
//!
//! The crate is organized bottom-up:
//!
//! * [`pareto`]: dominance, non-dominated sorting and crowding truncation.
//! * [`problems`]: the ZDT, DTLZ, WFG and UF benchmark suites with reference
//!   fronts and objective boxes.
//! * [`operators`]: SBX, polynomial mutation, DE mutations, PSO updates and
//!   binary variation.
//! * [`algorithms`]: NSGA-II, MOEA/D and MOPSO engines driven by an
//!   [`algorithms::AlgorithmConfig`].
//! * [`indicators`]: exact hypervolume, IGD and the hypervolume ratios used
//!   to compare runs across problems.
//! * [`portfolio`]: running member algorithms side by side and selecting the
//!   output set, including the restructured union of all member sets.
//! * [`construction`]: greedy portfolio construction over a configuration
//!   space.
//!
//! Data-parallel loops go through [`par`], which uses rayon when the
//! `parallel` feature is enabled and runs sequentially otherwise.

pub mod algorithms;
pub mod construction;
pub mod error;
pub mod indicators;
pub mod operators;
pub mod par;
pub mod pareto;
pub mod portfolio;
pub mod problems;
pub mod rng;

pub use error::{Error, Result};
pub use pareto::{Dominance, Individual, SolutionSet};
pub use problems::Problem;
