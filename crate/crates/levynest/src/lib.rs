//! Computable theory of α-selfdecomposable laws and their nested subclasses.
//!
//! Infinitely divisible laws are carried as Lévy-Khintchine triplets with a polar
//! Lévy measure. On top of the triplet calculus the crate provides class membership
//! tests, the mappings Φ_α acting on triplets, triangular-array limit harnesses and
//! a Monte Carlo check of the stochastic-integral representation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod classes;
pub mod cli;
pub mod config;
pub mod error;
pub mod limits;
pub mod mc;
pub mod nnls;
pub mod polar;
pub mod quad;
pub mod radial;
pub mod report;
pub mod special;
pub mod transform;
pub mod triplet;

pub use config::RunConfig;
pub use error::{LevyError, Result};
pub use radial::{Atom, Centering, KGrid, RadialPart, StableTerm};
pub use triplet::{LevyTriplet, PolarComponent, PolarLevyMeasure};
