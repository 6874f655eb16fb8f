//! Exact finite free convolutions, permutation quadrature and Ramanujan graph
//! search with certified root bounds.

pub mod cli;
pub mod convolution;
pub mod error;
pub mod graph;
pub mod instances;
pub mod io;
pub mod matrix;
pub mod numeric;
pub mod perm;
pub mod poly;
pub mod quad;
pub mod quadrature;
pub mod rational;
pub mod rng;
pub mod search;
pub mod sturm;
pub mod transforms;

mod intpoly;

pub use error::{Error, Result};
pub use matrix::RatMatrix;
pub use perm::{Permutation, RandomSwap, SwapProgram};
pub use poly::RatPoly;
pub use quad::QuadScalar;
pub use rational::Rat;
