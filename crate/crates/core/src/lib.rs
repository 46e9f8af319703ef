//! Norm forms of number fields restricted to vectors whose top coordinates
//! vanish: exact order arithmetic in `Z[theta]`, the integer lattices cut out
//! by a vector's constraint rows, lattice point counts in boxes, local
//! densities and truncated singular series, sieve weights, and desk-scale
//! experiments comparing observed prime values against predicted counts.
//!
//! The `normform` binary wraps [`cli::run`].

pub mod cli;
pub mod error;
pub mod experiments;
pub mod field;
pub mod geometry;
pub mod intmat;
pub mod lattice;
pub mod local;
pub mod numeric;
pub mod polymodp;
pub mod primes;

pub use error::{Error, Result};
