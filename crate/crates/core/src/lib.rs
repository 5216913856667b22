//! Exact lattice arithmetic for counting Fourier-Mukai partners of K3
//! surfaces.

#![allow(clippy::needless_range_loop)]

pub mod arith;
pub mod automorphisms;
pub mod bqf;
pub mod discriminant;
pub mod error;
pub mod fm;
pub mod glue;
pub mod hodge;
pub mod io;
pub mod lattice;
pub mod matrix;
pub mod qform;

pub use error::{Error, Result};
