//! Numerical building blocks for positive steady states of
//! `-u'' = f(u)` / `-Δu = f(u)` with zero boundary data.
//!
//! The crate is `no_std` (with `alloc`); all file formats, pipelines and
//! the command line live in the companion `monostab` crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod grid2d;
pub mod reaction;
mod rng;
pub mod shoot1d;
pub mod spatialdyn;
pub mod spectra;
pub mod stargeom;

pub use reaction::{KppClass, Reaction, ReactionError};
