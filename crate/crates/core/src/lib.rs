#![no_std]
extern crate alloc;

pub mod corr_odd;
pub mod corr_voronoi;
pub mod correspondence;
pub mod distortion;
pub mod error;
pub mod exec;
pub mod geometry;
mod math;
pub mod packing;
pub mod pointsets;
pub mod rng;

pub use error::{Error, Result};
