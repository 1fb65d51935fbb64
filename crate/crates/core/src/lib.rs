//! High-order flux reconstruction solver for the compressible Euler equations
//! with an adaptive, entropy-constrained modal filter for shock capturing.

pub mod basis;
pub mod cases;
pub mod error;
pub mod filter;
pub mod harness;
pub mod mesh;
pub mod physics;
pub mod selftest;
pub mod solver;
