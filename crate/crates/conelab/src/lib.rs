//! Exact-arithmetic toolkit for finite point configurations in projective
//! space: Hilbert functions, collinearity structure, grids on quadric
//! surfaces, cones through a general point, and certification of plane
//! projections as complete intersections.
//!
//! Everything is computed over the rationals with arbitrary-precision
//! integers. No floating point enters any dimension count.

pub mod analysis;
pub mod catalog;
pub mod exec;
pub mod geometry;
pub mod ideals;
pub mod linalg;
pub mod report;
