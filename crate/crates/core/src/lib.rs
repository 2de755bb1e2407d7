//! Lattice-theoretic census of lines and conics on octic K3 surfaces carrying sixteen disjoint conics.

pub mod binary;
pub mod census;
pub mod construction;
pub mod discriminant;
pub mod enumerate;
pub mod error;
pub mod fano;
pub mod graph;
pub mod io;
pub mod kummer;
pub mod lattice;
pub mod matrix;
pub mod real;
pub mod scalar;
pub mod symmetry;
pub mod tables;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};

/// Polarized lattice with exact rational enumeration.
pub type ExactPolarized = fano::Polarized<Rational>;
/// Polarized lattice with double-precision enumeration (exactly verified).
pub type FloatPolarized = fano::Polarized<f64>;
/// Polarized lattice with single-precision enumeration (exactly verified).
pub type Float32Polarized = fano::Polarized<f32>;
pub type ExactEllipsoid = enumerate::Ellipsoid<Rational>;
pub type FloatEllipsoid = enumerate::Ellipsoid<f64>;
pub type BigRational = num_rational::BigRational;
