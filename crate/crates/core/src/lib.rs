//! Curve classes, Dehn twists, Fuchsian holonomy and length-ordered
//! disjointness graphs on closed orientable surfaces of genus >= 2.
//!
//! The pipeline: fix the chain marking of the surface group, realize points
//! of Teichmueller space as holonomy representations built from
//! Fenchel-Nielsen data, measure geodesic lengths and geometric intersection
//! numbers, enumerate finite curve catalogs, and build the oriented graph
//! whose edges record disjointness together with the length order. On top of
//! that sit desk-scale experiments: twist-power length growth, rigidity
//! witnesses, Thurston-distance bounds and graph-automorphism checks.
//!
//! Numeric code is generic over the [`scalar::Real`] scalar; `f64` is the
//! default and [`scalar::Dd`] provides an extended-precision mode.

pub mod canonical;
pub mod catalog;
pub mod config;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod holonomy;
pub mod intersection;
pub mod mapping;
pub mod marking;
pub mod mat;
pub mod scalar;
pub mod word;

pub use canonical::{canonical_class, homology_class, is_identity, CurveClass};
pub use error::{Error, Result};
pub use word::{free_reduce, Genus, GroupWord, Letter};

/// Default scalar for all numeric work.
pub type Scalar = f64;
/// 2x2 matrix over the default scalar.
pub type Mat = mat::Mat2<Scalar>;
/// Upper half-plane point over the default scalar.
pub type Point = mat::HPoint<Scalar>;
/// Extended-precision matrix (double-double entries).
pub type MatX = mat::Mat2<scalar::Dd>;
