//! Exact engine for the k-Cauchy-Fueter complex on quaternionic space, its boundary complex on
//! rigid quadratic hypersurfaces, right-type classification of the associated step-two groups,
//! and the quaternionic Monge-Ampère operator.

#![allow(clippy::needless_range_loop)]

pub mod boundary;
pub mod error;
pub mod flat;
pub mod form;
pub mod group;
pub mod linalg;
pub mod monge_ampere;
pub mod op;
pub mod poly;
pub mod quadrature;
pub mod random;
pub mod report;
pub mod scalar;
pub mod spinor;
pub mod suite;

pub use error::{CfxError, Result};

/// Exact rational field.
pub type Rational = num_rational::BigRational;
/// Exact complex rational coefficient.
pub type Exact = scalar::Cx<Rational>;
pub type QPoly = poly::Poly<Rational>;
pub type FPoly = poly::Poly<f64>;
pub type QForm = form::ExtForm<Rational>;
pub type FForm = form::ExtForm<f64>;
pub type QField = spinor::SpinorField<Rational>;
