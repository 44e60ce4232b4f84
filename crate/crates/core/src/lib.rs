//! p-elastic curves in the hyperbolic plane ℍ² and the de Sitter plane ℍ²₁.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod elliptic;
pub mod curve;
pub mod error;
pub mod lorentz;
pub mod quadrature;
pub mod scalar;
pub mod verify;

pub use error::{ElasticaError, Result};
pub use lorentz::{CrossVariant, SpaceForm, Vec3L};
pub use quadrature::QuadratureConfig;
pub use scalar::{ElasticaParams, RootData};
