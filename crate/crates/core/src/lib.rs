//! Dual graphs of Shimura curves `X^{pq}` at `p`, their Atkin-Lehner
//! quotients, component groups and Gross vectors, assembled into a
//! screen for rational points on `X^{pq} / w_q`.

pub mod arith;
pub mod component_group;
pub mod error;
pub mod graph;
pub mod lattice;
pub mod linalg;
pub mod quaternion;
pub mod screen;
pub mod winding;

pub use error::{Error, Result};

pub type Int = num_bigint::BigInt;
pub type Rational = num_rational::BigRational;
pub type IntMatrix = linalg::Matrix<Int>;
pub type RatQuaternion = quaternion::Quaternion<Rational>;
pub type FloatQuaternion = quaternion::Quaternion<f64>;
