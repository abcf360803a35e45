//! Complex Finsler geometry in two complex dimensions, computed with truncated
//! Wirtinger jets.

// `!(x > t)` is used on purpose so NaN lands on the failing side; index loops mirror tensor notation.
#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::needless_range_loop,
    clippy::type_complexity
)]

pub mod classify;
pub mod curvature;
pub mod dsl;
pub mod error;
pub mod fd;
pub mod frame;
pub mod geometry;
pub mod identities;
pub mod jet;
pub mod metric;
pub mod point;
pub mod report;
pub mod sampling;
pub mod tensor;

pub use error::{Error, ErrorClass, Result};
pub use geometry::Geometry;
pub use jet::{JetContext, JetError, Var, WJet, DEFAULT_ORDER, MAX_ORDER};
pub use metric::{MetricSpec, BUILTINS};
pub use point::Point;
