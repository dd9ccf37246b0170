//! Exact valued-field arithmetic: the two computable backends and exact
//! log-scale absolute values.

mod abs;
mod scalar;
mod spec;

pub use abs::AbsValue;
pub use scalar::ValuedScalar;
pub use spec::{Backend, FieldSpec, ValueGroup};
