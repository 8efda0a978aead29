//! Weighted inequalities for supremal and Hardy-type operators restricted to
//! cones of monotone functions: explicit criteria, reductions between
//! operator families, and a numerical oracle that certifies lower bounds for
//! the best constants.

pub mod batch;
pub mod criteria;
pub mod error;
pub mod exponents;
pub mod gridfn;
pub mod operators;
pub mod oracle;
pub mod quad;
pub mod scalar;
pub mod spec;
pub mod weights;

pub use criteria::{evaluate, CriterionResult, Options};
pub use error::{Error, Result};
pub use exponents::Exponents;
pub use spec::{apply_spec, InequalitySpec, OperatorKind};
pub use scalar::{ExtNonneg, Scalar};
pub use weights::{CumKind, SupDirection, Weight, WeightLiteral};

/// Extended nonnegative reals over `f64`.
pub type Ext = ExtNonneg<f64>;
