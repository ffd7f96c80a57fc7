//! Moore exponent sets over finite fields: decision procedures with
//! machine-checkable certificates, the rank-metric (MRD) code side, exact
//! point counts on the associated determinantal varieties, and every numeric
//! threshold the classification theorems produce.

pub mod error;
pub mod field;
pub mod gf;
pub mod linalg;
pub mod linpoly;
pub mod moore;
pub mod par;
pub mod rank_metric;

pub use error::{Error, Result};
pub use field::{field_create, FFElem, FieldCtx};
pub use moore::{normalize, ExponentSet, Method, MooreVerdict, Witness};
