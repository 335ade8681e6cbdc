//! Exact-arithmetic engine for the primitive forms (newforms) of levels
//! 1, 2, 3, 4, 6, 8 and 9.
//!
//! Everything is computed over exact scalars: arbitrary-precision rationals
//! and real quadratic extensions Q(sqrt(D)). Modular forms are represented
//! by truncated q-expansions, the graded rings M(N) by their two-generator
//! monomial bases, and cusp spaces as principal ideals S_k(N) = Delta_N *
//! M_{k-w}(N). On top of that sit Hecke operators, eigenform extraction,
//! old/new splitting, sign classification, twists, and a small expression
//! language used to check a shipped dataset of closed formulas against the
//! independently computed eigenforms.

pub mod error;
pub mod exactnum;
pub mod linalg;
pub mod qseries;
pub mod special;
pub mod ringspace;
pub mod hecke;
pub mod formula;

pub use error::{Error, Result};
