//! Exact integer coefficients of the Weierstrass sigma function
//!
//! ```text
//! sigma(z) = z * sum_{i,j >= 0} a[i,j] / (4i+6j+1)! * (g2 z^4 / 2)^i * (2 g3 z^6)^j
//! ```
//!
//! computed by a scaled integer recursion, checked against the conjectured
//! 2-adic and 3-adic valuation formulas, and cross-validated by exact series
//! oracles.

pub mod checkpoint;
pub mod engine;
pub mod error;
pub mod harness;
pub mod oracle;
pub mod poly;
pub mod series;
pub mod tables;
pub mod valuation;

pub use checkpoint::{load_checkpoint, load_table, save_checkpoint, Checkpoint};
pub use engine::{compute_rectangle, weight, CoeffTable, Index};
pub use error::{Error, Result};
pub use poly::BivariatePoly;
pub use series::TruncatedSeries;
pub use valuation::{
    b_value, hypothesis_check, nu, nu_b, nu_factorial, residual_report, verify_range, Status,
    ValuationReport, VerificationSummary,
};
