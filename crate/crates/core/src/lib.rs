//! Exact arithmetic over F_q(t): heights and point counts on projective space,
//! degree-2 points, zero-cycle generating functions, Peyre constants and the
//! asymptotic sums behind them.

pub mod asympt;
pub mod error;
pub mod fq;
pub mod genfun;
pub mod peyre;
pub mod quadfield;
pub mod ratpoints;
pub mod real;
pub mod record;

pub use error::{Error, Result};
