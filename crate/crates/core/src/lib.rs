//! Energy-aware network design: choose the fewest active connections so that
//! shortest-path routing stays feasible, plus traffic-oblivious baselines.

pub mod fixtures;
pub mod flow;
pub mod lp;
pub mod mcps;
pub mod mspnd;
pub mod net;
pub mod routing;
pub mod scalar;
pub mod toca;

pub use scalar::{Rational, Scalar};

pub type ExactLpModel = lp::LpModel<Rational>;
pub type FloatLpModel = lp::LpModel<f64>;
pub type ExactLpSolution = lp::LpSolution<Rational>;
pub type FloatLpSolution = lp::LpSolution<f64>;
pub type ExactMspndModel<'a> = mspnd::MspndModel<'a, Rational>;
pub type FloatMspndModel<'a> = mspnd::MspndModel<'a, f64>;
