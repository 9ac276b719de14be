//! Linear programming and branch-and-bound substrate.

mod bnb;
mod factor;
mod model;
mod simplex;

pub use bnb::{branch_and_bound, BnbCallbacks, BnbConfig, BnbResult, BnbStatus, NoCallbacks};
pub use model::{Column, ColumnId, LpModel, Row, RowId, Sense};
pub use simplex::{solve_lp, LpSolution, LpStatus, Simplex};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("row or column reference out of range")]
    BadReference,
    #[error("lower bound exceeds upper bound")]
    InconsistentBounds,
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("time limit reached")]
    TimeLimit,
}
