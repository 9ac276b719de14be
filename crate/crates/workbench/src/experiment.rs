//! Runs every algorithm over every parameter cell and collects report rows.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use greenroute::lp::BnbStatus;
use greenroute::mcps::{solve_mcps, McpsLimits};
use greenroute::mspnd::{solve_f_mspnd, solve_mspnd, MspndError, MspndOptions};
use greenroute::net::{Activation, DuplexMode, Network, TrafficMatrix};
use greenroute::routing::{mlu, Mlu};
use greenroute::scalar::Rational;
use greenroute::toca::{alg_mcf, alg_mcf_pp};

use crate::config::{mode_name, render_rational, Algorithm, ExperimentConfig};
use crate::preprocess::{build_network, normalize_traffic};
use crate::repetita::RepetitaInstance;
use crate::report::ReportRow;

/// Matrix id of rows produced by traffic-oblivious algorithms.
pub const ALL_MATRICES: &str = "all";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunStatus {
    /// Proven optimal by an exact solver, or the unique answer of a fixed rule.
    Optimal,
    /// Time ran out with a solution in hand.
    Feasible,
    /// Time ran out without a solution; the full network is reported.
    Timeout,
    Infeasible,
    /// A rounding heuristic finished.
    Solved,
    Error(String),
}

impl RunStatus {
    pub fn label(&self) -> &'static str {
        match self {
            RunStatus::Optimal => "optimal",
            RunStatus::Feasible => "feasible",
            RunStatus::Timeout => "timeout",
            RunStatus::Infeasible => "infeasible",
            RunStatus::Solved => "solved",
            RunStatus::Error(_) => "error",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: RunStatus,
    pub activation: Option<Activation>,
    /// Lower bound from an exact solver.
    pub bound: Option<f64>,
    pub runtime: Duration,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub time_limit: Option<Duration>,
    pub strengthening: bool,
}

fn bnb_status(status: BnbStatus) -> RunStatus {
    match status {
        BnbStatus::Optimal => RunStatus::Optimal,
        BnbStatus::FeasibleTimeout => RunStatus::Feasible,
        BnbStatus::Timeout => RunStatus::Timeout,
        BnbStatus::Infeasible => RunStatus::Infeasible,
    }
}

type Solved = (RunStatus, Option<Activation>, Option<f64>);

fn dispatch(
    algorithm: Algorithm,
    net: &Network,
    traffic: &TrafficMatrix,
    rho: &Rational,
    opts: &SolveOptions,
) -> Solved {
    match algorithm {
        Algorithm::Mspnd => {
            let o = MspndOptions {
                strengthening: opts.strengthening,
                time_limit: opts.time_limit,
            };
            match solve_mspnd::<f64>(net, traffic, &o) {
                Ok(r) => (bnb_status(r.status), Some(r.activation), Some(r.bound)),
                Err(MspndError::NotRoutableInFull) => (RunStatus::Infeasible, None, None),
                Err(e) => (RunStatus::Error(e.to_string()), None, None),
            }
        }
        Algorithm::FMspnd => match solve_f_mspnd(net, traffic) {
            Ok(act) => (RunStatus::Optimal, Some(act), None),
            Err(MspndError::NotRoutableInFull) => (RunStatus::Infeasible, None, None),
            Err(e) => (RunStatus::Error(e.to_string()), None, None),
        },
        Algorithm::Mcps => {
            let limits = McpsLimits {
                time_limit: opts.time_limit,
            };
            match solve_mcps::<f64>(net, rho, &limits) {
                Ok(r) => (bnb_status(r.status), Some(r.activation), Some(r.bound)),
                Err(e) => (RunStatus::Error(e.to_string()), None, None),
            }
        }
        Algorithm::Mcf | Algorithm::McfPp => {
            let res = if algorithm == Algorithm::Mcf {
                alg_mcf::<f64>(net, rho)
            } else {
                alg_mcf_pp::<f64>(net, rho)
            };
            match res {
                Ok(r) => (RunStatus::Solved, Some(r.activation), None),
                Err(e) => (RunStatus::Error(e.to_string()), None, None),
            }
        }
    }
}

/// Runs one algorithm. `traffic` is the already `rho`-scaled matrix; the
/// oblivious algorithms ignore it. Panics inside a solver become error
/// outcomes.
pub fn run_algorithm(
    algorithm: Algorithm,
    net: &Network,
    traffic: &TrafficMatrix,
    rho: &Rational,
    opts: &SolveOptions,
) -> Outcome {
    let start = Instant::now();
    let (status, activation, bound) = catch_unwind(AssertUnwindSafe(|| {
        dispatch(algorithm, net, traffic, rho, opts)
    }))
    .unwrap_or_else(|panic| {
        let msg = panic
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| panic.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "solver panicked".into());
        (RunStatus::Error(msg), None, None)
    });
    Outcome {
        status,
        activation,
        bound,
        runtime: start.elapsed(),
    }
}

fn render_mlu(m: &Mlu) -> String {
    m.to_string()
}

/// One parameter setting of one instance; builds its report rows.
pub struct Cell<'a> {
    pub instance: &'a str,
    pub rho: &'a Rational,
    pub mu: u32,
    pub mode: DuplexMode,
}

impl Cell<'_> {
    fn row(&self, algorithm: Algorithm, matrix: &str) -> ReportRow {
        ReportRow {
            instance: self.instance.to_string(),
            matrix: matrix.to_string(),
            algorithm: algorithm.name().to_string(),
            rho: render_rational(self.rho),
            mu: self.mu,
            mode: mode_name(self.mode).to_string(),
            status: String::new(),
            active_connections: None,
            deactivated_fraction: None,
            runtime_s: "0.000".into(),
            mlu: Vec::new(),
            bound: None,
        }
    }

    pub fn error_row(&self, algorithm: Algorithm, matrix: &str) -> ReportRow {
        ReportRow {
            status: "error".into(),
            ..self.row(algorithm, matrix)
        }
    }

    /// `evaluated` holds every rho-scaled matrix of the instance; `None`
    /// marks one whose demands are cut off already in the full network.
    pub fn outcome_row(
        &self,
        algorithm: Algorithm,
        matrix: &str,
        net: &Network,
        outcome: &Outcome,
        evaluated: &[Option<TrafficMatrix>],
    ) -> ReportRow {
        let mut row = self.row(algorithm, matrix);
        row.status = outcome.status.label().to_string();
        row.runtime_s = format!("{:.3}", outcome.runtime.as_secs_f64());
        row.bound = outcome.bound.map(|b| format!("{b:.6}"));
        if let Some(act) = &outcome.activation {
            row.active_connections = Some(act.value());
            row.deactivated_fraction = Some(render_rational(&act.deactivated_fraction(net)));
            row.mlu = evaluated
                .iter()
                .map(|t| match t {
                    Some(t) => render_mlu(&mlu(net, act, t)),
                    None => render_mlu(&Mlu::Infinite),
                })
                .collect();
        }
        row
    }
}

/// Runs the configured grid. Failures are recorded per row; the batch
/// always completes. Rows come back sorted by
/// `(instance, matrix, algorithm, rho, mu, mode)`.
pub fn run_experiment(config: &ExperimentConfig, instances: &[RepetitaInstance]) -> Vec<ReportRow> {
    let opts = SolveOptions {
        time_limit: Some(config.time_limit),
        strengthening: config.strengthening,
    };
    let mut rows = Vec::new();
    for inst in instances {
        for &mode in &config.modes {
            for &mu in &config.mu {
                let net = build_network(&inst.graph, mode, config.lengths, mu);
                for rho in &config.rho {
                    let cell = Cell {
                        instance: &inst.id,
                        rho,
                        mu,
                        mode,
                    };
                    let Ok(net) = &net else {
                        for &alg in &config.algorithms {
                            if alg.traffic_aware() {
                                rows.extend(inst.matrix_ids.iter().map(|m| cell.error_row(alg, m)));
                            } else {
                                rows.push(cell.error_row(alg, ALL_MATRICES));
                            }
                        }
                        continue;
                    };
                    let scaled: Vec<Option<TrafficMatrix>> = inst
                        .matrices
                        .iter()
                        .map(|t| {
                            normalize_traffic(net, t)
                                .ok()
                                .and_then(|t| t.scaled(rho).ok())
                        })
                        .collect();
                    for &alg in &config.algorithms {
                        if alg.traffic_aware() {
                            for (k, id) in inst.matrix_ids.iter().enumerate() {
                                match &scaled[k] {
                                    Some(t) => {
                                        let out = run_algorithm(alg, net, t, rho, &opts);
                                        rows.push(cell.outcome_row(alg, id, net, &out, &scaled));
                                    }
                                    None => rows.push(cell.error_row(alg, id)),
                                }
                            }
                        } else {
                            let empty = TrafficMatrix::new(net.num_vertices());
                            let out = run_algorithm(alg, net, &empty, rho, &opts);
                            rows.push(cell.outcome_row(alg, ALL_MATRICES, net, &out, &scaled));
                        }
                    }
                }
            }
        }
    }
    rows.sort_by(|a, b| {
        (&a.instance, &a.matrix, &a.algorithm, &a.rho, a.mu, &a.mode).cmp(&(
            &b.instance,
            &b.matrix,
            &b.algorithm,
            &b.rho,
            b.mu,
            &b.mode,
        ))
    });
    rows
}
