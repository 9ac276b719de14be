use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use crate::lp::model::{ColumnId, LpModel};
use crate::lp::simplex::{LpSolution, LpStatus, Simplex};
use crate::lp::LpError;
use crate::scalar::Scalar;

/// Hooks invoked by [`branch_and_bound`] at every node.
///
/// `price` and `separate` extend the model in place and return how many
/// columns or rows they added. When the node LP is infeasible, `price` receives
/// the infeasibility certificate as duals (see [`LpSolution::dual`]) and zero
/// objective, so the same pricing code can restore feasibility.
pub trait BnbCallbacks<S: Scalar> {
    fn price(&mut self, _model: &mut LpModel<S>, _sol: &LpSolution<S>) -> usize {
        0
    }

    fn separate(&mut self, _model: &mut LpModel<S>, _sol: &LpSolution<S>) -> usize {
        0
    }

    /// Final say on an integral node solution; a rejected node is pruned.
    fn accept_incumbent(&mut self, _model: &LpModel<S>, _x: &[S]) -> bool {
        true
    }

    /// Integral solution built from a node relaxation, offered as an
    /// incumbent candidate.
    fn heuristic(&mut self, _model: &LpModel<S>, _sol: &LpSolution<S>) -> Option<Vec<S>> {
        None
    }

    /// Columns with a smaller class are branched on first.
    fn branch_class(&self, _col: ColumnId) -> u32 {
        0
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NoCallbacks;

impl<S: Scalar> BnbCallbacks<S> for NoCallbacks {}

#[derive(Debug, Clone)]
pub struct BnbConfig {
    pub time_limit: Option<Duration>,
    pub node_limit: Option<usize>,
    /// Every integral solution has an integral objective, so a node can be
    /// pruned once the rounded-up bound reaches the incumbent.
    pub objective_integral: bool,
}

impl Default for BnbConfig {
    fn default() -> Self {
        Self {
            time_limit: None,
            node_limit: None,
            objective_integral: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BnbStatus {
    Optimal,
    FeasibleTimeout,
    Infeasible,
    Timeout,
}

#[derive(Debug, Clone)]
pub struct BnbResult<S> {
    pub status: BnbStatus,
    pub incumbent: Option<Vec<S>>,
    pub objective: Option<S>,
    /// Global lower bound at termination.
    pub bound: S,
    pub root_bound: Option<S>,
    pub nodes: usize,
    /// Global lower bound after every processed node.
    pub bound_trace: Vec<S>,
    /// Integral node solutions refused by [`BnbCallbacks::accept_incumbent`].
    pub rejected: usize,
}

struct Node<S> {
    /// `None` before any relaxation was solved.
    bound: Option<S>,
    depth: usize,
    seq: usize,
    changes: Vec<(ColumnId, Option<S>, Option<S>)>,
}

impl<S: Scalar> PartialEq for Node<S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<S: Scalar> Eq for Node<S> {}

impl<S: Scalar> PartialOrd for Node<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: Scalar> Ord for Node<S> {
    // BinaryHeap is a max-heap: the best node compares greatest.
    fn cmp(&self, other: &Self) -> Ordering {
        let by_bound = match (&self.bound, &other.bound) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Greater,
            (Some(_), None) => Ordering::Less,
            (Some(a), Some(b)) => b.partial_cmp(a).unwrap_or(Ordering::Equal),
        };
        by_bound
            .then(self.depth.cmp(&other.depth))
            .then(other.seq.cmp(&self.seq))
    }
}

fn fractionality<S: Scalar>(v: &S) -> S {
    let f = v.clone() - v.floor();
    S::min_of(f.clone(), S::one() - f)
}

/// Minimizes the model with the listed columns restricted to integers.
pub fn branch_and_bound<S: Scalar, C: BnbCallbacks<S>>(
    model: &mut LpModel<S>,
    integer: &[ColumnId],
    config: &BnbConfig,
    callbacks: &mut C,
) -> Result<BnbResult<S>, LpError> {
    if integer.iter().any(|&c| c >= model.num_columns()) {
        return Err(LpError::BadReference);
    }
    let start = Instant::now();
    let deadline = config.time_limit.map(|d| start + d);
    let root_bounds: Vec<(Option<S>, Option<S>)> = integer
        .iter()
        .map(|&c| (model.column(c).lower.clone(), model.column(c).upper.clone()))
        .collect();
    let tol = S::feas_tol();

    let mut simplex = Simplex::new();
    let mut heap = BinaryHeap::new();
    let mut seq = 0usize;
    heap.push(Node {
        bound: None,
        depth: 0,
        seq,
        changes: Vec::new(),
    });
    let mut incumbent: Option<(S, Vec<S>)> = None;
    let mut nodes = 0usize;
    let mut rejected = 0usize;
    let mut root_bound = None;
    let mut bound_trace: Vec<S> = Vec::new();
    let mut interrupted = false;

    let prunable = |bound: &S, inc: &Option<(S, Vec<S>)>| -> bool {
        match inc {
            None => false,
            Some((value, _)) => {
                if config.objective_integral {
                    (bound.clone() - tol.clone() - S::int_tol()).ceil() >= *value
                } else {
                    *bound >= value.clone() - tol.clone()
                }
            }
        }
    };

    // The up child of each branching is processed next, so consecutive
    // relaxations differ in few bounds and warm starts stay cheap.
    let mut dive: Option<Node<S>> = None;
    while let Some(node) = dive.take().or_else(|| heap.pop()) {
        if node.bound.as_ref().is_some_and(|b| prunable(b, &incumbent)) {
            continue;
        }
        let out_of_time = deadline.is_some_and(|d| Instant::now() >= d);
        let out_of_nodes = config.node_limit.is_some_and(|l| nodes >= l);
        if out_of_time || out_of_nodes {
            interrupted = true;
            heap.push(node);
            break;
        }
        nodes += 1;

        for (k, &c) in integer.iter().enumerate() {
            let (lb, ub) = root_bounds[k].clone();
            model.set_bounds(c, lb, ub)?;
        }
        let mut node_infeasible = false;
        for (c, lb, ub) in &node.changes {
            let cur = model.column(*c);
            let lb = match (lb, &cur.lower) {
                (Some(a), Some(b)) => Some(S::max_of(a.clone(), b.clone())),
                (a, b) => a.clone().or(b.clone()),
            };
            let ub = match (ub, &cur.upper) {
                (Some(a), Some(b)) => Some(S::min_of(a.clone(), b.clone())),
                (a, b) => a.clone().or(b.clone()),
            };
            if let (Some(l), Some(u)) = (&lb, &ub) {
                if l > u {
                    node_infeasible = true;
                    break;
                }
            }
            model.set_bounds(*c, lb, ub)?;
        }
        if node_infeasible {
            continue;
        }

        let sol = match solve_node(model, &mut simplex, deadline, callbacks) {
            Ok(s) => s,
            Err(LpError::TimeLimit) => {
                interrupted = true;
                heap.push(node);
                break;
            }
            Err(e) => return Err(e),
        };
        match sol.status {
            LpStatus::Infeasible => {
                record(&mut bound_trace, &heap, dive.as_ref(), &incumbent);
                continue;
            }
            LpStatus::Unbounded => {
                return Err(LpError::NumericalFailure("unbounded relaxation".into()));
            }
            LpStatus::Optimal => {}
        }
        let value = match &node.bound {
            Some(b) => S::max_of(sol.objective.clone(), b.clone()),
            None => sol.objective.clone(),
        };
        if node.depth == 0 {
            root_bound = Some(sol.objective.clone());
        }
        if let Some(x) = callbacks.heuristic(model, &sol) {
            let obj = model.objective_value(&x);
            if incumbent.as_ref().map_or(true, |(best, _)| obj < *best) {
                incumbent = Some((obj, x));
            }
        }
        if prunable(&value, &incumbent) {
            record(&mut bound_trace, &heap, dive.as_ref(), &incumbent);
            continue;
        }

        let mut branch: Option<(u32, S, ColumnId)> = None;
        for &c in integer {
            let v = &sol.primal[c];
            if v.is_integral() {
                continue;
            }
            let class = callbacks.branch_class(c);
            let frac = fractionality(v);
            let better = match &branch {
                None => true,
                Some((bc, bf, bcol)) => {
                    class < *bc || (class == *bc && (frac > *bf || (frac == *bf && c < *bcol)))
                }
            };
            if better {
                branch = Some((class, frac, c));
            }
        }

        match branch {
            None => {
                let mut x = sol.primal.clone();
                for &c in integer {
                    x[c] = x[c].round();
                }
                if callbacks.accept_incumbent(model, &x) {
                    let obj = model.objective_value(&x);
                    if incumbent.as_ref().map_or(true, |(best, _)| obj < *best) {
                        incumbent = Some((obj, x));
                    }
                } else {
                    rejected += 1;
                }
            }
            Some((_, _, c)) => {
                let v = sol.primal[c].clone();
                for (lb, ub) in [(None, Some(v.floor())), (Some(v.ceil()), None)] {
                    seq += 1;
                    let mut changes = node.changes.clone();
                    let up = lb.is_some();
                    changes.push((c, lb, ub));
                    let child = Node {
                        bound: Some(value.clone()),
                        depth: node.depth + 1,
                        seq,
                        changes,
                    };
                    if up {
                        dive = Some(child);
                    } else {
                        heap.push(child);
                    }
                }
            }
        }
        record(&mut bound_trace, &heap, dive.as_ref(), &incumbent);
    }

    for (k, &c) in integer.iter().enumerate() {
        let (lb, ub) = root_bounds[k].clone();
        model.set_bounds(c, lb, ub)?;
    }

    let finished = !interrupted;
    let open: Vec<Option<S>> = heap.iter().map(|n| n.bound.clone()).collect();
    let open_bound = if open.iter().any(Option::is_none) {
        None
    } else {
        open.into_iter().flatten().fold(None::<S>, |acc, b| {
            Some(acc.map_or(b.clone(), |a| S::min_of(a, b)))
        })
    };
    let (status, bound) = match (&incumbent, finished) {
        (Some((v, _)), true) => (BnbStatus::Optimal, v.clone()),
        (None, true) => (BnbStatus::Infeasible, S::zero()),
        (Some((v, _)), false) => (
            BnbStatus::FeasibleTimeout,
            S::min_of(open_bound.unwrap_or_else(|| v.clone()), v.clone()),
        ),
        (None, false) => (
            BnbStatus::Timeout,
            open_bound
                .or_else(|| root_bound.clone())
                .unwrap_or_else(S::zero),
        ),
    };
    let bound = match (&root_bound, status) {
        (Some(r), BnbStatus::FeasibleTimeout | BnbStatus::Timeout) => S::max_of(bound, r.clone()),
        _ => bound,
    };
    if let Some(last) = bound_trace.last().cloned() {
        if status == BnbStatus::Optimal && bound > last {
            bound_trace.push(bound.clone());
        }
    }
    let (objective, incumbent) = match incumbent {
        Some((v, x)) => (Some(v), Some(x)),
        None => (None, None),
    };
    Ok(BnbResult {
        status,
        incumbent,
        objective,
        bound,
        root_bound,
        nodes,
        bound_trace,
        rejected,
    })
}

/// Price until no column is added, then separate; repeat while rows appear.
fn solve_node<S: Scalar, C: BnbCallbacks<S>>(
    model: &mut LpModel<S>,
    simplex: &mut Simplex<S>,
    deadline: Option<Instant>,
    callbacks: &mut C,
) -> Result<LpSolution<S>, LpError> {
    loop {
        let mut sol = simplex.solve(model, deadline)?;
        while sol.status != LpStatus::Unbounded && callbacks.price(model, &sol) > 0 {
            sol = simplex.solve(model, deadline)?;
        }
        if sol.status != LpStatus::Optimal {
            return Ok(sol);
        }
        if callbacks.separate(model, &sol) == 0 {
            return Ok(sol);
        }
    }
}

fn record<S: Scalar>(
    trace: &mut Vec<S>,
    heap: &BinaryHeap<Node<S>>,
    dive: Option<&Node<S>>,
    incumbent: &Option<(S, Vec<S>)>,
) {
    let mut b = heap.peek().and_then(|n| n.bound.clone());
    if let Some(d) = dive.and_then(|n| n.bound.clone()) {
        b = Some(b.map_or(d.clone(), |x| S::min_of(x, d)));
    }
    if let Some((v, _)) = incumbent {
        b = Some(match b {
            Some(x) => S::min_of(x, v.clone()),
            None => v.clone(),
        });
    }
    let Some(b) = b else { return };
    let b = match trace.last() {
        Some(prev) => S::max_of(prev.clone(), b),
        None => b,
    };
    trace.push(b);
}
