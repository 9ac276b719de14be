//! Branch-and-price driver.

use std::collections::HashSet;

use std::time::Duration;

use crate::lp::{
    branch_and_bound, BnbCallbacks, BnbConfig, BnbStatus, ColumnId, LpModel, LpSolution,
};
use crate::net::{Activation, ArcId, Network, TrafficMatrix};
use crate::routing::{
    cmp_paths, is_spr_routable, shortest_path_tree, spr_route, Path, PathEnumerator,
};
use crate::scalar::Scalar;

use super::model::{build_root_model, DualPrices, Formulation};
use super::pricing::{price_paths, PricingState};
use super::{fit_connections, MspndError};

/// Paths kept per pair for separating missing shortest-path rows.
pub const SEPARATION_BUDGET: usize = 2_000;
const CUTS_PER_PAIR: usize = 3;

#[derive(Debug, Clone)]
pub struct MspndOptions {
    pub strengthening: bool,
    pub time_limit: Option<Duration>,
}

impl Default for MspndOptions {
    fn default() -> Self {
        Self {
            strengthening: true,
            time_limit: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MspndResult {
    pub activation: Activation,
    pub status: BnbStatus,
    /// Lower bound on the optimum value.
    pub bound: f64,
    pub root_bound: Option<f64>,
    pub nodes: usize,
    pub path_columns: usize,
    pub strengthening_rows: usize,
}

struct PathCache<'a> {
    paths: Vec<Path>,
    source: PathEnumerator<'a>,
    exhausted: bool,
}

impl PathCache<'_> {
    fn get(&mut self, k: usize) -> Option<&Path> {
        while self.paths.len() <= k && !self.exhausted && self.paths.len() < SEPARATION_BUDGET {
            match self.source.next() {
                Some(p) => self.paths.push(p),
                None => self.exhausted = true,
            }
        }
        self.paths.get(k)
    }
}

struct Engine<'a, S> {
    form: Formulation<'a>,
    state: PricingState<S>,
    cache: Vec<PathCache<'a>>,
    y_cols: HashSet<ColumnId>,
    /// Starting link sets already handed to the rounding heuristic.
    tried: HashSet<Vec<u32>>,
}

impl<'a, S: Scalar> Engine<'a, S> {
    fn new(form: Formulation<'a>) -> Self {
        let cache = form
            .pairs
            .iter()
            .map(|&(s, t)| PathCache {
                paths: Vec::new(),
                source: PathEnumerator::new(form.net, s, t),
                exhausted: false,
            })
            .collect();
        Self {
            state: PricingState::new(form.pairs.len()),
            y_cols: form.y_col.iter().copied().collect(),
            tried: HashSet::new(),
            cache,
            form,
        }
    }

    /// `hops - sum y < sum_{model P' > P} z` for a path outside the model.
    fn row_violated(&self, pair: usize, path: &Path, x: &[S]) -> bool {
        let mut lhs = S::from_count(path.hops() as u64);
        for &a in path.arcs() {
            lhs = lhs - x[self.form.y_col[a]].clone();
        }
        let rhs = self.form.paths[pair]
            .iter()
            .filter(|m| cmp_paths(path, &m.path).is_lt())
            .fold(S::zero(), |acc, m| acc + x[m.col].clone());
        lhs < rhs - S::feas_tol()
    }

    fn separate_pair(&mut self, lp: &mut LpModel<S>, pair: usize, x: &[S]) -> usize {
        let tol = S::feas_tol();
        let Some(last) = self.form.paths[pair]
            .iter()
            .rev()
            .find(|m| x[m.col] > tol)
            .map(|m| m.path.clone())
        else {
            return 0;
        };
        let (s, t) = self.form.pairs[pair];
        let mut found: Vec<Path> = Vec::new();
        let threshold = S::one() - S::int_tol();
        let y_col = &self.form.y_col;
        let on = shortest_path_tree(self.form.net, s, |a| x[y_col[a]] >= threshold).swap_remove(t);
        if let Some(p) = on {
            if !self.form.contains(pair, &p) && self.row_violated(pair, &p, x) {
                found.push(p);
            }
        }
        let mut k = 0;
        while found.len() < CUTS_PER_PAIR {
            let Some(p) = self.cache[pair].get(k).cloned() else {
                break;
            };
            k += 1;
            if !cmp_paths(&p, &last).is_lt() {
                break;
            }
            if !found.contains(&p)
                && !self.form.contains(pair, &p)
                && self.row_violated(pair, &p, x)
            {
                found.push(p);
            }
        }
        let mut added = 0;
        for p in found {
            if !self.form.contains(pair, &p) {
                self.form
                    .add_path(lp, pair, p)
                    .expect("path is new and rows exist");
                added += 1;
            }
        }
        added
    }

    fn switch(&self, on: &mut [u32], link: ArcId, value: u32) {
        on[link] = value;
        if let Some(r) = self.form.net.link_partner(link) {
            on[r] = value;
        }
    }

    /// Keeps the links the relaxation uses, then drops them one at a time
    /// in increasing order of `y` while routing stays feasible and the
    /// connection count does not grow.
    fn round(&mut self, y: &[f64]) -> Option<Vec<u32>> {
        let net = self.form.net;
        let traffic = self.form.traffic;
        let mut order = self.form.links.clone();
        order.sort_by(|&a, &b| y[a].total_cmp(&y[b]).then(a.cmp(&b)));
        let mut on = vec![0u32; net.num_arcs()];
        for &l in &order {
            if y[l] > S::feas_tol().approx() {
                self.switch(&mut on, l, 1);
            }
        }
        if !self.tried.insert(on.clone()) {
            return None;
        }
        let mut best = match fit_connections(net, traffic, on.clone()) {
            Some(c) => c,
            None => {
                on = vec![1; net.num_arcs()];
                fit_connections(net, traffic, on.clone())?
            }
        };
        let total = |c: &[u32]| c.iter().map(|&v| u64::from(v)).sum::<u64>();
        for &l in &order {
            if on[l] == 0 {
                continue;
            }
            let mut trial = on.clone();
            self.switch(&mut trial, l, 0);
            if let Some(c) = fit_connections(net, traffic, trial.clone()) {
                if total(&c) <= total(&best) {
                    on = trial;
                    best = c;
                }
            }
        }
        Some(best)
    }

    fn counts(&self, x: &[S]) -> Vec<u32> {
        self.form
            .net
            .arcs()
            .iter()
            .map(|a| (x[self.form.x_col[a.id]].to_count() as u32).min(a.mu))
            .collect()
    }
}

impl<S: Scalar> BnbCallbacks<S> for Engine<'_, S> {
    fn price(&mut self, model: &mut LpModel<S>, sol: &LpSolution<S>) -> usize {
        let duals = DualPrices::from_solution(&self.form, sol);
        let found: Vec<(usize, Path)> = (0..self.form.pairs.len())
            .filter_map(|pair| {
                price_paths(&self.form, &duals, pair, &mut self.state).map(|p| (pair, p))
            })
            .collect();
        let mut added = 0;
        for (pair, p) in found {
            if !self.form.contains(pair, &p) {
                self.form
                    .add_path(model, pair, p)
                    .expect("priced path is new");
                added += 1;
            }
        }
        added
    }

    fn separate(&mut self, model: &mut LpModel<S>, sol: &LpSolution<S>) -> usize {
        let added: usize = (0..self.form.pairs.len())
            .map(|pair| self.separate_pair(model, pair, &sol.primal))
            .sum();
        if added > 0 {
            self.state.clear();
        }
        added
    }

    fn accept_incumbent(&mut self, _model: &LpModel<S>, x: &[S]) -> bool {
        Activation::new(self.form.net, self.counts(x))
            .map(|act| is_spr_routable(self.form.net, &act, self.form.traffic))
            .unwrap_or(false)
    }

    fn heuristic(&mut self, model: &LpModel<S>, sol: &LpSolution<S>) -> Option<Vec<S>> {
        let y: Vec<f64> = self
            .form
            .y_col
            .iter()
            .map(|&c| sol.primal[c].approx())
            .collect();
        let counts = self.round(&y)?;
        let mut x = vec![S::zero(); model.num_columns()];
        for &l in &self.form.links {
            let c = counts[l];
            x[self.form.x_col[l]] = S::from_count(c.into());
            x[self.form.y_col[l]] = S::from_count(c.min(1).into());
        }
        Some(x)
    }

    fn branch_class(&self, col: ColumnId) -> u32 {
        if self.y_cols.contains(&col) {
            0
        } else {
            1
        }
    }
}

/// Every demand needs a path in the full network. Overloaded arcs there are
/// tolerated: switching arcs off can reroute traffic around them.
fn check_full(net: &Network, traffic: &TrafficMatrix) -> Result<(), MspndError> {
    spr_route(net, &Activation::full(net), traffic)
        .map(|_| ())
        .map_err(|_| MspndError::NotRoutableInFull)
}

struct Run<S> {
    res: crate::lp::BnbResult<S>,
    counts: Option<Vec<u32>>,
    path_columns: usize,
    strengthening_rows: usize,
}

fn run<S: Scalar>(
    net: &Network,
    traffic: &TrafficMatrix,
    strengthening: bool,
    config: &BnbConfig,
) -> Result<Run<S>, MspndError> {
    let model = build_root_model::<S>(net, traffic, strengthening)?;
    let mut lp = model.lp;
    let mut engine = Engine::new(model.form);
    let integer: Vec<ColumnId> = engine
        .form
        .links
        .iter()
        .flat_map(|&l| [engine.form.y_col[l], engine.form.x_col[l]])
        .collect();
    let res = branch_and_bound(&mut lp, &integer, config, &mut engine)?;
    Ok(Run {
        counts: res.incumbent.as_ref().map(|x| engine.counts(x)),
        path_columns: engine.form.paths.iter().map(Vec::len).sum(),
        strengthening_rows: engine.form.strengthening_rows,
        res,
    })
}

/// Exact minimum-connection shortest-path network design.
pub fn solve_mspnd<S: Scalar>(
    net: &Network,
    traffic: &TrafficMatrix,
    opts: &MspndOptions,
) -> Result<MspndResult, MspndError> {
    check_full(net, traffic)?;
    if traffic.is_empty() {
        return Ok(MspndResult {
            activation: Activation::new(net, vec![0; net.num_arcs()]).expect("zero is in range"),
            status: BnbStatus::Optimal,
            bound: 0.0,
            root_bound: Some(0.0),
            nodes: 0,
            path_columns: 0,
            strengthening_rows: 0,
        });
    }
    let config = BnbConfig {
        time_limit: opts.time_limit,
        node_limit: None,
        objective_integral: true,
    };
    let run = run::<S>(net, traffic, opts.strengthening, &config)?;
    if run.res.status == BnbStatus::Infeasible {
        return Err(MspndError::NotRoutableInFull);
    }
    let activation = match run.counts {
        Some(c) => Activation::new(net, c).expect("solver respects bounds"),
        None => Activation::full(net),
    };
    Ok(MspndResult {
        activation,
        status: run.res.status,
        bound: run.res.bound.approx(),
        root_bound: run.res.root_bound.map(|b| b.approx()),
        nodes: run.res.nodes,
        path_columns: run.path_columns,
        strengthening_rows: run.strengthening_rows,
    })
}

/// Value of the LP relaxation at the root once pricing and row separation
/// have converged.
pub fn root_lp_value<S: Scalar>(
    net: &Network,
    traffic: &TrafficMatrix,
    strengthening: bool,
) -> Result<S, MspndError> {
    check_full(net, traffic)?;
    if traffic.is_empty() {
        return Ok(S::zero());
    }
    let config = BnbConfig {
        time_limit: None,
        node_limit: Some(1),
        objective_integral: false,
    };
    let run = run::<S>(net, traffic, strengthening, &config)?;
    run.res.root_bound.ok_or(MspndError::NotRoutableInFull)
}
