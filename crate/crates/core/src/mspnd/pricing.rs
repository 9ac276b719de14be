//! Column generation for path variables: a label-setting search for the
//! length-shortest path whose dual cost stays below the connectivity dual.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::net::{ArcId, VertexId};
use crate::routing::{distances_from, Path, PathEnumerator};
use crate::scalar::Scalar;

use super::model::{compute_dcost, DualPrices, Formulation};

/// Labels created per search pass before giving up.
pub const LABEL_BUDGET: usize = 400_000;
/// Paths inspected by the enumeration fallback used when some arc has a
/// negative dual cost (possible with infeasibility certificates).
pub const ENUMERATION_BUDGET: usize = 5_000;

/// Outcome of the previous search for one pair.
#[derive(Debug, Clone)]
struct PairMemo<S> {
    alpha: S,
    dcost: Vec<S>,
    farkas: bool,
}

/// Per-pair memory that lets a search be skipped when the duals moved too
/// little since the last unsuccessful one.
#[derive(Debug, Clone, Default)]
pub struct PricingState<S> {
    failed: Vec<Option<PairMemo<S>>>,
    pub skipped: usize,
}

impl<S: Scalar> PricingState<S> {
    pub fn new(pairs: usize) -> Self {
        Self {
            failed: vec![None; pairs],
            skipped: 0,
        }
    }

    /// Forgets every recorded failure.
    pub fn clear(&mut self) {
        self.failed.iter_mut().for_each(|f| *f = None);
    }
}

/// Partial `s`-`v` path of the search, linked to its parent label.
#[derive(Debug, Clone)]
pub struct Label<S> {
    pub vertex: VertexId,
    pub parent: Option<usize>,
    pub arc: Option<ArcId>,
    pub len: u64,
    pub dcost: S,
}

struct Entry<S> {
    slack: u64,
    dist: u64,
    dcost: S,
    seq: usize,
}

impl<S: Scalar> Entry<S> {
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.slack
            .cmp(&other.slack)
            .then(self.dist.cmp(&other.dist))
            .then_with(|| {
                self.dcost
                    .partial_cmp(&other.dcost)
                    .unwrap_or(Ordering::Equal)
            })
            .then(self.seq.cmp(&other.seq))
    }
}

impl<S: Scalar> PartialEq for Entry<S> {
    fn eq(&self, other: &Self) -> bool {
        self.seq == other.seq
    }
}

impl<S: Scalar> Eq for Entry<S> {}

impl<S: Scalar> PartialOrd for Entry<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: Scalar> Ord for Entry<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        other.key_cmp(self)
    }
}

enum Search {
    Found(Path),
    /// Search space exhausted; `candidates` counts out-of-model `s`-`t`
    /// paths reached but rejected by the full dual check.
    Exhausted {
        candidates: usize,
    },
    OverBudget,
}

/// Minimum dual cost from every vertex to `t`, `None` if `t` is unreachable.
fn cost_to_target<S: Scalar>(form: &Formulation, dcost: &[S], t: VertexId) -> Vec<Option<S>> {
    let n = form.net.num_vertices();
    let mut best: Vec<Option<S>> = vec![None; n];
    let mut done = vec![false; n];
    best[t] = Some(S::zero());
    loop {
        let mut pick: Option<VertexId> = None;
        for v in 0..n {
            if done[v] || best[v].is_none() {
                continue;
            }
            if pick.map_or(true, |p| best[v] < best[p]) {
                pick = Some(v);
            }
        }
        let Some(v) = pick else { break };
        done[v] = true;
        let dv = best[v].clone().expect("picked vertices are labelled");
        for &a in form.net.in_arcs(v) {
            let u = form.net.arc(a).tail;
            let cand = dv.clone() + dcost[a].clone();
            if !done[u] && best[u].as_ref().map_or(true, |b| cand < *b) {
                best[u] = Some(cand);
            }
        }
    }
    best
}

struct SearchInput<'s, S> {
    pair: usize,
    dcost: &'s [S],
    to_target: &'s [Option<S>],
    dist: &'s [Option<u64>],
    limit: S,
}

fn search<S: Scalar>(
    form: &Formulation,
    duals: &DualPrices<S>,
    input: &SearchInput<S>,
    dominate: bool,
) -> Search {
    let net = form.net;
    let (s, t) = form.pairs[input.pair];
    let tol = S::feas_tol();
    let mut labels: Vec<Label<S>> = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut kept: Vec<Vec<(u64, S)>> = vec![Vec::new(); net.num_vertices()];
    let Some(root_bound) = &input.to_target[s] else {
        return Search::Exhausted { candidates: 0 };
    };
    if !(*root_bound < input.limit) {
        return Search::Exhausted { candidates: 0 };
    }
    labels.push(Label {
        vertex: s,
        parent: None,
        arc: None,
        len: 0,
        dcost: S::zero(),
    });
    heap.push(Entry {
        slack: 0,
        dist: 0,
        dcost: S::zero(),
        seq: 0,
    });
    let mut candidates = 0;
    let mut on_path = vec![false; net.num_vertices()];
    while let Some(entry) = heap.pop() {
        let idx = entry.seq;
        let v = labels[idx].vertex;
        let arcs = trace(&labels, idx);
        if v == t {
            let path = Path::from_arcs(net, arcs).expect("labels are elementary");
            if form.contains(input.pair, &path) {
                continue;
            }
            if form.violation(duals, input.pair, &path) > tol {
                return Search::Found(path);
            }
            candidates += 1;
            continue;
        }
        on_path[s] = true;
        for &a in &arcs {
            on_path[net.arc(a).head] = true;
        }
        let (len, cost) = (labels[idx].len, labels[idx].dcost.clone());
        for &a in net.out_arcs(v) {
            let w = net.arc(a).head;
            if on_path[w] {
                continue;
            }
            let (Some(rest), Some(dw)) = (&input.to_target[w], input.dist[w]) else {
                continue;
            };
            let nc = cost.clone() + input.dcost[a].clone();
            if !(nc.clone() + rest.clone() < input.limit) {
                continue;
            }
            let nl = len + net.arc(a).len;
            if dominate {
                if kept[w].iter().any(|(l, c)| *l <= nl && *c <= nc) {
                    continue;
                }
                kept[w].push((nl, nc.clone()));
            }
            if labels.len() >= LABEL_BUDGET {
                return Search::OverBudget;
            }
            let seq = labels.len();
            labels.push(Label {
                vertex: w,
                parent: Some(idx),
                arc: Some(a),
                len: nl,
                dcost: nc.clone(),
            });
            heap.push(Entry {
                slack: nl - dw,
                dist: dw,
                dcost: nc,
                seq,
            });
        }
        on_path.iter_mut().for_each(|b| *b = false);
    }
    Search::Exhausted { candidates }
}

fn trace<S>(labels: &[Label<S>], mut idx: usize) -> Vec<ArcId> {
    let mut arcs = Vec::new();
    while let Some(a) = labels[idx].arc {
        arcs.push(a);
        idx = labels[idx].parent.expect("non-root labels have a parent");
    }
    arcs.reverse();
    arcs
}

/// Walks paths in increasing path order and returns the first one outside
/// the model whose column has a positive dual slack.
fn enumerate_for<S: Scalar>(
    form: &Formulation,
    duals: &DualPrices<S>,
    pair: usize,
) -> Option<Path> {
    let (s, t) = form.pairs[pair];
    PathEnumerator::new(form.net, s, t)
        .take(ENUMERATION_BUDGET)
        .find(|p| !form.contains(pair, p) && form.violation(duals, pair, p) > S::feas_tol())
}

/// The length-shortest `s`-`t` path outside the model whose dual cost is
/// below `alpha`, and whose column violates its dual constraint.
pub fn price_paths<S: Scalar>(
    form: &Formulation,
    duals: &DualPrices<S>,
    pair: usize,
    state: &mut PricingState<S>,
) -> Option<Path> {
    let tol = S::feas_tol();
    let demand = form.demand::<S>(pair);
    let raw: Vec<S> = (0..form.net.num_arcs())
        .map(|a| compute_dcost(duals, &demand, pair, a))
        .collect();
    if raw.iter().any(|c| *c < -tol.clone()) {
        state.failed[pair] = None;
        return enumerate_for(form, duals, pair);
    }
    let dcost: Vec<S> = raw.into_iter().map(|c| S::max_of(c, S::zero())).collect();
    let alpha = duals.alpha[pair].clone();

    if let Some(memo) = &state.failed[pair] {
        if memo.farkas == duals.farkas {
            let drop = memo
                .dcost
                .iter()
                .zip(&dcost)
                .fold(S::zero(), |acc, (old, new)| {
                    acc + S::max_of(old.clone() - new.clone(), S::zero())
                });
            if alpha <= memo.alpha.clone() - drop {
                state.skipped += 1;
                return None;
            }
        }
    }

    let (s, t) = form.pairs[pair];
    let input = SearchInput {
        pair,
        dcost: &dcost,
        to_target: &cost_to_target(form, &dcost, t),
        dist: &distances_from(form.net, s, |_| true),
        limit: alpha.clone() - tol,
    };
    if let Search::Found(p) = search(form, duals, &input, true) {
        state.failed[pair] = None;
        return Some(p);
    }
    match search(form, duals, &input, false) {
        Search::Found(p) => {
            state.failed[pair] = None;
            Some(p)
        }
        Search::Exhausted { candidates: 0 } => {
            state.failed[pair] = Some(PairMemo {
                alpha,
                dcost,
                farkas: duals.farkas,
            });
            None
        }
        Search::Exhausted { .. } => {
            state.failed[pair] = None;
            None
        }
        Search::OverBudget => {
            state.failed[pair] = None;
            enumerate_for(form, duals, pair)
        }
    }
}
