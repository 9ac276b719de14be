//! Maximum flows and minimum cuts on arc capacities given per call.
//!
//! [`max_flow`] is a highest-label preflow-push with the gap heuristic. It can
//! stop as soon as the sink has collected a requested amount; the preflow is
//! then turned back into a feasible flow by returning stranded excess to the
//! source.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::net::{ArcId, Network, VertexId};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlowError {
    #[error("cut extraction needs a maximum flow, got an early-terminated one")]
    NotMaximum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowResult<S> {
    /// Flow per arc.
    pub flow: Vec<S>,
    /// Net outflow of the source.
    pub value: S,
    pub terminated_early: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutSide {
    /// Minimum cut closest to the source.
    Front,
    /// Minimum cut closest to the sink.
    Back,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cut<S> {
    /// Cut arcs in increasing id order.
    pub arcs: Vec<ArcId>,
    pub capacity: S,
}

struct Residual<'a, S> {
    net: &'a Network,
    /// Remaining forward capacity per arc.
    fwd: Vec<S>,
    /// Flow per arc, which is also the residual capacity of its reverse.
    bwd: Vec<S>,
    excess: Vec<S>,
}

impl<S: Scalar> Residual<'_, S> {
    /// Residual edges leaving `v` as `(arc, forward?, head)`.
    fn edges(&self, v: VertexId) -> impl Iterator<Item = (ArcId, bool, VertexId)> + '_ {
        self.net
            .out_arcs(v)
            .iter()
            .map(|&a| (a, true, self.net.arc(a).head))
            .chain(
                self.net
                    .in_arcs(v)
                    .iter()
                    .map(|&a| (a, false, self.net.arc(a).tail)),
            )
    }

    fn residual(&self, arc: ArcId, forward: bool) -> &S {
        if forward {
            &self.fwd[arc]
        } else {
            &self.bwd[arc]
        }
    }

    fn push(&mut self, from: VertexId, to: VertexId, arc: ArcId, forward: bool, amount: S) {
        if forward {
            self.fwd[arc] = self.fwd[arc].clone() - amount.clone();
            self.bwd[arc] = self.bwd[arc].clone() + amount.clone();
        } else {
            self.bwd[arc] = self.bwd[arc].clone() - amount.clone();
            self.fwd[arc] = self.fwd[arc].clone() + amount.clone();
        }
        self.excess[from] = self.excess[from].clone() - amount.clone();
        self.excess[to] = self.excess[to].clone() + amount;
    }
}

/// Maximum `s`-`t` flow under `ecap`. With `target`, stops once a flow of at
/// least `target` exists and reports `terminated_early`.
pub fn max_flow<S: Scalar>(
    net: &Network,
    ecap: &[S],
    s: VertexId,
    t: VertexId,
    target: Option<&S>,
) -> FlowResult<S> {
    assert_ne!(s, t, "source equals sink");
    assert_eq!(ecap.len(), net.num_arcs());
    let n = net.num_vertices();
    let mut res = Residual {
        net,
        fwd: ecap.to_vec(),
        bwd: vec![S::zero(); net.num_arcs()],
        excess: vec![S::zero(); n],
    };
    let reached = |res: &Residual<S>| target.is_some_and(|tg| res.excess[t] >= *tg);

    // Exact distance labels to t in the initial residual graph.
    let mut height = vec![2 * n; n];
    height[t] = 0;
    let mut queue = std::collections::VecDeque::from([t]);
    while let Some(v) = queue.pop_front() {
        for &a in net.in_arcs(v) {
            let u = net.arc(a).tail;
            if height[u] == 2 * n && res.fwd[a] > S::zero() && u != s {
                height[u] = height[v] + 1;
                queue.push_back(u);
            }
        }
    }
    height[s] = n;
    for v in 0..n {
        if height[v] == 2 * n {
            height[v] = n + 1;
        }
    }

    let mut count = vec![0usize; 2 * n + 2];
    for &h in &height {
        count[h] += 1;
    }
    let mut buckets: Vec<Vec<VertexId>> = vec![Vec::new(); 2 * n + 2];
    let mut in_bucket = vec![false; n];
    let mut highest = 0usize;
    let activate = |v: VertexId,
                    height: &[usize],
                    buckets: &mut Vec<Vec<VertexId>>,
                    in_bucket: &mut Vec<bool>,
                    highest: &mut usize| {
        if v != s && v != t && !in_bucket[v] && height[v] < 2 * n {
            buckets[height[v]].push(v);
            in_bucket[v] = true;
            *highest = (*highest).max(height[v]);
        }
    };

    for &a in net.out_arcs(s) {
        let cap = res.fwd[a].clone();
        if cap > S::zero() {
            let head = net.arc(a).head;
            res.push(s, head, a, true, cap);
            activate(head, &height, &mut buckets, &mut in_bucket, &mut highest);
        }
    }

    let mut current = vec![0usize; n];
    let mut early = reached(&res);
    while !early {
        while highest > 0 && buckets[highest].is_empty() {
            highest -= 1;
        }
        let Some(v) = buckets[highest].pop() else {
            break;
        };
        in_bucket[v] = false;

        // Discharge v.
        let edges: Vec<(ArcId, bool, VertexId)> = res.edges(v).collect();
        while res.excess[v] > S::zero() {
            if current[v] == edges.len() {
                // Relabel.
                let old = height[v];
                let new = edges
                    .iter()
                    .filter(|&&(a, fwd, _)| *res.residual(a, fwd) > S::zero())
                    .map(|&(_, _, w)| height[w] + 1)
                    .min()
                    .unwrap_or(2 * n)
                    .min(2 * n);
                count[old] -= 1;
                height[v] = new;
                count[new] += 1;
                current[v] = 0;
                if count[old] == 0 && old < n {
                    // Gap: nothing above `old` can reach the sink any more.
                    for u in 0..n {
                        if height[u] > old && height[u] < n && u != s {
                            count[height[u]] -= 1;
                            height[u] = n + 1;
                            count[n + 1] += 1;
                        }
                    }
                }
                if height[v] >= 2 * n {
                    break;
                }
                continue;
            }
            let (a, fwd, w) = edges[current[v]];
            let r = res.residual(a, fwd).clone();
            if r > S::zero() && height[v] == height[w] + 1 {
                let amount = S::min_of(res.excess[v].clone(), r);
                res.push(v, w, a, fwd, amount);
                activate(w, &height, &mut buckets, &mut in_bucket, &mut highest);
                if w == t && reached(&res) {
                    break;
                }
            } else {
                current[v] += 1;
            }
        }
        if res.excess[v] > S::zero() && height[v] < 2 * n {
            activate(v, &height, &mut buckets, &mut in_bucket, &mut highest);
        }
        early = reached(&res);
    }

    return_excess(&mut res, s, t);
    let value = res.excess[t].clone();
    FlowResult {
        flow: res.bwd,
        value,
        terminated_early: early,
    }
}

/// Turns a preflow into a flow by walking stranded excess back to `s`
/// along arcs carrying flow, cancelling any flow cycle met on the way.
fn return_excess<S: Scalar>(res: &mut Residual<S>, s: VertexId, t: VertexId) {
    let net = res.net;
    let n = net.num_vertices();
    for start in 0..n {
        if start == s || start == t {
            continue;
        }
        while res.excess[start] > S::zero() {
            // Walk backwards along positive-flow arcs.
            let mut position = vec![usize::MAX; n];
            let mut walk: Vec<ArcId> = Vec::new();
            let mut at = start;
            position[at] = 0;
            loop {
                if at == s {
                    break;
                }
                let Some(&a) = net.in_arcs(at).iter().find(|&&a| res.bwd[a] > S::zero()) else {
                    // Only possible through rounding; drop the residue.
                    res.excess[start] = S::zero();
                    walk.clear();
                    break;
                };
                let prev = net.arc(a).tail;
                if position[prev] != usize::MAX {
                    // Cycle through `prev`: cancel it and retry.
                    let cycle: Vec<ArcId> = std::iter::once(a)
                        .chain(walk[position[prev]..].iter().copied())
                        .collect();
                    let amount = cycle
                        .iter()
                        .map(|&c| res.bwd[c].clone())
                        .reduce(S::min_of)
                        .expect("nonempty cycle");
                    for &c in &cycle {
                        res.bwd[c] = res.bwd[c].clone() - amount.clone();
                        res.fwd[c] = res.fwd[c].clone() + amount.clone();
                    }
                    walk.clear();
                    break;
                }
                walk.push(a);
                at = prev;
                position[at] = walk.len();
            }
            if at != s || walk.is_empty() {
                continue;
            }
            let amount = walk
                .iter()
                .map(|&c| res.bwd[c].clone())
                .fold(res.excess[start].clone(), S::min_of);
            for &c in &walk {
                res.bwd[c] = res.bwd[c].clone() - amount.clone();
                res.fwd[c] = res.fwd[c].clone() + amount.clone();
            }
            res.excess[start] = res.excess[start].clone() - amount.clone();
            res.excess[s] = res.excess[s].clone() + amount;
        }
    }
}

/// Front or back minimum cut of a maximum flow.
///
/// The front cut marks everything reachable from `s` in the residual graph
/// and keeps the arcs from marked vertices into vertices that reach `t`
/// through unmarked vertices in the original graph. The back cut mirrors
/// this from `t`.
pub fn extract_cut<S: Scalar>(
    net: &Network,
    ecap: &[S],
    flow: &FlowResult<S>,
    s: VertexId,
    t: VertexId,
    side: CutSide,
) -> Result<Cut<S>, FlowError> {
    if flow.terminated_early {
        return Err(FlowError::NotMaximum);
    }
    let n = net.num_vertices();
    let tol = S::feas_tol();
    let residual_fwd = |a: ArcId| ecap[a].clone() - flow.flow[a].clone() > tol;
    let has_flow = |a: ArcId| flow.flow[a] > tol;

    let mut marked = vec![false; n];
    let mut other = vec![false; n];
    let (root, far) = match side {
        CutSide::Front => (s, t),
        CutSide::Back => (t, s),
    };
    // Residual search from the root (forward for the front cut, backward for the back cut).
    let mut stack = vec![root];
    marked[root] = true;
    while let Some(v) = stack.pop() {
        let mut visit = |w: VertexId, ok: bool| {
            if ok && !marked[w] {
                marked[w] = true;
                stack.push(w);
            }
        };
        for &a in net.out_arcs(v) {
            let ok = match side {
                CutSide::Front => residual_fwd(a),
                CutSide::Back => has_flow(a),
            };
            visit(net.arc(a).head, ok);
        }
        for &a in net.in_arcs(v) {
            let ok = match side {
                CutSide::Front => has_flow(a),
                CutSide::Back => residual_fwd(a),
            };
            visit(net.arc(a).tail, ok);
        }
    }
    // Plain search from the far terminal through unmarked vertices, against
    // arc direction for the front cut and along it for the back cut.
    let mut stack = vec![far];
    other[far] = !marked[far];
    while let Some(v) = stack.pop() {
        if !other[v] {
            continue;
        }
        let next: Vec<VertexId> = match side {
            CutSide::Front => net.in_arcs(v).iter().map(|&a| net.arc(a).tail).collect(),
            CutSide::Back => net.out_arcs(v).iter().map(|&a| net.arc(a).head).collect(),
        };
        for w in next {
            if !marked[w] && !other[w] {
                other[w] = true;
                stack.push(w);
            }
        }
    }
    let arcs: BTreeSet<ArcId> = net
        .arcs()
        .iter()
        .filter(|arc| match side {
            CutSide::Front => marked[arc.tail] && other[arc.head],
            CutSide::Back => other[arc.tail] && marked[arc.head],
        })
        .map(|arc| arc.id)
        .collect();
    let capacity = arcs.iter().fold(S::zero(), |acc, &a| acc + ecap[a].clone());
    Ok(Cut {
        arcs: arcs.into_iter().collect(),
        capacity,
    })
}

/// Minimum-cut values for every ordered vertex pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairValues<S> {
    n: usize,
    values: Vec<S>,
}

impl<S: Scalar> PairValues<S> {
    pub fn get(&self, s: VertexId, t: VertexId) -> &S {
        &self.values[s * self.n + t]
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    /// Pairs `(s, t)` with `s != t`, in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        (0..self.n).flat_map(move |s| (0..self.n).filter(move |&t| t != s).map(move |t| (s, t)))
    }
}

/// Max-flow values under `ecap` for all ordered pairs.
pub fn all_pairs_maxflow_with<S: Scalar>(net: &Network, ecap: &[S]) -> PairValues<S> {
    let n = net.num_vertices();
    let mut values = vec![S::zero(); n * n];
    for s in 0..n {
        for t in 0..n {
            if s != t {
                values[s * n + t] = max_flow(net, ecap, s, t, None).value;
            }
        }
    }
    PairValues { n, values }
}

/// `lambda_G(s, t)` for all ordered pairs using full capacities `mu * ccap`.
pub fn all_pairs_maxflow<S: Scalar>(net: &Network) -> PairValues<S> {
    all_pairs_maxflow_with(net, &full_capacities(net))
}

/// `mu(a) * ccap(a)` per arc.
pub fn full_capacities<S: Scalar>(net: &Network) -> Vec<S> {
    net.arcs()
        .iter()
        .map(|a| S::from_rational(&a.fcap()))
        .collect()
}
