//! Minimum capacity-preserving subgraphs: keep at least a `rho` share of
//! every pairwise max-flow value with as few active connections as possible.

use std::collections::{BTreeSet, HashSet};
use std::time::Duration;

use thiserror::Error;

use crate::flow::{all_pairs_maxflow, extract_cut, max_flow, CutSide, PairValues};
use crate::lp::{
    branch_and_bound, BnbCallbacks, BnbConfig, BnbStatus, LpError, LpModel, LpSolution, Sense,
};
use crate::net::{Activation, ArcId, Network, VertexId};
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum McpsError {
    #[error("retention ratio must lie strictly between 0 and 1")]
    BadRatio,
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Network, retention ratio and the full-network pairwise max-flow values.
#[derive(Debug, Clone)]
pub struct McpsInstance<'a> {
    pub net: &'a Network,
    pub rho: Rational,
    pub lambda: PairValues<Rational>,
}

impl<'a> McpsInstance<'a> {
    pub fn new(net: &'a Network, rho: Rational) -> Result<Self, McpsError> {
        if rho <= Rational::from_integer(0.into()) || rho >= Rational::from_integer(1.into()) {
            return Err(McpsError::BadRatio);
        }
        Ok(Self {
            net,
            rho,
            lambda: all_pairs_maxflow(net),
        })
    }

    /// `rho * lambda_G(s, t)`.
    pub fn requirement(&self, s: VertexId, t: VertexId) -> Rational {
        &self.rho * self.lambda.get(s, t)
    }

    /// Ordered pairs with a positive max-flow value.
    pub fn pairs(&self) -> Vec<(VertexId, VertexId)> {
        self.lambda
            .pairs()
            .filter(|&(s, t)| *self.lambda.get(s, t) > Rational::from_integer(0.into()))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerBounds {
    /// Minimum retained connections per arc (equal on both arcs of a link).
    pub lb: Vec<u32>,
    /// Pairs whose requirement already holds with every arc at its lower bound.
    pub satisfied: BTreeSet<(VertexId, VertexId)>,
}

/// A cut row `sum_{a in arcs} ccap(a) x_a >= rhs` for one terminal pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CutConstraint {
    pub pair: (VertexId, VertexId),
    pub arcs: Vec<ArcId>,
    pub rhs: Rational,
}

fn capacities_with(net: &Network, counts: &[u32]) -> Vec<Rational> {
    net.arcs()
        .iter()
        .map(|a| &a.ccap * Rational::from_integer(counts[a.id].into()))
        .collect()
}

fn meets(net: &Network, ecap: &[Rational], s: VertexId, t: VertexId, need: &Rational) -> bool {
    max_flow(net, ecap, s, t, Some(need)).value >= *need
}

/// Smallest retained count per arc `a = st` that keeps `lambda(s, t)` at the
/// required level with every other arc fully active.
pub fn precompute_lower_bounds(inst: &McpsInstance) -> LowerBounds {
    let net = inst.net;
    let full: Vec<u32> = net.arcs().iter().map(|a| a.mu).collect();
    let mut lb = vec![0u32; net.num_arcs()];
    for arc in net.arcs() {
        let need = inst.requirement(arc.tail, arc.head);
        let mut counts = full.clone();
        let (mut lo, mut hi) = (0u32, arc.mu);
        while lo < hi {
            let mid = (lo + hi) / 2;
            counts[arc.id] = mid;
            if meets(
                net,
                &capacities_with(net, &counts),
                arc.tail,
                arc.head,
                &need,
            ) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        lb[arc.id] = lo;
    }
    for a in 0..net.num_arcs() {
        if let Some(rev) = net.link_partner(a) {
            let m = lb[a].max(lb[rev]);
            lb[a] = m;
            lb[rev] = m;
        }
    }
    let ecap = capacities_with(net, &lb);
    let satisfied = inst
        .pairs()
        .into_iter()
        .filter(|&(s, t)| meets(net, &ecap, s, t, &inst.requirement(s, t)))
        .collect();
    LowerBounds { lb, satisfied }
}

/// Cuts violated by `xhat` for the pending pairs, front and back cut per
/// violated pair. Among minimum cuts those with fewer arcs are preferred.
pub fn separate_cuts<S: Scalar>(
    inst: &McpsInstance,
    xhat: &[S],
    pending: &[(VertexId, VertexId)],
) -> Vec<CutConstraint> {
    let net = inst.net;
    let tol = S::feas_tol();
    let ecap: Vec<S> = net
        .arcs()
        .iter()
        .map(|a| {
            let x = S::max_of(xhat[a.id].clone(), S::zero());
            S::from_rational(&a.ccap) * x
        })
        .collect();
    let scale = S::from_count(net.num_arcs() as u64 + 1);
    let perturbed: Vec<S> = ecap
        .iter()
        .map(|c| c.clone() * scale.clone() + S::one())
        .collect();
    let mut out: Vec<CutConstraint> = Vec::new();
    for &(s, t) in pending {
        let rhs = inst.requirement(s, t);
        let need = S::from_rational(&rhs);
        let target = need.clone() - tol.clone() * (S::one() + need.abs());
        let flow = max_flow(net, &ecap, s, t, Some(&target));
        if flow.value >= target {
            continue;
        }
        let cut_value =
            |arcs: &[ArcId]| arcs.iter().fold(S::zero(), |acc, &a| acc + ecap[a].clone());
        let pflow = max_flow(net, &perturbed, s, t, None);
        let mut found: Vec<Vec<ArcId>> = Vec::new();
        for side in [CutSide::Front, CutSide::Back] {
            if let Ok(cut) = extract_cut(net, &perturbed, &pflow, s, t, side) {
                if cut_value(&cut.arcs) < target && !found.contains(&cut.arcs) {
                    found.push(cut.arcs);
                }
            }
        }
        if found.is_empty() {
            for side in [CutSide::Front, CutSide::Back] {
                let cut = extract_cut(net, &ecap, &flow, s, t, side)
                    .expect("flow below target is maximum");
                if !found.contains(&cut.arcs) {
                    found.push(cut.arcs);
                }
            }
        }
        out.extend(found.into_iter().map(|arcs| CutConstraint {
            pair: (s, t),
            arcs,
            rhs: rhs.clone(),
        }));
    }
    out
}

#[derive(Debug, Clone, Default)]
pub struct McpsLimits {
    pub time_limit: Option<Duration>,
}

#[derive(Debug, Clone)]
pub struct McpsResult {
    pub activation: Activation,
    pub status: BnbStatus,
    /// Lower bound on the optimum value.
    pub bound: f64,
    pub nodes: usize,
    pub cuts: usize,
}

/// `true` iff `lambda_H(s, t) >= rho * lambda_G(s, t)` for every pair.
pub fn preserves_capacity(inst: &McpsInstance, activation: &Activation) -> bool {
    let ecap = capacities_with(inst.net, activation.counts());
    inst.pairs()
        .into_iter()
        .all(|(s, t)| meets(inst.net, &ecap, s, t, &inst.requirement(s, t)))
}

struct CutCallbacks<'a, 'b> {
    inst: &'a McpsInstance<'b>,
    link_col: Vec<usize>,
    pending: Vec<(VertexId, VertexId)>,
    seen: HashSet<((VertexId, VertexId), Vec<ArcId>)>,
    cuts: usize,
}

impl<S: Scalar> BnbCallbacks<S> for CutCallbacks<'_, '_> {
    fn separate(&mut self, model: &mut LpModel<S>, sol: &LpSolution<S>) -> usize {
        let xhat: Vec<S> = self
            .link_col
            .iter()
            .map(|&c| sol.primal[c].clone())
            .collect();
        let mut added = 0;
        for cut in separate_cuts(self.inst, &xhat, &self.pending) {
            if !self.seen.insert((cut.pair, cut.arcs.clone())) {
                continue;
            }
            let coefs: Vec<(usize, S)> = cut
                .arcs
                .iter()
                .map(|&a| {
                    (
                        self.link_col[a],
                        S::from_rational(&self.inst.net.arc(a).ccap),
                    )
                })
                .collect();
            let name = format!("cut_{}_{}_{}", cut.pair.0, cut.pair.1, self.cuts);
            model
                .add_row(name, &coefs, Sense::Ge, S::from_rational(&cut.rhs))
                .expect("cut references existing columns");
            self.cuts += 1;
            added += 1;
        }
        added
    }

    fn accept_incumbent(&mut self, _model: &LpModel<S>, x: &[S]) -> bool {
        let counts: Vec<u32> = self
            .link_col
            .iter()
            .map(|&c| x[c].to_count() as u32)
            .collect();
        Activation::new(self.inst.net, counts)
            .map(|act| preserves_capacity(self.inst, &act))
            .unwrap_or(false)
    }
}

/// Exact MCPS by branch-and-cut over one integer column per link.
pub fn solve_mcps<S: Scalar>(
    net: &Network,
    rho: &Rational,
    limits: &McpsLimits,
) -> Result<McpsResult, McpsError> {
    let inst = McpsInstance::new(net, rho.clone())?;
    let bounds = precompute_lower_bounds(&inst);
    let mut model: LpModel<S> = LpModel::new();
    let mut link_col = vec![usize::MAX; net.num_arcs()];
    let mut integer = Vec::new();
    for link in net.links() {
        let arc = net.arc(link);
        let weight = if net.link_partner(link).is_some() {
            2
        } else {
            1
        };
        let col = model.add_column(
            format!("x_{}_{}", arc.tail, arc.head),
            S::from_count(weight),
            Some(S::from_count(bounds.lb[link].into())),
            Some(S::from_count(arc.mu.into())),
            &[],
        )?;
        integer.push(col);
        link_col[link] = col;
        if let Some(rev) = net.link_partner(link) {
            link_col[rev] = col;
        }
    }
    let pending: Vec<_> = inst
        .pairs()
        .into_iter()
        .filter(|p| !bounds.satisfied.contains(p))
        .collect();
    let mut cb = CutCallbacks {
        inst: &inst,
        link_col: link_col.clone(),
        pending,
        seen: HashSet::new(),
        cuts: 0,
    };
    let config = BnbConfig {
        time_limit: limits.time_limit,
        node_limit: None,
        objective_integral: true,
    };
    let res = branch_and_bound(&mut model, &integer, &config, &mut cb)?;
    let activation = match &res.incumbent {
        Some(x) => {
            let counts = link_col.iter().map(|&c| x[c].to_count() as u32).collect();
            Activation::new(net, counts).expect("solver respects bounds")
        }
        None => Activation::full(net),
    };
    Ok(McpsResult {
        activation,
        status: res.status,
        bound: res.bound.approx(),
        nodes: res.nodes,
        cuts: cb.cuts,
    })
}
