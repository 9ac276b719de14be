//! Minimum shortest-path network design: switch off as many connections as
//! possible while unique shortest-path routing of the demands stays within
//! capacity.

mod model;
mod pricing;
mod solver;

use num_traits::Zero;
use thiserror::Error;

use crate::lp::LpError;
use crate::net::{Activation, ArcId, Network, TrafficMatrix, VertexId};
use crate::routing::spr_route;
use crate::scalar::Rational;

pub use model::{
    build_root_model, compute_dcost, DualPrices, Formulation, ModelPath, MspndModel, INITIAL_PATHS,
};
pub use pricing::{price_paths, Label, PricingState, ENUMERATION_BUDGET, LABEL_BUDGET};
pub use solver::{root_lp_value, solve_mspnd, MspndOptions, MspndResult, SEPARATION_BUDGET};

/// Largest number of activation vectors [`brute_force_mspnd`] will consider.
pub const BRUTE_FORCE_LIMIT: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MspndError {
    #[error("demands are not routable along shortest paths of the full network")]
    NotRoutableInFull,
    #[error("no path from {0} to {1}")]
    DisconnectedPair(VertexId, VertexId),
    #[error("path is already part of the model")]
    DuplicatePath,
    #[error("search space exceeds the brute-force limit")]
    TooLarge,
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Smallest connection count carrying `load` on an arc of capacity `ccap`
/// per connection.
fn connections_for(load: &Rational, ccap: &Rational) -> u64 {
    if load.is_zero() {
        return 0;
    }
    let q = (load / ccap).ceil();
    q.to_integer().try_into().unwrap_or(u64::MAX)
}

/// Routes along the full network's shortest paths and keeps just enough
/// connections per arc for the resulting load.
pub fn solve_f_mspnd(net: &Network, traffic: &TrafficMatrix) -> Result<Activation, MspndError> {
    let routing = spr_route(net, &Activation::full(net), traffic)
        .map_err(|_| MspndError::NotRoutableInFull)?;
    let need: Vec<u64> = net
        .arcs()
        .iter()
        .map(|a| connections_for(&routing.load[a.id], &a.ccap))
        .collect();
    let mut counts = Vec::with_capacity(net.num_arcs());
    for a in net.arcs() {
        let c = match net.link_partner(a.id) {
            Some(r) => need[a.id].max(need[r]),
            None => need[a.id],
        };
        if c > u64::from(a.mu) {
            return Err(MspndError::NotRoutableInFull);
        }
        counts.push(c as u32);
    }
    Ok(Activation::new(net, counts).expect("counts within bounds"))
}

/// Connection counts for the arcs switched on in `on`: shortest-path routing
/// over them fixes the load, and every active arc keeps at least one
/// connection. `None` if some demand is cut off or some arc overflows.
pub(crate) fn fit_connections(
    net: &Network,
    traffic: &TrafficMatrix,
    on: Vec<u32>,
) -> Option<Vec<u32>> {
    let probe = Activation::new(net, on.clone()).expect("single connections are in range");
    let routing = spr_route(net, &probe, traffic).ok()?;
    let mut counts = on;
    for a in net.arcs() {
        if counts[a.id] == 0 {
            continue;
        }
        let mut need = connections_for(&routing.load[a.id], &a.ccap).max(1);
        if let Some(r) = net.link_partner(a.id) {
            need = need.max(connections_for(&routing.load[r], &net.arc(r).ccap));
        }
        if need > u64::from(a.mu) {
            return None;
        }
        counts[a.id] = need as u32;
    }
    Some(counts)
}

/// Exhaustive optimum. Every set of active links is tried once; its
/// shortest-path routing fixes the fewest connections each active arc needs.
pub fn brute_force_mspnd(net: &Network, traffic: &TrafficMatrix) -> Result<Activation, MspndError> {
    let links: Vec<ArcId> = net.links();
    let mut space: u64 = 1;
    for &l in &links {
        space = space.saturating_mul(u64::from(net.arc(l).mu) + 1);
    }
    if space > BRUTE_FORCE_LIMIT || links.len() >= 64 {
        return Err(MspndError::TooLarge);
    }
    let mut best: Option<(u64, Vec<u32>)> = None;
    for mask in 0u64..(1u64 << links.len()) {
        let mut on = vec![0u32; net.num_arcs()];
        for (k, &l) in links.iter().enumerate() {
            if mask >> k & 1 == 1 {
                on[l] = 1;
                if let Some(r) = net.link_partner(l) {
                    on[r] = 1;
                }
            }
        }
        let Some(counts) = fit_connections(net, traffic, on) else {
            continue;
        };
        let value: u64 = counts.iter().map(|&c| u64::from(c)).sum();
        if best.as_ref().map_or(true, |(v, _)| value < *v) {
            best = Some((value, counts));
        }
    }
    let (_, counts) = best.ok_or(MspndError::NotRoutableInFull)?;
    Ok(Activation::new(net, counts).expect("counts within bounds"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::scalar::int;

    #[test]
    fn fixed_routing_on_detour() {
        let net = fixtures::detour();
        let act = solve_f_mspnd(&net, &fixtures::detour_traffic()).unwrap();
        assert_eq!(act.counts(), &[3, 0, 0]);
        let one = TrafficMatrix::from_entries(2, [(0, 1, int(3))]).unwrap();
        assert_eq!(
            solve_f_mspnd(&fixtures::single_arc(), &one)
                .unwrap()
                .value(),
            3
        );
    }

    #[test]
    fn fixed_routing_rejects_overload() {
        let one = TrafficMatrix::from_entries(2, [(0, 1, int(6))]).unwrap();
        assert_eq!(
            solve_f_mspnd(&fixtures::single_arc(), &one),
            Err(MspndError::NotRoutableInFull)
        );
    }

    #[test]
    fn brute_force_examples() {
        let net = fixtures::detour();
        let act = brute_force_mspnd(&net, &fixtures::detour_traffic()).unwrap();
        assert_eq!(act.counts(), &[0, 1, 1]);
        let (net, traffic) = fixtures::strengthening_instance();
        assert_eq!(brute_force_mspnd(&net, &traffic).unwrap().value(), 9);
    }

    #[test]
    fn dcost_formula() {
        let duals = DualPrices {
            alpha: vec![0.0],
            beta: vec![[(0, 0.5)].into_iter().collect()],
            gamma: vec![0.1, 1.0],
            delta: vec![vec![]],
            farkas: false,
        };
        assert!((compute_dcost(&duals, &2.0, 0, 0) - 0.7).abs() < 1e-12);
        assert_eq!(compute_dcost(&duals, &3.0, 0, 1), 3.0);
    }
}
