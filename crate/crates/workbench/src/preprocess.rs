//! Turns a parsed topology into a [`Network`] and rescales traffic so the
//! full network routes it at utilization exactly one.

use std::collections::BTreeMap;

use greenroute::net::Activation;
use greenroute::net::{ArcSpec, DuplexMode, NetError, Network, TrafficMatrix, VertexId};
use greenroute::routing::{mlu, spr_route, Mlu, RoutingError};
use greenroute::scalar::Rational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::repetita::GraphPrecursor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LengthMode {
    /// Edge weights from the file.
    #[serde(alias = "asGiven")]
    Given,
    Unit,
    /// `ceil(C_max / fcap(a))`.
    #[serde(alias = "inverseCapacity")]
    Invcap,
}

impl LengthMode {
    pub fn name(self) -> &'static str {
        match self {
            LengthMode::Given => "given",
            LengthMode::Unit => "unit",
            LengthMode::Invcap => "invcap",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PreprocessError {
    #[error("no path for demand {0} -> {1} in the full network")]
    DisconnectedDemand(VertexId, VertexId),
    #[error("edge {0} -> {1} has zero bandwidth")]
    ZeroCapacity(VertexId, VertexId),
    #[error("connection count must be at least 1")]
    ZeroConnections,
    #[error("demand matrix has {got} vertices, topology has {expected}")]
    VertexMismatch { got: usize, expected: usize },
    #[error(transparent)]
    Net(#[from] NetError),
}

struct Merged {
    weight: u64,
    bw: Rational,
}

/// Parallel edges collapse into one arc with their summed bandwidth and the
/// smallest weight; self-loops are dropped.
fn merge(graph: &GraphPrecursor) -> BTreeMap<(VertexId, VertexId), Merged> {
    let mut merged: BTreeMap<(VertexId, VertexId), Merged> = BTreeMap::new();
    for e in &graph.edges {
        if e.src == e.dst {
            continue;
        }
        merged
            .entry((e.src, e.dst))
            .and_modify(|m| {
                m.weight = m.weight.min(e.weight);
                m.bw += &e.bw;
            })
            .or_insert(Merged {
                weight: e.weight,
                bw: e.bw.clone(),
            });
    }
    merged
}

/// For full-duplex links: a missing direction is added as a copy of the
/// present one, and both directions get the smaller weight and bandwidth.
fn symmetrize(merged: &mut BTreeMap<(VertexId, VertexId), Merged>) {
    let keys: Vec<(VertexId, VertexId)> = merged.keys().copied().collect();
    for (u, v) in keys {
        let (weight, bw) = {
            let fwd = &merged[&(u, v)];
            match merged.get(&(v, u)) {
                Some(rev) => (fwd.weight.min(rev.weight), (&fwd.bw).min(&rev.bw).clone()),
                None => (fwd.weight, fwd.bw.clone()),
            }
        };
        for key in [(u, v), (v, u)] {
            merged.insert(
                key,
                Merged {
                    weight,
                    bw: bw.clone(),
                },
            );
        }
    }
}

fn ceil_div(a: &Rational, b: &Rational) -> u64 {
    let q = (a / b).ceil().to_integer();
    u64::try_from(q).unwrap_or(u64::MAX).max(1)
}

/// Builds the network for one parameter setting. Arc ids follow the
/// `(tail, head)` order of the merged edges.
pub fn build_network(
    graph: &GraphPrecursor,
    mode: DuplexMode,
    lengths: LengthMode,
    mu: u32,
) -> Result<Network, PreprocessError> {
    if mu == 0 {
        return Err(PreprocessError::ZeroConnections);
    }
    let mut merged = merge(graph);
    if mode == DuplexMode::FullDuplex {
        symmetrize(&mut merged);
    }
    if let Some((&(u, v), _)) = merged.iter().find(|(_, m)| m.bw.is_zero()) {
        return Err(PreprocessError::ZeroCapacity(u, v));
    }
    let cmax = merged
        .values()
        .map(|m| m.bw.clone())
        .max()
        .unwrap_or_else(Rational::one);
    let split = Rational::from_integer(mu.into());
    let specs: Vec<ArcSpec> = merged
        .iter()
        .map(|(&(u, v), m)| {
            let len = match lengths {
                LengthMode::Given => m.weight.max(1),
                LengthMode::Unit => 1,
                LengthMode::Invcap => ceil_div(&cmax, &m.bw),
            };
            ArcSpec::new(u, v, &m.bw / &split, len, mu)
        })
        .collect();
    Ok(Network::build(graph.num_vertices(), &specs, mode)?)
}

/// Scales `traffic` by `1 / mlu` of the full network so that routing it
/// there gives utilization exactly one. Empty matrices come back unchanged.
pub fn normalize_traffic(
    net: &Network,
    traffic: &TrafficMatrix,
) -> Result<TrafficMatrix, PreprocessError> {
    if traffic.num_vertices() != net.num_vertices() {
        return Err(PreprocessError::VertexMismatch {
            got: traffic.num_vertices(),
            expected: net.num_vertices(),
        });
    }
    let full = Activation::full(net);
    match mlu(net, &full, traffic) {
        Mlu::Finite(u) if u.is_zero() => Ok(traffic.clone()),
        Mlu::Finite(u) => Ok(traffic.scaled(&u.recip())?),
        Mlu::Infinite => match spr_route(net, &full, traffic) {
            Err(RoutingError::Disconnected(s, t)) => Err(PreprocessError::DisconnectedDemand(s, t)),
            _ => unreachable!("infinite utilization only comes from a cut-off demand"),
        },
    }
}

/// [`build_network`] followed by [`normalize_traffic`].
pub fn preprocess(
    graph: &GraphPrecursor,
    traffic: &TrafficMatrix,
    mode: DuplexMode,
    lengths: LengthMode,
    mu: u32,
) -> Result<(Network, TrafficMatrix), PreprocessError> {
    let net = build_network(graph, mode, lengths, mu)?;
    let t = normalize_traffic(&net, traffic)?;
    Ok((net, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repetita::EdgeRecord;
    use greenroute::scalar::{int, ratio};

    fn edge(src: VertexId, dst: VertexId, weight: u64, bw: i64) -> EdgeRecord {
        EdgeRecord {
            label: format!("e{src}{dst}"),
            src,
            dst,
            weight,
            bw: int(bw),
        }
    }

    fn graph(n: usize, edges: Vec<EdgeRecord>) -> GraphPrecursor {
        GraphPrecursor {
            labels: (0..n).map(|i| i.to_string()).collect(),
            edges,
        }
    }

    #[test]
    fn single_arc_traffic_is_scaled_to_capacity() {
        let g = graph(2, vec![edge(0, 1, 1, 5)]);
        let t = TrafficMatrix::from_entries(2, [(0, 1, int(6))]).unwrap();
        let (net, scaled) = preprocess(&g, &t, DuplexMode::Simplex, LengthMode::Given, 5).unwrap();
        assert_eq!(net.arc(0).ccap, int(1));
        assert_eq!(scaled.demand(0, 1), int(5));
    }

    #[test]
    fn parallel_edges_merge() {
        let g = graph(2, vec![edge(0, 1, 4, 3), edge(0, 1, 2, 7)]);
        let net = build_network(&g, DuplexMode::Simplex, LengthMode::Given, 5).unwrap();
        assert_eq!(net.num_arcs(), 1);
        assert_eq!(net.arc(0).fcap(), int(10));
        assert_eq!(net.arc(0).ccap, int(2));
        assert_eq!(net.arc(0).len, 2);
    }

    #[test]
    fn length_modes() {
        let g = graph(
            3,
            vec![edge(0, 1, 4, 3), edge(1, 2, 9, 10), edge(0, 2, 2, 4)],
        );
        let unit = build_network(&g, DuplexMode::Simplex, LengthMode::Unit, 1).unwrap();
        assert!(unit.arcs().iter().all(|a| a.len == 1));
        let inv = build_network(&g, DuplexMode::Simplex, LengthMode::Invcap, 2).unwrap();
        let lens: Vec<u64> = inv.arcs().iter().map(|a| a.len).collect();
        // Arcs in (tail, head) order: 0->1 (bw 3), 0->2 (bw 4), 1->2 (bw 10).
        assert_eq!(lens, [4, 3, 1]);
        assert_eq!(inv.arc(0).ccap, ratio(3, 2));
    }

    #[test]
    fn duplex_harmonizes_directions() {
        let g = graph(
            3,
            vec![edge(0, 1, 4, 3), edge(1, 0, 2, 8), edge(1, 2, 5, 6)],
        );
        let net = build_network(&g, DuplexMode::FullDuplex, LengthMode::Given, 1).unwrap();
        assert_eq!(net.num_arcs(), 4);
        for a in net.arcs() {
            let r = net.link_partner(a.id).unwrap();
            assert_eq!(a.len, net.arc(r).len);
            assert_eq!(a.ccap, net.arc(r).ccap);
        }
        let ab = net.find_arc(0, 1).unwrap();
        assert_eq!((net.arc(ab).len, net.arc(ab).ccap.clone()), (2, int(3)));
        let cb = net.find_arc(2, 1).unwrap();
        assert_eq!((net.arc(cb).len, net.arc(cb).ccap.clone()), (5, int(6)));
    }

    #[test]
    fn disconnected_demand() {
        let g = graph(3, vec![edge(0, 1, 1, 5)]);
        let t = TrafficMatrix::from_entries(3, [(0, 2, int(1))]).unwrap();
        assert_eq!(
            preprocess(&g, &t, DuplexMode::Simplex, LengthMode::Unit, 1).unwrap_err(),
            PreprocessError::DisconnectedDemand(0, 2)
        );
    }
}
