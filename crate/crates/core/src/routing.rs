//! Unique shortest-path routing.
//!
//! Paths between the same endpoints are totally ordered by length, then hop
//! count, then the lexicographic arc-id sequence. Every shortest path in this
//! crate is the minimum under that order, so routing is deterministic and
//! prefixes and suffixes of shortest paths are shortest paths again.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::net::{Activation, ArcId, Network, TrafficMatrix, VertexId};
use crate::scalar::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RoutingError {
    #[error("paths have different endpoints")]
    EndpointMismatch,
    #[error("arc sequence is not a simple path")]
    NotAPath,
    #[error("no active path from {0} to {1}")]
    Disconnected(VertexId, VertexId),
}

/// Elementary arc sequence with cached length.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    source: VertexId,
    target: VertexId,
    arcs: Vec<ArcId>,
    length: u64,
}

impl Path {
    /// Validates contiguity and elementarity of `arcs`.
    pub fn from_arcs(net: &Network, arcs: Vec<ArcId>) -> Result<Self, RoutingError> {
        let first = arcs.first().ok_or(RoutingError::NotAPath)?;
        let source = net.arc(*first).tail;
        let mut seen = BTreeSet::from([source]);
        let mut at = source;
        let mut length = 0;
        for &a in &arcs {
            let arc = net.arc(a);
            if arc.tail != at || !seen.insert(arc.head) {
                return Err(RoutingError::NotAPath);
            }
            at = arc.head;
            length += arc.len;
        }
        Ok(Self {
            source,
            target: at,
            arcs,
            length,
        })
    }

    /// Builds a path from trusted parts.
    fn from_parts(net: &Network, source: VertexId, arcs: Vec<ArcId>) -> Self {
        let target = arcs.last().map_or(source, |&a| net.arc(a).head);
        let length = arcs.iter().map(|&a| net.arc(a).len).sum();
        Self {
            source,
            target,
            arcs,
            length,
        }
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn target(&self) -> VertexId {
        self.target
    }

    pub fn arcs(&self) -> &[ArcId] {
        &self.arcs
    }

    pub fn length(&self) -> u64 {
        self.length
    }

    pub fn hops(&self) -> usize {
        self.arcs.len()
    }

    pub fn contains_arc(&self, arc: ArcId) -> bool {
        self.arcs.contains(&arc)
    }

    /// Vertices in path order, starting at the source.
    pub fn vertices(&self, net: &Network) -> Vec<VertexId> {
        std::iter::once(self.source)
            .chain(self.arcs.iter().map(|&a| net.arc(a).head))
            .collect()
    }

    /// Subpath made of the arcs with indices in `from..to`.
    pub fn subpath(&self, net: &Network, from: usize, to: usize) -> Path {
        assert!(from < to && to <= self.arcs.len());
        let source = net.arc(self.arcs[from]).tail;
        Path::from_parts(net, source, self.arcs[from..to].to_vec())
    }

    fn extended(&self, net: &Network, arc: ArcId) -> Path {
        let mut arcs = self.arcs.clone();
        arcs.push(arc);
        Path {
            source: self.source,
            target: net.arc(arc).head,
            length: self.length + net.arc(arc).len,
            arcs,
        }
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.source)?;
        for a in &self.arcs {
            write!(f, " -[{a}]->")?;
        }
        write!(f, " {}", self.target)
    }
}

/// Total order on paths: length, then hop count, then arc ids lexicographically.
pub fn cmp_paths(p: &Path, q: &Path) -> Ordering {
    p.length
        .cmp(&q.length)
        .then(p.arcs.len().cmp(&q.arcs.len()))
        .then_with(|| p.arcs.cmp(&q.arcs))
}

/// `true` iff `p` strictly precedes `q`.
pub fn path_order_less(p: &Path, q: &Path) -> Result<bool, RoutingError> {
    if p.source != q.source || p.target != q.target {
        return Err(RoutingError::EndpointMismatch);
    }
    Ok(cmp_paths(p, q) == Ordering::Less)
}

/// Heap entry ordered like [`cmp_paths`], smallest first.
struct Candidate(Path);

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        cmp_paths(&self.0, &other.0) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_paths(&other.0, &self.0)
    }
}

/// Order-minimal paths from `s` to every vertex using arcs accepted by `usable`.
/// Entry `s` holds `None`.
pub fn shortest_path_tree<F>(net: &Network, s: VertexId, usable: F) -> Vec<Option<Path>>
where
    F: Fn(ArcId) -> bool,
{
    shortest_path_tree_avoiding(net, s, usable, |_| false)
}

fn shortest_path_tree_avoiding<F, B>(
    net: &Network,
    s: VertexId,
    usable: F,
    blocked_vertex: B,
) -> Vec<Option<Path>>
where
    F: Fn(ArcId) -> bool,
    B: Fn(VertexId) -> bool,
{
    let n = net.num_vertices();
    let mut best: Vec<Option<Path>> = vec![None; n];
    let mut settled = vec![false; n];
    settled[s] = true;
    let mut heap = BinaryHeap::new();
    let start = Path::from_parts(net, s, Vec::new());
    let relax = |from: &Path,
                 heap: &mut BinaryHeap<Candidate>,
                 best: &mut Vec<Option<Path>>,
                 settled: &[bool]| {
        for &a in net.out_arcs(from.target) {
            let head = net.arc(a).head;
            if settled[head] || !usable(a) || blocked_vertex(head) {
                continue;
            }
            let cand = from.extended(net, a);
            let better = match &best[head] {
                None => true,
                Some(cur) => cmp_paths(&cand, cur) == Ordering::Less,
            };
            if better {
                best[head] = Some(cand.clone());
                heap.push(Candidate(cand));
            }
        }
    };
    relax(&start, &mut heap, &mut best, &settled);
    while let Some(Candidate(path)) = heap.pop() {
        let v = path.target;
        if settled[v] {
            continue;
        }
        match &best[v] {
            Some(cur) if cur.arcs == path.arcs => {}
            _ => continue,
        }
        settled[v] = true;
        relax(&path, &mut heap, &mut best, &settled);
    }
    best
}

/// Plain Dijkstra distances from `s` over arcs accepted by `usable`.
pub fn distances_from<F>(net: &Network, s: VertexId, usable: F) -> Vec<Option<u64>>
where
    F: Fn(ArcId) -> bool,
{
    let mut dist = vec![None; net.num_vertices()];
    dist[s] = Some(0);
    let mut heap = BinaryHeap::from([Reverse((0u64, s))]);
    while let Some(Reverse((d, v))) = heap.pop() {
        if dist[v].is_some_and(|cur| cur < d) {
            continue;
        }
        for &a in net.out_arcs(v) {
            if !usable(a) {
                continue;
            }
            let w = net.arc(a).head;
            let nd = d + net.arc(a).len;
            if dist[w].map_or(true, |cur| nd < cur) {
                dist[w] = Some(nd);
                heap.push(Reverse((nd, w)));
            }
        }
    }
    dist
}

/// Order-minimal `s`-`t` path through arcs with at least one active connection.
pub fn shortest_path_unique(
    net: &Network,
    activation: &Activation,
    s: VertexId,
    t: VertexId,
) -> Option<Path> {
    if s == t {
        return None;
    }
    shortest_path_tree(net, s, |a| activation.is_active(a)).swap_remove(t)
}

/// Lazy enumeration of elementary `s`-`t` paths in increasing path order (Yen).
pub struct PathEnumerator<'a> {
    net: &'a Network,
    target: VertexId,
    found: Vec<Path>,
    candidates: BTreeSet<PathKey>,
    first: Option<Option<Path>>,
}

#[derive(Clone, PartialEq, Eq)]
struct PathKey(Path);

impl PartialOrd for PathKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PathKey {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_paths(&self.0, &other.0)
    }
}

impl<'a> PathEnumerator<'a> {
    pub fn new(net: &'a Network, s: VertexId, t: VertexId) -> Self {
        let first = if s == t {
            None
        } else {
            shortest_path_tree(net, s, |_| true).swap_remove(t)
        };
        Self {
            net,
            target: t,
            found: Vec::new(),
            candidates: BTreeSet::new(),
            first: Some(first),
        }
    }

    fn spur_candidates(&mut self) {
        let last = self
            .found
            .last()
            .expect("called after a path was found")
            .clone();
        let verts = last.vertices(self.net);
        for i in 0..last.arcs.len() {
            let root = &last.arcs[..i];
            let spur = verts[i];
            let removed: BTreeSet<ArcId> = self
                .found
                .iter()
                .filter(|p| p.arcs.len() > i && &p.arcs[..i] == root)
                .map(|p| p.arcs[i])
                .collect();
            let root_vertices: BTreeSet<VertexId> = verts[..i].iter().copied().collect();
            let tree = shortest_path_tree_avoiding(
                self.net,
                spur,
                |a| !removed.contains(&a),
                |v| root_vertices.contains(&v),
            );
            if let Some(spur_path) = &tree[self.target] {
                let mut arcs = root.to_vec();
                arcs.extend_from_slice(&spur_path.arcs);
                let total = Path::from_parts(self.net, last.source, arcs);
                self.candidates.insert(PathKey(total));
            }
        }
    }
}

impl Iterator for PathEnumerator<'_> {
    type Item = Path;

    fn next(&mut self) -> Option<Path> {
        if let Some(first) = self.first.take() {
            let p = first?;
            self.found.push(p.clone());
            return Some(p);
        }
        if self.found.is_empty() {
            return None;
        }
        self.spur_candidates();
        let PathKey(next) = self.candidates.pop_first()?;
        self.found.push(next.clone());
        Some(next)
    }
}

/// The first `min(k, #paths)` elementary `s`-`t` paths in increasing path order.
pub fn k_shortest_paths(net: &Network, s: VertexId, t: VertexId, k: usize) -> Vec<Path> {
    PathEnumerator::new(net, s, t).take(k).collect()
}

/// Every elementary `s`-`t` path by depth-first search, sorted by path order.
pub fn enumerate_simple_paths(net: &Network, s: VertexId, t: VertexId) -> Vec<Path> {
    fn dfs(
        net: &Network,
        v: VertexId,
        t: VertexId,
        on_path: &mut [bool],
        arcs: &mut Vec<ArcId>,
        out: &mut Vec<Vec<ArcId>>,
    ) {
        if v == t {
            out.push(arcs.clone());
            return;
        }
        for &a in net.out_arcs(v) {
            let w = net.arc(a).head;
            if on_path[w] {
                continue;
            }
            on_path[w] = true;
            arcs.push(a);
            dfs(net, w, t, on_path, arcs, out);
            arcs.pop();
            on_path[w] = false;
        }
    }
    if s == t {
        return Vec::new();
    }
    let mut on_path = vec![false; net.num_vertices()];
    on_path[s] = true;
    let mut raw = Vec::new();
    dfs(net, s, t, &mut on_path, &mut Vec::new(), &mut raw);
    let mut paths: Vec<Path> = raw
        .into_iter()
        .map(|arcs| Path::from_parts(net, s, arcs))
        .collect();
    paths.sort_by(cmp_paths);
    paths
}

/// Paths and aggregated arc loads of a shortest-path routing.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutingResult {
    pub paths: BTreeMap<(VertexId, VertexId), Path>,
    pub load: Vec<Rational>,
}

/// Routes every demand of `traffic` along its unique shortest path in the
/// active subnetwork. Capacities are not checked.
pub fn spr_route(
    net: &Network,
    activation: &Activation,
    traffic: &TrafficMatrix,
) -> Result<RoutingResult, RoutingError> {
    let mut load = vec![Rational::zero(); net.num_arcs()];
    let mut paths = BTreeMap::new();
    let mut current_source = None;
    let mut tree = Vec::new();
    for ((s, t), volume) in traffic.iter() {
        if current_source != Some(s) {
            tree = shortest_path_tree(net, s, |a| activation.is_active(a));
            current_source = Some(s);
        }
        let path = tree[t].clone().ok_or(RoutingError::Disconnected(s, t))?;
        for &a in path.arcs() {
            load[a] += volume;
        }
        paths.insert((s, t), path);
    }
    Ok(RoutingResult { paths, load })
}

/// `true` iff shortest-path routing succeeds and no arc exceeds `ccap * chi`.
pub fn is_spr_routable(net: &Network, activation: &Activation, traffic: &TrafficMatrix) -> bool {
    match spr_route(net, activation, traffic) {
        Ok(routing) => routing
            .load
            .iter()
            .enumerate()
            .all(|(a, l)| l <= &activation.capacity(net, a)),
        Err(_) => false,
    }
}

/// Maximum link utilization; infinite when some demand cannot be routed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mlu {
    Finite(Rational),
    Infinite,
}

impl Mlu {
    pub fn is_finite(&self) -> bool {
        matches!(self, Mlu::Finite(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Mlu::Finite(v) => num_traits::ToPrimitive::to_f64(v).unwrap_or(f64::INFINITY),
            Mlu::Infinite => f64::INFINITY,
        }
    }
}

impl PartialOrd for Mlu {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Mlu {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Mlu::Finite(a), Mlu::Finite(b)) => a.cmp(b),
            (Mlu::Finite(_), Mlu::Infinite) => Ordering::Less,
            (Mlu::Infinite, Mlu::Finite(_)) => Ordering::Greater,
            (Mlu::Infinite, Mlu::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Mlu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mlu::Finite(v) => write!(f, "{}", crate::scalar::format_fixed(v, 6)),
            Mlu::Infinite => write!(f, "inf"),
        }
    }
}

/// Maximum of `load(a) / (ccap(a) * chi(a))` over arcs in the active subnetwork.
pub fn mlu(net: &Network, activation: &Activation, traffic: &TrafficMatrix) -> Mlu {
    let Ok(routing) = spr_route(net, activation, traffic) else {
        return Mlu::Infinite;
    };
    let mut worst = Rational::zero();
    for (a, load) in routing.load.iter().enumerate() {
        if load.is_zero() {
            continue;
        }
        let util = load / activation.capacity(net, a);
        if util > worst {
            worst = util;
        }
    }
    Mlu::Finite(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::scalar::{int, ratio};

    #[test]
    fn order_examples() {
        let net = fixtures::diamond();
        // Same endpoints s -> t: both length 2.
        let upper = Path::from_arcs(&net, vec![0, 1]).unwrap();
        let lower = Path::from_arcs(&net, vec![2, 3]).unwrap();
        assert!(path_order_less(&upper, &lower).unwrap());
        assert!(!path_order_less(&lower, &upper).unwrap());
        assert!(!path_order_less(&upper, &upper).unwrap());
        let half = Path::from_arcs(&net, vec![0]).unwrap();
        assert_eq!(
            path_order_less(&half, &upper),
            Err(RoutingError::EndpointMismatch)
        );
    }

    #[test]
    fn order_prefers_length_then_hops_then_ids() {
        let net = fixtures::detour();
        let direct = Path::from_arcs(&net, vec![0]).unwrap();
        let detour = Path::from_arcs(&net, vec![1, 2]).unwrap();
        assert!(path_order_less(&direct, &detour).unwrap());
        // Equal length, fewer hops wins.
        let specs = [
            crate::net::ArcSpec::new(0, 2, int(1), 2, 1),
            crate::net::ArcSpec::new(0, 1, int(1), 1, 1),
            crate::net::ArcSpec::new(1, 2, int(1), 1, 1),
        ];
        let net = Network::build(3, &specs, crate::net::DuplexMode::Simplex).unwrap();
        let one_hop = Path::from_arcs(&net, vec![0]).unwrap();
        let two_hop = Path::from_arcs(&net, vec![1, 2]).unwrap();
        assert_eq!(one_hop.length(), two_hop.length());
        assert!(path_order_less(&one_hop, &two_hop).unwrap());
    }

    #[test]
    fn rejects_non_paths() {
        let net = fixtures::diamond();
        assert_eq!(
            Path::from_arcs(&net, vec![0, 3]),
            Err(RoutingError::NotAPath)
        );
        assert_eq!(Path::from_arcs(&net, vec![]), Err(RoutingError::NotAPath));
    }

    #[test]
    fn unique_shortest_paths() {
        let net = fixtures::single_arc();
        let full = Activation::full(&net);
        let p = shortest_path_unique(&net, &full, 0, 1).unwrap();
        assert_eq!(p.arcs(), &[0]);
        assert_eq!(p.length(), 1);
        let off = Activation::new(&net, vec![0]).unwrap();
        assert!(shortest_path_unique(&net, &off, 0, 1).is_none());

        let diamond = fixtures::diamond();
        let all = enumerate_simple_paths(&diamond, 0, 3);
        let p = shortest_path_unique(&diamond, &Activation::full(&diamond), 0, 3).unwrap();
        assert_eq!(p, all[0]);
        assert_eq!(p.arcs(), &[0, 1]);
    }

    #[test]
    fn k_shortest_examples() {
        let diamond = fixtures::diamond();
        let paths = k_shortest_paths(&diamond, 0, 3, 5);
        assert_eq!(paths, enumerate_simple_paths(&diamond, 0, 3));
        assert_eq!(paths.len(), 2);
        assert_eq!(k_shortest_paths(&fixtures::single_arc(), 0, 1, 5).len(), 1);

        let (net, _) = fixtures::strengthening_instance();
        let v = fixtures::thm::V;
        let _ = v;
        let paths = k_shortest_paths(&net, fixtures::thm::S, fixtures::thm::T, 3);
        let hops: Vec<usize> = paths.iter().map(Path::hops).collect();
        assert_eq!(hops, vec![4, 5, 8]);
        assert_eq!(
            k_shortest_paths(&net, fixtures::thm::S, fixtures::thm::T, 10).len(),
            3
        );
    }

    #[test]
    fn routing_examples() {
        let net = fixtures::single_arc();
        let t = TrafficMatrix::from_entries(2, [(0, 1, int(3))]).unwrap();
        let act = Activation::new(&net, vec![3]).unwrap();
        assert_eq!(spr_route(&net, &act, &t).unwrap().load, vec![int(3)]);
        assert!(is_spr_routable(&net, &act, &t));
        let act2 = Activation::new(&net, vec![2]).unwrap();
        assert!(!is_spr_routable(&net, &act2, &t));
        let act5 = Activation::new(&net, vec![5]).unwrap();
        assert_eq!(mlu(&net, &act5, &t), Mlu::Finite(ratio(3, 5)));
        assert_eq!(
            mlu(&net, &act5, &TrafficMatrix::new(2)),
            Mlu::Finite(int(0))
        );
        let off = Activation::new(&net, vec![0]).unwrap();
        assert_eq!(mlu(&net, &off, &t), Mlu::Infinite);
        assert_eq!(
            spr_route(&net, &off, &t).unwrap_err(),
            RoutingError::Disconnected(0, 1)
        );
    }

    #[test]
    fn detour_routing() {
        let net = fixtures::detour();
        let t = fixtures::detour_traffic();
        let full = Activation::full(&net);
        let r = spr_route(&net, &full, &t).unwrap();
        assert_eq!(r.load, vec![int(3), int(0), int(0)]);
        let no_direct = Activation::new(&net, vec![0, 1, 1]).unwrap();
        let r = spr_route(&net, &no_direct, &t).unwrap();
        assert_eq!(r.load, vec![int(0), int(3), int(3)]);
        assert_eq!(mlu(&net, &no_direct, &t), Mlu::Finite(int(1)));
        let direct_only = Activation::new(&net, vec![3, 0, 0]).unwrap();
        assert!(is_spr_routable(&net, &direct_only, &t));
    }

    #[test]
    fn mlu_ordering() {
        assert!(Mlu::Finite(int(5)) < Mlu::Infinite);
        assert!(Mlu::Finite(int(1)) < Mlu::Finite(int(2)));
        assert_eq!(Mlu::Infinite.to_string(), "inf");
        assert_eq!(Mlu::Finite(ratio(1, 2)).to_string(), "0.500000");
    }
}
