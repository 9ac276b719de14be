//! Small reference instances used throughout the tests and the acceptance suite.

use crate::net::{ArcSpec, DuplexMode, Network, TrafficMatrix};
use crate::scalar::int;

/// One arc `0 -> 1` with five unit connections.
pub fn single_arc() -> Network {
    Network::build(2, &[ArcSpec::new(0, 1, int(1), 1, 5)], DuplexMode::Simplex)
        .expect("valid fixture")
}

/// Diamond `s=0`, `a=1`, `b=2`, `t=3` with arcs `sa=0`, `at=1`, `sb=2`, `bt=3`,
/// all unit length, unit capacity and one connection.
pub fn diamond() -> Network {
    let specs = [(0, 1), (1, 3), (0, 2), (2, 3)].map(|(t, h)| ArcSpec::new(t, h, int(1), 1, 1));
    Network::build(4, &specs, DuplexMode::Simplex).expect("valid fixture")
}

/// Direct arc `d = s->v` (three unit connections) next to a detour
/// `e1 = s->u`, `e2 = u->v` (one connection of capacity 3 each).
/// Vertices `s=0`, `u=1`, `v=2`; arc ids `d=0`, `e1=1`, `e2=2`.
pub fn detour() -> Network {
    let specs = [
        ArcSpec::new(0, 2, int(1), 1, 3),
        ArcSpec::new(0, 1, int(3), 1, 1),
        ArcSpec::new(1, 2, int(3), 1, 1),
    ];
    Network::build(3, &specs, DuplexMode::Simplex).expect("valid fixture")
}

/// Three units from `s` to `v` on [`detour`].
pub fn detour_traffic() -> TrafficMatrix {
    TrafficMatrix::from_entries(3, [(0, 2, int(3))]).expect("valid fixture")
}

/// Vertex ids of [`strengthening_instance`].
pub mod thm {
    pub const S: usize = 0;
    pub const V: usize = 2;
    pub const T: usize = 5;
}

/// Thirteen vertices, fourteen unit-length single-connection arcs.
///
/// Two `s`-`v` paths (the arc `s->v` and `s->b->v`, capacity 1), a shared tail
/// `v->d->e->t` and an eight-arc bypass `s->...->t` (capacity 2). Demands are
/// two units `s->t` and one unit `s->v`. The optimum keeps `s->v` plus the
/// bypass (value 9); without subpath rows the LP relaxation stops at 8.5.
pub fn strengthening_instance() -> (Network, TrafficMatrix) {
    // s=0 b=1 v=2 d=3 e=4 t=5, bypass a0..e0 = 6..12
    let thin = [(0, 1), (1, 2), (0, 2)];
    let thick = [
        (2, 3),
        (3, 4),
        (4, 5),
        (0, 6),
        (6, 7),
        (7, 8),
        (8, 9),
        (9, 10),
        (10, 11),
        (11, 12),
        (12, 5),
    ];
    let specs: Vec<ArcSpec> = thin
        .iter()
        .map(|&(t, h)| ArcSpec::new(t, h, int(1), 1, 1))
        .chain(thick.iter().map(|&(t, h)| ArcSpec::new(t, h, int(2), 1, 1)))
        .collect();
    let net = Network::build(13, &specs, DuplexMode::Simplex).expect("valid fixture");
    let traffic =
        TrafficMatrix::from_entries(13, [(thm::S, thm::T, int(2)), (thm::S, thm::V, int(1))])
            .expect("valid fixture");
    (net, traffic)
}

/// Complete digraph on `n` vertices with unit lengths, one connection per arc
/// and connection capacity `ccap`.
pub fn complete_digraph(n: usize, ccap: i64) -> Network {
    let specs: Vec<ArcSpec> = (0..n)
        .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
        .map(|(u, v)| ArcSpec::new(u, v, int(ccap), 1, 1))
        .collect();
    Network::build(n, &specs, DuplexMode::Simplex).expect("valid fixture")
}

/// Unit demand between every ordered vertex pair.
pub fn all_pairs_traffic(n: usize) -> TrafficMatrix {
    TrafficMatrix::from_entries(
        n,
        (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v, int(1)))),
    )
    .expect("valid fixture")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::full_activation;

    #[test]
    fn fixture_sizes() {
        assert_eq!(full_activation(&single_arc()).value(), 5);
        assert_eq!(full_activation(&diamond()).value(), 4);
        let (net, t) = strengthening_instance();
        assert_eq!(net.num_vertices(), 13);
        assert_eq!(full_activation(&net).value(), 14);
        assert_eq!(t.len(), 2);
        assert_eq!(complete_digraph(6, 100).num_arcs(), 30);
    }
}
