//! Brute-force reference computations shared by the integration tests.
//! Nothing here calls the library's flow, routing or network-design code.
#![allow(dead_code)]

use greenroute::net::{ArcId, ArcSpec, DuplexMode, Network, TrafficMatrix, VertexId};
use greenroute::scalar::{int, ratio, Rational};
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone)]
pub struct NetShape {
    pub vertices: (usize, usize),
    pub max_arcs: usize,
    pub max_mu: u32,
    pub ccaps: Vec<Rational>,
    pub max_len: u64,
    pub duplex: bool,
}

impl NetShape {
    pub fn small(max_vertices: usize, max_arcs: usize, max_mu: u32) -> Self {
        Self {
            vertices: (2, max_vertices),
            max_arcs,
            max_mu,
            ccaps: vec![int(1), int(2), ratio(3, 2)],
            max_len: 3,
            duplex: false,
        }
    }
}

/// Random network with a spanning cycle through all vertices plus extra arcs,
/// so every ordered pair is connected.
pub fn random_network(rng: &mut ChaCha8Rng, shape: &NetShape) -> Network {
    let n = rng.gen_range(shape.vertices.0..=shape.vertices.1);
    let mut order: Vec<VertexId> = (0..n).collect();
    order.shuffle(rng);
    let mut pairs: Vec<(VertexId, VertexId)> = Vec::new();
    let push = |pairs: &mut Vec<(VertexId, VertexId)>, u: VertexId, v: VertexId| {
        if u != v && !pairs.contains(&(u, v)) {
            pairs.push((u, v));
        }
    };
    for i in 0..n {
        push(&mut pairs, order[i], order[(i + 1) % n]);
        if shape.duplex {
            push(&mut pairs, order[(i + 1) % n], order[i]);
        }
    }
    let budget = shape.max_arcs.max(pairs.len());
    let mut attempts = 0;
    while pairs.len() < budget && attempts < 50 {
        attempts += 1;
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v || pairs.contains(&(u, v)) {
            continue;
        }
        if shape.duplex {
            if pairs.len() + 2 > budget {
                break;
            }
            push(&mut pairs, u, v);
            push(&mut pairs, v, u);
        } else {
            push(&mut pairs, u, v);
        }
    }
    let mut specs: Vec<ArcSpec> = Vec::new();
    for &(u, v) in &pairs {
        let partner = specs.iter().find(|s| s.tail == v && s.head == u).cloned();
        let spec = match (shape.duplex, partner) {
            (true, Some(p)) => ArcSpec::new(u, v, p.ccap, p.len, p.mu),
            _ => ArcSpec::new(
                u,
                v,
                shape.ccaps[rng.gen_range(0..shape.ccaps.len())].clone(),
                rng.gen_range(1..=shape.max_len),
                rng.gen_range(1..=shape.max_mu),
            ),
        };
        specs.push(spec);
    }
    let mode = if shape.duplex {
        DuplexMode::FullDuplex
    } else {
        DuplexMode::Simplex
    };
    Network::build(n, &specs, mode).expect("generated network is valid")
}

/// `min_{W: s in W, t notin W} sum of caps leaving W`, by subset enumeration.
pub fn cut_lambda(net: &Network, caps: &[Rational], s: VertexId, t: VertexId) -> Rational {
    let n = net.num_vertices();
    let mut best: Option<Rational> = None;
    for mask in 0u32..(1 << n) {
        if mask & (1 << s) == 0 || mask & (1 << t) != 0 {
            continue;
        }
        let mut value = Rational::zero();
        for a in net.arcs() {
            if mask & (1 << a.tail) != 0 && mask & (1 << a.head) == 0 {
                value += &caps[a.id];
            }
        }
        if best.as_ref().map_or(true, |b| value < *b) {
            best = Some(value);
        }
    }
    best.expect("s != t")
}

pub fn caps_of(net: &Network, counts: &[u32]) -> Vec<Rational> {
    net.arcs()
        .iter()
        .map(|a| &a.ccap * Rational::from_integer(counts[a.id].into()))
        .collect()
}

/// Every duplex-symmetric count vector with `0 <= counts[a] <= mu(a)`.
pub fn all_activations(net: &Network) -> Vec<Vec<u32>> {
    let m = net.num_arcs();
    let reps: Vec<ArcId> = (0..m)
        .filter(|&a| net.link_partner(a).map_or(true, |r| a < r))
        .collect();
    let mut out = Vec::new();
    let mut digits = vec![0u32; reps.len()];
    loop {
        let mut counts = vec![0u32; m];
        for (k, &a) in reps.iter().enumerate() {
            counts[a] = digits[k];
            if let Some(r) = net.link_partner(a) {
                counts[r] = digits[k];
            }
        }
        out.push(counts);
        let mut k = 0;
        loop {
            if k == reps.len() {
                return out;
            }
            if digits[k] < net.arc(reps[k]).mu {
                digits[k] += 1;
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}

pub fn mcps_feasible(net: &Network, rho: &Rational, counts: &[u32]) -> bool {
    let full = caps_of(net, &net.arcs().iter().map(|a| a.mu).collect::<Vec<_>>());
    let caps = caps_of(net, counts);
    let n = net.num_vertices();
    (0..n).all(|s| {
        (0..n).filter(|&t| t != s).all(|t| {
            let need = rho * cut_lambda(net, &full, s, t);
            cut_lambda(net, &caps, s, t) >= need
        })
    })
}

pub fn mcps_optimum(net: &Network, rho: &Rational) -> u64 {
    all_activations(net)
        .into_iter()
        .filter(|c| mcps_feasible(net, rho, c))
        .map(|c| c.iter().map(|&v| u64::from(v)).sum())
        .min()
        .expect("full activation is feasible")
}

/// All simple `s`-`t` paths over usable arcs, by depth-first search.
pub fn simple_paths(
    net: &Network,
    usable: &dyn Fn(ArcId) -> bool,
    s: VertexId,
    t: VertexId,
) -> Vec<Vec<ArcId>> {
    fn go(
        net: &Network,
        usable: &dyn Fn(ArcId) -> bool,
        v: VertexId,
        t: VertexId,
        seen: &mut Vec<bool>,
        cur: &mut Vec<ArcId>,
        out: &mut Vec<Vec<ArcId>>,
    ) {
        if v == t {
            out.push(cur.clone());
            return;
        }
        for a in net.arcs() {
            if a.tail == v && usable(a.id) && !seen[a.head] {
                seen[a.head] = true;
                cur.push(a.id);
                go(net, usable, a.head, t, seen, cur, out);
                cur.pop();
                seen[a.head] = false;
            }
        }
    }
    let mut seen = vec![false; net.num_vertices()];
    seen[s] = true;
    let mut out = Vec::new();
    go(net, usable, s, t, &mut seen, &mut Vec::new(), &mut out);
    out
}

/// Sort key of the path order: length, then hop count, then arc ids.
pub fn path_key(net: &Network, p: &[ArcId]) -> (u64, usize, Vec<ArcId>) {
    (p.iter().map(|&a| net.arc(a).len).sum(), p.len(), p.to_vec())
}

pub fn spr_path(
    net: &Network,
    usable: &dyn Fn(ArcId) -> bool,
    s: VertexId,
    t: VertexId,
) -> Option<Vec<ArcId>> {
    simple_paths(net, usable, s, t)
        .into_iter()
        .min_by_key(|p| path_key(net, p))
}

/// Per-arc loads of shortest-path routing, `None` if some pair is cut off.
pub fn spr_loads(net: &Network, counts: &[u32], traffic: &TrafficMatrix) -> Option<Vec<Rational>> {
    let mut load = vec![Rational::zero(); net.num_arcs()];
    for ((s, t), v) in traffic.iter() {
        let p = spr_path(net, &|a| counts[a] > 0, s, t)?;
        for a in p {
            load[a] += v;
        }
    }
    Some(load)
}

pub fn spr_feasible(net: &Network, counts: &[u32], traffic: &TrafficMatrix) -> bool {
    match spr_loads(net, counts, traffic) {
        None => false,
        Some(load) => load
            .iter()
            .enumerate()
            .all(|(a, l)| *l <= &net.arc(a).ccap * Rational::from_integer(counts[a].into())),
    }
}

pub fn mspnd_optimum(net: &Network, traffic: &TrafficMatrix) -> Option<u64> {
    all_activations(net)
        .into_iter()
        .filter(|c| spr_feasible(net, c, traffic))
        .map(|c| c.iter().map(|&v| u64::from(v)).sum())
        .min()
}

/// Exact maximum link utilization of the full network.
pub fn full_mlu(net: &Network, traffic: &TrafficMatrix) -> Option<Rational> {
    let counts: Vec<u32> = net.arcs().iter().map(|a| a.mu).collect();
    let load = spr_loads(net, &counts, traffic)?;
    load.iter()
        .enumerate()
        .map(|(a, l)| l / net.arc(a).fcap())
        .max()
}

/// Random demands on `pairs` distinct ordered pairs, scaled so the full
/// network's MLU is at most one.
pub fn random_traffic(rng: &mut ChaCha8Rng, net: &Network, pairs: usize) -> TrafficMatrix {
    let n = net.num_vertices();
    let mut all: Vec<(VertexId, VertexId)> = (0..n)
        .flat_map(|s| (0..n).filter(move |&t| t != s).map(move |t| (s, t)))
        .collect();
    all.shuffle(rng);
    let mut t = TrafficMatrix::new(n);
    for &(s, d) in all.iter().take(pairs) {
        t.add(s, d, ratio(rng.gen_range(1..=4), 2)).unwrap();
    }
    match full_mlu(net, &t) {
        Some(m) if m > Rational::from_integer(1.into()) => {
            let f = Rational::from_integer(1.into()) / m;
            t.scaled(&f).unwrap()
        }
        _ => t,
    }
}

/// Feasibility of routing one commodity per arc `a = uv` (demand
/// `rho * fcap(a)` from `u` to `v`) with arc capacities `ccap * counts`,
/// written with a separate flow per commodity.
pub fn arc_commodities_routable(net: &Network, rho: &Rational, counts: &[u32]) -> bool {
    use greenroute::lp::{solve_lp, LpModel, LpStatus, Sense};
    let n = net.num_vertices();
    let m = net.num_arcs();
    let mut model: LpModel<Rational> = LpModel::new();
    let caps = caps_of(net, counts);
    let cap_rows: Vec<usize> = (0..m)
        .map(|e| {
            model
                .add_row(format!("cap{e}"), &[], Sense::Le, caps[e].clone())
                .unwrap()
        })
        .collect();
    for k in net.arcs() {
        let demand = rho * k.fcap();
        let rows: Vec<usize> = (0..n)
            .map(|v| {
                let rhs = if v == k.tail {
                    demand.clone()
                } else if v == k.head {
                    -demand.clone()
                } else {
                    Rational::zero()
                };
                model
                    .add_row(format!("c{}_{v}", k.id), &[], Sense::Eq, rhs)
                    .unwrap()
            })
            .collect();
        for e in net.arcs() {
            model
                .add_column(
                    format!("f{}_{}", k.id, e.id),
                    Rational::zero(),
                    Some(Rational::zero()),
                    None,
                    &[
                        (rows[e.tail], int(1)),
                        (rows[e.head], int(-1)),
                        (cap_rows[e.id], int(1)),
                    ],
                )
                .unwrap();
        }
    }
    solve_lp(&model).unwrap().status == LpStatus::Optimal
}

/// LP relaxation of the path formulation over every elementary path of every
/// pair (no subpath rows), for simplex networks.
pub fn enumerated_mspnd_lp(net: &Network, traffic: &TrafficMatrix) -> Rational {
    use greenroute::lp::{solve_lp, LpModel, LpStatus, Sense};
    let mut lp: LpModel<Rational> = LpModel::new();
    let mut x = Vec::new();
    let mut y = Vec::new();
    for a in net.arcs() {
        x.push(
            lp.add_column(
                format!("x{}", a.id),
                int(1),
                Some(int(0)),
                Some(int(a.mu.into())),
                &[],
            )
            .unwrap(),
        );
        y.push(
            lp.add_column(
                format!("y{}", a.id),
                int(0),
                Some(int(0)),
                Some(int(1)),
                &[],
            )
            .unwrap(),
        );
        lp.add_row(
            "lo",
            &[(x[a.id], int(1)), (y[a.id], int(-1))],
            Sense::Ge,
            int(0),
        )
        .unwrap();
        lp.add_row(
            "hi",
            &[(x[a.id], int(-1)), (y[a.id], int(a.mu.into()))],
            Sense::Ge,
            int(0),
        )
        .unwrap();
    }
    let mut cap: Vec<Vec<(usize, Rational)>> = net
        .arcs()
        .iter()
        .map(|a| vec![(x[a.id], a.ccap.clone())])
        .collect();
    for ((s, t), demand) in traffic.iter() {
        let mut paths = simple_paths(net, &|_| true, s, t);
        paths.sort_by_key(|p| path_key(net, p));
        let z: Vec<usize> = paths
            .iter()
            .map(|_| lp.add_column("z", int(0), Some(int(0)), None, &[]).unwrap())
            .collect();
        lp.add_row(
            "conn",
            &z.iter().map(|&c| (c, int(1))).collect::<Vec<_>>(),
            Sense::Ge,
            int(1),
        )
        .unwrap();
        for a in net.arcs() {
            let mut coefs = vec![(y[a.id], int(1))];
            for (p, &c) in paths.iter().zip(&z) {
                if p.contains(&a.id) {
                    coefs.push((c, int(-1)));
                    cap[a.id].push((c, -demand.clone()));
                }
            }
            lp.add_row("buy", &coefs, Sense::Ge, int(0)).unwrap();
        }
        // sorted, so the paths after index i are the longer ones
        for (i, p) in paths.iter().enumerate() {
            let mut coefs: Vec<(usize, Rational)> = p.iter().map(|&a| (y[a], int(-1))).collect();
            coefs.extend(z[i + 1..].iter().map(|&c| (c, int(-1))));
            lp.add_row("sp", &coefs, Sense::Ge, int(-(p.len() as i64)))
                .unwrap();
        }
    }
    for coefs in cap {
        lp.add_row("cap", &coefs, Sense::Ge, int(0)).unwrap();
    }
    let sol = solve_lp(&lp).unwrap();
    assert_eq!(sol.status, LpStatus::Optimal);
    sol.objective
}
