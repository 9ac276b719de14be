//! Synthetic REPETITA-format instances in the style of the Topology Zoo set:
//! a ring backbone plus random chords, both directions listed as separate
//! edges, a few bandwidth classes, and several demand matrices.
#![allow(dead_code)]

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use workbench::repetita::{parse_repetita_demands, parse_repetita_graph};
use workbench::RepetitaInstance;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone)]
pub struct ZooShape {
    pub vertices: usize,
    pub chords: usize,
    pub matrices: usize,
    /// Ordered pairs per matrix; `None` for every pair.
    pub pairs: Option<usize>,
}

pub struct ZooText {
    pub graph: String,
    pub demands: Vec<String>,
}

const BANDWIDTHS: [u64; 3] = [1_000, 2_500, 10_000];

pub fn zoo_text(rng: &mut ChaCha8Rng, shape: &ZooShape) -> ZooText {
    let n = shape.vertices;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut links: Vec<(usize, usize)> = (0..n).map(|i| (order[i], order[(i + 1) % n])).collect();
    let mut attempts = 0;
    while links.len() < n + shape.chords && attempts < 200 {
        attempts += 1;
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v
            && !links
                .iter()
                .any(|&(a, b)| (a, b) == (u, v) || (a, b) == (v, u))
        {
            links.push((u, v));
        }
    }
    let mut graph = format!("NODES {n}\nlabel x y\n");
    for v in 0..n {
        writeln!(graph, "city{v} {} {}", v * 10, (v * 7) % 13).unwrap();
    }
    let mut edges = Vec::new();
    for &(u, v) in &links {
        let bw = BANDWIDTHS[rng.gen_range(0..BANDWIDTHS.len())];
        for (a, b) in [(u, v), (v, u)] {
            edges.push((a, b, rng.gen_range(1..=4u64), bw));
        }
    }
    write!(
        graph,
        "\nEDGES {}\nlabel src dest weight bw delay\n",
        edges.len()
    )
    .unwrap();
    for (k, (a, b, w, bw)) in edges.iter().enumerate() {
        writeln!(graph, "edge_{k} {a} {b} {w} {bw} 1").unwrap();
    }

    let all: Vec<(usize, usize)> = (0..n)
        .flat_map(|s| (0..n).filter(move |&t| t != s).map(move |t| (s, t)))
        .collect();
    let demands = (0..shape.matrices)
        .map(|_| {
            let mut pairs = all.clone();
            pairs.shuffle(rng);
            pairs.truncate(shape.pairs.unwrap_or(all.len()));
            let mut text = format!("DEMANDS {}\nlabel src dest bw\n", pairs.len());
            for (k, (s, t)) in pairs.iter().enumerate() {
                writeln!(text, "demand_{k} {s} {t} {}", rng.gen_range(1..=100)).unwrap();
            }
            text
        })
        .collect();
    ZooText { graph, demands }
}

pub fn zoo_instance(id: &str, rng: &mut ChaCha8Rng, shape: &ZooShape) -> RepetitaInstance {
    let text = zoo_text(rng, shape);
    let graph = parse_repetita_graph(&text.graph).expect("generated graph parses");
    let matrices = text
        .demands
        .iter()
        .enumerate()
        .map(|(k, d)| {
            let t =
                parse_repetita_demands(d, graph.num_vertices()).expect("generated demands parse");
            (format!("{k}"), t)
        })
        .collect();
    RepetitaInstance::from_parts(id, graph, matrices)
}
