//! Path-based formulation: columns `x_a`, `y_a`, `z_P` and the rows tying
//! them together. Every row is written as `>=`, so optimal duals are
//! nonnegative.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use crate::lp::{ColumnId, LpModel, LpSolution, RowId, Sense};
use crate::net::{ArcId, Network, TrafficMatrix, VertexId};
use crate::routing::{cmp_paths, k_shortest_paths, Path};
use crate::scalar::Scalar;

use super::MspndError;

/// Number of order-smallest paths per pair in the initial model.
pub const INITIAL_PATHS: usize = 5;

#[derive(Debug, Clone)]
pub struct ModelPath {
    pub path: Path,
    pub col: ColumnId,
    /// The row `-sum_{a in P} y_a - sum_{P < P'} z_P' >= -|P|`.
    pub row: RowId,
}

/// Column and row bookkeeping of an [`MspndModel`], kept apart from the LP
/// itself so both can be borrowed independently.
#[derive(Debug, Clone)]
pub struct Formulation<'a> {
    pub net: &'a Network,
    pub traffic: &'a TrafficMatrix,
    pub pairs: Vec<(VertexId, VertexId)>,
    pub pair_index: HashMap<(VertexId, VertexId), usize>,
    /// `x` column per arc; the two arcs of a duplex link share one.
    pub x_col: Vec<ColumnId>,
    pub y_col: Vec<ColumnId>,
    /// Link representatives in increasing order.
    pub links: Vec<ArcId>,
    pub conn_row: Vec<RowId>,
    pub cap_row: Vec<RowId>,
    /// Edge-buying rows per pair, created when an arc first appears on a
    /// model path of that pair.
    pub edge_row: Vec<BTreeMap<ArcId, RowId>>,
    /// Model paths per pair in increasing path order.
    pub paths: Vec<Vec<ModelPath>>,
    pub strengthening: bool,
    pub one_shortest: bool,
    pub strengthening_rows: usize,
}

#[derive(Debug, Clone)]
pub struct MspndModel<'a, S> {
    pub lp: LpModel<S>,
    pub form: Formulation<'a>,
}

impl<'a, S: Scalar> MspndModel<'a, S> {
    pub fn add_path_column(&mut self, pair: usize, path: Path) -> Result<ColumnId, MspndError> {
        self.form.add_path(&mut self.lp, pair, path)
    }

    pub fn num_path_columns(&self) -> usize {
        self.form.paths.iter().map(Vec::len).sum()
    }
}

/// Duals of the rows a path column touches.
#[derive(Debug, Clone)]
pub struct DualPrices<S> {
    /// Connectivity, per pair.
    pub alpha: Vec<S>,
    /// Edge-buying, per pair and arc; absent rows count as zero.
    pub beta: Vec<BTreeMap<ArcId, S>>,
    /// Capacity, per arc.
    pub gamma: Vec<S>,
    /// Shortest-path rows, per pair, aligned with the model paths.
    pub delta: Vec<Vec<S>>,
    /// Whether these duals certify infeasibility rather than optimality.
    pub farkas: bool,
}

impl<S: Scalar> DualPrices<S> {
    pub fn from_solution(form: &Formulation, sol: &LpSolution<S>) -> Self {
        let y = &sol.dual;
        Self {
            alpha: form.conn_row.iter().map(|&r| y[r].clone()).collect(),
            beta: form
                .edge_row
                .iter()
                .map(|rows| rows.iter().map(|(&a, &r)| (a, y[r].clone())).collect())
                .collect(),
            gamma: form.cap_row.iter().map(|&r| y[r].clone()).collect(),
            delta: form
                .paths
                .iter()
                .map(|ps| ps.iter().map(|p| y[p.row].clone()).collect())
                .collect(),
            farkas: !sol.is_optimal(),
        }
    }
}

/// `beta_{s,t,a} + T(s,t) * gamma_a`.
pub fn compute_dcost<S: Scalar>(duals: &DualPrices<S>, demand: &S, pair: usize, arc: ArcId) -> S {
    let beta = duals.beta[pair].get(&arc).cloned().unwrap_or_else(S::zero);
    beta + demand.clone() * duals.gamma[arc].clone()
}

impl<'a> Formulation<'a> {
    pub fn demand<S: Scalar>(&self, pair: usize) -> S {
        let (s, t) = self.pairs[pair];
        S::from_rational(&self.traffic.demand(s, t))
    }

    /// Position of `path` among the model paths of `pair`: `Ok` if present.
    pub fn locate(&self, pair: usize, path: &Path) -> Result<usize, usize> {
        self.paths[pair].binary_search_by(|m| cmp_paths(&m.path, path))
    }

    pub fn contains(&self, pair: usize, path: &Path) -> bool {
        self.locate(pair, path).is_ok()
    }

    /// Full dual slack `alpha - sum dcost - sum_{P'' < P} delta` of a path
    /// column; positive means the column would improve the LP.
    pub fn violation<S: Scalar>(&self, duals: &DualPrices<S>, pair: usize, path: &Path) -> S {
        let demand = self.demand::<S>(pair);
        let mut v = duals.alpha[pair].clone();
        for &a in path.arcs() {
            v = v - compute_dcost(duals, &demand, pair, a);
        }
        for (m, d) in self.paths[pair].iter().zip(&duals.delta[pair]) {
            if cmp_paths(&m.path, path) == Ordering::Less {
                v = v - d.clone();
            }
        }
        v
    }

    /// Adds `z_P` with its shortest-path row and, when enabled, the subpath
    /// rows of `P` (adding missing subpaths first).
    pub fn add_path<S: Scalar>(
        &mut self,
        lp: &mut LpModel<S>,
        pair: usize,
        path: Path,
    ) -> Result<ColumnId, MspndError> {
        let pos = match self.locate(pair, &path) {
            Ok(_) => return Err(MspndError::DuplicatePath),
            Err(pos) => pos,
        };
        let demand = self.demand::<S>(pair);
        let mut entries: Vec<(RowId, S)> = vec![(self.conn_row[pair], S::one())];
        for &a in path.arcs() {
            let row = match self.edge_row[pair].get(&a) {
                Some(&r) => r,
                None => {
                    let (s, t) = self.pairs[pair];
                    let r = lp.add_row(
                        format!("buy_{s}_{t}_{a}"),
                        &[(self.y_col[a], S::one())],
                        Sense::Ge,
                        S::zero(),
                    )?;
                    self.edge_row[pair].insert(a, r);
                    r
                }
            };
            entries.push((row, -S::one()));
            entries.push((self.cap_row[a], -demand.clone()));
        }
        for shorter in &self.paths[pair][..pos] {
            entries.push((shorter.row, -S::one()));
        }
        let (s, t) = self.pairs[pair];
        let col = lp.add_column(
            format!("z_{s}_{t}_{}", lp.num_columns()),
            S::zero(),
            Some(S::zero()),
            None,
            &entries,
        )?;
        let mut coefs: Vec<(ColumnId, S)> = path
            .arcs()
            .iter()
            .map(|&a| (self.y_col[a], -S::one()))
            .collect();
        coefs.extend(self.paths[pair][pos..].iter().map(|m| (m.col, -S::one())));
        let row = lp.add_row(
            format!("sp_{s}_{t}_{col}"),
            &coefs,
            Sense::Ge,
            -S::from_count(path.hops() as u64),
        )?;
        let hops = path.hops();
        let sub_source = path.clone();
        self.paths[pair].insert(pos, ModelPath { path, col, row });
        if self.strengthening {
            for i in 1..hops {
                for (from, to) in [(0, i), (i, hops)] {
                    let sub = sub_source.subpath(self.net, from, to);
                    if self.one_shortest && sub.hops() == 1 {
                        continue;
                    }
                    let Some(&sub_pair) = self.pair_index.get(&(sub.source(), sub.target())) else {
                        continue;
                    };
                    let sub_col = match self.locate(sub_pair, &sub) {
                        Ok(k) => self.paths[sub_pair][k].col,
                        Err(_) => self.add_path(lp, sub_pair, sub)?,
                    };
                    lp.add_row(
                        format!("sub_{sub_col}_{col}"),
                        &[(sub_col, S::one()), (col, -S::one())],
                        Sense::Ge,
                        S::zero(),
                    )?;
                    self.strengthening_rows += 1;
                }
            }
        }
        Ok(col)
    }
}

/// All `x` and `y` columns, couplings, capacity and connectivity rows, plus
/// the [`INITIAL_PATHS`] order-smallest paths of every terminal pair.
pub fn build_root_model<'a, S: Scalar>(
    net: &'a Network,
    traffic: &'a TrafficMatrix,
    strengthening: bool,
) -> Result<MspndModel<'a, S>, MspndError> {
    let mut lp = LpModel::new();
    let m = net.num_arcs();
    let mut x_col = vec![usize::MAX; m];
    let mut y_col = vec![usize::MAX; m];
    let links = net.links();
    for &link in &links {
        let arc = net.arc(link);
        let weight = if net.link_partner(link).is_some() {
            2
        } else {
            1
        };
        let mu = S::from_count(arc.mu.into());
        let x = lp.add_column(
            format!("x_{}_{}", arc.tail, arc.head),
            S::from_count(weight),
            Some(S::zero()),
            Some(mu.clone()),
            &[],
        )?;
        let y = lp.add_column(
            format!("y_{}_{}", arc.tail, arc.head),
            S::zero(),
            Some(S::zero()),
            Some(S::one()),
            &[],
        )?;
        lp.add_row(
            format!("on_{link}"),
            &[(x, S::one()), (y, -S::one())],
            Sense::Ge,
            S::zero(),
        )?;
        lp.add_row(
            format!("mu_{link}"),
            &[(y, mu), (x, -S::one())],
            Sense::Ge,
            S::zero(),
        )?;
        for a in std::iter::once(link).chain(net.link_partner(link)) {
            x_col[a] = x;
            y_col[a] = y;
        }
    }
    let cap_row = net
        .arcs()
        .iter()
        .map(|a| {
            lp.add_row(
                format!("cap_{}", a.id),
                &[(x_col[a.id], S::from_rational(&a.ccap))],
                Sense::Ge,
                S::zero(),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    let pairs = traffic.terminals();
    let conn_row = pairs
        .iter()
        .map(|&(s, t)| lp.add_row(format!("conn_{s}_{t}"), &[], Sense::Ge, S::one()))
        .collect::<Result<Vec<_>, _>>()?;
    let k = pairs.len();
    let mut form = Formulation {
        net,
        traffic,
        pair_index: pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect(),
        pairs,
        x_col,
        y_col,
        links,
        conn_row,
        cap_row,
        edge_row: vec![BTreeMap::new(); k],
        paths: vec![Vec::new(); k],
        strengthening,
        one_shortest: net.is_one_shortest(),
        strengthening_rows: 0,
    };
    for pair in 0..k {
        let (s, t) = form.pairs[pair];
        let initial = k_shortest_paths(net, s, t, INITIAL_PATHS);
        if initial.is_empty() {
            return Err(MspndError::DisconnectedPair(s, t));
        }
        for p in initial {
            if !form.contains(pair, &p) {
                form.add_path(&mut lp, pair, p)?;
            }
        }
    }
    Ok(MspndModel { lp, form })
}
