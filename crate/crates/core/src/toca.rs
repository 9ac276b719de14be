//! Traffic-oblivious cable activation by LP rounding.
//!
//! The LP routes, for every arc `a = uv`, a commodity of `rho * fcap(a)` units
//! from `u` to `v` and minimizes the number of (fractional) active
//! connections. Commodities sharing a source are aggregated into one
//! single-source flow, which changes nothing about feasibility.

use thiserror::Error;

use crate::lp::{LpError, LpModel, LpSolution, Sense, Simplex};
use crate::net::{Activation, ArcId, Network, VertexId};
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TocaError {
    #[error("retention ratio must lie strictly between 0 and 1")]
    BadRatio,
    #[error("flow LP infeasible after fixing a variable to its ceiling")]
    InfeasibleAfterFix,
    #[error(transparent)]
    Lp(#[from] LpError),
}

#[derive(Debug, Clone)]
pub struct TocaLp<S> {
    pub model: LpModel<S>,
    /// Activation column per arc; both arcs of a duplex link share one.
    pub x_col: Vec<usize>,
    /// Distinct activation columns in increasing arc order of their link.
    pub x_cols: Vec<usize>,
    /// `flow_col[k][a]` for the `k`-th source in `sources`.
    pub flow_col: Vec<Vec<usize>>,
    pub sources: Vec<VertexId>,
}

#[derive(Debug, Clone)]
pub struct TocaResult {
    pub activation: Activation,
    /// Optimum of the initial LP relaxation.
    pub lp_value: f64,
    /// LP solves after the first one.
    pub resolves: usize,
}

fn check_rho(rho: &Rational) -> Result<(), TocaError> {
    let zero = Rational::from_integer(0.into());
    let one = Rational::from_integer(1.into());
    if *rho <= zero || *rho >= one {
        return Err(TocaError::BadRatio);
    }
    Ok(())
}

/// Builds the utilization-minimizing multicommodity flow LP.
pub fn build_toca_lp<S: Scalar>(net: &Network, rho: &Rational) -> Result<TocaLp<S>, TocaError> {
    check_rho(rho)?;
    let mut model = LpModel::new();
    let n = net.num_vertices();
    let mut x_col = vec![usize::MAX; net.num_arcs()];
    let mut x_cols = Vec::new();
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
            Some(S::zero()),
            Some(S::from_count(arc.mu.into())),
            &[],
        )?;
        x_col[link] = col;
        if let Some(rev) = net.link_partner(link) {
            x_col[rev] = col;
        }
        x_cols.push(col);
    }
    let cap_rows: Vec<usize> = net
        .arcs()
        .iter()
        .map(|a| {
            let coef = -S::from_rational(&a.ccap);
            model.add_row(
                format!("cap_{}", a.id),
                &[(x_col[a.id], coef)],
                Sense::Le,
                S::zero(),
            )
        })
        .collect::<Result<_, _>>()?;
    let sources: Vec<VertexId> = (0..n).filter(|&v| !net.out_arcs(v).is_empty()).collect();
    let mut flow_col = Vec::with_capacity(sources.len());
    for &u in &sources {
        let mut supply = vec![Rational::from_integer(0.into()); n];
        for &a in net.out_arcs(u) {
            let d = rho * net.arc(a).fcap();
            supply[u] += &d;
            supply[net.arc(a).head] -= &d;
        }
        let rows: Vec<usize> = (0..n)
            .map(|v| {
                model.add_row(
                    format!("flow_{u}_{v}"),
                    &[],
                    Sense::Eq,
                    S::from_rational(&supply[v]),
                )
            })
            .collect::<Result<_, _>>()?;
        let cols: Vec<usize> = net
            .arcs()
            .iter()
            .map(|a| {
                model.add_column(
                    format!("f_{u}_{}", a.id),
                    S::zero(),
                    Some(S::zero()),
                    None,
                    &[
                        (rows[a.tail], S::one()),
                        (rows[a.head], -S::one()),
                        (cap_rows[a.id], S::one()),
                    ],
                )
            })
            .collect::<Result<_, _>>()?;
        flow_col.push(cols);
    }
    Ok(TocaLp {
        model,
        x_col,
        x_cols,
        flow_col,
        sources,
    })
}

fn activation_from(net: &Network, chi: impl Fn(ArcId) -> u32) -> Activation {
    let counts = (0..net.num_arcs()).map(chi).collect();
    Activation::new(net, counts).expect("counts within bounds and symmetric")
}

fn solve_optimal<S: Scalar>(
    simplex: &mut Simplex<S>,
    model: &LpModel<S>,
) -> Result<Option<LpSolution<S>>, TocaError> {
    let sol = simplex.solve(model, None)?;
    Ok(sol.is_optimal().then_some(sol))
}

/// Rounds every activation variable of an optimal LP solution up.
pub fn alg_mcf<S: Scalar>(net: &Network, rho: &Rational) -> Result<TocaResult, TocaError> {
    let lp = build_toca_lp::<S>(net, rho)?;
    let mut simplex = Simplex::new();
    let sol = solve_optimal(&mut simplex, &lp.model)?.ok_or(TocaError::InfeasibleAfterFix)?;
    let activation = activation_from(net, |a| {
        let x = sol.primal[lp.x_col[a]].clone() - S::int_tol();
        let c = S::max_of(x.ceil(), S::zero()).to_count() as u32;
        c.min(net.arc(a).mu)
    });
    Ok(TocaResult {
        activation,
        lp_value: sol.objective.approx(),
        resolves: 0,
    })
}

/// Iterative fixing: bound every variable between floor and ceiling, then
/// repeatedly fix the fractional variable closest to its ceiling to that
/// ceiling and re-solve.
pub fn alg_mcf_pp<S: Scalar>(net: &Network, rho: &Rational) -> Result<TocaResult, TocaError> {
    let mut lp = build_toca_lp::<S>(net, rho)?;
    let mut simplex = Simplex::new();
    let first = solve_optimal(&mut simplex, &lp.model)?.ok_or(TocaError::InfeasibleAfterFix)?;
    let lp_value = first.objective.approx();
    for &c in &lp.x_cols {
        let x = first.primal[c].clone();
        let (lo, hi) = if x.is_integral() {
            (x.round(), x.round())
        } else {
            (x.floor(), x.ceil())
        };
        lp.model.set_bounds(c, Some(lo), Some(hi))?;
    }
    let mut sol = first;
    let mut resolves = 0;
    loop {
        let mut pick: Option<(S, usize)> = None;
        for &c in &lp.x_cols {
            let x = &sol.primal[c];
            if x.is_integral() {
                continue;
            }
            let gap = x.ceil() - x.clone();
            if pick.as_ref().map_or(true, |(g, _)| gap < *g) {
                pick = Some((gap, c));
            }
        }
        let Some((_, c)) = pick else { break };
        let ceil = sol.primal[c].ceil();
        lp.model.set_bounds(c, Some(ceil.clone()), Some(ceil))?;
        resolves += 1;
        sol = solve_optimal(&mut simplex, &lp.model)?.ok_or(TocaError::InfeasibleAfterFix)?;
    }
    let activation = activation_from(net, |a| {
        (sol.primal[lp.x_col[a]].round().to_count() as u32).min(net.arc(a).mu)
    });
    Ok(TocaResult {
        activation,
        lp_value,
        resolves,
    })
}

/// Whether every per-arc commodity `rho * fcap(a)` can be routed
/// simultaneously in the subnetwork given by `activation`.
pub fn routes_all_arc_commodities<S: Scalar>(
    net: &Network,
    rho: &Rational,
    activation: &Activation,
) -> Result<bool, TocaError> {
    let mut lp = build_toca_lp::<S>(net, rho)?;
    for a in 0..net.num_arcs() {
        let v = S::from_count(activation.count(a).into());
        lp.model.set_bounds(lp.x_col[a], Some(v.clone()), Some(v))?;
    }
    Ok(Simplex::new().solve(&lp.model, None)?.is_optimal())
}
