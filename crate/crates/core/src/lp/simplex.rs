use std::time::Instant;

use crate::lp::factor::{Factor, Singular, Var};
use crate::lp::model::{LpModel, Sense};
use crate::lp::LpError;
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<S> {
    pub status: LpStatus,
    /// Column values. Meaningful only when optimal.
    pub primal: Vec<S>,
    /// Row duals; nonnegative on `>=` rows and nonpositive on `<=` rows.
    pub dual: Vec<S>,
    pub reduced_costs: Vec<S>,
    pub objective: S,
    /// Lagrangian bound assembled from the duals and the active bounds.
    pub dual_objective: S,
    pub iterations: usize,
}

impl<S: Scalar> LpSolution<S> {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Basic,
    Lower,
    Upper,
    Free,
}

const DEGENERATE_LIMIT: usize = 50;
const REFACTOR_PERIOD: usize = 100;

/// Bounded revised simplex over a factorized basis.
///
/// Row `i` is stored as `a_i x - r_i = 0` where the logical `r_i` carries the
/// row's sense and right-hand side as bounds. The basis survives between calls
/// to [`Simplex::solve`] as long as the model only grows, which gives warm
/// starts after added columns, added rows and changed bounds.
#[derive(Debug, Clone, Default)]
pub struct Simplex<S> {
    n: usize,
    m: usize,
    col_state: Vec<State>,
    row_state: Vec<State>,
    col_x: Vec<S>,
    row_x: Vec<S>,
    basis: Vec<Var>,
    xb: Vec<S>,
    factor: Factor<S>,
    /// Rows were added since the last factorization.
    stale: bool,
    pivots_since_refactor: usize,
    repairs: usize,
    pub iteration_limit: Option<usize>,
}

/// Solves `model` from scratch.
pub fn solve_lp<S: Scalar>(model: &LpModel<S>) -> Result<LpSolution<S>, LpError> {
    Simplex::new().solve(model, None)
}

fn bounds<S: Scalar>(model: &LpModel<S>, v: Var) -> (Option<S>, Option<S>) {
    match v {
        Var::Col(j) => {
            let c = model.column(j);
            (c.lower.clone(), c.upper.clone())
        }
        Var::Row(i) => {
            let r = model.row(i);
            match r.sense {
                Sense::Le => (None, Some(r.rhs.clone())),
                Sense::Ge => (Some(r.rhs.clone()), None),
                Sense::Eq => (Some(r.rhs.clone()), Some(r.rhs.clone())),
            }
        }
    }
}

/// Bounds of `v`, each moved outward by a small variable-specific amount
/// when `perturbed` is set.
fn widened<S: Scalar>(model: &LpModel<S>, v: Var, perturbed: bool) -> (Option<S>, Option<S>) {
    let (lb, ub) = bounds(model, v);
    if !perturbed {
        return (lb, ub);
    }
    let (kind, idx) = var_key(v);
    let spread = ((idx as u64).wrapping_mul(2_654_435_761) ^ (kind as u64 * 40_503)) % 1000;
    let base = S::from_rational(&Rational::new(
        (1000 + spread).into(),
        1_000_000_000u64.into(),
    ));
    let shift = |b: &S| base.clone() * (S::one() + b.abs());
    (
        lb.map(|l| l.clone() - shift(&l)),
        ub.map(|u| u.clone() + shift(&u)),
    )
}

fn resting_state<S: Scalar>(lb: &Option<S>, ub: &Option<S>, prefer: State) -> (State, S) {
    match (lb, ub, prefer) {
        (_, Some(u), State::Upper) => (State::Upper, u.clone()),
        (Some(l), _, _) => (State::Lower, l.clone()),
        (None, Some(u), _) => (State::Upper, u.clone()),
        (None, None, _) => (State::Free, S::zero()),
    }
}

impl<S: Scalar> Simplex<S> {
    pub fn new() -> Self {
        Self {
            n: 0,
            m: 0,
            col_state: Vec::new(),
            row_state: Vec::new(),
            col_x: Vec::new(),
            row_x: Vec::new(),
            basis: Vec::new(),
            xb: Vec::new(),
            factor: Factor::default(),
            stale: true,
            pivots_since_refactor: 0,
            repairs: 0,
            iteration_limit: None,
        }
    }

    fn set_nonbasic(&mut self, v: Var, st: State, x: S) {
        match v {
            Var::Col(j) => {
                self.col_state[j] = st;
                self.col_x[j] = x;
            }
            Var::Row(i) => {
                self.row_state[i] = st;
                self.row_x[i] = x;
            }
        }
    }

    fn value(&self, v: Var) -> S {
        match v {
            Var::Col(j) => self.col_x[j].clone(),
            Var::Row(i) => self.row_x[i].clone(),
        }
    }

    fn reset(&mut self) {
        *self = Self {
            iteration_limit: self.iteration_limit,
            ..Self::new()
        };
    }

    /// Brings the stored basis in line with a model that may have grown.
    fn sync(&mut self, model: &LpModel<S>) {
        if model.num_columns() < self.n || model.num_rows() < self.m {
            self.reset();
        }
        while self.n < model.num_columns() {
            let (lb, ub) = bounds(model, Var::Col(self.n));
            let (st, x) = resting_state(&lb, &ub, State::Lower);
            self.col_state.push(st);
            self.col_x.push(x);
            self.n += 1;
        }
        while self.m < model.num_rows() {
            self.basis.push(Var::Row(self.m));
            self.row_state.push(State::Basic);
            self.row_x.push(S::zero());
            self.xb.push(S::zero());
            self.m += 1;
            self.stale = true;
        }
        for j in 0..self.n {
            if self.col_state[j] != State::Basic {
                let (lb, ub) = bounds(model, Var::Col(j));
                let (st, x) = resting_state(&lb, &ub, self.col_state[j]);
                self.col_state[j] = st;
                self.col_x[j] = x;
            }
        }
        for i in 0..self.m {
            if self.row_state[i] != State::Basic {
                let (lb, ub) = bounds(model, Var::Row(i));
                let (st, x) = resting_state(&lb, &ub, self.row_state[i]);
                self.row_state[i] = st;
                self.row_x[i] = x;
            }
        }
    }

    fn compute_basics(&mut self, model: &LpModel<S>) {
        let mut rhs = vec![S::zero(); self.m];
        for j in 0..self.n {
            if self.col_state[j] != State::Basic && !self.col_x[j].is_zero() {
                for (i, a) in model.column(j).entries() {
                    rhs[*i] = rhs[*i].clone() - a.clone() * self.col_x[j].clone();
                }
            }
        }
        for i in 0..self.m {
            if self.row_state[i] != State::Basic {
                rhs[i] = rhs[i].clone() + self.row_x[i].clone();
            }
        }
        self.xb = self.factor.ftran(&rhs);
    }

    /// Factorizes the current basis from scratch. In floating point, basis
    /// positions found dependent are handed to the logicals of rows left
    /// without a pivot, and the old occupants move to their nearest bound.
    fn refactor(&mut self, model: &LpModel<S>) -> Result<(), LpError> {
        loop {
            let Singular {
                dependent,
                free_rows,
            } = match Factor::new(model, &self.basis) {
                Ok(f) => {
                    self.factor = f;
                    self.stale = false;
                    self.pivots_since_refactor = 0;
                    return Ok(());
                }
                Err(e) => e,
            };
            if S::EXACT || self.repairs > self.m {
                return Err(LpError::NumericalFailure("singular basis".into()));
            }
            self.repairs += 1;
            for (&p, &i) in dependent.iter().zip(&free_rows) {
                let old = self.basis[p];
                let x = self.xb[p].clone();
                let (lb, ub) = bounds(model, old);
                let (st, val) = match (lb, ub) {
                    (Some(l), Some(u)) => {
                        if (x.clone() - l.clone()).abs() <= (u.clone() - x.clone()).abs() {
                            (State::Lower, l)
                        } else {
                            (State::Upper, u)
                        }
                    }
                    (Some(l), None) => (State::Lower, l),
                    (None, Some(u)) => (State::Upper, u),
                    (None, None) => (State::Free, S::zero()),
                };
                self.set_nonbasic(old, st, val);
                self.basis[p] = Var::Row(i);
                self.row_state[i] = State::Basic;
            }
        }
    }

    fn column_image(&self, model: &LpModel<S>, v: Var) -> Vec<S> {
        let mut rhs = vec![S::zero(); self.m];
        match v {
            Var::Col(j) => {
                for (i, a) in model.column(j).entries() {
                    rhs[*i] = a.clone();
                }
            }
            Var::Row(i) => rhs[i] = -S::one(),
        }
        self.factor.ftran(&rhs)
    }

    fn pivot(&mut self, p: usize, alpha: &[S]) {
        self.factor.update(p, alpha);
        self.pivots_since_refactor += 1;
    }

    fn duals(&self, costs: &[S]) -> Vec<S> {
        self.factor.btran(costs)
    }

    fn col_reduced_cost(model: &LpModel<S>, j: usize, y: &[S], phase_one: bool) -> S {
        let col = model.column(j);
        let mut d = if phase_one {
            S::zero()
        } else {
            col.obj.clone()
        };
        for (i, a) in col.entries() {
            if !y[*i].is_zero() {
                d = d - y[*i].clone() * a.clone();
            }
        }
        d
    }

    /// Solves the current model, warm-starting from the previous basis.
    pub fn solve(
        &mut self,
        model: &LpModel<S>,
        deadline: Option<Instant>,
    ) -> Result<LpSolution<S>, LpError> {
        let sol = match self.run(model, deadline) {
            Err(LpError::NumericalFailure(_)) if !S::EXACT => {
                self.reset();
                self.run(model, deadline)?
            }
            other => other?,
        };
        if sol.is_optimal() {
            let slack = S::feas_tol() * (S::one() + sol.objective.abs()) * S::from_count(1000);
            if sol.dual_objective > sol.objective.clone() + slack {
                return Err(LpError::NumericalFailure("weak duality violated".into()));
            }
        }
        Ok(sol)
    }

    fn run(
        &mut self,
        model: &LpModel<S>,
        deadline: Option<Instant>,
    ) -> Result<LpSolution<S>, LpError> {
        self.sync(model);
        self.repairs = 0;
        if self.stale || self.pivots_since_refactor > 0 {
            self.refactor(model)?;
        }
        self.compute_basics(model);
        let tol = S::feas_tol();
        let ptol = S::pivot_tol();
        let limit = self
            .iteration_limit
            .unwrap_or(20_000 + 50 * (self.m + self.n));
        let mut iterations = self.dual_phase(model, deadline, limit)?;
        let mut degenerate = 0usize;
        let mut bland = false;
        let mut perturbed = false;
        let mut perturb_used = false;
        let bounds_of: Vec<(Option<S>, Option<S>)> =
            self.basis.iter().map(|&v| bounds(model, v)).collect();
        let mut basic_bounds = bounds_of;
        loop {
            if iterations % 32 == 0 {
                if let Some(d) = deadline {
                    if Instant::now() >= d {
                        return Err(LpError::TimeLimit);
                    }
                }
            }
            if iterations > limit {
                return Err(LpError::NumericalFailure("iteration limit".into()));
            }
            if self.pivots_since_refactor >= REFACTOR_PERIOD {
                self.refactor(model)?;
                self.compute_basics(model);
                basic_bounds = self
                    .basis
                    .iter()
                    .map(|&v| widened(model, v, perturbed))
                    .collect();
            }

            let mut phase_one = false;
            let mut costs = vec![S::zero(); self.m];
            for p in 0..self.m {
                let (lb, ub) = &basic_bounds[p];
                let x = &self.xb[p];
                if lb.as_ref().is_some_and(|l| *x < l.clone() - tol.clone()) {
                    costs[p] = -S::one();
                    phase_one = true;
                } else if ub.as_ref().is_some_and(|u| *x > u.clone() + tol.clone()) {
                    costs[p] = S::one();
                    phase_one = true;
                }
            }
            if !phase_one {
                for (p, v) in self.basis.iter().enumerate() {
                    costs[p] = match v {
                        Var::Col(j) => model.column(*j).obj.clone(),
                        Var::Row(_) => S::zero(),
                    };
                }
            }
            let y = self.duals(&costs);

            // Pricing.
            let mut entering: Option<(Var, S)> = None;
            let consider = |v: Var, d: S, st: State, entering: &mut Option<(Var, S)>| {
                let up = d < -tol.clone() && matches!(st, State::Lower | State::Free);
                let down = d > tol.clone() && matches!(st, State::Upper | State::Free);
                if !(up || down) {
                    return;
                }
                match entering {
                    None => *entering = Some((v, d)),
                    Some((_, best)) if !bland && d.abs() > best.abs() => *entering = Some((v, d)),
                    _ => {}
                }
            };
            for j in 0..self.n {
                let st = self.col_state[j];
                if st == State::Basic {
                    continue;
                }
                let (lb, ub) = bounds(model, Var::Col(j));
                if lb.is_some() && lb == ub {
                    continue;
                }
                let d = Self::col_reduced_cost(model, j, &y, phase_one);
                consider(Var::Col(j), d, st, &mut entering);
            }
            for i in 0..self.m {
                let st = self.row_state[i];
                if st == State::Basic || model.row(i).sense == Sense::Eq {
                    continue;
                }
                consider(Var::Row(i), y[i].clone(), st, &mut entering);
            }

            let Some((v, d)) = entering else {
                if !S::EXACT && self.pivots_since_refactor > 0 {
                    self.refactor(model)?;
                    self.compute_basics(model);
                    basic_bounds = self
                        .basis
                        .iter()
                        .map(|&v| widened(model, v, perturbed))
                        .collect();
                    iterations += 1;
                    continue;
                }
                if perturbed {
                    perturbed = false;
                    self.unperturb(model);
                    basic_bounds = self.basis.iter().map(|&v| bounds(model, v)).collect();
                    degenerate = 0;
                    bland = false;
                    iterations += 1;
                    continue;
                }
                if phase_one {
                    return Ok(self.finish(model, LpStatus::Infeasible, iterations, Some(&costs)));
                }
                return Ok(self.finish(model, LpStatus::Optimal, iterations, None));
            };

            let increasing = d < S::zero();
            let alpha = self.column_image(model, v);
            // x_B changes by -dir * t * alpha. Candidates are
            // (position, ratio, ratio against bounds widened by tol, |alpha|, leaves at upper).
            let mut cands: Vec<(usize, S, S, S, bool)> = Vec::new();
            for p in 0..self.m {
                let a = &alpha[p];
                if a.abs() <= ptol || a.is_zero() {
                    continue;
                }
                let delta = if increasing { -a.clone() } else { a.clone() };
                let (lb, ub) = &basic_bounds[p];
                let x = &self.xb[p];
                let below = lb.as_ref().is_some_and(|l| *x < l.clone() - tol.clone());
                let above = ub.as_ref().is_some_and(|u| *x > u.clone() + tol.clone());
                let (target, at_upper, widen) = if delta < S::zero() {
                    if above {
                        (ub.clone(), true, S::zero())
                    } else if below {
                        (None, false, S::zero())
                    } else {
                        (lb.clone(), false, -tol.clone())
                    }
                } else if below {
                    (lb.clone(), false, S::zero())
                } else if above {
                    (None, true, S::zero())
                } else {
                    (ub.clone(), true, tol.clone())
                };
                let Some(target) = target else { continue };
                let t = S::max_of((target.clone() - x.clone()) / delta.clone(), S::zero());
                let relaxed = S::max_of((target + widen - x.clone()) / delta, S::zero());
                cands.push((p, t, relaxed, a.abs(), at_upper));
            }
            let mut best: Option<(usize, S, S, bool)> = None; // (pos, t, |alpha|, leaves at upper)
            if S::EXACT || bland {
                for (p, t, _, mag, at_upper) in cands {
                    let better = match &best {
                        None => true,
                        Some((bp, bt, _, _)) => {
                            t < *bt
                                || (t == *bt && var_key(self.basis[p]) < var_key(self.basis[*bp]))
                        }
                    };
                    if better {
                        best = Some((p, t, mag, at_upper));
                    }
                }
            } else if let Some(tmax) = cands
                .iter()
                .map(|c| c.2.clone())
                .reduce(|x, y| S::min_of(x, y))
            {
                for (p, t, _, mag, at_upper) in cands {
                    if t <= tmax && best.as_ref().map_or(true, |b| mag > b.2) {
                        best = Some((p, t, mag, at_upper));
                    }
                }
            }

            let (lb_v, ub_v) = widened(model, v, perturbed);
            let current = self.value(v);
            let reach = match (increasing, &lb_v, &ub_v) {
                (true, Some(_), Some(u)) => Some(u.clone() - current.clone()),
                (false, Some(l), Some(_)) => Some(current.clone() - l.clone()),
                _ => None,
            };
            let flip = match (&reach, &best) {
                (Some(r), Some((_, t, _, _))) => r <= t,
                (Some(_), None) => true,
                _ => false,
            };
            iterations += 1;

            if flip {
                let r = reach.expect("flip needs a finite range");
                let signed = if increasing { r.clone() } else { -r.clone() };
                for p in 0..self.m {
                    if !alpha[p].is_zero() {
                        self.xb[p] = self.xb[p].clone() - signed.clone() * alpha[p].clone();
                    }
                }
                if increasing {
                    self.set_nonbasic(v, State::Upper, ub_v.expect("finite"));
                } else {
                    self.set_nonbasic(v, State::Lower, lb_v.expect("finite"));
                }
                degenerate = 0;
                bland = false;
                continue;
            }

            let Some((p, t, _, at_upper)) = best else {
                if phase_one {
                    return Err(LpError::NumericalFailure(
                        "unbounded ray during feasibility phase".into(),
                    ));
                }
                return Ok(self.finish(model, LpStatus::Unbounded, iterations, None));
            };

            if t <= tol {
                degenerate += 1;
                if degenerate > DEGENERATE_LIMIT {
                    if !S::EXACT && !perturb_used {
                        perturbed = true;
                        perturb_used = true;
                        degenerate = 0;
                        basic_bounds = self
                            .basis
                            .iter()
                            .map(|&v| widened(model, v, true))
                            .collect();
                    } else {
                        bland = true;
                    }
                }
            } else {
                degenerate = 0;
                bland = false;
            }

            let signed = if increasing { t.clone() } else { -t.clone() };
            for q in 0..self.m {
                if q != p && !alpha[q].is_zero() {
                    self.xb[q] = self.xb[q].clone() - signed.clone() * alpha[q].clone();
                }
            }
            let entering_value = current + signed;
            let leaving = self.basis[p];
            let (llb, lub) = basic_bounds[p].clone();
            if at_upper {
                self.set_nonbasic(leaving, State::Upper, lub.expect("blocked at upper"));
            } else {
                self.set_nonbasic(leaving, State::Lower, llb.expect("blocked at lower"));
            }
            match v {
                Var::Col(j) => self.col_state[j] = State::Basic,
                Var::Row(i) => self.row_state[i] = State::Basic,
            }
            self.basis[p] = v;
            self.xb[p] = entering_value;
            basic_bounds[p] = (lb_v, ub_v);
            self.pivot(p, &alpha);
        }
    }

    /// Reduced cost of a nonbasic variable that may move, or `None` for
    /// fixed variables.
    fn movable_reduced_cost(&self, model: &LpModel<S>, v: Var, y: &[S]) -> Option<S> {
        match v {
            Var::Col(j) => {
                let (lb, ub) = bounds(model, v);
                if lb.is_some() && lb == ub {
                    return None;
                }
                Some(Self::col_reduced_cost(model, j, y, false))
            }
            Var::Row(i) => (model.row(i).sense != Sense::Eq).then(|| y[i].clone()),
        }
    }

    fn nonbasic(&self) -> impl Iterator<Item = (Var, State)> + '_ {
        let cols = (0..self.n).map(|j| (Var::Col(j), self.col_state[j]));
        let rows = (0..self.m).map(|i| (Var::Row(i), self.row_state[i]));
        cols.chain(rows).filter(|(_, st)| *st != State::Basic)
    }

    /// Dual simplex from a dual feasible starting basis, which is what
    /// branching and added rows leave behind. Stops without error as soon
    /// as the basis is not dual feasible, the leaving row has no entering
    /// candidate, or the step budget runs out; the primal loop then takes
    /// over from wherever it stopped. Returns the pivots made.
    fn dual_phase(
        &mut self,
        model: &LpModel<S>,
        deadline: Option<Instant>,
        limit: usize,
    ) -> Result<usize, LpError> {
        let tol = S::feas_tol();
        let ptol = S::pivot_tol();
        let budget = (2 * (self.m + self.n) + 100).min(limit);
        let mut steps = 0;
        while steps < budget {
            if steps % 32 == 0 && deadline.is_some_and(|d| Instant::now() >= d) {
                return Err(LpError::TimeLimit);
            }
            let costs: Vec<S> = self
                .basis
                .iter()
                .map(|v| match v {
                    Var::Col(j) => model.column(*j).obj.clone(),
                    Var::Row(_) => S::zero(),
                })
                .collect();
            let y = self.duals(&costs);
            let mut reduced = Vec::new();
            for (v, st) in self.nonbasic() {
                let Some(d) = self.movable_reduced_cost(model, v, &y) else {
                    continue;
                };
                let infeasible = match st {
                    State::Lower => d < -tol.clone(),
                    State::Upper => d > tol.clone(),
                    _ => d.abs() > tol,
                };
                if infeasible {
                    return Ok(steps);
                }
                reduced.push((v, st, d));
            }

            let mut leaving: Option<(usize, S, S, bool)> = None; // (pos, violation, target, below)
            for p in 0..self.m {
                let (lb, ub) = bounds(model, self.basis[p]);
                let x = &self.xb[p];
                let (viol, target, below) = match (&lb, &ub) {
                    (Some(l), _) if *x < l.clone() - tol.clone() => {
                        (l.clone() - x.clone(), l.clone(), true)
                    }
                    (_, Some(u)) if *x > u.clone() + tol.clone() => {
                        (x.clone() - u.clone(), u.clone(), false)
                    }
                    _ => continue,
                };
                if leaving.as_ref().map_or(true, |l| viol > l.1) {
                    leaving = Some((p, viol, target, below));
                }
            }
            let Some((p, _, target, below)) = leaving else {
                return Ok(steps);
            };

            let mut unit = vec![S::zero(); self.m];
            unit[p] = S::one();
            let rho = self.duals(&unit);
            // (var, |d / alpha|, Harris-relaxed ratio, |alpha|)
            let mut cands: Vec<(Var, S, S, S)> = Vec::new();
            for (v, st, d) in reduced {
                let a = match v {
                    Var::Col(j) => model
                        .column(j)
                        .entries()
                        .iter()
                        .fold(S::zero(), |acc, (i, c)| acc + rho[*i].clone() * c.clone()),
                    Var::Row(i) => -rho[i].clone(),
                };
                if a.abs() <= ptol || a.is_zero() {
                    continue;
                }
                let eligible = match st {
                    State::Lower => (a < S::zero()) == below,
                    State::Upper => (a > S::zero()) == below,
                    _ => true,
                };
                if !eligible {
                    continue;
                }
                let mag = a.abs();
                let ratio = d.abs() / mag.clone();
                let relaxed = (d.abs() + tol.clone()) / mag.clone();
                cands.push((v, ratio, relaxed, mag));
            }
            let Some(tmax) = cands
                .iter()
                .map(|c| c.2.clone())
                .reduce(|a, b| S::min_of(a, b))
            else {
                return Ok(steps);
            };
            let mut entering: Option<(Var, S)> = None;
            for (v, ratio, _, mag) in cands {
                let fits = if S::EXACT {
                    ratio == tmax
                } else {
                    ratio <= tmax
                };
                if fits && entering.as_ref().map_or(true, |e| mag > e.1) {
                    entering = Some((v, mag));
                }
            }
            let (q, _) = entering.expect("a candidate passes its own relaxed ratio");

            let alpha = self.column_image(model, q);
            if alpha[p].abs() <= ptol || alpha[p].is_zero() {
                return Ok(steps);
            }
            let t = (self.xb[p].clone() - target.clone()) / alpha[p].clone();
            for r in 0..self.m {
                if r != p && !alpha[r].is_zero() {
                    self.xb[r] = self.xb[r].clone() - t.clone() * alpha[r].clone();
                }
            }
            let entering_value = self.value(q) + t;
            let old = self.basis[p];
            self.set_nonbasic(old, if below { State::Lower } else { State::Upper }, target);
            match q {
                Var::Col(j) => self.col_state[j] = State::Basic,
                Var::Row(i) => self.row_state[i] = State::Basic,
            }
            self.basis[p] = q;
            self.xb[p] = entering_value;
            self.pivot(p, &alpha);
            steps += 1;
            if self.pivots_since_refactor >= REFACTOR_PERIOD {
                self.refactor(model)?;
                self.compute_basics(model);
            }
        }
        Ok(steps)
    }

    /// Returns nonbasic variables to their exact bounds after a perturbed
    /// stretch and recomputes the basic values.
    fn unperturb(&mut self, model: &LpModel<S>) {
        for j in 0..self.n {
            let (lb, ub) = bounds(model, Var::Col(j));
            match self.col_state[j] {
                State::Lower => self.col_x[j] = lb.expect("lower state has a bound"),
                State::Upper => self.col_x[j] = ub.expect("upper state has a bound"),
                _ => {}
            }
        }
        for i in 0..self.m {
            let (lb, ub) = bounds(model, Var::Row(i));
            match self.row_state[i] {
                State::Lower => self.row_x[i] = lb.expect("lower state has a bound"),
                State::Upper => self.row_x[i] = ub.expect("upper state has a bound"),
                _ => {}
            }
        }
        self.compute_basics(model);
    }

    /// Packs the current basis into a solution. For infeasible models the
    /// duals are those of the feasibility phase and certify infeasibility:
    /// a column `A_j` with `y . A_j > 0` and room to grow can reduce it.
    fn finish(
        &mut self,
        model: &LpModel<S>,
        status: LpStatus,
        iterations: usize,
        phase_one_costs: Option<&[S]>,
    ) -> LpSolution<S> {
        let mut col_x = self.col_x.clone();
        let mut row_x = self.row_x.clone();
        for (p, v) in self.basis.iter().enumerate() {
            match *v {
                Var::Col(j) => col_x[j] = self.xb[p].clone(),
                Var::Row(i) => row_x[i] = self.xb[p].clone(),
            }
        }
        let costs: Vec<S> = match phase_one_costs {
            Some(c) => c.to_vec(),
            None => self
                .basis
                .iter()
                .map(|v| match v {
                    Var::Col(j) => model.column(*j).obj.clone(),
                    Var::Row(_) => S::zero(),
                })
                .collect(),
        };
        let y = self.duals(&costs);
        let reduced: Vec<S> = (0..self.n)
            .map(|j| Self::col_reduced_cost(model, j, &y, phase_one_costs.is_some()))
            .collect();
        let objective = model.objective_value(&col_x);
        let mut dual_objective = S::zero();
        let mut add_term = |d: &S, lb: Option<S>, ub: Option<S>, x: &S| {
            let bound = if *d > S::zero() {
                lb.unwrap_or_else(|| x.clone())
            } else if *d < S::zero() {
                ub.unwrap_or_else(|| x.clone())
            } else {
                return;
            };
            dual_objective = dual_objective.clone() + d.clone() * bound;
        };
        for j in 0..self.n {
            let (lb, ub) = bounds(model, Var::Col(j));
            add_term(&reduced[j], lb, ub, &col_x[j]);
        }
        for i in 0..self.m {
            let (lb, ub) = bounds(model, Var::Row(i));
            add_term(&y[i], lb, ub, &row_x[i]);
        }
        LpSolution {
            status,
            primal: col_x,
            dual: y,
            reduced_costs: reduced,
            objective,
            dual_objective,
            iterations,
        }
    }
}

fn var_key(v: Var) -> (usize, usize) {
    match v {
        Var::Col(j) => (0, j),
        Var::Row(i) => (1, i),
    }
}
