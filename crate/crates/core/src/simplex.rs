//! Bounded-variable revised simplex.
//!
//! Every row `i` gets a logical variable `s_i = a_i x` whose bounds encode
//! the sense: `<=` rows give `s_i <= b_i`, `>=` rows give `s_i >= b_i` and
//! equality rows fix `s_i = b_i`. The working system is then `A x - s = 0`
//! with box bounds on every variable, so any basis made of structural and
//! logical columns is a valid starting point. Primal infeasibility of the
//! start is removed by a composite phase one that minimises the sum of
//! bound violations of basic variables; phase two then optimises the real
//! objective.
//!
//! The basis inverse is kept dense, updated in product form after every
//! pivot and recomputed from scratch every `refactor_every` pivots. Pricing
//! is Dantzig's rule with a Harris ratio test; after `10 (m + n)`
//! consecutive degenerate pivots the solver switches to Bland's rule for the
//! rest of the solve.
//!
//! Row duals follow the sign convention of a minimisation: a `<=` row has a
//! dual `<= 0`, a `>=` row a dual `>= 0`. The dual of a row is the change of
//! the optimal objective per unit increase of its right-hand side.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub coefs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// `min c x` subject to sparse rows and variable bounds.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearProgram {
    cost: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    var_names: Vec<String>,
    rows: Vec<Row>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, cost: f64, lower: f64, upper: f64) -> usize {
        let name = format!("x{}", self.cost.len());
        self.add_named_var(name, cost, lower, upper)
    }

    pub fn add_named_var(&mut self, name: impl Into<String>, cost: f64, lower: f64, upper: f64) -> usize {
        self.cost.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.var_names.push(name.into());
        self.cost.len() - 1
    }

    pub fn add_row(&mut self, coefs: Vec<(usize, f64)>, sense: Sense, rhs: f64) -> usize {
        let name = format!("r{}", self.rows.len());
        self.add_named_row(name, coefs, sense, rhs)
    }

    pub fn add_named_row(
        &mut self,
        name: impl Into<String>,
        coefs: Vec<(usize, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> usize {
        self.rows.push(Row { name: name.into(), coefs, sense, rhs });
        self.rows.len() - 1
    }

    /// Adds `value` to the coefficient of `var` in `row`.
    pub fn add_coef(&mut self, row: usize, var: usize, value: f64) {
        let coefs = &mut self.rows[row].coefs;
        match coefs.iter_mut().find(|(j, _)| *j == var) {
            Some((_, a)) => *a += value,
            None => coefs.push((var, value)),
        }
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub fn bounds(&self, var: usize) -> (f64, f64) {
        (self.lower[var], self.upper[var])
    }

    pub fn cost(&self, var: usize) -> f64 {
        self.cost[var]
    }

    pub fn set_cost(&mut self, var: usize, cost: f64) {
        self.cost[var] = cost;
    }

    pub fn var_name(&self, var: usize) -> &str {
        &self.var_names[var]
    }

    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &Row {
        &self.rows[i]
    }

    /// `c x` for a full primal vector.
    pub fn objective_of(&self, x: &[f64]) -> f64 {
        self.cost.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Value `a_i x` of every row.
    pub fn row_activity(&self, x: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|r| r.coefs.iter().map(|&(j, a)| a * x[j]).sum()).collect()
    }

    pub fn check(&self) -> Result<()> {
        for j in 0..self.num_vars() {
            let (l, u, c) = (self.lower[j], self.upper[j], self.cost[j]);
            if l.is_nan() || u.is_nan() || !c.is_finite() || l > u || l == f64::INFINITY || u == f64::NEG_INFINITY {
                return Err(Error::Lp(format!("variable {}: bad bounds [{l}, {u}] or cost {c}", self.var_names[j])));
            }
        }
        for r in &self.rows {
            if !r.rhs.is_finite() {
                return Err(Error::Lp(format!("row {}: non-finite right-hand side", r.name)));
            }
            for &(j, a) in &r.coefs {
                if j >= self.num_vars() || !a.is_finite() {
                    return Err(Error::Lp(format!("row {}: bad entry ({j}, {a})", r.name)));
                }
            }
        }
        Ok(())
    }

    /// CPLEX LP text format.
    pub fn to_lp_format(&self) -> String {
        let mut s = String::from("Minimize\n obj:");
        let term = |s: &mut String, a: f64, name: &str, first: bool| {
            if a < 0.0 {
                let _ = write!(s, " - {} {name}", -a);
            } else if first {
                let _ = write!(s, " {a} {name}");
            } else {
                let _ = write!(s, " + {a} {name}");
            }
        };
        let mut first = true;
        for (j, &c) in self.cost.iter().enumerate() {
            if c != 0.0 {
                term(&mut s, c, &self.var_names[j], first);
                first = false;
            }
        }
        if first {
            s.push_str(" 0 ");
            s.push_str(self.var_names.first().map_or("x", |n| n.as_str()));
        }
        s.push_str("\nSubject To\n");
        for r in &self.rows {
            let _ = write!(s, " {}:", r.name);
            let mut first = true;
            for &(j, a) in &r.coefs {
                term(&mut s, a, &self.var_names[j], first);
                first = false;
            }
            if first {
                let _ = write!(s, " 0 {}", self.var_names.first().map_or("x", |n| n.as_str()));
            }
            let op = match r.sense {
                Sense::Le => "<=",
                Sense::Ge => ">=",
                Sense::Eq => "=",
            };
            let _ = writeln!(s, " {op} {}", r.rhs);
        }
        s.push_str("Bounds\n");
        for j in 0..self.num_vars() {
            let (l, u, name) = (self.lower[j], self.upper[j], &self.var_names[j]);
            match (l.is_finite(), u.is_finite()) {
                (false, false) => {
                    let _ = writeln!(s, " {name} free");
                }
                (true, false) if l == 0.0 => {}
                (true, false) => {
                    let _ = writeln!(s, " {name} >= {l}");
                }
                (false, true) => {
                    let _ = writeln!(s, " -inf <= {name} <= {u}");
                }
                (true, true) => {
                    let _ = writeln!(s, " {l} <= {name} <= {u}");
                }
            }
        }
        s.push_str("End\n");
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    NumericalFailure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable held at zero.
    Free,
}

/// Statuses of structural variables and of row logicals.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Basis {
    pub vars: Vec<VarStatus>,
    pub rows: Vec<VarStatus>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    /// One per row.
    pub duals: Vec<f64>,
    /// One per structural variable.
    pub reduced_costs: Vec<f64>,
    pub objective: f64,
    pub basis: Basis,
    pub iterations: usize,
    /// A starting basis was supplied but had to be discarded.
    pub cold_fallback: bool,
    /// Free-form diagnostics for non-optimal outcomes.
    pub message: String,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// `b y + sum_j d_j x_j` over nonbasic bounds, the dual objective.
    pub fn dual_objective(&self, lp: &LinearProgram) -> f64 {
        let mut z: f64 = lp.rows.iter().zip(&self.duals).map(|(r, y)| r.rhs * y).sum();
        for (j, &d) in self.reduced_costs.iter().enumerate() {
            let (l, u) = lp.bounds(j);
            let bound = if d > 0.0 { l } else { u };
            if d != 0.0 && bound.is_finite() {
                z += d * bound;
            }
        }
        z
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpOptions {
    /// Primal feasibility tolerance, relative to `max(1, |b|_inf)`.
    pub tol_feas: f64,
    /// Dual feasibility tolerance, relative to `max(1, |c|_inf)`.
    pub tol_dual: f64,
    pub refactor_every: usize,
    /// `None` picks `1000 + 100 (m + n)`.
    pub max_iterations: Option<usize>,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions { tol_feas: 1e-7, tol_dual: 1e-7, refactor_every: 64, max_iterations: None }
    }
}

pub fn solve_lp(lp: &LinearProgram) -> LpSolution {
    solve_with(lp, None, &LpOptions::default())
}

/// Solves starting from `basis`. Structural variables beyond the basis start
/// nonbasic at a bound, rows beyond it start with their logical basic. A
/// basis with the wrong number of basic variables or a singular basis
/// matrix is discarded for a cold start and `cold_fallback` is set.
pub fn warm_start(lp: &LinearProgram, basis: &Basis) -> LpSolution {
    solve_with(lp, Some(basis), &LpOptions::default())
}

pub fn solve_with(lp: &LinearProgram, basis: Option<&Basis>, options: &LpOptions) -> LpSolution {
    if let Err(e) = lp.check() {
        return failure(lp, LpStatus::NumericalFailure, e.to_string());
    }
    let mut solver = Solver::new(lp, options);
    let mut cold_fallback = false;
    if let Some(b) = basis {
        if !solver.load_basis(b) {
            cold_fallback = true;
            solver.crash_basis();
        }
    }
    let mut sol = solver.run();
    sol.cold_fallback = cold_fallback;
    sol
}

fn failure(lp: &LinearProgram, status: LpStatus, message: String) -> LpSolution {
    LpSolution {
        status,
        x: vec![0.0; lp.num_vars()],
        duals: vec![0.0; lp.num_rows()],
        reduced_costs: vec![0.0; lp.num_vars()],
        objective: f64::NAN,
        basis: Basis::default(),
        iterations: 0,
        cold_fallback: false,
        message,
    }
}

const PIVOT_TOL: f64 = 1e-9;
const SINGULAR_TOL: f64 = 1e-11;

struct Solver<'a> {
    lp: &'a LinearProgram,
    m: usize,
    n: usize,
    cols: Vec<Vec<(usize, f64)>>,
    cost: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    x: Vec<f64>,
    status: Vec<VarStatus>,
    /// Basic variable of each basis position.
    head: Vec<usize>,
    /// Row-major dense inverse of the basis matrix.
    binv: Vec<f64>,
    since_refactor: usize,
    tol_feas: f64,
    tol_dual: f64,
    refactor_every: usize,
    max_iterations: usize,
}

enum Phase {
    One,
    Two,
}

enum Step {
    Flip,
    Pivot(usize),
    Unbounded,
}

impl<'a> Solver<'a> {
    fn new(lp: &'a LinearProgram, options: &LpOptions) -> Self {
        let (m, n) = (lp.num_rows(), lp.num_vars());
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n + m];
        for (i, r) in lp.rows.iter().enumerate() {
            for &(j, a) in &r.coefs {
                if a != 0.0 {
                    cols[j].push((i, a));
                }
            }
        }
        for (i, col) in cols[n..].iter_mut().enumerate() {
            col.push((i, -1.0));
        }
        let mut cost = lp.cost.clone();
        cost.resize(n + m, 0.0);
        let mut lo = lp.lower.clone();
        let mut hi = lp.upper.clone();
        for r in &lp.rows {
            let (l, u) = match r.sense {
                Sense::Le => (f64::NEG_INFINITY, r.rhs),
                Sense::Ge => (r.rhs, f64::INFINITY),
                Sense::Eq => (r.rhs, r.rhs),
            };
            lo.push(l);
            hi.push(u);
        }
        let bmax = lp.rows.iter().map(|r| r.rhs.abs()).fold(1.0, f64::max);
        let cmax = lp.cost.iter().map(|c| c.abs()).fold(1.0, f64::max);
        let mut s = Solver {
            lp,
            m,
            n,
            cols,
            cost,
            lo,
            hi,
            x: vec![0.0; n + m],
            status: vec![VarStatus::AtLower; n + m],
            head: Vec::new(),
            binv: Vec::new(),
            since_refactor: 0,
            tol_feas: options.tol_feas * bmax,
            tol_dual: options.tol_dual * cmax,
            refactor_every: options.refactor_every.max(1),
            max_iterations: options.max_iterations.unwrap_or(1000 + 100 * (m + n)),
        };
        s.crash_basis();
        s
    }

    fn nonbasic_status(&self, j: usize) -> VarStatus {
        match (self.lo[j].is_finite(), self.hi[j].is_finite()) {
            (true, _) => VarStatus::AtLower,
            (false, true) => VarStatus::AtUpper,
            (false, false) => VarStatus::Free,
        }
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.status[j] {
            VarStatus::AtLower => self.lo[j],
            VarStatus::AtUpper => self.hi[j],
            VarStatus::Free | VarStatus::Basic => 0.0,
        }
    }

    /// All logicals basic, structurals at a bound.
    fn crash_basis(&mut self) {
        for j in 0..self.n {
            self.status[j] = self.nonbasic_status(j);
        }
        for i in 0..self.m {
            self.status[self.n + i] = VarStatus::Basic;
        }
        self.head = (self.n..self.n + self.m).collect();
        let ok = self.refactor();
        debug_assert!(ok);
        self.recompute_primal();
    }

    fn load_basis(&mut self, basis: &Basis) -> bool {
        for j in 0..self.n + self.m {
            let given = if j < self.n { basis.vars.get(j) } else { basis.rows.get(j - self.n) };
            let st = match given {
                Some(&s) => s,
                None if j < self.n => self.nonbasic_status(j),
                None => VarStatus::Basic,
            };
            self.status[j] = match st {
                VarStatus::Basic => VarStatus::Basic,
                VarStatus::AtLower if self.lo[j].is_finite() => VarStatus::AtLower,
                VarStatus::AtUpper if self.hi[j].is_finite() => VarStatus::AtUpper,
                _ => self.nonbasic_status(j),
            };
        }
        self.head = (0..self.n + self.m).filter(|&j| self.status[j] == VarStatus::Basic).collect();
        if self.head.len() != self.m || !self.refactor() {
            return false;
        }
        self.recompute_primal();
        true
    }

    /// Recomputes the dense inverse. Returns false on a singular basis.
    fn refactor(&mut self) -> bool {
        let m = self.m;
        self.since_refactor = 0;
        if m == 0 {
            self.binv.clear();
            return true;
        }
        let mut a = vec![0.0; m * m];
        for (k, &j) in self.head.iter().enumerate() {
            for &(i, v) in &self.cols[j] {
                a[i * m + k] = v;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        // Gauss-Jordan with partial pivoting on A; the result is A^{-1}
        for c in 0..m {
            let p = (c..m).max_by(|&r1, &r2| a[r1 * m + c].abs().total_cmp(&a[r2 * m + c].abs())).unwrap();
            if a[p * m + c].abs() < SINGULAR_TOL {
                return false;
            }
            if p != c {
                for k in 0..m {
                    a.swap(p * m + k, c * m + k);
                    inv.swap(p * m + k, c * m + k);
                }
            }
            let piv = a[c * m + c];
            for k in 0..m {
                a[c * m + k] /= piv;
                inv[c * m + k] /= piv;
            }
            for r in 0..m {
                if r == c {
                    continue;
                }
                let f = a[r * m + c];
                if f != 0.0 {
                    for k in 0..m {
                        a[r * m + k] -= f * a[c * m + k];
                        inv[r * m + k] -= f * inv[c * m + k];
                    }
                }
            }
        }
        self.binv = inv;
        true
    }

    /// x_B = -B^{-1} N x_N.
    fn recompute_primal(&mut self) {
        let m = self.m;
        let mut rhs = vec![0.0; m];
        for j in 0..self.n + self.m {
            if self.status[j] != VarStatus::Basic {
                let v = self.nonbasic_value(j);
                self.x[j] = v;
                if v != 0.0 {
                    for &(i, a) in &self.cols[j] {
                        rhs[i] -= a * v;
                    }
                }
            }
        }
        for k in 0..m {
            let row = &self.binv[k * m..(k + 1) * m];
            self.x[self.head[k]] = row.iter().zip(&rhs).map(|(b, r)| b * r).sum();
        }
    }

    fn infeasibility(&self, j: usize) -> f64 {
        if self.x[j] < self.lo[j] - self.tol_feas {
            self.lo[j] - self.x[j]
        } else if self.x[j] > self.hi[j] + self.tol_feas {
            self.x[j] - self.hi[j]
        } else {
            0.0
        }
    }

    fn phase_costs(&self, phase: &Phase) -> Vec<f64> {
        self.head
            .iter()
            .map(|&j| match phase {
                Phase::Two => self.cost[j],
                Phase::One => {
                    if self.x[j] < self.lo[j] - self.tol_feas {
                        -1.0
                    } else if self.x[j] > self.hi[j] + self.tol_feas {
                        1.0
                    } else {
                        0.0
                    }
                }
            })
            .collect()
    }

    /// y = c_B B^{-1}.
    fn duals(&self, cb: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (k, &c) in cb.iter().enumerate() {
            if c != 0.0 {
                for (yr, b) in y.iter_mut().zip(&self.binv[k * m..(k + 1) * m]) {
                    *yr += c * b;
                }
            }
        }
        y
    }

    fn reduced_cost(&self, j: usize, y: &[f64], phase: &Phase) -> f64 {
        let c = match phase {
            Phase::One => 0.0,
            Phase::Two => self.cost[j],
        };
        c - self.cols[j].iter().map(|&(i, a)| y[i] * a).sum::<f64>()
    }

    /// Entering variable and direction (+1 increase, -1 decrease).
    fn choose_entering(&self, y: &[f64], phase: &Phase, bland: bool, tol: f64) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.n + self.m {
            let dir = match self.status[j] {
                VarStatus::Basic => continue,
                VarStatus::AtLower if self.lo[j] == self.hi[j] => continue,
                VarStatus::AtUpper if self.lo[j] == self.hi[j] => continue,
                _ => {
                    let d = self.reduced_cost(j, y, phase);
                    match self.status[j] {
                        VarStatus::AtLower if d < -tol => 1.0,
                        VarStatus::AtUpper if d > tol => -1.0,
                        VarStatus::Free if d.abs() > tol => -d.signum(),
                        _ => continue,
                    }
                }
            };
            let score = self.reduced_cost(j, y, phase).abs();
            if bland {
                return Some((j, dir));
            }
            if best.is_none_or(|(_, _, s)| score > s) {
                best = Some((j, dir, score));
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    /// alpha = B^{-1} A_j.
    fn column(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        let mut alpha = vec![0.0; m];
        for &(i, a) in &self.cols[j] {
            for (k, al) in alpha.iter_mut().enumerate() {
                *al += self.binv[k * m + i] * a;
            }
        }
        alpha
    }

    /// Step length and outcome for moving entering `j` in direction `dir`.
    fn ratio_test(&self, j: usize, dir: f64, alpha: &[f64], bland: bool) -> (f64, Step) {
        let tol = if bland { 0.0 } else { self.tol_feas };
        // per basis position: exact ratio and relaxed ratio
        let mut cands: Vec<(usize, f64, f64)> = Vec::new();
        for (k, &a) in alpha.iter().enumerate() {
            if a.abs() <= PIVOT_TOL {
                continue;
            }
            let b = self.head[k];
            let delta = -dir * a;
            let xb = self.x[b];
            let (target, relaxed) = if xb < self.lo[b] - self.tol_feas {
                // below: blocks only when it reaches its lower bound
                if delta > 0.0 {
                    (self.lo[b], self.lo[b])
                } else {
                    continue;
                }
            } else if xb > self.hi[b] + self.tol_feas {
                if delta < 0.0 {
                    (self.hi[b], self.hi[b])
                } else {
                    continue;
                }
            } else if delta < 0.0 {
                if !self.lo[b].is_finite() {
                    continue;
                }
                (self.lo[b], self.lo[b] - tol)
            } else {
                if !self.hi[b].is_finite() {
                    continue;
                }
                (self.hi[b], self.hi[b] + tol)
            };
            let exact = ((target - xb) / delta).max(0.0);
            let loose = ((relaxed - xb) / delta).max(0.0);
            cands.push((k, exact, loose));
        }
        let range = self.hi[j] - self.lo[j];
        let Some(theta_max) = cands.iter().map(|c| c.2).min_by(f64::total_cmp) else {
            return if range.is_finite() { (range, Step::Flip) } else { (f64::INFINITY, Step::Unbounded) };
        };
        let chosen = if bland {
            let min = cands.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
            cands.iter().filter(|c| c.1 <= min).min_by_key(|c| self.head[c.0]).unwrap()
        } else {
            cands
                .iter()
                .filter(|c| c.1 <= theta_max)
                .max_by(|a, b| alpha[a.0].abs().total_cmp(&alpha[b.0].abs()))
                .unwrap()
        };
        if range.is_finite() && range <= chosen.1 {
            return (range, Step::Flip);
        }
        (chosen.1, Step::Pivot(chosen.0))
    }

    fn pivot(&mut self, p: usize, alpha: &[f64], entering: usize) {
        let m = self.m;
        let ap = alpha[p];
        for v in &mut self.binv[p * m..(p + 1) * m] {
            *v /= ap;
        }
        let prow: Vec<f64> = self.binv[p * m..(p + 1) * m].to_vec();
        for (k, &a) in alpha.iter().enumerate() {
            if k != p && a != 0.0 {
                for (v, pr) in self.binv[k * m..(k + 1) * m].iter_mut().zip(&prow) {
                    *v -= a * pr;
                }
            }
        }
        self.head[p] = entering;
        self.since_refactor += 1;
    }

    fn run(&mut self) -> LpSolution {
        let mut iterations = 0;
        let mut degenerate = 0;
        let mut bland = false;
        let bland_after = 10 * (self.m + self.n);
        let mut final_checks = 0;
        loop {
            let infeasible = self.head.iter().any(|&j| self.infeasibility(j) > 0.0);
            let phase = if infeasible { Phase::One } else { Phase::Two };
            let cb = self.phase_costs(&phase);
            let y = self.duals(&cb);
            let tol = match phase {
                Phase::One => 1e-9,
                Phase::Two => self.tol_dual,
            };
            let Some((j, dir)) = self.choose_entering(&y, &phase, bland, tol) else {
                // confirm on a fresh factorization before stopping
                if self.since_refactor > 0 && final_checks < 3 {
                    final_checks += 1;
                    if !self.refactor() {
                        return self.finish(LpStatus::NumericalFailure, iterations, "singular basis".into());
                    }
                    self.recompute_primal();
                    continue;
                }
                return match phase {
                    Phase::One => self.finish(LpStatus::Infeasible, iterations, String::new()),
                    Phase::Two => self.finish(LpStatus::Optimal, iterations, String::new()),
                };
            };
            if iterations >= self.max_iterations {
                return self.finish(LpStatus::IterationLimit, iterations, format!("{iterations} iterations"));
            }
            iterations += 1;
            let alpha = self.column(j);
            let (t, step) = self.ratio_test(j, dir, &alpha, bland);
            match step {
                Step::Unbounded => {
                    return match phase {
                        Phase::Two => self.finish(LpStatus::Unbounded, iterations, String::new()),
                        Phase::One => self.finish(LpStatus::NumericalFailure, iterations, "unbounded phase one".into()),
                    };
                }
                Step::Flip => {
                    self.status[j] = if dir > 0.0 { VarStatus::AtUpper } else { VarStatus::AtLower };
                    self.x[j] = self.nonbasic_value(j);
                    for (k, &a) in alpha.iter().enumerate() {
                        self.x[self.head[k]] -= dir * t * a;
                    }
                }
                Step::Pivot(p) => {
                    let leaving = self.head[p];
                    let was_above = self.x[leaving] > self.hi[leaving] + self.tol_feas;
                    let was_below = self.x[leaving] < self.lo[leaving] - self.tol_feas;
                    let entering_value = self.x[j] + dir * t;
                    for (k, &a) in alpha.iter().enumerate() {
                        self.x[self.head[k]] -= dir * t * a;
                    }
                    let decreasing = -dir * alpha[p] < 0.0;
                    // the leaving variable sits on the bound it reached
                    self.status[leaving] = match (decreasing, was_above, was_below) {
                        (true, true, _) => VarStatus::AtUpper,
                        (true, false, _) => VarStatus::AtLower,
                        (false, _, true) => VarStatus::AtLower,
                        (false, _, false) => VarStatus::AtUpper,
                    };
                    self.x[leaving] = self.nonbasic_value(leaving);
                    self.status[j] = VarStatus::Basic;
                    self.x[j] = entering_value;
                    self.pivot(p, &alpha, j);
                    if self.since_refactor >= self.refactor_every {
                        if !self.refactor() {
                            return self.finish(LpStatus::NumericalFailure, iterations, "singular basis".into());
                        }
                        self.recompute_primal();
                    }
                }
            }
            if t <= 1e-12 {
                degenerate += 1;
                if degenerate > bland_after {
                    bland = true;
                }
            } else {
                degenerate = 0;
            }
            final_checks = 0;
        }
    }

    fn finish(&mut self, status: LpStatus, iterations: usize, message: String) -> LpSolution {
        let phase = Phase::Two;
        let y = self.duals(&self.phase_costs(&phase));
        let reduced_costs = (0..self.n)
            .map(|j| if self.status[j] == VarStatus::Basic { 0.0 } else { self.reduced_cost(j, &y, &phase) })
            .collect();
        let x = self.x[..self.n].to_vec();
        LpSolution {
            status,
            objective: self.lp.objective_of(&x),
            x,
            duals: y,
            reduced_costs,
            basis: Basis { vars: self.status[..self.n].to_vec(), rows: self.status[self.n..].to_vec() },
            iterations,
            cold_fallback: false,
            message,
        }
    }
}
