//! Dense two-phase simplex and the polygonal encoding of `|w| ≤ b`.
//!
//! Programs are small and dense (a few hundred rows, a few thousand columns),
//! so the solver is a revised simplex with an explicit basis inverse that is
//! recomputed from the original columns every 50 pivots and at every phase
//! boundary. Pivoting is deterministic: Dantzig pricing with lowest-index
//! tie-breaking and a two-pass Harris ratio test, switching to Bland's rule
//! after `5·(rows+cols)` pivots in a phase.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::rng::Lcg64;
use crate::{Error, Result};

pub const PIVOT_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-9;
const TIE_TOL: f64 = 1e-12;
const FEAS_TOL: f64 = 1e-9;
const PERTURB: f64 = 1e-7;
const PERTURB_SEED: u64 = 0x5eed;
pub const MAX_PIVOTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
}

#[derive(Debug, Clone)]
pub struct LinearConstraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `minimize objective·x` subject to the constraints and per-variable bounds.
/// Variables are free unless bounded.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<LinearConstraint>,
    pub lower: Vec<Option<f64>>,
    pub upper: Vec<Option<f64>>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            objective,
            constraints: Vec::new(),
            lower: vec![None; n],
            upper: vec![None; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_le(&mut self, coeffs: Vec<f64>, rhs: f64) {
        self.constraints.push(LinearConstraint {
            coeffs,
            relation: Relation::Le,
            rhs,
        });
    }

    pub fn add_ge(&mut self, coeffs: Vec<f64>, rhs: f64) {
        self.add_le(coeffs.into_iter().map(|v| -v).collect(), -rhs);
    }

    pub fn add_eq(&mut self, coeffs: Vec<f64>, rhs: f64) {
        self.constraints.push(LinearConstraint {
            coeffs,
            relation: Relation::Eq,
            rhs,
        });
    }

    pub fn set_bounds(&mut self, var: usize, lower: Option<f64>, upper: Option<f64>) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub fn nonnegative(&mut self, var: usize) {
        self.set_bounds(var, Some(0.0), None);
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::InvalidRequest(
                "bound vectors do not match variable count".into(),
            ));
        }
        if self.objective.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidRequest(
                "non-finite objective coefficient".into(),
            ));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(Error::InvalidRequest(format!(
                    "constraint {i} has {} coefficients, expected {n}",
                    c.coeffs.len()
                )));
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidRequest(format!(
                    "constraint {i} has non-finite entries"
                )));
            }
        }
        for j in 0..n {
            if let (Some(l), Some(u)) = (self.lower[j], self.upper[j]) {
                if !l.is_finite() || !u.is_finite() {
                    return Err(Error::InvalidRequest(format!(
                        "variable {j} has non-finite bounds"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Plain-text dump, one constraint per line.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let fmt_row = |coeffs: &[f64]| {
            let mut out = String::new();
            for (j, v) in coeffs.iter().enumerate() {
                if *v != 0.0 {
                    let _ = write!(out, " {v:+.17e}*x{j}");
                }
            }
            if out.is_empty() {
                out.push_str(" 0");
            }
            out
        };
        let _ = writeln!(s, "minimize{}", fmt_row(&self.objective));
        for (i, c) in self.constraints.iter().enumerate() {
            let rel = match c.relation {
                Relation::Le => "<=",
                Relation::Eq => "=",
            };
            let _ = writeln!(s, "c{i}:{} {rel} {:.17e}", fmt_row(&c.coeffs), c.rhs);
        }
        for j in 0..self.num_vars() {
            match (self.lower[j], self.upper[j]) {
                (None, None) => {}
                (l, u) => {
                    let l = l.map_or("-inf".to_string(), |v| format!("{v:.17e}"));
                    let u = u.map_or("+inf".to_string(), |v| format!("{v:.17e}"));
                    let _ = writeln!(s, "bound x{j}: {l} <= x{j} <= {u}");
                }
            }
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    /// Largest violation of any constraint or bound by `x`.
    pub max_violation: f64,
    /// Multipliers `π` with reduced costs `c − Aᵀπ ≥ 0` at optimality
    /// (`π_i ≤ 0` for `≤` rows). Empty unless optimal.
    pub duals: Vec<f64>,
    pub pivots: usize,
}

#[derive(Debug, Clone, Copy)]
enum VarMap {
    Shift { col: usize, lo: f64 },
    Neg { col: usize, hi: f64 },
    Split { pos: usize, neg: usize },
}

/// Revised simplex state over the standard form `A y = b, y ≥ 0`, with an
/// explicit basis inverse refreshed from `A` every `REFACTOR_EVERY` pivots.
struct Revised {
    m: usize,
    ncols: usize,
    /// Column-major `m × ncols`.
    a: Vec<f64>,
    b: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    /// Row-major `m × m`.
    binv: Vec<f64>,
    xb: Vec<f64>,
    since_refactor: usize,
}

const REFACTOR_EVERY: usize = 50;
const PAR_THRESHOLD: usize = 200_000;

impl Revised {
    fn col(&self, j: usize) -> &[f64] {
        &self.a[j * self.m..(j + 1) * self.m]
    }

    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        let bmat = DMatrix::from_fn(m, m, |i, k| self.a[self.basis[k] * m + i]);
        let inv = bmat
            .try_inverse()
            .ok_or_else(|| Error::Invariant("simplex basis became singular".into()))?;
        for i in 0..m {
            for k in 0..m {
                self.binv[i * m + k] = inv[(i, k)];
            }
        }
        for i in 0..m {
            self.xb[i] = (0..m).map(|k| self.binv[i * m + k] * self.b[k]).sum();
        }
        self.since_refactor = 0;
        Ok(())
    }

    /// `π = c_Bᵀ B⁻¹`.
    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut pi = vec![0.0; m];
        for k in 0..m {
            let cb = cost[self.basis[k]];
            if cb != 0.0 {
                let row = &self.binv[k * m..(k + 1) * m];
                for (p, v) in pi.iter_mut().zip(row) {
                    *p += cb * v;
                }
            }
        }
        pi
    }

    fn reduced_costs(&self, cost: &[f64], pi: &[f64]) -> Vec<f64> {
        let m = self.m;
        let rc = |(j, col): (usize, &[f64])| -> f64 {
            if self.is_basic[j] {
                0.0
            } else {
                cost[j] - col.iter().zip(pi).map(|(a, p)| a * p).sum::<f64>()
            }
        };
        if m * self.ncols >= PAR_THRESHOLD {
            self.a.par_chunks(m).enumerate().map(rc).collect()
        } else {
            self.a.chunks(m).enumerate().map(rc).collect()
        }
    }

    /// `B⁻¹ a_j`.
    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        let col = self.col(j);
        (0..m)
            .map(|i| {
                self.binv[i * m..(i + 1) * m]
                    .iter()
                    .zip(col)
                    .map(|(p, q)| p * q)
                    .sum()
            })
            .collect()
    }

    fn pivot(&mut self, r: usize, q: usize, alpha: &[f64]) -> Result<()> {
        let m = self.m;
        let p = alpha[r];
        let theta = self.xb[r] / p;
        for i in 0..m {
            if i != r {
                self.xb[i] -= theta * alpha[i];
            }
        }
        self.xb[r] = theta;
        {
            let row = &mut self.binv[r * m..(r + 1) * m];
            for v in row.iter_mut() {
                *v /= p;
            }
        }
        let prow: Vec<f64> = self.binv[r * m..(r + 1) * m].to_vec();
        for i in 0..m {
            let f = alpha[i];
            if i != r && f != 0.0 {
                let row = &mut self.binv[i * m..(i + 1) * m];
                for (v, s) in row.iter_mut().zip(&prow) {
                    *v -= f * s;
                }
            }
        }
        self.is_basic[self.basis[r]] = false;
        self.is_basic[q] = true;
        self.basis[r] = q;
        self.since_refactor += 1;
        if self.since_refactor >= REFACTOR_EVERY {
            self.refactor()?;
        }
        Ok(())
    }

    /// Shifts `b` so that every non-artificial basic value grows by a
    /// distinct amount in `(scale, 2·scale]`.
    fn perturb(&mut self, allowed: usize, scale: f64) {
        let m = self.m;
        let mut g = Lcg64::new(PERTURB_SEED);
        for i in 0..m {
            let j = self.basis[i];
            let delta = if j >= allowed {
                0.0
            } else {
                scale * (1.0 + g.next_f64_open0())
            };
            if delta != 0.0 {
                for k in 0..m {
                    self.b[k] += self.a[j * m + k] * delta;
                }
            }
        }
    }

    /// Runs one phase; `Ok(false)` signals an unbounded ray.
    fn run(&mut self, cost: &[f64], allowed: usize, pivots: &mut usize) -> Result<bool> {
        let bland_after = 5 * (self.m + self.ncols);
        let mut local = 0usize;
        loop {
            if *pivots >= MAX_PIVOTS {
                return Err(Error::IterationLimit(*pivots));
            }
            let pi = self.duals(cost);
            let d = self.reduced_costs(cost, &pi);
            let bland = local >= bland_after;
            let mut enter = None;
            let mut best = -OPT_TOL;
            for (j, &v) in d.iter().enumerate().take(allowed) {
                if self.is_basic[j] {
                    continue;
                }
                if bland {
                    if v < -OPT_TOL {
                        enter = Some(j);
                        break;
                    }
                } else if v < best - TIE_TOL {
                    best = v;
                    enter = Some(j);
                }
            }
            let Some(q) = enter else { return Ok(true) };
            let alpha = self.ftran(q);
            // artificials left basic at zero after phase one must stay at zero
            let tol = pivot_tol(&alpha);
            let stuck = (0..self.m)
                .filter(|&i| self.basis[i] >= allowed && alpha[i].abs() > tol)
                .max_by(|&a, &b| alpha[a].abs().total_cmp(&alpha[b].abs()).then(b.cmp(&a)));
            let leave = if stuck.is_some() {
                stuck
            } else if bland {
                self.ratio_bland(&alpha)
            } else {
                self.ratio_harris(&alpha)
            };
            let Some(r) = leave else { return Ok(false) };
            self.pivot(r, q, &alpha)?;
            *pivots += 1;
            local += 1;
        }
    }

    fn ratio_bland(&self, alpha: &[f64]) -> Option<usize> {
        let tol = pivot_tol(alpha);
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for (i, &a) in alpha.iter().enumerate() {
            if a > tol {
                let ratio = self.xb[i].max(0.0) / a;
                let tol = TIE_TOL * (1.0 + best.abs().min(1e300));
                let better = match leave {
                    None => true,
                    Some(l) => {
                        ratio < best - tol || (ratio <= best + tol && self.basis[i] < self.basis[l])
                    }
                };
                if better {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        leave
    }

    /// Two-pass Harris test: the largest pivot among rows whose ratio is
    /// within the feasibility tolerance of the minimum.
    fn ratio_harris(&self, alpha: &[f64]) -> Option<usize> {
        let tol = pivot_tol(alpha);
        let mut bound = f64::INFINITY;
        for (i, &a) in alpha.iter().enumerate() {
            if a > tol {
                bound = bound.min((self.xb[i].max(0.0) + FEAS_TOL) / a);
            }
        }
        if !bound.is_finite() {
            return None;
        }
        let mut leave: Option<usize> = None;
        for (i, &a) in alpha.iter().enumerate() {
            if a > tol && self.xb[i].max(0.0) / a <= bound {
                let better = match leave {
                    None => true,
                    Some(l) => a > alpha[l] || (a == alpha[l] && self.basis[i] < self.basis[l]),
                };
                if better {
                    leave = Some(i);
                }
            }
        }
        leave
    }
}

/// Pivot threshold `1e−9`, relative to the largest entry of the column once
/// that exceeds one.
fn pivot_tol(alpha: &[f64]) -> f64 {
    PIVOT_TOL * alpha.iter().fold(1.0f64, |m, a| m.max(a.abs()))
}

pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let n = lp.num_vars();

    // standard form: min c·y, A y (+ slack) = b, y ≥ 0
    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0usize;
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();
    for j in 0..n {
        match (lp.lower[j], lp.upper[j]) {
            (Some(lo), hi) => {
                maps.push(VarMap::Shift { col: ncols, lo });
                if let Some(hi) = hi {
                    bound_rows.push((ncols, hi - lo));
                }
                ncols += 1;
            }
            (None, Some(hi)) => {
                maps.push(VarMap::Neg { col: ncols, hi });
                ncols += 1;
            }
            (None, None) => {
                maps.push(VarMap::Split {
                    pos: ncols,
                    neg: ncols + 1,
                });
                ncols += 2;
            }
        }
    }
    let nstruct = ncols;
    let mut cost = vec![0.0; nstruct];
    for j in 0..n {
        let c = lp.objective[j];
        match maps[j] {
            VarMap::Shift { col, .. } => cost[col] += c,
            VarMap::Neg { col, .. } => cost[col] -= c,
            VarMap::Split { pos, neg } => {
                cost[pos] += c;
                cost[neg] -= c;
            }
        }
    }

    struct Row {
        coeffs: Vec<(usize, f64)>,
        rhs: f64,
        le: bool,
    }
    let mut rows: Vec<Row> = Vec::with_capacity(lp.constraints.len() + bound_rows.len());
    for c in &lp.constraints {
        let mut coeffs = Vec::new();
        let mut rhs = c.rhs;
        for (j, &a) in c.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            match maps[j] {
                VarMap::Shift { col, lo } => {
                    coeffs.push((col, a));
                    rhs -= a * lo;
                }
                VarMap::Neg { col, hi } => {
                    coeffs.push((col, -a));
                    rhs -= a * hi;
                }
                VarMap::Split { pos, neg } => {
                    coeffs.push((pos, a));
                    coeffs.push((neg, -a));
                }
            }
        }
        rows.push(Row {
            coeffs,
            rhs,
            le: c.relation == Relation::Le,
        });
    }
    for &(col, ub) in &bound_rows {
        rows.push(Row {
            coeffs: vec![(col, 1.0)],
            rhs: ub,
            le: true,
        });
    }

    let m = rows.len();
    if m == 0 {
        // only sign constraints on the standard variables remain
        if cost.iter().any(|&c| c < 0.0) {
            return Ok(unbounded(n, 0));
        }
        let x = maps
            .iter()
            .map(|mp| match *mp {
                VarMap::Shift { lo, .. } => lo,
                VarMap::Neg { hi, .. } => hi,
                VarMap::Split { .. } => 0.0,
            })
            .collect::<Vec<_>>();
        let objective = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        return Ok(LpSolution {
            status: LpStatus::Optimal,
            max_violation: max_violation(lp, &x),
            x,
            objective,
            duals: Vec::new(),
            pivots: 0,
        });
    }
    let nslack = rows.iter().filter(|r| r.le).count();
    let mut sign = vec![1.0; m];
    let mut needs_art = vec![false; m];
    for (i, r) in rows.iter().enumerate() {
        if r.rhs < 0.0 {
            sign[i] = -1.0;
        }
        needs_art[i] = !r.le || r.rhs < 0.0;
    }
    let nart = needs_art.iter().filter(|&&a| a).count();
    let total = nstruct + nslack + nart;
    let art_start = nstruct + nslack;
    let mut a = vec![0.0; total * m];
    let mut b = vec![0.0; m];
    let mut basis = vec![0usize; m];
    let mut slack_col = nstruct;
    let mut art_col = art_start;
    for (i, r) in rows.iter().enumerate() {
        let s = sign[i];
        for &(c, v) in &r.coeffs {
            a[c * m + i] += s * v;
        }
        b[i] = s * r.rhs;
        if r.le {
            a[slack_col * m + i] = s;
            if !needs_art[i] {
                basis[i] = slack_col;
            }
            slack_col += 1;
        }
        if needs_art[i] {
            a[art_col * m + i] = 1.0;
            basis[i] = art_col;
            art_col += 1;
        }
    }
    let mut full_cost = cost.clone();
    full_cost.resize(total, 0.0);
    let mut is_basic = vec![false; total];
    for &j in &basis {
        is_basic[j] = true;
    }
    let mut rs = Revised {
        m,
        ncols: total,
        a,
        b,
        basis,
        is_basic,
        binv: vec![0.0; m * m],
        xb: vec![0.0; m],
        since_refactor: 0,
    };
    rs.refactor()?;
    let mut pivots = 0usize;
    let rhs_scale = 1.0 + rows.iter().map(|r| r.rhs.abs()).fold(0.0, f64::max);

    if nart > 0 {
        let mut phase1 = vec![0.0; total];
        phase1[art_start..].iter_mut().for_each(|v| *v = 1.0);
        rs.run(&phase1, total, &mut pivots)?;
        rs.refactor()?;
        let infeas: f64 = (0..m)
            .filter(|&k| rs.basis[k] >= art_start)
            .map(|k| rs.xb[k])
            .sum();
        if infeas > 1e-9 * rhs_scale {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: vec![f64::NAN; n],
                objective: f64::NAN,
                max_violation: f64::NAN,
                duals: Vec::new(),
                pivots,
            });
        }
        // drive remaining artificials out of the basis where possible
        for r in 0..m {
            if rs.basis[r] < art_start {
                continue;
            }
            let row = rs.binv[r * m..(r + 1) * m].to_vec();
            let mut best: Option<(usize, f64)> = None;
            for j in 0..art_start {
                if rs.is_basic[j] {
                    continue;
                }
                let v: f64 = rs
                    .col(j)
                    .iter()
                    .zip(&row)
                    .map(|(p, q)| p * q)
                    .sum::<f64>()
                    .abs();
                if v > PIVOT_TOL && best.is_none_or(|(_, bv)| v > bv) {
                    best = Some((j, v));
                }
            }
            if let Some((j, _)) = best {
                let alpha = rs.ftran(j);
                rs.pivot(r, j, &alpha)?;
                pivots += 1;
            }
        }
        rs.refactor()?;
    }
    // perturbing basic values breaks ties in the degenerate phase two;
    // the true right-hand side is restored and the basis re-optimised after
    let exact_b = rs.b.clone();
    rs.perturb(art_start, PERTURB * rhs_scale);
    rs.refactor()?;
    if !rs.run(&full_cost, art_start, &mut pivots)? {
        return Ok(unbounded(n, pivots));
    }
    rs.b = exact_b;
    rs.refactor()?;
    if !rs.run(&full_cost, art_start, &mut pivots)? {
        return Ok(unbounded(n, pivots));
    }
    rs.refactor()?;
    let pi = rs.duals(&full_cost);
    let mut y = vec![0.0; total];
    for k in 0..m {
        y[rs.basis[k]] = rs.xb[k].max(0.0);
    }
    let x: Vec<f64> = maps
        .iter()
        .map(|mp| match *mp {
            VarMap::Shift { col, lo } => lo + y[col],
            VarMap::Neg { col, hi } => hi - y[col],
            VarMap::Split { pos, neg } => y[pos] - y[neg],
        })
        .collect();
    let duals: Vec<f64> = (0..lp.constraints.len()).map(|i| sign[i] * pi[i]).collect();
    let objective = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum::<f64>();
    let max_violation = max_violation(lp, &x);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        objective,
        max_violation,
        duals,
        pivots,
    })
}

fn unbounded(n: usize, pivots: usize) -> LpSolution {
    LpSolution {
        status: LpStatus::Unbounded,
        x: vec![f64::NAN; n],
        objective: f64::NEG_INFINITY,
        max_violation: f64::NAN,
        duals: Vec::new(),
        pivots,
    }
}

fn max_violation(lp: &LinearProgram, x: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for c in &lp.constraints {
        let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
        let v = match c.relation {
            Relation::Le => lhs - c.rhs,
            Relation::Eq => (lhs - c.rhs).abs(),
        };
        worst = worst.max(v);
    }
    for (j, &v) in x.iter().enumerate() {
        if let Some(l) = lp.lower[j] {
            worst = worst.max(l - v);
        }
        if let Some(u) = lp.upper[j] {
            worst = worst.max(v - u);
        }
    }
    worst
}

/// Rotations `e^{−2πik/m}`, `k = 0..m`.
pub fn facet_rotations(m: usize) -> Vec<Complex64> {
    (0..m)
        .map(|k| Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * k as f64 / m as f64))
        .collect()
}

/// `max_k Re(e^{−iθ_k} w)`: the polygonal gauge of `w`, sandwiched between
/// `|w|·cos(π/m)` and `|w|`.
pub fn facet_max(w: Complex64, m: usize) -> f64 {
    facet_rotations(m)
        .into_iter()
        .map(|r| (r * w).re)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `1/cos(π/m)`: worst-case ratio between `|w|` and its facet gauge.
pub fn facet_slack(m: usize) -> f64 {
    1.0 / (std::f64::consts::PI / m as f64).cos()
}

/// Complex affine form `constant + Σ coeff·x_var` over real variables.
#[derive(Debug, Clone)]
pub struct AffineComplexForm {
    pub constant: Complex64,
    pub terms: Vec<(usize, Complex64)>,
}

#[derive(Debug, Clone, Copy)]
pub enum FacetBound {
    Constant(f64),
    Variable(usize),
}

/// Linear constraints `Re(e^{−2πik/m}·expr) ≤ bound`, `k = 0..m`.
///
/// If all hold then `|expr| ≤ bound / cos(π/m)`; conversely `|expr| ≤ bound`
/// implies all hold.
pub fn modulus_facets(
    expr: &AffineComplexForm,
    bound: FacetBound,
    m: usize,
    num_vars: usize,
) -> Result<Vec<LinearConstraint>> {
    if m < 4 || !m.is_multiple_of(2) {
        return Err(Error::InvalidRequest(format!(
            "facet count must be even and >= 4, got {m}"
        )));
    }
    let mut out = Vec::with_capacity(m);
    for rot in facet_rotations(m) {
        let mut coeffs = vec![0.0; num_vars];
        for &(j, v) in &expr.terms {
            coeffs[j] += (rot * v).re;
        }
        let mut rhs = -(rot * expr.constant).re;
        match bound {
            FacetBound::Constant(b) => rhs += b,
            FacetBound::Variable(j) => coeffs[j] -= 1.0,
        }
        out.push(LinearConstraint {
            coeffs,
            relation: Relation::Le,
            rhs,
        });
    }
    Ok(out)
}
