//! Polynomials small on `L` and close to a target on `K`.
//!
//! Every request is the discretised minimax program
//!
//! ```text
//! minimize t  subject to
//!   w_i · Re(e^{−iθ_k} (Q(z_i) − g(z_i))) ≤ t          z_i ∈ K-cloud
//!   Re(e^{−iθ_k} D^ℓ Q(y_j)) ≤ ε_L · cos(π/m)           y_j ∈ L-cloud, ℓ ∈ {0} ∪ F
//! ```
//!
//! over the coefficients of `Q` on the monomials of total degree `M..=d`.
//! The program is solved through its LP dual, whose equality rows are indexed
//! by the real unknowns; the optimal multipliers of those rows are the primal
//! coefficients. Reported errors are always recomputed from `Q` itself.

use num_complex::Complex64;

use crate::convexgeom::{separate, SampleCloud, SeparationCertificate};
use crate::lpsolve::{facet_rotations, facet_slack, solve_lp, LinearProgram, LpStatus};
use crate::multiindex::{monomials_in_degree_range, MultiIndex};
use crate::polynomial::{derivative_factor, power_table, CenteredPolynomial, DerivativeSymbol};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct ApproxRequest {
    pub center: Vec<Complex64>,
    pub scale: Vec<f64>,
    pub k_cloud: SampleCloud,
    pub l_cloud: SampleCloud,
    /// Goal on `K`; the goal on `L` is `0`.
    pub target: CenteredPolynomial,
    pub eps_l: f64,
    pub derivatives: Vec<DerivativeSymbol>,
    pub tail_floor: u32,
    pub degree_budget: u32,
    pub facets: usize,
    /// When set, `tail_block_approx` fails with `BudgetExceeded` above it.
    pub tolerance_k: Option<f64>,
}

impl ApproxRequest {
    pub fn dim(&self) -> usize {
        self.center.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim();
        if n == 0 || self.scale.len() != n {
            return Err(Error::InvalidRequest(
                "centre and scale dimensions differ".into(),
            ));
        }
        if self.scale.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
            return Err(Error::InvalidRequest("scales must be positive".into()));
        }
        if !(self.eps_l > 0.0) {
            return Err(Error::InvalidRequest("eps_L must be positive".into()));
        }
        if self.tail_floor > self.degree_budget {
            return Err(Error::InvalidRequest(format!(
                "tail floor {} exceeds degree budget {}",
                self.tail_floor, self.degree_budget
            )));
        }
        if self.k_cloud.is_empty() || self.l_cloud.is_empty() {
            return Err(Error::InvalidRequest("clouds must be nonempty".into()));
        }
        if self.facets < 4 || !self.facets.is_multiple_of(2) {
            return Err(Error::InvalidRequest(format!(
                "facet count must be even and >= 4, got {}",
                self.facets
            )));
        }
        if self.target.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.target.dim(),
            });
        }
        for p in self.k_cloud.points.iter().chain(&self.l_cloud.points) {
            if p.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: p.len(),
                });
            }
        }
        for l in &self.derivatives {
            if l.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: l.dim(),
                });
            }
        }
        if self
            .k_cloud
            .points
            .iter()
            .any(|p| self.l_cloud.points.contains(p))
        {
            return Err(Error::InvalidRequest("K and L clouds share a point".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct BlockResult {
    pub q: CenteredPolynomial,
    /// `max |Q − P|` over the K-cloud.
    pub achieved_k: f64,
    /// `max |Q|` over the L-cloud.
    pub achieved_l: f64,
    /// `max |D^ℓ Q|` over the L-cloud for each requested `ℓ`.
    pub achieved_derivatives: Vec<(DerivativeSymbol, f64)>,
    pub lp_status: LpStatus,
    /// Optimal `t` of the discretised program.
    pub lp_objective: f64,
    /// `1/cos(π/m)`.
    pub facet_slack: f64,
    pub pivots: usize,
}

/// A lifted block `Q = φ^M · R` with `φ = ⟨ℓ, z − ζ⟩/γ`.
#[derive(Debug, Clone)]
pub struct LiftResult {
    pub block: BlockResult,
    pub gamma: f64,
    pub rho: f64,
    /// `(γ/ρ′)^M`, infinite when `ρ′ = 0`.
    pub attenuation: f64,
    /// Weighted objective of the inner fit of `g/φ^M`.
    pub inner_error: f64,
    pub inner: CenteredPolynomial,
}

struct Minimax<'a> {
    center: &'a [Complex64],
    scale: &'a [f64],
    basis: Vec<MultiIndex>,
    k_points: &'a [Vec<Complex64>],
    k_values: Vec<Complex64>,
    k_weights: Vec<f64>,
    l_points: &'a [Vec<Complex64>],
    /// `None` drops every L constraint.
    l_bound: Option<f64>,
    derivatives: &'a [DerivativeSymbol],
    facets: usize,
}

struct MinimaxSolution {
    coeffs: Vec<Complex64>,
    objective: f64,
    status: LpStatus,
    pivots: usize,
}

impl Minimax<'_> {
    fn local(&self, z: &[Complex64]) -> Vec<Complex64> {
        z.iter()
            .zip(self.center)
            .zip(self.scale)
            .map(|((z, c), s)| (z - c) / *s)
            .collect()
    }

    fn basis_values(&self, z: &[Complex64], ell: Option<&MultiIndex>) -> Vec<Complex64> {
        let u = self.local(z);
        let maxdeg = self
            .basis
            .iter()
            .map(|b| b.total_degree())
            .max()
            .unwrap_or(0);
        let pw = power_table(&u, maxdeg as usize);
        self.basis
            .iter()
            .map(|nu| match ell {
                None => mono(&pw, nu.components()),
                Some(l) => match nu.checked_sub(l) {
                    None => Complex64::new(0.0, 0.0),
                    Some(rest) => {
                        mono(&pw, rest.components()) * derivative_factor(nu, l, self.scale)
                    }
                },
            })
            .collect()
    }

    /// Rows `(φ, weight, value, bound)` of `Re(r·(Σ c φ − value))·weight ≤ t`
    /// (K rows, `bound = None`) or `Re(r·Σ c φ) ≤ bound` (L rows).
    fn rows(&self) -> Vec<(Vec<Complex64>, f64, Complex64, Option<f64>)> {
        let mut out = Vec::new();
        for (i, z) in self.k_points.iter().enumerate() {
            out.push((
                self.basis_values(z, None),
                self.k_weights[i],
                self.k_values[i],
                None,
            ));
        }
        if let Some(b) = self.l_bound {
            for z in self.l_points {
                out.push((
                    self.basis_values(z, None),
                    1.0,
                    Complex64::new(0.0, 0.0),
                    Some(b),
                ));
                for l in self.derivatives {
                    if l.total_degree() > 0 {
                        out.push((
                            self.basis_values(z, Some(l)),
                            1.0,
                            Complex64::new(0.0, 0.0),
                            Some(b),
                        ));
                    }
                }
            }
        }
        out
    }

    /// Column-scaled, row-normalised evaluation matrix reduced to an
    /// orthonormal basis, and the dual program posed in those coordinates:
    /// `min hᵀy` s.t. `Gᵀy = −e_t`, `y ≥ 0`.
    fn dual_program(&self) -> (LinearProgram, Reduced) {
        let p = self.basis.len();
        let rows = self.rows();
        let rots = facet_rotations(self.facets);
        let cosf = 1.0 / facet_slack(self.facets);
        // L rows are normalised to right-hand side 1; unknowns are scaled by
        // their largest K entry (largest L entry if they vanish on K)
        let row_weight = |w: f64, bound: &Option<f64>| match bound {
            None => w,
            Some(b) => 1.0 / (b * cosf),
        };
        let mut colscale = vec![0.0f64; p];
        let mut l_scale = vec![0.0f64; p];
        for (phi, w, _, bound) in &rows {
            let target = if bound.is_none() {
                &mut colscale
            } else {
                &mut l_scale
            };
            let rw = row_weight(*w, bound);
            for (j, v) in phi.iter().enumerate() {
                target[j] = target[j].max(v.norm() * rw);
            }
        }
        for (s, l) in colscale.iter_mut().zip(&l_scale) {
            if *s == 0.0 {
                *s = if *l > 0.0 { *l } else { 1.0 };
            }
        }
        let mut cols: Vec<Vec<Complex64>> = (0..p)
            .map(|j| {
                rows.iter()
                    .map(|(phi, w, _, bound)| phi[j] * (row_weight(*w, bound) / colscale[j]))
                    .collect()
            })
            .collect();
        let reduced = Reduced::new(&mut cols, colscale);
        let r = reduced.rank();
        let nx = 2 * r + 1;
        let ny = rows.len() * rots.len();
        let mut g_t: Vec<Vec<f64>> = vec![vec![0.0; ny]; nx];
        let mut h = Vec::with_capacity(ny);
        let mut col = 0;
        for (i, (_, w, val, bound)) in rows.iter().enumerate() {
            for rot in &rots {
                for k in 0..r {
                    let rv = rot * reduced.q[k][i];
                    g_t[2 * k][col] = rv.re;
                    g_t[2 * k + 1][col] = -rv.im;
                }
                match bound {
                    None => {
                        g_t[2 * r][col] = -1.0;
                        h.push(w * (rot * val).re);
                    }
                    Some(_) => h.push(1.0),
                }
                col += 1;
            }
        }
        let mut lp = LinearProgram::new(h);
        for (k, row) in g_t.into_iter().enumerate() {
            lp.add_eq(row, if k == 2 * r { -1.0 } else { 0.0 });
        }
        for j in 0..ny {
            lp.nonnegative(j);
        }
        (lp, reduced)
    }

    fn solve(&self) -> Result<MinimaxSolution> {
        let (lp, reduced) = self.dual_program();
        let sol = solve_lp(&lp)?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::Invariant(format!(
                "approximation dual program is {:?}",
                sol.status
            )));
        }
        let y: Vec<Complex64> = (0..reduced.rank())
            .map(|k| Complex64::new(sol.duals[2 * k], sol.duals[2 * k + 1]))
            .collect();
        let coeffs = reduced.coefficients(&y);
        Ok(MinimaxSolution {
            coeffs,
            objective: -sol.objective,
            status: sol.status,
            pivots: sol.pivots,
        })
    }
}

/// Relative threshold below which a remaining column counts as dependent.
const RANK_TOL: f64 = 1e-13;

/// `E[:, perm] ≈ Q R` by norm-pivoted Gram–Schmidt (each column
/// orthogonalised twice); columns whose residual falls below `RANK_TOL`
/// times their own norm are dropped.
struct Reduced {
    /// Orthonormal columns.
    q: Vec<Vec<Complex64>>,
    /// Row `k` holds `R[k][j]` indexed by original column `j`.
    r: Vec<Vec<Complex64>>,
    perm: Vec<usize>,
    colscale: Vec<f64>,
}

impl Reduced {
    fn new(cols: &mut [Vec<Complex64>], colscale: Vec<f64>) -> Self {
        let p = cols.len();
        let cnorm = |v: &[Complex64]| v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let inner = |a: &[Complex64], b: &[Complex64]| {
            a.iter()
                .zip(b)
                .map(|(x, y)| x.conj() * y)
                .sum::<Complex64>()
        };
        let mut remaining: Vec<usize> = (0..p).collect();
        let mut q: Vec<Vec<Complex64>> = Vec::new();
        let mut r: Vec<Vec<Complex64>> = Vec::new();
        let mut perm = Vec::new();
        let orig: Vec<f64> = cols.iter().map(|c| cnorm(c)).collect();
        loop {
            remaining.retain(|&j| cnorm(&cols[j]) > RANK_TOL * orig[j]);
            if remaining.is_empty() {
                break;
            }
            let mut pick = 0;
            let mut best = -1.0;
            for (idx, &j) in remaining.iter().enumerate() {
                let v = cnorm(&cols[j]);
                if v > best {
                    best = v;
                    pick = idx;
                }
            }
            let j = remaining.remove(pick);
            let mut col = std::mem::take(&mut cols[j]);
            for (k, qk) in q.iter().enumerate() {
                let s = inner(qk, &col);
                for (c, v) in col.iter_mut().zip(qk) {
                    *c -= s * v;
                }
                r[k][j] += s;
            }
            let nrm = cnorm(&col);
            if nrm <= RANK_TOL * orig[j] {
                continue;
            }
            col.iter_mut().for_each(|c| *c /= nrm);
            let mut row = vec![Complex64::new(0.0, 0.0); p];
            row[j] = Complex64::new(nrm, 0.0);
            for &i in &remaining {
                let s = inner(&col, &cols[i]);
                for (c, v) in cols[i].iter_mut().zip(&col) {
                    *c -= s * v;
                }
                row[i] = s;
            }
            q.push(col);
            r.push(row);
            perm.push(j);
        }
        Self {
            q,
            r,
            perm,
            colscale,
        }
    }

    fn rank(&self) -> usize {
        self.perm.len()
    }

    /// Monomial coefficients whose values equal `Q y` on the rows.
    fn coefficients(&self, y: &[Complex64]) -> Vec<Complex64> {
        let rk = self.rank();
        let mut c = vec![Complex64::new(0.0, 0.0); self.colscale.len()];
        for l in (0..rk).rev() {
            let mut acc = y[l];
            for m in l + 1..rk {
                acc -= self.r[l][self.perm[m]] * c[self.perm[m]];
            }
            c[self.perm[l]] = acc / self.r[l][self.perm[l]];
        }
        c.iter().zip(&self.colscale).map(|(v, s)| v / *s).collect()
    }
}

fn mono(pw: &[Vec<Complex64>], e: &[u32]) -> Complex64 {
    let mut v = Complex64::new(1.0, 0.0);
    for (k, &ek) in e.iter().enumerate() {
        v *= pw[k][ek as usize];
    }
    v
}

fn sup_abs<'a>(
    points: impl IntoIterator<Item = &'a Vec<Complex64>>,
    f: impl Fn(&[Complex64]) -> Complex64,
) -> f64 {
    points.into_iter().map(|z| f(z).norm()).fold(0.0, f64::max)
}

/// Recompute achieved values; shrink `Q` if roundoff pushed any L bound past
/// `ε_L`.
fn finish(
    req: &ApproxRequest,
    mut q: CenteredPolynomial,
    sol: &MinimaxSolution,
) -> Result<BlockResult> {
    let measure = |q: &CenteredPolynomial| {
        let l = sup_abs(&req.l_cloud.points, |z| q.eval(z));
        let ds: Vec<(DerivativeSymbol, f64)> = req
            .derivatives
            .iter()
            .map(|ell| {
                let dq = q.derivative(ell);
                (ell.clone(), sup_abs(&req.l_cloud.points, |z| dq.eval(z)))
            })
            .collect();
        (l, ds)
    };
    let (mut l, mut ds) = measure(&q);
    let worst = ds.iter().map(|(_, v)| *v).fold(l, f64::max);
    if worst > req.eps_l {
        q = q.scaled(Complex64::new(req.eps_l / worst * (1.0 - 1e-12), 0.0));
        (l, ds) = measure(&q);
    }
    let target = &req.target;
    let achieved_k = sup_abs(&req.k_cloud.points, |z| q.eval(z) - target.eval(z));
    Ok(BlockResult {
        q,
        achieved_k,
        achieved_l: l,
        achieved_derivatives: ds,
        lp_status: sol.status,
        lp_objective: sol.objective,
        facet_slack: facet_slack(req.facets),
        pivots: sol.pivots,
    })
}

fn solve_request(req: &ApproxRequest) -> Result<BlockResult> {
    let basis = monomials_in_degree_range(req.dim(), req.tail_floor, req.degree_budget);
    let mm = Minimax {
        center: &req.center,
        scale: &req.scale,
        basis: basis.clone(),
        k_points: &req.k_cloud.points,
        k_values: req
            .k_cloud
            .points
            .iter()
            .map(|z| req.target.eval(z))
            .collect(),
        k_weights: vec![1.0; req.k_cloud.len()],
        l_points: &req.l_cloud.points,
        l_bound: Some(req.eps_l),
        derivatives: &req.derivatives,
        facets: req.facets,
    };
    let sol = mm.solve()?;
    let q = CenteredPolynomial::from_terms(
        req.center.clone(),
        req.scale.clone(),
        basis.into_iter().zip(sol.coeffs.iter().copied()),
    )?;
    finish(req, q, &sol)
}

/// The discretised dual program of a request, for inspection.
pub fn approx_program(req: &ApproxRequest) -> Result<LinearProgram> {
    req.validate()?;
    let basis = monomials_in_degree_range(req.dim(), req.tail_floor, req.degree_budget);
    let mm = Minimax {
        center: &req.center,
        scale: &req.scale,
        basis,
        k_points: &req.k_cloud.points,
        k_values: req
            .k_cloud
            .points
            .iter()
            .map(|z| req.target.eval(z))
            .collect(),
        k_weights: vec![1.0; req.k_cloud.len()],
        l_points: &req.l_cloud.points,
        l_bound: Some(req.eps_l),
        derivatives: &req.derivatives,
        facets: req.facets,
    };
    Ok(mm.dual_program().0)
}

/// Unrestricted approximation over all degrees `≤ d`.
pub fn okaweil_approx(req: &ApproxRequest) -> Result<BlockResult> {
    req.validate()?;
    if req.tail_floor != 0 || !req.derivatives.is_empty() {
        return Err(Error::InvalidRequest(
            "okaweil_approx takes no tail floor and no derivative set".into(),
        ));
    }
    solve_request(req)
}

/// Approximation by blocks supported on total degrees `M..=d`, optionally
/// with derivative bounds on `L`.
pub fn tail_block_approx(req: &ApproxRequest) -> Result<BlockResult> {
    req.validate()?;
    separate(&req.l_cloud.points, &req.k_cloud.points)?;
    let res = solve_request(req)?;
    if let Some(tol) = req.tolerance_k {
        if res.achieved_k > tol {
            return Err(Error::BudgetExceeded {
                degree: req.degree_budget,
                achieved: res.achieved_k,
                tolerance: tol,
            });
        }
    }
    Ok(res)
}

/// `Q = (⟨ℓ, z − ζ⟩/γ)^M · R` where `R` of degree `≤ inner_budget` fits
/// `g/φ^M` on `K` with weights `|φ^M|`, and is bounded on `L` by
/// `ε_L (γ/ρ′)^M cos(π/m)` so that `Q` is itself feasible for the tail
/// program of the same request. Derivative constraints are not imposed.
pub fn feasible_lift(
    req: &ApproxRequest,
    cert: &SeparationCertificate,
    inner_budget: u32,
) -> Result<LiftResult> {
    req.validate()?;
    let n = req.dim();
    if cert.functional.ell.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: cert.functional.ell.len(),
        });
    }
    let ell = &cert.functional.ell;
    let pair = |z: &[Complex64]| -> Complex64 {
        ell.iter()
            .zip(z)
            .zip(&req.center)
            .map(|((l, z), c)| l * (z - c))
            .sum()
    };
    let gamma = req
        .k_cloud
        .points
        .iter()
        .map(|z| pair(z).re)
        .fold(f64::INFINITY, f64::min);
    if !(gamma > 1e-9) {
        return Err(Error::DegenerateMargin(gamma));
    }
    let l_max_re = req
        .l_cloud
        .points
        .iter()
        .map(|z| pair(z).re)
        .fold(f64::NEG_INFINITY, f64::max);
    if l_max_re >= gamma {
        return Err(Error::Inseparable(
            "certificate does not separate the clouds relative to the centre".into(),
        ));
    }
    let rho = req
        .l_cloud
        .points
        .iter()
        .map(|z| pair(z).norm())
        .fold(0.0, f64::max);
    let m = req.tail_floor;
    let attenuation = if rho == 0.0 {
        f64::INFINITY
    } else {
        (gamma / rho).powi(m as i32)
    };
    let phi = |z: &[Complex64]| (pair(z) / gamma).powu(m);

    let basis = monomials_in_degree_range(n, 0, inner_budget);
    let k_values: Vec<Complex64> = req
        .k_cloud
        .points
        .iter()
        .map(|z| req.target.eval(z) / phi(z))
        .collect();
    let k_weights: Vec<f64> = req.k_cloud.points.iter().map(|z| phi(z).norm()).collect();
    let cosf = 1.0 / facet_slack(req.facets);
    let l_bound = if rho == 0.0 {
        None
    } else {
        Some(req.eps_l * attenuation * cosf)
    };
    let no_derivs: Vec<DerivativeSymbol> = Vec::new();
    let mm = Minimax {
        center: &req.center,
        scale: &req.scale,
        basis: basis.clone(),
        k_points: &req.k_cloud.points,
        k_values,
        k_weights,
        l_points: &req.l_cloud.points,
        l_bound,
        derivatives: &no_derivs,
        facets: req.facets,
    };
    let sol = mm.solve()?;
    let inner = CenteredPolynomial::from_terms(
        req.center.clone(),
        req.scale.clone(),
        basis.into_iter().zip(sol.coeffs.iter().copied()),
    )?;

    // φ in the scaled basis: Σ ℓ_k σ_k u_k / γ
    let mut lin = CenteredPolynomial::zero(req.center.clone(), req.scale.clone());
    for k in 0..n {
        lin.set(MultiIndex::unit(n, k), ell[k] * req.scale[k] / gamma);
    }
    let mut q = inner.clone();
    for _ in 0..m {
        q = q.multiply(&lin)?;
    }
    let inner_error = sol.objective;
    let lifted_req = ApproxRequest {
        derivatives: Vec::new(),
        ..req.clone()
    };
    let block = finish(&lifted_req, q, &sol)?;
    Ok(LiftResult {
        block,
        gamma,
        rho,
        attenuation,
        inner_error,
        inner,
    })
}
