//! Convex bodies and domains in `C^n ≅ R^{2n}`.
//!
//! Bodies are generator hulls (V-representation); domains are finite
//! intersections of open half-spaces (H-representation). Points are realified
//! as `(Re z₁, Im z₁, …, Re zₙ, Im zₙ)`.

use num_complex::Complex64;

use crate::lpsolve::{solve_lp, LinearProgram, LpStatus};
use crate::rng::Lcg64;
use crate::universal::Mode;
use crate::{Error, Result};

pub type Point = Vec<Complex64>;

const MEMBERSHIP_TOL: f64 = 1e-9;
const SAMPLE_CONCENTRATION: f64 = 0.3;

pub fn realify(z: &[Complex64]) -> Vec<f64> {
    z.iter().flat_map(|c| [c.re, c.im]).collect()
}

pub fn complexify(x: &[f64]) -> Point {
    x.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexBody {
    n: usize,
    generators: Vec<Point>,
}

impl ConvexBody {
    pub fn new(generators: Vec<Point>) -> Result<Self> {
        let Some(first) = generators.first() else {
            return Err(Error::InvalidRequest(
                "convex body needs at least one generator".into(),
            ));
        };
        let n = first.len();
        if n == 0 {
            return Err(Error::InvalidRequest("zero-dimensional point".into()));
        }
        for g in &generators {
            if g.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: g.len(),
                });
            }
            if g.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::InvalidRequest("non-finite generator".into()));
            }
        }
        Ok(Self { n, generators })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Point] {
        &self.generators
    }

    pub fn barycenter(&self) -> Point {
        let k = self.generators.len() as f64;
        (0..self.n)
            .map(|i| self.generators.iter().map(|g| g[i]).sum::<Complex64>() / k)
            .collect()
    }

    /// Per-coordinate `max |z_k − c_k|` over the generators.
    pub fn coord_spread(&self, center: &[Complex64]) -> Vec<f64> {
        (0..self.n)
            .map(|k| {
                self.generators
                    .iter()
                    .map(|g| (g[k] - center[k]).norm())
                    .fold(0.0, f64::max)
            })
            .collect()
    }

    /// Convex-combination feasibility of `z` (tolerance `1e−9`).
    pub fn contains(&self, z: &[Complex64]) -> Result<bool> {
        if z.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: z.len(),
            });
        }
        Ok(hull_distance_l1(&self.generators, &realify(z))? <= MEMBERSHIP_TOL)
    }
}

/// `min Σ|Gλ − x|` over convex weights `λ`.
fn hull_distance_l1(generators: &[Point], x: &[f64]) -> Result<f64> {
    let k = generators.len();
    let d = x.len();
    // vars: λ (k), s (d)
    let mut obj = vec![0.0; k + d];
    for v in obj.iter_mut().skip(k) {
        *v = 1.0;
    }
    let mut lp = LinearProgram::new(obj);
    let reals: Vec<Vec<f64>> = generators.iter().map(|g| realify(g)).collect();
    for i in 0..d {
        let mut row = vec![0.0; k + d];
        for (j, g) in reals.iter().enumerate() {
            row[j] = g[i];
        }
        row[k + i] = -1.0;
        lp.add_le(row.clone(), x[i]);
        for v in row.iter_mut().take(k) {
            *v = -*v;
        }
        lp.add_le(row, -x[i]);
    }
    let mut sum = vec![0.0; k + d];
    for v in sum.iter_mut().take(k) {
        *v = 1.0;
    }
    lp.add_eq(sum, 1.0);
    for j in 0..k + d {
        lp.nonnegative(j);
    }
    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.objective.max(0.0)),
        _ => Err(Error::Invariant("hull distance program not optimal".into())),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpace {
    pub u: Vec<f64>,
    pub s: f64,
}

impl HalfSpace {
    pub fn slack(&self, x: &[f64]) -> f64 {
        self.s - dot(&self.u, x)
    }
}

/// Open convex domain `{z : u·ρ(z) < s for every half-space}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexDomain {
    n: usize,
    halfspaces: Vec<HalfSpace>,
    witness: Point,
    bound_radius: Option<f64>,
}

impl ConvexDomain {
    pub fn new(halfspaces: Vec<HalfSpace>, witness: Point) -> Result<Self> {
        let n = witness.len();
        if n == 0 {
            return Err(Error::InvalidRequest("empty witness".into()));
        }
        if halfspaces.is_empty() {
            return Err(Error::InvalidRequest(
                "domain needs at least one half-space".into(),
            ));
        }
        for (i, h) in halfspaces.iter().enumerate() {
            if h.u.len() != 2 * n {
                return Err(Error::DimensionMismatch {
                    expected: 2 * n,
                    got: h.u.len(),
                });
            }
            if norm(&h.u) == 0.0 || !h.s.is_finite() || h.u.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidRequest(format!("degenerate half-space {i}")));
            }
        }
        let w = realify(&witness);
        if let Some(i) = halfspaces.iter().position(|h| h.slack(&w) <= 0.0) {
            return Err(Error::Membership(format!(
                "witness violates half-space {i}"
            )));
        }
        let bound_radius = bounding_radius(&halfspaces, 2 * n)?;
        Ok(Self {
            n,
            halfspaces,
            witness,
            bound_radius,
        })
    }

    /// Polygonal/polytopal inner approximation of the open ball: every
    /// vertex lies on the sphere of the given radius.
    pub fn ball(center: Point, radius: f64, facets: usize) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidRequest("ball radius must be positive".into()));
        }
        let hs = ball_halfspaces(&center, radius, facets)?;
        Self::new(hs, center)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn halfspaces(&self) -> &[HalfSpace] {
        &self.halfspaces
    }

    pub fn witness(&self) -> &[Complex64] {
        &self.witness
    }

    pub fn is_bounded(&self) -> bool {
        self.bound_radius.is_some()
    }

    /// Radius of a Euclidean ball about the origin containing `Ω̄`.
    pub fn bound_radius(&self) -> Option<f64> {
        self.bound_radius
    }

    pub fn contains_open(&self, z: &[Complex64]) -> bool {
        let x = realify(z);
        self.halfspaces.iter().all(|h| h.slack(&x) > 0.0)
    }

    pub fn contains_closure(&self, z: &[Complex64], tol: f64) -> bool {
        let x = realify(z);
        self.halfspaces
            .iter()
            .all(|h| h.slack(&x) >= -tol * (1.0 + h.s.abs()))
    }

    /// Largest `t ≤ 1` such that some point of the body keeps distance `t`
    /// inside every half-space. Positive iff the body meets `Ω`;
    /// nonnegative iff it meets `Ω̄`.
    pub fn body_depth(&self, body: &ConvexBody) -> Result<f64> {
        let k = body.generators().len();
        let mut obj = vec![0.0; k + 1];
        obj[k] = -1.0;
        let mut lp = LinearProgram::new(obj);
        let reals: Vec<Vec<f64>> = body.generators().iter().map(|g| realify(g)).collect();
        for h in &self.halfspaces {
            let mut row: Vec<f64> = reals.iter().map(|g| dot(&h.u, g)).collect();
            row.push(norm(&h.u));
            lp.add_le(row, h.s);
        }
        let mut sum = vec![1.0; k];
        sum.push(0.0);
        lp.add_eq(sum, 1.0);
        for j in 0..k {
            lp.nonnegative(j);
        }
        lp.set_bounds(k, None, Some(1.0));
        let sol = solve_lp(&lp)?;
        match sol.status {
            LpStatus::Optimal => Ok(sol.x[k]),
            _ => Err(Error::Invariant("depth program not optimal".into())),
        }
    }

    pub fn intersects_open(&self, body: &ConvexBody) -> Result<bool> {
        Ok(self.body_depth(body)? > MEMBERSHIP_TOL)
    }

    pub fn intersects_closure(&self, body: &ConvexBody) -> Result<bool> {
        Ok(self.body_depth(body)? >= -MEMBERSHIP_TOL)
    }
}

fn bounding_radius(halfspaces: &[HalfSpace], dim: usize) -> Result<Option<f64>> {
    let mut corner = 0.0;
    for i in 0..dim {
        for sgn in [-1.0, 1.0] {
            let mut obj = vec![0.0; dim];
            obj[i] = -sgn;
            let mut lp = LinearProgram::new(obj);
            for h in halfspaces {
                lp.add_le(h.u.clone(), h.s);
            }
            let sol = solve_lp(&lp)?;
            match sol.status {
                LpStatus::Optimal => corner = f64::max(corner, sol.x[i].abs()),
                LpStatus::Unbounded => return Ok(None),
                LpStatus::Infeasible => {
                    return Err(Error::Invariant("domain half-spaces are infeasible".into()))
                }
            }
        }
    }
    Ok(Some(corner * (dim as f64).sqrt()))
}

/// Unit normals for the ball approximation in `R^{2n}`: for `n = 1` the
/// `f` directions at angles `(2k+1)π/f`; otherwise `±e_i`, then
/// `(±e_i ± e_j)/√2`, then seeded random directions, truncated to `f`.
fn ball_normals(n: usize, facets: usize) -> Vec<Vec<f64>> {
    let dim = 2 * n;
    if n == 1 {
        return (0..facets)
            .map(|k| {
                let a = (2 * k + 1) as f64 * std::f64::consts::PI / facets as f64;
                vec![a.cos(), a.sin()]
            })
            .collect();
    }
    let mut out = Vec::with_capacity(facets);
    for i in 0..dim {
        for sgn in [1.0, -1.0] {
            let mut u = vec![0.0; dim];
            u[i] = sgn;
            out.push(u);
        }
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..dim {
        for j in i + 1..dim {
            for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut u = vec![0.0; dim];
                u[i] = si * r;
                u[j] = sj * r;
                out.push(u);
            }
        }
    }
    let mut g = Lcg64::new(0x6261_6c6c ^ dim as u64);
    while out.len() < facets {
        let mut u: Vec<f64> = (0..dim).map(|_| g.normal()).collect();
        let l = norm(&u);
        if l > 1e-3 {
            u.iter_mut().for_each(|v| *v /= l);
            out.push(u);
        }
    }
    out.truncate(facets);
    out
}

pub fn ball_halfspaces(center: &[Complex64], radius: f64, facets: usize) -> Result<Vec<HalfSpace>> {
    let n = center.len();
    if n == 0 {
        return Err(Error::InvalidRequest("empty centre".into()));
    }
    if facets < 2 * n + 1 {
        return Err(Error::InvalidRequest(format!(
            "{facets} facets cannot bound a ball in C^{n}"
        )));
    }
    let normals = ball_normals(n, facets);
    let unit: Vec<HalfSpace> = normals
        .iter()
        .map(|u| HalfSpace {
            u: u.clone(),
            s: 1.0,
        })
        .collect();
    let verts = polytope_vertices(&unit, 2 * n);
    let vmax = verts.iter().map(|v| norm(v)).fold(0.0, f64::max);
    if vmax == 0.0 {
        return Err(Error::InvalidRequest(
            "ball facet directions do not bound a polytope".into(),
        ));
    }
    let c = realify(center);
    Ok(normals
        .into_iter()
        .map(|u| {
            let s = dot(&u, &c) + radius / vmax;
            HalfSpace { u, s }
        })
        .collect())
}

/// Brute-force vertex enumeration of `{x : u·x ≤ s}` in `R^dim`.
pub fn polytope_vertices(halfspaces: &[HalfSpace], dim: usize) -> Vec<Vec<f64>> {
    let m = halfspaces.len();
    let mut verts: Vec<Vec<f64>> = Vec::new();
    if m < dim {
        return verts;
    }
    let scale = 1.0 + halfspaces.iter().map(|h| h.s.abs()).fold(0.0, f64::max);
    let mut idx: Vec<usize> = (0..dim).collect();
    loop {
        let a = nalgebra::DMatrix::from_fn(dim, dim, |r, c| halfspaces[idx[r]].u[c]);
        let b = nalgebra::DVector::from_fn(dim, |r, _| halfspaces[idx[r]].s);
        let lu = a.lu();
        if lu.determinant().abs() > 1e-12 {
            if let Some(x) = lu.solve(&b) {
                let x: Vec<f64> = x.iter().copied().collect();
                if halfspaces.iter().all(|h| h.slack(&x) >= -1e-9 * scale)
                    && !verts
                        .iter()
                        .any(|v| v.iter().zip(&x).all(|(p, q)| (p - q).abs() <= 1e-9 * scale))
                {
                    verts.push(x);
                }
            }
        }
        // next combination
        let mut i = dim;
        loop {
            if i == 0 {
                return verts;
            }
            i -= 1;
            if idx[i] < m - dim + i {
                idx[i] += 1;
                for j in i + 1..dim {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// `L_N`: margin-shrunk, box-clipped polytope of `Ω` (holo), or `Ω̄` clipped
/// to a polytopal inner approximation of the closed ball of radius `N`
/// (ainfty), returned as the hull of its vertices.
pub fn exhaustion_compact(domain: &ConvexDomain, stage: usize, mode: Mode) -> Result<ConvexBody> {
    if stage == 0 {
        return Err(Error::InvalidRequest("exhaustion stages start at 1".into()));
    }
    let n = domain.dim();
    let dim = 2 * n;
    let margin = match mode {
        Mode::Holo => 1.0 / (stage as f64 + 1.0),
        Mode::AInfty => 0.0,
    };
    let mut hs: Vec<HalfSpace> = domain
        .halfspaces()
        .iter()
        .map(|h| {
            let l = norm(&h.u);
            HalfSpace {
                u: h.u.iter().map(|v| v / l).collect(),
                s: h.s / l - margin,
            }
        })
        .collect();
    let wmax = domain
        .witness()
        .iter()
        .flat_map(|c| [c.re.abs(), c.im.abs()])
        .fold(0.0, f64::max);
    let box_r = stage as f64 + wmax + 1.0;
    for i in 0..dim {
        for sgn in [1.0, -1.0] {
            let mut u = vec![0.0; dim];
            u[i] = sgn;
            hs.push(HalfSpace { u, s: box_r });
        }
    }
    if mode == Mode::AInfty {
        let base = domain.halfspaces().len();
        let facets = (16 * n * stage).min(4 * base).max(2 * dim + 2);
        hs.extend(ball_halfspaces(
            &vec![Complex64::new(0.0, 0.0); n],
            stage as f64,
            facets,
        )?);
    }
    let verts = polytope_vertices(&hs, dim);
    if verts.is_empty() {
        return Err(Error::EmptyExhaustion { stage });
    }
    let points: Vec<Point> = verts.iter().map(|v| complexify(v)).collect();
    for p in &points {
        let inside = match mode {
            Mode::Holo => domain.contains_open(p),
            Mode::AInfty => domain.contains_closure(p, 1e-9),
        };
        if !inside {
            return Err(Error::Invariant(format!(
                "exhaustion vertex at stage {stage} escapes the domain"
            )));
        }
    }
    ConvexBody::new(points)
}

/// `ℓ ∈ C^n` acting by `z ↦ Re⟨ℓ, z⟩`, `⟨ℓ, z⟩ = Σ ℓ_k z_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFunctional {
    pub ell: Vec<Complex64>,
}

impl LinearFunctional {
    pub fn pairing(&self, z: &[Complex64]) -> Complex64 {
        self.ell.iter().zip(z).map(|(a, b)| a * b).sum()
    }

    pub fn eval(&self, z: &[Complex64]) -> f64 {
        self.pairing(z).re
    }

    fn from_real(w: &[f64]) -> Self {
        Self {
            ell: w.chunks(2).map(|p| Complex64::new(p[0], -p[1])).collect(),
        }
    }

    fn to_real(&self) -> Vec<f64> {
        self.ell.iter().flat_map(|c| [c.re, -c.im]).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparationCertificate {
    pub functional: LinearFunctional,
    /// `max Re⟨ℓ, a⟩` over side A.
    pub alpha: f64,
    /// `min Re⟨ℓ, b⟩` over side B.
    pub beta: f64,
    /// Numerator/denominator pairs for `(Re ℓ₁, Im ℓ₁, …)` after rounding.
    pub rational: Option<Vec<(i64, i64)>>,
}

impl SeparationCertificate {
    pub fn margin(&self) -> f64 {
        self.beta - self.alpha
    }

    /// Smallest slack of any point against its side's inequality.
    pub fn verified_margin(&self, a: &[Point], b: &[Point]) -> f64 {
        let fa = a
            .iter()
            .map(|p| self.alpha - self.functional.eval(p))
            .fold(f64::INFINITY, f64::min);
        let fb = b
            .iter()
            .map(|p| self.functional.eval(p) - self.beta)
            .fold(f64::INFINITY, f64::min);
        let half = 0.5 * self.margin();
        fa.min(fb) + half
    }
}

fn check_sets(a: &[Point], b: &[Point]) -> Result<usize> {
    let Some(first) = a.first().or(b.first()) else {
        return Err(Error::InvalidRequest(
            "separation needs nonempty sets".into(),
        ));
    };
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidRequest(
            "separation needs nonempty sets".into(),
        ));
    }
    let n = first.len();
    for p in a.iter().chain(b) {
        if p.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: p.len(),
            });
        }
    }
    Ok(n)
}

/// Strictly separating real-linear functional between the hulls of `a` and
/// `b`, normalised to `β − α = 2`.
pub fn separate(a: &[Point], b: &[Point]) -> Result<SeparationCertificate> {
    let n = check_sets(a, b)?;
    let d = 2 * n;
    // vars: w (d, free), t (d, ≥ 0), α, β
    let nv = 2 * d + 2;
    let (ia, ib) = (2 * d, 2 * d + 1);
    let mut obj = vec![0.0; nv];
    for v in obj.iter_mut().take(2 * d).skip(d) {
        *v = 1.0;
    }
    let mut lp = LinearProgram::new(obj);
    for i in 0..d {
        let mut r = vec![0.0; nv];
        r[i] = 1.0;
        r[d + i] = -1.0;
        lp.add_le(r.clone(), 0.0);
        r[i] = -1.0;
        lp.add_le(r, 0.0);
        lp.nonnegative(d + i);
    }
    for p in a {
        let x = realify(p);
        let mut r = vec![0.0; nv];
        r[..d].copy_from_slice(&x);
        r[ia] = -1.0;
        lp.add_le(r, 0.0);
    }
    for p in b {
        let x = realify(p);
        let mut r = vec![0.0; nv];
        for i in 0..d {
            r[i] = -x[i];
        }
        r[ib] = 1.0;
        lp.add_le(r, 0.0);
    }
    let mut gap = vec![0.0; nv];
    gap[ia] = -1.0;
    gap[ib] = 1.0;
    lp.add_eq(gap, 2.0);
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Inseparable("no separating hyperplane exists".into()));
    }
    let w = sol.x[..d].to_vec();
    let alpha = a
        .iter()
        .map(|p| dot(&w, &realify(p)))
        .fold(f64::NEG_INFINITY, f64::max);
    let beta = b
        .iter()
        .map(|p| dot(&w, &realify(p)))
        .fold(f64::INFINITY, f64::min);
    let wn = norm(&w);
    if !(wn > 0.0) || (beta - alpha) / wn < 1e-9 {
        return Err(Error::Inseparable(format!(
            "geometric margin {:e} below 1e-9",
            (beta - alpha) / wn.max(f64::MIN_POSITIVE)
        )));
    }
    let f = 2.0 / (beta - alpha);
    let w: Vec<f64> = w.iter().map(|v| v * f).collect();
    Ok(SeparationCertificate {
        functional: LinearFunctional::from_real(&w),
        alpha: alpha * f,
        beta: beta * f,
        rational: None,
    })
}

pub fn separate_bodies(a: &ConvexBody, b: &ConvexBody) -> Result<SeparationCertificate> {
    separate(a.generators(), b.generators())
}

/// The separation certificate of two convex compacts, whose existence makes
/// their union polynomially convex (images under the functional are
/// disjoint compact convex subsets of `C`).
pub fn kallin_union_certificate(k1: &ConvexBody, k2: &ConvexBody) -> Result<SeparationCertificate> {
    separate_bodies(k1, k2)
}

/// A point common to both hulls (within `1e−6` in `ℓ¹`), if any.
pub fn intersection_witness(a: &[Point], b: &[Point]) -> Result<Option<Point>> {
    let n = check_sets(a, b)?;
    let d = 2 * n;
    let (ka, kb) = (a.len(), b.len());
    let nv = ka + kb + d;
    let mut obj = vec![0.0; nv];
    for v in obj.iter_mut().skip(ka + kb) {
        *v = 1.0;
    }
    let mut lp = LinearProgram::new(obj);
    let ra: Vec<Vec<f64>> = a.iter().map(|p| realify(p)).collect();
    let rb: Vec<Vec<f64>> = b.iter().map(|p| realify(p)).collect();
    for i in 0..d {
        let mut r = vec![0.0; nv];
        for (j, p) in ra.iter().enumerate() {
            r[j] = p[i];
        }
        for (j, p) in rb.iter().enumerate() {
            r[ka + j] = -p[i];
        }
        r[ka + kb + i] = -1.0;
        lp.add_le(r.clone(), 0.0);
        for v in r.iter_mut().take(ka + kb) {
            *v = -*v;
        }
        lp.add_le(r, 0.0);
    }
    let mut sa = vec![0.0; nv];
    sa[..ka].iter_mut().for_each(|v| *v = 1.0);
    lp.add_eq(sa, 1.0);
    let mut sb = vec![0.0; nv];
    sb[ka..ka + kb].iter_mut().for_each(|v| *v = 1.0);
    lp.add_eq(sb, 1.0);
    for j in 0..nv {
        lp.nonnegative(j);
    }
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal || sol.objective > 1e-6 {
        return Ok(None);
    }
    let mut x = vec![0.0; d];
    for (j, p) in ra.iter().enumerate() {
        for i in 0..d {
            x[i] += sol.x[j] * p[i];
        }
    }
    Ok(Some(complexify(&x)))
}

/// Best rational approximation with denominator at most `max_den`, taken as
/// the last continued-fraction convergent within the bound.
pub fn best_rational(x: f64, max_den: i64) -> (i64, i64) {
    if x == x.trunc() {
        return (x as i64, 1);
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let ai = a as i64;
        let p2 = ai.saturating_mul(p1).saturating_add(p0);
        let q2 = ai.saturating_mul(q1).saturating_add(q0);
        if q2 > max_den || q2 <= 0 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = r - a;
        if frac.abs() < 1e-15 || (p1 as f64 / q1 as f64 - x).abs() <= f64::EPSILON * x.abs() {
            break;
        }
        r = 1.0 / frac;
    }
    if q1 == 0 {
        (x.round() as i64, 1)
    } else {
        (p1, q1)
    }
}

pub const MAX_DENOMINATOR: i64 = 1_000_000;

/// Round every real coordinate of `ℓ` to a rational with denominator at most
/// `10⁶`, keeping at least half of the margin on the given points.
pub fn rationalize(
    cert: &SeparationCertificate,
    a: &[Point],
    b: &[Point],
) -> Result<SeparationCertificate> {
    let margin = cert.margin();
    if !(margin >= 1e-6) {
        return Err(Error::MarginLost);
    }
    let fracs: Vec<(i64, i64)> = cert
        .functional
        .to_real()
        .iter()
        .map(|&v| best_rational(v, MAX_DENOMINATOR))
        .collect();
    let w: Vec<f64> = fracs.iter().map(|&(p, q)| p as f64 / q as f64).collect();
    let alpha = a
        .iter()
        .map(|p| dot(&w, &realify(p)))
        .fold(f64::NEG_INFINITY, f64::max);
    let beta = b
        .iter()
        .map(|p| dot(&w, &realify(p)))
        .fold(f64::INFINITY, f64::min);
    if !(beta - alpha >= 0.5 * margin) {
        return Err(Error::MarginLost);
    }
    Ok(SeparationCertificate {
        functional: LinearFunctional::from_real(&w),
        alpha,
        beta,
        rational: Some(fracs),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointTag {
    Generator,
    Interior,
    Face,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleCloud {
    pub points: Vec<Point>,
    pub tags: Vec<PointTag>,
    pub seed: u64,
}

impl SampleCloud {
    pub fn from_points(points: Vec<Point>) -> Self {
        let tags = vec![PointTag::Generator; points.len()];
        Self {
            points,
            tags,
            seed: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn combine(generators: &[Point], weights: &[f64]) -> Point {
    let n = generators[0].len();
    (0..n)
        .map(|k| generators.iter().zip(weights).map(|(g, w)| g[k] * *w).sum())
        .collect()
}

/// Generators followed by `density` random convex combinations.
///
/// Weights are `u_i^{1/0.3}` with `u_i` uniform on `(0, 1]`, normalised; this
/// concentrates mass on few generators, pushing points toward faces. A point
/// is tagged `Face` when its two largest weights carry at least `0.999` of
/// the mass.
pub fn sample(body: &ConvexBody, density: usize, seed: u64) -> SampleCloud {
    let gens = body.generators();
    let mut points: Vec<Point> = gens.to_vec();
    let mut tags = vec![PointTag::Generator; gens.len()];
    let mut g = Lcg64::new(seed);
    for _ in 0..density {
        let mut w: Vec<f64> = (0..gens.len())
            .map(|_| g.next_f64_open0().powf(1.0 / SAMPLE_CONCENTRATION))
            .collect();
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= total);
        let mut sorted = w.clone();
        sorted.sort_by(|x, y| y.total_cmp(x));
        let top2 = sorted[0] + sorted.get(1).copied().unwrap_or(0.0);
        tags.push(if top2 >= 0.999 {
            PointTag::Face
        } else {
            PointTag::Interior
        });
        points.push(combine(gens, &w));
    }
    SampleCloud { points, tags, seed }
}

/// Verification cloud: generators, jittered stratified points on every
/// segment between two generators (`per_segment` each), and `interior`
/// uniform (Dirichlet(1)) convex combinations.
pub fn stratified_cloud(
    body: &ConvexBody,
    per_segment: usize,
    interior: usize,
    seed: u64,
) -> SampleCloud {
    let gens = body.generators();
    let mut points: Vec<Point> = gens.to_vec();
    let mut tags = vec![PointTag::Generator; gens.len()];
    let mut g = Lcg64::new(seed);
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            for s in 0..per_segment {
                let t = (s as f64 + g.next_f64()) / per_segment as f64;
                points.push(
                    gens[i]
                        .iter()
                        .zip(&gens[j])
                        .map(|(a, b)| a * (1.0 - t) + b * t)
                        .collect(),
                );
                tags.push(PointTag::Face);
            }
        }
    }
    for _ in 0..interior {
        let mut w: Vec<f64> = (0..gens.len()).map(|_| -g.next_f64_open0().ln()).collect();
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= total);
        points.push(combine(gens, &w));
        tags.push(PointTag::Interior);
    }
    SampleCloud { points, tags, seed }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn p1(re: f64) -> Point {
        vec![c(re, 0.0)]
    }

    #[test]
    fn contains_examples() {
        let seg = ConvexBody::new(vec![p1(0.0), p1(1.0)]).unwrap();
        assert!(seg.contains(&p1(0.5)).unwrap());
        assert!(!seg.contains(&p1(2.0)).unwrap());
        let mut g = Lcg64::new(5);
        let pts: Vec<Point> = (0..4)
            .map(|_| {
                vec![
                    c(g.uniform(-1.0, 1.0), g.uniform(-1.0, 1.0)),
                    c(g.uniform(-1.0, 1.0), 0.0),
                ]
            })
            .collect();
        let body = ConvexBody::new(pts).unwrap();
        assert!(body.contains(&body.barycenter()).unwrap());
    }

    #[test]
    fn separate_point_from_segment() {
        let a = vec![p1(0.0)];
        let b = vec![p1(2.0), p1(3.0)];
        let cert = separate(&a, &b).unwrap();
        assert!((cert.functional.ell[0] - c(1.0, 0.0)).norm() < 1e-9);
        assert!(cert.alpha.abs() < 1e-9 && (cert.beta - 2.0).abs() < 1e-9);
        assert!((cert.margin() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn inseparable_nested() {
        let a = vec![p1(0.0), p1(1.0)];
        let b = vec![p1(0.5)];
        assert!(matches!(separate(&a, &b), Err(Error::Inseparable(_))));
        assert!(intersection_witness(&a, &b).unwrap().is_some());
        let k = ConvexBody::new(a.clone()).unwrap();
        assert!(matches!(
            kallin_union_certificate(&k, &k),
            Err(Error::Inseparable(_))
        ));
    }

    #[test]
    fn separate_box_from_point_in_c2() {
        let mut a = Vec::new();
        for x in [-1.0, 1.0] {
            for y in [-1.0, 1.0] {
                for u in [-1.0, 1.0] {
                    for v in [-1.0, 1.0] {
                        a.push(vec![c(x, y), c(u, v)]);
                    }
                }
            }
        }
        let b = vec![vec![c(3.0, 0.0), c(3.0, 0.0)]];
        let cert = separate(&a, &b).unwrap();
        for p in &a {
            assert!(cert.functional.eval(p) <= cert.alpha + 1e-12);
        }
        assert!(cert.functional.eval(&b[0]) >= cert.beta - 1e-12);
        assert!(cert.verified_margin(&a, &b) >= 1e-9);
    }

    #[test]
    fn rationalize_examples() {
        let a = vec![p1(0.0)];
        let b = vec![p1(2.0), p1(3.0)];
        let cert = separate(&a, &b).unwrap();
        let r = rationalize(&cert, &a, &b).unwrap();
        assert_eq!(r.rational.as_ref().unwrap()[0], (1, 1));

        let third = SeparationCertificate {
            functional: LinearFunctional {
                ell: vec![c(0.333_333_333_333_3, 0.0)],
            },
            alpha: 0.0,
            beta: 2.0,
            rational: None,
        };
        let b6 = vec![p1(6.0)];
        let r = rationalize(&third, &a, &b6).unwrap();
        assert_eq!(r.rational.as_ref().unwrap()[0], (1, 3));
        assert!(r.margin() >= 1.0);

        let tiny = SeparationCertificate {
            beta: 1e-12,
            ..third
        };
        assert!(matches!(
            rationalize(&tiny, &a, &b6),
            Err(Error::MarginLost)
        ));
    }

    #[test]
    fn best_rational_convergents() {
        assert_eq!(best_rational(0.5, 10), (1, 2));
        assert_eq!(best_rational(std::f64::consts::PI, 1000), (355, 113));
        assert_eq!(best_rational(-0.25, 100), (-1, 4));
        let (p, q) = best_rational(std::f64::consts::E, MAX_DENOMINATOR);
        assert!(q <= MAX_DENOMINATOR && (p as f64 / q as f64 - std::f64::consts::E).abs() < 1e-10);
    }

    #[test]
    fn sample_examples() {
        let seg = ConvexBody::new(vec![p1(0.0), p1(1.0)]).unwrap();
        assert_eq!(sample(&seg, 0, 1).points, seg.generators());
        let cloud = sample(&seg, 5, 7);
        assert_eq!(cloud.len(), 7);
        for p in &cloud.points {
            assert!(seg.contains(p).unwrap());
            assert!(p[0].re >= 0.0 && p[0].re <= 1.0 && p[0].im == 0.0);
        }
        assert_eq!(sample(&seg, 5, 7), cloud);
    }

    #[test]
    fn stratified_cloud_stays_inside() {
        let tri = ConvexBody::new(vec![p1(0.0), vec![c(1.0, 0.0)], vec![c(0.0, 1.0)]]).unwrap();
        let cloud = stratified_cloud(&tri, 4, 10, 3);
        assert_eq!(cloud.len(), 3 + 3 * 4 + 10);
        for p in &cloud.points {
            assert!(tri.contains(p).unwrap());
        }
    }

    fn unit_disk() -> ConvexDomain {
        ConvexDomain::ball(p1(0.0), 1.0, 16).unwrap()
    }

    #[test]
    fn ball_vertices_on_circle() {
        let d = unit_disk();
        let v = polytope_vertices(d.halfspaces(), 2);
        assert_eq!(v.len(), 16);
        for x in &v {
            assert!((norm(x) - 1.0).abs() < 1e-12);
        }
        assert!(d.contains_closure(&p1(1.0), 1e-12));
        assert!(!d.contains_open(&p1(1.0)));
        assert!(d.is_bounded());
    }

    #[test]
    fn ball_in_c2_has_requested_facets() {
        let d = ConvexDomain::ball(vec![c(0.0, 0.0); 2], 0.8, 32).unwrap();
        assert_eq!(d.halfspaces().len(), 32);
        let v = polytope_vertices(d.halfspaces(), 4);
        let vmax = v.iter().map(|x| norm(x)).fold(0.0, f64::max);
        assert!((vmax - 0.8).abs() < 1e-12);
    }

    #[test]
    fn exhaustion_disk_stage_one() {
        let l1 = exhaustion_compact(&unit_disk(), 1, Mode::Holo).unwrap();
        assert_eq!(l1.generators().len(), 16);
        for p in l1.generators() {
            assert!(p[0].norm() <= 0.5 + 1e-12);
            assert!(unit_disk().contains_open(p));
        }
    }

    #[test]
    fn exhaustion_half_plane() {
        let d = ConvexDomain::new(
            vec![HalfSpace {
                u: vec![-1.0, 0.0],
                s: 0.0,
            }],
            vec![c(1.0, 0.0)],
        )
        .unwrap();
        assert!(!d.is_bounded());
        let l2 = exhaustion_compact(&d, 2, Mode::Holo).unwrap();
        for p in l2.generators() {
            assert!(p[0].re >= 1.0 / 3.0 - 1e-12);
        }
    }

    #[test]
    fn exhaustion_is_nested() {
        let d = unit_disk();
        let d2 = ConvexDomain::new(
            vec![HalfSpace {
                u: vec![-1.0, 0.0],
                s: 0.0,
            }],
            vec![c(1.0, 0.0)],
        )
        .unwrap();
        for dom in [d, d2] {
            let stages: Vec<ConvexBody> = (1..=5)
                .map(|s| exhaustion_compact(&dom, s, Mode::Holo).unwrap())
                .collect();
            for w in stages.windows(2) {
                for p in w[0].generators() {
                    assert!(w[1].contains(p).unwrap());
                }
            }
        }
    }

    #[test]
    fn ainfty_exhaustion_touches_boundary() {
        let d = unit_disk();
        let l = exhaustion_compact(&d, 2, Mode::AInfty).unwrap();
        assert!(l.contains(&p1(1.0)).unwrap());
        for p in l.generators() {
            assert!(d.contains_closure(p, 1e-9));
        }
    }

    #[test]
    fn empty_exhaustion() {
        let d = ConvexDomain::ball(p1(0.0), 0.3, 16).unwrap();
        assert!(matches!(
            exhaustion_compact(&d, 1, Mode::Holo),
            Err(Error::EmptyExhaustion { stage: 1 })
        ));
    }

    #[test]
    fn body_depth_classifies() {
        let d = unit_disk();
        let k = ConvexBody::new(vec![p1(2.0), p1(3.0)]).unwrap();
        assert!(!d.intersects_open(&k).unwrap());
        assert!(!d.intersects_closure(&k).unwrap());
        let touching = ConvexBody::new(vec![p1(1.0), p1(3.0)]).unwrap();
        assert!(!d.intersects_open(&touching).unwrap());
        assert!(d.intersects_closure(&touching).unwrap());
        let crossing = ConvexBody::new(vec![p1(0.0), p1(3.0)]).unwrap();
        assert!(d.intersects_open(&crossing).unwrap());
    }

    #[test]
    fn witness_must_be_inside() {
        let r = ConvexDomain::new(
            vec![HalfSpace {
                u: vec![1.0, 0.0],
                s: 0.0,
            }],
            vec![c(1.0, 0.0)],
        );
        assert!(matches!(r, Err(Error::Membership(_))));
    }
}
