//! Sparse multivariate complex polynomials in a centred, scaled monomial basis.
//!
//! A [`CenteredPolynomial`] with centre `ζ`, scales `σ` and coefficients `c_ν`
//! represents
//!
//! ```text
//! z ↦ Σ_ν c_ν Π_k ((z_k − ζ_k) / σ_k)^{ν_k}
//! ```
//!
//! Coefficients live in a `BTreeMap` keyed by [`MultiIndex`], whose ordering is
//! graded-lex, so evaluation always sums terms in graded-lex rank order.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::multiindex::{EnumerationScheme, MultiIndex};
use crate::{Error, Result};

/// Order of partial differentiation `ℓ = (ℓ₁, …, ℓₙ)`.
pub type DerivativeSymbol = MultiIndex;

#[derive(Debug, Clone, PartialEq)]
pub struct CenteredPolynomial {
    center: Vec<Complex64>,
    scale: Vec<f64>,
    coeffs: BTreeMap<MultiIndex, Complex64>,
}

impl CenteredPolynomial {
    pub fn zero(center: Vec<Complex64>, scale: Vec<f64>) -> Self {
        assert!(!center.is_empty());
        assert_eq!(center.len(), scale.len());
        assert!(
            scale.iter().all(|s| *s > 0.0 && s.is_finite()),
            "scales must be positive"
        );
        Self {
            center,
            scale,
            coeffs: BTreeMap::new(),
        }
    }

    /// Zero polynomial at the origin with unit scales.
    pub fn zero_at_origin(n: usize) -> Self {
        Self::zero(vec![Complex64::new(0.0, 0.0); n], vec![1.0; n])
    }

    pub fn from_terms(
        center: Vec<Complex64>,
        scale: Vec<f64>,
        terms: impl IntoIterator<Item = (MultiIndex, Complex64)>,
    ) -> Result<Self> {
        let mut p = Self::zero(center, scale);
        for (nu, c) in terms {
            if nu.dim() != p.dim() {
                return Err(Error::DimensionMismatch {
                    expected: p.dim(),
                    got: nu.dim(),
                });
            }
            *p.coeffs.entry(nu).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        p.normalize();
        Ok(p)
    }

    pub fn constant(center: Vec<Complex64>, scale: Vec<f64>, c: Complex64) -> Self {
        let n = center.len();
        let mut p = Self::zero(center, scale);
        p.set(MultiIndex::zero(n), c);
        p
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[Complex64] {
        &self.center
    }

    pub fn scale(&self) -> &[f64] {
        &self.scale
    }

    pub fn coeffs(&self) -> &BTreeMap<MultiIndex, Complex64> {
        &self.coeffs
    }

    pub fn coeff(&self, nu: &MultiIndex) -> Complex64 {
        self.coeffs.get(nu).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Sets one coefficient; a zero value removes the entry.
    pub fn set(&mut self, nu: MultiIndex, c: Complex64) {
        assert_eq!(nu.dim(), self.dim());
        if c == Complex64::new(0.0, 0.0) {
            self.coeffs.remove(&nu);
        } else {
            self.coeffs.insert(nu, c);
        }
    }

    pub fn normalize(&mut self) {
        self.coeffs.retain(|_, c| *c != Complex64::new(0.0, 0.0));
    }

    pub fn max_total_degree(&self) -> Option<u32> {
        self.coeffs.keys().map(MultiIndex::total_degree).max()
    }

    pub fn min_total_degree(&self) -> Option<u32> {
        self.coeffs.keys().map(MultiIndex::total_degree).min()
    }

    pub fn same_basis(&self, other: &Self) -> bool {
        self.center == other.center && self.scale == other.scale
    }

    /// Scaled local coordinates `w_k = (z_k − ζ_k)/σ_k`.
    pub fn local_coords(&self, z: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(z.len(), self.dim(), "point dimension mismatch");
        z.iter()
            .zip(&self.center)
            .zip(&self.scale)
            .map(|((z, c), s)| (z - c) / *s)
            .collect()
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        let w = self.local_coords(z);
        let maxdeg = self
            .coeffs
            .keys()
            .flat_map(|nu| nu.components().iter().copied())
            .max()
            .unwrap_or(0) as usize;
        let powers = power_table(&w, maxdeg);
        let mut acc = Complex64::new(0.0, 0.0);
        for (nu, c) in &self.coeffs {
            let mut term = *c;
            for (k, &e) in nu.components().iter().enumerate() {
                term *= powers[k][e as usize];
            }
            acc += term;
        }
        acc
    }

    pub fn linear_combine(
        terms: &[(Complex64, &CenteredPolynomial)],
    ) -> Result<CenteredPolynomial> {
        let (_, first) = terms.first().ok_or_else(|| {
            Error::InvalidRequest("linear_combine needs at least one term".into())
        })?;
        let mut out = CenteredPolynomial::zero(first.center.clone(), first.scale.clone());
        for (w, p) in terms {
            if !p.same_basis(first) {
                return Err(Error::MismatchedBasis);
            }
            for (nu, c) in &p.coeffs {
                *out.coeffs.entry(nu.clone()).or_default() += w * c;
            }
        }
        out.normalize();
        Ok(out)
    }

    pub fn sub(&self, other: &CenteredPolynomial) -> Result<CenteredPolynomial> {
        Self::linear_combine(&[
            (Complex64::new(1.0, 0.0), self),
            (Complex64::new(-1.0, 0.0), other),
        ])
    }

    pub fn scaled(&self, w: Complex64) -> CenteredPolynomial {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c *= w;
        }
        out.normalize();
        out
    }

    pub fn multiply(&self, other: &CenteredPolynomial) -> Result<CenteredPolynomial> {
        if !self.same_basis(other) {
            return Err(Error::MismatchedBasis);
        }
        let mut out = CenteredPolynomial::zero(self.center.clone(), self.scale.clone());
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                *out.coeffs.entry(a.add(b)).or_default() += ca * cb;
            }
        }
        out.normalize();
        Ok(out)
    }

    /// Partial derivative `D^(ℓ)` with respect to the unscaled variables `z`.
    pub fn derivative(&self, ell: &DerivativeSymbol) -> CenteredPolynomial {
        assert_eq!(ell.dim(), self.dim());
        let mut out = CenteredPolynomial::zero(self.center.clone(), self.scale.clone());
        for (nu, c) in &self.coeffs {
            if let Some(rest) = nu.checked_sub(ell) {
                let f = derivative_factor(nu, ell, &self.scale);
                out.coeffs.insert(rest, c * f);
            }
        }
        out.normalize();
        out
    }

    /// The same polynomial expanded around `new_center` with scales `new_scale`.
    ///
    /// One univariate Taylor shift per coordinate (Horner synthetic division),
    /// followed by rescaling of the shifted coordinate.
    pub fn recenter(&self, new_center: &[Complex64], new_scale: &[f64]) -> CenteredPolynomial {
        let n = self.dim();
        assert_eq!(new_center.len(), n);
        assert_eq!(new_scale.len(), n);
        let mut cur = self.coeffs.clone();
        for k in 0..n {
            let a = new_scale[k] / self.scale[k];
            let b = (new_center[k] - self.center[k]) / self.scale[k];
            if a == 1.0 && b == Complex64::new(0.0, 0.0) {
                continue;
            }
            // group by the exponents of the other coordinates
            let mut groups: BTreeMap<MultiIndex, Vec<Complex64>> = BTreeMap::new();
            for (nu, c) in &cur {
                let mut key = nu.components().to_vec();
                let e = key[k] as usize;
                key[k] = 0;
                let v = groups.entry(MultiIndex::new(key)).or_default();
                if v.len() <= e {
                    v.resize(e + 1, Complex64::new(0.0, 0.0));
                }
                v[e] += c;
            }
            let mut next = BTreeMap::new();
            for (key, mut coefs) in groups {
                taylor_shift(&mut coefs, b);
                let mut ak = 1.0;
                for (e, c) in coefs.into_iter().enumerate() {
                    let v = c * ak;
                    ak *= a;
                    if v != Complex64::new(0.0, 0.0) {
                        let mut comps = key.components().to_vec();
                        comps[k] = e as u32;
                        *next.entry(MultiIndex::new(comps)).or_default() += v;
                    }
                }
            }
            cur = next;
        }
        let mut out = CenteredPolynomial {
            center: new_center.to_vec(),
            scale: new_scale.to_vec(),
            coeffs: cur,
        };
        out.normalize();
        out
    }

    /// `a_ν(P, ζ′) = D^ν P(ζ′) / ν!`, the unscaled Taylor coefficient at `ζ′`.
    pub fn taylor_coefficient(&self, at: &[Complex64], nu: &MultiIndex) -> Complex64 {
        let d = self.derivative(nu);
        let fact: f64 = nu.components().iter().map(|&v| factorial(v)).product();
        d.eval(at) / fact
    }

    /// Same quantity read off the unit-scale expansion around `at`.
    pub fn taylor_coefficient_via_recenter(&self, at: &[Complex64], nu: &MultiIndex) -> Complex64 {
        self.recenter(at, &vec![1.0; self.dim()]).coeff(nu)
    }

    /// `z ↦ P(rz)` for a polynomial centred at the origin.
    pub fn dilate(&self, r: f64) -> Result<CenteredPolynomial> {
        if self.center.iter().any(|c| *c != Complex64::new(0.0, 0.0)) {
            return Err(Error::NonzeroCenter);
        }
        let mut out = self.clone();
        for (nu, c) in out.coeffs.iter_mut() {
            *c *= r.powi(nu.total_degree() as i32);
        }
        out.normalize();
        Ok(out)
    }

    /// Keeps the coefficients whose rank under `scheme` is at most `lambda`.
    pub fn truncate_to_prefix(
        &self,
        scheme: &EnumerationScheme,
        lambda: usize,
    ) -> Result<CenteredPolynomial> {
        let mut out = CenteredPolynomial::zero(self.center.clone(), self.scale.clone());
        for (nu, c) in &self.coeffs {
            if scheme.rank(nu)? <= lambda {
                out.coeffs.insert(nu.clone(), *c);
            }
        }
        Ok(out)
    }
}

/// `w_k^e` for `e = 0..=maxdeg`, one row per coordinate.
pub(crate) fn power_table(w: &[Complex64], maxdeg: usize) -> Vec<Vec<Complex64>> {
    w.iter()
        .map(|&wk| {
            let mut row = Vec::with_capacity(maxdeg + 1);
            let mut p = Complex64::new(1.0, 0.0);
            for _ in 0..=maxdeg {
                row.push(p);
                p *= wk;
            }
            row
        })
        .collect()
}

/// `Π_k ν_k! / (ν_k − ℓ_k)! / σ_k^{ℓ_k}`; requires `ν ≥ ℓ`.
pub(crate) fn derivative_factor(nu: &MultiIndex, ell: &MultiIndex, scale: &[f64]) -> f64 {
    let mut f = 1.0;
    for ((&v, &l), s) in nu.components().iter().zip(ell.components()).zip(scale) {
        for i in 0..l {
            f *= (v - i) as f64;
        }
        f /= s.powi(l as i32);
    }
    f
}

pub(crate) fn factorial(v: u32) -> f64 {
    (1..=v).map(f64::from).product()
}

/// In-place `p(x) → p(x + b)` on ascending coefficients.
fn taylor_shift(c: &mut [Complex64], b: Complex64) {
    let d = c.len();
    if d < 2 {
        return;
    }
    for i in 0..d - 1 {
        for j in (i..d - 1).rev() {
            let next = c[j + 1];
            c[j] += b * next;
        }
    }
}
