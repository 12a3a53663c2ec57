//! Enumerations of `N^n` and admissible rank sets.
//!
//! An [`EnumerationScheme`] is a bijection between ranks `j = 0, 1, 2, …` and
//! multi-indices. The two built-in schemes are graded: they list every
//! multi-index of a lower grade before any of a higher grade, so their
//! prefixes are exactly simplices (`ν₁+…+νₙ ≤ τ`) or Euclidean balls
//! (`ν₁²+…+νₙ² ≤ τ²`).

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use crate::{Error, Result};

/// Exponent vector `(ν₁, …, νₙ)`.
///
/// `Ord` is graded-lexicographic: total degree first, then lexicographic on
/// the components. Sorted containers of `MultiIndex` therefore iterate in
/// [`EnumerationScheme::GradedLex`] rank order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(components: Vec<u32>) -> Self {
        assert!(!components.is_empty(), "multi-index needs dimension >= 1");
        Self(components)
    }

    pub fn zero(n: usize) -> Self {
        Self::new(vec![0; n])
    }

    /// Unit vector `e_k` in dimension `n`.
    pub fn unit(n: usize, k: usize) -> Self {
        let mut v = vec![0; n];
        v[k] = 1;
        Self::new(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[u32] {
        &self.0
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn norm_sq(&self) -> u64 {
        self.0.iter().map(|&v| v as u64 * v as u64).sum()
    }

    /// Componentwise `self ≥ other`.
    pub fn dominates(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if !self.dominates(other) {
            return None;
        }
        Some(MultiIndex(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex::new(v)
    }
}

/// How a custom table continues past its last entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableExtension {
    /// Continue in graded-lex order, skipping entries already in the table.
    GradedLex,
}

#[derive(Debug, Clone)]
pub struct CustomTable {
    n: usize,
    entries: Vec<MultiIndex>,
    positions: HashMap<MultiIndex, usize>,
    /// Graded-lex ranks of the entries, ascending.
    skipped: Vec<usize>,
    extension: Option<TableExtension>,
}

impl PartialEq for CustomTable {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.entries == other.entries && self.extension == other.extension
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EnumerationScheme {
    /// Total degree, ties broken lexicographically ascending.
    GradedLex {
        n: usize,
    },
    /// `ν₁²+…+νₙ²`, then total degree, then lexicographic.
    EuclideanGraded {
        n: usize,
    },
    CustomTable(CustomTable),
}

impl EnumerationScheme {
    pub fn graded_lex(n: usize) -> Self {
        assert!(n >= 1);
        EnumerationScheme::GradedLex { n }
    }

    pub fn euclidean(n: usize) -> Self {
        assert!(n >= 1);
        EnumerationScheme::EuclideanGraded { n }
    }

    pub fn custom(
        n: usize,
        entries: Vec<MultiIndex>,
        extension: Option<TableExtension>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invariant(
                "custom table dimension must be >= 1".into(),
            ));
        }
        let mut positions = HashMap::with_capacity(entries.len());
        for (i, e) in entries.iter().enumerate() {
            if e.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: e.dim(),
                });
            }
            if positions.insert(e.clone(), i).is_some() {
                return Err(Error::Invariant(format!(
                    "custom table lists {e} twice; the enumeration must be injective"
                )));
            }
        }
        let mut skipped: Vec<usize> = entries.iter().map(graded_lex_rank).collect();
        skipped.sort_unstable();
        Ok(EnumerationScheme::CustomTable(CustomTable {
            n,
            entries,
            positions,
            skipped,
            extension,
        }))
    }

    pub fn dim(&self) -> usize {
        match self {
            EnumerationScheme::GradedLex { n } | EnumerationScheme::EuclideanGraded { n } => *n,
            EnumerationScheme::CustomTable(t) => t.n,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EnumerationScheme::GradedLex { .. } => "graded_lex",
            EnumerationScheme::EuclideanGraded { .. } => "euclidean",
            EnumerationScheme::CustomTable(_) => "custom",
        }
    }

    pub fn is_graded(&self) -> bool {
        !matches!(self, EnumerationScheme::CustomTable(_))
    }

    pub fn custom_entries(&self) -> Option<(&[MultiIndex], Option<TableExtension>)> {
        match self {
            EnumerationScheme::CustomTable(t) => Some((&t.entries, t.extension)),
            _ => None,
        }
    }

    pub fn rank(&self, nu: &MultiIndex) -> Result<usize> {
        let n = self.dim();
        if nu.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: nu.dim(),
            });
        }
        match self {
            EnumerationScheme::GradedLex { .. } => Ok(graded_lex_rank(nu)),
            EnumerationScheme::EuclideanGraded { .. } => Ok(euclidean_rank(nu)),
            EnumerationScheme::CustomTable(t) => {
                if let Some(&p) = t.positions.get(nu) {
                    return Ok(p);
                }
                match t.extension {
                    None => Err(Error::SchemeExhausted(t.entries.len())),
                    Some(TableExtension::GradedLex) => {
                        let r = graded_lex_rank(nu);
                        let below = t.skipped.partition_point(|&s| s < r);
                        Ok(t.entries.len() + r - below)
                    }
                }
            }
        }
    }

    pub fn unrank(&self, j: usize) -> Result<MultiIndex> {
        match self {
            EnumerationScheme::GradedLex { n } => Ok(graded_lex_unrank(*n, j)),
            EnumerationScheme::EuclideanGraded { n } => Ok(euclidean_unrank(*n, j)),
            EnumerationScheme::CustomTable(t) => {
                if j < t.entries.len() {
                    return Ok(t.entries[j].clone());
                }
                match t.extension {
                    None => Err(Error::SchemeExhausted(j)),
                    Some(TableExtension::GradedLex) => {
                        // k-th graded-lex rank that is not used by the table
                        let mut r = j - t.entries.len();
                        for &s in &t.skipped {
                            if s <= r {
                                r += 1;
                            } else {
                                break;
                            }
                        }
                        Ok(graded_lex_unrank(t.n, r))
                    }
                }
            }
        }
    }

    /// Largest rank `λ` such that `unrank(0..=λ)` is exactly the simplex
    /// `|ν|₁ ≤ τ` (graded-lex) or the ball `|ν|₂ ≤ τ` (Euclidean).
    pub fn prefix_end_for_degree(&self, tau: u32) -> Result<usize> {
        match self {
            EnumerationScheme::GradedLex { n } => {
                Ok(to_usize(binomial(tau as u64 + *n as u64, *n as u64)) - 1)
            }
            EnumerationScheme::EuclideanGraded { n } => {
                let s = tau as u64 * tau as u64;
                Ok(to_usize(count_norm_sq_le(*n, s)) - 1)
            }
            EnumerationScheme::CustomTable(_) => Err(Error::UnsupportedScheme("custom")),
        }
    }

    /// Largest rank among all `ν` with `|ν|₁ ≤ d`.
    pub fn max_rank_within_total_degree(&self, d: u32) -> Result<usize> {
        match self {
            EnumerationScheme::GradedLex { .. } => self.prefix_end_for_degree(d),
            _ => {
                let n = self.dim();
                let mut best = 0;
                for nu in monomials_in_degree_range(n, 0, d) {
                    best = best.max(self.rank(&nu)?);
                }
                Ok(best)
            }
        }
    }
}

/// All `ν ∈ N^n` with `lo ≤ |ν|₁ ≤ hi`, in graded-lex order.
pub fn monomials_in_degree_range(n: usize, lo: u32, hi: u32) -> Vec<MultiIndex> {
    if lo > hi {
        return Vec::new();
    }
    let start = if lo == 0 {
        0
    } else {
        to_usize(binomial(lo as u64 - 1 + n as u64, n as u64))
    };
    let end = to_usize(binomial(hi as u64 + n as u64, n as u64));
    (start..end).map(|j| graded_lex_unrank(n, j)).collect()
}

pub(crate) fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

fn to_usize(v: u128) -> usize {
    usize::try_from(v).expect("enumeration rank exceeds usize")
}

/// Number of compositions of `total` into `parts` nonnegative parts.
fn compositions(total: u64, parts: u64) -> u128 {
    if parts == 0 {
        return u128::from(total == 0);
    }
    binomial(total + parts - 1, parts - 1)
}

fn graded_lex_rank(nu: &MultiIndex) -> usize {
    let n = nu.dim() as u64;
    let d = nu.total_degree() as u64;
    let mut r = if d == 0 { 0 } else { binomial(d - 1 + n, n) };
    let mut rem = d;
    let c = nu.components();
    for k in 0..c.len().saturating_sub(1) {
        let parts = n - k as u64 - 1;
        for v in 0..c[k] as u64 {
            r += compositions(rem - v, parts);
        }
        rem -= c[k] as u64;
    }
    to_usize(r)
}

fn graded_lex_unrank(n: usize, j: usize) -> MultiIndex {
    let nn = n as u64;
    let j = j as u128;
    let mut d: u64 = 0;
    while binomial(d + nn, nn) <= j {
        d += 1;
    }
    let mut offset = j - if d == 0 { 0 } else { binomial(d - 1 + nn, nn) };
    let mut out = vec![0u32; n];
    let mut rem = d;
    for (k, slot) in out.iter_mut().enumerate().take(n - 1) {
        let parts = nn - k as u64 - 1;
        let mut v = 0;
        loop {
            let c = compositions(rem - v, parts);
            if offset < c {
                break;
            }
            offset -= c;
            v += 1;
        }
        *slot = v as u32;
        rem -= v;
    }
    out[n - 1] = rem as u32;
    MultiIndex(out)
}

pub(crate) fn isqrt(s: u64) -> u64 {
    let mut r = (s as f64).sqrt() as u64;
    while r * r > s {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= s {
        r += 1;
    }
    r
}

/// `#{μ ∈ N^n : Σ μ_k² ≤ s}`.
fn count_norm_sq_le(n: usize, s: u64) -> u128 {
    match n {
        0 => 1,
        1 => isqrt(s) as u128 + 1,
        _ => (0..=isqrt(s))
            .map(|v| count_norm_sq_le(n - 1, s - v * v))
            .sum(),
    }
}

/// All `μ` with `Σ μ_k² = s`, sorted by (total degree, lex).
fn norm_sq_level(n: usize, s: u64) -> Vec<MultiIndex> {
    fn rec(n: usize, s: u64, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if n == 1 {
            let r = isqrt(s);
            if r * r == s {
                prefix.push(r as u32);
                out.push(MultiIndex(prefix.clone()));
                prefix.pop();
            }
            return;
        }
        for v in 0..=isqrt(s) {
            prefix.push(v as u32);
            rec(n - 1, s - v * v, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, s, &mut Vec::with_capacity(n), &mut out);
    out.sort();
    out
}

fn euclidean_rank(nu: &MultiIndex) -> usize {
    let n = nu.dim();
    let s = nu.norm_sq();
    let base = if s == 0 {
        0
    } else {
        count_norm_sq_le(n, s - 1)
    };
    let level = norm_sq_level(n, s);
    let pos = level
        .binary_search(nu)
        .expect("multi-index lies on its own level");
    to_usize(base) + pos
}

fn euclidean_unrank(n: usize, j: usize) -> MultiIndex {
    let j = j as u128;
    // smallest s with count(s) > j
    let mut hi: u64 = 1;
    while count_norm_sq_le(n, hi) <= j {
        hi *= 2;
    }
    let mut lo: u64 = 0;
    if count_norm_sq_le(n, 0) <= j {
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if count_norm_sq_le(n, mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    } else {
        hi = 0;
    }
    let s = hi;
    let base = if s == 0 {
        0
    } else {
        count_norm_sq_le(n, s - 1)
    };
    let level = norm_sq_level(n, s);
    level[to_usize(j - base)].clone()
}

/// An infinite set `M ⊆ N` from which truncation ranks are drawn.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdmissibleSet {
    All,
    ArithmeticProgression {
        start: usize,
        step: usize,
    },
    /// Strictly increasing list, continued past its end by `last + k·step`.
    ExplicitSorted {
        values: Vec<usize>,
        extension_step: usize,
    },
}

impl AdmissibleSet {
    pub fn progression(start: usize, step: usize) -> Result<Self> {
        if step == 0 {
            return Err(Error::Invariant(
                "admissible progression step must be >= 1".into(),
            ));
        }
        Ok(AdmissibleSet::ArithmeticProgression { start, step })
    }

    pub fn explicit(values: Vec<usize>, extension_step: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Invariant(
                "explicit admissible set needs at least one value".into(),
            ));
        }
        if extension_step == 0 {
            return Err(Error::Invariant(
                "explicit admissible set needs an extension step >= 1".into(),
            ));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invariant(
                "explicit admissible values must be strictly increasing".into(),
            ));
        }
        Ok(AdmissibleSet::ExplicitSorted {
            values,
            extension_step,
        })
    }

    pub fn contains(&self, j: usize) -> bool {
        self.next_admissible(j) == j
    }

    /// `min { μ ∈ M : μ ≥ j }`.
    pub fn next_admissible(&self, j: usize) -> usize {
        match self {
            AdmissibleSet::All => j,
            AdmissibleSet::ArithmeticProgression { start, step } => {
                if j <= *start {
                    *start
                } else {
                    start + (j - start).div_ceil(*step) * step
                }
            }
            AdmissibleSet::ExplicitSorted {
                values,
                extension_step,
            } => {
                let i = values.partition_point(|&v| v < j);
                if i < values.len() {
                    values[i]
                } else {
                    let last = *values.last().unwrap();
                    last + (j - last).div_ceil(*extension_step) * extension_step
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    /// Brute-force oracle: all ν with |ν|₁ ≤ dmax, sorted by the given key.
    fn brute_order(n: usize, dmax: u32, euclid: bool) -> Vec<MultiIndex> {
        let mut all = Vec::new();
        let mut cur = vec![0u32; n];
        loop {
            if cur.iter().sum::<u32>() <= dmax {
                all.push(MultiIndex(cur.clone()));
            }
            let mut k = 0;
            loop {
                if k == n {
                    if euclid {
                        all.sort_by(|a, b| a.norm_sq().cmp(&b.norm_sq()).then(a.cmp(b)));
                    } else {
                        all.sort();
                    }
                    return all;
                }
                cur[k] += 1;
                if cur[k] <= dmax {
                    break;
                }
                cur[k] = 0;
                k += 1;
            }
        }
    }

    #[test]
    fn graded_lex_examples() {
        let s = EnumerationScheme::graded_lex(2);
        assert_eq!(s.rank(&mi(&[0, 0])).unwrap(), 0);
        assert_eq!(s.rank(&mi(&[0, 2])).unwrap(), 3);
        assert_eq!(s.unrank(0).unwrap(), mi(&[0, 0]));
        assert_eq!(s.unrank(3).unwrap(), mi(&[0, 2]));
        assert_eq!(s.rank(&mi(&[1, 1])).unwrap(), 4);
        let s3 = EnumerationScheme::graded_lex(3);
        assert_eq!(s3.unrank(1).unwrap(), mi(&[0, 0, 1]));
        let e1 = EnumerationScheme::euclidean(1);
        assert_eq!(e1.rank(&mi(&[5])).unwrap(), 5);
    }

    #[test]
    fn graded_lex_matches_brute_force() {
        for n in 1..=4 {
            let order = brute_order(n, 6, false);
            let s = EnumerationScheme::graded_lex(n);
            for (j, nu) in order.iter().enumerate() {
                assert_eq!(s.unrank(j).unwrap(), *nu);
                assert_eq!(s.rank(nu).unwrap(), j);
            }
        }
    }

    #[test]
    fn euclidean_matches_brute_force_on_balls() {
        for n in 1..=3 {
            let dmax = 8;
            let order = brute_order(n, dmax * n as u32, true);
            let s = EnumerationScheme::euclidean(n);
            // every ν with norm ≤ dmax is in the brute-force list
            let safe = order
                .iter()
                .take_while(|v| v.norm_sq() <= (dmax as u64).pow(2))
                .count();
            for (j, nu) in order.iter().take(safe).enumerate() {
                assert_eq!(s.unrank(j).unwrap(), *nu, "n={n} j={j}");
                assert_eq!(s.rank(nu).unwrap(), j);
            }
        }
    }

    #[test]
    fn prefix_ends() {
        let g2 = EnumerationScheme::graded_lex(2);
        assert_eq!(g2.prefix_end_for_degree(1).unwrap(), 2);
        assert_eq!(
            EnumerationScheme::graded_lex(1)
                .prefix_end_for_degree(5)
                .unwrap(),
            5
        );
        assert_eq!(
            EnumerationScheme::euclidean(2)
                .prefix_end_for_degree(1)
                .unwrap(),
            2
        );
        let c = EnumerationScheme::custom(1, vec![mi(&[0])], None).unwrap();
        assert!(matches!(
            c.prefix_end_for_degree(1),
            Err(Error::UnsupportedScheme(_))
        ));
    }

    #[test]
    fn ball_prefix_property() {
        for n in 1..=3 {
            for (scheme, euclid) in [
                (EnumerationScheme::graded_lex(n), false),
                (EnumerationScheme::euclidean(n), true),
            ] {
                for tau in 0..=20u32 {
                    if n == 3 && tau > 12 {
                        break;
                    }
                    let end = scheme.prefix_end_for_degree(tau).unwrap();
                    let mut prefix: Vec<_> = (0..=end).map(|j| scheme.unrank(j).unwrap()).collect();
                    let mut ball: Vec<_> =
                        brute_order(n, if euclid { tau * n as u32 } else { tau }, euclid)
                            .into_iter()
                            .filter(|v| {
                                if euclid {
                                    v.norm_sq() <= (tau as u64).pow(2)
                                } else {
                                    v.total_degree() <= tau
                                }
                            })
                            .collect();
                    prefix.sort();
                    ball.sort();
                    assert_eq!(prefix, ball, "n={n} tau={tau} euclid={euclid}");
                }
            }
        }
    }

    #[test]
    fn custom_table_with_and_without_extension() {
        let t = vec![mi(&[1, 0]), mi(&[0, 0])];
        let s = EnumerationScheme::custom(2, t.clone(), None).unwrap();
        assert_eq!(s.unrank(1).unwrap(), mi(&[0, 0]));
        assert!(matches!(s.unrank(2), Err(Error::SchemeExhausted(2))));
        let s = EnumerationScheme::custom(2, t, Some(TableExtension::GradedLex)).unwrap();
        // continuation skips (0,0) and (1,0)
        assert_eq!(s.unrank(2).unwrap(), mi(&[0, 1]));
        assert_eq!(s.unrank(3).unwrap(), mi(&[0, 2]));
        for j in 0..200 {
            assert_eq!(s.rank(&s.unrank(j).unwrap()).unwrap(), j);
        }
        assert!(EnumerationScheme::custom(2, vec![mi(&[0, 0]), mi(&[0, 0])], None).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let s = EnumerationScheme::graded_lex(2);
        assert!(matches!(
            s.rank(&mi(&[1])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn admissible_examples() {
        let evens = AdmissibleSet::progression(0, 2).unwrap();
        assert_eq!(evens.next_admissible(5), 6);
        assert_eq!(AdmissibleSet::All.next_admissible(17), 17);
        let thirds = AdmissibleSet::progression(0, 3).unwrap();
        assert_eq!(thirds.next_admissible(9), 9);
        let ex = AdmissibleSet::explicit(vec![2, 5, 11], 4).unwrap();
        assert_eq!(ex.next_admissible(0), 2);
        assert_eq!(ex.next_admissible(6), 11);
        assert_eq!(ex.next_admissible(12), 15);
        assert!(AdmissibleSet::explicit(vec![3, 3], 1).is_err());
    }

    #[test]
    fn degree_range_listing() {
        let v = monomials_in_degree_range(2, 2, 2);
        assert_eq!(v, vec![mi(&[0, 2]), mi(&[1, 1]), mi(&[2, 0])]);
        assert_eq!(monomials_in_degree_range(3, 0, 4).len(), 35);
        let e = EnumerationScheme::euclidean(2);
        let m = e.max_rank_within_total_degree(3).unwrap();
        assert_eq!(e.unrank(m).unwrap().norm_sq(), 9);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn rank_unrank_roundtrip(j in 0usize..10_000, n in 1usize..=4, euclid in any::<bool>()) {
                let s = if euclid { EnumerationScheme::euclidean(n) } else { EnumerationScheme::graded_lex(n) };
                let nu = s.unrank(j).unwrap();
                prop_assert_eq!(s.rank(&nu).unwrap(), j);
            }

            #[test]
            fn graded_monotone(j in 0usize..5_000, k in 0usize..5_000, n in 1usize..=4) {
                let s = EnumerationScheme::graded_lex(n);
                let (a, b) = (j.min(k), j.max(k));
                prop_assert!(s.unrank(a).unwrap().total_degree() <= s.unrank(b).unwrap().total_degree());
            }

            #[test]
            fn next_admissible_is_minimal(start in 0usize..50, step in 1usize..9, j in 0usize..500) {
                let m = AdmissibleSet::progression(start, step).unwrap();
                let r = m.next_admissible(j);
                prop_assert!(r >= j);
                prop_assert!(m.contains(r));
                prop_assert!((j..r).all(|x| !m.contains(x)));
            }
        }
    }
}
