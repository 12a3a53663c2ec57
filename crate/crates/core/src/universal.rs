//! The staged builder.
//!
//! Stage `N` appends one tail block to the coefficient stream. The block
//! approximates the current residual `P_q − S_frontier` on the body `K_m`
//! while staying below `ε_N` on the exhaustion compact `L_N`; its support
//! starts above every degree already present, so earlier partial sums are
//! never disturbed. The stream is then zero-padded up to the next admissible
//! rank, which becomes the witness rank `λ_N`.

use num_complex::Complex64;

use crate::convexgeom::{
    exhaustion_compact, sample, ConvexBody, ConvexDomain, Point, PointTag, SampleCloud,
};
use crate::dualapprox::{tail_block_approx, ApproxRequest, BlockResult};
use crate::multiindex::{monomials_in_degree_range, AdmissibleSet, EnumerationScheme, MultiIndex};
use crate::polynomial::{CenteredPolynomial, DerivativeSymbol};
use crate::rng::derive_seed;
use crate::verify::fine_cloud;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Holo,
    AInfty,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Holo => "holo",
            Mode::AInfty => "ainfty",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "holo" => Ok(Mode::Holo),
            "ainfty" => Ok(Mode::AInfty),
            _ => Err(Error::Parse(format!(
                "unknown mode {s:?} (expected holo or ainfty)"
            ))),
        }
    }
}

/// Stage tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpsRule {
    /// `ε_N = 2^{−N}`.
    Geometric,
    /// `ε_N = 1/N`; not summable.
    Harmonic,
}

impl EpsRule {
    pub fn eps(self, stage: usize) -> f64 {
        match self {
            EpsRule::Geometric => 0.5f64.powi(stage as i32),
            EpsRule::Harmonic => 1.0 / stage as f64,
        }
    }

    pub fn is_summable(self) -> bool {
        self == EpsRule::Geometric
    }

    /// `Σ_{k>N} ε_k`, when finite.
    pub fn tail_sum(self, stage: usize) -> Option<f64> {
        match self {
            EpsRule::Geometric => Some(0.5f64.powi(stage as i32)),
            EpsRule::Harmonic => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EpsRule::Geometric => "geometric",
            EpsRule::Harmonic => "harmonic",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "geometric" => Ok(EpsRule::Geometric),
            "harmonic" => Ok(EpsRule::Harmonic),
            _ => Err(Error::Parse(format!(
                "unknown eps rule {s:?} (expected geometric or harmonic)"
            ))),
        }
    }
}

/// Fraction of `ε_N` that the solver aims for on the clouds, leaving room
/// for the fine-grid check.
pub const STAGE_SAFETY: f64 = 0.9;

#[derive(Debug, Clone)]
pub struct Scenario {
    pub id: String,
    pub domain: ConvexDomain,
    pub center: Point,
    pub scheme: EnumerationScheme,
    pub admissible: AdmissibleSet,
    pub bodies: Vec<ConvexBody>,
    pub targets: Vec<CenteredPolynomial>,
    pub mode: Mode,
    pub stages: usize,
    pub eps_rule: EpsRule,
    /// Largest total degree any block may use.
    pub degree_cap: u32,
    /// First budget tried is `floor + degree_start`.
    pub degree_start: u32,
    pub degree_step: u32,
    /// Random points added to the generators of every solver cloud.
    pub density: usize,
    pub facets: usize,
    pub grid_factor: usize,
    pub seed: u64,
}

impl Scenario {
    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Checks every type invariant; the message names the offending item.
    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        if n == 0 {
            return Err(Error::Invariant("scenario dimension must be >= 1".into()));
        }
        let dim_err = |what: String, got: usize| {
            Error::Invariant(format!("{what} has dimension {got}, scenario has {n}"))
        };
        if self.domain.dim() != n {
            return Err(dim_err("domain".into(), self.domain.dim()));
        }
        if self.scheme.dim() != n {
            return Err(dim_err("enumeration scheme".into(), self.scheme.dim()));
        }
        if !self.scheme.is_graded() {
            return Err(Error::UnsupportedScheme(self.scheme.name()));
        }
        if self.bodies.is_empty() {
            return Err(Error::Invariant("scenario needs at least one body".into()));
        }
        if self.targets.is_empty() {
            return Err(Error::Invariant(
                "scenario needs at least one target".into(),
            ));
        }
        for (i, t) in self.targets.iter().enumerate() {
            if t.dim() != n {
                return Err(dim_err(format!("target {}", i + 1), t.dim()));
            }
        }
        match self.mode {
            Mode::Holo if !self.domain.contains_open(&self.center) => {
                return Err(Error::Invariant(
                    "centre must lie in the open domain in holo mode".into(),
                ));
            }
            Mode::AInfty if !self.domain.contains_closure(&self.center, 1e-9) => {
                return Err(Error::Invariant(
                    "centre must lie in the closed domain in ainfty mode".into(),
                ));
            }
            _ => {}
        }
        for (i, b) in self.bodies.iter().enumerate() {
            if b.dim() != n {
                return Err(dim_err(format!("body {}", i + 1), b.dim()));
            }
            let hits = match self.mode {
                Mode::Holo => self.domain.intersects_open(b)?,
                Mode::AInfty => self.domain.intersects_closure(b)?,
            };
            if hits {
                let which = if self.mode == Mode::Holo {
                    "the domain"
                } else {
                    "the closed domain"
                };
                return Err(Error::Invariant(format!(
                    "body {} intersects {which}",
                    i + 1
                )));
            }
        }
        if self.facets < 4 || !self.facets.is_multiple_of(2) {
            return Err(Error::Invariant(format!(
                "facet count must be even and >= 4, got {}",
                self.facets
            )));
        }
        if self.degree_step == 0 {
            return Err(Error::Invariant("degree step must be >= 1".into()));
        }
        if self.grid_factor < 2 {
            return Err(Error::Invariant("grid factor must be >= 2".into()));
        }
        Ok(())
    }

    /// Per-coordinate scales: the largest coordinate distance from the
    /// centre to a generator of any body (1 where that distance is 0).
    pub fn scale(&self) -> Vec<f64> {
        let mut s = vec![0.0f64; self.dim()];
        for b in &self.bodies {
            for (acc, v) in s.iter_mut().zip(b.coord_spread(&self.center)) {
                *acc = acc.max(v);
            }
        }
        s.into_iter()
            .map(|v| if v > 0.0 { v } else { 1.0 })
            .collect()
    }

    pub fn fingerprint(&self) -> String {
        crate::scenario::fingerprint(self)
    }

    pub fn eps(&self, stage: usize) -> f64 {
        self.eps_rule.eps(stage)
    }

    /// `L_N`.
    pub fn exhaustion(&self, stage: usize) -> Result<ConvexBody> {
        exhaustion_compact(&self.domain, stage, self.mode)
    }

    /// `F_N = {ℓ : 1 ≤ |ℓ|₁ ≤ N}` in ainfty mode, empty otherwise.
    pub fn derivative_set(&self, stage: usize) -> Vec<DerivativeSymbol> {
        match self.mode {
            Mode::Holo => Vec::new(),
            Mode::AInfty => monomials_in_degree_range(self.dim(), 1, stage as u32),
        }
    }

    pub fn k_cloud(&self, body: usize) -> SampleCloud {
        sample(
            &self.bodies[body - 1],
            self.density,
            derive_seed(self.seed, &[SEED_K, body as u64]),
        )
    }

    pub fn l_cloud(&self, stage: usize, l_body: &ConvexBody) -> SampleCloud {
        sample(
            l_body,
            self.density,
            derive_seed(self.seed, &[SEED_L, stage as u64]),
        )
    }
}

const SEED_K: u64 = 1;
const SEED_L: u64 = 2;
const SEED_FINE_K: u64 = 3;
const SEED_FINE_L: u64 = 4;
const REFINE_ROUNDS: usize = 8;
const REFINE_POINTS: usize = 24;

/// One schedule slot; `body` and `target` are 1-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleEntry {
    pub stage: usize,
    pub body: usize,
    pub target: usize,
    pub eps: f64,
}

/// Pairs `(m, q)` listed along anti-diagonals `m + q = const` (ascending
/// `m` within a diagonal), then cycled so every pair recurs.
pub fn make_schedule(scenario: &Scenario) -> Vec<ScheduleEntry> {
    schedule_range(scenario, 1, scenario.stages)
}

fn pair_order(bodies: usize, targets: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(bodies * targets);
    if bodies == 0 || targets == 0 {
        return pairs;
    }
    for s in 0..bodies + targets - 1 {
        for m in 0..=s {
            let q = s - m;
            if m < bodies && q < targets {
                pairs.push((m + 1, q + 1));
            }
        }
    }
    pairs
}

fn schedule_range(scenario: &Scenario, first: usize, last: usize) -> Vec<ScheduleEntry> {
    let pairs = pair_order(scenario.bodies.len(), scenario.targets.len());
    if pairs.is_empty() {
        return Vec::new();
    }
    (first..=last)
        .map(|stage| {
            let (body, target) = pairs[(stage - 1) % pairs.len()];
            ScheduleEntry {
                stage,
                body,
                target,
                eps: scenario.eps(stage),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessStatus {
    Met,
    Unmet,
}

impl WitnessStatus {
    pub fn name(self) -> &'static str {
        match self {
            WitnessStatus::Met => "met",
            WitnessStatus::Unmet => "unmet",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessRecord {
    pub stage: usize,
    /// 1-based.
    pub body: usize,
    /// 1-based.
    pub target: usize,
    pub eps: f64,
    pub lambda: usize,
    pub tail_floor: u32,
    /// Degree budget of the accepted block, or the last one tried.
    pub degree: u32,
    /// `max |S_λ − P_q|` on the solver cloud of `K_m`.
    pub cloud_err: f64,
    /// The same on the builder's fine cloud.
    pub fine_err: f64,
    /// `max |block|` on the solver cloud of `L_N`.
    pub block_l: f64,
    /// `max |D^ℓ block|` on the solver cloud of `L_N`.
    pub block_derivatives: Vec<(DerivativeSymbol, f64)>,
    pub status: WitnessStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniversalSeries {
    pub scheme: EnumerationScheme,
    pub center: Point,
    pub scale: Vec<f64>,
    pub admissible: AdmissibleSet,
    pub mode: Mode,
    pub fingerprint: String,
    /// `a_j` for the basis element `((z − ζ)/σ)^{N_j}`; no gaps.
    pub coefficients: Vec<Complex64>,
    pub witnesses: Vec<WitnessRecord>,
}

impl UniversalSeries {
    pub fn empty(scenario: &Scenario) -> Self {
        Self {
            scheme: scenario.scheme.clone(),
            center: scenario.center.clone(),
            scale: scenario.scale(),
            admissible: scenario.admissible.clone(),
            mode: scenario.mode,
            fingerprint: scenario.fingerprint(),
            coefficients: Vec::new(),
            witnesses: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// `Σ_{j ≤ λ} a_j x_j`; `None` is the empty sum.
    pub fn partial_sum(&self, lambda: Option<usize>) -> Result<CenteredPolynomial> {
        let end = lambda.map_or(0, |l| (l + 1).min(self.coefficients.len()));
        self.ranks_to_polynomial(0, end)
    }

    /// Coefficients at ranks in `lo..hi` as a polynomial.
    pub fn ranks_to_polynomial(&self, lo: usize, hi: usize) -> Result<CenteredPolynomial> {
        let hi = hi.min(self.coefficients.len());
        let mut terms = Vec::new();
        for j in lo..hi {
            let c = self.coefficients[j];
            if c != Complex64::new(0.0, 0.0) {
                terms.push((self.scheme.unrank(j)?, c));
            }
        }
        CenteredPolynomial::from_terms(self.center.clone(), self.scale.clone(), terms)
    }

    /// The block appended at `stage` (1-based): ranks `(λ_{N−1}, λ_N]`.
    pub fn block(&self, stage: usize) -> Result<CenteredPolynomial> {
        let w = self
            .witnesses
            .get(stage.wrapping_sub(1))
            .ok_or_else(|| Error::InvalidRequest(format!("series has no stage {stage}")))?;
        let lo = if stage == 1 {
            0
        } else {
            self.witnesses[stage - 2].lambda + 1
        };
        self.ranks_to_polynomial(lo, w.lambda + 1)
    }

    /// Rank of the last stored coefficient.
    pub fn frontier(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    /// Smallest total degree that lies strictly above every rank stored.
    fn next_floor(&self) -> Result<u32> {
        let mut floor = 1;
        for j in 0..self.coefficients.len() {
            floor = floor.max(self.scheme.unrank(j)?.total_degree() + 1);
        }
        Ok(floor)
    }

    fn pad_to(&mut self, lambda: usize) {
        if self.coefficients.len() < lambda + 1 {
            self.coefficients
                .resize(lambda + 1, Complex64::new(0.0, 0.0));
        }
    }
}

/// Builds `scenario.stages` stages from scratch.
pub fn build_series(scenario: &Scenario) -> Result<UniversalSeries> {
    scenario.validate()?;
    let series = UniversalSeries::empty(scenario);
    extend_series(series, scenario, scenario.stages)
}

/// Runs `extra_stages` further stages. Every stage is a deterministic
/// function of the scenario, the stage number and the stream so far, so
/// building in pieces gives the same coefficients as building at once.
pub fn extend_series(
    mut series: UniversalSeries,
    scenario: &Scenario,
    extra_stages: usize,
) -> Result<UniversalSeries> {
    let expected = scenario.fingerprint();
    if series.fingerprint != expected {
        return Err(Error::FingerprintMismatch {
            expected,
            found: series.fingerprint.clone(),
        });
    }
    if extra_stages == 0 {
        return Ok(series);
    }
    scenario.validate()?;
    let first = series.witnesses.len() + 1;
    for entry in schedule_range(scenario, first, first + extra_stages - 1) {
        let record = run_stage(&mut series, scenario, &entry)?;
        series.witnesses.push(record);
    }
    Ok(series)
}

struct Accepted {
    block: BlockResult,
    degree: u32,
    fine_err: f64,
}

fn run_stage(
    series: &mut UniversalSeries,
    scenario: &Scenario,
    entry: &ScheduleEntry,
) -> Result<WitnessRecord> {
    let stage = entry.stage;
    let eps = entry.eps;
    let l_body = scenario.exhaustion(stage)?;
    let k_cloud = scenario.k_cloud(entry.body);
    let l_cloud = scenario.l_cloud(stage, &l_body);
    let target = scenario.targets[entry.target - 1].recenter(&series.center, &series.scale);
    let current = series.partial_sum(series.frontier())?;
    let residual = target.sub(&current)?;
    let floor = series.next_floor()?;
    let derivatives = scenario.derivative_set(stage);

    let k_body = &scenario.bodies[entry.body - 1];
    let fine_k = fine_cloud(
        k_body,
        k_cloud.len(),
        scenario.grid_factor,
        derive_seed(scenario.seed, &[SEED_FINE_K, entry.body as u64]),
    );
    let fine_l = fine_cloud(
        &l_body,
        l_cloud.len(),
        scenario.grid_factor,
        derive_seed(scenario.seed, &[SEED_FINE_L, stage as u64]),
    );
    // the builder's own fine check uses `ε_N` so that independent
    // verification clouds keep the acceptance slack as margin
    let bound = eps;

    let mut accepted: Option<Accepted> = None;
    let mut last_tried = floor;
    let mut k_work = k_cloud.clone();
    let mut l_work = l_cloud.clone();
    if floor <= scenario.degree_cap {
        let mut candidate = (floor + scenario.degree_start).min(scenario.degree_cap);
        'degrees: loop {
            let degree = aligned_degree(series, scenario, candidate.min(scenario.degree_cap))?;
            last_tried = degree;
            for _ in 0..=REFINE_ROUNDS {
                let req = ApproxRequest {
                    center: series.center.clone(),
                    scale: series.scale.clone(),
                    k_cloud: k_work.clone(),
                    l_cloud: l_work.clone(),
                    target: residual.clone(),
                    eps_l: STAGE_SAFETY * eps,
                    derivatives: derivatives.clone(),
                    tail_floor: floor,
                    degree_budget: degree,
                    facets: scenario.facets,
                    tolerance_k: Some(STAGE_SAFETY * eps),
                };
                let block = match tail_block_approx(&req) {
                    Ok(block) => block,
                    Err(Error::BudgetExceeded { .. }) => break,
                    Err(e) => return Err(e),
                };
                let k_vals: Vec<f64> = fine_k
                    .points
                    .iter()
                    .map(|z| (block.q.eval(z) - residual.eval(z)).norm())
                    .collect();
                let l_vals = block_values(&fine_l.points, &block.q, &derivatives);
                let fine_err = k_vals.iter().copied().fold(0.0, f64::max);
                let l_max = l_vals.iter().copied().fold(0.0, f64::max);
                if fine_err <= bound && l_max <= bound {
                    accepted = Some(Accepted {
                        block,
                        degree,
                        fine_err,
                    });
                    break 'degrees;
                }
                let k_add = worst_points(&fine_k.points, &k_vals, bound);
                let l_add = worst_points(&fine_l.points, &l_vals, bound);
                k_work.points.extend(k_add.iter().cloned());
                k_work.tags.extend(k_add.iter().map(|_| PointTag::Interior));
                l_work.points.extend(l_add.iter().cloned());
                l_work.tags.extend(l_add.iter().map(|_| PointTag::Interior));
            }
            if degree >= scenario.degree_cap {
                break;
            }
            candidate = (degree + scenario.degree_step).min(scenario.degree_cap);
        }
    }

    let record = match accepted {
        Some(acc) => {
            let mut last_rank = 0;
            for (nu, c) in acc.block.q.coeffs() {
                let r = series.scheme.rank(nu)?;
                series.pad_to(r);
                series.coefficients[r] = *c;
                last_rank = last_rank.max(r);
            }
            let frontier = series
                .scheme
                .max_rank_within_total_degree(acc.degree)?
                .max(last_rank);
            let lambda = scenario.admissible.next_admissible(frontier);
            series.pad_to(lambda);
            WitnessRecord {
                stage,
                body: entry.body,
                target: entry.target,
                eps,
                lambda,
                tail_floor: floor,
                degree: acc.degree,
                cloud_err: acc.block.achieved_k,
                fine_err: acc.fine_err,
                block_l: acc.block.achieved_l,
                block_derivatives: acc.block.achieved_derivatives,
                status: WitnessStatus::Met,
            }
        }
        None => {
            let start = series.frontier().map_or(0, |f| f + 1);
            let lambda = scenario.admissible.next_admissible(start);
            series.pad_to(lambda);
            let zero = CenteredPolynomial::zero(series.center.clone(), series.scale.clone());
            let fine_err = sup_diff(&fine_k.points, &zero, &residual);
            WitnessRecord {
                stage,
                body: entry.body,
                target: entry.target,
                eps,
                lambda,
                tail_floor: floor,
                degree: last_tried,
                cloud_err: sup_diff(&k_cloud.points, &zero, &residual),
                fine_err,
                block_l: 0.0,
                block_derivatives: derivatives.iter().map(|l| (l.clone(), 0.0)).collect(),
                status: WitnessStatus::Unmet,
            }
        }
    };
    Ok(record)
}

/// The largest degree `D ≤ cap` whose whole prefix fits below the admissible
/// rank that a block of degree `d` would be padded to; those padded ranks are
/// free for the block to use.
fn aligned_degree(series: &UniversalSeries, scenario: &Scenario, d: u32) -> Result<u32> {
    let lambda = scenario
        .admissible
        .next_admissible(series.scheme.max_rank_within_total_degree(d)?);
    let mut degree = d;
    while degree < scenario.degree_cap
        && series.scheme.max_rank_within_total_degree(degree + 1)? <= lambda
    {
        degree += 1;
    }
    Ok(degree)
}

fn sup_diff(points: &[Point], q: &CenteredPolynomial, g: &CenteredPolynomial) -> f64 {
    points
        .iter()
        .map(|z| (q.eval(z) - g.eval(z)).norm())
        .fold(0.0, f64::max)
}

fn block_values(points: &[Point], q: &CenteredPolynomial, derivatives: &[MultiIndex]) -> Vec<f64> {
    let dqs: Vec<CenteredPolynomial> = derivatives.iter().map(|l| q.derivative(l)).collect();
    points
        .iter()
        .map(|z| {
            dqs.iter()
                .map(|dq| dq.eval(z).norm())
                .fold(q.eval(z).norm(), f64::max)
        })
        .collect()
}

/// Up to `REFINE_POINTS` points with values above `bound`, largest first.
fn worst_points(points: &[Point], values: &[f64], bound: f64) -> Vec<Point> {
    let mut idx: Vec<usize> = (0..points.len()).filter(|&i| values[i] > bound).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    idx.truncate(REFINE_POINTS);
    idx.into_iter().map(|i| points[i].clone()).collect()
}
