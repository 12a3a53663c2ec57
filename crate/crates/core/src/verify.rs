//! Independent verification of a built series.
//!
//! Nothing here reads an error value produced by the solver: every sup is
//! recomputed from the stored coefficients on clouds drawn with their own
//! seeds and a different point rule (stratified segments plus uniform
//! interior points) from the solver clouds.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::convexgeom::{
    exhaustion_compact, sample, stratified_cloud, ConvexBody, ConvexDomain, Point, SampleCloud,
};
use crate::multiindex::{monomials_in_degree_range, MultiIndex};
use crate::polynomial::CenteredPolynomial;
use crate::rng::derive_seed;
use crate::universal::{Mode, Scenario, UniversalSeries, WitnessStatus};
use crate::{acceptance_slack, Error, Result};

/// Factor on the cumulative tail bound `Σ_{k>N₀} ε_k`.
pub const TAIL_GUARD: f64 = 1.5;

const SEED_VERIFY: u64 = 11;
const MIN_PER_SEGMENT: usize = 8;

/// About `grid_factor · base` points: half spread over the segments between
/// generator pairs, half uniform in the hull.
pub fn fine_cloud(body: &ConvexBody, base: usize, grid_factor: usize, seed: u64) -> SampleCloud {
    let g = body.generators().len();
    let total = grid_factor * base.max(g);
    let pairs = g * (g.saturating_sub(1)) / 2;
    if pairs == 0 {
        return stratified_cloud(body, 0, 0, seed);
    }
    let per_segment = (total / 2).div_ceil(pairs).max(MIN_PER_SEGMENT);
    stratified_cloud(body, per_segment, total / 2, seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    Pass,
    Fail,
    /// Reported without a threshold.
    Info,
    /// Assertion not applicable (for instance a non-summable tolerance rule).
    Skipped,
}

impl RowStatus {
    pub fn name(self) -> &'static str {
        match self {
            RowStatus::Pass => "pass",
            RowStatus::Fail => "fail",
            RowStatus::Info => "info",
            RowStatus::Skipped => "skipped",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "pass" => Some(RowStatus::Pass),
            "fail" => Some(RowStatus::Fail),
            "info" => Some(RowStatus::Info),
            "skipped" => Some(RowStatus::Skipped),
            _ => None,
        }
    }

    fn judge(value: f64, bound: f64) -> Self {
        if value <= bound {
            RowStatus::Pass
        } else {
            RowStatus::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    /// `witness`, `block`, `step`, `tail`, `derivative(ℓ)` or `recentered`.
    pub check: String,
    pub stage: usize,
    pub body: usize,
    pub target: usize,
    pub eps: f64,
    pub lambda: usize,
    /// Error recorded by the builder, shown for comparison only.
    pub cloud_err: Option<f64>,
    pub fine_err: f64,
    pub bound: Option<f64>,
    pub status: RowStatus,
    /// Expansion centre for recentered rows.
    pub at: Option<Point>,
}

impl ReportRow {
    pub fn is_failure(&self) -> bool {
        self.status == RowStatus::Fail
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub grid_factor: usize,
    /// Selects one of several independent verification seeds.
    pub round: u64,
}

impl VerifyOptions {
    pub fn new(grid_factor: usize) -> Self {
        Self {
            grid_factor,
            round: 0,
        }
    }

    fn seed(&self, scenario: &Scenario, tags: &[u64]) -> u64 {
        let base = derive_seed(scenario.seed, &[SEED_VERIFY, self.round]);
        derive_seed(base, tags)
    }
}

fn sup_on(points: &[Point], f: impl Fn(&[Complex64]) -> Complex64 + Sync) -> f64 {
    points
        .par_iter()
        .map(|z| f(z).norm())
        .reduce(|| 0.0, f64::max)
}

fn check_grid_factor(g: usize) -> Result<()> {
    if g < 2 {
        return Err(Error::InvalidRequest(format!(
            "grid factor must be >= 2, got {g}"
        )));
    }
    Ok(())
}

fn k_fine(scenario: &Scenario, body: usize, opts: &VerifyOptions) -> SampleCloud {
    let b = &scenario.bodies[body - 1];
    fine_cloud(
        b,
        b.generators().len() + scenario.density,
        opts.grid_factor,
        opts.seed(scenario, &[1, body as u64]),
    )
}

fn l_fine(scenario: &Scenario, stage: usize, opts: &VerifyOptions) -> Result<SampleCloud> {
    let l = scenario.exhaustion(stage)?;
    Ok(fine_cloud(
        &l,
        l.generators().len() + scenario.density,
        opts.grid_factor,
        opts.seed(scenario, &[2, stage as u64]),
    ))
}

fn check_fingerprint(series: &UniversalSeries, scenario: &Scenario) -> Result<()> {
    let expected = scenario.fingerprint();
    if series.fingerprint != expected {
        return Err(Error::FingerprintMismatch {
            expected,
            found: series.fingerprint.clone(),
        });
    }
    Ok(())
}

/// For every witness, `sup |S_{λ_N} − P_q|` over a fresh fine cloud of
/// `K_m`, against `ε_N · acceptance_slack()`.
pub fn check_universal_witnesses(
    series: &UniversalSeries,
    scenario: &Scenario,
    opts: &VerifyOptions,
) -> Result<Vec<ReportRow>> {
    check_grid_factor(opts.grid_factor)?;
    check_fingerprint(series, scenario)?;
    let slack = acceptance_slack();
    series
        .witnesses
        .iter()
        .map(|w| {
            let cloud = k_fine(scenario, w.body, opts);
            let s = series.partial_sum(Some(w.lambda))?;
            let p = scenario.targets[w.target - 1].recenter(&series.center, &series.scale);
            let fine_err = sup_on(&cloud.points, |z| s.eval(z) - p.eval(z));
            let bound = w.eps * slack;
            Ok(ReportRow {
                check: "witness".into(),
                stage: w.stage,
                body: w.body,
                target: w.target,
                eps: w.eps,
                lambda: w.lambda,
                cloud_err: Some(w.cloud_err),
                fine_err,
                bound: Some(bound),
                status: RowStatus::judge(fine_err, bound),
                at: None,
            })
        })
        .collect()
}

/// `sup |block_N|` over a fine cloud of `L_N` for every stage, against
/// `ε_N · acceptance_slack()`.
pub fn check_block_smallness(
    series: &UniversalSeries,
    scenario: &Scenario,
    opts: &VerifyOptions,
) -> Result<Vec<ReportRow>> {
    check_grid_factor(opts.grid_factor)?;
    check_fingerprint(series, scenario)?;
    let slack = acceptance_slack();
    series
        .witnesses
        .iter()
        .map(|w| {
            let block = series.block(w.stage)?;
            let cloud = l_fine(scenario, w.stage, opts)?;
            let fine_err = sup_on(&cloud.points, |z| block.eval(z));
            let bound = w.eps * slack;
            Ok(ReportRow {
                check: "block".into(),
                stage: w.stage,
                body: w.body,
                target: w.target,
                eps: w.eps,
                lambda: w.lambda,
                cloud_err: Some(w.block_l),
                fine_err,
                bound: Some(bound),
                status: RowStatus::judge(fine_err, bound),
                at: None,
            })
        })
        .collect()
}

/// Convergence on the fixed compact `L_{N₀}`: one `step` row per stage
/// `N > N₀` (the block, against `ε_N · acceptance_slack()`) and one `tail`
/// row for `S_{λ_last} − S_{λ_{N₀}}` against `TAIL_GUARD · Σ_{k>N₀} ε_k`.
/// The tail row is skipped, with a warning, when the tolerance rule is not
/// summable.
pub fn check_series_convergence(
    series: &UniversalSeries,
    scenario: &Scenario,
    n0: usize,
    opts: &VerifyOptions,
) -> Result<(Vec<ReportRow>, Vec<String>)> {
    check_grid_factor(opts.grid_factor)?;
    check_fingerprint(series, scenario)?;
    let mut warnings = Vec::new();
    if n0 == 0 || series.witnesses.len() < n0 {
        return Err(Error::InvalidRequest(format!(
            "convergence check at stage {n0} needs that many witnesses, series has {}",
            series.witnesses.len()
        )));
    }
    let cloud = l_fine(scenario, n0, opts)?;
    let slack = acceptance_slack();
    let mut rows = Vec::new();
    for w in &series.witnesses[n0..] {
        let block = series.block(w.stage)?;
        let fine_err = sup_on(&cloud.points, |z| block.eval(z));
        let bound = w.eps * slack;
        rows.push(ReportRow {
            check: "step".into(),
            stage: w.stage,
            body: w.body,
            target: w.target,
            eps: w.eps,
            lambda: w.lambda,
            cloud_err: None,
            fine_err,
            bound: Some(bound),
            status: RowStatus::judge(fine_err, bound),
            at: None,
        });
    }
    let base = &series.witnesses[n0 - 1];
    let last = series.witnesses.last().unwrap();
    let tail = series.ranks_to_polynomial(base.lambda + 1, last.lambda + 1)?;
    let fine_err = sup_on(&cloud.points, |z| tail.eval(z));
    let (bound, status) = match scenario.eps_rule.tail_sum(n0) {
        Some(t) => (
            Some(t * TAIL_GUARD),
            RowStatus::judge(fine_err, t * TAIL_GUARD),
        ),
        None => {
            warnings.push(format!(
                "tolerance rule {} is not summable; cumulative tail bound on L_{n0} not asserted",
                scenario.eps_rule.name()
            ));
            (None, RowStatus::Skipped)
        }
    };
    rows.push(ReportRow {
        check: "tail".into(),
        stage: n0,
        body: base.body,
        target: base.target,
        eps: base.eps,
        lambda: last.lambda,
        cloud_err: None,
        fine_err,
        bound,
        status,
        at: None,
    });
    Ok((rows, warnings))
}

/// In ainfty mode: for every stage and every `ℓ ∈ F_N`, `sup |D^ℓ block_N|`
/// over a fine cloud of `L_N` against `ε_N · acceptance_slack()`.
pub fn check_ainfty_derivatives(
    series: &UniversalSeries,
    scenario: &Scenario,
    opts: &VerifyOptions,
) -> Result<Vec<ReportRow>> {
    if series.mode != Mode::AInfty || scenario.mode != Mode::AInfty {
        return Err(Error::ModeMismatch { expected: "ainfty" });
    }
    check_grid_factor(opts.grid_factor)?;
    check_fingerprint(series, scenario)?;
    let slack = acceptance_slack();
    let mut rows = Vec::new();
    for w in &series.witnesses {
        let block = series.block(w.stage)?;
        let cloud = l_fine(scenario, w.stage, opts)?;
        for ell in scenario.derivative_set(w.stage) {
            let d = block.derivative(&ell);
            let fine_err = sup_on(&cloud.points, |z| d.eval(z));
            let bound = w.eps * slack;
            let recorded = w
                .block_derivatives
                .iter()
                .find(|(l, _)| *l == ell)
                .map(|(_, v)| *v);
            rows.push(ReportRow {
                check: format!("derivative{ell}"),
                stage: w.stage,
                body: w.body,
                target: w.target,
                eps: w.eps,
                lambda: w.lambda,
                cloud_err: recorded,
                fine_err,
                bound: Some(bound),
                status: RowStatus::judge(fine_err, bound),
                at: None,
            });
        }
    }
    Ok(rows)
}

/// Partial sums of `F_N = S_{λ_N}` re-expanded at each point `ζ′` of a cloud
/// of `centers` and truncated at `λ_N` again, compared with `P_q` on a fine
/// cloud of `K_m`. Informational: no threshold.
pub fn check_recentered_sums(
    series: &UniversalSeries,
    scenario: &Scenario,
    centers: &ConvexBody,
    stage: usize,
    density: usize,
    opts: &VerifyOptions,
) -> Result<Vec<ReportRow>> {
    check_grid_factor(opts.grid_factor)?;
    check_fingerprint(series, scenario)?;
    let w = series
        .witnesses
        .get(stage.wrapping_sub(1))
        .ok_or_else(|| Error::InvalidRequest(format!("series has no stage {stage}")))?;
    let cloud = sample(centers, density, opts.seed(scenario, &[3, stage as u64]));
    if let Some(p) = cloud
        .points
        .iter()
        .find(|p| !scenario.domain.contains_closure(p, 1e-9))
    {
        return Err(Error::Membership(format!(
            "expansion centre {p:?} lies outside the closed domain"
        )));
    }
    let f = series.partial_sum(Some(w.lambda))?;
    let target = scenario.targets[w.target - 1].recenter(&series.center, &series.scale);
    let kc = k_fine(scenario, w.body, opts);
    cloud
        .points
        .iter()
        .map(|zeta| {
            let s = f
                .recenter(zeta, &series.scale)
                .truncate_to_prefix(&series.scheme, w.lambda)?;
            let fine_err = sup_on(&kc.points, |z| s.eval(z) - target.eval(z));
            Ok(ReportRow {
                check: "recentered".into(),
                stage: w.stage,
                body: w.body,
                target: w.target,
                eps: w.eps,
                lambda: w.lambda,
                cloud_err: None,
                fine_err,
                bound: None,
                status: RowStatus::Info,
                at: Some(zeta.clone()),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DilationRow {
    pub r: f64,
    /// `sup |P − P_r|`.
    pub value_err: f64,
    /// `max_k sup |∂_k P − ∂_k P_r|`.
    pub derivative_err: f64,
    pub status: RowStatus,
}

/// `sup |P − P(r·)|` and first-derivative differences over a cloud of
/// `Ω̄ ∩ D̄(0, R)` (`R` the bounding radius of `Ω`, or 1) for each `r`.
/// Radii are processed in ascending order; a row passes when neither sup
/// exceeds the previous row's (up to `1e−12` relative) and, at `r = 1`,
/// both are at most `1e−9`.
pub fn dilation_density_check(
    p: &CenteredPolynomial,
    domain: &ConvexDomain,
    radii: &[f64],
    density: usize,
    seed: u64,
) -> Result<Vec<DilationRow>> {
    let n = p.dim();
    if domain.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: domain.dim(),
            got: n,
        });
    }
    let origin = vec![Complex64::new(0.0, 0.0); n];
    if !domain.contains_open(&origin) {
        return Err(Error::Membership(
            "the origin does not lie in the domain".into(),
        ));
    }
    let stage = domain
        .bound_radius()
        .map_or(1, |r| r.ceil().max(1.0) as usize);
    let body = exhaustion_compact(domain, stage, Mode::AInfty)?;
    let cloud = fine_cloud(&body, body.generators().len() + density, 10, seed);
    let firsts: Vec<MultiIndex> = monomials_in_degree_range(n, 1, 1);
    let dp: Vec<CenteredPolynomial> = firsts.iter().map(|l| p.derivative(l)).collect();
    let mut rs: Vec<f64> = radii.to_vec();
    rs.sort_by(f64::total_cmp);
    let mut rows: Vec<DilationRow> = Vec::with_capacity(rs.len());
    for r in rs {
        let pr = p.dilate(r)?;
        let value_err = sup_on(&cloud.points, |z| p.eval(z) - pr.eval(z));
        let derivative_err = firsts
            .iter()
            .zip(&dp)
            .map(|(l, d)| {
                let dr = pr.derivative(l);
                sup_on(&cloud.points, |z| d.eval(z) - dr.eval(z))
            })
            .fold(0.0, f64::max);
        let monotone = rows.last().is_none_or(|prev| {
            value_err <= prev.value_err * (1.0 + 1e-12)
                && derivative_err <= prev.derivative_err * (1.0 + 1e-12)
        });
        let at_one = r != 1.0 || (value_err <= 1e-9 && derivative_err <= 1e-9);
        let status = if monotone && at_one {
            RowStatus::Pass
        } else {
            RowStatus::Fail
        };
        rows.push(DilationRow {
            r,
            value_err,
            derivative_err,
            status,
        });
    }
    Ok(rows)
}

/// Everything `run` and `verify` report.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Verification {
    pub rows: Vec<ReportRow>,
    pub warnings: Vec<String>,
}

impl Verification {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.is_failure()).count()
    }
}

/// Witness, block and derivative checks, plus the convergence check on
/// `L_2` (or `L_1` when the series is too short for `L_2`).
pub fn verify_all(
    series: &UniversalSeries,
    scenario: &Scenario,
    opts: &VerifyOptions,
) -> Result<Verification> {
    let mut v = Verification::default();
    v.rows
        .extend(check_universal_witnesses(series, scenario, opts)?);
    v.rows
        .extend(check_block_smallness(series, scenario, opts)?);
    let k = series.witnesses.len();
    let n0 = if k >= 4 {
        Some(2)
    } else if k >= 2 {
        Some(1)
    } else {
        None
    };
    if let Some(n0) = n0 {
        let (rows, warnings) = check_series_convergence(series, scenario, n0, opts)?;
        v.rows.extend(rows);
        v.warnings.extend(warnings);
    }
    if scenario.mode == Mode::AInfty {
        v.rows
            .extend(check_ainfty_derivatives(series, scenario, opts)?);
    }
    if !scenario.eps_rule.is_summable() {
        v.warnings.push(format!(
            "tolerance rule {} is not summable",
            scenario.eps_rule.name()
        ));
    }
    for w in &series.witnesses {
        if w.status == WitnessStatus::Unmet {
            v.warnings.push(format!(
                "stage {} (body {}, target {}) was not met",
                w.stage, w.body, w.target
            ));
        }
    }
    Ok(v)
}
