use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use univtaylor::artifact;
use univtaylor::convexgeom::{intersection_witness, separate, Point, SampleCloud};
use univtaylor::dualapprox::{okaweil_approx, ApproxRequest};
use univtaylor::multiindex::{monomials_in_degree_range, MultiIndex};
use univtaylor::polynomial::CenteredPolynomial;
use univtaylor::rng::Lcg64;
use univtaylor::scenario::load;
use univtaylor::universal::{
    build_series, extend_series, Scenario, UniversalSeries, WitnessStatus,
};
use univtaylor::verify::{
    check_series_convergence, verify_all, RowStatus, Verification, VerifyOptions,
};
use univtaylor::{acceptance_slack, Complex64, Error};

const SLACK_FACTOR: f64 = 1.0706;
const TAIL_FACTOR: f64 = 1.5;
const RUNTIME_A: Duration = Duration::from_secs(60);
const RUNTIME_B: Duration = Duration::from_secs(300);
const IDENTITY_TOL: f64 = 1e-10;
const ORACLE_TOL: f64 = 1e-9;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn scenario(name: &str) -> Scenario {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    load(&dir.join(format!("{name}.json"))).expect("scenario loads")
}

struct Run {
    scenario: Scenario,
    series: UniversalSeries,
    verification: Verification,
    elapsed: Duration,
}

fn run(name: &str) -> Result<Run, Error> {
    let scenario = scenario(name);
    let t = Instant::now();
    let series = build_series(&scenario)?;
    let verification = verify_all(
        &series,
        &scenario,
        &VerifyOptions::new(scenario.grid_factor),
    )?;
    Ok(Run {
        scenario,
        series,
        verification,
        elapsed: t.elapsed(),
    })
}

fn rows<'a>(
    v: &'a Verification,
    check: &'a str,
) -> impl Iterator<Item = &'a univtaylor::verify::ReportRow> {
    v.rows.iter().filter(move |r| r.check == check)
}

/// Every stage met and every witness row within `2^-N · 1.0706`.
fn witnesses_ok(r: &Run) -> (bool, String) {
    let stages = r.scenario.stages;
    let met = r
        .series
        .witnesses
        .iter()
        .filter(|w| w.status == WitnessStatus::Met)
        .count();
    let mut worst = 0.0f64;
    let mut ok = met == stages && r.series.witnesses.len() == stages;
    let mut seen = 0;
    for row in rows(&r.verification, "witness") {
        seen += 1;
        let bound = 0.5f64.powi(row.stage as i32) * SLACK_FACTOR;
        worst = worst.max(row.fine_err / bound);
        ok &= row.status == RowStatus::Pass && row.fine_err <= bound;
    }
    ok &= seen == stages;
    (
        ok,
        format!("{met}/{stages} met, worst witness error/bound {worst:.3}"),
    )
}

fn disk_segment(a: &Result<Run, Error>) -> Outcome {
    match a {
        Ok(r) => {
            let (ok, detail) = witnesses_ok(r);
            let fast = r.elapsed <= RUNTIME_A;
            outcome(
                ok && fast,
                format!("{detail}, {:.1} s (limit 60 s)", r.elapsed.as_secs_f64()),
            )
        }
        Err(e) => outcome(false, format!("build failed: {e}")),
    }
}

fn ball_square(b: &Result<Run, Error>) -> Outcome {
    match b {
        Ok(r) => {
            let (ok, detail) = witnesses_ok(r);
            let fast = r.elapsed <= RUNTIME_B;
            outcome(
                ok && fast,
                format!("{detail}, {:.1} s (limit 300 s)", r.elapsed.as_secs_f64()),
            )
        }
        Err(e) => outcome(false, format!("build failed: {e}")),
    }
}

fn blocks_and_tail(a: &Result<Run, Error>) -> Outcome {
    let Ok(r) = a else {
        return outcome(false, "disk segment did not build");
    };
    let mut ok = true;
    let mut worst = 0.0f64;
    let mut seen = 0;
    for row in rows(&r.verification, "block") {
        seen += 1;
        let bound = 0.5f64.powi(row.stage as i32) * SLACK_FACTOR;
        worst = worst.max(row.fine_err / bound);
        ok &= row.status == RowStatus::Pass && row.fine_err <= bound;
    }
    ok &= seen == r.scenario.stages;
    let opts = VerifyOptions::new(r.scenario.grid_factor);
    let tail = match check_series_convergence(&r.series, &r.scenario, 2, &opts) {
        Ok((rows, _)) => rows.into_iter().find(|row| row.check == "tail"),
        Err(_) => None,
    };
    let tail_bound = 0.25 * TAIL_FACTOR;
    let (tail_ok, tail_err) = match tail {
        Some(t) => (
            t.fine_err <= tail_bound && t.status == RowStatus::Pass,
            t.fine_err,
        ),
        None => (false, f64::NAN),
    };
    outcome(
        ok && tail_ok,
        format!(
            "{seen} blocks, worst block error/bound {worst:.3}; tail on L_2 {tail_err:.3e} (bound {tail_bound})"
        ),
    )
}

fn progression(m: &Result<Run, Error>) -> Outcome {
    let Ok(r) = m else {
        return outcome(false, "progression scenario did not build");
    };
    let (ok, detail) = witnesses_ok(r);
    let mut aligned = true;
    let mut padded = 0usize;
    let mut padding_zero = true;
    for w in &r.series.witnesses {
        aligned &= w.lambda % 3 == 0;
        let used = r
            .series
            .scheme
            .max_rank_within_total_degree(w.degree)
            .unwrap_or(usize::MAX);
        for j in used.saturating_add(1)..=w.lambda {
            padded += 1;
            padding_zero &= r.series.coefficients[j] == Complex64::new(0.0, 0.0);
        }
    }
    let lambdas: Vec<String> = r
        .series
        .witnesses
        .iter()
        .map(|w| w.lambda.to_string())
        .collect();
    outcome(
        ok && aligned && padding_zero,
        format!(
            "lambdas [{}], {padded} padded coefficients all zero: {padding_zero}; {detail}",
            lambdas.join(", ")
        ),
    )
}

fn ainfty(runs: &[(&str, Result<Run, Error>)]) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, r) in runs {
        match r {
            Ok(r) => {
                let (w_ok, _) = witnesses_ok(r);
                let mut worst = 0.0f64;
                let mut seen = 0;
                let mut d_ok = true;
                for row in r
                    .verification
                    .rows
                    .iter()
                    .filter(|row| row.check.starts_with("derivative"))
                {
                    seen += 1;
                    let bound = 0.5f64.powi(row.stage as i32) * SLACK_FACTOR;
                    worst = worst.max(row.fine_err / bound);
                    d_ok &= row.status == RowStatus::Pass && row.fine_err <= bound;
                }
                ok &= w_ok && d_ok && seen > 0;
                parts.push(format!(
                    "{name}: {seen} derivative rows, worst error/bound {worst:.3}"
                ));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("{name}: build failed: {e}"));
            }
        }
    }
    outcome(ok, parts.join("; "))
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn oracle() -> Outcome {
    let req = ApproxRequest {
        center: vec![c(0.0)],
        scale: vec![1.0],
        k_cloud: SampleCloud::from_points(vec![vec![c(2.0)]]),
        l_cloud: SampleCloud::from_points(vec![vec![c(0.0)]]),
        target: CenteredPolynomial::constant(vec![c(0.0)], vec![1.0], c(2.0)),
        eps_l: 1e-10,
        derivatives: vec![],
        tail_floor: 0,
        degree_budget: 1,
        facets: 16,
        tolerance_k: None,
    };
    match okaweil_approx(&req) {
        Ok(r) => {
            let a0 = r.q.coeff(&MultiIndex::new(vec![0]));
            let a1 = r.q.coeff(&MultiIndex::new(vec![1]));
            let dev = a0.norm().max((a1 - c(1.0)).norm());
            outcome(
                r.lp_objective.abs() <= ORACLE_TOL && dev <= ORACLE_TOL,
                format!(
                    "objective {:.2e}, max coefficient deviation from Q(z) = z {dev:.2e}",
                    r.lp_objective
                ),
            )
        }
        Err(e) => outcome(false, format!("solver failed: {e}")),
    }
}

fn random_point(g: &mut Lcg64, n: usize, center: &[f64], radius: f64) -> Point {
    let d = 2 * n;
    let mut v: Vec<f64> = (0..d).map(|_| g.normal()).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
    let r = radius * g.next_f64().powf(1.0 / d as f64);
    v.iter_mut()
        .zip(center)
        .for_each(|(x, c0)| *x = c0 + *x / norm * r);
    v.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect()
}

fn unit_vector(g: &mut Lcg64, d: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..d).map(|_| g.normal()).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
    v.into_iter().map(|x| x / norm).collect()
}

fn in_box(x: &[Complex64], pts: &[Point]) -> bool {
    (0..x.len()).all(|k| {
        let (lo_re, hi_re) = pts
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
                (a.min(p[k].re), b.max(p[k].re))
            });
        let (lo_im, hi_im) = pts
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
                (a.min(p[k].im), b.max(p[k].im))
            });
        let t = 1e-6;
        x[k].re >= lo_re - t && x[k].re <= hi_re + t && x[k].im >= lo_im - t && x[k].im <= hi_im + t
    })
}

fn separation() -> Outcome {
    let mut g = Lcg64::new(0x5e9a_7a7e);
    let mut certified = 0;
    let mut min_margin = f64::INFINITY;
    for _ in 0..100 {
        let n = 1 + (g.next_u64() % 2) as usize;
        let d = 2 * n;
        let c1: Vec<f64> = (0..d).map(|_| g.uniform(-2.0, 2.0)).collect();
        let gap = g.uniform(0.1, 1.0);
        let u = unit_vector(&mut g, d);
        let c2: Vec<f64> = c1
            .iter()
            .zip(&u)
            .map(|(a, b)| a + b * (2.0 + gap))
            .collect();
        let ka = 1 + (g.next_u64() % 6) as usize;
        let kb = 1 + (g.next_u64() % 6) as usize;
        let a: Vec<Point> = (0..ka).map(|_| random_point(&mut g, n, &c1, 1.0)).collect();
        let b: Vec<Point> = (0..kb).map(|_| random_point(&mut g, n, &c2, 1.0)).collect();
        if let Ok(cert) = separate(&a, &b) {
            let m = cert.verified_margin(&a, &b);
            min_margin = min_margin.min(m);
            if m > 0.0 {
                certified += 1;
            }
        }
    }
    let mut inseparable = 0;
    for _ in 0..20 {
        let n = 1 + (g.next_u64() % 2) as usize;
        let d = 2 * n;
        let c0: Vec<f64> = (0..d).map(|_| g.uniform(-2.0, 2.0)).collect();
        let mut a = Vec::new();
        let mut b = Vec::new();
        for _ in 0..1 + g.next_u64() % 3 {
            let p = random_point(&mut g, n, &vec![0.0; d], 1.0);
            a.push(
                c0.chunks(2)
                    .zip(&p)
                    .map(|(c, v)| Complex64::new(c[0], c[1]) + v)
                    .collect::<Point>(),
            );
            a.push(
                c0.chunks(2)
                    .zip(&p)
                    .map(|(c, v)| Complex64::new(c[0], c[1]) - v)
                    .collect::<Point>(),
            );
        }
        for _ in 0..1 + g.next_u64() % 3 {
            let p = random_point(&mut g, n, &vec![0.0; d], 1.0);
            b.push(
                c0.chunks(2)
                    .zip(&p)
                    .map(|(c, v)| Complex64::new(c[0], c[1]) + v)
                    .collect::<Point>(),
            );
            b.push(
                c0.chunks(2)
                    .zip(&p)
                    .map(|(c, v)| Complex64::new(c[0], c[1]) - v)
                    .collect::<Point>(),
            );
        }
        let refused = matches!(separate(&a, &b), Err(Error::Inseparable(_)));
        let common = matches!(
            intersection_witness(&a, &b),
            Ok(Some(ref x)) if in_box(x, &a) && in_box(x, &b)
        );
        if refused && common {
            inseparable += 1;
        }
    }
    outcome(
        certified == 100 && inseparable == 20,
        format!(
            "{certified}/100 disjoint pairs certified (smallest verified margin {min_margin:.3}), \
             {inseparable}/20 overlapping pairs inseparable with a common point"
        ),
    )
}

fn random_polynomial(g: &mut Lcg64) -> CenteredPolynomial {
    let n = 1 + (g.next_u64() % 2) as usize;
    let deg = 1 + (g.next_u64() % 6) as u32;
    let center: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(g.uniform(-1.0, 1.0), g.uniform(-1.0, 1.0)))
        .collect();
    let scale: Vec<f64> = (0..n).map(|_| g.uniform(0.5, 2.0)).collect();
    let terms: Vec<_> = monomials_in_degree_range(n, 0, deg)
        .into_iter()
        .map(|nu| (nu, Complex64::new(g.normal(), g.normal())))
        .collect();
    CenteredPolynomial::from_terms(center, scale, terms).expect("well-formed polynomial")
}

fn coeff_sup(p: &CenteredPolynomial) -> f64 {
    p.coeffs().values().map(|c| c.norm()).fold(0.0, f64::max)
}

fn identities(a4: &Result<(UniversalSeries, UniversalSeries), Error>) -> Outcome {
    let mut g = Lcg64::new(0x1de7_0001);
    let mut worst_round = 0.0f64;
    let mut worst_taylor = 0.0f64;
    for _ in 0..100 {
        let p = random_polynomial(&mut g);
        let n = p.dim();
        let at: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(g.uniform(-1.0, 1.0), g.uniform(-1.0, 1.0)))
            .collect();
        let sc: Vec<f64> = (0..n).map(|_| g.uniform(0.5, 2.0)).collect();
        let back = p.recenter(&at, &sc).recenter(p.center(), p.scale());
        let scale = coeff_sup(&p).max(f64::MIN_POSITIVE);
        let diff = back.sub(&p).map(|d| coeff_sup(&d)).unwrap_or(f64::INFINITY);
        worst_round = worst_round.max(diff / scale);
        let deg = p.max_total_degree().unwrap_or(0);
        let pairs: Vec<(Complex64, Complex64)> = monomials_in_degree_range(n, 0, deg)
            .iter()
            .map(|nu| {
                (
                    p.taylor_coefficient(&at, nu),
                    p.taylor_coefficient_via_recenter(&at, nu),
                )
            })
            .collect();
        let size = pairs
            .iter()
            .map(|(x, _)| x.norm())
            .fold(f64::MIN_POSITIVE, f64::max);
        let dev = pairs
            .iter()
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        worst_taylor = worst_taylor.max(dev / size);
    }
    let (prefix_ok, prefix) = match a4 {
        Ok((whole, pieces)) => (
            whole == pieces,
            if whole == pieces {
                "bit-identical"
            } else {
                "differs"
            },
        ),
        Err(_) => (false, "build failed"),
    };
    outcome(
        worst_round <= IDENTITY_TOL && worst_taylor <= IDENTITY_TOL && prefix_ok,
        format!(
            "recentre round trip {worst_round:.2e}, Taylor coefficient routes {worst_taylor:.2e}, \
             T=4 vs 2+2 {prefix}"
        ),
    )
}

fn mutation(a: &Result<Run, Error>) -> Outcome {
    let Ok(r) = a else {
        return outcome(false, "disk segment did not build");
    };
    let dir = match tempfile::tempdir() {
        Ok(d) => d,
        Err(e) => return outcome(false, format!("no temp dir: {e}")),
    };
    let path = dir.path().join("series.txt");
    if let Err(e) = artifact::save(&r.series, &path) {
        return outcome(false, format!("save failed: {e}"));
    }
    let opts = VerifyOptions::new(r.scenario.grid_factor);
    let mut detected = 0;
    let mut counts = Vec::new();
    for w in &r.series.witnesses {
        let Ok(mut mutated) = artifact::load(Path::new(&path)) else {
            return outcome(false, "artifact does not load");
        };
        let lo = if w.stage == 1 {
            0
        } else {
            r.series.witnesses[w.stage - 2].lambda + 1
        };
        let j = (lo..=w.lambda)
            .max_by(|x, y| {
                mutated.coefficients[*x]
                    .norm()
                    .total_cmp(&mutated.coefficients[*y].norm())
            })
            .unwrap_or(lo);
        mutated.coefficients[j] = -mutated.coefficients[j];
        let failures = verify_all(&mutated, &r.scenario, &opts)
            .map(|v| v.failures())
            .unwrap_or(0);
        counts.push(failures.to_string());
        if failures >= 1 {
            detected += 1;
        }
    }
    let stages = r.series.witnesses.len();
    outcome(
        detected == stages && stages > 0,
        format!(
            "{detected}/{stages} single sign flips detected (failures per flipped block: {})",
            counts.join(", ")
        ),
    )
}

fn seed_stability(runs: &[(&str, &Result<Run, Error>)]) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, r) in runs {
        let Ok(r) = r else {
            ok = false;
            parts.push(format!("{name}: no build"));
            continue;
        };
        let statuses = |round: u64| -> Option<Vec<RowStatus>> {
            let opts = VerifyOptions {
                grid_factor: r.scenario.grid_factor,
                round,
            };
            verify_all(&r.series, &r.scenario, &opts)
                .ok()
                .map(|v| v.rows.iter().map(|row| row.status).collect())
        };
        let first = statuses(0);
        let stable = first.is_some() && (1..3).all(|k| statuses(k) == first);
        ok &= stable;
        parts.push(format!(
            "{name} {}",
            if stable { "stable" } else { "unstable" }
        ));
    }
    outcome(ok, format!("3 verification rounds: {}", parts.join(", ")))
}

fn main() -> ExitCode {
    assert!((acceptance_slack() - SLACK_FACTOR).abs() < 1e-4);
    let a = run("disk_segment");
    let b = run("ball_square");
    let mod3 = run("disk_segment_mod3");
    let interior = run("smooth_interior");
    let boundary = run("smooth_boundary");
    let a4 = {
        let mut s = scenario("disk_segment");
        s.stages = 4;
        build_series(&s).and_then(|whole| {
            let half = extend_series(UniversalSeries::empty(&s), &s, 2)?;
            Ok((whole, extend_series(half, &s, 2)?))
        })
    };
    let results = [
        ("1 disk segment (n=1, T=6)", disk_segment(&a)),
        ("2 ball square (n=2, T=4)", ball_square(&b)),
        (
            "3 block smallness and tail on disk segment",
            blocks_and_tail(&a),
        ),
        ("4 admissible progression 3k", progression(&mod3)),
        (
            "5 derivative control (smooth interior and boundary)",
            ainfty(&[("zeta=0.5", interior), ("zeta=1", boundary)]),
        ),
        ("6 two-point oracle", oracle()),
        ("7 separation soundness and completeness", separation()),
        ("8 exactness identities", identities(&a4)),
        ("9 mutation sensitivity on disk segment", mutation(&a)),
        (
            "10 verification seed stability",
            seed_stability(&[("disk", &a), ("ball", &b), ("3k", &mod3)]),
        ),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} {name}: {}", o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
