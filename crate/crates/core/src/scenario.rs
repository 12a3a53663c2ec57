//! Scenario files (JSON, `"version": 1`).
//!
//! ```json
//! {
//!   "version": 1,
//!   "id": "disk-segment",
//!   "domain": { "ball": { "center": [0, 0], "radius": 1.0, "facets": 16 } },
//!   "center": [0, 0],
//!   "scheme": "graded_lex",
//!   "admissible": "all",
//!   "bodies": [ { "hull": [[2, 0], [3, 0]] } ],
//!   "targets": [ { "terms": [ { "exponents": [0], "re": 1, "im": 0 } ] } ],
//!   "mode": "holo",
//!   "stages": 6
//! }
//! ```
//!
//! A point of `C^n` is written as the flat list `[re₁, im₁, …, reₙ, imₙ]`.
//! Domains are either `{"ball": {center, radius, facets}}` or
//! `{"halfspaces": [{"u": [...], "s": ...}], "witness": point}` with
//! `Ω = {z : u·(Re z₁, Im z₁, …) < s}`. Schemes are `"graded_lex"`,
//! `"euclidean"` or `{"custom": {"table": [[...]], "extension": "graded_lex"}}`.
//! Admissible sets are `"all"`, `{"progression": {"start", "step"}}` or
//! `{"explicit": {"values", "extension_step"}}`. A target may carry its own
//! `center` and `scale` (defaults: the origin and all ones). Every other
//! field is optional and takes the defaults listed on [`ScenarioFile`].

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::convexgeom::{ConvexBody, ConvexDomain, HalfSpace, Point};
use crate::multiindex::{AdmissibleSet, EnumerationScheme, MultiIndex, TableExtension};
use crate::polynomial::CenteredPolynomial;
use crate::universal::{EpsRule, Mode, Scenario};
use crate::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub version: u32,
    #[serde(default = "default_id")]
    pub id: String,
    pub domain: DomainSpec,
    pub center: Vec<f64>,
    #[serde(default = "default_scheme")]
    pub scheme: SchemeSpec,
    #[serde(default = "default_admissible")]
    pub admissible: AdmissibleSpec,
    pub bodies: Vec<BodySpec>,
    pub targets: Vec<PolynomialSpec>,
    #[serde(default = "default_mode")]
    pub mode: String,
    #[serde(default = "default_stages")]
    pub stages: usize,
    #[serde(default = "default_eps_rule")]
    pub eps_rule: String,
    #[serde(default = "default_degree_cap")]
    pub degree_cap: u32,
    #[serde(default = "default_degree_start")]
    pub degree_start: u32,
    #[serde(default = "default_degree_step")]
    pub degree_step: u32,
    #[serde(default = "default_density")]
    pub density: usize,
    #[serde(default = "default_facets")]
    pub facets: usize,
    #[serde(default = "default_grid_factor")]
    pub grid_factor: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_id() -> String {
    "scenario".into()
}
fn default_scheme() -> SchemeSpec {
    SchemeSpec::Named("graded_lex".into())
}
fn default_admissible() -> AdmissibleSpec {
    AdmissibleSpec::Named("all".into())
}
fn default_mode() -> String {
    "holo".into()
}
fn default_stages() -> usize {
    4
}
fn default_eps_rule() -> String {
    "geometric".into()
}
fn default_degree_cap() -> u32 {
    40
}
fn default_degree_start() -> u32 {
    1
}
fn default_degree_step() -> u32 {
    1
}
fn default_density() -> usize {
    128
}
fn default_facets() -> usize {
    16
}
fn default_grid_factor() -> usize {
    10
}
fn default_seed() -> u64 {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum DomainSpec {
    Ball {
        ball: BallSpec,
    },
    HalfSpaces {
        halfspaces: Vec<HalfSpaceSpec>,
        witness: Vec<f64>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BallSpec {
    pub center: Vec<f64>,
    pub radius: f64,
    #[serde(default)]
    pub facets: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct HalfSpaceSpec {
    pub u: Vec<f64>,
    pub s: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum SchemeSpec {
    Named(String),
    Custom { custom: CustomSpec },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CustomSpec {
    pub table: Vec<Vec<u32>>,
    #[serde(default)]
    pub extension: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum AdmissibleSpec {
    Named(String),
    Progression { progression: ProgressionSpec },
    Explicit { explicit: ExplicitSpec },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProgressionSpec {
    pub start: usize,
    pub step: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExplicitSpec {
    pub values: Vec<usize>,
    pub extension_step: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BodySpec {
    pub hull: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PolynomialSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<Vec<f64>>,
    pub terms: Vec<TermSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub exponents: Vec<u32>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

pub fn point_from_flat(v: &[f64], n: usize, what: &str) -> Result<Point> {
    if v.len() != 2 * n {
        return Err(Error::Parse(format!(
            "{what}: expected {} reals for a point of C^{n}, got {}",
            2 * n,
            v.len()
        )));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Parse(format!("{what}: non-finite coordinate")));
    }
    Ok(v.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect())
}

pub fn point_to_flat(z: &[Complex64]) -> Vec<f64> {
    z.iter().flat_map(|c| [c.re, c.im]).collect()
}

pub fn polynomial_from_spec(
    p: &PolynomialSpec,
    n: usize,
    what: &str,
) -> Result<CenteredPolynomial> {
    let center = match &p.center {
        Some(c) => point_from_flat(c, n, what)?,
        None => vec![Complex64::new(0.0, 0.0); n],
    };
    let scale = p.scale.clone().unwrap_or_else(|| vec![1.0; n]);
    if scale.len() != n || scale.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
        return Err(Error::Parse(format!(
            "{what}: scale must list {n} positive reals"
        )));
    }
    let mut terms = Vec::with_capacity(p.terms.len());
    for t in &p.terms {
        if t.exponents.len() != n {
            return Err(Error::Parse(format!(
                "{what}: exponent tuple {:?} has the wrong length",
                t.exponents
            )));
        }
        if !t.re.is_finite() || !t.im.is_finite() {
            return Err(Error::Parse(format!("{what}: non-finite coefficient")));
        }
        terms.push((
            MultiIndex::new(t.exponents.clone()),
            Complex64::new(t.re, t.im),
        ));
    }
    CenteredPolynomial::from_terms(center, scale, terms)
}

pub fn polynomial_to_spec(p: &CenteredPolynomial) -> PolynomialSpec {
    PolynomialSpec {
        center: Some(point_to_flat(p.center())),
        scale: Some(p.scale().to_vec()),
        terms: p
            .coeffs()
            .iter()
            .map(|(nu, c)| TermSpec {
                exponents: nu.components().to_vec(),
                re: c.re,
                im: c.im,
            })
            .collect(),
    }
}

pub fn body_from_spec(b: &BodySpec, n: usize, what: &str) -> Result<ConvexBody> {
    let pts = b
        .hull
        .iter()
        .map(|p| point_from_flat(p, n, what))
        .collect::<Result<Vec<_>>>()?;
    ConvexBody::new(pts).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

pub fn body_to_spec(b: &ConvexBody) -> BodySpec {
    BodySpec {
        hull: b.generators().iter().map(|p| point_to_flat(p)).collect(),
    }
}

pub fn scheme_from_spec(s: &SchemeSpec, n: usize) -> Result<EnumerationScheme> {
    match s {
        SchemeSpec::Named(name) => parse_scheme_name(name, n),
        SchemeSpec::Custom { custom } => {
            let ext = match custom.extension.as_deref() {
                None => None,
                Some("graded_lex") => Some(TableExtension::GradedLex),
                Some(other) => {
                    return Err(Error::Parse(format!(
                        "unknown custom extension rule {other:?}"
                    )))
                }
            };
            let entries = custom
                .table
                .iter()
                .map(|e| MultiIndex::new(e.clone()))
                .collect();
            EnumerationScheme::custom(n, entries, ext)
        }
    }
}

pub fn parse_scheme_name(name: &str, n: usize) -> Result<EnumerationScheme> {
    match name {
        "graded_lex" => Ok(EnumerationScheme::graded_lex(n)),
        "euclidean" => Ok(EnumerationScheme::euclidean(n)),
        other => Err(Error::Parse(format!(
            "unknown scheme {other:?} (expected graded_lex, euclidean or custom)"
        ))),
    }
}

pub fn scheme_to_spec(s: &EnumerationScheme) -> SchemeSpec {
    match s.custom_entries() {
        Some((entries, ext)) => SchemeSpec::Custom {
            custom: CustomSpec {
                table: entries.iter().map(|e| e.components().to_vec()).collect(),
                extension: ext.map(|_| "graded_lex".to_string()),
            },
        },
        None => SchemeSpec::Named(s.name().to_string()),
    }
}

pub fn admissible_from_spec(a: &AdmissibleSpec) -> Result<AdmissibleSet> {
    match a {
        AdmissibleSpec::Named(name) if name == "all" => Ok(AdmissibleSet::All),
        AdmissibleSpec::Named(other) => {
            Err(Error::Parse(format!("unknown admissible set {other:?}")))
        }
        AdmissibleSpec::Progression { progression } => {
            AdmissibleSet::progression(progression.start, progression.step)
        }
        AdmissibleSpec::Explicit { explicit } => {
            AdmissibleSet::explicit(explicit.values.clone(), explicit.extension_step)
        }
    }
}

pub fn admissible_to_spec(a: &AdmissibleSet) -> AdmissibleSpec {
    match a {
        AdmissibleSet::All => AdmissibleSpec::Named("all".into()),
        AdmissibleSet::ArithmeticProgression { start, step } => AdmissibleSpec::Progression {
            progression: ProgressionSpec {
                start: *start,
                step: *step,
            },
        },
        AdmissibleSet::ExplicitSorted {
            values,
            extension_step,
        } => AdmissibleSpec::Explicit {
            explicit: ExplicitSpec {
                values: values.clone(),
                extension_step: *extension_step,
            },
        },
    }
}

pub fn domain_from_spec(d: &DomainSpec, n: usize, default_facets: usize) -> Result<ConvexDomain> {
    match d {
        DomainSpec::Ball { ball } => {
            let c = point_from_flat(&ball.center, n, "domain ball centre")?;
            ConvexDomain::ball(c, ball.radius, ball.facets.unwrap_or(default_facets * n))
        }
        DomainSpec::HalfSpaces {
            halfspaces,
            witness,
        } => {
            let w = point_from_flat(witness, n, "domain witness")?;
            let hs = halfspaces
                .iter()
                .map(|h| HalfSpace {
                    u: h.u.clone(),
                    s: h.s,
                })
                .collect();
            ConvexDomain::new(hs, w)
        }
    }
}

pub fn domain_to_spec(d: &ConvexDomain) -> DomainSpec {
    DomainSpec::HalfSpaces {
        halfspaces: d
            .halfspaces()
            .iter()
            .map(|h| HalfSpaceSpec {
                u: h.u.clone(),
                s: h.s,
            })
            .collect(),
        witness: point_to_flat(d.witness()),
    }
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        let f: ScenarioFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("scenario: {e}")))?;
        if f.version != FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported scenario version {} (expected {FORMAT_VERSION})",
                f.version
            )));
        }
        Ok(f)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Parses every field into typed values. Parse failures are
    /// [`Error::Parse`]; geometric invariants are left to
    /// [`Scenario::validate`].
    pub fn to_scenario(&self) -> Result<Scenario> {
        if self.center.is_empty() || !self.center.len().is_multiple_of(2) {
            return Err(Error::Parse(
                "centre must be a flat list [re, im, ...] of even length".into(),
            ));
        }
        let n = self.center.len() / 2;
        let center = point_from_flat(&self.center, n, "centre")?;
        let domain = domain_from_spec(&self.domain, n, self.facets).map_err(|e| match e {
            Error::Parse(m) => Error::Parse(m),
            other => Error::Parse(format!("domain: {other}")),
        })?;
        let bodies = self
            .bodies
            .iter()
            .enumerate()
            .map(|(i, b)| body_from_spec(b, n, &format!("body {}", i + 1)))
            .collect::<Result<Vec<_>>>()?;
        let targets = self
            .targets
            .iter()
            .enumerate()
            .map(|(i, p)| polynomial_from_spec(p, n, &format!("target {}", i + 1)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Scenario {
            id: self.id.clone(),
            domain,
            center,
            scheme: scheme_from_spec(&self.scheme, n)?,
            admissible: admissible_from_spec(&self.admissible)?,
            bodies,
            targets,
            mode: Mode::parse(&self.mode)?,
            stages: self.stages,
            eps_rule: EpsRule::parse(&self.eps_rule)?,
            degree_cap: self.degree_cap,
            degree_start: self.degree_start,
            degree_step: self.degree_step,
            density: self.density,
            facets: self.facets,
            grid_factor: self.grid_factor,
            seed: self.seed,
        })
    }

    pub fn from_scenario(s: &Scenario) -> Self {
        ScenarioFile {
            version: FORMAT_VERSION,
            id: s.id.clone(),
            domain: domain_to_spec(&s.domain),
            center: point_to_flat(&s.center),
            scheme: scheme_to_spec(&s.scheme),
            admissible: admissible_to_spec(&s.admissible),
            bodies: s.bodies.iter().map(body_to_spec).collect(),
            targets: s.targets.iter().map(polynomial_to_spec).collect(),
            mode: s.mode.name().into(),
            stages: s.stages,
            eps_rule: s.eps_rule.name().into(),
            degree_cap: s.degree_cap,
            degree_start: s.degree_start,
            degree_step: s.degree_step,
            density: s.density,
            facets: s.facets,
            grid_factor: s.grid_factor,
            seed: s.seed,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serialises")
    }
}

/// Parses and validates a scenario file.
pub fn load(path: &Path) -> Result<Scenario> {
    let s = ScenarioFile::read(path)?.to_scenario()?;
    s.validate()?;
    Ok(s)
}

/// SHA-256 of the canonical JSON form with the stage count zeroed, so that a
/// series built in pieces carries the fingerprint of the full build.
pub fn fingerprint(s: &Scenario) -> String {
    let mut f = ScenarioFile::from_scenario(s);
    f.stages = 0;
    let bytes = serde_json::to_vec(&f).expect("scenario serialises");
    hex::encode(Sha256::digest(&bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    const DISK: &str = r#"{
        "version": 1,
        "id": "disk",
        "domain": { "ball": { "center": [0, 0], "radius": 1.0, "facets": 16 } },
        "center": [0, 0],
        "bodies": [ { "hull": [[2, 0], [3, 0]] } ],
        "targets": [ { "terms": [ { "exponents": [0], "re": 1 } ] } ],
        "stages": 3
    }"#;

    #[test]
    fn parses_with_defaults() {
        let s = ScenarioFile::parse(DISK).unwrap().to_scenario().unwrap();
        s.validate().unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.stages, 3);
        assert_eq!(s.facets, 16);
        assert_eq!(s.mode, Mode::Holo);
        assert_eq!(s.admissible, AdmissibleSet::All);
        assert_eq!(s.domain.halfspaces().len(), 16);
        assert_eq!(
            s.targets[0].eval(&[Complex64::new(5.0, 1.0)]),
            Complex64::new(1.0, 0.0)
        );
    }

    #[test]
    fn canonical_round_trip() {
        let s = ScenarioFile::parse(DISK).unwrap().to_scenario().unwrap();
        let text = ScenarioFile::from_scenario(&s).to_json();
        let back = ScenarioFile::parse(&text).unwrap().to_scenario().unwrap();
        assert_eq!(
            ScenarioFile::from_scenario(&back),
            ScenarioFile::from_scenario(&s)
        );
        assert_eq!(fingerprint(&back), fingerprint(&s));
    }

    #[test]
    fn fingerprint_ignores_stage_count_only() {
        let mut s = ScenarioFile::parse(DISK).unwrap().to_scenario().unwrap();
        let f0 = fingerprint(&s);
        s.stages = 11;
        assert_eq!(fingerprint(&s), f0);
        s.seed += 1;
        assert_ne!(fingerprint(&s), f0);
        assert_eq!(f0.len(), 64);
    }

    #[test]
    fn malformed_inputs_are_parse_errors() {
        let bad_version = DISK.replace("\"version\": 1", "\"version\": 2");
        assert!(matches!(
            ScenarioFile::parse(&bad_version),
            Err(Error::Parse(_))
        ));
        let bad_point = DISK.replace("[[2, 0], [3, 0]]", "[[2, 0, 1], [3, 0]]");
        assert!(matches!(
            ScenarioFile::parse(&bad_point).unwrap().to_scenario(),
            Err(Error::Parse(_))
        ));
        let unknown = DISK.replace("\"stages\": 3", "\"stagez\": 3");
        assert!(matches!(
            ScenarioFile::parse(&unknown),
            Err(Error::Parse(_))
        ));
        assert!(matches!(ScenarioFile::parse("{"), Err(Error::Parse(_))));
        let bad_mode = DISK.replace("\"stages\": 3", "\"mode\": \"smooth\"");
        assert!(matches!(
            ScenarioFile::parse(&bad_mode).unwrap().to_scenario(),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn body_meeting_domain_is_an_invariant_violation() {
        let text = DISK.replace("[[2, 0], [3, 0]]", "[[0.5, 0], [3, 0]]");
        let s = ScenarioFile::parse(&text).unwrap().to_scenario().unwrap();
        match s.validate() {
            Err(Error::Invariant(m)) => assert!(m.contains("body 1")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn progression_and_custom_specs() {
        let text = DISK.replace(
            "\"stages\": 3",
            "\"admissible\": {\"progression\": {\"start\": 0, \"step\": 3}}",
        );
        let s = ScenarioFile::parse(&text).unwrap().to_scenario().unwrap();
        assert_eq!(s.admissible.next_admissible(4), 6);
        let text = DISK.replace(
            "\"stages\": 3",
            "\"scheme\": {\"custom\": {\"table\": [[0], [1]], \"extension\": \"graded_lex\"}}",
        );
        let s = ScenarioFile::parse(&text).unwrap().to_scenario().unwrap();
        assert!(matches!(s.validate(), Err(Error::UnsupportedScheme(_))));
        let round = ScenarioFile::from_scenario(&s);
        assert!(matches!(round.scheme, SchemeSpec::Custom { .. }));
    }
}
