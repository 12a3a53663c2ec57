//! Series artifact files.
//!
//! A line-oriented text format; blank lines and lines starting with `#` are
//! ignored. Reals are written with 17 significant digits, so reading a file
//! back gives the stored doubles exactly.
//!
//! ```text
//! version 1
//! n 1
//! center 0.0000000000000000e0 0.0000000000000000e0
//! scale 3.0000000000000000e0
//! scheme "graded_lex"
//! admissible "all"
//! mode holo
//! fingerprint 5d41…
//! coefficients 3
//! c 0 0 1.2500000000000000e0 0.0000000000000000e0
//! c 1 1 -3.0000000000000000e-1 1.0000000000000000e-2
//! c 2 2 0.0000000000000000e0 0.0000000000000000e0
//! witnesses 1
//! w 1 1 1 5.0000000000000000e-1 2 1 2 2.0e-2 2.1e-2 4.4e-1 met -
//! ```
//!
//! `center` lists `re im` pairs. `scheme` and `admissible` hold the same JSON
//! values as a scenario file. A coefficient row is `c rank exponents re im`
//! with comma-separated exponents. A witness row is
//! `w stage body target eps lambda tail_floor degree cloud_err fine_err
//! block_l status derivatives`, where `derivatives` is `-` or a
//! `;`-separated list of `exponents=sup`.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::multiindex::MultiIndex;
use crate::scenario::{
    admissible_from_spec, admissible_to_spec, scheme_from_spec, scheme_to_spec, AdmissibleSpec,
    SchemeSpec,
};
use crate::universal::{Mode, UniversalSeries, WitnessRecord, WitnessStatus};
use crate::{Error, Result};

pub const ARTIFACT_VERSION: u32 = 1;

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn exponents(nu: &MultiIndex) -> String {
    nu.components()
        .iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn to_text(series: &UniversalSeries) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# univtaylor series");
    let _ = writeln!(out, "version {ARTIFACT_VERSION}");
    let _ = writeln!(out, "n {}", series.dim());
    let center: Vec<String> = series
        .center
        .iter()
        .flat_map(|c| [real(c.re), real(c.im)])
        .collect();
    let _ = writeln!(out, "center {}", center.join(" "));
    let scale: Vec<String> = series.scale.iter().map(|s| real(*s)).collect();
    let _ = writeln!(out, "scale {}", scale.join(" "));
    let _ = writeln!(
        out,
        "scheme {}",
        serde_json::to_string(&scheme_to_spec(&series.scheme)).expect("scheme serializes")
    );
    let _ = writeln!(
        out,
        "admissible {}",
        serde_json::to_string(&admissible_to_spec(&series.admissible))
            .expect("admissible set serializes")
    );
    let _ = writeln!(out, "mode {}", series.mode.name());
    let _ = writeln!(out, "fingerprint {}", series.fingerprint);
    let _ = writeln!(out, "coefficients {}", series.coefficients.len());
    for (j, a) in series.coefficients.iter().enumerate() {
        let nu = series
            .scheme
            .unrank(j)
            .expect("stored ranks are enumerable");
        let _ = writeln!(
            out,
            "c {j} {} {} {}",
            exponents(&nu),
            real(a.re),
            real(a.im)
        );
    }
    let _ = writeln!(out, "witnesses {}", series.witnesses.len());
    for w in &series.witnesses {
        let derivs = if w.block_derivatives.is_empty() {
            "-".to_string()
        } else {
            w.block_derivatives
                .iter()
                .map(|(l, v)| format!("{}={}", exponents(l), real(*v)))
                .collect::<Vec<_>>()
                .join(";")
        };
        let _ = writeln!(
            out,
            "w {} {} {} {} {} {} {} {} {} {} {} {}",
            w.stage,
            w.body,
            w.target,
            real(w.eps),
            w.lambda,
            w.tail_floor,
            w.degree,
            real(w.cloud_err),
            real(w.fine_err),
            real(w.block_l),
            w.status.name(),
            derivs
        );
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate().peekable(),
        }
    }

    /// Next significant line as `(line number, keyword, rest)`.
    fn next(&mut self) -> Result<(usize, &'a str, &'a str)> {
        for (i, line) in self.inner.by_ref() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let (key, rest) = t.split_once(char::is_whitespace).unwrap_or((t, ""));
            return Ok((i + 1, key, rest.trim()));
        }
        Err(Error::Parse("series artifact ends early".into()))
    }

    fn expect(&mut self, key: &str) -> Result<(usize, &'a str)> {
        let (line, k, rest) = self.next()?;
        if k != key {
            return Err(Error::Parse(format!(
                "line {line}: expected `{key}`, found `{k}`"
            )));
        }
        Ok((line, rest))
    }

    fn at_end(&mut self) -> bool {
        while let Some((_, l)) = self.inner.peek() {
            let t = l.trim();
            if t.is_empty() || t.starts_with('#') {
                self.inner.next();
            } else {
                return false;
            }
        }
        true
    }
}

fn perr(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("line {line}: {msg}"))
}

fn num<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| perr(line, format!("bad {what} {tok:?}")))
}

fn parse_exponents(line: usize, tok: &str) -> Result<MultiIndex> {
    let comps: Result<Vec<u32>> = tok.split(',').map(|e| num(line, e, "exponent")).collect();
    Ok(MultiIndex::new(comps?))
}

pub fn from_text(text: &str) -> Result<UniversalSeries> {
    let mut lines = Lines::new(text);
    let (line, v) = lines.expect("version")?;
    let version: u32 = num(line, v, "version")?;
    if version != ARTIFACT_VERSION {
        return Err(perr(
            line,
            format!("unsupported artifact version {version} (expected {ARTIFACT_VERSION})"),
        ));
    }
    let (line, v) = lines.expect("n")?;
    let n: usize = num(line, v, "dimension")?;
    if n == 0 {
        return Err(perr(line, "dimension must be >= 1"));
    }
    let (line, v) = lines.expect("center")?;
    let flat: Vec<f64> = v
        .split_whitespace()
        .map(|t| num(line, t, "real"))
        .collect::<Result<_>>()?;
    if flat.len() != 2 * n {
        return Err(perr(line, format!("centre needs {} reals", 2 * n)));
    }
    let center: Vec<Complex64> = flat.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect();
    let (line, v) = lines.expect("scale")?;
    let scale: Vec<f64> = v
        .split_whitespace()
        .map(|t| num(line, t, "real"))
        .collect::<Result<_>>()?;
    if scale.len() != n || scale.iter().any(|s| !(*s > 0.0)) {
        return Err(perr(line, format!("scale needs {n} positive reals")));
    }
    let (line, v) = lines.expect("scheme")?;
    let spec: SchemeSpec = serde_json::from_str(v).map_err(|e| perr(line, e))?;
    let scheme = scheme_from_spec(&spec, n).map_err(|e| perr(line, e))?;
    let (line, v) = lines.expect("admissible")?;
    let spec: AdmissibleSpec = serde_json::from_str(v).map_err(|e| perr(line, e))?;
    let admissible = admissible_from_spec(&spec).map_err(|e| perr(line, e))?;
    let (line, v) = lines.expect("mode")?;
    let mode = Mode::parse(v).map_err(|e| perr(line, e))?;
    let (_, v) = lines.expect("fingerprint")?;
    let fingerprint = v.to_string();

    let (line, v) = lines.expect("coefficients")?;
    let count: usize = num(line, v, "count")?;
    let mut coefficients = Vec::with_capacity(count);
    for j in 0..count {
        let (line, rest) = lines.expect("c")?;
        let toks: Vec<&str> = rest.split_whitespace().collect();
        if toks.len() != 4 {
            return Err(perr(line, "coefficient row needs rank, exponents, re, im"));
        }
        let rank: usize = num(line, toks[0], "rank")?;
        if rank != j {
            return Err(perr(line, format!("expected rank {j}, found {rank}")));
        }
        let nu = parse_exponents(line, toks[1])?;
        if scheme.unrank(j).map_err(|e| perr(line, e))? != nu {
            return Err(perr(
                line,
                format!("exponents {} do not match rank {j}", toks[1]),
            ));
        }
        coefficients.push(Complex64::new(
            num(line, toks[2], "real")?,
            num(line, toks[3], "real")?,
        ));
    }

    let (line, v) = lines.expect("witnesses")?;
    let count: usize = num(line, v, "count")?;
    let mut witnesses = Vec::with_capacity(count);
    for _ in 0..count {
        let (line, rest) = lines.expect("w")?;
        let t: Vec<&str> = rest.split_whitespace().collect();
        if t.len() != 12 {
            return Err(perr(line, "witness row needs 12 fields"));
        }
        let status = match t[10] {
            "met" => WitnessStatus::Met,
            "unmet" => WitnessStatus::Unmet,
            other => return Err(perr(line, format!("bad status {other:?}"))),
        };
        let block_derivatives = if t[11] == "-" {
            Vec::new()
        } else {
            t[11]
                .split(';')
                .map(|item| {
                    let (l, v) = item
                        .split_once('=')
                        .ok_or_else(|| perr(line, format!("bad derivative entry {item:?}")))?;
                    Ok((parse_exponents(line, l)?, num(line, v, "real")?))
                })
                .collect::<Result<_>>()?
        };
        let w = WitnessRecord {
            stage: num(line, t[0], "stage")?,
            body: num(line, t[1], "body")?,
            target: num(line, t[2], "target")?,
            eps: num(line, t[3], "real")?,
            lambda: num(line, t[4], "rank")?,
            tail_floor: num(line, t[5], "degree")?,
            degree: num(line, t[6], "degree")?,
            cloud_err: num(line, t[7], "real")?,
            fine_err: num(line, t[8], "real")?,
            block_l: num(line, t[9], "real")?,
            block_derivatives,
            status,
        };
        if w.lambda >= coefficients.len() {
            return Err(perr(
                line,
                format!("witness rank {} beyond the stored coefficients", w.lambda),
            ));
        }
        if w.stage != witnesses.len() + 1 {
            return Err(perr(
                line,
                format!("expected stage {}", witnesses.len() + 1),
            ));
        }
        witnesses.push(w);
    }
    if !lines.at_end() {
        let (line, k, _) = lines.next()?;
        return Err(perr(
            line,
            format!("unexpected `{k}` after the witness rows"),
        ));
    }
    Ok(UniversalSeries {
        scheme,
        center,
        scale,
        admissible,
        mode,
        fingerprint,
        coefficients,
        witnesses,
    })
}

pub fn save(series: &UniversalSeries, path: &Path) -> Result<()> {
    std::fs::write(path, to_text(series))?;
    Ok(())
}

pub fn load(path: &Path) -> Result<UniversalSeries> {
    from_text(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiindex::{AdmissibleSet, EnumerationScheme};
    use proptest::prelude::*;

    fn sample_series(coeffs: Vec<Complex64>) -> UniversalSeries {
        let last = coeffs.len().saturating_sub(1);
        UniversalSeries {
            scheme: EnumerationScheme::graded_lex(2),
            center: vec![Complex64::new(0.25, -1.0), Complex64::new(0.0, 0.0)],
            scale: vec![2.3, 1.0 / 3.0],
            admissible: AdmissibleSet::progression(0, 3).unwrap(),
            mode: Mode::AInfty,
            fingerprint: "ab12".into(),
            coefficients: coeffs,
            witnesses: vec![WitnessRecord {
                stage: 1,
                body: 1,
                target: 2,
                eps: 0.5,
                lambda: last,
                tail_floor: 1,
                degree: 3,
                cloud_err: 0.1 + 0.2,
                fine_err: f64::MIN_POSITIVE,
                block_l: 1e300,
                block_derivatives: vec![
                    (MultiIndex::new(vec![1, 0]), 0.125),
                    (MultiIndex::new(vec![0, 1]), -0.0),
                ],
                status: WitnessStatus::Unmet,
            }],
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let s = sample_series(vec![
            Complex64::new(1.0 / 3.0, -0.0),
            Complex64::new(-2.5e-300, 7.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(std::f64::consts::PI, 1e16),
        ]);
        let text = to_text(&s);
        let back = from_text(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(to_text(&back), text);
    }

    #[test]
    fn malformed_artifacts_are_parse_errors() {
        let s = sample_series(vec![Complex64::new(1.0, 0.0); 4]);
        let text = to_text(&s);
        let cases = [
            text.replace("version 1", "version 2"),
            text.replace("c 1 0,1", "c 1 1,0"),
            text.replace("c 2 1,0", "c 3 1,0"),
            text.replace(" unmet ", " maybe "),
            text.replace("coefficients 4", "coefficients 5"),
            text.replace("mode ainfty", "mode other"),
            format!("{text}extra 1\n"),
            text.lines().take(5).collect::<Vec<_>>().join("\n"),
        ];
        for (i, bad) in cases.iter().enumerate() {
            assert!(
                matches!(from_text(bad), Err(Error::Parse(_))),
                "case {i} accepted"
            );
        }
    }

    proptest! {
        #[test]
        fn reals_survive_the_round_trip(
            parts in proptest::collection::vec((any::<f64>(), any::<f64>()), 1..12)
        ) {
            let coeffs: Vec<Complex64> = parts
                .into_iter()
                .filter(|(a, b)| a.is_finite() && b.is_finite())
                .map(|(a, b)| Complex64::new(a, b))
                .collect();
            prop_assume!(!coeffs.is_empty());
            let s = sample_series(coeffs);
            let back = from_text(&to_text(&s)).unwrap();
            for (a, b) in s.coefficients.iter().zip(&back.coefficients) {
                prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
                prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
            }
        }
    }
}
