//! Parsers for command-line values: complex numbers, lists and ranges,
//! control and state specifications.

use evenparity::{coherent_state, FockVector, IdealCat, C64};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

/// `1.5`, `-2i`, `1+2i`, `0.3-1e-2i` or `re,im`.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse complex number {s:?}");
    if let Some((re, im)) = t.split_once(',') {
        let re = re.parse::<f64>().map_err(|_| bad())?;
        let im = im.parse::<f64>().map_err(|_| bad())?;
        return finite(C64::new(re, im)).ok_or_else(bad);
    }
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        let re = t.parse::<f64>().map_err(|_| bad())?;
        return finite(C64::new(re, 0.0)).ok_or_else(bad);
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        v => v.parse::<f64>().map_err(|_| bad())?,
    };
    let re = re.parse::<f64>().map_err(|_| bad())?;
    finite(C64::new(re, im)).ok_or_else(bad)
}

fn finite(z: C64) -> Option<C64> {
    (z.re.is_finite() && z.im.is_finite()).then_some(z)
}

/// Canonical text form accepted by [`parse_complex`]; exact round trip.
pub fn fmt_complex(z: C64) -> String {
    if z.im.is_sign_negative() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// `a:b:step`, inclusive of `b` when the step lands on it.
pub fn parse_range(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, step] = parts[..] else {
        return Err(format!("range {s:?} is not a:b:step"));
    };
    let num = |v: &str| {
        v.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| format!("bad number {v:?} in range {s:?}"))
    };
    let (a, b, step) = (num(a)?, num(b)?, num(step)?);
    if step == 0.0 || (b - a) * step < 0.0 {
        return Err(format!("range {s:?} does not reach its end"));
    }
    let count = ((b - a) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(format!("range {s:?} has too many points"));
    }
    Ok((0..count)
        .map(|k| {
            // snap to 12 decimals so 0.85 + 15 * 0.01 is exactly 1
            let v = a + k as f64 * step;
            format!("{v:.12}").parse::<f64>().unwrap()
        })
        .collect())
}

/// Comma-separated numbers and `a:b:step` ranges.
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if item.contains(':') {
            out.extend(parse_range(item)?);
        } else {
            let v: f64 = item.parse().map_err(|_| format!("bad number {item:?}"))?;
            if !v.is_finite() {
                return Err(format!("bad number {item:?}"));
            }
            out.push(v);
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}

pub fn parse_usize_list(s: &str) -> Result<Vec<usize>, String> {
    parse_f64_list(s)?
        .into_iter()
        .map(|v| {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(format!("{v} is not a non-negative integer"))
            }
        })
        .collect()
}

pub fn fmt_list<T: fmt::Display>(v: &[T]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Control-mode state fed into the second detector port.
#[derive(Clone, Debug, PartialEq)]
pub enum ControlSpec {
    Coherent(C64),
    /// `c_m = 1` for every retained `m` (unnormalized).
    Flat,
    Fock(usize),
    /// Complex amplitudes read from a file, used as given.
    File(PathBuf),
}

impl FromStr for ControlSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
        match (kind, arg) {
            ("flat", "") => Ok(Self::Flat),
            ("coherent", a) if !a.is_empty() => Ok(Self::Coherent(parse_complex(a)?)),
            ("fock", m) => m
                .parse()
                .map(Self::Fock)
                .map_err(|_| format!("bad photon number in {s:?}")),
            ("file", p) if !p.is_empty() => Ok(Self::File(PathBuf::from(p))),
            _ => Err(format!(
                "unknown control {s:?}; expected coherent:AMP, flat, fock:M or file:PATH"
            )),
        }
    }
}

impl fmt::Display for ControlSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Coherent(a) => write!(f, "coherent:{}", fmt_complex(*a)),
            Self::Flat => write!(f, "flat"),
            Self::Fock(m) => write!(f, "fock:{m}"),
            Self::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl ControlSpec {
    /// Amplitudes on `0..=n_trunc`; file contents are zero-padded or
    /// rejected when longer.
    pub fn vector(&self, n_trunc: usize) -> Result<FockVector, String> {
        match self {
            Self::Coherent(a) => Ok(coherent_state(*a, n_trunc)),
            Self::Flat => Ok(FockVector::flat(n_trunc)),
            Self::Fock(m) if *m <= n_trunc => Ok(FockVector::basis(*m, n_trunc)),
            Self::Fock(m) => Err(format!("fock:{m} exceeds the truncation {n_trunc}")),
            Self::File(p) => {
                let amps = read_amplitudes(p)?;
                if amps.len() > n_trunc + 1 {
                    return Err(format!(
                        "{} holds {} amplitudes, more than n_trunc + 1 = {}",
                        p.display(),
                        amps.len(),
                        n_trunc + 1
                    ));
                }
                Ok(FockVector::new(amps).resized(n_trunc))
            }
        }
    }

    /// Phase-space radius (in `|alpha|`) holding most of the state.
    fn radius(&self, n_trunc: usize) -> Result<f64, String> {
        Ok(match self {
            Self::Coherent(a) => a.norm(),
            Self::Flat => (n_trunc as f64).sqrt(),
            Self::Fock(m) => (*m as f64).sqrt(),
            Self::File(p) => (read_amplitudes(p)?.len() as f64).sqrt(),
        })
    }
}

/// One amplitude per line as `re`, `re im` or `re,im`; `#` starts a comment.
/// A `.json` file holds an array of numbers or `[re, im]` pairs.
pub fn read_amplitudes(path: &PathBuf) -> Result<Vec<C64>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let bad = |what: &str| format!("{}: {what}", path.display());
    let amps = if path.extension().is_some_and(|e| e == "json") {
        let v: Vec<serde_json::Value> =
            serde_json::from_str(&text).map_err(|e| bad(&e.to_string()))?;
        v.iter()
            .map(|a| match a {
                serde_json::Value::Number(x) => x.as_f64().map(|x| C64::new(x, 0.0)),
                serde_json::Value::Array(p) if p.len() == 2 => {
                    Some(C64::new(p[0].as_f64()?, p[1].as_f64()?))
                }
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| bad("expected numbers or [re, im] pairs"))?
    } else {
        let mut amps = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let nums: Vec<f64> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| bad(&format!("line {}: bad number", k + 1)))?;
            match nums[..] {
                [re] => amps.push(C64::new(re, 0.0)),
                [re, im] => amps.push(C64::new(re, im)),
                _ => return Err(bad(&format!("line {}: expected re or re,im", k + 1))),
            }
        }
        amps
    };
    if amps.is_empty() {
        return Err(bad("no amplitudes"));
    }
    if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return Err(bad("non-finite amplitude"));
    }
    Ok(amps)
}

/// Single-mode state for Wigner plots: any control spec, or an ideal cat.
#[derive(Clone, Debug, PartialEq)]
pub enum StateSpec {
    Control(ControlSpec),
    Cat(C64),
    Cat4(C64),
}

impl FromStr for StateSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.split_once(':') {
            Some(("cat", b)) => Ok(Self::Cat(parse_complex(b)?)),
            Some(("cat4", b)) => Ok(Self::Cat4(parse_complex(b)?)),
            _ => s
                .parse()
                .map(Self::Control)
                .map_err(|e: String| e.replace("or file:PATH", "file:PATH, cat:BETA or cat4:BETA")),
        }
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Control(c) => c.fmt(f),
            Self::Cat(b) => write!(f, "cat:{}", fmt_complex(*b)),
            Self::Cat4(b) => write!(f, "cat4:{}", fmt_complex(*b)),
        }
    }
}

impl StateSpec {
    /// Normalized state vector on `0..=n_trunc`.
    pub fn vector(&self, n_trunc: usize) -> Result<FockVector, String> {
        let v = match self {
            Self::Control(c) => c.vector(n_trunc)?,
            Self::Cat(b) => IdealCat::two(*b)
                .state(n_trunc)
                .map_err(|e| e.to_string())?,
            Self::Cat4(b) => IdealCat::four(*b)
                .state(n_trunc)
                .map_err(|e| e.to_string())?,
        };
        v.normalized().map_err(|e| format!("{self}: {e}"))
    }

    /// Half-width of a square `(x, p)` window holding the state.
    pub fn half_width(&self, n_trunc: usize) -> Result<f64, String> {
        Ok(match self {
            Self::Cat(b) => b.norm() + 5.0,
            Self::Cat4(b) => std::f64::consts::SQRT_2 * b.norm() + 5.0,
            Self::Control(ControlSpec::Coherent(a)) => a.norm() + 5.0,
            Self::Control(c) => (2.0 * c.radius(n_trunc)?.powi(2) + 1.0).sqrt() + 4.0,
        })
    }
}
