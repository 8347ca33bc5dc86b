//! Line-oriented instance file.
//!
//! ```text
//! # comment
//! d 4
//! eps 1/3
//! gamma 1/16
//! stretch 20000/1
//! mu_bar 9615407277421/10027093130432
//! q_min ...
//! q_max ...
//! +1 -20000/1 0/1 0/1 0/1
//! -1 0/1 0/1 2/1 ...
//! ```
//!
//! Only `d` is required; the six Goldfarb keys come all together or not at
//! all. Every rational is written as `numerator/denominator` in lowest
//! terms, so serializing a parsed file reproduces it byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::IoError;
use crate::construct::{Calibration, GoldfarbInstanceInfo, StretchFactor, SvmInstance};
use crate::exact_geometry::{format_rational, parse_rational, Rational, RationalVector};
use crate::goldfarb::GoldfarbParams;

const GOLDFARB_KEYS: [&str; 6] = ["eps", "gamma", "stretch", "mu_bar", "q_min", "q_max"];

pub fn serialize_instance(instance: &SvmInstance) -> String {
    let mut out =
        String::from("# svmpath instance: labelled points with exact rational coordinates\n");
    let _ = writeln!(out, "d {}", instance.dim);
    if let Some(info) = &instance.goldfarb {
        let c = &info.calibration;
        for (key, value) in [
            ("eps", info.params.eps()),
            ("gamma", info.params.gamma()),
            ("stretch", info.stretch.l()),
            ("mu_bar", &c.mu_bar),
            ("q_min", &c.q_min),
            ("q_max", &c.q_max),
        ] {
            let _ = writeln!(out, "{key} {}", format_rational(value));
        }
    }
    for (label, points) in [
        ("+1", &instance.plus_points),
        ("-1", &instance.minus_points),
    ] {
        for p in points {
            out.push_str(label);
            for x in p.coords() {
                out.push(' ');
                out.push_str(&format_rational(x));
            }
            out.push('\n');
        }
    }
    out
}

pub fn parse_instance(text: &str) -> Result<SvmInstance, IoError> {
    let mut header: BTreeMap<String, Rational> = BTreeMap::new();
    let mut dim: Option<usize> = None;
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let syntax = |message: String| IoError::Syntax {
            line: line_no,
            message,
        };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let head = tokens.next().expect("nonempty line");
        match head {
            "+1" | "-1" => {
                let d = dim.ok_or_else(|| syntax("point row before the d line".into()))?;
                let coords = tokens
                    .map(|t| parse_rational(t).map_err(|e| syntax(e.to_string())))
                    .collect::<Result<Vec<_>, _>>()?;
                if coords.len() != d {
                    return Err(syntax(format!(
                        "expected {d} coordinates, found {}",
                        coords.len()
                    )));
                }
                let p = RationalVector::new(coords);
                if head == "+1" {
                    plus.push(p);
                } else {
                    minus.push(p);
                }
            }
            "d" => {
                let value = tokens
                    .next()
                    .ok_or_else(|| syntax("d needs a value".into()))?;
                let d: usize = value
                    .parse()
                    .map_err(|_| syntax(format!("bad dimension {value:?}")))?;
                if d == 0 {
                    return Err(syntax("d must be positive".into()));
                }
                dim = Some(d);
            }
            key if GOLDFARB_KEYS.contains(&key) => {
                let value = tokens
                    .next()
                    .ok_or_else(|| syntax(format!("{key} needs a value")))?;
                let r = parse_rational(value).map_err(|e| syntax(e.to_string()))?;
                header.insert(key.to_string(), r);
            }
            other => return Err(syntax(format!("unknown key or label {other:?}"))),
        }
    }
    let dim = dim.ok_or(IoError::MissingKey("d"))?;
    if plus.is_empty() || minus.is_empty() {
        return Err(IoError::Invalid(
            "both classes need at least one point".into(),
        ));
    }
    let goldfarb = if header.is_empty() {
        None
    } else {
        let mut get = |key: &'static str| header.remove(key).ok_or(IoError::MissingKey(key));
        let (eps, gamma, l) = (get("eps")?, get("gamma")?, get("stretch")?);
        let (mu_bar, q_min, q_max) = (get("mu_bar")?, get("q_min")?, get("q_max")?);
        let params =
            GoldfarbParams::new(dim, eps, gamma).map_err(|e| IoError::Invalid(e.to_string()))?;
        let stretch = StretchFactor::new(l).map_err(|e| IoError::Invalid(e.to_string()))?;
        if minus.len() != 2 {
            return Err(IoError::Invalid(
                "a Goldfarb instance has exactly two negative points".into(),
            ));
        }
        let calibration = Calibration {
            mu_bar,
            q_min,
            q_max,
            u_left: minus[0].clone(),
            u_right: minus[1].clone(),
        };
        Some(GoldfarbInstanceInfo {
            params,
            stretch,
            calibration,
        })
    };
    Ok(SvmInstance {
        dim,
        plus_points: plus,
        minus_points: minus,
        goldfarb,
    })
}
