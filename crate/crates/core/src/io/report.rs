//! Sweep reports as JSON with exact rationals, and an optional CSV with
//! rounded decimals.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::IoError;
use crate::construct::SvmInstance;
use crate::exact_geometry::{parse_rational, to_decimal, Rational, RationalVector};
use crate::qp::nu_from_mu;
use crate::sweep::SweepReport;

/// A rational as decimal digit strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonRational {
    pub num: String,
    pub den: String,
}

impl From<&Rational> for JsonRational {
    fn from(r: &Rational) -> Self {
        Self {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
        }
    }
}

impl JsonRational {
    pub fn to_rational(&self) -> Result<Rational, IoError> {
        parse_rational(&format!("{}/{}", self.num, self.den))
            .map_err(|e| IoError::Json(e.to_string()))
    }
}

fn json_vec(v: &RationalVector) -> Vec<JsonRational> {
    v.coords().iter().map(JsonRational::from).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub mu: JsonRational,
    pub nu: JsonRational,
    pub support_plus: Vec<usize>,
    pub support_minus: Vec<usize>,
    pub objective: JsonRational,
    pub p: Vec<JsonRational>,
    pub q: Vec<JsonRational>,
    pub alpha_plus: Vec<JsonRational>,
    pub alpha_minus: Vec<JsonRational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportFile {
    pub d: usize,
    pub n: usize,
    pub bend_count: usize,
    pub distinct_support_sets: usize,
    pub lower_bound: usize,
    /// Decreasing in `mu`.
    pub records: Vec<ReportRecord>,
}

impl ReportFile {
    pub fn new(instance: &SvmInstance, report: &SweepReport) -> Self {
        let n = instance.n();
        let records = report
            .records
            .iter()
            .map(|r| ReportRecord {
                mu: (&r.mu).into(),
                nu: (&nu_from_mu(&r.mu, n).expect("mu > 0 in a sweep")).into(),
                support_plus: r.support.plus.iter().copied().collect(),
                support_minus: r.support.minus.iter().copied().collect(),
                objective: (&r.objective).into(),
                p: json_vec(&r.pair.p),
                q: json_vec(&r.pair.q),
                alpha_plus: r.pair.alpha_plus.iter().map(JsonRational::from).collect(),
                alpha_minus: r.pair.alpha_minus.iter().map(JsonRational::from).collect(),
            })
            .collect();
        Self {
            d: instance.dim,
            n,
            bend_count: report.bend_count,
            distinct_support_sets: report.distinct_support_sets,
            lower_bound: report.lower_bound,
            records,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, IoError> {
        serde_json::from_str(text).map_err(|e| IoError::Json(e.to_string()))
    }
}

/// `mu, nu, objective` rounded to `precision` fractional digits plus the
/// support sets. The first line marks the values as approximate.
pub fn csv_report(file: &ReportFile, precision: usize) -> Result<String, IoError> {
    let mut out = format!("# approximate decimals, precision={precision}\n");
    out.push_str("precision,mu,nu,objective,support_plus,support_minus\n");
    let join = |xs: &[usize]| {
        xs.iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    };
    for r in &file.records {
        let _ = writeln!(
            out,
            "{precision},{},{},{},{},{}",
            to_decimal(&r.mu.to_rational()?, precision),
            to_decimal(&r.nu.to_rational()?, precision),
            to_decimal(&r.objective.to_rational()?, precision),
            join(&r.support_plus),
            join(&r.support_minus),
        );
    }
    Ok(out)
}
