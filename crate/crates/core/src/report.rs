//! Serializable shapes for verification reports, series dumps and constant
//! tables, plus their plain-text renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::checks::{CheckResult, CheckStatus};
use crate::constants::{self, ConstantsError, Quadratic};
use crate::ring::{rational_to_float_string, to_float, CycElement, Rational, RingElement};
use crate::series::QSeries;

pub const FLOAT_DIGITS: usize = 30;

/// An exact coefficient: `"p/q"` or a power-basis coordinate vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExactValue {
    Rational(String),
    Cyclotomic { level: u32, coords: Vec<String> },
}

impl ExactValue {
    pub fn of(r: &RingElement) -> Self {
        match r {
            RingElement::Rational(q) => ExactValue::Rational(q.to_string()),
            RingElement::Cyclotomic(c) => Self::of_cyc(c),
        }
    }

    pub fn of_cyc(c: &CycElement) -> Self {
        ExactValue::Cyclotomic {
            level: c.level(),
            coords: c.coords().iter().map(ToString::to_string).collect(),
        }
    }
}

/// Decimal approximation under the standard embedding `zeta_M -> exp(2 pi i/M)`.
pub fn float_approx(r: &RingElement) -> String {
    match r {
        RingElement::Rational(q) => rational_to_float_string(q, FLOAT_DIGITS),
        RingElement::Cyclotomic(c) => to_float(c, 1, FLOAT_DIGITS)
            .map(|z| z.to_string())
            .unwrap_or_else(|e| e.to_string()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub exponent: String,
    pub coefficient: ExactValue,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub name: String,
    pub status: String,
    pub order_verified: String,
    pub first_failure: Option<FailureRecord>,
    pub elapsed_ms: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub precision_error: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    /// The order override, or `null` when each check ran at its default.
    pub order: Option<String>,
    pub results: Vec<ResultRecord>,
    pub summary: Summary,
}

impl From<&CheckResult> for ResultRecord {
    fn from(c: &CheckResult) -> Self {
        ResultRecord {
            name: c.name.clone(),
            status: c.status.as_str().to_string(),
            order_verified: c.order_verified.to_string(),
            first_failure: c.first_failure.as_ref().map(|w| FailureRecord {
                exponent: w.exponent.to_string(),
                coefficient: ExactValue::of(&w.coefficient),
            }),
            elapsed_ms: c.elapsed_ms,
        }
    }
}

impl Report {
    pub fn new(results: &[CheckResult], order: Option<&Rational>) -> Self {
        let mut summary = Summary::default();
        for r in results {
            match r.status {
                CheckStatus::Pass => summary.pass += 1,
                CheckStatus::Fail => summary.fail += 1,
                CheckStatus::PrecisionError => summary.precision_error += 1,
            }
        }
        let mut records: Vec<ResultRecord> = results.iter().map(ResultRecord::from).collect();
        records.sort_by(|a, b| a.name.cmp(&b.name));
        Report {
            version: env!("CARGO_PKG_VERSION").to_string(),
            order: order.map(ToString::to_string),
            results: records,
            summary,
        }
    }

    /// 0 when everything passed, 1 on any failure, otherwise 3 on a
    /// precision error.
    pub fn exit_code(&self) -> i32 {
        if self.summary.fail > 0 {
            1
        } else if self.summary.precision_error > 0 {
            3
        } else {
            0
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let width = self.results.iter().map(|r| r.name.len()).max().unwrap_or(0);
        for r in &self.results {
            let _ = write!(
                out,
                "{:<width$}  {:<15}  order {:<6} {:>6} ms",
                r.name, r.status, r.order_verified, r.elapsed_ms
            );
            if let Some(f) = &r.first_failure {
                let c = match &f.coefficient {
                    ExactValue::Rational(s) => s.clone(),
                    ExactValue::Cyclotomic { level, coords } => format!("Q(zeta_{level})[{}]", coords.join(", ")),
                };
                let _ = write!(out, "  first difference at q^{}: {}", f.exponent, c);
            }
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "{} passed, {} failed, {} precision errors",
            self.summary.pass, self.summary.fail, self.summary.precision_error
        );
        out
    }
}

/// One coefficient of a dumped series.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub exponent_num: i64,
    pub exponent_den: i64,
    pub coefficient: ExactValue,
    pub float_approx: String,
}

pub fn series_rows(s: &QSeries) -> Vec<SeriesRow> {
    let d = s.denom();
    (s.lo()..s.prec())
        .map(|k| {
            let c = s.coeff(k).expect("index below precision");
            let g = num_integer::gcd(k, d);
            SeriesRow {
                exponent_num: k / g,
                exponent_den: d / g,
                coefficient: ExactValue::of(&c),
                float_approx: float_approx(&c),
            }
        })
        .collect()
}

pub fn series_csv(s: &QSeries) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = ["exponent_num", "exponent_den", "coefficient", "float_approx"];
    w.write_record(header).expect("in-memory write");
    for r in series_rows(s) {
        let coeff = match &r.coefficient {
            ExactValue::Rational(q) => q.clone(),
            ExactValue::Cyclotomic { level, coords } => format!("Q(zeta_{level})[{}]", coords.join(", ")),
        };
        w.write_record([r.exponent_num.to_string(), r.exponent_den.to_string(), coeff, r.float_approx])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
}

/// An exact constant with its decimal value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstantValue {
    pub name: String,
    pub exact: ExactValue,
    pub float_approx: String,
}

impl ConstantValue {
    fn cyc(name: String, c: &CycElement) -> Self {
        let r = RingElement::Cyclotomic(c.clone());
        ConstantValue {
            name,
            exact: ExactValue::of(&r),
            float_approx: float_approx(&r),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleReport {
    pub series: String,
    pub quadratic: Quadratic,
    pub phis: Vec<ConstantValue>,
    pub seq_a: Vec<String>,
    pub seq_b: Vec<String>,
    pub phi_sum: String,
    pub log_constant: String,
    pub log_table: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub level: u32,
    pub decomposition: Vec<ConstantValue>,
    pub bundles: Vec<BundleReport>,
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

/// Computes every constant table from scratch; fails if any internal
/// consistency check does.
pub fn constants_report() -> Result<ConstantsReport, ConstantsError> {
    let k = constants::efund_constants()?;
    let mut decomposition = Vec::new();
    for (label, triple) in [("alpha", &k.alphas), ("beta", &k.betas), ("gamma", &k.gammas)] {
        for (i, c) in triple.iter().enumerate() {
            decomposition.push(ConstantValue::cyc(format!("{label}_{}", i + 1), c));
        }
    }
    let mut bundles = Vec::new();
    for (label, q) in [("x", constants::QUAD_X), ("y", constants::QUAD_Y), ("z", constants::QUAD_Z)] {
        let b = constants::phi_bundle(&k, q)?;
        let t = constants::log_derivative_table(&b)?;
        bundles.push(BundleReport {
            series: label.to_string(),
            quadratic: q,
            phis: b
                .phis
                .iter()
                .enumerate()
                .map(|(i, c)| ConstantValue::cyc(format!("phi_{}", i + 1), c))
                .collect(),
            seq_a: strings(&b.seq_a),
            seq_b: strings(&b.seq_b),
            phi_sum: b.sum.to_string(),
            log_constant: t.constant.to_string(),
            log_table: strings(&t.table),
        });
    }
    Ok(ConstantsReport {
        level: constants::LEVEL,
        decomposition,
        bundles,
    })
}

impl ConstantsReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "decomposition constants in Q(zeta_{})", self.level);
        for c in &self.decomposition {
            let _ = writeln!(out, "  {:<8} {}", c.name, c.float_approx);
        }
        for b in &self.bundles {
            let _ = writeln!(out, "{}: quadratic {:?}", b.series, b.quadratic);
            let _ = writeln!(out, "  a = [{}]", b.seq_a.join(", "));
            let _ = writeln!(out, "  b = [{}]", b.seq_b.join(", "));
            let _ = writeln!(out, "  sum of phis = {}", b.phi_sum);
            let _ = writeln!(out, "  log-derivative: {} + sum t(n) n q^n/(1-q^n), t = [{}]", b.log_constant, b.log_table.join(", "));
        }
        out
    }
}
