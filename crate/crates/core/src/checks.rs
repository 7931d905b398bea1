//! The registry of identity checks. Every check builds a left and a right
//! side at a working order; the check passes when their difference vanishes
//! exactly below the requested order.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::constants::{self, field28};
use crate::constructors::*;
use crate::ring::{int, rat, CycElement, CycField, Rational, RingElement, TrigKind};
use crate::series::{QSeries, SeriesError, ZeroTest};

pub type Sides = (QSeries, QSeries);
pub type Builder = Arc<dyn Fn(i64) -> Result<Sides, SeriesError> + Send + Sync>;

/// A named identity `lhs = rhs` between q-series.
#[derive(Clone)]
pub struct IdentityCheck {
    pub name: String,
    /// The identity in words.
    pub anchor: String,
    /// Coefficient ring, for listings.
    pub ring: String,
    pub default_order: i64,
    builder: Builder,
}

impl fmt::Debug for IdentityCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IdentityCheck")
            .field("name", &self.name)
            .field("anchor", &self.anchor)
            .field("ring", &self.ring)
            .field("default_order", &self.default_order)
            .finish()
    }
}

impl IdentityCheck {
    pub fn new<F>(name: impl Into<String>, anchor: impl Into<String>, ring: impl Into<String>, default_order: i64, f: F) -> Self
    where
        F: Fn(i64) -> Result<Sides, SeriesError> + Send + Sync + 'static,
    {
        IdentityCheck {
            name: name.into(),
            anchor: anchor.into(),
            ring: ring.into(),
            default_order,
            builder: Arc::new(f),
        }
    }

    /// Both sides built at working order `n`.
    pub fn sides(&self, n: i64) -> Result<Sides, SeriesError> {
        (self.builder)(n)
    }

    pub fn group(&self) -> &str {
        self.name.split('.').next().unwrap_or(&self.name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CheckStatus {
    Pass,
    Fail,
    PrecisionError,
}

impl CheckStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::PrecisionError => "precision-error",
        }
    }
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The least exponent at which the two sides differ, and the difference there.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub exponent: Rational,
    pub coefficient: RingElement,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    pub order_verified: Rational,
    pub first_failure: Option<Witness>,
    pub elapsed_ms: u64,
    /// Error text for precision or construction failures.
    pub detail: Option<String>,
}

/// A single-coefficient perturbation added to the left side.
#[derive(Clone, Debug, PartialEq)]
pub struct Perturbation {
    pub exponent: Rational,
    pub coefficient: Rational,
}

const MARGINS: [i64; 3] = [0, 2, 6];

fn ceil_order(order: &Rational) -> i64 {
    order.ceil().to_integer().to_i64().expect("order fits in i64").max(0)
}

fn perturb(lhs: &QSeries, p: &Perturbation, work: i64) -> Result<QSeries, SeriesError> {
    let den = p.exponent.denom().to_i64().expect("small denominator");
    let num = p.exponent.numer().to_i64().expect("small numerator");
    let m = QSeries::monomial(RingElement::Rational(p.coefficient.clone()), num, den, (work + 64) * den)?;
    lhs.try_add(&m)
}

/// Runs one check at `order`, retrying with larger working orders when the
/// residual's known precision falls short. A nonzero coefficient below the
/// known precision is a failure; a clean residual that is known only below
/// the requested order is a precision error, never a pass.
pub fn run_check(check: &IdentityCheck, order: &Rational, perturbation: Option<&Perturbation>) -> CheckResult {
    let start = Instant::now();
    let base = ceil_order(order);
    let mut verified = Rational::zero();
    let mut detail = None;
    let mut status = CheckStatus::PrecisionError;
    let mut witness = None;
    for margin in MARGINS {
        let work = base + margin;
        let residual = check.sides(work).and_then(|(lhs, rhs)| {
            let lhs = match perturbation {
                Some(p) => perturb(&lhs, p, work)?,
                None => lhs,
            };
            lhs.try_sub(&rhs)
        });
        let residual = match residual {
            Ok(r) => r,
            Err(e) => {
                detail = Some(e.to_string());
                continue;
            }
        };
        let known = residual.precision();
        let bound = if known < *order { known.clone() } else { order.clone() };
        match residual.is_zero_below(&bound) {
            Ok(ZeroTest::NonZero { exponent, coefficient }) => {
                status = CheckStatus::Fail;
                verified = exponent.clone();
                witness = Some(Witness { exponent, coefficient });
                detail = None;
                break;
            }
            Ok(ZeroTest::Zero) if bound == *order => {
                status = CheckStatus::Pass;
                verified = order.clone();
                detail = None;
                break;
            }
            Ok(ZeroTest::Zero) => {
                if bound > verified {
                    verified = bound.clone();
                }
                detail = Some(format!("residual known below q^{known} only, requested q^{order}"));
            }
            Err(e) => detail = Some(e.to_string()),
        }
    }
    CheckResult {
        name: check.name.clone(),
        status,
        order_verified: verified,
        first_failure: witness,
        elapsed_ms: start.elapsed().as_millis() as u64,
        detail,
    }
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RunError {
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("invalid alpha {0}: {1}")]
    BadAlpha(String, String),
    #[error("invalid order `{0}`")]
    BadOrder(String),
}

/// Every registered check, sorted by name.
pub fn registry() -> Vec<IdentityCheck> {
    let mut all = Vec::new();
    all.extend(klein_checks());
    all.extend(lambert_checks());
    all.extend(system_checks());
    all.extend(eisenstein_checks());
    all.extend(constants_checks());
    all.extend(classical_checks());
    for a in [(1, 7), (2, 7), (3, 7), (1, 3), (1, 5), (2, 5)] {
        all.extend(general_alpha_checks(Alpha::new(a.0, a.1)).expect("registered alpha is valid"));
    }
    all.extend(quintic_checks());
    all.extend(cubic_checks());
    all.extend(product_checks());
    all.sort_by(|a, b| a.name.cmp(&b.name));
    all
}

/// Checks matching `selector`: an exact name or a dotted group prefix.
pub fn select<'a>(checks: &'a [IdentityCheck], selector: &str) -> Vec<&'a IdentityCheck> {
    let prefix = format!("{selector}.");
    checks
        .iter()
        .filter(|c| c.name == selector || c.name.starts_with(&prefix))
        .collect()
}

/// Resolves selectors against the registry; an empty selector list means all.
pub fn resolve(checks: &[IdentityCheck], selectors: &[String]) -> Result<Vec<IdentityCheck>, RunError> {
    if selectors.is_empty() {
        return Ok(checks.to_vec());
    }
    let mut out: Vec<IdentityCheck> = Vec::new();
    for s in selectors {
        let found = select(checks, s);
        if found.is_empty() {
            return Err(RunError::UnknownCheck(s.clone()));
        }
        for c in found {
            if !out.iter().any(|o| o.name == c.name) {
                out.push(c.clone());
            }
        }
    }
    out.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(out)
}

/// Parses `N` or `N/D` as a nonnegative rational order.
pub fn parse_order(s: &str) -> Result<Rational, RunError> {
    let bad = || RunError::BadOrder(s.to_string());
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() || d.is_negative() || n.is_negative() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// Runs `checks` (each at `order`, or at its default order) on `jobs`
/// threads; results are sorted by name.
pub fn run(checks: &[IdentityCheck], order: Option<&Rational>, jobs: Option<usize>) -> Vec<CheckResult> {
    let task = || {
        checks
            .par_iter()
            .map(|c| {
                let o = order.cloned().unwrap_or_else(|| int(c.default_order));
                run_check(c, &o, None)
            })
            .collect::<Vec<_>>()
    };
    let mut results = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map(|pool| pool.install(task))
            .unwrap_or_else(|_| task()),
        None => task(),
    };
    results.sort_by(|a, b| a.name.cmp(&b.name));
    results
}

// ---------------------------------------------------------------------------
// Helpers
// ---------------------------------------------------------------------------

fn zero(n: i64) -> QSeries {
    QSeries::zero(crate::series::Ring::Rational, 1, n)
}

fn r(n: i64) -> Rational {
    int(n)
}

fn cyc(e: CycElement) -> RingElement {
    RingElement::Cyclotomic(e)
}

fn sc(s: &QSeries, c: i64) -> QSeries {
    s.scale_rational(&int(c))
}

fn scc(s: &QSeries, c: &CycElement) -> Result<QSeries, SeriesError> {
    s.scale(&cyc(c.clone()))
}

/// `sum c x^i y^j z^k` over the listed terms, sharing powers.
pub fn poly3(terms: &[(i64, [u32; 3])], v: [&QSeries; 3]) -> Result<QSeries, SeriesError> {
    let mut cache: HashMap<(usize, u32), QSeries> = HashMap::new();
    let mut power = |which: usize, e: u32| -> Result<QSeries, SeriesError> {
        if let Some(p) = cache.get(&(which, e)) {
            return Ok(p.clone());
        }
        let p = v[which].pow(e as i64)?;
        cache.insert((which, e), p.clone());
        Ok(p)
    };
    let mut acc: Option<QSeries> = None;
    for &(c, [i, j, k]) in terms {
        let mut t: Option<QSeries> = None;
        for (which, e) in [(0, i), (1, j), (2, k)] {
            if e > 0 {
                let p = power(which, e)?;
                t = Some(match t {
                    Some(t) => t.try_mul(&p)?,
                    None => p,
                });
            }
        }
        let t = sc(&t.expect("monomial has positive degree"), c);
        acc = Some(match acc {
            Some(a) => a.try_add(&t)?,
            None => t,
        });
    }
    Ok(acc.expect("polynomial has at least one term"))
}

/// `sum c_i X^i`.
fn poly1(coeffs: &[i64], x: &QSeries, n: i64) -> Result<QSeries, SeriesError> {
    let mut acc = QSeries::zero(crate::series::Ring::Rational, 1, n);
    let mut p = QSeries::one(1, n);
    for (i, &c) in coeffs.iter().enumerate() {
        if i > 0 {
            p = p.try_mul(x)?;
        }
        acc = acc.try_add(&sc(&p, c))?;
    }
    Ok(acc)
}

struct Xyz {
    x: QSeries,
    y: QSeries,
    z: QSeries,
}

impl Xyz {
    fn new(n: i64) -> Result<Self, SeriesError> {
        Ok(Xyz {
            x: x_product(n)?,
            y: y_product(n)?,
            z: z_product(n)?,
        })
    }

    fn v(&self) -> [&QSeries; 3] {
        [&self.x, &self.y, &self.z]
    }

    fn poly(&self, terms: &[(i64, [u32; 3])]) -> Result<QSeries, SeriesError> {
        poly3(terms, self.v())
    }

    /// `xy - xz + yz`.
    fn klein(&self) -> Result<QSeries, SeriesError> {
        self.poly(&[(1, [1, 1, 0]), (-1, [1, 0, 1]), (1, [0, 1, 1])])
    }
}

fn quad_terms(q: constants::Quadratic) -> Vec<(i64, [u32; 3])> {
    vec![
        (q.xx, [2, 0, 0]),
        (q.yy, [0, 2, 0]),
        (q.zz, [0, 0, 2]),
        (q.xy, [1, 1, 0]),
        (q.xz, [1, 0, 1]),
        (q.yz, [0, 1, 1]),
    ]
}

fn q7(n: i64) -> Result<QSeries, SeriesError> {
    eisenstein(2, 7, n)
}

// ---------------------------------------------------------------------------
// Klein quartic family
// ---------------------------------------------------------------------------

fn klein_checks() -> Vec<IdentityCheck> {
    let mut v = vec![
        IdentityCheck::new("septic.klein.quartic_abc", "a^3 b + b^3 c + c^3 a = 0", "Q", 10, |n| {
            let (a, b, c) = (septic_a(n), septic_b(n), septic_c(n));
            let lhs = a.pow(3)?.try_mul(&b)? + b.pow(3)?.try_mul(&c)? + c.pow(3)?.try_mul(&a)?;
            Ok((lhs, zero(n)))
        }),
        IdentityCheck::new("septic.klein.quadric_xyz", "xy - xz + yz = 0", "Q", 200, |n| {
            Ok((Xyz::new(n)?.klein()?, zero(n)))
        }),
    ];
    let pairs: [(&str, i64, i64, [u32; 3], &str); 3] = [
        ("septic.klein.d1_minus_d2", 1, 2, [0, 1, 1], "D1 - D2 = yz"),
        ("septic.klein.d1_minus_d3", 1, 3, [1, 0, 1], "D1 - D3 = xz"),
        ("septic.klein.d2_minus_d3", 2, 3, [1, 1, 0], "D2 - D3 = xy"),
    ];
    for (name, i, j, mono, anchor) in pairs {
        v.push(IdentityCheck::new(name, anchor, "Q", 100, move |n| {
            let lhs = d_series(i, n)?.try_sub(&d_series(j, n)?)?;
            Ok((lhs, Xyz::new(n)?.poly(&[(1, mono)])?))
        }));
    }
    v
}

// ---------------------------------------------------------------------------
// Lambert forms and e-decompositions
// ---------------------------------------------------------------------------

/// The periodic table `b_n` of the x-bundle.
pub const TABLE_B: [i64; 7] = [222, -37, -37, -37, -37, -37, -37];

/// `sum_{m=1}^{7} a_m sum_n n q^(mn)/(1 - q^(7n))`.
fn mip_rhs(seq: &[i64; 7], n: i64) -> Result<QSeries, SeriesError> {
    let ones = PeriodicSeq::constant(1);
    let mut acc = QSeries::zero(crate::series::Ring::Rational, 1, n);
    for m in 1..=7i64 {
        let a = seq[(m % 7) as usize];
        if a == 0 {
            continue;
        }
        let shape = LambertShape {
            weight: 1,
            pole: 1,
            num_mult: m,
            den_mult: 7,
        };
        acc = acc.try_add(&sc(&lambert(&ones, shape, n)?, a))?;
    }
    Ok(acc)
}

fn lambert_checks() -> Vec<IdentityCheck> {
    type B = fn(i64) -> Result<QSeries, SeriesError>;
    let forms: [(&str, B, B, &str); 3] = [
        ("x", x_product, x_lambert, "x = sum a_n q^n/(1-q^n), a = {0,1,-1,-2,2,1,-1}"),
        ("y", y_product, y_lambert, "y = sum b_n q^n/(1-q^n), b = {0,1,-2,1,-1,2,-1}"),
        ("z", z_product, z_lambert, "z = 1 + sum c_n q^n/(1-q^n), c = {0,2,1,1,-1,-1,-2}"),
    ];
    let mut v = Vec::new();
    for (label, prod, lam, anchor) in forms {
        v.push(IdentityCheck::new(format!("septic.lambert.{label}_lambert_form"), anchor, "Q", 60, move |n| {
            Ok((prod(n)?, lam(n)?))
        }));
    }
    let labels = ["x", "y", "z"];
    let coeff_names = ["alpha", "beta", "gamma"];
    for (i, label) in labels.iter().enumerate() {
        let anchor = format!(
            "{label} = {c}_1 e_(1/7) + {c}_2 e_(2/7) + {c}_3 e_(3/7)",
            c = coeff_names[i]
        );
        v.push(IdentityCheck::new(
            format!("septic.lambert.{label}_efund"),
            anchor,
            "Q(zeta_28)",
            40,
            move |n| {
                let k = constants::efund_constants().map_err(|e| SeriesError::Ring(ring_err(e)))?;
                let f = k.field.clone();
                let mut acc = QSeries::zero(crate::series::Ring::Cyclotomic(f.clone()), 1, n);
                for (j, c) in k.triple(i).iter().enumerate() {
                    let e = epq_family(EpqKind::E, Alpha::new(j as i64 + 1, 7), &f, n)?;
                    acc = acc.try_add(&scc(&e, c)?)?;
                }
                let lhs = match i {
                    0 => x_product(n)?,
                    1 => y_product(n)?,
                    _ => z_product(n)?,
                };
                Ok((lhs, acc))
            },
        ));
    }
    v.push(IdentityCheck::new(
        "septic.lambert.sigma",
        "1 + 2 sum (n|7) q^n/(1-q^n) = x - y + z",
        "Q",
        60,
        |n| {
            let s = Xyz::new(n)?;
            Ok((sigma7(n)?, s.poly(&[(1, [1, 0, 0]), (-1, [0, 1, 0]), (1, [0, 0, 1])])?))
        },
    ));
    v.push(IdentityCheck::new(
        "septic.lambert.mip_table",
        "sum b_n q^n/(1-q^n)^2 = sum n/(1-q^(7n)) sum_{m=1}^{7} b_m q^(mn), b = {222,-37,...}",
        "Q",
        30,
        |n| {
            let lhs = lambert(&PeriodicSeq::from_integers(&TABLE_B), LambertShape::double_pole(), n)?;
            Ok((lhs, mip_rhs(&TABLE_B, n)?))
        },
    ));
    v.push(IdentityCheck::new(
        "septic.lambert.mip_ones",
        "sum q^n/(1-q^n)^2 = sum n/(1-q^(7n)) sum_{m=1}^{7} q^(mn)",
        "Q",
        30,
        |n| {
            let lhs = lambert(&PeriodicSeq::constant(1), LambertShape::double_pole(), n)?;
            Ok((lhs, mip_rhs(&[1; 7], n)?))
        },
    ));
    v.push(IdentityCheck::new(
        "septic.lambert.collapse",
        "sum b_n q^n/(1-q^n)^2 = -37 sum_{7 !| n} n q^n/(1-q^n)",
        "Q",
        60,
        |n| {
            let lhs = lambert(&PeriodicSeq::from_integers(&TABLE_B), LambertShape::double_pole(), n)?;
            let rhs = lambert(&PeriodicSeq::from_integers(&[0, -37, -37, -37, -37, -37, -37]), LambertShape::simple(1), n)?;
            Ok((lhs, rhs))
        },
    ));
    v
}

fn ring_err(e: constants::ConstantsError) -> crate::ring::RingError {
    match e {
        constants::ConstantsError::Ring(r) => r,
        other => crate::ring::RingError::InsufficientLevel {
            level: constants::LEVEL,
            what: other.to_string(),
        },
    }
}

// ---------------------------------------------------------------------------
// The septic differential system
// ---------------------------------------------------------------------------

pub const QUARTIC_P: [(i64, [u32; 3]); 9] = [
    (-1, [4, 0, 0]),
    (4, [3, 1, 0]),
    (12, [1, 3, 0]),
    (-1, [0, 4, 0]),
    (-12, [3, 0, 1]),
    (4, [0, 3, 1]),
    (-4, [1, 0, 3]),
    (12, [0, 1, 3]),
    (-1, [0, 0, 4]),
];

pub const E4_Q7_BRIDGE: [(i64, [u32; 3]); 9] = [
    (1, [4, 0, 0]),
    (-4, [3, 1, 0]),
    (12, [3, 0, 1]),
    (-12, [1, 3, 0]),
    (4, [1, 0, 3]),
    (1, [0, 4, 0]),
    (-4, [0, 3, 1]),
    (-12, [0, 1, 3]),
    (1, [0, 0, 4]),
];

/// The symmetric `E4(q^7)` form, with the monomial `8 x y z^2`.
pub const E4_Q7_SYM: [(i64, [u32; 3]); 12] = [
    (1, [4, 0, 0]),
    (4, [3, 1, 0]),
    (-4, [1, 3, 0]),
    (1, [0, 4, 0]),
    (4, [3, 0, 1]),
    (8, [1, 1, 2]),
    (8, [2, 1, 1]),
    (-8, [1, 2, 1]),
    (4, [0, 3, 1]),
    (-4, [1, 0, 3]),
    (-4, [0, 1, 3]),
    (1, [0, 0, 4]),
];

pub const E4_SYM: [(i64, [u32; 3]); 12] = [
    (1, [4, 0, 0]),
    (-116, [3, 1, 0]),
    (116, [1, 3, 0]),
    (1, [0, 4, 0]),
    (-116, [3, 0, 1]),
    (848, [1, 1, 2]),
    (848, [2, 1, 1]),
    (-848, [1, 2, 1]),
    (-116, [0, 3, 1]),
    (116, [1, 0, 3]),
    (116, [0, 1, 3]),
    (1, [0, 0, 4]),
];

pub const E6_SYM: [(i64, [u32; 3]); 22] = [
    (1, [6, 0, 0]),
    (258, [5, 1, 0]),
    (-5904, [4, 2, 0]),
    (-5904, [2, 4, 0]),
    (-258, [1, 5, 0]),
    (1, [0, 6, 0]),
    (258, [5, 0, 1]),
    (7310, [3, 2, 1]),
    (7310, [2, 3, 1]),
    (258, [0, 5, 1]),
    (-5904, [4, 0, 2]),
    (7310, [3, 1, 2]),
    (-8751, [2, 2, 2]),
    (-7310, [1, 3, 2]),
    (-5904, [0, 4, 2]),
    (-7310, [2, 1, 3]),
    (-7310, [1, 2, 3]),
    (-5904, [2, 0, 4]),
    (-5904, [0, 2, 4]),
    (-258, [1, 0, 5]),
    (-258, [0, 1, 5]),
    (1, [0, 0, 6]),
];

pub const E6_Q7_SYM: [(i64, [u32; 3]); 22] = [
    (1, [6, 0, 0]),
    (6, [5, 1, 0]),
    (18, [4, 2, 0]),
    (18, [2, 4, 0]),
    (-6, [1, 5, 0]),
    (1, [0, 6, 0]),
    (6, [5, 0, 1]),
    (2, [3, 2, 1]),
    (2, [2, 3, 1]),
    (6, [0, 5, 1]),
    (18, [4, 0, 2]),
    (2, [3, 1, 2]),
    (-57, [2, 2, 2]),
    (-2, [1, 3, 2]),
    (18, [0, 4, 2]),
    (-2, [2, 1, 3]),
    (-2, [1, 2, 3]),
    (18, [2, 0, 4]),
    (18, [0, 2, 4]),
    (-6, [1, 0, 5]),
    (-6, [0, 1, 5]),
    (1, [0, 0, 6]),
];

/// Periodic tables of the log-derivatives of `x`, `y`, `z` and their constant terms.
pub const LOG_TABLES: [([i64; 7], i64); 3] = [
    ([-2, 0, -1, 2, 2, -1, 0], 1),
    ([-2, -1, 2, 0, 0, 2, -1], 1),
    ([-2, 2, 0, -1, -1, 0, 2], 0),
];

fn system_checks() -> Vec<IdentityCheck> {
    let quads = [constants::QUAD_X, constants::QUAD_Y, constants::QUAD_Z];
    let labels = ["x", "y", "z"];
    let anchors = [
        "12 q dx/dq = x (5y^2 + 5z^2 - 7x^2 - 20yz - 52xy + 7P)",
        "12 q dy/dq = y (5z^2 + 5x^2 - 7y^2 + 20xz - 52yz + 7P)",
        "12 q dz/dq = z (5x^2 + 5y^2 - 7z^2 - 20xy + 52xz + 7P)",
    ];
    let mut v = Vec::new();
    for i in 0..3 {
        let q = quads[i];
        v.push(IdentityCheck::new(format!("septic.system.deq_{}", labels[i]), anchors[i], "Q", 60, move |n| {
            let s = Xyz::new(n)?;
            let f = s.v()[i].clone();
            let rhs = f.try_mul(&s.poly(&quad_terms(q))?.try_add(&sc(&q7(n)?, 7))?)?;
            Ok((sc(&f.theta(), 12), rhs))
        }));
        v.push(IdentityCheck::new(
            format!("septic.system.log_table_{}", labels[i]),
            format!("({}-quadratic + 7P)/12 = c0 + sum t(n) n q^n/(1-q^n), t periodic mod 7", labels[i]),
            "Q",
            60,
            move |n| {
                let s = Xyz::new(n)?;
                let lhs = s.poly(&quad_terms(q))?.try_add(&sc(&q7(n)?, 7))?;
                let (table, c0) = LOG_TABLES[i];
                let lam = lambert(&PeriodicSeq::from_integers(&table), LambertShape::simple(1), n)?;
                let rhs = sc(&QSeries::one(1, n).scale_rational(&int(c0)).try_add(&lam)?, 12);
                Ok((lhs, rhs))
            },
        ));
    }
    v.push(IdentityCheck::new(
        "septic.system.deq_p",
        "12 q dP/dq = 7 (P^2 - x^4 + 4x^3y + 12xy^3 - y^4 - 12x^3z + 4y^3z - 4xz^3 + 12yz^3 - z^4)",
        "Q",
        60,
        |n| {
            let s = Xyz::new(n)?;
            let p = q7(n)?;
            let rhs = sc(&p.try_mul(&p)?.try_add(&s.poly(&QUARTIC_P)?)?, 7);
            Ok((sc(&p.theta(), 12), rhs))
        },
    ));
    v.push(IdentityCheck::new(
        "septic.system.e4_q7",
        "E4(q^7) = x^4 - 4x^3y + 12x^3z - 12xy^3 + 4xz^3 + y^4 - 4y^3z - 12yz^3 + z^4",
        "Q",
        40,
        |n| Ok((eisenstein(4, 7, n)?, Xyz::new(n)?.poly(&E4_Q7_BRIDGE)?)),
    ));
    v.push(IdentityCheck::new(
        "septic.system.closing",
        "symmetric E4(q^7) form - bridge form = 8(xy - xz + yz)(x^2 + y^2 + z^2)",
        "Q",
        40,
        |n| {
            let s = Xyz::new(n)?;
            let lhs = s.poly(&E4_Q7_SYM)?.try_sub(&s.poly(&E4_Q7_BRIDGE)?)?;
            let rhs = sc(&s.klein()?.try_mul(&s.poly(&[(1, [2, 0, 0]), (1, [0, 2, 0]), (1, [0, 0, 2])])?)?, 8);
            Ok((lhs, rhs))
        },
    ));
    v
}

// ---------------------------------------------------------------------------
// Eisenstein parameterizations
// ---------------------------------------------------------------------------

fn eisenstein_checks() -> Vec<IdentityCheck> {
    let mut v = vec![
        IdentityCheck::new("septic.eisenstein.hauptmodul", "j7 yz = z^2 - xz - y^2 - 6yz", "Q", 50, |n| {
            let s = Xyz::new(n)?;
            let lhs = j7(n)?.try_mul(&s.poly(&[(1, [0, 1, 1])])?)?;
            Ok((lhs, s.poly(&[(1, [0, 0, 2]), (-1, [1, 0, 1]), (-1, [0, 2, 0]), (-6, [0, 1, 1])])?))
        }),
        IdentityCheck::new(
            "septic.eisenstein.j7_abc",
            "j7 a^2 b^2 c^2 = a b^5 + b c^5 + c a^5 - 5 a^2 b^2 c^2 (septic a, b, c)",
            "Q",
            50,
            |n| {
                let (a, b, c) = (septic_a(n), septic_b(n), septic_c(n));
                let abc2 = a.try_mul(&b)?.try_mul(&c)?.pow(2)?;
                let rhs = a.try_mul(&b.pow(5)?)? + b.try_mul(&c.pow(5)?)? + c.try_mul(&a.pow(5)?)? - sc(&abc2, 5);
                Ok((j7(n)?.try_mul(&abc2)?, rhs))
            },
        ),
        IdentityCheck::new("septic.eisenstein.hm_xyz", "q^2 (q^7;q^7)^7/(q;q) = xyz", "Q", 50, |n| {
            let lhs = eta_quotient(&ProductSpec::integral(&[(7, 7, 7), (1, 1, -1)]), n)?.shift(2);
            Ok((lhs, Xyz::new(n)?.poly(&[(1, [1, 1, 1])])?))
        }),
        IdentityCheck::new(
            "septic.eisenstein.hm_cubic",
            "q (q;q)^3 (q^7;q^7)^3 = x (z^2 - y^2 + 6xy - 7xz)",
            "Q",
            50,
            |n| {
                let lhs = eta_quotient(&ProductSpec::integral(&[(1, 1, 3), (7, 7, 3)]), n)?.shift(1);
                let rhs = Xyz::new(n)?.poly(&[(1, [1, 0, 2]), (-1, [1, 2, 0]), (6, [2, 1, 0]), (-7, [2, 0, 1])])?;
                Ok((lhs, rhs))
            },
        ),
        IdentityCheck::new(
            "septic.eisenstein.z_cubic",
            "(q;q)^7/(q^7;q^7) = x^3 - 32x^2y + 13xy^2 - y^3 + 45x^2z - 13xz^2 + z^3",
            "Q",
            50,
            |n| {
                let rhs = Xyz::new(n)?.poly(&[
                    (1, [3, 0, 0]),
                    (-32, [2, 1, 0]),
                    (13, [1, 2, 0]),
                    (-1, [0, 3, 0]),
                    (45, [2, 0, 1]),
                    (-13, [1, 0, 2]),
                    (1, [0, 0, 3]),
                ])?;
                Ok((z_eta(n)?, rhs))
            },
        ),
    ];
    type E = (&'static str, u32, i64, bool, &'static [i64], &'static str);
    let coopt: [E; 4] = [
        ("e4", 4, 1, true, &[1, 245, 2401], "E4(q) = Z sigma (1 + 245X + 2401X^2)"),
        ("e4_q7", 4, 7, true, &[1, 5, 1], "E4(q^7) = Z sigma (1 + 5X + X^2)"),
        (
            "e6",
            6,
            1,
            false,
            &[1, -490, -21609, -235298, -823543],
            "E6(q) = Z^2 (1 - 490X - 21609X^2 - 235298X^3 - 823543X^4)",
        ),
        ("e6_q7", 6, 7, false, &[1, 14, 63, 70, -7], "E6(q^7) = Z^2 (1 + 14X + 63X^2 + 70X^3 - 7X^4)"),
    ];
    for (label, w, j, with_sigma, coeffs, anchor) in coopt {
        v.push(IdentityCheck::new(format!("septic.eisenstein.coopt_{label}"), anchor, "Q", 40, move |n| {
            let z = z_eta(n)?;
            let pre = if with_sigma { z.try_mul(&sigma7(n)?)? } else { z.try_mul(&z)? };
            Ok((eisenstein(w, j, n)?, pre.try_mul(&poly1(coeffs, &x_eta(n)?, n)?)?))
        }));
    }
    type F = (&'static str, u32, i64, &'static [(i64, [u32; 3])], &'static str);
    let fina: [F; 4] = [
        ("e4", 4, 1, &E4_SYM, "E4(q) = symmetric quartic in x, y, z (coefficients 1, 116, 848)"),
        ("e4_q7", 4, 7, &E4_Q7_SYM, "E4(q^7) = symmetric quartic in x, y, z (coefficients 1, 4, 8)"),
        ("e6", 6, 1, &E6_SYM, "E6(q) = symmetric sextic in x, y, z (coefficients 1, 258, 5904, 7310, 8751)"),
        ("e6_q7", 6, 7, &E6_Q7_SYM, "E6(q^7) = symmetric sextic in x, y, z (coefficients 1, 6, 18, 2, 57)"),
    ];
    for (label, w, j, terms, anchor) in fina {
        v.push(IdentityCheck::new(format!("septic.eisenstein.sym_{label}"), anchor, "Q", 40, move |n| {
            Ok((eisenstein(w, j, n)?, Xyz::new(n)?.poly(terms)?))
        }));
    }
    v
}

// ---------------------------------------------------------------------------
// Constant tables
// ---------------------------------------------------------------------------

/// Reads `c0` and the periodic table `t` off `s = c0 + sum t(n) n q^n/(1-q^n)`
/// for `n < order`, and fails unless `t` is periodic modulo `period`.
pub fn recover_periodic_table(s: &QSeries, order: i64, period: usize) -> Result<(Rational, Vec<Rational>), String> {
    if s.denom() != 1 || s.lo() < 0 {
        return Err("series is not an ordinary power series".into());
    }
    if s.prec() < order {
        return Err(format!("series known below q^{} only", s.prec()));
    }
    let get = |k: i64| s.coeff_rational(k).ok_or_else(|| format!("coefficient of q^{k} is not rational"));
    let c0 = get(0)?;
    let mut t = vec![Rational::zero(); order.max(1) as usize];
    for m in 1..order {
        let mut acc = get(m)?;
        for d in 1..m {
            if m % d == 0 {
                acc -= &t[d as usize] * int(d);
            }
        }
        t[m as usize] = acc / int(m);
    }
    let mut table: Vec<Option<Rational>> = vec![None; period];
    for (m, v) in t.iter().enumerate().skip(1) {
        let slot = &mut table[m % period];
        match slot {
            Some(prev) if prev != v => {
                return Err(format!("table is not periodic: t({m}) = {v} but residue {} has {prev}", m % period));
            }
            Some(_) => {}
            None => *slot = Some(v.clone()),
        }
    }
    let table = table
        .into_iter()
        .enumerate()
        .map(|(r, v)| v.ok_or_else(|| format!("order too small to see residue {r}")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((c0, table))
}

/// `q d/dq log f` for a series with `f = q^k (1 + ...)`.
pub fn log_derivative(f: &QSeries) -> Result<QSeries, SeriesError> {
    f.theta().try_div(f)
}

fn constants_checks() -> Vec<IdentityCheck> {
    let mut v = Vec::new();
    let labels = ["x", "y", "z"];
    type B = fn(i64) -> Result<QSeries, SeriesError>;
    let prods: [B; 3] = [x_product, y_product, z_product];
    let quads = [constants::QUAD_X, constants::QUAD_Y, constants::QUAD_Z];
    for i in 0..3 {
        let prod = prods[i];
        let q = quads[i];
        v.push(IdentityCheck::new(
            format!("septic.constants.bundle_{}", labels[i]),
            format!(
                "q d/dq log {} = c0 + sum t(n) n q^n/(1-q^n) with c0, t from the Q(zeta_28) bundle of its quadratic",
                labels[i]
            ),
            "Q",
            40,
            move |n| {
                let k = constants::efund_constants().map_err(|e| SeriesError::Ring(ring_err(e)))?;
                let bundle = constants::phi_bundle(&k, q).map_err(|e| SeriesError::Ring(ring_err(e)))?;
                let t = constants::log_derivative_table(&bundle).map_err(|e| SeriesError::Ring(ring_err(e)))?;
                let lam = lambert(&PeriodicSeq::from_rationals(t.table.to_vec()), LambertShape::simple(1), n)?;
                let rhs = QSeries::one(1, n).scale_rational(&t.constant).try_add(&lam)?;
                Ok((log_derivative(&prod(n + 1)?)?.truncate(n), rhs))
            },
        ));
    }
    v
}

// ---------------------------------------------------------------------------
// Classical systems
// ---------------------------------------------------------------------------

fn classical_checks() -> Vec<IdentityCheck> {
    let mut v = vec![
        IdentityCheck::new("classical.rdiff_e2", "12 q dE2/dq = E2^2 - E4", "Q", 80, |n| {
            let (e2, e4) = (eisenstein(2, 1, n)?, eisenstein(4, 1, n)?);
            Ok((sc(&e2.theta(), 12), e2.try_mul(&e2)?.try_sub(&e4)?))
        }),
        IdentityCheck::new("classical.rdiff_e4", "3 q dE4/dq = E2 E4 - E6", "Q", 80, |n| {
            let (e2, e4, e6) = (eisenstein(2, 1, n)?, eisenstein(4, 1, n)?, eisenstein(6, 1, n)?);
            Ok((sc(&e4.theta(), 3), e2.try_mul(&e4)?.try_sub(&e6)?))
        }),
        IdentityCheck::new("classical.rdiff_e6", "2 q dE6/dq = E2 E6 - E4^2", "Q", 80, |n| {
            let (e2, e4, e6) = (eisenstein(2, 1, n)?, eisenstein(4, 1, n)?, eisenstein(6, 1, n)?);
            Ok((sc(&e6.theta(), 2), e2.try_mul(&e6)?.try_sub(&e4.try_mul(&e4)?)?))
        }),
    ];
    for k in 1..=3i64 {
        let a = Alpha::new(k, 7);
        let tag = alpha_tag(a);
        v.push(IdentityCheck::new(
            format!("classical.lemp_square.{tag}"),
            "e_a^2 = 1 + 16 tan^2(pi a) sum cos(2 pi a n) q^n/(1-q^n)^2 + 8 tan^2(pi a) sum (1 - cos(2 pi a n)) n q^n/(1-q^n)",
            "Q(zeta_28)",
            30,
            move |n| lemp_square(a, n),
        ));
        v.push(IdentityCheck::new(
            format!("classical.lemp_dual.{tag}"),
            "(cot(pi(1-2a)) e_(1-2a) + 2 cot(pi a) e_a)^2 = csc^2(pi(1-2a)) P_(1-2a) + 2 csc^2(pi a) P_a - E2",
            "Q(zeta_28)",
            30,
            move |n| lemp_dual(a, n),
        ));
        v.push(IdentityCheck::new(
            format!("classical.ba_square.{tag}"),
            "e_a^2 = 1 + sum delta_a(n) n q^n/(1-q^n) + sum lambda_a(n) q^n/(1-q^n)^2",
            "Q(zeta_28)",
            30,
            move |n| ba_square(k, n),
        ));
        v.push(IdentityCheck::new(
            format!("classical.ba_product.{tag}"),
            "e_a e_(1-2a) = 1 + sum kappa_a(n) n q^n/(1-q^n) + sum mu_a(n) q^n/(1-q^n)^2",
            "Q(zeta_28)",
            30,
            move |n| ba_product(k, n),
        ));
    }
    v
}

pub fn alpha_tag(a: Alpha) -> String {
    format!("alpha_{}_{}", a.num, a.den)
}

fn trig_seq(kind: TrigKind, mult: i64, a: Alpha, f: &Arc<CycField>) -> Result<PeriodicSeq, SeriesError> {
    let vals = (0..a.den)
        .map(|r| trig_at(kind, mult * r, a, f).map(cyc))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PeriodicSeq::new(vals))
}

fn lemp_square(a: Alpha, n: i64) -> Result<Sides, SeriesError> {
    let f = field28();
    let e = epq_family(EpqKind::E, a, &f, n)?;
    let t = trig_at(TrigKind::Tan, 1, a, &f)?;
    let t2 = &t * &t;
    let cosines = trig_seq(TrigKind::Cos, 2, a, &f)?;
    let s1 = lambert(&cosines, LambertShape::double_pole(), n)?;
    let s2 = lambert(&PeriodicSeq::constant(1), LambertShape::simple(1), n)?;
    let s3 = lambert(&cosines, LambertShape::simple(1), n)?;
    let rhs = QSeries::one(1, n)
        .try_add(&scc(&s1, &t2.scale(&r(16)))?)?
        .try_add(&scc(&s2, &t2.scale(&r(8)))?)?
        .try_sub(&scc(&s3, &t2.scale(&r(8)))?)?;
    Ok((e.try_mul(&e)?, rhs))
}

fn lemp_dual(a: Alpha, n: i64) -> Result<Sides, SeriesError> {
    let f = field28();
    let d = a.dual();
    let (ea, ed) = (epq_family(EpqKind::E, a, &f, n)?, epq_family(EpqKind::E, d, &f, n)?);
    let (pa, pd) = (epq_family(EpqKind::P, a, &f, n)?, epq_family(EpqKind::P, d, &f, n)?);
    let cot_d = trig_at(TrigKind::Cot, 1, d, &f)?;
    let cot_a = trig_at(TrigKind::Cot, 1, a, &f)?.scale(&r(2));
    let csc_d = trig_at(TrigKind::Csc, 1, d, &f)?;
    let csc_a = trig_at(TrigKind::Csc, 1, a, &f)?;
    let lin = scc(&ed, &cot_d)?.try_add(&scc(&ea, &cot_a)?)?;
    let rhs = scc(&pd, &(&csc_d * &csc_d))?
        .try_add(&scc(&pa, &(&csc_a * &csc_a).scale(&r(2)))?)?
        .try_sub(&eisenstein(2, 1, n)?)?;
    Ok((lin.try_mul(&lin)?, rhs))
}

type Fam = fn(i64, i64, &Arc<CycField>) -> Result<CycElement, constants::ConstantsError>;

fn family_seq(fam: Fam, k: i64, f: &Arc<CycField>) -> Result<PeriodicSeq, SeriesError> {
    let vals = (0..7)
        .map(|n| fam(k, n, f).map(cyc).map_err(|e| SeriesError::Ring(ring_err(e))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PeriodicSeq::new(vals))
}

fn ba_square(k: i64, n: i64) -> Result<Sides, SeriesError> {
    let f = field28();
    let e = epq_family(EpqKind::E, Alpha::new(k, 7), &f, n)?;
    let s1 = lambert(&family_seq(constants::delta, k, &f)?, LambertShape::simple(1), n)?;
    let s2 = lambert(&family_seq(constants::lambda, k, &f)?, LambertShape::double_pole(), n)?;
    Ok((e.try_mul(&e)?, QSeries::one(1, n).try_add(&s1)?.try_add(&s2)?))
}

fn ba_product(k: i64, n: i64) -> Result<Sides, SeriesError> {
    let f = field28();
    let a = Alpha::new(k, 7);
    let e = epq_family(EpqKind::E, a, &f, n)?.try_mul(&epq_family(EpqKind::E, a.dual(), &f, n)?)?;
    let s1 = lambert(&family_seq(constants::kappa, k, &f)?, LambertShape::simple(1), n)?;
    let s2 = lambert(&family_seq(constants::mu, k, &f)?, LambertShape::double_pole(), n)?;
    Ok((e, QSeries::one(1, n).try_add(&s1)?.try_add(&s2)?))
}

// ---------------------------------------------------------------------------
// The general e/P/Q system
// ---------------------------------------------------------------------------

/// The three differential equations at `alpha`. Rejects `alpha` where the
/// system is undefined: `alpha` an integer or half-integer, or `1 - 2 alpha`
/// a half-integer (so `e_(1-2 alpha)` has a pole in its prefactor).
pub fn general_alpha_checks(a: Alpha) -> Result<Vec<IdentityCheck>, RunError> {
    let bad = |why: &str| RunError::BadAlpha(a.to_string(), why.to_string());
    if a.den == 1 {
        return Err(bad("alpha is an integer"));
    }
    if a.den == 2 {
        return Err(bad("alpha is congruent to 1/2"));
    }
    if a.dual().den == 2 {
        return Err(bad("1 - 2 alpha is congruent to 1/2"));
    }
    let tag = alpha_tag(a);
    let level = a.level();
    let ring = format!("Q(zeta_{level})");
    Ok(vec![
        IdentityCheck::new(
            format!("general.{tag}.deqe"),
            "q de/dq = csc^2(pi a)/4 (e P - Q)",
            ring.clone(),
            25,
            move |n| general_sides(a, 0, n),
        ),
        IdentityCheck::new(
            format!("general.{tag}.deqp"),
            "q dP/dq = csc^2(pi a)/4 P^2 - cot^2(pi a)/2 e Q + cot(pi a) cot(2 pi a)/2 e_(1-2a) Q",
            ring.clone(),
            25,
            move |n| general_sides(a, 1, n),
        ),
        IdentityCheck::new(
            format!("general.{tag}.deqq"),
            "q dQ/dq = Q (P csc^2(pi a)/4 + P_(1-2a) csc^2(2 pi a)/2 - e_(1-2a)^2 cot^2(2 pi a)/2 + 3/2 e e_(1-2a) cot(pi a) cot(2 pi a) - e^2 cot^2(pi a))",
            ring,
            25,
            move |n| general_sides(a, 2, n),
        ),
    ])
}

fn general_sides(a: Alpha, which: usize, n: i64) -> Result<Sides, SeriesError> {
    let f = CycField::new(a.level());
    let d = a.dual();
    let e = epq_family(EpqKind::E, a, &f, n)?;
    let p = epq_family(EpqKind::P, a, &f, n)?;
    let q = epq_family(EpqKind::Q, a, &f, n)?;
    let csc = trig_at(TrigKind::Csc, 1, a, &f)?;
    let csc2 = &csc * &csc;
    let cot = trig_at(TrigKind::Cot, 1, a, &f)?;
    let cot2 = &cot * &cot;
    let cot_2a = trig_at(TrigKind::Cot, 2, a, &f)?;
    let quarter = rat(1, 4);
    let half = rat(1, 2);
    match which {
        0 => {
            let rhs = scc(&e.try_mul(&p)?.try_sub(&q)?, &csc2.scale(&quarter))?;
            Ok((e.theta(), rhs))
        }
        1 => {
            let ed = epq_family(EpqKind::E, d, &f, n)?;
            let rhs = scc(&p.try_mul(&p)?, &csc2.scale(&quarter))?
                .try_sub(&scc(&e.try_mul(&q)?, &cot2.scale(&half))?)?
                .try_add(&scc(&ed.try_mul(&q)?, &(&cot * &cot_2a).scale(&half))?)?;
            Ok((p.theta(), rhs))
        }
        _ => {
            let ed = epq_family(EpqKind::E, d, &f, n)?;
            let pd = epq_family(EpqKind::P, d, &f, n)?;
            let csc_2a = trig_at(TrigKind::Csc, 2, a, &f)?;
            let inner = scc(&p, &csc2.scale(&quarter))?
                .try_add(&scc(&pd, &(&csc_2a * &csc_2a).scale(&half))?)?
                .try_sub(&scc(&ed.try_mul(&ed)?, &(&cot_2a * &cot_2a).scale(&half))?)?
                .try_add(&scc(&e.try_mul(&ed)?, &(&cot * &cot_2a).scale(&rat(3, 2)))?)?
                .try_sub(&scc(&e.try_mul(&e)?, &cot2)?)?;
            Ok((q.theta(), q.try_mul(&inner)?))
        }
    }
}

// ---------------------------------------------------------------------------
// Quintic and cubic systems
// ---------------------------------------------------------------------------

fn quintic_checks() -> Vec<IdentityCheck> {
    vec![
        IdentityCheck::new(
            "quintic.deq_a",
            "60 q dA/dq = A (7B^10 - 5A^10 - 66A^5B^5 + 5P), P = E2(q^5)",
            "Q",
            30,
            |n| quintic_sides(0, n),
        ),
        IdentityCheck::new(
            "quintic.deq_b",
            "60 q dB/dq = B (7A^10 - 5B^10 + 66A^5B^5 + 5P), P = E2(q^5)",
            "Q",
            30,
            |n| quintic_sides(1, n),
        ),
        IdentityCheck::new(
            "quintic.deq_p",
            "12 q dP/dq = 5 (P^2 - B^20 + 12B^15A^5 - 14B^10A^10 - 12B^5A^15 - A^20)",
            "Q",
            30,
            |n| quintic_sides(2, n),
        ),
    ]
}

fn quintic_sides(which: usize, n: i64) -> Result<Sides, SeriesError> {
    let a = quintic('A', n)?;
    let b = quintic('B', n)?;
    let p = eisenstein(2, 5, n)?;
    let a5 = a.pow(5)?;
    let b5 = b.pow(5)?;
    let a10 = a5.try_mul(&a5)?;
    let b10 = b5.try_mul(&b5)?;
    let a5b5 = a5.try_mul(&b5)?;
    match which {
        0 => {
            let inner = sc(&b10, 7).try_sub(&sc(&a10, 5))?.try_sub(&sc(&a5b5, 66))?.try_add(&sc(&p, 5))?;
            Ok((sc(&a.theta(), 60), a.try_mul(&inner)?))
        }
        1 => {
            let inner = sc(&a10, 7).try_sub(&sc(&b10, 5))?.try_add(&sc(&a5b5, 66))?.try_add(&sc(&p, 5))?;
            Ok((sc(&b.theta(), 60), b.try_mul(&inner)?))
        }
        _ => {
            let inner = p
                .try_mul(&p)?
                .try_sub(&b10.try_mul(&b10)?)?
                .try_add(&sc(&b10.try_mul(&a5b5)?, 12))?
                .try_sub(&sc(&a10.try_mul(&b10)?, 14))?
                .try_sub(&sc(&a10.try_mul(&a5b5)?, 12))?
                .try_sub(&a10.try_mul(&a10)?)?;
            Ok((sc(&p.theta(), 12), sc(&inner, 5)))
        }
    }
}

fn cubic_checks() -> Vec<IdentityCheck> {
    vec![
        IdentityCheck::new("cubic.deq_a", "3 q da/dq = a P - b^3", "Q", 40, |n| {
            let (a, b, p) = (cubic_theta(CubicKind::A, n), cubic_theta(CubicKind::B, n), cubic_p(n)?);
            Ok((sc(&a.theta(), 3), a.try_mul(&p)?.try_sub(&b.pow(3)?)?))
        }),
        IdentityCheck::new("cubic.deq_p", "3 q dP/dq = P^2 - a b^3", "Q", 40, |n| {
            let (a, b, p) = (cubic_theta(CubicKind::A, n), cubic_theta(CubicKind::B, n), cubic_p(n)?);
            Ok((sc(&p.theta(), 3), p.try_mul(&p)?.try_sub(&a.try_mul(&b.pow(3)?)?)?))
        }),
        IdentityCheck::new("cubic.deq_b3", "q d(b^3)/dq = P b^3 - a^2 b^3", "Q", 40, |n| {
            let (a, b, p) = (cubic_theta(CubicKind::A, n), cubic_theta(CubicKind::B, n), cubic_p(n)?);
            let b3 = b.pow(3)?;
            Ok((b3.theta(), p.try_mul(&b3)?.try_sub(&a.try_mul(&a)?.try_mul(&b3)?)?))
        }),
    ]
}

// ---------------------------------------------------------------------------
// Theta products
// ---------------------------------------------------------------------------

/// `sum (-1)^n (2n+1) q^(7(2n+1)^2/8)`, the derivative at the origin of the
/// defining sum of `theta_1(z | q^7)`.
pub fn theta1_prime_sum(order: i64) -> QSeries {
    let prec = 8 * order;
    let mut c = vec![Rational::zero(); prec.max(0) as usize];
    let mut m = 0i64;
    loop {
        let e = 7 * (2 * m + 1) * (2 * m + 1);
        if e >= prec {
            break;
        }
        // n = m and n = -m - 1 contribute equally
        let sign = if m % 2 == 0 { 1 } else { -1 };
        c[e as usize] += int(2 * sign * (2 * m + 1));
        m += 1;
    }
    QSeries::from_dense(crate::series::Ring::Rational, 8, 0, prec, c)
}

fn product_checks() -> Vec<IdentityCheck> {
    let mut v = Vec::new();
    for k in 1..=3i64 {
        v.push(IdentityCheck::new(
            format!("products.jtp_{k}"),
            format!("theta_1({k} pi tau | q^7) bilateral sum = triple product"),
            "Q(i)",
            20,
            move |n| {
                let g = gaussian_field();
                Ok((theta1_sum(k, &g, n)?, theta1_product(k, &g, n)?))
            },
        ));
    }
    v.push(IdentityCheck::new(
        "products.theta1_prime",
        "theta_1'(q^7) = 2 q^(7/8) (q^7;q^7)^3",
        "Q",
        20,
        |n| Ok((theta1_prime_sum(n), theta1_prime_q7(n)?)),
    ));
    // (shift in eighths, numerator k, squared denominator k, constant i-multiple, L multipliers)
    type LogQuotient = (&'static str, i64, i64, i64, i64, [i64; 3], &'static str);
    let quotients_log: [LogQuotient; 3] = [
        (
            "products.log_quotient_1",
            -8,
            2,
            3,
            -2,
            [1, -1, -2],
            "q^-1 theta_1' theta_1(2 pi tau)/theta_1(3 pi tau)^2 = -2i + L1 - L2 - 2 L3",
        ),
        (
            "products.log_quotient_2",
            -4,
            1,
            2,
            0,
            [1, -2, 1],
            "q^-1/2 theta_1' theta_1(pi tau)/theta_1(2 pi tau)^2 = L1 - 2 L2 + L3",
        ),
        (
            "products.log_quotient_3",
            4,
            3,
            1,
            2,
            [2, 1, 1],
            "q^1/2 theta_1' theta_1(3 pi tau)/theta_1(pi tau)^2 = 2i + 2 L1 + L2 + L3",
        ),
    ];
    for (name, shift8, num, den, i_mult, ls, anchor) in quotients_log {
        v.push(IdentityCheck::new(name, anchor, "Q(i)", 20, move |n| log_quotient_sides(shift8, num, den, i_mult, ls, n)));
    }
    type B = fn(i64) -> Result<QSeries, SeriesError>;
    let quotients: [(&str, B, B); 3] = [
        ("x", x_theta, x_product),
        ("y", y_theta, y_product),
        ("z", z_theta, z_product),
    ];
    for (label, th, pr) in quotients {
        v.push(IdentityCheck::new(
            format!("products.{label}_theta_quotient"),
            format!("{label} as q^(7/8) (q^7;q^7)^3 theta quotient = {label} as Pochhammer product"),
            "Q",
            30,
            move |n| Ok((th(n)?, pr(n)?)),
        ));
    }
    v
}

fn log_quotient_sides(shift8: i64, num: i64, den: i64, i_mult: i64, ls: [i64; 3], n: i64) -> Result<Sides, SeriesError> {
    let g = gaussian_field();
    let work = n + 2;
    let t_num = theta1_product(num, &g, work)?;
    let t_den = theta1_product(den, &g, work)?;
    let lhs = theta1_prime_q7(work)?
        .try_mul(&t_num)?
        .try_div(&t_den.try_mul(&t_den)?)?
        .shift_by(shift8, 8)
        .reduced();
    let i = CycElement::zeta_pow(&g, 1);
    let mut rhs = QSeries::constant(cyc(i.scale(&r(i_mult))), 1, n);
    for (k, &m) in ls.iter().enumerate() {
        if m != 0 {
            rhs = rhs.try_add(&theta1_log_derivative(k as i64 + 1, &g, n)?.scale_rational(&r(m)))?;
        }
    }
    Ok((lhs, rhs))
}

/// Builds `lhs - rhs` for the named check at `order` without retries.
pub fn residual(check: &IdentityCheck, order: i64) -> Result<QSeries, SeriesError> {
    let (l, r) = check.sides(order)?;
    l.try_sub(&r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn by_name(name: &str) -> IdentityCheck {
        registry().into_iter().find(|c| c.name == name).unwrap()
    }

    fn first_failure(sides: Sides, order: i64) -> ZeroTest {
        sides.0.try_sub(&sides.1).unwrap().is_zero_to(order, 1).unwrap()
    }

    #[test]
    fn names_are_unique_and_sorted() {
        let r = registry();
        for w in r.windows(2) {
            assert!(w[0].name < w[1].name, "{} / {}", w[0].name, w[1].name);
        }
    }

    #[test]
    fn order_parsing() {
        assert_eq!(parse_order("40").unwrap(), int(40));
        assert_eq!(parse_order("7/2").unwrap(), rat(7, 2));
        assert!(parse_order("x").is_err());
        assert!(parse_order("1/0").is_err());
        assert!(parse_order("-3").is_err());
    }

    #[test]
    fn selection_by_group_prefix() {
        let r = registry();
        assert_eq!(select(&r, "septic.klein").len(), 5);
        assert_eq!(select(&r, "septic.klein.quadric_xyz").len(), 1);
        assert!(select(&r, "septic.kle").is_empty());
        assert!(matches!(resolve(&r, &["bogus".into()]), Err(RunError::UnknownCheck(_))));
    }

    #[test]
    fn small_klein_run_passes() {
        let r = registry();
        let checks = resolve(&r, &["septic.klein".into()]).unwrap();
        let res = run(&checks, Some(&int(5)), Some(2));
        for c in &res {
            assert_eq!(c.status, CheckStatus::Pass, "{c:?}");
            assert_eq!(c.order_verified, int(5));
        }
    }

    #[test]
    fn perturbation_is_found() {
        let c = by_name("septic.klein.d1_minus_d2");
        let p = Perturbation {
            exponent: int(5),
            coefficient: int(1),
        };
        let res = run_check(&c, &int(20), Some(&p));
        assert_eq!(res.status, CheckStatus::Fail);
        let w = res.first_failure.unwrap();
        assert_eq!(w.exponent, int(5));
        assert_eq!(w.coefficient, RingElement::Rational(int(1)));
    }

    #[test]
    fn monomial_8xyz_variant_fails() {
        let s = Xyz::new(12).unwrap();
        let mut variant = E4_Q7_SYM.to_vec();
        variant[5] = (8, [1, 1, 1]);
        let t = first_failure((eisenstein(4, 7, 12).unwrap(), s.poly(&variant).unwrap()), 12);
        // the residual is 8xyz(z - 1) = 16 q^3 + ...
        assert_eq!(
            t,
            ZeroTest::NonZero {
                exponent: int(3),
                coefficient: RingElement::Rational(int(16))
            }
        );
    }

    #[test]
    fn third_log_quotient_variant_fails() {
        // 2i + L1 + L2 + L3 is off by L1 = -i + O(q)
        let t = first_failure(log_quotient_sides(4, 3, 1, 2, [1, 1, 1], 6).unwrap(), 6);
        match t {
            ZeroTest::NonZero { exponent, .. } => assert_eq!(exponent, int(0)),
            ZeroTest::Zero => panic!("variant should fail"),
        }
    }

    #[test]
    fn third_product_prefactor_variant_fails() {
        let g = gaussian_field();
        let good = theta1_product(3, &g, 6).unwrap();
        let variant = good.shift_by(2, 8);
        let sum = theta1_sum(3, &g, 6).unwrap();
        assert!(!first_failure((sum, variant), 5).is_zero());
    }

    #[test]
    fn recovered_tables() {
        let lx = log_derivative(&x_product(30).unwrap()).unwrap();
        let (c0, t) = recover_periodic_table(&lx, 29, 7).unwrap();
        assert_eq!(c0, int(1));
        assert_eq!(t, [-2, 0, -1, 2, 2, -1, 0].map(int).to_vec());
        let lz = log_derivative(&z_product(30).unwrap()).unwrap();
        let (c0, t) = recover_periodic_table(&lz, 29, 7).unwrap();
        assert_eq!(c0, int(0));
        assert_eq!(t, [-2, 2, 0, -1, -1, 0, 2].map(int).to_vec());
    }

    #[test]
    fn excluded_alphas() {
        assert!(general_alpha_checks(Alpha::new(1, 2)).is_err());
        assert!(general_alpha_checks(Alpha::new(3, 1)).is_err());
        assert!(general_alpha_checks(Alpha::new(1, 4)).is_err());
        assert_eq!(general_alpha_checks(Alpha::new(1, 7)).unwrap().len(), 3);
    }

    #[test]
    fn precision_shortfall_is_not_a_pass() {
        let c = IdentityCheck::new("t.short", "", "Q", 5, |n| {
            let x = QSeries::one(1, n.min(3));
            Ok((x.clone(), x))
        });
        let res = run_check(&c, &int(5), None);
        assert_eq!(res.status, CheckStatus::PrecisionError);
        assert_eq!(res.order_verified, int(3));
    }
}
