//! Builders for every named series: Pochhammer products and eta quotients,
//! bilateral and lattice theta sums, Lambert series with periodic
//! coefficients, Eisenstein series and the `e`, `P`, `Q` families.
//!
//! Orders passed to these functions are integer `q`-exponents: a builder
//! called with `order = N` returns a series known exactly below `q^N`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::ring::{embed, int, rat, trig_value, CycElement, CycField, Rational, RingElement, TrigKind};
use crate::series::{QSeries, Ring, SeriesError};

// ---------------------------------------------------------------------------
// Periodic sequences
// ---------------------------------------------------------------------------

/// A sequence indexed by residues modulo its period.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicSeq {
    values: Vec<RingElement>,
}

impl PeriodicSeq {
    pub fn new(values: Vec<RingElement>) -> Self {
        assert!(!values.is_empty(), "period must be positive");
        PeriodicSeq { values }
    }

    pub fn from_integers(values: &[i64]) -> Self {
        Self::new(values.iter().map(|&v| RingElement::Rational(int(v))).collect())
    }

    pub fn from_rationals(values: Vec<Rational>) -> Self {
        Self::new(values.into_iter().map(RingElement::Rational).collect())
    }

    pub fn constant(value: i64) -> Self {
        Self::from_integers(&[value])
    }

    pub fn period(&self) -> usize {
        self.values.len()
    }

    pub fn at(&self, n: i64) -> &RingElement {
        &self.values[n.rem_euclid(self.values.len() as i64) as usize]
    }

    pub fn values(&self) -> &[RingElement] {
        &self.values
    }

    /// Common coefficient ring of the values.
    pub fn ring(&self) -> Result<Ring, SeriesError> {
        let mut ring = Ring::Rational;
        for v in &self.values {
            if let RingElement::Cyclotomic(c) = v {
                ring = ring.join(&Ring::Cyclotomic(c.field().clone()))?;
            }
        }
        Ok(ring)
    }

    /// Rational values, if every entry is rational.
    pub fn to_rationals(&self) -> Option<Vec<Rational>> {
        self.values.iter().map(RingElement::to_rational).collect()
    }
}

// ---------------------------------------------------------------------------
// Products
// ---------------------------------------------------------------------------

/// One factor `(q^(offset/D); q^modulus)_inf^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProductFactor {
    /// Offset in `1/D` exponent units.
    pub offset: i64,
    /// Step in whole powers of `q`.
    pub modulus: i64,
    pub exponent: i64,
}

/// A product of Pochhammer symbols over a common exponent denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductSpec {
    pub denom: i64,
    pub factors: Vec<ProductFactor>,
}

impl ProductSpec {
    /// Factors given as `(offset, modulus, exponent)` with `D = 1`.
    pub fn integral(factors: &[(i64, i64, i64)]) -> Self {
        ProductSpec {
            denom: 1,
            factors: factors
                .iter()
                .map(|&(offset, modulus, exponent)| ProductFactor {
                    offset,
                    modulus,
                    exponent,
                })
                .collect(),
        }
    }
}

/// Multiplies the dense table by `(1 - q^e)` in place.
fn mul_one_minus(c: &mut [Rational], e: usize) {
    for n in (e..c.len()).rev() {
        if !c[n - e].is_zero() {
            let t = c[n - e].clone();
            c[n] -= t;
        }
    }
}

/// Divides the dense table by `(1 - q^e)` in place.
fn div_one_minus(c: &mut [Rational], e: usize) {
    for n in e..c.len() {
        if !c[n - e].is_zero() {
            let t = c[n - e].clone();
            c[n] += t;
        }
    }
}

/// `(q^(offset/D); q^modulus)_inf` truncated below `q^order`.
pub fn pochhammer(offset: i64, modulus: i64, denom: i64, order: i64) -> Result<QSeries, SeriesError> {
    eta_quotient(
        &ProductSpec {
            denom,
            factors: vec![ProductFactor {
                offset,
                modulus,
                exponent: 1,
            }],
        },
        order,
    )
}

/// The product described by `spec`, truncated below `q^order`. Every factor
/// `1 - q^(t/D)` with `t/D < order` is applied, so the result is exact.
pub fn eta_quotient(spec: &ProductSpec, order: i64) -> Result<QSeries, SeriesError> {
    let denom = spec.denom;
    let prec = order * denom;
    let len = prec.max(0) as usize;
    let mut c = vec![Rational::zero(); len];
    if len == 0 {
        return Ok(QSeries::zero(Ring::Rational, denom, prec));
    }
    c[0] = Rational::one();
    let mut vanished = false;
    for f in &spec.factors {
        assert!(f.modulus >= 1 && f.offset >= 0, "bad Pochhammer factor");
        if f.exponent == 0 {
            continue;
        }
        let step = f.modulus * denom;
        let mut t = f.offset;
        if t == 0 {
            if f.exponent < 0 {
                return Err(SeriesError::ZeroSeries);
            }
            vanished = true;
            t += step;
        }
        while t < prec {
            for _ in 0..f.exponent.abs() {
                if f.exponent > 0 {
                    mul_one_minus(&mut c, t as usize);
                } else {
                    div_one_minus(&mut c, t as usize);
                }
            }
            t += step;
        }
    }
    if vanished {
        return Ok(QSeries::zero(Ring::Rational, denom, prec));
    }
    Ok(QSeries::from_dense(Ring::Rational, denom, 0, prec, c))
}

// ---------------------------------------------------------------------------
// Theta sums
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaSign {
    Plus,
    /// `(-1)^n`
    Alternating,
}

/// `sum_n s(n) q^((a n^2 + b n + c)/D)` over all integers `n`, truncated below `q^order`.
pub fn bilateral_theta(a: i64, b: i64, c: i64, denom: i64, sign: ThetaSign, order: i64) -> QSeries {
    assert!(a > 0, "quadratic must open upwards");
    let prec = order * denom;
    // a n^2 + b n + c < prec  <=>  |n + b/2a| < sqrt(b^2 - 4a(c - prec)) / 2a
    let disc = (b * b - 4 * a * (c - prec)) as f64;
    let centre = -(b as f64) / (2.0 * a as f64);
    let half = if disc > 0.0 { disc.sqrt() / (2.0 * a as f64) } else { 0.0 };
    let lo_n = (centre - half).floor() as i64 - 2;
    let hi_n = (centre + half).ceil() as i64 + 2;
    let mut terms: Vec<(i64, i64)> = Vec::new();
    for n in lo_n..=hi_n {
        let e = a * n * n + b * n + c;
        if e < prec {
            let s = match sign {
                ThetaSign::Plus => 1,
                ThetaSign::Alternating => {
                    if n.rem_euclid(2) == 0 {
                        1
                    } else {
                        -1
                    }
                }
            };
            terms.push((e, s));
        }
    }
    let lo = terms.iter().map(|t| t.0).min().unwrap_or(prec).min(prec);
    let mut coeffs = vec![Rational::zero(); (prec - lo) as usize];
    for (e, s) in terms {
        coeffs[(e - lo) as usize] += int(s);
    }
    QSeries::from_dense(Ring::Rational, denom, lo, prec, coeffs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CubicKind {
    A,
    B,
    C,
}

/// The cubic theta functions `a(q)`, `b(q)`, `c(q)` as lattice sums over
/// the form `n^2 + nm + m^2`; `c` lives over `D = 3`.
pub fn cubic_theta(kind: CubicKind, order: i64) -> QSeries {
    let bound = (2.0 * (order.max(0) as f64 / 3.0).sqrt()).ceil() as i64 + 2;
    match kind {
        CubicKind::A => {
            let mut c = vec![Rational::zero(); order.max(0) as usize];
            for n in -bound..=bound {
                for m in -bound..=bound {
                    let e = n * n + n * m + m * m;
                    if e < order {
                        c[e as usize] += int(1);
                    }
                }
            }
            QSeries::from_dense(Ring::Rational, 1, 0, order, c)
        }
        CubicKind::B => {
            let field = CycField::new(3);
            let dim = field.degree();
            let mut c = vec![Rational::zero(); order.max(0) as usize * dim];
            let roots: Vec<CycElement> = (0..3).map(|k| CycElement::zeta_pow(&field, k)).collect();
            for n in -bound..=bound {
                for m in -bound..=bound {
                    let e = n * n + n * m + m * m;
                    if e < order {
                        let w = &roots[(n - m).rem_euclid(3) as usize];
                        for (dst, src) in c[e as usize * dim..(e as usize + 1) * dim].iter_mut().zip(w.coords()) {
                            *dst += src;
                        }
                    }
                }
            }
            QSeries::from_dense(Ring::Cyclotomic(field), 1, 0, order, c)
                .to_rational_ring()
                .expect("cubic b(q) must have rational coefficients")
        }
        CubicKind::C => {
            let prec = 3 * order;
            let mut c = vec![Rational::zero(); prec.max(0) as usize];
            for n in -bound - 1..=bound + 1 {
                for m in -bound - 1..=bound + 1 {
                    let (u, v) = (3 * n + 1, 3 * m + 1);
                    // (u^2 + uv + v^2)/9 in units of 1/3
                    let e = (u * u + u * v + v * v) / 3;
                    if e < prec {
                        c[e as usize] += int(1);
                    }
                }
            }
            QSeries::from_dense(Ring::Rational, 3, 0, prec, c)
        }
    }
}

// ---------------------------------------------------------------------------
// Lambert series
// ---------------------------------------------------------------------------

/// Shape of a Lambert series `sum_{n>=1} s(n) n^weight q^(a n) / (1 - q^(m n))^pole`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LambertShape {
    pub weight: u32,
    pub pole: u32,
    pub num_mult: i64,
    pub den_mult: i64,
}

impl LambertShape {
    /// `sum s(n) n^weight q^n / (1 - q^n)`.
    pub fn simple(weight: u32) -> Self {
        LambertShape {
            weight,
            pole: 1,
            num_mult: 1,
            den_mult: 1,
        }
    }

    /// `sum s(n) q^n / (1 - q^n)^2`.
    pub fn double_pole() -> Self {
        LambertShape {
            weight: 0,
            pole: 2,
            num_mult: 1,
            den_mult: 1,
        }
    }
}

/// Expands a Lambert series geometrically below `q^order`:
/// `q^(an)/(1-q^(mn)) = sum_{k>=0} q^(an+kmn)` and
/// `q^(an)/(1-q^(mn))^2 = sum_{k>=0} (k+1) q^(an+kmn)`.
pub fn lambert(seq: &PeriodicSeq, shape: LambertShape, order: i64) -> Result<QSeries, SeriesError> {
    assert!(shape.pole == 1 || shape.pole == 2, "pole power must be 1 or 2");
    assert!(shape.num_mult >= 1 && shape.den_mult >= 1, "multipliers must be positive");
    let ring = seq.ring()?;
    let dim = ring.dim();
    let len = order.max(0) as usize;
    let mut c = vec![Rational::zero(); len * dim];
    let mut n = 1i64;
    while shape.num_mult * n < order {
        let val = ring.coords_of(seq.at(n))?;
        if val.iter().any(|v| !v.is_zero()) {
            let w = Rational::from_integer(BigInt::from(n).pow(shape.weight));
            let base: Vec<Rational> = val.iter().map(|v| v * &w).collect();
            let mut e = shape.num_mult * n;
            let mut k = 1i64;
            while e < order {
                let off = e as usize * dim;
                let mult = if shape.pole == 2 { int(k) } else { Rational::one() };
                for (dst, b) in c[off..off + dim].iter_mut().zip(&base) {
                    if shape.pole == 2 {
                        *dst += b * &mult;
                    } else {
                        *dst += b;
                    }
                }
                e += shape.den_mult * n;
                k += 1;
            }
        }
        n += 1;
    }
    Ok(QSeries::from_dense(ring, 1, 0, order, c))
}

// ---------------------------------------------------------------------------
// Eisenstein series and the e/P/Q families
// ---------------------------------------------------------------------------

/// Bernoulli numbers `B_0..=B_n` (with `B_1 = -1/2`).
fn bernoulli(n: usize) -> Vec<Rational> {
    let mut b = vec![Rational::zero(); n + 1];
    b[0] = Rational::one();
    for m in 1..=n {
        let mut acc = Rational::zero();
        let mut binom = BigInt::one();
        for (k, bk) in b.iter().enumerate().take(m) {
            acc += bk * Rational::from_integer(binom.clone());
            binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
        }
        b[m] = -acc / Rational::from_integer(BigInt::from(m + 1));
    }
    b
}

/// `2 / zeta(1 - k)` for even `k`, from `zeta(1 - k) = -B_k / k`.
pub fn eisenstein_constant(weight: u32) -> Rational {
    let bk = bernoulli(weight as usize)[weight as usize].clone();
    let zeta = -bk / int(weight as i64);
    int(2) / zeta
}

/// `E_k(q^j)` for `k` in `{2, 4, 6}`, known below `q^order`.
pub fn eisenstein(weight: u32, arg_power: i64, order: i64) -> Result<QSeries, SeriesError> {
    if ![2, 4, 6].contains(&weight) {
        return Err(SeriesError::Ring(crate::ring::RingError::InsufficientLevel {
            level: 0,
            what: format!("Eisenstein series of weight {weight}"),
        }));
    }
    let inner_order = Integer::div_ceil(&order, &arg_power).max(1);
    let sum = lambert(&PeriodicSeq::constant(1), LambertShape::simple(weight - 1), inner_order)?;
    let e = QSeries::one(1, inner_order) + sum.scale_rational(&eisenstein_constant(weight));
    Ok(e.substitute_power(arg_power))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EpqKind {
    E,
    P,
    Q,
}

/// A reduced fraction `p/N` standing for the angle `pi p / N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Alpha {
    pub num: i64,
    pub den: i64,
}

impl Alpha {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den > 0, "denominator must be positive");
        let g = num.gcd(&den);
        Alpha {
            num: num / g,
            den: den / g,
        }
    }

    /// `1 - 2 alpha`.
    pub fn dual(&self) -> Self {
        Alpha::new(self.den - 2 * self.num, self.den)
    }

    /// The default cyclotomic level `lcm(4, 2N)`.
    pub fn level(&self) -> u32 {
        4i64.lcm(&(2 * self.den)) as u32
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// `kind(pi * k * alpha)` as an exact element of `field`.
pub fn trig_at(kind: TrigKind, k: i64, alpha: Alpha, field: &Arc<CycField>) -> Result<CycElement, SeriesError> {
    Ok(trig_value(kind, k * alpha.num, alpha.den, field)?)
}

/// The series `e_alpha`, `P_alpha` or `Q_alpha` over `field`.
pub fn epq_family(kind: EpqKind, alpha: Alpha, field: &Arc<CycField>, order: i64) -> Result<QSeries, SeriesError> {
    let n = alpha.den;
    let (trig, weight) = match kind {
        EpqKind::E => (TrigKind::Sin, 0),
        EpqKind::P => (TrigKind::Cos, 1),
        EpqKind::Q => (TrigKind::Sin, 2),
    };
    let values = (0..n)
        .map(|r| trig_at(trig, 2 * r, alpha, field).map(RingElement::Cyclotomic))
        .collect::<Result<Vec<_>, _>>()?;
    let seq = PeriodicSeq::new(values);
    let sum = lambert(&seq, LambertShape::simple(weight), order)?;
    let tan = trig_at(TrigKind::Tan, 1, alpha, field)?;
    let sin = trig_at(TrigKind::Sin, 1, alpha, field)?;
    let sin2 = &sin * &sin;
    let prefactor = match kind {
        EpqKind::E => tan.scale(&int(4)),
        EpqKind::P => sin2.scale(&int(-8)),
        EpqKind::Q => (&tan * &sin2).scale(&int(-8)),
    };
    let one = QSeries::constant(RingElement::Cyclotomic(CycElement::one(field)), 1, order);
    Ok(one + sum.scale(&RingElement::Cyclotomic(prefactor))?)
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

/// Builds with growing internal margins until the result is known below
/// `q^order`, then truncates to exactly that order.
pub fn with_margin<F>(order: i64, build: F) -> Result<QSeries, SeriesError>
where
    F: Fn(i64) -> Result<QSeries, SeriesError>,
{
    let mut last = None;
    for margin in [1i64, 2, 4, 8, 16] {
        let s = build(order + margin)?;
        if s.prec() >= order * s.denom() {
            return Ok(s.truncate(order * s.denom()));
        }
        last = Some(s);
    }
    let s = last.expect("at least one attempt");
    Err(SeriesError::Precision {
        requested: order.to_string(),
        available: s.precision().to_string(),
    })
}

/// The septic theta functions, `D = 56`.
pub fn septic_a(order: i64) -> QSeries {
    -bilateral_theta(196, 140, 25, 56, ThetaSign::Alternating, order)
}

pub fn septic_b(order: i64) -> QSeries {
    bilateral_theta(196, 84, 9, 56, ThetaSign::Alternating, order)
}

pub fn septic_c(order: i64) -> QSeries {
    bilateral_theta(196, 28, 1, 56, ThetaSign::Alternating, order)
}

fn seven_product(order: i64, shift: i64, factors: &[(i64, i64, i64)]) -> Result<QSeries, SeriesError> {
    Ok(eta_quotient(&ProductSpec::integral(factors), order - shift)?.shift(shift))
}

/// `x(q)` from its product form.
pub fn x_product(order: i64) -> Result<QSeries, SeriesError> {
    seven_product(order, 1, &[(7, 7, 2), (2, 7, 1), (5, 7, 1), (3, 7, -2), (4, 7, -2)])
}

/// `y(q)` from its product form.
pub fn y_product(order: i64) -> Result<QSeries, SeriesError> {
    seven_product(order, 1, &[(7, 7, 2), (1, 7, 1), (6, 7, 1), (2, 7, -2), (5, 7, -2)])
}

/// `z(q)` from its product form.
pub fn z_product(order: i64) -> Result<QSeries, SeriesError> {
    seven_product(order, 0, &[(7, 7, 2), (3, 7, 1), (4, 7, 1), (1, 7, -2), (6, 7, -2)])
}

/// `q^(7/8) (q^7;q^7)^3 num / den^2`, with the given sign.
fn septic_quotient(order: i64, num: &QSeries, den: &QSeries, negate: bool) -> Result<QSeries, SeriesError> {
    let p7 = eta_quotient(&ProductSpec::integral(&[(7, 7, 3)]), order)?;
    let q = (&p7 * num).try_div(&(den * den))?.shift_by(7, 8);
    let q = if negate { -q } else { q };
    Ok(q.reduced())
}

pub fn x_theta(order: i64) -> Result<QSeries, SeriesError> {
    with_margin(order, |n| septic_quotient(n, &septic_b(n), &septic_c(n), false))
}

pub fn y_theta(order: i64) -> Result<QSeries, SeriesError> {
    with_margin(order, |n| septic_quotient(n, &septic_a(n), &septic_b(n), true))
}

pub fn z_theta(order: i64) -> Result<QSeries, SeriesError> {
    with_margin(order, |n| septic_quotient(n, &septic_c(n), &septic_a(n), false))
}

/// The period-7 coefficient tables of the Lambert forms of `x`, `y`, `z`.
pub const SEQ_X: [i64; 7] = [0, 1, -1, -2, 2, 1, -1];
pub const SEQ_Y: [i64; 7] = [0, 1, -2, 1, -1, 2, -1];
pub const SEQ_Z: [i64; 7] = [0, 2, 1, 1, -1, -1, -2];

pub fn x_lambert(order: i64) -> Result<QSeries, SeriesError> {
    lambert(&PeriodicSeq::from_integers(&SEQ_X), LambertShape::simple(0), order)
}

pub fn y_lambert(order: i64) -> Result<QSeries, SeriesError> {
    lambert(&PeriodicSeq::from_integers(&SEQ_Y), LambertShape::simple(0), order)
}

pub fn z_lambert(order: i64) -> Result<QSeries, SeriesError> {
    Ok(QSeries::one(1, order) + lambert(&PeriodicSeq::from_integers(&SEQ_Z), LambertShape::simple(0), order)?)
}

/// The Legendre symbol `(n|7)` as a period-7 sequence.
pub fn legendre7() -> PeriodicSeq {
    PeriodicSeq::from_integers(&[0, 1, 1, -1, 1, -1, -1])
}

/// `1 + 2 sum (n|7) q^n/(1-q^n)`.
pub fn sigma7(order: i64) -> Result<QSeries, SeriesError> {
    Ok(QSeries::one(1, order) + lambert(&legendre7(), LambertShape::simple(0), order)?.scale_rational(&int(2)))
}

/// `Z = (q;q)^7 / (q^7;q^7)`.
pub fn z_eta(order: i64) -> Result<QSeries, SeriesError> {
    eta_quotient(&ProductSpec::integral(&[(1, 1, 7), (7, 7, -1)]), order)
}

/// `X = q (q^7;q^7)^4 / (q;q)^4`.
pub fn x_eta(order: i64) -> Result<QSeries, SeriesError> {
    seven_product(order, 1, &[(7, 7, 4), (1, 1, -4)])
}

/// `j_7 = (q;q)^4 / (q (q^7;q^7)^4)`, starting at `q^-1`.
pub fn j7(order: i64) -> Result<QSeries, SeriesError> {
    seven_product(order, -1, &[(1, 1, 4), (7, 7, -4)])
}

/// `D_k = sum n q^(kn)/(1-q^(7n)) + sum n q^((7-k)n)/(1-q^(7n))`.
pub fn d_series(k: i64, order: i64) -> Result<QSeries, SeriesError> {
    let ones = PeriodicSeq::constant(1);
    let shape = |a| LambertShape {
        weight: 1,
        pole: 1,
        num_mult: a,
        den_mult: 7,
    };
    Ok(lambert(&ones, shape(k), order)? + lambert(&ones, shape(7 - k), order)?)
}

/// Quintic `A(q)` and `B(q)` over `D = 5`.
pub fn quintic(which: char, order: i64) -> Result<QSeries, SeriesError> {
    let p1 = eta_quotient(&ProductSpec::integral(&[(1, 1, 1)]), order)?;
    let norm = p1.pow_rational(-3, 5)?;
    let s = match which {
        'A' => bilateral_theta(5, -3, 0, 2, ThetaSign::Alternating, order).reduced(),
        'B' => bilateral_theta(5, -1, 0, 2, ThetaSign::Alternating, order).reduced(),
        _ => panic!("quintic series is A or B"),
    };
    let out = &norm * &s;
    Ok(if which == 'A' { out.shift_by(1, 5) } else { out.with_denom(5) })
}

/// Cubic `P(q) = 1 - 6 sum cos(2 n pi/3) n q^n/(1-q^n)`.
pub fn cubic_p(order: i64) -> Result<QSeries, SeriesError> {
    let cosines = PeriodicSeq::from_rationals(vec![int(1), rat(-1, 2), rat(-1, 2)]);
    Ok(QSeries::one(1, order) + lambert(&cosines, LambertShape::simple(1), order)?.scale_rational(&int(-6)))
}

/// Gaussian integers `Q(i) = Q(zeta_4)`.
pub fn gaussian_field() -> Arc<CycField> {
    CycField::new(4)
}

fn imag_unit(field: &Arc<CycField>) -> CycElement {
    CycElement::zeta_pow(field, field.level() as i64 / 4)
}

/// `theta_1(k pi tau | q^7)` from the triple product, `k` in `1..=3`:
/// `i q^(p_k) (q^k;q^7)(q^(7-k);q^7)(q^7;q^7)` with `p = 3/8, -1/8, -5/8`.
pub fn theta1_product(k: i64, field: &Arc<CycField>, order: i64) -> Result<QSeries, SeriesError> {
    assert!((1..=3).contains(&k), "k must be 1, 2 or 3");
    let prefactor_num = [3, -1, -5][(k - 1) as usize];
    let inner_order = order + 1;
    let p = eta_quotient(&ProductSpec::integral(&[(k, 7, 1), (7 - k, 7, 1), (7, 7, 1)]), inner_order)?;
    let s = p
        .scale(&RingElement::Cyclotomic(imag_unit(field)))?
        .shift_by(prefactor_num, 8);
    Ok(s.truncate(order * s.denom()))
}

/// `theta_1(k pi tau | q^7)` from its defining bilateral sum
/// `-i sum (-1)^n q^(7/8 + 7n(n+1)/2 + (2n+1)k/2)`.
pub fn theta1_sum(k: i64, field: &Arc<CycField>, order: i64) -> Result<QSeries, SeriesError> {
    // exponent * 8 = 28 n^2 + (28 + 8k) n + 7 + 4k
    let s = bilateral_theta(28, 28 + 8 * k, 7 + 4 * k, 8, ThetaSign::Alternating, order);
    s.scale(&RingElement::Cyclotomic(-imag_unit(field)))
}

/// `theta_1'(q^7) = 2 q^(7/8) (q^7;q^7)^3`, over `D = 8`.
pub fn theta1_prime_q7(order: i64) -> Result<QSeries, SeriesError> {
    let p = eta_quotient(&ProductSpec::integral(&[(7, 7, 3)]), order)?;
    let s = p.scale_rational(&int(2)).shift_by(7, 8);
    Ok(s.truncate(order * 8))
}

/// `theta_1'/theta_1 (k pi tau | q^7)` from its geometric expansion with `e^(2iz) = q^k`:
/// `-i - 2i sum_{m>=1} [ sum_{n>=0} q^(m(7n+k)) - sum_{n>=1} q^(m(7n-k)) ]`.
pub fn theta1_log_derivative(k: i64, field: &Arc<CycField>, order: i64) -> Result<QSeries, SeriesError> {
    assert!((1..=3).contains(&k), "k must be 1, 2 or 3");
    let mut chi = vec![0i64; 7];
    chi[k as usize] = 1;
    chi[(7 - k) as usize] = -1;
    let sum = lambert(&PeriodicSeq::from_integers(&chi), LambertShape::simple(0), order)?;
    let i = imag_unit(field);
    let minus_i = RingElement::Cyclotomic(-&i);
    let minus_two_i = RingElement::Cyclotomic(i.scale(&int(-2)));
    Ok(QSeries::constant(minus_i, 1, order) + sum.scale(&minus_two_i)?)
}

/// Every series the catalog can build by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SeriesName {
    SepticA,
    SepticB,
    SepticC,
    X,
    Y,
    Z,
    XTheta,
    YTheta,
    ZTheta,
    XLambert,
    YLambert,
    ZLambert,
    P7,
    E2,
    E4,
    E6,
    E4Q7,
    E6Q7,
    QuinticA,
    QuinticB,
    P5,
    CubicA,
    CubicB,
    CubicC,
    CubicP,
    Sigma,
    ZEta,
    XEta,
    J7,
    D1,
    D2,
    D3,
    Theta1(i64),
    Theta1Prime,
    Epq(EpqKind, Alpha),
}

impl SeriesName {
    /// Fixed catalog entries (the `e`/`P`/`Q` families are parsed on demand).
    pub fn all() -> Vec<SeriesName> {
        use SeriesName::*;
        vec![
            SepticA, SepticB, SepticC, X, Y, Z, XTheta, YTheta, ZTheta, XLambert, YLambert, ZLambert, P7, E2, E4, E6,
            E4Q7, E6Q7, QuinticA, QuinticB, P5, CubicA, CubicB, CubicC, CubicP, Sigma, ZEta, XEta, J7, D1, D2, D3,
            Theta1(1), Theta1(2), Theta1(3), Theta1Prime,
        ]
    }

    pub fn description(&self) -> String {
        use SeriesName::*;
        match self {
            SepticA => "septic a(q) = -sum (-1)^n q^((14n+5)^2/56)".into(),
            SepticB => "septic b(q) = sum (-1)^n q^((14n+3)^2/56)".into(),
            SepticC => "septic c(q) = sum (-1)^n q^((14n+1)^2/56)".into(),
            X => "x(q), product form".into(),
            Y => "y(q), product form".into(),
            Z => "z(q), product form".into(),
            XTheta => "x(q) = q^(7/8)(q^7;q^7)^3 b/c^2".into(),
            YTheta => "y(q) = -q^(7/8)(q^7;q^7)^3 a/b^2".into(),
            ZTheta => "z(q) = q^(7/8)(q^7;q^7)^3 c/a^2".into(),
            XLambert => "x(q), Lambert form".into(),
            YLambert => "y(q), Lambert form".into(),
            ZLambert => "z(q), Lambert form".into(),
            P7 => "E2(q^7)".into(),
            E2 => "E2(q)".into(),
            E4 => "E4(q)".into(),
            E6 => "E6(q)".into(),
            E4Q7 => "E4(q^7)".into(),
            E6Q7 => "E6(q^7)".into(),
            QuinticA => "quintic A(q)".into(),
            QuinticB => "quintic B(q)".into(),
            P5 => "E2(q^5)".into(),
            CubicA => "cubic a(q)".into(),
            CubicB => "cubic b(q)".into(),
            CubicC => "cubic c(q)".into(),
            CubicP => "cubic P(q)".into(),
            Sigma => "1 + 2 sum (n|7) q^n/(1-q^n)".into(),
            ZEta => "Z = (q;q)^7/(q^7;q^7)".into(),
            XEta => "X = q(q^7;q^7)^4/(q;q)^4".into(),
            J7 => "j7 = (q;q)^4/(q(q^7;q^7)^4)".into(),
            D1 => "D1(q)".into(),
            D2 => "D2(q)".into(),
            D3 => "D3(q)".into(),
            Theta1(k) => format!("theta1({k} pi tau | q^7), product form"),
            Theta1Prime => "theta1'(q^7) = 2 q^(7/8)(q^7;q^7)^3".into(),
            Epq(kind, a) => format!("{:?}_{{{}}}", kind, a),
        }
    }
}

impl fmt::Display for SeriesName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use SeriesName::*;
        let s = match self {
            SepticA => "a".to_string(),
            SepticB => "b".to_string(),
            SepticC => "c".to_string(),
            X => "x".to_string(),
            Y => "y".to_string(),
            Z => "z".to_string(),
            XTheta => "x.theta".to_string(),
            YTheta => "y.theta".to_string(),
            ZTheta => "z.theta".to_string(),
            XLambert => "x.lambert".to_string(),
            YLambert => "y.lambert".to_string(),
            ZLambert => "z.lambert".to_string(),
            P7 => "P".to_string(),
            E2 => "E2".to_string(),
            E4 => "E4".to_string(),
            E6 => "E6".to_string(),
            E4Q7 => "E4.q7".to_string(),
            E6Q7 => "E6.q7".to_string(),
            QuinticA => "A".to_string(),
            QuinticB => "B".to_string(),
            P5 => "P5".to_string(),
            CubicA => "cubic.a".to_string(),
            CubicB => "cubic.b".to_string(),
            CubicC => "cubic.c".to_string(),
            CubicP => "cubic.P".to_string(),
            Sigma => "sigma".to_string(),
            ZEta => "Z".to_string(),
            XEta => "X".to_string(),
            J7 => "j7".to_string(),
            D1 => "D1".to_string(),
            D2 => "D2".to_string(),
            D3 => "D3".to_string(),
            Theta1(k) => format!("theta1.{k}"),
            Theta1Prime => "theta1prime.q7".to_string(),
            Epq(kind, a) => format!(
                "{}:{}",
                match kind {
                    EpqKind::E => "e",
                    EpqKind::P => "P",
                    EpqKind::Q => "Q",
                },
                a
            ),
        };
        f.write_str(&s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown series name `{0}`")]
pub struct UnknownSeries(pub String);

impl FromStr for SeriesName {
    type Err = UnknownSeries;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(found) = SeriesName::all().into_iter().find(|n| n.to_string() == s) {
            return Ok(found);
        }
        // e:p/N, P:p/N, Q:p/N
        let parse_alpha = |rest: &str| -> Option<Alpha> {
            let (p, n) = rest.split_once('/')?;
            let (p, n) = (p.trim().parse::<i64>().ok()?, n.trim().parse::<i64>().ok()?);
            if n <= 0 || (p % n) == 0 {
                return None;
            }
            Some(Alpha::new(p, n))
        };
        let (kind, rest) = match s.split_once(':') {
            Some(("e", r)) => (EpqKind::E, r),
            Some(("P", r)) => (EpqKind::P, r),
            Some(("Q", r)) => (EpqKind::Q, r),
            _ => return Err(UnknownSeries(s.to_string())),
        };
        parse_alpha(rest)
            .map(|a| SeriesName::Epq(kind, a))
            .ok_or_else(|| UnknownSeries(s.to_string()))
    }
}

/// Builds a catalog series known exactly below `q^order`.
pub fn named_series(name: SeriesName, order: i64) -> Result<QSeries, SeriesError> {
    use SeriesName::*;
    let s = match name {
        SepticA => septic_a(order),
        SepticB => septic_b(order),
        SepticC => septic_c(order),
        X => x_product(order)?,
        Y => y_product(order)?,
        Z => z_product(order)?,
        XTheta => x_theta(order)?,
        YTheta => y_theta(order)?,
        ZTheta => z_theta(order)?,
        XLambert => x_lambert(order)?,
        YLambert => y_lambert(order)?,
        ZLambert => z_lambert(order)?,
        P7 => eisenstein(2, 7, order)?,
        E2 => eisenstein(2, 1, order)?,
        E4 => eisenstein(4, 1, order)?,
        E6 => eisenstein(6, 1, order)?,
        E4Q7 => eisenstein(4, 7, order)?,
        E6Q7 => eisenstein(6, 7, order)?,
        QuinticA => quintic('A', order)?,
        QuinticB => quintic('B', order)?,
        P5 => eisenstein(2, 5, order)?,
        CubicA => cubic_theta(CubicKind::A, order),
        CubicB => cubic_theta(CubicKind::B, order),
        CubicC => cubic_theta(CubicKind::C, order),
        CubicP => cubic_p(order)?,
        Sigma => sigma7(order)?,
        ZEta => z_eta(order)?,
        XEta => x_eta(order)?,
        J7 => j7(order)?,
        D1 => d_series(1, order)?,
        D2 => d_series(2, order)?,
        D3 => d_series(3, order)?,
        Theta1(k) => theta1_product(k, &gaussian_field(), order)?,
        Theta1Prime => theta1_prime_q7(order)?,
        Epq(kind, a) => epq_family(kind, a, &CycField::new(a.level()), order)?,
    };
    Ok(s.truncate(order * s.denom()))
}

/// Rational `r` embedded into `field` as a ring element.
pub fn cyc(r: Rational, field: &Arc<CycField>) -> RingElement {
    RingElement::Cyclotomic(embed(&r, field))
}
