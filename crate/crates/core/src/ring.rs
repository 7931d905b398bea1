//! Exact coefficient arithmetic: arbitrary-precision rationals and cyclotomic
//! fields `Q(zeta_M)`.
//!
//! A cyclotomic element is a coordinate vector of length `phi(M)` in the power
//! basis `1, zeta, ..., zeta^(phi(M)-1)`, always kept reduced modulo the
//! `M`-th cyclotomic polynomial. Equality is coordinatewise, so every zero test
//! downstream is exact.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Shorthand for the rational `num/den`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for the integer `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("division by zero in Q(zeta_{level})")]
    DivisionByZero { level: u32 },
    #[error("cyclotomic level mismatch: {0} vs {1}")]
    LevelMismatch(u32, u32),
    #[error("level {level} cannot represent {what}")]
    InsufficientLevel { level: u32, what: String },
    #[error("{kind} has a pole at pi*{num}/{den}")]
    Pole { kind: TrigKind, num: i64, den: i64 },
    #[error("embedding index {index} is not coprime to level {level}")]
    BadEmbedding { index: i64, level: u32 },
}

// ---------------------------------------------------------------------------
// Integer polynomials (coefficients low degree first)
// ---------------------------------------------------------------------------

fn trim_int(p: &mut Vec<BigInt>) {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

#[cfg(test)]
fn mul_int_poly(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Exact division of `num` by the monic `den`; panics if the remainder is nonzero.
fn div_exact_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    debug_assert!(den[dd].is_one());
    if rem.len() <= dd {
        assert!(rem.iter().all(Zero::is_zero), "inexact polynomial division");
        return vec![BigInt::zero()];
    }
    let mut quo = vec![BigInt::zero(); rem.len() - dd];
    for k in (0..quo.len()).rev() {
        let c = rem[k + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (j, d) in den.iter().enumerate() {
            rem[k + j] -= &c * d;
        }
        quo[k] = c;
    }
    assert!(rem.iter().all(Zero::is_zero), "inexact polynomial division");
    trim_int(&mut quo);
    quo
}

fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|d| n % d == 0).collect()
}

/// Euler's totient.
pub fn euler_phi(n: u32) -> usize {
    (1..=n).filter(|k| k.gcd(&n) == 1).count()
}

/// The `M`-th cyclotomic polynomial, coefficients from the constant term up.
///
/// Computed by dividing `x^M - 1` by `Phi_d` for every proper divisor `d`.
pub fn cyclotomic_polynomial(level: u32) -> Vec<BigInt> {
    assert!(level >= 1, "cyclotomic level must be positive");
    let mut num = vec![BigInt::zero(); level as usize + 1];
    num[0] = BigInt::from(-1);
    num[level as usize] = BigInt::one();
    for d in divisors(level) {
        if d < level {
            num = div_exact_monic(&num, &cyclotomic_polynomial(d));
        }
    }
    num
}

// ---------------------------------------------------------------------------
// Rational polynomials, used only for inversion
// ---------------------------------------------------------------------------

fn trim_rat(p: &mut Vec<Rational>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn rat_divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut rem = a.to_vec();
    trim_rat(&mut rem);
    let db = b.len() - 1;
    let lead = &b[db];
    if rem.len() <= db {
        return (Vec::new(), rem);
    }
    let mut quo = vec![Rational::zero(); rem.len() - db];
    for k in (0..quo.len()).rev() {
        let c = &rem[k + db] / lead;
        if c.is_zero() {
            continue;
        }
        for (j, d) in b.iter().enumerate() {
            rem[k + j] -= &c * d;
        }
        quo[k] = c;
    }
    trim_rat(&mut rem);
    (quo, rem)
}

fn rat_poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn rat_poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    let mut out = vec![Rational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim_rat(&mut out);
    out
}

// ---------------------------------------------------------------------------
// Cyclotomic fields
// ---------------------------------------------------------------------------

/// The field `Q(zeta_M)` together with its reduction data.
#[derive(Debug)]
pub struct CycField {
    level: u32,
    modulus: Vec<BigInt>,
    /// `reduction[i]` holds the coordinates of `zeta^(phi + i)`.
    reduction: Vec<Vec<BigInt>>,
}

impl CycField {
    pub fn new(level: u32) -> Arc<Self> {
        let modulus = cyclotomic_polynomial(level);
        let degree = modulus.len() - 1;
        let mut reduction = Vec::with_capacity(degree.saturating_sub(1));
        // zeta^phi = -(m_0 + m_1 zeta + ... + m_{phi-1} zeta^{phi-1})
        let mut cur: Vec<BigInt> = modulus[..degree].iter().map(|c| -c).collect();
        for _ in 0..degree.saturating_sub(1) {
            reduction.push(cur.clone());
            // multiply by zeta
            let top = cur[degree - 1].clone();
            let mut next = vec![BigInt::zero(); degree];
            next[1..].clone_from_slice(&cur[..degree - 1]);
            if !top.is_zero() {
                for j in 0..degree {
                    next[j] -= &top * &modulus[j];
                }
            }
            cur = next;
        }
        Arc::new(CycField {
            level,
            modulus,
            reduction,
        })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// `phi(M)`, the dimension over `Q`.
    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn modulus(&self) -> &[BigInt] {
        &self.modulus
    }

    /// Reduces an unreduced product of length at most `2 phi - 1` in place,
    /// returning the first `phi` coordinates.
    pub(crate) fn reduce(&self, mut buf: Vec<Rational>) -> Vec<Rational> {
        let n = self.degree();
        if buf.len() > n {
            for (i, row) in self.reduction.iter().enumerate() {
                let idx = n + i;
                if idx >= buf.len() {
                    break;
                }
                let c = std::mem::take(&mut buf[idx]);
                if c.is_zero() {
                    continue;
                }
                for (j, r) in row.iter().enumerate() {
                    if !r.is_zero() {
                        buf[j] += &c * Rational::from_integer(r.clone());
                    }
                }
            }
            buf.truncate(n);
        }
        buf.resize(n, Rational::zero());
        buf
    }

    /// Accumulates the unreduced product `a * b` into `acc` (length `2 phi - 1`).
    pub(crate) fn mul_acc(a: &[Rational], b: &[Rational], acc: &mut [Rational]) {
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    acc[i + j] += x * y;
                }
            }
        }
    }

    pub(crate) fn mul_coords(&self, a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let n = self.degree();
        if n == 1 {
            return vec![&a[0] * &b[0]];
        }
        let mut acc = vec![Rational::zero(); 2 * n - 1];
        Self::mul_acc(a, b, &mut acc);
        self.reduce(acc)
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against `Phi_M`.
    pub(crate) fn inv_coords(&self, a: &[Rational]) -> Option<Vec<Rational>> {
        if a.iter().all(Zero::is_zero) {
            return None;
        }
        let n = self.degree();
        if n == 1 {
            return Some(vec![a[0].recip()]);
        }
        let modulus: Vec<Rational> = self
            .modulus
            .iter()
            .map(|c| Rational::from_integer(c.clone()))
            .collect();
        // invariant: s_i * a == r_i (mod Phi)
        let mut r0 = modulus;
        let mut r1 = a.to_vec();
        trim_rat(&mut r1);
        let mut s0: Vec<Rational> = Vec::new();
        let mut s1: Vec<Rational> = vec![Rational::one()];
        while r1.len() > 1 {
            let (q, r) = rat_divrem(&r0, &r1);
            let s = rat_poly_sub(&s0, &rat_poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        // r1 is a nonzero constant because Phi_M is irreducible.
        let c = r1[0].recip();
        let mut out: Vec<Rational> = s1.iter().map(|x| x * &c).collect();
        if out.len() > n {
            let (_, r) = rat_divrem(&out, &self.modulus.iter().map(|c| Rational::from_integer(c.clone())).collect::<Vec<_>>());
            out = r;
        }
        out.resize(n, Rational::zero());
        Some(out)
    }

    /// Coordinates of `zeta^k` for any integer `k`.
    pub(crate) fn zeta_pow_coords(&self, k: i64) -> Vec<Rational> {
        let n = self.degree();
        let m = self.level as i64;
        let e = k.rem_euclid(m) as usize;
        let mut out = vec![Rational::zero(); n];
        if e < n {
            out[e] = Rational::one();
            return out;
        }
        // walk up from zeta^(n-1) multiplying by zeta
        let mut cur: Vec<BigInt> = vec![BigInt::zero(); n];
        cur[n - 1] = BigInt::one();
        for _ in (n - 1)..e {
            let top = cur[n - 1].clone();
            let mut next = vec![BigInt::zero(); n];
            next[1..].clone_from_slice(&cur[..n - 1]);
            if !top.is_zero() {
                for (v, m) in next.iter_mut().zip(&self.modulus) {
                    *v -= &top * m;
                }
            }
            cur = next;
        }
        for (o, c) in out.iter_mut().zip(cur) {
            *o = Rational::from_integer(c);
        }
        out
    }
}

/// An element of `Q(zeta_M)` in canonical reduced form.
#[derive(Clone)]
pub struct CycElement {
    field: Arc<CycField>,
    coords: Vec<Rational>,
}

impl PartialEq for CycElement {
    fn eq(&self, other: &Self) -> bool {
        self.field.level == other.field.level && self.coords == other.coords
    }
}

impl Eq for CycElement {}

impl fmt::Debug for CycElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for CycElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{}", c)?,
                1 => write!(f, "({})*z{}", c, self.field.level)?,
                _ => write!(f, "({})*z{}^{}", c, self.field.level, k)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl CycElement {
    pub fn zero(field: &Arc<CycField>) -> Self {
        CycElement {
            field: field.clone(),
            coords: vec![Rational::zero(); field.degree()],
        }
    }

    pub fn one(field: &Arc<CycField>) -> Self {
        embed(&Rational::one(), field)
    }

    /// `zeta_M^k`.
    pub fn zeta_pow(field: &Arc<CycField>, k: i64) -> Self {
        CycElement {
            field: field.clone(),
            coords: field.zeta_pow_coords(k),
        }
    }

    /// Builds an element from coordinates; the vector must have length `phi(M)`.
    pub fn from_coords(field: &Arc<CycField>, coords: Vec<Rational>) -> Self {
        assert_eq!(coords.len(), field.degree(), "coordinate vector length");
        CycElement {
            field: field.clone(),
            coords,
        }
    }

    pub fn field(&self) -> &Arc<CycField> {
        &self.field
    }

    pub fn level(&self) -> u32 {
        self.field.level
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// The rational value, if every non-constant coordinate vanishes.
    pub fn to_rational(&self) -> Option<Rational> {
        if self.coords[1..].iter().all(Zero::is_zero) {
            Some(self.coords[0].clone())
        } else {
            None
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        CycElement {
            field: self.field.clone(),
            coords: self.coords.iter().map(|c| c * r).collect(),
        }
    }

    pub fn inv(&self) -> Result<Self, RingError> {
        let coords = self.field.inv_coords(&self.coords).ok_or(RingError::DivisionByZero {
            level: self.field.level,
        })?;
        Ok(CycElement {
            field: self.field.clone(),
            coords,
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self, RingError> {
        cyc_arith(self, other, CycOp::Div)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = CycElement::one(&self.field);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Checked field arithmetic in `Q(zeta_M)`; both operands must share the level.
pub fn cyc_arith(a: &CycElement, b: &CycElement, op: CycOp) -> Result<CycElement, RingError> {
    if a.level() != b.level() {
        return Err(RingError::LevelMismatch(a.level(), b.level()));
    }
    let coords = match op {
        CycOp::Add => a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect(),
        CycOp::Sub => a.coords.iter().zip(&b.coords).map(|(x, y)| x - y).collect(),
        CycOp::Mul => a.field.mul_coords(&a.coords, &b.coords),
        CycOp::Div => {
            let inv = a
                .field
                .inv_coords(&b.coords)
                .ok_or(RingError::DivisionByZero { level: a.level() })?;
            a.field.mul_coords(&a.coords, &inv)
        }
    };
    Ok(CycElement {
        field: a.field.clone(),
        coords,
    })
}

macro_rules! cyc_binop {
    ($tr:ident, $method:ident, $op:expr) => {
        impl<'a> $tr<&'a CycElement> for &'a CycElement {
            type Output = CycElement;
            /// Panics on a level mismatch; use [`cyc_arith`] for a checked variant.
            fn $method(self, rhs: &'a CycElement) -> CycElement {
                cyc_arith(self, rhs, $op).expect("cyclotomic arithmetic")
            }
        }
        impl $tr<CycElement> for CycElement {
            type Output = CycElement;
            fn $method(self, rhs: CycElement) -> CycElement {
                cyc_arith(&self, &rhs, $op).expect("cyclotomic arithmetic")
            }
        }
    };
}

cyc_binop!(Add, add, CycOp::Add);
cyc_binop!(Sub, sub, CycOp::Sub);
cyc_binop!(Mul, mul, CycOp::Mul);

impl Neg for &CycElement {
    type Output = CycElement;
    fn neg(self) -> CycElement {
        CycElement {
            field: self.field.clone(),
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for CycElement {
    type Output = CycElement;
    fn neg(self) -> CycElement {
        -&self
    }
}

/// Embeds a rational into `Q(zeta_M)`.
pub fn embed(r: &Rational, field: &Arc<CycField>) -> CycElement {
    let mut coords = vec![Rational::zero(); field.degree()];
    coords[0] = r.clone();
    CycElement {
        field: field.clone(),
        coords,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TrigKind {
    Sin,
    Cos,
    Tan,
    Cot,
    Csc,
}

impl fmt::Display for TrigKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TrigKind::Sin => "sin",
            TrigKind::Cos => "cos",
            TrigKind::Tan => "tan",
            TrigKind::Cot => "cot",
            TrigKind::Csc => "csc",
        };
        f.write_str(s)
    }
}

/// Exact value of `kind(pi * num / den)` in `Q(zeta_M)`.
///
/// Requires `4 | M` (so that `i = zeta^(M/4)` is available) and `2 den | M`.
pub fn trig_value(
    kind: TrigKind,
    num: i64,
    den: i64,
    field: &Arc<CycField>,
) -> Result<CycElement, RingError> {
    assert!(den > 0, "angle denominator must be positive");
    let m = field.level() as i64;
    if m % 4 != 0 || m % (2 * den) != 0 {
        return Err(RingError::InsufficientLevel {
            level: field.level(),
            what: format!("{kind}(pi*{num}/{den})"),
        });
    }
    let k = num * m / (2 * den);
    let zk = CycElement::zeta_pow(field, k);
    let zmk = CycElement::zeta_pow(field, -k);
    let cos = (&zk + &zmk).scale(&rat(1, 2));
    let two_i = CycElement::zeta_pow(field, m / 4).scale(&int(2));
    let sin = (&zk - &zmk).div(&two_i)?;
    let pole = || RingError::Pole { kind, num, den };
    match kind {
        TrigKind::Cos => Ok(cos),
        TrigKind::Sin => Ok(sin),
        TrigKind::Tan => sin.div(&cos).map_err(|_| pole()),
        TrigKind::Cot => cos.div(&sin).map_err(|_| pole()),
        TrigKind::Csc => sin.inv().map_err(|_| pole()),
    }
}

// ---------------------------------------------------------------------------
// Scalars that are either rational or cyclotomic
// ---------------------------------------------------------------------------

/// A coefficient: rational or cyclotomic.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RingElement {
    Rational(Rational),
    Cyclotomic(CycElement),
}

impl RingElement {
    pub fn is_zero(&self) -> bool {
        match self {
            RingElement::Rational(r) => r.is_zero(),
            RingElement::Cyclotomic(c) => c.is_zero(),
        }
    }

    /// Cyclotomic level, `None` for a plain rational.
    pub fn level(&self) -> Option<u32> {
        match self {
            RingElement::Rational(_) => None,
            RingElement::Cyclotomic(c) => Some(c.level()),
        }
    }

    pub fn to_rational(&self) -> Option<Rational> {
        match self {
            RingElement::Rational(r) => Some(r.clone()),
            RingElement::Cyclotomic(c) => c.to_rational(),
        }
    }

    /// Exact rendering: `p/q` for rationals, a coordinate list for cyclotomic values.
    pub fn exact_string(&self) -> String {
        match self {
            RingElement::Rational(r) => r.to_string(),
            RingElement::Cyclotomic(c) => {
                let coords: Vec<String> = c.coords().iter().map(ToString::to_string).collect();
                format!("Q(zeta_{})[{}]", c.level(), coords.join(", "))
            }
        }
    }
}

impl From<Rational> for RingElement {
    fn from(r: Rational) -> Self {
        RingElement::Rational(r)
    }
}

impl From<CycElement> for RingElement {
    fn from(c: CycElement) -> Self {
        RingElement::Cyclotomic(c)
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingElement::Rational(r) => write!(f, "{}", r),
            RingElement::Cyclotomic(c) => write!(f, "{}", c),
        }
    }
}

// ---------------------------------------------------------------------------
// High-precision floating rendering (reporting only)
// ---------------------------------------------------------------------------

const FLOAT_BITS: usize = 192;

/// Approximate complex value of an exact element, for human-readable output.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexApprox {
    pub re: String,
    pub im: String,
}

impl fmt::Display for ComplexApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.starts_with('0') {
            write!(f, "{}", self.re)
        } else if self.im.starts_with('-') {
            write!(f, "{} - {}i", self.re, &self.im[1..])
        } else {
            write!(f, "{} + {}i", self.re, self.im)
        }
    }
}

fn rational_to_float(r: &Rational, cc: &mut Consts) -> BigFloat {
    let rm = RoundingMode::ToEven;
    let n = BigFloat::parse(&r.numer().to_string(), Radix::Dec, FLOAT_BITS, rm, cc);
    let d = BigFloat::parse(&r.denom().to_string(), Radix::Dec, FLOAT_BITS, rm, cc);
    n.div(&d, FLOAT_BITS, rm)
}

/// Rounds an astro-float decimal rendering (`d.ddd...e+N`) to `digits`
/// significant digits in scientific notation.
fn round_decimal(s: &str, digits: usize) -> String {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (mant, exp) = match body.split_once('e') {
        Some((m, e)) => (m, e.parse::<i64>().unwrap_or(0)),
        None => (body, 0),
    };
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    let mut ds: Vec<u8> = int_part
        .bytes()
        .chain(frac_part.bytes())
        .map(|b| b - b'0')
        .collect();
    let mut exp = exp + int_part.len() as i64 - 1;
    // strip leading zeros
    while ds.len() > 1 && ds[0] == 0 {
        ds.remove(0);
        exp -= 1;
    }
    // anything this small is round-off at the working precision
    if ds.iter().all(|&d| d == 0) || exp < -48 {
        return "0".to_string();
    }
    ds.resize(ds.len().max(digits + 1), 0);
    let round_up = ds[digits] >= 5;
    ds.truncate(digits);
    if round_up {
        let mut i = digits;
        loop {
            if i == 0 {
                ds.insert(0, 1);
                ds.truncate(digits);
                exp += 1;
                break;
            }
            i -= 1;
            if ds[i] == 9 {
                ds[i] = 0;
            } else {
                ds[i] += 1;
                break;
            }
        }
    }
    let digits_str: String = ds.iter().map(|d| (b'0' + d) as char).collect();
    format!(
        "{}{}.{}e{}",
        if neg { "-" } else { "" },
        &digits_str[..1],
        &digits_str[1..],
        exp
    )
}

fn render(x: &BigFloat, digits: usize, cc: &mut Consts) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let s = x
        .format(Radix::Dec, RoundingMode::ToEven, cc)
        .unwrap_or_else(|_| "NaN".to_string());
    round_decimal(&s, digits)
}

/// Evaluates `a` under the embedding `zeta_M -> exp(2 pi i j / M)` and renders
/// the real and imaginary parts to `digits` significant digits.
pub fn to_float(a: &CycElement, embedding: i64, digits: usize) -> Result<ComplexApprox, RingError> {
    let m = a.level() as i64;
    if embedding.gcd(&m) != 1 {
        return Err(RingError::BadEmbedding {
            index: embedding,
            level: a.level(),
        });
    }
    let rm = RoundingMode::ToEven;
    let mut cc = Consts::new().expect("float constants");
    let pi = cc.pi(FLOAT_BITS, rm);
    let mut re = BigFloat::from_i64(0, FLOAT_BITS);
    let mut im = BigFloat::from_i64(0, FLOAT_BITS);
    for (k, c) in a.coords().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let cf = rational_to_float(c, &mut cc);
        let e = (embedding * k as i64).rem_euclid(m);
        // exact values on the axes avoid round-off residue like 1e-58
        let (cos, sin) = if e == 0 {
            (BigFloat::from_i64(1, FLOAT_BITS), BigFloat::from_i64(0, FLOAT_BITS))
        } else if 4 * e == m {
            (BigFloat::from_i64(0, FLOAT_BITS), BigFloat::from_i64(1, FLOAT_BITS))
        } else if 2 * e == m {
            (BigFloat::from_i64(-1, FLOAT_BITS), BigFloat::from_i64(0, FLOAT_BITS))
        } else if 4 * e == 3 * m {
            (BigFloat::from_i64(0, FLOAT_BITS), BigFloat::from_i64(-1, FLOAT_BITS))
        } else {
            let angle = pi
                .mul(&BigFloat::from_i64(2 * e, FLOAT_BITS), FLOAT_BITS, rm)
                .div(&BigFloat::from_i64(m, FLOAT_BITS), FLOAT_BITS, rm);
            (
                angle.cos(FLOAT_BITS, rm, &mut cc),
                angle.sin(FLOAT_BITS, rm, &mut cc),
            )
        };
        re = re.add(&cf.mul(&cos, FLOAT_BITS, rm), FLOAT_BITS, rm);
        im = im.add(&cf.mul(&sin, FLOAT_BITS, rm), FLOAT_BITS, rm);
    }
    Ok(ComplexApprox {
        re: render(&re, digits, &mut cc),
        im: render(&im, digits, &mut cc),
    })
}

/// Decimal rendering of a rational to `digits` significant digits.
pub fn rational_to_float_string(r: &Rational, digits: usize) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let mut cc = Consts::new().expect("float constants");
    let f = rational_to_float(r, &mut cc);
    render(&f, digits, &mut cc)
}

/// Best-effort `f64` of a rational, for quick diagnostics.
pub fn rational_to_f64(r: &Rational) -> f64 {
    let n = r.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.denom().to_f64().unwrap_or(f64::NAN);
    if n.is_finite() && d.is_finite() {
        n / d
    } else if r.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), ints(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(2), ints(&[1, 1]));
        assert_eq!(cyclotomic_polynomial(4), ints(&[1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(3), ints(&[1, 1, 1]));
        assert_eq!(cyclotomic_polynomial(12), ints(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn phi_28_oracle() {
        let p = cyclotomic_polynomial(28);
        assert_eq!(p.len() - 1, 12);
        assert!(p[12].is_one());
        // The product over all divisors reproduces x^28 - 1.
        let mut prod = vec![BigInt::one()];
        for d in divisors(28) {
            prod = mul_int_poly(&prod, &cyclotomic_polynomial(d));
        }
        let mut expect = vec![BigInt::zero(); 29];
        expect[0] = BigInt::from(-1);
        expect[28] = BigInt::one();
        assert_eq!(prod, expect);
        // Phi_28(x) = Phi_7(-x^2)
        assert_eq!(p, ints(&[1, 0, -1, 0, 1, 0, -1, 0, 1, 0, -1, 0, 1]));
    }

    #[test]
    fn zeta4_squared_is_minus_one() {
        let f = CycField::new(4);
        let z = CycElement::zeta_pow(&f, 1);
        assert_eq!(&z * &z, embed(&int(-1), &f));
        assert_eq!(CycElement::zeta_pow(&f, 4), CycElement::one(&f));
    }

    #[test]
    fn primitive_seventh_roots_sum() {
        let f = CycField::new(7);
        let mut s = CycElement::zero(&f);
        for k in [1, -1, 2, -2, 3, -3] {
            s = &s + &CycElement::zeta_pow(&f, k);
        }
        assert_eq!(s, embed(&int(-1), &f));
    }

    #[test]
    fn division_and_errors() {
        let f = CycField::new(28);
        let a = &CycElement::zeta_pow(&f, 3) + &embed(&rat(2, 5), &f);
        assert_eq!(a.div(&a).unwrap(), CycElement::one(&f));
        assert_eq!(
            a.div(&CycElement::zero(&f)),
            Err(RingError::DivisionByZero { level: 28 })
        );
        let g = CycField::new(12);
        assert_eq!(
            cyc_arith(&a, &CycElement::one(&g), CycOp::Add),
            Err(RingError::LevelMismatch(28, 12))
        );
    }

    #[test]
    fn trig_examples() {
        let f12 = CycField::new(12);
        assert_eq!(
            trig_value(TrigKind::Cos, 2, 3, &f12).unwrap(),
            embed(&rat(-1, 2), &f12)
        );
        let f4 = CycField::new(4);
        assert_eq!(
            trig_value(TrigKind::Sin, 1, 2, &f4).unwrap(),
            CycElement::one(&f4)
        );
        let f28 = CycField::new(28);
        let t = trig_value(TrigKind::Tan, 1, 7, &f28).unwrap();
        let c = trig_value(TrigKind::Cot, 1, 7, &f28).unwrap();
        assert_eq!(&t * &c, CycElement::one(&f28));
    }

    #[test]
    fn trig_poles_and_levels() {
        let f28 = CycField::new(28);
        assert!(matches!(
            trig_value(TrigKind::Cot, 1, 1, &f28),
            Err(RingError::Pole { .. })
        ));
        assert!(matches!(
            trig_value(TrigKind::Tan, 1, 2, &f28),
            Err(RingError::Pole { .. })
        ));
        assert!(matches!(
            trig_value(TrigKind::Csc, 0, 1, &f28),
            Err(RingError::Pole { .. })
        ));
        assert!(matches!(
            trig_value(TrigKind::Sin, 1, 5, &f28),
            Err(RingError::InsufficientLevel { .. })
        ));
        let f14 = CycField::new(14);
        assert!(matches!(
            trig_value(TrigKind::Sin, 1, 7, &f14),
            Err(RingError::InsufficientLevel { .. })
        ));
    }

    #[test]
    fn float_rendering() {
        let f28 = CycField::new(28);
        let c = trig_value(TrigKind::Cos, 2, 7, &f28).unwrap();
        let v = to_float(&c, 1, 30).unwrap();
        // cos(2 pi / 7)
        assert_eq!(v.re, "6.23489801858733530525004884004e-1");
        assert_eq!(v.im, "0");
        let one = CycElement::zeta_pow(&f28, 28);
        assert_eq!(to_float(&one, 1, 30).unwrap().re, "1.00000000000000000000000000000e0");
        assert!(to_float(&one, 2, 30).is_err());
    }

    #[test]
    fn decimal_rounding_carries() {
        assert_eq!(round_decimal("9.9999e-1", 3), "1.00e0");
        assert_eq!(round_decimal("-1.2345e+2", 3), "-1.23e2");
        assert_eq!(round_decimal("1.e+0", 3), "1.00e0");
    }

    #[test]
    fn embed_subtracts_to_zero() {
        let f = CycField::new(28);
        let a = embed(&rat(3, 2), &f);
        assert!((&a - &a).is_zero());
        assert_eq!(a.to_rational(), Some(rat(3, 2)));
    }
}
