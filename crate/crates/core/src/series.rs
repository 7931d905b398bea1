//! Truncated Laurent–Puiseux series in `q^(1/D)` with explicit precision.
//!
//! A [`QSeries`] stores the coefficients of `q^(k/D)` for `lo <= k < prec`
//! densely. Everything at or above `prec` is unknown, and every operation
//! computes the exact precision of its result from the precisions of its
//! inputs. Coefficients live either in `Q` or in a cyclotomic field; a
//! rational operand is embedded when it meets a cyclotomic one.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::ring::{embed, CycElement, CycField, Rational, RingElement, RingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("incompatible coefficient rings: Q(zeta_{0}) vs Q(zeta_{1})")]
    IncompatibleRings(u32, u32),
    #[error("series is zero on its known range")]
    ZeroSeries,
    #[error("rational power needs constant term exactly 1 (lowest exponent {lo}/{denom})")]
    NotNormalized { lo: i64, denom: i64 },
    #[error("requested order {requested} exceeds known precision {available}")]
    Precision { requested: String, available: String },
    #[error("monomial exponent {k} is not below precision {prec}")]
    BadMonomial { k: i64, prec: i64 },
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Coefficient ring of a series.
#[derive(Clone, Debug)]
pub enum Ring {
    Rational,
    Cyclotomic(Arc<CycField>),
}

impl Ring {
    pub fn cyclotomic(level: u32) -> Ring {
        Ring::Cyclotomic(CycField::new(level))
    }

    /// Number of rational coordinates per coefficient.
    pub fn dim(&self) -> usize {
        match self {
            Ring::Rational => 1,
            Ring::Cyclotomic(f) => f.degree(),
        }
    }

    pub fn level(&self) -> Option<u32> {
        match self {
            Ring::Rational => None,
            Ring::Cyclotomic(f) => Some(f.level()),
        }
    }

    fn same(&self, other: &Ring) -> bool {
        self.level() == other.level()
    }

    /// The smallest ring containing both, if there is one.
    pub fn join(&self, other: &Ring) -> Result<Ring, SeriesError> {
        match (self, other) {
            (Ring::Rational, r) | (r, Ring::Rational) => Ok(r.clone()),
            (Ring::Cyclotomic(a), Ring::Cyclotomic(b)) => {
                if a.level() == b.level() {
                    Ok(self.clone())
                } else {
                    Err(SeriesError::IncompatibleRings(a.level(), b.level()))
                }
            }
        }
    }

    /// Coordinates of `e` in this ring.
    pub fn coords_of(&self, e: &RingElement) -> Result<Vec<Rational>, SeriesError> {
        match (self, e) {
            (Ring::Rational, RingElement::Rational(r)) => Ok(vec![r.clone()]),
            (Ring::Rational, RingElement::Cyclotomic(c)) => Err(SeriesError::IncompatibleRings(0, c.level())),
            (Ring::Cyclotomic(f), RingElement::Rational(r)) => Ok(embed(r, f).coords().to_vec()),
            (Ring::Cyclotomic(f), RingElement::Cyclotomic(c)) => {
                if c.level() == f.level() {
                    Ok(c.coords().to_vec())
                } else {
                    Err(SeriesError::IncompatibleRings(f.level(), c.level()))
                }
            }
        }
    }

    fn element(&self, coords: &[Rational]) -> RingElement {
        match self {
            Ring::Rational => RingElement::Rational(coords[0].clone()),
            Ring::Cyclotomic(f) => RingElement::Cyclotomic(CycElement::from_coords(f, coords.to_vec())),
        }
    }

    fn mul_coords(&self, a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        match self {
            Ring::Rational => vec![&a[0] * &b[0]],
            Ring::Cyclotomic(f) => f.mul_coords(a, b),
        }
    }

    fn inv_coords(&self, a: &[Rational]) -> Option<Vec<Rational>> {
        match self {
            Ring::Rational => {
                if a[0].is_zero() {
                    None
                } else {
                    Some(vec![a[0].recip()])
                }
            }
            Ring::Cyclotomic(f) => f.inv_coords(a),
        }
    }
}

/// A truncated series `sum_{lo <= k < prec} c_k q^(k/D) + O(q^(prec/D))`.
#[derive(Clone)]
pub struct QSeries {
    ring: Ring,
    denom: i64,
    lo: i64,
    prec: i64,
    /// `(prec - lo) * dim` rationals; coefficient `k` occupies `[(k-lo)*dim, (k-lo+1)*dim)`.
    coeffs: Vec<Rational>,
}

fn is_zero_slice(s: &[Rational]) -> bool {
    s.iter().all(Zero::is_zero)
}

impl QSeries {
    /// The series `O(q^(prec/D))`.
    pub fn zero(ring: Ring, denom: i64, prec: i64) -> Self {
        assert!(denom >= 1, "exponent denominator must be positive");
        QSeries {
            ring,
            denom,
            lo: prec,
            prec,
            coeffs: Vec::new(),
        }
    }

    /// Builds a series from a dense table starting at `lo`; normalizes leading zeros.
    pub fn from_dense(ring: Ring, denom: i64, lo: i64, prec: i64, coeffs: Vec<Rational>) -> Self {
        assert!(denom >= 1, "exponent denominator must be positive");
        assert!(lo <= prec, "lowest exponent above precision");
        assert_eq!(coeffs.len() as i64, (prec - lo) * ring.dim() as i64, "dense table length");
        let mut s = QSeries {
            ring,
            denom,
            lo,
            prec,
            coeffs,
        };
        s.normalize();
        s
    }

    /// Rational series from integer coefficients `c_0 + c_1 q + ...` with precision `coeffs.len()`.
    pub fn from_integers(coeffs: &[i64]) -> Self {
        let v = coeffs.iter().map(|&c| Rational::from_integer(BigInt::from(c))).collect();
        Self::from_dense(Ring::Rational, 1, 0, coeffs.len() as i64, v)
    }

    /// `c q^(k/D) + O(q^(prec/D))`.
    pub fn monomial(c: RingElement, k: i64, denom: i64, prec: i64) -> Result<Self, SeriesError> {
        if prec <= k {
            return Err(SeriesError::BadMonomial { k, prec });
        }
        let ring = match &c {
            RingElement::Rational(_) => Ring::Rational,
            RingElement::Cyclotomic(e) => Ring::Cyclotomic(e.field().clone()),
        };
        let dim = ring.dim();
        let mut coeffs = vec![Rational::zero(); (prec - k) as usize * dim];
        let cc = ring.coords_of(&c)?;
        coeffs[..dim].clone_from_slice(&cc);
        Ok(Self::from_dense(ring, denom, k, prec, coeffs))
    }

    /// The constant `c + O(q^(prec/D))`.
    pub fn constant(c: RingElement, denom: i64, prec: i64) -> Self {
        Self::monomial(c, 0, denom, prec).expect("constant with positive precision")
    }

    pub fn one(denom: i64, prec: i64) -> Self {
        Self::constant(RingElement::Rational(Rational::one()), denom, prec)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn denom(&self) -> i64 {
        self.denom
    }

    /// Lowest exponent index (meaning `q^(lo/D)`).
    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Precision index: coefficients are known for indices `< prec`.
    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// Precision as an exact exponent `prec / D`.
    pub fn precision(&self) -> Rational {
        Rational::new(BigInt::from(self.prec), BigInt::from(self.denom))
    }

    /// True if every known coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.lo == self.prec
    }

    fn dim(&self) -> usize {
        self.ring.dim()
    }

    fn slot(&self, k: i64) -> &[Rational] {
        let d = self.dim();
        let off = (k - self.lo) as usize * d;
        &self.coeffs[off..off + d]
    }

    /// Coefficient of `q^(k/D)`; `None` when `k` is at or above the precision.
    pub fn coeff(&self, k: i64) -> Option<RingElement> {
        if k >= self.prec {
            return None;
        }
        if k < self.lo {
            return Some(self.ring.element(&vec![Rational::zero(); self.dim()]));
        }
        Some(self.ring.element(self.slot(k)))
    }

    /// Rational coefficient of `q^(k/D)`; panics for cyclotomic series with an
    /// irrational coefficient.
    pub fn coeff_rational(&self, k: i64) -> Option<Rational> {
        self.coeff(k).map(|c| c.to_rational().expect("coefficient is not rational"))
    }

    /// Nonzero terms as `(index, coefficient)`.
    pub fn terms(&self) -> Vec<(i64, RingElement)> {
        (self.lo..self.prec)
            .filter(|&k| !is_zero_slice(self.slot(k)))
            .map(|k| (k, self.ring.element(self.slot(k))))
            .collect()
    }

    fn normalize(&mut self) {
        let d = self.dim();
        let lead = self.coeffs.chunks(d).take_while(|c| is_zero_slice(c)).count();
        if lead > 0 {
            self.coeffs.drain(..lead * d);
            self.lo += lead as i64;
        }
    }

    /// Re-expresses the series over denominator `denom`, a multiple of the current one.
    pub fn with_denom(&self, denom: i64) -> Self {
        assert!(denom % self.denom == 0, "denominator must be a multiple");
        let t = denom / self.denom;
        if t == 1 {
            return self.clone();
        }
        self.spread(t, denom)
    }

    /// Scales every exponent index by `t` and records the new denominator.
    fn spread(&self, t: i64, denom: i64) -> Self {
        let d = self.dim();
        let lo = self.lo * t;
        let prec = self.prec * t;
        let mut coeffs = vec![Rational::zero(); (prec - lo) as usize * d];
        for k in self.lo..self.prec {
            let src = self.slot(k);
            if is_zero_slice(src) {
                continue;
            }
            let off = ((k - self.lo) * t) as usize * d;
            coeffs[off..off + d].clone_from_slice(src);
        }
        QSeries {
            ring: self.ring.clone(),
            denom,
            lo,
            prec,
            coeffs,
        }
    }

    /// Moves the series into a (possibly larger) coefficient ring.
    pub fn lift_ring(&self, ring: &Ring) -> Result<Self, SeriesError> {
        if self.ring.same(ring) {
            return Ok(self.clone());
        }
        match (&self.ring, ring) {
            (Ring::Rational, Ring::Cyclotomic(f)) => {
                let d = f.degree();
                let mut coeffs = vec![Rational::zero(); (self.prec - self.lo) as usize * d];
                for (i, c) in self.coeffs.iter().enumerate() {
                    coeffs[i * d] = c.clone();
                }
                Ok(QSeries {
                    ring: ring.clone(),
                    denom: self.denom,
                    lo: self.lo,
                    prec: self.prec,
                    coeffs,
                })
            }
            (Ring::Cyclotomic(a), Ring::Cyclotomic(b)) => Err(SeriesError::IncompatibleRings(a.level(), b.level())),
            (Ring::Cyclotomic(a), Ring::Rational) => Err(SeriesError::IncompatibleRings(a.level(), 0)),
            (Ring::Rational, Ring::Rational) => unreachable!(),
        }
    }

    /// Demotes a cyclotomic series to `Q`, if every coefficient is rational.
    pub fn to_rational_ring(&self) -> Option<Self> {
        match &self.ring {
            Ring::Rational => Some(self.clone()),
            Ring::Cyclotomic(f) => {
                let d = f.degree();
                let mut coeffs = Vec::with_capacity(self.coeffs.len() / d);
                for c in self.coeffs.chunks(d) {
                    if !is_zero_slice(&c[1..]) {
                        return None;
                    }
                    coeffs.push(c[0].clone());
                }
                Some(QSeries {
                    ring: Ring::Rational,
                    denom: self.denom,
                    lo: self.lo,
                    prec: self.prec,
                    coeffs,
                })
            }
        }
    }

    /// Brings two series to a common ring and denominator.
    fn align(f: &QSeries, g: &QSeries) -> Result<(QSeries, QSeries), SeriesError> {
        let ring = f.ring.join(&g.ring)?;
        let denom = f.denom.lcm(&g.denom);
        let a = f.lift_ring(&ring)?.with_denom(denom);
        let b = g.lift_ring(&ring)?.with_denom(denom);
        Ok((a, b))
    }

    /// Sum; precision is the smaller of the two.
    pub fn try_add(&self, other: &QSeries) -> Result<QSeries, SeriesError> {
        self.combine(other, false)
    }

    pub fn try_sub(&self, other: &QSeries) -> Result<QSeries, SeriesError> {
        self.combine(other, true)
    }

    fn combine(&self, other: &QSeries, subtract: bool) -> Result<QSeries, SeriesError> {
        let (f, g) = Self::align(self, other)?;
        let prec = f.prec.min(g.prec);
        let lo = f.lo.min(g.lo).min(prec);
        let d = f.dim();
        let mut coeffs = vec![Rational::zero(); (prec - lo) as usize * d];
        for k in f.lo..f.prec.min(prec) {
            let off = (k - lo) as usize * d;
            for (dst, src) in coeffs[off..off + d].iter_mut().zip(f.slot(k)) {
                *dst += src;
            }
        }
        for k in g.lo..g.prec.min(prec) {
            let off = (k - lo) as usize * d;
            for (dst, src) in coeffs[off..off + d].iter_mut().zip(g.slot(k)) {
                if subtract {
                    *dst -= src;
                } else {
                    *dst += src;
                }
            }
        }
        Ok(QSeries::from_dense(f.ring, f.denom, lo, prec, coeffs))
    }

    /// Product; precision is `min(prec_f + lo_g, prec_g + lo_f)`.
    pub fn try_mul(&self, other: &QSeries) -> Result<QSeries, SeriesError> {
        let (f, g) = Self::align(self, other)?;
        let prec = (f.prec + g.lo).min(g.prec + f.lo);
        let lo = f.lo + g.lo;
        if f.is_zero() || g.is_zero() || lo >= prec {
            return Ok(QSeries::zero(f.ring, f.denom, prec));
        }
        let len = (prec - lo) as usize;
        let fnz: Vec<(usize, &[Rational])> = (f.lo..f.prec)
            .map(|k| ((k - f.lo) as usize, f.slot(k)))
            .filter(|(_, c)| !is_zero_slice(c))
            .collect();
        let gnz: Vec<(usize, &[Rational])> = (g.lo..g.prec)
            .map(|k| ((k - g.lo) as usize, g.slot(k)))
            .filter(|(_, c)| !is_zero_slice(c))
            .collect();
        let coeffs = match &f.ring {
            Ring::Rational => {
                let mut out = vec![Rational::zero(); len];
                for &(i, a) in &fnz {
                    if i >= len {
                        break;
                    }
                    for &(j, b) in &gnz {
                        if i + j >= len {
                            break;
                        }
                        out[i + j] += &a[0] * &b[0];
                    }
                }
                out
            }
            Ring::Cyclotomic(field) => {
                let d = field.degree();
                let w = 2 * d - 1;
                let mut acc = vec![Rational::zero(); len * w];
                for &(i, a) in &fnz {
                    if i >= len {
                        break;
                    }
                    for &(j, b) in &gnz {
                        if i + j >= len {
                            break;
                        }
                        let off = (i + j) * w;
                        CycField::mul_acc(a, b, &mut acc[off..off + w]);
                    }
                }
                let mut out = Vec::with_capacity(len * d);
                for chunk in acc.chunks(w) {
                    out.extend(field.reduce(chunk.to_vec()));
                }
                out
            }
        };
        Ok(QSeries::from_dense(f.ring, f.denom, lo, prec, coeffs))
    }

    /// Multiplies every coefficient by a scalar.
    pub fn scale(&self, c: &RingElement) -> Result<QSeries, SeriesError> {
        let ring = match c {
            RingElement::Rational(_) => self.ring.clone(),
            RingElement::Cyclotomic(e) => self.ring.join(&Ring::Cyclotomic(e.field().clone()))?,
        };
        let f = self.lift_ring(&ring)?;
        let cc = ring.coords_of(c)?;
        let d = ring.dim();
        let mut coeffs = Vec::with_capacity(f.coeffs.len());
        for chunk in f.coeffs.chunks(d) {
            if is_zero_slice(chunk) {
                coeffs.extend(chunk.iter().cloned());
            } else {
                coeffs.extend(ring.mul_coords(chunk, &cc));
            }
        }
        Ok(QSeries::from_dense(ring, f.denom, f.lo, f.prec, coeffs))
    }

    /// Multiplies by a rational scalar.
    pub fn scale_rational(&self, r: &Rational) -> QSeries {
        let coeffs = self.coeffs.iter().map(|c| c * r).collect();
        QSeries::from_dense(self.ring.clone(), self.denom, self.lo, self.prec, coeffs)
    }

    /// Multiplies by `q^(k/D)` (in this series' denominator).
    pub fn shift(&self, k: i64) -> QSeries {
        QSeries {
            ring: self.ring.clone(),
            denom: self.denom,
            lo: self.lo + k,
            prec: self.prec + k,
            coeffs: self.coeffs.clone(),
        }
    }

    /// Multiplies by `q^(num/den)`, lifting the denominator as needed.
    pub fn shift_by(&self, num: i64, den: i64) -> QSeries {
        let g = num.gcd(&den);
        let (num, den) = (num / g, den / g);
        let denom = self.denom.lcm(&den);
        self.with_denom(denom).shift(num * (denom / den))
    }

    /// Truncates to a lower precision index.
    pub fn truncate(&self, prec: i64) -> QSeries {
        if prec >= self.prec {
            return self.clone();
        }
        let lo = self.lo.min(prec);
        let d = self.dim();
        let coeffs = self.coeffs[..(prec - lo) as usize * d].to_vec();
        QSeries::from_dense(self.ring.clone(), self.denom, lo, prec, coeffs)
    }

    /// Multiplicative inverse. The result starts at `-lo` and has precision
    /// index `prec - 2 lo`.
    pub fn inv(&self) -> Result<QSeries, SeriesError> {
        if self.is_zero() {
            return Err(SeriesError::ZeroSeries);
        }
        let d = self.dim();
        let lead_inv = self
            .ring
            .inv_coords(self.slot(self.lo))
            .ok_or(SeriesError::ZeroSeries)?;
        let n = (self.prec - self.lo) as usize;
        let fnz: Vec<(usize, Vec<Rational>)> = (1..n)
            .map(|i| (i, self.coeffs[i * d..(i + 1) * d].to_vec()))
            .filter(|(_, c)| !is_zero_slice(c))
            .collect();
        let mut g: Vec<Vec<Rational>> = Vec::with_capacity(n);
        g.push(lead_inv.clone());
        for m in 1..n {
            let mut acc = vec![Rational::zero(); d];
            for (i, fi) in &fnz {
                if *i > m {
                    break;
                }
                let gj = &g[m - i];
                if is_zero_slice(gj) {
                    continue;
                }
                for (a, b) in acc.iter_mut().zip(self.ring.mul_coords(fi, gj)) {
                    *a += b;
                }
            }
            let val = if is_zero_slice(&acc) {
                acc
            } else {
                self.ring.mul_coords(&acc, &lead_inv).into_iter().map(|c| -c).collect()
            };
            g.push(val);
        }
        let lo = -self.lo;
        let prec = self.prec - 2 * self.lo;
        Ok(QSeries::from_dense(self.ring.clone(), self.denom, lo, prec, g.concat()))
    }

    /// Division `self / other`.
    pub fn try_div(&self, other: &QSeries) -> Result<QSeries, SeriesError> {
        self.try_mul(&other.inv()?)
    }

    /// Integer power by repeated squaring; negative exponents go through [`QSeries::inv`].
    pub fn pow(&self, e: i64) -> Result<QSeries, SeriesError> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let mut result = QSeries::one(self.denom, self.prec - self.lo).lift_ring(&self.ring)?;
        if e == 0 {
            return Ok(result);
        }
        let mut base = self.clone();
        let mut e = e as u64;
        let mut first = true;
        while e > 0 {
            if e & 1 == 1 {
                result = if first { base.clone() } else { result.try_mul(&base)? };
                first = false;
            }
            e >>= 1;
            if e > 0 {
                base = base.try_mul(&base)?;
            }
        }
        Ok(result)
    }

    /// `self^(a/b)` for a series with constant term exactly 1, via the
    /// recurrence `b f g' = a f' g` with `g(0) = 1`.
    pub fn pow_rational(&self, a: i64, b: i64) -> Result<QSeries, SeriesError> {
        assert!(b > 0, "rational power denominator must be positive");
        let d = self.dim();
        let one = self.ring.coords_of(&RingElement::Rational(Rational::one()))?;
        if self.lo != 0 || self.slot(0) != one.as_slice() {
            return Err(SeriesError::NotNormalized {
                lo: self.lo,
                denom: self.denom,
            });
        }
        let n = self.prec as usize;
        let fnz: Vec<(usize, &[Rational])> = (1..n)
            .map(|i| (i, &self.coeffs[i * d..(i + 1) * d]))
            .filter(|(_, c)| !is_zero_slice(c))
            .collect();
        let mut g: Vec<Vec<Rational>> = Vec::with_capacity(n);
        g.push(one);
        let (ab, bb) = (BigInt::from(a), BigInt::from(b));
        for m in 1..n {
            let mut acc = vec![Rational::zero(); d];
            for &(i, fi) in &fnz {
                if i > m {
                    break;
                }
                let gj = &g[m - i];
                if is_zero_slice(gj) {
                    continue;
                }
                let w = Rational::from_integer(&ab * BigInt::from(i) - &bb * BigInt::from(m - i));
                if w.is_zero() {
                    continue;
                }
                for (x, y) in acc.iter_mut().zip(self.ring.mul_coords(fi, gj)) {
                    *x += y * &w;
                }
            }
            let scale = Rational::new(BigInt::one(), &bb * BigInt::from(m));
            g.push(acc.into_iter().map(|c| c * &scale).collect());
        }
        Ok(QSeries::from_dense(self.ring.clone(), self.denom, 0, self.prec, g.concat()))
    }

    /// The operator `q d/dq`: the coefficient of `q^(k/D)` is multiplied by `k/D`.
    pub fn theta(&self) -> QSeries {
        let d = self.dim();
        let mut coeffs = self.coeffs.clone();
        for (i, chunk) in coeffs.chunks_mut(d).enumerate() {
            let k = self.lo + i as i64;
            let w = Rational::new(BigInt::from(k), BigInt::from(self.denom));
            for c in chunk.iter_mut() {
                if !c.is_zero() {
                    *c *= &w;
                }
            }
        }
        QSeries::from_dense(self.ring.clone(), self.denom, self.lo, self.prec, coeffs)
    }

    /// The substitution `q -> q^j`.
    pub fn substitute_power(&self, j: i64) -> QSeries {
        assert!(j >= 1, "substitution power must be positive");
        self.spread(j, self.denom)
    }

    /// Collapses the exponent denominator to the smallest one that represents
    /// every stored exponent. The precision is rounded down to the coarser grid.
    pub fn reduced(&self) -> QSeries {
        let mut g = self.denom;
        for (k, _) in self.terms() {
            g = g.gcd(&k);
        }
        if g <= 1 {
            return self.clone();
        }
        let d = self.dim();
        let prec = Integer::div_floor(&self.prec, &g);
        let lo = if self.is_zero() { prec } else { self.lo / g };
        let mut coeffs = vec![Rational::zero(); (prec - lo) as usize * d];
        for k in self.lo..self.prec.min(prec * g) {
            if k % g != 0 {
                continue;
            }
            let off = (k / g - lo) as usize * d;
            coeffs[off..off + d].clone_from_slice(self.slot(k));
        }
        QSeries::from_dense(self.ring.clone(), self.denom / g, lo, prec, coeffs)
    }

    /// Exact vanishing test for every exponent below `order_num / order_den`.
    pub fn is_zero_to(&self, order_num: i64, order_den: i64) -> Result<ZeroTest, SeriesError> {
        self.is_zero_below(&Rational::new(BigInt::from(order_num), BigInt::from(order_den)))
    }

    /// Exact vanishing test for every exponent strictly below `order`.
    pub fn is_zero_below(&self, order: &Rational) -> Result<ZeroTest, SeriesError> {
        if order > &self.precision() {
            return Err(SeriesError::Precision {
                requested: order.to_string(),
                available: self.precision().to_string(),
            });
        }
        for k in self.lo..self.prec {
            let e = Rational::new(BigInt::from(k), BigInt::from(self.denom));
            if &e >= order {
                break;
            }
            let c = self.slot(k);
            if !is_zero_slice(c) {
                return Ok(ZeroTest::NonZero {
                    exponent: e,
                    coefficient: self.ring.element(c),
                });
            }
        }
        Ok(ZeroTest::Zero)
    }
}

/// Outcome of [`QSeries::is_zero_to`].
#[derive(Debug, Clone, PartialEq)]
pub enum ZeroTest {
    Zero,
    /// The least exponent with a nonzero coefficient.
    NonZero { exponent: Rational, coefficient: RingElement },
}

impl ZeroTest {
    pub fn is_zero(&self) -> bool {
        matches!(self, ZeroTest::Zero)
    }
}

impl fmt::Debug for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let e = Rational::new(BigInt::from(k), BigInt::from(self.denom));
            write!(f, "({})*q^({})", c, e)?;
        }
        if !first {
            write!(f, " + ")?;
        }
        write!(f, "O(q^({}))", self.precision())
    }
}

impl PartialEq for QSeries {
    /// Structural equality: same ring, denominator, precision and coefficients.
    fn eq(&self, other: &Self) -> bool {
        self.ring.same(&other.ring)
            && self.denom == other.denom
            && self.lo == other.lo
            && self.prec == other.prec
            && self.coeffs == other.coeffs
    }
}

macro_rules! series_binop {
    ($tr:ident, $method:ident, $call:ident) => {
        impl<'a> $tr<&'a QSeries> for &'a QSeries {
            type Output = QSeries;
            /// Panics on incompatible cyclotomic levels; the `try_` methods report them.
            fn $method(self, rhs: &'a QSeries) -> QSeries {
                self.$call(rhs).expect("series arithmetic")
            }
        }
        impl $tr<QSeries> for QSeries {
            type Output = QSeries;
            fn $method(self, rhs: QSeries) -> QSeries {
                self.$call(&rhs).expect("series arithmetic")
            }
        }
        impl<'a> $tr<&'a QSeries> for QSeries {
            type Output = QSeries;
            fn $method(self, rhs: &'a QSeries) -> QSeries {
                self.$call(rhs).expect("series arithmetic")
            }
        }
        impl<'a> $tr<QSeries> for &'a QSeries {
            type Output = QSeries;
            fn $method(self, rhs: QSeries) -> QSeries {
                self.$call(&rhs).expect("series arithmetic")
            }
        }
    };
}

series_binop!(Add, add, try_add);
series_binop!(Sub, sub, try_sub);
series_binop!(Mul, mul, try_mul);

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries {
            ring: self.ring.clone(),
            denom: self.denom,
            lo: self.lo,
            prec: self.prec,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{int, rat};

    fn r(n: i64) -> RingElement {
        RingElement::Rational(int(n))
    }

    #[test]
    fn monomials() {
        let one = QSeries::monomial(r(1), 0, 1, 10).unwrap();
        assert_eq!(one.coeff_rational(0), Some(int(1)));
        assert_eq!(one.prec(), 10);
        let qinv = QSeries::monomial(r(1), -1, 1, 5).unwrap();
        assert_eq!(qinv.lo(), -1);
        let p = QSeries::monomial(r(1), 49, 56, 100).unwrap();
        assert_eq!(p.reduced().denom(), 8);
        assert_eq!(p.reduced().lo(), 7);
        assert!(QSeries::monomial(r(1), 5, 1, 5).is_err());
    }

    #[test]
    fn geometric_product_collapses() {
        let n = 8;
        let geo = QSeries::from_integers(&vec![1; n]);
        let one_minus_q = QSeries::from_integers(&[1, -1]).truncate(2);
        // (1 - q) known to all orders: use a long precision
        let omq = QSeries::from_dense(Ring::Rational, 1, 0, 100, {
            let mut v = vec![int(0); 100];
            v[0] = int(1);
            v[1] = int(-1);
            v
        });
        let p = &omq * &geo;
        assert_eq!(p.prec(), n as i64);
        assert!((&p - &QSeries::one(1, n as i64)).is_zero());
        assert_eq!(one_minus_q.prec(), 2);
    }

    #[test]
    fn half_powers_multiply_to_q() {
        let h = QSeries::monomial(r(1), 1, 2, 10).unwrap();
        let p = &h * &h;
        assert_eq!(p.denom(), 2);
        let red = p.reduced();
        assert_eq!((red.denom(), red.lo()), (1, 1));
        assert_eq!(red.coeff_rational(1), Some(int(1)));
    }

    #[test]
    fn square_by_hand_convolution() {
        let f = QSeries::from_integers(&[1, 2, 3]);
        let s = &f * &f;
        assert_eq!(s, QSeries::from_integers(&[1, 4, 10]));
    }

    #[test]
    fn inverse_examples() {
        let omq = QSeries::from_integers(&[1, -1, 0, 0]);
        assert_eq!(omq.inv().unwrap(), QSeries::from_integers(&[1, 1, 1, 1]));
        let q = QSeries::monomial(r(1), 1, 1, 10).unwrap();
        let qi = q.inv().unwrap();
        assert_eq!((qi.lo(), qi.prec()), (-1, 8));
        // 2q^2 + 2q^3 + O(q^6)
        let f = QSeries::from_dense(Ring::Rational, 1, 2, 6, vec![int(2), int(2), int(0), int(0)]);
        let g = f.inv().unwrap();
        assert_eq!((g.lo(), g.prec()), (-2, 2));
        let expect: Vec<Rational> = vec![rat(1, 2), rat(-1, 2), rat(1, 2), rat(-1, 2)];
        for (k, e) in (-2..2).zip(expect) {
            assert_eq!(g.coeff_rational(k), Some(e));
        }
        assert_eq!(QSeries::zero(Ring::Rational, 1, 5).inv().unwrap_err(), SeriesError::ZeroSeries);
    }

    #[test]
    fn binomial_rational_power() {
        let omq = QSeries::from_integers(&[1, -1, 0]);
        let g = omq.pow_rational(-3, 5).unwrap();
        assert_eq!(g.coeff_rational(0), Some(int(1)));
        assert_eq!(g.coeff_rational(1), Some(rat(3, 5)));
        assert_eq!(g.coeff_rational(2), Some(rat(12, 25)));
        let f = QSeries::from_integers(&[1, 3, -2, 7, 1, 0, 5]);
        assert_eq!(f.pow_rational(0, 5).unwrap(), QSeries::one(1, 7));
        let cube = f.pow_rational(1, 3).unwrap().pow(3).unwrap();
        assert!((&cube - &f).is_zero());
        let bad = QSeries::from_integers(&[2, 1]);
        assert!(matches!(bad.pow_rational(1, 2), Err(SeriesError::NotNormalized { .. })));
    }

    #[test]
    fn theta_operator() {
        let f = QSeries::monomial(r(1), 3, 2, 10).unwrap();
        assert_eq!(f.theta().coeff_rational(3), Some(rat(3, 2)));
        assert!(QSeries::one(1, 10).theta().is_zero());
    }

    #[test]
    fn substitution() {
        let f = QSeries::from_integers(&[1, -24]);
        let g = f.substitute_power(7);
        assert_eq!(g.prec(), 14);
        assert_eq!(g.coeff_rational(7), Some(int(-24)));
        assert_eq!(f.substitute_power(1), f);
        let h = QSeries::monomial(r(1), 1, 2, 4).unwrap().substitute_power(2).reduced();
        assert_eq!((h.denom(), h.lo()), (1, 1));
    }

    #[test]
    fn zero_tests_and_precision_errors() {
        let f = QSeries::from_integers(&[3, 1, 4, 1, 5]);
        assert!((&f - &f).is_zero_to(5, 1).unwrap().is_zero());
        let g = QSeries::monomial(r(1), 5, 1, 10).unwrap();
        assert!(g.is_zero_to(5, 1).unwrap().is_zero());
        assert_eq!(
            g.is_zero_to(6, 1).unwrap(),
            ZeroTest::NonZero {
                exponent: int(5),
                coefficient: r(1)
            }
        );
        assert!(matches!(g.is_zero_to(11, 1), Err(SeriesError::Precision { .. })));
        // fractional order: 19/2 is still within precision 10
        assert!(g.is_zero_to(19, 2).is_ok());
    }

    #[test]
    fn mixed_rings_lift_and_mismatch_errors() {
        let f28 = Ring::cyclotomic(28);
        let z = match &f28 {
            Ring::Cyclotomic(f) => CycElement::zeta_pow(f, 1),
            _ => unreachable!(),
        };
        let a = QSeries::constant(RingElement::Cyclotomic(z.clone()), 1, 5);
        let b = QSeries::from_integers(&[1, 1, 1, 1, 1]);
        let s = &a + &b;
        assert_eq!(s.ring().level(), Some(28));
        let f12 = CycField::new(12);
        let c = QSeries::constant(RingElement::Cyclotomic(CycElement::zeta_pow(&f12, 1)), 1, 5);
        assert_eq!(a.try_mul(&c).unwrap_err(), SeriesError::IncompatibleRings(28, 12));
    }
}
