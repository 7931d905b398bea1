//! Exact septic constants in `Q(zeta_28)`: the coefficients expressing
//! `x`, `y`, `z` through `e_{1/7}`, `e_{2/7}`, `e_{3/7}`, their sine DFT
//! derivation, and the quadratic bundles `Phi_1..Phi_6` with the periodic
//! tables `a_n`, `b_n` they induce.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constructors::{SEQ_X, SEQ_Y, SEQ_Z};
use crate::ring::{int, rat, trig_value, CycElement, CycField, Rational, RingError, TrigKind};

/// Level used for every septic constant.
pub const LEVEL: u32 = 28;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConstantsError {
    #[error("sequence is not odd modulo 7 at residue {0}")]
    NotOdd(usize),
    #[error("{name}: closed form {closed} differs from derived value {derived}")]
    Mismatch {
        name: String,
        closed: String,
        derived: String,
    },
    #[error("{0} is not rational")]
    NotRational(String),
    #[error("{0}")]
    Periodicity(String),
    #[error(transparent)]
    Ring(#[from] RingError),
}

pub fn field28() -> Arc<CycField> {
    CycField::new(LEVEL)
}

fn trig(kind: TrigKind, num: i64, den: i64, f: &Arc<CycField>) -> Result<CycElement, ConstantsError> {
    Ok(trig_value(kind, num, den, f)?)
}

fn c(r: Rational, f: &Arc<CycField>) -> CycElement {
    crate::ring::embed(&r, f)
}

/// Sine coefficients `l_m = (2/7) sum_k s(k) sin(2 pi m k / 7)`, `m = 1, 2, 3`,
/// of a sequence odd modulo 7. The reconstruction
/// `s(n) = sum_m l_m sin(2 pi m n / 7)` is checked at every residue.
pub fn dft_sine(seq: &[Rational; 7], f: &Arc<CycField>) -> Result<[CycElement; 3], ConstantsError> {
    for k in 0..7 {
        if seq[k] != -seq[(7 - k) % 7].clone() {
            return Err(ConstantsError::NotOdd(k));
        }
    }
    let mut ells = Vec::with_capacity(3);
    for m in 1..=3i64 {
        let mut acc = CycElement::zero(f);
        for (k, s) in seq.iter().enumerate() {
            acc = &acc + &trig(TrigKind::Sin, 2 * m * k as i64, 7, f)?.scale(s);
        }
        ells.push(acc.scale(&rat(2, 7)));
    }
    for (n, s) in seq.iter().enumerate() {
        let mut acc = CycElement::zero(f);
        for (m, l) in ells.iter().enumerate() {
            acc = &acc + &(l * &trig(TrigKind::Sin, 2 * (m as i64 + 1) * n as i64, 7, f)?);
        }
        if acc != c(s.clone(), f) {
            return Err(ConstantsError::Mismatch {
                name: format!("reconstruction at residue {n}"),
                closed: s.to_string(),
                derived: acc.to_string(),
            });
        }
    }
    Ok([ells[0].clone(), ells[1].clone(), ells[2].clone()])
}

/// The closed forms of the nine coefficients, as `[alphas, betas, gammas]`.
pub fn closed_forms(f: &Arc<CycField>) -> Result<[[CycElement; 3]; 3], ConstantsError> {
    use TrigKind::*;
    let one = CycElement::one(f);
    let k = |r: Rational| c(r, f);
    let sin3_14 = trig(Sin, 3, 14, f)?;
    let sin1_14 = trig(Sin, 1, 14, f)?;
    let cos3_14 = trig(Cos, 3, 14, f)?;
    let cos1_7 = trig(Cos, 1, 7, f)?;
    let csc1_7 = trig(Csc, 1, 7, f)?;
    let csc1_14 = trig(Csc, 1, 14, f)?;
    let csc3_14 = trig(Csc, 3, 14, f)?;

    let a1 = (&one - &(&cos3_14 * &csc1_7).scale(&int(3))).scale(&rat(1, 14));
    let a2 = (&one + &sin3_14.scale(&int(6))).scale(&rat(1, 14));
    let a3 = (&one - &sin1_14.scale(&int(6))).scale(&rat(1, 14));

    let b1 = (&k(int(4)) - &(&csc1_14 * &(&k(int(2)) + &csc3_14))).scale(&rat(1, 56));
    let b2 = (&(&one + &sin3_14.scale(&int(4))) - &cos1_7.scale(&int(2))).scale(&rat(1, 14));
    let b3 = (&(&k(int(2)) - &sin1_14.scale(&int(4))) + &csc3_14).scale(&rat(1, 28));

    let g1 = (&k(int(4)) + &(&csc1_14 * &(&k(int(3)) + &csc3_14))).scale(&rat(1, 28));
    let g2 = (&(&one - &sin3_14.scale(&int(5))) + &cos1_7.scale(&int(3))).scale(&rat(1, 7));
    let g3 = (&(&k(int(4)) + &sin1_14.scale(&int(8))) - &csc3_14.scale(&int(3))).scale(&rat(1, 28));

    Ok([[a1, a2, a3], [b1, b2, b3], [g1, g2, g3]])
}

/// Coefficients `l_j / (4 tan(j pi / 7))` from the sine DFT of a sequence.
pub fn coefficients_from_dft(seq: &[Rational; 7], f: &Arc<CycField>) -> Result<[CycElement; 3], ConstantsError> {
    let ells = dft_sine(seq, f)?;
    let mut out = Vec::with_capacity(3);
    for (j, l) in ells.iter().enumerate() {
        let t = trig(TrigKind::Tan, j as i64 + 1, 7, f)?.scale(&int(4));
        out.push(l.div(&t)?);
    }
    Ok([out[0].clone(), out[1].clone(), out[2].clone()])
}

fn rational_seq(s: &[i64; 7]) -> [Rational; 7] {
    std::array::from_fn(|i| int(s[i]))
}

/// The coefficient sequences of the Lambert forms of `x`, `y`, `z`.
pub fn lambert_sequences() -> [[Rational; 7]; 3] {
    [rational_seq(&SEQ_X), rational_seq(&SEQ_Y), rational_seq(&SEQ_Z)]
}

/// The septic constants, each derived twice and compared exactly.
#[derive(Clone, Debug)]
pub struct SepticConstants {
    pub field: Arc<CycField>,
    pub alphas: [CycElement; 3],
    pub betas: [CycElement; 3],
    pub gammas: [CycElement; 3],
    /// Sine DFT coefficients of the `x`, `y`, `z` sequences.
    pub ells: [[CycElement; 3]; 3],
}

impl SepticConstants {
    /// Coefficient triples indexed by 0 = x, 1 = y, 2 = z.
    pub fn triple(&self, which: usize) -> &[CycElement; 3] {
        match which {
            0 => &self.alphas,
            1 => &self.betas,
            2 => &self.gammas,
            _ => panic!("triple index out of range"),
        }
    }
}

/// Computes the nine coefficients from the closed forms and from the DFT,
/// failing on any difference, and checks the constant terms of `x, y, z`
/// (0, 0, 1) against `sum_j coefficient_j`.
pub fn efund_constants() -> Result<SepticConstants, ConstantsError> {
    let f = field28();
    let closed = closed_forms(&f)?;
    let seqs = lambert_sequences();
    let names = ["alpha", "beta", "gamma"];
    let mut ells = Vec::new();
    for (i, seq) in seqs.iter().enumerate() {
        ells.push(dft_sine(seq, &f)?);
        let derived = coefficients_from_dft(seq, &f)?;
        for j in 0..3 {
            if closed[i][j] != derived[j] {
                return Err(ConstantsError::Mismatch {
                    name: format!("{}{}", names[i], j + 1),
                    closed: closed[i][j].to_string(),
                    derived: derived[j].to_string(),
                });
            }
        }
        let sum = &(&closed[i][0] + &closed[i][1]) + &closed[i][2];
        let expected = if i == 2 { int(1) } else { int(0) };
        if sum.to_rational() != Some(expected.clone()) {
            return Err(ConstantsError::Mismatch {
                name: format!("{} constant term", ["x", "y", "z"][i]),
                closed: expected.to_string(),
                derived: sum.to_string(),
            });
        }
    }
    let [alphas, betas, gammas] = closed;
    Ok(SepticConstants {
        field: f,
        alphas,
        betas,
        gammas,
        ells: [ells[0].clone(), ells[1].clone(), ells[2].clone()],
    })
}

// ---------------------------------------------------------------------------
// Quadratic bundles
// ---------------------------------------------------------------------------

/// A quadratic form in `x, y, z` with integer coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quadratic {
    pub xx: i64,
    pub yy: i64,
    pub zz: i64,
    pub xy: i64,
    pub xz: i64,
    pub yz: i64,
}

impl Quadratic {
    pub fn eval(&self, v: [&CycElement; 3]) -> CycElement {
        let [x, y, z] = v;
        let terms = [
            (x * x).scale(&int(self.xx)),
            (y * y).scale(&int(self.yy)),
            (z * z).scale(&int(self.zz)),
            (x * y).scale(&int(self.xy)),
            (x * z).scale(&int(self.xz)),
            (y * z).scale(&int(self.yz)),
        ];
        terms.iter().skip(1).fold(terms[0].clone(), |a, t| &a + t)
    }
}

/// The quadratic parts of the logarithmic derivatives of `x`, `y`, `z`.
pub const QUAD_X: Quadratic = Quadratic { xx: -7, yy: 5, zz: 5, xy: -52, xz: 0, yz: -20 };
pub const QUAD_Y: Quadratic = Quadratic { xx: 5, yy: -7, zz: 5, xy: 0, xz: 20, yz: -52 };
pub const QUAD_Z: Quadratic = Quadratic { xx: 5, yy: 5, zz: -7, xy: -20, xz: 52, yz: 0 };

/// `delta_alpha(n) = 16 tan^2(pi a) sin^2(pi n a)`.
pub fn delta(k: i64, n: i64, f: &Arc<CycField>) -> Result<CycElement, ConstantsError> {
    let t = trig(TrigKind::Tan, k, 7, f)?;
    let s = trig(TrigKind::Sin, n * k, 7, f)?;
    Ok((&(&t * &t) * &(&s * &s)).scale(&int(16)))
}

/// `lambda_alpha(n) = 16 tan^2(pi a) cos(2 pi n a)`.
pub fn lambda(k: i64, n: i64, f: &Arc<CycField>) -> Result<CycElement, ConstantsError> {
    let t = trig(TrigKind::Tan, k, 7, f)?;
    Ok((&(&t * &t) * &trig(TrigKind::Cos, 2 * n * k, 7, f)?).scale(&int(16)))
}

/// `kappa_alpha(n) = 8 tan(pi a) tan(2 pi a) sin^2(pi n a)`.
pub fn kappa(k: i64, n: i64, f: &Arc<CycField>) -> Result<CycElement, ConstantsError> {
    let tt = &trig(TrigKind::Tan, k, 7, f)? * &trig(TrigKind::Tan, 2 * k, 7, f)?;
    let s = trig(TrigKind::Sin, n * k, 7, f)?;
    Ok((&tt * &(&s * &s)).scale(&int(8)))
}

/// `mu_alpha(n) = 4 tan(pi a) tan(2 pi a) (4 cos(2 pi n a) + cos(4 pi n a))`.
pub fn mu(k: i64, n: i64, f: &Arc<CycField>) -> Result<CycElement, ConstantsError> {
    let tt = &trig(TrigKind::Tan, k, 7, f)? * &trig(TrigKind::Tan, 2 * k, 7, f)?;
    let inner = &trig(TrigKind::Cos, 2 * n * k, 7, f)?.scale(&int(4)) + &trig(TrigKind::Cos, 4 * n * k, 7, f)?;
    Ok((&tt * &inner).scale(&int(4)))
}

/// For each cross term `Phi_4, Phi_5, Phi_6` (`e1 e2`, `e1 e3`, `e2 e3`),
/// the `k` with `e_{k/7} e_{1-2k/7}` equal to that product.
pub const CROSS_ALPHA: [i64; 3] = [1, 3, 2];

/// Expansion of one quadratic in `e_{1/7}, e_{2/7}, e_{3/7}`.
#[derive(Clone, Debug)]
pub struct PhiBundle {
    pub quadratic: Quadratic,
    /// `Phi_1..Phi_6` for `e1^2, e2^2, e3^2, e1 e2, e1 e3, e2 e3`.
    pub phis: [CycElement; 6],
    pub seq_a: [Rational; 7],
    pub seq_b: [Rational; 7],
    pub sum: Rational,
}

fn to_rational(v: &CycElement, what: impl Fn() -> String) -> Result<Rational, ConstantsError> {
    v.to_rational().ok_or_else(|| ConstantsError::NotRational(what()))
}

/// Expands `quad` with `x = sum alpha_j e_j` etc. and evaluates the periodic
/// tables `a_n`, `b_n` of its Lambert form.
pub fn phi_bundle(consts: &SepticConstants, quad: Quadratic) -> Result<PhiBundle, ConstantsError> {
    let f = &consts.field;
    let v = |j: usize| [&consts.alphas[j], &consts.betas[j], &consts.gammas[j]];
    let sum_v = |i: usize, j: usize| -> [CycElement; 3] {
        [
            &consts.alphas[i] + &consts.alphas[j],
            &consts.betas[i] + &consts.betas[j],
            &consts.gammas[i] + &consts.gammas[j],
        ]
    };
    let diag: Vec<CycElement> = (0..3).map(|j| quad.eval(v(j))).collect();
    let cross = |i: usize, j: usize| {
        let s = sum_v(i, j);
        &(&quad.eval([&s[0], &s[1], &s[2]]) - &diag[i]) - &diag[j]
    };
    let phis = [
        diag[0].clone(),
        diag[1].clone(),
        diag[2].clone(),
        cross(0, 1),
        cross(0, 2),
        cross(1, 2),
    ];
    let mut seq_a: [Rational; 7] = std::array::from_fn(|_| int(0));
    let mut seq_b: [Rational; 7] = std::array::from_fn(|_| int(0));
    for n in 0..7i64 {
        let mut a = CycElement::zero(f);
        let mut b = CycElement::zero(f);
        for k in 1..=3i64 {
            let phi = &phis[(k - 1) as usize];
            a = &a + &(phi * &delta(k, n, f)?);
            b = &b + &(phi * &lambda(k, n, f)?);
        }
        for (r, &k) in CROSS_ALPHA.iter().enumerate() {
            let phi = &phis[3 + r];
            a = &a + &(phi * &kappa(k, n, f)?);
            b = &b + &(phi * &mu(k, n, f)?);
        }
        seq_a[n as usize] = to_rational(&a, || format!("a_{n}"))?;
        seq_b[n as usize] = to_rational(&b, || format!("b_{n}"))?;
    }
    let total = phis.iter().skip(1).fold(phis[0].clone(), |a, p| &a + p);
    let sum = to_rational(&total, || "Phi_1 + ... + Phi_6".to_string())?;
    Ok(PhiBundle {
        quadratic: quad,
        phis,
        seq_a,
        seq_b,
        sum,
    })
}

/// The bundle of the `x`-equation.
pub fn phi_constants(consts: &SepticConstants) -> Result<PhiBundle, ConstantsError> {
    phi_bundle(consts, QUAD_X)
}

/// Checks that `delta`, `lambda`, `kappa`, `mu` at `k/7` are 7-periodic in `n` up to `n_max`.
pub fn periodicity_check(n_max: i64) -> Result<(), ConstantsError> {
    let f = field28();
    type Fam = fn(i64, i64, &Arc<CycField>) -> Result<CycElement, ConstantsError>;
    let families: [(&str, Fam); 4] = [("delta", delta), ("lambda", lambda), ("kappa", kappa), ("mu", mu)];
    for (name, fam) in families {
        for k in 1..=3 {
            for n in 0..=n_max - 7 {
                if fam(k, n, &f)? != fam(k, n + 7, &f)? {
                    return Err(ConstantsError::Periodicity(format!("{name}_{{{k}/7}}({n}) != {name}_{{{k}/7}}({})", n + 7)));
                }
            }
        }
    }
    Ok(())
}

/// The periodic table `t` and constant `c0` with
/// `(quad + 7 E2(q^7)) / 12 = c0 + sum_{n>=1} t(n) n q^n/(1-q^n)`.
///
/// Requires `b_n` constant on `n` prime to 7; the double-pole series then
/// collapses to single-pole form (`b_n = beta + gamma [7|n]` contributes
/// `beta + (gamma/7) [7|n]`).
#[derive(Clone, Debug, PartialEq)]
pub struct LogDerivativeTable {
    pub constant: Rational,
    pub table: [Rational; 7],
}

pub fn log_derivative_table(bundle: &PhiBundle) -> Result<LogDerivativeTable, ConstantsError> {
    let beta = bundle.seq_b[1].clone();
    if bundle.seq_b[1..].iter().any(|b| *b != beta) {
        return Err(ConstantsError::Periodicity("b_n is not constant on residues prime to 7".into()));
    }
    let gamma = &bundle.seq_b[0] - &beta;
    let twelve = int(12);
    let table = std::array::from_fn(|r| {
        let mut v = &bundle.seq_a[r] + &beta;
        if r == 0 {
            v += &gamma / int(7) - int(24);
        }
        v / &twelve
    });
    Ok(LogDerivativeTable {
        constant: (&bundle.sum + int(7)) / twelve,
        table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64; 7]) -> [Rational; 7] {
        rational_seq(v)
    }

    #[test]
    fn zero_sequence_has_zero_dft() {
        let f = field28();
        let z = dft_sine(&ints(&[0; 7]), &f).unwrap();
        assert!(z.iter().all(CycElement::is_zero));
    }

    #[test]
    fn even_sequence_rejected() {
        let f = field28();
        assert_eq!(dft_sine(&ints(&[0, 1, 0, 0, 0, 0, 1]), &f).unwrap_err(), ConstantsError::NotOdd(1));
    }

    #[test]
    fn closed_forms_match_dft() {
        let k = efund_constants().unwrap();
        // alpha_2 numerically, as a sanity check of the rendering path
        let a2 = crate::ring::to_float(&k.alphas[1], 1, 10).unwrap();
        // (1 + 6 sin(3 pi/14))/14 = 0.33863...
        assert!(a2.re.starts_with("3.3863"), "{}", a2.re);
    }

    #[test]
    fn x_bundle_reproduces_table() {
        let k = efund_constants().unwrap();
        let b = phi_constants(&k).unwrap();
        assert_eq!(b.seq_a, ints(&[0, 37, 25, 61, 61, 25, 37]));
        assert_eq!(b.seq_b, ints(&[222, -37, -37, -37, -37, -37, -37]));
        assert_eq!(b.sum, int(5));
        let t = log_derivative_table(&b).unwrap();
        assert_eq!(t.constant, int(1));
        assert_eq!(t.table, ints(&[-2, 0, -1, 2, 2, -1, 0]));
    }

    #[test]
    fn y_and_z_bundles() {
        let k = efund_constants().unwrap();
        let y = phi_bundle(&k, QUAD_Y).unwrap();
        assert_eq!(y.seq_a, ints(&[0, 25, 61, 37, 37, 61, 25]));
        assert_eq!(y.sum, int(5));
        let t = log_derivative_table(&y).unwrap();
        assert_eq!(t.table, ints(&[-2, -1, 2, 0, 0, 2, -1]));
        let z = phi_bundle(&k, QUAD_Z).unwrap();
        assert_eq!(z.seq_a, ints(&[0, 61, 37, 25, 25, 37, 61]));
        assert_eq!(z.sum, int(-7));
        let t = log_derivative_table(&z).unwrap();
        assert_eq!(t.constant, int(0));
        assert_eq!(t.table, ints(&[-2, 2, 0, -1, -1, 0, 2]));
    }

    #[test]
    fn families_are_periodic() {
        periodicity_check(21).unwrap();
    }
}
