//! Property checks shared by the property and acceptance suites.

#![allow(dead_code)]

use std::sync::Arc;

use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use septic_core::ring::{int, rat, trig_value, CycElement, CycField, Rational, RingElement, TrigKind};
use septic_core::series::{QSeries, Ring, ZeroTest};

pub const CASES: u32 = 128;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

/// A series over `q^(1/denom)` with `len` known coefficients starting at `lo`.
fn series_with(denom: i64) -> impl Strategy<Value = QSeries> {
    (-3i64..=3, prop::collection::vec(small_rational(), 1..10)).prop_map(move |(lo, c)| {
        let prec = lo + c.len() as i64;
        QSeries::from_dense(Ring::Rational, denom, lo, prec, c)
    })
}

fn any_series() -> impl Strategy<Value = QSeries> {
    prop_oneof![Just(1i64), Just(2), Just(3)].prop_flat_map(series_with)
}

/// A series with a nonzero leading coefficient.
fn unit_series() -> impl Strategy<Value = QSeries> {
    (
        prop_oneof![Just(1i64), Just(2)],
        -2i64..=2,
        small_rational().prop_filter("nonzero", |r| !r.is_zero()),
        prop::collection::vec(small_rational(), 0..8),
    )
        .prop_map(|(d, lo, lead, rest)| {
            let mut c = vec![lead];
            c.extend(rest);
            let prec = lo + c.len() as i64;
            QSeries::from_dense(Ring::Rational, d, lo, prec, c)
        })
}

/// `1 + O(q)` over integer exponents.
fn normalized_series() -> impl Strategy<Value = QSeries> {
    prop::collection::vec(small_rational(), 1..8).prop_map(|rest| {
        let mut c = vec![Rational::one()];
        c.extend(rest);
        let prec = c.len() as i64;
        QSeries::from_dense(Ring::Rational, 1, 0, prec, c)
    })
}

/// Every coefficient known for both sides agrees.
fn agree(a: &QSeries, b: &QSeries) -> Result<(), TestCaseError> {
    let r = a.try_sub(b).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert!(r.terms().is_empty(), "difference {:?}", r.terms());
    Ok(())
}

fn level() -> impl Strategy<Value = Arc<CycField>> {
    prop_oneof![Just(4u32), Just(12), Just(28), Just(20)].prop_map(CycField::new)
}

fn element(f: Arc<CycField>) -> impl Strategy<Value = CycElement> {
    let d = f.degree();
    prop::collection::vec(small_rational(), d).prop_map(move |c| CycElement::from_coords(&f, c))
}

fn three_elements() -> impl Strategy<Value = (CycElement, CycElement, CycElement)> {
    level().prop_flat_map(|f| (element(f.clone()), element(f.clone()), element(f)))
}

fn runner() -> TestRunner {
    let config = Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

pub fn addition_is_commutative_and_associative() -> Result<(), String> {
    runner()
        .run(&(any_series(), any_series(), any_series()), |(a, b, c)| {
            agree(&(&a + &b), &(&b + &a))?;
            agree(&(&(&a + &b) + &c), &(&a + &(&b + &c)))?;
            let a2 = a.clone();
            agree(&(&a - &a2), &QSeries::zero(Ring::Rational, 1, a.prec()))?;
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn multiplication_is_commutative_associative_distributive() -> Result<(), String> {
    runner()
        .run(&(any_series(), any_series(), any_series()), |(a, b, c)| {
            agree(&(&a * &b), &(&b * &a))?;
            agree(&(&(&a * &b) * &c), &(&a * &(&b * &c)))?;
            agree(&(&a * &(&b + &c)), &(&(&a * &b) + &(&a * &c)))?;
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn one_is_neutral() -> Result<(), String> {
    runner()
        .run(&(any_series(),), |(a,)| {
            let one = QSeries::one(1, a.prec().max(1) + 10);
            agree(&(&a * &one), &a)?;
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn leibniz_rule() -> Result<(), String> {
    runner()
        .run(&(any_series(), any_series()), |(a, b)| {
            let lhs = (&a * &b).theta();
            let rhs = &(&a.theta() * &b) + &(&a * &b.theta());
            agree(&lhs, &rhs)?;
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn power_laws() -> Result<(), String> {
    runner()
        .run(&(unit_series(), 0i64..4, 0i64..4), |(a, m, n)| {
            let pm = a.pow(m).unwrap();
            let pn = a.pow(n).unwrap();
            agree(&a.pow(m + n).unwrap(), &(&pm * &pn))?;
            agree(&pm.pow(n).unwrap(), &a.pow(m * n).unwrap())?;
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn inverse_round_trip() -> Result<(), String> {
    runner()
        .run(&(unit_series(),), |(a,)| {
            let inv = a.inv().unwrap();
            let lo = a.lo();
            let prod = &a * &inv;
            agree(&prod, &QSeries::one(a.denom(), prod.prec().max(1)))?;
            prop_assert_eq!(inv.lo(), -lo);
            agree(&inv.inv().unwrap(), &a)?;
            agree(&a.pow(-2).unwrap(), &inv.pow(2).unwrap())?;
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn rational_root_round_trip() -> Result<(), String> {
    runner()
        .run(&(normalized_series(), 1i64..5), |(a, b)| {
            let root = a.pow_rational(1, b).unwrap();
            agree(&root.pow(b).unwrap(), &a)?;
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn substitution_chain_rule() -> Result<(), String> {
    runner()
        .run(&(any_series(), 1i64..5), |(a, j)| {
            let lhs = a.substitute_power(j).theta();
            let rhs = a.theta().substitute_power(j).scale_rational(&int(j));
            agree(&lhs, &rhs)?;
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn substitution_is_a_ring_map() -> Result<(), String> {
    runner()
        .run(&(any_series(), any_series(), 1i64..4), |(a, b, j)| {
            agree(&(&a * &b).substitute_power(j), &(&a.substitute_power(j) * &b.substitute_power(j)))?;
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn reduction_preserves_the_series() -> Result<(), String> {
    runner()
        .run(&(any_series(), 1i64..4), |(a, t)| {
            let wide = a.with_denom(a.denom() * t);
            agree(&wide.reduced(), &a)?;
            prop_assert!(wide.reduced().denom() <= a.denom());
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn zero_test_finds_the_planted_term() -> Result<(), String> {
    runner()
        .run(&(0i64..40, 1i64..4, small_rational()), |(k, d, c)| {
            if c.is_zero() {
                return Ok(());
            }
            let z = QSeries::zero(Ring::Rational, d, 50 * d);
            let m = QSeries::monomial(RingElement::Rational(c.clone()), k, d, 50 * d).unwrap();
            let s = &z + &m;
            let t = s.is_zero_below(&int(50)).unwrap();
            prop_assert_eq!(t, ZeroTest::NonZero { exponent: rat(k, d), coefficient: RingElement::Rational(c) });
            prop_assert!(s.is_zero_below(&rat(k, d)).unwrap().is_zero());
            prop_assert!(s.is_zero_below(&int(51)).is_err());
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn cyclotomic_field_axioms() -> Result<(), String> {
    runner()
        .run(&(three_elements(),), |((a, b, c),)| {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            let one = CycElement::one(a.field());
            prop_assert_eq!(&a * &one, a.clone());
            if !a.is_zero() {
                prop_assert_eq!(&a * &a.inv().unwrap(), one.clone());
                prop_assert_eq!(b.div(&a).unwrap() * a.clone(), b.clone());
            }
            let m = a.level() as i64;
            prop_assert_eq!(CycElement::zeta_pow(a.field(), m), one);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn pythagorean_identity() -> Result<(), String> {
    runner()
        .run(&(prop_oneof![Just(4i64), Just(12), Just(20), Just(28), Just(24)], -30i64..30, 0usize..8), |(level, num, pick)| {
            let dens: Vec<i64> = (1..=level / 2).filter(|d| level % (2 * d) == 0).collect();
            let den = dens[pick % dens.len()];
            let f = CycField::new(level as u32);
            let s = trig_value(TrigKind::Sin, num, den, &f).unwrap();
            let c = trig_value(TrigKind::Cos, num, den, &f).unwrap();
            prop_assert_eq!(&(&s * &s) + &(&c * &c), CycElement::one(&f));
            let s2 = trig_value(TrigKind::Sin, 2 * num, den, &f).unwrap();
            prop_assert_eq!((&s * &c).scale(&int(2)), s2);
            if !s.is_zero() {
                let cot = trig_value(TrigKind::Cot, num, den, &f).unwrap();
                let csc = trig_value(TrigKind::Csc, num, den, &f).unwrap();
                prop_assert_eq!(&(&csc * &csc) - &(&cot * &cot), CycElement::one(&f));
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub const ALL: &[(&str, fn() -> Result<(), String>)] = &[
    ("addition_is_commutative_and_associative", addition_is_commutative_and_associative),
    ("multiplication_is_commutative_associative_distributive", multiplication_is_commutative_associative_distributive),
    ("one_is_neutral", one_is_neutral),
    ("leibniz_rule", leibniz_rule),
    ("power_laws", power_laws),
    ("inverse_round_trip", inverse_round_trip),
    ("rational_root_round_trip", rational_root_round_trip),
    ("substitution_chain_rule", substitution_chain_rule),
    ("substitution_is_a_ring_map", substitution_is_a_ring_map),
    ("reduction_preserves_the_series", reduction_preserves_the_series),
    ("zero_test_finds_the_planted_term", zero_test_finds_the_planted_term),
    ("cyclotomic_field_axioms", cyclotomic_field_axioms),
    ("pythagorean_identity", pythagorean_identity),
];
