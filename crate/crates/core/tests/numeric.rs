mod common;

use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rumin_core::dsl::parse_scalar;
use rumin_core::identities::IdentityId;
use rumin_core::numeric::*;
use rumin_core::scalar::ScalarAlgebra;
use rumin_core::ConventionProfile;

fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(p.into(), d.into())
}

fn model(n: usize) -> CoordinateModel {
    CoordinateModel::new(n, ConventionProfile::default())
}

fn random_point(vars: usize, rng: &mut ChaCha8Rng) -> Vec<BigRational> {
    (0..vars)
        .map(|_| q(rng.gen_range(-9..=9), rng.gen_range(1..=5)))
        .collect()
}

fn bind(name: &str, p: PolynomialFunction) -> Bindings {
    [(name.to_string(), p)].into()
}

#[test]
fn vertical_field_on_the_vertical_coordinate() {
    let m = model(1);
    let t = PolynomialFunction::variable(3, 2);
    let e = parse_scalar("T(f)", &ScalarAlgebra::new(1)).unwrap();
    let p = [q(3, 1), q(-7, 2), q(1, 5)];
    assert_eq!(
        bind_and_eval(&e, &bind("f", t.clone()), &m, &p).unwrap(),
        BigRational::one()
    );
    let e = parse_scalar("X1(f)", &ScalarAlgebra::new(1)).unwrap();
    assert_eq!(bind_and_eval(&e, &bind("f", t), &m, &p).unwrap(), q(7, 4));
}

#[test]
fn bracket_of_the_coordinate_fields() {
    let e = parse_scalar("X1(Y1(f)) - Y1(X1(f)) - T(f)", &ScalarAlgebra::new(1)).unwrap();
    // The parser normalizes, so evaluate the raw commutator through the model too.
    assert!(e.is_zero());
    let m = model(2);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let f = PolynomialFunction::random(5, 3, &mut rng);
        let p = random_point(5, &mut rng);
        for j in 1..=2 {
            let xy = m.apply(j, &m.apply(j + 2, &f));
            let yx = m.apply(j + 2, &m.apply(j, &f));
            assert_eq!(xy.sub(&yx).eval(&p), m.apply(5, &f).eval(&p));
        }
    }
}

#[test]
fn coordinate_symbols_bind_automatically() {
    let e = parse_scalar("x1*y1 + X1(t)", &ScalarAlgebra::new(1)).unwrap();
    let p = [q(2, 1), q(3, 1), q(0, 1)];
    assert_eq!(
        bind_and_eval(&e, &Bindings::new(), &model(1), &p).unwrap(),
        q(6, 1) - q(3, 2)
    );
}

#[test]
fn unbound_symbols_are_reported() {
    let e = parse_scalar("X1(f)*g", &ScalarAlgebra::new(1)).unwrap();
    let bindings = bind("f", PolynomialFunction::variable(3, 0));
    let err = bind_and_eval(&e, &bindings, &model(1), &[q(0, 1), q(0, 1), q(0, 1)]).unwrap_err();
    assert!(matches!(err, NumericError::Unbound(name) if name == "g"));
}

#[test]
fn coframe_is_dual_to_the_frame() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in 1..=3 {
        let m = model(n);
        for _ in 0..10 {
            let p = random_point(m.vars(), &mut rng);
            for k in 1..=m.vars() {
                for j in 1..=m.vars() {
                    let expected = if k == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    };
                    assert_eq!(m.pairing(k, j, &p), expected);
                }
            }
        }
    }
}

#[test]
fn contact_form_differential_matches_the_default_profile() {
    let m = model(2);
    let p = [q(1, 2), q(-1, 3), q(2, 1), q(5, 4), q(7, 1)];
    for a in 1..=5 {
        for b in 1..=5 {
            let expected = match (a, b) {
                (1, 3) | (2, 4) => -BigRational::one(),
                (3, 1) | (4, 2) => BigRational::one(),
                _ => BigRational::zero(),
            };
            assert_eq!(m.dtheta_on(a, b, &p), expected, "dθ(W{a}, W{b})");
        }
    }
}

#[test]
fn finite_differences_agree_with_exact_derivatives() {
    let m = model(1);
    let e = parse_scalar("f", &ScalarAlgebra::new(1)).unwrap();
    let x2t = PolynomialFunction::monomial(3, &[2, 0, 1], BigRational::one());
    let dev = finite_diff_check(&e, &bind("f", x2t), &m, &[0.7, -0.4, 1.3], 1e-5).unwrap();
    assert!(dev <= 1e-6, "deviation {dev}");

    let t = PolynomialFunction::variable(3, 2);
    assert!(finite_diff_check(&e, &bind("f", t), &m, &[0.7, -0.4, 1.3], 1e-5).unwrap() < 1e-9);

    let constant = PolynomialFunction::constant(3, q(3, 2));
    assert_eq!(
        finite_diff_check(&e, &bind("f", constant), &m, &[0.7, -0.4, 1.3], 1e-5).unwrap(),
        0.0
    );
    assert!(matches!(
        finite_diff_check(&e, &Bindings::new(), &m, &[0.0; 3], 0.0),
        Err(NumericError::InvalidStep(_))
    ));
}

#[test]
fn finite_differences_converge() {
    let m = model(1);
    let e = parse_scalar("f", &ScalarAlgebra::new(1)).unwrap();
    let cubic = PolynomialFunction::monomial(3, &[3, 0, 0], q(2, 1))
        .add(&PolynomialFunction::monomial(3, &[0, 2, 1], q(-1, 1)))
        .add(&PolynomialFunction::monomial(3, &[1, 1, 1], q(1, 3)));
    let b = bind("f", cubic);
    let devs: Vec<f64> = [1e-3, 1e-4, 1e-5]
        .iter()
        .map(|&h| finite_diff_check(&e, &b, &m, &[0.9, -1.1, 0.4], h).unwrap())
        .collect();
    assert!(devs[0] > devs[1] && devs[1] > devs[2], "{devs:?}");
}

#[test]
fn random_check_agrees_with_the_symbolic_verdicts() {
    let report = random_identity_check(
        IdentityId::DefectFormula,
        1,
        RandomCheckOptions::new(100, 3),
    )
    .unwrap();
    assert_eq!(report.violations, 0);
    assert_eq!(report.cross_check_mismatches, 0);

    let mut zero = RandomCheckOptions::new(10, 3);
    zero.zero_bindings = true;
    assert_eq!(
        random_identity_check(IdentityId::ThetaNormalForm, 2, zero)
            .unwrap()
            .violations,
        0
    );

    let mut corrupt = RandomCheckOptions::new(20, 3);
    corrupt.corrupt = true;
    assert_eq!(
        random_identity_check(IdentityId::H1Coefficients, 1, corrupt)
            .unwrap()
            .violations,
        20
    );

    let failing = random_identity_check(
        IdentityId::VerticalRewrite,
        2,
        RandomCheckOptions::new(10, 3),
    )
    .unwrap();
    assert_eq!(
        failing.violations, 10,
        "the coordinate path sees the even-dimension failure too"
    );
    assert_eq!(failing.cross_check_mismatches, 0);
}

#[test]
fn random_check_is_reproducible() {
    let mut o = RandomCheckOptions::new(10, 99);
    o.corrupt = true;
    let a = random_identity_check(IdentityId::JMembership, 1, o).unwrap();
    let b = random_identity_check(IdentityId::JMembership, 1, o).unwrap();
    assert_eq!(
        (a.violations, a.cross_check_mismatches),
        (b.violations, b.cross_check_mismatches)
    );
    assert_ne!(trial_seed(99, 0), trial_seed(99, 1));
    assert!(random_identity_check(IdentityId::ClassInvariance, 1, o).is_err());
}

#[test]
fn gamma_branches() {
    assert_eq!(gamma_h(1.0, 1.0, 0.5).unwrap(), 0.0);
    assert_eq!(gamma_h(1.5, 1.0, 0.5).unwrap(), 1.0);
    assert_eq!(gamma_h(1.25, 1.0, 0.5).unwrap(), 0.5);
    assert!(matches!(
        gamma_h(0.0, 0.0, -1.0),
        Err(NumericError::NonPositiveWidth(_))
    ));
    assert_eq!(gamma_h_closed_form(1.25, 1.0, 0.5).unwrap(), 0.5);
}

#[test]
fn ramp_support_and_slope() {
    let profile = SlicingProfile::new(0.0, 1.0, 0.125).unwrap();
    assert_eq!(profile.ramp(0.0), 0.0);
    assert_eq!(profile.ramp(-3.0), 0.0);
    assert_eq!(profile.ramp(1.0), 1.0);
    assert_eq!(profile.ramp(4.0), 1.0);
    assert!((profile.ramp(0.5) - 0.5).abs() < 1e-15);
    let lip = lipschitz_estimate(|s| profile.ramp(s), (-0.5, 1.5), 20_001, 1);
    assert!((lip / profile.inner_slope() - 1.0).abs() < 1e-3, "{lip}");
    assert!(matches!(
        SlicingProfile::new(0.0, 1.0, 0.6),
        Err(NumericError::EpsOutOfRange { .. })
    ));
}

#[test]
fn constant_functions_have_zero_lipschitz_estimate() {
    assert_eq!(lipschitz_estimate(|_| 3.0, (0.0, 1.0), 100, 0), 0.0);
}

fn slicing_profile() -> impl Strategy<Value = SlicingProfile> {
    (-2.0f64..2.0, 0.1f64..3.0, 0.01f64..0.49)
        .prop_map(|(t, h, frac)| SlicingProfile::new(t, h, frac * h).unwrap())
}

proptest! {
    #![proptest_config(common::config(256))]

    #[test]
    fn gamma_is_monotone_and_lipschitz(p in slicing_profile(), a in -5.0f64..5.0, b in -5.0f64..5.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(p.gamma(lo) <= p.gamma(hi));
        prop_assert!((p.gamma(a) - p.gamma(b)).abs() <= (a - b).abs() / p.h() + 1e-12);
    }

    #[test]
    fn ramp_derivative_is_supported_in_the_strip(p in slicing_profile(), s in -5.0f64..5.0) {
        let d = p.ramp_derivative(s);
        if s <= p.t() || s >= p.t() + p.h() {
            prop_assert_eq!(d, 0.0);
        } else {
            prop_assert!(d >= 0.0);
        }
    }

    #[test]
    fn ramp_stays_close_to_gamma(p in slicing_profile(), s in -5.0f64..5.0) {
        prop_assert!((p.ramp(s) - p.gamma(s)).abs() <= 2.0 * p.eps() / p.h() + 1e-12);
    }

    #[test]
    fn ramp_derivative_matches_difference_quotients(p in slicing_profile(), u in 0.01f64..0.99) {
        let s = p.t() + u * p.h();
        let step = 1e-6 * p.h();
        let fd = (p.ramp(s + step) - p.ramp(s - step)) / (2.0 * step);
        prop_assert!((fd - p.ramp_derivative(s)).abs() <= 1e-5 * p.inner_slope(), "{} vs {}", fd, p.ramp_derivative(s));
    }
}
