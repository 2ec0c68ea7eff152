use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rumin_core::identities::expressions::{defect, sides, slicing_expression, theta_normal_form};
use rumin_core::identities::report::{to_json, to_latex, to_text};
use rumin_core::identities::{
    check, check_class_invariance_with, check_h1_coefficients, check_with, generic_form,
    h1_term_comparison, IdentityError, IdentityId, Inputs, Perturbation, Status, Verdict,
};
use rumin_core::numeric::{bind_and_eval, Bindings, CoordinateModel, PolynomialFunction};
use rumin_core::{ConventionProfile, Form, HeisenbergContext, ScalarExpr};

fn ctx(n: usize) -> HeisenbergContext {
    HeisenbergContext::new(n, ConventionProfile::default()).unwrap()
}

#[test]
fn defect_formula_holds_for_n_up_to_3() {
    for n in 1..=3 {
        let report = check(IdentityId::DefectFormula, n).unwrap();
        assert_eq!(report.status, Status::Verified, "n = {n}");
        assert!(report.difference.is_zero());
    }
}

#[test]
fn odd_dimensions_verify_the_slicing_chain() {
    for id in [
        IdentityId::JMembership,
        IdentityId::VerticalRewrite,
        IdentityId::ThetaNormalForm,
    ] {
        for n in [1, 3] {
            let report = check(id, n).unwrap();
            assert_eq!(report.status, Status::Verified, "{id} n = {n}");
        }
    }
}

#[test]
fn even_dimension_failures_are_sign_audited() {
    for id in [
        IdentityId::JMembership,
        IdentityId::VerticalRewrite,
        IdentityId::ThetaNormalForm,
    ] {
        let report = check(id, 2).unwrap();
        assert_eq!(report.status, Status::Failed, "{id}");
        assert_eq!(report.profiles_tried.len(), 2, "both profiles are searched");
        assert!(!report.difference.is_zero());
        assert!(
            report
                .divergent_lines()
                .any(|l| matches!(l.verdict, Verdict::SignMismatch { .. })),
            "{id}: the audit must locate a sign divergence"
        );
    }
}

#[test]
fn zero_form_gives_zero_sides() {
    for n in 1..=2 {
        let c = ctx(n);
        let g = ScalarExpr::symbol("g");
        let zero = Form::zero(n, n);
        for id in [
            IdentityId::DefectFormula,
            IdentityId::VerticalRewrite,
            IdentityId::ThetaNormalForm,
        ] {
            let s = sides(id, &c, &g, &zero).unwrap();
            assert!(s.lhs.is_zero(), "{id}");
            assert!(s.rhs.is_none_or(|r| r.is_zero()), "{id}");
        }
    }
}

#[test]
fn constant_function_has_no_defect() {
    for n in 1..=3 {
        let c = ctx(n);
        let g = ScalarExpr::integer(5);
        let omega = generic_form(n, n, "w", false);
        assert!(defect(&c, &g, &omega).unwrap().is_zero(), "n = {n}");
        assert!(
            slicing_expression(&c, &g, &omega).unwrap().is_zero(),
            "n = {n}"
        );
    }
}

#[test]
fn horizontal_forms_specialize_the_chain() {
    for n in [1, 3] {
        let inputs = Inputs {
            g: ScalarExpr::symbol("g"),
            omega: generic_form(n, n, "w", true),
        };
        for id in [IdentityId::VerticalRewrite, IdentityId::ThetaNormalForm] {
            assert_eq!(
                check_with(id, &inputs).unwrap().status,
                Status::Verified,
                "{id} n = {n}"
            );
        }
    }
}

#[test]
fn membership_and_rewrite_share_the_slicing_expression() {
    for n in 1..=2 {
        let c = ctx(n);
        let inputs = Inputs::generic(n);
        let membership = sides(IdentityId::JMembership, &c, &inputs.g, &inputs.omega).unwrap();
        let rewrite = sides(IdentityId::VerticalRewrite, &c, &inputs.g, &inputs.omega).unwrap();
        assert_eq!(membership.lhs, rewrite.lhs);
    }
}

#[test]
fn h1_divergence_is_confined_to_the_first_component() {
    let report = check_h1_coefficients().unwrap();
    assert_eq!(report.status, Status::Verified);
    let c = ctx(1);
    let inputs = Inputs::h1();
    let terms = h1_term_comparison(&c, &inputs.g, &inputs.omega).unwrap();
    assert_eq!(terms.len(), 6);
    for t in &terms {
        let expect_flip = t.component == 1;
        assert_eq!(
            matches!(t.verdict, Verdict::SignMismatch { .. }),
            expect_flip,
            "{} {}",
            t.monomial,
            t.name
        );
        assert!(!matches!(t.verdict, Verdict::Mismatch));
    }
    let first = report
        .line_audit
        .iter()
        .find(|l| l.label == "first component")
        .unwrap();
    assert!(matches!(first.verdict, Verdict::SignMismatch { .. }));
    let second = report
        .line_audit
        .iter()
        .find(|l| l.label == "second component")
        .unwrap();
    assert!(second.verdict.is_match());
}

#[test]
fn h1_specialization_with_g_depending_on_x_alone() {
    // ω = ω1 dx, g = g(x): Yg = Tg = 0 and the display reduces to
    // dx∧θ: -Yω1 Xg, dy∧θ: 0.
    let c = ctx(1);
    let model = CoordinateModel::new(1, ConventionProfile::default());
    let omega = Form::term(1, ScalarExpr::symbol("w1"), &[1]);
    let normal = theta_normal_form(&c, &ScalarExpr::symbol("g"), &omega).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let g = lift_x(&PolynomialFunction::random(1, 3, &mut rng));
        let w1 = PolynomialFunction::random(3, 3, &mut rng);
        let bindings: Bindings =
            [("g".to_string(), g.clone()), ("w1".to_string(), w1.clone())].into();
        let point: Vec<BigRational> = [(1, 2), (-3, 1), (2, 3)]
            .iter()
            .map(|&(p, q)| BigRational::new(p.into(), q.into()))
            .collect();
        let dx_theta =
            bind_and_eval(&normal.coefficient_of(&[1, 3]), &bindings, &model, &point).unwrap();
        let dy_theta =
            bind_and_eval(&normal.coefficient_of(&[2, 3]), &bindings, &model, &point).unwrap();
        let expected = -(model.apply(2, &w1).eval(&point) * model.apply(1, &g).eval(&point));
        assert_eq!(dx_theta, expected);
        assert_eq!(dy_theta, BigRational::from_integer(0.into()));
    }
}

/// A polynomial in one variable reread as a polynomial in `x` on `R^3`.
fn lift_x(p: &PolynomialFunction) -> PolynomialFunction {
    p.terms()
        .fold(PolynomialFunction::zero(3), |acc, (exps, c)| {
            acc.add(&PolynomialFunction::monomial(
                3,
                &[exps[0], 0, 0],
                c.clone(),
            ))
        })
}

#[test]
fn class_invariance_is_exploratory() {
    let unchanged = check_class_invariance_with(1, Perturbation::None).unwrap();
    assert!(unchanged.exploratory);
    assert!(unchanged.difference.is_zero());
    let report = check_class_invariance_with(1, Perturbation::Theta).unwrap();
    assert!(report.exploratory && report.passed());
}

#[test]
fn unsupported_dimensions_are_errors() {
    assert!(matches!(
        check(IdentityId::DefectFormula, 4),
        Err(IdentityError::UnsupportedDimension { .. })
    ));
    assert!(matches!(
        check(IdentityId::H1Coefficients, 2),
        Err(IdentityError::UnsupportedDimension { .. })
    ));
    assert!(matches!(
        check(IdentityId::ClassInvariance, 3),
        Err(IdentityError::UnsupportedDimension { .. })
    ));
    assert!("lemma-9.99".parse::<IdentityId>().is_err());
}

#[test]
fn reports_are_deterministic() {
    let strip = |mut v: serde_json::Value| {
        v.as_object_mut().unwrap().remove("wall_time");
        v
    };
    let a = strip(to_json(
        &check(IdentityId::ThetaNormalForm, 2).unwrap(),
        Some(1),
    ));
    let b = strip(to_json(
        &check(IdentityId::ThetaNormalForm, 2).unwrap(),
        Some(1),
    ));
    assert_eq!(a, b);
    assert_eq!(a["status"], "failed");
    assert_eq!(a["identity"], "final-rewrite-3.5");
}

#[test]
fn text_and_latex_reports() {
    let report = check(IdentityId::DefectFormula, 1).unwrap();
    let text = to_text(&report);
    assert!(text.contains("status: verified"), "{text}");
    assert!(text.contains("difference: 0"), "{text}");
    let latex = to_latex(&report);
    assert!(latex.contains(r"\text{lhs} - \text{rhs} &= 0"), "{latex}");
}
