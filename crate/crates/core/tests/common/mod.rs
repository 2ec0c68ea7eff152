#![allow(dead_code)]

use num_rational::BigRational;
use proptest::prelude::*;
use rumin_core::exterior::Monomial;
use rumin_core::scalar::{Factor, ScalarAlgebra};
use rumin_core::{DerivativeWord, Form, FunctionSymbol, Letter, ScalarExpr};

pub const SYMBOLS: [&str; 3] = ["f", "g", "u"];

pub fn letter(n: usize) -> impl Strategy<Value = Letter> {
    (1..=2 * n + 1).prop_map(move |i| Letter::from_frame_index(i, n).unwrap())
}

pub fn rational() -> impl Strategy<Value = BigRational> {
    (-5i64..=5, 1i64..=3).prop_map(|(p, q)| BigRational::new(p.into(), q.into()))
}

/// A factor with an arbitrary, possibly non-canonical word.
pub fn factor(n: usize) -> impl Strategy<Value = Factor> {
    (
        prop::sample::select(&SYMBOLS[..]),
        prop::collection::vec(letter(n), 0..=3),
    )
        .prop_map(|(s, letters)| {
            Factor::new(
                FunctionSymbol::new(s),
                DerivativeWord::from_letters(letters),
            )
        })
}

/// A raw (unnormalized) scalar expression.
pub fn raw_scalar(n: usize) -> impl Strategy<Value = ScalarExpr> {
    prop::collection::vec((rational(), prop::collection::vec(factor(n), 0..=2)), 0..=3)
        .prop_map(ScalarExpr::from_terms)
}

pub fn scalar(n: usize) -> impl Strategy<Value = ScalarExpr> {
    raw_scalar(n).prop_map(move |e| ScalarAlgebra::new(n).normalize(&e))
}

/// A form of the given degree with normalized coefficients on a random
/// subset of monomials.
pub fn form(n: usize, degree: usize) -> impl Strategy<Value = Form> {
    let basis = Monomial::basis(2 * n + 1, degree);
    let len = basis.len();
    prop::collection::vec(prop::option::weighted(0.4, scalar(n)), len).prop_map(move |coeffs| {
        Form::from_terms(
            n,
            degree,
            basis
                .iter()
                .zip(coeffs)
                .filter_map(|(m, c)| c.map(|c| (*m, c))),
        )
    })
}

pub fn form_any_degree(n: usize) -> impl Strategy<Value = Form> {
    (0..=2 * n + 1).prop_flat_map(move |k| form(n, k))
}

/// Regression files are looked up next to a lib.rs, which integration
/// tests do not have.
pub fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}
