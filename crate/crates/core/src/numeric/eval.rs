use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::Zero;

use crate::scalar::{Factor, FunctionSymbol, ScalarExpr};

use super::model::CoordinateModel;
use super::poly::PolynomialFunction;
use super::NumericError;

/// Polynomials bound to abstract function symbols by name.
pub type Bindings = BTreeMap<String, PolynomialFunction>;

/// Evaluates scalar expressions at one point, caching each derivative of
/// each bound symbol.
pub struct Evaluator<'a> {
    model: &'a CoordinateModel,
    bindings: &'a Bindings,
    point: &'a [BigRational],
    cache: HashMap<Factor, BigRational>,
}

impl<'a> Evaluator<'a> {
    pub fn new(
        model: &'a CoordinateModel,
        bindings: &'a Bindings,
        point: &'a [BigRational],
    ) -> Self {
        assert_eq!(point.len(), model.vars(), "point has the wrong dimension");
        Evaluator {
            model,
            bindings,
            point,
            cache: HashMap::new(),
        }
    }

    fn factor(&mut self, factor: &Factor) -> Result<BigRational, NumericError> {
        if let Some(v) = self.cache.get(factor) {
            return Ok(v.clone());
        }
        let poly = resolve(self.model, self.bindings, &factor.symbol)?;
        let value = self.model.apply_word(&factor.word, &poly).eval(self.point);
        self.cache.insert(factor.clone(), value.clone());
        Ok(value)
    }

    pub fn eval(&mut self, e: &ScalarExpr) -> Result<BigRational, NumericError> {
        let mut total = BigRational::zero();
        for (product, coef) in e.terms() {
            let mut term = coef.clone();
            for f in product.factors() {
                term *= self.factor(f)?;
                if term.is_zero() {
                    break;
                }
            }
            total += term;
        }
        Ok(total)
    }
}

/// The polynomial behind a symbol; coordinates are bound automatically.
pub fn resolve(
    model: &CoordinateModel,
    bindings: &Bindings,
    symbol: &FunctionSymbol,
) -> Result<PolynomialFunction, NumericError> {
    match symbol {
        FunctionSymbol::Abstract(name) => bindings
            .get(name.as_ref())
            .cloned()
            .ok_or_else(|| NumericError::Unbound(name.to_string())),
        FunctionSymbol::Coordinate(c) => model
            .coordinate(*c)
            .ok_or_else(|| NumericError::Unbound(symbol.to_string())),
    }
}

/// The polynomial denoted by an expression in the coordinate symbols, with
/// derivative words applied through the model. Abstract symbols are looked
/// up in `bindings`.
pub fn polynomial_of(
    e: &ScalarExpr,
    bindings: &Bindings,
    model: &CoordinateModel,
) -> Result<PolynomialFunction, NumericError> {
    let mut total = PolynomialFunction::zero(model.vars());
    for (product, coef) in e.terms() {
        let mut term = PolynomialFunction::constant(model.vars(), coef.clone());
        for f in product.factors() {
            term = term.mul(&model.apply_word(&f.word, &resolve(model, bindings, &f.symbol)?));
        }
        total = total.add(&term);
    }
    Ok(total)
}

/// Replaces every derivative word by the exact coordinate derivative of the
/// bound polynomial and evaluates at `point`.
pub fn bind_and_eval(
    e: &ScalarExpr,
    bindings: &Bindings,
    model: &CoordinateModel,
    point: &[BigRational],
) -> Result<BigRational, NumericError> {
    Evaluator::new(model, bindings, point).eval(e)
}

/// For every factor `w(f)` of `e` and every frame field `W`, compares the
/// exact `W(w(f))` with a central difference of `w(f)` along the field's
/// direction at `point`. Returns the worst deviation relative to
/// `max(1, |exact|)`.
pub fn finite_diff_check(
    e: &ScalarExpr,
    bindings: &Bindings,
    model: &CoordinateModel,
    point: &[f64],
    step: f64,
) -> Result<f64, NumericError> {
    if step.is_nan() || step <= 0.0 {
        return Err(NumericError::InvalidStep(step));
    }
    let mut worst: f64 = 0.0;
    for factor in e.factors() {
        let poly = model.apply_word(&factor.word, &resolve(model, bindings, &factor.symbol)?);
        for index in 1..=model.vars() {
            let exact = model.apply(index, &poly).eval_f64(point);
            let dir = model.field_at(index, point);
            let forward: Vec<f64> = point.iter().zip(&dir).map(|(p, d)| p + step * d).collect();
            let backward: Vec<f64> = point.iter().zip(&dir).map(|(p, d)| p - step * d).collect();
            let fd = (poly.eval_f64(&forward) - poly.eval_f64(&backward)) / (2.0 * step);
            worst = worst.max((exact - fd).abs() / exact.abs().max(1.0));
        }
    }
    Ok(worst)
}
