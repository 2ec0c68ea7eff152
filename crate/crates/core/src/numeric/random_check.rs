use std::time::{Duration, Instant};

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::calculus::{ConventionProfile, HeisenbergContext};
use crate::exterior::Form;
use crate::identities::expressions::{residuals_of, sides};
use crate::identities::{IdentityError, IdentityId, Inputs};
use crate::scalar::{FunctionSymbol, ScalarExpr};

use super::eval::{resolve, Bindings, Evaluator};
use super::jet::{Jet, JetFrame};
use super::model::CoordinateModel;
use super::poly::PolynomialFunction;
use super::NumericError;

/// Every identity differentiates its inputs at most twice.
const JET_ORDER: u32 = 2;
const BINDING_DEGREE: u32 = 3;

#[derive(Debug, Clone, Copy)]
pub struct RandomCheckOptions {
    pub trials: usize,
    pub seed: u64,
    /// Shift the rhs by `g` times a horizontal monomial.
    pub corrupt: bool,
    /// Bind every symbol to the zero polynomial.
    pub zero_bindings: bool,
    /// Also evaluate the symbolic lhs at each point and compare.
    pub cross_check: bool,
}

impl RandomCheckOptions {
    pub fn new(trials: usize, seed: u64) -> Self {
        RandomCheckOptions {
            trials,
            seed,
            corrupt: false,
            zero_bindings: false,
            cross_check: true,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RandomCheckReport {
    pub identity: IdentityId,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub corrupted: bool,
    /// Trials whose residual was nonzero at the sampled point.
    pub violations: usize,
    /// Trials where the symbolic lhs and the coordinate lhs disagreed.
    pub cross_check_mismatches: usize,
    #[serde(skip)]
    pub wall_time: Duration,
}

/// A per-trial seed that depends only on the master seed and the index.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    let mut z = seed.wrapping_add((trial as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn random_point<R: Rng>(vars: usize, rng: &mut R) -> Vec<BigRational> {
    (0..vars)
        .map(|_| {
            BigRational::new(
                rng.gen_range(-12i64..=12).into(),
                rng.gen_range(1i64..=4).into(),
            )
        })
        .collect()
}

fn symbol_names(inputs: &Inputs) -> Vec<String> {
    let mut names: Vec<String> = inputs.g.symbols().into_iter().map(|s| s.name()).collect();
    for (_, c) in inputs.omega.terms() {
        for s in c.symbols() {
            if let FunctionSymbol::Abstract(_) = s {
                names.push(s.name());
            }
        }
    }
    names.sort();
    names.dedup();
    names
}

fn inputs_for(id: IdentityId, n: usize) -> Result<Inputs, NumericError> {
    let range = id.dimensions();
    if id == IdentityId::ClassInvariance || !range.contains(&n) {
        return Err(IdentityError::UnsupportedDimension {
            identity: id,
            n,
            min: *range.start(),
            max: *range.end(),
        }
        .into());
    }
    Ok(if id == IdentityId::H1Coefficients {
        Inputs::h1()
    } else {
        Inputs::generic(n)
    })
}

/// The jet of a symbolic scalar: bound symbols become jets of their
/// polynomials and derivative words act through the coordinate frame.
fn to_jet(
    e: &ScalarExpr,
    frame: &JetFrame,
    model: &CoordinateModel,
    bindings: &Bindings,
    point: &[BigRational],
) -> Result<Jet, NumericError> {
    use crate::calculus::Frame;
    use crate::exterior::Coefficient;
    let mut total = Jet::zero();
    for (product, coef) in e.terms() {
        let mut term = Jet::from_rational(coef.clone());
        for factor in product.factors() {
            let poly = resolve(model, bindings, &factor.symbol)?;
            let mut jet = Jet::of(&poly, point, JET_ORDER);
            for letter in factor.word.letters() {
                jet = frame.derive(letter.frame_index(model.n()), &jet);
            }
            term = term.mul(&jet);
        }
        total = total.add(&term);
    }
    Ok(total)
}

fn form_to_jet(
    f: &Form,
    frame: &JetFrame,
    model: &CoordinateModel,
    bindings: &Bindings,
    point: &[BigRational],
) -> Result<Form<Jet>, NumericError> {
    let mut terms = Vec::new();
    for (m, c) in f.terms() {
        terms.push((*m, to_jet(c, frame, model, bindings, point)?));
    }
    Ok(Form::from_terms(f.n(), f.degree(), terms))
}

fn jet_value(j: &Jet) -> Result<BigRational, NumericError> {
    j.value().ok_or(NumericError::JetOrderExhausted)
}

/// Binds the generic symbols of `id` to random polynomials of degree at most
/// three and evaluates the identity's residual exactly at random rational
/// points through the coordinate model. The symbolic engine is used only
/// for the optional cross-check of the lhs.
pub fn random_identity_check(
    id: IdentityId,
    n: usize,
    options: RandomCheckOptions,
) -> Result<RandomCheckReport, NumericError> {
    let start = Instant::now();
    let inputs = inputs_for(id, n)?;
    let convention = ConventionProfile::default();
    let ctx = HeisenbergContext::new(n, convention)?;
    let model = CoordinateModel::new(n, convention);
    let names = symbol_names(&inputs);
    let symbolic_lhs = if options.cross_check {
        Some(sides(id, &ctx, &inputs.g, &inputs.omega)?.lhs)
    } else {
        None
    };

    let mut violations = 0;
    let mut mismatches = 0;
    for trial in 0..options.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(options.seed, trial));
        let bindings: Bindings = names
            .iter()
            .map(|name| {
                let poly = if options.zero_bindings {
                    PolynomialFunction::zero(model.vars())
                } else {
                    PolynomialFunction::random(model.vars(), BINDING_DEGREE, &mut rng)
                };
                (name.clone(), poly)
            })
            .collect();
        let point = random_point(model.vars(), &mut rng);
        let frame = JetFrame::new(model, &point, JET_ORDER);
        let jet_ctx = ctx.with_frame(frame.clone());
        let g = to_jet(&inputs.g, &frame, &model, &bindings, &point)?;
        let omega = form_to_jet(&inputs.omega, &frame, &model, &bindings, &point)?;

        let jet_sides = sides(id, &jet_ctx, &g, &omega)?;
        let mut violated = false;
        for r in residuals_of(&jet_sides, &jet_ctx, &g, options.corrupt) {
            for (_, c) in r.terms() {
                if !num_traits::Zero::is_zero(&jet_value(c)?) {
                    violated = true;
                }
            }
        }
        violations += usize::from(violated);

        if let Some(lhs) = &symbolic_lhs {
            let mut evaluator = Evaluator::new(&model, &bindings, &point);
            let mut differs = false;
            let monomials: std::collections::BTreeSet<_> = lhs
                .terms()
                .map(|(m, _)| *m)
                .chain(jet_sides.lhs.terms().map(|(m, _)| *m))
                .collect();
            for m in monomials {
                let symbolic = evaluator.eval(&lhs.coefficient(m))?;
                let coordinate = match jet_sides.lhs.terms().find(|(k, _)| **k == m) {
                    Some((_, c)) => jet_value(c)?,
                    None => num_traits::Zero::zero(),
                };
                differs |= symbolic != coordinate;
            }
            mismatches += usize::from(differs);
        }
    }
    Ok(RandomCheckReport {
        identity: id,
        n,
        trials: options.trials,
        seed: options.seed,
        corrupted: options.corrupt,
        violations,
        cross_check_mismatches: mismatches,
        wall_time: start.elapsed(),
    })
}
