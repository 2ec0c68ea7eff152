use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::calculus::ConventionProfile;
use crate::scalar::{Coordinate, DerivativeWord};

use super::poly::PolynomialFunction;

/// The frame realized on `R^{2n+1}` with coordinates `(x, y, t)`:
/// `X_j = ∂x_j + (s/2) y_j ∂t`, `Y_j = ∂y_j - (s/2) x_j ∂t`, `T = ∂t`,
/// with dual contact form `θ = dt - (s/2) Σ (y_j dx_j - x_j dy_j)`, where
/// `s` is the sign of `dθ = s Σ dx_j ∧ dy_j`. For `s = -1` this is
/// `X_j = ∂x_j - (y_j/2) ∂t` and `[X_j, Y_j] = T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoordinateModel {
    n: usize,
    convention: ConventionProfile,
}

impl CoordinateModel {
    pub fn new(n: usize, convention: ConventionProfile) -> Self {
        assert!(
            (1..=4).contains(&n),
            "coordinate model supports 1 <= n <= 4"
        );
        CoordinateModel { n, convention }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn convention(&self) -> ConventionProfile {
        self.convention
    }

    pub fn vars(&self) -> usize {
        2 * self.n + 1
    }

    fn half_sign(&self) -> BigRational {
        BigRational::new(i64::from(self.convention.dtheta_sign()).into(), 2.into())
    }

    /// The coordinate function as a polynomial, if in range.
    pub fn coordinate(&self, c: Coordinate) -> Option<PolynomialFunction> {
        let var = match c {
            Coordinate::X(j) if (1..=self.n).contains(&(j as usize)) => j as usize - 1,
            Coordinate::Y(j) if (1..=self.n).contains(&(j as usize)) => self.n + j as usize - 1,
            Coordinate::T => 2 * self.n,
            _ => return None,
        };
        Some(PolynomialFunction::variable(self.vars(), var))
    }

    /// Components of `W_index` in the coordinate basis.
    pub fn field(&self, index: usize) -> Vec<PolynomialFunction> {
        let vars = self.vars();
        let n = self.n;
        assert!((1..=2 * n + 1).contains(&index), "frame index out of range");
        let mut comps = vec![PolynomialFunction::zero(vars); vars];
        comps[index - 1] = PolynomialFunction::constant(vars, BigRational::one());
        let half = self.half_sign();
        if index <= n {
            comps[2 * n] = PolynomialFunction::variable(vars, n + index - 1).scale(&half);
        } else if index <= 2 * n {
            comps[2 * n] = PolynomialFunction::variable(vars, index - n - 1).scale(&-half);
        }
        comps
    }

    /// Components of the coframe element `dw_index` in the coordinate basis.
    pub fn coframe(&self, index: usize) -> Vec<PolynomialFunction> {
        let vars = self.vars();
        let n = self.n;
        assert!(
            (1..=2 * n + 1).contains(&index),
            "coframe index out of range"
        );
        let mut comps = vec![PolynomialFunction::zero(vars); vars];
        if index <= 2 * n {
            comps[index - 1] = PolynomialFunction::constant(vars, BigRational::one());
            return comps;
        }
        let half = self.half_sign();
        for j in 0..n {
            comps[j] = PolynomialFunction::variable(vars, n + j).scale(&-half.clone());
            comps[n + j] = PolynomialFunction::variable(vars, j).scale(&half);
        }
        comps[2 * n] = PolynomialFunction::constant(vars, BigRational::one());
        comps
    }

    /// Applies a vector field given by its components.
    pub fn apply_components(
        components: &[PolynomialFunction],
        f: &PolynomialFunction,
    ) -> PolynomialFunction {
        let mut out = PolynomialFunction::zero(f.vars());
        for (v, c) in components.iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&c.mul(&f.partial(v)));
            }
        }
        out
    }

    /// `W_index f`.
    pub fn apply(&self, index: usize, f: &PolynomialFunction) -> PolynomialFunction {
        CoordinateModel::apply_components(&self.field(index), f)
    }

    /// Applies a derivative word, innermost letter first.
    pub fn apply_word(&self, word: &DerivativeWord, f: &PolynomialFunction) -> PolynomialFunction {
        word.letters().iter().fold(f.clone(), |acc, letter| {
            self.apply(letter.frame_index(self.n), &acc)
        })
    }

    /// `dw_k(W_j)` at a point.
    pub fn pairing(&self, k: usize, j: usize, point: &[BigRational]) -> BigRational {
        self.coframe(k)
            .iter()
            .zip(self.field(j))
            .map(|(a, b)| a.eval(point) * b.eval(point))
            .sum()
    }

    /// Components of `[W_a, W_b]`.
    pub fn bracket(&self, a: usize, b: usize) -> Vec<PolynomialFunction> {
        let va = self.field(a);
        let vb = self.field(b);
        (0..self.vars())
            .map(|c| {
                CoordinateModel::apply_components(&va, &vb[c])
                    .sub(&CoordinateModel::apply_components(&vb, &va[c]))
            })
            .collect()
    }

    /// `dθ(W_a, W_b)` at a point, from the coordinate exterior derivative
    /// of the contact form.
    pub fn dtheta_on(&self, a: usize, b: usize, point: &[BigRational]) -> BigRational {
        let theta = self.coframe(2 * self.n + 1);
        let va: Vec<BigRational> = self.field(a).iter().map(|c| c.eval(point)).collect();
        let vb: Vec<BigRational> = self.field(b).iter().map(|c| c.eval(point)).collect();
        let mut total = BigRational::zero();
        for u in 0..self.vars() {
            for v in (u + 1)..self.vars() {
                let c = theta[v].partial(u).sub(&theta[u].partial(v)).eval(point);
                if !c.is_zero() {
                    total += c * (&va[u] * &vb[v] - &va[v] * &vb[u]);
                }
            }
        }
        total
    }

    /// Components of `W_index` at a floating-point location.
    pub fn field_at(&self, index: usize, point: &[f64]) -> Vec<f64> {
        self.field(index)
            .iter()
            .map(|c| c.eval_f64(point))
            .collect()
    }
}
