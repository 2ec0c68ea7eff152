use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

const BITS: u32 = 7;
const MASK: u64 = (1 << BITS) - 1;
/// Packed exponents hold at most nine variables (`n <= 4`).
pub const MAX_VARS: usize = 9;

fn exponent(key: u64, var: usize) -> u32 {
    ((key >> (BITS * var as u32)) & MASK) as u32
}

fn unit(var: usize) -> u64 {
    1 << (BITS * var as u32)
}

fn total_degree(key: u64, vars: usize) -> u32 {
    (0..vars).map(|v| exponent(key, v)).sum()
}

/// A polynomial in `vars` variables with rational coefficients. Variables
/// are ordered `x_1..x_n, y_1..y_n, t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolynomialFunction {
    vars: usize,
    terms: BTreeMap<u64, BigRational>,
}

impl PolynomialFunction {
    pub fn zero(vars: usize) -> Self {
        assert!(vars <= MAX_VARS, "at most {MAX_VARS} variables");
        PolynomialFunction {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: usize, c: BigRational) -> Self {
        let mut p = PolynomialFunction::zero(vars);
        if !c.is_zero() {
            p.terms.insert(0, c);
        }
        p
    }

    pub fn variable(vars: usize, var: usize) -> Self {
        assert!(var < vars, "variable out of range");
        let mut p = PolynomialFunction::zero(vars);
        p.terms.insert(unit(var), BigRational::one());
        p
    }

    /// `coefficient * Π x_v^{e_v}`.
    pub fn monomial(vars: usize, exponents: &[u32], coefficient: BigRational) -> Self {
        assert_eq!(exponents.len(), vars);
        let key = exponents.iter().enumerate().fold(0u64, |k, (v, &e)| {
            assert!(u64::from(e) <= MASK, "exponent too large");
            k + u64::from(e) * unit(v)
        });
        let mut p = PolynomialFunction::zero(vars);
        if !coefficient.is_zero() {
            p.terms.insert(key, coefficient);
        }
        p
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|&k| total_degree(k, self.vars))
            .max()
            .unwrap_or(0)
    }

    /// The constant coefficient.
    pub fn constant_term(&self) -> BigRational {
        self.terms
            .get(&0)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Exponent vectors and coefficients.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<u32>, &BigRational)> + '_ {
        self.terms
            .iter()
            .map(move |(&k, c)| ((0..self.vars).map(|v| exponent(k, v)).collect(), c))
    }

    fn insert(&mut self, key: u64, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(key).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.vars, other.vars);
        let mut out = self.clone();
        for (&k, c) in &other.terms {
            out.insert(k, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        PolynomialFunction {
            vars: self.vars,
            terms: self.terms.iter().map(|(&k, c)| (k, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return PolynomialFunction::zero(self.vars);
        }
        PolynomialFunction {
            vars: self.vars,
            terms: self.terms.iter().map(|(&k, c)| (k, c * q)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.mul_truncated(other, u32::MAX)
    }

    /// Product with every monomial of total degree above `max_degree` dropped.
    pub fn mul_truncated(&self, other: &Self, max_degree: u32) -> Self {
        assert_eq!(self.vars, other.vars);
        let mut out = PolynomialFunction::zero(self.vars);
        for (&ka, ca) in &self.terms {
            let da = total_degree(ka, self.vars);
            if da > max_degree {
                continue;
            }
            for (&kb, cb) in &other.terms {
                if da + total_degree(kb, self.vars) > max_degree {
                    continue;
                }
                for v in 0..self.vars {
                    assert!(
                        exponent(ka, v) + exponent(kb, v) <= MASK as u32,
                        "exponent overflow"
                    );
                }
                out.insert(ka + kb, ca * cb);
            }
        }
        out
    }

    pub fn truncate(&self, max_degree: u32) -> Self {
        PolynomialFunction {
            vars: self.vars,
            terms: self
                .terms
                .iter()
                .filter(|(&k, _)| total_degree(k, self.vars) <= max_degree)
                .map(|(&k, c)| (k, c.clone()))
                .collect(),
        }
    }

    /// `∂/∂ var`.
    pub fn partial(&self, var: usize) -> Self {
        let mut out = PolynomialFunction::zero(self.vars);
        for (&k, c) in &self.terms {
            let e = exponent(k, var);
            if e > 0 {
                out.insert(
                    k - unit(var),
                    c * BigRational::from_integer(BigInt::from(e)),
                );
            }
        }
        out
    }

    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.vars);
        let mut total = BigRational::zero();
        for (&k, c) in &self.terms {
            let mut term = c.clone();
            for (v, p) in point.iter().enumerate() {
                let e = exponent(k, v);
                if e > 0 {
                    term *= num_traits::pow(p.clone(), e as usize);
                }
            }
            total += term;
        }
        total
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.vars);
        self.terms
            .iter()
            .map(|(&k, c)| {
                let mut term = c.to_f64().unwrap_or(f64::NAN);
                for (v, p) in point.iter().enumerate() {
                    term *= p.powi(exponent(k, v) as i32);
                }
                term
            })
            .sum()
    }

    /// The same function written in the offsets `u = x - point`.
    pub fn shift(&self, point: &[BigRational]) -> Self {
        self.shift_truncated(point, u32::MAX)
    }

    /// [`shift`](Self::shift) keeping only offsets of total degree at most
    /// `max_degree`.
    pub fn shift_truncated(&self, point: &[BigRational], max_degree: u32) -> Self {
        assert_eq!(point.len(), self.vars);
        let linear: Vec<PolynomialFunction> = (0..self.vars)
            .map(|v| {
                PolynomialFunction::variable(self.vars, v)
                    .add(&PolynomialFunction::constant(self.vars, point[v].clone()))
            })
            .collect();
        let mut out = PolynomialFunction::zero(self.vars);
        for (&k, c) in &self.terms {
            let mut term = PolynomialFunction::constant(self.vars, c.clone());
            for (v, lin) in linear.iter().enumerate() {
                for _ in 0..exponent(k, v) {
                    term = term.mul_truncated(lin, max_degree);
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// A random polynomial of total degree at most `max_degree`; each
    /// monomial is present with probability one half, with a coefficient
    /// `p/q`, `p` in `-4..=4`, `q` in `1..=3`.
    pub fn random<R: Rng + ?Sized>(vars: usize, max_degree: u32, rng: &mut R) -> Self {
        let mut out = PolynomialFunction::zero(vars);
        for key in monomial_keys(vars, max_degree) {
            if rng.gen_bool(0.5) {
                let p: i64 = rng.gen_range(-4..=4);
                let q: i64 = rng.gen_range(1..=3);
                out.insert(key, BigRational::new(p.into(), q.into()));
            }
        }
        if out.is_zero() {
            out.insert(0, BigRational::one());
        }
        out
    }
}

fn monomial_keys(vars: usize, max_degree: u32) -> Vec<u64> {
    let mut keys = vec![0u64];
    for v in 0..vars {
        let mut next = Vec::new();
        for &k in &keys {
            let used = total_degree(k, vars);
            for e in 0..=(max_degree - used) {
                next.push(k + u64::from(e) * unit(v));
            }
        }
        keys = next;
    }
    keys
}

impl fmt::Display for PolynomialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms()
            .map(|(exps, c)| {
                let vars: Vec<String> = exps
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(v, &e)| {
                        if e == 1 {
                            format!("v{v}")
                        } else {
                            format!("v{v}^{e}")
                        }
                    })
                    .collect();
                if vars.is_empty() {
                    c.to_string()
                } else {
                    format!("{c}*{}", vars.join("*"))
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}
