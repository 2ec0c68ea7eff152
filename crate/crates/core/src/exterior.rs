//! Exterior algebra over the coframe `dw_1, ..., dw_2n, θ` of `H^n`.
//!
//! `θ` is the coframe element with index `2n + 1` and therefore always sorts
//! last inside a monomial. Monomials are orientation-canonical (strictly
//! increasing indices); reordering signs live in the coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_rational::BigRational;
use num_traits::One;

use crate::scalar::ScalarExpr;

/// Coefficient ring of a [`Form`]: a commutative algebra over the rationals.
pub trait Coefficient: Clone + fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn from_rational(q: BigRational) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, q: &BigRational) -> Self;

    fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn add_assign(&mut self, other: &Self) {
        *self = self.add(other);
    }
}

impl Coefficient for ScalarExpr {
    fn zero() -> Self {
        ScalarExpr::zero()
    }
    fn from_rational(q: BigRational) -> Self {
        ScalarExpr::constant(q)
    }
    fn is_zero(&self) -> bool {
        ScalarExpr::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, q: &BigRational) -> Self {
        ScalarExpr::scale(self, q)
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
}

/// A basis covector index `1..=2n+1`; `2n+1` is θ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoframeIndex(u8);

impl CoframeIndex {
    pub fn new(value: usize, n: usize) -> Option<Self> {
        (1..=2 * n + 1)
            .contains(&value)
            .then_some(CoframeIndex(value as u8))
    }

    pub fn value(self) -> usize {
        self.0 as usize
    }
}

/// Sign of a permutation sorting a concatenation of two increasing index
/// sets, or `None` when they share an index.
fn merge_sign(a: u32, b: u32) -> Option<i32> {
    if a & b != 0 {
        return None;
    }
    // Each index of `b` must move past every larger index of `a`.
    let mut inversions = 0;
    let mut rest = b;
    while rest != 0 {
        let bit = rest.trailing_zeros();
        inversions += (a >> (bit + 1)).count_ones();
        rest &= rest - 1;
    }
    Some(if inversions % 2 == 0 { 1 } else { -1 })
}

/// A wedge of distinct basis covectors in increasing order, stored as a bit
/// set (bit `i - 1` for `dw_i`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial(u32);

impl Monomial {
    pub fn unit() -> Self {
        Monomial(0)
    }

    /// Builds the monomial of the given indices together with the sign of the
    /// sorting permutation, or `None` if an index repeats.
    pub fn from_indices(indices: &[usize]) -> Option<(i32, Monomial)> {
        let mut bits = 0u32;
        let mut sign = 1;
        for &i in indices {
            assert!((1..=31).contains(&i), "coframe index {i} out of range");
            let s = merge_sign(bits, 1 << (i - 1))?;
            sign *= s;
            bits |= 1 << (i - 1);
        }
        Some((sign, Monomial(bits)))
    }

    pub fn single(index: usize) -> Monomial {
        Monomial(1 << (index - 1))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn indices(self) -> Vec<usize> {
        (0..32)
            .filter(|b| self.0 & (1 << b) != 0)
            .map(|b| b as usize + 1)
            .collect()
    }

    pub fn contains(self, index: usize) -> bool {
        self.0 & (1 << (index - 1)) != 0
    }

    /// `self ∧ other` as a signed monomial.
    pub fn wedge(self, other: Monomial) -> Option<(i32, Monomial)> {
        merge_sign(self.0, other.0).map(|s| (s, Monomial(self.0 | other.0)))
    }

    pub fn without(self, index: usize) -> Monomial {
        Monomial(self.0 & !(1 << (index - 1)))
    }

    /// All monomials of `degree` built from indices `1..=max_index`, in
    /// lexicographic order.
    pub fn basis(max_index: usize, degree: usize) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(degree);
        fn rec(
            start: usize,
            max: usize,
            left: usize,
            current: &mut Vec<usize>,
            out: &mut Vec<Monomial>,
        ) {
            if left == 0 {
                out.push(Monomial::from_indices(current).expect("distinct").1);
                return;
            }
            for i in start..=max {
                if max + 1 - i < left {
                    break;
                }
                current.push(i);
                rec(i + 1, max, left - 1, current, out);
                current.pop();
            }
        }
        rec(1, max_index, degree, &mut current, &mut out);
        out
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    // Lexicographic on the increasing index sequences.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let (mut a, mut b) = (self.0, other.0);
        loop {
            match (a == 0, b == 0) {
                (true, true) => return std::cmp::Ordering::Equal,
                (true, false) => return std::cmp::Ordering::Less,
                (false, true) => return std::cmp::Ordering::Greater,
                _ => {}
            }
            let (ia, ib) = (a.trailing_zeros(), b.trailing_zeros());
            if ia != ib {
                return ia.cmp(&ib);
            }
            a &= a - 1;
            b &= b - 1;
        }
    }
}

/// A homogeneous differential form on `H^n` with coefficients in `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct Form<C = ScalarExpr> {
    n: usize,
    degree: usize,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coefficient> Form<C> {
    pub fn zero(n: usize, degree: usize) -> Self {
        assert!(n >= 1, "the Heisenberg group needs n >= 1");
        Form {
            n,
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// A 0-form.
    pub fn scalar(n: usize, c: C) -> Self {
        Form::from_terms(n, 0, [(Monomial::unit(), c)])
    }

    /// `c · dw_{i_1} ∧ ... ∧ dw_{i_k}` with indices in any order.
    pub fn term(n: usize, c: C, indices: &[usize]) -> Self {
        for &i in indices {
            assert!(
                (1..=2 * n + 1).contains(&i),
                "coframe index {i} out of range for n = {n}"
            );
        }
        match Monomial::from_indices(indices) {
            None => Form::zero(n, indices.len()),
            Some((sign, m)) => {
                let c = if sign < 0 { c.neg() } else { c };
                Form::from_terms(n, indices.len(), [(m, c)])
            }
        }
    }

    /// The basis covector `dw_index` (θ for `index = 2n + 1`).
    pub fn covector(n: usize, index: usize) -> Self {
        Form::term(n, C::one(), &[index])
    }

    pub fn theta(n: usize) -> Self {
        Form::covector(n, 2 * n + 1)
    }

    pub fn from_terms<I>(n: usize, degree: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, C)>,
    {
        let mut out = Form::zero(n, degree);
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        assert_eq!(
            m.degree(),
            self.degree,
            "monomial degree does not match form degree"
        );
        assert!(
            m.bits() >> (2 * self.n + 1) == 0,
            "monomial outside the coframe of H^{}",
            self.n
        );
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                o.get_mut().add_assign(&c);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn theta_index(&self) -> usize {
        2 * self.n + 1
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: Monomial) -> C {
        self.terms.get(&m).cloned().unwrap_or_else(C::zero)
    }

    /// The coefficient of a monomial given by indices in any order.
    pub fn coefficient_of(&self, indices: &[usize]) -> C {
        match Monomial::from_indices(indices) {
            None => C::zero(),
            Some((sign, m)) => {
                let c = self.coefficient(m);
                if sign < 0 {
                    c.neg()
                } else {
                    c
                }
            }
        }
    }

    /// For a 0-form, its value.
    pub fn as_scalar(&self) -> Option<C> {
        (self.degree == 0).then(|| self.coefficient(Monomial::unit()))
    }

    pub fn map_coefficients(&self, mut f: impl FnMut(&C) -> C) -> Self {
        Form::from_terms(
            self.n,
            self.degree,
            self.terms.iter().map(|(m, c)| (*m, f(c))),
        )
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        self.map_coefficients(|c| c.scale(q))
    }

    /// Multiplication by a function.
    pub fn times(&self, f: &C) -> Self {
        self.map_coefficients(|c| f.mul(c))
    }

    /// Exterior product. Exceeding the top degree gives the zero form of the
    /// summed degree.
    pub fn wedge(&self, other: &Form<C>) -> Form<C> {
        assert_eq!(self.n, other.n, "forms live on different Heisenberg groups");
        let mut out = Form::zero(self.n, self.degree + other.degree);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((sign, m)) = ma.wedge(*mb) {
                    let c = ca.mul(cb);
                    out.add_term(m, if sign < 0 { c.neg() } else { c });
                }
            }
        }
        out
    }

    /// The θ-free part (restriction to horizontal forms).
    pub fn horizontal_part(&self) -> Form<C> {
        let theta = self.theta_index();
        Form {
            n: self.n,
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| !m.contains(theta))
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Exactly the θ-carrying monomials.
    pub fn vertical_part(&self) -> Form<C> {
        let theta = self.theta_index();
        Form {
            n: self.n,
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.contains(theta))
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Writes `self = ω' + β ∧ θ` with `ω'` and `β` θ-free.
    pub fn decompose_theta(&self) -> (Form<C>, Form<C>) {
        let theta = self.theta_index();
        let prime = self.horizontal_part();
        let beta = if self.degree == 0 {
            Form::zero(self.n, 0)
        } else {
            Form::from_terms(
                self.n,
                self.degree - 1,
                self.terms
                    .iter()
                    .filter(|(m, _)| m.contains(theta))
                    .map(|(m, c)| (m.without(theta), c.clone())),
            )
        };
        (prime, beta)
    }

    pub fn is_horizontal(&self) -> bool {
        let theta = self.theta_index();
        self.terms.keys().all(|m| !m.contains(theta))
    }

    fn combine(&self, other: &Form<C>, negate: bool) -> Form<C> {
        assert_eq!(self.n, other.n, "forms live on different Heisenberg groups");
        assert_eq!(
            self.degree, other.degree,
            "cannot add forms of different degrees"
        );
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, if negate { c.neg() } else { c.clone() });
        }
        out
    }
}

impl<C: Coefficient> Add for &Form<C> {
    type Output = Form<C>;
    fn add(self, rhs: &Form<C>) -> Form<C> {
        self.combine(rhs, false)
    }
}

impl<C: Coefficient> Add for Form<C> {
    type Output = Form<C>;
    fn add(self, rhs: Form<C>) -> Form<C> {
        self.combine(&rhs, false)
    }
}

impl<C: Coefficient> Sub for &Form<C> {
    type Output = Form<C>;
    fn sub(self, rhs: &Form<C>) -> Form<C> {
        self.combine(rhs, true)
    }
}

impl<C: Coefficient> Sub for Form<C> {
    type Output = Form<C>;
    fn sub(self, rhs: Form<C>) -> Form<C> {
        self.combine(&rhs, true)
    }
}

impl<C: Coefficient> Neg for &Form<C> {
    type Output = Form<C>;
    fn neg(self) -> Form<C> {
        self.map_coefficients(|c| c.neg())
    }
}

impl<C: Coefficient> Neg for Form<C> {
    type Output = Form<C>;
    fn neg(self) -> Form<C> {
        -&self
    }
}

/// Horizontal monomials of a degree: the basis of `Λ^k 𝔥_1`.
pub fn horizontal_basis(n: usize, degree: usize) -> Vec<Monomial> {
    Monomial::basis(2 * n, degree)
}
