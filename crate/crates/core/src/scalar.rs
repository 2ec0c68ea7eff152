//! Commutative polynomial algebra over derivative words applied to opaque
//! function symbols.
//!
//! A scalar coefficient is a finite sum of rational multiples of products of
//! factors `W(f)`, where `f` is a [`FunctionSymbol`] and `W` is a
//! [`DerivativeWord`] over the left-invariant frame `X_1, Y_1, ..., X_n, Y_n, T`.
//! Multiplication of factors is commutative, composition of frame letters is
//! not: the only non-trivial commutator is `[X_j, Y_j] = c T` where the
//! constant `c` is carried by a [`BracketRule`] (`c = 1` by default).
//!
//! Normal form (see [`normalize`]) sorts every word into the order
//! `X_1 < Y_1 < X_2 < Y_2 < ... < X_n < Y_n < T`, read in application order
//! (innermost letter first). Two expressions are equal as differential
//! polynomials iff their normal forms are structurally identical.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("frame index {index} out of range 1..={max} for n = {n}")]
    IndexOutOfRange { index: usize, max: usize, n: usize },
}

/// A letter of the frame alphabet. Indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    X(u8),
    Y(u8),
    T,
}

impl Letter {
    fn rank(self) -> u32 {
        match self {
            Letter::X(j) => 2 * (u32::from(j) - 1),
            Letter::Y(j) => 2 * (u32::from(j) - 1) + 1,
            Letter::T => u32::MAX,
        }
    }

    /// Maps `W_j` to its letter: `W_j = X_j` for `j <= n`, `W_{j+n} = Y_j`,
    /// `W_{2n+1} = T`.
    pub fn from_frame_index(index: usize, n: usize) -> Option<Letter> {
        match index {
            i if i >= 1 && i <= n => Some(Letter::X(i as u8)),
            i if i > n && i <= 2 * n => Some(Letter::Y((i - n) as u8)),
            i if i == 2 * n + 1 => Some(Letter::T),
            _ => None,
        }
    }

    pub fn frame_index(self, n: usize) -> usize {
        match self {
            Letter::X(j) => j as usize,
            Letter::Y(j) => j as usize + n,
            Letter::T => 2 * n + 1,
        }
    }

    /// The subscript `j` of `X_j` / `Y_j`; `None` for `T`.
    pub fn pair(self) -> Option<usize> {
        match self {
            Letter::X(j) | Letter::Y(j) => Some(j as usize),
            Letter::T => None,
        }
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.rank().cmp(&other.rank())
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::X(j) => write!(f, "X{j}"),
            Letter::Y(j) => write!(f, "Y{j}"),
            Letter::T => write!(f, "T"),
        }
    }
}

/// A composition of frame vector fields, stored in application order: the
/// first letter acts first (innermost). `X1(Y1(f))` is the word `[Y1, X1]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct DerivativeWord(Vec<Letter>);

impl DerivativeWord {
    pub fn empty() -> Self {
        DerivativeWord(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        DerivativeWord(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Canonical iff the letters are sorted in application order.
    pub fn is_canonical(&self) -> bool {
        self.0.windows(2).all(|w| w[0] <= w[1])
    }

    /// The word obtained by applying `letter` after this one.
    pub fn then(&self, letter: Letter) -> Self {
        let mut letters = self.0.clone();
        letters.push(letter);
        DerivativeWord(letters)
    }
}

/// A coordinate function of the standard exponential chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coordinate {
    X(u8),
    Y(u8),
    T,
}

impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coordinate::X(j) => write!(f, "x{j}"),
            Coordinate::Y(j) => write!(f, "y{j}"),
            Coordinate::T => write!(f, "t"),
        }
    }
}

/// An opaque function symbol. Coordinate symbols carry no derivative rules at
/// this layer; they only acquire meaning under a coordinate model.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FunctionSymbol {
    Abstract(Arc<str>),
    Coordinate(Coordinate),
}

impl FunctionSymbol {
    pub fn new(name: &str) -> Self {
        FunctionSymbol::Abstract(Arc::from(name))
    }

    pub fn name(&self) -> String {
        match self {
            FunctionSymbol::Abstract(name) => name.to_string(),
            FunctionSymbol::Coordinate(c) => c.to_string(),
        }
    }
}

impl fmt::Display for FunctionSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSymbol::Abstract(name) => f.write_str(name),
            FunctionSymbol::Coordinate(c) => c.fmt(f),
        }
    }
}

/// A derivative word applied to a function symbol.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Factor {
    pub symbol: FunctionSymbol,
    pub word: DerivativeWord,
}

impl Factor {
    pub fn new(symbol: FunctionSymbol, word: DerivativeWord) -> Self {
        Factor { symbol, word }
    }
}

/// A commutative product of factors, kept sorted. The empty product is 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Product(Vec<Factor>);

impl Product {
    pub fn one() -> Self {
        Product(Vec::new())
    }

    pub fn from_factors(mut factors: Vec<Factor>) -> Self {
        factors.sort();
        Product(factors)
    }

    pub fn factors(&self) -> &[Factor] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    fn mul(&self, other: &Product) -> Product {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            if self.0[i] <= other.0[j] {
                out.push(self.0[i].clone());
                i += 1;
            } else {
                out.push(other.0[j].clone());
                j += 1;
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Product(out)
    }
}

/// The commutator constant `c` in `[X_j, Y_j] = c T`. All other pairs of
/// frame letters commute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BracketRule {
    coefficient: i8,
}

impl BracketRule {
    pub fn new(coefficient: i8) -> Self {
        assert!(
            coefficient == 1 || coefficient == -1,
            "bracket coefficient must be +1 or -1"
        );
        BracketRule { coefficient }
    }

    pub fn coefficient(self) -> i8 {
        self.coefficient
    }
}

impl Default for BracketRule {
    fn default() -> Self {
        BracketRule { coefficient: 1 }
    }
}

/// Rewrites a word into its canonical expansion by repeatedly replacing the
/// leftmost descent `[.., Y_j, X_j, ..]` by `[.., X_j, Y_j, ..] + c [.., T, ..]`
/// and any other descent by a plain swap.
pub fn normalize_word(word: &DerivativeWord, rule: BracketRule) -> Vec<(BigInt, DerivativeWord)> {
    let mut out: BTreeMap<Vec<Letter>, BigInt> = BTreeMap::new();
    let mut stack: Vec<(BigInt, Vec<Letter>)> = vec![(BigInt::one(), word.0.clone())];
    while let Some((coef, letters)) = stack.pop() {
        let descent = letters.windows(2).position(|w| w[0] > w[1]);
        match descent {
            None => {
                let entry = out.entry(letters).or_insert_with(BigInt::zero);
                *entry += coef;
            }
            Some(i) => {
                let (first, second) = (letters[i], letters[i + 1]);
                if let (Letter::Y(a), Letter::X(b)) = (first, second) {
                    if a == b {
                        let mut bracket = Vec::with_capacity(letters.len() - 1);
                        bracket.extend_from_slice(&letters[..i]);
                        bracket.push(Letter::T);
                        bracket.extend_from_slice(&letters[i + 2..]);
                        stack.push((&coef * BigInt::from(rule.coefficient), bracket));
                    }
                }
                let mut swapped = letters;
                swapped.swap(i, i + 1);
                stack.push((coef, swapped));
            }
        }
    }
    out.into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(w, c)| (c, DerivativeWord(w)))
        .collect()
}

/// Element of the commutative polynomial ring in the factors `W(f)`.
///
/// Structural equality is syntactic. Values produced by [`normalize`],
/// [`ScalarAlgebra::derive`] and arithmetic on normalized operands are in
/// normal form, so for those it coincides with algebraic equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ScalarExpr {
    terms: BTreeMap<Product, BigRational>,
}

impl ScalarExpr {
    pub fn zero() -> Self {
        ScalarExpr::default()
    }

    pub fn one() -> Self {
        ScalarExpr::constant(BigRational::one())
    }

    pub fn constant(value: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !value.is_zero() {
            terms.insert(Product::one(), value);
        }
        ScalarExpr { terms }
    }

    pub fn integer(value: i64) -> Self {
        ScalarExpr::constant(BigRational::from_integer(value.into()))
    }

    pub fn symbol(name: &str) -> Self {
        ScalarExpr::factor(FunctionSymbol::new(name), DerivativeWord::empty())
    }

    pub fn coordinate(coordinate: Coordinate) -> Self {
        ScalarExpr::factor(
            FunctionSymbol::Coordinate(coordinate),
            DerivativeWord::empty(),
        )
    }

    /// A single factor `word(symbol)`. The word is kept as given; call
    /// [`normalize`] to canonicalize it.
    pub fn factor(symbol: FunctionSymbol, word: DerivativeWord) -> Self {
        ScalarExpr::from_terms([(BigRational::one(), vec![Factor::new(symbol, word)])])
    }

    /// Builds an expression from raw terms without rewriting any word.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (BigRational, Vec<Factor>)>,
    {
        let mut out = ScalarExpr::zero();
        for (coef, factors) in terms {
            out.add_term(Product::from_factors(factors), coef);
        }
        out
    }

    fn add_term(&mut self, product: Product, coef: BigRational) {
        if coef.is_zero() {
            return;
        }
        match self.terms.entry(product) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coef);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coef;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if this expression is a rational constant.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self
                .terms
                .iter()
                .next()
                .filter(|(p, _)| p.is_one())
                .map(|(_, c)| c.clone()),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Product, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True iff every derivative word in the expression is canonical.
    pub fn is_normal(&self) -> bool {
        self.terms
            .keys()
            .all(|p| p.factors().iter().all(|f| f.word.is_canonical()))
    }

    pub fn scale(&self, q: &BigRational) -> ScalarExpr {
        if q.is_zero() {
            return ScalarExpr::zero();
        }
        ScalarExpr {
            terms: self.terms.iter().map(|(p, c)| (p.clone(), c * q)).collect(),
        }
    }

    /// All function symbols occurring in the expression, sorted.
    pub fn symbols(&self) -> Vec<FunctionSymbol> {
        let mut out: Vec<FunctionSymbol> = self
            .terms
            .keys()
            .flat_map(|p| p.factors().iter().map(|f| f.symbol.clone()))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// All distinct factors occurring in the expression, sorted.
    pub fn factors(&self) -> Vec<Factor> {
        let mut out: Vec<Factor> = self
            .terms
            .keys()
            .flat_map(|p| p.factors().iter().cloned())
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

impl AddAssign<&ScalarExpr> for ScalarExpr {
    fn add_assign(&mut self, rhs: &ScalarExpr) {
        for (p, c) in &rhs.terms {
            self.add_term(p.clone(), c.clone());
        }
    }
}

impl Add for &ScalarExpr {
    type Output = ScalarExpr;
    fn add(self, rhs: &ScalarExpr) -> ScalarExpr {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for ScalarExpr {
    type Output = ScalarExpr;
    fn add(mut self, rhs: ScalarExpr) -> ScalarExpr {
        self += &rhs;
        self
    }
}

impl Neg for &ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr {
            terms: self.terms.iter().map(|(p, c)| (p.clone(), -c)).collect(),
        }
    }
}

impl Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        -&self
    }
}

impl Sub for &ScalarExpr {
    type Output = ScalarExpr;
    fn sub(self, rhs: &ScalarExpr) -> ScalarExpr {
        let mut out = self.clone();
        for (p, c) in &rhs.terms {
            out.add_term(p.clone(), -c);
        }
        out
    }
}

impl Sub for ScalarExpr {
    type Output = ScalarExpr;
    fn sub(self, rhs: ScalarExpr) -> ScalarExpr {
        &self - &rhs
    }
}

impl Mul for &ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, rhs: &ScalarExpr) -> ScalarExpr {
        let mut out = ScalarExpr::zero();
        for (p1, c1) in &self.terms {
            for (p2, c2) in &rhs.terms {
                out.add_term(p1.mul(p2), c1 * c2);
            }
        }
        out
    }
}

impl Mul for ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, rhs: ScalarExpr) -> ScalarExpr {
        &self * &rhs
    }
}

/// Canonical form under the default bracket `[X_j, Y_j] = T`.
pub fn normalize(e: &ScalarExpr) -> ScalarExpr {
    normalize_with(e, BracketRule::default())
}

pub fn normalize_with(e: &ScalarExpr, rule: BracketRule) -> ScalarExpr {
    let mut out = ScalarExpr::zero();
    for (product, coef) in &e.terms {
        if product.factors().iter().all(|f| f.word.is_canonical()) {
            out.add_term(product.clone(), coef.clone());
            continue;
        }
        // Distribute the expansion of every factor's word over the product.
        let mut partial: Vec<(BigRational, Vec<Factor>)> = vec![(coef.clone(), Vec::new())];
        for factor in product.factors() {
            let expansion = normalize_word(&factor.word, rule);
            let mut next = Vec::with_capacity(partial.len() * expansion.len());
            for (c, factors) in &partial {
                for (k, word) in &expansion {
                    let mut fs = factors.clone();
                    fs.push(Factor::new(factor.symbol.clone(), word.clone()));
                    next.push((c * BigRational::from_integer(k.clone()), fs));
                }
            }
            partial = next;
        }
        for (c, factors) in partial {
            out.add_term(Product::from_factors(factors), c);
        }
    }
    out
}

/// True iff `a - b` normalizes to zero under the default bracket.
pub fn scalar_eq(a: &ScalarExpr, b: &ScalarExpr) -> bool {
    normalize(&(a - b)).is_zero()
}

/// The scalar algebra of `H^n`: frame indices `1..=2n+1` and the bracket rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScalarAlgebra {
    n: usize,
    rule: BracketRule,
}

impl ScalarAlgebra {
    pub fn new(n: usize) -> Self {
        ScalarAlgebra::with_rule(n, BracketRule::default())
    }

    pub fn with_rule(n: usize, rule: BracketRule) -> Self {
        assert!(n >= 1, "the Heisenberg group needs n >= 1");
        ScalarAlgebra { n, rule }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rule(&self) -> BracketRule {
        self.rule
    }

    pub fn normalize(&self, e: &ScalarExpr) -> ScalarExpr {
        normalize_with(e, self.rule)
    }

    pub fn eq(&self, a: &ScalarExpr, b: &ScalarExpr) -> bool {
        self.normalize(&(a - b)).is_zero()
    }

    pub fn letter(&self, index: usize) -> Result<Letter, ScalarError> {
        Letter::from_frame_index(index, self.n).ok_or(ScalarError::IndexOutOfRange {
            index,
            max: 2 * self.n + 1,
            n: self.n,
        })
    }

    /// Applies `W_index` by the Leibniz rule and returns the normal form.
    pub fn derive(&self, index: usize, e: &ScalarExpr) -> Result<ScalarExpr, ScalarError> {
        let letter = self.letter(index)?;
        Ok(self.apply(letter, e))
    }

    /// Applies a frame letter; the letter's pair index is not range-checked.
    pub fn apply(&self, letter: Letter, e: &ScalarExpr) -> ScalarExpr {
        let mut out = ScalarExpr::zero();
        for (product, coef) in &e.terms {
            let factors = product.factors();
            for i in 0..factors.len() {
                let expansion = if factors[i].word.is_canonical() {
                    insert_letter(&factors[i].word, letter, self.rule)
                } else {
                    normalize_word(&factors[i].word.then(letter), self.rule)
                };
                for (k, w) in expansion {
                    let mut fs = factors.to_vec();
                    fs[i] = Factor::new(factors[i].symbol.clone(), w);
                    let mut normalized = ScalarExpr::zero();
                    normalized.add_term(
                        Product::from_factors(fs),
                        coef * BigRational::from_integer(k),
                    );
                    // Other factors may still be non-canonical if the input was raw.
                    out += &if normalized.is_normal() {
                        normalized
                    } else {
                        normalize_with(&normalized, self.rule)
                    };
                }
            }
        }
        out
    }
}

/// Normal form of `letter ∘ word` for a canonical `word`.
fn insert_letter(
    word: &DerivativeWord,
    letter: Letter,
    rule: BracketRule,
) -> Vec<(BigInt, DerivativeWord)> {
    if word.0.last().is_none_or(|last| *last <= letter) {
        return vec![(BigInt::one(), word.then(letter))];
    }
    normalize_word(&word.then(letter), rule)
}
