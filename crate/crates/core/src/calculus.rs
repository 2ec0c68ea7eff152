//! Left-invariant exterior calculus on `H^n`: the exterior derivative, the
//! Lefschetz-type map `L β = dθ ∧ β`, its exact inverse, the derived
//! operator `𝓛(α) = L⁻¹(-(dα)|_h)` and the Rumin spaces `I^k`, `J^k`.
//!
//! Operators are generic over a [`Frame`], i.e. over how the frame vector
//! fields act on coefficients. [`SymbolicFrame`] acts on [`ScalarExpr`] by
//! the bracket rule; the numeric lab supplies a coordinate realization.

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exterior::{horizontal_basis, Coefficient, Form, Monomial};
use crate::linalg::{LinalgError, RationalMatrix};
use crate::scalar::{BracketRule, Letter, ScalarAlgebra, ScalarExpr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalculusError {
    #[error("cannot differentiate a form of top degree {degree}")]
    DegreeOverflow { degree: usize },
    #[error("expected a form of degree {expected}, found degree {found}")]
    WrongDegree { expected: usize, found: usize },
    #[error("expected a θ-free form")]
    ThetaComponent,
    #[error("form lives on H^{found}, context is H^{expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("quotient representatives are defined for k <= n (k = {k}, n = {n})")]
    QuotientDegree { k: usize, n: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Sign `s` in `dθ = s Σ_j dw_j ∧ dw_{j+n}`. The bracket follows from
/// `d∘d = 0`: `[X_j, Y_j] = -s T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ConventionProfile {
    dtheta_sign: i8,
}

impl ConventionProfile {
    pub const MINUS: ConventionProfile = ConventionProfile { dtheta_sign: -1 };
    pub const PLUS: ConventionProfile = ConventionProfile { dtheta_sign: 1 };

    pub fn new(dtheta_sign: i8) -> Option<Self> {
        match dtheta_sign {
            -1 => Some(Self::MINUS),
            1 => Some(Self::PLUS),
            _ => None,
        }
    }

    /// Default first, then the alternative.
    pub fn all() -> [ConventionProfile; 2] {
        [Self::MINUS, Self::PLUS]
    }

    pub fn dtheta_sign(self) -> i8 {
        self.dtheta_sign
    }

    pub fn bracket_rule(self) -> BracketRule {
        BracketRule::new(-self.dtheta_sign)
    }
}

impl Default for ConventionProfile {
    fn default() -> Self {
        Self::MINUS
    }
}

impl fmt::Display for ConventionProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.dtheta_sign < 0 { "-" } else { "+" })
    }
}

impl std::str::FromStr for ConventionProfile {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "-" | "minus" | "-1" => Ok(Self::MINUS),
            "+" | "plus" | "+1" | "1" => Ok(Self::PLUS),
            other => Err(format!("unknown convention `{other}` (expected + or -)")),
        }
    }
}

impl Serialize for ConventionProfile {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// How the frame `W_1, ..., W_{2n+1}` acts on a coefficient ring.
pub trait Frame: Send + Sync {
    type Coeff: Coefficient;

    fn n(&self) -> usize;

    fn convention(&self) -> ConventionProfile;

    /// `W_index c` for `index` in `1..=2n+1`.
    fn derive(&self, index: usize, c: &Self::Coeff) -> Self::Coeff;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymbolicFrame {
    algebra: ScalarAlgebra,
    convention: ConventionProfile,
}

impl SymbolicFrame {
    pub fn new(n: usize, convention: ConventionProfile) -> Self {
        SymbolicFrame {
            algebra: ScalarAlgebra::with_rule(n, convention.bracket_rule()),
            convention,
        }
    }

    pub fn algebra(&self) -> &ScalarAlgebra {
        &self.algebra
    }
}

impl Frame for SymbolicFrame {
    type Coeff = ScalarExpr;

    fn n(&self) -> usize {
        self.algebra.n()
    }

    fn convention(&self) -> ConventionProfile {
        self.convention
    }

    fn derive(&self, index: usize, c: &ScalarExpr) -> ScalarExpr {
        let letter = Letter::from_frame_index(index, self.n()).expect("frame index in range");
        self.algebra.apply(letter, c)
    }
}

/// Rational matrices that depend only on `n` and the convention.
#[derive(Debug)]
pub struct RuminTables {
    n: usize,
    convention: ConventionProfile,
    lefschetz: RationalMatrix,
    lefschetz_inverse: RationalMatrix,
    /// Per degree `k`: projector onto the orthogonal complement of
    /// `dθ ∧ Λ^{k-2} 𝔥_1` inside `Λ^k 𝔥_1`.
    complements: Vec<RationalMatrix>,
}

impl RuminTables {
    pub fn new(n: usize, convention: ConventionProfile) -> Result<Self, CalculusError> {
        let lefschetz = dtheta_matrix(n, convention, n + 1);
        let lefschetz_inverse = lefschetz.inverse()?;
        let complements = (0..=2 * n)
            .map(|k| {
                let size = horizontal_basis(n, k).len();
                if k < 2 {
                    RationalMatrix::identity(size)
                } else {
                    RationalMatrix::identity(size)
                        .sub(&dtheta_matrix(n, convention, k).column_space_projector())
                }
            })
            .collect();
        Ok(RuminTables {
            n,
            convention,
            lefschetz,
            lefschetz_inverse,
            complements,
        })
    }

    pub fn lefschetz(&self) -> &RationalMatrix {
        &self.lefschetz
    }

    pub fn lefschetz_inverse(&self) -> &RationalMatrix {
        &self.lefschetz_inverse
    }

    pub fn complement(&self, k: usize) -> &RationalMatrix {
        &self.complements[k]
    }
}

/// Matrix of `β ↦ dθ ∧ β` from horizontal `(k-2)`-forms to horizontal
/// `k`-forms in the lexicographic monomial bases.
pub fn dtheta_matrix(n: usize, convention: ConventionProfile, k: usize) -> RationalMatrix {
    assert!(k >= 2, "dθ ∧ · lands in degree >= 2");
    let rows = horizontal_basis(n, k);
    let cols = horizontal_basis(n, k - 2);
    let mut m = RationalMatrix::zeros(rows.len(), cols.len());
    let s = i64::from(convention.dtheta_sign());
    for (c, beta) in cols.iter().enumerate() {
        for j in 1..=n {
            let (sign, pair) = Monomial::from_indices(&[j, j + n]).expect("distinct");
            if let Some((sign2, target)) = pair.wedge(*beta) {
                let r = rows.binary_search(&target).expect("horizontal monomial");
                let v =
                    m.get(r, c) + BigRational::from_integer((s * i64::from(sign * sign2)).into());
                m.set(r, c, v);
            }
        }
    }
    m
}

/// An `H^n` together with a frame realization and the cached Rumin tables.
#[derive(Debug, Clone)]
pub struct HeisenbergContext<F: Frame = SymbolicFrame> {
    frame: F,
    tables: Arc<RuminTables>,
}

impl HeisenbergContext<SymbolicFrame> {
    pub fn new(n: usize, convention: ConventionProfile) -> Result<Self, CalculusError> {
        assert!(n >= 1, "the Heisenberg group needs n >= 1");
        Ok(HeisenbergContext {
            frame: SymbolicFrame::new(n, convention),
            tables: Arc::new(RuminTables::new(n, convention)?),
        })
    }

    pub fn with_default_convention(n: usize) -> Result<Self, CalculusError> {
        HeisenbergContext::new(n, ConventionProfile::default())
    }

    pub fn algebra(&self) -> &ScalarAlgebra {
        self.frame.algebra()
    }
}

impl<F: Frame> HeisenbergContext<F> {
    pub fn from_parts(frame: F, tables: Arc<RuminTables>) -> Self {
        assert_eq!(frame.n(), tables.n, "frame and tables disagree on n");
        assert_eq!(
            frame.convention(),
            tables.convention,
            "frame and tables disagree on the convention"
        );
        HeisenbergContext { frame, tables }
    }

    /// The same group and tables with another frame realization.
    pub fn with_frame<G: Frame>(&self, frame: G) -> HeisenbergContext<G> {
        HeisenbergContext::from_parts(frame, Arc::clone(&self.tables))
    }

    pub fn n(&self) -> usize {
        self.frame.n()
    }

    pub fn convention(&self) -> ConventionProfile {
        self.frame.convention()
    }

    pub fn frame(&self) -> &F {
        &self.frame
    }

    pub fn tables(&self) -> &Arc<RuminTables> {
        &self.tables
    }

    pub fn theta_index(&self) -> usize {
        2 * self.n() + 1
    }

    fn check_n(&self, form: &Form<F::Coeff>) -> Result<(), CalculusError> {
        if form.n() != self.n() {
            return Err(CalculusError::DimensionMismatch {
                expected: self.n(),
                found: form.n(),
            });
        }
        Ok(())
    }

    fn check_degree(&self, form: &Form<F::Coeff>, expected: usize) -> Result<(), CalculusError> {
        self.check_n(form)?;
        if form.degree() != expected {
            return Err(CalculusError::WrongDegree {
                expected,
                found: form.degree(),
            });
        }
        Ok(())
    }

    pub fn theta(&self) -> Form<F::Coeff> {
        Form::theta(self.n())
    }

    /// `dθ = s Σ_j dw_j ∧ dw_{j+n}`.
    pub fn dtheta(&self) -> Form<F::Coeff> {
        let n = self.n();
        let s = BigRational::from_integer(i64::from(self.convention().dtheta_sign()).into());
        let mut out = Form::zero(n, 2);
        for j in 1..=n {
            out = &out + &Form::term(n, F::Coeff::from_rational(s.clone()), &[j, j + n]);
        }
        out
    }

    /// `df = Σ_j W_j f dw_j` (θ included as `W_{2n+1} = T`).
    pub fn d_scalar(&self, f: &F::Coeff) -> Form<F::Coeff> {
        self.d(&Form::scalar(self.n(), f.clone()))
            .expect("0-forms are differentiable")
    }

    /// The exterior derivative, extended from scalars, `d(dw_j) = 0` and
    /// `dθ` by the graded Leibniz rule.
    pub fn d(&self, form: &Form<F::Coeff>) -> Result<Form<F::Coeff>, CalculusError> {
        self.check_n(form)?;
        let n = self.n();
        let top = self.theta_index();
        let degree = form.degree();
        if degree >= top {
            return Err(CalculusError::DegreeOverflow { degree });
        }
        let dtheta = self.dtheta();
        let mut out = Form::zero(n, degree + 1);
        for (m, c) in form.terms() {
            for j in 1..=top {
                if m.contains(j) {
                    continue;
                }
                let dc = self.frame.derive(j, c);
                if dc.is_zero() {
                    continue;
                }
                let (sign, target) = Monomial::single(j).wedge(*m).expect("j not in m");
                out.add_term(target, if sign < 0 { dc.neg() } else { dc });
            }
            if m.contains(top) {
                // d(dw_I' ∧ θ) = (-1)^{|I'|} dw_I' ∧ dθ
                let rest = m.without(top);
                let parity = if rest.degree() % 2 == 0 { 1 } else { -1 };
                for (dm, dc) in dtheta.terms() {
                    if let Some((sign, target)) = rest.wedge(*dm) {
                        let coef = c.mul(dc);
                        out.add_term(target, if sign * parity < 0 { coef.neg() } else { coef });
                    }
                }
            }
        }
        Ok(out)
    }

    /// `L β = dθ ∧ β` on θ-free `(n-1)`-forms.
    pub fn lefschetz(&self, beta: &Form<F::Coeff>) -> Result<Form<F::Coeff>, CalculusError> {
        self.check_degree(beta, self.n() - 1)?;
        if !beta.is_horizontal() {
            return Err(CalculusError::ThetaComponent);
        }
        Ok(self.dtheta().wedge(beta))
    }

    /// The unique θ-free `(n-1)`-form `β` with `L β = η`.
    pub fn lefschetz_inverse(&self, eta: &Form<F::Coeff>) -> Result<Form<F::Coeff>, CalculusError> {
        self.check_degree(eta, self.n() + 1)?;
        if !eta.is_horizontal() {
            return Err(CalculusError::ThetaComponent);
        }
        let n = self.n();
        Ok(apply_matrix(
            self.tables.lefschetz_inverse(),
            &horizontal_basis(n, n + 1),
            &horizontal_basis(n, n - 1),
            eta,
            n - 1,
        ))
    }

    /// `𝓛(α) = L⁻¹(-(dα)|_h)` for an `n`-form `α`.
    pub fn script_l(&self, alpha: &Form<F::Coeff>) -> Result<Form<F::Coeff>, CalculusError> {
        self.check_degree(alpha, self.n())?;
        let dalpha = self.d(alpha)?;
        self.lefschetz_inverse(&-dalpha.horizontal_part())
    }

    /// `ω ∈ J^k` iff `ω ∧ θ = 0` and `ω ∧ dθ = 0`.
    pub fn in_j(&self, form: &Form<F::Coeff>) -> bool {
        form.wedge(&self.theta()).is_zero() && form.wedge(&self.dtheta()).is_zero()
    }

    /// `ω ∈ I^k` iff `ω = α ∧ θ + β ∧ dθ` for some forms `α`, `β`.
    pub fn in_i(&self, form: &Form<F::Coeff>) -> bool {
        self.project_out_ideal(form).is_zero()
    }

    /// Drops the θ-part and removes the component along `dθ ∧ Λ^{k-2} 𝔥_1`
    /// (orthogonally, monomials orthonormal).
    fn project_out_ideal(&self, form: &Form<F::Coeff>) -> Form<F::Coeff> {
        let n = self.n();
        let k = form.degree();
        if k > 2 * n {
            // Every monomial of degree > 2n carries θ.
            return Form::zero(n, k);
        }
        let basis = horizontal_basis(n, k);
        apply_matrix(
            self.tables.complement(k),
            &basis,
            &basis,
            &form.horizontal_part(),
            k,
        )
    }

    /// Canonical representative of `[ω]` in `Ω^k / I^k` for `k <= n`.
    pub fn reduce_mod_i(&self, form: &Form<F::Coeff>) -> Result<Form<F::Coeff>, CalculusError> {
        self.check_n(form)?;
        if form.degree() > self.n() {
            return Err(CalculusError::QuotientDegree {
                k: form.degree(),
                n: self.n(),
            });
        }
        Ok(self.project_out_ideal(form))
    }
}

/// Applies a rational matrix to the coefficient vector of a horizontal form.
fn apply_matrix<C: Coefficient>(
    matrix: &RationalMatrix,
    input: &[Monomial],
    output: &[Monomial],
    form: &Form<C>,
    out_degree: usize,
) -> Form<C> {
    let mut out = Form::zero(form.n(), out_degree);
    for (m, c) in form.terms() {
        let col = input
            .binary_search(m)
            .expect("horizontal monomial of the expected degree");
        for (row, target) in output.iter().enumerate() {
            let entry = matrix.get(row, col);
            if !entry.is_zero() {
                out.add_term(*target, c.scale(entry));
            }
        }
    }
    out
}
