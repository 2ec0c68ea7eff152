//! The middle-degree slicing expressions, built over any frame realization.
//!
//! Notation: `g` is the approximating function, `ω` an `n`-form,
//! `ω = ω' + β ∧ θ` its θ-decomposition, `γ = 𝓛(gω) - g 𝓛(ω)`.

use crate::calculus::{CalculusError, Frame, HeisenbergContext};
use crate::exterior::{horizontal_basis, Coefficient, Form};

use super::IdentityId;

type Result<T> = std::result::Result<T, CalculusError>;

/// `γ = 𝓛(gω) - g 𝓛(ω)`.
pub fn defect<F: Frame>(
    ctx: &HeisenbergContext<F>,
    g: &F::Coeff,
    omega: &Form<F::Coeff>,
) -> Result<Form<F::Coeff>> {
    let l_g_omega = ctx.script_l(&omega.times(g))?;
    let l_omega = ctx.script_l(omega)?;
    Ok(&l_g_omega - &l_omega.times(g))
}

/// `L⁻¹(-(dg ∧ ω)|_h)`.
pub fn defect_formula<F: Frame>(
    ctx: &HeisenbergContext<F>,
    g: &F::Coeff,
    omega: &Form<F::Coeff>,
) -> Result<Form<F::Coeff>> {
    let dg = ctx.d_scalar(g);
    ctx.lefschetz_inverse(&-dg.wedge(omega).horizontal_part())
}

/// `dg ∧ (ω + 𝓛(ω) ∧ θ) + d((𝓛(gω) - g 𝓛(ω)) ∧ θ)`, the form the slice
/// functional is evaluated on in middle degree.
pub fn slicing_expression<F: Frame>(
    ctx: &HeisenbergContext<F>,
    g: &F::Coeff,
    omega: &Form<F::Coeff>,
) -> Result<Form<F::Coeff>> {
    let theta = ctx.theta();
    let dg = ctx.d_scalar(g);
    let lifted = omega + &ctx.script_l(omega)?.wedge(&theta);
    let first = dg.wedge(&lifted);
    let second = ctx.d(&defect(ctx, g, omega)?.wedge(&theta))?;
    Ok(&first + &second)
}

/// `(dg ∧ ω)|_⊥ + (d𝓛(gω) - g d𝓛(ω)) ∧ θ`.
pub fn vertical_rewrite<F: Frame>(
    ctx: &HeisenbergContext<F>,
    g: &F::Coeff,
    omega: &Form<F::Coeff>,
) -> Result<Form<F::Coeff>> {
    let theta = ctx.theta();
    let dg = ctx.d_scalar(g);
    let d_l_g_omega = ctx.d(&ctx.script_l(&omega.times(g))?)?;
    let d_l_omega = ctx.d(&ctx.script_l(omega)?)?;
    let bracket = &d_l_g_omega - &d_l_omega.times(g);
    Ok(&dg.wedge(omega).vertical_part() + &bracket.wedge(&theta))
}

/// The three bracketed components of the θ-normal form, each already
/// wedged with θ:
/// `-T g ω' ∧ θ`, `-d L⁻¹((dg ∧ ω')|_h) ∧ θ`, `-dg ∧ L⁻¹((dω')|_h) ∧ θ`.
pub fn theta_normal_form_components<F: Frame>(
    ctx: &HeisenbergContext<F>,
    g: &F::Coeff,
    omega: &Form<F::Coeff>,
) -> Result<[Form<F::Coeff>; 3]> {
    let n = ctx.n();
    let theta = ctx.theta();
    let (omega_prime, _) = omega.decompose_theta();
    let dg = ctx.d_scalar(g);
    let tg = ctx.frame().derive(2 * n + 1, g);

    let first = -omega_prime.times(&tg).wedge(&theta);
    let second = -ctx
        .d(&ctx.lefschetz_inverse(&dg.wedge(&omega_prime).horizontal_part())?)?
        .wedge(&theta);
    let third = -dg
        .wedge(&ctx.lefschetz_inverse(&ctx.d(&omega_prime)?.horizontal_part())?)
        .wedge(&theta);
    Ok([first, second, third])
}

/// `[-T g ω' - d L⁻¹((dg ∧ ω')|_h) - dg ∧ L⁻¹((dω')|_h)] ∧ θ`.
pub fn theta_normal_form<F: Frame>(
    ctx: &HeisenbergContext<F>,
    g: &F::Coeff,
    omega: &Form<F::Coeff>,
) -> Result<Form<F::Coeff>> {
    let [a, b, c] = theta_normal_form_components(ctx, g, omega)?;
    Ok(&(&a + &b) + &c)
}

/// The two sides an identity compares. Membership identities have the
/// expression as `lhs` and no `rhs`.
pub struct Sides<C> {
    pub lhs: Form<C>,
    pub rhs: Option<Form<C>>,
}

pub fn sides<F: Frame>(
    id: IdentityId,
    ctx: &HeisenbergContext<F>,
    g: &F::Coeff,
    omega: &Form<F::Coeff>,
) -> Result<Sides<F::Coeff>> {
    Ok(match id {
        IdentityId::DefectFormula => Sides {
            lhs: defect(ctx, g, omega)?,
            rhs: Some(defect_formula(ctx, g, omega)?),
        },
        IdentityId::JMembership => Sides {
            lhs: slicing_expression(ctx, g, omega)?,
            rhs: None,
        },
        IdentityId::VerticalRewrite => Sides {
            lhs: slicing_expression(ctx, g, omega)?,
            rhs: Some(vertical_rewrite(ctx, g, omega)?),
        },
        IdentityId::ThetaNormalForm | IdentityId::H1Coefficients | IdentityId::ClassInvariance => {
            Sides {
                lhs: slicing_expression(ctx, g, omega)?,
                rhs: Some(theta_normal_form(ctx, g, omega)?),
            }
        }
    })
}

/// `g` times the first horizontal monomial of the given degree: a
/// deliberate corruption used to check that a harness can fail.
pub fn corruption<C: Coefficient>(n: usize, degree: usize, g: &C) -> Form<C> {
    match horizontal_basis(n, degree).first() {
        Some(m) => Form::from_terms(n, degree, [(*m, g.clone())]),
        None => Form::zero(n, degree),
    }
}

/// Forms that vanish iff the identity holds. With `corrupt`, the rhs (or the
/// expression, for membership) is shifted by [`corruption`].
pub fn residuals<F: Frame>(
    id: IdentityId,
    ctx: &HeisenbergContext<F>,
    g: &F::Coeff,
    omega: &Form<F::Coeff>,
    corrupt: bool,
) -> Result<Vec<Form<F::Coeff>>> {
    Ok(residuals_of(&sides(id, ctx, g, omega)?, ctx, g, corrupt))
}

/// [`residuals`] from already computed sides.
pub fn residuals_of<F: Frame>(
    sides: &Sides<F::Coeff>,
    ctx: &HeisenbergContext<F>,
    g: &F::Coeff,
    corrupt: bool,
) -> Vec<Form<F::Coeff>> {
    let n = ctx.n();
    let lhs = &sides.lhs;
    match &sides.rhs {
        Some(rhs) => {
            let rhs = if corrupt {
                rhs + &corruption(n, rhs.degree(), g)
            } else {
                rhs.clone()
            };
            vec![lhs - &rhs]
        }
        None => {
            let expr = if corrupt {
                lhs + &corruption(n, lhs.degree(), g)
            } else {
                lhs.clone()
            };
            vec![expr.wedge(&ctx.theta()), expr.wedge(&ctx.dtheta())]
        }
    }
}
