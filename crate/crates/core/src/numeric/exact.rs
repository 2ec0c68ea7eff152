use std::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedMul, ToPrimitive, Zero};

/// An exact rational kept in `i128` while it fits and promoted to a
/// big rational on overflow. Every operation is exact.
#[derive(Clone, PartialEq, Eq)]
pub enum Exact {
    Small(Ratio<i128>),
    Big(BigRational),
}

impl Exact {
    pub fn zero() -> Self {
        Exact::Small(Ratio::from_integer(0))
    }

    pub fn integer(v: i64) -> Self {
        Exact::Small(Ratio::from_integer(i128::from(v)))
    }

    pub fn from_big(q: &BigRational) -> Self {
        match (q.numer().to_i128(), q.denom().to_i128()) {
            (Some(n), Some(d)) if n != i128::MIN => Exact::Small(Ratio::new_raw(n, d)),
            _ => Exact::Big(q.clone()),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Exact::Small(r) => {
                BigRational::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
            }
            Exact::Big(q) => q.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Exact::Small(r) => r.is_zero(),
            Exact::Big(q) => q.is_zero(),
        }
    }

    /// Demotes big values that fit again.
    fn tidy(q: BigRational) -> Self {
        Exact::from_big(&q)
    }

    pub fn add(&self, other: &Exact) -> Exact {
        if let (Exact::Small(a), Exact::Small(b)) = (self, other) {
            if let Some(c) = a.checked_add(b).filter(|c| *c.numer() != i128::MIN) {
                return Exact::Small(c);
            }
        }
        Exact::tidy(self.to_big() + other.to_big())
    }

    pub fn mul(&self, other: &Exact) -> Exact {
        if let (Exact::Small(a), Exact::Small(b)) = (self, other) {
            if let Some(c) = a.checked_mul(b).filter(|c| *c.numer() != i128::MIN) {
                return Exact::Small(c);
            }
        }
        Exact::tidy(self.to_big() * other.to_big())
    }

    pub fn neg(&self) -> Exact {
        match self {
            // Small numerators are never i128::MIN, so negation cannot overflow.
            Exact::Small(r) => Exact::Small(-*r),
            Exact::Big(q) => Exact::Big(-q),
        }
    }
}

impl fmt::Debug for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_big())
    }
}
