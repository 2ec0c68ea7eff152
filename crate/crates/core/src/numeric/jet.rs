use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::BigRational;

use crate::calculus::{ConventionProfile, Frame};
use crate::exterior::Coefficient;

use super::exact::Exact;
use super::model::CoordinateModel;
use super::poly::PolynomialFunction;

/// Exactness of a constant: it never loses accuracy.
const EXACT: i32 = i32::MAX;

/// Monomials of degree at most `order` in `vars` offsets, with the
/// multiplication and differentiation rules between their indices.
#[derive(Debug)]
struct Tables {
    vars: usize,
    order: u32,
    exponents: Vec<Vec<u32>>,
    degrees: Vec<u32>,
    /// `(i, j, k)` with `m_i m_j = m_k`, sorted by the degree of `m_k`.
    products: Vec<(usize, usize, usize)>,
    /// Per variable, `(i, k, e)` with `∂ m_i = e m_k`.
    partials: Vec<Vec<(usize, usize, u32)>>,
}

type TableCache = HashMap<(usize, u32), Arc<Tables>>;

impl Tables {
    fn get(vars: usize, order: u32) -> Arc<Tables> {
        static CACHE: OnceLock<Mutex<TableCache>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut map = cache.lock().expect("jet table cache poisoned");
        map.entry((vars, order))
            .or_insert_with(|| Arc::new(Tables::build(vars, order)))
            .clone()
    }

    fn build(vars: usize, order: u32) -> Tables {
        let mut exponents: Vec<Vec<u32>> = vec![vec![]];
        for _ in 0..vars {
            exponents = exponents
                .into_iter()
                .flat_map(|e| {
                    let used: u32 = e.iter().sum();
                    (0..=order - used).map(move |k| {
                        let mut next = e.clone();
                        next.push(k);
                        next
                    })
                })
                .collect();
        }
        exponents.sort_by_key(|e| (e.iter().sum::<u32>(), std::cmp::Reverse(e.clone())));
        let degrees: Vec<u32> = exponents.iter().map(|e| e.iter().sum()).collect();
        let index: HashMap<Vec<u32>, usize> = exponents
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, e)| (e, i))
            .collect();
        let mut products = Vec::new();
        for (i, a) in exponents.iter().enumerate() {
            for (j, b) in exponents.iter().enumerate() {
                if degrees[i] + degrees[j] <= order {
                    let sum: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                    products.push((i, j, index[&sum]));
                }
            }
        }
        products.sort_by_key(|&(_, _, k)| degrees[k]);
        let partials = (0..vars)
            .map(|v| {
                exponents
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| e[v] > 0)
                    .map(|(i, e)| {
                        let mut lower = e.clone();
                        lower[v] -= 1;
                        (i, index[&lower], e[v])
                    })
                    .collect()
            })
            .collect();
        Tables {
            vars,
            order,
            exponents,
            degrees,
            products,
            partials,
        }
    }

    fn len(&self) -> usize {
        self.exponents.len()
    }
}

/// A Taylor polynomial at a fixed point, in the offsets from that point,
/// known to be exact up to total degree `valid`. Constants carry no table
/// and are lifted on contact with a jet that has one.
#[derive(Debug, Clone)]
pub struct Jet {
    tables: Option<Arc<Tables>>,
    coeffs: Vec<Exact>,
    valid: i32,
}

impl Jet {
    /// The jet of `f` at `point` up to `order`, from its exact Taylor
    /// coefficients.
    pub fn of(f: &PolynomialFunction, point: &[BigRational], order: u32) -> Self {
        let tables = Tables::get(f.vars(), order);
        let shifted = f.shift_truncated(point, order);
        let mut coeffs = vec![Exact::zero(); tables.len()];
        let index: HashMap<&[u32], usize> = tables
            .exponents
            .iter()
            .enumerate()
            .map(|(i, e)| (e.as_slice(), i))
            .collect();
        for (exps, c) in shifted.terms() {
            coeffs[index[exps.as_slice()]] = Exact::from_big(c);
        }
        Jet {
            tables: Some(tables),
            coeffs,
            valid: order as i32,
        }
        .normalized()
    }

    /// The value at the base point. `None` once repeated differentiation has
    /// used up the order.
    pub fn value(&self) -> Option<BigRational> {
        (self.valid >= 0).then(|| self.coeffs[0].to_big())
    }

    pub fn valid_order(&self) -> i32 {
        self.valid
    }

    fn constant(q: Exact) -> Self {
        Jet {
            tables: None,
            coeffs: vec![q],
            valid: EXACT,
        }
    }

    /// Drops coefficients beyond `valid`; a jet that is not a constant is
    /// never marked exact beyond its table order.
    fn normalized(mut self) -> Self {
        let Some(tables) = &self.tables else {
            return self;
        };
        let nonconstant = self.coeffs[1..].iter().any(|c| !c.is_zero());
        if self.valid == EXACT && nonconstant {
            self.valid = tables.order as i32;
        }
        if self.valid != EXACT {
            for (c, &deg) in self.coeffs.iter_mut().zip(&tables.degrees) {
                if deg as i32 > self.valid {
                    *c = Exact::zero();
                }
            }
        }
        self
    }

    fn lifted(&self, tables: &Arc<Tables>) -> Jet {
        let mut coeffs = vec![Exact::zero(); tables.len()];
        coeffs[0] = self.coeffs[0].clone();
        Jet {
            tables: Some(tables.clone()),
            coeffs,
            valid: self.valid,
        }
    }

    fn align(a: &Jet, b: &Jet) -> (Jet, Jet) {
        match (&a.tables, &b.tables) {
            (None, Some(t)) => (a.lifted(t), b.clone()),
            (Some(t), None) => (a.clone(), b.lifted(t)),
            (Some(s), Some(t)) => {
                assert!(
                    Arc::ptr_eq(s, t),
                    "jets over different variable counts or orders"
                );
                (a.clone(), b.clone())
            }
            (None, None) => (a.clone(), b.clone()),
        }
    }

    fn partial(&self, var: usize) -> Jet {
        let Some(tables) = &self.tables else {
            return Jet::zero();
        };
        let mut coeffs = vec![Exact::zero(); tables.len()];
        for &(i, k, e) in &tables.partials[var] {
            if !self.coeffs[i].is_zero() {
                coeffs[k] = self.coeffs[i].mul(&Exact::integer(i64::from(e)));
            }
        }
        let valid = if self.valid == EXACT {
            EXACT
        } else {
            self.valid - 1
        };
        Jet {
            tables: self.tables.clone(),
            coeffs,
            valid,
        }
        .normalized()
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = Jet::align(self, other);
        a.valid == b.valid && a.coeffs == b.coeffs
    }
}

impl Coefficient for Jet {
    fn zero() -> Self {
        Jet::constant(Exact::zero())
    }

    fn from_rational(q: BigRational) -> Self {
        Jet::constant(Exact::from_big(&q))
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Exact::is_zero)
    }

    fn add(&self, other: &Self) -> Self {
        let (a, b) = Jet::align(self, other);
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(x, y)| x.add(y))
            .collect();
        Jet {
            tables: a.tables,
            coeffs,
            valid: a.valid.min(b.valid),
        }
        .normalized()
    }

    fn mul(&self, other: &Self) -> Self {
        let (a, b) = Jet::align(self, other);
        let valid = a.valid.min(b.valid);
        let Some(tables) = &a.tables else {
            return Jet::constant(a.coeffs[0].mul(&b.coeffs[0]));
        };
        let cap = if valid == EXACT {
            tables.order
        } else {
            valid.max(0) as u32
        };
        let mut coeffs = vec![Exact::zero(); tables.len()];
        for &(i, j, k) in &tables.products {
            if tables.degrees[k] > cap {
                break;
            }
            if a.coeffs[i].is_zero() || b.coeffs[j].is_zero() {
                continue;
            }
            coeffs[k] = coeffs[k].add(&a.coeffs[i].mul(&b.coeffs[j]));
        }
        Jet {
            tables: a.tables.clone(),
            coeffs,
            valid,
        }
        .normalized()
    }

    fn neg(&self) -> Self {
        Jet {
            tables: self.tables.clone(),
            coeffs: self.coeffs.iter().map(Exact::neg).collect(),
            valid: self.valid,
        }
    }

    fn scale(&self, q: &BigRational) -> Self {
        let q = Exact::from_big(q);
        Jet {
            tables: self.tables.clone(),
            coeffs: self.coeffs.iter().map(|c| c.mul(&q)).collect(),
            valid: self.valid,
        }
    }
}

/// The coordinate frame acting on jets at a fixed point.
#[derive(Debug, Clone)]
pub struct JetFrame {
    model: CoordinateModel,
    /// Field components as jets at the base point.
    fields: Vec<Vec<Option<Jet>>>,
}

impl JetFrame {
    /// Field components are affine, so any order of at least one
    /// represents them exactly.
    pub fn new(model: CoordinateModel, point: &[BigRational], order: u32) -> Self {
        let fields = (1..=2 * model.n() + 1)
            .map(|i| {
                model
                    .field(i)
                    .iter()
                    .map(|c| (!c.is_zero()).then(|| Jet::of(c, point, order)))
                    .collect()
            })
            .collect();
        JetFrame { model, fields }
    }
}

impl Frame for JetFrame {
    type Coeff = Jet;

    fn n(&self) -> usize {
        self.model.n()
    }

    fn convention(&self) -> ConventionProfile {
        self.model.convention()
    }

    fn derive(&self, index: usize, c: &Jet) -> Jet {
        let Some(tables) = &c.tables else {
            return Jet::zero();
        };
        debug_assert_eq!(tables.vars, self.model.vars());
        if c.valid == EXACT && c.coeffs[1..].iter().all(Exact::is_zero) {
            return Jet::zero();
        }
        assert!(c.valid > 0, "jet order exhausted; raise the order");
        let mut out = Jet::zero();
        for (v, comp) in self.fields[index - 1].iter().enumerate() {
            if let Some(comp) = comp {
                out = out.add(&comp.mul(&c.partial(v)));
            }
        }
        if out.valid == EXACT {
            out.valid = c.valid - 1;
        }
        out.normalized()
    }
}
