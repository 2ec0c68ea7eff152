use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Signed};
use serde_json::{json, Value};

use crate::exterior::{Form, Monomial};
use crate::scalar::{Factor, FunctionSymbol, Letter, Product, ScalarExpr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    /// Canonical DSL text; parses back to the same value.
    #[default]
    Text,
    /// A JSON document.
    Structured,
    Latex,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Format::Text),
            "structured" | "json" => Ok(Format::Structured),
            "latex" => Ok(Format::Latex),
            other => Err(format!(
                "unknown format `{other}` (expected text, structured or latex)"
            )),
        }
    }
}

pub fn render_scalar(e: &ScalarExpr, format: Format) -> String {
    match format {
        Format::Text => scalar_text(e),
        Format::Latex => scalar_latex(e),
        Format::Structured => scalar_json(e).to_string(),
    }
}

pub fn render_form(f: &Form, format: Format) -> String {
    match format {
        Format::Text => form_text(f),
        Format::Latex => form_latex(f),
        Format::Structured => form_json(f).to_string(),
    }
}

pub fn scalar_json(e: &ScalarExpr) -> Value {
    json!({ "degree": 0, "text": scalar_text(e), "latex": scalar_latex(e) })
}

pub fn form_json(f: &Form) -> Value {
    let terms: Vec<Value> = f
        .terms()
        .map(
            |(m, c)| json!({ "monomial": monomial_text(*m, f.n()), "coefficient": scalar_text(c) }),
        )
        .collect();
    json!({ "n": f.n(), "degree": f.degree(), "text": form_text(f), "latex": form_latex(f), "terms": terms })
}

fn rational_text(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn factor_text(factor: &Factor) -> String {
    let mut s = factor.symbol.to_string();
    for letter in factor.word.letters() {
        s = format!("{letter}({s})");
    }
    s
}

/// `(negative, body)` for one summand; the body of a unit constant is `"1"`.
fn term_text(product: &Product, coef: &BigRational) -> (bool, String) {
    let abs = coef.abs();
    let factors: Vec<String> = product.factors().iter().map(factor_text).collect();
    let body = if product.is_one() {
        rational_text(&abs)
    } else if abs.is_one() {
        factors.join("*")
    } else {
        format!("{}*{}", rational_text(&abs), factors.join("*"))
    };
    (coef.is_negative(), body)
}

fn join_signed(parts: impl IntoIterator<Item = (bool, String)>) -> String {
    let mut out = String::new();
    for (i, (negative, body)) in parts.into_iter().enumerate() {
        match (i, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&body);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn scalar_text(e: &ScalarExpr) -> String {
    join_signed(e.terms().map(|(p, c)| term_text(p, c)))
}

fn covector_name(index: usize, n: usize) -> (&'static str, Option<usize>) {
    if index <= n {
        ("dx", Some(index))
    } else if index <= 2 * n {
        ("dy", Some(index - n))
    } else {
        ("theta", None)
    }
}

fn monomial_text(m: Monomial, n: usize) -> String {
    m.indices()
        .into_iter()
        .map(|i| match covector_name(i, n) {
            (name, Some(j)) => format!("{name}{j}"),
            (name, None) => name.to_string(),
        })
        .collect::<Vec<_>>()
        .join("^")
}

fn form_text(f: &Form) -> String {
    if f.degree() == 0 {
        return scalar_text(&f.as_scalar().expect("degree 0"));
    }
    let n = f.n();
    join_signed(f.terms().map(|(m, c)| {
        let mono = monomial_text(*m, n);
        if c.len() == 1 {
            let (p, q) = c.terms().next().expect("one term");
            let (negative, body) = term_text(p, q);
            if body == "1" {
                (negative, mono)
            } else {
                (negative, format!("{body}*{mono}"))
            }
        } else {
            (false, format!("({})*{mono}", scalar_text(c)))
        }
    }))
}

fn subscript(s: &str) -> String {
    if s.chars().count() == 1 {
        format!("_{s}")
    } else {
        format!("_{{{s}}}")
    }
}

fn rational_latex(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", q.numer(), q.denom())
    }
}

fn symbol_latex(symbol: &FunctionSymbol) -> String {
    let name = symbol.to_string();
    if let Some((base, rest)) = name.split_once('_') {
        if !rest.is_empty() {
            return format!("{base}{}", subscript(&rest.replace('_', ",")));
        }
    }
    match name.find(|c: char| c.is_ascii_digit()) {
        Some(cut) if cut > 0 && name[cut..].bytes().all(|b| b.is_ascii_digit()) => {
            format!("{}{}", &name[..cut], subscript(&name[cut..]))
        }
        _ => name,
    }
}

fn letter_latex(letter: Letter) -> String {
    match letter {
        Letter::X(j) => format!("X{}", subscript(&j.to_string())),
        Letter::Y(j) => format!("Y{}", subscript(&j.to_string())),
        Letter::T => "T".into(),
    }
}

fn factor_latex(factor: &Factor) -> String {
    let mut parts: Vec<String> = factor
        .word
        .letters()
        .iter()
        .rev()
        .map(|l| letter_latex(*l))
        .collect();
    parts.push(symbol_latex(&factor.symbol));
    parts.join(" ")
}

fn term_latex(product: &Product, coef: &BigRational) -> (bool, String) {
    let abs = coef.abs();
    let factors: Vec<String> = product.factors().iter().map(factor_latex).collect();
    let body = if product.is_one() {
        rational_latex(&abs)
    } else if abs.is_one() {
        factors.join(" ")
    } else {
        format!("{} {}", rational_latex(&abs), factors.join(" "))
    };
    (coef.is_negative(), body)
}

fn scalar_latex(e: &ScalarExpr) -> String {
    join_signed(e.terms().map(|(p, c)| term_latex(p, c)))
}

fn monomial_latex(m: Monomial, n: usize) -> String {
    m.indices()
        .into_iter()
        .map(|i| match covector_name(i, n) {
            (name, Some(j)) => format!("{name}{}", subscript(&j.to_string())),
            _ => "\\theta".to_string(),
        })
        .collect::<Vec<_>>()
        .join(" \\wedge ")
}

fn form_latex(f: &Form) -> String {
    if f.degree() == 0 {
        return scalar_latex(&f.as_scalar().expect("degree 0"));
    }
    let n = f.n();
    join_signed(f.terms().map(|(m, c)| {
        let mono = monomial_latex(*m, n);
        if c.len() == 1 {
            let (p, q) = c.terms().next().expect("one term");
            let (negative, body) = term_latex(p, q);
            if body == "1" {
                (negative, mono)
            } else {
                (negative, format!("{body} \\, {mono}"))
            }
        } else {
            (false, format!("\\left({}\\right) {mono}", scalar_latex(c)))
        }
    }))
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&scalar_text(self))
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&form_text(self))
    }
}
