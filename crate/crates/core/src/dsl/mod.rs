//! Textual language for scalars and forms.
//!
//! ```text
//! expr    := product (('+' | '-') product)*
//! product := unary ('*' unary)*
//! unary   := '-' unary | wedge
//! wedge   := atom ('^' atom)*
//! atom    := INT ('/' INT)? | SYMBOL | COORD | COVECTOR
//!          | DERIV '(' expr ')' | '(' expr ')'
//! ```
//!
//! Covectors are `dxN`, `dyN` and `theta`; derivatives `XN`, `YN`, `T`;
//! coordinates `xN`, `yN`, `t`. Every expression must be homogeneous; the
//! zero scalar is accepted as a summand of any degree.

mod lexer;
mod render;

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::calculus::HeisenbergContext;
use crate::exterior::Form;
use crate::scalar::{Coordinate, Letter, ScalarAlgebra, ScalarExpr};

use lexer::{Token, TokenKind};
pub use render::{form_json, render_form, render_scalar, scalar_json, Format};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("covector `{name}` is out of range for n = {n}")]
    CovectorOutOfRange { name: String, n: usize },
    #[error("derivative `{name}` is out of range for n = {n}")]
    DerivativeOutOfRange { name: String, n: usize },
    #[error("coordinate `{name}` is out of range for n = {n}")]
    CoordinateOutOfRange { name: String, n: usize },
    #[error("mixed degrees: {left} and {right}")]
    MixedDegree { left: usize, right: usize },
    #[error("derivative of a {degree}-form; derivatives apply to scalars")]
    NonScalarArgument { degree: usize },
    #[error("`*` between a {left}-form and a {right}-form; use `^` to wedge forms")]
    FormProduct { left: usize, right: usize },
    #[error("expected a {expected}-form, found degree {found}")]
    WrongDegree { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
}

/// Parses `src` on `H^n` with the derivative rules of `ctx`.
pub fn parse(src: &str, ctx: &HeisenbergContext) -> Result<Form, ParseError> {
    parse_in(src, ctx.algebra())
}

/// Parses `src` with an explicit scalar algebra. Scalars come back as
/// 0-forms.
pub fn parse_in(src: &str, algebra: &ScalarAlgebra) -> Result<Form, ParseError> {
    let tokens = lexer::tokenize(src)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        algebra,
    };
    let value = parser.expr()?;
    let end = parser.peek();
    if end.kind != TokenKind::End {
        return Err(parser.error_at(
            end,
            ParseErrorKind::Syntax(format!("unexpected {}", end.kind)),
        ));
    }
    Ok(value)
}

/// Parses and requires the given degree. A literal zero is lifted to the
/// zero form of that degree.
pub fn parse_with_degree(
    src: &str,
    algebra: &ScalarAlgebra,
    degree: usize,
) -> Result<Form, ParseError> {
    let value = parse_in(src, algebra)?;
    if value.degree() == degree {
        return Ok(value);
    }
    if value.is_zero() {
        return Ok(Form::zero(algebra.n(), degree));
    }
    Err(ParseError {
        kind: ParseErrorKind::WrongDegree {
            expected: degree,
            found: value.degree(),
        },
        line: 1,
        column: 1,
    })
}

pub fn parse_scalar(src: &str, algebra: &ScalarAlgebra) -> Result<ScalarExpr, ParseError> {
    Ok(parse_with_degree(src, algebra, 0)?
        .as_scalar()
        .expect("degree 0"))
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    algebra: &'a ScalarAlgebra,
}

impl Parser<'_> {
    fn n(&self) -> usize {
        self.algebra.n()
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.kind != TokenKind::End {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, token: &Token, kind: ParseErrorKind) -> ParseError {
        ParseError {
            kind,
            line: token.line,
            column: token.column,
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<Token, ParseError> {
        let t = self.next();
        if t.kind == kind {
            Ok(t)
        } else {
            Err(self.error_at(
                &t,
                ParseErrorKind::Syntax(format!("expected {kind}, found {}", t.kind)),
            ))
        }
    }

    fn expr(&mut self) -> Result<Form, ParseError> {
        let mut acc = self.product()?;
        loop {
            let op = self.peek().clone();
            let negate = match op.kind {
                TokenKind::Plus => false,
                TokenKind::Minus => true,
                _ => return Ok(acc),
            };
            self.next();
            let rhs = self.product()?;
            let rhs = if negate { -rhs } else { rhs };
            acc = self.add(acc, rhs, &op)?;
        }
    }

    fn add(&self, a: Form, b: Form, at: &Token) -> Result<Form, ParseError> {
        if a.degree() == b.degree() {
            return Ok(&a + &b);
        }
        match (
            a.degree() == 0 && a.is_zero(),
            b.degree() == 0 && b.is_zero(),
        ) {
            (true, _) => Ok(b),
            (_, true) => Ok(a),
            _ => Err(self.error_at(
                at,
                ParseErrorKind::MixedDegree {
                    left: a.degree(),
                    right: b.degree(),
                },
            )),
        }
    }

    fn product(&mut self) -> Result<Form, ParseError> {
        let mut acc = self.unary()?;
        while self.peek().kind == TokenKind::Star {
            let op = self.next();
            let rhs = self.unary()?;
            acc = match (acc.as_scalar(), rhs.as_scalar()) {
                (Some(a), _) => rhs.times(&a),
                (_, Some(b)) => acc.times(&b),
                _ => {
                    return Err(self.error_at(
                        &op,
                        ParseErrorKind::FormProduct {
                            left: acc.degree(),
                            right: rhs.degree(),
                        },
                    ))
                }
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Form, ParseError> {
        if self.peek().kind == TokenKind::Minus {
            self.next();
            return Ok(-self.unary()?);
        }
        self.wedge()
    }

    fn wedge(&mut self) -> Result<Form, ParseError> {
        let mut acc = self.atom()?;
        while self.peek().kind == TokenKind::Caret {
            let op = self.next();
            let rhs = self.atom()?;
            if acc.degree() + rhs.degree() > 2 * self.n() + 1 {
                return Err(self.error_at(
                    &op,
                    ParseErrorKind::Syntax("wedge exceeds the top degree".into()),
                ));
            }
            acc = acc.wedge(&rhs);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Form, ParseError> {
        let n = self.n();
        let t = self.next();
        match &t.kind {
            TokenKind::Int(p) => {
                let mut q = BigRational::from_integer(p.clone());
                if self.peek().kind == TokenKind::Slash {
                    self.next();
                    let d = self.next();
                    let TokenKind::Int(den) = &d.kind else {
                        return Err(self.error_at(
                            &d,
                            ParseErrorKind::Syntax("expected a denominator".into()),
                        ));
                    };
                    if den.is_zero() {
                        return Err(
                            self.error_at(&d, ParseErrorKind::Syntax("zero denominator".into()))
                        );
                    }
                    q = BigRational::new(p.clone(), den.clone());
                }
                Ok(Form::scalar(n, ScalarExpr::constant(q)))
            }
            TokenKind::LParen => {
                let inner = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(inner)
            }
            TokenKind::Ident(name) => self.identifier(name.clone(), &t),
            other => Err(self.error_at(&t, ParseErrorKind::Syntax(format!("unexpected {other}")))),
        }
    }

    fn identifier(&mut self, name: String, at: &Token) -> Result<Form, ParseError> {
        let n = self.n();
        if name == "theta" {
            return Ok(Form::theta(n));
        }
        if let Some((prefix, j)) = split_index(&name) {
            let in_range = (1..=n).contains(&j);
            match prefix {
                "dx" | "dy" => {
                    if !in_range {
                        return Err(
                            self.error_at(at, ParseErrorKind::CovectorOutOfRange { name, n })
                        );
                    }
                    let index = if prefix == "dx" { j } else { j + n };
                    return Ok(Form::covector(n, index));
                }
                "X" | "Y" => {
                    if !in_range {
                        return Err(
                            self.error_at(at, ParseErrorKind::DerivativeOutOfRange { name, n })
                        );
                    }
                    let letter = if prefix == "X" {
                        Letter::X(j as u8)
                    } else {
                        Letter::Y(j as u8)
                    };
                    return self.derivative(letter);
                }
                "x" | "y" => {
                    if !in_range {
                        return Err(
                            self.error_at(at, ParseErrorKind::CoordinateOutOfRange { name, n })
                        );
                    }
                    let c = if prefix == "x" {
                        Coordinate::X(j as u8)
                    } else {
                        Coordinate::Y(j as u8)
                    };
                    return Ok(Form::scalar(n, ScalarExpr::coordinate(c)));
                }
                _ => {}
            }
        }
        match name.as_str() {
            "T" => self.derivative(Letter::T),
            "t" => Ok(Form::scalar(n, ScalarExpr::coordinate(Coordinate::T))),
            _ => Ok(Form::scalar(n, ScalarExpr::symbol(&name))),
        }
    }

    fn derivative(&mut self, letter: Letter) -> Result<Form, ParseError> {
        self.expect(TokenKind::LParen)?;
        let start = self.peek().clone();
        let arg = self.expr()?;
        self.expect(TokenKind::RParen)?;
        let Some(scalar) = arg.as_scalar() else {
            return Err(self.error_at(
                &start,
                ParseErrorKind::NonScalarArgument {
                    degree: arg.degree(),
                },
            ));
        };
        Ok(Form::scalar(self.n(), self.algebra.apply(letter, &scalar)))
    }
}

/// `"dx12"` → `("dx", 12)`. Leading zeros and missing digits do not count.
fn split_index(name: &str) -> Option<(&str, usize)> {
    let cut = name.find(|c: char| c.is_ascii_digit())?;
    let (prefix, digits) = name.split_at(cut);
    if digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let j: usize = digits.parse().ok()?;
    Some((prefix, j))
}
