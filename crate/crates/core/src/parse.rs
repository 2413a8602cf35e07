//! Recursive-descent parser for scalar, form and vector-field literals.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := factor (('*' | '/') factor)*
//! factor  := '-' factor | base ('^' (unsigned-int | base))*
//! base    := int | identifier | 'd'identifier | '@'identifier | '(' expr ')'
//! ```
//!
//! `^` after a scalar is a power; between forms it is the wedge product.
//! `d<name>` is the differential of coordinate `name` and `@<name>` the
//! coordinate vector field. Whitespace is insignificant.

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::exterior::{DifferentialForm, VectorField};
use crate::field::Field;
use crate::scalar::{Patch, ScalarField};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at byte {offset}: {kind}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: &'static str, found: String },
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("division by zero")]
    ZeroDenominator,
    #[error("exponent {0} is too large")]
    ExponentTooLarge(String),
    #[error("type error: {0}")]
    Type(String),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(String),
    Ident(String),
    Vector(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(s) => format!("integer `{s}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Vector(s) => format!("`@{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let ident_end = |mut j: usize| {
        while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
            j += 1;
        }
        j
    };
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        let tok = match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
                out.push((start, Tok::Int(text[start..j].to_string())));
                continue;
            }
            b'@' => {
                let j = ident_end(i + 1);
                if j == i + 1 || bytes[i + 1].is_ascii_digit() {
                    return Err(ParseError {
                        offset: i,
                        kind: ParseErrorKind::Unexpected {
                            expected: "coordinate after `@`",
                            found: "nothing".into(),
                        },
                    });
                }
                i = j;
                out.push((start, Tok::Vector(text[start + 1..j].to_string())));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let j = ident_end(i);
                i = j;
                out.push((start, Tok::Ident(text[start..j].to_string())));
                continue;
            }
            _ => {
                let c = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    offset: i,
                    kind: ParseErrorKind::UnexpectedChar(c),
                });
            }
        };
        out.push((start, tok));
        i += 1;
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

/// A parsed literal; forms of degree 0 are reported as scalars.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Scalar(ScalarField),
    Form(DifferentialForm),
    Vector(VectorField),
}

impl Value {
    fn kind(&self) -> String {
        match self {
            Value::Scalar(_) => "scalar".into(),
            Value::Form(f) => format!("{}-form", f.degree()),
            Value::Vector(_) => "vector field".into(),
        }
    }
}

struct Parser<'a> {
    patch: &'a Patch,
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> (usize, Tok) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, offset: usize, kind: ParseErrorKind) -> Result<T, ParseError> {
        Err(ParseError { offset, kind })
    }

    fn type_err<T>(&self, offset: usize, msg: String) -> Result<T, ParseError> {
        self.err(offset, ParseErrorKind::Type(msg))
    }

    fn expr(&mut self) -> Result<Value, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let sign = match self.peek() {
                Tok::Plus => 1,
                Tok::Minus => -1,
                _ => return Ok(lhs),
            };
            let (off, _) = self.bump();
            let rhs = self.term()?;
            lhs = self.add(off, lhs, rhs, sign)?;
        }
    }

    fn term(&mut self) -> Result<Value, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    let (off, _) = self.bump();
                    let rhs = self.factor()?;
                    lhs = self.mul(off, lhs, rhs)?;
                }
                Tok::Slash => {
                    let (off, _) = self.bump();
                    let rhs = self.factor()?;
                    lhs = self.div(off, lhs, rhs)?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Value, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            let v = self.factor()?;
            return Ok(match v {
                Value::Scalar(s) => Value::Scalar(-s),
                Value::Form(f) => Value::Form(-&f),
                Value::Vector(x) => Value::Vector(-&x),
            });
        }
        let mut lhs = self.base()?;
        while *self.peek() == Tok::Caret {
            let (off, _) = self.bump();
            lhs = match (lhs, self.peek().clone()) {
                (Value::Scalar(s), Tok::Int(digits)) => {
                    let (eoff, _) = self.bump();
                    let e: u32 = match digits.parse() {
                        Ok(e) if e <= 10_000 => e,
                        _ => return self.err(eoff, ParseErrorKind::ExponentTooLarge(digits)),
                    };
                    Value::Scalar(s.pow(e))
                }
                (Value::Form(a), _) => match self.base()? {
                    Value::Form(b) => Value::Form(a.wedge(&b)),
                    other => {
                        return self.type_err(
                            off,
                            format!("cannot wedge a {}-form with a {}", a.degree(), other.kind()),
                        )
                    }
                },
                (other, _) => {
                    return self.type_err(
                        off,
                        format!("`^` after a {} needs an unsigned integer exponent", other.kind()),
                    )
                }
            };
        }
        Ok(lhs)
    }

    fn base(&mut self) -> Result<Value, ParseError> {
        let (off, tok) = self.bump();
        match tok {
            Tok::Int(digits) => {
                let n: BigInt = digits.parse().expect("digits");
                Ok(Value::Scalar(ScalarField::constant(Rational::from_integer(n))))
            }
            Tok::Ident(name) => {
                if let Some(i) = self.patch.index_of(&name) {
                    return Ok(Value::Scalar(self.patch.coordinate(i)));
                }
                if let Some(i) = name.strip_prefix('d').and_then(|rest| self.patch.index_of(rest)) {
                    return Ok(Value::Form(DifferentialForm::differential(self.patch, i)));
                }
                self.err(off, ParseErrorKind::UnknownIdentifier(name))
            }
            Tok::Vector(name) => match self.patch.index_of(&name) {
                Some(i) => Ok(Value::Vector(VectorField::coordinate(self.patch, i))),
                None => self.err(off, ParseErrorKind::UnknownIdentifier(format!("@{name}"))),
            },
            Tok::LParen => {
                let v = self.expr()?;
                match self.bump() {
                    (_, Tok::RParen) => Ok(v),
                    (o, t) => self.err(
                        o,
                        ParseErrorKind::Unexpected {
                            expected: "`)`",
                            found: t.describe(),
                        },
                    ),
                }
            }
            t => self.err(
                off,
                ParseErrorKind::Unexpected {
                    expected: "a number, identifier or `(`",
                    found: t.describe(),
                },
            ),
        }
    }

    fn add(&self, off: usize, a: Value, b: Value, sign: i32) -> Result<Value, ParseError> {
        let neg = sign < 0;
        Ok(match (a, b) {
            (Value::Scalar(a), Value::Scalar(b)) => Value::Scalar(if neg { &a - &b } else { &a + &b }),
            (Value::Form(a), Value::Form(b)) if a.degree() == b.degree() => {
                Value::Form(if neg { &a - &b } else { &a + &b })
            }
            (Value::Vector(a), Value::Vector(b)) => Value::Vector(if neg { &a - &b } else { &a + &b }),
            // a literal zero is compatible with any kind
            (Value::Scalar(z), other) if z.is_zero() => match other {
                Value::Scalar(_) => unreachable!(),
                Value::Form(f) => Value::Form(if neg { -&f } else { f }),
                Value::Vector(v) => Value::Vector(if neg { -&v } else { v }),
            },
            (other, Value::Scalar(z)) if z.is_zero() => other,
            (a, b) => return self.type_err(off, format!("cannot add a {} and a {}", a.kind(), b.kind())),
        })
    }

    fn mul(&self, off: usize, a: Value, b: Value) -> Result<Value, ParseError> {
        Ok(match (a, b) {
            (Value::Scalar(a), Value::Scalar(b)) => Value::Scalar(&a * &b),
            (Value::Scalar(s), Value::Form(f)) | (Value::Form(f), Value::Scalar(s)) => Value::Form(f.scale(&s)),
            (Value::Scalar(s), Value::Vector(v)) | (Value::Vector(v), Value::Scalar(s)) => Value::Vector(v.scale(&s)),
            (a, b) => {
                return self.type_err(
                    off,
                    format!("cannot multiply a {} by a {} (use `^` for wedge)", a.kind(), b.kind()),
                )
            }
        })
    }

    fn div(&self, off: usize, a: Value, b: Value) -> Result<Value, ParseError> {
        let Value::Scalar(d) = b else {
            return self.type_err(off, format!("cannot divide by a {}", b.kind()));
        };
        let Some(inv) = d.inverse() else {
            return self.err(off, ParseErrorKind::ZeroDenominator);
        };
        Ok(match a {
            Value::Scalar(s) => Value::Scalar(&s * &inv),
            Value::Form(f) => Value::Form(f.scale(&inv)),
            Value::Vector(v) => Value::Vector(v.scale(&inv)),
        })
    }
}

/// Parses any literal on `patch`.
pub fn parse_value(patch: &Patch, text: &str) -> Result<Value, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser { patch, toks, pos: 0 };
    let v = p.expr()?;
    match p.peek() {
        Tok::End => Ok(v),
        t => p.err(
            p.offset(),
            ParseErrorKind::Unexpected {
                expected: "an operator or end of input",
                found: t.describe(),
            },
        ),
    }
}

pub fn parse_scalar(patch: &Patch, text: &str) -> Result<ScalarField, ParseError> {
    match parse_value(patch, text)? {
        Value::Scalar(s) => Ok(s),
        other => Err(ParseError {
            offset: 0,
            kind: ParseErrorKind::Type(format!("expected a scalar, found a {}", other.kind())),
        }),
    }
}

/// Parses a form literal. With `degree` given, a literal `0` becomes the
/// zero form of that degree and any other degree is rejected.
pub fn parse_form(patch: &Patch, text: &str, degree: Option<usize>) -> Result<DifferentialForm, ParseError> {
    let form = match parse_value(patch, text)? {
        Value::Form(f) => f,
        Value::Scalar(s) if s.is_zero() => DifferentialForm::zero(patch, degree.unwrap_or(0)),
        Value::Scalar(s) => DifferentialForm::scalar(patch, s),
        Value::Vector(_) => {
            return Err(ParseError {
                offset: 0,
                kind: ParseErrorKind::Type("expected a form, found a vector field".into()),
            })
        }
    };
    match degree {
        Some(k) if k != form.degree() => Err(ParseError {
            offset: 0,
            kind: ParseErrorKind::Type(format!("expected a {k}-form, found a {}-form", form.degree())),
        }),
        _ => Ok(form),
    }
}

pub fn parse_vector_field(patch: &Patch, text: &str) -> Result<VectorField, ParseError> {
    match parse_value(patch, text)? {
        Value::Vector(v) => Ok(v),
        Value::Scalar(s) if s.is_zero() => Ok(VectorField::zero(patch)),
        other => Err(ParseError {
            offset: 0,
            kind: ParseErrorKind::Type(format!("expected a vector field, found a {}", other.kind())),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;
    use num_traits::One;

    fn px() -> Patch {
        Patch::new(["x"]).unwrap()
    }

    #[test]
    fn scalar_examples() {
        let p = px();
        let f = parse_scalar(&p, "x^2 + 1/2").unwrap();
        assert_eq!(p.show(&f).to_string(), "x^2 + 1/2");
        assert_eq!(parse_scalar(&p, "x/(x)").unwrap(), ScalarField::one());
        let q = Patch::new(["x1", "y1"]).unwrap();
        let g = parse_scalar(&q, "(1+x1^2)").unwrap();
        assert_eq!(q.show(&g).to_string(), "x1^2 + 1");
    }

    #[test]
    fn unary_minus_and_precedence() {
        let p = px();
        assert_eq!(parse_scalar(&p, "-x^2").unwrap(), -parse_scalar(&p, "x*x").unwrap());
        assert_eq!(parse_scalar(&p, "2*-x").unwrap(), parse_scalar(&p, "-2*x").unwrap());
        assert_eq!(parse_scalar(&p, "1 - 2 - 3").unwrap(), ScalarField::from_integer(-4));
        assert_eq!(parse_scalar(&p, "12/4/3").unwrap(), ScalarField::one());
        assert_eq!(
            parse_scalar(&p, " ( x + 1 ) ^ 2 ").unwrap(),
            parse_scalar(&p, "x^2+2*x+1").unwrap()
        );
    }

    #[test]
    fn errors_carry_byte_offsets() {
        let p = px();
        let e = parse_scalar(&p, "x + y").unwrap_err();
        assert_eq!(e.offset, 4);
        assert_eq!(e.kind, ParseErrorKind::UnknownIdentifier("y".into()));
        let e = parse_scalar(&p, "1/0").unwrap_err();
        assert_eq!((e.offset, e.kind), (1, ParseErrorKind::ZeroDenominator));
        let e = parse_scalar(&p, "x/(x-x)").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::ZeroDenominator);
        let e = parse_scalar(&p, "(x + 1").unwrap_err();
        assert_eq!(e.offset, 6);
        let e = parse_scalar(&p, "x $ 1").unwrap_err();
        assert_eq!((e.offset, e.kind), (2, ParseErrorKind::UnexpectedChar('$')));
        let e = parse_scalar(&p, "x x").unwrap_err();
        assert_eq!(e.offset, 2);
    }

    #[test]
    fn form_and_vector_literals() {
        let p = Patch::new(["x", "y"]).unwrap();
        let f = parse_form(&p, "x^2*dx^dy", Some(2)).unwrap();
        assert_eq!(f.coefficient(&[0, 1]), parse_scalar(&p, "x^2").unwrap());
        assert!(parse_form(&p, "dx^2", None).is_err());
        assert!(parse_form(&p, "dx*dy", None).is_err());
        assert!(parse_form(&p, "dx + dx^dy", None).is_err());
        assert_eq!(parse_form(&p, "0", Some(2)).unwrap(), DifferentialForm::zero(&p, 2));
        assert!(parse_form(&p, "dx", Some(2)).is_err());
        let v = parse_vector_field(&p, "x*@y - y*@x").unwrap();
        assert_eq!(v.component(0), &-parse_scalar(&p, "y").unwrap());
        assert!(parse_vector_field(&p, "@z").is_err());
        assert_eq!(parse_vector_field(&p, "0").unwrap(), VectorField::zero(&p));
        assert!(parse_scalar(&p, "dx").is_err());
    }

    #[test]
    fn polynomial_from_literal() {
        let p = px();
        let f = parse_scalar(&p, "3*x^2").unwrap();
        assert_eq!(
            f.numerator(),
            &Polynomial::var(0).pow(2).scale(&Rational::from_integer(3.into()))
        );
    }
}
