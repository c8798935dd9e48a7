//! Text grammar for symbols.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*      division only by nonzero constants
//! unary := '-' unary | power
//! power := atom ('^' integer)?
//! atom  := integer | variable | 'i' | '(' expr ')'
//! ```
//!
//! Variables are `x1..xN`, `p1..pN`, or `x`, `p` when `N = 1`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Coefficient;

use super::PhasePolynomial;

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Int(BigInt),
    Var(char, Option<usize>),
    Imag,
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((start, Token::Int(s.parse().expect("digits"))));
        } else if c == 'x' || c == 'p' {
            let start = i;
            i += 1;
            let ds = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let idx = if i > ds {
                let s: String = chars[ds..i].iter().collect();
                let k: usize = s.parse().map_err(|_| parse_err(ds, "bad variable index"))?;
                if k == 0 {
                    return Err(parse_err(ds, "variable indices start at 1"));
                }
                Some(k)
            } else {
                None
            };
            out.push((start, Token::Var(c, idx)));
        } else if c == 'i' {
            out.push((i, Token::Imag));
            i += 1;
        } else if "+-*/^()".contains(c) {
            out.push((i, Token::Op(c)));
            i += 1;
        } else if c == '\u{2212}' {
            out.push((i, Token::Op('-')));
            i += 1;
        } else {
            return Err(parse_err(i, &format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

fn parse_err(position: usize, message: &str) -> Error {
    Error::Parse { position, message: message.to_string() }
}

/// Smallest `N` accommodating every variable in `text`.
pub fn infer_dimension(text: &str) -> Result<usize> {
    let toks = tokenize(text)?;
    Ok(toks
        .iter()
        .filter_map(|(_, t)| match t {
            Token::Var(_, Some(k)) => Some(*k),
            Token::Var(_, None) => Some(1),
            _ => None,
        })
        .max()
        .unwrap_or(1))
}

/// Parse `text` as a polynomial on `T*R^N`; `dim = None` infers `N`.
pub fn parse_symbol<C: Coefficient>(text: &str, dim: Option<usize>) -> Result<PhasePolynomial<C>> {
    let dim = match dim {
        Some(d) => d,
        None => infer_dimension(text)?,
    };
    if dim == 0 {
        return Err(parse_err(0, "dimension must be positive"));
    }
    let toks = tokenize(text)?;
    let mut parser = Parser { toks, pos: 0, dim, end: text.chars().count() };
    let p = parser.expr()?;
    if parser.pos < parser.toks.len() {
        return Err(parse_err(parser.toks[parser.pos].0, "unexpected trailing input"));
    }
    Ok(p)
}

struct Parser {
    toks: Vec<(usize, Token)>,
    pos: usize,
    dim: usize,
    end: usize,
}

impl Parser {
    fn peek_op(&self) -> Option<char> {
        match self.toks.get(self.pos) {
            Some((_, Token::Op(c))) => Some(*c),
            _ => None,
        }
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.0).unwrap_or(self.end)
    }

    fn expr<C: Coefficient>(&mut self) -> Result<PhasePolynomial<C>> {
        let mut acc = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == '+' { acc.checked_add(&rhs)? } else { acc.checked_add(&-rhs)? };
        }
        Ok(acc)
    }

    fn term<C: Coefficient>(&mut self) -> Result<PhasePolynomial<C>> {
        let mut acc = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let at = self.here();
            let rhs = self.unary()?;
            if op == '*' {
                acc = acc.checked_mul(&rhs)?;
            } else {
                if !rhs.is_constant() || rhs.is_zero() {
                    return Err(parse_err(at, "division only by a nonzero constant"));
                }
                let inv = C::one()
                    .checked_div(&rhs.constant_term())
                    .ok_or_else(|| parse_err(at, "division by zero"))?;
                acc = acc.scale(&inv);
            }
        }
        Ok(acc)
    }

    fn unary<C: Coefficient>(&mut self) -> Result<PhasePolynomial<C>> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        if self.peek_op() == Some('+') {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn power<C: Coefficient>(&mut self) -> Result<PhasePolynomial<C>> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            let at = self.here();
            match self.toks.get(self.pos) {
                Some((_, Token::Int(n))) => {
                    let n: usize = n
                        .try_into()
                        .ok()
                        .filter(|&k: &usize| k <= super::MAX_TOTAL_DEGREE)
                        .ok_or_else(|| parse_err(at, "exponent too large"))?;
                    self.pos += 1;
                    if base.total_degree() * n > super::MAX_TOTAL_DEGREE {
                        return Err(Error::Capacity("power exceeds the degree cap".into()));
                    }
                    Ok(base.pow(n))
                }
                _ => Err(parse_err(at, "expected a non-negative integer exponent")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom<C: Coefficient>(&mut self) -> Result<PhasePolynomial<C>> {
        let at = self.here();
        let tok = self.toks.get(self.pos).cloned();
        match tok {
            Some((_, Token::Int(n))) => {
                self.pos += 1;
                Ok(PhasePolynomial::constant(self.dim, C::from_rational(&BigRational::from_integer(n))))
            }
            Some((_, Token::Imag)) => {
                self.pos += 1;
                let i = C::from_parts(BigRational::zero(), BigRational::one())
                    .ok_or_else(|| parse_err(at, "imaginary unit in a real coefficient ring"))?;
                Ok(PhasePolynomial::constant(self.dim, i))
            }
            Some((_, Token::Var(c, idx))) => {
                self.pos += 1;
                let k = match idx {
                    Some(k) => k,
                    None if self.dim == 1 => 1,
                    None => return Err(parse_err(at, "bare x/p needs N = 1; use x1, p1, ...")),
                };
                if k > self.dim {
                    return Err(Error::IndexOutOfRange { index: k, dimension: self.dim });
                }
                let var = if c == 'x' { k - 1 } else { self.dim + k - 1 };
                Ok(PhasePolynomial::variable(self.dim, var))
            }
            Some((_, Token::Op('('))) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek_op() != Some(')') {
                    return Err(parse_err(self.here(), "expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            _ => Err(parse_err(at, "expected a number, variable or '('")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussianRational;

    type P = PhasePolynomial<GaussianRational>;

    fn parse(s: &str) -> P {
        parse_symbol(s, None).unwrap()
    }

    #[test]
    fn harmonic_oscillator() {
        let h = parse("1/2*x^2 + 1/2*p^2");
        let expected = (&P::x(1, 0).pow(2) + &P::p(1, 0).pow(2)).scale(&GaussianRational::from_ratio(1, 2));
        assert_eq!(h, expected);
    }

    #[test]
    fn precedence_and_unary_minus() {
        assert_eq!(parse("-x^2"), -P::x(1, 0).pow(2));
        assert_eq!(parse("(x+p)^2 - 2*x*p"), &P::x(1, 0).pow(2) + &P::p(1, 0).pow(2));
        assert_eq!(parse("x/2 - -1"), &P::x(1, 0).scale(&GaussianRational::from_ratio(1, 2)) + &P::one(1));
    }

    #[test]
    fn multi_dimensional() {
        let q: P = parse_symbol("x1*p2 + x2", None).unwrap();
        assert_eq!(q.dimension(), 2);
        assert_eq!(q, &(&P::x(2, 0) * &P::p(2, 1)) + &P::x(2, 1));
        assert!(parse_symbol::<GaussianRational>("x", Some(2)).is_err());
        assert!(matches!(parse_symbol::<GaussianRational>("x3", Some(2)), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn errors_carry_positions() {
        match parse_symbol::<GaussianRational>("x + * p", None) {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_symbol::<GaussianRational>("x/p", None).is_err());
        assert!(parse_symbol::<BigRational>("i*x", None).is_err());
        assert!(parse_symbol::<GaussianRational>("i*x", None).is_ok());
    }
}
