//! Text form of polynomials.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := factor (('*' | '/') factor)*
//! factor  := '-' factor | atom ('^' uint)?
//! atom    := rational | identifier | '(' expr ')'
//! ```
//!
//! Division is accepted only by a nonzero rational constant, so `3/2*p1` and
//! `p1^2/2` both parse. The printer emits canonical form: terms from the
//! leading monomial down, coefficient first, variables in declaration order.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{ParseError, ParseErrorKind};
use crate::poly::{format_rational, Monomial, PhasePolynomial, PhaseSpace, Rational};

/// Parses `text` into a canonical polynomial on `space`.
pub fn parse(text: &str, space: &Arc<PhaseSpace>) -> Result<PhasePolynomial, ParseError> {
    let mut parser = Parser {
        src: text,
        pos: 0,
        space,
    };
    let poly = parser.expr()?;
    parser.skip_ws();
    match parser.peek() {
        None => Ok(poly),
        Some(c) => Err(parser.error(ParseErrorKind::UnexpectedChar(c))),
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    space: &'a Arc<PhaseSpace>,
}

impl Parser<'_> {
    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            position: self.pos,
            kind,
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, want: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(want) {
            self.pos += want.len_utf8();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<PhasePolynomial, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<PhasePolynomial, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.factor()?;
            } else if self.eat('/') {
                self.skip_ws();
                let at = self.pos;
                let divisor = self.factor()?;
                let value = divisor.as_constant().ok_or(ParseError {
                    position: at,
                    kind: ParseErrorKind::NonConstantDivisor,
                })?;
                if value.is_zero() {
                    return Err(ParseError {
                        position: at,
                        kind: ParseErrorKind::DivisionByZero,
                    });
                }
                acc = acc.scale(&value.recip());
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<PhasePolynomial, ParseError> {
        if self.eat('-') {
            return Ok(-&self.factor()?);
        }
        let base = self.atom()?;
        if self.eat('^') {
            self.skip_ws();
            let start = self.pos;
            let digits = self.take_while(|c| c.is_ascii_digit());
            if digits.is_empty() {
                self.pos = start;
                return Err(self.error(ParseErrorKind::BadExponent));
            }
            let exp: u32 = digits.parse().map_err(|_| ParseError {
                position: start,
                kind: ParseErrorKind::BadExponent,
            })?;
            // reject `2^3.5` and `q1^2x`
            if matches!(self.peek(), Some(c) if c == '.' || c.is_ascii_alphanumeric() || c == '_')
            {
                return Err(ParseError {
                    position: start,
                    kind: ParseErrorKind::BadExponent,
                });
            }
            return Ok(base.pow(exp));
        }
        Ok(base)
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &str {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
        &self.src[start..self.pos]
    }

    fn atom(&mut self) -> Result<PhasePolynomial, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => Err(self.error(ParseErrorKind::UnexpectedEnd)),
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    let found = self.peek().map(String::from).unwrap_or_default();
                    return Err(match self.peek() {
                        None => self.error(ParseErrorKind::UnexpectedEnd),
                        Some(_) => self.error(ParseErrorKind::Expected {
                            expected: "`)`",
                            found,
                        }),
                    });
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let digits = self.take_while(|c| c.is_ascii_digit());
                let value: BigInt = digits.parse().expect("digit run");
                if matches!(self.peek(), Some(c) if c.is_ascii_alphabetic() || c == '_' || c == '.')
                {
                    let c = self.peek().unwrap();
                    return Err(self.error(ParseErrorKind::UnexpectedChar(c)));
                }
                Ok(PhasePolynomial::constant(
                    self.space,
                    Rational::from_integer(value),
                ))
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let name = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
                let name = name.to_string();
                match self.space.lookup(&name) {
                    Some(index) => Ok(PhasePolynomial::var(self.space, index)),
                    None => Err(ParseError {
                        position: start,
                        kind: ParseErrorKind::UndeclaredIdentifier(name),
                    }),
                }
            }
            Some(c) => Err(self.error(ParseErrorKind::UnexpectedChar(c))),
        }
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, space: &PhaseSpace, m: &Monomial) -> fmt::Result {
    let mut first = true;
    for (index, exp) in m.support() {
        if !first {
            f.write_str("*")?;
        }
        first = false;
        f.write_str(&space.var_name(index))?;
        if exp > 1 {
            write!(f, "^{exp}")?;
        }
    }
    Ok(())
}

impl fmt::Display for PhasePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms().enumerate() {
            let negative = c.is_negative();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let magnitude = c.abs();
            if m.is_one() {
                f.write_str(&format_rational(&magnitude))?;
            } else {
                if !magnitude.is_one() {
                    write!(f, "{}*", format_rational(&magnitude))?;
                }
                write_monomial(f, self.space(), m)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat};

    fn space(n: usize) -> Arc<PhaseSpace> {
        PhaseSpace::new(n, ["k"]).unwrap()
    }

    #[test]
    fn parses_mixed_terms() {
        let s = space(2);
        let f = parse("q1^2*p2 + 3/2*p1", &s).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(
            f.coefficient(&Monomial::from_exponents(vec![2, 0, 0, 1, 0, 0])),
            int(1)
        );
        assert_eq!(
            f.coefficient(&Monomial::from_exponents(vec![0, 0, 1, 0, 0, 0])),
            rat(3, 2)
        );
    }

    #[test]
    fn undeclared_identifier_has_position() {
        let err = parse("q1 + q3", &space(2)).unwrap_err();
        assert_eq!(err.position, 5);
        assert_eq!(err.kind, ParseErrorKind::UndeclaredIdentifier("q3".into()));
        let err = parse("mass*q1", &space(1)).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UndeclaredIdentifier("mass".into()));
    }

    #[test]
    fn commutative_cancellation() {
        assert!(parse("q1*p1 - p1*q1", &space(1)).unwrap().is_zero());
    }

    #[test]
    fn exponent_must_be_uint_literal() {
        let s = space(1);
        for bad in ["q1^-1", "q1^1.5", "q1^p1", "q1^", "q1^(2)"] {
            let err = parse(bad, &s).unwrap_err();
            assert_eq!(err.kind, ParseErrorKind::BadExponent, "{bad}");
        }
    }

    #[test]
    fn syntax_errors() {
        let s = space(1);
        assert_eq!(parse("", &s).unwrap_err().kind, ParseErrorKind::UnexpectedEnd);
        assert_eq!(parse("(q1 + p1", &s).unwrap_err().kind, ParseErrorKind::UnexpectedEnd);
        assert_eq!(
            parse("q1 p1", &s).unwrap_err(),
            ParseError {
                position: 3,
                kind: ParseErrorKind::UnexpectedChar('p')
            }
        );
        assert_eq!(parse("q1 + $", &s).unwrap_err().kind, ParseErrorKind::UnexpectedChar('$'));
        assert_eq!(parse("1/0", &s).unwrap_err().kind, ParseErrorKind::DivisionByZero);
        assert_eq!(parse("1/q1", &s).unwrap_err().kind, ParseErrorKind::NonConstantDivisor);
        assert_eq!(parse("2.5", &s).unwrap_err().kind, ParseErrorKind::UnexpectedChar('.'));
    }

    #[test]
    fn division_by_constants() {
        let s = space(1);
        assert_eq!(
            parse("p1^2/2", &s).unwrap(),
            parse("1/2*p1^2", &s).unwrap()
        );
        assert_eq!(parse("(q1+p1)/(4/2)", &s).unwrap(), parse("1/2*q1 + 1/2*p1", &s).unwrap());
    }

    #[test]
    fn unary_minus_and_parameters() {
        let s = space(1);
        let f = parse("-q1^2 + -(k*E) - -3", &s).unwrap();
        assert_eq!(f.to_string(), "-q1^2 - E*k + 3");
    }

    #[test]
    fn prints_canonical_form() {
        let s = space(2);
        let f = parse("3/2*p1 + p2*q1^2 - 1 + q2*q1 - 2*E", &s).unwrap();
        assert_eq!(f.to_string(), "q1^2*p2 + q1*q2 + 3/2*p1 - 2*E - 1");
        assert_eq!(parse("0*q1", &s).unwrap().to_string(), "0");
        assert_eq!(parse("-1/3", &s).unwrap().to_string(), "-1/3");
    }

    #[test]
    fn print_parse_identity() {
        let s = space(2);
        for text in ["q1^2*p2 + 3/2*p1", "-q1 + p2^3 - 7/5", "E*k*q1*p1 - k^2"] {
            let f = parse(text, &s).unwrap();
            let printed = f.to_string();
            let again = parse(&printed, &s).unwrap();
            assert_eq!(again, f);
            assert_eq!(again.to_string(), printed);
        }
    }
}
