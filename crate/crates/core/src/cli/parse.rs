//! Curve file grammar.
//!
//! ```text
//! # comment
//! branch a: x = t^2, y = t^3 - 1/2*t^4
//! ```
//!
//! One branch per line; `<poly>` is a signed sum of terms `c*t^k`, `c*t`,
//! `t^k`, `t` or a bare coefficient `c`, where `c` is an integer or `p/q`.
//! Blank lines and `#` comments are ignored.

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::curve::BranchParam;
use crate::series::{Rat, UniPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, column {col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("line {line}, column {col}: exponent {exponent} is not positive (branches must pass through the origin)")]
    NonPositiveExponent {
        line: usize,
        col: usize,
        exponent: i64,
    },
    #[error("line {line}, column {col}: zero denominator")]
    ZeroDenominator { line: usize, col: usize },
}

impl ParseError {
    pub fn position(&self) -> (usize, usize) {
        match self {
            ParseError::Syntax { line, col, .. }
            | ParseError::NonPositiveExponent { line, col, .. }
            | ParseError::ZeroDenominator { line, col } => (*line, *col),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ParseError::Syntax { .. } => "SyntaxError",
            ParseError::NonPositiveExponent { .. } => "NonPositiveExponent",
            ParseError::ZeroDenominator { .. } => "ZeroDenominator",
        }
    }
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Cursor {
    fn new(src: &str, line: usize) -> Self {
        Self {
            chars: src.chars().collect(),
            pos: 0,
            line,
        }
    }

    fn col(&self) -> usize {
        self.pos + 1
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn syntax(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line: self.line,
            col: self.col(),
            message: message.into(),
        }
    }

    fn expect(&mut self, want: char) -> Result<(), ParseError> {
        match self.peek() {
            Some(c) if c == want => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => Err(self.syntax(format!("expected '{want}', found '{c}'"))),
            None => Err(self.syntax(format!("expected '{want}', found end of line"))),
        }
    }

    fn keyword(&mut self, word: &str) -> Result<(), ParseError> {
        self.skip_ws();
        let end = self.pos + word.chars().count();
        let found: String = self.chars[self.pos..end.min(self.chars.len())].iter().collect();
        if found == word {
            self.pos = end;
            Ok(())
        } else {
            Err(self.syntax(format!("expected '{word}'")))
        }
    }

    fn digits(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        (self.pos > start).then(|| self.chars[start..self.pos].iter().collect())
    }

    fn name(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
        {
            self.pos += 1;
        }
        (self.pos > start).then(|| self.chars[start..self.pos].iter().collect())
    }

    fn coefficient(&mut self) -> Result<Option<Rat>, ParseError> {
        let Some(num) = self.digits() else {
            return Ok(None);
        };
        let num: BigInt = num.parse().expect("digits");
        if self.peek() == Some('/') {
            self.pos += 1;
            let col = self.col();
            let den = self
                .digits()
                .ok_or_else(|| self.syntax("expected denominator"))?;
            let den: BigInt = den.parse().expect("digits");
            if den.is_zero() {
                return Err(ParseError::ZeroDenominator {
                    line: self.line,
                    col,
                });
            }
            return Ok(Some(Rat::new(num, den)));
        }
        Ok(Some(Rat::from_integer(num)))
    }

    /// `t` or `t^k`; returns the exponent and the column where it starts.
    fn power(&mut self) -> Result<(i64, usize), ParseError> {
        self.expect('t')?;
        if self.peek() != Some('^') {
            return Ok((1, self.col()));
        }
        self.pos += 1;
        let col = self.col();
        let negative = if self.peek() == Some('-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let digits = self.digits().ok_or_else(|| self.syntax("expected exponent"))?;
        let e: i64 = digits
            .parse()
            .map_err(|_| self.syntax("exponent too large"))?;
        Ok((if negative { -e } else { e }, col))
    }

    fn term(&mut self) -> Result<(Rat, i64, usize), ParseError> {
        let start = {
            self.skip_ws();
            self.col()
        };
        match self.coefficient()? {
            Some(c) => {
                if self.peek() == Some('*') {
                    self.pos += 1;
                    let (e, col) = self.power()?;
                    Ok((c, e, col))
                } else {
                    Ok((c, 0, start))
                }
            }
            None if self.peek() == Some('t') => {
                let (e, col) = self.power()?;
                Ok((Rat::from_integer(1.into()), e, col))
            }
            None => Err(self.syntax("expected a term")),
        }
    }

    fn poly(&mut self) -> Result<UniPoly, ParseError> {
        let mut p = UniPoly::zero();
        let mut first = true;
        loop {
            let negative = match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    false
                }
                Some('-') => {
                    self.pos += 1;
                    true
                }
                _ if first => false,
                _ => break,
            };
            first = false;
            let (c, e, col) = self.term()?;
            if c.is_zero() {
                continue;
            }
            if e <= 0 {
                return Err(ParseError::NonPositiveExponent {
                    line: self.line,
                    col,
                    exponent: e,
                });
            }
            let e = u32::try_from(e).map_err(|_| self.syntax("exponent too large"))?;
            p.add_term(e, if negative { -c } else { c });
        }
        Ok(p)
    }
}

fn parse_line(text: &str, line: usize) -> Result<BranchParam, ParseError> {
    let mut cur = Cursor::new(text, line);
    cur.keyword("branch")?;
    let name = cur.name();
    cur.expect(':')?;
    cur.keyword("x")?;
    cur.expect('=')?;
    let x = cur.poly()?;
    cur.expect(',')?;
    cur.keyword("y")?;
    cur.expect('=')?;
    let y = cur.poly()?;
    if let Some(c) = cur.peek() {
        return Err(cur.syntax(format!("unexpected '{c}'")));
    }
    Ok(BranchParam { name, x, y })
}

/// Parses a curve file into its branches, in file order.
pub fn parse_curve(text: &str) -> Result<Vec<BranchParam>, ParseError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        out.push(parse_line(body, idx + 1)?);
    }
    Ok(out)
}

/// Writes branches back in the file grammar.
pub fn render_curve(branches: &[BranchParam]) -> String {
    branches.iter().map(|b| format!("{b}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{rat, ratio};

    #[test]
    fn cusp_line() {
        let bs = parse_curve("branch a: x = t^2, y = t^3").unwrap();
        assert_eq!(bs.len(), 1);
        assert_eq!(bs[0].name.as_deref(), Some("a"));
        assert_eq!(bs[0].x, UniPoly::monomial(2, rat(1)));
        assert_eq!(bs[0].y, UniPoly::monomial(3, rat(1)));
    }

    #[test]
    fn node_two_lines() {
        let bs = parse_curve("branch a: x = t, y = 0\nbranch b: x = 0, y = t").unwrap();
        assert_eq!(bs.len(), 2);
        assert!(bs[0].y.is_zero());
        assert!(bs[1].x.is_zero());
        assert_eq!(bs[1].y, UniPoly::monomial(1, rat(1)));
    }

    #[test]
    fn constant_term_rejected() {
        let err = parse_curve("branch a: x = t^2, y = t^3 + 1").unwrap_err();
        assert!(matches!(err, ParseError::NonPositiveExponent { line: 1, exponent: 0, .. }));
        let err = parse_curve("branch a: x = t^-1, y = t").unwrap_err();
        assert!(matches!(err, ParseError::NonPositiveExponent { exponent: -1, .. }));
    }

    #[test]
    fn fractions_signs_comments() {
        let text = "# header\n\n  branch q : x = -1/2*t^3 + t ,y = 3*t^2-t^2 # trailing\n";
        let bs = parse_curve(text).unwrap();
        assert_eq!(
            bs[0].x,
            UniPoly::from_terms([(1, rat(1)), (3, ratio(-1, 2))])
        );
        assert_eq!(bs[0].y, UniPoly::monomial(2, rat(2)));
        assert_eq!(parse_curve("branch: x = t, y = 0*t^4").unwrap()[0].name, None);
    }

    #[test]
    fn error_positions() {
        let err = parse_curve("branch a: x = t^2, y = 1/0*t").unwrap_err();
        assert_eq!(err, ParseError::ZeroDenominator { line: 1, col: 26 });
        let err = parse_curve("\nbranch a x = t").unwrap_err();
        assert_eq!(err.position(), (2, 10));
        assert_eq!(err.kind(), "SyntaxError");
        assert!(parse_curve("branch a: x = t, y = t t").is_err());
        assert!(parse_curve("branch a: x = t, y = 2*").is_err());
    }

    #[test]
    fn round_trip() {
        let text = "branch a: x = t^2, y = t^3 - 1/2*t^5\nbranch b: x = -t, y = 0\n";
        let bs = parse_curve(text).unwrap();
        assert_eq!(render_curve(&bs), text);
        assert_eq!(parse_curve(&render_curve(&bs)).unwrap(), bs);
    }
}
