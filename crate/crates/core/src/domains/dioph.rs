//! Polynomial equations in the three variables `x`, `y`, `z`.
//!
//! Syntax: signed monomials built from integer literals and `x`, `y`, `z`
//! with optional `^` exponents, multiplied by juxtaposition or `*`.
//! Whitespace is ignored. An optional `=` separates two sides; without it
//! the expression is set equal to zero.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::{ParseError, ParseErrorKind};

/// Largest exponent accepted by the parser.
pub const MAX_EXPONENT: u32 = 1000;

pub type Exponents = [u32; 3];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiophantineEq {
    /// One term per exponent triple, nonzero coefficients, ordered by
    /// descending total degree then descending exponents.
    terms: Vec<(BigInt, Exponents)>,
}

impl DiophantineEq {
    /// Collects like terms and drops zero coefficients.
    pub fn new(terms: impl IntoIterator<Item = (BigInt, Exponents)>) -> Self {
        let mut terms: Vec<(BigInt, Exponents)> = terms.into_iter().collect();
        terms.sort_by_key(|t| std::cmp::Reverse(order_key(&t.1)));
        let mut merged: Vec<(BigInt, Exponents)> = Vec::with_capacity(terms.len());
        for (c, e) in terms {
            match merged.last_mut() {
                Some(last) if last.1 == e => last.0 += c,
                _ => merged.push((c, e)),
            }
        }
        merged.retain(|(c, _)| !c.is_zero());
        DiophantineEq { terms: merged }
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let chars: Vec<(usize, char)> =
            text.chars().enumerate().filter(|(_, c)| !c.is_whitespace()).map(|(i, c)| (i + 1, c)).collect();
        let eq_pos: Vec<usize> = chars.iter().enumerate().filter(|(_, (_, c))| *c == '=').map(|(i, _)| i).collect();
        match eq_pos.as_slice() {
            [] => Ok(Self::new(parse_side(&chars, text)?)),
            [i] => {
                let lhs = parse_side(&chars[..*i], text)?;
                let rhs = parse_side(&chars[i + 1..], text)?;
                Ok(Self::new(lhs.into_iter().chain(rhs.into_iter().map(|(c, e)| (-c, e)))))
            }
            [_, j, ..] => Err(syntax(chars[*j].0, "more than one `=`")),
        }
    }

    pub fn terms(&self) -> &[(BigInt, Exponents)] {
        &self.terms
    }

    /// Exact value at `(x, y, z)`.
    pub fn eval(&self, point: [u64; 3]) -> BigInt {
        let vars = point.map(BigInt::from);
        self.terms
            .iter()
            .map(|(c, e)| {
                let mut v = c.clone();
                for k in 0..3 {
                    if e[k] > 0 {
                        v *= vars[k].pow(e[k]);
                    }
                }
                v
            })
            .sum()
    }

    /// Whether `(x, y, z)` is a solution.
    pub fn is_solution(&self, point: [u64; 3]) -> bool {
        self.eval(point).is_zero()
    }

    pub fn constant_term(&self) -> BigInt {
        self.terms.iter().find(|(_, e)| *e == [0, 0, 0]).map(|(c, _)| c.clone()).unwrap_or_default()
    }

    /// The same equation with the constant term negated, or `None` when
    /// there is no constant term.
    pub fn with_negated_constant(&self) -> Option<Self> {
        let c = self.constant_term();
        if c.is_zero() {
            return None;
        }
        Some(Self::new(self.terms.iter().map(|(k, e)| if *e == [0, 0, 0] { (-k, *e) } else { (k.clone(), *e) })))
    }
}

fn order_key(e: &Exponents) -> (u64, Exponents) {
    (e.iter().map(|&k| k as u64).sum(), *e)
}

impl fmt::Display for DiophantineEq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (c, e)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let magnitude = c.abs();
            let mut factors = Vec::new();
            if !magnitude.is_one() || *e == [0, 0, 0] {
                factors.push(magnitude.to_string());
            }
            for (k, name) in ["x", "y", "z"].iter().enumerate() {
                match e[k] {
                    0 => {}
                    1 => factors.push(name.to_string()),
                    p => factors.push(format!("{name}^{p}")),
                }
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

fn syntax(column: usize, message: impl Into<String>) -> ParseError {
    ParseError::new(ParseErrorKind::Syntax, 1, column, message)
}

fn malformed(column: usize, message: impl Into<String>) -> ParseError {
    ParseError::new(ParseErrorKind::MalformedMonomial, 1, column, message)
}

/// Parses one side: `[sign] monomial (sign monomial)*`.
fn parse_side(chars: &[(usize, char)], text: &str) -> Result<Vec<(BigInt, Exponents)>, ParseError> {
    let end_column = text.chars().count() + 1;
    if chars.is_empty() {
        return Err(malformed(end_column, "expected a monomial"));
    }
    let mut terms = Vec::new();
    let mut i = 0;
    let mut first = true;
    while i < chars.len() {
        let mut sign = BigInt::one();
        if matches!(chars[i].1, '+' | '-') {
            if chars[i].1 == '-' {
                sign = -sign;
            }
            i += 1;
        } else if !first {
            return Err(malformed(chars[i].0, "expected `+` or `-` between monomials"));
        }
        first = false;
        let (coefficient, exponents, next) = parse_monomial(chars, i, end_column)?;
        terms.push((sign * coefficient, exponents));
        i = next;
    }
    Ok(terms)
}

fn parse_monomial(
    chars: &[(usize, char)],
    mut i: usize,
    end_column: usize,
) -> Result<(BigInt, Exponents, usize), ParseError> {
    let mut coefficient = BigInt::one();
    let mut exponents = [0u32; 3];
    let mut factors = 0;
    loop {
        let Some(&(col, c)) = chars.get(i) else {
            if factors == 0 {
                return Err(malformed(end_column, "expected a monomial"));
            }
            break;
        };
        match c {
            '0'..='9' => {
                let start = i;
                while chars.get(i).is_some_and(|(_, c)| c.is_ascii_digit()) {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().map(|(_, c)| *c).collect();
                coefficient *= digits.parse::<BigInt>().expect("digit run");
                if chars.get(i).is_some_and(|(_, c)| *c == '^') {
                    return Err(malformed(chars[i].0, "exponent on a numeric factor"));
                }
            }
            'x' | 'y' | 'z' => {
                let k = (c as u8 - b'x') as usize;
                i += 1;
                let mut power = 1u32;
                if chars.get(i).is_some_and(|(_, c)| *c == '^') {
                    i += 1;
                    let start = i;
                    while chars.get(i).is_some_and(|(_, c)| c.is_ascii_digit()) {
                        i += 1;
                    }
                    if start == i {
                        let at = chars.get(start).map(|(c, _)| *c).unwrap_or(end_column);
                        return Err(malformed(at, "`^` must be followed by a nonnegative integer"));
                    }
                    let digits: String = chars[start..i].iter().map(|(_, c)| *c).collect();
                    power = digits
                        .parse::<u32>()
                        .ok()
                        .filter(|&p| p <= MAX_EXPONENT)
                        .ok_or_else(|| malformed(chars[start].0, format!("exponent exceeds {MAX_EXPONENT}")))?;
                }
                exponents[k] = exponents[k]
                    .checked_add(power)
                    .filter(|&p| p <= MAX_EXPONENT)
                    .ok_or_else(|| malformed(col, format!("exponent exceeds {MAX_EXPONENT}")))?;
            }
            '+' | '-' => {
                if factors == 0 {
                    return Err(malformed(col, "expected a monomial"));
                }
                break;
            }
            '*' => {
                if factors == 0 {
                    return Err(malformed(col, "`*` without a left factor"));
                }
                i += 1;
                match chars.get(i) {
                    Some((_, '0'..='9' | 'x' | 'y' | 'z')) => continue,
                    Some(&(at, _)) => return Err(malformed(at, "`*` without a right factor")),
                    None => return Err(malformed(end_column, "`*` without a right factor")),
                }
            }
            '^' => return Err(malformed(col, "`^` without a variable")),
            other => return Err(syntax(col, format!("unexpected character `{other}`"))),
        }
        factors += 1;
    }
    Ok((coefficient, exponents, i))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn parses_table_equation() {
        let eq = DiophantineEq::parse("x^3*y^2 - z^3 - 6").unwrap();
        assert_eq!(
            eq.terms(),
            &[(big(1), [3, 2, 0]), (big(-1), [0, 0, 3]), (big(-6), [0, 0, 0])]
        );
        assert_eq!(eq.eval([0, 0, 0]), big(-6));
        assert_eq!(eq.to_string(), "x^3*y^2 - z^3 - 6");
        assert_eq!(DiophantineEq::parse(&eq.to_string()).unwrap(), eq);
    }

    #[test]
    fn linear_zero() {
        let eq = DiophantineEq::parse("x + y - z").unwrap();
        assert!(eq.is_solution([3, 4, 7]));
        assert!(!eq.is_solution([3, 4, 8]));
    }

    #[test]
    fn syntax_variants() {
        let a = DiophantineEq::parse("2xy^2 + 3 = z").unwrap();
        let b = DiophantineEq::parse("  2 * x * y ^ 2 - z + 3 ").unwrap();
        assert_eq!(a, b);
        let c = DiophantineEq::parse("x*x - x^2 + y").unwrap();
        assert_eq!(c.terms(), &[(big(1), [0, 1, 0])]);
        assert_eq!(DiophantineEq::parse("x - x").unwrap().to_string(), "0");
        assert_eq!(DiophantineEq::parse("-x + 1").unwrap().to_string(), "-x + 1");
    }

    #[test]
    fn malformed_monomials() {
        for (text, column) in [("x^", 3), ("x +", 4), ("2^3", 2), ("x ** y", 4), ("^x", 1), ("x + + y", 5), ("", 1)] {
            let e = DiophantineEq::parse(text).unwrap_err();
            assert_eq!(e.kind, ParseErrorKind::MalformedMonomial, "{text}");
            assert_eq!(e.column, column, "{text}");
        }
        assert_eq!(DiophantineEq::parse("x + w").unwrap_err().kind, ParseErrorKind::Syntax);
        assert_eq!(DiophantineEq::parse("x = y = z").unwrap_err().kind, ParseErrorKind::Syntax);
        assert_eq!(DiophantineEq::parse("x^1001").unwrap_err().kind, ParseErrorKind::MalformedMonomial);
    }

    #[test]
    fn exact_at_large_coordinates() {
        let eq = DiophantineEq::parse("x^3*y^2 - z^3 - 6").unwrap();
        let v = eq.eval([10_000_000; 3]);
        assert_eq!(v, BigInt::from(10u8).pow(35) - BigInt::from(10u8).pow(21) - 6);
    }

    #[test]
    fn constant_pair() {
        let eq = DiophantineEq::parse("x^3*y^2 - z^3 - 6").unwrap();
        assert_eq!(eq.constant_term(), big(-6));
        let partner = eq.with_negated_constant().unwrap();
        assert_eq!(partner.to_string(), "x^3*y^2 - z^3 + 6");
        assert!(DiophantineEq::parse("x + y - z").unwrap().with_negated_constant().is_none());
    }
}
