//! Propositional formulas in conjunctive normal form, read from DIMACS.

use std::fmt;

use super::tokens;
use crate::{Error, ParseError, ParseErrorKind, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: u64,
    /// Literals are signed 1-based variable indices.
    clauses: Vec<Vec<i64>>,
}

impl CnfFormula {
    pub fn new(num_vars: u64, clauses: Vec<Vec<i64>>) -> Result<Self> {
        for clause in &clauses {
            if clause.is_empty() {
                return Err(Error::Domain("empty clause".into()));
            }
            for &lit in clause {
                if lit == 0 || lit.unsigned_abs() > num_vars {
                    return Err(Error::Domain(format!("literal {lit} outside 1..={num_vars}")));
                }
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    /// Parses DIMACS CNF: `c` comment lines, a `p cnf <vars> <clauses>`
    /// header, then zero-terminated clauses that may span lines. A line
    /// starting with `%` ends the input.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut header: Option<(u64, usize)> = None;
        let mut clauses: Vec<Vec<i64>> = Vec::new();
        let mut current: Vec<i64> = Vec::new();
        let mut last = (1, 1);
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let toks = tokens(raw);
            let Some(first) = toks.first() else { continue };
            if first.text.starts_with('%') {
                break;
            }
            if first.text.starts_with('c') {
                continue;
            }
            if first.text == "p" {
                if header.is_some() {
                    return Err(syntax(line, first.column, "duplicate problem line"));
                }
                if toks.len() != 4 || toks[1].text != "cnf" {
                    return Err(syntax(line, first.column, "expected `p cnf <variables> <clauses>`"));
                }
                let vars = toks[2]
                    .text
                    .parse::<u64>()
                    .map_err(|_| syntax(line, toks[2].column, "variable count must be a nonnegative integer"))?;
                let count = toks[3]
                    .text
                    .parse::<usize>()
                    .map_err(|_| syntax(line, toks[3].column, "clause count must be a nonnegative integer"))?;
                header = Some((vars, count));
                continue;
            }
            let Some((vars, _)) = header else {
                return Err(syntax(line, first.column, "clause before the problem line"));
            };
            for tok in &toks {
                last = (line, tok.column);
                let lit = tok.text.parse::<i64>().map_err(|_| {
                    ParseError::new(ParseErrorKind::BadLiteral, line, tok.column, format!("`{}` is not a literal", tok.text))
                })?;
                if lit == 0 {
                    if current.is_empty() {
                        return Err(ParseError::new(ParseErrorKind::BadLiteral, line, tok.column, "empty clause"));
                    }
                    clauses.push(std::mem::take(&mut current));
                } else if lit.unsigned_abs() > vars {
                    return Err(ParseError::new(
                        ParseErrorKind::BadLiteral,
                        line,
                        tok.column,
                        format!("variable {} exceeds the declared {vars}", lit.unsigned_abs()),
                    ));
                } else {
                    current.push(lit);
                }
            }
        }
        let Some((num_vars, count)) = header else {
            return Err(syntax(1, 1, "missing problem line"));
        };
        if !current.is_empty() {
            return Err(syntax(last.0, last.1, "clause is not terminated by 0"));
        }
        if clauses.len() != count {
            return Err(syntax(
                last.0,
                last.1,
                format!("header declares {count} clauses, found {}", clauses.len()),
            ));
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    /// Number of variables `k`; the finite-domain parameter.
    pub fn num_vars(&self) -> u64 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<i64>] {
        &self.clauses
    }

    pub fn eval(&self, assignment: &[bool]) -> Result<bool> {
        if assignment.len() as u64 != self.num_vars {
            return Err(Error::Input(format!(
                "assignment has {} values for {} variables",
                assignment.len(),
                self.num_vars
            )));
        }
        Ok(self.satisfied(assignment))
    }

    pub(crate) fn satisfied(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|clause| {
            clause.iter().any(|&lit| {
                let value = assignment.get(lit.unsigned_abs() as usize - 1).copied().unwrap_or(false);
                value == (lit > 0)
            })
        })
    }
}

/// Assignment in DIMACS solution syntax, `v 1 -2 3 0`.
pub fn render_assignment(assignment: &[bool]) -> String {
    let mut out = String::from("v");
    for (i, &b) in assignment.iter().enumerate() {
        let v = i as i64 + 1;
        out.push_str(&format!(" {}", if b { v } else { -v }));
    }
    out.push_str(" 0");
    out
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p cnf {} {}", self.num_vars, self.clauses.len())?;
        for clause in &self.clauses {
            for lit in clause {
                write!(f, "{lit} ")?;
            }
            writeln!(f, "0")?;
        }
        Ok(())
    }
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError::new(ParseErrorKind::Syntax, line, column, message)
}
