//! Problem instances, their membership predicates, and the wiring from an
//! instance to the distribution family and engine that decide it.

use std::fmt;
use std::str::FromStr;

use crate::distributions::{DirichletParams, RandomSource};
use crate::engine::{
    fin_prax_emptiness, fin_prax_universality, prax_emptiness, prax_universality, run_sampler, sample_count,
    PraxConfig, Problem, UniformAssignment, UniformBlock, Verdict,
};
use crate::tractable::{Grid, IndependentTriples, LocallyTractable, TripleFamily3D, WordFamily1D, WordFamily2D};
use crate::{Error, Result};

mod cnf;
mod dioph;
mod nfa;
mod twod;

pub use cnf::{render_assignment, CnfFormula};
pub use dioph::{DiophantineEq, Exponents, MAX_EXPONENT};
pub use nfa::{Nfa, SymmetricDifference};
pub use twod::{Move, TwoDAutomaton};

/// A whitespace-separated token with its 1-based column.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Token<'a> {
    pub text: &'a str,
    pub column: usize,
}

pub(crate) fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    let mut column = 0;
    let mut start_column = 0;
    for (i, c) in line.char_indices() {
        column += 1;
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token { text: &line[s..i], column: start_column });
            }
        } else if start.is_none() {
            start = Some(i);
            start_column = column;
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &line[s..], column: start_column });
    }
    out
}

fn single_char(alphabet: &[String]) -> bool {
    alphabet.iter().all(|a| a.chars().count() == 1)
}

/// Splits a word into symbol indices: per character when every symbol is a
/// single character, otherwise on whitespace.
pub(crate) fn split_symbols(alphabet: &[String], text: &str) -> Result<Vec<u32>> {
    let lookup = |s: &str| {
        alphabet
            .iter()
            .position(|a| a == s)
            .map(|i| i as u32)
            .ok_or_else(|| Error::Input(format!("symbol `{s}` is not in the alphabet")))
    };
    if single_char(alphabet) {
        text.chars().filter(|c| !c.is_whitespace()).map(|c| lookup(c.encode_utf8(&mut [0; 4]))).collect()
    } else {
        text.split_whitespace().map(lookup).collect()
    }
}

pub(crate) fn render_symbols(alphabet: &[String], word: &[u32]) -> String {
    let names = word.iter().map(|&a| alphabet.get(a as usize).map(String::as_str).unwrap_or("?"));
    if single_char(alphabet) {
        names.collect()
    } else {
        names.collect::<Vec<_>>().join(" ")
    }
}

/// A parsed instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubsetSpec {
    Nfa(Nfa),
    SymmetricDifference(SymmetricDifference),
    Cnf(CnfFormula),
    TwoD(TwoDAutomaton),
    Diophantine(DiophantineEq),
}

/// An element of some instance's domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Element {
    Word(Vec<u32>),
    Assignment(Vec<bool>),
    Grid(Grid),
    Triple([u64; 3]),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    /// Dirichlet length, then uniform symbols.
    Word1D,
    /// Independent Dirichlet row and column counts, then uniform symbols.
    Word2D,
    /// Three independent Dirichlet coordinates.
    Triple3D,
    /// Uniform words of the automaton's block length.
    UniformBlock,
    /// Uniform truth assignments.
    UniformAssignment,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 5] =
        [FamilyKind::Word1D, FamilyKind::Word2D, FamilyKind::Triple3D, FamilyKind::UniformBlock, FamilyKind::UniformAssignment];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Word1D => "word1d",
            FamilyKind::Word2D => "word2d",
            FamilyKind::Triple3D => "triple3d",
            FamilyKind::UniformBlock => "uniform-block",
            FamilyKind::UniformAssignment => "uniform-assignment",
        }
    }

    /// Whether the family draws from a finite domain.
    pub fn is_finite(self) -> bool {
        matches!(self, FamilyKind::UniformBlock | FamilyKind::UniformAssignment)
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown family `{s}`")))
    }
}

/// Outcome of [`SubsetSpec::decide`] with the derived run parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub verdict: Verdict<Element>,
    pub n: u64,
    /// Maximum size of the truncation; absent for finite families.
    pub max_len: Option<u64>,
}

impl SubsetSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            SubsetSpec::Nfa(_) => "nfa",
            SubsetSpec::SymmetricDifference(_) => "nfa-difference",
            SubsetSpec::Cnf(_) => "cnf",
            SubsetSpec::TwoD(_) => "2da",
            SubsetSpec::Diophantine(_) => "dioph",
        }
    }

    fn block_length(&self) -> Option<u64> {
        match self {
            SubsetSpec::Nfa(a) => a.block_length(),
            SubsetSpec::SymmetricDifference(d) => {
                let l = d.left().block_length();
                if l == d.right().block_length() {
                    l
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// The finite-domain parameter `k`: block length for automata, variable
    /// count for formulas.
    pub fn distr_parameter(&self) -> Option<u64> {
        match self {
            SubsetSpec::Cnf(f) => Some(f.num_vars()),
            _ => self.block_length(),
        }
    }

    pub fn default_family(&self) -> FamilyKind {
        match self {
            SubsetSpec::Nfa(_) | SubsetSpec::SymmetricDifference(_) => {
                if self.block_length().is_some() {
                    FamilyKind::UniformBlock
                } else {
                    FamilyKind::Word1D
                }
            }
            SubsetSpec::Cnf(_) => FamilyKind::UniformAssignment,
            SubsetSpec::TwoD(_) => FamilyKind::Word2D,
            SubsetSpec::Diophantine(_) => FamilyKind::Triple3D,
        }
    }

    pub fn supports(&self, family: FamilyKind) -> bool {
        matches!(
            (self, family),
            (SubsetSpec::Nfa(_) | SubsetSpec::SymmetricDifference(_), FamilyKind::Word1D | FamilyKind::UniformBlock)
                | (SubsetSpec::Cnf(_), FamilyKind::UniformAssignment)
                | (SubsetSpec::TwoD(_), FamilyKind::Word2D)
                | (SubsetSpec::Diophantine(_), FamilyKind::Triple3D)
        )
    }

    fn alphabet(&self) -> &[String] {
        match self {
            SubsetSpec::Nfa(a) => a.alphabet(),
            SubsetSpec::SymmetricDifference(d) => d.left().alphabet(),
            SubsetSpec::TwoD(a) => a.alphabet(),
            _ => &[],
        }
    }

    /// Membership of `x`; an element from another domain is an input error.
    pub fn contains(&self, x: &Element) -> Result<bool> {
        match (self, x) {
            (SubsetSpec::Nfa(a), Element::Word(w)) => a.accepts(w),
            (SubsetSpec::SymmetricDifference(d), Element::Word(w)) => d.contains(w),
            (SubsetSpec::Cnf(f), Element::Assignment(v)) => f.eval(v),
            (SubsetSpec::TwoD(a), Element::Grid(g)) => a.accepts(g),
            (SubsetSpec::Diophantine(eq), Element::Triple(p)) => Ok(eq.is_solution(*p)),
            _ => Err(Error::Input(format!("element does not belong to a {} instance", self.kind_name()))),
        }
    }

    /// Writes an element in the instance's own syntax: words as symbol
    /// strings, assignments as DIMACS value lines, grids as `RxC row/row`,
    /// triples as `(x, y, z)`.
    pub fn render(&self, x: &Element) -> String {
        match x {
            Element::Word(w) => render_symbols(self.alphabet(), w),
            Element::Assignment(v) => render_assignment(v),
            Element::Grid(g) => twod::render_grid(self.alphabet(), g),
            Element::Triple([a, b, c]) => format!("({a}, {b}, {c})"),
        }
    }

    /// Parses an element written as [`SubsetSpec::render`] writes it.
    pub fn parse_element(&self, text: &str) -> Result<Element> {
        match self {
            SubsetSpec::Nfa(_) | SubsetSpec::SymmetricDifference(_) => {
                Ok(Element::Word(split_symbols(self.alphabet(), text)?))
            }
            SubsetSpec::TwoD(a) => Ok(Element::Grid(a.parse_grid(text)?)),
            SubsetSpec::Cnf(_) => {
                let bad = || Error::Input(format!("expected `v <literals> 0`, got `{text}`"));
                let mut toks = text.split_whitespace();
                if toks.next() != Some("v") {
                    return Err(bad());
                }
                let lits: Vec<i64> = toks.map(|t| t.parse().map_err(|_| bad())).collect::<Result<_>>()?;
                if lits.last() != Some(&0) {
                    return Err(bad());
                }
                let lits = &lits[..lits.len() - 1];
                if lits.iter().enumerate().any(|(i, l)| l.unsigned_abs() != i as u64 + 1) {
                    return Err(bad());
                }
                Ok(Element::Assignment(lits.iter().map(|&l| l > 0).collect()))
            }
            SubsetSpec::Diophantine(_) => {
                let bad = || Error::Input(format!("expected `(x, y, z)`, got `{text}`"));
                let inner = text.trim().strip_prefix('(').and_then(|t| t.strip_suffix(')')).ok_or_else(bad)?;
                let v: Vec<u64> =
                    inner.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?;
                let triple: [u64; 3] = v.try_into().map_err(|_| bad())?;
                Ok(Element::Triple(triple))
            }
        }
    }

    /// Runs the engine for `problem` with the given family. `params` is
    /// used by the infinite families only.
    ///
    /// Any witness is re-checked against [`SubsetSpec::contains`] before
    /// it is returned.
    pub fn decide(
        &self,
        src: &mut RandomSource,
        family: FamilyKind,
        problem: Problem,
        params: &DirichletParams,
        config: &PraxConfig,
    ) -> Result<Decision> {
        config.validate()?;
        if !self.supports(family) {
            return Err(Error::Config(format!("family {family} does not apply to a {} instance", self.kind_name())));
        }
        let n = sample_count(config);
        let delta = config.truncation_delta();
        let (verdict, max_len) = match (self, family) {
            (SubsetSpec::Nfa(_) | SubsetSpec::SymmetricDifference(_), FamilyKind::Word1D) => {
                let fam = WordFamily1D::new(*params, self.alphabet().len() as u32)?;
                let m = fam.max_len(delta)?;
                let member = |w: &Vec<u32>| self.word_member(w);
                (run_infinite(src, &member, &fam, problem, config)?.map_witness(Element::Word), Some(m))
            }
            (SubsetSpec::Nfa(_) | SubsetSpec::SymmetricDifference(_), FamilyKind::UniformBlock) => {
                let fam = UniformBlock { alphabet: self.alphabet().len() as u32 };
                let member = |w: &Vec<u32>| self.word_member(w);
                let k = self.block_length();
                let v = match problem {
                    Problem::Emptiness => fin_prax_emptiness(src, &member, &fam, k, config)?,
                    Problem::Universality => fin_prax_universality(src, &member, &fam, k, config)?,
                };
                (v.map_witness(Element::Word), None)
            }
            (SubsetSpec::Cnf(f), FamilyKind::UniformAssignment) => {
                let member = |v: &Vec<bool>| f.satisfied(v);
                let k = Some(f.num_vars());
                let v = match problem {
                    Problem::Emptiness => fin_prax_emptiness(src, &member, &UniformAssignment, k, config)?,
                    Problem::Universality => fin_prax_universality(src, &member, &UniformAssignment, k, config)?,
                };
                (v.map_witness(Element::Assignment), None)
            }
            (SubsetSpec::TwoD(a), FamilyKind::Word2D) => {
                let fam = WordFamily2D::new(*params, a.alphabet_size())?;
                let m = fam.max_len(delta)?;
                let member = |g: &Grid| a.member(g);
                (run_infinite(src, &member, &fam, problem, config)?.map_witness(Element::Grid), Some(m))
            }
            (SubsetSpec::Diophantine(eq), FamilyKind::Triple3D) => {
                let m = TripleFamily3D::new(*params).with_strict_tail(config.strict_tail).max_len(delta)?;
                let sampler = IndependentTriples::new(params, m)?;
                let member = |p: &[u64; 3]| eq.is_solution(*p);
                (run_sampler(src, &member, &sampler, problem, n, config)?.map_witness(Element::Triple), Some(m))
            }
            _ => unreachable!("checked by supports"),
        };
        if let Some(w) = &verdict.witness {
            let member = self.contains(w)?;
            let certified = match problem {
                Problem::Emptiness => member,
                Problem::Universality => !member,
            };
            if !certified {
                return Err(Error::Inconsistent(format!("witness {} does not certify the verdict", self.render(w))));
            }
        }
        Ok(Decision { verdict, n, max_len })
    }

    fn word_member(&self, w: &[u32]) -> bool {
        match self {
            SubsetSpec::Nfa(a) => a.member(w),
            SubsetSpec::SymmetricDifference(d) => d.member(w),
            _ => false,
        }
    }
}

fn run_infinite<F, P>(
    src: &mut RandomSource,
    member: &P,
    family: &F,
    problem: Problem,
    config: &PraxConfig,
) -> Result<Verdict<F::Item>>
where
    F: LocallyTractable,
    P: crate::engine::Membership<F::Item>,
{
    match problem {
        Problem::Emptiness => prax_emptiness(src, member, family, config),
        Problem::Universality => prax_universality(src, member, family, config),
    }
}
