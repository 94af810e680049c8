//! Nondeterministic finite automata over a finite alphabet.
//!
//! Text format, one directive per line, `#` starting a comment:
//!
//! ```text
//! alphabet a b
//! blocklen 3        # optional
//! states q0 q1 q2   # optional; when present every state must be listed
//! start q0
//! final q2
//! trans q0 a q1
//! ```
//!
//! Without a `states` line, states are declared by first use.

use std::collections::HashMap;
use std::fmt;

use super::{render_symbols, split_symbols, tokens, Token};
use crate::{Error, ParseError, ParseErrorKind, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfa {
    alphabet: Vec<String>,
    states: Vec<String>,
    start: Vec<usize>,
    accepting: Vec<bool>,
    /// `transitions[state][symbol]`, sorted and deduplicated.
    transitions: Vec<Vec<Vec<usize>>>,
    block_length: Option<u64>,
}

impl Nfa {
    /// Builds an automaton from named parts. Transition endpoints and start
    /// and final states must be among `states`.
    pub fn new(
        alphabet: &[&str],
        states: &[&str],
        start: &[&str],
        accepting: &[&str],
        transitions: &[(&str, &str, &str)],
        block_length: Option<u64>,
    ) -> Result<Self> {
        let mut text = format!("alphabet {}\nstates {}\n", alphabet.join(" "), states.join(" "));
        if let Some(l) = block_length {
            text.push_str(&format!("blocklen {l}\n"));
        }
        text.push_str(&format!("start {}\n", start.join(" ")));
        if !accepting.is_empty() {
            text.push_str(&format!("final {}\n", accepting.join(" ")));
        }
        for (p, a, q) in transitions {
            text.push_str(&format!("trans {p} {a} {q}\n"));
        }
        Ok(Self::parse(&text)?)
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        Parser::default().run(text)
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn alphabet_size(&self) -> u32 {
        self.alphabet.len() as u32
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn start_states(&self) -> &[usize] {
        &self.start
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accepting[state]
    }

    pub fn successors(&self, state: usize, symbol: u32) -> &[usize] {
        &self.transitions[state][symbol as usize]
    }

    pub fn block_length(&self) -> Option<u64> {
        self.block_length
    }

    /// Index of a symbol by name.
    pub fn symbol_index(&self, name: &str) -> Option<u32> {
        self.alphabet.iter().position(|a| a == name).map(|i| i as u32)
    }

    /// Frontier simulation of the automaton on `word`.
    pub fn accepts(&self, word: &[u32]) -> Result<bool> {
        if let Some(&bad) = word.iter().find(|&&a| a >= self.alphabet_size()) {
            return Err(Error::Input(format!(
                "symbol index {bad} outside an alphabet of {} symbols",
                self.alphabet.len()
            )));
        }
        Ok(self.member(word))
    }

    /// `accepts` for words known to be over the alphabet; foreign symbols
    /// kill every run.
    pub(crate) fn member(&self, word: &[u32]) -> bool {
        let n = self.states.len();
        let mut current = vec![false; n];
        let mut frontier: Vec<usize> = Vec::with_capacity(n);
        for &q in &self.start {
            if !current[q] {
                current[q] = true;
                frontier.push(q);
            }
        }
        let mut next = vec![false; n];
        let mut next_frontier = Vec::with_capacity(n);
        for &a in word {
            if a >= self.alphabet_size() {
                return false;
            }
            for &p in &frontier {
                for &q in &self.transitions[p][a as usize] {
                    if !next[q] {
                        next[q] = true;
                        next_frontier.push(q);
                    }
                }
            }
            for &p in &frontier {
                current[p] = false;
            }
            std::mem::swap(&mut current, &mut next);
            std::mem::swap(&mut frontier, &mut next_frontier);
            next_frontier.clear();
            if frontier.is_empty() {
                return false;
            }
        }
        frontier.iter().any(|&q| self.accepting[q])
    }

    /// Checks that every accepted word of length at most `blocklen + 2`
    /// has length exactly `blocklen`. Trivially succeeds without a block
    /// length.
    pub fn validate_block(&self) -> Result<()> {
        let Some(l) = self.block_length else {
            return Ok(());
        };
        let n = self.states.len();
        let mut reach = vec![false; n];
        for &q in &self.start {
            reach[q] = true;
        }
        for len in 0..=l.saturating_add(2) {
            if len != l && (0..n).any(|q| reach[q] && self.accepting[q]) {
                return Err(Error::Config(format!(
                    "block automaton of length {l} accepts a word of length {len}"
                )));
            }
            let mut next = vec![false; n];
            for p in (0..n).filter(|&p| reach[p]) {
                for targets in &self.transitions[p] {
                    for &q in targets {
                        next[q] = true;
                    }
                }
            }
            reach = next;
        }
        Ok(())
    }

    /// Reads a word: one symbol per character when every symbol name is a
    /// single character, otherwise whitespace-separated names.
    pub fn parse_word(&self, text: &str) -> Result<Vec<u32>> {
        split_symbols(&self.alphabet, text)
    }

    pub fn render_word(&self, word: &[u32]) -> String {
        render_symbols(&self.alphabet, word)
    }
}

impl fmt::Display for Nfa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "alphabet {}", self.alphabet.join(" "))?;
        writeln!(f, "states {}", self.states.join(" "))?;
        if let Some(l) = self.block_length {
            writeln!(f, "blocklen {l}")?;
        }
        let names = |set: &mut dyn Iterator<Item = usize>| {
            set.map(|q| self.states[q].as_str()).collect::<Vec<_>>().join(" ")
        };
        writeln!(f, "start {}", names(&mut self.start.iter().copied()))?;
        let finals: Vec<usize> = (0..self.states.len()).filter(|&q| self.accepting[q]).collect();
        if !finals.is_empty() {
            writeln!(f, "final {}", names(&mut finals.into_iter()))?;
        }
        for (p, row) in self.transitions.iter().enumerate() {
            for (a, targets) in row.iter().enumerate() {
                for &q in targets {
                    writeln!(f, "trans {} {} {}", self.states[p], self.alphabet[a], self.states[q])?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Default)]
struct Parser {
    states: Vec<String>,
    index: HashMap<String, usize>,
    closed: bool,
}

impl Parser {
    fn state(&mut self, tok: &Token<'_>, line: usize) -> Result<usize, ParseError> {
        if let Some(&i) = self.index.get(tok.text) {
            return Ok(i);
        }
        if self.closed {
            return Err(ParseError::new(
                ParseErrorKind::UndeclaredState,
                line,
                tok.column,
                format!("state `{}` is not listed in the states line", tok.text),
            ));
        }
        self.declare(tok.text);
        Ok(self.states.len() - 1)
    }

    fn declare(&mut self, name: &str) {
        if !self.index.contains_key(name) {
            self.index.insert(name.to_string(), self.states.len());
            self.states.push(name.to_string());
        }
    }

    fn run(mut self, text: &str) -> Result<Nfa, ParseError> {
        let lines: Vec<(usize, Vec<Token<'_>>)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, tokens(l.split('#').next().unwrap_or(""))))
            .filter(|(_, t)| !t.is_empty())
            .collect();

        // Alphabet and states are read first so that directive order does
        // not matter.
        let mut alphabet: Option<Vec<String>> = None;
        for (line, toks) in &lines {
            match toks[0].text {
                "alphabet" => {
                    if alphabet.is_some() {
                        return Err(syntax(*line, toks[0].column, "duplicate alphabet line"));
                    }
                    let names: Vec<String> = toks[1..].iter().map(|t| t.text.to_string()).collect();
                    if names.is_empty() {
                        return Err(syntax(*line, toks[0].column, "alphabet must be nonempty"));
                    }
                    for (i, t) in toks[1..].iter().enumerate() {
                        if names[..i].contains(&names[i]) {
                            return Err(syntax(*line, t.column, "duplicate symbol"));
                        }
                    }
                    alphabet = Some(names);
                }
                "states" => {
                    if self.closed {
                        return Err(syntax(*line, toks[0].column, "duplicate states line"));
                    }
                    for t in &toks[1..] {
                        self.declare(t.text);
                    }
                    self.closed = true;
                }
                _ => {}
            }
        }
        let alphabet = alphabet.ok_or_else(|| syntax(1, 1, "missing alphabet line"))?;

        let mut start = Vec::new();
        let mut finals = Vec::new();
        let mut edges = Vec::new();
        let mut block_length = None;
        let mut saw_start = false;
        for (line, toks) in &lines {
            let line = *line;
            let head = &toks[0];
            match head.text {
                "alphabet" | "states" => {}
                "blocklen" => {
                    if toks.len() != 2 {
                        return Err(syntax(line, head.column, "expected `blocklen <length>`"));
                    }
                    let l = toks[1]
                        .text
                        .parse::<u64>()
                        .map_err(|_| syntax(line, toks[1].column, "block length must be a nonnegative integer"))?;
                    block_length = Some(l);
                }
                "start" => {
                    saw_start = true;
                    for t in &toks[1..] {
                        let q = self.state(t, line)?;
                        start.push(q);
                    }
                }
                "final" => {
                    for t in &toks[1..] {
                        let q = self.state(t, line)?;
                        finals.push(q);
                    }
                }
                "trans" => {
                    if toks.len() != 4 {
                        return Err(syntax(line, head.column, "expected `trans <from> <symbol> <to>`"));
                    }
                    let p = self.state(&toks[1], line)?;
                    let a = alphabet.iter().position(|s| s == toks[2].text).ok_or_else(|| {
                        ParseError::new(
                            ParseErrorKind::UnknownSymbol,
                            line,
                            toks[2].column,
                            format!("symbol `{}` is not in the alphabet", toks[2].text),
                        )
                    })?;
                    let q = self.state(&toks[3], line)?;
                    edges.push((p, a, q));
                }
                other => {
                    return Err(syntax(line, head.column, format!("unknown directive `{other}`")));
                }
            }
        }
        if !saw_start || start.is_empty() {
            return Err(syntax(1, 1, "missing start state"));
        }

        let n = self.states.len();
        let mut transitions = vec![vec![Vec::new(); alphabet.len()]; n];
        for (p, a, q) in edges {
            transitions[p][a].push(q);
        }
        for row in &mut transitions {
            for targets in row.iter_mut() {
                targets.sort_unstable();
                targets.dedup();
            }
        }
        start.sort_unstable();
        start.dedup();
        let mut accepting = vec![false; n];
        for q in finals {
            accepting[q] = true;
        }
        Ok(Nfa { alphabet, states: self.states, start, accepting, transitions, block_length })
    }
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError::new(ParseErrorKind::Syntax, line, column, message)
}

/// The symmetric difference `L(left) xor L(right)` of two automata over the
/// same alphabet. Its emptiness is approximate equivalence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricDifference {
    left: Nfa,
    right: Nfa,
    /// Left symbol index to right symbol index.
    remap: Vec<u32>,
}

impl SymmetricDifference {
    pub fn new(left: Nfa, right: Nfa) -> Result<Self> {
        let mut remap = Vec::with_capacity(left.alphabet.len());
        if left.alphabet.len() != right.alphabet.len() {
            return Err(Error::Config("automata have different alphabets".into()));
        }
        for a in &left.alphabet {
            match right.symbol_index(a) {
                Some(i) => remap.push(i),
                None => return Err(Error::Config(format!("symbol `{a}` missing from the second automaton"))),
            }
        }
        Ok(SymmetricDifference { left, right, remap })
    }

    pub fn left(&self) -> &Nfa {
        &self.left
    }

    pub fn right(&self) -> &Nfa {
        &self.right
    }

    /// Words are written in the left automaton's symbol numbering.
    pub fn contains(&self, word: &[u32]) -> Result<bool> {
        let l = self.left.accepts(word)?;
        Ok(l != self.right.member(&self.translate(word)))
    }

    pub(crate) fn member(&self, word: &[u32]) -> bool {
        self.left.member(word) != self.right.member(&self.translate(word))
    }

    fn translate(&self, word: &[u32]) -> Vec<u32> {
        word.iter().map(|&a| self.remap.get(a as usize).copied().unwrap_or(u32::MAX)).collect()
    }
}
