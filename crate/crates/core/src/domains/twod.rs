//! Four-way two-dimensional automata on rectangular words.
//!
//! The input grid is framed by a border of `#` cells. The head starts on
//! the top-left interior cell (a border cell when the grid has no rows or
//! no columns) and moves up, down, left, right or stays, nondeterministically.
//! A grid is accepted when some configuration with an accepting state is
//! reachable. Moves leaving the framed grid have no successor.
//!
//! Text format, `#` starting a comment except in the symbol position of a
//! `trans` line, where it names the border:
//!
//! ```text
//! alphabet a b
//! states q0 q1      # optional; when present every state must be listed
//! start q0
//! accept q1
//! trans q0 a q0 R
//! trans q0 # q1 S
//! ```

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use super::{render_symbols, tokens, Token};
use crate::tractable::Grid;
use crate::{Error, ParseError, ParseErrorKind, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    Up,
    Down,
    Left,
    Right,
    Stay,
}

impl Move {
    fn delta(self) -> (isize, isize) {
        match self {
            Move::Up => (-1, 0),
            Move::Down => (1, 0),
            Move::Left => (0, -1),
            Move::Right => (0, 1),
            Move::Stay => (0, 0),
        }
    }

    fn letter(self) -> &'static str {
        match self {
            Move::Up => "U",
            Move::Down => "D",
            Move::Left => "L",
            Move::Right => "R",
            Move::Stay => "S",
        }
    }
}

impl FromStr for Move {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        match s {
            "U" => Ok(Move::Up),
            "D" => Ok(Move::Down),
            "L" => Ok(Move::Left),
            "R" => Ok(Move::Right),
            "S" => Ok(Move::Stay),
            _ => Err(()),
        }
    }
}

/// The symbol index standing for the border, one past the alphabet.
pub type Symbol = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoDAutomaton {
    alphabet: Vec<String>,
    states: Vec<String>,
    start: usize,
    accepting: Vec<bool>,
    /// `transitions[state][symbol]` for symbols `0..=s`, where `s` is the
    /// border.
    transitions: Vec<Vec<Vec<(usize, Move)>>>,
}

impl TwoDAutomaton {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let lines: Vec<(usize, Vec<Token<'_>>)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, strip_comment(tokens(l))))
            .filter(|(_, t)| !t.is_empty())
            .collect();

        let mut alphabet: Option<Vec<String>> = None;
        let mut states = StateTable::default();
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
                    if states.closed {
                        return Err(syntax(*line, toks[0].column, "duplicate states line"));
                    }
                    for t in &toks[1..] {
                        states.declare(t.text);
                    }
                    states.closed = true;
                }
                _ => {}
            }
        }
        let alphabet = alphabet.ok_or_else(|| syntax(1, 1, "missing alphabet line"))?;
        let border = alphabet.len();

        let mut start = None;
        let mut accepting = Vec::new();
        let mut edges = Vec::new();
        for (line, toks) in &lines {
            let line = *line;
            let head = &toks[0];
            match head.text {
                "alphabet" | "states" => {}
                "start" => {
                    if toks.len() != 2 {
                        return Err(syntax(line, head.column, "expected `start <state>`"));
                    }
                    if start.is_some() {
                        return Err(syntax(line, head.column, "duplicate start line"));
                    }
                    start = Some(states.lookup(&toks[1], line)?);
                }
                "accept" | "final" => {
                    for t in &toks[1..] {
                        accepting.push(states.lookup(t, line)?);
                    }
                }
                "trans" => {
                    if toks.len() != 5 {
                        return Err(syntax(line, head.column, "expected `trans <from> <symbol> <to> <move>`"));
                    }
                    let p = states.lookup(&toks[1], line)?;
                    let a = if toks[2].text == "#" {
                        border
                    } else {
                        alphabet.iter().position(|s| s == toks[2].text).ok_or_else(|| {
                            ParseError::new(
                                ParseErrorKind::UnknownSymbol,
                                line,
                                toks[2].column,
                                format!("symbol `{}` is not in the alphabet", toks[2].text),
                            )
                        })?
                    };
                    let q = states.lookup(&toks[3], line)?;
                    let mv = toks[4]
                        .text
                        .parse::<Move>()
                        .map_err(|_| syntax(line, toks[4].column, "move must be one of U D L R S"))?;
                    edges.push((p, a, q, mv));
                }
                other => return Err(syntax(line, head.column, format!("unknown directive `{other}`"))),
            }
        }
        let start = start.ok_or_else(|| syntax(1, 1, "missing start line"))?;

        let n = states.names.len();
        let mut transitions = vec![vec![Vec::new(); border + 1]; n];
        for (p, a, q, mv) in edges {
            let targets: &mut Vec<(usize, Move)> = &mut transitions[p][a];
            if !targets.contains(&(q, mv)) {
                targets.push((q, mv));
            }
        }
        let mut acc = vec![false; n];
        for q in accepting {
            acc[q] = true;
        }
        Ok(TwoDAutomaton { alphabet, states: states.names, start, accepting: acc, transitions })
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

    pub fn start_state(&self) -> usize {
        self.start
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accepting[state]
    }

    /// Successors on `symbol`, where `symbol == alphabet_size()` is the
    /// border.
    pub fn successors(&self, state: usize, symbol: Symbol) -> &[(usize, Move)] {
        &self.transitions[state][symbol]
    }

    /// Reachability over configurations `(state, row, col)` of the framed
    /// grid.
    pub fn accepts(&self, grid: &Grid) -> Result<bool> {
        if let Some(&bad) = grid.cells().iter().find(|&&a| a >= self.alphabet_size()) {
            return Err(Error::Input(format!(
                "symbol index {bad} outside an alphabet of {} symbols",
                self.alphabet.len()
            )));
        }
        Ok(self.member(grid))
    }

    pub(crate) fn member(&self, grid: &Grid) -> bool {
        let s = self.alphabet.len();
        if grid.cells().iter().any(|&a| a as usize >= s) {
            return false;
        }
        let rows = grid.rows() + 2;
        let cols = grid.cols() + 2;
        let symbol_at = |r: usize, c: usize| -> Symbol {
            if r == 0 || c == 0 || r == rows - 1 || c == cols - 1 {
                s
            } else {
                grid.get(r - 1, c - 1) as usize
            }
        };
        let n = self.states.len();
        let id = |q: usize, r: usize, c: usize| (q * rows + r) * cols + c;
        let mut seen = vec![false; n * rows * cols];
        let mut queue = VecDeque::new();
        seen[id(self.start, 1, 1)] = true;
        queue.push_back((self.start, 1usize, 1usize));
        while let Some((q, r, c)) = queue.pop_front() {
            if self.accepting[q] {
                return true;
            }
            for &(next, mv) in &self.transitions[q][symbol_at(r, c)] {
                let (dr, dc) = mv.delta();
                let (Some(nr), Some(nc)) = (r.checked_add_signed(dr), c.checked_add_signed(dc)) else {
                    continue;
                };
                if nr >= rows || nc >= cols {
                    continue;
                }
                let k = id(next, nr, nc);
                if !seen[k] {
                    seen[k] = true;
                    queue.push_back((next, nr, nc));
                }
            }
        }
        false
    }

    /// Reads a grid written as `RxC row/row/...`, rows in the word syntax
    /// of [`crate::domains::Nfa::parse_word`].
    pub fn parse_grid(&self, text: &str) -> Result<Grid> {
        parse_grid(&self.alphabet, text)
    }

    pub fn render_grid(&self, grid: &Grid) -> String {
        render_grid(&self.alphabet, grid)
    }
}

pub(crate) fn render_grid(alphabet: &[String], grid: &Grid) -> String {
    let rows: Vec<String> = (0..grid.rows()).map(|r| render_symbols(alphabet, grid.row(r))).collect();
    if rows.is_empty() {
        format!("{}x{}", grid.rows(), grid.cols())
    } else {
        format!("{}x{} {}", grid.rows(), grid.cols(), rows.join("/"))
    }
}

pub(crate) fn parse_grid(alphabet: &[String], text: &str) -> Result<Grid> {
    let text = text.trim();
    let (dims, body) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
    let bad = || Error::Input(format!("expected `RxC row/row/...`, got `{text}`"));
    let (r, c) = dims.split_once('x').ok_or_else(bad)?;
    let rows: usize = r.parse().map_err(|_| bad())?;
    let cols: usize = c.parse().map_err(|_| bad())?;
    let mut cells = Vec::with_capacity(rows * cols);
    if rows > 0 && cols > 0 {
        let parts: Vec<&str> = body.split('/').collect();
        if parts.len() != rows {
            return Err(bad());
        }
        for part in parts {
            let row = super::split_symbols(alphabet, part)?;
            if row.len() != cols {
                return Err(bad());
            }
            cells.extend(row);
        }
    } else if !body.trim().is_empty() {
        return Err(bad());
    }
    Grid::new(rows, cols, cells)
}

impl fmt::Display for TwoDAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "alphabet {}", self.alphabet.join(" "))?;
        writeln!(f, "states {}", self.states.join(" "))?;
        writeln!(f, "start {}", self.states[self.start])?;
        let acc: Vec<&str> =
            (0..self.states.len()).filter(|&q| self.accepting[q]).map(|q| self.states[q].as_str()).collect();
        if !acc.is_empty() {
            writeln!(f, "accept {}", acc.join(" "))?;
        }
        for (p, row) in self.transitions.iter().enumerate() {
            for (a, targets) in row.iter().enumerate() {
                let sym = self.alphabet.get(a).map(String::as_str).unwrap_or("#");
                for &(q, mv) in targets {
                    writeln!(f, "trans {} {} {} {}", self.states[p], sym, self.states[q], mv.letter())?;
                }
            }
        }
        Ok(())
    }
}

/// Drops tokens from the first comment marker on. A lone `#` in the symbol
/// position of a `trans` line is the border, not a comment.
fn strip_comment(toks: Vec<Token<'_>>) -> Vec<Token<'_>> {
    let is_trans = toks.first().map(|t| t.text == "trans").unwrap_or(false);
    let mut out = Vec::with_capacity(toks.len());
    for (i, tok) in toks.into_iter().enumerate() {
        if tok.text.starts_with('#') && !(is_trans && i == 2 && tok.text == "#") {
            break;
        }
        out.push(tok);
    }
    out
}

#[derive(Default)]
struct StateTable {
    names: Vec<String>,
    index: HashMap<String, usize>,
    closed: bool,
}

impl StateTable {
    fn declare(&mut self, name: &str) {
        if !self.index.contains_key(name) {
            self.index.insert(name.to_string(), self.names.len());
            self.names.push(name.to_string());
        }
    }

    fn lookup(&mut self, tok: &Token<'_>, line: usize) -> Result<usize, ParseError> {
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
        Ok(self.names.len() - 1)
    }
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError::new(ParseErrorKind::Syntax, line, column, message)
}
