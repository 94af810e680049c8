//! Brute-force references for validating the production code.
//!
//! Nothing here is used by the engines. The pmf, tails, membership tests
//! and masses are recomputed from scratch by direct enumeration so that a
//! mistake in a production formula cannot hide behind a shared helper.
//! Everything is exponential by design; [`EnumerationBudget`] caps the work.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use crate::domains::{CnfFormula, DiophantineEq, Element, FamilyKind, Nfa, SubsetSpec, TwoDAutomaton};
use crate::tractable::Grid;
use crate::{Error, Result};

/// Terms summed directly when computing the reference zeta value.
const ZETA_TERMS: u64 = 1_000_000;

/// Terms summed directly before an integral bound takes over in tails.
const TAIL_TERMS: u64 = 1_000_000;

/// Caps on exhaustive enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationBudget {
    pub max_size: u64,
    pub max_items: u64,
}

impl EnumerationBudget {
    pub fn new(max_size: u64, max_items: u64) -> Result<Self> {
        if max_size == 0 || max_items == 0 {
            return Err(Error::Domain("enumeration budget must be positive".into()));
        }
        Ok(EnumerationBudget { max_size, max_items })
    }

    fn charge(&self, used: &mut u64, amount: u64) -> Result<()> {
        *used = used.saturating_add(amount);
        if *used > self.max_items {
            return Err(Error::EnumerationBudget(format!("more than {} items", self.max_items)));
        }
        Ok(())
    }
}

/// A closed interval known to contain an exact quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
}

impl Bracket {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Rounding allowance added on both sides of every bracket.
const BRACKET_SLACK: f64 = 1e-12;

struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    fn new() -> Self {
        Kahan { sum: 0.0, carry: 0.0 }
    }

    fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

/// `(l + 1 - d)^{-t} / zeta(t)` with zeta from a long direct sum plus a
/// midpoint-rule remainder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferencePmf {
    pub t: f64,
    pub d: u64,
    pub zeta: f64,
}

impl ReferencePmf {
    pub fn new(t: f64, d: u64) -> Self {
        assert!(t > 1.0, "reference pmf needs t > 1");
        ReferencePmf { t, d, zeta: reference_zeta(t) }
    }

    pub fn pmf(&self, ell: u64) -> f64 {
        if ell < self.d {
            0.0
        } else {
            ((ell - self.d + 1) as f64).powf(-self.t) / self.zeta
        }
    }

    /// Mass of lengths strictly below `m`, summed term by term.
    pub fn below(&self, m: u64) -> f64 {
        let mut acc = Kahan::new();
        for ell in self.d..m {
            acc.add(self.pmf(ell));
        }
        acc.sum
    }

    /// An upper bound on the mass of lengths above `m`: a direct sum of
    /// the next terms plus the integral bound on what remains.
    pub fn tail_upper(&self, m: u64) -> f64 {
        if m < self.d {
            return 1.0;
        }
        let first = m - self.d + 2;
        let mut acc = Kahan::new();
        for k in first..first + TAIL_TERMS {
            acc.add((k as f64).powf(-self.t));
        }
        let last = (first + TAIL_TERMS - 1) as f64;
        let rest = last.powf(1.0 - self.t) / (self.t - 1.0);
        ((acc.sum + rest) / self.zeta * (1.0 + 1e-12)).min(1.0)
    }
}

pub fn reference_zeta(t: f64) -> f64 {
    let mut acc = Kahan::new();
    for k in (1..=ZETA_TERMS).rev() {
        acc.add((k as f64).powf(-t));
    }
    acc.sum + (ZETA_TERMS as f64 + 0.5).powf(1.0 - t) / (t - 1.0)
}

/// Upper bound on the mass outside `[d, m]^dims` for independent
/// coordinates.
pub fn product_tail_upper(pmf: &ReferencePmf, dims: u32, m: u64) -> f64 {
    let y = pmf.tail_upper(m);
    (1.0 - (1.0 - y).powi(dims as i32)).min(1.0)
}

/// Mass of the size class `m` of the product family in `dims` dimensions,
/// by listing every coordinate vector whose largest entry is `m`.
pub fn brute_size_class_mass(pmf: &ReferencePmf, dims: u32, m: u64, budget: &EnumerationBudget) -> Result<f64> {
    if !(1..=3).contains(&dims) {
        return Err(Error::Domain(format!("{dims} dimensions")));
    }
    if m > budget.max_size {
        return Err(Error::EnumerationBudget(format!("size {m} exceeds {}", budget.max_size)));
    }
    if m < pmf.d {
        return Ok(0.0);
    }
    let side = m - pmf.d + 1;
    let mut used = 0;
    budget.charge(&mut used, side.saturating_pow(dims))?;
    let mut acc = Kahan::new();
    let mut point = vec![pmf.d; dims as usize];
    loop {
        if point.iter().copied().max() == Some(m) {
            acc.add(point.iter().map(|&v| pmf.pmf(v)).product());
        }
        let mut k = 0;
        loop {
            if k == point.len() {
                return Ok(acc.sum);
            }
            if point[k] < m {
                point[k] += 1;
                break;
            }
            point[k] = pmf.d;
            k += 1;
        }
    }
}

/// The uncorrected 3D size-class expression
/// `3 y^2 + 3 y + T(m)^3` with `y` the mass below `m`. It omits the
/// `T(m)` factors and does not match the enumeration.
pub fn printed_prob_3d(pmf: &ReferencePmf, m: u64) -> f64 {
    let y = pmf.below(m);
    let tm = pmf.pmf(m);
    3.0 * y * y + 3.0 * y + tm * tm * tm
}

/// Runs `runner` on seeds `0..trials` and returns the fraction of `true`.
pub fn empirical_rate(trials: u64, runner: impl Fn(u64) -> bool + Sync) -> Result<f64> {
    if trials < 100 {
        return Err(Error::Domain(format!("need at least 100 trials, got {trials}")));
    }
    let hits = (0..trials).into_par_iter().filter(|&seed| runner(seed)).count();
    Ok(hits as f64 / trials as f64)
}

/// Index chosen by scanning cumulative weights left to right.
pub fn select_linear_scan(weights: &[f64], has_none: bool, u: f64) -> Option<usize> {
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return Some(i);
        }
    }
    if has_none {
        None
    } else {
        weights.iter().rposition(|&w| w > 0.0)
    }
}

/// Membership by enumerating every run of the automaton on `word`.
pub fn nfa_accepts_by_runs(nfa: &Nfa, word: &[u32]) -> bool {
    fn walk(nfa: &Nfa, state: usize, rest: &[u32]) -> bool {
        match rest.split_first() {
            None => nfa.is_accepting(state),
            Some((&a, tail)) => nfa.successors(state, a).iter().any(|&q| walk(nfa, q, tail)),
        }
    }
    nfa.start_states().iter().any(|&q| walk(nfa, q, word))
}

/// Deterministic automaton for the symmetric difference of two NFAs over
/// the same alphabet, by subset construction of the product.
pub struct ProductDfa {
    alphabet: Vec<String>,
    delta: Vec<Vec<usize>>,
    accepting: Vec<bool>,
}

impl ProductDfa {
    pub fn symmetric_difference(left: &Nfa, right: &Nfa) -> Result<Self> {
        let alphabet: Vec<String> = left.alphabet().to_vec();
        let remap: Vec<u32> = alphabet
            .iter()
            .map(|a| right.symbol_index(a).ok_or_else(|| Error::Config(format!("symbol `{a}` missing"))))
            .collect::<Result<_>>()?;
        type Key = (BTreeSet<usize>, BTreeSet<usize>);
        let step = |nfa: &Nfa, set: &BTreeSet<usize>, a: u32| -> BTreeSet<usize> {
            set.iter().flat_map(|&p| nfa.successors(p, a).iter().copied()).collect()
        };
        let accepts = |nfa: &Nfa, set: &BTreeSet<usize>| set.iter().any(|&q| nfa.is_accepting(q));
        let start: Key =
            (left.start_states().iter().copied().collect(), right.start_states().iter().copied().collect());
        let mut ids: HashMap<Key, usize> = HashMap::new();
        let mut order: Vec<Key> = vec![start.clone()];
        ids.insert(start, 0);
        let mut delta = Vec::new();
        let mut accepting = Vec::new();
        let mut i = 0;
        while i < order.len() {
            let (l, r) = order[i].clone();
            accepting.push(accepts(left, &l) != accepts(right, &r));
            let mut row = Vec::with_capacity(alphabet.len());
            for (a, &b) in remap.iter().enumerate() {
                let next: Key = (step(left, &l, a as u32), step(right, &r, b));
                let id = *ids.entry(next.clone()).or_insert_with(|| {
                    order.push(next);
                    order.len() - 1
                });
                row.push(id);
            }
            delta.push(row);
            i += 1;
        }
        Ok(ProductDfa { alphabet, delta, accepting })
    }

    pub fn accepts(&self, word: &[u32]) -> bool {
        let mut q = 0;
        for &a in word {
            q = self.delta[q][a as usize];
        }
        self.accepting[q]
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet.len()
    }

    pub fn state_count(&self) -> usize {
        self.delta.len()
    }
}

/// Truth table of a formula over all `2^k` assignments; bit `i` of the
/// index is variable `i + 1`.
pub fn cnf_truth_table(formula: &CnfFormula) -> Result<Vec<bool>> {
    let k = formula.num_vars();
    if k > 20 {
        return Err(Error::EnumerationBudget(format!("truth table over {k} variables")));
    }
    let masks: Vec<(u32, u32)> = formula
        .clauses()
        .iter()
        .map(|clause| {
            let mut pos = 0u32;
            let mut neg = 0u32;
            for &lit in clause {
                let bit = 1u32 << (lit.unsigned_abs() - 1);
                if lit > 0 {
                    pos |= bit;
                } else {
                    neg |= bit;
                }
            }
            (pos, neg)
        })
        .collect();
    Ok((0..1u32 << k).map(|a| masks.iter().all(|&(pos, neg)| a & pos != 0 || !a & neg != 0)).collect())
}

/// Assignment for a truth-table index.
pub fn assignment_of(index: u32, k: u64) -> Vec<bool> {
    (0..k).map(|i| index >> i & 1 == 1).collect()
}

/// Whether the first row of `grid` consists of `symbol` only.
pub fn first_row_all(grid: &Grid, symbol: u32) -> bool {
    grid.rows() == 0 || (0..grid.cols()).all(|c| grid.get(0, c) == symbol)
}

/// Every `rows x cols` grid over `alphabet` symbols.
pub fn all_grids(rows: usize, cols: usize, alphabet: u32) -> Vec<Grid> {
    let cells = rows * cols;
    let count = (alphabet as u64).pow(cells as u32);
    (0..count)
        .map(|mut code| {
            let v: Vec<u32> = (0..cells)
                .map(|_| {
                    let a = (code % alphabet as u64) as u32;
                    code /= alphabet as u64;
                    a
                })
                .collect();
            Grid::new(rows, cols, v).expect("sized grid")
        })
        .collect()
}

/// Symbol under the head at framed position `(r, c)`; `None` is the border.
fn framed(grid: &Grid, r: usize, c: usize) -> Option<u32> {
    if r == 0 || c == 0 || r > grid.rows() || c > grid.cols() {
        None
    } else {
        Some(grid.get(r - 1, c - 1))
    }
}

fn step(r: usize, c: usize, mv: crate::domains::Move, grid: &Grid) -> Option<(usize, usize)> {
    use crate::domains::Move::*;
    let (r, c) = match mv {
        Up => (r.checked_sub(1)?, c),
        Down => (r + 1, c),
        Left => (r, c.checked_sub(1)?),
        Right => (r, c + 1),
        Stay => (r, c),
    };
    (r <= grid.rows() + 1 && c <= grid.cols() + 1).then_some((r, c))
}

/// Membership for a two-dimensional automaton by depth-first search over
/// configurations.
pub fn twod_accepts_dfs(a: &TwoDAutomaton, grid: &Grid) -> bool {
    let border = a.alphabet_size() as usize;
    let mut seen = BTreeSet::new();
    let mut stack = vec![(a.start_state(), 1usize, 1usize)];
    while let Some(conf @ (q, r, c)) = stack.pop() {
        if !seen.insert(conf) {
            continue;
        }
        if a.is_accepting(q) {
            return true;
        }
        let sym = framed(grid, r, c).map(|s| s as usize).unwrap_or(border);
        for &(next, mv) in a.successors(q, sym) {
            if let Some((nr, nc)) = step(r, c, mv, grid) {
                stack.push((next, nr, nc));
            }
        }
    }
    false
}

/// Step-by-step run of a deterministic automaton, rejecting when it stops
/// or revisits a configuration. `None` when some transition has more than
/// one successor.
pub fn twod_deterministic_run(a: &TwoDAutomaton, grid: &Grid) -> Option<bool> {
    let border = a.alphabet_size() as usize;
    let mut seen = BTreeSet::new();
    let (mut q, mut r, mut c) = (a.start_state(), 1usize, 1usize);
    loop {
        if a.is_accepting(q) {
            return Some(true);
        }
        if !seen.insert((q, r, c)) {
            return Some(false);
        }
        let sym = framed(grid, r, c).map(|s| s as usize).unwrap_or(border);
        match a.successors(q, sym) {
            [] => return Some(false),
            [(next, mv)] => match step(r, c, *mv, grid) {
                Some((nr, nc)) => (q, r, c) = (*next, nr, nc),
                None => return Some(false),
            },
            _ => return None,
        }
    }
}

/// Evaluates the polynomial with terms in reverse order and powers by
/// repeated multiplication.
pub fn dioph_eval_reordered(eq: &DiophantineEq, point: [u64; 3]) -> BigInt {
    let mut total = BigInt::zero();
    for (coefficient, exps) in eq.terms().iter().rev() {
        let mut v = coefficient.clone();
        for k in (0..3).rev() {
            for _ in 0..exps[k] {
                v *= point[k];
            }
        }
        total += v;
    }
    total
}

/// Checked 128-bit evaluation; `None` on overflow.
pub fn dioph_eval_i128(eq: &DiophantineEq, point: [u64; 3]) -> Option<i128> {
    let mut total = 0i128;
    for (coefficient, exps) in eq.terms() {
        let mut v: i128 = coefficient.try_into().ok()?;
        for k in 0..3 {
            for _ in 0..exps[k] {
                v = v.checked_mul(point[k] as i128)?;
            }
        }
        total = total.checked_add(v)?;
    }
    Some(total)
}

fn oracle_member(spec: &SubsetSpec, x: &Element) -> Result<bool> {
    Ok(match (spec, x) {
        (SubsetSpec::Nfa(a), Element::Word(w)) => nfa_accepts_by_runs(a, w),
        (SubsetSpec::SymmetricDifference(d), Element::Word(w)) => {
            let translated: Vec<u32> = w
                .iter()
                .map(|&a| d.right().symbol_index(&d.left().alphabet()[a as usize]).expect("shared alphabet"))
                .collect();
            nfa_accepts_by_runs(d.left(), w) != nfa_accepts_by_runs(d.right(), &translated)
        }
        (SubsetSpec::Cnf(f), Element::Assignment(v)) => {
            let index = v.iter().enumerate().fold(0u32, |acc, (i, &b)| acc | (b as u32) << i);
            cnf_truth_table(f)?[index as usize]
        }
        (SubsetSpec::TwoD(a), Element::Grid(g)) => twod_accepts_dfs(a, g),
        (SubsetSpec::Diophantine(eq), Element::Triple(p)) => dioph_eval_reordered(eq, *p).is_zero(),
        _ => return Err(Error::Config("element and instance kinds differ".into())),
    })
}

fn alphabet_size(spec: &SubsetSpec) -> u64 {
    match spec {
        SubsetSpec::Nfa(a) => a.alphabet().len() as u64,
        SubsetSpec::SymmetricDifference(d) => d.left().alphabet().len() as u64,
        SubsetSpec::TwoD(a) => a.alphabet().len() as u64,
        _ => 0,
    }
}

fn all_words(len: u64, s: u64) -> impl Iterator<Item = Vec<u32>> {
    let count = s.checked_pow(len as u32).unwrap_or(u64::MAX);
    (0..count).map(move |mut code| {
        (0..len)
            .map(|_| {
                let a = (code % s) as u32;
                code /= s;
                a
            })
            .collect()
    })
}

fn slack(lower: f64, upper: f64) -> Bracket {
    Bracket { lower: (lower - BRACKET_SLACK).max(0.0), upper: (upper + BRACKET_SLACK).min(1.0) }
}

/// Brackets `T(L(spec))` by summing the probabilities of all members of
/// size at most `budget.max_size` and adding an upper bound on the rest.
/// For finite families every element is enumerated.
pub fn exact_mass(
    spec: &SubsetSpec,
    family: FamilyKind,
    t: f64,
    d: u64,
    budget: &EnumerationBudget,
) -> Result<Bracket> {
    if !spec.supports(family) {
        return Err(Error::Config(format!("family {family} does not apply")));
    }
    let mut used = 0u64;
    let mut acc = Kahan::new();
    match family {
        FamilyKind::UniformBlock | FamilyKind::UniformAssignment => {
            let (k, s) = match spec {
                SubsetSpec::Cnf(f) => (f.num_vars(), 2),
                _ => (
                    spec.distr_parameter().ok_or_else(|| Error::Config("no block length".into()))?,
                    alphabet_size(spec),
                ),
            };
            let count = s.checked_pow(k as u32).unwrap_or(u64::MAX);
            budget.charge(&mut used, count)?;
            let each = (s as f64).powi(-(k as i32));
            for word in all_words(k, s) {
                let x = match spec {
                    SubsetSpec::Cnf(_) => Element::Assignment(word.iter().map(|&b| b == 1).collect()),
                    _ => Element::Word(word),
                };
                if oracle_member(spec, &x)? {
                    acc.add(each);
                }
            }
            Ok(slack(acc.sum, acc.sum))
        }
        FamilyKind::Word1D => {
            let pmf = ReferencePmf::new(t, d);
            let s = alphabet_size(spec);
            for len in d..=budget.max_size {
                let count = s.checked_pow(len as u32).unwrap_or(u64::MAX);
                budget.charge(&mut used, count)?;
                let each = pmf.pmf(len) / (s as f64).powi(len as i32);
                for w in all_words(len, s) {
                    if oracle_member(spec, &Element::Word(w))? {
                        acc.add(each);
                    }
                }
            }
            Ok(slack(acc.sum, acc.sum + pmf.tail_upper(budget.max_size)))
        }
        FamilyKind::Word2D => {
            let pmf = ReferencePmf::new(t, d);
            let s = alphabet_size(spec) as u32;
            for rows in d..=budget.max_size {
                for cols in d..=budget.max_size {
                    let cells = rows.saturating_mul(cols);
                    let count = (s as u64).checked_pow(cells as u32).unwrap_or(u64::MAX);
                    budget.charge(&mut used, count)?;
                    let each = pmf.pmf(rows) * pmf.pmf(cols) / (s as f64).powi(cells as i32);
                    for g in all_grids(rows as usize, cols as usize, s) {
                        if oracle_member(spec, &Element::Grid(g))? {
                            acc.add(each);
                        }
                    }
                }
            }
            Ok(slack(acc.sum, acc.sum + product_tail_upper(&pmf, 2, budget.max_size)))
        }
        FamilyKind::Triple3D => {
            let pmf = ReferencePmf::new(t, d);
            if budget.max_size >= d {
                let side = budget.max_size - d + 1;
                budget.charge(&mut used, side.saturating_pow(3))?;
            }
            for x in d..=budget.max_size {
                for y in d..=budget.max_size {
                    for z in d..=budget.max_size {
                        if oracle_member(spec, &Element::Triple([x, y, z]))? {
                            acc.add(pmf.pmf(x) * pmf.pmf(y) * pmf.pmf(z));
                        }
                    }
                }
            }
            Ok(slack(acc.sum, acc.sum + product_tail_upper(&pmf, 3, budget.max_size)))
        }
    }
}
