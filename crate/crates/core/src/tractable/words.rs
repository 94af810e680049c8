use super::{below_shift, LocallyTractable, PrefixCache};
use crate::distributions::{
    check_delta, max_len_1d, DirichletParams, FiniteDistribution, RandomSource,
};
use crate::{Error, Result};

/// A word as a sequence of symbol indices into an alphabet.
pub type Word = Vec<u32>;

/// Rectangular 2D word stored row-major. Either dimension may be zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Grid {
    rows: usize,
    cols: usize,
    cells: Vec<u32>,
}

impl Grid {
    pub fn new(rows: usize, cols: usize, cells: Vec<u32>) -> Result<Self> {
        if rows.checked_mul(cols) != Some(cells.len()) {
            return Err(Error::Input(format!(
                "{} cells do not fill a {rows}x{cols} grid",
                cells.len()
            )));
        }
        Ok(Grid { rows, cols, cells })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn cells(&self) -> &[u32] {
        &self.cells
    }

    /// Symbol at 0-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.cells[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[u32] {
        &self.cells[row * self.cols..(row + 1) * self.cols]
    }
}

fn uniform_power(alphabet: u32, exponent: u64) -> f64 {
    f64::from(alphabet).powf(-(exponent as f64))
}

fn check_alphabet(alphabet: u32) -> Result<()> {
    if alphabet == 0 {
        Err(Error::Domain("alphabet must be nonempty".into()))
    } else {
        Ok(())
    }
}

/// Dirichlet word distribution: a length from `T`, then each symbol
/// uniformly. Size is word length.
#[derive(Debug, Clone)]
pub struct WordFamily1D {
    params: DirichletParams,
    alphabet: u32,
}

impl WordFamily1D {
    pub fn new(params: DirichletParams, alphabet: u32) -> Result<Self> {
        check_alphabet(alphabet)?;
        Ok(WordFamily1D { params, alphabet })
    }

    pub fn params(&self) -> &DirichletParams {
        &self.params
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }
}

impl LocallyTractable for WordFamily1D {
    type Item = Word;

    fn size_of(&self, x: &Word) -> u64 {
        x.len() as u64
    }

    fn prob(&self, m: u64) -> f64 {
        self.params.pmf(m)
    }

    fn size_select(&self, src: &mut RandomSource, m: u64) -> Result<Word> {
        below_shift(m, self.params.d())?;
        Ok((0..m).map(|_| src.below(self.alphabet)).collect())
    }

    fn max_len(&self, delta: f64) -> Result<u64> {
        max_len_1d(&self.params, delta)
    }

    fn element_prob(&self, x: &Word) -> f64 {
        self.params.pmf(x.len() as u64) * uniform_power(self.alphabet, x.len() as u64)
    }

    fn conditional_prob(&self, x: &Word) -> f64 {
        uniform_power(self.alphabet, x.len() as u64)
    }
}

/// 2D Dirichlet word distribution: independent row and column counts from
/// `T`, then each cell uniformly. Size is `max(rows, cols)`.
#[derive(Debug, Clone)]
pub struct WordFamily2D {
    params: DirichletParams,
    alphabet: u32,
    prefix: PrefixCache,
}

impl WordFamily2D {
    pub fn new(params: DirichletParams, alphabet: u32) -> Result<Self> {
        check_alphabet(alphabet)?;
        Ok(WordFamily2D { params, alphabet, prefix: PrefixCache::new(params) })
    }

    pub fn params(&self) -> &DirichletParams {
        &self.params
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    /// The pairs of the size class `m` in selection order
    /// `(m, d..m)`, `(d..m, m)`, `(m, m)` and their conditional weights.
    pub fn dimension_distribution(&self, m: u64) -> Result<(Vec<(u64, u64)>, FiniteDistribution)> {
        let d = self.params.d();
        below_shift(m, d)?;
        let table = self.prefix.table(m);
        let tm = table.pmf(m);
        let total = prob_2d_from(tm, table.below(m));
        let mut pairs = Vec::with_capacity(2 * (m - d) as usize + 1);
        let mut weights = Vec::with_capacity(pairs.capacity());
        for j in d..m {
            pairs.push((m, j));
            weights.push(tm * table.pmf(j) / total);
        }
        for j in d..m {
            pairs.push((j, m));
            weights.push(table.pmf(j) * tm / total);
        }
        pairs.push((m, m));
        weights.push(tm * tm / total);
        Ok((pairs, FiniteDistribution::new(weights, false)?))
    }
}

fn prob_2d_from(tm: f64, below: f64) -> f64 {
    2.0 * tm * below + tm * tm
}

/// `2 T(m) T(l < m) + T(m)^2`, the mass of 2D words with `max(rows, cols) = m`.
pub fn prob_2d(family: &WordFamily2D, m: u64) -> f64 {
    if m < family.params.d() {
        return 0.0;
    }
    let table = family.prefix.table(m);
    prob_2d_from(table.pmf(m), table.below(m))
}

/// Selects dimensions from the size class `m`, then fills every cell
/// uniformly.
pub fn size_select_2d(src: &mut RandomSource, family: &WordFamily2D, m: u64) -> Result<Grid> {
    let (pairs, dist) = family.dimension_distribution(m)?;
    let (rows, cols) = pairs[dist.select(src).expect("no none outcome")];
    let (rows, cols) = (rows as usize, cols as usize);
    let cells = (0..rows * cols).map(|_| src.below(family.alphabet)).collect();
    Grid::new(rows, cols, cells)
}

/// `ceil((1/(1 - sqrt(1 - delta)))^(1/(t-1))) + d - 1`.
///
/// `1 - sqrt(1 - delta)` is evaluated as `delta / (1 + sqrt(1 - delta))`,
/// which avoids cancellation for small `delta`.
pub fn max_len_2d(family: &WordFamily2D, delta: f64) -> Result<u64> {
    check_delta(delta)?;
    let one_dim_tail = delta / (1.0 + (1.0 - delta).sqrt());
    family.params.max_len_from_inverse_tail(1.0 / one_dim_tail)
}

impl LocallyTractable for WordFamily2D {
    type Item = Grid;

    fn size_of(&self, x: &Grid) -> u64 {
        x.rows.max(x.cols) as u64
    }

    fn prob(&self, m: u64) -> f64 {
        prob_2d(self, m)
    }

    fn size_select(&self, src: &mut RandomSource, m: u64) -> Result<Grid> {
        size_select_2d(src, self, m)
    }

    fn max_len(&self, delta: f64) -> Result<u64> {
        max_len_2d(self, delta)
    }

    fn element_prob(&self, x: &Grid) -> f64 {
        self.params.pmf(x.rows as u64)
            * self.params.pmf(x.cols as u64)
            * uniform_power(self.alphabet, (x.rows * x.cols) as u64)
    }

    fn conditional_prob(&self, x: &Grid) -> f64 {
        let m = self.size_of(x);
        let Ok((pairs, dist)) = self.dimension_distribution(m) else {
            return 0.0;
        };
        let key = (x.rows as u64, x.cols as u64);
        pairs
            .iter()
            .position(|&p| p == key)
            .map_or(0.0, |i| dist.weights()[i])
            * uniform_power(self.alphabet, (x.rows * x.cols) as u64)
    }

    fn size_distribution(&self, max: u64) -> Result<FiniteDistribution> {
        let table = self.prefix.table(max);
        let d = self.params.d();
        let weights = (0..=max)
            .map(|m| if m < d { 0.0 } else { prob_2d_from(table.pmf(m), table.below(m)) })
            .collect();
        FiniteDistribution::new(weights, true)
    }
}
