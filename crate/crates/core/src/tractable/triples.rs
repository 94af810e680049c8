use super::{below_shift, ElementSampler, LocallyTractable, PrefixCache};
use crate::distributions::{check_delta, truncate, DirichletParams, DirichletRejection, FiniteDistribution, RandomSource};
use crate::Result;

/// A point of `N_0^3`.
pub type Triple = [u64; 3];

/// Which coordinates equal the size `m` in each part of the size class;
/// the others are below `m`.
const CELLS: [[bool; 3]; 7] = [
    [true, false, false],
    [false, true, false],
    [false, false, true],
    [true, true, false],
    [true, false, true],
    [false, true, true],
    [true, true, true],
];

/// Product distribution `T(j) T(k) T(l)` on triples, sized by the largest
/// coordinate.
#[derive(Debug, Clone)]
pub struct TripleFamily3D {
    params: DirichletParams,
    prefix: PrefixCache,
    strict_tail: bool,
}

fn cell_masses(tm: f64, y: f64) -> [f64; 7] {
    let one = tm * y * y;
    let two = tm * tm * y;
    [one, one, one, two, two, two, tm * tm * tm]
}

fn prob_3d_from(tm: f64, y: f64) -> f64 {
    3.0 * tm * y * y + 3.0 * tm * tm * y + tm * tm * tm
}

impl TripleFamily3D {
    pub fn new(params: DirichletParams) -> Self {
        TripleFamily3D { params, prefix: PrefixCache::new(params), strict_tail: false }
    }

    /// Selects [`max_len_3d_strict`] instead of [`max_len_3d`] as the
    /// family's size bound.
    pub fn with_strict_tail(mut self, strict: bool) -> Self {
        self.strict_tail = strict;
        self
    }

    pub fn strict_tail(&self) -> bool {
        self.strict_tail
    }

    pub fn params(&self) -> &DirichletParams {
        &self.params
    }

    /// Conditional distribution over the seven parts of the size class `m`
    /// (one, two or three coordinates equal to `m`).
    pub fn cell_distribution(&self, m: u64) -> Result<FiniteDistribution> {
        below_shift(m, self.params.d())?;
        let table = self.prefix.table(m);
        let (tm, y) = (table.pmf(m), table.below(m));
        let total = prob_3d_from(tm, y);
        FiniteDistribution::new(cell_masses(tm, y).iter().map(|w| w / total).collect(), false)
    }
}

/// `3 T(m) y^2 + 3 T(m)^2 y + T(m)^3` with `y = T(l < m)`.
pub fn prob_3d(family: &TripleFamily3D, m: u64) -> f64 {
    if m < family.params.d() {
        return 0.0;
    }
    let table = family.prefix.table(m);
    prob_3d_from(table.pmf(m), table.below(m))
}

/// `ceil((2/delta)^(1/(t-1))) + d - 1`.
///
/// This keeps the 1D tail `x` below `delta/2`, but the 3D tail
/// `1 - (1 - x)^3` is close to `3x`, so the bound only holds when
/// `(t - 1) zeta(t) >= 3/2` (roughly `t >= 1.8`). For smaller `t` it
/// overshoots `delta` by up to 50%; see [`max_len_3d_strict`].
pub fn max_len_3d(family: &TripleFamily3D, delta: f64) -> Result<u64> {
    check_delta(delta)?;
    family.params.max_len_from_inverse_tail(2.0 / delta)
}

/// `ceil((3/delta)^(1/(t-1))) + d - 1`, which keeps `x <= delta/3` and so
/// `1 - (1 - x)^3 <= 3x <= delta` for every `t`.
pub fn max_len_3d_strict(family: &TripleFamily3D, delta: f64) -> Result<u64> {
    check_delta(delta)?;
    family.params.max_len_from_inverse_tail(3.0 / delta)
}

impl LocallyTractable for TripleFamily3D {
    type Item = Triple;

    fn size_of(&self, x: &Triple) -> u64 {
        x[0].max(x[1]).max(x[2])
    }

    fn prob(&self, m: u64) -> f64 {
        prob_3d(self, m)
    }

    /// Picks the part of the size class, then draws each coordinate below
    /// `m` from `T` restricted to `[d, m)` by inverting the prefix table.
    /// Equivalent to selecting from the full conditional distribution over
    /// all `3m^2 + 3m + 1` triples, at O(log m) per coordinate.
    fn size_select(&self, src: &mut RandomSource, m: u64) -> Result<Triple> {
        let cells = self.cell_distribution(m)?;
        let pattern = CELLS[cells.select(src).expect("no none outcome")];
        let table = self.prefix.table(m);
        let mut out = [m; 3];
        for (coord, at_max) in out.iter_mut().zip(pattern) {
            if !at_max {
                *coord = table.invert_below(m, src.uniform());
            }
        }
        Ok(out)
    }

    fn max_len(&self, delta: f64) -> Result<u64> {
        if self.strict_tail {
            max_len_3d_strict(self, delta)
        } else {
            max_len_3d(self, delta)
        }
    }

    fn element_prob(&self, x: &Triple) -> f64 {
        x.iter().map(|&c| self.params.pmf(c)).product()
    }

    fn conditional_prob(&self, x: &Triple) -> f64 {
        let m = self.size_of(x);
        if x.iter().any(|&c| c < self.params.d()) {
            return 0.0;
        }
        let Ok(cells) = self.cell_distribution(m) else {
            return 0.0;
        };
        let pattern = [x[0] == m, x[1] == m, x[2] == m];
        let cell = CELLS.iter().position(|c| *c == pattern).expect("some coordinate equals m");
        let table = self.prefix.table(m);
        let y = table.below(m);
        x.iter()
            .filter(|&&c| c < m)
            .fold(cells.weights()[cell], |acc, &c| acc * table.pmf(c) / y)
    }

    fn size_distribution(&self, max: u64) -> Result<FiniteDistribution> {
        let table = self.prefix.table(max);
        let d = self.params.d();
        let weights = (0..=max)
            .map(|m| if m < d { 0.0 } else { prob_3d_from(table.pmf(m), table.below(m)) })
            .collect();
        FiniteDistribution::new(weights, true)
    }
}

/// Three independent coordinates from a truncated 1D distribution; `none`
/// as soon as any coordinate is `none`.
pub fn select_triple_independent(
    src: &mut RandomSource,
    lengths: &FiniteDistribution,
) -> Option<Triple> {
    let x = lengths.select(src)? as u64;
    let y = lengths.select(src)? as u64;
    let z = lengths.select(src)? as u64;
    Some([x, y, z])
}

/// Sampler for `T^3` truncated at `max(j, k, l) <= M`, built from the 1D
/// truncation at the same `M`. The residual `1 - (1 - x)^3` equals the 3D
/// tail, so each triple keeps probability `T(j) T(k) T(l)`.
///
/// Up to [`TABLE_THRESHOLD`] the coordinates come from the cumulative
/// table of the 1D truncation; past it from [`DirichletRejection`], which
/// has the same distribution and needs no table.
#[derive(Debug, Clone)]
pub struct IndependentTriples {
    max_len: u64,
    lengths: Lengths,
}

/// Largest `M` sampled through an explicit table.
pub const TABLE_THRESHOLD: u64 = 1 << 22;

#[derive(Debug, Clone)]
enum Lengths {
    Table(FiniteDistribution),
    Rejection(DirichletRejection),
}

impl IndependentTriples {
    pub fn new(params: &DirichletParams, max_len: u64) -> Result<Self> {
        if max_len > TABLE_THRESHOLD {
            Self::by_rejection(params, max_len)
        } else {
            Ok(IndependentTriples { max_len, lengths: Lengths::Table(truncate(params, max_len)?) })
        }
    }

    /// Forces the table-free path regardless of `max_len`.
    pub fn by_rejection(params: &DirichletParams, max_len: u64) -> Result<Self> {
        below_shift(max_len, params.d())?;
        Ok(IndependentTriples { max_len, lengths: Lengths::Rejection(DirichletRejection::new(*params)) })
    }

    pub fn max_len(&self) -> u64 {
        self.max_len
    }

    /// The 1D truncation, when the table path is in use.
    pub fn lengths(&self) -> Option<&FiniteDistribution> {
        match &self.lengths {
            Lengths::Table(t) => Some(t),
            Lengths::Rejection(_) => None,
        }
    }
}

impl ElementSampler for IndependentTriples {
    type Item = Triple;

    fn draw(&self, src: &mut RandomSource) -> Option<Triple> {
        match &self.lengths {
            Lengths::Table(table) => select_triple_independent(src, table),
            Lengths::Rejection(r) => {
                let x = r.sample_truncated(src, self.max_len)?;
                let y = r.sample_truncated(src, self.max_len)?;
                let z = r.sample_truncated(src, self.max_len)?;
                Some([x, y, z])
            }
        }
    }
}
