use super::{CompensatedSum, RandomSource};
use crate::{Error, Result};

/// A residual `none` mass this far below zero is rounding noise and is
/// clamped to zero; anything more negative is reported as an error.
pub const NONE_CLAMP: f64 = 1e-12;

const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Explicit probability vector over outcomes `0..k`, optionally followed by
/// a residual `none` outcome carrying `1 - sum(weights)`.
///
/// The prefix sums are computed once; each selection is one uniform draw
/// and a binary search.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDistribution {
    weights: Vec<f64>,
    has_none: bool,
    none_mass: f64,
    cumulative: Vec<f64>,
}

impl FiniteDistribution {
    /// Builds the distribution. Without `none`, the weights must sum to 1
    /// within 1e-9; with `none`, the residual must be nonnegative (up to
    /// [`NONE_CLAMP`]).
    pub fn new(weights: Vec<f64>, has_none: bool) -> Result<Self> {
        if let Some(bad) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::Domain(format!("invalid probability weight {bad}")));
        }
        let mut acc = CompensatedSum::default();
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut last = 0.0f64;
        for &w in &weights {
            acc.add(w);
            // compensation can wiggle the running value by an ulp
            last = acc.value().max(last);
            cumulative.push(last);
        }
        let total = acc.value();
        let none_mass = if has_none {
            let residual = 1.0 - total;
            if residual < -NONE_CLAMP {
                return Err(Error::Inconsistent(format!(
                    "weights sum to {total}, leaving negative none mass {residual}"
                )));
            }
            residual.max(0.0)
        } else {
            if weights.is_empty() {
                return Err(Error::Domain("empty distribution without none outcome".into()));
            }
            if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
                return Err(Error::Domain(format!("weights sum to {total}, expected 1")));
            }
            0.0
        };
        Ok(FiniteDistribution { weights, has_none, none_mass, cumulative })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn has_none(&self) -> bool {
        self.has_none
    }

    pub fn none_mass(&self) -> f64 {
        self.none_mass
    }

    /// Number of non-`none` outcomes.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Inverts the cumulative vector at `u ∈ [0, 1)`.
    ///
    /// Returns the first index whose cumulative value exceeds `u`. Past the
    /// end the result is `none` when the distribution has a residual, and
    /// otherwise the last index (absorbing the sub-1e-9 normalization gap).
    pub fn select_with(&self, u: f64) -> Option<usize> {
        let i = self.cumulative.partition_point(|&c| c <= u);
        if i < self.weights.len() {
            Some(i)
        } else if self.has_none {
            None
        } else {
            // last index with positive weight
            self.weights.iter().rposition(|&w| w > 0.0)
        }
    }

    pub fn select(&self, src: &mut RandomSource) -> Option<usize> {
        self.select_with(src.uniform())
    }
}

/// Selects an outcome index, or `None` for the residual outcome.
pub fn select_fin(src: &mut RandomSource, dist: &FiniteDistribution) -> Option<usize> {
    dist.select(src)
}
