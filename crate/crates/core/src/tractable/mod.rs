//! Locally tractable distribution families and the generic two-level
//! selector built on top of them.
//!
//! A family is locally tractable when it can report the mass of each size
//! class, draw an element of a given size from the conditional
//! distribution, and name a maximum size whose tail mass is at most a given
//! `delta`. [`SelectAny`] turns those three primitives into a sampler for
//! the truncated distribution: it builds `P_M = (prob(0), ..., prob(M),
//! residual)` once per `delta`, selects a size from it, then selects within
//! the size class.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, RwLock};

use crate::distributions::{DirichletParams, FiniteDistribution, LengthTable, RandomSource};
use crate::{Error, Result};

mod triples;
mod words;

pub use triples::{
    max_len_3d, max_len_3d_strict, prob_3d, select_triple_independent, IndependentTriples, Triple, TripleFamily3D, TABLE_THRESHOLD,
};
pub use words::{max_len_2d, prob_2d, size_select_2d, Grid, Word, WordFamily1D, WordFamily2D};

/// The three primitives of a locally tractable distribution `T`, together
/// with the size function and per-element probabilities used in checks.
pub trait LocallyTractable: Sync {
    type Item: Clone + Send + fmt::Debug;

    /// Size of an element.
    fn size_of(&self, x: &Self::Item) -> u64;

    /// Mass of the size class `m`.
    fn prob(&self, m: u64) -> f64;

    /// Element of size `m` drawn from `T` conditioned on that size class.
    fn size_select(&self, src: &mut RandomSource, m: u64) -> Result<Self::Item>;

    /// A size bound whose tail mass is at most `delta`.
    fn max_len(&self, delta: f64) -> Result<u64>;

    /// `T(x)`.
    fn element_prob(&self, x: &Self::Item) -> f64;

    /// Probability that `size_select(size_of(x))` returns `x`, read off the
    /// vectors the selector actually uses.
    fn conditional_prob(&self, x: &Self::Item) -> f64;

    /// `(prob(0), ..., prob(max), residual)`.
    fn size_distribution(&self, max: u64) -> Result<FiniteDistribution> {
        FiniteDistribution::new((0..=max).map(|m| self.prob(m)).collect(), true)
    }
}

/// Anything that yields domain elements or the `none` outcome.
pub trait ElementSampler: Sync {
    type Item: Send;

    fn draw(&self, src: &mut RandomSource) -> Option<Self::Item>;
}

/// Size bound `M` and the size distribution `P_M` for one `delta`.
#[derive(Debug, Clone)]
pub struct Truncation {
    delta: f64,
    max_len: u64,
    sizes: FiniteDistribution,
}

impl Truncation {
    pub fn new<F: LocallyTractable + ?Sized>(family: &F, delta: f64) -> Result<Self> {
        let max_len = family.max_len(delta)?;
        crate::distributions::check_table_len(max_len)?;
        let sizes = family.size_distribution(max_len)?;
        Ok(Truncation { delta, max_len, sizes })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn max_len(&self) -> u64 {
        self.max_len
    }

    pub fn sizes(&self) -> &FiniteDistribution {
        &self.sizes
    }
}

/// Two-level sampler over a fixed truncation of a family.
#[derive(Debug, Clone)]
pub struct TruncatedSampler<'a, F> {
    family: &'a F,
    truncation: Arc<Truncation>,
}

impl<'a, F: LocallyTractable> TruncatedSampler<'a, F> {
    pub fn new(family: &'a F, truncation: Arc<Truncation>) -> Self {
        TruncatedSampler { family, truncation }
    }

    pub fn truncation(&self) -> &Truncation {
        &self.truncation
    }
}

impl<F: LocallyTractable> ElementSampler for TruncatedSampler<'_, F> {
    type Item = F::Item;

    fn draw(&self, src: &mut RandomSource) -> Option<F::Item> {
        let m = self.truncation.sizes.select(src)?;
        let x = self
            .family
            .size_select(src, m as u64)
            .expect("P_M gives zero mass to sizes the family cannot select");
        Some(x)
    }
}

/// Selector for the truncated distribution of a family, caching `P_M` per
/// `delta` on first use.
#[derive(Debug)]
pub struct SelectAny<F> {
    family: F,
    cache: Mutex<HashMap<u64, Arc<Truncation>>>,
}

impl<F: LocallyTractable> SelectAny<F> {
    pub fn new(family: F) -> Self {
        SelectAny { family, cache: Mutex::new(HashMap::new()) }
    }

    pub fn family(&self) -> &F {
        &self.family
    }

    pub fn truncation(&self, delta: f64) -> Result<Arc<Truncation>> {
        let mut cache = self.cache.lock().expect("truncation cache poisoned");
        if let Some(t) = cache.get(&delta.to_bits()) {
            return Ok(Arc::clone(t));
        }
        let t = Arc::new(Truncation::new(&self.family, delta)?);
        cache.insert(delta.to_bits(), Arc::clone(&t));
        Ok(t)
    }

    pub fn sampler(&self, delta: f64) -> Result<TruncatedSampler<'_, F>> {
        Ok(TruncatedSampler::new(&self.family, self.truncation(delta)?))
    }

    /// One draw from the `delta`-truncated distribution.
    pub fn select(&self, src: &mut RandomSource, delta: f64) -> Result<Option<F::Item>> {
        let truncation = self.truncation(delta)?;
        Ok(TruncatedSampler::new(&self.family, truncation).draw(src))
    }
}

/// Convenience wrapper for a single draw; builds `P_M` every call.
pub fn select_any<F: LocallyTractable>(
    src: &mut RandomSource,
    family: &F,
    delta: f64,
) -> Result<Option<F::Item>> {
    let truncation = Arc::new(Truncation::new(family, delta)?);
    Ok(TruncatedSampler::new(family, truncation).draw(src))
}

/// Lazily grown table of `T(l)` and prefix masses shared by the 2D and 3D
/// families. Grows by doubling; readers never block each other.
#[derive(Debug)]
pub(crate) struct PrefixCache {
    params: DirichletParams,
    table: RwLock<Arc<LengthTable>>,
}

impl PrefixCache {
    pub(crate) fn new(params: DirichletParams) -> Self {
        let initial = params.d() + 64;
        PrefixCache { params, table: RwLock::new(Arc::new(LengthTable::new(params, initial))) }
    }

    /// A table covering lengths `0..=upto`.
    pub(crate) fn table(&self, upto: u64) -> Arc<LengthTable> {
        {
            let table = self.table.read().expect("prefix cache poisoned");
            if table.max() >= upto {
                return Arc::clone(&table);
            }
        }
        let mut table = self.table.write().expect("prefix cache poisoned");
        if table.max() < upto {
            let target = upto.max(table.max().saturating_mul(2));
            *table = Arc::new(LengthTable::new(self.params, target));
        }
        Arc::clone(&table)
    }
}

impl Clone for PrefixCache {
    fn clone(&self) -> Self {
        let table = self.table.read().expect("prefix cache poisoned").clone();
        PrefixCache { params: self.params, table: RwLock::new(table) }
    }
}

pub(crate) fn below_shift(m: u64, d: u64) -> Result<()> {
    if m < d {
        Err(Error::Domain(format!("size {m} is below the shift d = {d}")))
    } else {
        Ok(())
    }
}
