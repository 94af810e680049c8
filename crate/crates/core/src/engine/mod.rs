//! Sampling decision procedures for emptiness and universality.
//!
//! Both problems share one harness: draw `n = ceil(c / (eps - delta))`
//! elements (with `delta = eps / 2` by default) from the truncated
//! distribution and stop at the first witness. Emptiness looks for a
//! member, universality for a non-member; a `none` outcome never stops the
//! loop. A `False` verdict is always certified by its witness. A `True`
//! verdict is wrong with probability at most 1/4 when the instance lies
//! outside the tolerance band, provided `c` satisfies the cubic condition
//! checked by [`check_constant`].

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use crate::distributions::RandomSource;
use crate::tractable::{ElementSampler, LocallyTractable, Truncation, TruncatedSampler};
use crate::{Error, Result};

/// Smallest sample constant accepted by default.
pub const DEFAULT_C: f64 = 4.76603;

/// Iterations per parallel batch; also the deadline polling interval.
const BATCH: u64 = 1024;

/// `c^3 >= 2c^2 + 5c + 39`.
pub fn check_constant(c: f64) -> bool {
    c * c * c >= 2.0 * c * c + 5.0 * c + 39.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    Emptiness,
    Universality,
}

/// Anything that decides membership of domain elements.
pub trait Membership<X: ?Sized>: Sync {
    fn contains(&self, x: &X) -> bool;
}

impl<X: ?Sized, F: Fn(&X) -> bool + Sync> Membership<X> for F {
    fn contains(&self, x: &X) -> bool {
        self(x)
    }
}

#[derive(Debug, Clone)]
pub struct PraxConfig {
    pub epsilon: f64,
    pub seed: u64,
    pub c: f64,
    /// Fraction of `epsilon` given to the truncation; the sample count uses
    /// the rest.
    pub split: f64,
    pub parallel: bool,
    pub deadline: Option<Instant>,
    /// Use the 3D size bound that keeps the tail below `delta` for every
    /// `t` (inverse tail `3/delta` instead of `2/delta`).
    pub strict_tail: bool,
}

impl PraxConfig {
    pub fn new(epsilon: f64, seed: u64) -> Result<Self> {
        let config = PraxConfig {
            epsilon,
            seed,
            c: DEFAULT_C,
            split: 0.5,
            parallel: false,
            deadline: None,
            strict_tail: false,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_c(mut self, c: f64) -> Result<Self> {
        self.c = c;
        self.validate()?;
        Ok(self)
    }

    pub fn with_split(mut self, split: f64) -> Result<Self> {
        self.split = split;
        self.validate()?;
        Ok(self)
    }

    pub fn parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn strict_tail(mut self, strict: bool) -> Self {
        self.strict_tail = strict;
        self
    }

    pub fn deadline(mut self, deadline: Option<Instant>) -> Self {
        self.deadline = deadline;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if !(self.c > 0.0 && check_constant(self.c)) {
            return Err(Error::Config(format!(
                "sample constant {} violates c^3 >= 2c^2 + 5c + 39",
                self.c
            )));
        }
        if !(self.split > 0.0 && self.split < 1.0) {
            return Err(Error::Config(format!("split must lie in (0, 1), got {}", self.split)));
        }
        Ok(())
    }

    /// Seeded source for this configuration.
    pub fn source(&self) -> RandomSource {
        RandomSource::new(self.seed)
    }

    /// Tail mass allowed to the truncation.
    pub fn truncation_delta(&self) -> f64 {
        self.epsilon * self.split
    }
}

/// `ceil(c / (eps - delta))`; with the default split this is `ceil(c / (eps/2))`.
pub fn sample_count(config: &PraxConfig) -> u64 {
    let margin = config.epsilon - config.truncation_delta();
    (config.c / margin).ceil() as u64
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict<X> {
    pub answer: bool,
    /// Present iff `answer` is false.
    pub witness: Option<X>,
    pub samples_used: u64,
    pub none_count: u64,
}

impl<X> Verdict<X> {
    pub fn map_witness<Y>(self, f: impl FnOnce(X) -> Y) -> Verdict<Y> {
        Verdict {
            answer: self.answer,
            witness: self.witness.map(f),
            samples_used: self.samples_used,
            none_count: self.none_count,
        }
    }
}

/// Draws `n` elements and returns the fraction satisfying `predicate`.
pub fn estimate_parameter<X>(
    src: &mut RandomSource,
    n: u64,
    mut sampler: impl FnMut(&mut RandomSource) -> X,
    predicate: impl Fn(&X) -> bool,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("sample size must be positive".into()));
    }
    let mut count = 0u64;
    for _ in 0..n {
        if predicate(&sampler(src)) {
            count += 1;
        }
    }
    Ok(count as f64 / n as f64)
}

enum Outcome<X> {
    None,
    Pass,
    Witness(X),
}

fn one_iteration<S, P>(stream: &RandomSource, i: u64, sampler: &S, spec: &P, problem: Problem) -> Outcome<S::Item>
where
    S: ElementSampler,
    P: Membership<S::Item> + ?Sized,
{
    let mut src = stream.split(i);
    match sampler.draw(&mut src) {
        None => Outcome::None,
        Some(x) => {
            let hit = match problem {
                Problem::Emptiness => spec.contains(&x),
                Problem::Universality => !spec.contains(&x),
            };
            if hit {
                Outcome::Witness(x)
            } else {
                Outcome::Pass
            }
        }
    }
}

/// The shared loop: `n` iterations, each on its own child stream of a
/// source forked from `src`, stopping at the lowest-index witness.
///
/// Iteration `i` draws from `stream.split(i)`, so sequential and parallel
/// runs return the same verdict for the same seed.
pub fn run_sampler<S, P>(
    src: &mut RandomSource,
    spec: &P,
    sampler: &S,
    problem: Problem,
    n: u64,
    config: &PraxConfig,
) -> Result<Verdict<S::Item>>
where
    S: ElementSampler,
    P: Membership<S::Item> + ?Sized,
{
    let stream = src.fork();
    let mut none_count = 0u64;
    let mut start = 0u64;
    while start < n {
        if let Some(deadline) = config.deadline {
            if Instant::now() >= deadline {
                return Err(Error::BudgetExhausted { samples_used: start, none_count });
            }
        }
        let end = (start + BATCH).min(n);
        let outcomes: Vec<Outcome<S::Item>> = if config.parallel {
            (start..end)
                .into_par_iter()
                .map(|i| one_iteration(&stream, i, sampler, spec, problem))
                .collect()
        } else {
            let mut out = Vec::with_capacity((end - start) as usize);
            for i in start..end {
                let o = one_iteration(&stream, i, sampler, spec, problem);
                let stop = matches!(o, Outcome::Witness(_));
                out.push(o);
                if stop {
                    break;
                }
            }
            out
        };
        for (offset, outcome) in outcomes.into_iter().enumerate() {
            match outcome {
                Outcome::None => none_count += 1,
                Outcome::Pass => {}
                Outcome::Witness(x) => {
                    debug_assert!(match problem {
                        Problem::Emptiness => spec.contains(&x),
                        Problem::Universality => !spec.contains(&x),
                    });
                    return Ok(Verdict {
                        answer: false,
                        witness: Some(x),
                        samples_used: start + offset as u64 + 1,
                        none_count,
                    });
                }
            }
        }
        start = end;
    }
    Ok(Verdict { answer: true, witness: None, samples_used: n, none_count })
}

fn prax<F, P>(
    src: &mut RandomSource,
    spec: &P,
    family: &F,
    config: &PraxConfig,
    problem: Problem,
) -> Result<Verdict<F::Item>>
where
    F: LocallyTractable,
    P: Membership<F::Item> + ?Sized,
{
    config.validate()?;
    let n = sample_count(config);
    let truncation = Arc::new(Truncation::new(family, config.truncation_delta())?);
    let sampler = TruncatedSampler::new(family, truncation);
    run_sampler(src, spec, &sampler, problem, n, config)
}

/// Emptiness over a locally tractable family: `True` always when the
/// language is empty; `True` with probability at most 1/4 when its mass
/// exceeds `epsilon`.
pub fn prax_emptiness<F, P>(
    src: &mut RandomSource,
    spec: &P,
    family: &F,
    config: &PraxConfig,
) -> Result<Verdict<F::Item>>
where
    F: LocallyTractable,
    P: Membership<F::Item> + ?Sized,
{
    prax(src, spec, family, config, Problem::Emptiness)
}

/// Universality over a locally tractable family: `True` always when the
/// language is everything; `True` with probability at most 1/4 when its
/// mass is below `1 - epsilon`.
pub fn prax_universality<F, P>(
    src: &mut RandomSource,
    spec: &P,
    family: &F,
    config: &PraxConfig,
) -> Result<Verdict<F::Item>>
where
    F: LocallyTractable,
    P: Membership<F::Item> + ?Sized,
{
    prax(src, spec, family, config, Problem::Universality)
}

/// A polynomially samplable family of finite distributions indexed by `k`.
pub trait SamplableFamily: Sync {
    type Item: Send;

    fn sample(&self, src: &mut RandomSource, k: u64) -> Self::Item;
}

struct FixedIndex<'a, F> {
    family: &'a F,
    k: u64,
}

impl<F: SamplableFamily> ElementSampler for FixedIndex<'_, F> {
    type Item = F::Item;

    fn draw(&self, src: &mut RandomSource) -> Option<F::Item> {
        Some(self.family.sample(src, self.k))
    }
}

fn fin_prax<F, P>(
    src: &mut RandomSource,
    spec: &P,
    family: &F,
    distr_parameter: Option<u64>,
    config: &PraxConfig,
    problem: Problem,
) -> Result<Verdict<F::Item>>
where
    F: SamplableFamily,
    P: Membership<F::Item> + ?Sized,
{
    config.validate()?;
    let k = distr_parameter
        .ok_or_else(|| Error::Config("instance has no finite-domain parameter".into()))?;
    let n = sample_count(config);
    run_sampler(src, spec, &FixedIndex { family, k }, problem, n, config)
}

/// Emptiness over a finite, polynomially samplable domain.
pub fn fin_prax_emptiness<F, P>(
    src: &mut RandomSource,
    spec: &P,
    family: &F,
    distr_parameter: Option<u64>,
    config: &PraxConfig,
) -> Result<Verdict<F::Item>>
where
    F: SamplableFamily,
    P: Membership<F::Item> + ?Sized,
{
    fin_prax(src, spec, family, distr_parameter, config, Problem::Emptiness)
}

/// Universality over a finite, polynomially samplable domain.
pub fn fin_prax_universality<F, P>(
    src: &mut RandomSource,
    spec: &P,
    family: &F,
    distr_parameter: Option<u64>,
    config: &PraxConfig,
) -> Result<Verdict<F::Item>>
where
    F: SamplableFamily,
    P: Membership<F::Item> + ?Sized,
{
    fin_prax(src, spec, family, distr_parameter, config, Problem::Universality)
}

/// Uniform words of length `k` over an alphabet of `alphabet` symbols.
#[derive(Debug, Clone, Copy)]
pub struct UniformBlock {
    pub alphabet: u32,
}

impl SamplableFamily for UniformBlock {
    type Item = Vec<u32>;

    fn sample(&self, src: &mut RandomSource, k: u64) -> Vec<u32> {
        (0..k).map(|_| src.below(self.alphabet)).collect()
    }
}

/// Uniform truth assignments to `k` variables, one fair coin per variable.
#[derive(Debug, Clone, Copy, Default)]
pub struct UniformAssignment;

impl SamplableFamily for UniformAssignment {
    type Item = Vec<bool>;

    fn sample(&self, src: &mut RandomSource, k: u64) -> Vec<bool> {
        (0..k).map(|_| src.uniform() < 0.5).collect()
    }
}
