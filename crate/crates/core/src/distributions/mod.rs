//! Dirichlet length distributions, finite distributions with a residual
//! `none` outcome, and the seeded random source.

mod dirichlet;
mod finite;
mod random;

pub use dirichlet::{
    dirichlet_pmf, max_len_1d, truncate, zeta, DirichletParams, DirichletRejection, LengthTable, MAX_TABLE_LEN,
};
pub(crate) use dirichlet::{check_delta, check_table_len};
pub use finite::{select_fin, FiniteDistribution, NONE_CLAMP};
pub use random::{split_seed, toss_coin, RandomSource};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}
