use super::{CompensatedSum, FiniteDistribution, RandomSource};
use crate::{Error, Result};

/// Largest truncation point for which explicit tables are built. Beyond
/// it a table would take hundreds of megabytes.
pub const MAX_TABLE_LEN: u64 = 1 << 24;

pub(crate) fn check_table_len(max: u64) -> Result<()> {
    if max > MAX_TABLE_LEN {
        return Err(Error::Config(format!(
            "truncation point {max} exceeds the table limit {MAX_TABLE_LEN}; raise t or epsilon"
        )));
    }
    Ok(())
}

/// Terms summed explicitly before the Euler-Maclaurin correction.
const ZETA_TERMS: u32 = 32;

/// B_2, B_4, ..., B_12 divided by (2j)!.
const BERNOULLI_OVER_FACTORIAL: [f64; 6] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
];

/// Riemann zeta function for real `t > 1`.
///
/// Sums `k^-t` for `k < N` (smallest terms first), adds the integral tail
/// `N^(1-t)/(t-1)` plus the half-term and six Euler-Maclaurin corrections.
/// With `N = 32` the remainder is below 1e-20 for every `t > 1`.
pub fn zeta(t: f64) -> Result<f64> {
    if !(t.is_finite() && t > 1.0) {
        return Err(Error::Domain(format!("zeta requires t > 1, got {t}")));
    }
    let n = f64::from(ZETA_TERMS);
    let mut sum = CompensatedSum::default();
    for k in (1..ZETA_TERMS).rev() {
        sum.add(f64::from(k).powf(-t));
    }
    sum.add(n.powf(1.0 - t) / (t - 1.0));
    sum.add(0.5 * n.powf(-t));
    // rising factorial t (t+1) ... (t+2j-2) times N^(-t-2j+1)
    let mut rising = t;
    let mut power = n.powf(-t - 1.0);
    for (j, coeff) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        if j > 0 {
            let base = t + (2 * j) as f64;
            rising *= (base - 1.0) * base;
            power /= n * n;
        }
        sum.add(coeff * rising * power);
    }
    Ok(sum.value())
}

/// Parameters of the Dirichlet length distribution
/// `T(l) = (l + 1 - d)^-t / zeta(t)` for `l >= d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirichletParams {
    t: f64,
    d: u64,
    zeta_t: f64,
}

impl DirichletParams {
    pub fn new(t: f64, d: u64) -> Result<Self> {
        if !(t.is_finite() && t > 1.0) {
            return Err(Error::Domain(format!("Dirichlet exponent must exceed 1, got {t}")));
        }
        Ok(DirichletParams { t, d, zeta_t: zeta(t)? })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn zeta_t(&self) -> f64 {
        self.zeta_t
    }

    pub fn pmf(&self, ell: u64) -> f64 {
        if ell < self.d {
            return 0.0;
        }
        ((ell - self.d + 1) as f64).powf(-self.t) / self.zeta_t
    }

    /// Upper bound on `T(l > m)` from comparing the series with its integral:
    /// `(m - d + 1)^(1-t) / ((t - 1) zeta(t))`, or 1 when `m < d`.
    pub fn tail_bound(&self, m: u64) -> f64 {
        if m < self.d {
            return 1.0;
        }
        let k = (m - self.d + 1) as f64;
        (k.powf(1.0 - self.t) / ((self.t - 1.0) * self.zeta_t)).min(1.0)
    }

    /// `ceil(inverse_tail^(1/(t-1))) + d - 1`.
    ///
    /// Any `M` of this form has `T(l > M) <= 1 / inverse_tail`. The 1D, 2D
    /// and 3D bounds differ only in the quantity passed here, which callers
    /// compute in the exact arithmetic shape of their own formula.
    pub(crate) fn max_len_from_inverse_tail(&self, inverse_tail: f64) -> Result<u64> {
        if inverse_tail.is_nan() || inverse_tail < 1.0 {
            return Err(Error::Domain(format!("tail target {inverse_tail} out of range")));
        }
        let root = inverse_tail.powf(1.0 / (self.t - 1.0)).ceil();
        if !root.is_finite() || root > 1e18 {
            return Err(Error::Domain(format!(
                "maximum length {root:e} is too large for t = {}",
                self.t
            )));
        }
        // root >= 1, so M >= d
        Ok(root as u64 + self.d - 1)
    }
}

pub fn dirichlet_pmf(params: &DirichletParams, ell: u64) -> f64 {
    params.pmf(ell)
}

/// Smallest `M` of the closed form `ceil((1/delta)^(1/(t-1))) + d - 1`; the
/// tail beyond it has mass at most `delta`.
pub fn max_len_1d(params: &DirichletParams, delta: f64) -> Result<u64> {
    check_delta(delta)?;
    params.max_len_from_inverse_tail(1.0 / delta)
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("delta must lie in (0, 1), got {delta}")))
    }
}

/// `(T(0), ..., T(M))` with the residual mass as the `none` outcome.
pub fn truncate(params: &DirichletParams, max: u64) -> Result<FiniteDistribution> {
    if max < params.d {
        return Err(Error::Domain(format!(
            "truncation point {max} is below the shift d = {}",
            params.d
        )));
    }
    check_table_len(max)?;
    let weights = (0..=max).map(|ell| params.pmf(ell)).collect();
    FiniteDistribution::new(weights, true)
}

/// `T(l)` and the prefix masses `T(l' < l)` for `l = 0..=max`.
#[derive(Debug, Clone)]
pub struct LengthTable {
    params: DirichletParams,
    pmf: Vec<f64>,
    below: Vec<f64>,
}

impl LengthTable {
    pub fn new(params: DirichletParams, max: u64) -> Self {
        let len = max as usize + 1;
        let mut pmf = Vec::with_capacity(len);
        let mut below = Vec::with_capacity(len + 1);
        let mut acc = CompensatedSum::default();
        below.push(0.0);
        for ell in 0..=max {
            let p = params.pmf(ell);
            pmf.push(p);
            acc.add(p);
            below.push(acc.value());
        }
        LengthTable { params, pmf, below }
    }

    pub fn params(&self) -> &DirichletParams {
        &self.params
    }

    /// Largest length covered.
    pub fn max(&self) -> u64 {
        self.pmf.len() as u64 - 1
    }

    pub fn pmf(&self, ell: u64) -> f64 {
        self.pmf[ell as usize]
    }

    /// `T(l' < ell)` for `ell <= max + 1`.
    pub fn below(&self, ell: u64) -> f64 {
        self.below[ell as usize]
    }

    /// Length `l` in `[d, m)` drawn from `T` restricted to that range, given
    /// `u ∈ [0, 1)`. Requires `d < m <= max + 1`.
    pub fn invert_below(&self, m: u64, u: f64) -> u64 {
        let d = self.params.d();
        debug_assert!(d < m && m <= self.max() + 1);
        let v = u * self.below[m as usize];
        // first l with below[l + 1] > v
        let l = self.below[1..=m as usize].partition_point(|&b| b <= v) as u64;
        l.clamp(d, m - 1)
    }
}

/// Exact sampler for `T` by rejection from a continuous envelope, in
/// constant memory (Devroye's method for Zipf variables).
///
/// `x = floor(u^{-1/(t-1)})` is accepted with probability proportional to
/// the ratio of the zeta weight to the envelope; the expected number of
/// rounds is bounded for every `t > 1`.
#[derive(Debug, Clone, Copy)]
pub struct DirichletRejection {
    params: DirichletParams,
    b: f64,
}

impl DirichletRejection {
    pub fn new(params: DirichletParams) -> Self {
        DirichletRejection { params, b: (params.t - 1.0).exp2() }
    }

    pub fn params(&self) -> &DirichletParams {
        &self.params
    }

    /// A length drawn from `T`, or `None` when it exceeds `max`.
    pub fn sample_truncated(&self, src: &mut RandomSource, max: u64) -> Option<u64> {
        let a = self.params.t - 1.0;
        let limit = max.checked_sub(self.params.d).map(|k| (k + 1) as f64).unwrap_or(0.0);
        loop {
            let u = 1.0 - src.uniform();
            let v = src.uniform();
            let x = u.powf(-1.0 / a).floor();
            if !self.accept(x, v) {
                continue;
            }
            return (x <= limit).then(|| x as u64 + self.params.d - 1);
        }
    }

    fn accept(&self, x: f64, v: f64) -> bool {
        let a = self.params.t - 1.0;
        if x.is_infinite() {
            // limit of the test below as x grows
            return v * a * self.b <= self.b - 1.0;
        }
        let log_ratio = a * (1.0 / x).ln_1p();
        v * x * log_ratio.exp_m1() / (self.b - 1.0) <= log_ratio.exp() / self.b
    }
}
