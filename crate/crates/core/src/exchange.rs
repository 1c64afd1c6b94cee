//! Conservative random money exchange.
//!
//! `N` players hold nonnegative balances. Each step draws an unordered pair
//! of distinct players, flips a fair coin for the loser, and moves a fixed
//! quantum `Δm` from loser to winner. A loser who cannot cover `Δm` cancels
//! the play. Total money `M` never changes, and the stationary balance
//! distribution is the Gibbs law `P(m) = A e^{-βm}` with `β = 1/T = N/M`.
//!
//! Balances are held as `u64` whenever the quantum and the initial balances
//! are whole numbers, which makes conservation exact; otherwise as `f64`.

use std::fmt::Debug;
use std::ops::{Add, Sub};

use rand::Rng;
use thiserror::Error;

use crate::entropy::{entropy_of_counts, EntropyTrace};
use crate::rng::{self, SimRng};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExchangeError {
    #[error("at least 2 players are required, got {0}")]
    TooFewPlayers(usize),
    #[error("balance {value} of player {index} is negative or not finite")]
    InvalidBalance { index: usize, value: f64 },
    #[error("exchange quantum must be positive and finite, got {0}")]
    InvalidQuantum(f64),
    #[error("initial money per agent must be nonnegative and finite, got {0}")]
    InvalidInitialMoney(f64),
    #[error("total money must be positive to define a temperature")]
    NoMoney,
    #[error("histogram needs at least one bin")]
    NoBins,
    #[error("trace stride must be positive")]
    ZeroStride,
}

/// Money held by one player.
pub trait Amount:
    Copy + PartialOrd + Add<Output = Self> + Sub<Output = Self> + Debug + Send + Sync + 'static
{
    const ZERO: Self;
    fn to_f64(self) -> f64;
}

impl Amount for u64 {
    const ZERO: Self = 0;
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Amount for f64 {
    const ZERO: Self = 0.0;
    fn to_f64(self) -> f64 {
        self
    }
}

/// Outcome of one lottery draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exchange {
    Transferred {
        loser: usize,
        winner: usize,
    },
    /// The loser could not pay; nothing moved.
    Canceled {
        loser: usize,
        winner: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WealthVector<A> {
    balances: Vec<A>,
    total: A,
}

impl<A: Amount> WealthVector<A> {
    pub fn new(balances: Vec<A>) -> Result<Self, ExchangeError> {
        if balances.len() < 2 {
            return Err(ExchangeError::TooFewPlayers(balances.len()));
        }
        for (index, &b) in balances.iter().enumerate() {
            let value = b.to_f64();
            if !(value.is_finite() && value >= 0.0) {
                return Err(ExchangeError::InvalidBalance { index, value });
            }
        }
        let total = balances.iter().fold(A::ZERO, |acc, &b| acc + b);
        Ok(Self { balances, total })
    }

    pub fn uniform(players: usize, each: A) -> Result<Self, ExchangeError> {
        Self::new(vec![each; players])
    }

    pub fn balances(&self) -> &[A] {
        &self.balances
    }

    pub fn len(&self) -> usize {
        self.balances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balances.is_empty()
    }

    /// Total money at construction.
    pub fn total(&self) -> A {
        self.total
    }

    /// Current sum of balances, recomputed.
    pub fn sum(&self) -> A {
        self.balances.iter().fold(A::ZERO, |acc, &b| acc + b)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.balances.iter().map(|b| b.to_f64()).collect()
    }

    /// Move `delta` from `loser` to `winner` unless the loser cannot pay.
    pub fn transfer(&mut self, loser: usize, winner: usize, delta: A) -> Exchange {
        if self.balances[loser] < delta {
            return Exchange::Canceled { loser, winner };
        }
        self.balances[loser] = self.balances[loser] - delta;
        self.balances[winner] = self.balances[winner] + delta;
        Exchange::Transferred { loser, winner }
    }

    /// Draw a pair uniformly, pick the loser with a fair coin, transfer.
    pub fn exchange_step(&mut self, delta: A, rng: &mut impl Rng) -> Exchange {
        let n = self.balances.len();
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let (loser, winner) = if rng.random::<bool>() { (i, j) } else { (j, i) };
        self.transfer(loser, winner, delta)
    }
}

/// One equal-width histogram bin `[lo, hi)`; the last bin also holds `hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: u64,
}

impl HistogramBin {
    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

fn bin_counts<A: Amount>(balances: &[A], bins: usize) -> (f64, Vec<u64>) {
    let max = balances.iter().map(|b| b.to_f64()).fold(0.0, f64::max);
    let mut counts = vec![0u64; bins];
    for b in balances {
        let k = if max > 0.0 {
            // b·bins/max rather than b/width keeps whole-number edges exact
            ((b.to_f64() * bins as f64 / max).floor() as usize).min(bins - 1)
        } else {
            0
        };
        counts[k] += 1;
    }
    (max, counts)
}

/// Equal-width bins over `[0, max balance]`; counts sum to `N`.
pub fn wealth_histogram<A: Amount>(
    w: &WealthVector<A>,
    bins: usize,
) -> Result<Vec<HistogramBin>, ExchangeError> {
    if bins == 0 {
        return Err(ExchangeError::NoBins);
    }
    let (max, counts) = bin_counts(w.balances(), bins);
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(k, count)| HistogramBin {
            lo: k as f64 * max / bins as f64,
            hi: (k + 1) as f64 * max / bins as f64,
            count,
        })
        .collect())
}

/// Shannon entropy of the binned balance distribution.
pub fn binned_entropy<A: Amount>(w: &WealthVector<A>, bins: usize) -> Result<f64, ExchangeError> {
    if bins == 0 {
        return Err(ExchangeError::NoBins);
    }
    Ok(entropy_of_counts(&bin_counts(w.balances(), bins).1))
}

/// Gibbs parameters with `T` pinned to `M/N`, plus a log-linear
/// goodness-of-fit on the histogram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsFit {
    pub temperature: f64,
    pub beta: f64,
    /// Normalization of `A e^{-βm}` on `[0, ∞)`, i.e. `β`.
    pub amplitude: f64,
    /// Count-weighted RMS residual of `ln count` about the fitted line over
    /// occupied bins; +inf when fewer than two bins are occupied.
    pub fit_error: f64,
    /// Slope of the Poisson maximum-likelihood fit `count ~ exp(a + b·center)`,
    /// for comparison with `-β`. `None` when the histogram is degenerate.
    pub log_slope: Option<f64>,
    /// `ln M`, the equal-weight entropy of `M` discrete money units.
    pub log_total_money: f64,
}

pub fn fit_gibbs(
    players: usize,
    total_money: f64,
    histogram: &[HistogramBin],
) -> Result<GibbsFit, ExchangeError> {
    if players < 2 {
        return Err(ExchangeError::TooFewPlayers(players));
    }
    if !(total_money.is_finite() && total_money > 0.0) {
        return Err(ExchangeError::NoMoney);
    }
    let temperature = total_money / players as f64;
    let beta = players as f64 / total_money;

    let points: Vec<(f64, f64, f64)> = histogram
        .iter()
        .filter(|b| b.count > 0)
        .map(|b| (b.center(), (b.count as f64).ln(), b.count as f64))
        .collect();
    let line = weighted_line(&points).map(|start| poisson_line(histogram, start));
    let (fit_error, log_slope) = match line {
        Some((intercept, slope)) => {
            let weight: f64 = points.iter().map(|p| p.2).sum();
            let sse: f64 = points
                .iter()
                .map(|&(x, y, w)| w * (y - intercept - slope * x).powi(2))
                .sum();
            ((sse / weight).sqrt(), Some(slope))
        }
        None => (f64::INFINITY, None),
    };

    Ok(GibbsFit {
        temperature,
        beta,
        amplitude: beta,
        fit_error,
        log_slope,
        log_total_money: total_money.ln(),
    })
}

/// Poisson maximum-likelihood fit of `count ~ exp(a + b x)` over every bin,
/// empty ones included, by Newton iteration from `start`. Least squares on
/// `ln count` drops empty bins and so flattens the tail; this does not.
fn poisson_line(histogram: &[HistogramBin], start: (f64, f64)) -> (f64, f64) {
    let data: Vec<(f64, f64)> = histogram
        .iter()
        .map(|b| (b.center(), b.count as f64))
        .collect();
    let loglik = |a: f64, b: f64| -> f64 {
        data.iter()
            .map(|&(x, c)| c * (a + b * x) - (a + b * x).exp())
            .sum()
    };
    let (mut a, mut b) = start;
    let mut current = loglik(a, b);
    for _ in 0..100 {
        let (mut g0, mut g1, mut h00, mut h01, mut h11) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &(x, c) in &data {
            let mu = (a + b * x).exp();
            g0 += c - mu;
            g1 += (c - mu) * x;
            h00 += mu;
            h01 += mu * x;
            h11 += mu * x * x;
        }
        let det = h00 * h11 - h01 * h01;
        if !(det.is_finite() && det > 0.0) {
            break;
        }
        let (mut da, mut db) = ((h11 * g0 - h01 * g1) / det, (h00 * g1 - h01 * g0) / det);
        let mut next = loglik(a + da, b + db);
        let mut halvings = 0;
        while (next.is_nan() || next < current) && halvings < 60 {
            da *= 0.5;
            db *= 0.5;
            next = loglik(a + da, b + db);
            halvings += 1;
        }
        if next.is_nan() || next < current {
            break;
        }
        a += da;
        b += db;
        let gain = next - current;
        current = next;
        if gain <= 1e-13 * current.abs().max(1.0) {
            break;
        }
    }
    (a, b)
}

/// Weighted least squares `y = a + b x` over `(x, y, weight)`.
fn weighted_line(points: &[(f64, f64, f64)]) -> Option<(f64, f64)> {
    if points.len() < 2 {
        return None;
    }
    let sw: f64 = points.iter().map(|p| p.2).sum();
    let mx = points.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let my = points.iter().map(|p| p.2 * p.1).sum::<f64>() / sw;
    let sxx: f64 = points.iter().map(|p| p.2 * (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| p.2 * (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((my - slope * mx, slope))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum InitialCondition {
    /// Every player starts with the same balance.
    #[default]
    Uniform,
    /// Player 0 starts with all the money.
    Concentrated,
}

/// When to sample the entropy trace. Step 0 and the final step are always
/// sampled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum TraceSchedule {
    /// Ten roughly geometric samples per decade.
    #[default]
    Logarithmic,
    Stride(u64),
}

impl TraceSchedule {
    pub fn sample_steps(&self, steps: u64) -> Vec<u64> {
        let mut out = vec![0];
        match *self {
            TraceSchedule::Stride(stride) => {
                let stride = stride.max(1);
                out.extend((1..=steps / stride).map(|k| k * stride));
            }
            TraceSchedule::Logarithmic => {
                let mut k = 0i32;
                loop {
                    let s = 10f64.powf(k as f64 / 10.0).floor() as u64;
                    if s > steps {
                        break;
                    }
                    if s > *out.last().unwrap() {
                        out.push(s);
                    }
                    k += 1;
                }
            }
        }
        if *out.last().unwrap() != steps {
            out.push(steps);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExchangeConfig {
    pub players: usize,
    pub initial_money: f64,
    pub delta_m: f64,
    pub steps: u64,
    pub seed: u64,
    pub bins: usize,
    pub schedule: TraceSchedule,
    pub initial: InitialCondition,
}

impl Default for ExchangeConfig {
    fn default() -> Self {
        Self {
            players: 1000,
            initial_money: 100.0,
            delta_m: 1.0,
            steps: 1_000_000,
            seed: 0,
            bins: 50,
            schedule: TraceSchedule::Logarithmic,
            initial: InitialCondition::Uniform,
        }
    }
}

impl ExchangeConfig {
    pub fn validate(&self) -> Result<(), ExchangeError> {
        if self.players < 2 {
            return Err(ExchangeError::TooFewPlayers(self.players));
        }
        if !(self.initial_money.is_finite() && self.initial_money >= 0.0) {
            return Err(ExchangeError::InvalidInitialMoney(self.initial_money));
        }
        if !(self.delta_m.is_finite() && self.delta_m > 0.0) {
            return Err(ExchangeError::InvalidQuantum(self.delta_m));
        }
        if self.total_money() <= 0.0 {
            return Err(ExchangeError::NoMoney);
        }
        if self.bins == 0 {
            return Err(ExchangeError::NoBins);
        }
        if self.schedule == TraceSchedule::Stride(0) {
            return Err(ExchangeError::ZeroStride);
        }
        Ok(())
    }

    pub fn total_money(&self) -> f64 {
        self.initial_money * self.players as f64
    }

    /// Whole-number quantum and balances that fit `u64` exactly.
    pub fn uses_integer_ledger(&self) -> bool {
        const EXACT: f64 = 9_007_199_254_740_992.0; // 2^53
        let whole = |v: f64| v.fract() == 0.0;
        whole(self.delta_m) && whole(self.initial_money) && self.total_money() < EXACT
    }

    fn initial_wealth<A: Amount>(&self, each: A, all: A) -> Result<WealthVector<A>, ExchangeError> {
        match self.initial {
            InitialCondition::Uniform => WealthVector::uniform(self.players, each),
            InitialCondition::Concentrated => {
                let mut balances = vec![A::ZERO; self.players];
                balances[0] = all;
                WealthVector::new(balances)
            }
        }
    }
}

/// Final balances in whichever ledger the run used.
#[derive(Debug, Clone, PartialEq)]
pub enum Wealth {
    Integer(WealthVector<u64>),
    Real(WealthVector<f64>),
}

impl Wealth {
    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            Wealth::Integer(w) => w.to_f64(),
            Wealth::Real(w) => w.to_f64(),
        }
    }

    pub fn total(&self) -> f64 {
        match self {
            Wealth::Integer(w) => w.total() as f64,
            Wealth::Real(w) => w.total(),
        }
    }

    pub fn histogram(&self, bins: usize) -> Result<Vec<HistogramBin>, ExchangeError> {
        match self {
            Wealth::Integer(w) => wealth_histogram(w, bins),
            Wealth::Real(w) => wealth_histogram(w, bins),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExchangeOutcome {
    pub wealth: Wealth,
    pub trace: EntropyTrace,
    pub histogram: Vec<HistogramBin>,
    pub fit: GibbsFit,
    pub canceled: u64,
}

/// Run `steps` exchanges from the configured initial condition.
pub fn run_exchange(config: &ExchangeConfig) -> Result<ExchangeOutcome, ExchangeError> {
    config.validate()?;
    let mut rng = rng::stream(config.seed, rng::STREAM_LOTTERY);
    let (wealth, trace, canceled) = if config.uses_integer_ledger() {
        let each = config.initial_money as u64;
        let w = config.initial_wealth(each, each * config.players as u64)?;
        let (w, trace, canceled) = simulate(w, config.delta_m as u64, config, &mut rng)?;
        (Wealth::Integer(w), trace, canceled)
    } else {
        let w = config.initial_wealth(config.initial_money, config.total_money())?;
        let (w, trace, canceled) = simulate(w, config.delta_m, config, &mut rng)?;
        (Wealth::Real(w), trace, canceled)
    };
    let histogram = wealth.histogram(config.bins)?;
    let fit = fit_gibbs(config.players, wealth.total(), &histogram)?;
    Ok(ExchangeOutcome {
        wealth,
        trace,
        histogram,
        fit,
        canceled,
    })
}

fn simulate<A: Amount>(
    mut w: WealthVector<A>,
    delta: A,
    config: &ExchangeConfig,
    rng: &mut SimRng,
) -> Result<(WealthVector<A>, EntropyTrace, u64), ExchangeError> {
    let mut trace = EntropyTrace::new();
    let mut canceled = 0u64;
    let mut done = 0u64;
    for target in config.schedule.sample_steps(config.steps) {
        while done < target {
            if let Exchange::Canceled { .. } = w.exchange_step(delta, rng) {
                canceled += 1;
            }
            done += 1;
        }
        trace
            .push(target, binned_entropy(&w, config.bins)?)
            .expect("sample steps increase and binned entropy is nonnegative");
    }
    Ok((w, trace, canceled))
}
