//! Entropy as a macroeconomic production function.
//!
//! A closed economy observed once per period is summarized by its capital
//! `E` (GDP), the active worker population `V`, the capital stock `W` and
//! the agent count `N`. Taking economic temperature as `T = E / (αN)` and
//! economic pressure as `p = W / V`, the integrated entropy differential is
//!
//! ```text
//! S(E, V) = αN ln E² + W ln V = ln ξ,   ξ = E^{2αN} · V^W
//! ```
//!
//! The Clausius integral and the exact differential in `(T, V)` are only the
//! derivation of this closed form; they are not exposed separately. `ξ`
//! overflows `f64` for any realistic GDP, so everything here stays in log
//! space.
//!
//! The entropic elasticity `dS/S = dξ / (ξ ln ξ)` is discretized as a
//! one-period forward difference anchored at the earlier observation:
//!
//! ```text
//! elasticity = (2αN ΔE/E_prev + W_prev ΔV/V_prev) / S_prev
//! ```
//!
//! A positive entropy change between periods reads as goods and services
//! being distributed (disorder), a negative one as products and money being
//! collected (order).
//!
//! [`multinomial_entropy`] gives the microscopic counterpart: the log of the
//! multinomial probability of a goods distribution over `k` categories.

use std::fmt;

use thiserror::Error;

use crate::special::ln_factorial;

/// Entropy changes with magnitude at or below this are [`Direction::Neutral`].
pub const NEUTRAL_TOL: f64 = 1e-12;

/// Allowed deviation of category probabilities from summing to 1.
pub const PROBABILITY_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MacroError {
    #[error("capital E must be positive and finite, got {0}")]
    NonPositiveCapital(f64),
    #[error("worker population V must be positive and finite, got {0}")]
    NonPositiveVolume(f64),
    #[error("capital stock W must be nonnegative and finite, got {0}")]
    NegativeStock(f64),
    #[error("agent count N must be at least 1")]
    NoAgents,
    #[error("alpha must be positive and finite, got {0}")]
    NonPositiveAlpha(f64),
    #[error("elasticity undefined at unit-entropy point (S_prev = 0)")]
    UnitEntropyPoint,
    #[error("period {curr} does not follow period {prev}")]
    PeriodOrder { prev: i64, curr: i64 },
    #[error("empty series")]
    EmptySeries,
    #[error("period {period}: {source}")]
    AtPeriod {
        period: i64,
        #[source]
        source: Box<MacroError>,
    },
    #[error("category counts ({counts}) and probabilities ({probabilities}) differ in length")]
    LengthMismatch { counts: usize, probabilities: usize },
    #[error("no categories given")]
    NoCategories,
    #[error("category probability q_{index} = {value} is outside (0, 1]")]
    ProbabilityOutOfRange { index: usize, value: f64 },
    #[error("category probabilities sum to {0}, expected 1")]
    ProbabilitySum(f64),
}

/// One period of a macro system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacroObservation {
    pub period: i64,
    /// Capital `E` (GDP), monetary units.
    pub capital: f64,
    /// Active worker population `V`.
    pub volume: f64,
    /// Capital stock `W`, monetary units.
    pub work: f64,
    /// Number of economic agents `N`.
    pub agents: u64,
    /// Calibration constant relating temperature and energy.
    pub alpha: f64,
}

impl MacroObservation {
    /// Observation with `N = 1` and `α = 1`, validated.
    pub fn new(period: i64, capital: f64, volume: f64, work: f64) -> Result<Self, MacroError> {
        Self {
            period,
            capital,
            volume,
            work,
            agents: 1,
            alpha: 1.0,
        }
        .validated()
    }

    pub fn with_agents(mut self, agents: u64) -> Result<Self, MacroError> {
        self.agents = agents;
        self.validated()
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self, MacroError> {
        self.alpha = alpha;
        self.validated()
    }

    pub fn validated(self) -> Result<Self, MacroError> {
        if !(self.capital.is_finite() && self.capital > 0.0) {
            return Err(MacroError::NonPositiveCapital(self.capital));
        }
        if !(self.volume.is_finite() && self.volume > 0.0) {
            return Err(MacroError::NonPositiveVolume(self.volume));
        }
        if !(self.work.is_finite() && self.work >= 0.0) {
            return Err(MacroError::NegativeStock(self.work));
        }
        if self.agents == 0 {
            return Err(MacroError::NoAgents);
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(MacroError::NonPositiveAlpha(self.alpha));
        }
        Ok(self)
    }

    /// Economic temperature `T = E / (αN)`.
    pub fn temperature(&self) -> f64 {
        self.capital / (self.alpha * self.agents as f64)
    }

    /// Economic pressure `p = W / V`.
    pub fn pressure(&self) -> f64 {
        self.work / self.volume
    }

    /// Exponent `2αN` carried by capital in `ξ`.
    fn capital_exponent(&self) -> f64 {
        2.0 * self.alpha * self.agents as f64
    }
}

/// `S(E, V) = 2αN ln E + W ln V`, i.e. `ln ξ` without forming `ξ`.
pub fn production_entropy(obs: &MacroObservation) -> Result<f64, MacroError> {
    let obs = obs.validated()?;
    Ok(obs.capital_exponent() * obs.capital.ln() + obs.work * obs.volume.ln())
}

/// Entropic elasticity between two consecutive observations.
pub fn entropic_elasticity(
    prev: &MacroObservation,
    curr: &MacroObservation,
) -> Result<f64, MacroError> {
    let prev = prev.validated()?;
    let curr = curr.validated()?;
    if curr.period <= prev.period {
        return Err(MacroError::PeriodOrder {
            prev: prev.period,
            curr: curr.period,
        });
    }
    let s_prev = production_entropy(&prev)?;
    if s_prev == 0.0 {
        return Err(MacroError::UnitEntropyPoint);
    }
    let rel_capital = (curr.capital - prev.capital) / prev.capital;
    let rel_volume = (curr.volume - prev.volume) / prev.volume;
    Ok((prev.capital_exponent() * rel_capital + prev.work * rel_volume) / s_prev)
}

/// Periods with strictly increasing years; never empty.
#[derive(Debug, Clone, PartialEq)]
pub struct MacroSeries {
    observations: Vec<MacroObservation>,
}

impl MacroSeries {
    pub fn new(observations: Vec<MacroObservation>) -> Result<Self, MacroError> {
        if observations.is_empty() {
            return Err(MacroError::EmptySeries);
        }
        for obs in &observations {
            obs.validated().map_err(|e| e.at(obs.period))?;
        }
        for pair in observations.windows(2) {
            if pair[1].period <= pair[0].period {
                return Err(MacroError::PeriodOrder {
                    prev: pair[0].period,
                    curr: pair[1].period,
                });
            }
        }
        Ok(Self { observations })
    }

    pub fn observations(&self) -> &[MacroObservation] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl MacroError {
    fn at(self, period: i64) -> MacroError {
        MacroError::AtPeriod {
            period,
            source: Box::new(self),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Entropy fell: products and money are being collected.
    OrderCreating,
    /// Entropy rose: goods and services are being distributed.
    DisorderCreating,
    Neutral,
}

impl Direction {
    pub fn classify(delta_s: f64) -> Self {
        if delta_s > NEUTRAL_TOL {
            Direction::DisorderCreating
        } else if delta_s < -NEUTRAL_TOL {
            Direction::OrderCreating
        } else {
            Direction::Neutral
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Direction::OrderCreating => "order",
            Direction::DisorderCreating => "disorder",
            Direction::Neutral => "neutral",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyReport {
    pub period: i64,
    pub entropy: f64,
    /// `ln ξ`; identical to `entropy`, kept so reports read like the formula.
    pub ln_xi: f64,
    /// Absent for the first period.
    pub elasticity: Option<f64>,
    pub direction: Direction,
}

/// One report per observation, in order.
pub fn analyze_series(series: &MacroSeries) -> Result<Vec<EntropyReport>, MacroError> {
    let mut reports: Vec<EntropyReport> = Vec::with_capacity(series.len());
    let mut prev: Option<(&MacroObservation, f64)> = None;
    for obs in series.observations() {
        let entropy = production_entropy(obs).map_err(|e| e.at(obs.period))?;
        let (elasticity, direction) = match prev {
            None => (None, Direction::Neutral),
            Some((p, s_prev)) => {
                let el = entropic_elasticity(p, obs).map_err(|e| e.at(obs.period))?;
                (Some(el), Direction::classify(entropy - s_prev))
            }
        };
        reports.push(EntropyReport {
            period: obs.period,
            entropy,
            ln_xi: entropy,
            elasticity,
            direction,
        });
        prev = Some((obs, entropy));
    }
    Ok(reports)
}

/// Goods counts `N_1..N_k` with their category probabilities `q_1..q_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryCounts {
    counts: Vec<u64>,
    probabilities: Vec<f64>,
}

impl CategoryCounts {
    pub fn new(counts: Vec<u64>, probabilities: Vec<f64>) -> Result<Self, MacroError> {
        if counts.len() != probabilities.len() {
            return Err(MacroError::LengthMismatch {
                counts: counts.len(),
                probabilities: probabilities.len(),
            });
        }
        if counts.is_empty() {
            return Err(MacroError::NoCategories);
        }
        for (index, &value) in probabilities.iter().enumerate() {
            if !(value > 0.0 && value <= 1.0) {
                return Err(MacroError::ProbabilityOutOfRange { index, value });
            }
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > PROBABILITY_SUM_TOL {
            return Err(MacroError::ProbabilitySum(sum));
        }
        Ok(Self {
            counts,
            probabilities,
        })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// `N_0 = Σ N_i`.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// `ln P(N_k) = ln N_0! − Σ ln N_i! + Σ N_i ln q_i`.
pub fn multinomial_entropy(c: &CategoryCounts) -> f64 {
    let log_coefficient =
        ln_factorial(c.total()) - c.counts.iter().map(|&n| ln_factorial(n)).sum::<f64>();
    let log_weight: f64 = c
        .counts
        .iter()
        .zip(&c.probabilities)
        .filter(|(&n, _)| n > 0)
        .map(|(&n, &q)| n as f64 * q.ln())
        .sum();
    log_coefficient + log_weight
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn obs(period: i64, capital: f64, volume: f64, work: f64) -> MacroObservation {
        MacroObservation::new(period, capital, volume, work).unwrap()
    }

    #[test]
    fn production_entropy_examples() {
        let unit = obs(2000, 1.0, 1.0, 7.0).with_agents(3).unwrap();
        assert_eq!(production_entropy(&unit).unwrap(), 0.0);

        let s = production_entropy(&obs(2000, E, 1.0, 5.0)).unwrap();
        assert!((s - 2.0).abs() < 1e-15);

        // 5 ln 10, mpmath at 30 digits
        let s = production_entropy(&obs(2000, 10.0, 10.0, 3.0)).unwrap();
        assert!((s - 11.512_925_464_970_228).abs() < 1e-12);
    }

    #[test]
    fn derived_quantities() {
        let o = obs(2001, 200.0, 50.0, 25.0)
            .with_agents(4)
            .unwrap()
            .with_alpha(0.5)
            .unwrap();
        assert_eq!(o.temperature(), 100.0);
        assert_eq!(o.pressure(), 0.5);
    }

    #[test]
    fn invariant_violations_are_rejected() {
        assert_eq!(
            MacroObservation::new(1, 0.0, 1.0, 1.0),
            Err(MacroError::NonPositiveCapital(0.0))
        );
        assert_eq!(
            MacroObservation::new(1, 1.0, -2.0, 1.0),
            Err(MacroError::NonPositiveVolume(-2.0))
        );
        assert!(MacroObservation::new(1, 1.0, 1.0, -1.0).is_err());
        assert!(obs(1, 1.0, 1.0, 1.0).with_agents(0).is_err());
        assert!(obs(1, 1.0, 1.0, 1.0).with_alpha(0.0).is_err());

        let raw = MacroObservation {
            capital: -1.0,
            ..obs(1, 1.0, 1.0, 1.0)
        };
        assert!(production_entropy(&raw).is_err());
    }

    #[test]
    fn elasticity_examples() {
        let prev = obs(2000, 10.0, 10.0, 3.0);
        let same = obs(2001, 10.0, 10.0, 3.0);
        assert_eq!(entropic_elasticity(&prev, &same).unwrap(), 0.0);

        // 0.2 / (5 ln 10)
        let up = obs(2001, 11.0, 10.0, 3.0);
        let el = entropic_elasticity(&prev, &up).unwrap();
        assert!((el - 0.017_371_779_276_130_074).abs() < 1e-12);

        let prev = obs(2000, E, 1.0, 5.0);
        let curr = obs(2001, E, 2.0, 5.0);
        assert!((entropic_elasticity(&prev, &curr).unwrap() - 2.5).abs() < 1e-14);
    }

    #[test]
    fn elasticity_errors() {
        let unit = obs(2000, 1.0, 1.0, 3.0);
        let next = obs(2001, 2.0, 1.0, 3.0);
        assert_eq!(
            entropic_elasticity(&unit, &next),
            Err(MacroError::UnitEntropyPoint)
        );
        assert!(MacroError::UnitEntropyPoint
            .to_string()
            .contains("elasticity undefined at unit-entropy point"));
        let later = obs(2005, 2.0, 1.0, 3.0);
        let earlier = obs(2004, 2.0, 1.0, 3.0);
        assert!(matches!(
            entropic_elasticity(&later, &earlier),
            Err(MacroError::PeriodOrder { .. })
        ));
    }

    #[test]
    fn series_validation() {
        assert_eq!(MacroSeries::new(vec![]), Err(MacroError::EmptySeries));
        let dup = vec![obs(2000, 1.0, 2.0, 0.0), obs(2000, 1.0, 2.0, 0.0)];
        assert!(matches!(
            MacroSeries::new(dup),
            Err(MacroError::PeriodOrder { .. })
        ));
        let bad = MacroObservation {
            capital: 0.0,
            ..obs(2003, 1.0, 1.0, 1.0)
        };
        let err = MacroSeries::new(vec![obs(2002, 1.0, 1.0, 1.0), bad]).unwrap_err();
        assert!(matches!(err, MacroError::AtPeriod { period: 2003, .. }));
        assert!(err.to_string().starts_with("period 2003"));
    }

    #[test]
    fn analyze_constant_series() {
        let series =
            MacroSeries::new((0..3).map(|t| obs(2000 + t, 10.0, 10.0, 3.0)).collect()).unwrap();
        let reports = analyze_series(&series).unwrap();
        assert_eq!(reports.len(), 3);
        assert!(reports[0].elasticity.is_none());
        for r in &reports {
            assert_eq!(r.entropy, reports[0].entropy);
            assert_eq!(r.direction, Direction::Neutral);
        }
        assert_eq!(reports[1].elasticity, Some(0.0));
        assert_eq!(reports[2].elasticity, Some(0.0));
    }

    #[test]
    fn analyze_doubling_capital() {
        let series = MacroSeries::new(
            (0..6)
                .map(|t| obs(2000 + t, 5.0 * 2f64.powi(t as i32), 40.0, 2.0))
                .collect(),
        )
        .unwrap();
        let reports = analyze_series(&series).unwrap();
        for pair in reports.windows(2) {
            assert!(pair[1].entropy > pair[0].entropy);
            assert_eq!(pair[1].direction, Direction::DisorderCreating);
        }
    }

    #[test]
    fn analyze_two_period_composition() {
        let series =
            MacroSeries::new(vec![obs(2000, 10.0, 10.0, 3.0), obs(2001, 11.0, 10.0, 3.0)]).unwrap();
        let reports = analyze_series(&series).unwrap();
        // 2 ln 11 + 3 ln 10, mpmath at 30 digits
        assert!((reports[1].entropy - 11.703_545_824_578_878).abs() < 1e-9);
        assert!((reports[1].elasticity.unwrap() - 0.017_371_779_276_130_074).abs() < 1e-9);
        assert_eq!(reports[1].direction, Direction::DisorderCreating);
    }

    #[test]
    fn falling_capital_creates_order() {
        let series =
            MacroSeries::new(vec![obs(2000, 10.0, 10.0, 3.0), obs(2001, 9.0, 10.0, 3.0)]).unwrap();
        let reports = analyze_series(&series).unwrap();
        assert_eq!(reports[1].direction, Direction::OrderCreating);
        assert!(reports[1].elasticity.unwrap() < 0.0);
    }

    #[test]
    fn series_errors_name_the_period() {
        let series =
            MacroSeries::new(vec![obs(2000, 1.0, 1.0, 3.0), obs(2001, 2.0, 1.0, 3.0)]).unwrap();
        let err = analyze_series(&series).unwrap_err();
        assert!(matches!(err, MacroError::AtPeriod { period: 2001, .. }));
    }

    #[test]
    fn multinomial_examples() {
        let single = CategoryCounts::new(vec![4], vec![1.0]).unwrap();
        assert_eq!(multinomial_entropy(&single), 0.0);

        let pair = CategoryCounts::new(vec![1, 1], vec![0.5, 0.5]).unwrap();
        assert!((multinomial_entropy(&pair) - 0.5f64.ln()).abs() < 1e-14);

        // ln(4/9), mpmath at 30 digits
        let c = CategoryCounts::new(vec![2, 1], vec![2.0 / 3.0, 1.0 / 3.0]).unwrap();
        assert!((multinomial_entropy(&c) + 0.810_930_216_216_328_8).abs() < 1e-12);
    }

    #[test]
    fn multinomial_large_counts_stay_finite() {
        let c = CategoryCounts::new(vec![400_000, 600_000], vec![0.4, 0.6]).unwrap();
        let s = multinomial_entropy(&c);
        // Stirling: ln P ≈ -½ ln(2π N p q) at the mode
        let approx = -0.5 * (2.0 * std::f64::consts::PI * 1e6 * 0.24).ln();
        assert!((s - approx).abs() < 1e-4, "{s} vs {approx}");
    }

    #[test]
    fn category_validation() {
        assert!(matches!(
            CategoryCounts::new(vec![1, 2], vec![1.0]),
            Err(MacroError::LengthMismatch { .. })
        ));
        assert!(matches!(
            CategoryCounts::new(vec![1, 2], vec![0.0, 1.0]),
            Err(MacroError::ProbabilityOutOfRange { index: 0, .. })
        ));
        assert!(matches!(
            CategoryCounts::new(vec![1, 2], vec![0.5, 0.6]),
            Err(MacroError::ProbabilitySum(_))
        ));
        assert_eq!(
            CategoryCounts::new(vec![], vec![]),
            Err(MacroError::NoCategories)
        );
    }

    #[test]
    fn direction_labels() {
        assert_eq!(Direction::classify(1e-13), Direction::Neutral);
        assert_eq!(Direction::classify(-1e-11), Direction::OrderCreating);
        assert_eq!(Direction::DisorderCreating.to_string(), "disorder");
    }
}
