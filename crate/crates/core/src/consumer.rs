//! Consumer model in a prices × goods configuration space.
//!
//! Each lattice cell is a quantized rent state: the column is the goods
//! level, the row the price level, and the cell area the minimal rent a
//! consumer spends on a good. Two goods populate the lattice as the two
//! Schelling agent types. The Preferred region starts at the initial rent
//! cell (upper-left by default) and grows through satisfied agents: after
//! every sweep, each cell held by a satisfied agent that touches the region
//! is claimed. Alongside, a two-player money-exchange lottery runs on its
//! own random stream. The entropy trace measures the satisfied/unsatisfied
//! split of the agents at every step, so it lies in `[0, ln 2]`.

use thiserror::Error;

use crate::ca::{Boundary2D, CellState, Grid2D};
use crate::entropy::EntropyTrace;
use crate::exchange::{ExchangeError, Wealth, WealthVector};
use crate::rng::{self, SimRng};
use crate::schelling::{self, window_size, SatisfactionSample, SchellingError, SchellingState};

/// Default snapshot steps: four stages of the Preferred region's growth.
pub const DEFAULT_SNAPSHOT_STEPS: [u64; 4] = [57, 70, 91, 135];

const LOTTERY_PLAYERS: usize = 2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConsumerError {
    #[error("grid {width}x{height} cannot host two agent populations at density {density}")]
    GridTooSmall {
        width: usize,
        height: usize,
        density: f64,
    },
    #[error("initial rent cell ({x}, {y}) is outside the {width}x{height} grid")]
    InitialCellOutOfBounds {
        x: usize,
        y: usize,
        width: usize,
        height: usize,
    },
    #[error("steps must be positive")]
    ZeroSteps,
    #[error(transparent)]
    Schelling(#[from] SchellingError),
    #[error(transparent)]
    Lottery(#[from] ExchangeError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsumerConfig {
    /// Grid height: quantized price axis.
    pub price_levels: usize,
    /// Grid width: quantized goods axis.
    pub good_levels: usize,
    pub tolerance: usize,
    pub radius: usize,
    pub density: f64,
    pub type_split: f64,
    pub steps: u64,
    pub seed: u64,
    /// `(good, price)` coordinate where the Preferred region starts.
    pub initial_rent_cell: (usize, usize),
    pub gibbs_delta_m: f64,
    pub gibbs_initial_money: f64,
    /// Run the two-player lottery alongside the lattice.
    pub lottery: bool,
    pub snapshot_steps: Vec<u64>,
    pub boundary: Boundary2D,
}

impl Default for ConsumerConfig {
    fn default() -> Self {
        Self {
            price_levels: 16,
            good_levels: 16,
            tolerance: 3,
            radius: 1,
            density: 0.8,
            type_split: 0.5,
            steps: 135,
            seed: 7,
            initial_rent_cell: (0, 0),
            gibbs_delta_m: 1.0,
            gibbs_initial_money: 1.0,
            lottery: true,
            snapshot_steps: DEFAULT_SNAPSHOT_STEPS.to_vec(),
            boundary: Boundary2D::Toroidal,
        }
    }
}

impl ConsumerConfig {
    fn schelling(&self) -> schelling::SchellingConfig {
        schelling::SchellingConfig {
            width: self.good_levels,
            height: self.price_levels,
            radius: self.radius,
            tolerance: self.tolerance,
            density: self.density,
            type_split: self.type_split,
            seed: self.seed,
            max_sweeps: self.steps.max(1),
            boundary: self.boundary,
        }
    }

    pub fn validate(&self) -> Result<(), ConsumerError> {
        let s = self.schelling();
        match s.validate() {
            Err(SchellingError::TooFewAgents(_)) => return Err(self.too_small()),
            other => other?,
        }
        let a = s.type_a_count();
        if a == 0 || a == s.agent_count() {
            return Err(self.too_small());
        }
        let (x, y) = self.initial_rent_cell;
        if x >= self.good_levels || y >= self.price_levels {
            return Err(ConsumerError::InitialCellOutOfBounds {
                x,
                y,
                width: self.good_levels,
                height: self.price_levels,
            });
        }
        if self.steps == 0 {
            return Err(ConsumerError::ZeroSteps);
        }
        if self.lottery {
            // reuse the lottery's own checks on quantum and money
            crate::exchange::ExchangeConfig {
                players: LOTTERY_PLAYERS,
                initial_money: self.gibbs_initial_money,
                delta_m: self.gibbs_delta_m,
                ..Default::default()
            }
            .validate()?;
        }
        Ok(())
    }

    fn too_small(&self) -> ConsumerError {
        ConsumerError::GridTooSmall {
            width: self.good_levels,
            height: self.price_levels,
            density: self.density,
        }
    }

    fn lottery_wealth(&self) -> Result<Wealth, ExchangeError> {
        let (each, delta) = (self.gibbs_initial_money, self.gibbs_delta_m);
        Ok(if each.fract() == 0.0 && delta.fract() == 0.0 {
            Wealth::Integer(WealthVector::uniform(LOTTERY_PLAYERS, each as u64)?)
        } else {
            Wealth::Real(WealthVector::uniform(LOTTERY_PLAYERS, each)?)
        })
    }
}

/// What a configuration-space cell shows in a snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConsumerCell {
    /// No agent and not yet reached by the Preferred region.
    Empty,
    Preferred,
    AgentA,
    AgentB,
}

impl ConsumerCell {
    /// Red for Preferred, blue for Empty, amber and green for the goods.
    pub fn color(self) -> [u8; 3] {
        match self {
            ConsumerCell::Preferred => [220, 30, 30],
            ConsumerCell::Empty => [30, 60, 200],
            ConsumerCell::AgentA => [245, 190, 40],
            ConsumerCell::AgentB => [40, 160, 70],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsumerState {
    agents: SchellingState,
    preferred: Vec<bool>,
    lottery: Option<Wealth>,
}

impl ConsumerState {
    pub fn step(&self) -> u64 {
        self.agents.step()
    }

    pub fn agents(&self) -> &SchellingState {
        &self.agents
    }

    pub fn preferred_mask(&self) -> &[bool] {
        &self.preferred
    }

    pub fn preferred_count(&self) -> usize {
        self.preferred.iter().filter(|&&p| p).count()
    }

    pub fn lottery(&self) -> Option<&Wealth> {
        self.lottery.as_ref()
    }

    /// `(satisfied, unsatisfied)` agent counts.
    pub fn satisfaction_counts(&self) -> (usize, usize) {
        (
            self.agents.satisfied_count(),
            self.agents.unsatisfied_count(),
        )
    }

    /// Preferred cells shown over agents, agents over empty space.
    pub fn snapshot(&self) -> Grid2D<ConsumerCell> {
        let grid = self.agents.grid();
        let cells = grid
            .cells()
            .iter()
            .zip(&self.preferred)
            .map(|(c, &p)| match (p, c) {
                (true, _) => ConsumerCell::Preferred,
                (false, CellState::Empty) => ConsumerCell::Empty,
                (false, CellState::TypeA) => ConsumerCell::AgentA,
                (false, CellState::TypeB) => ConsumerCell::AgentB,
            })
            .collect();
        Grid2D::from_cells(grid.width(), grid.height(), cells, grid.boundary())
            .expect("snapshot has the lattice's shape")
    }
}

/// Seeded placement of the two goods with only the initial rent cell
/// marked Preferred.
pub fn init_consumer(config: &ConsumerConfig) -> Result<ConsumerState, ConsumerError> {
    config.validate()?;
    let agents = schelling::init(&config.schelling())?;
    let grid = agents.grid();
    let mut preferred = vec![false; grid.cells().len()];
    let (x, y) = config.initial_rent_cell;
    preferred[grid.index(x, y)] = true;
    let lottery = if config.lottery {
        Some(config.lottery_wealth()?)
    } else {
        None
    };
    Ok(ConsumerState {
        agents,
        preferred,
        lottery,
    })
}

/// Sweep the agents, grow the Preferred region by one ring of satisfied
/// agents, then play one lottery round.
pub fn consumer_step(
    state: &ConsumerState,
    config: &ConsumerConfig,
    dynamics: &mut SimRng,
    lottery_rng: &mut SimRng,
) -> ConsumerState {
    let agents = state.agents.sweep(dynamics);
    let grid = agents.grid();

    let mut satisfied = vec![false; grid.cells().len()];
    for (i, c) in grid.cells().iter().enumerate() {
        satisfied[i] = c.is_occupied();
    }
    for i in schelling::unsatisfied_indices(grid, agents.radius(), agents.tolerance()) {
        satisfied[i] = false;
    }

    let mut preferred = state.preferred.clone();
    for i in 0..preferred.len() {
        if preferred[i] || !satisfied[i] {
            continue;
        }
        let (x, y) = grid.coords(i);
        let mut touches = false;
        grid.for_each_neighbor_index(x, y, 1, |j| touches |= state.preferred[j]);
        preferred[i] = touches;
    }

    let mut lottery = state.lottery.clone();
    match &mut lottery {
        Some(Wealth::Integer(w)) => {
            w.exchange_step(config.gibbs_delta_m as u64, lottery_rng);
        }
        Some(Wealth::Real(w)) => {
            w.exchange_step(config.gibbs_delta_m, lottery_rng);
        }
        None => {}
    }

    ConsumerState {
        agents,
        preferred,
        lottery,
    }
}

#[derive(Debug, Clone)]
pub struct ConsumerRun {
    pub final_state: ConsumerState,
    pub trace: EntropyTrace,
    pub samples: Vec<SatisfactionSample>,
    /// `(step, snapshot)` for each configured step that was reached.
    pub snapshots: Vec<(u64, Grid2D<ConsumerCell>)>,
}

/// Iterate [`consumer_step`] for `config.steps` steps.
pub fn run_consumer(config: &ConsumerConfig) -> Result<ConsumerRun, ConsumerError> {
    let mut state = init_consumer(config)?;
    let mut dynamics = rng::stream(config.seed, rng::STREAM_DYNAMICS);
    let mut lottery_rng = rng::stream(config.seed, rng::STREAM_LOTTERY);
    let mut trace = EntropyTrace::new();
    let mut samples = Vec::with_capacity(config.steps as usize + 1);
    let mut snapshots = Vec::new();

    let mut record = |s: &ConsumerState, trace: &mut EntropyTrace, snaps: &mut Vec<_>| {
        let sample = s.agents.sample();
        trace
            .push(sample.step, sample.entropy)
            .expect("steps increase and entropies are nonnegative");
        samples.push(sample);
        if config.snapshot_steps.contains(&sample.step) {
            snaps.push((sample.step, s.snapshot()));
        }
    };
    record(&state, &mut trace, &mut snapshots);
    for _ in 0..config.steps {
        state = consumer_step(&state, config, &mut dynamics, &mut lottery_rng);
        record(&state, &mut trace, &mut snapshots);
    }
    Ok(ConsumerRun {
        final_state: state,
        trace,
        samples,
        snapshots,
    })
}

/// Largest radius-`r` tolerance, which makes every agent satisfied.
pub fn max_tolerance(radius: usize) -> usize {
    window_size(radius)
}
