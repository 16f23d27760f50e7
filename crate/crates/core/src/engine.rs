//! Period loop and single-replication runner.
//!
//! Within period `t` the order is fixed:
//! 1. state for `t` (initial draw at `t = 1`, law-specific advance after),
//! 2. snapshot of the average prior belief,
//! 3. per agent in index order: signal, precision choice, Bayes update,
//! 4. selection when `t = kτ ≤ T − τ`,
//! 5. persistent law only: next block state drawn at `t = kτ`.
//!
//! Variates are consumed in that same order, which keeps trajectories of
//! different laws comparable under a shared seed.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::kernel::{bayes_update, choose_precision, KernelError};
use crate::model::{Agent, AgentKind, Belief, ParamError, SignalLabel, SimParams, StateLabel};
use crate::rng::RandomStream;
use crate::selection::{
    apply_selection, errors_of, mean, population_stats, ErrorMode, PopulationStats, SelectionError,
};
use crate::world::{advance_state, initial_state, redraw_block, redraws_after_selection, sample_signal, WorldState};

#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    Params(ParamError),
    Kernel(KernelError),
    Selection(SelectionError),
    /// An injected signal sequence has no entry for this agent and period.
    SignalsExhausted { agent: usize, t: u32 },
    /// The simulation already reached its horizon.
    Finished,
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::Params(e) => write!(f, "invalid parameters: {e}"),
            SimError::Kernel(e) => write!(f, "belief update failed: {e}"),
            SimError::Selection(e) => write!(f, "selection failed: {e}"),
            SimError::SignalsExhausted { agent, t } => {
                write!(f, "no injected signal for agent {agent} in period {t}")
            }
            SimError::Finished => f.write_str("simulation already reached its horizon"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SimError {}

impl From<ParamError> for SimError {
    fn from(e: ParamError) -> Self {
        SimError::Params(e)
    }
}

impl From<KernelError> for SimError {
    fn from(e: KernelError) -> Self {
        SimError::Kernel(e)
    }
}

impl From<SelectionError> for SimError {
    fn from(e: SelectionError) -> Self {
        SimError::Selection(e)
    }
}

/// Where agents' signals come from.
pub trait SignalSource {
    fn signal(
        &mut self,
        agent: usize,
        t: u32,
        state: StateLabel,
        p: f64,
        stream: &mut RandomStream,
    ) -> Result<SignalLabel, SimError>;
}

/// The true noisy channel: one variate per signal.
#[derive(Debug, Clone, Copy, Default)]
pub struct Channel;

impl SignalSource for Channel {
    #[inline]
    fn signal(
        &mut self,
        _agent: usize,
        _t: u32,
        state: StateLabel,
        p: f64,
        stream: &mut RandomStream,
    ) -> Result<SignalLabel, SimError> {
        Ok(sample_signal(state, p, stream))
    }
}

/// Fixed signal sequences, one per agent, indexed by period (`t = 1` first).
/// Consumes no variates.
#[derive(Debug, Clone, Default)]
pub struct InjectedSignals {
    per_agent: Vec<Vec<SignalLabel>>,
}

impl InjectedSignals {
    pub fn new(per_agent: Vec<Vec<SignalLabel>>) -> InjectedSignals {
        InjectedSignals { per_agent }
    }
}

impl SignalSource for InjectedSignals {
    fn signal(
        &mut self,
        agent: usize,
        t: u32,
        _state: StateLabel,
        _p: f64,
        _stream: &mut RandomStream,
    ) -> Result<SignalLabel, SimError> {
        self.per_agent
            .get(agent)
            .and_then(|seq| seq.get(t as usize - 1))
            .copied()
            .ok_or(SimError::SignalsExhausted { agent, t })
    }
}

/// Integer counts summing to `n` from a share vector, by largest remainder.
/// Remainder ties go to the lower kind code.
pub fn apportion(shares: &[f64; AgentKind::COUNT], n: usize) -> [usize; AgentKind::COUNT] {
    let total: f64 = shares.iter().sum();
    let mut counts = [0usize; AgentKind::COUNT];
    let mut remainders = [(0.0f64, 0usize); AgentKind::COUNT];
    for k in 0..AgentKind::COUNT {
        let exact = shares[k] / total * n as f64;
        let floor = libm::floor(exact);
        counts[k] = floor as usize;
        remainders[k] = (exact - floor, k);
    }
    let assigned: usize = counts.iter().sum();
    let mut left = n.saturating_sub(assigned);
    // Stable sort keeps kind-code order among equal remainders.
    remainders.sort_by(|a, b| b.0.total_cmp(&a.0));
    for &(_, k) in remainders.iter().cycle() {
        if left == 0 {
            break;
        }
        counts[k] += 1;
        left -= 1;
    }
    counts
}

/// Initial population: a share vector drawn uniformly from the simplex (five
/// normalized unit exponentials, five variates), apportioned to counts, kinds
/// laid out in contiguous blocks by code, every belief at `mu0`.
pub fn init_population(params: &SimParams, stream: &mut RandomStream) -> Vec<Agent> {
    let mut shares = [0.0; AgentKind::COUNT];
    for s in shares.iter_mut() {
        *s = stream.exponential();
    }
    population_from_shares(params, &shares)
}

pub fn population_from_shares(params: &SimParams, shares: &[f64; AgentKind::COUNT]) -> Vec<Agent> {
    let counts = apportion(shares, params.n);
    let mut agents = Vec::with_capacity(params.n);
    for kind in AgentKind::ALL {
        agents.extend(core::iter::repeat_n(Agent::new(kind, params.mu0), counts[kind.index()]));
    }
    agents
}

/// What happened in one period.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub t: u32,
    /// State prevailing during period `t`.
    pub state: StateLabel,
    /// Average prior belief seen by conformity-driven agents in period `t`.
    pub avg_belief: Belief,
    /// Present when `t` is a selection period: shares after rebirth, errors
    /// and `psi` as evaluated for selection.
    pub selection: Option<PopulationStats>,
}

/// One replication in progress. Owns its stream, world and population.
#[derive(Debug, Clone)]
pub struct Simulation {
    params: SimParams,
    stream: RandomStream,
    world: Option<WorldState>,
    agents: Vec<Agent>,
    t: u32,
    errors: Vec<f64>,
}

impl Simulation {
    /// Validates `params`, seeds the stream and draws the initial population.
    pub fn new(params: SimParams, seed: u64) -> Result<Simulation, SimError> {
        let params = params.validate()?;
        let mut stream = RandomStream::new(seed);
        let agents = init_population(&params, &mut stream);
        Ok(Simulation::assemble(params, stream, agents))
    }

    /// Starts from a given population instead of a random one.
    pub fn with_agents(params: SimParams, agents: Vec<Agent>, seed: u64) -> Result<Simulation, SimError> {
        let params = params.validate()?;
        if agents.len() != params.n {
            return Err(SelectionError::LengthMismatch {
                agents: agents.len(),
                errors: params.n,
            }
            .into());
        }
        Ok(Simulation::assemble(params, RandomStream::new(seed), agents))
    }

    fn assemble(params: SimParams, stream: RandomStream, agents: Vec<Agent>) -> Simulation {
        Simulation {
            errors: vec![0.0; agents.len()],
            params,
            stream,
            world: None,
            agents,
            t: 0,
        }
    }

    pub fn params(&self) -> &SimParams {
        &self.params
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn world(&self) -> Option<&WorldState> {
        self.world.as_ref()
    }

    /// Last completed period; zero before the first step.
    pub fn period(&self) -> u32 {
        self.t
    }

    pub fn stream(&self) -> &RandomStream {
        &self.stream
    }

    pub fn is_finished(&self) -> bool {
        self.t >= self.params.horizon
    }

    pub fn average_belief(&self) -> Belief {
        let sum: f64 = self.agents.iter().map(|a| a.belief.value()).sum();
        Belief::new_unchecked((sum / self.agents.len() as f64).clamp(0.0, 1.0))
    }

    /// Runs the next period.
    pub fn step<S: SignalSource>(&mut self, source: &mut S) -> Result<StepReport, SimError> {
        if self.is_finished() {
            return Err(SimError::Finished);
        }
        let t = self.t + 1;
        let params = self.params;

        // The start-of-period average equals the average after last period's
        // updates, so the self-fulfilling law and conformists share it.
        let avg = self.average_belief();
        let world = match &self.world {
            None => initial_state(&params, &mut self.stream),
            Some(w) => advance_state(&params, w, t, avg, &mut self.stream),
        };
        let state = world.current;

        for (i, agent) in self.agents.iter_mut().enumerate() {
            let signal = source.signal(i, t, state, params.menu.true_p(), &mut self.stream)?;
            let rho = choose_precision(agent.kind, agent.belief, signal, &params.menu, avg);
            agent.belief = bayes_update(agent.belief, signal, rho)?;
        }

        let selection = if params.is_selection_period(t) {
            let mode = ErrorMode::for_law(params.law);
            self.errors.clear();
            self.errors.extend(
                self.agents
                    .iter()
                    .map(|a| crate::selection::squared_error(mode, params.q, state, a.belief)),
            );
            let psi = mean(&self.errors);
            let mut stats = population_stats(&self.agents, &self.errors)?;
            let reborn = apply_selection(&mut self.agents, &self.errors, psi, params.mu0, &mut self.stream)?;
            let mut counts = [0usize; AgentKind::COUNT];
            for a in &self.agents {
                counts[a.kind.index()] += 1;
            }
            let n = self.agents.len() as f64;
            stats.counts = counts;
            stats.shares = counts.map(|c| c as f64 / n);
            stats.rebirth_count = reborn;
            Some(stats)
        } else {
            None
        };

        let world = if redraws_after_selection(&params, t) {
            redraw_block(&params, &world, t, &mut self.stream)
        } else {
            world
        };
        self.world = Some(world);
        self.t = t;

        Ok(StepReport {
            t,
            state,
            avg_belief: avg,
            selection,
        })
    }

    /// Statistics of the current population scored against `state`.
    pub fn stats_against(&self, state: StateLabel) -> PopulationStats {
        let mode = ErrorMode::for_law(self.params.law);
        let errors = errors_of(&self.agents, mode, self.params.q, state);
        population_stats(&self.agents, &errors).expect("population is never empty")
    }
}

/// Population statistics recorded at time `t`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EpochRecord {
    pub t: u32,
    pub stats: PopulationStats,
}

/// Outcome of one replication.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReplicationResult {
    pub seed: u64,
    /// Shares at `t = T`.
    pub final_shares: [f64; AgentKind::COUNT],
    /// Per-kind mean error averaged over the last `τ` periods, over the
    /// periods in which the kind was present.
    pub final_mse: [Option<f64>; AgentKind::COUNT],
    /// Shares averaged over the last `τ` periods.
    pub trailing_shares: [f64; AgentKind::COUNT],
    /// Every selection period, then `T`.
    pub epoch_series: Vec<EpochRecord>,
    pub rebirths_total: usize,
}

/// Runs one replication from `seed` with the true signal channel.
pub fn run_replication(params: &SimParams, seed: u64) -> Result<ReplicationResult, SimError> {
    let mut sim = Simulation::new(*params, seed)?;
    let horizon = sim.params.horizon;
    let window_start = horizon - sim.params.tau + 1;

    let mut epoch_series = Vec::with_capacity((horizon / sim.params.tau) as usize + 1);
    let mut rebirths_total = 0;
    let mut mse_sum = [0.0; AgentKind::COUNT];
    let mut mse_periods = [0u32; AgentKind::COUNT];
    let mut share_sum = [0.0; AgentKind::COUNT];
    let mut last = None;

    for _ in 0..horizon {
        let report = sim.step(&mut Channel)?;
        if let Some(stats) = report.selection {
            rebirths_total += stats.rebirth_count;
            epoch_series.push(EpochRecord { t: report.t, stats });
        }
        if report.t >= window_start {
            let stats = sim.stats_against(report.state);
            for k in 0..AgentKind::COUNT {
                share_sum[k] += stats.shares[k];
                if let Some(e) = stats.mean_error[k] {
                    mse_sum[k] += e;
                    mse_periods[k] += 1;
                }
            }
            last = Some(stats);
        }
    }

    let final_stats = last.expect("horizon ≥ τ ≥ 1 leaves a non-empty window");
    let window = f64::from(horizon - window_start + 1);
    let mut final_mse = [None; AgentKind::COUNT];
    for k in 0..AgentKind::COUNT {
        if mse_periods[k] > 0 {
            final_mse[k] = Some(mse_sum[k] / f64::from(mse_periods[k]));
        }
    }
    let result = ReplicationResult {
        seed,
        final_shares: final_stats.shares,
        final_mse,
        trailing_shares: share_sum.map(|s| s / window),
        epoch_series: {
            epoch_series.push(EpochRecord {
                t: horizon,
                stats: final_stats,
            });
            epoch_series
        },
        rebirths_total,
    };
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::LawOfMotion;

    #[test]
    fn equal_shares_give_one_of_each() {
        assert_eq!(apportion(&[0.2; 5], 5), [1; 5]);
    }

    #[test]
    fn apportion_ties_go_to_low_codes() {
        assert_eq!(apportion(&[0.2; 5], 7), [2, 2, 1, 1, 1]);
        assert_eq!(apportion(&[1.0, 0.0, 0.0, 0.0, 0.0], 3), [3, 0, 0, 0, 0]);
        assert_eq!(apportion(&[0.5, 0.0, 0.0, 0.0, 0.5], 3), [2, 0, 0, 0, 1]);
    }

    #[test]
    fn apportion_always_sums_to_n() {
        let mut s = RandomStream::new(12);
        for n in [10, 50, 500] {
            for _ in 0..10_000 {
                let shares = [(); 5].map(|_| s.exponential());
                assert_eq!(apportion(&shares, n).iter().sum::<usize>(), n);
            }
        }
    }

    #[test]
    fn initial_population_layout() {
        let params = SimParams::benchmark(LawOfMotion::Independent, 0.7);
        let mut s = RandomStream::new(3);
        let agents = init_population(&params, &mut s);
        assert_eq!(agents.len(), 500);
        assert_eq!(s.drawn(), 5);
        assert!(agents.iter().all(|a| a.belief.value() == 0.5));
        assert!(agents.windows(2).all(|w| w[0].kind <= w[1].kind));
    }

    #[test]
    fn finished_simulation_refuses_to_step() {
        let mut params = SimParams::benchmark(LawOfMotion::Independent, 0.7);
        params.n = 3;
        params.horizon = 2;
        params.tau = 1;
        let mut sim = Simulation::new(params, 1).unwrap();
        sim.step(&mut Channel).unwrap();
        sim.step(&mut Channel).unwrap();
        assert_eq!(sim.step(&mut Channel), Err(SimError::Finished));
    }
}
