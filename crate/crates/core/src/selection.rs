//! Squared-error fitness, population statistics and the survival rule.

use alloc::vec::Vec;
use core::fmt;

use crate::model::{Agent, AgentKind, Belief, LawOfMotion, StateLabel};
use crate::rng::RandomStream;

/// What an agent's belief is scored against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorMode {
    /// Against the probability `q` of state A.
    AgainstQ,
    /// Against the indicator of the realized state.
    AgainstIndicator,
}

impl ErrorMode {
    pub fn for_law(law: LawOfMotion) -> ErrorMode {
        match law {
            LawOfMotion::Persistent => ErrorMode::AgainstIndicator,
            _ => ErrorMode::AgainstQ,
        }
    }

    #[inline]
    pub fn target(self, q: f64, state: StateLabel) -> f64 {
        match self {
            ErrorMode::AgainstQ => q,
            ErrorMode::AgainstIndicator => state.indicator(),
        }
    }
}

#[inline]
pub fn squared_error(mode: ErrorMode, q: f64, state: StateLabel, belief: Belief) -> f64 {
    let gap = mode.target(q, state) - belief.value();
    gap * gap
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionError {
    LengthMismatch { agents: usize, errors: usize },
    EmptyPopulation,
}

impl fmt::Display for SelectionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectionError::LengthMismatch { agents, errors } => {
                write!(f, "{agents} agents but {errors} errors")
            }
            SelectionError::EmptyPopulation => f.write_str("population is empty"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SelectionError {}

/// Composition and error profile of the population at one instant.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PopulationStats {
    pub counts: [usize; AgentKind::COUNT],
    pub shares: [f64; AgentKind::COUNT],
    /// Mean error over agents of each kind; `None` when the kind is extinct.
    pub mean_error: [Option<f64>; AgentKind::COUNT],
    /// Population mean squared error.
    pub psi: f64,
    /// Agents reborn at this instant (zero outside selection periods).
    pub rebirth_count: usize,
}

impl PopulationStats {
    pub fn n(&self) -> usize {
        self.counts.iter().sum()
    }
}

pub fn population_stats(agents: &[Agent], errors: &[f64]) -> Result<PopulationStats, SelectionError> {
    if agents.len() != errors.len() {
        return Err(SelectionError::LengthMismatch {
            agents: agents.len(),
            errors: errors.len(),
        });
    }
    if agents.is_empty() {
        return Err(SelectionError::EmptyPopulation);
    }
    let mut counts = [0usize; AgentKind::COUNT];
    let mut sums = [0.0f64; AgentKind::COUNT];
    for (agent, &e) in agents.iter().zip(errors) {
        counts[agent.kind.index()] += 1;
        sums[agent.kind.index()] += e;
    }
    let n = agents.len() as f64;
    let mut shares = [0.0; AgentKind::COUNT];
    let mut mean_error = [None; AgentKind::COUNT];
    for k in 0..AgentKind::COUNT {
        shares[k] = counts[k] as f64 / n;
        if counts[k] > 0 {
            mean_error[k] = Some(sums[k] / counts[k] as f64);
        }
    }
    Ok(PopulationStats {
        counts,
        shares,
        mean_error,
        psi: mean(errors),
        rebirth_count: 0,
    })
}

/// Replaces every agent whose error exceeds `psi` with a newborn of uniformly
/// random kind holding belief `mu0`. Rebirth kinds are drawn in ascending
/// agent order, one variate each. Returns the number of rebirths.
pub fn apply_selection(
    agents: &mut [Agent],
    errors: &[f64],
    psi: f64,
    mu0: Belief,
    stream: &mut RandomStream,
) -> Result<usize, SelectionError> {
    if agents.len() != errors.len() {
        return Err(SelectionError::LengthMismatch {
            agents: agents.len(),
            errors: errors.len(),
        });
    }
    let mut reborn = 0;
    for (agent, &e) in agents.iter_mut().zip(errors) {
        if e > psi {
            let kind = AgentKind::ALL[stream.index(AgentKind::COUNT)];
            *agent = Agent::new(kind, mu0);
            reborn += 1;
        }
    }
    Ok(reborn)
}

/// Arithmetic mean of `errors`, clamped into `[min, max]` so that rounding
/// can never put the mean below the smallest error.
pub fn mean(errors: &[f64]) -> f64 {
    let (lo, hi) = errors
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &e| (lo.min(e), hi.max(e)));
    (errors.iter().sum::<f64>() / errors.len() as f64).clamp(lo, hi)
}

/// Errors of every agent, in agent order.
pub fn errors_of(agents: &[Agent], mode: ErrorMode, q: f64, state: StateLabel) -> Vec<f64> {
    agents
        .iter()
        .map(|a| squared_error(mode, q, state, a.belief))
        .collect()
}
