//! State processes for the four laws of motion, and the signal channel.
//!
//! Variate consumption per period: Independent, AutoCorrelated and
//! SelfFulfilling draw exactly one state variate every period. Persistent
//! draws only when a new block starts.

use core::fmt;

use crate::model::{Belief, LawOfMotion, PersistentRedraw, SignalLabel, SimParams, StateLabel};
use crate::rng::RandomStream;

/// Probability that an auto-correlated state B stays B.
pub const PHI2: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainError {
    pub q: f64,
}

impl fmt::Display for DomainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q must lie in [1/3, 1] for an auto-correlated state, got {}", self.q)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for DomainError {}

/// Probability that an auto-correlated state A stays A, chosen so that the
/// invariant probability of A equals `q` when B stays B with probability ½.
pub fn phi1_from_q(q: f64) -> Result<f64, DomainError> {
    if !(1.0 / 3.0..=1.0).contains(&q) {
        return Err(DomainError { q });
    }
    Ok(((3.0 * q - 1.0) / (2.0 * q)).clamp(0.0, 1.0))
}

/// Current realization plus the bookkeeping some laws need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldState {
    pub current: StateLabel,
    /// Stay-in-A probability; only read by the auto-correlated law.
    pub phi1: f64,
    /// Period at which the current persistent block state was drawn.
    pub period_of_last_redraw: u32,
}

fn phi1_for(params: &SimParams) -> f64 {
    match params.law {
        LawOfMotion::AutoCorrelated => {
            phi1_from_q(params.q).expect("validated params keep q ≥ 1/3")
        }
        _ => 0.0,
    }
}

/// Whether the persistent law draws a fresh state at the start of period `t`
/// (only in [`PersistentRedraw::BeforeSignal`] mode).
fn redraws_before_signal(params: &SimParams, t: u32) -> bool {
    params.law == LawOfMotion::Persistent
        && params.persistent_redraw == PersistentRedraw::BeforeSignal
        && params.is_selection_period(t)
}

/// Whether the persistent law draws a fresh state at the end of period `t`,
/// effective from `t + 1`.
pub fn redraws_after_selection(params: &SimParams, t: u32) -> bool {
    params.law == LawOfMotion::Persistent
        && params.persistent_redraw == PersistentRedraw::AfterSelection
        && params.is_selection_period(t)
}

/// Probability that the state in period `t` is A, given the world carried
/// over from `t − 1` and the average belief at the start of period `t`.
pub fn state_prob_a(params: &SimParams, world: &WorldState, t: u32, avg_belief_prev: Belief) -> f64 {
    match params.law {
        LawOfMotion::Independent => params.q,
        LawOfMotion::Persistent => {
            if redraws_before_signal(params, t) {
                params.q
            } else {
                world.current.indicator()
            }
        }
        LawOfMotion::AutoCorrelated => match world.current {
            StateLabel::A => world.phi1,
            StateLabel::B => 1.0 - PHI2,
        },
        LawOfMotion::SelfFulfilling => {
            params.delta * avg_belief_prev.value() + (1.0 - params.delta) * params.q
        }
    }
}

/// State for period 1, drawn from the law's unconditional distribution. The
/// self-fulfilling law uses `mu0` as the previous average belief. One variate.
pub fn initial_state(params: &SimParams, stream: &mut RandomStream) -> WorldState {
    let prob_a = match params.law {
        LawOfMotion::SelfFulfilling => {
            params.delta * params.mu0.value() + (1.0 - params.delta) * params.q
        }
        _ => params.q,
    };
    let current = if stream.bernoulli(prob_a) {
        StateLabel::A
    } else {
        StateLabel::B
    };
    WorldState {
        current,
        phi1: phi1_for(params),
        period_of_last_redraw: 1,
    }
}

/// State for period `t ≥ 2`.
pub fn advance_state(
    params: &SimParams,
    world: &WorldState,
    t: u32,
    avg_belief_prev: Belief,
    stream: &mut RandomStream,
) -> WorldState {
    debug_assert!(t >= 2);
    if params.law == LawOfMotion::Persistent && !redraws_before_signal(params, t) {
        return *world;
    }
    let prob_a = state_prob_a(params, world, t, avg_belief_prev);
    let current = if stream.bernoulli(prob_a) {
        StateLabel::A
    } else {
        StateLabel::B
    };
    WorldState {
        current,
        period_of_last_redraw: if params.law == LawOfMotion::Persistent {
            t
        } else {
            world.period_of_last_redraw
        },
        ..*world
    }
}

/// Draws the next persistent block state at the end of period `t`. One variate.
pub fn redraw_block(params: &SimParams, world: &WorldState, t: u32, stream: &mut RandomStream) -> WorldState {
    let current = if stream.bernoulli(params.q) {
        StateLabel::A
    } else {
        StateLabel::B
    };
    WorldState {
        current,
        period_of_last_redraw: t + 1,
        ..*world
    }
}

/// Signal matching `state` with probability `p`. One variate.
#[inline]
pub fn sample_signal(state: StateLabel, p: f64, stream: &mut RandomStream) -> SignalLabel {
    let matching = SignalLabel::matching(state);
    if stream.bernoulli(p) {
        matching
    } else {
        matching.flip()
    }
}
