//! Domain vocabulary shared by every other module: states, signals, agent
//! kinds, beliefs, the precision menu and the full simulation parameter set.

use core::fmt;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Realization of the binary state of the world.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub enum StateLabel {
    A,
    B,
}

impl StateLabel {
    /// Indicator of state A, the target used by indicator-based errors.
    pub fn indicator(self) -> f64 {
        match self {
            StateLabel::A => 1.0,
            StateLabel::B => 0.0,
        }
    }

    pub fn flip(self) -> StateLabel {
        match self {
            StateLabel::A => StateLabel::B,
            StateLabel::B => StateLabel::A,
        }
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StateLabel::A => "A",
            StateLabel::B => "B",
        })
    }
}

/// A private signal; `A` points to state A and `B` to state B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub enum SignalLabel {
    #[cfg_attr(feature = "serde", serde(rename = "a"))]
    A,
    #[cfg_attr(feature = "serde", serde(rename = "b"))]
    B,
}

impl SignalLabel {
    /// The signal that indicates `state`.
    pub fn matching(state: StateLabel) -> SignalLabel {
        match state {
            StateLabel::A => SignalLabel::A,
            StateLabel::B => SignalLabel::B,
        }
    }

    pub fn flip(self) -> SignalLabel {
        match self {
            SignalLabel::A => SignalLabel::B,
            SignalLabel::B => SignalLabel::A,
        }
    }
}

impl fmt::Display for SignalLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SignalLabel::A => "a",
            SignalLabel::B => "b",
        })
    }
}

/// The five belief-updating rules competing in the population.
///
/// Integer codes follow declaration order and are stable across releases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum AgentKind {
    Naive,
    AutoReferential,
    Skeptical,
    Conformist,
    AntiConformist,
}

impl AgentKind {
    pub const COUNT: usize = 5;

    pub const ALL: [AgentKind; AgentKind::COUNT] = [
        AgentKind::Naive,
        AgentKind::AutoReferential,
        AgentKind::Skeptical,
        AgentKind::Conformist,
        AgentKind::AntiConformist,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<AgentKind> {
        AgentKind::ALL.get(usize::from(code)).copied()
    }

    /// Index into per-kind arrays; equal to [`AgentKind::code`].
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            AgentKind::Naive => "naive",
            AgentKind::AutoReferential => "auto_referential",
            AgentKind::Skeptical => "skeptical",
            AgentKind::Conformist => "conformist",
            AgentKind::AntiConformist => "anti_conformist",
        }
    }

    pub fn from_name(name: &str) -> Option<AgentKind> {
        AgentKind::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Stochastic process driving the state from one period to the next.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum LawOfMotion {
    /// Fresh draw every period with probability `q` of A.
    Independent,
    /// Fresh draw once per selection block, constant in between.
    Persistent,
    /// Two-state Markov chain whose invariant probability of A is `q`.
    AutoCorrelated,
    /// Probability of A mixes `q` with the previous average belief.
    SelfFulfilling,
}

impl LawOfMotion {
    pub const ALL: [LawOfMotion; 4] = [
        LawOfMotion::Independent,
        LawOfMotion::Persistent,
        LawOfMotion::AutoCorrelated,
        LawOfMotion::SelfFulfilling,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn name(self) -> &'static str {
        match self {
            LawOfMotion::Independent => "independent",
            LawOfMotion::Persistent => "persistent",
            LawOfMotion::AutoCorrelated => "auto_correlated",
            LawOfMotion::SelfFulfilling => "self_fulfilling",
        }
    }

    pub fn from_name(name: &str) -> Option<LawOfMotion> {
        LawOfMotion::ALL.into_iter().find(|l| l.name() == name)
    }
}

impl fmt::Display for LawOfMotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// When the persistent law redraws its block state relative to selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PersistentRedraw {
    /// Selection at `t = kτ` judges agents on the block that just ended; the
    /// new block state takes effect from `t + 1`.
    #[default]
    AfterSelection,
    /// The new block state is drawn at the start of `t = kτ`, before signals.
    BeforeSignal,
}

/// Validation failure naming the violated bound.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamError {
    /// A belief value outside `[0, 1]` or NaN.
    BeliefOutOfRange(f64),
    /// A named parameter violated its bound; the message names both.
    Bound {
        field: &'static str,
        message: &'static str,
        value: f64,
    },
}

impl ParamError {
    fn bound(field: &'static str, message: &'static str, value: f64) -> ParamError {
        ParamError::Bound {
            field,
            message,
            value,
        }
    }

    /// Name of the offending field.
    pub fn field(&self) -> &'static str {
        match self {
            ParamError::BeliefOutOfRange(_) => "belief",
            ParamError::Bound { field, .. } => field,
        }
    }
}

impl fmt::Display for ParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamError::BeliefOutOfRange(v) => write!(f, "belief must lie in [0, 1], got {v}"),
            ParamError::Bound { message, value, .. } => write!(f, "{message} (got {value})"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ParamError {}

/// Probability that the state is A, as held by one agent or as a population
/// average. Always within `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "f64", into = "f64"))]
pub struct Belief(f64);

impl Belief {
    pub const UNIFORM: Belief = Belief(0.5);

    pub fn new(value: f64) -> Result<Belief, ParamError> {
        if (0.0..=1.0).contains(&value) {
            Ok(Belief(value))
        } else {
            Err(ParamError::BeliefOutOfRange(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Strictly inside the unit interval.
    pub fn is_interior(self) -> bool {
        self.0 > 0.0 && self.0 < 1.0
    }

    pub(crate) fn new_unchecked(value: f64) -> Belief {
        debug_assert!((0.0..=1.0).contains(&value), "belief {value} out of range");
        Belief(value)
    }
}

impl TryFrom<f64> for Belief {
    type Error = ParamError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Belief::new(value)
    }
}

impl From<Belief> for f64 {
    fn from(b: Belief) -> f64 {
        b.0
    }
}

/// The two candidate precisions strategic agents choose between, plus the
/// true channel precision used by naive agents.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct PrecisionMenu {
    rho1: f64,
    rho2: f64,
    true_p: f64,
}

impl PrecisionMenu {
    pub fn new(rho1: f64, rho2: f64, true_p: f64) -> Result<PrecisionMenu, ParamError> {
        // Negated comparisons so that NaN is rejected too.
        if !(rho1 > 0.5) {
            return Err(ParamError::bound("rho1", "rho1 must exceed 0.5", rho1));
        }
        if !(rho2 > rho1) {
            return Err(ParamError::bound("rho2", "rho2 must exceed rho1", rho2));
        }
        if !(rho2 <= 1.0) {
            return Err(ParamError::bound("rho2", "rho2 must not exceed 1", rho2));
        }
        if !(true_p > 0.5 && true_p < 1.0) {
            return Err(ParamError::bound("p", "p must lie strictly between 0.5 and 1", true_p));
        }
        Ok(PrecisionMenu { rho1, rho2, true_p })
    }

    pub fn rho1(&self) -> f64 {
        self.rho1
    }

    pub fn rho2(&self) -> f64 {
        self.rho2
    }

    pub fn true_p(&self) -> f64 {
        self.true_p
    }
}

/// One agent. The belief summarizes the agent's whole signal history.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Agent {
    pub kind: AgentKind,
    pub belief: Belief,
}

impl Agent {
    pub fn new(kind: AgentKind, belief: Belief) -> Agent {
        Agent { kind, belief }
    }
}

/// Full parameterization of one replication.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SimParams {
    /// Population size.
    pub n: usize,
    /// Horizon `T` in periods.
    pub horizon: u32,
    /// Selection interval `τ` in periods.
    pub tau: u32,
    pub menu: PrecisionMenu,
    /// Common prior, also the belief of every reborn agent.
    pub mu0: Belief,
    /// Probability (or invariant probability) of state A.
    pub q: f64,
    /// Weight of the average belief under the self-fulfilling law.
    pub delta: f64,
    pub law: LawOfMotion,
    pub persistent_redraw: PersistentRedraw,
}

impl SimParams {
    /// Benchmark parameterization: n = 500, T = 700, τ = 10, p = 0.7,
    /// ρ₁ = 0.6, ρ₂ = 0.9, μ₀ = 0.5, with δ = 0.5.
    pub fn benchmark(law: LawOfMotion, q: f64) -> SimParams {
        SimParams {
            n: 500,
            horizon: 700,
            tau: 10,
            menu: PrecisionMenu {
                rho1: 0.6,
                rho2: 0.9,
                true_p: 0.7,
            },
            mu0: Belief::UNIFORM,
            q,
            delta: 0.5,
            law,
            persistent_redraw: PersistentRedraw::AfterSelection,
        }
    }

    /// Checks every bound, returning the parameters unchanged on success.
    pub fn validate(self) -> Result<SimParams, ParamError> {
        // Re-run the menu checks; the fields may have been built by hand.
        PrecisionMenu::new(self.menu.rho1, self.menu.rho2, self.menu.true_p)?;
        if self.n < 1 {
            return Err(ParamError::bound("n", "n must be at least 1", self.n as f64));
        }
        if self.tau < 1 {
            return Err(ParamError::bound("tau", "tau must be at least 1", f64::from(self.tau)));
        }
        if self.tau > self.horizon {
            return Err(ParamError::bound(
                "tau",
                "tau must not exceed the horizon T",
                f64::from(self.tau),
            ));
        }
        let mu0 = self.mu0.value();
        if !(mu0 > 0.0 && mu0 < 1.0) {
            return Err(ParamError::bound("mu0", "mu0 must lie strictly between 0 and 1", mu0));
        }
        if !(self.q > 0.0 && self.q <= 1.0) {
            return Err(ParamError::bound("q", "q must lie in (0, 1]", self.q));
        }
        if self.law == LawOfMotion::AutoCorrelated && !(self.q >= 1.0 / 3.0) {
            return Err(ParamError::bound(
                "q",
                "q must be at least 1/3 under the auto-correlated law",
                self.q,
            ));
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(ParamError::bound("delta", "delta must lie in [0, 1]", self.delta));
        }
        Ok(self)
    }

    /// Whether selection happens at the end of period `t`: `t = kτ ≤ T − τ`.
    pub fn is_selection_period(&self, t: u32) -> bool {
        t.is_multiple_of(self.tau) && t + self.tau <= self.horizon
    }
}
