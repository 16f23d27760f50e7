//! Bayesian updating under a perceived precision, and the rule each agent
//! kind uses to pick that precision from the menu.
//!
//! All functions here are pure. Two scores closer than [`TIE_TOLERANCE`] are
//! treated as tied; fit ties and conformist distance ties go to `Rho1`,
//! anti-conformist distance ties go to `Rho2`.

use core::fmt;

use crate::model::{AgentKind, Belief, PrecisionMenu, SignalLabel};

/// Absolute gap below which two fits or two squared distances count as equal.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelError {
    /// Both numerator and denominator of the posterior vanish.
    Degenerate { prior: f64, rho: f64 },
}

impl fmt::Display for KernelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelError::Degenerate { prior, rho } => {
                write!(f, "posterior undefined for prior {prior} under precision {rho}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for KernelError {}

/// One of the two menu entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrecisionChoice {
    Rho1,
    Rho2,
}

impl PrecisionChoice {
    pub fn value(self, menu: &PrecisionMenu) -> f64 {
        match self {
            PrecisionChoice::Rho1 => menu.rho1(),
            PrecisionChoice::Rho2 => menu.rho2(),
        }
    }

    pub fn other(self) -> PrecisionChoice {
        match self {
            PrecisionChoice::Rho1 => PrecisionChoice::Rho2,
            PrecisionChoice::Rho2 => PrecisionChoice::Rho1,
        }
    }
}

/// Likelihood of `signal` in state A and in state B when the channel has
/// precision `rho`.
#[inline]
fn likelihoods(signal: SignalLabel, rho: f64) -> (f64, f64) {
    match signal {
        SignalLabel::A => (rho, 1.0 - rho),
        SignalLabel::B => (1.0 - rho, rho),
    }
}

#[inline]
fn raw_posterior(prior: f64, signal: SignalLabel, rho: f64) -> f64 {
    let (on_a, on_b) = likelihoods(signal, rho);
    let num = on_a * prior;
    num / (num + on_b * (1.0 - prior))
}

/// Posterior probability of A after observing `signal` through a channel the
/// agent believes has precision `rho`.
pub fn bayes_update(prior: Belief, signal: SignalLabel, rho: f64) -> Result<Belief, KernelError> {
    let posterior = raw_posterior(prior.value(), signal, rho);
    if posterior.is_nan() {
        return Err(KernelError::Degenerate {
            prior: prior.value(),
            rho,
        });
    }
    Ok(Belief::new_unchecked(posterior.clamp(0.0, 1.0)))
}

/// Prior-weighted likelihood of `signal` under precision `rho`.
#[inline]
pub fn model_fit(prior: Belief, signal: SignalLabel, rho: f64) -> f64 {
    let (on_a, on_b) = likelihoods(signal, rho);
    let mu = prior.value();
    mu * on_a + (1.0 - mu) * on_b
}

/// `Rho2` if it scores strictly higher than `Rho1`, `Rho1` otherwise.
#[inline]
fn pick_higher(score1: f64, score2: f64) -> PrecisionChoice {
    if score2 - score1 > TIE_TOLERANCE {
        PrecisionChoice::Rho2
    } else {
        PrecisionChoice::Rho1
    }
}

/// Auto-referential rule: the model that best fits the signal.
pub fn choose_precision_auto(
    prior: Belief,
    signal: SignalLabel,
    menu: &PrecisionMenu,
) -> PrecisionChoice {
    pick_higher(
        model_fit(prior, signal, menu.rho1()),
        model_fit(prior, signal, menu.rho2()),
    )
}

/// Skeptical rule: the model that fits the signal worst.
pub fn choose_precision_skeptical(
    prior: Belief,
    signal: SignalLabel,
    menu: &PrecisionMenu,
) -> PrecisionChoice {
    pick_higher(
        -model_fit(prior, signal, menu.rho1()),
        -model_fit(prior, signal, menu.rho2()),
    )
}

#[inline]
fn squared_distances(
    prior: Belief,
    signal: SignalLabel,
    menu: &PrecisionMenu,
    avg_belief: Belief,
) -> (f64, f64) {
    let target = avg_belief.value();
    let d = |rho: f64| {
        let gap = raw_posterior(prior.value(), signal, rho) - target;
        gap * gap
    };
    (d(menu.rho1()), d(menu.rho2()))
}

/// Conformist rule: the model whose posterior lands closest to the average
/// prior belief of the population.
pub fn choose_precision_conformist(
    prior: Belief,
    signal: SignalLabel,
    menu: &PrecisionMenu,
    avg_belief: Belief,
) -> PrecisionChoice {
    let (d1, d2) = squared_distances(prior, signal, menu, avg_belief);
    pick_higher(-d1, -d2)
}

/// Anti-conformist rule: the model whose posterior lands farthest from the
/// average prior belief.
pub fn choose_precision_anticonformist(
    prior: Belief,
    signal: SignalLabel,
    menu: &PrecisionMenu,
    avg_belief: Belief,
) -> PrecisionChoice {
    let (d1, d2) = squared_distances(prior, signal, menu, avg_belief);
    if d1 - d2 > TIE_TOLERANCE {
        PrecisionChoice::Rho1
    } else {
        PrecisionChoice::Rho2
    }
}

/// Precision an agent of `kind` applies to `signal`. Naive agents use the
/// true channel precision; `avg_belief` is read only by the two
/// conformity-driven kinds.
pub fn choose_precision(
    kind: AgentKind,
    prior: Belief,
    signal: SignalLabel,
    menu: &PrecisionMenu,
    avg_belief: Belief,
) -> f64 {
    let choice = match kind {
        AgentKind::Naive => return menu.true_p(),
        AgentKind::AutoReferential => choose_precision_auto(prior, signal, menu),
        AgentKind::Skeptical => choose_precision_skeptical(prior, signal, menu),
        AgentKind::Conformist => choose_precision_conformist(prior, signal, menu, avg_belief),
        AgentKind::AntiConformist => {
            choose_precision_anticonformist(prior, signal, menu, avg_belief)
        }
    };
    choice.value(menu)
}
