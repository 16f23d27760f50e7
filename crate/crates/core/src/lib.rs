//! Evolutionary competition among belief-updating rules.
//!
//! A population of agents learns a binary state from private noisy signals.
//! Each agent interprets every signal through one of two candidate
//! precisions, picked by a rule that depends on its kind: naive agents use
//! the true precision, auto-referential and skeptical agents maximize or
//! minimize the fit of the signal, and conformists and anti-conformists pull
//! their posterior toward or away from the population's average belief.
//! Every `τ` periods the agents whose squared prediction error exceeds the
//! population mean are reborn with a random kind and a fresh prior.
//!
//! The crate is `no_std` with `alloc`. IO, configuration and the experiment
//! harness live in the companion `narrevo` crate.

#![cfg_attr(not(any(test, feature = "std")), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod engine;
pub mod kernel;
pub mod model;
pub mod rng;
pub mod selection;
pub mod world;

pub use engine::{
    apportion, init_population, run_replication, Channel, EpochRecord, InjectedSignals,
    ReplicationResult, SignalSource, SimError, Simulation, StepReport,
};
pub use kernel::{
    bayes_update, choose_precision, choose_precision_anticonformist, choose_precision_auto,
    choose_precision_conformist, choose_precision_skeptical, model_fit, KernelError,
    PrecisionChoice,
};
pub use model::{
    Agent, AgentKind, Belief, LawOfMotion, ParamError, PersistentRedraw, PrecisionMenu,
    SignalLabel, SimParams, StateLabel,
};
pub use rng::RandomStream;
pub use selection::{apply_selection, population_stats, squared_error, ErrorMode, PopulationStats};
pub use world::{advance_state, initial_state, phi1_from_q, sample_signal, state_prob_a, WorldState};
