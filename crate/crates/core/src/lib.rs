//! Household contextual memory for predicting missing grocery items.
//!
//! Observations of household contexts are encoded as binary presence vectors
//! ([`vocab`]), buffered per reporting window ([`stcm`]), and compared against
//! context clusters learned under supervision ([`sustain`]) to find items that
//! were never seen during a window ([`reasoner`]). [`sim`] drives the whole loop
//! over a scripted household with a noisy synthetic perception channel
//! ([`perception`]).

pub mod api;
pub mod error;
pub mod perception;
pub mod persistence;
pub mod reasoner;
pub mod scenarios;
pub mod server;
pub mod sim;
pub mod stcm;
pub mod sustain;
pub mod vocab;

pub use api::{ApiError, CommandRequest, Session, Verb};
pub use error::{Error, Result};
pub use perception::{NcmClassifier, NoiseProfile, Perception, PerceptionConfig, SyntheticFeatureModel};
pub use persistence::{load_state, save_state, StateSnapshot, FORMAT_VERSION};
pub use reasoner::{MissingList, MissingReport, PredictionLv, WindowProduct};
pub use sim::{
    run_scenario, run_script, train_network, Environment, ScenarioEvent, ScenarioOutcome, ScenarioScript, Simulation,
};
pub use stcm::StcmBuffer;
pub use sustain::{Cluster, SustainNetwork, SustainParams};
pub use vocab::{decode, encode, LatentVariable, Vocabulary};
