//! Environment, tick engine, persistence and scenarios.

pub mod engine;
pub mod environment;
pub mod persist;
pub mod rng;
pub mod scenario;
pub mod schema;
pub mod trace;

use std::path::PathBuf;

use crate::animat::AnimatId;
use crate::beca::{BecaError, StimulusKind};

pub use engine::{simulation_tick, ParameterTarget, Simulation, TickOutcome};
pub use environment::{Environment, Footprint, Frame, Placement, Stimulus, StimulusId};
pub use persist::Document;
pub use rng::RngStream;
pub use trace::{BlackboardDump, TraceOptions, TraceRecord};

#[derive(Debug, thiserror::Error)]
pub enum WorldError {
    #[error("position ({z}, {x}) lies outside the frame")]
    OutsideFrame { z: f64, x: f64 },
    #[error("invalid magnitude {0}")]
    InvalidMagnitude(f64),
    #[error("{0} stimuli are animats and cannot be placed")]
    NotPlaceable(StimulusKind),
    #[error("no stimulus with id {}", .0 .0)]
    UnknownStimulus(StimulusId),
    #[error("no animat with id {0}")]
    UnknownAnimat(AnimatId),
    #[error("animat id {0} is already in use")]
    DuplicateAnimat(AnimatId),
    #[error("invalid animat configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("value {value} for `{name}` is outside [0, 1]")]
    ValueOutOfRange { name: String, value: f64 },
    #[error("unsupported document format `{found}`")]
    UnknownFormat { found: String },
    #[error("expected a `{expected}` document, found `{found}`")]
    WrongDocument { expected: String, found: String },
    #[error("malformed document: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error(transparent)]
    Beca(#[from] BecaError),
}
