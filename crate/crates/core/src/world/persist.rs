//! Version-tagged JSON documents for animats, environments and simulations.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::engine::Simulation;
use super::environment::Environment;
use super::WorldError;
use crate::animat::Animat;

pub const ANIMAT_FORMAT: &str = "animat.v1";
pub const ENVIRONMENT_FORMAT: &str = "environment.v1";
pub const SIMULATION_FORMAT: &str = "simulation.v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(tag = "format")]
pub enum Document {
    #[serde(rename = "animat.v1")]
    Animat(Box<Animat>),
    #[serde(rename = "environment.v1")]
    Environment(Environment),
    #[serde(rename = "simulation.v1")]
    Simulation(Box<Simulation>),
}

impl Document {
    pub fn format(&self) -> &'static str {
        match self {
            Document::Animat(_) => ANIMAT_FORMAT,
            Document::Environment(_) => ENVIRONMENT_FORMAT,
            Document::Simulation(_) => SIMULATION_FORMAT,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    /// Parses a document, reporting an unknown `format` tag before any
    /// field-level error.
    pub fn from_json(text: &str) -> Result<Self, WorldError> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let found = value
            .get("format")
            .and_then(|f| f.as_str())
            .unwrap_or("")
            .to_string();
        if ![ANIMAT_FORMAT, ENVIRONMENT_FORMAT, SIMULATION_FORMAT].contains(&found.as_str()) {
            return Err(WorldError::UnknownFormat { found });
        }
        let doc: Document = serde_json::from_value(value)?;
        if let Document::Simulation(sim) = &doc {
            if sim.animats.windows(2).any(|w| w[0].id >= w[1].id) {
                return Err(WorldError::Scenario(
                    "simulation animats must be in strictly increasing id order".into(),
                ));
            }
        }
        Ok(doc)
    }

    pub fn save(&self, path: &Path) -> Result<(), WorldError> {
        fs::write(path, self.to_json() + "\n").map_err(|source| WorldError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self, WorldError> {
        let text = fs::read_to_string(path).map_err(|source| WorldError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn into_simulation(self) -> Result<Simulation, WorldError> {
        match self {
            Document::Simulation(s) => Ok(*s),
            other => Err(WorldError::WrongDocument {
                expected: SIMULATION_FORMAT.into(),
                found: other.format().into(),
            }),
        }
    }

    pub fn into_animat(self) -> Result<Animat, WorldError> {
        match self {
            Document::Animat(a) => Ok(*a),
            other => Err(WorldError::WrongDocument {
                expected: ANIMAT_FORMAT.into(),
                found: other.format().into(),
            }),
        }
    }

    pub fn into_environment(self) -> Result<Environment, WorldError> {
        match self {
            Document::Environment(e) => Ok(e),
            other => Err(WorldError::WrongDocument {
                expected: ENVIRONMENT_FORMAT.into(),
                found: other.format().into(),
            }),
        }
    }
}
