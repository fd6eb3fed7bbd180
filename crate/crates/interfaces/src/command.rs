use std::path::PathBuf;

use bvl_core::animat::{AnimatConfig, AnimatId, MediumVariable, Pose, TrailMode};
use bvl_core::beca::{BecaParameters, StimulusKind};
use bvl_core::geometry::Point;
use bvl_core::world::scenario::MediumSpec;
use bvl_core::world::{Footprint, StimulusId};
use serde::{Deserialize, Serialize};

/// What a save or load command operates on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Target {
    Simulation,
    Environment,
    Animat { animat: AnimatId },
}

/// Requests a live client can make. All of them apply between ticks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verb", rename_all = "snake_case")]
pub enum Command {
    Pause,
    Resume,
    Step {
        #[serde(default = "one")]
        n: u64,
    },
    SetDelay {
        ms: u64,
    },
    /// Random position and magnitude when omitted.
    AddStimulus {
        kind: StimulusKind,
        #[serde(default)]
        at: Option<Point>,
        #[serde(default)]
        magnitude: Option<f64>,
        #[serde(default)]
        footprint: Option<Footprint>,
    },
    RemoveStimulus {
        id: StimulusId,
    },
    CreateAnimat {
        #[serde(default)]
        id: Option<AnimatId>,
        #[serde(default)]
        config: Box<AnimatConfig>,
        pose: Pose,
        #[serde(default)]
        medium: MediumSpec,
        #[serde(default)]
        params: Option<BecaParameters>,
    },
    RemoveAnimat {
        animat: AnimatId,
    },
    /// `name` is one of alpha, beta, gamma, phi, kappa, lambda, mu or n.
    SetParameter {
        animat: AnimatId,
        name: String,
        value: f64,
    },
    SetInternal {
        animat: AnimatId,
        variable: MediumVariable,
        value: f64,
    },
    SetImmortal {
        animat: AnimatId,
        immortal: bool,
    },
    SetPose {
        animat: AnimatId,
        pose: Pose,
    },
    SetTrailMode {
        animat: AnimatId,
        mode: TrailMode,
    },
    Save {
        target: Target,
        path: PathBuf,
    },
    Load {
        target: Target,
        path: PathBuf,
    },
    Reset,
}

fn one() -> u64 {
    1
}

impl Command {
    pub fn verb(&self) -> &'static str {
        match self {
            Command::Pause => "pause",
            Command::Resume => "resume",
            Command::Step { .. } => "step",
            Command::SetDelay { .. } => "set_delay",
            Command::AddStimulus { .. } => "add_stimulus",
            Command::RemoveStimulus { .. } => "remove_stimulus",
            Command::CreateAnimat { .. } => "create_animat",
            Command::RemoveAnimat { .. } => "remove_animat",
            Command::SetParameter { .. } => "set_parameter",
            Command::SetInternal { .. } => "set_internal",
            Command::SetImmortal { .. } => "set_immortal",
            Command::SetPose { .. } => "set_pose",
            Command::SetTrailMode { .. } => "set_trail_mode",
            Command::Save { .. } => "save",
            Command::Load { .. } => "load",
            Command::Reset => "reset",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wire_form() {
        let c: Command =
            serde_json::from_str(r#"{"verb":"set_parameter","animat":1,"name":"phi","value":0.0}"#)
                .unwrap();
        assert_eq!(
            c,
            Command::SetParameter {
                animat: AnimatId(1),
                name: "phi".into(),
                value: 0.0
            }
        );
        let s: Command = serde_json::from_str(r#"{"verb":"step"}"#).unwrap();
        assert_eq!(s, Command::Step { n: 1 });
        let save = Command::Save {
            target: Target::Animat {
                animat: AnimatId(2),
            },
            path: "a.json".into(),
        };
        let text = serde_json::to_string(&save).unwrap();
        assert_eq!(serde_json::from_str::<Command>(&text).unwrap(), save);
    }
}
