use bvl_core::animat::{
    deficit_colour, Animat, AnimatId, AnimatKind, InternalMedium, Pose, TrailMode,
};
use bvl_core::beca::{Behaviour, StimulusKind};
use bvl_core::world::{BlackboardDump, Frame, Simulation, Stimulus};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentSummary {
    pub frame: Frame,
    pub stimuli: Vec<Stimulus>,
    pub census: Vec<(StimulusKind, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnimatSnapshot {
    pub id: AnimatId,
    pub name: String,
    pub kind: AnimatKind,
    pub immortal: bool,
    pub pose: Pose,
    pub perception_radius: f64,
    pub medium: InternalMedium,
    pub behaviour: Behaviour,
    pub selected: Behaviour,
    pub intensity: f64,
    pub trail: TrailMode,
    /// `[red, green, blue]` for the deficit trail mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trail_colour: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blackboard: Option<BlackboardDump>,
}

impl AnimatSnapshot {
    pub fn of(a: &Animat, with_blackboard: bool) -> Self {
        Self {
            id: a.id,
            name: a.config.name.clone(),
            kind: a.config.kind,
            immortal: a.config.immortal,
            pose: a.pose,
            perception_radius: a.perception_radius(),
            medium: a.medium,
            behaviour: a.executed,
            selected: a.selected.behaviour,
            intensity: a.selected.intensity,
            trail: a.trail,
            trail_colour: (a.trail == TrailMode::Deficit).then(|| deficit_colour(&a.medium)),
            blackboard: with_blackboard.then(|| BlackboardDump::of(a)),
        }
    }
}

/// Immutable view of the simulation between two ticks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub tick: u64,
    pub paused: bool,
    pub delay_ms: u64,
    pub environment: EnvironmentSummary,
    pub animats: Vec<AnimatSnapshot>,
}

impl Snapshot {
    pub fn of(sim: &Simulation, paused: bool, with_blackboard: bool) -> Self {
        Self {
            tick: sim.tick,
            paused,
            delay_ms: sim.delay_ms,
            environment: EnvironmentSummary {
                frame: sim.environment.frame,
                stimuli: sim.environment.stimuli.clone(),
                census: sim.environment.census(),
            },
            animats: sim
                .animats
                .iter()
                .map(|a| AnimatSnapshot::of(a, with_blackboard))
                .collect(),
        }
    }
}
