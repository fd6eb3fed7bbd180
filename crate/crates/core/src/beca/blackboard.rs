use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::channel::{Behaviour, Channel};
use super::topology::Topology;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum Node {
    Cognitive,
    Motivational,
}

/// Blackboard levels. Each belongs to exactly one node.
#[derive(
    Debug,
    Clone,
    Copy,
    PartialEq,
    Eq,
    PartialOrd,
    Ord,
    Hash,
    Serialize,
    Deserialize,
    schemars::JsonSchema,
)]
#[serde(rename_all = "kebab-case")]
pub enum LevelId {
    CognitiveExternalPerceptions,
    PerceptualPersistents,
    DrivePerceptionCongruents,
    ExternalBehaviours,
    MotivationalExternalPerceptions,
    InternalPerceptions,
    Drive,
    InteroExteroDriveCongruents,
    ConsummatoryPreferents,
}

impl LevelId {
    pub const ALL: [LevelId; 9] = [
        LevelId::CognitiveExternalPerceptions,
        LevelId::PerceptualPersistents,
        LevelId::DrivePerceptionCongruents,
        LevelId::ExternalBehaviours,
        LevelId::MotivationalExternalPerceptions,
        LevelId::InternalPerceptions,
        LevelId::Drive,
        LevelId::InteroExteroDriveCongruents,
        LevelId::ConsummatoryPreferents,
    ];

    pub fn node(self) -> Node {
        match self {
            LevelId::CognitiveExternalPerceptions
            | LevelId::PerceptualPersistents
            | LevelId::DrivePerceptionCongruents
            | LevelId::ExternalBehaviours => Node::Cognitive,
            _ => Node::Motivational,
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            LevelId::CognitiveExternalPerceptions => "External Perceptions (cognitive)",
            LevelId::PerceptualPersistents => "Perceptual Persistents",
            LevelId::DrivePerceptionCongruents => "Drive/Perception Congruents",
            LevelId::ExternalBehaviours => "External Behaviours",
            LevelId::MotivationalExternalPerceptions => "External Perceptions (motivational)",
            LevelId::InternalPerceptions => "Internal Perceptions",
            LevelId::Drive => "Drive",
            LevelId::InteroExteroDriveCongruents => "Intero/Extero/Drive Congruents",
            LevelId::ConsummatoryPreferents => "Consummatory Preferents",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct Signal {
    pub channel: Channel,
    pub strength: f64,
}

fn clamp_unit(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 1.0)
    }
}

/// Signals of one level, keyed by channel. Writes clamp to `[0, 1]`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(transparent)]
pub struct Level(BTreeMap<Channel, f64>);

impl Level {
    pub fn with_channels(channels: impl IntoIterator<Item = Channel>) -> Self {
        Self(channels.into_iter().map(|c| (c, 0.0)).collect())
    }

    pub fn get(&self, channel: Channel) -> f64 {
        self.0.get(&channel).copied().unwrap_or(0.0)
    }

    pub fn contains(&self, channel: Channel) -> bool {
        self.0.contains_key(&channel)
    }

    /// Writes a clamped value. Returns false for channels not on the level.
    pub fn set(&mut self, channel: Channel, value: f64) -> bool {
        match self.0.get_mut(&channel) {
            Some(slot) => {
                *slot = clamp_unit(value);
                true
            }
            None => false,
        }
    }

    pub fn clear(&mut self) {
        self.0.values_mut().for_each(|v| *v = 0.0);
    }

    pub fn signals(&self) -> impl Iterator<Item = Signal> + '_ {
        self.0
            .iter()
            .map(|(&channel, &strength)| Signal { channel, strength })
    }

    pub fn channels(&self) -> impl Iterator<Item = Channel> + '_ {
        self.0.keys().copied()
    }
}

/// Both nodes of the architecture as one level-structured store.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct Blackboard {
    levels: BTreeMap<LevelId, Level>,
    /// Perceptual Persistents as they stood at the end of the previous cycle.
    persistents_prev: Level,
    /// Saturation ceiling `Max_i^T` per perceptual channel.
    max_t: Level,
    /// The gating condition of hyperbolic saturation, per perceptual channel.
    saturation_gate: BTreeMap<Channel, bool>,
    /// Current winner of the motivational competition.
    incumbent: Option<Behaviour>,
}

impl Blackboard {
    pub fn new(topology: &Topology) -> Self {
        let perceptual = || topology.perceptual.iter().copied();
        let columns = || {
            topology
                .columns
                .iter()
                .map(|c| Channel::Behaviour(c.behaviour))
        };
        let heads = || {
            topology
                .motivational
                .iter()
                .map(|m| Channel::Behaviour(m.head))
        };
        let mut levels = BTreeMap::new();
        for id in LevelId::ALL {
            let level = match id {
                LevelId::CognitiveExternalPerceptions
                | LevelId::PerceptualPersistents
                | LevelId::MotivationalExternalPerceptions => Level::with_channels(perceptual()),
                LevelId::DrivePerceptionCongruents | LevelId::ExternalBehaviours => {
                    Level::with_channels(columns())
                }
                LevelId::InternalPerceptions
                | LevelId::Drive
                | LevelId::InteroExteroDriveCongruents
                | LevelId::ConsummatoryPreferents => Level::with_channels(heads()),
            };
            levels.insert(id, level);
        }
        let mut max_t = Level::with_channels(perceptual());
        for c in perceptual() {
            max_t.set(c, 1.0);
        }
        Self {
            levels,
            persistents_prev: Level::with_channels(perceptual()),
            max_t,
            saturation_gate: perceptual().map(|c| (c, true)).collect(),
            incumbent: None,
        }
    }

    pub fn level(&self, id: LevelId) -> &Level {
        &self.levels[&id]
    }

    pub fn level_mut(&mut self, id: LevelId) -> &mut Level {
        self.levels.get_mut(&id).expect("every level exists")
    }

    pub fn levels(&self) -> impl Iterator<Item = (LevelId, &Level)> {
        self.levels.iter().map(|(&id, l)| (id, l))
    }

    pub fn get(&self, id: LevelId, channel: impl Into<Channel>) -> f64 {
        self.level(id).get(channel.into())
    }

    pub fn set(&mut self, id: LevelId, channel: impl Into<Channel>, value: f64) -> bool {
        self.level_mut(id).set(channel.into(), value)
    }

    pub fn persistents_prev(&self) -> &Level {
        &self.persistents_prev
    }

    pub(crate) fn snapshot_persistents(&mut self) {
        self.persistents_prev = self.level(LevelId::PerceptualPersistents).clone();
    }

    pub fn max_t(&self, channel: Channel) -> f64 {
        self.max_t.get(channel)
    }

    pub fn set_max_t(&mut self, channel: Channel, value: f64) -> bool {
        self.max_t.set(channel, value)
    }

    pub fn saturation_gate(&self, channel: Channel) -> bool {
        self.saturation_gate.get(&channel).copied().unwrap_or(false)
    }

    pub fn set_saturation_gate(&mut self, channel: Channel, engaged: bool) {
        if let Some(g) = self.saturation_gate.get_mut(&channel) {
            *g = engaged;
        }
    }

    pub fn incumbent(&self) -> Option<Behaviour> {
        self.incumbent
    }

    pub(crate) fn set_incumbent(&mut self, winner: Option<Behaviour>) {
        self.incumbent = winner;
    }

    /// True when every signal on every level lies in `[0, 1]`.
    pub fn is_bounded(&self) -> bool {
        self.levels
            .values()
            .chain(std::iter::once(&self.persistents_prev))
            .flat_map(|l| l.signals())
            .all(|s| (0.0..=1.0).contains(&s.strength))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beca::channel::StimulusKind;

    #[test]
    fn writes_clamp() {
        let mut bb = Blackboard::new(&Topology::prey());
        let food = Channel::Stimulus(StimulusKind::Food);
        bb.set(LevelId::PerceptualPersistents, food, 1.7);
        assert_eq!(bb.get(LevelId::PerceptualPersistents, food), 1.0);
        bb.set(LevelId::PerceptualPersistents, food, -0.2);
        assert_eq!(bb.get(LevelId::PerceptualPersistents, food), 0.0);
        bb.set(LevelId::PerceptualPersistents, food, f64::NAN);
        assert_eq!(bb.get(LevelId::PerceptualPersistents, food), 0.0);
        assert!(bb.is_bounded());
    }

    #[test]
    fn levels_hold_their_own_channels() {
        let bb = Blackboard::new(&Topology::prey());
        let runaway = Channel::Behaviour(Behaviour::Runaway);
        assert!(bb.level(LevelId::ConsummatoryPreferents).contains(runaway));
        assert!(bb.level(LevelId::ExternalBehaviours).contains(runaway));
        assert!(!bb
            .level(LevelId::ConsummatoryPreferents)
            .contains(Behaviour::Explore.into()));
        assert!(!bb.level(LevelId::PerceptualPersistents).contains(runaway));
        assert_eq!(LevelId::Drive.node(), Node::Motivational);
        assert_eq!(LevelId::ExternalBehaviours.node(), Node::Cognitive);
    }
}
