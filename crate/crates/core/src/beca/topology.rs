//! Column layout of an architecture instance.
//!
//! A motivational column turns one internal deficit plus the stimuli that
//! satisfy it into a congruence signal. A behavioural column ends in one
//! external behaviour; it reads the persistence of its key channel and the
//! consummatory preferents of the motivational columns feeding it.

use serde::{Deserialize, Serialize};

use super::channel::{Behaviour, Channel, StimulusKind};

/// Internal variable read by a motivational column's interoceptor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum Deficit {
    Hunger,
    Thirst,
    Fatigue,
    /// `1 - safety`.
    SafetyDeficit,
}

/// Deficit readings handed to the interoceptors, each in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize, schemars::JsonSchema)]
pub struct Interoception {
    pub hunger: f64,
    pub thirst: f64,
    pub fatigue: f64,
    pub safety: f64,
}

impl Interoception {
    pub fn read(&self, deficit: Deficit) -> f64 {
        match deficit {
            Deficit::Hunger => self.hunger,
            Deficit::Thirst => self.thirst,
            Deficit::Fatigue => self.fatigue,
            Deficit::SafetyDeficit => 1.0 - self.safety,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct MotivationalColumn {
    /// Channel naming the column on the motivational levels.
    pub head: Behaviour,
    pub deficit: Deficit,
    /// Stimuli that unconditionally feed the column.
    pub unconditioned: Vec<StimulusKind>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct BehaviouralColumn {
    pub behaviour: Behaviour,
    /// Perceptual channel gating the column; `None` for columns that fire
    /// without a stimulus (explore).
    pub key: Option<Channel>,
    /// Motivational heads feeding the attention stage.
    pub motivations: Vec<Behaviour>,
    /// When set, neutral stimuli conditioned to the column's motivation
    /// also act as keys.
    pub conditionable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct Topology {
    /// Channels of both External Perceptions levels and of Perceptual
    /// Persistents.
    pub perceptual: Vec<Channel>,
    pub motivational: Vec<MotivationalColumn>,
    /// Behavioural columns in registry order. Wander is the implicit
    /// fallback and has no column.
    pub columns: Vec<BehaviouralColumn>,
    /// Neutral stimuli with learnable couplings into every motivational
    /// column.
    pub neutral: Vec<StimulusKind>,
}

impl Topology {
    pub fn prey() -> Self {
        Self::build(
            StimulusKind::Food,
            Behaviour::ApproachFood,
            Behaviour::Eat,
            Some(StimulusKind::Predator),
        )
    }

    pub fn predator() -> Self {
        Self::build(
            StimulusKind::Prey,
            Behaviour::ApproachPrey,
            Behaviour::EatPrey,
            None,
        )
    }

    fn build(
        food: StimulusKind,
        approach_food: Behaviour,
        eat: Behaviour,
        threat: Option<StimulusKind>,
    ) -> Self {
        let mut perceptual: Vec<Channel> = StimulusKind::ALL
            .iter()
            .map(|&k| Channel::Stimulus(k))
            .collect();
        for k in [food, StimulusKind::Water, StimulusKind::Grass] {
            perceptual.push(Channel::Contact(k));
        }

        let mut motivational = vec![
            MotivationalColumn {
                head: eat,
                deficit: Deficit::Hunger,
                unconditioned: vec![food],
            },
            MotivationalColumn {
                head: Behaviour::Drink,
                deficit: Deficit::Thirst,
                unconditioned: vec![StimulusKind::Water],
            },
            MotivationalColumn {
                head: Behaviour::Rest,
                deficit: Deficit::Fatigue,
                unconditioned: vec![StimulusKind::Grass],
            },
        ];
        if let Some(threat) = threat {
            motivational.push(MotivationalColumn {
                head: Behaviour::Runaway,
                deficit: Deficit::SafetyDeficit,
                unconditioned: vec![threat],
            });
        }

        let heads: Vec<Behaviour> = motivational.iter().map(|m| m.head).collect();
        let mut columns = vec![BehaviouralColumn {
            behaviour: Behaviour::Explore,
            key: None,
            motivations: heads,
            conditionable: false,
        }];
        let pairs = [
            (approach_food, eat, food, eat),
            (
                Behaviour::ApproachWater,
                Behaviour::Drink,
                StimulusKind::Water,
                Behaviour::Drink,
            ),
            (
                Behaviour::ApproachGrass,
                Behaviour::Rest,
                StimulusKind::Grass,
                Behaviour::Rest,
            ),
        ];
        for (approach, consume, kind, head) in pairs {
            columns.push(BehaviouralColumn {
                behaviour: approach,
                key: Some(Channel::Stimulus(kind)),
                motivations: vec![head],
                conditionable: true,
            });
            columns.push(BehaviouralColumn {
                behaviour: consume,
                key: Some(Channel::Contact(kind)),
                motivations: vec![head],
                conditionable: false,
            });
        }
        if let Some(threat) = threat {
            columns.push(BehaviouralColumn {
                behaviour: Behaviour::Runaway,
                key: Some(Channel::Stimulus(threat)),
                motivations: vec![Behaviour::Runaway],
                conditionable: true,
            });
        }
        columns.sort_by_key(|c| c.behaviour);

        Self {
            perceptual,
            motivational,
            columns,
            neutral: vec![StimulusKind::Blob, StimulusKind::Red, StimulusKind::Yellow],
        }
    }

    pub fn knows_perceptual(&self, channel: Channel) -> bool {
        self.perceptual.contains(&channel)
    }

    pub fn motivation(&self, head: Behaviour) -> Option<&MotivationalColumn> {
        self.motivational.iter().find(|m| m.head == head)
    }

    pub fn column(&self, behaviour: Behaviour) -> Option<&BehaviouralColumn> {
        self.columns.iter().find(|c| c.behaviour == behaviour)
    }

    /// The column whose key is `channel`, used for attention feedback
    /// into perceptual persistence.
    pub fn column_keyed_on(&self, channel: Channel) -> Option<&BehaviouralColumn> {
        self.columns.iter().find(|c| c.key == Some(channel))
    }

    /// External behaviours this instance can select (wander included).
    pub fn behaviours(&self) -> Vec<Behaviour> {
        let mut out = vec![Behaviour::Wander];
        out.extend(self.columns.iter().map(|c| c.behaviour));
        out
    }
}
