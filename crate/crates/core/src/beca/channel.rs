//! Channel identifiers shared by both blackboard nodes.
//!
//! A channel names what a signal is about: a stimulus kind seen by the
//! exteroceptors, a touch (contact) affordance for a stimulus kind, or an
//! external behaviour (the head of a behavioural column).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::BecaError;

/// Kinds of external stimuli an animat can perceive.
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
pub enum StimulusKind {
    Food,
    Water,
    Grass,
    Obstacle,
    Blob,
    Red,
    Yellow,
    Predator,
    Prey,
}

impl StimulusKind {
    pub const ALL: [StimulusKind; 9] = [
        StimulusKind::Food,
        StimulusKind::Water,
        StimulusKind::Grass,
        StimulusKind::Obstacle,
        StimulusKind::Blob,
        StimulusKind::Red,
        StimulusKind::Yellow,
        StimulusKind::Predator,
        StimulusKind::Prey,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StimulusKind::Food => "food",
            StimulusKind::Water => "water",
            StimulusKind::Grass => "grass",
            StimulusKind::Obstacle => "obstacle",
            StimulusKind::Blob => "blob",
            StimulusKind::Red => "red",
            StimulusKind::Yellow => "yellow",
            StimulusKind::Predator => "predator",
            StimulusKind::Prey => "prey",
        }
    }

    /// Stimuli with no built-in meaning; candidates for conditioning.
    pub fn is_neutral(self) -> bool {
        matches!(
            self,
            StimulusKind::Red | StimulusKind::Yellow | StimulusKind::Blob
        )
    }

    /// Stimuli whose magnitude is depleted by a consummatory behaviour.
    pub fn is_consumable(self) -> bool {
        matches!(
            self,
            StimulusKind::Food | StimulusKind::Water | StimulusKind::Grass
        )
    }
}

impl fmt::Display for StimulusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StimulusKind {
    type Err = BecaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StimulusKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| BecaError::UnknownName(s.to_string()))
    }
}

/// External behaviours, in registry order. Registry order is the
/// tie-break order of action selection.
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
pub enum Behaviour {
    Wander,
    Explore,
    ApproachFood,
    Eat,
    ApproachWater,
    Drink,
    ApproachGrass,
    Rest,
    Runaway,
    ApproachPrey,
    EatPrey,
    /// Motor reflex; never selected by the blackboard.
    AvoidObstacle,
}

impl Behaviour {
    pub const ALL: [Behaviour; 12] = [
        Behaviour::Wander,
        Behaviour::Explore,
        Behaviour::ApproachFood,
        Behaviour::Eat,
        Behaviour::ApproachWater,
        Behaviour::Drink,
        Behaviour::ApproachGrass,
        Behaviour::Rest,
        Behaviour::Runaway,
        Behaviour::ApproachPrey,
        Behaviour::EatPrey,
        Behaviour::AvoidObstacle,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Behaviour::Wander => "wander",
            Behaviour::Explore => "explore",
            Behaviour::ApproachFood => "approach-food",
            Behaviour::Eat => "eat",
            Behaviour::ApproachWater => "approach-water",
            Behaviour::Drink => "drink",
            Behaviour::ApproachGrass => "approach-grass",
            Behaviour::Rest => "rest",
            Behaviour::Runaway => "runaway",
            Behaviour::ApproachPrey => "approach-prey",
            Behaviour::EatPrey => "eat-prey",
            Behaviour::AvoidObstacle => "avoid-obstacle",
        }
    }

    /// Behaviours that satisfy a deficit on contact.
    pub fn is_consummatory(self) -> bool {
        matches!(
            self,
            Behaviour::Eat | Behaviour::Drink | Behaviour::Rest | Behaviour::EatPrey
        )
    }
}

impl fmt::Display for Behaviour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Behaviour {
    type Err = BecaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Behaviour::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| BecaError::UnknownName(s.to_string()))
    }
}

/// Index of a signal on a blackboard level.
///
/// Text form: `food`, `contact:food`, `runaway`.
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
#[serde(into = "String", try_from = "String")]
pub enum Channel {
    Stimulus(StimulusKind),
    Contact(StimulusKind),
    Behaviour(Behaviour),
}

impl Channel {
    pub fn is_perceptual(self) -> bool {
        !matches!(self, Channel::Behaviour(_))
    }
}

impl From<StimulusKind> for Channel {
    fn from(kind: StimulusKind) -> Self {
        Channel::Stimulus(kind)
    }
}

impl From<Behaviour> for Channel {
    fn from(b: Behaviour) -> Self {
        Channel::Behaviour(b)
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Channel::Stimulus(k) => write!(f, "{k}"),
            Channel::Contact(k) => write!(f, "contact:{k}"),
            Channel::Behaviour(b) => write!(f, "{b}"),
        }
    }
}

impl FromStr for Channel {
    type Err = BecaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(rest) = s.strip_prefix("contact:") {
            return rest.parse().map(Channel::Contact);
        }
        if let Ok(kind) = s.parse() {
            return Ok(Channel::Stimulus(kind));
        }
        s.parse().map(Channel::Behaviour)
    }
}

impl From<Channel> for String {
    fn from(c: Channel) -> Self {
        c.to_string()
    }
}

impl TryFrom<String> for Channel {
    type Error = BecaError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}
