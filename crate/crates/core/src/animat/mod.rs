//! The embodied agent: perception, internal medium, motor system and the
//! action-selection instance that links them.

pub mod medium;
pub mod motor;
pub mod perception;
pub mod pose;

use serde::{Deserialize, Serialize};

use crate::beca::{
    ActionSelection, BecaParameters, BecaState, Behaviour, Channel, StimulusKind, Topology,
};
use crate::geometry::Point;
use crate::world::rng::RngStream;

pub use medium::{
    tick_internal_medium, Intake, InternalMedium, MediumTick, MediumVariable, Need, PhysiologyRates,
};
pub use motor::MotorState;
pub use perception::{AnimatView, PerceivedStimulus, SourceId};
pub use pose::{in_perceptual_region, Pose};

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
    Default,
    schemars::JsonSchema,
)]
#[serde(transparent)]
pub struct AnimatId(pub u32);

impl std::fmt::Display for AnimatId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, schemars::JsonSchema,
)]
#[serde(rename_all = "lowercase")]
pub enum AnimatKind {
    Predator,
    #[default]
    Prey,
}

impl AnimatKind {
    /// How other animats perceive this one.
    pub fn as_stimulus(self) -> StimulusKind {
        match self {
            AnimatKind::Predator => StimulusKind::Predator,
            AnimatKind::Prey => StimulusKind::Prey,
        }
    }

    pub fn topology(self) -> Topology {
        match self {
            AnimatKind::Predator => Topology::predator(),
            AnimatKind::Prey => Topology::prey(),
        }
    }
}

/// Colouring of the trail drawn by a client.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, schemars::JsonSchema,
)]
#[serde(rename_all = "kebab-case")]
pub enum TrailMode {
    #[default]
    Off,
    Fixed,
    Animat,
    /// Fatigue, thirst and hunger mapped to the red, blue and green channels.
    Deficit,
}

/// Trail colour for the deficit mode as `[red, green, blue]` in `[0, 1]`.
pub fn deficit_colour(m: &InternalMedium) -> [f64; 3] {
    [m.fatigue, m.hunger, m.thirst]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(default)]
pub struct AnimatConfig {
    pub name: String,
    pub kind: AnimatKind,
    /// Perception radius at full lucidity.
    pub r_p_base: f64,
    pub immortal: bool,
    /// Largest pivot angle per step at full strength, radians.
    pub step_max: f64,
    pub body_radius: f64,
    pub contact_radius: f64,
    /// Loss of remembered pondered value per tick.
    pub perception_decay_n: f64,
    pub rates: PhysiologyRates,
    /// Magnitude other animats perceive this one with.
    pub magnitude: f64,
}

impl Default for AnimatConfig {
    fn default() -> Self {
        Self {
            name: "animat".to_string(),
            kind: AnimatKind::Prey,
            r_p_base: 15.0,
            immortal: false,
            step_max: 0.3,
            body_radius: 0.5,
            contact_radius: 1.0,
            perception_decay_n: 0.1,
            rates: PhysiologyRates::default(),
            magnitude: 5.0,
        }
    }
}

impl AnimatConfig {
    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("r_p_base", self.r_p_base),
            ("step_max", self.step_max),
            ("body_radius", self.body_radius),
            ("contact_radius", self.contact_radius),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(format!("{name} must be positive, got {v}"));
            }
        }
        if !(0.0..=1.0).contains(&self.perception_decay_n) {
            return Err(format!(
                "perception_decay_n must lie in [0, 1], got {}",
                self.perception_decay_n
            ));
        }
        let r = &self.rates;
        for (name, v) in [
            ("hunger rate", r.hunger),
            ("thirst rate", r.thirst),
            ("fatigue rate", r.fatigue),
            ("consumption rate", r.consumption),
            ("magnitude", self.magnitude),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(format!("{name} must be non-negative, got {v}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct Animat {
    pub id: AnimatId,
    pub config: AnimatConfig,
    pub pose: Pose,
    pub medium: InternalMedium,
    pub beca: BecaState,
    /// Perceived and remembered stimuli of the last tick.
    #[serde(default)]
    pub scenario: Vec<PerceivedStimulus>,
    #[serde(default)]
    pub motor: MotorState,
    #[serde(default)]
    pub trail: TrailMode,
    /// Output of the last action selection.
    pub selected: ActionSelection,
    /// Behaviour the motor system ran last tick.
    pub executed: Behaviour,
    pub rng: RngStream,
}

impl Animat {
    pub fn new(
        id: AnimatId,
        config: AnimatConfig,
        pose: Pose,
        medium: InternalMedium,
        params: BecaParameters,
        master_seed: u64,
    ) -> Self {
        let beca = BecaState::new(config.kind.topology(), params);
        Self {
            id,
            config,
            pose,
            medium,
            beca,
            scenario: Vec::new(),
            motor: MotorState::default(),
            trail: TrailMode::default(),
            selected: ActionSelection::wander(),
            executed: Behaviour::Wander,
            rng: RngStream::named(master_seed, &format!("animat-{}", id.0)),
        }
    }

    pub fn perception_radius(&self) -> f64 {
        self.config.r_p_base * self.medium.lucidity
    }

    pub fn step_size(&self) -> f64 {
        self.config.step_max * self.medium.strength
    }

    pub fn view(&self) -> AnimatView {
        AnimatView {
            id: self.id,
            kind: self.config.kind.as_stimulus(),
            position: self.pose.position(),
            magnitude: self.config.magnitude,
            body_radius: self.config.body_radius,
        }
    }

    /// The stimulus a moving behaviour is directed at: the strongest entry
    /// of the column's key kind, or of a neutral kind weighted by its
    /// learned coupling into the column's motivation.
    pub fn goal(&self, behaviour: Behaviour) -> Option<Point> {
        let column = self.beca.topology.column(behaviour)?;
        let Some(Channel::Stimulus(key)) = column.key else {
            return None;
        };
        let weight = |kind: StimulusKind| {
            if kind == key {
                1.0
            } else if column.conditionable && self.beca.topology.neutral.contains(&kind) {
                column
                    .motivations
                    .iter()
                    .map(|&h| self.beca.coupling.conditioned(kind, h))
                    .fold(0.0, f64::max)
            } else {
                0.0
            }
        };
        let mut best: Option<(f64, Point)> = None;
        for p in &self.scenario {
            let w = weight(p.kind) * p.fe.min(1.0);
            if w > 0.0 && best.is_none_or(|(bw, _)| w > bw) {
                best = Some((w, p.position));
            }
        }
        best.map(|(_, p)| p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beca::CouplingKey;
    use crate::world::environment::StimulusId;

    fn prey() -> Animat {
        Animat::new(
            AnimatId(1),
            AnimatConfig::default(),
            Pose::new(50.0, 50.0, 0.0),
            InternalMedium::default(),
            BecaParameters::default(),
            1,
        )
    }

    fn seen(kind: StimulusKind, id: u32, fe: f64, at: Point) -> PerceivedStimulus {
        PerceivedStimulus {
            kind,
            source: SourceId::Stimulus(StimulusId(id)),
            position: at,
            fe,
            remembered: false,
        }
    }

    #[test]
    fn proportional_radius_and_step() {
        let mut a = prey();
        a.medium = InternalMedium::new(0.6, 0.6, 0.0, 1.0);
        let r1 = a.perception_radius();
        a.medium = InternalMedium::new(0.2, 0.2, 0.0, 1.0);
        let r2 = a.perception_radius();
        assert!((r2 - 2.0 * r1).abs() < 1e-12);
        a.medium = InternalMedium::new(0.0, 0.0, 0.4, 1.0);
        assert!((a.step_size() - 0.6 * a.config.step_max).abs() < 1e-12);
    }

    #[test]
    fn goal_prefers_strongest_key() {
        let mut a = prey();
        a.scenario = vec![
            seen(StimulusKind::Water, 0, 0.3, Point::new(1.0, 1.0)),
            seen(StimulusKind::Water, 1, 0.6, Point::new(2.0, 2.0)),
            seen(StimulusKind::Food, 2, 0.9, Point::new(3.0, 3.0)),
        ];
        assert_eq!(a.goal(Behaviour::ApproachWater), Some(Point::new(2.0, 2.0)));
        assert_eq!(a.goal(Behaviour::Drink), None);
        assert_eq!(a.goal(Behaviour::Runaway), None);
    }

    #[test]
    fn conditioned_neutral_is_a_threat() {
        let mut a = prey();
        a.scenario = vec![seen(StimulusKind::Red, 0, 0.5, Point::new(4.0, 4.0))];
        assert_eq!(a.goal(Behaviour::Runaway), None);
        a.beca
            .coupling
            .set(
                CouplingKey::congruence_external(StimulusKind::Red, Behaviour::Runaway),
                0.95,
            )
            .unwrap();
        assert_eq!(a.goal(Behaviour::Runaway), Some(Point::new(4.0, 4.0)));
    }

    #[test]
    fn deficit_trail_is_pure_green_for_hunger() {
        let m = InternalMedium::new(1.0, 0.0, 0.0, 1.0);
        assert_eq!(deficit_colour(&m), [0.0, 1.0, 0.0]);
    }
}
