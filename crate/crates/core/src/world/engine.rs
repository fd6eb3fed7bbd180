use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::environment::{Environment, StimulusId};
use super::rng::RngStream;
use super::trace::{BlackboardDump, TraceOptions, TraceRecord};
use super::WorldError;
use crate::animat::motor::MotorInput;
use crate::animat::perception::{self, SourceId};
use crate::animat::{
    tick_internal_medium, Animat, AnimatConfig, AnimatId, AnimatKind, Intake, InternalMedium,
    MediumTick, Need, Pose,
};
use crate::beca::{BecaParameters, Behaviour, ParamName};

/// Amount of hunger a predator loses by eating a prey.
pub const PREDATION_RELIEF: f64 = 0.5;

/// The whole simulated world: environment, animats in id order, and the
/// world random stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct Simulation {
    pub tick: u64,
    /// Master seed; animat streams are derived from it by name.
    pub seed: u64,
    pub environment: Environment,
    pub animats: Vec<Animat>,
    pub rng: RngStream,
    /// Pacing hint for live clients. Never affects state.
    #[serde(default)]
    pub delay_ms: u64,
}

#[derive(Debug, Clone)]
pub struct TickOutcome {
    pub records: Vec<TraceRecord>,
    pub removed: Vec<Animat>,
    pub depleted: Vec<StimulusId>,
}

/// A settable parameter: one of the seven modulation parameters or the
/// decay of remembered stimuli.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParameterTarget {
    Beca(ParamName),
    PerceptionDecay,
}

impl FromStr for ParameterTarget {
    type Err = WorldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "n" {
            return Ok(ParameterTarget::PerceptionDecay);
        }
        s.parse()
            .map(ParameterTarget::Beca)
            .map_err(|_| WorldError::UnknownParameter(s.to_string()))
    }
}

impl Simulation {
    pub fn new(environment: Environment, seed: u64) -> Self {
        Self {
            tick: 0,
            seed,
            environment,
            animats: Vec::new(),
            rng: RngStream::named(seed, "world"),
            delay_ms: 0,
        }
    }

    pub fn animat(&self, id: AnimatId) -> Option<&Animat> {
        self.animats.iter().find(|a| a.id == id)
    }

    pub fn animat_mut(&mut self, id: AnimatId) -> Result<&mut Animat, WorldError> {
        self.animats
            .iter_mut()
            .find(|a| a.id == id)
            .ok_or(WorldError::UnknownAnimat(id))
    }

    pub fn next_animat_id(&self) -> AnimatId {
        AnimatId(self.animats.iter().map(|a| a.id.0 + 1).max().unwrap_or(1))
    }

    /// Creates an animat with a stream derived from the master seed.
    pub fn create_animat(
        &mut self,
        id: Option<AnimatId>,
        config: AnimatConfig,
        pose: Pose,
        medium: InternalMedium,
        params: BecaParameters,
    ) -> Result<AnimatId, WorldError> {
        let id = id.unwrap_or_else(|| self.next_animat_id());
        let animat = Animat::new(id, config, pose, medium, params, self.seed);
        self.insert_animat(animat)?;
        Ok(id)
    }

    /// Inserts an existing animat, keeping id order.
    pub fn insert_animat(&mut self, animat: Animat) -> Result<(), WorldError> {
        animat
            .config
            .validate()
            .map_err(WorldError::InvalidConfig)?;
        if self.animat(animat.id).is_some() {
            return Err(WorldError::DuplicateAnimat(animat.id));
        }
        let p = animat.pose.position();
        if !self
            .environment
            .frame
            .contains_disc(p, animat.config.body_radius)
        {
            return Err(WorldError::OutsideFrame { z: p.z, x: p.x });
        }
        let at = self.animats.partition_point(|a| a.id < animat.id);
        self.animats.insert(at, animat);
        Ok(())
    }

    pub fn remove_animat(&mut self, id: AnimatId) -> Result<Animat, WorldError> {
        let idx = self
            .animats
            .iter()
            .position(|a| a.id == id)
            .ok_or(WorldError::UnknownAnimat(id))?;
        Ok(self.animats.remove(idx))
    }

    pub fn set_parameter(
        &mut self,
        id: AnimatId,
        name: &str,
        value: f64,
    ) -> Result<(), WorldError> {
        let target: ParameterTarget = name.parse()?;
        let animat = self.animat_mut(id)?;
        match target {
            ParameterTarget::Beca(p) => animat.beca.params.set(p, value)?,
            ParameterTarget::PerceptionDecay => {
                if !(0.0..=1.0).contains(&value) {
                    return Err(WorldError::ValueOutOfRange {
                        name: name.to_string(),
                        value,
                    });
                }
                animat.config.perception_decay_n = value;
            }
        }
        Ok(())
    }

    pub fn tick(&mut self, opts: &TraceOptions) -> Vec<TraceRecord> {
        self.step(opts).records
    }

    /// Advances one tick, also returning the animats that died in it.
    pub fn step(&mut self, opts: &TraceOptions) -> TickOutcome {
        let env_snapshot = self.environment.clone();
        let views: Vec<_> = self.animats.iter().map(Animat::view).collect();
        let alive_at_start: Vec<AnimatId> = self.animats.iter().map(|a| a.id).collect();

        // Perception, action selection and motion, all against the
        // start-of-tick snapshot.
        for a in &mut self.animats {
            let others: Vec<_> = views.iter().filter(|v| v.id != a.id).copied().collect();
            let seen = perception::perceive(
                &env_snapshot,
                &others,
                &a.pose,
                a.perception_radius(),
                a.config.body_radius,
            );
            let mut remembered =
                perception::update_remembered(&a.scenario, &seen, a.config.perception_decay_n);
            remembered.retain(|p| source_exists(&env_snapshot, &views, p.source));
            a.scenario = seen;
            a.scenario.extend(remembered);

            let contacts = perception::touching(
                &env_snapshot,
                &others,
                a.pose.position(),
                a.config.body_radius,
                a.config.contact_radius,
            );
            let extero: Vec<_> = perception::exteroception(&a.scenario, &contacts)
                .into_iter()
                .filter(|(c, _)| a.beca.topology.knows_perceptual(*c))
                .collect();
            let selected = a
                .beca
                .cycle(&extero, &a.medium.interoception())
                .expect("exteroception is filtered to known channels and bounded");
            a.selected = selected;

            let input = MotorInput {
                env: &env_snapshot,
                body_radius: a.config.body_radius,
                contact_radius: a.config.contact_radius,
                step: a.step_size(),
                goal: a.goal(selected.behaviour),
            };
            let (pose, executed) = a
                .motor
                .drive(selected.behaviour, &a.pose, &input, &mut a.rng);
            a.pose = pose;
            a.executed = executed;
        }

        // Consumption and physiology, serially in id order against the
        // live environment.
        let mut dead: Vec<AnimatId> = Vec::new();
        for a in &mut self.animats {
            let intake = consume(&mut self.environment, a);
            match tick_internal_medium(&a.medium, &a.config.rates, intake, a.config.immortal) {
                MediumTick::Alive(m) => a.medium = m,
                MediumTick::Dead(m) => {
                    a.medium = m;
                    dead.push(a.id);
                }
            }
        }

        // Predation.
        let predators: Vec<AnimatId> = self
            .animats
            .iter()
            .filter(|a| a.config.kind == AnimatKind::Predator && a.executed == Behaviour::EatPrey)
            .map(|a| a.id)
            .collect();
        for pid in predators {
            if dead.contains(&pid) {
                continue;
            }
            let pred = self.animat(pid).expect("predator exists");
            let reach = pred.config.body_radius + pred.config.contact_radius;
            let here = pred.pose.position();
            let victim = self
                .animats
                .iter()
                .filter(|p| {
                    p.config.kind == AnimatKind::Prey
                        && !p.config.immortal
                        && !dead.contains(&p.id)
                        && here.distance(p.pose.position()) <= reach + p.config.body_radius
                })
                .min_by(|a, b| {
                    here.distance(a.pose.position())
                        .total_cmp(&here.distance(b.pose.position()))
                        .then(a.id.cmp(&b.id))
                })
                .map(|p| p.id);
            if let Some(v) = victim {
                dead.push(v);
                let pred = self.animat_mut(pid).expect("predator exists");
                pred.medium.hunger = (pred.medium.hunger - PREDATION_RELIEF).max(0.0);
                pred.medium.refresh_derived();
            }
        }

        let records: Vec<TraceRecord> = self
            .animats
            .iter()
            .filter(|a| alive_at_start.contains(&a.id))
            .map(|a| TraceRecord {
                tick: self.tick,
                animat: a.id,
                pose: a.pose,
                behaviour: a.executed,
                selected: a.selected.behaviour,
                intensity: a.selected.intensity,
                medium: a.medium,
                alive: !dead.contains(&a.id),
                blackboard: opts.dump_blackboard.then(|| BlackboardDump::of(a)),
            })
            .collect();

        let (removed, kept) = std::mem::take(&mut self.animats)
            .into_iter()
            .partition(|a| dead.contains(&a.id));
        self.animats = kept;
        let depleted = self.environment.remove_depleted();
        self.tick += 1;
        TickOutcome {
            records,
            removed,
            depleted,
        }
    }
}

fn source_exists(env: &Environment, views: &[crate::animat::AnimatView], source: SourceId) -> bool {
    match source {
        SourceId::Stimulus(id) => env.stimulus(id).is_some(),
        SourceId::Animat(id) => views.iter().any(|v| v.id == id),
    }
}

/// Takes this tick's intake for a consummatory behaviour from the nearest
/// touched stimulus of the right kind.
fn consume(env: &mut Environment, a: &Animat) -> Option<Intake> {
    let (kind, need) = match a.executed {
        Behaviour::Eat => (crate::beca::StimulusKind::Food, Need::Hunger),
        Behaviour::Drink => (crate::beca::StimulusKind::Water, Need::Thirst),
        Behaviour::Rest => (crate::beca::StimulusKind::Grass, Need::Fatigue),
        _ => return None,
    };
    let here = a.pose.position();
    let reach = a.config.body_radius + a.config.contact_radius;
    let target: Option<StimulusId> = env
        .stimuli
        .iter()
        .filter(|s| {
            s.kind == kind
                && s.magnitude > 0.0
                && here.distance(s.position) <= reach + s.footprint.reach()
        })
        .min_by(|x, y| {
            here.distance(x.position)
                .total_cmp(&here.distance(y.position))
                .then(x.id.cmp(&y.id))
        })
        .map(|s| s.id);
    let s = env.stimulus_mut(target?)?;
    let amount = a.config.rates.consumption.min(s.magnitude);
    s.magnitude -= amount;
    if s.magnitude < 0.0 {
        s.magnitude = 0.0;
    }
    (amount > 0.0).then_some(Intake { need, amount })
}

/// Functional form of [`Simulation::tick`].
pub fn simulation_tick(sim: &Simulation, opts: &TraceOptions) -> (Simulation, Vec<TraceRecord>) {
    let mut next = sim.clone();
    let records = next.tick(opts);
    (next, records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beca::StimulusKind;
    use crate::geometry::Point;
    use crate::world::environment::{Footprint, Frame};

    #[test]
    fn empty_world_ticks() {
        let mut sim = Simulation::new(Environment::new(Frame::default()), 1);
        assert!(sim.tick(&TraceOptions::default()).is_empty());
        assert_eq!(sim.tick, 1);
    }

    #[test]
    fn parameter_names() {
        assert_eq!(
            "n".parse::<ParameterTarget>().unwrap(),
            ParameterTarget::PerceptionDecay
        );
        assert_eq!(
            "phi".parse::<ParameterTarget>().unwrap(),
            ParameterTarget::Beca(ParamName::Phi)
        );
        assert!("omega".parse::<ParameterTarget>().is_err());
    }

    #[test]
    fn set_parameter_rejects_out_of_range() {
        let mut sim = Simulation::new(Environment::new(Frame::default()), 1);
        let id = sim
            .create_animat(
                None,
                AnimatConfig::default(),
                Pose::new(50.0, 50.0, 0.0),
                InternalMedium::default(),
                BecaParameters::default(),
            )
            .unwrap();
        let before = sim.clone();
        assert!(sim.set_parameter(id, "phi", 1.5).is_err());
        assert!(sim.set_parameter(id, "n", -0.1).is_err());
        assert_eq!(sim, before);
        sim.set_parameter(id, "phi", 0.0).unwrap();
        assert_eq!(sim.animat(id).unwrap().beca.params.phi(), 0.0);
    }

    #[test]
    fn immortal_prey_survives_predator() {
        let mut env = Environment::new(Frame::default());
        env.insert(
            StimulusKind::Grass,
            Point::new(10.0, 10.0),
            1.0,
            Footprint::default_for(StimulusKind::Grass),
        )
        .unwrap();
        let mut sim = Simulation::new(env, 3);
        let pred = AnimatConfig {
            kind: AnimatKind::Predator,
            ..AnimatConfig::default()
        };
        let prey = AnimatConfig {
            immortal: true,
            ..AnimatConfig::default()
        };
        let hungry = InternalMedium::new(0.9, 0.0, 0.0, 1.0);
        sim.create_animat(
            Some(AnimatId(1)),
            pred,
            Pose::new(50.0, 50.0, 0.0),
            hungry,
            BecaParameters::default(),
        )
        .unwrap();
        sim.create_animat(
            Some(AnimatId(2)),
            prey,
            Pose::new(51.5, 50.0, 0.0),
            InternalMedium::default(),
            BecaParameters::default(),
        )
        .unwrap();
        let mut ate = false;
        for _ in 0..50 {
            let recs = sim.tick(&TraceOptions::default());
            ate |= recs.iter().any(|r| r.behaviour == Behaviour::EatPrey);
            assert!(recs.iter().all(|r| r.alive));
        }
        assert!(ate);
        assert_eq!(sim.animats.len(), 2);
    }
}
