use serde::{Deserialize, Serialize};

use super::pose::{in_perceptual_region, Pose};
use super::AnimatId;
use crate::beca::{Channel, StimulusKind};
use crate::geometry::Point;
use crate::world::environment::{Environment, StimulusId};

/// What a perceived entry refers to.
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
pub enum SourceId {
    Stimulus(StimulusId),
    Animat(AnimatId),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct PerceivedStimulus {
    pub kind: StimulusKind,
    pub source: SourceId,
    pub position: Point,
    /// Pondered value: magnitude over distance while perceived, then
    /// decaying while remembered.
    pub fe: f64,
    pub remembered: bool,
}

/// Another animat as seen from outside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnimatView {
    pub id: AnimatId,
    pub kind: StimulusKind,
    pub position: Point,
    pub magnitude: f64,
    pub body_radius: f64,
}

/// Stimuli inside the perceptual region and not hidden behind an obstacle.
/// Distances below `distance_floor` count as `distance_floor`.
pub fn perceive(
    env: &Environment,
    others: &[AnimatView],
    pose: &Pose,
    r_p: f64,
    distance_floor: f64,
) -> Vec<PerceivedStimulus> {
    let here = pose.position();
    let fe = |magnitude: f64, at: Point| magnitude / here.distance(at).max(distance_floor);
    let mut out = Vec::new();
    for s in &env.stimuli {
        if in_perceptual_region(pose, r_p, s.position)
            && !env.occluded(here, s.position, Some(s.id))
        {
            out.push(PerceivedStimulus {
                kind: s.kind,
                source: SourceId::Stimulus(s.id),
                position: s.position,
                fe: fe(s.magnitude, s.position),
                remembered: false,
            });
        }
    }
    for a in others {
        if in_perceptual_region(pose, r_p, a.position) && !env.occluded(here, a.position, None) {
            out.push(PerceivedStimulus {
                kind: a.kind,
                source: SourceId::Animat(a.id),
                position: a.position,
                fe: fe(a.magnitude, a.position),
                remembered: false,
            });
        }
    }
    out
}

/// Carries stimuli that left the perceived scenario into memory. A
/// remembered value starts from the last pondered value capped at 1 and
/// loses `n` per tick; entries at or below zero are forgotten.
pub fn update_remembered(
    previous: &[PerceivedStimulus],
    perceived: &[PerceivedStimulus],
    n: f64,
) -> Vec<PerceivedStimulus> {
    previous
        .iter()
        .filter(|p| !perceived.iter().any(|q| q.source == p.source))
        .filter_map(|p| {
            let start = if p.remembered { p.fe } else { p.fe.min(1.0) };
            let fe = start - n;
            (fe > 0.0).then_some(PerceivedStimulus {
                fe,
                remembered: true,
                ..*p
            })
        })
        .collect()
}

/// Touch sense: consumables and animats whose footprint lies within
/// `contact_radius` of the body, regardless of heading or occlusion.
pub fn touching(
    env: &Environment,
    others: &[AnimatView],
    position: Point,
    body_radius: f64,
    contact_radius: f64,
) -> Vec<(StimulusKind, SourceId)> {
    let mut out = Vec::new();
    for s in &env.stimuli {
        if s.kind.is_consumable()
            && s.magnitude > 0.0
            && position.distance(s.position) <= body_radius + contact_radius + s.footprint.reach()
        {
            out.push((s.kind, SourceId::Stimulus(s.id)));
        }
    }
    for a in others {
        if position.distance(a.position) <= body_radius + contact_radius + a.body_radius {
            out.push((a.kind, SourceId::Animat(a.id)));
        }
    }
    out
}

/// Strengths for the exteroceptors: per kind, the strongest pondered value
/// capped at 1, plus a unit contact signal per touched kind.
pub fn exteroception(
    scenario: &[PerceivedStimulus],
    contacts: &[(StimulusKind, SourceId)],
) -> Vec<(Channel, f64)> {
    let mut out: Vec<(Channel, f64)> = Vec::new();
    for kind in StimulusKind::ALL {
        let best = scenario
            .iter()
            .filter(|p| p.kind == kind)
            .map(|p| p.fe.min(1.0))
            .fold(0.0, f64::max);
        if best > 0.0 {
            out.push((Channel::Stimulus(kind), best));
        }
    }
    for kind in StimulusKind::ALL {
        if contacts.iter().any(|&(k, _)| k == kind) {
            out.push((Channel::Contact(kind), 1.0));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::world::environment::{Footprint, Frame};
    use std::f64::consts::FRAC_PI_2;

    fn env_with_food() -> (Environment, StimulusId) {
        let mut env = Environment::new(Frame::default());
        let id = env
            .insert(
                StimulusKind::Food,
                Point::new(50.0, 52.0),
                1.0,
                Footprint::default_for(StimulusKind::Food),
            )
            .unwrap();
        (env, id)
    }

    #[test]
    fn empty_environment_perceives_nothing() {
        let env = Environment::new(Frame::default());
        let pose = Pose::new(50.0, 50.0, 0.0);
        assert!(perceive(&env, &[], &pose, 15.0, 0.5).is_empty());
    }

    #[test]
    fn pondered_value_is_ratio() {
        let (env, id) = env_with_food();
        let pose = Pose::new(50.0, 50.0, FRAC_PI_2);
        let seen = perceive(&env, &[], &pose, 15.0, 0.5);
        assert_eq!(seen.len(), 1);
        assert_eq!(seen[0].source, SourceId::Stimulus(id));
        assert!((seen[0].fe - 0.5).abs() < 1e-12);
    }

    #[test]
    fn obstacle_hides_food() {
        let (mut env, _) = env_with_food();
        env.insert(
            StimulusKind::Obstacle,
            Point::new(50.0, 51.0),
            1.0,
            Footprint::Rect {
                half_z: 1.0,
                half_x: 0.2,
            },
        )
        .unwrap();
        let pose = Pose::new(50.0, 50.0, FRAC_PI_2);
        let seen = perceive(&env, &[], &pose, 15.0, 0.5);
        assert!(seen.iter().all(|s| s.kind != StimulusKind::Food));
        // the obstacle itself is visible
        assert!(seen.iter().any(|s| s.kind == StimulusKind::Obstacle));
    }

    #[test]
    fn memory_decays_and_refreshes() {
        let entry = PerceivedStimulus {
            kind: StimulusKind::Red,
            source: SourceId::Stimulus(StimulusId(3)),
            position: Point::new(1.0, 1.0),
            fe: 0.5,
            remembered: false,
        };
        let mem = update_remembered(&[entry], &[], 0.1);
        assert!((mem[0].fe - 0.4).abs() < 1e-12);
        assert!(mem[0].remembered);
        assert!(update_remembered(&[entry], &[], 1.0).is_empty());
        let still = update_remembered(&mem, &[], 0.0);
        assert_eq!(still[0].fe, mem[0].fe);
        assert!(update_remembered(&mem, &[entry], 0.1).is_empty());
    }

    #[test]
    fn exteroception_takes_strongest_capped() {
        let mk = |fe, id| PerceivedStimulus {
            kind: StimulusKind::Water,
            source: SourceId::Stimulus(StimulusId(id)),
            position: Point::default(),
            fe,
            remembered: false,
        };
        let ext = exteroception(
            &[mk(0.3, 0), mk(2.5, 1)],
            &[(StimulusKind::Water, SourceId::Stimulus(StimulusId(1)))],
        );
        assert_eq!(
            ext,
            vec![
                (Channel::Stimulus(StimulusKind::Water), 1.0),
                (Channel::Contact(StimulusKind::Water), 1.0)
            ]
        );
    }
}
