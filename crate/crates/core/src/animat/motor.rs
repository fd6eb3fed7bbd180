//! Motor system: differential-drive steps built from two pivots about the
//! extremes of the body diameter, plus the obstacle-avoidance reflex.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use super::pose::Pose;
use crate::beca::Behaviour;
use crate::geometry::{angle_diff, normalize_angle, Point};
use crate::world::environment::Environment;
use crate::world::rng::RngStream;

/// Ticks between random reorientations while wandering.
pub const WANDER_PERIOD: u32 = 20;
/// Ticks a heading is held while exploring.
pub const EXPLORE_PERIOD: u32 = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct Roam {
    pub mode: Behaviour,
    pub heading: f64,
    pub ticks: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize, schemars::JsonSchema)]
pub struct MotorState {
    /// Which pivot goes first; alternates every step so lateral drift
    /// cancels over pairs of steps.
    pub gait: bool,
    pub roam: Option<Roam>,
}

/// One step: pivot about the left extreme by `left_turn` (turning left),
/// and about the right extreme by `right_turn` (turning right). Both
/// angles are non-negative; the heading changes by `left_turn - right_turn`.
pub fn pivot_step(
    pose: &Pose,
    body_radius: f64,
    left_turn: f64,
    right_turn: f64,
    left_first: bool,
) -> Pose {
    let left_pivot = |p: &Pose, a: f64| {
        let pivot = p.position().offset(p.theta + FRAC_PI_2, body_radius);
        Pose::at(p.position().rotate_about(pivot, a), p.theta + a)
    };
    let right_pivot = |p: &Pose, a: f64| {
        let pivot = p.position().offset(p.theta - FRAC_PI_2, body_radius);
        Pose::at(p.position().rotate_about(pivot, -a), p.theta - a)
    };
    if left_first {
        right_pivot(&left_pivot(pose, left_turn), right_turn)
    } else {
        left_pivot(&right_pivot(pose, right_turn), left_turn)
    }
}

/// Step towards `target` heading with pivots bounded by `step`.
pub fn steer_step(pose: &Pose, target: f64, step: f64, body_radius: f64, left_first: bool) -> Pose {
    let e = angle_diff(target, pose.theta);
    let (left, right) = if e >= 0.0 {
        (step, (step - e).max(0.0))
    } else {
        ((step + e).max(0.0), step)
    };
    pivot_step(pose, body_radius, left, right, left_first)
}

pub fn turn_in_place(pose: &Pose, angle: f64) -> Pose {
    Pose::new(pose.z, pose.x, pose.theta + angle)
}

/// May a body of `body_radius` stand at `p`?
pub fn position_allowed(env: &Environment, p: Point, body_radius: f64) -> bool {
    env.frame.contains_disc(p, body_radius)
        && !env
            .obstacles()
            .any(|o| o.blocking_rect().inflate(body_radius).contains_strict(p))
}

fn probe_blocked(
    env: &Environment,
    from: Point,
    heading: f64,
    length: f64,
    body_radius: f64,
) -> bool {
    let tip = from.offset(heading, length);
    !env.frame.contains_disc(tip, body_radius)
        || env.obstacles().any(|o| {
            o.blocking_rect()
                .inflate(body_radius)
                .intersects_segment(from, tip)
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum TurnSide {
    Left,
    Right,
}

/// Fires when the frame or an obstacle lies within `2 * contact_radius` of
/// the body along the heading. Turns towards the free side, left by default.
pub fn reflex_avoid_obstacle(
    pose: &Pose,
    env: &Environment,
    body_radius: f64,
    contact_radius: f64,
) -> Option<TurnSide> {
    let here = pose.position();
    let length = body_radius + 2.0 * contact_radius;
    if !probe_blocked(env, here, pose.theta, length, body_radius) {
        return None;
    }
    let left_free = !probe_blocked(env, here, pose.theta + FRAC_PI_4, length, body_radius);
    let right_free = !probe_blocked(env, here, pose.theta - FRAC_PI_4, length, body_radius);
    Some(if !left_free && right_free {
        TurnSide::Right
    } else {
        TurnSide::Left
    })
}

/// Inputs of one motor step.
#[derive(Debug, Clone, Copy)]
pub struct MotorInput<'a> {
    pub env: &'a Environment,
    pub body_radius: f64,
    pub contact_radius: f64,
    /// Pivot bound for this tick: step_max scaled by strength.
    pub step: f64,
    /// Stimulus the behaviour is directed at (approach) or away from
    /// (runaway).
    pub goal: Option<Point>,
}

impl MotorState {
    fn roam_heading(&mut self, mode: Behaviour, pose: &Pose, rng: &mut RngStream) -> f64 {
        let period = if mode == Behaviour::Explore {
            EXPLORE_PERIOD
        } else {
            WANDER_PERIOD
        };
        match &mut self.roam {
            Some(r) if r.mode == mode => {
                r.ticks += 1;
                if r.ticks >= period {
                    r.ticks = 0;
                    r.heading = normalize_angle(pose.theta + rng.uniform(-PI, PI));
                }
                r.heading
            }
            slot => {
                *slot = Some(Roam {
                    mode,
                    heading: pose.theta,
                    ticks: 0,
                });
                pose.theta
            }
        }
    }

    /// Realizes `behaviour` for one tick. Returns the new pose and the
    /// behaviour actually executed, which is the avoidance reflex when it
    /// overrides a moving behaviour.
    pub fn drive(
        &mut self,
        behaviour: Behaviour,
        pose: &Pose,
        input: &MotorInput<'_>,
        rng: &mut RngStream,
    ) -> (Pose, Behaviour) {
        if behaviour.is_consummatory() {
            self.roam = None;
            return (*pose, behaviour);
        }
        if let Some(side) =
            reflex_avoid_obstacle(pose, input.env, input.body_radius, input.contact_radius)
        {
            let angle = match side {
                TurnSide::Left => input.step,
                TurnSide::Right => -input.step,
            };
            let turned = turn_in_place(pose, angle);
            if let Some(r) = &mut self.roam {
                r.heading = turned.theta;
            }
            return (turned, Behaviour::AvoidObstacle);
        }
        let here = pose.position();
        let target = match behaviour {
            Behaviour::Wander | Behaviour::Explore => self.roam_heading(behaviour, pose, rng),
            Behaviour::Runaway => {
                self.roam = None;
                input
                    .goal
                    .map(|g| normalize_angle(g.bearing_to(here)))
                    .unwrap_or(pose.theta)
            }
            _ => {
                self.roam = None;
                input.goal.map(|g| here.bearing_to(g)).unwrap_or(pose.theta)
            }
        };
        let left_first = self.gait;
        self.gait = !self.gait;
        let next = steer_step(pose, target, input.step, input.body_radius, left_first);
        if position_allowed(input.env, next.position(), input.body_radius) {
            (next, behaviour)
        } else {
            (Pose::at(here, next.theta), behaviour)
        }
    }
}
