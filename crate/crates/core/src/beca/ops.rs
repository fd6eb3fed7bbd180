//! The internal behaviours of the architecture, one function per step.
//!
//! Scalar update rules are exposed as free functions so they can be checked
//! in isolation; the `step_*` functions wire them to blackboard levels.

use serde::{Deserialize, Serialize};

use super::blackboard::{Blackboard, LevelId};
use super::channel::{Behaviour, Channel};
use super::coupling::{CouplingKey, CouplingMatrix};
use super::params::BecaParameters;
use super::topology::{BehaviouralColumn, Interoception, Topology};
use super::BecaError;

/// Output of the actuators: which external behaviour to run and how hard.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct ActionSelection {
    pub behaviour: Behaviour,
    pub intensity: f64,
}

impl ActionSelection {
    pub fn wander() -> Self {
        Self {
            behaviour: Behaviour::Wander,
            intensity: 0.0,
        }
    }
}

/// Pre-activation of a persistence channel.
pub fn persistence_pre_activation(
    kappa: f64,
    previous: f64,
    input: f64,
    feedback: f64,
    lateral: f64,
) -> f64 {
    (1.0 - kappa) * previous + input + feedback + lateral
}

/// Hyperbolic convergence of a pre-activation towards `max`.
///
/// With the gate engaged and `atmp > 0` the result lies in `[0, max)` and
/// grows strictly with `atmp`. Otherwise the pre-activation passes through,
/// floored at zero. A zero ceiling forces the channel to zero.
pub fn saturate(atmp: f64, max: f64, gate: bool) -> f64 {
    if max <= 0.0 {
        return 0.0;
    }
    if gate && atmp > 0.0 {
        -1.0 / (atmp + 1.0 / max) + max
    } else {
        atmp.max(0.0)
    }
}

/// Attention to preferences, written without dividing by the key signal so
/// that motivated output is defined when nothing is perceived.
pub fn attention(fa_key: f64, key: f64, gamma: f64, phi: f64, preferent_sum: f64) -> f64 {
    fa_key * (gamma * key + phi * preferent_sum)
}

/// Combination of internal, external and drive signals.
pub fn congruence(
    fa_internal: f64,
    internal: f64,
    alpha: f64,
    external_sum: f64,
    fa_drive: f64,
    drive: f64,
) -> f64 {
    fa_internal * internal * (alpha + external_sum) + fa_drive * drive
}

/// Signal transfer function of the learning rule: identity on `[0, 1]`.
pub fn transfer(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 1.0)
    }
}

/// One learning update of a coupling, clamped to `[0, 1]`.
pub fn learning_update(fa: f64, input: f64, output: f64, p: &BecaParameters) -> f64 {
    let fin = transfer(input);
    let next = if fin > 0.0 {
        (1.0 - p.beta()) * fa + p.lambda() * fin.abs() * transfer(output)
    } else {
        (1.0 - p.mu()) * fa
    };
    transfer(next)
}

/// Winner-take-all with hysteresis. An incumbent with a non-zero signal is
/// displaced only by a challenger exceeding it by more than `delta`; ties go
/// to the earlier behaviour in registry order.
pub fn competition_winner(
    incumbent: Option<Behaviour>,
    candidates: &[(Behaviour, f64)],
    delta: f64,
) -> Option<Behaviour> {
    let mut ordered: Vec<(Behaviour, f64)> = candidates.to_vec();
    ordered.sort_by_key(|&(b, _)| b);
    let argmax = |skip: Option<Behaviour>| {
        ordered.iter().filter(|&&(b, _)| Some(b) != skip).fold(
            None::<(Behaviour, f64)>,
            |best, &(b, v)| match best {
                Some((_, bv)) if bv >= v => best,
                _ => Some((b, v)),
            },
        )
    };
    let held = incumbent.and_then(|inc| {
        ordered
            .iter()
            .find(|&&(b, _)| b == inc)
            .copied()
            .filter(|&(_, v)| v > 0.0)
    });
    match held {
        Some((inc, inc_v)) => match argmax(Some(inc)) {
            Some((c, cv)) if cv > inc_v + delta => Some(c),
            _ => Some(inc),
        },
        None => argmax(None).filter(|&(_, v)| v > 0.0).map(|(b, _)| b),
    }
}

/// Registers stimulus strengths on the External Perceptions level of both
/// nodes. Unlisted channels read zero; repeated channels keep the last value.
pub fn register_exteroception(
    bb: &mut Blackboard,
    topology: &Topology,
    scenario: &[(Channel, f64)],
) -> Result<(), BecaError> {
    if let Some(&(c, _)) = scenario
        .iter()
        .find(|(c, _)| !topology.knows_perceptual(*c))
    {
        return Err(BecaError::UnknownChannel(c));
    }
    if let Some(&(channel, value)) = scenario.iter().find(|(_, v)| !(0.0..=1.0).contains(v)) {
        return Err(BecaError::StrengthOutOfRange { channel, value });
    }
    for id in [
        LevelId::CognitiveExternalPerceptions,
        LevelId::MotivationalExternalPerceptions,
    ] {
        let level = bb.level_mut(id);
        level.clear();
        for &(c, v) in scenario {
            level.set(c, v);
        }
    }
    Ok(())
}

/// Registers the internal medium. Drives are the matching deficits.
pub fn register_interoception(bb: &mut Blackboard, topology: &Topology, medium: &Interoception) {
    for m in &topology.motivational {
        let v = medium.read(m.deficit);
        bb.set(LevelId::InternalPerceptions, m.head, v);
        bb.set(LevelId::Drive, m.head, v);
    }
}

pub fn step_intero_extero_drive(
    bb: &mut Blackboard,
    topology: &Topology,
    fa: &CouplingMatrix,
    p: &BecaParameters,
) {
    for m in &topology.motivational {
        let external_sum: f64 = topology
            .perceptual
            .iter()
            .filter_map(|&c| match c {
                Channel::Stimulus(k) => Some((k, c)),
                _ => None,
            })
            .map(|(k, c)| {
                fa.get(CouplingKey::congruence_external(k, m.head))
                    * bb.get(LevelId::MotivationalExternalPerceptions, c)
            })
            .sum();
        let a = congruence(
            fa.get(CouplingKey::congruence_internal(m.head)),
            bb.get(LevelId::InternalPerceptions, m.head),
            p.alpha(),
            external_sum,
            fa.get(CouplingKey::congruence_drive(m.head)),
            bb.get(LevelId::Drive, m.head),
        );
        bb.set(LevelId::InteroExteroDriveCongruents, m.head, a);
    }
}

pub fn step_motivational_competition(bb: &mut Blackboard, topology: &Topology, delta: f64) {
    let candidates: Vec<(Behaviour, f64)> = topology
        .motivational
        .iter()
        .map(|m| (m.head, bb.get(LevelId::InteroExteroDriveCongruents, m.head)))
        .collect();
    let winner = competition_winner(bb.incumbent(), &candidates, delta);
    for &(head, v) in &candidates {
        let out = if Some(head) == winner { v } else { 0.0 };
        bb.set(LevelId::ConsummatoryPreferents, head, out);
    }
    bb.set_incumbent(winner);
}

pub fn step_perceptual_persistence(
    bb: &mut Blackboard,
    topology: &Topology,
    fa: &CouplingMatrix,
    p: &BecaParameters,
) {
    bb.snapshot_persistents();
    let prev = bb.persistents_prev().clone();
    for &i in &topology.perceptual {
        let input = fa.get(CouplingKey::persistence_input(i))
            * bb.get(LevelId::CognitiveExternalPerceptions, i);
        let feedback = topology
            .column_keyed_on(i)
            .map(|col| {
                fa.get(CouplingKey::persistence_feedback(col.behaviour, i))
                    * bb.get(LevelId::DrivePerceptionCongruents, col.behaviour)
            })
            .unwrap_or(0.0);
        let lateral: f64 = topology
            .perceptual
            .iter()
            .filter(|&&j| j != i)
            .map(|&j| fa.get(CouplingKey::lateral(j, i)) * prev.get(j))
            .sum();
        let atmp = persistence_pre_activation(p.kappa(), prev.get(i), input, feedback, lateral);
        let a = saturate(atmp, bb.max_t(i), bb.saturation_gate(i));
        bb.set(LevelId::PerceptualPersistents, i, a);
    }
}

/// Strength of a column's key on `level`: the primary key, or a neutral
/// stimulus weighted by its learned coupling into the column's motivation.
pub fn key_signal(
    bb: &Blackboard,
    topology: &Topology,
    fa: &CouplingMatrix,
    column: &BehaviouralColumn,
    level: LevelId,
) -> f64 {
    let Some(key) = column.key else {
        return 0.0;
    };
    let mut best = bb.get(level, key);
    if column.conditionable {
        for &n in &topology.neutral {
            for &head in &column.motivations {
                best = best.max(fa.conditioned(n, head) * bb.get(level, Channel::Stimulus(n)));
            }
        }
    }
    best
}

pub fn step_attention_to_preferences(
    bb: &mut Blackboard,
    topology: &Topology,
    fa: &CouplingMatrix,
    p: &BecaParameters,
) {
    for col in &topology.columns {
        let key = key_signal(bb, topology, fa, col, LevelId::PerceptualPersistents);
        let preferent_sum: f64 = col
            .motivations
            .iter()
            .map(|&m| {
                fa.get(CouplingKey::attention_preferent(m, col.behaviour))
                    * bb.get(LevelId::ConsummatoryPreferents, m)
            })
            .sum();
        let out = attention(
            fa.get(CouplingKey::attention_key(col.behaviour)),
            key,
            p.gamma(),
            p.phi(),
            preferent_sum,
        );
        bb.set(LevelId::DrivePerceptionCongruents, col.behaviour, out);
    }
}

/// Conditioning of learnable couplings `stimulus -> motivational column`.
///
/// The reinforcing signal is the column's consummatory preferent while one
/// of its unconditioned stimuli is registered; the learned signal is the
/// neutral stimulus' perceptual persistence.
pub fn step_learning(
    bb: &Blackboard,
    topology: &Topology,
    fa: &mut CouplingMatrix,
    p: &BecaParameters,
) {
    let keys: Vec<CouplingKey> = fa.learnable().map(|(k, _)| k).collect();
    for key in keys {
        let Channel::Behaviour(head) = key.target else {
            continue;
        };
        let Some(mot) = topology.motivation(head) else {
            continue;
        };
        let unconditioned_present = mot.unconditioned.iter().any(|&u| {
            bb.get(
                LevelId::MotivationalExternalPerceptions,
                Channel::Stimulus(u),
            ) > 0.0
        });
        let reinforcement = if unconditioned_present {
            bb.get(LevelId::ConsummatoryPreferents, head)
        } else {
            0.0
        };
        let output = bb.get(LevelId::PerceptualPersistents, key.source);
        let next = learning_update(fa.get(key), reinforcement, output, p);
        fa.set_learned(key, next);
    }
}

/// Actuator gating: a keyed column reaches the External Behaviours level
/// only while its key (or a conditioned substitute) is registered.
pub fn step_actuators(bb: &mut Blackboard, topology: &Topology, fa: &CouplingMatrix) {
    for col in &topology.columns {
        let available = col.key.is_none()
            || key_signal(bb, topology, fa, col, LevelId::CognitiveExternalPerceptions) > 0.0;
        let v = if available {
            bb.get(LevelId::DrivePerceptionCongruents, col.behaviour)
        } else {
            0.0
        };
        bb.set(LevelId::ExternalBehaviours, col.behaviour, v);
    }
}

/// Argmax over the External Behaviours level. Activations below
/// `threshold` do not count; wander is returned when nothing does.
pub fn select_external_behaviour(
    bb: &Blackboard,
    topology: &Topology,
    threshold: f64,
) -> ActionSelection {
    let mut columns: Vec<Behaviour> = topology.columns.iter().map(|c| c.behaviour).collect();
    columns.sort();
    let mut best = ActionSelection::wander();
    for b in columns {
        let v = bb.get(LevelId::ExternalBehaviours, b);
        if v > 0.0 && v >= threshold && v > best.intensity {
            best = ActionSelection {
                behaviour: b,
                intensity: v,
            };
        }
    }
    best
}
