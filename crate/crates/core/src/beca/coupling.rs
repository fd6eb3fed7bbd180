//! Coupling strengths between blackboard signals.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::blackboard::LevelId;
use super::channel::{Behaviour, Channel, StimulusKind};
use super::topology::Topology;
use super::BecaError;

/// Source level, source channel, target channel.
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
pub struct CouplingKey {
    pub level: LevelId,
    pub source: Channel,
    pub target: Channel,
}

impl CouplingKey {
    pub fn new(level: LevelId, source: impl Into<Channel>, target: impl Into<Channel>) -> Self {
        Self {
            level,
            source: source.into(),
            target: target.into(),
        }
    }

    /// Lateral inhibition between two distinct persistence channels.
    pub fn is_lateral(&self) -> bool {
        self.level == LevelId::PerceptualPersistents
            && self.source != self.target
            && self.source.is_perceptual()
            && self.target.is_perceptual()
    }

    // Named constructors, one per coupling family.

    /// External perception into its own persistence channel.
    pub fn persistence_input(channel: Channel) -> Self {
        Self::new(LevelId::CognitiveExternalPerceptions, channel, channel)
    }

    /// Attention feedback from the column keyed on `channel`.
    pub fn persistence_feedback(column: Behaviour, channel: Channel) -> Self {
        Self::new(LevelId::DrivePerceptionCongruents, column, channel)
    }

    /// Inhibition of `target` by `source` on Perceptual Persistents.
    pub fn lateral(source: Channel, target: Channel) -> Self {
        Self::new(LevelId::PerceptualPersistents, source, target)
    }

    /// Weight of a behavioural column's key persistence.
    pub fn attention_key(column: Behaviour) -> Self {
        Self::new(LevelId::PerceptualPersistents, column, column)
    }

    /// Consummatory preferent of `head` into behavioural column `column`.
    pub fn attention_preferent(head: Behaviour, column: Behaviour) -> Self {
        Self::new(LevelId::ConsummatoryPreferents, head, column)
    }

    pub fn congruence_internal(head: Behaviour) -> Self {
        Self::new(LevelId::InternalPerceptions, head, head)
    }

    pub fn congruence_external(stimulus: StimulusKind, head: Behaviour) -> Self {
        Self::new(LevelId::MotivationalExternalPerceptions, stimulus, head)
    }

    pub fn congruence_drive(head: Behaviour) -> Self {
        Self::new(LevelId::Drive, head, head)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct CouplingEntry {
    pub level: LevelId,
    pub source: Channel,
    pub target: Channel,
    pub strength: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub learnable: bool,
}

/// Default coupling values of a fresh instance.
pub mod defaults {
    pub const PERSISTENCE_INPUT: f64 = 1.0;
    pub const PERSISTENCE_FEEDBACK: f64 = 0.2;
    pub const LATERAL_INHIBITION: f64 = -0.05;
    /// Touching a stimulus inhibits the sight channel of the same kind.
    pub const CONTACT_INHIBITION: f64 = -0.5;
    pub const ATTENTION_KEY: f64 = 1.0;
    pub const PREFERENT_APPROACH: f64 = 0.8;
    pub const PREFERENT_CONSUMMATORY: f64 = 1.0;
    pub const PREFERENT_RUNAWAY: f64 = 1.0;
    pub const PREFERENT_EXPLORE: f64 = 0.05;
    pub const CONGRUENCE_INTERNAL: f64 = 1.0;
    pub const CONGRUENCE_EXTERNAL: f64 = 1.0;
    pub const CONGRUENCE_DRIVE: f64 = 0.0;
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(try_from = "Vec<CouplingEntry>", into = "Vec<CouplingEntry>")]
pub struct CouplingMatrix {
    fa: BTreeMap<CouplingKey, f64>,
    learnable: BTreeSet<CouplingKey>,
}

impl CouplingMatrix {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Couplings of a fresh, unconditioned animat.
    pub fn for_topology(topology: &Topology) -> Self {
        use defaults::*;
        let mut m = Self::empty();
        let mut put = |key: CouplingKey, v: f64| {
            m.set(key, v).expect("default couplings respect sign rules");
        };

        for &c in &topology.perceptual {
            put(CouplingKey::persistence_input(c), PERSISTENCE_INPUT);
            if let Some(col) = topology.column_keyed_on(c) {
                put(
                    CouplingKey::persistence_feedback(col.behaviour, c),
                    PERSISTENCE_FEEDBACK,
                );
            }
        }
        for &i in &topology.perceptual {
            for &j in &topology.perceptual {
                if i != j && matches!(i, Channel::Stimulus(_)) && matches!(j, Channel::Stimulus(_))
                {
                    put(CouplingKey::lateral(j, i), LATERAL_INHIBITION);
                }
            }
            if let Channel::Contact(k) = i {
                let sight = Channel::Stimulus(k);
                if topology.knows_perceptual(sight) {
                    put(CouplingKey::lateral(i, sight), CONTACT_INHIBITION);
                }
            }
        }
        for col in &topology.columns {
            put(CouplingKey::attention_key(col.behaviour), ATTENTION_KEY);
            let w = match col.key {
                None => PREFERENT_EXPLORE,
                Some(Channel::Contact(_)) => PREFERENT_CONSUMMATORY,
                Some(_) if col.behaviour == Behaviour::Runaway => PREFERENT_RUNAWAY,
                Some(_) => PREFERENT_APPROACH,
            };
            for &head in &col.motivations {
                put(CouplingKey::attention_preferent(head, col.behaviour), w);
            }
        }
        for mot in &topology.motivational {
            put(
                CouplingKey::congruence_internal(mot.head),
                CONGRUENCE_INTERNAL,
            );
            put(CouplingKey::congruence_drive(mot.head), CONGRUENCE_DRIVE);
            for &u in &mot.unconditioned {
                put(
                    CouplingKey::congruence_external(u, mot.head),
                    CONGRUENCE_EXTERNAL,
                );
            }
        }
        for &n in &topology.neutral {
            for mot in &topology.motivational {
                put(CouplingKey::congruence_external(n, mot.head), 0.0);
            }
        }
        for &n in &topology.neutral {
            for mot in &topology.motivational {
                m.learnable
                    .insert(CouplingKey::congruence_external(n, mot.head));
            }
        }
        m
    }

    pub fn get(&self, key: CouplingKey) -> f64 {
        self.fa.get(&key).copied().unwrap_or(0.0)
    }

    /// Sets a coupling, enforcing the sign rules: lateral inhibition is
    /// non-positive, everything else non-negative, all within `[-1, 1]`,
    /// learnable entries within `[0, 1]`.
    pub fn set(&mut self, key: CouplingKey, value: f64) -> Result<(), BecaError> {
        let ok = if key.is_lateral() {
            (-1.0..=0.0).contains(&value)
        } else {
            (0.0..=1.0).contains(&value)
        };
        if !ok {
            return Err(BecaError::CouplingOutOfRange { key, value });
        }
        self.fa.insert(key, value);
        Ok(())
    }

    pub fn mark_learnable(&mut self, key: CouplingKey) -> Result<(), BecaError> {
        if key.is_lateral() {
            return Err(BecaError::CouplingOutOfRange {
                key,
                value: self.get(key),
            });
        }
        self.fa.entry(key).or_insert(0.0);
        self.learnable.insert(key);
        Ok(())
    }

    pub fn is_learnable(&self, key: CouplingKey) -> bool {
        self.learnable.contains(&key)
    }

    pub fn learnable(&self) -> impl Iterator<Item = (CouplingKey, f64)> + '_ {
        self.learnable.iter().map(|&k| (k, self.get(k)))
    }

    pub(crate) fn set_learned(&mut self, key: CouplingKey, value: f64) {
        let v = if value.is_nan() {
            0.0
        } else {
            value.clamp(0.0, 1.0)
        };
        self.fa.insert(key, v);
    }

    pub fn entries(&self) -> impl Iterator<Item = (CouplingKey, f64)> + '_ {
        self.fa.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.fa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fa.is_empty()
    }

    /// Learned coupling from a neutral stimulus into a motivational column,
    /// looked up by the column's head behaviour.
    pub fn conditioned(&self, stimulus: StimulusKind, head: Behaviour) -> f64 {
        self.get(CouplingKey::congruence_external(stimulus, head))
    }
}

impl TryFrom<Vec<CouplingEntry>> for CouplingMatrix {
    type Error = BecaError;

    fn try_from(entries: Vec<CouplingEntry>) -> Result<Self, Self::Error> {
        let mut m = CouplingMatrix::empty();
        for e in entries {
            let key = CouplingKey::new(e.level, e.source, e.target);
            m.set(key, e.strength)?;
            if e.learnable {
                m.mark_learnable(key)?;
            }
        }
        Ok(m)
    }
}

impl From<CouplingMatrix> for Vec<CouplingEntry> {
    fn from(m: CouplingMatrix) -> Self {
        m.fa.iter()
            .map(|(k, &strength)| CouplingEntry {
                level: k.level,
                source: k.source,
                target: k.target,
                strength,
                learnable: m.learnable.contains(k),
            })
            .collect()
    }
}
