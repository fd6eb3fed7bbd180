use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::animat::{Animat, AnimatId, InternalMedium, Pose};
use crate::beca::{Behaviour, CouplingEntry, Level, LevelId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TraceOptions {
    /// Attach blackboard levels and learnable couplings to every record.
    pub dump_blackboard: bool,
}

/// Blackboard levels and learnable couplings of one animat.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct BlackboardDump {
    pub levels: BTreeMap<LevelId, Level>,
    pub learnable: Vec<CouplingEntry>,
}

impl BlackboardDump {
    pub fn of(animat: &Animat) -> Self {
        let levels = animat
            .beca
            .blackboard
            .levels()
            .map(|(id, l)| (id, l.clone()))
            .collect();
        let learnable = animat
            .beca
            .coupling
            .learnable()
            .map(|(k, strength)| CouplingEntry {
                level: k.level,
                source: k.source,
                target: k.target,
                strength,
                learnable: true,
            })
            .collect();
        Self { levels, learnable }
    }
}

/// Observable state of one animat at the end of one tick. Field order is
/// the serialized key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct TraceRecord {
    pub tick: u64,
    pub animat: AnimatId,
    pub pose: Pose,
    /// Behaviour the motor system executed.
    pub behaviour: Behaviour,
    /// Output of action selection, before any reflex override.
    pub selected: Behaviour,
    pub intensity: f64,
    pub medium: InternalMedium,
    pub alive: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blackboard: Option<BlackboardDump>,
}

impl TraceRecord {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("trace records serialize")
    }
}

pub fn write_trace<W: Write>(out: &mut W, records: &[TraceRecord]) -> io::Result<()> {
    for r in records {
        writeln!(out, "{}", r.to_line())?;
    }
    Ok(())
}

pub fn read_trace(text: &str) -> Result<Vec<TraceRecord>, serde_json::Error> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}
