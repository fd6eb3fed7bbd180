use serde::{Deserialize, Serialize};

use crate::beca::Interoception;

/// Internal variables of an animat, each in `[0, 1]`.
///
/// `strength` and `lucidity` are derived from fatigue and from hunger and
/// thirst after every tick; `safety` never changes on its own.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct InternalMedium {
    pub strength: f64,
    pub lucidity: f64,
    pub safety: f64,
    pub fatigue: f64,
    pub thirst: f64,
    pub hunger: f64,
}

/// Floor of the derived variables, so exhausted animats still move and see.
pub const DERIVED_FLOOR: f64 = 0.1;

fn unit(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 1.0)
    }
}

pub fn strength_for(fatigue: f64) -> f64 {
    (1.0 - fatigue).clamp(DERIVED_FLOOR, 1.0)
}

pub fn lucidity_for(hunger: f64, thirst: f64) -> f64 {
    (1.0 - (hunger + thirst) / 2.0).clamp(DERIVED_FLOOR, 1.0)
}

impl Default for InternalMedium {
    fn default() -> Self {
        Self::new(0.0, 0.0, 0.0, 1.0)
    }
}

impl InternalMedium {
    /// Builds a medium from its primary variables; inputs are clamped.
    pub fn new(hunger: f64, thirst: f64, fatigue: f64, safety: f64) -> Self {
        let mut m = Self {
            strength: 1.0,
            lucidity: 1.0,
            safety: unit(safety),
            fatigue: unit(fatigue),
            thirst: unit(thirst),
            hunger: unit(hunger),
        };
        m.refresh_derived();
        m
    }

    pub fn refresh_derived(&mut self) {
        self.strength = strength_for(self.fatigue);
        self.lucidity = lucidity_for(self.hunger, self.thirst);
    }

    pub fn interoception(&self) -> Interoception {
        Interoception {
            hunger: self.hunger,
            thirst: self.thirst,
            fatigue: self.fatigue,
            safety: self.safety,
        }
    }

    pub fn is_bounded(&self) -> bool {
        [
            self.strength,
            self.lucidity,
            self.safety,
            self.fatigue,
            self.thirst,
            self.hunger,
        ]
        .iter()
        .all(|v| (0.0..=1.0).contains(v))
    }

    pub fn get(&self, var: MediumVariable) -> f64 {
        match var {
            MediumVariable::Strength => self.strength,
            MediumVariable::Lucidity => self.lucidity,
            MediumVariable::Safety => self.safety,
            MediumVariable::Fatigue => self.fatigue,
            MediumVariable::Thirst => self.thirst,
            MediumVariable::Hunger => self.hunger,
        }
    }

    /// Overwrites one variable. Derived variables are recomputed on the
    /// next tick.
    pub fn set(&mut self, var: MediumVariable, value: f64) {
        let v = unit(value);
        match var {
            MediumVariable::Strength => self.strength = v,
            MediumVariable::Lucidity => self.lucidity = v,
            MediumVariable::Safety => self.safety = v,
            MediumVariable::Fatigue => self.fatigue = v,
            MediumVariable::Thirst => self.thirst = v,
            MediumVariable::Hunger => self.hunger = v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum MediumVariable {
    Strength,
    Lucidity,
    Safety,
    Fatigue,
    Thirst,
    Hunger,
}

impl std::str::FromStr for MediumVariable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| format!("unknown internal variable `{s}`"))
    }
}

/// Variables that grow in time and fall while consumed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum Need {
    Hunger,
    Thirst,
    Fatigue,
}

/// Per-tick growth and consumption rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(default)]
pub struct PhysiologyRates {
    pub hunger: f64,
    pub thirst: f64,
    pub fatigue: f64,
    /// Amount of a stimulus consumed, and of the need relieved, per tick.
    pub consumption: f64,
}

impl Default for PhysiologyRates {
    fn default() -> Self {
        Self {
            hunger: 0.0010,
            thirst: 0.0015,
            fatigue: 0.0005,
            consumption: 0.01,
        }
    }
}

/// What a consummatory behaviour took from the environment this tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intake {
    pub need: Need,
    pub amount: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MediumTick {
    Alive(InternalMedium),
    Dead(InternalMedium),
}

impl MediumTick {
    pub fn medium(&self) -> InternalMedium {
        match *self {
            MediumTick::Alive(m) | MediumTick::Dead(m) => m,
        }
    }
}

/// Advances the internal medium by one tick. A need being consumed falls by
/// the intake instead of growing.
pub fn tick_internal_medium(
    m: &InternalMedium,
    rates: &PhysiologyRates,
    intake: Option<Intake>,
    immortal: bool,
) -> MediumTick {
    let mut next = *m;
    let step = |need: Need, value: f64, growth: f64| match intake {
        Some(i) if i.need == need => unit(value - i.amount),
        _ => unit(value + growth),
    };
    next.hunger = step(Need::Hunger, m.hunger, rates.hunger);
    next.thirst = step(Need::Thirst, m.thirst, rates.thirst);
    next.fatigue = step(Need::Fatigue, m.fatigue, rates.fatigue);
    next.refresh_derived();
    if !immortal && (next.hunger >= 1.0 || next.thirst >= 1.0) {
        MediumTick::Dead(next)
    } else {
        MediumTick::Alive(next)
    }
}
