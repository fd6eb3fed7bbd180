use serde::{Deserialize, Serialize};

use super::blackboard::Blackboard;
use super::channel::Channel;
use super::coupling::CouplingMatrix;
use super::ops::{self, ActionSelection};
use super::params::BecaParameters;
use super::topology::{Interoception, Topology};
use super::BecaError;

/// Tunables of the cycle that are not modulation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct BecaSettings {
    /// Margin a challenger needs over the incumbent motivation.
    pub hysteresis: f64,
    /// External behaviours below this activation are not selected.
    pub selection_threshold: f64,
}

impl Default for BecaSettings {
    fn default() -> Self {
        Self {
            hysteresis: 0.05,
            selection_threshold: 0.01,
        }
    }
}

/// One architecture instance: layout, blackboard, couplings and parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct BecaState {
    pub topology: Topology,
    pub blackboard: Blackboard,
    pub coupling: CouplingMatrix,
    pub params: BecaParameters,
    #[serde(default)]
    pub settings: BecaSettings,
}

impl BecaState {
    pub fn new(topology: Topology, params: BecaParameters) -> Self {
        let blackboard = Blackboard::new(&topology);
        let coupling = CouplingMatrix::for_topology(&topology);
        Self {
            topology,
            blackboard,
            coupling,
            params,
            settings: BecaSettings::default(),
        }
    }

    pub fn prey() -> Self {
        Self::new(Topology::prey(), BecaParameters::default())
    }

    pub fn predator() -> Self {
        Self::new(Topology::predator(), BecaParameters::default())
    }

    /// Runs one cycle in place. On error nothing is modified.
    pub fn cycle(
        &mut self,
        exteroception: &[(Channel, f64)],
        interoception: &Interoception,
    ) -> Result<ActionSelection, BecaError> {
        let Self {
            topology,
            blackboard: bb,
            coupling: fa,
            params: p,
            settings,
        } = self;
        ops::register_exteroception(bb, topology, exteroception)?;
        ops::register_interoception(bb, topology, interoception);
        ops::step_intero_extero_drive(bb, topology, fa, p);
        ops::step_motivational_competition(bb, topology, settings.hysteresis);
        ops::step_perceptual_persistence(bb, topology, fa, p);
        ops::step_attention_to_preferences(bb, topology, fa, p);
        ops::step_learning(bb, topology, fa, p);
        ops::step_actuators(bb, topology, fa);
        Ok(ops::select_external_behaviour(
            bb,
            topology,
            settings.selection_threshold,
        ))
    }
}

/// Functional form of [`BecaState::cycle`].
pub fn beca_cycle(
    state: &BecaState,
    exteroception: &[(Channel, f64)],
    interoception: &Interoception,
) -> Result<(BecaState, ActionSelection), BecaError> {
    let mut next = state.clone();
    let action = next.cycle(exteroception, interoception)?;
    Ok((next, action))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beca::{Behaviour, LevelId, StimulusKind};

    fn hungry() -> Interoception {
        Interoception {
            hunger: 0.6,
            safety: 1.0,
            ..Default::default()
        }
    }

    #[test]
    fn hungry_with_food_in_view_approaches() {
        let mut s = BecaState::prey();
        let food = Channel::Stimulus(StimulusKind::Food);
        let a = s.cycle(&[(food, 0.5)], &hungry()).unwrap();
        assert_eq!(a.behaviour, Behaviour::ApproachFood);
        assert!(s.blackboard.is_bounded());
    }

    #[test]
    fn contact_switches_to_consummatory() {
        let mut s = BecaState::prey();
        let food = Channel::Stimulus(StimulusKind::Food);
        let touch = Channel::Contact(StimulusKind::Food);
        let a = s.cycle(&[(food, 1.0), (touch, 1.0)], &hungry()).unwrap();
        assert_eq!(a.behaviour, Behaviour::Eat);
    }

    #[test]
    fn hungry_without_stimulus_explores_and_sated_wanders() {
        let mut s = BecaState::prey();
        assert_eq!(
            s.cycle(&[], &hungry()).unwrap().behaviour,
            Behaviour::Explore
        );
        let mut s = BecaState::prey();
        let sated = Interoception {
            safety: 1.0,
            ..Default::default()
        };
        assert_eq!(s.cycle(&[], &sated).unwrap().behaviour, Behaviour::Wander);
    }

    #[test]
    fn purely_multiplicative_combination_does_not_explore() {
        let p = BecaParameters::default()
            .with(crate::beca::ParamName::Alpha, 0.0)
            .unwrap();
        let mut s = BecaState::new(Topology::prey(), p);
        assert_eq!(
            s.cycle(&[], &hungry()).unwrap().behaviour,
            Behaviour::Wander
        );
    }

    #[test]
    fn error_leaves_state_untouched() {
        let s = BecaState::prey();
        let bad = Channel::Behaviour(Behaviour::Eat);
        assert!(beca_cycle(&s, &[(bad, 0.5)], &hungry()).is_err());
        let mut t = s.clone();
        assert!(t.cycle(&[(bad, 0.5)], &hungry()).is_err());
        assert_eq!(s, t);
        assert_eq!(t.blackboard.get(LevelId::Drive, Behaviour::Eat), 0.0);
    }
}
