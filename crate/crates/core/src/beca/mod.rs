//! Behavioural columns action selection: a blackboard split into a
//! cognitive and a motivational node, coupling strengths between its
//! signals, and the cycle that turns stimuli and internal deficits into one
//! external behaviour.

mod blackboard;
mod channel;
mod coupling;
mod cycle;
pub mod ops;
mod params;
mod topology;

pub use blackboard::{Blackboard, Level, LevelId, Node, Signal};
pub use channel::{Behaviour, Channel, StimulusKind};
pub use coupling::{defaults, CouplingEntry, CouplingKey, CouplingMatrix};
pub use cycle::{beca_cycle, BecaSettings, BecaState};
pub use ops::ActionSelection;
pub use params::{BecaParameters, ParamName};
pub use topology::{BehaviouralColumn, Deficit, Interoception, MotivationalColumn, Topology};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BecaError {
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("parameter {name} = {value} is outside [0, 1]")]
    ParameterOutOfRange { name: ParamName, value: f64 },
    #[error("coupling {key:?} = {value} violates its sign rule")]
    CouplingOutOfRange { key: CouplingKey, value: f64 },
    #[error("channel `{0}` is not registered on this instance")]
    UnknownChannel(Channel),
    #[error("stimulus strength {value} on `{channel}` is outside [0, 1]")]
    StrengthOutOfRange { channel: Channel, value: f64 },
}
