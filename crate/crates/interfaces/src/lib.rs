//! Live control of a simulation: commands, sessions with a command log,
//! snapshots, and a line-delimited JSON service over TCP.

pub mod command;
pub mod protocol;
pub mod report;
pub mod server;
pub mod session;
pub mod snapshot;

pub use command::{Command, Target};
pub use protocol::{ClientMessage, ServerMessage, PROTOCOL_VERSION};
pub use server::{serve, RemoteClient, ServerHandle, ServerOptions};
pub use session::{
    load_initial, read_log, write_log, ControlSession, LogEntry, Reply, SessionError,
};
pub use snapshot::{AnimatSnapshot, Snapshot};
