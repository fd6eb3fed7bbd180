//! Line-delimited JSON messages exchanged with live clients. Every message
//! is one JSON object on one line with a `type` field.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::command::Command;
use crate::snapshot::Snapshot;

pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ClientMessage {
    /// Must be the first message on a connection.
    Hello {
        version: u32,
        /// Include blackboard contents in snapshots.
        #[serde(default)]
        blackboard: bool,
    },
    Command {
        id: u64,
        command: Command,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    Welcome {
        version: u32,
        tick: u64,
    },
    /// Exactly one per command, carrying the command's `id`.
    Response {
        id: u64,
        ok: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        result: Option<Value>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        error: Option<String>,
    },
    Snapshot(Box<Snapshot>),
    /// Protocol-level failure, such as a bad handshake or unparsable line.
    Error {
        message: String,
    },
}

impl ServerMessage {
    pub fn to_line(&self) -> String {
        let mut s = serde_json::to_string(self).expect("messages serialize");
        s.push('\n');
        s
    }
}

impl ClientMessage {
    pub fn to_line(&self) -> String {
        let mut s = serde_json::to_string(self).expect("messages serialize");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tagged_lines() {
        let hello = ClientMessage::Hello {
            version: PROTOCOL_VERSION,
            blackboard: false,
        };
        let line = hello.to_line();
        assert!(line.ends_with('\n') && !line.trim_end().contains('\n'));
        assert!(line.contains(r#""type":"hello""#));
        let cmd: ClientMessage =
            serde_json::from_str(r#"{"type":"command","id":4,"command":{"verb":"pause"}}"#)
                .unwrap();
        assert_eq!(
            cmd,
            ClientMessage::Command {
                id: 4,
                command: Command::Pause
            }
        );
        let resp = ServerMessage::Response {
            id: 4,
            ok: false,
            result: None,
            error: Some("nope".into()),
        };
        let back: ServerMessage = serde_json::from_str(&resp.to_line()).unwrap();
        assert_eq!(back, resp);
    }
}
