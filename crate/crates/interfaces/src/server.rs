//! TCP service: one engine thread owns the session, one reader and one
//! writer thread per connection. Commands are applied between ticks.
//! Each connection keeps at most one pending snapshot, so a slow client
//! skips stale snapshots but always receives every response.

use std::collections::{BTreeMap, VecDeque};
use std::io::{self, BufRead, BufReader, Write};
use std::net::{Shutdown, SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError, Sender, TryRecvError};
use std::sync::{Arc, Condvar, Mutex};
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use crate::command::Command;
use crate::protocol::{ClientMessage, ServerMessage, PROTOCOL_VERSION};
use crate::session::ControlSession;
use crate::snapshot::Snapshot;

/// Poll interval of the engine while nothing runs.
const IDLE: Duration = Duration::from_millis(10);

#[derive(Default)]
pub struct ServerOptions {
    pub start_paused: bool,
    /// The engine stops advancing on its own once this tick is reached.
    /// Step commands still work.
    pub max_ticks: Option<u64>,
    /// Receives every trace record as a JSON line.
    pub trace: Option<Box<dyn Write + Send>>,
    /// Receives every command log entry as a JSON line.
    pub log: Option<Box<dyn Write + Send>>,
}

type ConnId = u64;

enum Event {
    Connect {
        conn: ConnId,
        outbox: Arc<Outbox>,
        stream: TcpStream,
        blackboard: bool,
    },
    Command {
        conn: ConnId,
        id: u64,
        command: Command,
    },
    Disconnect {
        conn: ConnId,
    },
}

#[derive(Default)]
struct OutboxState {
    messages: VecDeque<ServerMessage>,
    snapshot: Option<Snapshot>,
    closed: bool,
}

/// Per-connection queue: unbounded for responses, one slot for snapshots.
#[derive(Default)]
struct Outbox {
    state: Mutex<OutboxState>,
    ready: Condvar,
}

impl Outbox {
    fn push(&self, msg: ServerMessage) {
        let mut s = self.state.lock().expect("outbox lock");
        s.messages.push_back(msg);
        self.ready.notify_one();
    }

    fn offer_snapshot(&self, snap: Snapshot) {
        let mut s = self.state.lock().expect("outbox lock");
        s.snapshot = Some(snap);
        self.ready.notify_one();
    }

    fn close(&self) {
        let mut s = self.state.lock().expect("outbox lock");
        s.closed = true;
        self.ready.notify_one();
    }

    /// Queued messages first, then the latest snapshot. `None` once closed
    /// and drained of messages.
    fn next(&self) -> Option<ServerMessage> {
        let mut s = self.state.lock().expect("outbox lock");
        loop {
            if let Some(m) = s.messages.pop_front() {
                return Some(m);
            }
            if s.closed {
                return None;
            }
            if let Some(snap) = s.snapshot.take() {
                return Some(ServerMessage::Snapshot(Box::new(snap)));
            }
            s = self.ready.wait(s).expect("outbox lock");
        }
    }
}

pub struct ServerHandle {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    acceptor: Option<JoinHandle<()>>,
    engine: Option<JoinHandle<ControlSession>>,
}

impl ServerHandle {
    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    /// Stops the engine and returns the session as it was left.
    pub fn shutdown(mut self) -> ControlSession {
        self.stop.store(true, Ordering::SeqCst);
        // Wake the acceptor.
        let _ = TcpStream::connect(self.addr);
        if let Some(a) = self.acceptor.take() {
            let _ = a.join();
        }
        self.engine
            .take()
            .expect("engine present")
            .join()
            .expect("engine thread")
    }

    /// Blocks until the server is stopped from elsewhere.
    pub fn wait(mut self) -> ControlSession {
        self.engine
            .take()
            .expect("engine present")
            .join()
            .expect("engine thread")
    }
}

pub fn serve(
    addr: impl ToSocketAddrs,
    mut session: ControlSession,
    options: ServerOptions,
) -> io::Result<ServerHandle> {
    let listener = TcpListener::bind(addr)?;
    let local = listener.local_addr()?;
    let stop = Arc::new(AtomicBool::new(false));
    let (tx, rx) = mpsc::channel();
    if options.start_paused {
        session
            .apply(Command::Pause)
            .expect("pause always succeeds");
    }

    let engine_stop = stop.clone();
    let engine = thread::spawn(move || engine_loop(session, rx, engine_stop, options));

    let accept_stop = stop.clone();
    let acceptor = thread::spawn(move || {
        let mut next_conn: ConnId = 0;
        for stream in listener.incoming() {
            if accept_stop.load(Ordering::SeqCst) {
                break;
            }
            let Ok(stream) = stream else { continue };
            next_conn += 1;
            let conn = next_conn;
            let tx = tx.clone();
            thread::spawn(move || connection(stream, conn, tx));
        }
    });

    Ok(ServerHandle {
        addr: local,
        stop,
        acceptor: Some(acceptor),
        engine: Some(engine),
    })
}

fn connection(stream: TcpStream, conn: ConnId, tx: Sender<Event>) {
    // Messages are small and latency matters more than packet count.
    let _ = stream.set_nodelay(true);
    let outbox = Arc::new(Outbox::default());
    let (Ok(mut write_half), Ok(read_half), Ok(engine_copy)) =
        (stream.try_clone(), stream.try_clone(), stream.try_clone())
    else {
        return;
    };
    let writer_box = outbox.clone();
    thread::spawn(move || {
        while let Some(msg) = writer_box.next() {
            if write_half.write_all(msg.to_line().as_bytes()).is_err() {
                writer_box.close();
                break;
            }
        }
        let _ = write_half.shutdown(Shutdown::Write);
    });

    let mut lines = BufReader::new(read_half).lines();
    let hello = lines
        .next()
        .and_then(|l| l.ok())
        .map(|l| serde_json::from_str::<ClientMessage>(&l));
    let blackboard = match hello {
        Some(Ok(ClientMessage::Hello {
            version,
            blackboard,
        })) if version == PROTOCOL_VERSION => blackboard,
        Some(Ok(ClientMessage::Hello { version, .. })) => {
            outbox.push(ServerMessage::Error {
                message: format!(
                    "unsupported protocol version {version}, server speaks {PROTOCOL_VERSION}"
                ),
            });
            outbox.close();
            return;
        }
        _ => {
            outbox.push(ServerMessage::Error {
                message: "expected a hello message".into(),
            });
            outbox.close();
            return;
        }
    };
    if tx
        .send(Event::Connect {
            conn,
            outbox: outbox.clone(),
            stream: engine_copy,
            blackboard,
        })
        .is_err()
    {
        outbox.close();
        return;
    }

    for line in lines {
        let Ok(line) = line else { break };
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<ClientMessage>(&line) {
            Ok(ClientMessage::Command { id, command }) => {
                if tx.send(Event::Command { conn, id, command }).is_err() {
                    break;
                }
            }
            Ok(ClientMessage::Hello { .. }) => outbox.push(ServerMessage::Error {
                message: "hello was already received".into(),
            }),
            Err(e) => outbox.push(ServerMessage::Error {
                message: format!("unparsable message: {e}"),
            }),
        }
    }
    let _ = tx.send(Event::Disconnect { conn });
    outbox.close();
}

struct Client {
    outbox: Arc<Outbox>,
    stream: TcpStream,
    blackboard: bool,
}

fn engine_loop(
    mut session: ControlSession,
    rx: Receiver<Event>,
    stop: Arc<AtomicBool>,
    mut options: ServerOptions,
) -> ControlSession {
    let mut clients: BTreeMap<ConnId, Client> = BTreeMap::new();
    if let Some(log) = options.log.as_mut() {
        for entry in session.log() {
            let line = serde_json::to_string(entry).expect("log entries serialize");
            let _ = writeln!(log, "{line}");
        }
        let _ = log.flush();
    }
    let running = |s: &ControlSession, limit: Option<u64>| {
        !s.is_paused() && limit.is_none_or(|m| s.simulation().tick < m)
    };
    while !stop.load(Ordering::SeqCst) {
        let wait = if running(&session, options.max_ticks) {
            Duration::from_millis(session.simulation().delay_ms)
        } else {
            IDLE
        };
        let deadline = Instant::now() + wait;
        let mut changed = false;
        loop {
            let now = Instant::now();
            let event = if now >= deadline {
                match rx.try_recv() {
                    Ok(e) => e,
                    Err(TryRecvError::Empty) | Err(TryRecvError::Disconnected) => break,
                }
            } else {
                match rx.recv_timeout(deadline - now) {
                    Ok(e) => e,
                    Err(RecvTimeoutError::Timeout) => break,
                    Err(RecvTimeoutError::Disconnected) => {
                        thread::sleep(deadline - now);
                        break;
                    }
                }
            };
            changed |= handle(&mut session, &mut clients, event, &mut options);
        }
        if running(&session, options.max_ticks) {
            session.advance();
            changed = true;
        }
        flush_records(&mut session, &mut options);
        if changed {
            broadcast(&session, &clients);
        }
    }
    for c in clients.values() {
        c.outbox.close();
        let _ = c.stream.shutdown(Shutdown::Both);
    }
    session
}

/// Returns whether clients need a fresh snapshot.
fn handle(
    session: &mut ControlSession,
    clients: &mut BTreeMap<ConnId, Client>,
    event: Event,
    options: &mut ServerOptions,
) -> bool {
    match event {
        Event::Connect {
            conn,
            outbox,
            stream,
            blackboard,
        } => {
            outbox.push(ServerMessage::Welcome {
                version: PROTOCOL_VERSION,
                tick: session.simulation().tick,
            });
            outbox.offer_snapshot(session.snapshot(blackboard));
            clients.insert(
                conn,
                Client {
                    outbox,
                    stream,
                    blackboard,
                },
            );
            false
        }
        Event::Disconnect { conn } => {
            clients.remove(&conn);
            false
        }
        Event::Command { conn, id, command } => {
            let result = session.apply(command);
            if let (Some(log), Some(entry)) = (options.log.as_mut(), session.log().last()) {
                let line = serde_json::to_string(entry).expect("log entries serialize");
                let _ = writeln!(log, "{line}").and_then(|_| log.flush());
            }
            let msg = match result {
                Ok(reply) => ServerMessage::Response {
                    id,
                    ok: true,
                    result: Some(serde_json::to_value(reply).expect("replies serialize")),
                    error: None,
                },
                Err(e) => ServerMessage::Response {
                    id,
                    ok: false,
                    result: None,
                    error: Some(e.to_string()),
                },
            };
            // Records from a step must reach the trace before the client
            // learns the step finished.
            flush_records(session, options);
            if let Some(c) = clients.get(&conn) {
                c.outbox.push(msg);
            }
            true
        }
    }
}

fn flush_records(session: &mut ControlSession, options: &mut ServerOptions) {
    let records = session.take_records();
    if let Some(out) = options.trace.as_mut() {
        if records.is_empty() {
            return;
        }
        for r in &records {
            let _ = writeln!(out, "{}", r.to_line());
        }
        let _ = out.flush();
    }
}

fn broadcast(session: &ControlSession, clients: &BTreeMap<ConnId, Client>) {
    let mut plain: Option<Snapshot> = None;
    let mut detailed: Option<Snapshot> = None;
    for c in clients.values() {
        let slot = if c.blackboard {
            &mut detailed
        } else {
            &mut plain
        };
        let snap = slot.get_or_insert_with(|| session.snapshot(c.blackboard));
        c.outbox.offer_snapshot(snap.clone());
    }
}

/// Blocking client for the line protocol.
pub struct RemoteClient {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
    next_id: u64,
    /// Snapshots received while waiting for responses.
    pub snapshots: Vec<Snapshot>,
}

impl RemoteClient {
    /// Connects and completes the handshake, returning the welcome tick.
    pub fn connect(addr: SocketAddr, blackboard: bool) -> io::Result<(Self, u64)> {
        Self::connect_with_version(addr, PROTOCOL_VERSION, blackboard)
    }

    pub fn connect_with_version(
        addr: SocketAddr,
        version: u32,
        blackboard: bool,
    ) -> io::Result<(Self, u64)> {
        let writer = TcpStream::connect(addr)?;
        writer.set_nodelay(true)?;
        let reader = BufReader::new(writer.try_clone()?);
        let mut client = Self {
            reader,
            writer,
            next_id: 0,
            snapshots: Vec::new(),
        };
        client.send_raw(&ClientMessage::Hello {
            version,
            blackboard,
        })?;
        match client.recv()? {
            Some(ServerMessage::Welcome { tick, .. }) => Ok((client, tick)),
            Some(ServerMessage::Error { message }) => {
                Err(io::Error::new(io::ErrorKind::ConnectionRefused, message))
            }
            other => Err(io::Error::new(
                io::ErrorKind::InvalidData,
                format!("unexpected handshake reply {other:?}"),
            )),
        }
    }

    pub fn send_raw(&mut self, msg: &ClientMessage) -> io::Result<()> {
        self.writer.write_all(msg.to_line().as_bytes())
    }

    pub fn send_line(&mut self, line: &str) -> io::Result<()> {
        self.writer.write_all(line.as_bytes())?;
        self.writer.write_all(b"\n")
    }

    /// Next message, or `None` when the server closed the connection.
    pub fn recv(&mut self) -> io::Result<Option<ServerMessage>> {
        let mut line = String::new();
        if self.reader.read_line(&mut line)? == 0 {
            return Ok(None);
        }
        serde_json::from_str(&line)
            .map(Some)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }

    /// Sends a command and waits for its response, keeping any snapshots
    /// that arrive in between.
    pub fn request(&mut self, command: Command) -> io::Result<ServerMessage> {
        self.next_id += 1;
        let id = self.next_id;
        self.send_raw(&ClientMessage::Command { id, command })?;
        loop {
            match self.recv()? {
                Some(ServerMessage::Snapshot(s)) => self.snapshots.push(*s),
                Some(m @ ServerMessage::Response { id: rid, .. }) if rid == id => return Ok(m),
                Some(ServerMessage::Response { .. }) => continue,
                Some(m @ ServerMessage::Error { .. }) => return Ok(m),
                Some(ServerMessage::Welcome { .. }) => continue,
                None => {
                    return Err(io::Error::new(
                        io::ErrorKind::UnexpectedEof,
                        "server closed the connection",
                    ))
                }
            }
        }
    }

    /// Waits for the next snapshot.
    pub fn next_snapshot(&mut self) -> io::Result<Snapshot> {
        loop {
            match self.recv()? {
                Some(ServerMessage::Snapshot(s)) => return Ok(*s),
                Some(_) => continue,
                None => {
                    return Err(io::Error::new(
                        io::ErrorKind::UnexpectedEof,
                        "server closed the connection",
                    ))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outbox_keeps_latest_snapshot_and_all_messages() {
        use bvl_core::world::{Environment, Frame, Simulation};
        let ob = Outbox::default();
        let mut sim = Simulation::new(Environment::new(Frame::default()), 1);
        for t in 0..5 {
            sim.tick = t;
            ob.offer_snapshot(Snapshot::of(&sim, false, false));
            ob.push(ServerMessage::Error {
                message: format!("m{t}"),
            });
        }
        let mut got = Vec::new();
        for _ in 0..6 {
            got.push(ob.next().unwrap());
        }
        for (t, m) in got.iter().take(5).enumerate() {
            assert_eq!(
                m,
                &ServerMessage::Error {
                    message: format!("m{t}")
                }
            );
        }
        match &got[5] {
            ServerMessage::Snapshot(s) => assert_eq!(s.tick, 4),
            other => panic!("{other:?}"),
        }
        ob.close();
        assert!(ob.next().is_none());
    }
}
