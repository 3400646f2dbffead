//! Socket front end: newline-delimited messages over TCP, and the same
//! payloads as WebSocket text frames.
//!
//! The engine runs on its own thread. Connections hand it commands through a
//! queue and read the latest snapshot from a shared slot, so a slow client
//! never holds up a frame.

use std::collections::HashSet;
use std::io::{self, BufRead, BufReader, Write};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError, Sender};
use std::sync::{Arc, Mutex, RwLock};
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use navloop_core::protocol::{
    decode, encode, encode_payload, Command, Message, Role, Snapshot, PROTOCOL_VERSION,
};

use crate::host::EngineHost;

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub listen: String,
    /// Optional second listener speaking WebSocket.
    pub ws_listen: Option<String>,
    /// Snapshots per second sent to each client.
    pub snapshot_hz: f64,
    /// Simulated seconds per wall-clock second; 0 runs unpaced.
    pub time_scale: f64,
}

impl Default for ServerConfig {
    fn default() -> Self {
        Self { listen: "127.0.0.1:7878".into(), ws_listen: None, snapshot_hz: 10.0, time_scale: 1.0 }
    }
}

struct Request {
    command: Command,
    reply: Sender<Result<(), String>>,
}

struct Shared {
    latest: RwLock<Snapshot>,
    operator_taken: AtomicBool,
    shutdown: AtomicBool,
}

/// A running service. Dropping it leaves the threads running; call
/// [`Service::shutdown`] to stop them.
pub struct Service {
    pub addr: SocketAddr,
    pub ws_addr: Option<SocketAddr>,
    shared: Arc<Shared>,
    threads: Vec<JoinHandle<()>>,
    engine: Option<JoinHandle<EngineHost>>,
}

impl Service {
    /// Stop accepting, stop the engine and hand back its final state.
    pub fn shutdown(mut self) -> EngineHost {
        self.shared.shutdown.store(true, Ordering::SeqCst);
        // wake the blocking accept calls
        let _ = TcpStream::connect(self.addr);
        if let Some(ws) = self.ws_addr {
            let _ = TcpStream::connect(ws);
        }
        for t in self.threads.drain(..) {
            let _ = t.join();
        }
        self.engine.take().expect("engine thread").join().expect("engine thread panicked")
    }

    /// Block until the engine thread exits.
    pub fn wait(mut self) {
        if let Some(e) = self.engine.take() {
            let _ = e.join();
        }
    }
}

fn bind(addr: &str) -> io::Result<TcpListener> {
    let addr = addr
        .to_socket_addrs()?
        .next()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, format!("cannot resolve {addr}")))?;
    TcpListener::bind(addr)
}

pub fn serve(host: EngineHost, config: ServerConfig) -> io::Result<Service> {
    let listener = bind(&config.listen)?;
    let addr = listener.local_addr()?;
    let ws_listener = config.ws_listen.as_deref().map(bind).transpose()?;
    let ws_addr = ws_listener.as_ref().map(|l| l.local_addr()).transpose()?;

    let shared = Arc::new(Shared {
        latest: RwLock::new(host.snapshot(0)),
        operator_taken: AtomicBool::new(false),
        shutdown: AtomicBool::new(false),
    });
    let (tx, rx) = mpsc::channel::<Request>();
    let engine = {
        let shared = Arc::clone(&shared);
        let time_scale = config.time_scale;
        thread::Builder::new().name("engine".into()).spawn(move || engine_loop(host, rx, shared, time_scale))?
    };

    let period = Duration::from_secs_f64(1.0 / config.snapshot_hz.max(0.1));
    let mut threads = Vec::new();
    {
        let shared = Arc::clone(&shared);
        let tx = tx.clone();
        threads.push(thread::Builder::new().name("accept-tcp".into()).spawn(move || {
            accept_loop(listener, shared, tx, period, Transport::Lines)
        })?);
    }
    if let Some(l) = ws_listener {
        let shared = Arc::clone(&shared);
        threads.push(thread::Builder::new().name("accept-ws".into()).spawn(move || {
            accept_loop(l, shared, tx, period, Transport::WebSocket)
        })?);
    }
    Ok(Service { addr, ws_addr, shared, threads, engine: Some(engine) })
}

fn engine_loop(mut host: EngineHost, rx: Receiver<Request>, shared: Arc<Shared>, time_scale: f64) -> EngineHost {
    let frame = Duration::from_secs_f64(navloop_core::engine::DEFAULT_DT / time_scale.max(1e-9));
    let publish = |host: &EngineHost| {
        *shared.latest.write().expect("snapshot slot") = host.snapshot(0);
    };
    let mut next_frame = Instant::now();
    while !shared.shutdown.load(Ordering::SeqCst) {
        // commands are applied between frames, in arrival order
        while let Ok(req) = rx.try_recv() {
            let result = host.handle(&req.command);
            publish(&host);
            let _ = req.reply.send(result);
        }
        let live = host.tick();
        publish(&host);
        if !live {
            // nothing to simulate; wait for a command instead of spinning
            match rx.recv_timeout(Duration::from_millis(20)) {
                Ok(req) => {
                    let result = host.handle(&req.command);
                    publish(&host);
                    let _ = req.reply.send(result);
                }
                Err(RecvTimeoutError::Timeout) => {}
                Err(RecvTimeoutError::Disconnected) => break,
            }
            next_frame = Instant::now();
            continue;
        }
        if time_scale > 0.0 {
            next_frame += frame;
            let now = Instant::now();
            if next_frame > now {
                thread::sleep(next_frame - now);
            } else if now - next_frame > Duration::from_millis(250) {
                // fell far behind; do not try to catch up in a burst
                next_frame = now;
            }
        }
    }
    host
}

#[derive(Clone, Copy)]
enum Transport {
    Lines,
    WebSocket,
}

fn accept_loop(listener: TcpListener, shared: Arc<Shared>, tx: Sender<Request>, period: Duration, transport: Transport) {
    let mut conns = Vec::new();
    for stream in listener.incoming() {
        if shared.shutdown.load(Ordering::SeqCst) {
            break;
        }
        let Ok(stream) = stream else { continue };
        let shared = Arc::clone(&shared);
        let tx = tx.clone();
        conns.push(thread::spawn(move || {
            let role = claim_role(&shared);
            let result = match transport {
                Transport::Lines => serve_lines(stream, &shared, &tx, role, period),
                Transport::WebSocket => serve_ws(stream, &shared, &tx, role, period),
            };
            if let Err(e) = result {
                log::debug!("connection closed: {e}");
            }
            if role == Role::Operator {
                shared.operator_taken.store(false, Ordering::SeqCst);
            }
        }));
    }
    for c in conns {
        let _ = c.join();
    }
}

fn claim_role(shared: &Shared) -> Role {
    match shared.operator_taken.compare_exchange(false, true, Ordering::SeqCst, Ordering::SeqCst) {
        Ok(_) => Role::Operator,
        Err(_) => Role::Spectator,
    }
}

/// Per-connection command handling, shared by both transports.
struct Conn<'a> {
    role: Role,
    tx: &'a Sender<Request>,
    seen: HashSet<u64>,
}

impl<'a> Conn<'a> {
    fn new(role: Role, tx: &'a Sender<Request>) -> Self {
        Self { role, tx, seen: HashSet::new() }
    }

    fn welcome(&self) -> Message {
        Message::Welcome { role: self.role, protocol: PROTOCOL_VERSION }
    }

    /// Reply to one incoming message.
    fn respond(&mut self, text: &str) -> Option<Message> {
        if text.trim().is_empty() {
            return None;
        }
        let reply = match decode(text) {
            Ok(Message::Command { command_id, command, .. }) => {
                if self.role != Role::Operator {
                    Message::ack_err(command_id, "occupied")
                } else if !self.seen.insert(command_id) {
                    Message::ack_err(command_id, "duplicate commandId")
                } else {
                    match self.submit(command) {
                        Ok(()) => Message::ack_ok(command_id),
                        Err(e) => Message::ack_err(command_id, e),
                    }
                }
            }
            Ok(other) => Message::Error { message: format!("clients may only send commands, got {}", kind(&other)) },
            Err(e) => Message::Error { message: e.to_string() },
        };
        Some(reply)
    }

    fn submit(&self, command: Command) -> Result<(), String> {
        let (reply, wait) = mpsc::channel();
        self.tx.send(Request { command, reply }).map_err(|_| "engine stopped".to_string())?;
        wait.recv().map_err(|_| "engine stopped".to_string())?
    }
}

fn snapshot(shared: &Shared, seq: &mut u64) -> Message {
    *seq += 1;
    let mut s = shared.latest.read().expect("snapshot slot").clone();
    s.seq = *seq;
    Message::Snapshot(s)
}

fn kind(m: &Message) -> &'static str {
    match m {
        Message::Welcome { .. } => "welcome",
        Message::Command { .. } => "command",
        Message::Ack { .. } => "ack",
        Message::Snapshot(_) => "snapshot",
        Message::Error { .. } => "error",
    }
}

fn serve_lines(
    stream: TcpStream,
    shared: &Shared,
    tx: &Sender<Request>,
    role: Role,
    period: Duration,
) -> io::Result<()> {
    let mut conn = Conn::new(role, tx);
    let writer = Mutex::new(stream.try_clone()?);
    let closed = AtomicBool::new(false);
    let send = |m: &Message| -> io::Result<()> {
        let mut w = writer.lock().expect("writer");
        w.write_all(encode(m).as_bytes())?;
        w.flush()
    };
    send(&conn.welcome())?;

    thread::scope(|scope| {
        scope.spawn(|| {
            let mut seq = 0;
            while !closed.load(Ordering::SeqCst) && !shared.shutdown.load(Ordering::SeqCst) {
                // hold the writer while reading the slot so a snapshot taken
                // before an ack cannot be sent after it
                let mut w = writer.lock().expect("writer");
                let snap = snapshot(shared, &mut seq);
                if w.write_all(encode(&snap).as_bytes()).and_then(|_| w.flush()).is_err() {
                    break;
                }
                drop(w);
                thread::sleep(period);
            }
            closed.store(true, Ordering::SeqCst);
            let _ = stream.shutdown(std::net::Shutdown::Both);
        });

        let reader = BufReader::new(stream.try_clone()?);
        let result = (|| {
            for line in reader.lines() {
                let line = line?;
                if shared.shutdown.load(Ordering::SeqCst) {
                    break;
                }
                if let Some(r) = conn.respond(&line) {
                    send(&r)?;
                }
            }
            Ok(())
        })();
        closed.store(true, Ordering::SeqCst);
        result
    })
}

fn serve_ws(stream: TcpStream, shared: &Shared, tx: &Sender<Request>, role: Role, period: Duration) -> io::Result<()> {
    let to_io = |e: tungstenite::Error| io::Error::other(e.to_string());
    let mut ws = tungstenite::accept(stream).map_err(|e| io::Error::other(e.to_string()))?;
    ws.get_ref().set_read_timeout(Some(Duration::from_millis(10)))?;
    let mut conn = Conn::new(role, tx);
    ws.send(tungstenite::Message::text(encode_payload(&conn.welcome()))).map_err(to_io)?;
    let mut seq = 0;
    let mut next_snapshot = Instant::now();
    while !shared.shutdown.load(Ordering::SeqCst) {
        if Instant::now() >= next_snapshot {
            let snap = snapshot(shared, &mut seq);
            ws.send(tungstenite::Message::text(encode_payload(&snap))).map_err(to_io)?;
            next_snapshot += period;
        }
        match ws.read() {
            Ok(tungstenite::Message::Text(text)) => {
                if let Some(reply) = conn.respond(text.as_str()) {
                    ws.send(tungstenite::Message::text(encode_payload(&reply))).map_err(to_io)?;
                }
            }
            Ok(tungstenite::Message::Close(_)) => break,
            Ok(_) => {}
            Err(tungstenite::Error::Io(e))
                if matches!(e.kind(), io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut) => {}
            Err(tungstenite::Error::ConnectionClosed | tungstenite::Error::AlreadyClosed) => break,
            Err(e) => return Err(to_io(e)),
        }
    }
    Ok(())
}
