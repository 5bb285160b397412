//! UI bridge over TCP. Every client receives all events; the first client
//! to send a command becomes the controller, and commands from anyone else
//! are refused until it disconnects.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::path::PathBuf;
use std::sync::mpsc::{self, RecvTimeoutError, Sender};
use std::time::{Duration, Instant};

use wise_core::bridge::{BridgeController, Command, Event};
use wise_core::SensorFrameSet;

use crate::error::CliError;
use crate::ingest::{Ingest, Input, Next};
use crate::settings::load_profile;
use crate::workflows::load_session;

const TICK: Duration = Duration::from_millis(20);

pub struct Options {
    pub listen: String,
    pub session: Option<PathBuf>,
    pub source: Option<String>,
    pub exercise_dir: PathBuf,
    pub profile: Option<PathBuf>,
    pub exit_when_idle: bool,
}

enum Msg {
    Connected(u64, TcpStream),
    Line(u64, String),
    Gone(u64),
    Frames(SensorFrameSet),
    SourceEnded,
}

fn accept_loop(listener: TcpListener, tx: Sender<Msg>) {
    for (id, stream) in (1u64..).zip(listener.incoming()) {
        let Ok(stream) = stream else { continue };
        let Ok(writer) = stream.try_clone() else { continue };
        if tx.send(Msg::Connected(id, writer)).is_err() {
            return;
        }
        let tx = tx.clone();
        std::thread::spawn(move || {
            for line in BufReader::new(stream).lines() {
                let Ok(line) = line else { break };
                if tx.send(Msg::Line(id, line)).is_err() {
                    return;
                }
            }
            let _ = tx.send(Msg::Gone(id));
        });
    }
}

fn source_loop(mut ingest: Ingest, tx: Sender<Msg>) {
    loop {
        match ingest.next(Duration::from_millis(200)) {
            Ok(Next::Item(Input::Set(set))) => {
                if tx.send(Msg::Frames(set)).is_err() {
                    return;
                }
            }
            Ok(Next::Item(_)) | Ok(Next::Idle) => {}
            Ok(Next::End) => break,
            Err(e) => {
                eprintln!("{e}");
                break;
            }
        }
    }
    let _ = tx.send(Msg::SourceEnded);
}

struct Clients {
    streams: BTreeMap<u64, TcpStream>,
    controller: Option<u64>,
}

impl Clients {
    fn send(&mut self, id: u64, line: &str) {
        let ok = self.streams.get_mut(&id).is_some_and(|s| writeln!(s, "{line}").is_ok());
        if !ok {
            self.drop_client(id);
        }
    }

    fn broadcast(&mut self, events: &[Event]) {
        if events.is_empty() {
            return;
        }
        let text: String = events.iter().map(|e| e.render() + "\n").collect();
        let failed: Vec<u64> = self
            .streams
            .iter_mut()
            .filter_map(|(id, s)| s.write_all(text.as_bytes()).is_err().then_some(*id))
            .collect();
        for id in failed {
            self.drop_client(id);
        }
    }

    fn drop_client(&mut self, id: u64) {
        self.streams.remove(&id);
        if self.controller == Some(id) {
            self.controller = None;
        }
    }
}

pub fn run(opts: Options) -> Result<(), CliError> {
    let profile = load_profile(opts.profile.as_deref())?;
    let mut controller = match &opts.session {
        Some(p) => BridgeController::with_session(load_session(p)?),
        None => BridgeController::default(),
    };
    controller.jcs = profile.jcs();
    controller.exercise_dir = opts.exercise_dir.clone();

    let listener = TcpListener::bind(&opts.listen).map_err(|e| CliError::io(&opts.listen, e))?;
    println!("LISTENING {}", listener.local_addr()?);
    std::io::stdout().flush()?;

    let (tx, rx) = mpsc::channel();
    {
        let tx = tx.clone();
        std::thread::spawn(move || accept_loop(listener, tx));
    }
    if let Some(src) = &opts.source {
        let window = profile.config.window_ms.unwrap_or(wise_core::stream::assemble::DEFAULT_WINDOW_MS);
        let ingest = Ingest::open(src, window, profile.offsets)?;
        let tx = tx.clone();
        std::thread::spawn(move || source_loop(ingest, tx));
    }
    drop(tx);

    let mut clients = Clients { streams: BTreeMap::new(), controller: None };
    let mut seen_client = false;
    let mut last_tick = Instant::now();
    loop {
        match rx.recv_timeout(TICK.saturating_sub(last_tick.elapsed())) {
            Ok(Msg::Connected(id, stream)) => {
                seen_client = true;
                clients.streams.insert(id, stream);
                let mut hello = vec![Event::calib(&controller.calib)];
                if let Some(s) = &controller.session {
                    hello.push(Event::playback(&controller.cursor, s));
                }
                let text: Vec<String> = hello.iter().map(Event::render).collect();
                for line in text {
                    clients.send(id, &line);
                }
            }
            Ok(Msg::Line(id, line)) => {
                let line = line.trim();
                if line.is_empty() {
                    continue;
                }
                if *clients.controller.get_or_insert(id) != id {
                    clients.send(id, "ERR NOT_CONTROLLER another client holds control");
                    continue;
                }
                match Command::parse(line).and_then(|cmd| controller.handle(&cmd)) {
                    Ok(events) => clients.broadcast(&events),
                    Err(e) => clients.send(id, &format!("ERR {} {}", e.code(), e)),
                }
            }
            Ok(Msg::Gone(id)) => clients.drop_client(id),
            Ok(Msg::Frames(set)) => {
                let events = controller.on_frames(&set);
                clients.broadcast(&events);
            }
            Ok(Msg::SourceEnded) => eprintln!("WARN SOURCE_ENDED live source closed"),
            Err(RecvTimeoutError::Timeout) => {}
            Err(RecvTimeoutError::Disconnected) => return Ok(()),
        }
        if last_tick.elapsed() >= TICK {
            let dt = last_tick.elapsed().as_secs_f64() * 1000.0;
            last_tick = Instant::now();
            let events = controller.tick(dt);
            clients.broadcast(&events);
        }
        if opts.exit_when_idle && seen_client && clients.streams.is_empty() {
            return Ok(());
        }
    }
}
