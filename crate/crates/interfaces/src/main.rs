use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use bvl_core::world::persist::Document;
use bvl_core::world::scenario::{run_scenario, RunOptions, Scenario, SCENARIO_FORMAT};
use bvl_core::world::schema::document_schemas;
use bvl_core::world::{TraceOptions, WorldError};
use bvl_interfaces::report::document_report;
use bvl_interfaces::snapshot::{AnimatSnapshot, EnvironmentSummary};
use bvl_interfaces::{
    load_initial, read_log, serve, ControlSession, ServerOptions, SessionError, Snapshot,
};
use clap::{Parser, Subcommand};

/// Behaviour laboratory: run scenarios, inspect saved state, serve live
/// clients and replay command logs.
#[derive(Debug, Parser)]
#[command(name = "bvl", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Run a scenario headless and check its assertions.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Tick ceiling for every stage.
        #[arg(long)]
        ticks: Option<u64>,
        /// Write trace records as JSON lines.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        dump_blackboard: bool,
        /// Save the final simulation document.
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Summarise a saved document or scenario.
    Inspect {
        path: PathBuf,
        /// Print a JSON snapshot instead of the text report.
        #[arg(long)]
        json: bool,
        /// Include blackboards in the JSON snapshot.
        #[arg(long)]
        blackboard: bool,
    },
    /// Write the JSON schema of every document format into a directory.
    Schema {
        #[arg(long, default_value = "schemas")]
        out: PathBuf,
    },
    /// Serve a scenario's first stage, or a saved simulation, over TCP.
    Serve {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value = "127.0.0.1:7878")]
        bind: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Stop advancing on its own at this tick.
        #[arg(long)]
        ticks: Option<u64>,
        #[arg(long)]
        delay_ms: Option<u64>,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        dump_blackboard: bool,
        /// Append every received command to this file.
        #[arg(long)]
        log: Option<PathBuf>,
        #[arg(long)]
        paused: bool,
    },
    /// Re-run a command log against its starting simulation.
    Replay {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Keep ticking after the last command until this tick.
        #[arg(long)]
        ticks: Option<u64>,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        dump_blackboard: bool,
        #[arg(long)]
        save: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(exit_code(&e))
        }
    }
}

/// The error chain, skipping causes already quoted by their parent.
fn describe(err: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in err.chain() {
        let msg = cause.to_string();
        if !out.contains(&msg) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&msg);
        }
    }
    out
}

/// 2 for missing or unreadable files, 3 for malformed documents, 4 for
/// anything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    fn world(w: &WorldError) -> u8 {
        match w {
            WorldError::Io { .. } => 2,
            WorldError::Malformed(_)
            | WorldError::UnknownFormat { .. }
            | WorldError::WrongDocument { .. }
            | WorldError::Scenario(_) => 3,
            _ => 4,
        }
    }
    for cause in err.chain() {
        if let Some(w) = cause.downcast_ref::<WorldError>() {
            return world(w);
        }
        if let Some(SessionError::World(w)) = cause.downcast_ref::<SessionError>() {
            return world(w);
        }
        if cause.is::<serde_json::Error>() {
            return 3;
        }
    }
    4
}

fn dispatch(cmd: Cmd) -> Result<u8> {
    match cmd {
        Cmd::Run {
            scenario,
            seed,
            ticks,
            trace,
            dump_blackboard,
            save,
        } => run(
            &scenario,
            seed,
            ticks,
            trace.as_deref(),
            dump_blackboard,
            save.as_deref(),
        ),
        Cmd::Inspect {
            path,
            json,
            blackboard,
        } => inspect(&path, json, blackboard).map(|_| 0),
        Cmd::Schema { out } => {
            fs::create_dir_all(&out).map_err(|source| WorldError::Io {
                path: out.clone(),
                source,
            })?;
            for (format, schema) in document_schemas() {
                let path = out.join(format!("{format}.schema.json"));
                let text = serde_json::to_string_pretty(&schema)? + "\n";
                fs::write(&path, text).map_err(|source| WorldError::Io {
                    path: path.clone(),
                    source,
                })?;
                println!("{}", path.display());
            }
            Ok(0)
        }
        Cmd::Serve {
            scenario,
            bind,
            seed,
            ticks,
            delay_ms,
            trace,
            dump_blackboard,
            log,
            paused,
        } => {
            let mut sim = load_initial(&scenario, seed)?;
            if let Some(d) = delay_ms {
                sim.delay_ms = d;
            }
            let session = ControlSession::new(sim, TraceOptions { dump_blackboard });
            let options = ServerOptions {
                start_paused: paused,
                max_ticks: ticks,
                trace: trace.as_deref().map(create_sink).transpose()?,
                log: log.as_deref().map(create_sink).transpose()?,
            };
            let handle = serve(&bind, session, options)
                .with_context(|| format!("cannot listen on {bind}"))?;
            println!("listening on {}", handle.local_addr());
            handle.wait();
            Ok(0)
        }
        Cmd::Replay {
            scenario,
            log,
            seed,
            ticks,
            trace,
            dump_blackboard,
            save,
        } => {
            let initial = load_initial(&scenario, seed)?;
            let entries = read_log(&log)?;
            let mut session =
                ControlSession::replay(initial, TraceOptions { dump_blackboard }, &entries, ticks)?;
            if let Some(path) = trace {
                let mut out = create_sink(&path)?;
                for r in session.take_records() {
                    writeln!(out, "{}", r.to_line())?;
                }
                out.flush()?;
            }
            if let Some(path) = save {
                Document::Simulation(Box::new(session.simulation().clone())).save(&path)?;
            }
            println!(
                "replayed {} commands, tick {}",
                entries.iter().filter(|e| e.accepted).count(),
                session.simulation().tick
            );
            Ok(0)
        }
    }
}

fn create_sink(path: &Path) -> Result<Box<dyn Write + Send>> {
    let file = File::create(path).map_err(|source| WorldError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(Box::new(BufWriter::new(file)))
}

fn read_text(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path).map_err(|source| WorldError::Io {
        path: path.to_path_buf(),
        source,
    })?)
}

fn run(
    path: &Path,
    seed: Option<u64>,
    ticks: Option<u64>,
    trace: Option<&Path>,
    dump_blackboard: bool,
    save: Option<&Path>,
) -> Result<u8> {
    let scenario = Scenario::from_json(&read_text(path)?)?;
    let opts = RunOptions {
        seed,
        ceiling: ticks,
        trace: TraceOptions { dump_blackboard },
    };
    let mut sink = trace.map(create_sink).transpose()?;
    let mut write_err = None;
    let outcome = run_scenario(&scenario, &opts, |r| {
        if let Some(out) = sink.as_mut() {
            if let Err(e) = writeln!(out, "{}", r.to_line()) {
                write_err.get_or_insert(e);
            }
        }
    })?;
    if let Some(out) = sink.as_mut() {
        out.flush()?;
    }
    if let Some(e) = write_err {
        return Err(e).context("writing trace");
    }
    for r in &outcome.results {
        println!("{r}");
    }
    let passed = outcome.results.iter().filter(|r| r.passed).count();
    println!(
        "{}: {passed}/{} assertions passed, final tick {}",
        scenario.name,
        outcome.results.len(),
        outcome.final_simulation().tick
    );
    if let Some(p) = save {
        Document::Simulation(Box::new(outcome.final_simulation().clone())).save(p)?;
    }
    Ok(if outcome.passed() { 0 } else { 1 })
}

fn inspect(path: &Path, json: bool, blackboard: bool) -> Result<()> {
    let text = read_text(path)?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(WorldError::from)?;
    if value.get("format").and_then(|f| f.as_str()) == Some(SCENARIO_FORMAT) {
        let sc = Scenario::from_json(&text)?;
        println!("scenario {} (seed {})", sc.name, sc.seed);
        if !sc.description.is_empty() {
            println!("  {}", sc.description);
        }
        for st in &sc.stages {
            println!(
                "stage {}: ceiling {}, {} stimulus specs, {} animats, {} carried",
                st.name,
                st.ceiling,
                st.world.stimuli.len(),
                st.animats.len(),
                st.carry.len()
            );
            for a in &st.assertions {
                println!("  assert {}", a.describe());
            }
        }
        return Ok(());
    }
    let doc = Document::from_json(&text)?;
    if !json {
        print!("{}", document_report(&doc));
        return Ok(());
    }
    let json = match doc {
        Document::Simulation(sim) => {
            serde_json::to_string_pretty(&Snapshot::of(&sim, false, blackboard))
        }
        Document::Animat(a) => serde_json::to_string_pretty(&AnimatSnapshot::of(&a, blackboard)),
        Document::Environment(env) => serde_json::to_string_pretty(&EnvironmentSummary {
            frame: env.frame,
            census: env.census(),
            stimuli: env.stimuli,
        }),
    }?;
    println!("{json}");
    Ok(())
}
