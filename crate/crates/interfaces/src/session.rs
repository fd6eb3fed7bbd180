use std::fs;
use std::path::Path;

use bvl_core::animat::{AnimatId, Pose};
use bvl_core::world::persist::Document;
use bvl_core::world::scenario::{build_stage, Scenario, SCENARIO_FORMAT};
use bvl_core::world::{Placement, Simulation, StimulusId, TraceOptions, TraceRecord, WorldError};
use serde::{Deserialize, Serialize};

use crate::command::{Command, Target};
use crate::snapshot::Snapshot;

#[derive(Debug, thiserror::Error)]
pub enum SessionError {
    #[error(transparent)]
    World(#[from] WorldError),
    #[error("value {value} for `{name}` is outside [0, 1]")]
    OutOfRange { name: String, value: f64 },
    #[error("log entry stamped {stamp} precedes tick {tick}")]
    LogOutOfOrder { stamp: u64, tick: u64 },
}

/// One line of the command log: the tick a command was applied before and
/// whether it took effect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub tick: u64,
    pub accepted: bool,
    pub command: Command,
}

/// Result payload of an accepted command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reply {
    Done,
    Stepped { tick: u64 },
    StimulusAdded { id: StimulusId },
    AnimatCreated { id: AnimatId },
}

/// Owns a simulation and applies client commands between ticks.
#[derive(Debug, Clone)]
pub struct ControlSession {
    sim: Simulation,
    initial: Simulation,
    paused: bool,
    log: Vec<LogEntry>,
    trace: TraceOptions,
    pending: Vec<TraceRecord>,
}

impl ControlSession {
    pub fn new(sim: Simulation, trace: TraceOptions) -> Self {
        Self {
            initial: sim.clone(),
            sim,
            paused: false,
            log: Vec::new(),
            trace,
            pending: Vec::new(),
        }
    }

    pub fn simulation(&self) -> &Simulation {
        &self.sim
    }

    pub fn is_paused(&self) -> bool {
        self.paused
    }

    pub fn log(&self) -> &[LogEntry] {
        &self.log
    }

    pub fn snapshot(&self, with_blackboard: bool) -> Snapshot {
        Snapshot::of(&self.sim, self.paused, with_blackboard)
    }

    /// Trace records produced since the last call.
    pub fn take_records(&mut self) -> Vec<TraceRecord> {
        std::mem::take(&mut self.pending)
    }

    /// Advances one tick regardless of pause state.
    pub fn advance(&mut self) {
        let records = self.sim.tick(&self.trace);
        self.pending.extend(records);
    }

    /// Applies a command and appends it to the log. A rejected command
    /// leaves the simulation untouched.
    pub fn apply(&mut self, command: Command) -> Result<Reply, SessionError> {
        let tick = self.sim.tick;
        let result = self.execute(&command, true);
        self.log.push(LogEntry {
            tick,
            accepted: result.is_ok(),
            command,
        });
        result
    }

    fn execute(
        &mut self,
        command: &Command,
        with_side_effects: bool,
    ) -> Result<Reply, SessionError> {
        match command {
            Command::Pause => self.paused = true,
            Command::Resume => self.paused = false,
            Command::Step { n } => {
                for _ in 0..*n {
                    self.advance();
                }
                return Ok(Reply::Stepped {
                    tick: self.sim.tick,
                });
            }
            Command::SetDelay { ms } => self.sim.delay_ms = *ms,
            Command::AddStimulus {
                kind,
                at,
                magnitude,
                footprint,
            } => {
                let mut env = self.sim.environment.clone();
                let mut rng = self.sim.rng.clone();
                let placement = at.map(Placement::At).unwrap_or(Placement::Random);
                let id = env.add_stimulus(*kind, placement, *magnitude, *footprint, &mut rng)?;
                self.sim.environment = env;
                self.sim.rng = rng;
                return Ok(Reply::StimulusAdded { id });
            }
            Command::RemoveStimulus { id } => {
                self.sim.environment.remove_stimulus(*id)?;
            }
            Command::CreateAnimat {
                id,
                config,
                pose,
                medium,
                params,
            } => {
                let id = self.sim.create_animat(
                    *id,
                    (**config).clone(),
                    Pose::new(pose.z, pose.x, pose.theta),
                    medium.build()?,
                    params.unwrap_or_default(),
                )?;
                return Ok(Reply::AnimatCreated { id });
            }
            Command::RemoveAnimat { animat } => {
                self.sim.remove_animat(*animat)?;
            }
            Command::SetParameter {
                animat,
                name,
                value,
            } => self.sim.set_parameter(*animat, name, *value)?,
            Command::SetInternal {
                animat,
                variable,
                value,
            } => {
                unit_range(&format!("{variable:?}").to_lowercase(), *value)?;
                self.sim.animat_mut(*animat)?.medium.set(*variable, *value);
            }
            Command::SetImmortal { animat, immortal } => {
                self.sim.animat_mut(*animat)?.config.immortal = *immortal;
            }
            Command::SetPose { animat, pose } => {
                let frame = self.sim.environment.frame;
                let a = self.sim.animat_mut(*animat)?;
                let p = Pose::new(pose.z, pose.x, pose.theta);
                if !frame.contains_disc(p.position(), a.config.body_radius) {
                    return Err(WorldError::OutsideFrame { z: p.z, x: p.x }.into());
                }
                a.pose = p;
            }
            Command::SetTrailMode { animat, mode } => {
                self.sim.animat_mut(*animat)?.trail = *mode;
            }
            Command::Save { target, path } => {
                if with_side_effects {
                    self.document(target)?.save(path)?;
                }
            }
            Command::Load { target, path } => self.load(target, path)?,
            Command::Reset => {
                self.sim = self.initial.clone();
                self.pending.clear();
            }
        }
        Ok(Reply::Done)
    }

    fn document(&self, target: &Target) -> Result<Document, WorldError> {
        Ok(match target {
            Target::Simulation => Document::Simulation(Box::new(self.sim.clone())),
            Target::Environment => Document::Environment(self.sim.environment.clone()),
            Target::Animat { animat } => Document::Animat(Box::new(
                self.sim
                    .animat(*animat)
                    .ok_or(WorldError::UnknownAnimat(*animat))?
                    .clone(),
            )),
        })
    }

    fn load(&mut self, target: &Target, path: &Path) -> Result<(), WorldError> {
        let doc = Document::load(path)?;
        match target {
            Target::Simulation => self.sim = doc.into_simulation()?,
            Target::Environment => self.sim.environment = doc.into_environment()?,
            Target::Animat { animat } => {
                let mut a = doc.into_animat()?;
                a.id = *animat;
                let mut next = self.sim.clone();
                let _ = next.remove_animat(*animat);
                next.insert_animat(a)?;
                self.sim = next;
            }
        }
        Ok(())
    }

    /// Rebuilds the state reached by a logged session: starting from
    /// `initial`, each accepted entry is applied once the simulation reaches
    /// its stamp, then ticks run until `until` if given. Saves are not
    /// repeated.
    pub fn replay(
        initial: Simulation,
        trace: TraceOptions,
        log: &[LogEntry],
        until: Option<u64>,
    ) -> Result<Self, SessionError> {
        let mut session = Self::new(initial, trace);
        for entry in log.iter().filter(|e| e.accepted) {
            if entry.tick < session.sim.tick {
                return Err(SessionError::LogOutOfOrder {
                    stamp: entry.tick,
                    tick: session.sim.tick,
                });
            }
            while session.sim.tick < entry.tick {
                session.advance();
            }
            let result = session.execute(&entry.command, false);
            session.log.push(LogEntry {
                tick: entry.tick,
                accepted: result.is_ok(),
                command: entry.command.clone(),
            });
            result?;
        }
        if let Some(end) = until {
            while session.sim.tick < end {
                session.advance();
            }
        }
        Ok(session)
    }
}

fn unit_range(name: &str, value: f64) -> Result<(), SessionError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(SessionError::OutOfRange {
            name: name.to_string(),
            value,
        })
    }
}

/// Reads a starting simulation from either a scenario (its first stage) or
/// a saved simulation document.
pub fn load_initial(path: &Path, seed: Option<u64>) -> Result<Simulation, WorldError> {
    let text = fs::read_to_string(path).map_err(|source| WorldError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    if value.get("format").and_then(|f| f.as_str()) == Some(SCENARIO_FORMAT) {
        let sc = Scenario::from_json(&text)?;
        return build_stage(&sc, 0, seed.unwrap_or(sc.seed), None);
    }
    let mut sim = Document::from_json(&text)?.into_simulation()?;
    if let Some(s) = seed {
        sim.seed = s;
    }
    Ok(sim)
}

pub fn write_log(path: &Path, log: &[LogEntry]) -> Result<(), WorldError> {
    let mut text = String::new();
    for e in log {
        text.push_str(&serde_json::to_string(e)?);
        text.push('\n');
    }
    fs::write(path, text).map_err(|source| WorldError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_log(path: &Path) -> Result<Vec<LogEntry>, WorldError> {
    let text = fs::read_to_string(path).map_err(|source| WorldError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(WorldError::from))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use bvl_core::animat::{AnimatConfig, MediumVariable, TrailMode};
    use bvl_core::beca::StimulusKind;
    use bvl_core::geometry::Point;
    use bvl_core::world::scenario::MediumSpec;
    use bvl_core::world::{Environment, Frame};

    fn session() -> ControlSession {
        let mut env = Environment::new(Frame::default());
        env.insert(
            StimulusKind::Food,
            Point::new(60.0, 50.0),
            3.0,
            bvl_core::world::Footprint::default_for(StimulusKind::Food),
        )
        .unwrap();
        let mut sim = Simulation::new(env, 9);
        sim.create_animat(
            Some(AnimatId(1)),
            AnimatConfig::default(),
            Pose::new(50.0, 50.0, 0.0),
            MediumSpec {
                hunger: 0.6,
                ..MediumSpec::default()
            }
            .build()
            .unwrap(),
            Default::default(),
        )
        .unwrap();
        ControlSession::new(sim, TraceOptions::default())
    }

    #[test]
    fn rejected_commands_change_nothing() {
        let mut s = session();
        let before = s.simulation().clone();
        let bad = [
            Command::SetParameter {
                animat: AnimatId(1),
                name: "phi".into(),
                value: 1.2,
            },
            Command::SetParameter {
                animat: AnimatId(1),
                name: "omega".into(),
                value: 0.5,
            },
            Command::SetInternal {
                animat: AnimatId(1),
                variable: MediumVariable::Hunger,
                value: -0.1,
            },
            Command::SetPose {
                animat: AnimatId(1),
                pose: Pose::new(200.0, 0.0, 0.0),
            },
            Command::RemoveAnimat {
                animat: AnimatId(4),
            },
            Command::RemoveStimulus { id: StimulusId(77) },
            Command::AddStimulus {
                kind: StimulusKind::Water,
                at: Some(Point::new(-1.0, 5.0)),
                magnitude: None,
                footprint: None,
            },
        ];
        for c in bad {
            assert!(s.apply(c).is_err());
        }
        assert_eq!(s.simulation(), &before);
        assert_eq!(s.log().len(), 7);
        assert!(s.log().iter().all(|e| !e.accepted));
    }

    #[test]
    fn log_is_tick_stamped() {
        let mut s = session();
        s.apply(Command::Step { n: 3 }).unwrap();
        s.apply(Command::SetTrailMode {
            animat: AnimatId(1),
            mode: TrailMode::Deficit,
        })
        .unwrap();
        s.advance();
        s.apply(Command::Pause).unwrap();
        let stamps: Vec<u64> = s.log().iter().map(|e| e.tick).collect();
        assert_eq!(stamps, vec![0, 3, 4]);
        assert!(s.is_paused());
    }

    #[test]
    fn reset_restores_initial_state() {
        let mut s = session();
        let initial = s.simulation().clone();
        s.apply(Command::Step { n: 10 }).unwrap();
        s.apply(Command::AddStimulus {
            kind: StimulusKind::Water,
            at: None,
            magnitude: None,
            footprint: None,
        })
        .unwrap();
        s.apply(Command::Reset).unwrap();
        assert_eq!(s.simulation(), &initial);
    }

    #[test]
    fn replay_reproduces_live_session() {
        let mut live = session();
        let initial = live.simulation().clone();
        live.apply(Command::Step { n: 5 }).unwrap();
        for _ in 0..7 {
            live.advance();
        }
        live.apply(Command::AddStimulus {
            kind: StimulusKind::Water,
            at: None,
            magnitude: None,
            footprint: None,
        })
        .unwrap();
        live.apply(Command::SetParameter {
            animat: AnimatId(1),
            name: "alpha".into(),
            value: 0.3,
        })
        .unwrap();
        let _ = live.apply(Command::RemoveAnimat {
            animat: AnimatId(9),
        });
        for _ in 0..20 {
            live.advance();
        }
        let replayed = ControlSession::replay(
            initial,
            TraceOptions::default(),
            live.log(),
            Some(live.simulation().tick),
        )
        .unwrap();
        assert_eq!(replayed.simulation(), live.simulation());
    }

    #[test]
    fn save_and_load_animat() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.json");
        let mut s = session();
        s.apply(Command::Step { n: 4 }).unwrap();
        s.apply(Command::Save {
            target: Target::Animat {
                animat: AnimatId(1),
            },
            path: path.clone(),
        })
        .unwrap();
        let saved = s.simulation().animat(AnimatId(1)).unwrap().clone();
        s.apply(Command::Load {
            target: Target::Animat {
                animat: AnimatId(2),
            },
            path: path.clone(),
        })
        .unwrap();
        let copy = s.simulation().animat(AnimatId(2)).unwrap();
        assert_eq!(copy.beca, saved.beca);
        assert_eq!(copy.medium, saved.medium);
        let env_path = dir.path().join("a-env.json");
        assert!(s
            .apply(Command::Load {
                target: Target::Environment,
                path: path.clone(),
            })
            .is_err());
        assert!(s
            .apply(Command::Load {
                target: Target::Environment,
                path: env_path,
            })
            .is_err());
    }
}
