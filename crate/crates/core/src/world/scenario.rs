//! Declarative experiments: staged worlds, parameter overrides, and
//! assertions over the resulting trace.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::engine::Simulation;
use super::environment::{Environment, Footprint, Frame, Placement, StimulusId};
use super::rng::RngStream;
use super::trace::{TraceOptions, TraceRecord};
use super::{ParameterTarget, WorldError};
use crate::animat::perception;
use crate::animat::{
    in_perceptual_region, Animat, AnimatConfig, AnimatId, InternalMedium, MotorState, Need, Pose,
    TrailMode,
};
use crate::beca::{ActionSelection, BecaParameters, Behaviour, Blackboard, StimulusKind};
use crate::geometry::Point;

pub const SCENARIO_FORMAT: &str = "scenario.v1";

/// Ticks between assertion checks when stopping early.
const CHECK_EVERY: u64 = 25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct Scenario {
    pub format: String,
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub seed: u64,
    pub stages: Vec<Stage>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct Stage {
    pub name: String,
    /// Maximum number of ticks the stage runs.
    pub ceiling: u64,
    #[serde(default)]
    pub world: WorldSpec,
    #[serde(default)]
    pub animats: Vec<AnimatSpec>,
    /// Animats taken over from the end of the previous stage.
    #[serde(default)]
    pub carry: Vec<CarrySpec>,
    #[serde(default)]
    pub overrides: Vec<Override>,
    #[serde(default)]
    pub stop: StopRule,
    #[serde(default)]
    pub assertions: Vec<Assertion>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize, schemars::JsonSchema)]
pub struct WorldSpec {
    #[serde(default)]
    pub frame: Frame,
    #[serde(default)]
    pub stimuli: Vec<StimulusSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct StimulusSpec {
    pub kind: StimulusKind,
    /// Omitted for a random position.
    #[serde(default)]
    pub at: Option<Point>,
    /// Omitted for a random magnitude.
    #[serde(default)]
    pub magnitude: Option<f64>,
    #[serde(default)]
    pub footprint: Option<Footprint>,
    #[serde(default = "one")]
    pub count: u32,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(default)]
pub struct MediumSpec {
    pub hunger: f64,
    pub thirst: f64,
    pub fatigue: f64,
    pub safety: f64,
}

impl Default for MediumSpec {
    fn default() -> Self {
        Self {
            hunger: 0.0,
            thirst: 0.0,
            fatigue: 0.0,
            safety: 1.0,
        }
    }
}

impl MediumSpec {
    pub fn build(&self) -> Result<InternalMedium, WorldError> {
        for (name, value) in [
            ("hunger", self.hunger),
            ("thirst", self.thirst),
            ("fatigue", self.fatigue),
            ("safety", self.safety),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(WorldError::ValueOutOfRange {
                    name: name.into(),
                    value,
                });
            }
        }
        Ok(InternalMedium::new(
            self.hunger,
            self.thirst,
            self.fatigue,
            self.safety,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct AnimatSpec {
    pub id: AnimatId,
    #[serde(default)]
    pub config: AnimatConfig,
    pub pose: Pose,
    #[serde(default)]
    pub medium: MediumSpec,
    #[serde(default)]
    pub trail: TrailMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct CarrySpec {
    pub from: AnimatId,
    pub id: AnimatId,
    pub pose: Pose,
    /// Keeps the carried medium when omitted.
    #[serde(default)]
    pub medium: Option<MediumSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct Override {
    pub animat: AnimatId,
    pub parameter: String,
    pub value: f64,
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, schemars::JsonSchema,
)]
#[serde(rename_all = "snake_case")]
pub enum StopRule {
    /// Stop as soon as every assertion of the stage passes. A stage
    /// without assertions runs to its ceiling.
    #[default]
    AllPassed,
    Ceiling,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct SequenceStep {
    pub behaviour: Behaviour,
    /// Stage-relative ticks in which the run must start, inclusive.
    pub window: [u64; 2],
    #[serde(default = "one_tick")]
    pub min_duration: u64,
}

fn one_tick() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Assertion {
    /// Runs of the given behaviours occur in this order.
    Sequence {
        animat: AnimatId,
        steps: Vec<SequenceStep>,
    },
    /// Every executed behaviour belongs to the set.
    OnlyBehaviours {
        animat: AnimatId,
        behaviours: Vec<Behaviour>,
    },
    Never {
        animat: AnimatId,
        behaviour: Behaviour,
    },
    Died {
        animat: AnimatId,
    },
    Survived {
        animat: AnimatId,
    },
    /// Learned coupling from a neutral stimulus into a motivation.
    Coupling {
        animat: AnimatId,
        source: StimulusKind,
        target: Behaviour,
        #[serde(default)]
        at_least: Option<f64>,
        #[serde(default)]
        at_most: Option<f64>,
    },
    StimulusDepleted {
        stimulus: StimulusId,
    },
    /// The behaviour is executed after the variable first reached zero.
    BehaviourAfterZero {
        animat: AnimatId,
        behaviour: Behaviour,
        variable: Need,
    },
    /// The first run of the behaviour ends with the variable above a level.
    EpisodeEndLevel {
        animat: AnimatId,
        behaviour: Behaviour,
        variable: Need,
        above: f64,
    },
    /// After the stimulus is first perceived while `absent` is outside the
    /// perceptual region, the behaviour follows within `within` ticks.
    ResponseLatency {
        animat: AnimatId,
        stimulus: StimulusKind,
        behaviour: Behaviour,
        within: u64,
        #[serde(default)]
        absent: Option<StimulusKind>,
    },
}

impl Assertion {
    fn animat(&self) -> Option<AnimatId> {
        match self {
            Assertion::Sequence { animat, .. }
            | Assertion::OnlyBehaviours { animat, .. }
            | Assertion::Never { animat, .. }
            | Assertion::Died { animat }
            | Assertion::Survived { animat }
            | Assertion::Coupling { animat, .. }
            | Assertion::BehaviourAfterZero { animat, .. }
            | Assertion::EpisodeEndLevel { animat, .. }
            | Assertion::ResponseLatency { animat, .. } => Some(*animat),
            Assertion::StimulusDepleted { .. } => None,
        }
    }

    pub fn describe(&self) -> String {
        let names = |bs: &[Behaviour]| {
            bs.iter()
                .map(|b| b.as_str())
                .collect::<Vec<_>>()
                .join(" -> ")
        };
        match self {
            Assertion::Sequence { animat, steps } => {
                let bs: Vec<_> = steps.iter().map(|s| s.behaviour).collect();
                format!("animat {animat}: sequence {}", names(&bs))
            }
            Assertion::OnlyBehaviours { animat, behaviours } => {
                let list: Vec<_> = behaviours.iter().map(|b| b.as_str()).collect();
                format!("animat {animat}: only {}", list.join(", "))
            }
            Assertion::Never { animat, behaviour } => format!("animat {animat}: never {behaviour}"),
            Assertion::Died { animat } => format!("animat {animat}: died"),
            Assertion::Survived { animat } => format!("animat {animat}: survived"),
            Assertion::Coupling {
                animat,
                source,
                target,
                at_least,
                at_most,
            } => {
                let mut s = format!("animat {animat}: coupling {source} -> {target}");
                if let Some(v) = at_least {
                    s += &format!(" >= {v}");
                }
                if let Some(v) = at_most {
                    s += &format!(" <= {v}");
                }
                s
            }
            Assertion::StimulusDepleted { stimulus } => {
                format!("stimulus {} depleted", stimulus.0)
            }
            Assertion::BehaviourAfterZero {
                animat,
                behaviour,
                variable,
            } => format!("animat {animat}: {behaviour} after {variable:?} reached 0"),
            Assertion::EpisodeEndLevel {
                animat,
                behaviour,
                variable,
                above,
            } => format!("animat {animat}: first {behaviour} ends with {variable:?} > {above}"),
            Assertion::ResponseLatency {
                animat,
                stimulus,
                behaviour,
                within,
                absent,
            } => {
                let mut s =
                    format!("animat {animat}: {behaviour} within {within} ticks of {stimulus}");
                if let Some(k) = absent {
                    s += &format!(" without {k} in view");
                }
                s
            }
        }
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, WorldError> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let found = value
            .get("format")
            .and_then(|f| f.as_str())
            .unwrap_or("")
            .to_string();
        if found != SCENARIO_FORMAT {
            return Err(WorldError::UnknownFormat { found });
        }
        let sc: Scenario = serde_json::from_value(value)?;
        sc.validate()?;
        Ok(sc)
    }

    /// Structural checks run before any tick.
    pub fn validate(&self) -> Result<(), WorldError> {
        let bad = |msg: String| Err(WorldError::Scenario(msg));
        if self.format != SCENARIO_FORMAT {
            return Err(WorldError::UnknownFormat {
                found: self.format.clone(),
            });
        }
        if self.stages.is_empty() {
            return bad("a scenario needs at least one stage".into());
        }
        let mut previous: BTreeSet<AnimatId> = BTreeSet::new();
        for (i, st) in self.stages.iter().enumerate() {
            let ctx = |m: &str| format!("stage `{}`: {m}", st.name);
            if st.ceiling == 0 {
                return bad(ctx("ceiling must be positive"));
            }
            if i == 0 && !st.carry.is_empty() {
                return bad(ctx("the first stage cannot carry animats"));
            }
            let mut ids = BTreeSet::new();
            for a in &st.animats {
                if !ids.insert(a.id) {
                    return bad(ctx(&format!("duplicate animat id {}", a.id)));
                }
                a.config
                    .validate()
                    .map_err(|e| WorldError::Scenario(ctx(&e)))?;
                a.medium.build()?;
            }
            for c in &st.carry {
                if !ids.insert(c.id) {
                    return bad(ctx(&format!("duplicate animat id {}", c.id)));
                }
                if !previous.contains(&c.from) {
                    return bad(ctx(&format!(
                        "carried animat {} not in the previous stage",
                        c.from
                    )));
                }
                if let Some(m) = &c.medium {
                    m.build()?;
                }
            }
            for o in &st.overrides {
                if !ids.contains(&o.animat) {
                    return bad(ctx(&format!("override names unknown animat {}", o.animat)));
                }
                o.parameter.parse::<ParameterTarget>()?;
                if !(0.0..=1.0).contains(&o.value) {
                    return Err(WorldError::ValueOutOfRange {
                        name: o.parameter.clone(),
                        value: o.value,
                    });
                }
            }
            let placed: u32 = st.world.stimuli.iter().map(|s| s.count).sum();
            for a in &st.assertions {
                if let Some(id) = a.animat() {
                    if !ids.contains(&id) {
                        return bad(ctx(&format!("assertion names unknown animat {id}")));
                    }
                }
                match a {
                    Assertion::Sequence { steps, .. } => {
                        let mut last_start: Option<u64> = None;
                        for s in steps {
                            let [start, end] = s.window;
                            if start > end || end > st.ceiling {
                                return bad(ctx(&format!(
                                    "window [{start}, {end}] outside ceiling {}",
                                    st.ceiling
                                )));
                            }
                            if s.min_duration == 0 {
                                return bad(ctx("min_duration must be positive"));
                            }
                            if last_start.is_some_and(|l| start <= l) {
                                return bad(ctx("sequence windows must start in increasing order"));
                            }
                            last_start = Some(start);
                        }
                    }
                    Assertion::Coupling {
                        at_least, at_most, ..
                    } => {
                        if at_least.is_none() && at_most.is_none() {
                            return bad(ctx("coupling assertion needs at_least or at_most"));
                        }
                    }
                    Assertion::StimulusDepleted { stimulus } if stimulus.0 >= placed => {
                        return bad(ctx(&format!("no stimulus {}", stimulus.0)));
                    }
                    Assertion::ResponseLatency { within, .. } if *within > st.ceiling => {
                        return bad(ctx("latency beyond the ceiling"));
                    }
                    _ => {}
                }
            }
            previous = ids;
        }
        Ok(())
    }
}

/// Per-tick perception facts used by latency assertions.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub tick: u64,
    pub animat: AnimatId,
    pub perceived: Vec<StimulusKind>,
    pub in_region: Vec<StimulusKind>,
}

fn observe(sim: &Simulation) -> Vec<Observation> {
    let views: Vec<_> = sim.animats.iter().map(Animat::view).collect();
    sim.animats
        .iter()
        .map(|a| {
            let others: Vec<_> = views.iter().filter(|v| v.id != a.id).copied().collect();
            let r_p = a.perception_radius();
            let mut perceived: Vec<StimulusKind> = perception::perceive(
                &sim.environment,
                &others,
                &a.pose,
                r_p,
                a.config.body_radius,
            )
            .into_iter()
            .map(|p| p.kind)
            .collect();
            perceived.sort();
            perceived.dedup();
            let mut in_region: Vec<StimulusKind> = sim
                .environment
                .stimuli
                .iter()
                .map(|s| (s.kind, s.position))
                .chain(others.iter().map(|v| (v.kind, v.position)))
                .filter(|&(_, p)| in_perceptual_region(&a.pose, r_p, p))
                .map(|(k, _)| k)
                .collect();
            in_region.sort();
            in_region.dedup();
            Observation {
                tick: sim.tick,
                animat: a.id,
                perceived,
                in_region,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, schemars::JsonSchema)]
pub struct AssertionResult {
    pub stage: String,
    pub description: String,
    pub passed: bool,
    /// First tick at which the assertion was satisfied, when it has one.
    pub tick: Option<u64>,
    pub detail: String,
}

impl fmt::Display for AssertionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{mark} [{}] {}", self.stage, self.description)?;
        if let Some(t) = self.tick {
            write!(f, " (tick {t})")?;
        }
        if !self.detail.is_empty() {
            write!(f, ": {}", self.detail)?;
        }
        Ok(())
    }
}

/// Everything a stage produced, for assertion evaluation.
#[derive(Debug, Clone)]
pub struct StageRun {
    pub name: String,
    pub start_tick: u64,
    pub records: Vec<TraceRecord>,
    pub observations: Vec<Observation>,
    /// Animats that died, as they were when removed.
    pub departed: BTreeMap<AnimatId, Animat>,
    /// Tick at which each depleted stimulus disappeared.
    pub depleted: BTreeMap<StimulusId, u64>,
    pub simulation: Simulation,
}

impl StageRun {
    fn last_known(&self, id: AnimatId) -> Option<&Animat> {
        self.simulation
            .animat(id)
            .or_else(|| self.departed.get(&id))
    }

    fn records_of(&self, id: AnimatId) -> impl Iterator<Item = &TraceRecord> {
        self.records.iter().filter(move |r| r.animat == id)
    }
}

/// Maximal runs of identical executed behaviour: (behaviour, first tick,
/// length, index of last record).
fn runs<'a>(
    records: impl Iterator<Item = &'a TraceRecord>,
) -> Vec<(Behaviour, u64, u64, &'a TraceRecord)> {
    let mut out: Vec<(Behaviour, u64, u64, &TraceRecord)> = Vec::new();
    for r in records {
        match out.last_mut() {
            Some((b, start, len, last))
                if *b == r.behaviour && start.saturating_add(*len) == r.tick =>
            {
                *len += 1;
                *last = r;
            }
            _ => out.push((r.behaviour, r.tick, 1, r)),
        }
    }
    out
}

fn need_level(m: &InternalMedium, need: Need) -> f64 {
    match need {
        Need::Hunger => m.hunger,
        Need::Thirst => m.thirst,
        Need::Fatigue => m.fatigue,
    }
}

pub fn evaluate(assertion: &Assertion, run: &StageRun) -> AssertionResult {
    let (passed, tick, detail) = match assertion {
        Assertion::Sequence { animat, steps } => {
            let runs = runs(run.records_of(*animat));
            let mut after: Option<u64> = None;
            let mut first = None;
            let mut detail = String::new();
            let mut ok = true;
            for step in steps {
                let [lo, hi] = step.window;
                let found = runs.iter().find(|&&(b, start, len, _)| {
                    let rel = start - run.start_tick;
                    b == step.behaviour
                        && len >= step.min_duration
                        && rel >= lo
                        && rel <= hi
                        && after.is_none_or(|a| start > a)
                });
                match found {
                    Some(&(_, start, _, _)) => {
                        first.get_or_insert(start);
                        after = Some(start);
                        if !detail.is_empty() {
                            detail.push_str(", ");
                        }
                        detail += &format!("{}@{}", step.behaviour, start);
                    }
                    None => {
                        ok = false;
                        detail = format!("no {} run matched after {detail}", step.behaviour);
                        break;
                    }
                }
            }
            (ok, if ok { after } else { None }, detail)
        }
        Assertion::OnlyBehaviours { animat, behaviours } => {
            let mut n = 0;
            let stray = run.records_of(*animat).find(|r| {
                n += 1;
                !behaviours.contains(&r.behaviour)
            });
            match stray {
                Some(r) => (false, None, format!("{} at tick {}", r.behaviour, r.tick)),
                None => (n > 0, None, format!("{n} records")),
            }
        }
        Assertion::Never { animat, behaviour } => {
            match run.records_of(*animat).find(|r| r.behaviour == *behaviour) {
                Some(r) => (false, None, format!("seen at tick {}", r.tick)),
                None => (true, None, String::new()),
            }
        }
        Assertion::Died { animat } => match run.records_of(*animat).find(|r| !r.alive) {
            Some(r) => (true, Some(r.tick), String::new()),
            None => (false, None, "still alive".into()),
        },
        Assertion::Survived { animat } => {
            let alive = run.simulation.animat(*animat).is_some();
            (alive, None, String::new())
        }
        Assertion::Coupling {
            animat,
            source,
            target,
            at_least,
            at_most,
        } => match run.last_known(*animat) {
            Some(a) => {
                let v = a.beca.coupling.conditioned(*source, *target);
                let ok = at_least.is_none_or(|lo| v >= lo) && at_most.is_none_or(|hi| v <= hi);
                (ok, None, format!("{v:.4}"))
            }
            None => (false, None, "animat not found".into()),
        },
        Assertion::StimulusDepleted { stimulus } => match run.depleted.get(stimulus) {
            Some(&t) => (true, Some(t), String::new()),
            None => {
                let left = run
                    .simulation
                    .environment
                    .stimulus(*stimulus)
                    .map(|s| s.magnitude)
                    .unwrap_or(0.0);
                (false, None, format!("magnitude {left:.4} left"))
            }
        },
        Assertion::BehaviourAfterZero {
            animat,
            behaviour,
            variable,
        } => {
            let zero = run
                .records_of(*animat)
                .find(|r| need_level(&r.medium, *variable) <= 0.0)
                .map(|r| r.tick);
            match zero {
                None => (false, None, format!("{variable:?} never reached 0")),
                Some(z) => match run
                    .records_of(*animat)
                    .find(|r| r.tick > z && r.behaviour == *behaviour)
                {
                    Some(r) => (true, Some(r.tick), format!("{variable:?} reached 0 at {z}")),
                    None => (false, None, format!("{variable:?} reached 0 at {z}")),
                },
            }
        }
        Assertion::EpisodeEndLevel {
            animat,
            behaviour,
            variable,
            above,
        } => {
            let all = runs(run.records_of(*animat));
            let pos = all.iter().position(|&(b, ..)| b == *behaviour);
            match pos {
                Some(i) if i + 1 < all.len() => {
                    let last = all[i].3;
                    let level = need_level(&last.medium, *variable);
                    (
                        level > *above,
                        Some(last.tick),
                        format!("{variable:?} = {level:.4}"),
                    )
                }
                Some(_) => (false, None, "episode did not end".into()),
                None => (false, None, format!("{behaviour} never executed")),
            }
        }
        Assertion::ResponseLatency {
            animat,
            stimulus,
            behaviour,
            within,
            absent,
        } => {
            let cue = run.observations.iter().find(|o| {
                o.animat == *animat
                    && o.perceived.contains(stimulus)
                    && absent.is_none_or(|k| !o.in_region.contains(&k))
            });
            match cue {
                None => (false, None, format!("{stimulus} never perceived alone")),
                Some(o) => {
                    let hit = run.records_of(*animat).find(|r| {
                        r.tick >= o.tick && r.tick <= o.tick + within && r.behaviour == *behaviour
                    });
                    match hit {
                        Some(r) => (
                            true,
                            Some(r.tick),
                            format!("cue at {}, latency {}", o.tick, r.tick - o.tick),
                        ),
                        None => (false, None, format!("cue at {}", o.tick)),
                    }
                }
            }
        }
    };
    AssertionResult {
        stage: run.name.clone(),
        description: assertion.describe(),
        passed,
        tick,
        detail,
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Replaces the scenario seed.
    pub seed: Option<u64>,
    /// Replaces every stage ceiling.
    pub ceiling: Option<u64>,
    pub trace: TraceOptions,
}

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub stages: Vec<StageRun>,
    pub results: Vec<AssertionResult>,
}

impl ScenarioOutcome {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn records(&self) -> impl Iterator<Item = &TraceRecord> {
        self.stages.iter().flat_map(|s| s.records.iter())
    }

    pub fn final_simulation(&self) -> &Simulation {
        &self.stages.last().expect("at least one stage").simulation
    }
}

/// Builds the initial simulation of stage `index`.
pub fn build_stage(
    scenario: &Scenario,
    index: usize,
    seed: u64,
    previous: Option<&StageRun>,
) -> Result<Simulation, WorldError> {
    let st = &scenario.stages[index];
    let mut env = Environment::new(st.world.frame);
    let mut rng = if index == 0 {
        RngStream::named(seed, "world")
    } else {
        RngStream::named(seed, &format!("world-{index}"))
    };
    for s in &st.world.stimuli {
        for _ in 0..s.count {
            let placement = s.at.map(Placement::At).unwrap_or(Placement::Random);
            env.add_stimulus(s.kind, placement, s.magnitude, s.footprint, &mut rng)?;
        }
    }
    let mut sim = Simulation::new(env, seed);
    sim.rng = rng;
    sim.tick = previous.map(|p| p.simulation.tick).unwrap_or(0);
    for a in &st.animats {
        let pose = Pose::new(a.pose.z, a.pose.x, a.pose.theta);
        sim.create_animat(
            Some(a.id),
            a.config.clone(),
            pose,
            a.medium.build()?,
            BecaParameters::default(),
        )?;
        sim.animat_mut(a.id)?.trail = a.trail;
    }
    for c in &st.carry {
        let prev = previous
            .and_then(|p| p.simulation.animat(c.from))
            .ok_or_else(|| {
                WorldError::Scenario(format!(
                    "stage `{}`: animat {} did not survive the previous stage",
                    st.name, c.from
                ))
            })?;
        let mut a = prev.clone();
        a.id = c.id;
        a.pose = Pose::new(c.pose.z, c.pose.x, c.pose.theta);
        if let Some(m) = &c.medium {
            a.medium = m.build()?;
        }
        a.beca.blackboard = Blackboard::new(&a.beca.topology);
        a.scenario.clear();
        a.motor = MotorState::default();
        a.selected = ActionSelection::wander();
        a.executed = Behaviour::Wander;
        a.rng = RngStream::named(seed, &format!("animat-{}", c.id.0));
        sim.insert_animat(a)?;
    }
    for o in &st.overrides {
        sim.set_parameter(o.animat, &o.parameter, o.value)?;
    }
    Ok(sim)
}

/// Runs every stage in order. `on_record` sees each trace record as soon
/// as it is produced.
pub fn run_scenario(
    scenario: &Scenario,
    opts: &RunOptions,
    mut on_record: impl FnMut(&TraceRecord),
) -> Result<ScenarioOutcome, WorldError> {
    scenario.validate()?;
    let seed = opts.seed.unwrap_or(scenario.seed);
    let mut stages: Vec<StageRun> = Vec::new();
    let mut results = Vec::new();
    for (index, st) in scenario.stages.iter().enumerate() {
        let sim = build_stage(scenario, index, seed, stages.last())?;
        let mut run = StageRun {
            name: st.name.clone(),
            start_tick: sim.tick,
            records: Vec::new(),
            observations: Vec::new(),
            departed: BTreeMap::new(),
            depleted: BTreeMap::new(),
            simulation: sim,
        };
        let ceiling = opts.ceiling.unwrap_or(st.ceiling);
        let needs_observations = st
            .assertions
            .iter()
            .any(|a| matches!(a, Assertion::ResponseLatency { .. }));
        for n in 1..=ceiling {
            if needs_observations {
                run.observations.extend(observe(&run.simulation));
            }
            let out = run.simulation.step(&opts.trace);
            for r in &out.records {
                on_record(r);
            }
            run.records.extend(out.records);
            for a in out.removed {
                run.departed.insert(a.id, a);
            }
            for id in out.depleted {
                run.depleted.insert(id, run.simulation.tick - 1);
            }
            if run.simulation.animats.is_empty() {
                break;
            }
            if st.stop == StopRule::AllPassed
                && !st.assertions.is_empty()
                && n % CHECK_EVERY == 0
                && st.assertions.iter().all(|a| evaluate(a, &run).passed)
            {
                break;
            }
        }
        results.extend(st.assertions.iter().map(|a| evaluate(a, &run)));
        stages.push(run);
    }
    Ok(ScenarioOutcome { stages, results })
}
