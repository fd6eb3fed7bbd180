//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit when
//! any criterion fails. Runs as a plain binary so the report is always
//! printed.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use bvl_core::animat::perception::update_remembered;
use bvl_core::animat::{in_perceptual_region, AnimatId, PerceivedStimulus, Pose, SourceId};
use bvl_core::beca::ops::{
    attention, congruence, learning_update, persistence_pre_activation, saturate,
};
use bvl_core::beca::{BecaParameters, Behaviour, CouplingKey, ParamName, StimulusKind};
use bvl_core::geometry::Point;
use bvl_core::world::scenario::{build_stage, run_scenario, RunOptions, Scenario};
use bvl_core::world::{Document, Placement, Simulation, StimulusId, TraceOptions, TraceRecord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("equation oracle suite", equation_oracles),
        ("saturation property", saturation_property),
        ("scenario M1 motivated sequence", scenario_m1),
        ("scenario M2 without reactivity", scenario_m2),
        ("scenario M3 without attention", scenario_m3),
        ("scenario M4 reactive eating", scenario_m4),
        ("scenario C1 one-trial conditioning", scenario_c1),
        ("scenario C2 no conditioning", scenario_c2),
        ("extinction property", extinction),
        ("determinism and persistence", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let started = Instant::now();
        let verdict = check();
        let secs = started.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS  {name} ({secs:.2}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name} ({secs:.2}s): {detail}");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

// Equations.

const SAMPLES: usize = 1000;
const TOL: f64 = 1e-9;

fn params(rng: &mut ChaCha8Rng) -> BecaParameters {
    let mut v = [0.0; 7];
    v.iter_mut().for_each(|x| *x = rng.gen());
    BecaParameters::new(v[0], v[1], v[2], v[3], v[4], v[5], v[6]).unwrap()
}

fn equation_oracles() -> Verdict {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut worst: f64 = 0.0;
    let mut track = |name: &str, got: f64, want: f64| -> Result<(), String> {
        let err = (got - want).abs();
        worst = worst.max(err);
        ensure(err <= TOL, || format!("{name}: {got} vs oracle {want}"))
    };

    for _ in 0..SAMPLES {
        // Persistence pre-activation.
        let (kappa, prev, input): (f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen());
        let feedback: f64 = rng.gen();
        let lateral: f64 = -rng.gen::<f64>();
        let want = prev - kappa * prev + input + feedback + lateral;
        track(
            "pre-activation",
            persistence_pre_activation(kappa, prev, input, feedback, lateral),
            want,
        )?;

        // Hyperbolic saturation, rewritten over a common denominator.
        let atmp: f64 = rng.gen_range(0.0..5.0);
        let max: f64 = rng.gen_range(1e-3..=1.0);
        let want = if atmp > 0.0 {
            atmp * max * max / (atmp * max + 1.0)
        } else {
            0.0
        };
        track("saturation", saturate(atmp, max, true), want)?;

        // Attention in its divided form, valid while the key is non-zero.
        let (fa_key, key, sum): (f64, f64, f64) =
            (rng.gen(), rng.gen_range(1e-3..1.0), rng.gen_range(0.0..2.0));
        let (gamma, phi): (f64, f64) = (rng.gen(), rng.gen());
        let want = fa_key * key * (gamma + phi * sum / key);
        track("attention", attention(fa_key, key, gamma, phi, sum), want)?;

        // Congruence, expanded.
        let (fi, internal, alpha, ext, fd, drive): (f64, f64, f64, f64, f64, f64) = (
            rng.gen(),
            rng.gen(),
            rng.gen(),
            rng.gen_range(0.0..3.0),
            rng.gen(),
            rng.gen(),
        );
        let want = fi * internal * alpha + fi * internal * ext + fd * drive;
        track(
            "congruence",
            congruence(fi, internal, alpha, ext, fd, drive),
            want,
        )?;

        // Learning, both branches.
        let p = params(&mut rng);
        let fa: f64 = rng.gen();
        let input: f64 = if rng.gen_bool(0.3) { 0.0 } else { rng.gen() };
        let output: f64 = rng.gen();
        let want = if input > 0.0 {
            fa - p.beta() * fa + p.lambda() * input * output
        } else {
            fa - p.mu() * fa
        };
        track(
            "learning",
            learning_update(fa, input, output, &p),
            want.clamp(0.0, 1.0),
        )?;

        // Perceptual region through polar coordinates.
        let pose = Pose::new(
            rng.gen_range(0.0..100.0),
            rng.gen_range(0.0..100.0),
            rng.gen_range(0.0..TAU),
        );
        let r_p: f64 = rng.gen_range(0.5..30.0);
        let point = Point::new(
            pose.z + rng.gen_range(-40.0..40.0),
            pose.x + rng.gen_range(-40.0..40.0),
        );
        let (dz, dx) = (point.z - pose.z, point.x - pose.x);
        let mut off = (dx.atan2(dz) - pose.theta).rem_euclid(TAU);
        if off > PI {
            off -= TAU;
        }
        let want = off.abs() < FRAC_PI_2 && dz.hypot(dx) < r_p;
        ensure(in_perceptual_region(&pose, r_p, point) == want, || {
            format!("region: {pose:?} r {r_p} point {point:?}")
        })?;

        // Memory decay over a few ticks.
        let fe: f64 = rng.gen_range(0.0..2.0);
        let n: f64 = rng.gen();
        let ticks = rng.gen_range(1..5);
        let mut memory = vec![PerceivedStimulus {
            kind: StimulusKind::Water,
            source: SourceId::Stimulus(StimulusId(3)),
            position: point,
            fe,
            remembered: false,
        }];
        for _ in 0..ticks {
            memory = update_remembered(&memory, &[], n);
        }
        let want = fe.min(1.0) - n * ticks as f64;
        match memory.first() {
            Some(m) => track("memory", m.fe, want)?,
            None => ensure(want <= TOL, || format!("memory forgot {fe} too early"))?,
        }
    }

    // Worked values.
    let w1 = saturate(
        persistence_pre_activation(0.25, 0.4, 0.5, 0.0, 0.0),
        1.0,
        true,
    );
    ensure(close(w1, 0.4444, 5e-5), || {
        format!("worked persistence {w1}")
    })?;
    let w3 = attention(1.0, 0.6, 0.1, 1.0, 0.5);
    ensure(close(w3, 0.56, 1e-12), || format!("worked attention {w3}"))?;
    let w4 = congruence(1.0, 0.5, 0.8, 0.3, 1.0, 0.2);
    ensure(close(w4, 0.75, 1e-12), || format!("worked congruence {w4}"))?;
    let p = BecaParameters::default()
        .with(ParamName::Beta, 0.1)
        .and_then(|p| p.with(ParamName::Lambda, 0.5))
        .unwrap();
    let w5 = learning_update(0.4, 0.8, 0.6, &p);
    ensure(close(w5, 0.60, 1e-12), || format!("worked learning {w5}"))?;

    let secs = started.elapsed().as_secs_f64();
    ensure(secs < 1.0, || format!("took {secs:.3}s"))?;
    Ok(format!(
        "{SAMPLES} samples per equation, worst error {worst:.1e}, worked values {w1:.4} {w3:.2} {w4:.2} {w5:.2}"
    ))
}

fn saturation_property() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..10_000 {
        let max: f64 = 1.0 - rng.gen::<f64>();
        let a: f64 = rng.gen_range(0.0..50.0);
        let b: f64 = a + rng.gen_range(1e-6..5.0);
        let (sa, sb) = (saturate(a, max, true), saturate(b, max, true));
        ensure((0.0..max).contains(&sa), || {
            format!("saturate({a}, {max}) = {sa}")
        })?;
        ensure(sb > sa || (a == 0.0 && sb > 0.0), || {
            format!("not increasing: saturate({a})={sa}, saturate({b})={sb}, max {max}")
        })?;
    }
    Ok("10000 samples within [0, max) and increasing".into())
}

// Scenarios.

fn scenario(file: &str) -> Result<Scenario, String> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(file);
    let text = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    Scenario::from_json(&text).map_err(|e| e.to_string())
}

struct Run {
    passed: bool,
    report: String,
    records: Vec<TraceRecord>,
}

fn run(file: &str) -> Result<Run, String> {
    let sc = scenario(file)?;
    let outcome = run_scenario(&sc, &RunOptions::default(), |_| {}).map_err(|e| e.to_string())?;
    let report = outcome
        .results
        .iter()
        .map(|r| r.to_string())
        .collect::<Vec<_>>()
        .join("; ");
    Ok(Run {
        passed: outcome.passed(),
        report,
        records: outcome.records().cloned().collect(),
    })
}

/// Parameters, memory decay and mortality the scenario gives animat 1 at
/// the start of its first stage.
fn setup(file: &str) -> Result<(BecaParameters, f64, bool), String> {
    let sc = scenario(file)?;
    let sim = build_stage(&sc, 0, sc.seed, None).map_err(|e| e.to_string())?;
    let a = sim.animat(AnimatId(1)).ok_or("no animat 1")?;
    Ok((
        a.beca.params,
        a.config.perception_decay_n,
        a.config.immortal,
    ))
}

fn expect_params(file: &str, expected: &[(ParamName, f64)], n: Option<f64>) -> Result<(), String> {
    let (p, decay, _) = setup(file)?;
    for &(name, v) in expected {
        ensure(p.get(name) == v, || {
            format!("{file}: {name} is {} not {v}", p.get(name))
        })?;
    }
    if let Some(n) = n {
        ensure(decay == n, || format!("{file}: n is {decay} not {n}"))?;
    }
    Ok(())
}

fn passing(file: &str) -> Verdict {
    let r = run(file)?;
    if r.passed {
        Ok(r.report)
    } else {
        Err(r.report)
    }
}

fn scenario_m1() -> Verdict {
    use ParamName::*;
    expect_params(
        "m1_motivation.json",
        &[(Alpha, 0.8), (Gamma, 0.0), (Phi, 1.0)],
        None,
    )?;
    passing("m1_motivation.json")
}

fn scenario_m2() -> Verdict {
    expect_params("m2_no_reactivity.json", &[(ParamName::Alpha, 0.0)], None)?;
    passing("m2_no_reactivity.json")
}

fn scenario_m3() -> Verdict {
    expect_params("m3_no_attention.json", &[(ParamName::Phi, 0.0)], None)?;
    let (_, _, immortal) = setup("m3_no_attention.json")?;
    ensure(!immortal, || "M3 animat is immortal".into())?;
    expect_params(
        "m3_no_attention_alpha0.json",
        &[(ParamName::Phi, 0.0), (ParamName::Alpha, 0.0)],
        None,
    )?;
    let a = run("m3_no_attention.json")?;
    let b = run("m3_no_attention_alpha0.json")?;
    ensure(a.passed, || a.report.clone())?;
    ensure(b.passed, || format!("alpha 0 repeat: {}", b.report))?;
    let sel = |r: &Run| -> Vec<(u64, Behaviour, Behaviour)> {
        r.records
            .iter()
            .map(|t| (t.tick, t.selected, t.behaviour))
            .collect()
    };
    ensure(sel(&a) == sel(&b), || {
        "alpha changed the selection sequence".into()
    })?;
    Ok(format!(
        "{}; alpha 0 repeat selects identically over {} ticks",
        a.report,
        a.records.len()
    ))
}

fn scenario_m4() -> Verdict {
    expect_params(
        "m4_reactive_eating.json",
        &[(ParamName::Gamma, 0.1), (ParamName::Phi, 1.0)],
        None,
    )?;
    passing("m4_reactive_eating.json")
}

fn scenario_c1() -> Verdict {
    use ParamName::*;
    expect_params(
        "c1_conditioning.json",
        &[(Kappa, 0.25), (Lambda, 1.0)],
        Some(0.1),
    )?;
    passing("c1_conditioning.json")
}

fn scenario_c2() -> Verdict {
    use ParamName::*;
    expect_params(
        "c2_no_conditioning.json",
        &[(Kappa, 1.0), (Lambda, 1.0)],
        Some(1.0),
    )?;
    passing("c2_no_conditioning.json")
}

// Extinction.

/// The prey conditioned by the C1 episode, alone in a world holding only
/// neutral stimuli, so no coupling is ever reinforced.
fn conditioned_alone() -> Result<Simulation, String> {
    let sc = scenario("c1_conditioning.json")?;
    let opts = RunOptions::default();
    let mut episode = sc.clone();
    episode.stages.truncate(1);
    let outcome = run_scenario(&episode, &opts, |_| {}).map_err(|e| e.to_string())?;
    let mut prey = outcome
        .final_simulation()
        .animat(AnimatId(1))
        .ok_or("prey did not survive the episode")?
        .clone();
    prey.config.immortal = true;
    let mut sim = Simulation::new(
        bvl_core::world::Environment::new(bvl_core::world::Frame::default()),
        11,
    );
    let mut rng = bvl_core::world::RngStream::named(11, "world");
    for kind in [
        StimulusKind::Red,
        StimulusKind::Red,
        StimulusKind::Yellow,
        StimulusKind::Blob,
    ] {
        sim.environment
            .add_stimulus(kind, Placement::Random, None, None, &mut rng)
            .map_err(|e| e.to_string())?;
    }
    prey.pose = Pose::new(50.0, 50.0, 0.0);
    sim.insert_animat(prey).map_err(|e| e.to_string())?;
    Ok(sim)
}

fn learnable(sim: &Simulation) -> Vec<(CouplingKey, f64)> {
    sim.animats[0].beca.coupling.learnable().collect()
}

fn extinction() -> Verdict {
    let mut sim = conditioned_alone()?;
    let opts = TraceOptions::default();
    let start = learnable(&sim);
    let red_runaway = CouplingKey::congruence_external(StimulusKind::Red, Behaviour::Runaway);
    let initial = sim.animats[0].beca.coupling.get(red_runaway);
    ensure(initial >= 0.9, || {
        format!("episode left red -> runaway at {initial}")
    })?;
    let mut before = start.clone();
    for _ in 0..10_000 {
        sim.tick(&opts);
        let after = learnable(&sim);
        for ((k, b), (_, a)) in before.iter().zip(&after) {
            ensure(a >= b, || {
                format!(
                    "tick {}: {} -> {} fell {b} -> {a}",
                    sim.tick, k.source, k.target
                )
            })?;
        }
        before = after;
    }

    let mut sim = conditioned_alone()?;
    sim.set_parameter(AnimatId(1), "mu", 0.05)
        .map_err(|e| e.to_string())?;
    let mut prev = sim.animats[0].beca.coupling.get(red_runaway);
    let mut worst: f64 = 0.0;
    for _ in 0..300 {
        sim.tick(&opts);
        let now = sim.animats[0].beca.coupling.get(red_runaway);
        let err = (now - 0.95 * prev).abs();
        worst = worst.max(err);
        ensure(err <= 1e-12, || {
            format!("tick {}: {prev} -> {now}", sim.tick)
        })?;
        prev = now;
    }
    Ok(format!(
        "mu 0: {} learnable couplings non-decreasing over 10000 ticks (red -> runaway stays {initial:.4}); mu 0.05: factor 0.95 per tick, worst error {worst:.1e}",
        start.len()
    ))
}

// Determinism and persistence.

fn trace_bytes(file: &str, seed: u64) -> Result<Vec<u8>, String> {
    let sc = scenario(file)?;
    let opts = RunOptions {
        seed: Some(seed),
        ..Default::default()
    };
    let mut out = Vec::new();
    run_scenario(&sc, &opts, |r| {
        out.extend_from_slice(r.to_line().as_bytes());
        out.push(b'\n');
    })
    .map_err(|e| e.to_string())?;
    Ok(out)
}

fn ticks(sim: &mut Simulation, n: u64) -> Vec<u8> {
    let mut out = Vec::new();
    for _ in 0..n {
        for r in sim.tick(&TraceOptions::default()) {
            out.extend_from_slice(r.to_line().as_bytes());
            out.push(b'\n');
        }
    }
    out
}

fn split_run(file: &str, split: u64, total: u64) -> Result<(), String> {
    let sc = scenario(file)?;
    let mut straight = build_stage(&sc, 0, sc.seed, None).map_err(|e| e.to_string())?;
    let mut head = straight.clone();
    let uninterrupted = ticks(&mut straight, total);
    let mut resumed = ticks(&mut head, split);
    let text = Document::Simulation(Box::new(head)).to_json();
    let mut loaded = Document::from_json(&text)
        .and_then(|d| d.into_simulation())
        .map_err(|e| e.to_string())?;
    resumed.extend(ticks(&mut loaded, total - split));
    ensure(resumed == uninterrupted, || {
        format!("{file}: save at {split} diverges")
    })
}

fn determinism() -> Verdict {
    for file in ["m1_motivation.json", "c2_no_conditioning.json"] {
        let a = trace_bytes(file, 42)?;
        let b = trace_bytes(file, 42)?;
        ensure(!a.is_empty() && a == b, || format!("{file}: traces differ"))?;
    }
    split_run("m1_motivation.json", 500, 600)?;
    split_run("c1_conditioning.json", 60, 150)?;
    Ok(
        "seed 42 traces byte-identical; save at 500, load, continue matches the uninterrupted run"
            .into(),
    )
}
