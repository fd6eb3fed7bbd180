//! Plain-text summaries of saved documents.

use std::fmt::Write;

use bvl_core::animat::{Animat, AnimatKind};
use bvl_core::beca::ParamName;
use bvl_core::world::persist::Document;
use bvl_core::world::{Environment, Simulation};

pub fn document_report(doc: &Document) -> String {
    match doc {
        Document::Animat(a) => animat_report(a),
        Document::Environment(env) => environment_report(env),
        Document::Simulation(sim) => simulation_report(sim),
    }
}

pub fn animat_report(a: &Animat) -> String {
    let mut out = String::new();
    let kind = match a.config.kind {
        AnimatKind::Prey => "prey",
        AnimatKind::Predator => "predator",
    };
    let _ = writeln!(
        out,
        "animat {} `{}` ({kind}{})",
        a.id,
        a.config.name,
        if a.config.immortal { ", immortal" } else { "" }
    );
    let _ = writeln!(
        out,
        "  pose       z {:.3}  x {:.3}  theta {:.3}",
        a.pose.z, a.pose.x, a.pose.theta
    );
    let m = &a.medium;
    let _ = writeln!(
        out,
        "  medium     hunger {:.3}  thirst {:.3}  fatigue {:.3}  safety {:.3}  strength {:.3}  lucidity {:.3}",
        m.hunger, m.thirst, m.fatigue, m.safety, m.strength, m.lucidity
    );
    let mut params: Vec<String> = ParamName::ALL
        .iter()
        .map(|&p| format!("{p} {}", a.beca.params.get(p)))
        .collect();
    params.push(format!("n {}", a.config.perception_decay_n));
    let _ = writeln!(out, "  parameters {}", params.join("  "));
    let _ = writeln!(
        out,
        "  behaviour  selected {} ({:.3}), executed {}",
        a.selected.behaviour, a.selected.intensity, a.executed
    );
    let mut learned: Vec<_> = a
        .beca
        .coupling
        .learnable()
        .filter(|(_, v)| *v > 0.0)
        .collect();
    let total = a.beca.coupling.learnable().count();
    if learned.is_empty() {
        let _ = writeln!(out, "  learned    all {total} learnable couplings are 0");
    } else {
        learned.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
        let _ = writeln!(
            out,
            "  learned    {} of {total} learnable couplings above 0",
            learned.len()
        );
        for (k, v) in learned {
            let _ = writeln!(out, "    {} -> {}  {v:.4}", k.source, k.target);
        }
    }
    out
}

pub fn environment_report(env: &Environment) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "environment {} x {}, {} stimuli",
        env.frame.width,
        env.frame.height,
        env.stimuli.len()
    );
    for (kind, n) in env.census() {
        let _ = writeln!(out, "  {:<9} {n}", kind.to_string());
    }
    out
}

pub fn simulation_report(sim: &Simulation) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "simulation at tick {} (seed {}), {} animats",
        sim.tick,
        sim.seed,
        sim.animats.len()
    );
    out.push_str(&environment_report(&sim.environment));
    for a in &sim.animats {
        out.push_str(&animat_report(a));
    }
    out
}
