use std::fmt::Write;

use num_rational::Rational64;
use serde_json::{json, Value};
use teamform_core::dynamics::mass_on;
use teamform_core::modelfile::{parse_rational, to_json};
use teamform_core::report::format_real;
use teamform_core::{
    builtin_example, cost_thresholds, cs_set, enumerate_states, farsighted_stable_sets,
    find_blocking_operation, mts_set, perturbed_transition_matrix, run_simulation, ss_set,
    ss_with_costs, stationary_distribution, verify_propositions, Error, FarsightedMode, Instance,
    Model, PerturbationScheme, Result, SimulationConfig, StateSpace, Status, StochasticStability,
    EXAMPLES,
};

use crate::render::*;
use crate::{Command, Mode, Notion, Outcome, Scheme};

/// Blocked states listed in text output; JSON lists all of them.
const BLOCKED_SHOWN: usize = 10;

fn ok(text: String, json: Value) -> Result<Outcome> {
    Ok(Outcome {
        text,
        json,
        status: 0,
    })
}

/// Parse a switching cost: an integer, `a/b`, or a terminating decimal.
pub fn parse_cost(s: &str) -> Result<Rational64> {
    let s = s.trim();
    let value = match s.split_once('.') {
        Some((whole, frac)) if !s.contains('/') => {
            let digits = frac.len() as u32;
            let den = 10i64
                .checked_pow(digits)
                .ok_or_else(|| Error::Schema(format!("cost `{s}` has too many decimals")))?;
            let sign = if whole.starts_with('-') { -1 } else { 1 };
            let whole: i64 = if whole.is_empty() || whole == "-" {
                0
            } else {
                whole
                    .parse()
                    .map_err(|_| Error::Schema(format!("`{s}` is not a number")))?
            };
            let frac: i64 = frac
                .parse()
                .map_err(|_| Error::Schema(format!("`{s}` is not a number")))?;
            Ok(Rational64::from_integer(whole) + Rational64::new(sign * frac, den))
        }
        _ => parse_rational(s).map_err(Error::Schema),
    }?;
    if value < Rational64::from_integer(0) {
        return Err(Error::Schema(format!("switching cost `{s}` is negative")));
    }
    Ok(value)
}

fn scheme_of(model: &Model, flag: Option<Scheme>) -> PerturbationScheme {
    match flag {
        Some(Scheme::Uniform) => PerturbationScheme::Uniform,
        Some(Scheme::UniformDestructive) => PerturbationScheme::UniformDestructive,
        None => model
            .dynamics()
            .scheme
            .unwrap_or(PerturbationScheme::UniformDestructive),
    }
}

fn scheme_name(s: PerturbationScheme) -> &'static str {
    match s {
        PerturbationScheme::Uniform => "uniform",
        PerturbationScheme::UniformDestructive => "uniform-destructive",
    }
}

fn epsilon_of(model: &Model, flag: Option<f64>) -> Result<f64> {
    flag.or(model.dynamics().epsilon)
        .ok_or_else(|| Error::Schema("--epsilon is required (the model sets no default)".into()))
}

pub fn run(model: &Model, command: &Command, classes: bool) -> Result<Outcome> {
    let space = enumerate_states(model)?;
    let inst = Instance::new(model, &space)?;
    match command {
        Command::Enumerate => enumerate(&inst, classes),
        Command::Stability { notion, cost, mode } => match notion {
            Notion::Mts => mts(&inst, classes),
            Notion::Cs => cs(&inst, cost.as_deref(), classes),
            Notion::Farsighted => farsighted(&inst, *mode),
        },
        Command::Stochastic { cost } => stochastic(&inst, cost.as_deref(), classes),
        Command::Stationary { epsilon, scheme } => stationary(
            &inst,
            epsilon_of(model, *epsilon)?,
            scheme_of(model, *scheme),
            classes,
        ),
        Command::Simulate {
            epsilon,
            steps,
            seed,
            scheme,
            burn_in,
            replicas,
            compare,
        } => {
            let mut config = SimulationConfig::new(
                epsilon_of(model, *epsilon)?,
                scheme_of(model, *scheme),
                *steps,
                *seed,
            );
            if let Some(b) = burn_in {
                config.burn_in = *b;
            }
            config.replicas = *replicas;
            simulate(&inst, &config, *compare, classes)
        }
        Command::Verify => verify(model, &space),
        Command::Examples { name } => examples(name.as_deref()),
    }
}

fn enumerate(inst: &Instance, classes: bool) -> Result<Outcome> {
    let space = inst.space();
    let model = inst.model();
    let top = space.by_size().len() - 1;
    let json = with_classes(
        json!({
            "num_states": space.len(),
            "num_maximal": space.maximal().len(),
            "num_maximal_classes": space.count_classes(space.maximal()),
            "max_projects": top,
        }),
        space,
        space.maximal(),
        classes,
    );
    let mut text = format!(
        "feasible states: {}\nmaximal states: {} ({} classes)\nmost projects: {} ({} states)\n",
        space.len(),
        space.maximal().len(),
        space.count_classes(space.maximal()),
        top,
        space.max_projects().len(),
    );
    if classes {
        text.push_str("maximal classes:\n");
        text.push_str(&states_text(model, space, space.maximal(), true));
    }
    ok(text, json)
}

fn set_outcome(
    inst: &Instance,
    title: &str,
    mut json: Value,
    states: &[usize],
    classes: bool,
) -> (String, Value) {
    let space = inst.space();
    json["states"] = states_json(space, states);
    json["count"] = json!(states.len());
    json["num_classes"] = json!(space.count_classes(states));
    let json = with_classes(json, space, states, classes);
    let text = format!(
        "{title}: {} states ({} classes)\n{}",
        states.len(),
        space.count_classes(states),
        states_text(inst.model(), space, states, classes)
    );
    (text, json)
}

fn mts(inst: &Instance, classes: bool) -> Result<Outcome> {
    let states = mts_set(inst);
    let (text, json) = set_outcome(
        inst,
        "myopically team-wise stable",
        json!({"notion": "mts"}),
        &states,
        classes,
    );
    ok(text, json)
}

fn cs(inst: &Instance, cost: Option<&str>, classes: bool) -> Result<Outcome> {
    let c = cost
        .map(parse_cost)
        .transpose()?
        .unwrap_or_else(|| Rational64::from_integer(0));
    let states = cs_set(inst, c)?;
    let thresholds = cost_thresholds(inst)?;
    let model = inst.model();
    let space = inst.space();
    let opt = |u: Option<teamform_core::Utility>| u.map(utility_json).unwrap_or(Value::Null);
    let (mut text, mut json) = set_outcome(
        inst,
        &format!("coalitionally stable at cost {c}"),
        json!({
            "notion": "cs",
            "cost": rational_json(c),
            "thresholds": {"low": opt(thresholds.low), "high": opt(thresholds.high)},
        }),
        &states,
        classes,
    );
    let mut blocked = Vec::new();
    let _ = writeln!(
        text,
        "thresholds: c_low = {}, c_high = {}",
        thresholds.low.map_or("none".into(), |u| u.to_string()),
        thresholds.high.map_or("none".into(), |u| u.to_string())
    );
    for x in mts_set(inst).into_iter().filter(|x| !states.contains(x)) {
        if let Some(op) = find_blocking_operation(inst, x, c)? {
            let names: Vec<&str> = op.coalition.iter().map(|&i| model.agent_name(i)).collect();
            if blocked.len() < BLOCKED_SHOWN {
                let _ = writeln!(
                    text,
                    "blocked: {} by {{{}}} → {}",
                    label(model, space, x),
                    names.join(", "),
                    label(model, space, op.target)
                );
            }
            blocked.push(json!({
                "state": state_json(space, x),
                "coalition": names,
                "removed": op.removed,
                "added": op.added,
                "target": state_json(space, op.target),
            }));
        }
    }
    if blocked.len() > BLOCKED_SHOWN {
        let _ = writeln!(
            text,
            "... and {} more blocked states",
            blocked.len() - BLOCKED_SHOWN
        );
    }
    json["blocked"] = Value::Array(blocked);
    ok(text, json)
}

fn farsighted(inst: &Instance, mode: Option<Mode>) -> Result<Outcome> {
    let mode = match mode {
        Some(Mode::Exhaustive) => FarsightedMode::Exhaustive,
        Some(Mode::Greedy) => FarsightedMode::Greedy,
        None if inst.space().len() <= inst.model().guards().max_farsighted_states => {
            FarsightedMode::Exhaustive
        }
        None => FarsightedMode::Greedy,
    };
    let sets = farsighted_stable_sets(inst, mode)?;
    let mode_name = match mode {
        FarsightedMode::Exhaustive => "exhaustive",
        FarsightedMode::Greedy => "greedy",
    };
    let space = inst.space();
    let mut text = format!("farsightedly stable sets ({mode_name}): {}\n", sets.len());
    let mut list = Vec::new();
    for (k, s) in sets.iter().enumerate() {
        let _ = writeln!(
            text,
            "set {k}: {} states; conditions i/ii/iii: {}/{}/{}",
            s.members.len(),
            s.certified_i,
            s.certified_ii,
            s.certified_iii
        );
        text.push_str(&states_text(inst.model(), space, &s.members, false));
        list.push(json!({
            "states": states_json(space, &s.members),
            "certified": {"i": s.certified_i, "ii": s.certified_ii, "iii": s.certified_iii},
        }));
    }
    ok(
        text,
        json!({"notion": "farsighted", "mode": mode_name, "sets": list}),
    )
}

fn stochastic(inst: &Instance, cost: Option<&str>, classes: bool) -> Result<Outcome> {
    let (ss, header): (StochasticStability, Value) = match cost {
        Some(c) => {
            let c = parse_cost(c)?;
            (
                ss_with_costs(inst, c)?,
                json!({"dynamics": "coalition-wise", "cost": rational_json(c)}),
            )
        }
        None => (ss_set(inst)?, json!({"dynamics": "myopic"})),
    };
    let space = inst.space();
    let mut json = header;
    json["num_absorbing"] = json!(ss.absorbing.len());
    json["ss"] = states_json(space, &ss.from_potentials);
    json["max_projects"] = states_json(space, &ss.max_projects);
    json["agree"] = json!(ss.agree());
    json["potentials"] = Value::Array(
        ss.potentials
            .nodes
            .iter()
            .zip(&ss.potentials.gamma)
            .map(|(&x, &g)| json!({"state": state_json(space, x), "gamma": g}))
            .collect(),
    );
    let json = with_classes(json, space, &ss.from_potentials, classes);
    let text = format!(
        "absorbing states: {}\nstochastically stable: {} states ({} classes); equals most-project states: {}\n{}",
        ss.absorbing.len(),
        ss.from_potentials.len(),
        space.count_classes(&ss.from_potentials),
        ss.agree(),
        states_text(inst.model(), space, &ss.from_potentials, classes)
    );
    ok(text, json)
}

fn top_states(pi: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..pi.len()).collect();
    order.sort_by(|&a, &b| pi[b].total_cmp(&pi[a]).then(a.cmp(&b)));
    order.truncate(k);
    order
}

fn class_masses(space: &StateSpace, pi: &[f64]) -> Vec<(usize, f64)> {
    let mut per = vec![0.0; space.num_classes()];
    let mut rep = vec![usize::MAX; space.num_classes()];
    for (x, p) in pi.iter().enumerate() {
        let c = space.class_of(x);
        per[c] += p;
        rep[c] = rep[c].min(x);
    }
    let mut out: Vec<(usize, f64)> = rep.into_iter().zip(per).collect();
    out.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    out
}

fn stationary(
    inst: &Instance,
    eps: f64,
    scheme: PerturbationScheme,
    classes: bool,
) -> Result<Outcome> {
    let chain = perturbed_transition_matrix(inst, eps, scheme)?;
    let pi = stationary_distribution(&chain.transition)?;
    let space = inst.space();
    let model = inst.model();
    let residual = teamform_core::dynamics::residual(&chain.transition, &pi);
    let on_l = mass_on(&pi, space.max_projects());
    let mut json = json!({
        "epsilon": real_json(eps),
        "scheme": scheme_name(scheme),
        "residual": real_json(residual),
        "mass_on_max_projects": real_json(on_l),
        "distribution": (0..space.len())
            .map(|x| json!({"state": state_json(space, x), "probability": real_json(pi[x])}))
            .collect::<Vec<_>>(),
    });
    let mut text = format!(
        "epsilon {eps}, {}: mass on most-project states {}, residual {residual:e}\n",
        scheme_name(scheme),
        format_real(on_l)
    );
    if classes {
        let masses = class_masses(space, &pi);
        json["class_mass"] = Value::Array(
            masses
                .iter()
                .map(|&(r, m)| json!({"representative": state_json(space, r), "probability": real_json(m)}))
                .collect(),
        );
        for (r, m) in masses.iter().take(10) {
            let _ = writeln!(text, "  {:.6}  {} (class)", m, label(model, space, *r));
        }
    } else {
        for x in top_states(&pi, 10) {
            let _ = writeln!(text, "  {:.6}  {}", pi[x], label(model, space, x));
        }
    }
    ok(text, json)
}

fn simulate(
    inst: &Instance,
    config: &SimulationConfig,
    compare: bool,
    classes: bool,
) -> Result<Outcome> {
    let mut report = run_simulation(inst, config)?;
    if compare {
        let chain = perturbed_transition_matrix(inst, config.epsilon, config.scheme)?;
        let pi = stationary_distribution(&chain.transition)?;
        report = report.with_reference(&pi)?;
    }
    let space = inst.space();
    let model = inst.model();
    let json = json!({
        "states": states_json(space, &(0..space.len()).collect::<Vec<_>>()),
        "report": serde_json::to_value(&report).map_err(|e| Error::Schema(e.to_string()))?,
    });
    let mut text = format!(
        "{} ticks × {} replica(s), burn-in {}, epsilon {}, {}\nmodal state: {}\nmass on most-project states: {}\n",
        config.steps,
        config.replicas,
        config.burn_in,
        config.epsilon,
        scheme_name(config.scheme),
        label(model, space, report.modal_state),
        format_real(mass_on(&report.frequencies, space.max_projects())),
    );
    if let Some(tv) = report.tv_distance {
        let _ = writeln!(
            text,
            "total-variation distance to exact: {}",
            format_real(tv)
        );
    }
    if classes {
        for (r, m) in class_masses(space, &report.frequencies).iter().take(10) {
            let _ = writeln!(text, "  {:.6}  {} (class)", m, label(model, space, *r));
        }
    } else {
        for x in top_states(&report.frequencies, 10) {
            let _ = writeln!(
                text,
                "  {:.6}  {}",
                report.frequencies[x],
                label(model, space, x)
            );
        }
    }
    ok(text, json)
}

fn verify(model: &Model, space: &StateSpace) -> Result<Outcome> {
    let report = verify_propositions(model, space)?;
    let mut text = format!("assumptions holding: {}\n", report.assumptions.join(", "));
    for e in &report.entries {
        let status = match e.status {
            Status::Pass => "pass",
            Status::NotApplicable => "n/a",
            Status::Fail => "FAIL",
            Status::Skipped => "skipped",
        };
        let _ = writeln!(
            text,
            "{:<11} {:<8} {} — {}",
            e.id, status, e.claim, e.detail
        );
    }
    let json = serde_json::to_value(&report).map_err(|e| Error::Schema(e.to_string()))?;
    Ok(Outcome {
        text,
        json,
        status: if report.has_failures() { 1 } else { 0 },
    })
}

pub fn examples(name: Option<&str>) -> Result<Outcome> {
    match name {
        None => {
            let mut text = String::new();
            for (n, d) in EXAMPLES {
                let _ = writeln!(text, "{n:<7} {d}");
            }
            let json = Value::Array(
                EXAMPLES
                    .iter()
                    .map(|(n, d)| json!({"name": n, "description": d}))
                    .collect(),
            );
            ok(text, json)
        }
        Some(name) => {
            let model = builtin_example(name)?;
            let description = EXAMPLES
                .iter()
                .find(|(n, _)| n.eq_ignore_ascii_case(name))
                .map(|(_, d)| *d)
                .unwrap_or_default();
            let text = format!(
                "{}: {description}\nagents: {}\nprojects:\n{}",
                name.to_ascii_uppercase(),
                model.agents().join(", "),
                (0..model.technology().len())
                    .map(|p| format!("  {p}: {}\n", model.project_label(p)))
                    .collect::<String>()
            );
            let json: Value =
                serde_json::from_str(&to_json(&model)).map_err(|e| Error::Schema(e.to_string()))?;
            ok(text, json)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cost_spellings() {
        assert_eq!(parse_cost("1/2").unwrap(), Rational64::new(1, 2));
        assert_eq!(parse_cost("0.25").unwrap(), Rational64::new(1, 4));
        assert_eq!(parse_cost("3").unwrap(), Rational64::from_integer(3));
        assert!(parse_cost("-1").is_err());
        assert!(parse_cost("x").is_err());
    }
}
