use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use kslab::cbd::{split_by_context, verify_split_feasible};
use kslab::io::{KsInstanceBlock, Report, SystemFile};
use kslab::jpd::{
    feasibility_general, feasibility_three, suppes_zanotti_holds, CorrelationTriple, FeasibilityResult,
    DEFAULT_PRODUCT_BUDGET,
};
use kslab::ks::{builtin_cabello, parity_certificate, search_valuations, validate_instance, KsInstance, SearchOptions};
use kslab::linalg::canonical_ray;
use kslab::qset::{automorphisms, rigid_extension, Permutation, DEFAULT_AUTOMORPHISM_BUDGET};
use kslab::rng::SplitMix64;
use kslab::valuation::{
    born_probabilities, classical_mode_with, family_covers, qset_mode_with, sample_context, verify_family,
    Assignment, ClassicalOutcome, QsetModeOptions,
};
use kslab::Rational;

const BUDGET_ENV: &str = "KSLAB_BUDGET";

#[derive(Parser)]
#[command(name = "kslab", version, about = "Exact contextuality toolkit")]
struct Cli {
    /// Print the machine-readable report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for simulation and seeded value assignment.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Product-space budget (feasibility, cbd) or search node budget (search, qset-demo).
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Stop a valuation search after this many valuations.
    #[arg(long, global = true)]
    limit: Option<usize>,
    /// Include wall-clock milliseconds in the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Builtin {
    Cabello,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Classical,
    Qset,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the built-in 18-ray, 9-context instance.
    VerifyCabello,
    /// Enumerate noncontextual valuations of a KS instance.
    Search {
        file: Option<PathBuf>,
        #[arg(long, conflicts_with = "file")]
        builtin: Option<Builtin>,
    },
    /// Check three pairwise correlations of ±1 observables.
    SuppesZanotti {
        #[arg(allow_hyphen_values = true)]
        exy: String,
        #[arg(allow_hyphen_values = true)]
        exz: String,
        #[arg(allow_hyphen_values = true)]
        eyz: String,
        /// Also decide feasibility by exact LP and compare.
        #[arg(long)]
        oracle: bool,
    },
    /// Decide whether a joint distribution reproduces every context.
    Feasibility { file: PathBuf },
    /// Split observables per context and exhibit a joint distribution.
    Cbd { file: PathBuf },
    /// Classical valuation versus per-context quasi-set valuation.
    QsetDemo {
        #[arg(long, value_enum, default_value = "qset")]
        mode: Mode,
        /// Instance file; the built-in instance when omitted.
        file: Option<PathBuf>,
    },
    /// Sample Born-rule outcomes of one context.
    Simulate {
        /// Instance file; the built-in instance when omitted.
        file: Option<PathBuf>,
        /// Integer state vector, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        state: String,
        /// 1-based context index.
        #[arg(long, default_value_t = 1)]
        context: usize,
        #[arg(long, default_value_t = 1)]
        samples: usize,
    },
    /// Automorphisms and a rigid extension of a finite structure.
    Structure { file: PathBuf },
}

struct Outcome {
    verdict: &'static str,
    exit_code: i32,
    details: Value,
    text: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = command_name(&cli.command);
    let start = Instant::now();
    let outcome = run(&cli).unwrap_or_else(|msg| Outcome {
        verdict: "error",
        exit_code: 2,
        details: json!({ "error": msg }),
        text: vec![format!("error: {msg}")],
    });
    let timing_ms = cli.timing.then(|| start.elapsed().as_millis() as u64);
    let mut text = outcome.text.join("\n");
    if cli.json {
        let report = Report {
            command: name.to_string(),
            args,
            verdict: outcome.verdict.to_string(),
            exit_code: outcome.exit_code,
            details: outcome.details,
            timing_ms,
        };
        text = report.to_json();
    } else if let Some(ms) = timing_ms {
        text.push_str(&format!("\ntime: {ms} ms"));
    }
    // A closed pipe is not an error worth reporting.
    let _ = if outcome.exit_code == 2 && !cli.json {
        writeln!(std::io::stderr(), "{text}")
    } else {
        writeln!(std::io::stdout(), "{text}")
    };
    ExitCode::from(outcome.exit_code as u8)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::VerifyCabello => "verify-cabello",
        Command::Search { .. } => "search",
        Command::SuppesZanotti { .. } => "suppes-zanotti",
        Command::Feasibility { .. } => "feasibility",
        Command::Cbd { .. } => "cbd",
        Command::QsetDemo { .. } => "qset-demo",
        Command::Simulate { .. } => "simulate",
        Command::Structure { .. } => "structure",
    }
}

fn run(cli: &Cli) -> Result<Outcome, String> {
    match &cli.command {
        Command::VerifyCabello => verify_cabello(),
        Command::Search { file, builtin } => {
            let inst = load_instance(file.as_deref(), builtin.is_some())?;
            search(&inst, cli)
        }
        Command::SuppesZanotti { exy, exz, eyz, oracle } => suppes_zanotti(exy, exz, eyz, *oracle),
        Command::Feasibility { file } => feasibility(&load(file)?, product_budget(cli)?),
        Command::Cbd { file } => cbd(&load(file)?, product_budget(cli)?),
        Command::QsetDemo { mode, file } => {
            let inst = load_instance(file.as_deref(), file.is_none())?;
            match mode {
                Mode::Classical => qset_demo_classical(&inst, cli),
                Mode::Qset => qset_demo_qset(&inst, cli),
            }
        }
        Command::Simulate {
            file,
            state,
            context,
            samples,
        } => {
            let inst = load_instance(file.as_deref(), file.is_none())?;
            simulate(&inst, state, *context, *samples, cli.seed.unwrap_or(0))
        }
        Command::Structure { file } => structure(&load(file)?, cli),
    }
}

/// `--budget`, else `KSLAB_BUDGET`, else the default.
fn product_budget(cli: &Cli) -> Result<u64, String> {
    if let Some(b) = cli.budget {
        return Ok(b);
    }
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| format!("{BUDGET_ENV} must be a nonnegative integer, got {v:?}")),
        Err(_) => Ok(DEFAULT_PRODUCT_BUDGET),
    }
}

fn load(path: &Path) -> Result<SystemFile, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    SystemFile::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_instance(path: Option<&Path>, builtin: bool) -> Result<KsInstance, String> {
    match path {
        Some(p) => load(p)?.ks_instance().map_err(|e| format!("{}: {e}", p.display())),
        None if builtin => Ok(builtin_cabello()),
        None => Err("give an instance file or --builtin cabello".into()),
    }
}

fn verify_cabello() -> Result<Outcome, String> {
    let inst = builtin_cabello();
    let report = validate_instance(&inst);
    let mut text = vec![format!(
        "{} rays, {} contexts, dimension {}",
        report.ray_count, report.context_count, report.dimension
    )];
    for c in &report.contexts {
        text.push(format!(
            "context {}: orthogonal={} commuting={} identity={}",
            c.index, c.pairwise_orthogonal, c.commuting, c.resolves_identity
        ));
    }
    text.push(format!("incidence: {:?}", report.incidence));
    text.push(if report.passed { "pass".into() } else { "FAIL".into() });
    Ok(Outcome {
        verdict: if report.passed { "valid" } else { "invalid" },
        exit_code: if report.passed { 0 } else { 1 },
        details: json!({
            "instance": KsInstanceBlock::from_instance(&inst),
            "validation": report,
        }),
        text,
    })
}

fn search(inst: &KsInstance, cli: &Cli) -> Result<Outcome, String> {
    let found = search_valuations(
        inst,
        SearchOptions {
            limit: cli.limit,
            node_budget: cli.budget,
        },
    )
    .map_err(|e| e.to_string())?;
    let parity = parity_certificate(inst);
    let contextual = found.valuations.is_empty();
    let mut text = vec![format!(
        "{} valuation(s), exhaustive={}, nodes={}",
        found.valuations.len(),
        found.exhaustive,
        found.nodes
    )];
    for v in &found.valuations {
        text.push(format!("  true rays: {:?}", v.true_rays().collect::<Vec<_>>()));
    }
    if let Some(p) = &parity {
        text.push(format!(
            "parity certificate: every ray in an even number of contexts, {} contexts",
            p.context_count()
        ));
    }
    text.push(if contextual { "contextual".into() } else { "noncontextual".into() });
    Ok(Outcome {
        verdict: if contextual { "contextual" } else { "noncontextual" },
        exit_code: if contextual { 1 } else { 0 },
        details: json!({
            "valuation_count": found.valuations.len(),
            "valuations": found.valuations,
            "exhaustive": found.exhaustive,
            "nodes": found.nodes,
            "parity_certificate": parity,
        }),
        text,
    })
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    s.parse().map_err(|e| format!("{s:?}: {e}"))
}

fn suppes_zanotti(exy: &str, exz: &str, eyz: &str, oracle: bool) -> Result<Outcome, String> {
    let c = CorrelationTriple::new(parse_rational(exy)?, parse_rational(exz)?, parse_rational(eyz)?)
        .map_err(|e| e.to_string())?;
    let holds = suppes_zanotti_holds(&c);
    let mut text = vec![format!(
        "E(XY)={} E(XZ)={} E(YZ)={}: inequality {}",
        c.e_xy,
        c.e_xz,
        c.e_yz,
        if holds { "holds" } else { "violated" }
    )];
    let mut details = json!({ "correlations": c, "inequality_holds": holds });
    let mut agree = true;
    if oracle {
        let lp = feasibility_three(&c).map_err(|e| e.to_string())?;
        agree = lp.is_feasible() == holds;
        text.push(format!(
            "LP: {}, agree={agree}",
            if lp.is_feasible() { "feasible" } else { "infeasible" }
        ));
        details["lp"] = json!(lp);
        details["agree"] = json!(agree);
    }
    let (verdict, exit_code) = match (agree, holds) {
        (false, _) => ("disagreement", 2),
        (true, true) => ("holds", 0),
        (true, false) => ("violated", 1),
    };
    Ok(Outcome {
        verdict,
        exit_code,
        details,
        text,
    })
}

fn feasibility_text(res: &FeasibilityResult) -> Vec<String> {
    match res {
        FeasibilityResult::Feasible { witness } => {
            let mut text = vec![format!("feasible: joint distribution over {}", witness.observables.join(", "))];
            for a in &witness.atoms {
                let outcome: Vec<String> = a.outcome.iter().map(|v| v.to_string()).collect();
                text.push(format!("  ({}) : {}", outcome.join(", "), a.p));
            }
            text
        }
        FeasibilityResult::Infeasible { certificate } => {
            let mut text = vec!["infeasible: Farkas certificate".to_string()];
            for (row, y) in certificate.rows.iter().zip(&certificate.y) {
                if !y.is_zero() {
                    text.push(format!("  {row} : {y}"));
                }
            }
            text
        }
    }
}

fn feasibility(file: &SystemFile, budget: u64) -> Result<Outcome, String> {
    let sys = file.measurement_system().map_err(|e| e.to_string())?;
    let res = feasibility_general(sys, budget).map_err(|e| e.to_string())?;
    let feasible = res.is_feasible();
    Ok(Outcome {
        verdict: if feasible { "feasible" } else { "infeasible" },
        exit_code: if feasible { 0 } else { 1 },
        details: json!(res),
        text: feasibility_text(&res),
    })
}

fn cbd(file: &SystemFile, budget: u64) -> Result<Outcome, String> {
    let sys = file.measurement_system().map_err(|e| e.to_string())?;
    let (split, map) = split_by_context(sys);
    let res = verify_split_feasible(&split, budget).map_err(|e| e.to_string())?;
    let mut text: Vec<String> = map
        .entries()
        .iter()
        .map(|e| format!("{} in context {} -> {}", e.observable, e.context, e.split))
        .collect();
    text.extend(feasibility_text(&res));
    Ok(Outcome {
        verdict: "feasible",
        exit_code: 0,
        details: json!({ "split_system": split, "split_map": map, "result": res }),
        text,
    })
}

fn qset_demo_classical(inst: &KsInstance, cli: &Cli) -> Result<Outcome, String> {
    let out = classical_mode_with(
        inst,
        SearchOptions {
            limit: cli.limit,
            node_budget: cli.budget,
        },
    )
    .map_err(|e| e.to_string())?;
    let text = match &out {
        ClassicalOutcome::Feasible { valuations, exhaustive } => vec![format!(
            "one global valuation: {} found, exhaustive={exhaustive}",
            valuations.len()
        )],
        ClassicalOutcome::Infeasible { parity } => {
            let mut t = vec!["one global valuation: none exists".to_string()];
            if let Some(p) = parity {
                t.push(format!(
                    "parity certificate: even incidences, {} contexts",
                    p.context_count()
                ));
            }
            t
        }
    };
    let feasible = out.is_feasible();
    Ok(Outcome {
        verdict: if feasible { "feasible" } else { "infeasible" },
        exit_code: if feasible { 0 } else { 1 },
        details: json!(out),
        text,
    })
}

fn qset_demo_qset(inst: &KsInstance, cli: &Cli) -> Result<Outcome, String> {
    let opts = QsetModeOptions {
        assignment: cli.seed.map_or(Assignment::FirstRay, Assignment::Seeded),
        ..Default::default()
    };
    let fam = qset_mode_with(inst, &opts).map_err(|e| e.to_string())?;
    let verified = verify_family(&fam) && family_covers(inst, &fam);
    let mut text = vec![format!(
        "system qset: {}, {} bearer(s)",
        fam.system()
            .kinds()
            .map(|(k, n)| format!("{k} x{n}"))
            .collect::<Vec<_>>()
            .join(", "),
        fam.bearer_count()
    )];
    for (c, entries) in fam.contexts().iter().enumerate() {
        let truth = entries.iter().find(|e| e.value == 1).map(|e| e.ray_id);
        let bearer = &entries[0].bearer;
        text.push(format!(
            "context {}: bearer {}#{} true ray {}",
            c + 1,
            bearer.kind(),
            bearer.token(),
            truth.map_or("none".into(), |r| format!("{r} {}", inst.ray(r)))
        ));
    }
    text.push(format!("verified={verified}"));
    Ok(Outcome {
        verdict: if verified { "verified" } else { "unverified" },
        exit_code: if verified { 0 } else { 1 },
        details: json!({ "family": fam, "verified": verified }),
        text,
    })
}

fn simulate(inst: &KsInstance, state: &str, context: usize, samples: usize, seed: u64) -> Result<Outcome, String> {
    let components = state
        .split(',')
        .map(|s| s.trim().parse::<i64>().map_err(|_| format!("bad state component {s:?}")))
        .collect::<Result<Vec<_>, _>>()?;
    let psi = canonical_ray(&components).map_err(|e| e.to_string())?;
    let ctx = context.checked_sub(1).ok_or("contexts are numbered from 1")?;
    let probs = born_probabilities(inst, &psi, ctx).map_err(|e| e.to_string())?;
    let mut rng = SplitMix64::new(seed);
    let mut counts = vec![0usize; probs.len()];
    let mut first = None;
    for _ in 0..samples {
        let id = sample_context(inst, &psi, ctx, &mut rng).map_err(|e| e.to_string())?;
        first.get_or_insert(id);
        let slot = probs.iter().position(|(r, _)| *r == id).expect("sampled ray is in the context");
        counts[slot] += 1;
    }
    let rows: Vec<Value> = probs
        .iter()
        .zip(&counts)
        .map(|((id, p), n)| json!({ "ray_id": id, "ray": inst.ray(*id).to_string(), "probability": p, "count": n }))
        .collect();
    let mut text = vec![format!("state {psi}, context {context}, {samples} sample(s), seed {seed}")];
    for ((id, p), n) in probs.iter().zip(&counts) {
        text.push(format!("  ray {id} {}: p={p} count={n}", inst.ray(*id)));
    }
    Ok(Outcome {
        verdict: "sampled",
        exit_code: 0,
        details: json!({
            "state": psi,
            "context": context,
            "seed": seed,
            "samples": samples,
            "first_outcome": first,
            "rays": rows,
        }),
        text,
    })
}

fn structure(file: &SystemFile, cli: &Cli) -> Result<Outcome, String> {
    let s = file.structure().map_err(|e| e.to_string())?;
    let budget = cli.budget.map_or(DEFAULT_AUTOMORPHISM_BUDGET, |b| b as usize);
    let auts = automorphisms(s, budget).map_err(|e| e.to_string())?;
    let rigid = rigid_extension(s, budget).map_err(|e| e.to_string())?;
    let show = |p: &Permutation| {
        s.domain()
            .iter()
            .enumerate()
            .map(|(i, e)| format!("{e}->{}", s.domain()[p.apply(i)]))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut text = vec![format!("{} automorphism(s)", auts.len())];
    text.extend(auts.iter().map(|p| format!("  {}", show(p))));
    let added: Vec<&str> = rigid.relation_names().skip(s.relation_names().count()).collect();
    text.push(format!("rigid extension adds: {}", added.join(", ")));
    Ok(Outcome {
        verdict: if auts.len() == 1 { "rigid" } else { "symmetric" },
        exit_code: 0,
        details: json!({ "automorphisms": auts, "rigid_extension": rigid }),
        text,
    })
}
