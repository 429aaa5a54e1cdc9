//! `omlkit`: construct finite orthomodular lattices, enumerate their
//! two-valued states, expand them with internal state operators, decompose
//! them, and run the full verification batteries.
//!
//! Exit codes: 0 all checks pass, 1 a mathematical check failed (witnesses
//! printed), 2 malformed input or usage.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use omlkit_core::varieties::{BatteryReport, HarnessOptions, HarnessReport};
use omlkit_core::{
    boolean, build_internal, characterization_harness, enumerate_states, invariant_battery,
    lattice_from_greechie, lattice_from_hasse, mo, ElementId, ExpandedAlgebra, IoError,
    LatticeJson, Ortholattice, StateKind, StateVector, VerificationReport, DEFAULT_SEED,
    DEFAULT_VAR_BOUND,
};

const EXIT_PASS: u8 = 0;
const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_INPUT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(
    name = "omlkit",
    version,
    about = "Finite orthomodular lattices, two-valued states, and internal-state expansions",
    after_help = "Inputs are .hasse / .greechie / .json files or --gen specs \
                  (boolean:K, mo:K, product:SPEC,SPEC).\n\
                  OMLKIT_MAX_PARTITIONS caps the exhaustive congruence partition scan (default 12)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the ortholattice axioms (and the s axioms when an "s" array is present)
    Check(CheckArgs),
    /// Enumerate states of a kind, with counts
    States(StatesArgs),
    /// Serialize the expansion induced by an enumerated state
    Expand(ExpandArgs),
    /// List all proper direct decompositions of an expanded algebra
    Decompose(DecomposeArgs),
    /// Run the state/operator correspondence harness and invariant batteries
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    #[value(name = "pre-state")]
    PreState,
    #[value(name = "two-valued")]
    TwoValued,
    #[value(name = "jauch-piron")]
    JauchPiron,
}

impl From<KindArg> for StateKind {
    fn from(k: KindArg) -> StateKind {
        match k {
            KindArg::PreState => StateKind::PreState,
            KindArg::TwoValued => StateKind::TwoValued,
            KindArg::JauchPiron => StateKind::JauchPiron,
        }
    }
}

#[derive(Args)]
struct InputArgs {
    /// Lattice file (.hasse, .greechie, or .json)
    input: Option<PathBuf>,
    /// Generator spec instead of a file, e.g. mo:2 or product:boolean:1,mo:2
    #[arg(long)]
    gen: Option<String>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct StatesArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Which family to enumerate
    #[arg(long, value_enum, default_value = "pre-state")]
    kind: KindArg,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct ExpandArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Index into the enumerated states of --kind (lexicographic order)
    #[arg(long, default_value_t = 0)]
    state_index: usize,
    #[arg(long, value_enum, default_value = "pre-state")]
    kind: KindArg,
}

#[derive(Args)]
struct DecomposeArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Build the operator from this enumerated state when the input has no "s"
    #[arg(long)]
    state_index: Option<usize>,
    #[arg(long, value_enum, default_value = "pre-state")]
    kind: KindArg,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    /// Corpus files; combine freely with --gen
    inputs: Vec<PathBuf>,
    /// Generator specs added to the corpus (repeatable)
    #[arg(long)]
    gen: Vec<String>,
    /// State family for the correspondence harness
    #[arg(long, value_enum)]
    family: KindArg,
    /// Exhaustive valuation bound on variables per equation
    #[arg(long, default_value_t = DEFAULT_VAR_BOUND)]
    nvars: usize,
    /// Largest lattice admitted to the exhaustive operator search
    #[arg(long, default_value_t = 8)]
    max_n: usize,
    /// Seed for the random-term sampling checks
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads for per-corpus-item parallelism
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

// ---------------------------------------------------------------------------
// Input loading
// ---------------------------------------------------------------------------

struct Loaded {
    name: String,
    lattice: Ortholattice,
    expanded: Option<ExpandedAlgebra>,
}

fn parse_atomic_gen(spec: &str) -> Result<Ortholattice> {
    let (kind, arg) = spec
        .split_once(':')
        .ok_or_else(|| anyhow!("generator spec '{spec}' needs the form name:k"))?;
    let k: usize = arg
        .parse()
        .with_context(|| format!("bad generator size in '{spec}'"))?;
    let lat = match kind {
        "boolean" => boolean(k),
        "mo" => mo(k),
        _ => bail!("unknown generator '{kind}' (expected boolean or mo)"),
    };
    lat.map_err(|e| anyhow!("{e}"))
}

fn parse_gen(spec: &str) -> Result<Ortholattice> {
    if let Some(rest) = spec.strip_prefix("product:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() < 2 {
            bail!("product spec '{spec}' needs at least two comma-separated factors");
        }
        let mut acc = parse_atomic_gen(parts[0])?;
        for part in &parts[1..] {
            let rhs = parse_atomic_gen(part)?;
            acc = acc
                .product(&rhs)
                .map_err(|e| anyhow!("product too large: {e}"))?
                .algebra;
        }
        Ok(acc)
    } else {
        parse_atomic_gen(spec)
    }
}

enum LoadOutcome {
    Ok(Loaded),
    /// A mathematically diagnosed failure: print the diagnosis, exit 1.
    Failed { name: String, error: IoError },
}

fn load_file(path: &Path) -> Result<LoadOutcome> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let name = path.display().to_string();
    let kind = match path.extension().and_then(|e| e.to_str()) {
        Some("hasse") => "hasse",
        Some("greechie") => "greechie",
        Some("json") => "json",
        _ => {
            let head = text
                .lines()
                .map(str::trim)
                .find(|l| !l.is_empty() && !l.starts_with('#'))
                .unwrap_or("");
            if head.starts_with('{') {
                "json"
            } else if head.starts_with("block:") {
                "greechie"
            } else {
                "hasse"
            }
        }
    };
    let build = |r: Result<Ortholattice, IoError>| -> Result<LoadOutcome> {
        match r {
            Ok(lattice) => Ok(LoadOutcome::Ok(Loaded {
                name: name.clone(),
                lattice,
                expanded: None,
            })),
            Err(e) if e.is_input_fault() => Err(anyhow!("{name}: {e}")),
            Err(error) => Ok(LoadOutcome::Failed {
                name: name.clone(),
                error,
            }),
        }
    };
    match kind {
        "hasse" => build(lattice_from_hasse(&text)),
        "greechie" => build(lattice_from_greechie(&text)),
        _ => {
            let json = omlkit_core::io::from_json(&text).map_err(|e| anyhow!("{name}: {e}"))?;
            let lattice = match json.to_lattice() {
                Ok(l) => l,
                Err(e) if e.is_input_fault() => return Err(anyhow!("{name}: {e}")),
                Err(error) => return Ok(LoadOutcome::Failed { name, error }),
            };
            let expanded = match &json.s {
                None => None,
                Some(_) => match json.to_expanded() {
                    Ok(alg) => Some(alg),
                    Err(e) => {
                        return Ok(LoadOutcome::Failed {
                            name,
                            error: IoError::Spec(e.to_string()),
                        })
                    }
                },
            };
            Ok(LoadOutcome::Ok(Loaded {
                name,
                lattice,
                expanded,
            }))
        }
    }
}

fn load_one(args: &InputArgs) -> Result<LoadOutcome> {
    match (&args.input, &args.gen) {
        (Some(path), None) => load_file(path),
        (None, Some(spec)) => Ok(LoadOutcome::Ok(Loaded {
            name: spec.clone(),
            lattice: parse_gen(spec)?,
            expanded: None,
        })),
        (Some(_), Some(_)) => bail!("give either a file or --gen, not both"),
        (None, None) => bail!("an input file or --gen spec is required"),
    }
}

// ---------------------------------------------------------------------------
// Report shapes
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct AxiomLine {
    axiom: String,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Vec<String>>,
    violations: usize,
}

fn axiom_lines(lat: &Ortholattice, report: &VerificationReport) -> Vec<AxiomLine> {
    report
        .checks
        .iter()
        .map(|c| AxiomLine {
            axiom: c.axiom.to_string(),
            passed: c.passed,
            witness: c
                .witness
                .as_ref()
                .map(|w| w.iter().map(|&x| lat.name(x).to_string()).collect()),
            violations: c.violations,
        })
        .collect()
}

#[derive(Serialize)]
struct CheckReport {
    input: String,
    n: usize,
    passed: bool,
    axioms: Vec<AxiomLine>,
    #[serde(skip_serializing_if = "Option::is_none")]
    s_axioms: Option<Vec<AxiomLine>>,
}

fn cmd_check(args: &CheckArgs) -> Result<u8> {
    let loaded = match load_one(&args.input)? {
        LoadOutcome::Ok(l) => l,
        LoadOutcome::Failed {
            name,
            error: IoError::Axioms { lattice, report },
        } => {
            emit_check_report(
                args.format,
                &CheckReport {
                    input: name,
                    n: lattice.n(),
                    passed: false,
                    axioms: axiom_lines(&lattice, &report),
                    s_axioms: None,
                },
            )?;
            return Ok(EXIT_CHECK_FAILED);
        }
        LoadOutcome::Failed { name, error } => {
            println!("{name}: {error}");
            return Ok(EXIT_CHECK_FAILED);
        }
    };
    let lat = &loaded.lattice;
    let report = lat.verify();
    let mut passed = report.passed();

    let s_axioms = loaded.expanded.as_ref().map(|alg| {
        let sr = omlkit_core::verify_state_operator(lat, alg.s()).expect("sizes match");
        passed &= sr.passed();
        sr.checks
            .iter()
            .map(|c| AxiomLine {
                axiom: c.axiom.to_string(),
                passed: c.passed,
                witness: c
                    .witness
                    .as_ref()
                    .map(|w| w.iter().map(|&x| lat.name(x).to_string()).collect()),
                violations: c.violations,
            })
            .collect::<Vec<_>>()
    });

    let out = CheckReport {
        input: loaded.name.clone(),
        n: lat.n(),
        passed,
        axioms: axiom_lines(lat, &report),
        s_axioms,
    };
    emit_check_report(args.format, &out)?;
    Ok(if passed { EXIT_PASS } else { EXIT_CHECK_FAILED })
}

fn emit_check_report(format: Format, out: &CheckReport) -> Result<()> {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(out)?),
        Format::Text => {
            println!("{} (n = {})", out.input, out.n);
            for line in out.axioms.iter().chain(out.s_axioms.iter().flatten()) {
                if line.passed {
                    println!("  {}: pass", line.axiom);
                } else {
                    println!(
                        "  {}: FAIL at ({}) [{} violations]",
                        line.axiom,
                        line.witness.as_deref().unwrap_or(&[]).join(", "),
                        line.violations
                    );
                }
            }
            println!("{}", if out.passed { "PASS" } else { "FAIL" });
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct StatesReport {
    input: String,
    n: usize,
    kind: StateKind,
    count: usize,
    states: Vec<StateVector>,
}

fn cmd_states(args: &StatesArgs) -> Result<u8> {
    let loaded = match load_one(&args.input)? {
        LoadOutcome::Ok(l) => l,
        LoadOutcome::Failed { name, error } => {
            println!("{name}: {error}");
            return Ok(EXIT_CHECK_FAILED);
        }
    };
    let kind: StateKind = args.kind.into();
    let states = enumerate_states(&loaded.lattice, kind);
    let out = StatesReport {
        input: loaded.name,
        n: loaded.lattice.n(),
        kind,
        count: states.len(),
        states,
    };
    match args.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&out)?),
        Format::Text => {
            println!("{} {} states on {} (n = {})", out.count, out.kind, out.input, out.n);
            for s in &out.states {
                println!("  {}  {}", s.bit_string(), s.kind());
            }
        }
    }
    Ok(EXIT_PASS)
}

fn pick_state(lat: &Ortholattice, kind: StateKind, index: usize) -> Result<StateVector> {
    let states = enumerate_states(lat, kind);
    states.get(index).cloned().ok_or_else(|| {
        anyhow!(
            "state index {index} out of range; {} {kind} states available",
            states.len()
        )
    })
}

fn cmd_expand(args: &ExpandArgs) -> Result<u8> {
    let loaded = match load_one(&args.input)? {
        LoadOutcome::Ok(l) => l,
        LoadOutcome::Failed { name, error } => {
            println!("{name}: {error}");
            return Ok(EXIT_CHECK_FAILED);
        }
    };
    let sigma = pick_state(&loaded.lattice, args.kind.into(), args.state_index)?;
    let alg = build_internal(&loaded.lattice, &sigma).expect("enumerated states expand");
    println!(
        "{}",
        serde_json::to_string_pretty(&LatticeJson::from_expanded(&alg))?
    );
    Ok(EXIT_PASS)
}

#[derive(Serialize)]
struct DecompositionEntry {
    z: String,
    left: LatticeJson,
    right: LatticeJson,
}

#[derive(Serialize)]
struct DecomposeReport {
    input: String,
    n: usize,
    s_image: Vec<String>,
    directly_indecomposable: bool,
    decompositions: Vec<DecompositionEntry>,
}

fn cmd_decompose(args: &DecomposeArgs) -> Result<u8> {
    let loaded = match load_one(&args.input)? {
        LoadOutcome::Ok(l) => l,
        LoadOutcome::Failed { name, error } => {
            println!("{name}: {error}");
            return Ok(EXIT_CHECK_FAILED);
        }
    };
    let alg = match (loaded.expanded, args.state_index) {
        (Some(alg), None) => alg,
        (None, Some(index)) => {
            let sigma = pick_state(&loaded.lattice, args.kind.into(), index)?;
            build_internal(&loaded.lattice, &sigma).expect("enumerated states expand")
        }
        (Some(_), Some(_)) => bail!("input already carries s; drop --state-index"),
        (None, None) => bail!("input has no s; give --state-index to build one"),
    };

    let lat = alg.lattice();
    let proper: Vec<ElementId> = alg
        .s_image()
        .iter()
        .filter(|&z| z != lat.bottom() && z != lat.top())
        .collect();
    let decompositions: Vec<DecompositionEntry> = proper
        .iter()
        .map(|&z| {
            let d = alg.decompose(z).expect("proper image elements decompose");
            DecompositionEntry {
                z: lat.name(z).to_string(),
                left: LatticeJson::from_expanded(&d.left.algebra),
                right: LatticeJson::from_expanded(&d.right.algebra),
            }
        })
        .collect();
    let out = DecomposeReport {
        input: loaded.name,
        n: lat.n(),
        s_image: alg.s_image().iter().map(|x| lat.name(x).to_string()).collect(),
        directly_indecomposable: alg.is_directly_indecomposable(),
        decompositions,
    };
    match args.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&out)?),
        Format::Text => {
            println!("{} (n = {})", out.input, out.n);
            println!("s-image: {{{}}}", out.s_image.join(", "));
            println!(
                "directly indecomposable: {}",
                if out.directly_indecomposable { "yes" } else { "no" }
            );
            for d in &out.decompositions {
                println!(
                    "  z = {}: factors of size {} and {}",
                    d.z, d.left.n, d.right.n
                );
            }
        }
    }
    Ok(EXIT_PASS)
}

#[derive(Serialize)]
struct VerifyReport {
    family: StateKind,
    seed: u64,
    nvars: usize,
    max_n: usize,
    harness: HarnessReport,
    batteries: Vec<BatteryReport>,
    passed: bool,
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8> {
    let mut corpus: Vec<Loaded> = Vec::new();
    for path in &args.inputs {
        match load_file(path)? {
            LoadOutcome::Ok(l) => corpus.push(l),
            LoadOutcome::Failed { name, error } => {
                println!("{name}: {error}");
                return Ok(EXIT_CHECK_FAILED);
            }
        }
    }
    for spec in &args.gen {
        corpus.push(Loaded {
            name: spec.clone(),
            lattice: parse_gen(spec)?,
            expanded: None,
        });
    }
    if corpus.is_empty() {
        bail!("the corpus is empty; give files or --gen specs");
    }

    let opts = HarnessOptions {
        nvars_bound: args.nvars,
        max_search_n: args.max_n,
        seed: args.seed,
        nf_samples: 200,
    };
    let family: StateKind = args.family.into();
    let named: Vec<(String, Ortholattice)> = corpus
        .iter()
        .map(|l| (l.name.clone(), l.lattice.clone()))
        .collect();

    let run = || -> (Vec<HarnessReport>, Vec<BatteryReport>) {
        // Per-item parallelism; output order follows input order.
        let harness_parts: Vec<HarnessReport> = named
            .par_iter()
            .map(|item| {
                characterization_harness(std::slice::from_ref(item), family, &opts)
            })
            .collect();
        let batteries: Vec<BatteryReport> = named
            .par_iter()
            .map(|(name, lat)| invariant_battery(name, lat, &opts))
            .collect();
        (harness_parts, batteries)
    };
    let (harness_parts, batteries) = match args.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .context("building the worker pool")?
            .install(run),
        None => run(),
    };

    let harness = HarnessReport {
        family,
        nvars_bound: opts.nvars_bound,
        max_search_n: opts.max_search_n,
        items: harness_parts.into_iter().flat_map(|r| r.items).collect(),
        passed: true,
    };
    let harness = HarnessReport {
        passed: harness.items.iter().all(|i| i.passed),
        ..harness
    };
    let passed = harness.passed && batteries.iter().all(|b| b.passed);

    let out = VerifyReport {
        family,
        seed: args.seed,
        nvars: args.nvars,
        max_n: args.max_n,
        harness,
        batteries,
        passed,
    };
    match args.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&out)?),
        Format::Text => {
            for (item, battery) in out.harness.items.iter().zip(&out.batteries) {
                let mut line = String::new();
                write!(
                    line,
                    "{} (n = {}): {} {} states, direction I {}/{}",
                    item.name,
                    item.n,
                    item.family_states,
                    out.family,
                    item.condition_i.passed,
                    item.condition_i.states
                )?;
                if item.condition_e.searched {
                    write!(
                        line,
                        ", search found {} (counts {})",
                        item.condition_e.di_family_members,
                        if item.counts_match == Some(true) { "match" } else { "MISMATCH" }
                    )?;
                } else {
                    write!(line, ", search skipped (n > {})", out.max_n)?;
                }
                write!(
                    line,
                    ", battery {}",
                    if battery.passed { "pass" } else { "FAIL" }
                )?;
                println!("{line}");
            }
            println!("{}", if out.passed { "PASS" } else { "FAIL" });
        }
    }
    Ok(if out.passed { EXIT_PASS } else { EXIT_CHECK_FAILED })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check(args) => cmd_check(args),
        Command::States(args) => cmd_states(args),
        Command::Expand(args) => cmd_expand(args),
        Command::Decompose(args) => cmd_decompose(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT_ERROR)
        }
    }
}
