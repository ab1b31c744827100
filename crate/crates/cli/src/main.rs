//! `tx`: command-line front end for the transducer library.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;
use std::time::Instant;

use cantor_transducers::constructions::{example_a, example_b, example_g, example_t, example_u, identity, pi_r};
use cantor_transducers::format::{parse_transducer, to_text};
use cantor_transducers::group::{group_product, order, orbit_lengths, GroupElement};
use cantor_transducers::image::Analysis;
use cantor_transducers::inverse::invert_initial;
use cantor_transducers::minimize::{minimize, minimize_core};
use cantor_transducers::par::Exec;
use cantor_transducers::signature::{member_onr, member_tonr, signature, signature_class_partition};
use cantor_transducers::suite::{run_suite, suite_ids};
use cantor_transducers::sync::{core, minimal_sync_level, Automaton};
use cantor_transducers::viable::realize_in_tbnr;
use cantor_transducers::{product, Bounds, Error, RotationClass, Transducer, Word};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "tx", version, about = "Synchronizing transducers and the groups O_n, TO_n")]
struct Cli {
    /// Print a JSON report instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    #[command(flatten)]
    bounds: BoundFlags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct BoundFlags {
    #[arg(long, global = true, default_value_t = Bounds::default().gcp_depth)]
    gcp_depth: usize,
    #[arg(long, global = true, default_value_t = Bounds::default().image_iterations)]
    image_iterations: usize,
    #[arg(long, global = true, default_value_t = Bounds::default().preimage_depth)]
    preimage_depth: usize,
    #[arg(long, global = true, default_value_t = Bounds::default().inverse_states)]
    inverse_states: usize,
    #[arg(long, global = true, default_value_t = Bounds::default().order_states)]
    order_states: usize,
    #[arg(long, global = true, default_value_t = Bounds::default().viable_depth)]
    viable_depth: usize,
    /// Largest viable combination tried by `realize`; defaults to 3(n-1)+1.
    #[arg(long, global = true)]
    viable_size: Option<usize>,
}

impl BoundFlags {
    fn bounds(&self) -> Bounds {
        Bounds {
            gcp_depth: self.gcp_depth,
            image_iterations: self.image_iterations,
            preimage_depth: self.preimage_depth,
            inverse_states: self.inverse_states,
            order_states: self.order_states,
            viable_depth: self.viable_depth,
            viable_size: self.viable_size,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check a machine file and print it back in normal form.
    Parse { file: String },
    /// Minimize an initial machine, or the core of one without initial state.
    Minimize {
        file: String,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
    /// Product machine: run `a`, feed its output to `b`.
    Product {
        a: String,
        b: String,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
    /// Inverse of an initial machine or of a core element.
    Invert {
        file: String,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
    /// Minimal synchronizing level and the collapse sequence.
    SyncLevel { file: String },
    /// The core of a synchronizing machine.
    Core {
        file: String,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
    /// Images, m-values and injectivity per state, plus orientation.
    Analyze { file: String },
    /// Signature and reduced signature.
    Sig { file: String },
    /// Membership in O_{n,r} and TO_{n,r}.
    Member {
        #[arg(long)]
        r: usize,
        file: String,
    },
    /// Orientation of a core element.
    Orient { file: String },
    /// Write one of the built-in machines: g4, T:<n>, U:<n>, A:<n>, B:<n>, piR:<n>, id:<n>.
    Example {
        #[arg(long)]
        name: String,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
    /// A bi-synchronizing initial machine with r roots whose core is the element.
    Realize {
        #[arg(long)]
        r: usize,
        file: String,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
    /// Group product of two core elements, `a` first.
    Mul {
        a: String,
        b: String,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
    /// Order of an element, searched up to `--bound`.
    Order {
        #[arg(long, default_value_t = 64)]
        bound: usize,
        file: String,
    },
    /// Orbit of a rotation class under the element.
    Orbit {
        /// Letters of a representative, comma separated.
        #[arg(long)]
        class: String,
        #[arg(long, default_value_t = 8)]
        steps: usize,
        file: String,
    },
    /// Classes of r in 1..n-1 that no signature in the list tells apart.
    Partition {
        #[arg(long)]
        n: usize,
        /// Comma separated residues.
        #[arg(long)]
        sigs: String,
    },
    /// Run a named check suite.
    Verify {
        #[arg(long, default_value = "paper")]
        suite: String,
        /// Worker threads; 1 runs sequentially.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Domain(#[from] Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) | CliError::Domain(_) => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// What a subcommand produced: the plain-text rendering and the JSON result.
struct Report {
    inputs: Value,
    result: Value,
    text: String,
    /// Where plain text goes; JSON always goes to stdout.
    output: String,
}

impl Report {
    fn new(inputs: Value, result: Value, text: String) -> Self {
        Report { inputs, result, text, output: "-".into() }
    }

    fn to(mut self, output: &str) -> Self {
        self.output = output.to_string();
        self
    }
}

fn read_input(path: &str) -> CliResult<String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| CliError::Io(format!("reading stdin: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| CliError::Io(format!("reading {path}: {e}")))
    }
}

fn write_output(path: &str, text: &str) -> CliResult<()> {
    if path == "-" {
        let mut out = io::stdout().lock();
        out.write_all(text.as_bytes()).map_err(|e| CliError::Io(format!("writing stdout: {e}")))
    } else {
        fs::write(path, text).map_err(|e| CliError::Io(format!("writing {path}: {e}")))
    }
}

fn load(path: &str) -> CliResult<Transducer> {
    Ok(parse_transducer(&read_input(path)?)?)
}

fn element(path: &str, bounds: &Bounds) -> CliResult<GroupElement> {
    Ok(GroupElement::new(&load(path)?, bounds)?)
}

fn machine_report(command_inputs: Value, t: &Transducer, output: &str) -> Report {
    let text = to_text(t);
    Report::new(command_inputs, json!({ "states": t.num_states(), "machine": text }), text).to(output)
}

fn example(name: &str) -> CliResult<Transducer> {
    if name == "g4" {
        return Ok(example_g());
    }
    let (kind, n) = name
        .split_once(':')
        .ok_or_else(|| CliError::Usage(format!("unknown example `{name}`")))?;
    let n: usize = n.parse().map_err(|_| CliError::Usage(format!("bad alphabet size in `{name}`")))?;
    Ok(match kind {
        "T" => example_t(n)?,
        "U" => example_u(n)?,
        "A" => example_a(n)?,
        "B" => example_b(n)?,
        "piR" if n >= 2 => pi_r(n),
        "id" if n >= 2 => identity(n),
        "piR" | "id" => return Err(CliError::Usage(format!("alphabet size must be at least 2 in `{name}`"))),
        _ => return Err(CliError::Usage(format!("unknown example `{name}`"))),
    })
}

fn parse_list<T: std::str::FromStr>(flag: &str, text: &str) -> CliResult<Vec<T>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse().map_err(|_| CliError::Usage(format!("--{flag}: cannot parse `{s}`"))))
        .collect()
}

fn run(command: &Command, bounds: &Bounds) -> CliResult<Report> {
    Ok(match command {
        Command::Parse { file } => {
            let t = load(file)?;
            let text = to_text(&t);
            Report::new(
                json!({ "file": file }),
                json!({
                    "n": t.n(),
                    "r": t.roots(),
                    "states": t.num_states(),
                    "initial": t.initial().map(|q| t.label(q).to_string()),
                    "synchronous": t.is_synchronous(),
                    "machine": text,
                }),
                text,
            )
        }
        Command::Minimize { file, output } => {
            let t = load(file)?;
            let m = if t.initial().is_some() { minimize(&t, bounds)? } else { minimize_core(&t, bounds)? };
            machine_report(json!({ "file": file }), &m, output)
        }
        Command::Product { a, b, output } => {
            let p = product(&load(a)?, &load(b)?)?;
            machine_report(json!({ "a": a, "b": b }), &p, output)
        }
        Command::Invert { file, output } => {
            let t = load(file)?;
            let inv = if t.initial().is_some() {
                invert_initial(&t, bounds)?
            } else {
                GroupElement::new(&t, bounds)?.inverse_machine().clone()
            };
            machine_report(json!({ "file": file }), &inv, output)
        }
        Command::SyncLevel { file } => {
            let t = load(file)?;
            let level = minimal_sync_level(&t)?;
            let sequence = Automaton::of(&t).collapse_sequence();
            let seq: Vec<String> = sequence.iter().map(|k| k.to_string()).collect();
            Report::new(
                json!({ "file": file }),
                json!({ "sync_level": level, "collapse_sequence": sequence }),
                format!("sync-level={level}\ncollapse={}\n", seq.join(",")),
            )
        }
        Command::Core { file, output } => {
            let c = core(&load(file)?)?;
            machine_report(json!({ "file": file }), &c, output)
        }
        Command::Analyze { file } => {
            let t = load(file)?;
            let analysis = Analysis::new(&t, bounds)?;
            let reports: Vec<_> = t.states().map(|q| analysis.report(&t, q)).collect();
            let orientation = analysis.orientation(&t)?;
            let mut text = String::new();
            for r in &reports {
                text.push_str(&format!(
                    "{}: im={{{}}} m={} injective={} homeomorphism={}\n",
                    r.state,
                    r.image.join("; "),
                    r.m,
                    r.injective,
                    r.homeomorphism
                ));
            }
            text.push_str(&format!("orientation={orientation}\n"));
            Report::new(json!({ "file": file }), json!({ "states": reports, "orientation": orientation }), text)
        }
        Command::Sig { file } => {
            let s = signature(&load(file)?, bounds)?;
            let text = format!("sig={} rsig={}\n", s.sig, s.rsig);
            Report::new(json!({ "file": file }), json!({ "sig": s.sig.to_string(), "rsig": s.rsig, "sync_level": s.sync_level, "per_word_m": s.per_word_m }), text)
        }
        Command::Member { r, file } => {
            let t = load(file)?;
            let o = member_onr(&t, *r, bounds)?;
            let to = member_tonr(&t, *r, bounds)?;
            let n = t.n();
            let text = format!(
                "O_{{{n},{r}}}: {} ({})\nTO_{{{n},{r}}}: {} ({})\n",
                o.holds, o.reason, to.holds, to.reason
            );
            Report::new(json!({ "file": file, "r": r }), json!({ "O": o, "TO": to }), text)
        }
        Command::Orient { file } => {
            let g = element(file, bounds)?;
            Report::new(json!({ "file": file }), json!(g.orientation()), format!("{}\n", g.orientation()))
        }
        Command::Example { name, output } => machine_report(json!({ "name": name }), &example(name)?, output),
        Command::Realize { r, file, output } => {
            let g = element(file, bounds)?;
            let m = realize_in_tbnr(&g, *r, bounds)?;
            machine_report(json!({ "file": file, "r": r }), &m, output)
        }
        Command::Mul { a, b, output } => {
            let p = group_product(&element(a, bounds)?, &element(b, bounds)?, bounds)?;
            machine_report(json!({ "a": a, "b": b }), p.machine(), output)
        }
        Command::Order { bound, file } => {
            let o = order(&element(file, bounds)?, *bound, bounds)?;
            let text = format!("{o}\n");
            Report::new(json!({ "file": file, "bound": bound }), json!(o), text)
        }
        Command::Orbit { class, steps, file } => {
            let g = element(file, bounds)?;
            let letters: Vec<u8> = parse_list("class", class)?;
            if let Some(&a) = letters.iter().find(|&&a| a as usize >= g.n()) {
                return Err(CliError::Usage(format!("--class: letter {a} is outside the alphabet of size {}", g.n())));
            }
            let c = RotationClass::of(&Word::from(letters))?;
            let lengths = orbit_lengths(&g, &c, *steps)?;
            let shown: Vec<String> = lengths.iter().map(|k| k.to_string()).collect();
            Report::new(
                json!({ "file": file, "class": c.to_string(), "steps": steps }),
                json!({ "lengths": lengths }),
                format!("{}\n", shown.join(" ")),
            )
        }
        Command::Partition { n, sigs } => {
            let values: Vec<u64> = parse_list("sigs", sigs)?;
            let classes = signature_class_partition(*n, &values)?;
            let mut text = String::new();
            for class in &classes {
                let members: Vec<String> = class.iter().map(|r| r.to_string()).collect();
                text.push_str(&format!("{{{}}}\n", members.join(",")));
            }
            Report::new(json!({ "n": n, "sigs": values }), json!({ "classes": classes }), text)
        }
        Command::Verify { suite, jobs } => {
            let ids = suite_ids(suite).map_err(|e| CliError::Usage(e.to_string()))?;
            let exec = configure_jobs(*jobs)?;
            let outcomes = run_suite(&ids, bounds, exec)?;
            let mut text = String::new();
            for o in &outcomes {
                text.push_str(&o.line());
                text.push('\n');
            }
            let failed = outcomes.iter().filter(|o| !o.pass).count();
            text.push_str(&format!("{} passed, {failed} failed\n", outcomes.len() - failed));
            if failed > 0 {
                print!("{text}");
                return Err(CliError::Domain(Error::SearchExhausted(format!("{failed} suite item(s) failed"))));
            }
            Report::new(json!({ "suite": suite, "jobs": jobs }), json!(outcomes), text)
        }
    })
}

#[cfg(feature = "parallel")]
fn configure_jobs(jobs: usize) -> CliResult<Exec> {
    if jobs == 1 {
        return Ok(Exec::Sequential);
    }
    if jobs > 1 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Io(format!("starting worker pool: {e}")))?;
    }
    Ok(Exec::Parallel)
}

#[cfg(not(feature = "parallel"))]
fn configure_jobs(_jobs: usize) -> CliResult<Exec> {
    Ok(Exec::Sequential)
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Parse { .. } => "parse",
        Command::Minimize { .. } => "minimize",
        Command::Product { .. } => "product",
        Command::Invert { .. } => "invert",
        Command::SyncLevel { .. } => "sync-level",
        Command::Core { .. } => "core",
        Command::Analyze { .. } => "analyze",
        Command::Sig { .. } => "sig",
        Command::Member { .. } => "member",
        Command::Orient { .. } => "orient",
        Command::Example { .. } => "example",
        Command::Realize { .. } => "realize",
        Command::Mul { .. } => "mul",
        Command::Order { .. } => "order",
        Command::Orbit { .. } => "orbit",
        Command::Partition { .. } => "partition",
        Command::Verify { .. } => "verify",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let bounds = cli.bounds.bounds();
    let name = command_name(&cli.command);
    let start = Instant::now();
    let outcome = run(&cli.command, &bounds).and_then(|report| {
        if cli.json {
            let doc: BTreeMap<&str, Value> = BTreeMap::from([
                ("command", json!(name)),
                ("inputs", report.inputs),
                ("result", report.result),
                ("bounds", json!(bounds)),
                ("elapsed_ms", json!(start.elapsed().as_millis() as u64)),
            ]);
            let text = serde_json::to_string_pretty(&doc).expect("reports serialize") + "\n";
            write_output("-", &text)
        } else {
            write_output(&report.output, &report.text)
        }
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if cli.json {
                let kind = match &e {
                    CliError::Domain(d) => d.kind(),
                    CliError::Usage(_) => "usage",
                    CliError::Io(_) => "io",
                };
                let doc = json!({ "command": name, "error": { "kind": kind, "message": e.to_string() } });
                eprintln!("{doc}");
            } else {
                eprintln!("tx {name}: {e}");
            }
            ExitCode::from(e.code())
        }
    }
}
