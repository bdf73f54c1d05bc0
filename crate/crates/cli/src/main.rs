//! `symcret`: check relations, extend abstractions, synthesize and
//! concretize controllers, and run the bundled demos.
//!
//! Exit status: 0 when the property holds (or the command succeeded), 1 when
//! it is refuted, 2 on usage or validation errors. Errors are reported on
//! stderr as `{"code": …, "message": …}`.

mod demo;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use symcret::concretize::{
    closed_loop_run, closed_loop_tree, memoryless_controller, ClosedLoop, Concretization, LoopPolicy, OnUndefined,
    Selection,
};
use symcret::format::{system_to_json, to_pretty, Bundle, NamedController, NamedRelation};
use symcret::oracle::{
    check_property_one, check_property_two, check_property_two_all_controllers, check_property_two_pointwise,
    OracleQuery, CONTROLLER_BUDGET, THREADS_ENV,
};
use symcret::relations::{check, maximal_interface, mcr_extension, Interface, RelationKind};
use symcret::synthesis::{synthesize_reach_avoid, Synthesis};
use symcret::{fixtures, Controller, FiniteTransitionSystem, Relation, State, StateSet};

#[derive(Parser, Debug)]
#[command(name = "symcret", version, about = "Controller concretization for finite abstractions")]
struct Cli {
    /// Project bundle: a JSON file, or `builtin:fig5` / `builtin:fig8`.
    #[arg(long, global = true, value_name = "PATH")]
    bundle: Option<String>,

    /// Print machine-readable JSON only.
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads for parallel checks.
    #[arg(long, global = true, env = THREADS_ENV)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide ASR, MCR or FRR between two systems.
    Check {
        #[arg(value_enum)]
        kind: Kind,
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Complete an ASR abstraction into an MCR one.
    Extend {
        #[command(flatten)]
        pair: PairArgs,
        /// Write the extended system here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maximally permissive reach-avoid synthesis.
    Synthesize {
        #[arg(long)]
        sys: Option<String>,
        #[arg(long)]
        spec: String,
    },
    /// Build a concrete controller (memoryless) or a concretizer configuration (dynamic).
    Concretize {
        #[arg(long, value_enum, default_value = "memoryless")]
        mode: ConcretizeMode,
        /// Abstract controller.
        #[arg(long)]
        controller: String,
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_enum, default_value = "asr")]
        interface: InterfaceKind,
    },
    /// Run a closed loop from one concrete state.
    Simulate(SimulateArgs),
    /// Bounded check of the closed-loop properties.
    Verify(VerifyArgs),
    /// Reproduce the worked examples.
    Demo {
        #[command(subcommand)]
        which: DemoCommand,
    },
}

#[derive(Args, Debug)]
struct PairArgs {
    /// Relation name; its endpoints are used when `--s1` / `--s2` are absent.
    #[arg(long)]
    rel: String,
    #[arg(long)]
    s1: Option<String>,
    #[arg(long)]
    s2: Option<String>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Concrete system.
    #[arg(long)]
    sys: String,
    /// A controller for `--sys` (static) or for an abstraction of it.
    #[arg(long)]
    controller: String,
    #[arg(long)]
    from: String,
    #[arg(long, default_value_t = 10)]
    horizon: usize,
    /// Architecture for abstract controllers.
    #[arg(long, value_enum, default_value = "memoryless")]
    mode: LoopMode,
    /// Relation between `--sys` and the controller's system; found by endpoints when absent.
    #[arg(long)]
    rel: Option<String>,
    #[arg(long, value_enum, default_value = "asr")]
    interface: InterfaceKind,
    /// How free choices are resolved.
    #[arg(long, value_enum, default_value = "lexmin")]
    resolver: Resolver,
    /// Scripted abstract states (comma separated), used before falling back to lexmin.
    #[arg(long, value_delimiter = ',')]
    script_quantizer: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    script_abstract_input: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    script_concrete_input: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    script_successor: Vec<String>,
    /// Fail instead of ending the run when the controller is undefined
    /// (for instance on reaching the target).
    #[arg(long)]
    fail_on_undefined: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    property: PropertyKind,
    #[command(flatten)]
    pair: PairArgs,
    /// Abstract controller (not needed for `two-all`).
    #[arg(long)]
    controller: Option<String>,
    /// Concrete controller for property one; the memoryless concretization by default.
    #[arg(long)]
    concrete_controller: Option<String>,
    /// Concrete start states, comma separated; `--from=` is the empty set.
    #[arg(long)]
    from: Option<String>,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long, value_enum, default_value = "asr")]
    interface: InterfaceKind,
    #[arg(long, default_value_t = CONTROLLER_BUDGET)]
    budget: u128,
}

#[derive(Subcommand, Debug)]
enum DemoCommand {
    Fig5,
    Fig8,
    Crosscheck {
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// Fixed oracle horizon; `|X1|·|X2| + 1` per trial when absent.
        #[arg(long)]
        horizon: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Asr,
    Mcr,
    Frr,
}

impl From<Kind> for RelationKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Asr => RelationKind::Asr,
            Kind::Mcr => RelationKind::Mcr,
            Kind::Frr => RelationKind::Frr,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum InterfaceKind {
    Asr,
    Mcr,
}

impl From<InterfaceKind> for RelationKind {
    fn from(k: InterfaceKind) -> Self {
        match k {
            InterfaceKind::Asr => RelationKind::Asr,
            InterfaceKind::Mcr => RelationKind::Mcr,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ConcretizeMode {
    Memoryless,
    Dynamic,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LoopMode {
    Memoryless,
    Dynamic,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Resolver {
    Lexmin,
    All,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PropertyKind {
    One,
    Two,
    TwoPointwise,
    TwoAll,
}

#[derive(Debug)]
enum CliError {
    Core(symcret::Error),
    Usage(String),
    Io(String),
}

impl From<symcret::Error> for CliError {
    fn from(e: symcret::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn code(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.code(),
            CliError::Usage(_) => "usage",
            CliError::Io(_) => "io",
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Core(e) => e.to_string(),
            CliError::Usage(m) | CliError::Io(m) => m.clone(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// What a command produced: a verdict (exit 0 or 1) and its report.
struct Output {
    holds: bool,
    summary: Vec<String>,
    body: Value,
    /// Print `body` after the summary in text mode.
    text_body: bool,
}

impl Output {
    fn success(summary: impl Into<String>, body: Value) -> Self {
        Output {
            holds: true,
            summary: vec![summary.into()],
            body,
            text_body: true,
        }
    }

    fn verdict(holds: bool, summary: impl Into<String>, body: Value) -> Self {
        Output {
            holds,
            summary: vec![summary.into()],
            body,
            text_body: true,
        }
    }
}

fn load_bundle(spec: Option<&str>) -> CliResult<Bundle> {
    let spec = spec.ok_or_else(|| CliError::Usage("this command needs --bundle".into()))?;
    let text = match spec {
        "builtin:fig5" => fixtures::FIG5_JSON.to_owned(),
        "builtin:fig8" => fixtures::FIG8_JSON.to_owned(),
        path => fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read `{path}`: {e}")))?,
    };
    Ok(Bundle::from_json(&text)?)
}

fn pair<'a>(
    bundle: &'a Bundle,
    args: &PairArgs,
) -> CliResult<(&'a FiniteTransitionSystem, &'a FiniteTransitionSystem, &'a NamedRelation)> {
    let rel = bundle.relation(&args.rel)?;
    let s1 = bundle.system(args.s1.as_deref().unwrap_or(&rel.from))?;
    let s2 = bundle.system(args.s2.as_deref().unwrap_or(&rel.to))?;
    Ok((s1, s2, rel))
}

fn interface_for(
    s1: &FiniteTransitionSystem,
    s2: &FiniteTransitionSystem,
    r: &Relation,
    kind: InterfaceKind,
) -> CliResult<Interface> {
    Ok(maximal_interface(s1, s2, r, kind.into())?)
}

fn parse_states(text: &str) -> StateSet {
    text.split(',').map(str::trim).filter(|s| !s.is_empty()).map(State::new).collect()
}

fn check_cmd(bundle: &Bundle, kind: Kind, args: &PairArgs) -> CliResult<Output> {
    let (s1, s2, rel) = pair(bundle, args)?;
    let verdict = check(kind.into(), s1, s2, &rel.relation)?;
    let summary = match &verdict.witness {
        None => format!("{} holds for `{}`", verdict.kind, args.rel),
        Some(w) => format!("{} refuted at ({}, {}, {})", verdict.kind, w.x1, w.x2, w.u2),
    };
    Ok(Output::verdict(verdict.holds, summary, serde_json::to_value(&verdict).expect("serializable")))
}

fn extend_cmd(bundle: &Bundle, args: &PairArgs, out: Option<&Path>) -> CliResult<Output> {
    let (s1, s2, rel) = pair(bundle, args)?;
    let ext = mcr_extension(s1, s2, &rel.relation)?;
    let added: Vec<Value> = ext
        .transitions()
        .filter_map(|(x, u, succ)| {
            let new: Vec<&str> = succ.difference(s2.post(x, u)).map(State::as_str).collect();
            (!new.is_empty()).then(|| json!({"state": x, "input": u, "added": new}))
        })
        .collect();
    let text = system_to_json(&ext);
    let summary = format!("extension adds {} successor set(s)", added.len());
    match out {
        Some(path) => {
            fs::write(path, &text).map_err(|e| CliError::Io(format!("cannot write `{}`: {e}", path.display())))?;
            Ok(Output::success(
                format!("{summary}; written to {}", path.display()),
                json!({"written": path.display().to_string(), "added": added}),
            ))
        }
        None => Ok(Output::success(summary, serde_json::from_str(&text).expect("valid JSON"))),
    }
}

fn synthesize_cmd(bundle: &Bundle, sys: Option<&str>, spec: &str) -> CliResult<Output> {
    let named = bundle.spec(spec)?;
    let system = bundle.system(sys.unwrap_or(&named.system))?;
    let result = synthesize_reach_avoid(system, &named.spec)?;
    let fp = result.fixed_point();
    let mut body = json!({
        "solvable": result.is_solved(),
        "winning": fp.winning,
        "controller": fp.controller,
        "rank": fp.rank,
    });
    let summary = match &result {
        Synthesis::Solved(r) => format!("solvable; {} winning state(s)", r.winning.len()),
        Synthesis::Unsolvable { losing, .. } => {
            body["losing"] = json!(losing);
            let names: Vec<&str> = losing.iter().map(State::as_str).collect();
            format!("unsolvable from {}", names.join(", "))
        }
    };
    Ok(Output::verdict(result.is_solved(), summary, body))
}

fn abstract_controller<'a>(bundle: &'a Bundle, name: &str, s2_name: &str) -> CliResult<&'a Controller> {
    let named: &NamedController = bundle.controller(name)?;
    if named.system != s2_name {
        return Err(CliError::Usage(format!(
            "controller `{name}` is for system `{}`, not `{s2_name}`",
            named.system
        )));
    }
    Ok(&named.controller)
}

fn concretize_cmd(
    bundle: &Bundle,
    mode: ConcretizeMode,
    controller: &str,
    args: &PairArgs,
    kind: InterfaceKind,
) -> CliResult<Output> {
    let (s1, s2, rel) = pair(bundle, args)?;
    let s2_name = args.s2.as_deref().unwrap_or(&rel.to);
    let c2 = abstract_controller(bundle, controller, s2_name)?;
    let iface = interface_for(s1, s2, &rel.relation, kind)?;
    match mode {
        ConcretizeMode::Memoryless => {
            let c1 = memoryless_controller(c2, &rel.relation, &iface)?;
            Ok(Output::success(
                format!("memoryless controller defined on {} state(s)", c1.len()),
                serde_json::to_value(&c1).expect("serializable"),
            ))
        }
        ConcretizeMode::Dynamic => Ok(Output::success(
            "dynamic concretizer configuration",
            json!({
                "architecture": "dynamic",
                "abstraction": s2_name,
                "relation": args.rel,
                "controller": c2,
                "interface": iface,
            }),
        )),
    }
}

fn selection<T: From<String>>(script: &[String], enumerate: bool) -> Selection<T> {
    if !script.is_empty() {
        Selection::Scripted(script.iter().cloned().map(T::from).collect())
    } else if enumerate {
        Selection::EnumerateAll
    } else {
        Selection::LexMin
    }
}

fn simulate_cmd(bundle: &Bundle, args: &SimulateArgs) -> CliResult<Output> {
    let s1 = bundle.system(&args.sys)?;
    let named = bundle.controller(&args.controller)?;
    let x0 = State::new(&args.from);
    let all = matches!(args.resolver, Resolver::All);
    let policy = LoopPolicy {
        quantizer: selection(&args.script_quantizer, all),
        abstract_input: selection(&args.script_abstract_input, all),
        concrete_input: selection(&args.script_concrete_input, all),
        successor: selection(&args.script_successor, all),
        on_undefined: if args.fail_on_undefined {
            OnUndefined::Fail
        } else {
            OnUndefined::Halt
        },
    };

    let run = |mode: ClosedLoop<'_>| -> CliResult<Vec<Value>> {
        if all {
            Ok(closed_loop_tree(s1, mode, &x0, args.horizon, &policy)?.iter().map(|r| r.to_trace()).collect())
        } else {
            Ok(vec![closed_loop_run(s1, mode, &x0, args.horizon, &policy)?.to_trace()])
        }
    };

    let traces = if named.system == args.sys {
        run(ClosedLoop::Static(&named.controller))?
    } else {
        let rel = match &args.rel {
            Some(name) => bundle.relation(name)?,
            None => bundle
                .relations
                .values()
                .find(|r| r.from == args.sys && r.to == named.system)
                .ok_or_else(|| {
                    CliError::Usage(format!("no relation from `{}` to `{}`; pass --rel", args.sys, named.system))
                })?,
        };
        let s2 = bundle.system(&named.system)?;
        let iface = interface_for(s1, s2, &rel.relation, args.interface)?;
        let conc = Concretization::new(&named.controller, &rel.relation, &iface);
        match args.mode {
            LoopMode::Memoryless => run(ClosedLoop::Memoryless(conc))?,
            LoopMode::Dynamic => run(ClosedLoop::Dynamic {
                concretization: conc,
                abstraction: s2,
            })?,
        }
    };
    let summary = format!("{} run(s) from {}", traces.len(), args.from);
    let body = if all { Value::Array(traces) } else { traces.into_iter().next().expect("one run") };
    Ok(Output::success(summary, body))
}

fn verify_cmd(bundle: &Bundle, args: &VerifyArgs) -> CliResult<Output> {
    let (s1, s2, rel) = pair(bundle, &args.pair)?;
    let s2_name = args.pair.s2.as_deref().unwrap_or(&rel.to);
    let r = &rel.relation;
    let query = OracleQuery {
        initial: args.from.as_deref().map(parse_states),
        horizon: args.horizon,
    };
    let iface = interface_for(s1, s2, r, args.interface)?;
    let c2 = || -> CliResult<&Controller> {
        let name = args
            .controller
            .as_deref()
            .ok_or_else(|| CliError::Usage("--controller is required for this property".into()))?;
        abstract_controller(bundle, name, s2_name)
    };
    let (holds, body) = match args.property {
        PropertyKind::One => {
            let c2 = c2()?;
            let c1 = match &args.concrete_controller {
                Some(name) => bundle.controller(name)?.controller.clone(),
                None => memoryless_controller(c2, r, &iface)?,
            };
            let v = check_property_one(s1, s2, r, &c1, c2, &query)?;
            (v.holds, serde_json::to_value(&v).expect("serializable"))
        }
        PropertyKind::Two => {
            let v = check_property_two(s1, s2, r, &iface, c2()?, &query)?;
            (v.holds, serde_json::to_value(&v).expect("serializable"))
        }
        PropertyKind::TwoPointwise => {
            let v = check_property_two_pointwise(s1, s2, r, &iface, c2()?, &query)?;
            (v.holds, serde_json::to_value(&v).expect("serializable"))
        }
        PropertyKind::TwoAll => {
            let v = check_property_two_all_controllers(s1, s2, r, &iface, &query, args.budget)?;
            (v.holds, serde_json::to_value(&v).expect("serializable"))
        }
    };
    let name = format!("{:?}", args.property).to_lowercase();
    let summary = if holds {
        format!("property {name} holds")
    } else {
        format!("property {name} refuted")
    };
    Ok(Output::verdict(holds, summary, body))
}

fn run(cli: &Cli) -> CliResult<Output> {
    if let Some(n) = cli.threads {
        std::env::set_var(THREADS_ENV, n.to_string());
    }
    if let Command::Demo { which } = &cli.command {
        return demo::run(which);
    }
    let bundle = load_bundle(cli.bundle.as_deref())?;
    match &cli.command {
        Command::Check { kind, pair } => check_cmd(&bundle, *kind, pair),
        Command::Extend { pair, out } => extend_cmd(&bundle, pair, out.as_deref()),
        Command::Synthesize { sys, spec } => synthesize_cmd(&bundle, sys.as_deref(), spec),
        Command::Concretize {
            mode,
            controller,
            pair,
            interface,
        } => concretize_cmd(&bundle, *mode, controller, pair, *interface),
        Command::Simulate(args) => simulate_cmd(&bundle, args),
        Command::Verify(args) => verify_cmd(&bundle, args),
        Command::Demo { .. } => unreachable!("handled above"),
    }
}

fn report_error(e: &CliError) -> ExitCode {
    let doc = json!({"code": e.code(), "message": e.message()});
    let _ = writeln!(std::io::stderr(), "{doc}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return report_error(&CliError::Usage(e.render().to_string().trim_end().to_owned())),
    };
    match run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if !cli.json {
                for line in &out.summary {
                    let _ = writeln!(stdout, "{line}");
                }
            }
            if cli.json || out.text_body {
                let _ = write!(stdout, "{}", to_pretty(&out.body));
            }
            if out.holds {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => report_error(&e),
    }
}
