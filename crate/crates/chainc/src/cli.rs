//! The `chainc` command-line tool.
//!
//! Exit codes: 0 success, 1 rejected input (syntax or validation), 2 bad
//! usage, 3 I/O failure, 4 candidate cap exceeded. Diagnostics and warnings
//! go to stderr; requested output (canonical text, documents, DOT graphs,
//! statistics) goes to stdout unless directed to a file.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use chainc_core::diag::{has_errors, Code, Diagnostic};
use chainc_core::{
    count_expansions, dump, expand, graph_stats, inline, normalize, parse, render, to_dot,
    validate_model, validate_spec, AdjacencyPreference, ComponentModel, EdgeCount, ExpandError,
    ExpansionPolicy, ForwardingGraph, FunctionName, DEFAULT_CAP,
};

use crate::catalog::{CatalogStore, EntryStatus};
use crate::yang::{from_instance_with, to_instance, Format, Strictness};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_CAP: i32 = 4;

#[derive(Parser)]
#[command(
    name = "chainc",
    version,
    about = "Compile flexible service chain specifications",
    long_about = "Parse chain specifications, convert them between the text DSL and \
                  JSON/XML instance documents, and expand them into concrete \
                  forwarding graphs."
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse DSL text and print its canonical form
    Parse {
        /// Print the syntax tree instead of canonical text
        #[arg(long)]
        ast: bool,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Check a specification and report all diagnostics
    Validate {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Convert between the DSL, JSON, and XML representations
    Convert {
        /// Output representation
        #[arg(long, value_enum)]
        to: Target,
        /// Output file (default stdout)
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Expand a specification into forwarding graphs (DOT output)
    Expand {
        #[arg(long, value_enum, default_value_t = Mode::First)]
        mode: Mode,
        /// Cost model for --mode select (defaults to edge-count, or to
        /// adjacency-pref when --pref is given)
        #[arg(long, value_enum)]
        cost: Option<CostKind>,
        /// Adjacency preference BEFORE:AFTER, repeatable
        #[arg(long = "pref", value_name = "BEFORE:AFTER")]
        prefs: Vec<String>,
        /// Refuse to enumerate or select past this many candidates
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
        /// Print the candidate count and stop
        #[arg(long)]
        count_only: bool,
        /// Output file for a single graph (default stdout)
        #[arg(short, long, conflicts_with = "out_dir")]
        output: Option<PathBuf>,
        /// Directory for enumerated graphs (g0000.dot, g0001.dot, ...)
        #[arg(long, value_name = "DIR")]
        out_dir: Option<PathBuf>,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Shorthand for expand --mode first: one DOT graph in written order
    Dot {
        /// Output file (default stdout)
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Store, fetch, list, and resolve named models
    #[command(subcommand)]
    Catalog(CatalogCommand),
}

#[derive(Subcommand)]
enum CatalogCommand {
    /// Validate a model and store it under a name
    Add {
        name: String,
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        store: StoreArgs,
    },
    /// Print a stored model
    Get {
        name: String,
        #[arg(long, value_enum, default_value_t = Target::Json)]
        to: Target,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        store: StoreArgs,
    },
    /// List stored entries
    List {
        #[command(flatten)]
        store: StoreArgs,
    },
    /// Import linked entries until the model is self-contained
    Resolve {
        #[arg(long, value_enum, default_value_t = Target::Json)]
        to: Target,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        store: StoreArgs,
    },
}

#[derive(Args)]
struct StoreArgs {
    /// Catalog directory
    #[arg(long, env = "CHAINC_CATALOG", value_name = "DIR")]
    store: PathBuf,
}

#[derive(Args)]
struct InputArgs {
    /// Input file, or - for stdin
    input: String,
    /// Input format when the file extension does not settle it
    #[arg(long, value_enum)]
    format: Option<InFormat>,
    /// Downgrade unknown document keys to warnings
    #[arg(long)]
    lax: bool,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum InFormat {
    Dsl,
    Json,
    Xml,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Target {
    Dsl,
    Json,
    Xml,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Mode {
    First,
    Enumerate,
    Select,
    Annotate,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum CostKind {
    EdgeCount,
    AdjacencyPref,
}

enum Failure {
    Usage(String),
    Io(String),
    Diagnostics(Vec<Diagnostic>),
    Rejected(String),
    Cap(String),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Io(_) => EXIT_IO,
            Failure::Diagnostics(_) | Failure::Rejected(_) => EXIT_REJECTED,
            Failure::Cap(_) => EXIT_CAP,
        }
    }

    fn report(&self) {
        match self {
            Failure::Usage(m) | Failure::Io(m) | Failure::Rejected(m) | Failure::Cap(m) => {
                eprintln!("error: {m}");
            }
            Failure::Diagnostics(diags) => print_diagnostics(diags),
        }
    }
}

fn print_diagnostics(diags: &[Diagnostic]) {
    for d in diags {
        eprintln!("{d}");
    }
}

/// Split a diagnostic list: warnings are printed immediately, errors are
/// returned as a failure.
fn gate(diags: Vec<Diagnostic>) -> Result<(), Failure> {
    if has_errors(&diags) {
        Err(Failure::Diagnostics(diags))
    } else {
        print_diagnostics(&diags);
        Ok(())
    }
}

/// Entry point used by `main`: parse arguments, run, map failures to exit
/// codes. Clap handles --help/--version itself (exit 0).
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            f.report();
            f.exit_code()
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Parse { ast, input } => cmd_parse(ast, &input),
        Command::Validate { input } => cmd_validate(&input),
        Command::Convert { to, output, input } => cmd_convert(to, output.as_deref(), &input),
        Command::Expand {
            mode,
            cost,
            prefs,
            cap,
            count_only,
            output,
            out_dir,
            input,
        } => cmd_expand(
            mode,
            cost,
            &prefs,
            cap,
            count_only,
            output.as_deref(),
            out_dir.as_deref(),
            &input,
        ),
        Command::Dot { output, input } => cmd_dot(output.as_deref(), &input),
        Command::Catalog(cmd) => cmd_catalog(cmd),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum InputKind {
    Dsl,
    Instance(Format),
}

fn read_input(args: &InputArgs) -> Result<(String, InputKind), Failure> {
    let (text, inferred) = if args.input == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::Io(format!("stdin: {e}")))?;
        (text, None)
    } else {
        let path = Path::new(&args.input);
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        let inferred = path
            .extension()
            .and_then(|e| e.to_str())
            .and_then(|ext| match ext.to_ascii_lowercase().as_str() {
                "sfc" | "dsl" => Some(InputKind::Dsl),
                other => Format::from_extension(other).map(InputKind::Instance),
            });
        (text, inferred)
    };
    let kind = match args.format {
        Some(InFormat::Dsl) => InputKind::Dsl,
        Some(InFormat::Json) => InputKind::Instance(Format::Json),
        Some(InFormat::Xml) => InputKind::Instance(Format::Xml),
        None => inferred.ok_or_else(|| {
            Failure::Usage(format!(
                "cannot infer the format of {:?}; pass --format dsl|json|xml",
                args.input
            ))
        })?,
    };
    Ok((text, kind))
}

fn strictness(args: &InputArgs) -> Strictness {
    if args.lax {
        Strictness::Lax
    } else {
        Strictness::Strict
    }
}

fn parse_dsl(text: &str, name: &str) -> Result<chainc_core::ServiceSpec, Failure> {
    parse(text).map_err(|e| Failure::Rejected(format!("{name}: {e}")))
}

/// Load any input into a component model. DSL input is parsed, validated,
/// and normalized; documents are schema-checked. Warnings are printed,
/// errors become the failure.
fn load_model(args: &InputArgs) -> Result<ComponentModel, Failure> {
    let (text, kind) = read_input(args)?;
    match kind {
        InputKind::Dsl => {
            let spec = parse_dsl(&text, &args.input)?;
            gate(validate_spec(&spec))?;
            normalize(&spec).map_err(|e| Failure::Diagnostics(e.diagnostics))
        }
        InputKind::Instance(format) => {
            let loaded = from_instance_with(&text, format, strictness(args))
                .map_err(|e| Failure::Diagnostics(e.diagnostics))?;
            print_diagnostics(&loaded.diagnostics);
            Ok(loaded.model)
        }
    }
}

fn write_output(output: Option<&Path>, mut text: String) -> Result<(), Failure> {
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match output {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_parse(ast: bool, input: &InputArgs) -> Result<(), Failure> {
    let (text, kind) = read_input(input)?;
    if kind != InputKind::Dsl {
        return Err(Failure::Usage(
            "parse reads DSL text; use convert for documents".to_owned(),
        ));
    }
    let spec = parse_dsl(&text, &input.input)?;
    let rendered = if ast { dump(&spec) } else { render(&spec) };
    write_output(None, rendered)
}

fn cmd_validate(input: &InputArgs) -> Result<(), Failure> {
    let (text, kind) = read_input(input)?;
    match kind {
        InputKind::Dsl => {
            let spec = parse_dsl(&text, &input.input)?;
            gate(validate_spec(&spec))?;
        }
        InputKind::Instance(format) => {
            let loaded = from_instance_with(&text, format, strictness(input))
                .map_err(|e| Failure::Diagnostics(e.diagnostics))?;
            print_diagnostics(&loaded.diagnostics);
            gate(validate_model(&loaded.model))?;
        }
    }
    println!("ok");
    Ok(())
}

fn model_to_target(model: &ComponentModel, to: Target) -> Result<String, Failure> {
    match to {
        Target::Dsl => {
            let spec = inline(model).map_err(|e| Failure::Diagnostics(e.diagnostics))?;
            Ok(render(&spec))
        }
        Target::Json => {
            to_instance(model, Format::Json).map_err(|e| Failure::Diagnostics(e.diagnostics))
        }
        Target::Xml => {
            to_instance(model, Format::Xml).map_err(|e| Failure::Diagnostics(e.diagnostics))
        }
    }
}

fn cmd_convert(to: Target, output: Option<&Path>, input: &InputArgs) -> Result<(), Failure> {
    let model = load_model(input)?;
    let text = model_to_target(&model, to)?;
    write_output(output, text)
}

fn build_policy(
    mode: Mode,
    cost: Option<CostKind>,
    prefs: &[String],
    cap: u64,
) -> Result<ExpansionPolicy, Failure> {
    let cost_kind = match (cost, prefs.is_empty()) {
        (Some(CostKind::EdgeCount), false) => {
            return Err(Failure::Usage(
                "--pref requires --cost adjacency-pref".to_owned(),
            ))
        }
        (Some(k), _) => k,
        (None, false) => CostKind::AdjacencyPref,
        (None, true) => CostKind::EdgeCount,
    };
    if cost_kind == CostKind::AdjacencyPref && mode != Mode::Select {
        return Err(Failure::Usage(
            "--cost and --pref only apply to --mode select".to_owned(),
        ));
    }
    let policy = match mode {
        Mode::First => ExpansionPolicy::first(),
        Mode::Enumerate => ExpansionPolicy::enumerate(),
        Mode::Annotate => ExpansionPolicy::annotate(),
        Mode::Select => match cost_kind {
            CostKind::EdgeCount => ExpansionPolicy::select(Box::new(EdgeCount)),
            CostKind::AdjacencyPref => {
                let mut pairs = Vec::new();
                for p in prefs {
                    let Some((before, after)) = p.split_once(':') else {
                        return Err(Failure::Usage(format!(
                            "--pref takes BEFORE:AFTER, found {p:?}"
                        )));
                    };
                    let before = FunctionName::new(before)
                        .map_err(|e| Failure::Usage(format!("--pref {p:?}: {e}")))?;
                    let after = FunctionName::new(after)
                        .map_err(|e| Failure::Usage(format!("--pref {p:?}: {e}")))?;
                    pairs.push((before, after));
                }
                if pairs.is_empty() {
                    return Err(Failure::Usage(
                        "--cost adjacency-pref needs at least one --pref".to_owned(),
                    ));
                }
                ExpansionPolicy::select(Box::new(AdjacencyPreference::new(pairs)))
            }
        },
    };
    Ok(policy.with_cap(cap))
}

fn run_expand(model: &ComponentModel, policy: &ExpansionPolicy) -> Result<chainc_core::Expansion, Failure> {
    expand(model, policy).map_err(|e| match e {
        ExpandError::InvalidModel(diags) => Failure::Diagnostics(diags),
        ExpandError::CapExceeded { .. } => Failure::Cap(e.to_string()),
    })
}

fn stats_line(graph: &ForwardingGraph) -> String {
    graph_stats(graph).to_string()
}

#[allow(clippy::too_many_arguments)]
fn cmd_expand(
    mode: Mode,
    cost: Option<CostKind>,
    prefs: &[String],
    cap: u64,
    count_only: bool,
    output: Option<&Path>,
    out_dir: Option<&Path>,
    input: &InputArgs,
) -> Result<(), Failure> {
    let model = load_model(input)?;
    if count_only {
        println!("{}", count_expansions(&model));
        return Ok(());
    }
    let policy = build_policy(mode, cost, prefs, cap)?;

    if mode == Mode::Enumerate {
        let Some(dir) = out_dir else {
            return Err(Failure::Usage(
                "enumerate writes one file per graph; pass --out-dir DIR".to_owned(),
            ));
        };
        let expansion = run_expand(&model, &policy)?;
        print_diagnostics(&expansion.warnings);
        fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
        for (i, graph) in expansion.graphs.iter().enumerate() {
            let file = dir.join(format!("g{i:04}.dot"));
            fs::write(&file, to_dot(graph))
                .map_err(|e| Failure::Io(format!("{}: {e}", file.display())))?;
            println!("{}: {}", file.display(), stats_line(graph));
        }
        return Ok(());
    }

    if out_dir.is_some() {
        return Err(Failure::Usage(
            "--out-dir only applies to --mode enumerate".to_owned(),
        ));
    }
    let expansion = run_expand(&model, &policy)?;
    print_diagnostics(&expansion.warnings);
    let graph = &expansion.graphs[0];
    match output {
        Some(path) => {
            write_output(Some(path), to_dot(graph))?;
            println!("{}: {}", path.display(), stats_line(graph));
        }
        None => {
            // DOT owns stdout; the summary moves aside.
            eprintln!("{}", stats_line(graph));
            write_output(None, to_dot(graph))?;
        }
    }
    Ok(())
}

fn cmd_dot(output: Option<&Path>, input: &InputArgs) -> Result<(), Failure> {
    let model = load_model(input)?;
    let expansion = run_expand(&model, &ExpansionPolicy::first())?;
    print_diagnostics(&expansion.warnings);
    write_output(output, to_dot(&expansion.graphs[0]))
}

fn open_store(store: &StoreArgs) -> Result<CatalogStore, Failure> {
    CatalogStore::open(&store.store).map_err(catalog_failure)
}

fn catalog_failure(e: crate::catalog::CatalogError) -> Failure {
    if e.code() == Code::Io {
        Failure::Io(e.to_string())
    } else {
        Failure::Rejected(e.to_string())
    }
}

fn cmd_catalog(cmd: CatalogCommand) -> Result<(), Failure> {
    match cmd {
        CatalogCommand::Add { name, input, store } => {
            let model = load_model(&input)?;
            let store = open_store(&store)?;
            store.add(&name, &model).map_err(catalog_failure)?;
            println!("added {name}");
            Ok(())
        }
        CatalogCommand::Get {
            name,
            to,
            output,
            store,
        } => {
            let store = open_store(&store)?;
            let model = store.get(&name).map_err(catalog_failure)?;
            let text = model_to_target(&model, to)?;
            write_output(output.as_deref(), text)
        }
        CatalogCommand::List { store } => {
            let store = open_store(&store)?;
            for row in store.list().map_err(catalog_failure)? {
                match row.status {
                    EntryStatus::Ok {
                        components,
                        compositions,
                    } => println!(
                        "{}\t{}\t{} component(s), {} composition(s)",
                        row.name, row.file, components, compositions
                    ),
                    EntryStatus::Broken(msg) => {
                        println!("{}\t{}\tbroken: {}", row.name, row.file, msg)
                    }
                }
            }
            Ok(())
        }
        CatalogCommand::Resolve {
            to,
            output,
            input,
            store,
        } => {
            let model = load_model(&input)?;
            let store = open_store(&store)?;
            let resolved = store.resolve_links(&model).map_err(catalog_failure)?;
            if !resolved.imported.is_empty() {
                eprintln!("imported: {}", resolved.imported.join(", "));
            }
            let text = model_to_target(&resolved.model, to)?;
            write_output(output.as_deref(), text)
        }
    }
}
