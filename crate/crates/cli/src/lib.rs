//! The `posetfpp` command line: argument handling and command dispatch,
//! kept in a library so it can be driven in-process by tests.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use posetfpp::decomposition::{
    decide_fpp, AnalysisReport, Certificate, DecideOptions, Method, TraceNode,
};
use posetfpp::extremal::{
    classify_4crown, find_retract_crown_ep, lift_crown_retraction, CrownKind,
};
use posetfpp::oracle::{generate, retract_bruteforce, Family, SearchBudget, DEFAULT_MAX_NODES};
use posetfpp::zigzag::{enumerate_crowns_within, DEFAULT_CROWN_LIMIT};
use posetfpp::{dot, format, Error, Poset};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_PRECONDITION: i32 = 4;

/// Overrides the default node budget of the exhaustive searches.
pub const BUDGET_ENV: &str = "POSETFPP_BUDGET";

#[derive(Parser, Debug)]
#[command(
    name = "posetfpp",
    version,
    about = "Decide and certify the fixed point property of finite posets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Args, Debug)]
pub struct Global {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    /// Node budget for exhaustive searches (defaults to $POSETFPP_BUDGET or 10^7).
    #[arg(long, global = true)]
    pub budget: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    Dot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Structural,
    Oracle,
    Auto,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Structural => Method::Structural,
            MethodArg::Oracle => Method::Oracle,
            MethodArg::Auto => Method::Auto,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Exhaustive,
    Random,
    Crown,
    Fence,
    Chain,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate a poset file and summarize its structure.
    Check { input: PathBuf },
    /// Decide the fixed point property and print the certificate.
    Fpp {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
    },
    /// List crowns, classifying 4-crowns.
    Crowns {
        input: PathBuf,
        /// Only crowns made of minimal and maximal points.
        #[arg(long)]
        in_ep: bool,
        /// Largest crown cardinality to list.
        #[arg(long)]
        max_len: Option<usize>,
    },
    /// Search a retraction onto the listed elements.
    Retract {
        input: PathBuf,
        /// Comma-separated element names.
        #[arg(long, value_delimiter = ',', required = true)]
        onto: Vec<String>,
    },
    /// Lift a retraction onto a minimal crown of E(P) to the whole poset.
    Lift { input: PathBuf },
    /// Emit posets in the POSET v1 format.
    Generate {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Number of elements (crown: number of points).
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.3)]
        edge_prob: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write one file per poset here instead of printing.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Export the Hasse diagram.
    Export {
        input: PathBuf,
        /// Shorthand for `--format dot`.
        #[arg(long)]
        dot: bool,
        /// Also draw the component graph of the minmax covers.
        #[arg(long)]
        components: bool,
    },
}

/// A failure with its exit code; the message goes to the diagnostic stream.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::Parse { .. }
            | Error::Cycle(..)
            | Error::UnknownElement(_)
            | Error::InvalidName(_)
            | Error::DuplicateName(_)
            | Error::InvalidParameter(_)
            | Error::TooLarge { .. }
            | Error::Empty
            | Error::EmptySubset
            | Error::EmptySequence => EXIT_USAGE,
            Error::BudgetExceeded { .. } => EXIT_BUDGET,
            _ => EXIT_PRECONDITION,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<String, Failure>;

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(&cli) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn budget(global: &Global) -> Result<SearchBudget, Failure> {
    let nodes = match global.budget {
        Some(n) => n,
        None => match std::env::var(BUDGET_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| {
                Failure::usage(format!(
                    "{BUDGET_ENV} must be a positive integer, got `{v}`"
                ))
            })?,
            Err(_) => DEFAULT_MAX_NODES,
        },
    };
    Ok(SearchBudget::with_nodes(nodes)?)
}

fn read_poset(path: &Path) -> Result<Poset, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    format::parse(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn no_dot(global: &Global, command: &str) -> Result<(), Failure> {
    if global.format == OutputFormat::Dot {
        return Err(Failure::usage(format!("`{command}` has no DOT output")));
    }
    Ok(())
}

fn execute(cli: &Cli) -> Outcome {
    let g = &cli.global;
    match &cli.command {
        Command::Check { input } => {
            no_dot(g, "check")?;
            check(&read_poset(input)?, g.format)
        }
        Command::Fpp { input, method } => {
            no_dot(g, "fpp")?;
            let p = read_poset(input)?;
            let options = DecideOptions {
                method: (*method).into(),
                budget: budget(g)?,
                ..DecideOptions::default()
            };
            let report = decide_fpp(&p, options)?;
            Ok(match g.format {
                OutputFormat::Json => json(&report),
                _ => report_text(&report),
            })
        }
        Command::Crowns {
            input,
            in_ep,
            max_len,
        } => {
            no_dot(g, "crowns")?;
            crowns(&read_poset(input)?, *in_ep, *max_len, g.format)
        }
        Command::Retract { input, onto } => {
            no_dot(g, "retract")?;
            let p = read_poset(input)?;
            let subset = p.set_of(onto)?;
            let found = retract_bruteforce(&p, subset, budget(g)?)?;
            let map = found.as_ref().map(|r| r.named_pairs());
            Ok(match g.format {
                OutputFormat::Json => json(&RetractJson {
                    onto: onto.clone(),
                    retract: map.is_some(),
                    map,
                }),
                _ => match map {
                    Some(m) => format!("retract: yes\nmap: {}\n", pairs_text(&m)),
                    None => "retract: no\n".to_owned(),
                },
            })
        }
        Command::Lift { input } => {
            no_dot(g, "lift")?;
            lift(&read_poset(input)?, g.format)
        }
        Command::Generate {
            kind,
            n,
            edge_prob,
            seed,
            out_dir,
        } => {
            no_dot(g, "generate")?;
            let family = match kind {
                Kind::Exhaustive => Family::Exhaustive(*n),
                Kind::Random => Family::Random {
                    n: *n,
                    edge_prob: *edge_prob,
                    seed: *seed,
                },
                Kind::Crown => Family::Crown(*n),
                Kind::Fence => Family::Fence(*n),
                Kind::Chain => Family::Chain(*n),
            };
            let posets = generate(family)?;
            match out_dir {
                Some(dir) => {
                    std::fs::create_dir_all(dir)
                        .map_err(|e| Failure::usage(format!("{}: {e}", dir.display())))?;
                    let width = posets.len().to_string().len();
                    for (i, p) in posets.iter().enumerate() {
                        let path = dir.join(format!("poset_{i:0width$}.poset"));
                        std::fs::write(&path, format::write(p))
                            .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
                    }
                    Ok(format!(
                        "wrote {} posets to {}\n",
                        posets.len(),
                        dir.display()
                    ))
                }
                None => Ok(posets
                    .iter()
                    .map(format::write)
                    .collect::<Vec<_>>()
                    .join("\n")),
            }
        }
        Command::Export {
            input,
            dot: as_dot,
            components,
        } => {
            let p = read_poset(input)?;
            if *as_dot || g.format == OutputFormat::Dot {
                let mut out = dot::hasse(&p);
                if *components {
                    out.push_str(&dot::component_graph_dot(&p));
                }
                Ok(out)
            } else if g.format == OutputFormat::Json {
                let covers = p
                    .covers()
                    .into_iter()
                    .map(|(x, y)| (p.name(x).to_owned(), p.name(y).to_owned()))
                    .collect();
                Ok(json(&ExportJson {
                    elements: p.names().to_vec(),
                    covers,
                }))
            } else {
                Ok(format::write(&p))
            }
        }
    }
}

#[derive(Serialize)]
struct CheckJson {
    elements: usize,
    height: usize,
    minimal: usize,
    maximal: usize,
    extremal: usize,
    middle: usize,
    connected: bool,
    components: usize,
}

#[derive(Serialize)]
struct RetractJson {
    onto: Vec<String>,
    retract: bool,
    map: Option<Vec<(String, String)>>,
}

#[derive(Serialize)]
struct ExportJson {
    elements: Vec<String>,
    covers: Vec<(String, String)>,
}

#[derive(Serialize)]
struct CrownJson {
    points: Vec<String>,
    cardinality: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    class: Option<CrownKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    inner: Option<Vec<String>>,
}

#[derive(Serialize)]
struct CrownsJson {
    crowns: Vec<CrownJson>,
    truncated: bool,
}

#[derive(Serialize)]
struct LiftJson {
    crown: Option<Vec<String>>,
    extremal_retraction: Option<Vec<(String, String)>>,
    retraction: Option<Vec<(String, String)>>,
}

fn check(p: &Poset, fmt: OutputFormat) -> Outcome {
    let ext = p.extremal_partition();
    let c = CheckJson {
        elements: p.len(),
        height: p.height(),
        minimal: ext.lower.len(),
        maximal: ext.upper.len(),
        extremal: ext.extremal.len(),
        middle: ext.middle.len(),
        connected: p.is_connected(),
        components: p.components().len(),
    };
    Ok(match fmt {
        OutputFormat::Json => json(&c),
        _ => format!(
            "valid poset\nelements: {}\nheight: {}\nminimal (L): {}\nmaximal (U): {}\nextremal (E): {}\nmiddle (M): {}\nconnected: {}\n",
            c.elements, c.height, c.minimal, c.maximal, c.extremal, c.middle, c.connected
        ),
    })
}

fn crowns(p: &Poset, in_ep: bool, max_len: Option<usize>, fmt: OutputFormat) -> Outcome {
    let allowed = if in_ep {
        p.extremal_partition().extremal
    } else {
        p.carrier()
    };
    let list = enumerate_crowns_within(p, allowed, max_len.unwrap_or(p.len()), DEFAULT_CROWN_LIMIT);
    let mut entries = Vec::new();
    for crown in &list.crowns {
        let (class, inner) = if crown.cardinality() == 4 {
            let c = classify_4crown(p, crown)?;
            (Some(c.kind), Some(p.names_of(c.inner)))
        } else {
            (None, None)
        };
        entries.push(CrownJson {
            points: crown
                .points()
                .iter()
                .map(|&x| p.name(x).to_owned())
                .collect(),
            cardinality: crown.cardinality(),
            class,
            inner,
        });
    }
    if fmt == OutputFormat::Json {
        return Ok(json(&CrownsJson {
            crowns: entries,
            truncated: list.truncated,
        }));
    }
    let mut out = format!(
        "{} crowns{}\n",
        entries.len(),
        if list.truncated { " (truncated)" } else { "" }
    );
    for e in &entries {
        write!(out, "{} ({})", e.points.join(","), e.cardinality).unwrap();
        if let Some(class) = e.class {
            write!(out, " {}", label(&class)).unwrap();
            if let Some(inner) = &e.inner {
                if !inner.is_empty() {
                    write!(out, " inner {{{}}}", inner.join(",")).unwrap();
                }
            }
        }
        out.push('\n');
    }
    Ok(out)
}

fn lift(p: &Poset, fmt: OutputFormat) -> Outcome {
    let Some((crown, r)) = find_retract_crown_ep(p)? else {
        return Ok(match fmt {
            OutputFormat::Json => json(&LiftJson {
                crown: None,
                extremal_retraction: None,
                retraction: None,
            }),
            _ => "no crown among the extremal points\n".to_owned(),
        });
    };
    let rho = lift_crown_retraction(p, &crown, &r)?;
    let names: Vec<String> = crown
        .points()
        .iter()
        .map(|&x| p.name(x).to_owned())
        .collect();
    Ok(match fmt {
        OutputFormat::Json => json(&LiftJson {
            crown: Some(names),
            extremal_retraction: Some(r.named_pairs()),
            retraction: Some(rho.named_pairs()),
        }),
        _ => format!(
            "crown: {}\nretraction of E(P): {}\nlifted retraction: {}\n",
            names.join(","),
            pairs_text(&r.named_pairs()),
            pairs_text(&rho.named_pairs())
        ),
    })
}

/// The serialized name of a unit enum variant.
fn label<T: Serialize>(value: &T) -> String {
    serde_json::to_value(value)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

fn edges_text(edges: &[(String, String)]) -> String {
    edges
        .iter()
        .map(|(x, y)| format!("{x}<{y}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn pairs_text(pairs: &[(String, String)]) -> String {
    pairs
        .iter()
        .map(|(x, y)| format!("{x}->{y}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn report_text(report: &AnalysisReport) -> String {
    let mut out = format!(
        "FPP: {}\nmethod: {}\n",
        label(&report.verdict),
        label(&report.method)
    );
    match &report.certificate {
        Certificate::FixedPointFreeMap { map } => writeln!(
            out,
            "certificate: fixed-point-free endomorphism\n  {}",
            pairs_text(map)
        )
        .unwrap(),
        Certificate::GraphObstruction {
            elements,
            obstruction,
        } => writeln!(
            out,
            "certificate: component graph of {{{}}} is not a simple tree: {obstruction:?}",
            elements.join(",")
        )
        .unwrap(),
        Certificate::NecessaryCondition { elements, edges } => writeln!(
            out,
            "certificate: crown edges of E({{{}}}) without improper 4-crown witness: {}",
            elements.join(","),
            edges_text(edges)
        )
        .unwrap(),
        Certificate::Decomposition {
            components,
            tree_edges,
        } => {
            let comps: Vec<String> = components
                .iter()
                .map(|c| format!("{{{}}}", c.join(",")))
                .collect();
            writeln!(
                out,
                "certificate: tree decomposition into {}; minmax covers {}",
                comps.join(" "),
                if tree_edges.is_empty() {
                    "none".to_owned()
                } else {
                    edges_text(tree_edges)
                }
            )
            .unwrap()
        }
        Certificate::None { reason } => writeln!(out, "certificate: none ({reason})").unwrap(),
    }
    out.push_str("trace:\n");
    trace_text(&report.trace, 1, &mut out);
    out
}

fn trace_text(node: &TraceNode, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    writeln!(
        out,
        "{pad}{{{}}}: {} by {} ({})",
        node.elements.join(","),
        label(&node.verdict),
        label(&node.rule),
        node.detail
    )
    .unwrap();
    if !node.dismantling.is_empty() {
        let steps: Vec<String> = node
            .dismantling
            .iter()
            .map(|s| format!("{}->{}", s.removed, s.target))
            .collect();
        writeln!(out, "{pad}  dismantling: {}", steps.join(", ")).unwrap();
    }
    for r in &node.retractions {
        writeln!(
            out,
            "{pad}  retraction onto {{{}}} verified={}: {}",
            r.component.join(","),
            r.verified,
            pairs_text(&r.map)
        )
        .unwrap();
    }
    for child in &node.children {
        trace_text(child, depth + 1, out);
    }
}
