//! `uphocore` command-line front end.
//!
//! Exit codes: 0 on success, 1 when a checked property fails, 2 on usage,
//! input or format errors.

mod dot;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use uphocore::coloring::{
    check_upho_coloring, enumerate_pre_upho_colorings, realize_core, ColoringError, RealizeOptions,
    DEFAULT_CHAIN_CAP,
};
use uphocore::constructions::{
    build_bn, build_chain, build_dn, build_fn, build_mn, fiber_function_of_partition, monoid_free_commutative,
    monoid_mf, monoid_poset_capped, monoid_shifted, ConstructionError, FiberFunction, Partition,
};
use uphocore::iso::{isomorphic, verify_isomorphism};
use uphocore::poset::{
    char_series, core, direct_product, from_json, lattice_certificate, mobius_from_bottom, rank_series, to_json,
    upho_check, CoreError, LatticeVerdict, UphoVerdict,
};
use uphocore::presentation::{
    build_element_table_capped, check_left_cancellative, parse_presentation, CancellativityVerdict,
    DEFAULT_WORD_CAP,
};
use uphocore::{canonical_form, find_isomorphism, IsoMode, PosetError, Presentation, PresentationError, TruncatedPoset};

use dot::emit_dot;

const DEFAULT_PROBE: usize = 2;
const DEFAULT_CANCEL_DEPTH: usize = 5;

#[derive(Debug, Error)]
enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Presentation { path: PathBuf, source: PresentationError },
    #[error("{path}: {source}")]
    Poset { path: PathBuf, source: PosetError },
    #[error(transparent)]
    Construction(ConstructionError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error("{0} (--word-cap or UPHOCORE_WORD_CAP sets the cap)")]
    Cap(PresentationError),
}

impl From<PresentationError> for CliError {
    fn from(e: PresentationError) -> Self {
        match e {
            PresentationError::CapExceeded { .. } => CliError::Cap(e),
            e => CliError::Usage(e.to_string()),
        }
    }
}

impl From<ConstructionError> for CliError {
    fn from(e: ConstructionError) -> Self {
        match e {
            ConstructionError::Presentation(e) => e.into(),
            e => CliError::Construction(e),
        }
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Summary,
    Structured,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Plain,
    Colored,
    ColorExact,
}

impl From<ModeArg> for IsoMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Plain => IsoMode::Plain,
            ModeArg::Colored => IsoMode::Colored,
            ModeArg::ColorExact => IsoMode::ColorExact,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Construction {
    Dn,
    Fn,
    Mf,
    Flambda,
    Mn,
    Bn,
    Chain,
    Freecomm,
    Shifted,
    Product,
}

#[derive(Debug, Parser)]
#[command(name = "uphocore", version, about = "Truncated upho posets from homogeneous monoid presentations")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Input file: a `.mono` presentation or a poset JSON document.
    #[arg(long = "in", global = true, value_name = "PATH")]
    inputs: Vec<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Truncation depth N.
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Probe rank k for homogeneity checks.
    #[arg(long, global = true)]
    probe: Option<usize>,
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Fiber function values, e.g. `1,1,2`.
    #[arg(long, global = true)]
    f: Option<FiberFunction>,
    /// Partition parts, e.g. `2,1`.
    #[arg(long, global = true)]
    lambda: Option<Partition>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for `realize`; defaults to the available parallelism.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Maximum number of words visited while building an element table.
    #[arg(long, global = true, env = "UPHOCORE_WORD_CAP", default_value_t = DEFAULT_WORD_CAP)]
    word_cap: u64,
    /// Maximum number of saturated chains per atom pair when compiling a coloring.
    #[arg(long, global = true, default_value_t = DEFAULT_CHAIN_CAP)]
    chain_cap: usize,
    #[arg(long, global = true, default_value_t = uphocore_repro::DEFAULT_SEED)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the poset of a `.mono` presentation.
    Build,
    /// Rank and characteristic series, Möbius values, core and verdicts.
    Analyze,
    /// Left-cancellativity of a presentation.
    CheckCancel,
    /// Lattice certificate of a poset.
    CheckLattice,
    /// Upper homogeneity up to the probe rank.
    CheckUpho {
        /// Compare filters with their edge colors.
        #[arg(long)]
        colored: bool,
    },
    /// The interval from the bottom to the join of the atoms.
    Core,
    /// All pre-upho colorings of a finite lattice.
    Colorings,
    /// Colorable upho lattices with the given core.
    Realize,
    /// Isomorphism of two posets (`--in` twice).
    Iso {
        #[arg(long, value_enum, default_value = "plain")]
        mode: ModeArg,
    },
    /// A named construction.
    Construct {
        #[arg(value_enum)]
        name: Construction,
    },
    /// Graphviz drawing of a poset.
    Dot {
        /// Color edges by atom.
        #[arg(long)]
        colored: bool,
    },
    /// Run the acceptance criteria.
    Repro {
        /// Criterion numbers to run; all when empty.
        criteria: Vec<u8>,
    },
}

/// What a command produced: text for the output and whether its verdict held.
struct Outcome {
    text: String,
    ok: bool,
}

impl Outcome {
    fn pass(text: String) -> Self {
        Outcome { text, ok: true }
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
    match run(&cli).and_then(|o| write_output(cli.out.as_deref(), &o.text).map(|_| o.ok)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Write {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    if let (Some(k), Some(n)) = (cli.probe, cli.depth) {
        if k > n {
            return usage(format!("--probe {k} exceeds --depth {n}"));
        }
    }
    match &cli.command {
        Command::Build => {
            let m = load_presentation(cli)?;
            let depth = need_depth(cli, "build")?;
            Ok(Outcome::pass(to_json(&monoid_poset_capped(&m, depth, cli.word_cap)?)))
        }
        Command::Analyze => analyze(cli),
        Command::CheckCancel => check_cancel(cli),
        Command::CheckLattice => {
            let p = load_poset(cli)?;
            let v = lattice_certificate(&p);
            let text = match format(cli, Format::Summary, &[Format::Summary, Format::Structured])? {
                Format::Structured => json(&v),
                _ => format!("{}\n", v.describe(&p)),
            };
            Ok(Outcome { text, ok: v.is_lattice() })
        }
        Command::CheckUpho { colored } => check_upho(cli, *colored),
        Command::Core => {
            let p = load_poset(cli)?;
            let c = match core(&p) {
                Ok(c) => c,
                Err(e @ CoreError::Undetermined { .. }) => {
                    return Ok(Outcome { text: format!("{e}\n"), ok: false });
                }
            };
            let text = match format(cli, Format::Structured, &[Format::Summary, Format::Structured, Format::Dot])? {
                Format::Summary => format!(
                    "core: {} elements, rank sizes {:?}, certificate {}\n",
                    c.len(),
                    c.rank_sizes(),
                    canonical_form(&c, IsoMode::Plain)
                ),
                Format::Structured => to_json(&c),
                Format::Dot => emit_dot(&c, false),
            };
            Ok(Outcome::pass(text))
        }
        Command::Colorings => colorings(cli),
        Command::Realize => realize(cli),
        Command::Iso { mode } => iso(cli, (*mode).into()),
        Command::Construct { name } => construct(cli, *name),
        Command::Dot { colored } => Ok(Outcome::pass(emit_dot(&load_poset(cli)?, *colored))),
        Command::Repro { criteria } => repro(cli, criteria),
    }
}

fn format(cli: &Cli, default: Format, allowed: &[Format]) -> Result<Format, CliError> {
    let f = cli.format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        usage(format!("--format {} is not available for this command", f.to_possible_value().expect("no skipped values").get_name()))
    }
}

fn need_depth(cli: &Cli, what: &str) -> Result<usize, CliError> {
    cli.depth.ok_or_else(|| CliError::Usage(format!("{what} needs --depth")))
}

fn single_input(cli: &Cli) -> Result<&Path, CliError> {
    match cli.inputs.as_slice() {
        [p] => Ok(p),
        [] => usage("missing --in"),
        _ => usage("expected a single --in"),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn is_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

fn parse_mono(path: &Path, text: &str) -> Result<Presentation, CliError> {
    parse_presentation(text).map_err(|source| CliError::Presentation {
        path: path.to_path_buf(),
        source,
    })
}

fn load_presentation(cli: &Cli) -> Result<Presentation, CliError> {
    let path = single_input(cli)?;
    let text = read(path)?;
    if is_json(&text) {
        return usage(format!("{} is a poset document; this command needs a .mono presentation", path.display()));
    }
    parse_mono(path, &text)
}

/// Reads a poset document, or builds one from a presentation and `--depth`.
fn poset_from(cli: &Cli, path: &Path) -> Result<TruncatedPoset, CliError> {
    let text = read(path)?;
    if is_json(&text) {
        return from_json(&text).map_err(|source| CliError::Poset {
            path: path.to_path_buf(),
            source,
        });
    }
    let m = parse_mono(path, &text)?;
    let depth = cli
        .depth
        .ok_or_else(|| CliError::Usage(format!("{} is a presentation; pass --depth to truncate it", path.display())))?;
    Ok(monoid_poset_capped(&m, depth, cli.word_cap)?)
}

fn load_poset(cli: &Cli) -> Result<TruncatedPoset, CliError> {
    poset_from(cli, single_input(cli)?)
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn probe(cli: &Cli, p: &TruncatedPoset) -> usize {
    cli.probe.unwrap_or(DEFAULT_PROBE).min(p.depth())
}

#[derive(Serialize)]
struct CoreSummary {
    size: usize,
    rank_sizes: Vec<usize>,
    certificate: String,
}

#[derive(Serialize)]
struct Analysis {
    depth: usize,
    size: usize,
    rank_sizes: Vec<usize>,
    rank_series: String,
    char_series: String,
    /// `μ(0̂, v)` for every node in id order.
    mobius: Vec<String>,
    core: Result<CoreSummary, String>,
    lattice: LatticeVerdict,
    upho: UphoVerdict,
    certificate: String,
}

fn analyze(cli: &Cli) -> Result<Outcome, CliError> {
    let p = load_poset(cli)?;
    let k = probe(cli, &p);
    let a = Analysis {
        depth: p.depth(),
        size: p.len(),
        rank_sizes: p.rank_sizes(),
        rank_series: rank_series(&p).to_string(),
        char_series: char_series(&p).to_string(),
        mobius: mobius_from_bottom(&p).values.iter().map(ToString::to_string).collect(),
        core: core(&p)
            .map(|c| CoreSummary {
                size: c.len(),
                rank_sizes: c.rank_sizes(),
                certificate: canonical_form(&c, IsoMode::Plain).to_hex(),
            })
            .map_err(|e| e.to_string()),
        lattice: lattice_certificate(&p),
        upho: upho_check(&p, k),
        certificate: canonical_form(&p, IsoMode::Plain).to_hex(),
    };
    let text = match format(cli, Format::Summary, &[Format::Summary, Format::Structured])? {
        Format::Structured => json(&a),
        _ => {
            let mut s = String::new();
            let _ = writeln!(s, "nodes: {} (depth {}, rank sizes {:?})", a.size, a.depth, a.rank_sizes);
            let _ = writeln!(s, "rank series: {}", a.rank_series);
            let _ = writeln!(s, "characteristic series: {}", a.char_series);
            let mu = mobius_from_bottom(&p);
            let per_rank: Vec<String> = (0..=p.depth())
                .map(|r| {
                    let vals: Vec<String> = p.rank(r).map(|v| mu.get(v).to_string()).collect();
                    format!("[{}]", vals.join(" "))
                })
                .collect();
            let _ = writeln!(s, "möbius by rank: {}", per_rank.join(" "));
            match &a.core {
                Ok(c) => {
                    let _ = writeln!(s, "core: {} elements, rank sizes {:?}", c.size, c.rank_sizes);
                }
                Err(e) => {
                    let _ = writeln!(s, "core: {e}");
                }
            }
            let _ = writeln!(s, "lattice: {}", a.lattice.describe(&p));
            let _ = writeln!(s, "upho: {}", describe_upho(&p, &a.upho));
            let _ = writeln!(s, "certificate: {}", a.certificate);
            s
        }
    };
    Ok(Outcome::pass(text))
}

fn describe_upho(p: &TruncatedPoset, v: &UphoVerdict) -> String {
    match v {
        UphoVerdict::Pass { probe } => format!("every filter at rank ≤ {probe} matches the poset"),
        UphoVerdict::Fail { node } => format!("the filter at {} differs from the poset", p.label(*node)),
    }
}

fn check_cancel(cli: &Cli) -> Result<Outcome, CliError> {
    let m = load_presentation(cli)?;
    let depth = cli.depth.unwrap_or(DEFAULT_CANCEL_DEPTH);
    let table = build_element_table_capped(&m, depth, cli.word_cap)?;
    let v = check_left_cancellative(&m, &table);
    let text = match format(cli, Format::Summary, &[Format::Summary, Format::Structured])? {
        Format::Structured => {
            #[derive(Serialize)]
            struct Doc {
                verdict: &'static str,
                depth: Option<usize>,
                witness: Option<[String; 3]>,
                description: String,
            }
            let doc = match &v {
                CancellativityVerdict::SyntacticPass => Doc {
                    verdict: "SyntacticPass",
                    depth: None,
                    witness: None,
                    description: v.describe(&m),
                },
                CancellativityVerdict::EmpiricalPass(n) => Doc {
                    verdict: "EmpiricalPass",
                    depth: Some(*n),
                    witness: None,
                    description: v.describe(&m),
                },
                CancellativityVerdict::Violation { s, b, c } => Doc {
                    verdict: "Violation",
                    depth: Some(depth),
                    witness: Some([
                        m.format_word(&uphocore::Word(vec![*s])),
                        m.format_word(b),
                        m.format_word(c),
                    ]),
                    description: v.describe(&m),
                },
            };
            json(&doc)
        }
        _ => format!("{}\n", v.describe(&m)),
    };
    Ok(Outcome { text, ok: !v.is_violation() })
}

fn check_upho(cli: &Cli, colored: bool) -> Result<Outcome, CliError> {
    let p = load_poset(cli)?;
    let k = probe(cli, &p);
    let v = if colored { check_upho_coloring(&p, k)? } else { upho_check(&p, k) };
    let text = match format(cli, Format::Summary, &[Format::Summary, Format::Structured])? {
        Format::Structured => json(&v),
        _ => format!("{}\n", describe_upho(&p, &v)),
    };
    Ok(Outcome { text, ok: v.passed() })
}

fn colorings(cli: &Cli) -> Result<Outcome, CliError> {
    let l = load_poset(cli)?;
    let all = enumerate_pre_upho_colorings(&l)?;
    let text = match format(cli, Format::Summary, &[Format::Summary, Format::Structured])? {
        Format::Structured => json(&all),
        _ => {
            let mut s = format!("{} pre-upho colorings\n", all.len());
            let atoms: Vec<String> = l.atoms().map(|a| l.label(a)).collect();
            for (i, c) in all.iter().enumerate() {
                let edges: Vec<String> = c
                    .edges
                    .iter()
                    .map(|&(lo, up, col)| format!("{}-{}:{}", l.label(lo), l.label(up), atoms[col as usize]))
                    .collect();
                let _ = writeln!(s, "{:>4}  {}", i + 1, edges.join(" "));
            }
            s
        }
    };
    Ok(Outcome::pass(text))
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn realize(cli: &Cli) -> Result<Outcome, CliError> {
    let path = single_input(cli)?;
    let l = poset_from(cli, path)?;
    let depth = need_depth(cli, "realize")?;
    let id = path.file_stem().map_or_else(|| "input".to_string(), |s| s.to_string_lossy().into_owned());
    let mut opts = RealizeOptions::new(depth, cli.probe.unwrap_or(DEFAULT_PROBE).min(depth));
    opts.workers = Some(cli.workers.unwrap_or_else(default_workers).max(1));
    opts.word_cap = cli.word_cap;
    opts.chain_cap = cli.chain_cap;
    let start = Instant::now();
    let report = realize_core(&l, &id, &opts)?;
    let elapsed = start.elapsed();
    let text = match format(cli, Format::Summary, &[Format::Summary, Format::Structured])? {
        Format::Structured => report.to_json(),
        _ => {
            let mut s = String::new();
            let _ = writeln!(s, "lattice        {} ({} elements)", report.lattice, report.lattice_size);
            let _ = writeln!(s, "colorings      {} ({} up to symmetry)", report.colorings_enumerated, report.orbit_representatives);
            let _ = writeln!(s, "survivors      {} ({})", report.survivors.len(), report.survivor_label);
            let _ = writeln!(s, "undecided      {}", report.undecided.len());
            let _ = writeln!(s, "rejected       {}", report.rejected.len());
            let _ = writeln!(s, "wall time      {:.3} s", elapsed.as_secs_f64());
            for (i, sv) in report.survivors.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "  #{:<3} colorings {:<4} ranks {:?}  {}",
                    i + 1,
                    sv.colorings,
                    sv.rank_sizes,
                    sv.presentation.trim_end().replace('\n', "; ")
                );
            }
            for u in &report.undecided {
                let _ = writeln!(s, "  undecided: {} ({})", u.presentation.trim_end().replace('\n', "; "), u.reason);
            }
            let _ = writeln!(s, "note: {}", report.caveat);
            s
        }
    };
    Ok(Outcome::pass(text))
}

fn iso(cli: &Cli, mode: IsoMode) -> Result<Outcome, CliError> {
    let [a, b] = cli.inputs.as_slice() else {
        return usage("iso needs exactly two --in arguments");
    };
    let p = poset_from(cli, a)?;
    let q = poset_from(cli, b)?;
    let map = find_isomorphism(&p, &q, mode);
    debug_assert!(map.as_ref().map_or(!isomorphic(&p, &q, mode), |m| verify_isomorphism(&p, &q, m, mode)));
    let text = match format(cli, Format::Summary, &[Format::Summary, Format::Structured])? {
        Format::Structured => {
            #[derive(Serialize)]
            struct Doc<'a> {
                mode: IsoMode,
                isomorphic: bool,
                certificates: [String; 2],
                map: Option<&'a uphocore::IsoMap>,
            }
            json(&Doc {
                mode,
                isomorphic: map.is_some(),
                certificates: [canonical_form(&p, mode).to_hex(), canonical_form(&q, mode).to_hex()],
                map: map.as_ref(),
            })
        }
        _ => match &map {
            Some(m) => {
                let pairs: Vec<String> = (0..p.len() as u32)
                    .map(|v| format!("{}->{}", p.label(v), q.label(m.apply(v))))
                    .collect();
                format!("isomorphic: {}\n", pairs.join(" "))
            }
            None => "not isomorphic\n".to_string(),
        },
    };
    Ok(Outcome { text, ok: map.is_some() })
}

fn construct(cli: &Cli, name: Construction) -> Result<Outcome, CliError> {
    let n = || cli.n.ok_or_else(|| CliError::Usage("this construction needs --n".into()));
    let monoid: Option<Presentation> = match name {
        Construction::Mf => Some(monoid_mf(
            cli.f.as_ref().ok_or_else(|| CliError::Usage("mf needs --f".into()))?,
        )),
        Construction::Flambda => Some(monoid_mf(&fiber_function_of_partition(
            cli.lambda.as_ref().ok_or_else(|| CliError::Usage("flambda needs --lambda".into()))?,
        ))),
        Construction::Freecomm => Some(monoid_free_commutative(n()?)?),
        Construction::Shifted => Some(monoid_shifted(n()?)?),
        _ => None,
    };
    let poset = match (monoid, name) {
        (Some(m), _) => match cli.depth {
            None => {
                return match cli.format {
                    None | Some(Format::Summary) => Ok(Outcome::pass(m.to_mono())),
                    Some(_) => usage("pass --depth to build the poset of this monoid"),
                }
            }
            Some(d) => monoid_poset_capped(&m, d, cli.word_cap)?,
        },
        (None, Construction::Dn) => build_dn(n()?, need_depth(cli, "dn")?)?,
        (None, Construction::Fn) => build_fn(n()?, need_depth(cli, "fn")?)?,
        (None, Construction::Mn) => build_mn(n()?)?,
        (None, Construction::Bn) => build_bn(n()?)?,
        (None, Construction::Chain) => build_chain(need_depth(cli, "chain")?),
        (None, Construction::Product) => {
            let [a, b] = cli.inputs.as_slice() else {
                return usage("product needs exactly two --in arguments");
            };
            direct_product(&poset_from(cli, a)?, &poset_from(cli, b)?)
        }
        (None, _) => unreachable!("monoid constructions handled above"),
    };
    let text = match format(cli, Format::Structured, &[Format::Structured, Format::Dot])? {
        Format::Dot => emit_dot(&poset, poset.is_colored()),
        _ => to_json(&poset),
    };
    Ok(Outcome::pass(text))
}

fn repro(cli: &Cli, criteria: &[u8]) -> Result<Outcome, CliError> {
    if let Some(bad) = criteria.iter().find(|&&c| !(1..=12).contains(&c)) {
        return usage(format!("no criterion {bad}; criteria are numbered 1 to 12"));
    }
    let outcomes = if criteria.is_empty() {
        uphocore_repro::run_all(cli.seed)
    } else {
        criteria.iter().map(|&c| uphocore_repro::run_criterion(c, cli.seed)).collect()
    };
    let mut text = String::new();
    for o in &outcomes {
        let _ = writeln!(text, "{o}");
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    if failed == 0 {
        let _ = writeln!(text, "all {} criteria passed", outcomes.len());
    } else {
        let _ = writeln!(text, "{failed} of {} criteria failed", outcomes.len());
    }
    Ok(Outcome { text, ok: failed == 0 })
}
