//! Command-line front end.
//!
//! Exit codes: 0 success (a witness, a passing check), 2 verification
//! failed, 3 search exhausted, 4 node cap hit, 64 usage, 65 parse.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use poset_ramsey::blob::{auto_spec, blob_embed, AutoSpec, BlobSpecFile};
use poset_ramsey::bounds::{bounds, bounds_table, hat_bounds, TableFormat};
use poset_ramsey::coloring::{from_string, random_coloring_with_mode, Coloring};
use poset_ramsey::copies::{contains_boolean_algebra, dim2, SmallPoset};
use poset_ramsey::harness::{
    default_ground, mc_mono_frequency, registry, reproduce_many, verify_cert_file,
    write_cert_file, CertFile, LogBase, ReproduceContext, DEFAULT_SEED,
};
use poset_ramsey::lattice::ElementSet;
use poset_ramsey::search::{
    export_cnf, import_model, parse_model, search_good_coloring, ModelCheck, SearchProblem,
    SearchTag, SymmetryOptions,
};
use poset_ramsey::Error;

const EXIT_VERIFY: u8 = 2;
const EXIT_EXHAUSTED: u8 = 3;
const EXIT_CAP: u8 = 4;
const EXIT_USAGE: u8 = 64;
const EXIT_PARSE: u8 = 65;
const EXIT_SOFTWARE: u8 = 70;
const EXIT_IO: u8 = 74;

#[derive(Parser)]
#[command(name = "poset-ramsey", version, about = "Ramsey numbers of Boolean lattices: bounds, certified search, copies")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Global {
    /// Base seed for every random choice.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads for search and parallel checks.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Abort searches after this many nodes (exit 4).
    #[arg(long, global = true)]
    node_cap: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Directory for certificates and reports.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Base {
    #[value(name = "2")]
    Two,
    #[value(name = "e")]
    E,
}

#[derive(Subcommand)]
enum Cmd {
    /// Best known bounds for R(Q_m, Q_n), or the whole table with --table.
    Bounds {
        m: Option<u32>,
        n: Option<u32>,
        #[arg(long, value_name = "MAX_N")]
        table: Option<u32>,
    },
    /// Best stated upper bound for the hat variant.
    HatBounds { m: u32, n: u32 },
    /// Exhaustive search for a coloring of Q_N with no red Q_m and no blue Q_n.
    Search {
        #[arg(long = "ground", short = 'N')]
        ground: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        hat: bool,
        /// Disable all symmetry pruning.
        #[arg(long)]
        no_symmetry: bool,
        /// Prune with every permutation of [N] rather than adjacent swaps.
        #[arg(long)]
        full_group: bool,
    },
    /// DIMACS CNF whose models are the good colorings.
    Cnf {
        #[arg(long = "ground", short = 'N')]
        ground: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        hat: bool,
    },
    /// Decode a solver model and check the coloring it names.
    DecodeModel {
        #[arg(long = "ground", short = 'N')]
        ground: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        hat: bool,
        /// Model file ("-" for stdin).
        model: PathBuf,
    },
    /// Blob embedding: a blue Q_n or a red Q_m.
    Blob {
        /// Blob parameters as JSON; omit to choose them automatically.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Coloring word over R/B (and '*' for hat endpoints); default is a
        /// seeded random coloring.
        #[arg(long)]
        colors: Option<String>,
        #[arg(long = "ground", short = 'N')]
        ground: Option<u32>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long, default_value_t = 0)]
        a: u32,
        #[arg(long, default_value_t = 0)]
        b: u32,
    },
    /// Monte Carlo frequency of monochromatic Q_n in random colorings.
    Mc {
        #[arg(long)]
        n: u32,
        /// Ground set size; without it, --log-base picks ceil(3 n log n).
        #[arg(long = "ground", short = 'N')]
        ground: Option<u32>,
        #[arg(long, value_enum)]
        log_base: Option<Base>,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
    },
    /// 2-dimension of a small poset.
    Dim2 {
        /// Poset file: size, then rows of 0/1 ("-" for stdin).
        file: Option<PathBuf>,
        #[arg(long, conflicts_with_all = ["antichain", "lattice", "file"])]
        chain: Option<usize>,
        #[arg(long, conflicts_with_all = ["lattice", "file"])]
        antichain: Option<usize>,
        #[arg(long, conflicts_with = "file")]
        lattice: Option<u32>,
    },
    /// Look for a Boolean algebra of dimension d in a set family.
    Balg {
        #[arg(long = "ground", short = 'N')]
        ground: u32,
        #[arg(long)]
        dim: usize,
        /// One set per line, elements separated by spaces or commas ("-" for stdin).
        family: PathBuf,
    },
    /// Re-check a certificate file.
    VerifyCert { file: PathBuf },
    /// Run named checks ("all" for every non-slow check).
    Reproduce {
        names: Vec<String>,
        /// Include slow checks when running "all".
        #[arg(long)]
        slow: bool,
        /// Run checks concurrently.
        #[arg(long)]
        parallel: bool,
        /// List the registry and exit.
        #[arg(long)]
        list: bool,
    },
    /// The bounds table for 1 <= m <= n <= MAX_N.
    Table { max_n: u32 },
}

/// Outcome of a command: what to print and how to exit.
struct Done {
    code: u8,
    text: String,
    json: Value,
}

impl Done {
    fn ok(text: String, json: Value) -> Self {
        Done { code: 0, text, json }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Argument(_) | Error::Domain(_) | Error::Usage(_) => EXIT_USAGE,
        Error::Parse(_) | Error::Json(_) => EXIT_PARSE,
        Error::Resource { .. } => EXIT_CAP,
        Error::Contract(_) => EXIT_VERIFY,
        Error::Defect(_) => EXIT_SOFTWARE,
        Error::Io(_) => EXIT_IO,
    }
}

fn read_input(path: &Path) -> Result<String, Error> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        Ok(fs::read_to_string(path)?)
    }
}

fn save(g: &Global, file: &str, cert: &CertFile) -> Result<Option<String>, Error> {
    match &g.out {
        Some(dir) => {
            let path = dir.join(file);
            write_cert_file(&path, cert)?;
            Ok(Some(path.display().to_string()))
        }
        None => Ok(None),
    }
}

fn run(cli: Cli) -> Result<Done, Error> {
    let g = cli.global;
    if g.threads == 0 {
        return Err(Error::Usage("--threads must be positive".into()));
    }
    match cli.cmd {
        Cmd::Bounds { table: Some(max_n), m: None, n: None } => table(&g, max_n),
        Cmd::Bounds { table: None, m: Some(m), n: Some(n) } => {
            let b = bounds(m, n)?;
            let mut text = format!("({}, {})\n", b.lower, b.upper);
            for p in &b.provenance {
                text.push_str(&format!("  {p}\n"));
            }
            Ok(Done::ok(text, serde_json::to_value(&b)?))
        }
        Cmd::Bounds { .. } => Err(Error::Usage("give either M N or --table MAX_N".into())),
        Cmd::Table { max_n } => table(&g, max_n),
        Cmd::HatBounds { m, n } => {
            let h = hat_bounds(m, n)?;
            let mut text = match h.upper {
                Some(u) => format!("{u}\n"),
                None => "absent: no stated hat bound applies\n".to_string(),
            };
            for p in &h.provenance {
                text.push_str(&format!("  {p}\n"));
            }
            Ok(Done::ok(text, serde_json::to_value(&h)?))
        }
        Cmd::Search { ground, m, n, hat, no_symmetry, full_group } => {
            let mut sym = if no_symmetry { SymmetryOptions::none() } else { SymmetryOptions::standard(m, n) };
            sym.full_group = full_group && !no_symmetry;
            let p = SearchProblem::new(ground, m, n)
                .with_hat(hat)
                .with_symmetry(sym)
                .with_node_cap(g.node_cap)
                .with_workers(g.threads);
            let out = search_good_coloring(&p)?;
            let stem = format!("N{ground}-m{m}-n{n}{}", if hat { "-hat" } else { "" });
            let (code, cert) = match out.tag {
                SearchTag::Witness => {
                    let w = out.witness.as_ref().expect("witness present");
                    (0, Some((format!("witness-{stem}.json"), CertFile::witness(w, m, n))))
                }
                SearchTag::Exhausted => (
                    EXIT_EXHAUSTED,
                    Some((
                        format!("exhausted-{stem}.json"),
                        CertFile::Exhausted { ground, red_m: m, blue_n: n, hat, nodes: out.stats.nodes },
                    )),
                ),
                SearchTag::CapHit => (EXIT_CAP, None),
            };
            let path = match &cert {
                Some((file, c)) => save(&g, file, c)?,
                None => None,
            };
            let mut text = format!("{:?}\n", out.tag);
            if let Some(w) = &out.witness {
                text.push_str(&format!("coloring {}\n", w.render()));
            }
            let s = out.stats;
            text.push_str(&format!(
                "nodes {} copy-prunes {} symmetry-prunes {} copy-search-nodes {} ms {}\n",
                s.nodes, s.copy_prunes, s.symmetry_prunes, s.copy_search_nodes, s.wall_ms
            ));
            text.push_str(&format!("generators {:?}\n", sym.generator_subset(ground)));
            if let Some(p) = &path {
                text.push_str(&format!("certificate {p}\n"));
            }
            let json = json!({
                "tag": format!("{:?}", out.tag),
                "witness": out.witness.as_ref().map(Coloring::render),
                "stats": s,
                "certificate": path,
            });
            Ok(Done { code, text, json })
        }
        Cmd::Cnf { ground, m, n, hat } => {
            let mut buf = Vec::new();
            let stats = export_cnf(ground, m, n, hat, &mut buf)?;
            let path = match &g.out {
                Some(dir) => {
                    fs::create_dir_all(dir)?;
                    let p = dir.join(format!("N{ground}-m{m}-n{n}{}.cnf", if hat { "-hat" } else { "" }));
                    fs::write(&p, &buf)?;
                    Some(p.display().to_string())
                }
                None => None,
            };
            let text = match &path {
                Some(p) => format!("{} variables, {} clauses written to {p}\n", stats.vars, stats.clauses),
                None => String::from_utf8(buf).expect("ascii"),
            };
            Ok(Done::ok(text, json!({"vars": stats.vars, "clauses": stats.clauses, "file": path})))
        }
        Cmd::DecodeModel { ground, m, n, hat, model } => {
            let lits = parse_model(&read_input(&model)?)?;
            match import_model(ground, &lits, m, n, hat)? {
                ModelCheck::Good(c) => Ok(Done::ok(
                    format!("good coloring {}\n", c.render()),
                    json!({"good": true, "coloring": c.render()}),
                )),
                ModelCheck::Violation { coloring, copy } => Ok(Done {
                    code: EXIT_VERIFY,
                    text: format!("violation: {}\ncoloring {}\n", copy.describe(), coloring.render()),
                    json: json!({"good": false, "coloring": coloring.render(), "copy": copy}),
                }),
            }
        }
        Cmd::Blob { spec, colors, ground, n, m, a, b } => blob(&g, spec, colors, ground, n, m, a, b),
        Cmd::Mc { n, ground, log_base, trials } => {
            let ground = match (ground, log_base) {
                (Some(gr), _) => gr,
                (None, Some(base)) => default_ground(
                    n,
                    match base {
                        Base::Two => LogBase::Two,
                        Base::E => LogBase::E,
                    },
                )?,
                (None, None) => {
                    return Err(Error::Usage(
                        "give --ground, or --log-base 2|e to use ceil(3 n log n)".into(),
                    ))
                }
            };
            let e = mc_mono_frequency(n, ground, trials, g.seed)?;
            let path = save(
                &g,
                &format!("mc-n{n}-N{ground}.json"),
                &CertFile::Mc { n, ground, trials, seed: g.seed, hits: e.hits },
            )?;
            Ok(Done::ok(
                format!(
                    "{:.6} ± {:.6} (95% Wilson interval [{:.6}, {:.6}], {} of {} trials, N={ground})\n",
                    e.frequency, e.half_width(), e.lo, e.hi, e.hits, e.trials
                ),
                json!({"estimate": e, "ground": ground, "seed": g.seed, "certificate": path}),
            ))
        }
        Cmd::Dim2 { file, chain, antichain, lattice } => {
            let p = match (file, chain, antichain, lattice) {
                (Some(f), None, None, None) => SmallPoset::parse(&read_input(&f)?)?,
                (None, Some(k), None, None) => SmallPoset::chain(k),
                (None, None, Some(k), None) => SmallPoset::antichain(k),
                (None, None, None, Some(d)) => SmallPoset::boolean_lattice(d),
                _ => return Err(Error::Usage("give a poset file or one of --chain/--antichain/--lattice".into())),
            };
            let d = dim2(&p)?;
            Ok(Done::ok(format!("{d}\n"), json!({"dim2": d, "size": p.size()})))
        }
        Cmd::Balg { ground, dim, family } => {
            let fam = parse_family(&read_input(&family)?, ground)?;
            match contains_boolean_algebra(&fam, dim)? {
                Some(ba) => {
                    let atoms: Vec<String> = ba.atoms.iter().map(ToString::to_string).collect();
                    Ok(Done::ok(
                        format!("found: X_0 = {}, atoms {}\n", ba.base, atoms.join(" ")),
                        json!({"found": true, "base": ba.base.elements(), "atoms": ba.atoms.iter().map(|a| a.elements()).collect::<Vec<_>>()}),
                    ))
                }
                None => Ok(Done { code: EXIT_VERIFY, text: "absent\n".into(), json: json!({"found": false}) }),
            }
        }
        Cmd::VerifyCert { file } => {
            let c = verify_cert_file(&file)?;
            let mut text = format!("{} {}\n", c.kind, if c.ok { "ok" } else { "FAILED" });
            for d in &c.diagnostics {
                text.push_str(&format!("  {d}\n"));
            }
            Ok(Done { code: if c.ok { 0 } else { EXIT_VERIFY }, text, json: serde_json::to_value(&c)? })
        }
        Cmd::Reproduce { names, slow, parallel, list } => reproduce_cmd(&g, names, slow, parallel, list),
    }
}

fn table(g: &Global, max_n: u32) -> Result<Done, Error> {
    let fmt = match g.format {
        Format::Text => TableFormat::Text,
        Format::Json => TableFormat::JsonLines,
    };
    let mut buf = Vec::new();
    bounds_table(max_n, fmt, &mut buf)?;
    // JSON-lines is printed as is, not wrapped.
    Ok(Done { code: 0, json: Value::Null, text: String::from_utf8(buf).expect("utf-8") })
}

fn parse_family(text: &str, ground: u32) -> Result<Vec<ElementSet>, Error> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let body = l.trim_start_matches('{').trim_end_matches('}');
            let elems = body
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<u32>().map_err(|_| Error::Parse(format!("bad element {t:?} in {l:?}"))))
                .collect::<Result<Vec<u32>, Error>>()?;
            ElementSet::from_elements(&elems, ground).map_err(|e| Error::Parse(e.to_string()))
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn blob(
    g: &Global,
    spec: Option<PathBuf>,
    colors: Option<String>,
    ground: Option<u32>,
    n: Option<u32>,
    m: Option<u32>,
    a: u32,
    b: u32,
) -> Result<Done, Error> {
    let file_spec = match &spec {
        Some(p) => {
            let f: BlobSpecFile = serde_json::from_str(&read_input(p)?)
                .map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
            Some(f.into_spec()?)
        }
        None => None,
    };
    let width = match (&file_spec, ground) {
        (Some(s), _) => s.ground(),
        (None, Some(w)) => w,
        (None, None) => return Err(Error::Usage("give --spec or --ground".into())),
    };
    let c = match colors {
        Some(w) => from_string(width, &w, false)?,
        None => random_coloring_with_mode(width, g.seed, false)?,
    };
    let spec = match file_spec {
        Some(s) => s,
        None => {
            let (Some(n), Some(m)) = (n, m) else {
                return Err(Error::Usage("without --spec, give --n and --m".into()));
            };
            match auto_spec(width, n, m, a, b, &c)? {
                AutoSpec::Found(s) => s,
                AutoSpec::Absent(why) => {
                    return Ok(Done {
                        code: EXIT_VERIFY,
                        text: format!("no blob parameters: {why}\n"),
                        json: json!({"spec": null, "reason": why}),
                    })
                }
            }
        }
    };
    let out = blob_embed(&spec, &c)?;
    let path = save(g, "blob-copy.json", &CertFile::copy(out.cert.clone(), Some(&c)))?;
    let mut text = format!("{:?}\n{}\n", out.tag, out.cert.describe());
    if let Some(p) = &path {
        text.push_str(&format!("certificate {p}\n"));
    }
    Ok(Done::ok(
        text,
        json!({"tag": format!("{:?}", out.tag), "cert": out.cert, "spec": BlobSpecFile::from_spec(&spec), "certificate": path}),
    ))
}

fn reproduce_cmd(g: &Global, names: Vec<String>, slow: bool, parallel: bool, list: bool) -> Result<Done, Error> {
    if list {
        let mut text = String::new();
        let mut rows = Vec::new();
        for c in registry() {
            text.push_str(&format!("{:<16} {}{}\n", c.name, if c.slow { "[slow] " } else { "" }, c.summary));
            rows.push(json!({"name": c.name, "slow": c.slow, "summary": c.summary}));
        }
        return Ok(Done::ok(text, Value::Array(rows)));
    }
    if names.is_empty() {
        return Err(Error::Usage("name a check, or use \"all\"; --list shows the registry".into()));
    }
    let selected: Vec<&str> = if names.iter().any(|n| n == "all") {
        registry().into_iter().filter(|c| slow || !c.slow).map(|c| c.name).collect()
    } else {
        names.iter().map(String::as_str).collect()
    };
    let ctx = ReproduceContext {
        out_dir: g.out.clone().unwrap_or_else(|| PathBuf::from("reproduce-out")),
        seed: g.seed,
        workers: g.threads,
        node_cap: g.node_cap,
    };
    let mut text = String::new();
    let mut reports = Vec::new();
    let mut code = 0;
    for (name, r) in reproduce_many(&selected, &ctx, parallel) {
        let r = r?;
        if !r.outcome.pass {
            code = EXIT_VERIFY;
        }
        text.push_str(&format!("{} {name}\n", if r.outcome.pass { "PASS" } else { "FAIL" }));
        for note in &r.outcome.notes {
            text.push_str(&format!("  {note}\n"));
        }
        reports.push(serde_json::to_value(&r)?);
    }
    Ok(Done { code, text, json: Value::Array(reports) })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let format = cli.global.format;
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.global.threads.max(1))
        .build_global()
    {
        eprintln!("warning: {e}");
    }
    match run(cli) {
        Ok(done) => {
            let mut out = io::stdout().lock();
            let _ = match format {
                Format::Json if !done.json.is_null() => writeln!(out, "{}", done.json),
                _ => write!(out, "{}", done.text),
            };
            ExitCode::from(done.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
