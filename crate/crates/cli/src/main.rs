//! `mrd`: constructions, verification, equivalence and classification of
//! additive rank-metric codes from the command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 budget exhausted, 64 usage.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mrd::catalog::{load_catalog, semifield_catalog, verify_catalog_against_families, CatalogEntry};
use mrd::classifier::{
    classify_dminus1, classify_rectangular, classify_semifields, quasi_mrd_census, SearchLimits, SearchOptions,
};
use mrd::codes::AdditiveCode;
use mrd::constructions::{delsarte_gabidulin, field_spread_set, trombetti_zhou, twisted_gabidulin};
use mrd::equivalence::{
    are_equivalent, automorphism_group, classify_up_to_equivalence, fingerprint_with_group, left_idealiser,
    right_idealiser, Budget, EquivalenceOptions,
};
use mrd::gf::{FieldCtx, Prime};
use mrd::report::ClassificationReport;
use mrd::spread::{decompose_as_two_presemifields, extract_semifield_subcodes};
use mrd::Error;

const EXIT_VERIFY: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "mrd", version, about = "Additive MRD codes over F_2 and F_3")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Catalog file, or a directory of `semifields-<order>.txt` files.
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
    /// Wall-clock limit in seconds for searches.
    #[arg(long, global = true)]
    time_limit: Option<u64>,
    /// Limit on generated search nodes.
    #[arg(long, global = true)]
    max_nodes: Option<u64>,
    /// Print a JSON description of the subcommand's arguments and exit.
    #[arg(long, global = true)]
    schema: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Tsv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Family {
    /// Delsarte-Gabidulin.
    Dg,
    /// Twisted Gabidulin.
    Tg,
    /// Trombetti-Zhou.
    Tz,
    /// Spread set of the field F_{q^n}.
    Field,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a code from a known family and print it.
    Construct {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        s: usize,
        /// Index of eta in the field's element order (default: the first admissible one).
        #[arg(long)]
        eta: Option<u64>,
        #[arg(long, default_value_t = 0)]
        h: usize,
    },
    /// Check the MRD property of a code read from a file or stdin.
    Verify { file: Option<PathBuf> },
    /// Print equivalence invariants of a code.
    Invariants { file: Option<PathBuf> },
    /// Decide equivalence of two codes.
    Equiv {
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        isotopy_only: bool,
    },
    /// List the semifield spread sets inside a square MRD code with d = n - 1.
    ExtractSemifields { file: Option<PathBuf> },
    /// Classify additive MRD codes with the given parameters.
    Classify {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        /// Catalog file of seed spread sets (d = n - 1 only).
        #[arg(long)]
        seed_catalog: Option<PathBuf>,
        /// Treat a user-supplied catalog as covering every semifield class.
        #[arg(long)]
        assume_complete: bool,
        /// Directory for per-level checkpoints.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Resume from the checkpoints in this directory.
        #[arg(long)]
        resume: Option<PathBuf>,
        #[arg(long)]
        isotopy_only: bool,
        /// Also write the versioned report to this path.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Count codes containing a semifield spread set, dimension by dimension.
    Census {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        /// Count up to equivalence including transposition (default: isotopy).
        #[arg(long)]
        with_transpose: bool,
        /// One column per seed instead of grouped columns.
        #[arg(long)]
        per_seed: bool,
    },
    /// Validate a semifield catalog and re-check its family metadata.
    CatalogCheck {
        #[arg(long)]
        q: Option<u32>,
        #[arg(long)]
        n: Option<usize>,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::Budget(_) => EXIT_BUDGET,
            Error::InvalidParameters(_) | Error::UnsupportedField { .. } | Error::NormCondition => EXIT_USAGE,
            _ => EXIT_VERIFY,
        };
        Failure { code, msg: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure { code: EXIT_VERIFY, msg: e.to_string() }
    }
}

type CliResult = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, msg: msg.into() }
}

fn prime(q: u32) -> Result<Prime, Failure> {
    Prime::from_u32(q).ok_or_else(|| usage(format!("q = {q} is not supported (use 2 or 3)")))
}

fn read_code(file: &Option<PathBuf>) -> Result<AdditiveCode, Failure> {
    let text = match file {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p)?,
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            s
        }
    };
    Ok(AdditiveCode::parse_text(&text)?)
}

fn emit(s: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(s.as_bytes());
    if !s.ends_with('\n') {
        let _ = out.write_all(b"\n");
    }
}

fn emit_json(v: &Value) {
    emit(&serde_json::to_string_pretty(v).expect("serialisable"));
}

fn limits(cli: &Cli, checkpoint: Option<PathBuf>) -> SearchLimits {
    SearchLimits {
        budget: match cli.time_limit {
            Some(s) => Budget::within(Duration::from_secs(s)),
            None => Budget::unlimited(),
        },
        max_nodes: cli.max_nodes,
        checkpoint_dir: checkpoint,
    }
}

fn pair_budget(cli: &Cli) -> Budget {
    cli.time_limit.map_or_else(Budget::default, |s| Budget::within(Duration::from_secs(s)))
}

fn catalog_for(cli: &Cli, file: Option<&Path>, q: u32, n: usize) -> Result<(Vec<CatalogEntry>, bool), Failure> {
    let path = file.or(cli.catalog.as_deref());
    match path {
        Some(p) if p.is_file() => Ok((load_catalog(p)?, false)),
        Some(dir) => Ok((semifield_catalog(q, n, Some(dir))?, false)),
        None => Ok((semifield_catalog(q, n, None)?, true)),
    }
}

fn construct(family: Family, q: u32, n: usize, k: usize, s: usize, eta: Option<u64>, h: usize) -> Result<AdditiveCode, Failure> {
    let p = prime(q)?;
    let ctx = FieldCtx::new(p, n)?;
    let etas: Vec<u64> = match eta {
        Some(e) => vec![e],
        // eta = 0 comes last: it degenerates to the Gabidulin code.
        None => (1..ctx.order()).chain([0]).collect(),
    };
    let mut last = None;
    for e in etas {
        let el = ctx.from_index(e);
        let built = match family {
            Family::Dg => delsarte_gabidulin(p, n, k, s),
            Family::Field => field_spread_set(p, n).map(|f| f.spread_set()),
            Family::Tg => twisted_gabidulin(p, n, k, s, el, h),
            Family::Tz => trombetti_zhou(p, n, k, s, el),
        };
        match built {
            Ok(c) => return Ok(c),
            Err(err @ (Error::NormCondition | Error::InvalidParameters(_))) if eta.is_none() => last = Some(err),
            Err(err) => return Err(err.into()),
        }
    }
    Err(last.map_or_else(|| usage("no admissible eta"), Failure::from))
}

fn expected_distance(c: &AdditiveCode) -> Option<usize> {
    let (m, n) = c.shape();
    let (short, long) = (m.min(n), m.max(n));
    let k = c.dim();
    (k > 0 && k.is_multiple_of(long) && k / long <= short).then(|| short - k / long + 1)
}

fn verify(cli: &Cli, file: &Option<PathBuf>) -> CliResult {
    let c = read_code(file)?;
    let check = c.is_mrd();
    let (m, n) = c.shape();
    let witness = if check.is_mrd { None } else { expected_distance(&c).and_then(|d| c.low_rank_witness(d)) };
    match cli.format {
        Format::Json => emit_json(&json!({
            "q": c.prime().value(), "m": m, "n": n, "dim": c.dim(),
            "minimum_distance": check.minimum_distance, "is_mrd": check.is_mrd,
            "expected_distance": expected_distance(&c),
            "witness": witness.map(|w| w.to_text()),
        })),
        Format::Tsv => emit(&format!(
            "q\tm\tn\tdim\td\tmrd\n{}\t{m}\t{n}\t{}\t{}\t{}",
            c.prime().value(),
            c.dim(),
            check.minimum_distance,
            check.is_mrd
        )),
        Format::Table => {
            emit(&format!(
                "code in M_{m}x{n}(F_{}) of dimension {}\nminimum distance d = {}\nMRD: {}",
                c.prime().value(),
                c.dim(),
                check.minimum_distance,
                if check.is_mrd { "yes" } else { "no" }
            ));
            if let Some(w) = &witness {
                emit(&format!("codeword of rank {}:\n{}", w.rank(), w.to_text()));
            }
        }
    }
    if check.is_mrd {
        Ok(())
    } else {
        Err(Failure { code: EXIT_VERIFY, msg: format!("not MRD (minimum distance {})", check.minimum_distance) })
    }
}

fn invariants(cli: &Cli, file: &Option<PathBuf>) -> CliResult {
    let c = read_code(file)?;
    let aut = automorphism_group(&c, &pair_budget(cli))?;
    let f = fingerprint_with_group(&c, &aut);
    let (l, r) = if c.rows() == c.cols() {
        (Some(left_idealiser(&c)?.order), Some(right_idealiser(&c)?.order))
    } else {
        (None, None)
    };
    match cli.format {
        Format::Json => emit_json(&json!({
            "fingerprint": f, "left_idealiser": l, "right_idealiser": r,
            "automorphism_order": aut.order, "key": format!("{:016x}", f.key()),
        })),
        Format::Tsv => emit(&format!(
            "dim\td\tleft\tright\taut\tkey\n{}\t{}\t{}\t{}\t{}\t{:016x}",
            c.dim(),
            c.minimum_distance()?,
            l.map_or("-".into(), |x| x.to_string()),
            r.map_or("-".into(), |x| x.to_string()),
            aut.order,
            f.key()
        )),
        Format::Table => {
            let ranks: Vec<String> = f.rank_distribution.iter().filter(|x| x.1 > 0).map(|(r, n)| format!("{r}:{n}")).collect();
            emit(&format!(
                "dimension            {}\nrank distribution    {}\nidealisers [l, r]    [{}, {}]\nautomorphisms        {}\nspread subcodes      {}\nfingerprint key      {:016x}",
                c.dim(),
                ranks.join(" "),
                l.map_or("-".into(), |x| x.to_string()),
                r.map_or("-".into(), |x| x.to_string()),
                aut.order,
                f.subcodes.len(),
                f.key()
            ));
        }
    }
    Ok(())
}

fn equiv(cli: &Cli, first: &Path, second: &Path, isotopy_only: bool) -> CliResult {
    let c1 = read_code(&Some(first.to_path_buf()))?;
    let c2 = read_code(&Some(second.to_path_buf()))?;
    let opts = EquivalenceOptions { isotopy_only, budget: pair_budget(cli) };
    let w = are_equivalent(&c1, &c2, &opts)?;
    match cli.format {
        Format::Json => emit_json(&json!({ "equivalent": w.is_some(), "witness": w })),
        Format::Tsv => emit(&format!("equivalent\ttransposed\n{}\t{}", w.is_some(), w.as_ref().is_some_and(|w| w.transposed))),
        Format::Table => match &w {
            Some(w) => emit(&format!(
                "equivalent: C1 = A {}C2 B\nA =\n{}B =\n{}",
                if w.transposed { "(transposed) " } else { "" },
                w.a.to_text(),
                w.b.to_text()
            )),
            None => emit("not equivalent"),
        },
    }
    if w.is_some() {
        Ok(())
    } else {
        Err(Failure { code: EXIT_VERIFY, msg: "codes are not equivalent".into() })
    }
}

fn extract(cli: &Cli, file: &Option<PathBuf>) -> CliResult {
    let c = read_code(file)?;
    let subs = extract_semifield_subcodes(&c)?;
    let decomposition = if c.prime() == Prime::Two { Some(decompose_as_two_presemifields(&c).map(|_| ())) } else { None };
    match cli.format {
        Format::Json => emit_json(&json!({
            "count": subs.len(),
            "spread_sets": subs.iter().map(|s| s.spread_set().to_text()).collect::<Vec<_>>(),
            "two_presemifield_decomposition": decomposition.as_ref().map(|d| d.is_ok()),
        })),
        Format::Tsv => {
            let mut s = String::from("index\tleft\tright\n");
            for (i, sub) in subs.iter().enumerate() {
                let code = sub.spread_set();
                s.push_str(&format!("{}\t{}\t{}\n", i + 1, left_idealiser(&code)?.order, right_idealiser(&code)?.order));
            }
            emit(&s);
        }
        Format::Table => {
            emit(&format!("{} semifield spread sets", subs.len()));
            for (i, sub) in subs.iter().enumerate() {
                emit(&format!("-- {} --\n{}", i + 1, sub.spread_set().to_text()));
            }
        }
    }
    if let Some(Err(e)) = decomposition {
        return Err(e.into());
    }
    Ok(())
}

fn report_rows(report: &ClassificationReport) -> Vec<[String; 5]> {
    report
        .classes
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let f = &c.fingerprint;
            [
                (i + 1).to_string(),
                f.idealisers.map_or("-".into(), |x| format!("[{},{}]", x[0], x[1])),
                f.automorphism_order.map_or("-".into(), |x| x.to_string()),
                f.rank_distribution.iter().filter(|x| x.1 > 0).map(|(r, n)| format!("{r}:{n}")).collect::<Vec<_>>().join(" "),
                c.provenance.join(","),
            ]
        })
        .collect()
}

fn print_report(cli: &Cli, report: &ClassificationReport) {
    let mut stable = report.clone();
    eprintln!("elapsed {} ms, {} nodes, {} equivalence tests", report.stats.elapsed_ms, report.stats.nodes, report.stats.equivalence_tests);
    stable.stats.elapsed_ms = 0;
    match cli.format {
        Format::Json => emit(&serde_json::to_string_pretty(&stable).expect("serialisable")),
        Format::Tsv => {
            let mut s = String::from("class\tidealisers\tautomorphisms\tranks\tseeds\n");
            for r in report_rows(report) {
                s.push_str(&r.join("\t"));
                s.push('\n');
            }
            emit(&s);
        }
        Format::Table => {
            let d = report.d.map_or("-".into(), |d| d.to_string());
            let mut s = format!(
                "q = {}, {}x{}, d = {d}: {} classes{}\n",
                report.q,
                report.m,
                report.n,
                report.class_count(),
                if report.complete { "" } else { " (not certified complete)" }
            );
            s.push_str(&format!("{:<6}{:<14}{:<14}{:<28}{}\n", "class", "[Il,Ir]", "#Aut", "ranks", "seeds"));
            for r in report_rows(report) {
                s.push_str(&format!("{:<6}{:<14}{:<14}{:<28}{}\n", r[0], r[1], r[2], r[3], r[4]));
            }
            for n in &report.notes {
                s.push_str(&format!("note: {n}\n"));
            }
            emit(&s);
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn classify(
    cli: &Cli,
    q: u32,
    m: usize,
    n: usize,
    d: usize,
    seed_catalog: Option<&Path>,
    assume_complete: bool,
    checkpoint: Option<PathBuf>,
    isotopy_only: bool,
    report_path: Option<&Path>,
) -> CliResult {
    prime(q)?;
    if m > n {
        return Err(usage("give the shape with m <= n; transposition is part of equivalence"));
    }
    let opts = SearchOptions { isotopy_only, limits: limits(cli, checkpoint) };
    let report = if m == n && d == n {
        classify_semifields(q, n, &opts)?
    } else if m == n && d + 1 == n {
        let (entries, bundled) = catalog_for(cli, seed_catalog, q, n)?;
        let seeds: Vec<(String, AdditiveCode)> =
            entries.iter().map(|e| Ok((e.name.clone(), e.spread_set()?))).collect::<Result<_, Error>>()?;
        classify_dminus1(&seeds, bundled || assume_complete, &opts)?
    } else if m < n && d == m {
        classify_rectangular(q, m, n, &opts)?
    } else {
        return Err(usage(format!(
            "unsupported parameters: classification covers d = n and d = n - 1 for square codes and d = m < n for rectangular ones (got {m}x{n}, d = {d})"
        )));
    };
    if let Some(p) = report_path {
        mrd::catalog::save_report(&report, p)?;
    }
    print_report(cli, &report);
    Ok(())
}

fn census(cli: &Cli, q: u32, n: usize, d: usize, with_transpose: bool, per_seed: bool) -> CliResult {
    prime(q)?;
    if d == 0 || d > n {
        return Err(usage("need 1 <= d <= n"));
    }
    let (entries, _) = catalog_for(cli, None, q, n)?;
    let seeds: Vec<(String, AdditiveCode)> =
        entries.iter().map(|e| Ok((e.name.clone(), e.spread_set()?))).collect::<Result<_, Error>>()?;
    let opts = SearchOptions { isotopy_only: !with_transpose, limits: limits(cli, None) };
    let (census, _) = quasi_mrd_census(&seeds, d, &opts)?;
    match cli.format {
        Format::Json => emit(&serde_json::to_string_pretty(&census).expect("serialisable")),
        Format::Tsv if per_seed => emit(&census.to_tsv()),
        Format::Tsv => emit(&census.to_grouped_tsv()),
        Format::Table => {
            let tsv = if per_seed { census.to_tsv() } else { census.to_grouped_tsv() };
            let mut s = String::new();
            for line in tsv.lines() {
                s.push_str(line.split('\t').map(|c| format!("{c:<12}")).collect::<String>().trim_end());
                s.push('\n');
            }
            emit(&s);
        }
    }
    Ok(())
}

fn catalog_check(cli: &Cli, q: Option<u32>, n: Option<usize>) -> CliResult {
    let entries = match (&cli.catalog, q, n) {
        (Some(p), _, _) if p.is_file() => load_catalog(p)?,
        (dir, Some(q), Some(n)) => semifield_catalog(q, n, dir.as_deref())?,
        _ => return Err(usage("give --catalog FILE, or --q and --n for a bundled or directory catalog")),
    };
    let attributions = verify_catalog_against_families(&entries)?;
    let codes: Vec<(String, AdditiveCode)> =
        entries.iter().map(|e| Ok((e.name.clone(), e.spread_set()?))).collect::<Result<_, Error>>()?;
    let opts = EquivalenceOptions { isotopy_only: false, budget: pair_budget(cli) };
    let classes = if codes.is_empty() { 0 } else { classify_up_to_equivalence(&codes, &opts)?.class_count() };
    let consistent = attributions.iter().all(|a| a.consistent());
    match cli.format {
        Format::Json => emit_json(&json!({
            "entries": entries.len(), "equivalence_classes": classes,
            "attributions": attributions, "consistent": consistent,
        })),
        Format::Tsv | Format::Table => {
            let mut s = format!("entries\t{}\nequivalence classes\t{classes}\n", entries.len());
            s.push_str("name\tfamily\tleft\tright\tchecks\n");
            for a in &attributions {
                s.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\n",
                    a.name,
                    a.family.as_deref().unwrap_or("-"),
                    a.left_nucleus,
                    a.right_nucleus,
                    if a.checks.is_empty() { "-".to_string() } else if a.consistent() { "ok".into() } else { "MISMATCH".into() }
                ));
            }
            emit(&s);
        }
    }
    if consistent {
        Ok(())
    } else {
        Err(Failure { code: EXIT_VERIFY, msg: "family metadata does not match the computed invariants".into() })
    }
}

/// Arguments of a subcommand as JSON.
fn schema(name: Option<&str>) -> Value {
    let root = Cli::command();
    let cmd = name.and_then(|n| root.get_subcommands().find(|c| c.get_name() == n)).unwrap_or(&root);
    let args: Vec<Value> = cmd
        .get_arguments()
        .chain(if name.is_some() { root.get_arguments().collect::<Vec<_>>() } else { Vec::new() })
        .filter(|a| !matches!(a.get_id().as_str(), "help" | "version"))
        .map(|a| {
            json!({
                "name": a.get_id().as_str(),
                "long": a.get_long(),
                "required": a.is_required_set(),
                "help": a.get_help().map(|h| h.to_string()),
                "default": a.get_default_values().iter().map(|v| v.to_string_lossy().into_owned()).collect::<Vec<_>>(),
                "values": a.get_possible_values().iter().map(|v| v.get_name().to_string()).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "command": cmd.get_name(),
        "about": cmd.get_about().map(|s| s.to_string()),
        "arguments": args,
        "subcommands": cmd.get_subcommands().map(|c| c.get_name().to_string()).collect::<Vec<_>>(),
        "exit_codes": {"0": "success", "1": "verification failure", "2": "budget exhausted", "64": "usage error"},
    })
}

fn run(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::Construct { family, q, n, k, s, eta, h } => {
            let c = construct(*family, *q, *n, *k, *s, *eta, *h)?;
            match cli.format {
                Format::Json => emit_json(&json!({ "code": c.to_text() })),
                _ => emit(&c.to_text()),
            }
            Ok(())
        }
        Command::Verify { file } => verify(cli, file),
        Command::Invariants { file } => invariants(cli, file),
        Command::Equiv { first, second, isotopy_only } => equiv(cli, first, second, *isotopy_only),
        Command::ExtractSemifields { file } => extract(cli, file),
        Command::Classify { q, m, n, d, seed_catalog, assume_complete, checkpoint, resume, isotopy_only, report } => {
            if let Some(r) = resume {
                if !r.is_dir() {
                    return Err(usage(format!("no checkpoint directory at {}", r.display())));
                }
            }
            let ck = resume.clone().or_else(|| checkpoint.clone());
            classify(cli, *q, *m, *n, *d, seed_catalog.as_deref(), *assume_complete, ck, *isotopy_only, report.as_deref())
        }
        Command::Census { q, n, d, with_transpose, per_seed } => census(cli, *q, *n, *d, *with_transpose, *per_seed),
        Command::CatalogCheck { q, n } => catalog_check(cli, *q, *n),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let argv: Vec<String> = std::env::args().collect();
    if argv.iter().any(|a| a == "--schema") {
        let names: Vec<String> = Cli::command().get_subcommands().map(|c| c.get_name().to_string()).collect();
        let sub = argv.iter().skip(1).find(|a| names.contains(a)).map(String::as_str);
        emit_json(&schema(sub));
        return ExitCode::SUCCESS;
    }
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 || rayon::ThreadPoolBuilder::new().num_threads(t).build_global().is_err() {
            eprintln!("error: invalid thread count {t}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
