mod catalog;
mod config;
mod published;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use log::warn;
use rayon::prelude::*;

use quadapn::boolfun::Vbf;
use quadapn::classes::{admissibility, canonical_classes, CanonicalClass, ClassKind};
use quadapn::equiv::Fingerprint;
use quadapn::le::{self, DetOptions, LeOptions, LeOutcome, OrbitPlan, SeedLibrary};
use quadapn::linalg::GF2Poly;
use quadapn::search::{default_budget, search_with_restarts};
use quadapn::switching::{solve_switchings, switch_sweep, DEFAULT_ENUMERATION_CAP};
use quadapn::Error;

use crate::catalog::{Catalog, Inserted, Provenance};
use crate::config::{parse_duration, Config};

#[derive(Parser)]
#[command(name = "quadapn", version, about = "Search and analysis of quadratic APN functions")]
struct Cli {
    /// TOML file with default seed, budget, restarts, jobs, fix_ceiling, catalog
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Log restarts and progress to stderr
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Randomized tree search for quadratic APN functions
    Search(SearchArgs),
    /// Search constrained by a canonical self-equivalence class
    LeSearch(LeArgs),
    /// Enumerate canonical classes and the admissibility filter
    Classes(ClassesArgs),
    /// Degree, APN property, linearity and spectra of a lookup table
    Analyze { file: PathBuf },
    /// Ortho-derivative fingerprint of a quadratic APN lookup table
    Fingerprint { file: PathBuf },
    /// Switching neighbours F + v*f
    Switch(SwitchArgs),
    /// Manage a fingerprint catalog
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Check the published claims that are reproducible on a desk machine
    VerifyPublished,
    /// Collect representatives with distinct fingerprints (seed library builder)
    Seeds(SeedsArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    seed: Option<u64>,
    /// Per-restart budget, e.g. 500ms, 10s, 2m
    #[arg(long)]
    budget: Option<String>,
    #[arg(long)]
    restarts: Option<usize>,
    /// Insert results into this catalog directory
    #[arg(long)]
    catalog: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    common: Common,
    /// Independent runs with seeds seed, seed+1, ...
    #[arg(long, default_value_t = 1)]
    runs: usize,
    #[arg(long)]
    jobs: Option<usize>,
    /// Write each table to this directory
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LeArgs {
    #[arg(long)]
    n: usize,
    /// 1-based canonical class index
    #[arg(long)]
    class: usize,
    #[command(flatten)]
    common: Common,
    /// Exhaustive pruned search instead of randomized restarts
    #[arg(long)]
    deterministic: bool,
    /// Deterministic search under --det-ceiling, then randomized restarts
    #[arg(long, conflicts_with = "deterministic")]
    triage: bool,
    #[arg(long)]
    det_ceiling: Option<String>,
    #[arg(long)]
    randomize_basis: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassesArgs {
    #[arg(long)]
    n: usize,
    /// Also exclude classes with |Fix_A| above this bound
    #[arg(long)]
    fix_ceiling: Option<usize>,
    /// Print one line per class
    #[arg(long)]
    list: bool,
}

#[derive(Args)]
struct SwitchArgs {
    file: PathBuf,
    /// Direction in hex
    #[arg(long, value_parser = parse_hex)]
    v: Option<u32>,
    /// Sweep all nonzero directions
    #[arg(long, conflicts_with = "v")]
    all: bool,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: usize,
    #[arg(long)]
    catalog: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CatalogAction {
    Insert {
        #[arg(long)]
        dir: PathBuf,
        files: Vec<PathBuf>,
        #[arg(long, default_value = "insert")]
        origin: String,
        #[arg(long)]
        class: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    List {
        #[arg(long)]
        dir: PathBuf,
    },
    Export {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    Verify {
        #[arg(long)]
        dir: PathBuf,
    },
}

#[derive(Args)]
struct SeedsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 13)]
    target: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "1h")]
    budget: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_hex(s: &str) -> Result<u32, String> {
    u32::from_str_radix(s.trim_start_matches("0x"), 16).map_err(|e| e.to_string())
}

enum Failure {
    Input(String),
    UnknownClass(String),
    Budget(String),
    Failed(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Failed(_) => 1,
            Failure::Input(_) => 2,
            Failure::UnknownClass(_) => 3,
            Failure::Budget(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::UnknownClass(m) | Failure::Budget(m) | Failure::Failed(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::Io(_) | Error::InvalidArgument(_) => Failure::Input(e.to_string()),
            _ => Failure::Failed(e.to_string()),
        }
    }
}

type Outcome = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let config = match cli.config.as_deref().map(Config::load).transpose() {
        Ok(c) => c.unwrap_or_default(),
        Err(e) => return finish(Err(e.into())),
    };
    finish(run(cli.command, &config))
}

fn finish(outcome: Outcome) -> ExitCode {
    match outcome {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(command: Command, config: &Config) -> Outcome {
    match command {
        Command::Search(a) => cmd_search(a, config),
        Command::LeSearch(a) => cmd_le_search(a, config),
        Command::Classes(a) => cmd_classes(a, config),
        Command::Analyze { file } => cmd_analyze(&file),
        Command::Fingerprint { file } => Ok(format!("{}\n", Fingerprint::of(&read_table(&file)?)?)),
        Command::Switch(a) => cmd_switch(a, config),
        Command::Catalog { action } => cmd_catalog(action),
        Command::VerifyPublished => cmd_verify_published(),
        Command::Seeds(a) => cmd_seeds(a),
    }
}

fn read_table(path: &Path) -> Result<Vbf, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Vbf::from_lut_text(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn budget_or(flag: &Option<String>, config: &Option<String>, fallback: Duration) -> Result<Duration, Failure> {
    match flag.as_ref().or(config.as_ref()) {
        Some(s) => Ok(parse_duration(s)?),
        None => Ok(fallback),
    }
}

fn store(dir: &Path, tables: &[(Vbf, Provenance)]) -> Result<String, Failure> {
    let mut cat = Catalog::open_for_write(dir)?;
    let mut report = String::new();
    for (t, prov) in tables {
        let verdict = match cat.insert(&t.to_lut_text(), prov.clone())? {
            Inserted::New => "new",
            Inserted::Collision => "collision (UNDECIDED bucket)",
            Inserted::Duplicate => "duplicate",
        };
        writeln!(report, "# catalog: {verdict}").expect("string write");
    }
    Ok(report)
}

fn cmd_search(a: SearchArgs, config: &Config) -> Outcome {
    if !(2..=10).contains(&a.n) {
        return Err(Failure::Input(format!("--n must be in 2..=10, got {}", a.n)));
    }
    let seed = a.common.seed.or(config.seed).unwrap_or(0);
    let budget = budget_or(&a.common.budget, &config.budget, default_budget(a.n))?;
    let restarts = a.common.restarts.or(config.restarts).unwrap_or(100);
    let jobs = a.jobs.or(config.jobs).unwrap_or(1).max(1);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| Failure::Failed(e.to_string()))?;
    let results: Vec<_> = pool.install(|| {
        (0..a.runs as u64)
            .into_par_iter()
            .map(|i| (seed + i, search_with_restarts(a.n, seed + i, budget, restarts)))
            .collect()
    });
    let mut out = String::new();
    let mut found = Vec::new();
    let mut missing = 0;
    for (s, r) in results {
        match r? {
            Some((f, used)) => {
                writeln!(out, "# seed={s} restarts={used}").expect("string write");
                out.push_str(&f.to_lut_text());
                if let Some(dir) = &a.out {
                    fs::create_dir_all(dir).map_err(Error::from)?;
                    fs::write(dir.join(format!("search-n{}-seed{s}.lut", a.n)), f.to_lut_text()).map_err(Error::from)?;
                }
                found.push((f, Provenance { origin: "search".into(), class: None, rng_seed: Some(s) }));
            }
            None => {
                writeln!(out, "# seed={s} budget exhausted after {restarts} restarts").expect("string write");
                missing += 1;
            }
        }
    }
    if let Some(dir) = a.common.catalog.as_ref().or(config.catalog.as_ref()) {
        out.push_str(&store(dir, &found)?);
    }
    if missing > 0 {
        print!("{out}");
        return Err(Failure::Budget(format!("{missing} of {} runs found nothing", a.runs)));
    }
    Ok(out)
}

fn factors(list: &[GF2Poly]) -> String {
    let parts: Vec<String> = list.iter().map(|p| p.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn kind_name(k: ClassKind) -> &'static str {
    match k {
        ClassKind::BothPrime => "both-prime",
        ClassKind::BIdentity => "b-identity",
        ClassKind::AIdentity => "a-identity",
    }
}

fn class_header(c: &CanonicalClass) -> String {
    format!(
        "# class={} kind={} p={} A={} B={}",
        c.index,
        kind_name(c.kind),
        c.p,
        factors(&c.a_factors),
        factors(&c.b_factors)
    )
}

fn cmd_le_search(a: LeArgs, config: &Config) -> Outcome {
    let classes = canonical_classes(a.n)?;
    let class = a
        .class
        .checked_sub(1)
        .and_then(|i| classes.get(i))
        .ok_or_else(|| Failure::UnknownClass(format!("no class {} for n = {} (1..={})", a.class, a.n, classes.len())))?;
    let plan = OrbitPlan::from_class(class).map_err(|e| Failure::UnknownClass(e.to_string()))?;
    let seeds = SeedLibrary::builtin()?;
    let seed = a.common.seed.or(config.seed).unwrap_or(0);
    let mut out = class_header(class);
    out.push('\n');
    let mut found: Vec<(Option<usize>, Vbf)> = Vec::new();
    let mut complete = false;

    if a.deterministic || a.triage {
        let ceiling = budget_or(&a.det_ceiling, &config.det_ceiling, Duration::from_secs(600))?;
        let opts = DetOptions { deadline: Some(ceiling), rng_seed: seed, ..DetOptions::default() };
        let r = le::deterministic_search(&plan, &seeds, &opts)?;
        writeln!(out, "# deterministic complete={} solutions={} nodes={}", r.complete, r.functions.len(), r.nodes)
            .expect("string write");
        complete = r.complete;
        found = r.functions;
    }
    if !a.deterministic && !complete {
        let budget = budget_or(&a.common.budget, &config.budget, default_budget(a.n))?;
        let opts = LeOptions {
            budget: Some(budget),
            max_restarts: a.common.restarts.or(config.restarts).unwrap_or(10),
            randomize_basis: a.randomize_basis,
        };
        match le::le_search(&plan, &seeds, seed, &opts)? {
            LeOutcome::Found { f, seed_id, restarts } => {
                writeln!(out, "# randomized rng_seed={seed} restarts={restarts}").expect("string write");
                found.push((seed_id, f));
            }
            LeOutcome::Exhausted => {
                out.push_str("# randomized search tree is empty for every seed function\n");
            }
            LeOutcome::Timeout { restarts } => {
                print!("{out}");
                return Err(Failure::Budget(format!("no function found in {restarts} restarts")));
            }
        }
    }
    let mut stored = Vec::new();
    for (i, (seed_id, f)) in found.iter().enumerate() {
        debug_assert!(plan.satisfied_by(f));
        let g = seed_id.map_or("none".to_string(), |s| s.to_string());
        writeln!(out, "# seed_g={g} rng_seed={seed}").expect("string write");
        out.push_str(&f.to_lut_text());
        if let Some(dir) = &a.out {
            fs::create_dir_all(dir).map_err(Error::from)?;
            let name = format!("le-n{}-class{}-seed{seed}-{i}.lut", a.n, class.index);
            fs::write(dir.join(name), f.to_lut_text()).map_err(Error::from)?;
        }
        stored.push((f.clone(), Provenance { origin: "le-search".into(), class: Some(class.index), rng_seed: Some(seed) }));
    }
    if let Some(dir) = a.common.catalog.as_ref().or(config.catalog.as_ref()) {
        out.push_str(&store(dir, &stored)?);
    }
    Ok(out)
}

fn cmd_classes(a: ClassesArgs, config: &Config) -> Outcome {
    let classes = canonical_classes(a.n)?;
    let ceiling = a.fix_ceiling.or(config.fix_ceiling);
    let (p, bi, ai) = quadapn::classes::kind_counts(&classes);
    let admissible = quadapn::classes::filter_admissible(&classes, ceiling).len();
    let mut out = format!("{} classes ({p}/{bi}/{ai}), {admissible} admissible\n", classes.len());
    if a.list {
        for c in &classes {
            writeln!(
                out,
                "{} {} p={} A={} B={} fixA={} fixB={} {}",
                c.index,
                kind_name(c.kind),
                c.p,
                factors(&c.a_factors),
                factors(&c.b_factors),
                c.fix_a(),
                c.fix_b(),
                admissibility(c, ceiling)
            )
            .expect("string write");
        }
    }
    Ok(out)
}

fn cmd_analyze(file: &Path) -> Outcome {
    let f = read_table(file)?;
    let apn = if f.is_apn() { "APN" } else { "not APN" };
    let mut out = format!("degree {}, {apn}, linearity {}\n", f.algebraic_degree(), f.linearity());
    writeln!(out, "permutation: {}", if f.is_permutation() { "yes" } else { "no" }).expect("string write");
    writeln!(out, "differential uniformity: {}", f.differential_uniformity()).expect("string write");
    writeln!(out, "differential spectrum: {}", f.differential_spectrum()).expect("string write");
    writeln!(out, "extended walsh spectrum: {}", f.extended_walsh_spectrum()).expect("string write");
    Ok(out)
}

fn cmd_switch(a: SwitchArgs, config: &Config) -> Outcome {
    let f = read_table(&a.file)?;
    let source = Fingerprint::of(&f)?;
    let mut out = String::new();
    let mut fresh: Vec<(Vbf, Provenance)> = Vec::new();
    if a.all {
        let report = switch_sweep(&f, a.cap)?;
        for d in &report.directions {
            let skipped = if d.enumerated { "" } else { " enumeration skipped" };
            writeln!(
                out,
                "v={:#x} dim={} quadratic={} new={}{skipped}",
                d.v, d.dim, d.quadratic_outputs, d.new_fingerprints
            )
            .expect("string write");
        }
        for (fp, (v, g)) in &report.classes {
            if *fp != source {
                fresh.push((g.clone(), Provenance { origin: format!("switch v={v:#x}"), ..Default::default() }));
            }
        }
        writeln!(out, "fingerprints: {} (new {})", report.classes.len(), fresh.len()).expect("string write");
    } else {
        let v = a.v.ok_or_else(|| Failure::Input("give --v <hex> or --all".into()))?;
        let s = solve_switchings(&f, v, a.cap)?;
        match &s.functions {
            None => writeln!(out, "v={v:#x} dim={} enumeration skipped", s.dim).expect("string write"),
            Some(gs) => {
                let mut seen = std::collections::BTreeSet::new();
                for g in gs.iter().filter(|g| g.algebraic_degree() <= 2) {
                    let fp = Fingerprint::of(g)?;
                    if fp != source && seen.insert(fp) {
                        fresh.push((g.clone(), Provenance { origin: format!("switch v={v:#x}"), ..Default::default() }));
                    }
                }
                writeln!(out, "v={v:#x} dim={} solutions={} new fingerprints={}", s.dim, gs.len(), fresh.len())
                    .expect("string write");
            }
        }
    }
    if let Some(dir) = a.catalog.as_ref().or(config.catalog.as_ref()) {
        out.push_str(&store(dir, &fresh)?);
    }
    Ok(out)
}

fn cmd_catalog(action: CatalogAction) -> Outcome {
    match action {
        CatalogAction::Insert { dir, files, origin, class, seed } => {
            let mut cat = Catalog::open_for_write(&dir)?;
            let mut out = String::new();
            for file in files {
                let text = fs::read_to_string(&file).map_err(|e| Failure::Input(format!("{}: {e}", file.display())))?;
                let prov = Provenance { origin: origin.clone(), class, rng_seed: seed };
                let verdict = cat.insert(&text, prov).map_err(|e| match e {
                    Error::Precondition(m) => Failure::Input(format!("{}: {m}", file.display())),
                    other => Failure::from(other),
                })?;
                writeln!(out, "{} {verdict:?}", file.display()).expect("string write");
            }
            Ok(out)
        }
        CatalogAction::List { dir } => {
            let cat = Catalog::open(&dir)?;
            let mut out = String::new();
            for (fp, members) in cat.buckets() {
                let flag = if members.len() > 1 { " UNDECIDED" } else { "" };
                let keys: Vec<&str> = members.iter().map(|e| e.key.as_str()).collect();
                writeln!(out, "{fp} {}{flag}", keys.join(",")).expect("string write");
            }
            writeln!(out, "{} tables, {} fingerprints", cat.entries().len(), cat.buckets().len()).expect("string write");
            Ok(out)
        }
        CatalogAction::Export { dir, out } => {
            let n = Catalog::open(&dir)?.export(&out)?;
            Ok(format!("exported {n} tables\n"))
        }
        CatalogAction::Verify { dir } => {
            let n = Catalog::open(&dir)?.verify()?;
            Ok(format!("{n} tables verified\n"))
        }
    }
}

fn cmd_verify_published() -> Outcome {
    let claims = published::claims()?;
    let mut out = String::new();
    for c in &claims {
        writeln!(out, "{}", c.line()).expect("string write");
    }
    let failed = claims.iter().filter(|c| !c.passed()).count();
    if failed > 0 {
        print!("{out}");
        return Err(Failure::Failed(format!("{failed} claims failed")));
    }
    Ok(out)
}

fn cmd_seeds(a: SeedsArgs) -> Outcome {
    let budget = parse_duration(&a.budget)?;
    let reps = le::collect_representatives(a.n, a.target, a.seed, budget)?;
    if reps.len() < a.target {
        warn!("only {} of {} fingerprints collected", reps.len(), a.target);
    }
    let text = format!(
        "# quadratic APN representatives on F2^{}, one per fingerprint\n{}",
        a.n,
        le::format_tables(&reps)
    );
    match a.out {
        Some(path) => {
            fs::write(&path, &text).map_err(Error::from)?;
            Ok(format!("{} representatives written to {}\n", reps.len(), path.display()))
        }
        None => Ok(text),
    }
}
