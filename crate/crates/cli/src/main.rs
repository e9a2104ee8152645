use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};

use urd_core::catalog::{self, Designator, Source};
use urd_core::constructor::{construct_urd, ConstructError};
use urd_core::format::{self, LoadError};
use urd_core::ingredients::{infer_key, Family, IngredientError, IngredientKey, IngredientStore, Provider, STORE_ENV};
use urd_core::search::Budget;
use urd_core::spectrum::{admissible, spectrum_set, ClassPair};
use urd_core::verifier::verify;

const EXIT_INADMISSIBLE: u8 = 2;
const EXIT_VERIFY: u8 = 3;
const EXIT_MISSING: u8 = 4;
const EXIT_PARSE: u8 = 5;

#[derive(Parser)]
#[command(name = "urd", version, about = "Uniformly resolvable decompositions of 2K_v into 4-cycles and 3-stars")]
struct Cli {
    /// Ingredient store directory (defaults to $URD_STORE)
    #[arg(long, global = true)]
    store: Option<PathBuf>,
    /// Node budget for ingredient searches
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Wall-clock limit for ingredient searches, in seconds
    #[arg(long, global = true)]
    time_limit: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List I(v), the admissible (r, s)
    Spectrum {
        v: u32,
        #[arg(long)]
        json: bool,
    },
    /// Build a URD(v; r, s) certificate
    Construct {
        v: u32,
        r: u32,
        s: u32,
        /// Output file (stdout if omitted)
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Use only direct constructions and the store
        #[arg(long)]
        no_search: bool,
    },
    /// Check a certificate file
    Verify {
        path: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Manage auxiliary designs
    #[command(subcommand)]
    Ingredient(IngredientCommand),
    /// Designs given explicitly
    #[command(subcommand)]
    Catalog(CatalogCommand),
}

#[derive(Subcommand)]
enum IngredientCommand {
    /// Obtain an ingredient and save it in the store
    Search {
        /// rgdd4, urgdd or frame2
        family: String,
        g: u32,
        u: u32,
        #[arg(long, default_value_t = 1)]
        lambda: u32,
        /// Class profile r,s (urgdd only)
        #[arg(long)]
        profile: Option<String>,
    },
    /// Verify a certificate and add it to the store
    Import {
        path: PathBuf,
        /// Key signature; inferred from the certificate if omitted
        #[arg(long)]
        key: Option<String>,
    },
    /// Keys in the store with content hashes
    List,
}

#[derive(Subcommand)]
enum CatalogCommand {
    /// Designators and how each entry is obtained
    List,
    /// Write every catalog design to a directory
    Dump { dir: PathBuf },
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure { code: 1, error: e.into() }
    }
}

fn fail(code: u8, error: impl Into<anyhow::Error>) -> Failure {
    Failure { code, error: error.into() }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, error }) => {
            eprintln!("error: {}", describe(&error));
            ExitCode::from(code)
        }
    }
}

/// The error chain joined by ": ", leaving out causes already spelled out
/// by the message above them.
fn describe(error: &anyhow::Error) -> String {
    let mut out = error.to_string();
    let mut last = out.clone();
    for cause in error.chain().skip(1) {
        let text = cause.to_string();
        if !last.contains(&text) {
            out.push_str(": ");
            out.push_str(&text);
        }
        last = text;
    }
    out
}

fn emit(text: &str) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn budget(cli: &Cli) -> Budget {
    let mut b = Budget::default();
    if let Some(n) = cli.budget {
        b.nodes = n;
    }
    b.time = cli.time_limit.map(std::time::Duration::from_secs_f64);
    b
}

fn open_store(cli: &Cli) -> Result<Option<IngredientStore>, Failure> {
    match &cli.store {
        Some(dir) => Ok(Some(IngredientStore::open(dir).with_context(|| format!("opening store {}", dir.display()))?)),
        None => Ok(IngredientStore::from_env().context("opening store from URD_STORE")?),
    }
}

fn provider(cli: &Cli) -> Result<Provider, Failure> {
    let mut p = match open_store(cli)? {
        Some(store) => Provider::with_store(store),
        None => Provider::new(),
    };
    p.budget = budget(cli);
    Ok(p)
}

fn require_store(cli: &Cli) -> Result<IngredientStore, Failure> {
    open_store(cli)?.ok_or_else(|| anyhow!("no ingredient store: pass --store or set {STORE_ENV}").into())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Spectrum { v, json } => spectrum(*v, *json),
        Command::Construct { v, r, s, out, no_search } => {
            let mut p = provider(&cli)?;
            p.search = !no_search;
            construct(*v, ClassPair::new(*r, *s), out.as_deref(), &mut p)
        }
        Command::Verify { path, json } => verify_file(path, *json),
        Command::Ingredient(IngredientCommand::Search { family, g, u, lambda, profile }) => {
            let key = ingredient_key(family, *g, *u, *lambda, profile.as_deref())?;
            let store = require_store(&cli)?;
            let mut p = provider(&cli)?;
            let c = p.provide(&key).map_err(ingredient_failure)?;
            let path = store.put(&key, &c).map_err(ingredient_failure)?;
            emit(&format!("{key} {} {}", format::content_hash(&c), path.display()))?;
            Ok(())
        }
        Command::Ingredient(IngredientCommand::Import { path, key }) => {
            let store = require_store(&cli)?;
            let c = load(path)?;
            let report = verify(&c);
            if !report.passed() {
                return Err(fail(EXIT_VERIFY, anyhow!("rejected {}: {report}", path.display())));
            }
            let key = match key {
                Some(k) => k.parse::<IngredientKey>().map_err(|e| fail(EXIT_PARSE, e))?,
                None => infer_key(&c).ok_or_else(|| {
                    fail(EXIT_VERIFY, anyhow!("certificate does not have the shape of any ingredient key"))
                })?,
            };
            let stored = store.import(&key, &c).map_err(ingredient_failure)?;
            emit(&format!("{key} {} {}", format::content_hash(&c), stored.display()))?;
            Ok(())
        }
        Command::Ingredient(IngredientCommand::List) => {
            let store = require_store(&cli)?;
            for (key, hash) in store.list().map_err(ingredient_failure)? {
                emit(&format!("{key} {hash}"))?;
            }
            Ok(())
        }
        Command::Catalog(CatalogCommand::List) => {
            for (d, source) in catalog::designators() {
                let how = match source {
                    Source::Explicit => "explicit",
                    Source::Composed => "composed",
                };
                emit(&format!("{d} {how}"))?;
            }
            Ok(())
        }
        Command::Catalog(CatalogCommand::Dump { dir }) => {
            let mut p = provider(&cli)?;
            dump_catalog(dir, &mut p)
        }
    }
}

fn spectrum(v: u32, json: bool) -> Result<(), Failure> {
    let set = spectrum_set(v);
    let mut out = std::io::stdout().lock();
    if json {
        writeln!(out, "{}", serde_json::to_string(&set.pairs)?)?;
    } else {
        for p in &set.pairs {
            writeln!(out, "{} {}", p.r, p.s)?;
        }
    }
    if set.is_empty() {
        return Err(fail(EXIT_INADMISSIBLE, anyhow!("no admissible profiles for v = {v}")));
    }
    Ok(())
}

fn construct(v: u32, profile: ClassPair, out: Option<&Path>, p: &mut Provider) -> Result<(), Failure> {
    if !admissible(v, profile) {
        return Err(fail(EXIT_INADMISSIBLE, anyhow!("inadmissible: {profile} is not in I({v})")));
    }
    let c = construct_urd(v, profile, p).map_err(|e| {
        let code = match &e {
            ConstructError::Inadmissible { .. } => EXIT_INADMISSIBLE,
            ConstructError::IngredientNotAvailable { .. } => EXIT_MISSING,
            ConstructError::Verification(_) | ConstructError::ProfileMismatch { .. } => EXIT_VERIFY,
            ConstructError::Ingredient(IngredientError::Invalid { .. }) => EXIT_VERIFY,
            _ => 1,
        };
        fail(code, e)
    })?;
    let report = verify(&c);
    if !report.passed() {
        return Err(fail(EXIT_VERIFY, anyhow!("refusing to write an unverified certificate: {report}")));
    }
    match out {
        Some(path) => {
            format::save(path, &c).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("{report}");
        }
        None => emit(&format::encode_canonical(&c))?,
    }
    Ok(())
}

fn load(path: &Path) -> Result<urd_core::Certificate, Failure> {
    format::load(path).map_err(|e| match e {
        LoadError::Parse { .. } => fail(EXIT_PARSE, e),
        LoadError::Io { .. } => fail(1, e),
    })
}

fn verify_file(path: &Path, json: bool) -> Result<(), Failure> {
    let c = load(path)?;
    let report = verify(&c);
    if json {
        emit(&format!("{}", report.to_json()))?;
    } else {
        emit(&format!("{report}"))?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(fail(EXIT_VERIFY, anyhow!("{} failed verification", path.display())))
    }
}

fn ingredient_key(family: &str, g: u32, u: u32, lambda: u32, profile: Option<&str>) -> Result<IngredientKey, Failure> {
    let family = match family {
        "rgdd4" => Family::Rgdd4,
        "urgdd" => Family::Urgdd,
        "frame2" => Family::Frame2,
        other => return Err(fail(EXIT_PARSE, anyhow!("unknown family {other:?}; expected rgdd4, urgdd or frame2"))),
    };
    let profile = match (family, profile) {
        (Family::Urgdd, Some(p)) => {
            let (r, s) = p.split_once(',').ok_or_else(|| fail(EXIT_PARSE, anyhow!("profile must be r,s")))?;
            let parse = |x: &str| x.trim().parse::<u32>().map_err(|e| fail(EXIT_PARSE, e));
            ClassPair::new(parse(r)?, parse(s)?)
        }
        (Family::Urgdd, None) => return Err(fail(EXIT_PARSE, anyhow!("urgdd needs --profile r,s"))),
        _ => ClassPair::new(0, 0),
    };
    Ok(IngredientKey { family, g, u, lambda, profile })
}

fn ingredient_failure(e: IngredientError) -> Failure {
    let code = match &e {
        IngredientError::NotAvailable { .. } => EXIT_MISSING,
        IngredientError::Invalid { .. } => EXIT_VERIFY,
        IngredientError::Load(LoadError::Parse { .. }) => EXIT_PARSE,
        _ => 1,
    };
    fail(code, e)
}

/// File name for a designator: `URGDD(12^2;6,8)` becomes `urgdd_12^2_6_8`.
fn slug(d: &Designator) -> String {
    let mut out = String::new();
    for ch in d.to_string().to_lowercase().chars() {
        match ch {
            '(' | ';' | ',' => out.push('_'),
            ')' => {}
            c => out.push(c),
        }
    }
    out
}

fn dump_catalog(dir: &Path, p: &mut Provider) -> Result<(), Failure> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (d, _) in catalog::designators() {
        let c = catalog::lookup(&d, p).map_err(|e| fail(EXIT_MISSING, e))?;
        let report = verify(&c);
        if !report.passed() {
            return Err(fail(EXIT_VERIFY, anyhow!("catalog entry {d}: {report}")));
        }
        let path = dir.join(format!("{}.json", slug(&d)));
        format::save(&path, &c).with_context(|| format!("writing {}", path.display()))?;
        emit(&format!("{d} {}", path.display()))?;
    }
    Ok(())
}
