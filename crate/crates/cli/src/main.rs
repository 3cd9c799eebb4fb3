//! `sldc`: build, verify, audit and serve smooth locally decodable codes.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use sldc_core::capacity::{capacity_uldc, min_length, min_upload_bits, pir_capacity};
use sldc_core::format::{code_document, code_from_document, parse_document, read_messages, scheme_from_document, to_json};
use sldc_core::netsim::{retrieve, serve_database};
use sldc_core::pir::{cost_metrics, default_scheme, deniability_audit, privacy_audit, AuditResult};
use sldc_core::verify::{run_checks, CheckKind, Status, VerifyOptions, VerifyReport};
use sldc_core::{build_sldc, load_fixture, Error, PirScheme, Rational};

#[derive(Parser)]
#[command(name = "sldc", version, about = "Capacity-achieving smooth locally decodable codes and PIR_max retrieval")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print the capacity, minimum length, PIR rate and upload cost for (N, K).
    Capacity {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Build the length-N^K code and write its document.
    Build {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Output path; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write one of the bundled reference codes.
    Fixture {
        #[arg(long)]
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run verification checks on a code document.
    Verify {
        file: PathBuf,
        /// Comma-separated subset of: correctness, smoothness, universality,
        /// rate, properties, tree, converse, min-distance, corruption.
        #[arg(long)]
        checks: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Corruption fraction as a fraction `a/b`.
        #[arg(long)]
        delta: Option<String>,
        /// Seed for sampled tree realizations.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exact privacy, deniability and cost audit of the retrieval scheme.
    PirAudit {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Serve one database over TCP until interrupted.
    Serve {
        file: PathBuf,
        /// Database number, starting at 1.
        #[arg(long)]
        db: usize,
        /// Raw message file of K * L_w bits, MSB-first.
        #[arg(long)]
        messages: PathBuf,
        #[arg(long, default_value = "127.0.0.1:0")]
        listen: String,
    },
    /// Privately retrieve one message from running servers.
    Retrieve {
        file: PathBuf,
        /// Message number, starting at 1.
        #[arg(long)]
        theta: usize,
        /// Comma-separated host:port list, one per database in order.
        #[arg(long, value_delimiter = ',', required = true)]
        endpoints: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the retrieved message bits here instead of printing hex.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

/// Exit status 1 carries a failed verdict; 2 is a usage or IO problem.
enum Failure {
    Verdict,
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verdict) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> CmdResult {
    match command {
        Command::Capacity { n, k, format } => capacity(n, k, format),
        Command::Build { n, k, out } => {
            let code = build_sldc(n, k)?;
            emit(out.as_deref(), &to_json(&code_document(&code)?)?)
        }
        Command::Fixture { name, out } => {
            let code = load_fixture(&name)?;
            emit(out.as_deref(), &to_json(&code_document(&code)?)?)
        }
        Command::Verify {
            file,
            checks,
            format,
            delta,
            seed,
        } => verify(&file, checks, format, delta, seed),
        Command::PirAudit { file, format } => pir_audit(&file, format),
        Command::Serve {
            file,
            db,
            messages,
            listen,
        } => serve(&file, db, &messages, &listen),
        Command::Retrieve {
            file,
            theta,
            endpoints,
            seed,
            out,
            format,
        } => retrieve_cmd(&file, theta, &endpoints, seed, out.as_deref(), format),
    }
}

fn emit(out: Option<&Path>, text: &str) -> CmdResult {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn print_json(v: &Value) -> CmdResult {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Failure::Usage(e.to_string()))?;
    s.push('\n');
    emit(None, &s)
}

fn capacity(n: u64, k: u64, format: Format) -> CmdResult {
    let c = capacity_uldc(n, k)?;
    let m = min_length(n, k)?;
    let r = pir_capacity(n, k)?;
    let up = min_upload_bits(n, k)?;
    match format {
        Format::Json => print_json(&json!({
            "N": n,
            "K": k,
            "capacity_uldc": c,
            "min_length": m,
            "pir_capacity": r,
            "min_upload_bits": up,
        })),
        Format::Text => emit(
            None,
            &format!(
                "N = {n}, K = {k}\n\
                 capacity C*       {c}\n\
                 min length M*     {m}\n\
                 PIR capacity      {r}\n\
                 upload bits       {up}\n"
            ),
        ),
    }
}

fn parse_checks(list: &str) -> Result<Vec<CheckKind>, Failure> {
    let checks = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<CheckKind>())
        .collect::<Result<Vec<_>, _>>()?;
    if checks.is_empty() {
        return Err(Failure::Usage("--checks names no checks".into()));
    }
    Ok(checks)
}

fn verify(file: &Path, checks: Option<String>, format: Format, delta: Option<String>, seed: u64) -> CmdResult {
    let checks = checks.as_deref().map(parse_checks).transpose()?;
    let delta = delta
        .map(|d| {
            d.parse::<Rational>()
                .map_err(|e| Failure::Usage(format!("--delta {d:?}: {e}")))
        })
        .transpose()?;
    let doc = parse_document(&read_text(file)?)?;
    let code = code_from_document(&doc)?;
    let opts = VerifyOptions {
        checks,
        delta,
        seed,
        ..VerifyOptions::default()
    };
    let report = run_checks(&code, &opts)?;
    match format {
        Format::Text => emit(None, &render_text(&report))?,
        Format::Json => print_json(&render_json(&report))?,
    }
    if report.pass() { Ok(()) } else { Err(Failure::Verdict) }
}

fn render_text(report: &VerifyReport) -> String {
    let p = &report.params;
    let mut s = format!(
        "code N={} K={} M={} L_w={} L_x={} hash {}\n",
        p.n, p.k, p.m, p.lw, p.lx, report.content_hash
    );
    for c in &report.checks {
        s.push_str(&format!("{} {:<13} {}\n", c.status, c.check.name(), c.summary));
    }
    let verdict = if report.pass() { "PASS" } else { "FAIL" };
    s.push_str(&format!("result: {verdict}\n"));
    s
}

fn render_json(report: &VerifyReport) -> Value {
    json!({
        "version": report.version,
        "kind": "verify-report",
        "params": report.params,
        "content_hash": report.content_hash,
        "checks": report.checks,
        "pass": report.pass(),
        "skipped": report.checks.iter().filter(|c| c.status == Status::Skip).count(),
    })
}

/// Scheme stored in the document, or the default one for a bare code.
fn load_scheme(file: &Path) -> Result<PirScheme, Failure> {
    let doc = parse_document(&read_text(file)?)?;
    match scheme_from_document(&doc)? {
        Some(s) => Ok(s),
        None => Ok(default_scheme(&code_from_document(&doc)?)?),
    }
}

fn audit_line(name: &str, a: &AuditResult) -> String {
    match &a.witness {
        None => format!("PASS {name}"),
        Some(w) => format!(
            "FAIL {name}: database {} query {}: P(. | W_{}) = {} but P(. | W_{}) = {}",
            w.database + 1,
            w.query,
            w.k + 1,
            w.p,
            w.k_other + 1,
            w.p_other
        ),
    }
}

fn pir_audit(file: &Path, format: Format) -> CmdResult {
    let scheme = load_scheme(file)?;
    let privacy = privacy_audit(&scheme)?;
    let deniability = deniability_audit(&scheme)?;
    let costs = cost_metrics(&scheme)?;
    let p = scheme.code().params();
    let capacity = pir_capacity(p.n as u64, p.k as u64)?;
    let pass = privacy.pass && deniability.pass;
    match format {
        Format::Json => print_json(&json!({
            "version": sldc_core::format::FORMAT_VERSION,
            "kind": "pir-audit",
            "params": p,
            "privacy": privacy,
            "deniability": deniability,
            "costs": costs,
            "pir_capacity": capacity,
            "pass": pass,
        }))?,
        Format::Text => {
            let mut s = format!("scheme N={} K={} databases {:?}\n", p.n, p.k, scheme.databases().iter().map(Vec::len).collect::<Vec<_>>());
            s.push_str(&audit_line("privacy", &privacy));
            s.push('\n');
            s.push_str(&audit_line("deniability", &deniability));
            s.push('\n');
            let up: Vec<String> = costs.upload_bits.iter().map(|b| format!("{b}")).collect();
            s.push_str(&format!("upload bits       {}\n", up.join(", ")));
            s.push_str(&format!("download bits     {} per database\n", costs.max_download_bits));
            s.push_str(&format!("rate              {} (capacity {capacity})\n", costs.rate));
            s.push_str(&format!("result: {}\n", if pass { "PASS" } else { "FAIL" }));
            emit(None, &s)?;
        }
    }
    if pass { Ok(()) } else { Err(Failure::Verdict) }
}

fn one_based(value: usize, limit: usize, flag: &str) -> Result<usize, Failure> {
    if value == 0 || value > limit {
        return Err(Failure::Usage(format!("{flag} must be in 1..={limit}, got {value}")));
    }
    Ok(value - 1)
}

fn serve(file: &Path, db: usize, messages: &Path, listen: &str) -> CmdResult {
    let scheme = load_scheme(file)?;
    let n = one_based(db, scheme.databases().len(), "--db")?;
    let bytes = fs::read(messages).map_err(|e| Failure::Usage(format!("{}: {e}", messages.display())))?;
    let block = read_messages(&bytes, scheme.code().params())?;
    let handle = serve_database(&scheme, n, &block, listen)?;
    println!("database {db} listening on {}", handle.local_addr());
    io::stdout().flush()?;
    handle.wait();
    Ok(())
}

fn retrieve_cmd(file: &Path, theta: usize, endpoints: &[String], seed: u64, out: Option<&Path>, format: Format) -> CmdResult {
    let scheme = load_scheme(file)?;
    let k = one_based(theta, scheme.code().k(), "--theta")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, transcript) = retrieve(&scheme, k, endpoints, &mut rng)?;
    if let Some(p) = out {
        fs::write(p, w.to_bytes()).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
    }
    match format {
        Format::Json => print_json(&json!({
            "theta": theta,
            "message_hex": w.to_hex(),
            "transcript": transcript,
        })),
        Format::Text => {
            let mut s = format!("W_{theta} = {}\n", w.to_hex());
            for d in &transcript.per_database {
                s.push_str(&format!(
                    "database {}: query {}, upload {} bits ({:.3} information), download {} bits\n",
                    d.database + 1,
                    d.query,
                    d.upload_bits_wire,
                    d.upload_bits_info,
                    d.download_bits
                ));
            }
            emit(None, &s)
        }
    }
}
