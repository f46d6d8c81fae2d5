//! The `lambda-sp` command line.
//!
//! Exit codes: 0 success, 1 a well-formed input that fails (invalid
//! certificate, mismatched peak, failing suite), 2 unreadable or malformed
//! input and usage errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Parser, Subcommand, ValueEnum};

use crate::cert::{check_cert, embed_besp_in_fp, ConvCert};
use crate::confluence::{church_rosser, join_e, join_fp, join_r, Valley};
use crate::conservativity::{erase, transform_conservativity};
use crate::json::{cert_from_json, cert_to_json, valley_to_json, JsonError};
use crate::rewrite::{reduce_bounded, Reduction, Relation, RelationKind, Strategy};
use crate::suites::{run_suite, Suite, SuiteConfig};
use crate::syntax::{parse, print};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "lambda-sp", version, about = "Lambda calculus with surjective pairing: certificates, confluence and conservativity")]
pub struct Cli {
    /// Include eta (false gives the beta-only variants).
    #[arg(long, global = true, default_value_t = true, action = ArgAction::Set)]
    pub extensional: bool,
    /// Step budget for reductions.
    #[arg(long, global = true, default_value_t = 64)]
    pub fuel: usize,
    /// Term size bound (reachable-set exploration and fuzzing).
    #[arg(long, global = true)]
    pub size: Option<usize>,
    #[arg(long, global = true, env = "LAMBDA_SP_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Output format; certificate-producing commands default to json, the
    /// others to text.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the result here instead of standard output (a directory for
    /// fuzz counterexamples).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Replay a certificate file and print its final term.
    Check {
        path: PathBuf,
        /// Check against this relation instead of the one in the file.
        relation: Option<String>,
    },
    /// Turn a surjective-pairing conversion between pure terms into a pure
    /// beta-eta conversion.
    Transform { path: PathBuf },
    /// Join a peak given as two certificates from the same term.
    Join { left: PathBuf, right: PathBuf },
    /// Turn a conversion of the expansion system into a valley.
    Cr { path: PathBuf },
    /// Reduce a term leftmost-outermost, or list its reachable set.
    Reduce {
        term: String,
        #[arg(default_value = "r")]
        relation: String,
        /// Breadth-first reachable set instead of a trace.
        #[arg(long)]
        all: bool,
    },
    /// Print the projection erasure of a term.
    Erase { term: String },
    /// Run a property suite: diamond, commute, join, erase-subst, end-to-end.
    Fuzz {
        suite: String,
        seed: Option<u64>,
        #[arg(default_value_t = 100)]
        count: u64,
    },
}

const DEFAULT_SIZE: usize = 12;

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

/// Outcome of a command: exit code, with messages already written.
type Exit = i32;

/// Run with explicit arguments and streams; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> Exit
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    let mut io = Io { out, err };
    execute(&cli, &mut io)
}

/// Entry point for the binary.
pub fn main_exit() -> Exit {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

fn execute(cli: &Cli, io: &mut Io<'_>) -> Exit {
    match &cli.command {
        Command::Check { path, relation } => cmd_check(cli, io, path, relation.as_deref()),
        Command::Transform { path } => cmd_transform(cli, io, path),
        Command::Join { left, right } => cmd_join(cli, io, left, right),
        Command::Cr { path } => cmd_cr(cli, io, path),
        Command::Reduce { term, relation, all } => cmd_reduce(cli, io, term, relation, *all),
        Command::Erase { term } => cmd_erase(cli, io, term),
        Command::Fuzz { suite, seed, count } => {
            cmd_fuzz(cli, io, suite, seed.unwrap_or(cli.seed), *count)
        }
    }
}

macro_rules! fail {
    ($io:expr, $code:expr, $($arg:tt)*) => {{
        let _ = writeln!($io.err, $($arg)*);
        return $code;
    }};
}

fn read_cert(io: &mut Io<'_>, path: &Path) -> Result<(Relation, ConvCert), Exit> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(io.err, "error: cannot read {}: {e}", path.display());
            return Err(2);
        }
    };
    cert_from_json(&text).map_err(|e: JsonError| {
        let _ = writeln!(io.err, "error: {}: {e}", path.display());
        2
    })
}

/// Write `payload` to `--out` or standard output.
fn emit(cli: &Cli, io: &mut Io<'_>, payload: &str) -> Exit {
    match &cli.out {
        Some(p) => {
            if let Err(e) = fs::write(p, format!("{payload}\n")) {
                fail!(io, 2, "error: cannot write {}: {e}", p.display());
            }
            0
        }
        None => {
            let _ = writeln!(io.out, "{payload}");
            0
        }
    }
}

/// Human-readable rendering: the start term, then one line per step with
/// the term it produces.
pub fn render_cert(c: &ConvCert) -> String {
    let mut s = format!("{}\n", print(&c.start));
    match c.replay() {
        Ok(terms) => {
            for (st, t) in c.steps.iter().zip(terms.iter().skip(1)) {
                let _ = writeln!(s, "  {st}  =>  {}", print(t));
            }
        }
        Err(e) => {
            let _ = writeln!(s, "  (does not replay: {e})");
        }
    }
    s.pop();
    s
}

fn render_valley(v: &Valley) -> String {
    format!(
        "meet: {}\nleft:\n{}\nright:\n{}",
        print(&v.meet),
        render_cert(&v.left),
        render_cert(&v.right)
    )
}

fn cmd_check(cli: &Cli, io: &mut Io<'_>, path: &Path, relation: Option<&str>) -> Exit {
    let (file_rel, c) = match read_cert(io, path) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let rel = match relation {
        None => file_rel,
        Some(code) => match Relation::from_code(code, file_rel.extensional) {
            Some(r) => r,
            None => fail!(io, 2, "error: unknown relation `{code}`"),
        },
    };
    match check_cert(&c, &rel) {
        Ok(end) => {
            if cli.format == Some(Format::Json) {
                let v = serde_json::json!({"valid": true, "relation": rel.code(), "end": print(&end)});
                let _ = writeln!(io.out, "{v}");
            } else {
                let _ = writeln!(io.out, "{}", print(&end));
            }
            0
        }
        Err(e) => {
            if cli.format == Some(Format::Json) {
                let v = serde_json::json!({"valid": false, "index": e.index, "cause": e.cause.to_string()});
                let _ = writeln!(io.out, "{v}");
            }
            fail!(io, 1, "invalid: step {}: {}", e.index, e.cause)
        }
    }
}

fn cmd_transform(cli: &Cli, io: &mut Io<'_>, path: &Path) -> Exit {
    let (rel, c) = match read_cert(io, path) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let ext = rel.extensional && cli.extensional;
    if !matches!(rel.kind, RelationKind::BetaEtaSp | RelationKind::BetaEtaPure) {
        fail!(io, 1, "error: transform expects a `besp` certificate, got `{}`", rel.code());
    }
    let end = match check_cert(&c, &Relation::besp(ext)) {
        Ok(e) => e,
        Err(e) => fail!(io, 1, "invalid input: step {}: {}", e.index, e.cause),
    };
    let out = match transform_conservativity(&c.start, &end, &c, ext) {
        Ok(o) => o,
        Err(e) => fail!(io, 1, "error: {e}"),
    };
    let be = Relation::be(ext);
    match check_cert(&out, &be) {
        Ok(e) if e == end && out.start == c.start => {}
        _ => fail!(io, 1, "internal error: output failed its self-check"),
    }
    let payload = match cli.format.unwrap_or(Format::Json) {
        Format::Json => cert_to_json(&out, &be),
        Format::Text => render_cert(&out),
    };
    emit(cli, io, &payload)
}

fn finish_valley(cli: &Cli, io: &mut Io<'_>, v: Valley) -> Exit {
    if let Err(e) = v.verify() {
        fail!(io, 1, "internal error: valley failed its self-check: {e}");
    }
    let payload = match cli.format.unwrap_or(Format::Json) {
        Format::Json => valley_to_json(&v),
        Format::Text => render_valley(&v),
    };
    emit(cli, io, &payload)
}

fn cmd_join(cli: &Cli, io: &mut Io<'_>, left: &Path, right: &Path) -> Exit {
    let (r1, c1) = match read_cert(io, left) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let (r2, c2) = match read_cert(io, right) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let ext = r1.extensional && r2.extensional && cli.extensional;
    let v = match (r1.kind, r2.kind) {
        (RelationKind::R, RelationKind::R) => join_r(&c1, &c2, ext),
        (RelationKind::E, RelationKind::E) => join_e(&c1, &c2, ext),
        _ => join_fp(&c1, &c2, ext),
    };
    match v {
        Ok(v) => finish_valley(cli, io, v),
        Err(e) => fail!(io, 1, "error: {e}"),
    }
}

fn cmd_cr(cli: &Cli, io: &mut Io<'_>, path: &Path) -> Exit {
    let (rel, c) = match read_cert(io, path) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let ext = rel.extensional && cli.extensional;
    let c = if rel.kind == RelationKind::BetaEtaSp {
        match embed_besp_in_fp(&c) {
            Ok(c) => c,
            Err(e) => fail!(io, 1, "invalid input: step {}: {}", e.index, e.cause),
        }
    } else {
        c
    };
    match church_rosser(&c, ext) {
        Ok(v) => finish_valley(cli, io, v),
        Err(e) => fail!(io, 1, "error: {e}"),
    }
}

fn cmd_reduce(cli: &Cli, io: &mut Io<'_>, text: &str, relation: &str, all: bool) -> Exit {
    let m = match parse(text) {
        Ok(m) => m,
        Err(e) => fail!(io, 2, "error: {e}"),
    };
    let Some(rel) = Relation::from_code(relation, cli.extensional) else {
        fail!(io, 2, "error: unknown relation `{relation}`");
    };
    let strategy = if all {
        Strategy::FullEnumeration {
            size_bound: cli.size.unwrap_or(DEFAULT_SIZE),
        }
    } else {
        Strategy::LeftmostOutermost
    };
    let json = cli.format == Some(Format::Json);
    let payload = match reduce_bounded(&m, &rel, cli.fuel, strategy) {
        Reduction::Trace(t) => {
            if json {
                serde_json::json!({
                    "certificate": crate::json::cert_to_value(&t.cert, &rel),
                    "result": print(t.last()),
                    "normal_form": t.normal_form,
                })
                .to_string()
            } else {
                t.terms.iter().map(print).collect::<Vec<_>>().join("\n")
            }
        }
        Reduction::Reachable(set) => {
            let terms: Vec<String> = set.iter().map(print).collect();
            if json {
                serde_json::json!({ "reachable": terms }).to_string()
            } else {
                terms.join("\n")
            }
        }
    };
    emit(cli, io, &payload)
}

fn cmd_erase(cli: &Cli, io: &mut Io<'_>, text: &str) -> Exit {
    let m = match parse(text) {
        Ok(m) => m,
        Err(e) => fail!(io, 2, "error: {e}"),
    };
    let e = print(&erase(&m));
    let payload = if cli.format == Some(Format::Json) {
        serde_json::json!({ "erasure": e }).to_string()
    } else {
        e
    };
    emit(cli, io, &payload)
}

fn cmd_fuzz(cli: &Cli, io: &mut Io<'_>, name: &str, seed: u64, count: u64) -> Exit {
    let Some(suite) = Suite::from_name(name) else {
        let names: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
        fail!(io, 2, "error: unknown suite `{name}` (expected one of {})", names.join(", "));
    };
    let mut cfg = SuiteConfig::for_suite(suite, cli.extensional);
    if let Some(s) = cli.size {
        cfg.size = s;
    }
    let report = run_suite(suite, seed, count, &cfg);
    let _ = writeln!(io.err, "{suite}: {:.2?}", report.elapsed);
    if !report.passed() {
        let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("fuzz-counterexamples"));
        for c in &report.failures {
            let case_dir = dir.join(format!("{suite}-{seed}-{}", c.index));
            if let Err(e) = fs::create_dir_all(&case_dir) {
                fail!(io, 2, "error: cannot create {}: {e}", case_dir.display());
            }
            for (name, v) in &c.files {
                let text = serde_json::to_string_pretty(v).expect("serializable");
                if let Err(e) = fs::write(case_dir.join(name), text + "\n") {
                    fail!(io, 2, "error: cannot write counterexample: {e}");
                }
            }
            let _ = writeln!(
                io.err,
                "counterexample {}: {}\n  replay: cd {} && lambda-sp {}",
                c.index,
                c.message,
                case_dir.display(),
                c.command.join(" ")
            );
        }
    }
    match cli.format {
        Some(Format::Json) => {
            let _ = writeln!(io.out, "{}", report.to_json());
        }
        _ => {
            let mut line = format!(
                "{suite} seed={seed} cases={} failures={}",
                report.cases,
                report.failures.len()
            );
            for (k, v) in &report.checks {
                let _ = write!(line, " {}={v}", k.replace(' ', "_"));
            }
            let _ = writeln!(io.out, "{line}");
        }
    }
    if report.passed() {
        0
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("lambda-sp").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn reduce_and_erase() {
        assert_eq!(run_str(&["reduce", "p1 <a,b>", "r"]).1.lines().last(), Some("a"));
        assert_eq!(run_str(&["erase", "<a,b>"]), (0, "a\n".into(), String::new()));
        assert_eq!(run_str(&["erase", "(a"]).0, 2);
    }

    #[test]
    fn unknown_suite() {
        assert_eq!(run_str(&["fuzz", "nope"]).0, 2);
        let (code, out, _) = run_str(&["fuzz", "erase-subst", "3", "20"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("erase-subst seed=3 cases=20 failures=0"));
    }

    #[test]
    fn flags() {
        let cli = Cli::try_parse_from(["lambda-sp", "--extensional=false", "erase", "x"]).unwrap();
        assert!(!cli.extensional);
        assert_eq!(cli.fuel, 64);
    }
}
