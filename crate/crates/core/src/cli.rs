//! Command-line front end. JSON goes to stdout (or `--out`), one-line
//! summaries to stderr.
//!
//! Exit codes: 0 success or valid certificate, 2 usage, parse or
//! computation error, 3 special system detected, 4 invalid certificate.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::curve::{analyze, format_curve, format_point, parse_curve, parse_point, parse_point_annotations, Point};
use crate::field::{PrimeField, DEFAULT_PRIME};
use crate::oracle::{self, DEFAULT_TRIALS};
use crate::picard::{self, PicClass};
use crate::planner::{
    self, bound_conjectural, bound_d_prime_explicit, bound_theorem2, default_thresholds, is_conjectural_exception,
    plan_theorem2, verify_certificate, PlanConfig, ThresholdTable,
};
use crate::scheme::{CurveDescriptor, PointKind, ZeroScheme};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SPECIAL: i32 = 3;
pub const EXIT_INVALID: i32 = 4;

const NOTATION: &str = "\
Notation:
  class   d;m1,m2,...   with runs m^k, e.g. 6;2^9 or 20;2^45,1^95
  scheme  comma-separated point conditions, runs allowed:
            m        free point of multiplicity m   (2^9)
            C:m      point of multiplicity m on the reference curve
            C:D(m,i) the residual scheme D^i(P^m) on the curve
            C:Tm     multiplicity m with a branch tangent to the curve";

#[derive(Parser, Debug)]
#[command(name = "horace", version, about = "Linear systems of plane curves with fat points", after_help = NOTATION)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args, Debug, Clone)]
struct OracleArgs {
    /// Prime modulus of the working field.
    #[arg(long, default_value_t = DEFAULT_PRIME)]
    prime: u64,
    /// Independent random geometries.
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: u32,
    /// Seed; a random one is drawn and printed when omitted.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Euler characteristic, genus, expected dimension and self-intersection.
    Chi { class: String },
    /// Dimension of degree-d forms through a scheme, by rank computation.
    Dim {
        d: i64,
        scheme: String,
        #[command(flatten)]
        oracle: OracleArgs,
        /// Degree of the random reference curve.
        #[arg(long)]
        curve_degree: Option<u32>,
        /// Write one member of the system, with its points, to this file.
        #[arg(long)]
        curve_out: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a regularity certificate for a class.
    Plan {
        #[arg(long)]
        class: String,
        /// Multiplicity bound; defaults to the largest multiplicity.
        #[arg(long)]
        m: Option<u32>,
        /// Replace axiom leaves by oracle rank reports.
        #[arg(long)]
        oracle_backed: bool,
        /// Threshold table (JSON); defaults to $HORACE_CONFIG.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        oracle: OracleArgs,
        #[arg(long)]
        curve_degree: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a certificate.
    Verify { file: PathBuf },
    /// Multiplicities, ordinariness, extra singularities and components of a curve.
    Analyze {
        #[arg(long)]
        curve: PathBuf,
        /// Points as x:y:z@m separated by ';'. Defaults to the file's annotations.
        #[arg(long)]
        points: Option<String>,
        #[arg(long, default_value_t = DEFAULT_PRIME)]
        prime: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Degree bounds.
    Bounds {
        #[arg(long)]
        m: u32,
        /// Three largest multiplicities, for the conjectural bound.
        #[arg(long, value_delimiter = ',')]
        mults: Option<Vec<u32>>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Classify a scheme as configuration / candidate.
    Candidate {
        d: i64,
        scheme: String,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        a: u32,
    },
}

struct Failure(i32, String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(EXIT_USAGE, e.to_string())
    }
}

fn emit(out: &mut dyn Write, path: Option<&Path>, v: &impl Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(v)?;
    match path {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => writeln!(out, "{text}")?,
    }
    Ok(())
}

fn seed_or_random(seed: Option<u64>, err: &mut dyn Write) -> u64 {
    let s = seed.unwrap_or_else(rand::random);
    let _ = writeln!(err, "seed: {s}");
    s
}

fn thresholds(path: Option<&Path>) -> Result<ThresholdTable, Failure> {
    Ok(match path {
        Some(p) => ThresholdTable::load(p)?,
        None => default_thresholds()?,
    })
}

/// Runs the CLI; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.cmd, out, err) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn dispatch(cmd: Cmd, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Cmd::Chi { class } => {
            let c: PicClass = class.parse()?;
            let v = json!({
                "class": c.to_string(),
                "chi": picard::chi(&c)?,
                "genus": picard::genus(&c)?,
                "expected_dim": picard::expected_dim(&c)?,
                "self_intersection": picard::intersect(&c, &c)?,
            });
            emit(out, None, &v)?;
            Ok(EXIT_OK)
        }
        Cmd::Dim {
            d,
            scheme,
            oracle: o,
            curve_degree,
            curve_out,
            out: path,
        } => {
            let z = ZeroScheme::parse(&scheme, curve_degree.map(CurveDescriptor::Generic))?;
            let field = PrimeField::new(o.prime)?;
            let seed = seed_or_random(o.seed, err);
            let report = oracle::h0(&z, d, curve_degree, field, o.trials, seed)?;
            emit(out, path.as_deref(), &report)?;
            if let Some(p) = curve_out {
                write_member(&z, d, curve_degree, field, seed, &p)?;
            }
            let verdict = if report.regular { "regular" } else { "special" };
            let _ = writeln!(err, "h0 = {}, chi = {}, {verdict}", report.h0, report.chi);
            Ok(if report.regular { EXIT_OK } else { EXIT_SPECIAL })
        }
        Cmd::Plan {
            class,
            m,
            oracle_backed,
            config,
            oracle: o,
            curve_degree,
            out: path,
        } => {
            let c: PicClass = class.parse()?;
            let m = m.unwrap_or(c.max_mult().max(1) as u32);
            let table = thresholds(config.as_deref())?;
            let mut cfg = if oracle_backed {
                PlanConfig::oracle(m, table, seed_or_random(o.seed, err))
            } else {
                PlanConfig::axiom(m, table)
            };
            cfg.prime = o.prime;
            cfg.trials = o.trials;
            cfg.curve_degree = curve_degree;
            let cert = plan_theorem2(&c, &cfg)?;
            emit(out, path.as_deref(), &cert)?;
            let _ = writeln!(
                err,
                "route {}, geometric {}{}",
                cert.claim.route,
                cert.claim.geometric,
                cert.claim.note.as_deref().map(|n| format!(" ({n})")).unwrap_or_default()
            );
            Ok(EXIT_OK)
        }
        Cmd::Verify { file } => {
            let text = std::fs::read_to_string(&file)?;
            let v: Value = match serde_json::from_str(&text) {
                Ok(v) => v,
                Err(e) => return Err(Failure(EXIT_INVALID, format!("not JSON: {e}"))),
            };
            let report = verify_certificate(&v).map_err(|e| Failure(EXIT_INVALID, e.to_string()))?;
            emit(out, None, &report)?;
            let _ = writeln!(err, "{}", if report.valid { "valid" } else { "invalid" });
            Ok(if report.valid { EXIT_OK } else { EXIT_INVALID })
        }
        Cmd::Analyze {
            curve,
            points,
            prime,
            out: path,
        } => {
            let field = PrimeField::new(prime)?;
            let text = std::fs::read_to_string(&curve)?;
            let f = parse_curve(&text, field)?;
            let pts = match points {
                Some(s) => parse_points_arg(&s, field)?,
                None => parse_point_annotations(&text, field)?,
            };
            let report = analyze(&f, &pts)?;
            emit(out, path.as_deref(), &report)?;
            Ok(EXIT_OK)
        }
        Cmd::Bounds { m, mults, config } => {
            if m == 0 {
                return Err(Failure(EXIT_USAGE, "m must be at least 1".into()));
            }
            let mut v = json!({
                "m": m,
                "explicit": explicit_json(m),
            });
            let table = thresholds(config.as_deref())?;
            if let Some(a_cfg) = table.a_cfg(m) {
                let a = planner::a_prime(a_cfg, m);
                v["a"] = a.into();
                if let Some(d0) = table.d0(a, m) {
                    v["theorem2"] = bound_theorem2(a, d0, m).into();
                }
            }
            match mults.as_deref() {
                Some(&[m1, m2, m3]) => {
                    let mut s = [m1, m2, m3];
                    s.sort_unstable_by(|x, y| y.cmp(x));
                    v["conjectural"] = bound_conjectural(s[0], s[1], s[2]).into();
                    let n = s[0] as i64;
                    let candidate = PicClass::uniform(3 * n, n, 9);
                    if s[1] == s[0] && s[2] == s[0] && is_conjectural_exception(&candidate) {
                        v["exception"] = candidate.to_string().into();
                    }
                }
                Some(_) => return Err(Failure(EXIT_USAGE, "--mults takes exactly three values".into())),
                None => {
                    let _ = writeln!(err, "conjectural bound requires --mults m1,m2,m3");
                }
            }
            emit(out, None, &v)?;
            Ok(EXIT_OK)
        }
        Cmd::Candidate { d, scheme, m, a } => {
            let z = ZeroScheme::parse(&scheme, Some(CurveDescriptor::Generic(a)))?;
            let verdict = planner::classify_candidate(&z, d, m, a)?;
            let v = json!({
                "scheme": z.to_string(),
                "d": d,
                "verdict": verdict.kind,
                "checks": verdict.reasons,
            });
            emit(out, None, &v)?;
            Ok(EXIT_OK)
        }
    }
}

fn explicit_json(m: u32) -> Value {
    let b = bound_d_prime_explicit(m);
    match u64::try_from(&b) {
        Ok(v) => crate::json::int_value(v as i128),
        Err(_) => Value::String(b.to_string()),
    }
}

fn parse_points_arg(s: &str, field: PrimeField) -> Result<Vec<(Point, u32)>, Failure> {
    s.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let (p, m) = t
                .split_once('@')
                .ok_or_else(|| Failure(EXIT_USAGE, format!("expected x:y:z@m, got '{t}'")))?;
            let m: u32 = m.trim().parse().map_err(|_| Failure(EXIT_USAGE, format!("bad multiplicity '{m}'")))?;
            Ok((parse_point(p.trim(), field)?, m))
        })
        .collect()
}

/// Writes the first basis element at the trial-0 geometry, annotated with
/// the fat points it passes through.
fn write_member(
    z: &ZeroScheme,
    d: i64,
    curve_degree: Option<u32>,
    field: PrimeField,
    seed: u64,
    path: &Path,
) -> Result<(), Failure> {
    let geom = oracle::sample_geometry(z, curve_degree, field, seed)?;
    let basis = oracle::extract_basis(z, d, &geom)?;
    let Some(f) = basis.first() else {
        return Err(Failure(EXIT_USAGE, "the system is empty; no curve to write".into()));
    };
    let mut text = format!("# degree {d} member of L({d}; {z})\n");
    for c in z.conditions() {
        let m = match c.kind {
            PointKind::FreeFat(m) | PointKind::CurveFat(m) => m,
            PointKind::CurveResidue { m, .. } => m - 1,
        };
        if let Some(p) = geom.placements.get(&c.id.0) {
            text.push_str(&format!("# point {} mult {m}\n", format_point(p)));
        }
    }
    text.push_str(&format_curve(f));
    std::fs::write(path, text)?;
    Ok(())
}
