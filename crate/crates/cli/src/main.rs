use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qfin::guess::{certify, AnsatzSpec, CertifyReport, SequenceSource};
use qfin::identities::{arrf3_sides, verify_identity, Difference, IdentityId, SideBuilder, VerificationReport};
use qfin::series::{jtp_check, limit_check, LimitOutcome};
use qfin::LaurentPolynomial;

/// Largest `--max-n` accepted by `verify`.
const MAX_N_CAP: u32 = 200;
/// Above this `verify` warns about the runtime of the quadruple sum.
const MAX_N_WARN: u32 = 60;

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "qfin", version, about = "Exact verification of finite two-variable Rogers-Ramanujan type identities")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, env = "QFIN_FORMAT", default_value = "text")]
    format: Format,

    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Side {
    Lhs,
    Rhs,
    /// Bilateral main sum of the right side, without the boundary correction.
    RhsMain,
    Epsilon,
}

impl Side {
    fn name(self) -> &'static str {
        match self {
            Side::Lhs => "lhs",
            Side::Rhs => "rhs",
            Side::RhsMain => "rhs_main",
            Side::Epsilon => "epsilon",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Check {
    Jtp,
    Limit,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print one side of an identity at a given n.
    Compute {
        #[arg(long, value_parser = parse_identity)]
        identity: IdentityId,
        #[arg(long, value_enum)]
        side: Side,
        #[arg(long)]
        n: u32,
    },
    /// Check sides, initial conditions and recurrences for 0 <= n <= max-n.
    Verify {
        /// An identity name or `all`.
        #[arg(long, default_value = "all")]
        identity: String,
        #[arg(long, default_value_t = 40)]
        max_n: u32,
    },
    /// Truncated-series checks.
    Series {
        #[arg(long, value_parser = parse_identity)]
        identity: IdentityId,
        /// Truncation order for the triple-product check.
        #[arg(long, default_value_t = 30)]
        order: u32,
        #[arg(long, value_enum)]
        check: Check,
        /// Index of P_n for the limit check; defaults to the order.
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, default_value_t = 0)]
        margin: u32,
    },
    /// Guess a recurrence on a fit range and check it on a holdout range.
    Guess {
        #[arg(long, value_parser = parse_identity)]
        identity: IdentityId,
        #[arg(long)]
        order: usize,
        /// q-exponents range over -q-deg..=q-deg unless --q-min is given.
        #[arg(long = "q-deg")]
        q_deg: i64,
        #[arg(long = "q-min", allow_hyphen_values = true)]
        q_min: Option<i64>,
        /// Largest exponent of Q = q^n.
        #[arg(long = "Q-deg", default_value_t = 2)]
        big_q_deg: u32,
        /// Allowed z-exponents.
        #[arg(long = "z-exps", value_delimiter = ',', allow_hyphen_values = true, default_value = "-1,0,1")]
        z_exps: Vec<i64>,
        #[arg(long, value_parser = parse_range)]
        fit: (usize, usize),
        #[arg(long, value_parser = parse_range)]
        holdout: (usize, usize),
        #[arg(long, value_enum, default_value = "lhs")]
        source: Source,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Source {
    Lhs,
    Rhs,
}

fn parse_identity(s: &str) -> Result<IdentityId, String> {
    s.parse::<IdentityId>().map_err(|e| e.to_string())
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected a:b, got `{s}`"))?;
    let a: usize = a.trim().parse().map_err(|e| format!("bad range start `{a}`: {e}"))?;
    let b: usize = b.trim().parse().map_err(|e| format!("bad range end `{b}`: {e}"))?;
    if a > b {
        return Err(format!("empty range {a}:{b}"));
    }
    Ok((a, b))
}

/// Outcome of a command: exit status plus whether anything mismatched.
enum Status {
    Pass,
    Mismatch,
}

struct Usage(String);

impl From<qfin::Error> for Usage {
    fn from(e: qfin::Error) -> Self {
        Usage(e.to_string())
    }
}

impl From<io::Error> for Usage {
    fn from(e: io::Error) -> Self {
        Usage(format!("output error: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let sink: Box<dyn Write> = match &cli.output {
        Some(path) => match File::create(path) {
            Ok(f) => Box::new(f),
            Err(e) => {
                eprintln!("error: cannot create {}: {e}", path.display());
                return ExitCode::from(EXIT_USAGE);
            }
        },
        None => Box::new(io::stdout().lock()),
    };
    let mut out = BufWriter::new(sink);
    let result = run(&cli, &mut out);
    let flushed = out.flush();
    match (result, flushed) {
        (Ok(Status::Pass), Ok(())) => ExitCode::SUCCESS,
        (Ok(Status::Mismatch), Ok(())) => ExitCode::from(EXIT_MISMATCH),
        (Err(Usage(msg)), _) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        (_, Err(e)) => {
            eprintln!("error: output error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(cli: &Cli, out: &mut impl Write) -> Result<Status, Usage> {
    match &cli.command {
        Command::Compute { identity, side, n } => {
            let poly = compute(*identity, *side, *n)?;
            write_polynomial(out, cli.format, *identity, *n, side.name(), &poly)?;
            Ok(Status::Pass)
        }
        Command::Verify { identity, max_n } => verify(out, cli.format, identity, *max_n),
        Command::Series {
            identity,
            order,
            check,
            n,
            margin,
        } => series(out, cli.format, *identity, *order, *check, n.unwrap_or(*order), *margin),
        Command::Guess {
            identity,
            order,
            q_deg,
            q_min,
            big_q_deg,
            z_exps,
            fit,
            holdout,
            source,
        } => {
            let ansatz = AnsatzSpec::new(*order, *big_q_deg, (q_min.unwrap_or(-q_deg), *q_deg), z_exps.iter().copied())?;
            let source = match source {
                Source::Lhs => SequenceSource::Lhs,
                Source::Rhs => SequenceSource::Rhs,
            };
            let report = certify(*identity, source, &ansatz, fit.0..=fit.1, holdout.0..=holdout.1)?;
            write_certify(out, cli.format, &report)?;
            Ok(if report.has_survivor() { Status::Pass } else { Status::Mismatch })
        }
    }
}

fn compute(id: IdentityId, side: Side, n: u32) -> Result<LaurentPolynomial, Usage> {
    if id == IdentityId::Arrf3 {
        let (l, r) = arrf3_sides(n);
        return match side {
            Side::Lhs => Ok(l),
            Side::Rhs => Ok(r),
            _ => Err(Usage(format!("{id} has no `{}` side", side.name()))),
        };
    }
    if !id.is_finite_identity() {
        return Err(Usage(format!("{id} sides are rational functions; use `verify`")));
    }
    let mut b = SideBuilder::new(id)?;
    Ok(match side {
        Side::Lhs => b.lhs(n),
        Side::Rhs => b.rhs(n),
        Side::RhsMain => b.rhs_main(n),
        Side::Epsilon => b.epsilon(n),
    })
}

fn write_polynomial(
    out: &mut impl Write,
    format: Format,
    id: IdentityId,
    n: u32,
    side: &str,
    poly: &LaurentPolynomial,
) -> io::Result<()> {
    match format {
        Format::Text => writeln!(out, "{poly}"),
        Format::Json => {
            let v = serde_json::json!({ "identity": id, "n": n, "side": side, "terms": poly });
            writeln!(out, "{v}")
        }
        Format::Csv => {
            writeln!(out, "identity,n,side,z_exp,q_exp,coeff")?;
            for (e, c) in poly.terms() {
                writeln!(out, "{id},{n},{side},{},{},{c}", e.z(), e.q())?;
            }
            Ok(())
        }
    }
}

fn verify(out: &mut impl Write, format: Format, identity: &str, max_n: u32) -> Result<Status, Usage> {
    let ids: Vec<IdentityId> = if identity.eq_ignore_ascii_case("all") {
        IdentityId::ALL.to_vec()
    } else {
        vec![identity.parse::<IdentityId>()?]
    };
    if max_n > MAX_N_CAP {
        return Err(Usage(format!("--max-n {max_n} exceeds the cap of {MAX_N_CAP}")));
    }
    if max_n > MAX_N_WARN {
        eprintln!("warning: --max-n {max_n} above {MAX_N_WARN}; the R2 quadruple sum may take a long time");
    }
    let mut reports = Vec::new();
    for id in ids {
        reports.push(verify_identity(id, max_n)?);
    }
    write_reports(out, format, &reports)?;
    Ok(if reports.iter().all(VerificationReport::passed) { Status::Pass } else { Status::Mismatch })
}

fn difference_text(d: &Difference) -> String {
    match d {
        Difference::Polynomial(p) => p.to_string(),
        Difference::Rational { point, value } => format!("{value} at (z, q) = ({}, {})", point.0, point.1),
    }
}

fn write_reports(out: &mut impl Write, format: Format, reports: &[VerificationReport]) -> io::Result<()> {
    match format {
        Format::Text => {
            for r in reports {
                let (lo, hi) = r.n_checked;
                match &r.first_failure {
                    None => writeln!(out, "{}: pass (n = {lo}..{hi})", r.identity)?,
                    Some(f) => writeln!(
                        out,
                        "{}: FAIL at n = {} ({:?}); difference: {}",
                        r.identity,
                        f.n,
                        f.kind,
                        difference_text(&f.difference)
                    )?,
                }
                for p in &r.rejected_points {
                    writeln!(out, "  rejected point ({}, {}) at n = {}: {}", p.point.0, p.point.1, p.n, p.reason)?;
                }
            }
            Ok(())
        }
        Format::Json => {
            for r in reports {
                writeln!(out, "{}", serde_json::to_string(r).expect("report serializes"))?;
            }
            Ok(())
        }
        Format::Csv => {
            writeln!(out, "identity,n_min,n_max,status,first_failure_n,kind,difference")?;
            for r in reports {
                let (lo, hi) = r.n_checked;
                let status = if r.passed() { "pass" } else { "fail" };
                match &r.first_failure {
                    None => writeln!(out, "{},{lo},{hi},{status},,,", r.identity)?,
                    Some(f) => writeln!(
                        out,
                        "{},{lo},{hi},{status},{},{:?},\"{}\"",
                        r.identity,
                        f.n,
                        f.kind,
                        difference_text(&f.difference)
                    )?,
                }
            }
            Ok(())
        }
    }
}

fn series(
    out: &mut impl Write,
    format: Format,
    id: IdentityId,
    order: u32,
    check: Check,
    n: u32,
    margin: u32,
) -> Result<Status, Usage> {
    let (status, fields): (Status, Vec<(&str, String)>) = match check {
        Check::Jtp => {
            let ok = jtp_check(id, order)?;
            let status = if ok { Status::Pass } else { Status::Mismatch };
            (status, vec![("check", "jtp".into()), ("order", order.to_string()), ("result", if ok { "pass" } else { "fail" }.into())])
        }
        Check::Limit => {
            let outcome = limit_check(id, n, margin)?;
            let mut fields = vec![("check", "limit".to_string()), ("n", n.to_string()), ("margin", margin.to_string())];
            let status = match &outcome {
                LimitOutcome::Pass { order } => {
                    fields.push(("result", "pass".into()));
                    fields.push(("achieved_order", order.to_string()));
                    Status::Pass
                }
                LimitOutcome::Fail { order, difference } => {
                    fields.push(("result", "fail".into()));
                    fields.push(("achieved_order", order.to_string()));
                    fields.push(("difference", difference.to_string()));
                    Status::Mismatch
                }
                LimitOutcome::Inconclusive { stabilization, .. } => {
                    fields.push(("result", "inconclusive".into()));
                    fields.push(("stabilization", stabilization.to_string()));
                    Status::Mismatch
                }
            };
            (status, fields)
        }
    };
    match format {
        Format::Text => {
            let body: Vec<String> = fields.iter().map(|(k, v)| format!("{k}={v}")).collect();
            writeln!(out, "{id}: {}", body.join(" "))?;
        }
        Format::Json => {
            let mut map = serde_json::Map::new();
            map.insert("identity".into(), serde_json::json!(id));
            for (k, v) in &fields {
                map.insert((*k).into(), serde_json::Value::String(v.clone()));
            }
            writeln!(out, "{}", serde_json::Value::Object(map))?;
        }
        Format::Csv => {
            let keys: Vec<&str> = fields.iter().map(|(k, _)| *k).collect();
            let vals: Vec<String> = fields.iter().map(|(_, v)| format!("\"{v}\"")).collect();
            writeln!(out, "identity,{}", keys.join(","))?;
            writeln!(out, "{id},{}", vals.join(","))?;
        }
    }
    Ok(status)
}

fn write_certify(out: &mut impl Write, format: Format, r: &CertifyReport) -> io::Result<()> {
    match format {
        Format::Text => {
            writeln!(
                out,
                "{}: fit {}..{}, holdout {}..{}, nullspace dimension {}, {} survivor(s), known recurrence in span: {}",
                r.identity,
                r.fit.0,
                r.fit.1,
                r.holdout.0,
                r.holdout.1,
                r.nullspace_dimension,
                r.survivors.len(),
                r.contains_known
            )?;
            for (k, c) in r.survivors.iter().enumerate() {
                writeln!(out, "survivor {k}:")?;
                write!(out, "{c}")?;
            }
            for (k, n) in &r.rejected {
                writeln!(out, "candidate {k} fails at n = {n}")?;
            }
            Ok(())
        }
        Format::Json => writeln!(out, "{}", serde_json::to_string(r).expect("report serializes")),
        Format::Csv => {
            writeln!(out, "identity,survivor,lag,coefficient")?;
            for (k, c) in r.survivors.iter().enumerate() {
                for (i, coeff) in c.coefficients().iter().enumerate() {
                    writeln!(out, "{},{k},{i},\"{coeff}\"", r.identity)?;
                }
            }
            Ok(())
        }
    }
}
