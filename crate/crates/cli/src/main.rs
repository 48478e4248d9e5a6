//! qslope: exact Newton polygons, factorizations, filtrations and formal
//! solutions for linear q-difference operators.

mod parser;
mod report;

use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qslope_core::{
    factor, filtration, newton, qmodule, qsolve, Ctx, Error, Mode, OrePoly, QContext, Scalar,
};

#[derive(Parser, Debug)]
#[command(
    name = "qslope",
    about = "Exact q-difference slope toolkit: Newton polygons, factorizations, filtrations, formal solutions",
    after_help = "Operators use tokens: rational literals, z, q, s (= σ), + - * ^ ( ).\n\
                  Example: qslope newton \"q*z*s^2 - (1+z)*s + 1\""
)]
struct Cli {
    /// q as a plain integer base (sets qbase = Q, qpow = 1)
    #[arg(long, global = true)]
    q: Option<i64>,
    /// Base ρ with q = ρ^qpow
    #[arg(long, global = true)]
    qbase: Option<i64>,
    /// Exponent L with q = qbase^L (ramification budget)
    #[arg(long, global = true)]
    qpow: Option<u32>,
    /// Working z-adic precision (env QSLOPE_PREC overrides the default)
    #[arg(long, global = true)]
    prec: Option<i64>,
    /// formal or convergent
    #[arg(long, global = true, value_enum, default_value_t = CliMode::Convergent)]
    mode: CliMode,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    out: Output,
    /// Ramification level applied to the operator before the command
    #[arg(long, global = true)]
    ramify: Option<u32>,
    /// Process each line of a file as a separate operator (in parallel)
    #[arg(long, global = true)]
    batch: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CliMode {
    Formal,
    Convergent,
}

impl From<CliMode> for Mode {
    fn from(m: CliMode) -> Mode {
        match m {
            CliMode::Formal => Mode::Formal,
            CliMode::Convergent => Mode::Convergent,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Text,
    Svg,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Newton function (slopes with multiplicities) of an operator
    Newton { expr: Option<String> },
    /// Characteristic equation at an integer slope
    Charq {
        expr: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        slope: i64,
    },
    /// Factor the given slope to the right (default: the first slope)
    Factor {
        expr: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        slope: Option<i64>,
    },
    /// Birkhoff-Guenther factorization into pure factors
    Bg { expr: Option<String> },
    /// Canonical filtration by slopes
    Filtrate { expr: Option<String> },
    /// Associated graded module
    Gr { expr: Option<String> },
    /// Formal solution basis in the symbol algebra
    Solve { expr: Option<String> },
    /// Convergent solutions attached to the first slope
    Adams { expr: Option<String> },
    /// Newton function of the tensor product of two operators' modules
    Tensor { expr1: String, expr2: String },
    /// Dual operator and its Newton function
    Dual { expr: Option<String> },
    /// q-Wronskian of the formal solution basis
    Wronskian { expr: Option<String> },
}

struct Config {
    ctx: Ctx,
    prec: i64,
    mode: Mode,
    out: Output,
    ramify: Option<u32>,
}

fn build_ctx(cli: &Cli) -> Result<(Ctx, i64), Error> {
    let prec = cli
        .prec
        .or_else(|| {
            std::env::var("QSLOPE_PREC")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(32);
    if prec < 4 {
        return Err(Error::PreconditionViolated(
            "prec must be at least 4".into(),
        ));
    }
    let ctx = match (cli.q, cli.qbase, cli.qpow) {
        (Some(q), None, None) => QContext::new(Scalar::from_int(q), 1, prec)?,
        (None, Some(b), Some(l)) => QContext::new(Scalar::from_int(b), l, prec)?,
        (None, Some(b), None) => QContext::new(Scalar::from_int(b), 12, prec)?,
        (None, None, Some(l)) => QContext::new(Scalar::from_int(2), l, prec)?,
        (None, None, None) => QContext::new(Scalar::from_int(2), 12, prec)?,
        _ => {
            return Err(Error::PreconditionViolated(
                "--q conflicts with --qbase/--qpow".into(),
            ))
        }
    };
    Ok((ctx, prec))
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Parse { .. } => 2,
        Error::InsufficientPrecision { .. }
        | Error::PrecisionInsufficientForRank
        | Error::InsufficientData { .. } => 3,
        Error::IrrationalExponent(_) | Error::ExactRootUnavailable { .. } => 4,
        Error::DivergentDirection(_) | Error::NotFirstSlope { .. } => 5,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (ctx, prec) = match build_ctx(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code_for(&e));
        }
    };
    let cfg = Config {
        ctx,
        prec,
        mode: cli.mode.into(),
        out: cli.out,
        ramify: cli.ramify,
    };

    if let Some(batch) = &cli.batch {
        return run_batch(&cfg, &cli.command, batch);
    }
    match run_command(&cfg, &cli.command, None) {
        Ok(rendered) => {
            println!("{rendered}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

/// Batch mode: one operator expression per line, processed in parallel,
/// results printed in input order.
fn run_batch(cfg: &Config, cmd: &Command, path: &str) -> ExitCode {
    let mut content = String::new();
    let read = if path == "-" {
        std::io::stdin().read_to_string(&mut content).map(|_| ())
    } else {
        std::fs::File::open(path).and_then(|mut f| f.read_to_string(&mut content).map(|_| ()))
    };
    if let Err(e) = read {
        eprintln!("error: cannot read batch file {path}: {e}");
        return ExitCode::from(1);
    }
    let lines: Vec<&str> = content
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let results: Vec<Result<String, Error>> = std::thread::scope(|scope| {
        let handles: Vec<_> = lines
            .iter()
            .map(|line| scope.spawn(move || run_command(cfg, cmd, Some(line))))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut worst = 0u8;
    for (line, res) in lines.iter().zip(results) {
        match res {
            Ok(rendered) => println!("{rendered}"),
            Err(e) => {
                println!(
                    "{}",
                    json!({ "input": line, "error": e.to_string() })
                );
                worst = worst.max(exit_code_for(&e));
            }
        }
    }
    ExitCode::from(worst)
}

fn parse_input(cfg: &Config, expr: &str) -> Result<OrePoly, Error> {
    let p = parser::parse_operator(&cfg.ctx, cfg.prec, expr)?;
    match cfg.ramify {
        Some(l) => p.ramify(l),
        None => Ok(p),
    }
}

fn expr_of<'a>(stored: &'a Option<String>, over: Option<&'a str>) -> Result<&'a str, Error> {
    over.or(stored.as_deref()).ok_or(Error::Parse {
        offset: 0,
        msg: "missing operator expression (positional argument or --batch line)".into(),
    })
}

fn run_command(cfg: &Config, cmd: &Command, batch_line: Option<&str>) -> Result<String, Error> {
    match cmd {
        Command::Newton { expr } => {
            let p = parse_input(cfg, expr_of(expr, batch_line)?)?;
            let nf = newton::newton_function(&p)?;
            Ok(match cfg.out {
                Output::Json => report::newton_json(&nf).to_string(),
                Output::Text => report::newton_text(&nf),
                Output::Svg => report::newton_svg(&nf),
            })
        }
        Command::Charq { expr, slope } => {
            let p = parse_input(cfg, expr_of(expr, batch_line)?)?;
            let ch = newton::char_equation(&p, *slope)?;
            Ok(match cfg.out {
                Output::Text => format!("slope {}: {}", ch.slope, ch.poly),
                _ => report::char_json(ch.slope, &ch.poly).to_string(),
            })
        }
        Command::Factor { expr, slope } => {
            let p = parse_input(cfg, expr_of(expr, batch_line)?)?;
            let mu = match slope {
                Some(m) => *m,
                None => {
                    let nf = newton::newton_function(&p)?;
                    let first = nf.first_slope().ok_or(Error::ZeroOperator)?;
                    if !first.is_integer() {
                        return Err(Error::PreconditionViolated(format!(
                            "non-integral first slope {first}: ramify first"
                        )));
                    }
                    *first.numer()
                }
            };
            let fac = factor::factor_slope(&p, mu, cfg.mode)?;
            let factors: Vec<Value> = fac
                .steps
                .iter()
                .map(|t| json!(report::op_string(&t.base_operator())))
                .collect();
            let twists: Vec<Value> = fac
                .steps
                .iter()
                .map(|t| json!(format!("{}", t.twist)))
                .collect();
            let v = json!({
                "slope": mu,
                "left": report::op_string(&fac.left),
                "factors": factors,
                "twists": twists,
            });
            Ok(render_json(cfg, v))
        }
        Command::Bg { expr } => {
            let p = parse_input(cfg, expr_of(expr, batch_line)?)?;
            let bg = factor::birkhoff_guenther(&p, cfg.mode)?;
            let factors: Vec<Value> = bg
                .blocks
                .iter()
                .map(|b| json!(report::op_string(&b.op)))
                .collect();
            let slopes: Vec<Value> = bg.blocks.iter().map(|b| json!(b.slope)).collect();
            let v = json!({
                "factors": factors,
                "slopes": slopes,
                "residual": report::op_string(&bg.residual),
            });
            Ok(render_json(cfg, v))
        }
        Command::Filtrate { expr } => {
            let p = parse_input(cfg, expr_of(expr, batch_line)?)?;
            let filt = filtration::canonical_filtration(&p, cfg.mode)?;
            let split = match filtration::splitness_report(&p)? {
                filtration::SplitEvidence::Split => "split",
                filtration::SplitEvidence::NonSplit => "non-split",
                filtration::SplitEvidence::Pure => "pure",
            };
            let quotients: Vec<Value> = filt
                .quotient_ops
                .iter()
                .map(|op| json!(report::op_string(op)))
                .collect();
            let v = json!({
                "filtration": {
                    "breaks": filt.breaks,
                    "ranks": filt.ranks(),
                    "quotients": quotients,
                },
                "split_evidence": split,
            });
            Ok(render_json(cfg, v))
        }
        Command::Gr { expr } => {
            let p = parse_input(cfg, expr_of(expr, batch_line)?)?;
            let gr = filtration::graded(&p, cfg.mode)?;
            let parts: Vec<Value> = gr
                .parts
                .iter()
                .rev()
                .map(|(mu, op)| json!([mu, report::op_string(op)]))
                .collect();
            let hs = filtration::HilbertSamuel::from_newton(&gr.newton()?);
            let v = json!({
                "graded": parts,
                "hilbert_samuel": hs.to_string(),
            });
            Ok(render_json(cfg, v))
        }
        Command::Solve { expr } => {
            let p = parse_input(cfg, expr_of(expr, batch_line)?)?;
            let basis = qsolve::formal_basis(&p)?;
            let solutions: Vec<Value> = basis
                .solutions
                .iter()
                .map(report::solution_json)
                .collect();
            Ok(render_json(cfg, json!({ "solutions": solutions })))
        }
        Command::Adams { expr } => {
            let p = parse_input(cfg, expr_of(expr, batch_line)?)?;
            let basis = qsolve::adams_solutions(&p)?;
            let solutions: Vec<Value> = basis
                .solutions
                .iter()
                .map(report::solution_json)
                .collect();
            Ok(render_json(cfg, json!({ "solutions": solutions })))
        }
        Command::Tensor { expr1, expr2 } => {
            let p1 = parse_input(cfg, expr1)?;
            let p2 = parse_input(cfg, expr2)?;
            let m1 = qmodule::from_operator(&p1)?;
            let m2 = qmodule::from_operator(&p2)?;
            let t = qmodule::tensor(&m1, &m2)?;
            let nf = qmodule::newton_module(&t)?;
            Ok(match cfg.out {
                Output::Text => report::newton_text(&nf),
                _ => report::newton_json(&nf).to_string(),
            })
        }
        Command::Dual { expr } => {
            let p = parse_input(cfg, expr_of(expr, batch_line)?)?;
            let pd = qmodule::dual_operator(&p)?;
            let nf = newton::newton_function(&pd)?;
            let v = json!({
                "dual": report::op_string(&pd),
                "slopes": report::newton_json(&nf)["slopes"],
            });
            Ok(render_json(cfg, v))
        }
        Command::Wronskian { expr } => {
            let p = parse_input(cfg, expr_of(expr, batch_line)?)?;
            let basis = qsolve::formal_basis(&p)?;
            let w = qsolve::q_wronskian(&basis.solutions)?;
            let v = json!({
                "wronskian": report::solution_json(&w),
                "nonzero": !w.is_zero_to_prec(),
            });
            Ok(render_json(cfg, v))
        }
    }
}

fn render_json(cfg: &Config, v: Value) -> String {
    match cfg.out {
        Output::Text => serde_json::to_string_pretty(&v).expect("serializable"),
        _ => v.to_string(),
    }
}
