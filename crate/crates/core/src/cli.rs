//! The `ffc` command line. Exit codes: 0 success, 1 failed verdict, 2 usage
//! or input error, 3 budget exceeded.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::convolution::{asym_convolve, m_fold_asym, m_fold_sym, sym_convolve};
use crate::error::{Error, Result};
use crate::graph::{self, certify, Mode, Verdict};
use crate::instances;
use crate::io::{self, GraphOrCertificate, PolyDoc, RunManifest};
use crate::poly::RatPoly;
use crate::quadrature::{self, DEFAULT_DET_BUDGET};
use crate::rational::{decimal15, format_rat, to_f64};
use crate::rng::StreamRng;
use crate::search::{self, Strategy};
use crate::sturm;
use crate::transforms::{self, ConvolutionKind};
use crate::perm::DEFAULT_SWAP_BUDGET;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERDICT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "ffc", version, about = "Finite free convolutions and certified Ramanujan multigraphs")]
struct Cli {
    /// Write a run manifest (command, seed, budgets, output digests) here.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum KindArg {
    Sym,
    Asym,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ModeArg {
    Bipartite,
    #[value(alias = "nonbipartite")]
    Plain,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Bipartite => Mode::Bipartite,
            ModeArg::Plain => Mode::Nonbipartite,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Tsv,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum StrategyArg {
    Exact,
    Sampled,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Convolve two polynomials, or fold one polynomial m times.
    Convolve {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        p: PathBuf,
        q: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact expected characteristic polynomial of the random graph model.
    Expected {
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Vertices per side (bipartite) or in total (plain).
        #[arg(long)]
        d: usize,
        #[arg(long)]
        m: usize,
    },
    /// Run identity checks on random instances.
    Verify {
        #[command(subcommand)]
        check: VerifyCommand,
    },
    /// Print 2*sqrt(m-1) exactly and in decimal.
    Bound {
        #[arg(long)]
        m: usize,
    },
    /// Largest roots of m-fold convolved matching polynomials against the bound.
    Table {
        /// Degrees: `3..8`, `3,5,7` or `4..24:2`.
        #[arg(long)]
        m: String,
        #[arg(long)]
        d: String,
        #[arg(long, value_enum)]
        mode: KindArg,
        #[arg(long, value_enum, default_value = "tsv")]
        format: FormatArg,
    },
    /// Sample a union of random perfect matchings.
    Sample {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify a graph file, or re-verify a certificate file.
    Certify {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rejection sampling with exact certification.
    Search {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 10_000)]
        max_trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also accept eigenvalues exactly at the bound.
        #[arg(long)]
        allow_boundary: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Greedy descent through swap outcomes.
    Descend {
        #[arg(long, value_enum, default_value = "bipartite")]
        mode: ModeArg,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value = "exact")]
        strategy: StrategyArg,
        /// Monte Carlo samples per branch in sampled mode.
        #[arg(long, default_value_t = 256)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyCommand {
    /// Enumeration average against the convolution formula.
    Quadrature {
        #[arg(long)]
        bipartite: bool,
        #[command(flatten)]
        common: VerifyArgs,
    },
    /// Fourier coefficients of the rotated determinant vanish beyond degree 2.
    Fourier {
        #[arg(long, default_value_t = 16)]
        samples: usize,
        #[command(flatten)]
        common: VerifyArgs,
    },
    /// Expected polynomials over random swaps are real-rooted.
    Swapreal {
        #[arg(long, default_value_t = 6)]
        swaps: usize,
        #[command(flatten)]
        common: VerifyArgs,
    },
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 10)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Parses `a..b`, `a..b:step` or a comma list.
fn parse_list(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::Parameter(format!("bad list {s:?}; use a..b, a..b:step or a,b,c"));
    if let Some((range, step)) = s.split_once(':') {
        let step: usize = step.parse().map_err(|_| bad())?;
        if step == 0 {
            return Err(bad());
        }
        return Ok(parse_list(range)?.into_iter().step_by(step).collect());
    }
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.parse().map_err(|_| bad())?;
        let b: usize = b.parse().map_err(|_| bad())?;
        return Ok((a..=b).collect());
    }
    s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect()
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Budget(_) => EXIT_BUDGET,
        _ => EXIT_USAGE,
    }
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("FFC_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| Error::Parameter(format!("FFC_THREADS must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return Err(Error::Parameter("FFC_THREADS must be positive".into()));
        }
        // A second initialization in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

struct Ctx {
    stdout: Vec<u8>,
    manifest: RunManifest,
}

impl Ctx {
    fn emit(&mut self, out: &Option<PathBuf>, text: &str) -> Result<()> {
        match out {
            Some(path) => {
                std::fs::write(path, text)?;
                self.manifest.record(path.display().to_string(), text.as_bytes());
            }
            None => self.stdout.extend_from_slice(text.as_bytes()),
        }
        Ok(())
    }

    fn line(&mut self, text: impl AsRef<str>) {
        self.stdout.extend_from_slice(text.as_ref().as_bytes());
        self.stdout.push(b'\n');
    }
}

fn read_poly(path: &Path) -> Result<RatPoly> {
    io::poly_from_json(&io::read_to_string(path)?)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn run_command(cmd: Command, ctx: &mut Ctx) -> Result<i32> {
    match cmd {
        Command::Convolve { kind, d, m, p, q, out } => {
            let p = read_poly(&p)?;
            let r = match (q, kind) {
                (Some(q), KindArg::Sym) => sym_convolve(&p, &read_poly(&q)?, d)?,
                (Some(q), KindArg::Asym) => asym_convolve(&p, &read_poly(&q)?, d)?,
                (None, KindArg::Sym) => m_fold_sym(&p, m, d)?,
                (None, KindArg::Asym) => m_fold_asym(&p, m, d)?,
            };
            ctx.emit(&out, &io::poly_to_json(&r))?;
            Ok(EXIT_OK)
        }
        Command::Expected { mode, d, m } => {
            let p = search::expected_poly_for_graph_model(mode.into(), d, m)?;
            let doc = json!({
                "mode": Mode::from(mode),
                "d": d,
                "m": m,
                "poly": PolyDoc::from_poly(&p),
                "display": p.to_string(),
                "real_rooted": sturm::is_real_rooted(&p)?,
            });
            ctx.line(serde_json::to_string_pretty(&doc)?);
            Ok(EXIT_OK)
        }
        Command::Verify { check } => run_verify(check, ctx),
        Command::Bound { m } => {
            let b = transforms::ramanujan_bound(m)?;
            ctx.line(b.to_string());
            ctx.line(decimal15(b.to_f64()));
            Ok(EXIT_OK)
        }
        Command::Table { m, d, mode, format } => {
            let kind = match mode {
                KindArg::Sym => ConvolutionKind::Sym,
                KindArg::Asym => ConvolutionKind::Asym,
            };
            let ms = parse_list(&m)?;
            let mut ds = parse_list(&d)?;
            if kind == ConvolutionKind::Sym && d.contains("..") {
                ds.retain(|d| d % 2 == 0);
            }
            ctx.manifest.budgets.insert("cells".into(), (ms.len() * ds.len()) as u64);
            let rows = transforms::mfold_root_bound_table(&ms, &ds, kind)?;
            match format {
                FormatArg::Tsv => {
                    ctx.line("m\td\tmode\tbound\tbound_decimal\troot_lo\troot_hi\tbelow_bound");
                    for r in &rows {
                        ctx.line(format!(
                            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                            r.m,
                            r.d,
                            mode_name(kind),
                            r.bound,
                            decimal15(r.bound.to_f64()),
                            decimal15(to_f64(&r.bracket.0)),
                            decimal15(to_f64(&r.bracket.1)),
                            r.below_bound
                        ));
                    }
                }
                FormatArg::Json => {
                    let docs: Vec<_> = rows
                        .iter()
                        .map(|r| {
                            json!({
                                "m": r.m,
                                "d": r.d,
                                "mode": kind,
                                "poly": PolyDoc::from_poly(&r.poly),
                                "root_bracket": [format_rat(&r.bracket.0), format_rat(&r.bracket.1)],
                                "root_decimal": decimal15(to_f64(&r.bracket.1)),
                                "bound": r.bound.to_string(),
                                "bound_decimal": decimal15(r.bound.to_f64()),
                                "below_bound": r.below_bound,
                            })
                        })
                        .collect();
                    ctx.line(serde_json::to_string_pretty(&docs)?);
                }
            }
            Ok(if rows.iter().all(|r| r.below_bound) { EXIT_OK } else { EXIT_VERDICT })
        }
        Command::Sample { mode, d, m, seed, out } => {
            ctx.manifest.seed = Some(seed);
            let mut rng = StreamRng::new(seed);
            let mut g = graph::sample(mode.into(), d, m, &mut rng)?;
            g.seed = Some(seed);
            ctx.emit(&out, &io::graph_to_json(&g))?;
            Ok(EXIT_OK)
        }
        Command::Certify { input, out } => {
            let text = io::read_to_string(&input)?;
            match io::graph_or_certificate_from_json(&text)
                .map_err(|e| Error::Parse(format!("{}: {e}", input.display())))?
            {
                GraphOrCertificate::Graph(g) => {
                    let cert = certify(&g)?;
                    ctx.emit(&out, &io::certificate_to_json(&cert))?;
                    if out.is_some() {
                        ctx.line(format!("verdict: {}", cert.verdict));
                    }
                    Ok(verdict_code(cert.verdict))
                }
                GraphOrCertificate::Certificate(c) => {
                    let ok = c.reverify()?;
                    ctx.line(format!(
                        "certificate {}: verdict {}",
                        if ok { "verified" } else { "does not match its graph" },
                        c.verdict
                    ));
                    Ok(if ok { verdict_code(c.verdict) } else { EXIT_VERDICT })
                }
            }
        }
        Command::Search { mode, d, m, max_trials, seed, allow_boundary, out } => {
            ctx.manifest.seed = Some(seed);
            ctx.manifest.budgets.insert("max_trials".into(), max_trials);
            let r = search::rejection_search(mode.into(), d, m, max_trials, seed, allow_boundary)?;
            eprintln!("search: {} trials in {:.3}s", r.trials_run, r.wall_time);
            let summary = json!({
                "mode": r.mode,
                "d": r.d,
                "m": r.m,
                "seed": seed,
                "trials_run": r.trials_run,
                "successes": r.successes,
                "first_success_trial": r.first_success_trial,
            });
            ctx.line(serde_json::to_string_pretty(&summary)?);
            match r.certificate {
                Some(c) => {
                    let text = io::certificate_to_json(&c);
                    match &out {
                        Some(_) => ctx.emit(&out, &text)?,
                        None => ctx.line(text.trim_end()),
                    }
                    Ok(EXIT_OK)
                }
                None => Ok(EXIT_VERDICT),
            }
        }
        Command::Descend { mode, d, m, strategy, samples, seed, out } => {
            ctx.manifest.seed = Some(seed);
            ctx.manifest.budgets.insert("swap_budget".into(), DEFAULT_SWAP_BUDGET as u64);
            let strategy = match strategy {
                StrategyArg::Exact => Strategy::Exact,
                StrategyArg::Sampled => Strategy::Sampled { samples },
            };
            let r = search::interlacing_descent(mode.into(), d, m, strategy, seed)?;
            let steps: Vec<_> = r
                .steps
                .iter()
                .map(|s| {
                    json!({
                        "swap": s.swap,
                        "applied": s.applied,
                        "lambda2": [format_rat(&s.lambda2.0), format_rat(&s.lambda2.1)],
                        "lambda2_decimal": decimal15(to_f64(&s.lambda2.1)),
                    })
                })
                .collect();
            let init = r.initial_lambda2.clone().expect("descent reports λ₂(E)");
            let cert = r.certificate.expect("descent certifies its result");
            let summary = json!({
                "mode": r.mode,
                "d": r.d,
                "m": r.m,
                "initial_lambda2": [format_rat(&init.0), format_rat(&init.1)],
                "initial_lambda2_decimal": decimal15(to_f64(&init.1)),
                "steps": steps,
                "verdict": cert.verdict,
            });
            ctx.line(serde_json::to_string_pretty(&summary)?);
            if out.is_some() {
                ctx.emit(&out, &io::certificate_to_json(&cert))?;
            }
            Ok(verdict_code(cert.verdict))
        }
    }
}

fn mode_name(kind: ConvolutionKind) -> &'static str {
    match kind {
        ConvolutionKind::Sym => "sym",
        ConvolutionKind::Asym => "asym",
    }
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::NotRamanujan => EXIT_VERDICT,
        _ => EXIT_OK,
    }
}

fn run_verify(check: VerifyCommand, ctx: &mut Ctx) -> Result<i32> {
    let mut failures = 0u64;
    match check {
        VerifyCommand::Quadrature { bipartite, common } => {
            let VerifyArgs { d, trials, seed } = common;
            ctx.manifest.seed = Some(seed);
            ctx.manifest.budgets.insert("determinants".into(), DEFAULT_DET_BUDGET);
            for i in 0..trials {
                let mut rng = StreamRng::derive(seed, i);
                let r = if bipartite {
                    let a = instances::doubly_regular(&mut rng, d, 3, 3);
                    let b = instances::doubly_regular(&mut rng, d, 3, 3);
                    quadrature::verify_bip_quadrature(&a, &b)?
                } else {
                    let a = instances::symmetric_constant_row_sum(&mut rng, d, 3);
                    let b = instances::symmetric_constant_row_sum(&mut rng, d, 3);
                    quadrature::verify_sym_quadrature(&a, &b)?
                };
                failures += u64::from(!r.equal);
                ctx.line(serde_json::to_string(&json!({
                    "trial": i,
                    "a": format_rat(&r.a),
                    "b": format_rat(&r.b),
                    "terms": r.terms,
                    "lhs": PolyDoc::from_poly(&r.lhs),
                    "rhs": PolyDoc::from_poly(&r.rhs),
                    "equal": r.equal,
                }))?);
            }
        }
        VerifyCommand::Fourier { samples, common } => {
            let VerifyArgs { d, trials, seed } = common;
            ctx.manifest.seed = Some(seed);
            for i in 0..trials {
                let mut rng = StreamRng::derive(seed, i);
                let a = instances::symmetric(&mut rng, d, 4);
                let b = instances::doubly_regular(&mut rng, d, 3, 3);
                let r = quadrature::fourier_degree_test(&a, &b, samples)?;
                let ok = r.relative_high < 1e-8;
                failures += u64::from(!ok);
                ctx.line(serde_json::to_string(&json!({
                    "trial": i,
                    "max_high": r.max_high,
                    "max_all": r.max_all,
                    "relative_high": r.relative_high,
                    "c2": r.magnitudes.get(2),
                    "pass": ok,
                }))?);
            }
        }
        VerifyCommand::Swapreal { swaps, common } => {
            let VerifyArgs { d, trials, seed } = common;
            ctx.manifest.seed = Some(seed);
            ctx.manifest.budgets.insert("swap_budget".into(), DEFAULT_SWAP_BUDGET as u64);
            for i in 0..trials {
                let mut rng = StreamRng::derive(seed, i);
                let a = instances::symmetric(&mut rng, d, 4);
                let b = instances::symmetric(&mut rng, d, 4);
                let pa = instances::swap_program(&mut rng, d, swaps / 2, 7);
                let pb = instances::swap_program(&mut rng, d, swaps - swaps / 2, 7);
                let e = quadrature::expected_charpoly_swaps(&[a, b], &[pa, pb])?;
                let ok = sturm::is_real_rooted(&e.poly)?;
                failures += u64::from(!ok);
                ctx.line(serde_json::to_string(&json!({
                    "trial": i,
                    "leaves": e.terms,
                    "poly": PolyDoc::from_poly(&e.poly),
                    "real_rooted": ok,
                }))?);
            }
        }
    }
    Ok(if failures == 0 { EXIT_OK } else { EXIT_VERDICT })
}

/// Runs the CLI on `args` (including the program name), writing primary
/// output to `out` and diagnostics to `err`.
pub fn run_with(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    if let Err(e) = init_threads() {
        let _ = writeln!(err, "error: {e}");
        return EXIT_USAGE;
    }
    let start = Instant::now();
    let mut ctx = Ctx { stdout: Vec::new(), manifest: RunManifest::new(args.to_vec()) };
    let code = match run_command(cli.command, &mut ctx) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    };
    let _ = out.write_all(&ctx.stdout);
    if let Some(path) = cli.manifest {
        let stdout = std::mem::take(&mut ctx.stdout);
        ctx.manifest.record("<stdout>", &stdout);
        ctx.manifest.elapsed_seconds = start.elapsed().as_secs_f64();
        if let Err(e) = ctx.manifest.write(&path) {
            let _ = writeln!(err, "error: cannot write manifest: {e}");
            return EXIT_USAGE;
        }
    }
    code
}

/// [`run_with`] on the process's standard streams.
pub fn run(args: &[String]) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let args: Vec<String> = std::iter::once("ffc").chain(args.iter().copied()).map(String::from).collect();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_with(&args, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn lists() {
        assert_eq!(parse_list("3..5").unwrap(), vec![3, 4, 5]);
        assert_eq!(parse_list("4..10:2").unwrap(), vec![4, 6, 8, 10]);
        assert_eq!(parse_list("3, 7").unwrap(), vec![3, 7]);
        assert!(parse_list("x..3").is_err());
    }

    #[test]
    fn bound_command() {
        let (code, out, _) = run_str(&["bound", "--m", "3"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "2*sqrt(2)");
        assert!(lines[1].starts_with("2.828427124746"));
        assert_eq!(run_str(&["bound", "--m", "1"]).0, EXIT_USAGE);
    }

    #[test]
    fn usage_and_budget_codes() {
        assert_eq!(run_str(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["--help"]).0, EXIT_OK);
        assert_eq!(run_str(&["descend", "--d", "5", "--m", "3"]).0, EXIT_BUDGET);
        assert_eq!(run_str(&["expected", "--mode", "plain", "--d", "3", "--m", "2"]).0, EXIT_USAGE);
    }
}
