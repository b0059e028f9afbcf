//! `pmx`: generate pointer-matrix instances, evaluate them, run the query
//! algorithms with exact accounting, sweep scaling experiments to CSV, and
//! fuzz the counting lemmas.
//!
//! Exit codes: 0 success, 1 usage or input errors, 2 verification failure,
//! 3 internal assertion.

use std::panic;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Deserialize;

use pointer_matrix::analysis::{aggregate, bad_indices, fit_loglog, GapSequence, Summary};
use pointer_matrix::baseline::run_full_read;
use pointer_matrix::codec::{load_matrix, save_matrix, FileFormat};
use pointer_matrix::instances::{gen_random, generate, Family, GenSpec};
use pointer_matrix::matrix::Matrix;
use pointer_matrix::one_sided::{run_one_sided, OneSidedConfig};
use pointer_matrix::report::RunReport;
use pointer_matrix::rng::{derive_seed_chain, seeded, uniform_below};
use pointer_matrix::zero_error::{run_zero_sided, run_zpp, ZeroErrorConfig, ZppConfig};

#[derive(Parser)]
#[command(
    name = "pmx",
    version,
    about = "pointer-matrix query-algorithm harness"
)]
struct Cli {
    /// Base seed for anything randomized.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Matrix file format for outputs.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Bits)]
    format: FormatArg,
    /// JSON config overrides, inline or a file path. Known keys:
    /// budget_factor, small_set_threshold, loop_multiplier,
    /// spars_multiplier, alpha, round_cap.
    #[arg(long, global = true)]
    config: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Bits,
    Json,
}

impl From<FormatArg> for FileFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Bits => FileFormat::Bits,
            FormatArg::Json => FileFormat::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    #[value(name = "one_sided")]
    OneSided,
    #[value(name = "zero_sided")]
    ZeroSided,
    #[value(name = "zpp")]
    Zpp,
    #[value(name = "full_read")]
    FullRead,
}

impl AlgorithmArg {
    fn as_str(self) -> &'static str {
        match self {
            AlgorithmArg::OneSided => "one_sided",
            AlgorithmArg::ZeroSided => "zero_sided",
            AlgorithmArg::Zpp => "zpp",
            AlgorithmArg::FullRead => "full_read",
        }
    }

    fn tag(self) -> u64 {
        match self {
            AlgorithmArg::OneSided => 0x10,
            AlgorithmArg::ZeroSided => 0x20,
            AlgorithmArg::Zpp => 0x30,
            AlgorithmArg::FullRead => 0x40,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance and write it to a file.
    Gen(GenArgs),
    /// Evaluate a matrix file with the full-knowledge reference.
    Eval {
        /// Matrix file (bitstring or JSON, sniffed).
        matrix: PathBuf,
    },
    /// Run an algorithm on a matrix file and print the report as JSON.
    Run {
        matrix: PathBuf,
        #[arg(long, value_enum)]
        algo: AlgorithmArg,
    },
    /// Sweep (families × sides × algorithms) and write aggregated CSV rows
    /// with fitted log-log slopes.
    Sweep(SweepArgs),
    /// Fuzz a counting lemma and exit nonzero on any violation.
    VerifyLemma {
        #[command(subcommand)]
        which: LemmaCommand,
    },
}

#[derive(Args)]
struct GenArgs {
    /// Instance family.
    #[arg(long)]
    family: String,
    /// Side length.
    #[arg(long)]
    s: usize,
    /// Output path.
    #[arg(long)]
    out: PathBuf,
    /// Full GenSpec as inline JSON; overrides the individual flags.
    #[arg(long)]
    spec_json: Option<String>,
    #[arg(long, default_value_t = 0.5)]
    zero_density: f64,
    #[arg(long, default_value_t = 0)]
    decoy_count: usize,
    #[arg(long, default_value_t = 0)]
    decoy_length: usize,
    #[arg(long, default_value_t = 0.5)]
    p_zero_bit: f64,
    #[arg(long, default_value_t = 0.5)]
    p_null_ptr: f64,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated side lengths, e.g. 128,256,512.
    #[arg(long, value_delimiter = ',')]
    sides: Vec<usize>,
    /// Comma-separated families.
    #[arg(long, value_delimiter = ',')]
    families: Vec<String>,
    /// Comma-separated algorithms.
    #[arg(long, value_delimiter = ',')]
    algos: Vec<String>,
    #[arg(long, default_value_t = 10)]
    trials: u64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum LemmaCommand {
    /// Bad-index bound: |bad| < ℓ/100 on fuzzed gap sequences.
    #[command(name = "bad_index", alias = "bad-index")]
    BadIndex {
        #[arg(long, default_value_t = 10_000)]
        cases: u64,
        #[arg(long, default_value_t = 2000)]
        max_len: usize,
    },
    /// Milestone accounting: the per-trace inequality over full runs.
    Accounting {
        #[arg(long, default_value_t = 1000)]
        runs: u64,
        #[arg(long, default_value_t = 128)]
        s: usize,
    },
}

/// Flat JSON overrides applied on top of the default configurations.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Overrides {
    budget_factor: Option<f64>,
    small_set_threshold: Option<usize>,
    loop_multiplier: Option<f64>,
    spars_multiplier: Option<f64>,
    alpha: Option<f64>,
    round_cap: Option<u32>,
}

impl Overrides {
    fn parse(arg: &Option<String>) -> Result<Self> {
        let Some(text) = arg else {
            return Ok(Self::default());
        };
        let raw = if text.trim_start().starts_with('{') {
            text.clone()
        } else {
            std::fs::read_to_string(text).with_context(|| format!("reading config {text}"))?
        };
        serde_json::from_str(&raw).context("parsing config overrides")
    }

    fn one_sided(&self, seed: u64) -> OneSidedConfig {
        let mut cfg = OneSidedConfig::with_seed(seed);
        if let Some(v) = self.budget_factor {
            cfg.budget_factor = v;
        }
        if let Some(v) = self.small_set_threshold {
            cfg.small_set_threshold = v;
        }
        if let Some(v) = self.loop_multiplier {
            cfg.loop_multiplier = v;
        }
        cfg
    }

    fn zero_error(&self, seed: u64) -> ZeroErrorConfig {
        let mut cfg = ZeroErrorConfig::with_seed(seed);
        if let Some(v) = self.spars_multiplier {
            cfg.spars_multiplier = v;
        }
        if let Some(v) = self.alpha {
            cfg.alpha = v;
        }
        cfg
    }

    fn zpp(&self, seed: u64) -> ZppConfig {
        let mut cfg = ZppConfig::with_seed(seed);
        cfg.one_sided = self.one_sided(cfg.one_sided.rng_seed);
        cfg.zero_error = self.zero_error(cfg.zero_error.rng_seed);
        if let Some(v) = self.round_cap {
            cfg.round_cap = v;
        }
        cfg
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let outcome = panic::catch_unwind(move || dispatch(cli));
    match outcome {
        Ok(Ok(code)) => code,
        Ok(Err(err)) => {
            eprintln!("error: {err:#}");
            // An exceeded round cap means a correctness bug, not bad input.
            match err.downcast_ref::<pointer_matrix::Error>() {
                Some(pointer_matrix::Error::RoundLimitExceeded(_)) => ExitCode::from(3),
                _ => ExitCode::from(1),
            }
        }
        Err(_) => {
            eprintln!("error: internal assertion failed");
            ExitCode::from(3)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    let overrides = Overrides::parse(&cli.config)?;
    match cli.command {
        Command::Gen(args) => cmd_gen(&args, cli.seed, cli.format.into()),
        Command::Eval { matrix } => cmd_eval(&matrix),
        Command::Run { matrix, algo } => cmd_run(&matrix, algo, cli.seed, &overrides),
        Command::Sweep(args) => cmd_sweep(&args, cli.seed, &overrides),
        Command::VerifyLemma { which } => cmd_verify_lemma(&which, cli.seed, &overrides),
    }
}

fn parse_family(text: &str) -> Result<Family> {
    Family::parse(text).ok_or_else(|| {
        anyhow!("unknown family {text:?} (one_clean, one_decoy, zero_dense, zero_sparse_nonspanning, zero_broken_column, random)")
    })
}

fn build_spec(args: &GenArgs, seed: u64) -> Result<GenSpec> {
    if let Some(json) = &args.spec_json {
        return serde_json::from_str(json).context("parsing --spec-json");
    }
    let family = parse_family(&args.family)?;
    let mut spec = GenSpec::new(args.s, family, seed);
    spec.zero_density = args.zero_density;
    spec.decoy_count = args.decoy_count;
    spec.decoy_length = args.decoy_length;
    spec.p_zero_bit = args.p_zero_bit;
    spec.p_null_ptr = args.p_null_ptr;
    Ok(spec)
}

fn cmd_gen(args: &GenArgs, seed: u64, format: FileFormat) -> Result<ExitCode> {
    let spec = build_spec(args, seed)?;
    if spec.s < 2 {
        bail!("side length must be at least 2");
    }
    if !(spec.zero_density > 0.0 && spec.zero_density <= 1.0) {
        bail!("--zero-density must lie in (0, 1]");
    }
    for (name, p) in [
        ("--p-zero-bit", spec.p_zero_bit),
        ("--p-null-ptr", spec.p_null_ptr),
    ] {
        if !(0.0..=1.0).contains(&p) {
            bail!("{name} must lie in [0, 1]");
        }
    }
    let m = generate(&spec);
    save_matrix(&m, &args.out, format)?;
    println!(
        "wrote {} (family {}, s={}, n={}), F = {}",
        args.out.display(),
        spec.family.as_str(),
        m.side(),
        m.n(),
        m.evaluate_reference()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_eval(path: &Path) -> Result<ExitCode> {
    let m = load_matrix(path)?;
    println!(
        "{{\"s\":{},\"n\":{},\"f\":{}}}",
        m.side(),
        m.n(),
        m.evaluate_reference()
    );
    Ok(ExitCode::SUCCESS)
}

fn run_algorithm(
    m: &Matrix,
    algo: AlgorithmArg,
    seed: u64,
    overrides: &Overrides,
) -> Result<RunReport> {
    Ok(match algo {
        AlgorithmArg::OneSided => run_one_sided(m, &overrides.one_sided(seed)),
        AlgorithmArg::ZeroSided => run_zero_sided(m, &overrides.zero_error(seed)),
        AlgorithmArg::Zpp => run_zpp(m, &overrides.zpp(seed))?,
        AlgorithmArg::FullRead => run_full_read(m, seed),
    })
}

fn cmd_run(path: &Path, algo: AlgorithmArg, seed: u64, overrides: &Overrides) -> Result<ExitCode> {
    let m = load_matrix(path)?;
    let report = run_algorithm(&m, algo, seed, overrides)?;
    println!("{}", report.to_json());
    Ok(ExitCode::SUCCESS)
}

fn format_float(v: f64) -> String {
    format!("{v:.4}")
}

fn cmd_sweep(args: &SweepArgs, base_seed: u64, overrides: &Overrides) -> Result<ExitCode> {
    if args.sides.is_empty()
        || args.families.is_empty()
        || args.algos.is_empty()
        || args.trials == 0
    {
        bail!("sweep needs nonempty --sides, --families, --algos and --trials >= 1");
    }
    let families: Vec<Family> = args
        .families
        .iter()
        .map(|f| parse_family(f))
        .collect::<Result<_>>()?;
    let algos: Vec<AlgorithmArg> = args
        .algos
        .iter()
        .map(|a| match a.as_str() {
            "one_sided" => Ok(AlgorithmArg::OneSided),
            "zero_sided" => Ok(AlgorithmArg::ZeroSided),
            "zpp" => Ok(AlgorithmArg::Zpp),
            "full_read" => Ok(AlgorithmArg::FullRead),
            other => Err(anyhow!("unknown algorithm {other:?}")),
        })
        .collect::<Result<_>>()?;

    let mut csv =
        String::from("family,s,n,trials,mean_q,max_q,p95_q,success_rate,slope,algorithm,seed\n");
    for &family in &families {
        for &algo in &algos {
            let mut sized: Vec<(usize, Summary)> = Vec::new();
            for &s in &args.sides {
                let results: Vec<(RunReport, u8)> = (0..args.trials)
                    .into_par_iter()
                    .map(|trial| {
                        let gen_seed =
                            derive_seed_chain(base_seed, &[family.tag(), s as u64, trial]);
                        let m = match family {
                            Family::Random => gen_random(s, 0.4, 0.5, gen_seed),
                            _ => generate(&GenSpec::new(s, family, gen_seed)),
                        };
                        let algo_seed = derive_seed_chain(gen_seed, &[algo.tag()]);
                        let report = run_algorithm(&m, algo, algo_seed, overrides)
                            .expect("sweep run failed");
                        (report, m.evaluate_reference())
                    })
                    .collect();
                let reports: Vec<RunReport> = results.iter().map(|(r, _)| r.clone()).collect();
                let expected: Vec<u8> = results.iter().map(|(_, e)| *e).collect();
                sized.push((s, aggregate(&reports, &expected)));
            }
            // Slope of max entry queries vs n across the swept sizes.
            let slope = if sized.len() >= 3 {
                fit_loglog(
                    &sized
                        .iter()
                        .map(|(s, sum)| (((*s) * (*s)) as f64, sum.max as f64))
                        .collect::<Vec<_>>(),
                )
                .ok()
                .map(|fit| fit.slope)
            } else {
                None
            };
            let slope_text = slope.map(format_float).unwrap_or_default();
            for (s, summary) in &sized {
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{}\n",
                    family.as_str(),
                    s,
                    s * s,
                    summary.trials,
                    format_float(summary.mean),
                    summary.max,
                    summary.p95,
                    format_float(summary.success_rate),
                    slope_text,
                    algo.as_str(),
                    base_seed,
                ));
            }
            if let Some(slope) = slope {
                println!(
                    "{} / {}: max-query slope {:.4}",
                    family.as_str(),
                    algo.as_str(),
                    slope
                );
            }
        }
    }
    std::fs::write(&args.out, csv)?;
    println!("wrote {}", args.out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify_lemma(which: &LemmaCommand, seed: u64, overrides: &Overrides) -> Result<ExitCode> {
    match which {
        LemmaCommand::BadIndex { cases, max_len } => {
            let mut rng = seeded(seed);
            let mut violations = 0u64;
            for case in 0..*cases {
                let l = 1 + uniform_below(&mut rng, *max_len);
                let xs: Vec<f64> = (0..l)
                    .map(|i| match case % 3 {
                        0 => rand_f64(&mut rng),
                        1 => {
                            if uniform_below(&mut rng, 25) == 0 {
                                2000.0 * rand_f64(&mut rng)
                            } else {
                                0.0
                            }
                        }
                        _ => 0.995f64.powi(i as i32) * (1.0 + rand_f64(&mut rng)),
                    })
                    .collect();
                let g = GapSequence::new(xs);
                if bad_indices(&g).len() as f64 >= l as f64 / 100.0 {
                    violations += 1;
                }
            }
            println!("bad_index: {} cases, {} violations", cases, violations);
            if violations > 0 {
                return Ok(ExitCode::from(2));
            }
        }
        LemmaCommand::Accounting { runs, s } => {
            // The accounting inequality is asserted inside every trace call
            // with the configured budget factor; any violation panics.
            let overrides_cfg = |run_seed: u64| overrides.one_sided(run_seed);
            let violations: u64 = (0..*runs)
                .into_par_iter()
                .map(|trial| {
                    let family = if trial % 2 == 0 {
                        Family::OneDecoy
                    } else {
                        Family::ZeroDense
                    };
                    let gen_seed = derive_seed_chain(seed, &[family.tag(), *s as u64, trial]);
                    let m = generate(&GenSpec::new(*s, family, gen_seed));
                    let cfg = overrides_cfg(derive_seed_chain(gen_seed, &[0x10]));
                    match panic::catch_unwind(|| run_one_sided(&m, &cfg)) {
                        Ok(_) => 0,
                        Err(_) => 1,
                    }
                })
                .sum();
            println!(
                "accounting: {} runs at s={}, {} violations",
                runs, s, violations
            );
            if violations > 0 {
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

use pointer_matrix::rng::unit_f64 as rand_f64;
