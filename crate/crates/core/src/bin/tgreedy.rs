use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use taylor_greedy::harness::run::to_indices;
use taylor_greedy::harness::{
    load_instance, render_svg, run_experiment, save_instance, verify, ExperimentConfig,
    GeneratorName, InstanceSource, PlotOptions, RoundMode, RunSummary, Solution, VerifyConfig,
    VerifyProblem, OUT_ENV,
};
use taylor_greedy::optimizer::GreedyTrace;
use taylor_greedy::rounding::{pipage_round, swap_round};

#[derive(Parser)]
#[command(name = "tgreedy", version, about = "Continuous greedy with polynomial and sampling gradient estimators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic instance file.
    Gen {
        /// imsynth1, imsynth2, flsynth1, smsynth1 or cnsynth
        generator: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// JSON object overriding generator parameters
        #[arg(long)]
        params: Option<String>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Run the estimator grid on one instance.
    Run {
        /// JSON experiment configuration
        #[arg(long)]
        config: Option<PathBuf>,
        /// Instance file (overrides the configured source)
        #[arg(long)]
        instance: Option<PathBuf>,
        /// Generator name (overrides the configured source)
        #[arg(long)]
        generator: Option<String>,
        /// Generator seed
        #[arg(long)]
        instance_seed: Option<u64>,
        /// Base seed of the sampling cells
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated grid, e.g. POLY1,POLY2,SAMP100
        #[arg(long, value_delimiter = ',')]
        estimators: Option<Vec<String>>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        round: Option<String>,
        #[arg(long)]
        record_every: Option<usize>,
        #[arg(long)]
        eval_samples: Option<usize>,
        /// Add estimator construction time to reported seconds
        #[arg(long)]
        include_build: bool,
        #[arg(long, env = OUT_ENV)]
        out: Option<PathBuf>,
    },
    /// Check estimator and rounding bounds against exact oracles on a small instance.
    Verify {
        /// sm, im, fl, cn or modular
        #[arg(long, default_value = "sm")]
        problem: String,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6")]
        degrees: Vec<u32>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0.1)]
        gamma: f64,
        #[arg(long, default_value_t = 16)]
        max_n: usize,
    },
    /// Render err-versus-time curves of trace files as SVG.
    Plot {
        #[arg(required = true)]
        traces: Vec<PathBuf>,
        /// summary.json supplying f*
        #[arg(long)]
        summary: Option<PathBuf>,
        #[arg(long)]
        loglog: bool,
        #[arg(long)]
        title: Option<String>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Round a fractional solution.
    Round {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        /// pipage or swap
        #[arg(long, default_value = "pipage")]
        mode: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Degree of the estimator guiding pipage rounding
        #[arg(long, default_value_t = 3)]
        degree: u32,
    },
}

fn trace_label(path: &Path) -> String {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("trace");
    if stem == "trace" {
        if let Some(parent) = path.parent().and_then(|p| p.file_name()).and_then(|s| s.to_str()) {
            return parent.to_string();
        }
    }
    stem.to_string()
}

fn source_from_flags(
    instance: Option<PathBuf>,
    generator: Option<String>,
    seed: Option<u64>,
) -> Result<Option<InstanceSource>> {
    if let Some(path) = instance {
        return Ok(Some(InstanceSource::File { path }));
    }
    match generator {
        Some(g) => Ok(Some(InstanceSource::Generator {
            generator: g.parse::<GeneratorName>()?,
            seed: seed.unwrap_or(0),
            params: serde_json::Value::Null,
        })),
        None => Ok(None),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen {
            generator,
            seed,
            params,
            out,
        } => {
            let source = InstanceSource::Generator {
                generator: generator.parse()?,
                seed,
                params: match params {
                    Some(p) => serde_json::from_str(&p).context("parsing --params")?,
                    None => serde_json::Value::Null,
                },
            };
            let inst = source.build()?;
            save_instance(&inst, &out)?;
            println!(
                "{}: N={} terms={} rank={} -> {}",
                inst.name,
                inst.objective.ground_size(),
                inst.objective.terms().len(),
                inst.matroid.rank(),
                out.display()
            );
        }
        Command::Run {
            config,
            instance,
            generator,
            instance_seed,
            seed,
            estimators,
            gamma,
            round,
            record_every,
            eval_samples,
            include_build,
            out,
        } => {
            let flagged = source_from_flags(instance, generator, instance_seed)?;
            let mut cfg = match &config {
                Some(path) => ExperimentConfig::from_json(
                    &std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
                )?,
                None => match &flagged {
                    Some(source) => ExperimentConfig::new(source.clone()),
                    None => bail!("give --config, --instance or --generator"),
                },
            };
            if let Some(source) = flagged {
                cfg.instance = source;
            }
            if let (Some(s), InstanceSource::Generator { seed: gs, .. }) = (instance_seed, &mut cfg.instance) {
                *gs = s;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(e) = estimators {
                cfg.estimators = e;
            }
            if let Some(g) = gamma {
                cfg.gamma = g;
            }
            if let Some(r) = round {
                cfg.round = r.parse::<RoundMode>()?;
            }
            if let Some(r) = record_every {
                cfg.record_every = r;
            }
            if let Some(t) = eval_samples {
                cfg.eval_samples = t;
            }
            cfg.include_build |= include_build;
            if out.is_some() {
                cfg.output = out;
            }
            let summary = run_experiment(&cfg)?;
            println!("instance {} (f* = {:?})", summary.instance, summary.f_star);
            for r in &summary.runs {
                match (&r.error, r.f, r.err, r.seconds) {
                    (Some(e), ..) => println!("{:>9}  failed: {e}", r.estimator),
                    (None, Some(f), Some(err), Some(s)) => {
                        println!("{:>9}  f={f:.6}  err={err:+.3e}  seconds={s:.4}", r.estimator)
                    }
                    _ => println!("{:>9}  incomplete", r.estimator),
                }
            }
            println!(
                "wrote {}",
                cfg.output_root().join(&summary.instance).display()
            );
        }
        Command::Verify {
            problem,
            n,
            m,
            seed,
            degrees,
            samples,
            gamma,
            max_n,
        } => {
            let cfg = VerifyConfig {
                problem: problem.parse::<VerifyProblem>()?,
                n,
                m,
                seed,
                degrees,
                samples,
                gamma,
                max_n,
                ..Default::default()
            };
            let report = verify(&cfg)?;
            print!("{report}");
            if !report.passed() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Plot {
            traces,
            summary,
            loglog,
            title,
            out,
        } => {
            let mut series = Vec::with_capacity(traces.len());
            for path in &traces {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                let trace = GreedyTrace::<f64>::from_csv(&text).with_context(|| format!("parsing {}", path.display()))?;
                series.push((trace_label(path), trace));
            }
            let f_star = match summary {
                Some(p) => RunSummary::from_json(&std::fs::read_to_string(&p)?)?.f_star,
                None => None,
            };
            let plot = render_svg(
                &series,
                &PlotOptions {
                    loglog,
                    f_star,
                    title,
                },
            )?;
            if plot.clipped > 0 {
                eprintln!(
                    "warning: {} non-positive values clipped to 1e-12 on log axes",
                    plot.clipped
                );
            }
            std::fs::write(&out, plot.svg)?;
            println!("wrote {}", out.display());
        }
        Command::Round {
            instance,
            solution,
            mode,
            seed,
            degree,
        } => {
            let inst = load_instance(&instance)?;
            let sol: Solution = serde_json::from_str(&std::fs::read_to_string(&solution)?)?;
            let n = inst.objective.ground_size();
            let x = match mode.parse::<RoundMode>()? {
                RoundMode::Pipage => {
                    let fhat = inst.objective.build_poly_estimator(degree)?;
                    pipage_round(&fhat, &inst.matroid, &sol.y)?.x
                }
                RoundMode::Swap => swap_round(&inst.matroid, &sol.step_vectors(n), seed)?,
                RoundMode::None => bail!("choose --mode pipage or swap"),
            };
            let value = inst.objective.exact_value(&x)?;
            println!("f={value:.6}");
            println!("{}", serde_json::to_string(&to_indices(&x))?);
        }
    }
    Ok(ExitCode::SUCCESS)
}
