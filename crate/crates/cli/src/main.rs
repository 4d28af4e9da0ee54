use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use verdec::de::{find_threshold, Family};
use verdec::harness::{run_sweep, EnsembleSpec, ExperimentConfig, Mode};
use verdec::stopping::{bec_critical_ratio, bec_gamma, lm1_beta_bar, lm1_beta_star, lm1_w, StoppingFamily};
use verdec::thresholds::{alpha_bar_bec, alpha_bar_lm1, alpha_bar_lm2mb, info_bound_max_n, oversampling_gamma0, ScalingFamily};

#[derive(Parser)]
#[command(name = "verdec", version, about = "Verification decoding experiments for sparse graph compressed sensing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo success rates over a sparsity sweep
    Simulate(Common),
    /// Density-evolution thresholds
    De(Analysis),
    /// High-rate threshold constants and oversampling ratios
    Threshold(Analysis),
    /// Stopping-set exponent curves and critical ratios
    Stopping(Analysis),
    /// Density-evolution thresholds against their large-k scaling laws
    Scaling(Analysis),
    /// Entropy bound on the block length
    Infobound(Analysis),
}

#[derive(Args)]
struct Common {
    /// JSON experiment config
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Base seed, overriding the config
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct Analysis {
    #[command(flatten)]
    common: Common,
    /// Ensemble as `j,k`, repeatable; overrides the config
    #[arg(long = "ensemble", value_parser = parse_ensemble)]
    ensembles: Vec<EnsembleSpec>,
    /// Family to evaluate, repeatable; defaults depend on the subcommand
    #[arg(long = "family")]
    families: Vec<String>,
}

fn parse_ensemble(s: &str) -> Result<EnsembleSpec, String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("'{p}': {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [j, k] => Ok(EnsembleSpec { j, k, n: k }),
        [j, k, n] => Ok(EnsembleSpec { j, k, n }),
        _ => Err(format!("expected j,k or j,k,n, got '{s}'")),
    }
}

fn load_config(common: &Common, mode: Mode, ensembles: &[EnsembleSpec]) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str::<ExperimentConfig>(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => ExperimentConfig::default(),
    };
    cfg.mode = mode;
    if !ensembles.is_empty() {
        cfg.ensembles = ensembles.to_vec();
    }
    if cfg.ensembles.is_empty() && mode != Mode::Simulate {
        cfg.ensembles = vec![EnsembleSpec { j: 3, k: 6, n: 6 }];
    }
    if let Some(seed) = common.seed {
        cfg.base_seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.output = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(cfg: &ExperimentConfig, text: &str) -> Result<()> {
    match &cfg.output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn families<T: std::str::FromStr<Err = verdec::Error>>(names: &[String], default: &[&str]) -> Result<Vec<T>> {
    let names: Vec<&str> = if names.is_empty() { default.to_vec() } else { names.iter().map(String::as_str).collect() };
    Ok(names.into_iter().map(str::parse).collect::<Result<Vec<T>, _>>()?)
}

fn unique_js(cfg: &ExperimentConfig) -> Vec<usize> {
    let mut js: Vec<usize> = cfg.ensembles.iter().map(|e| e.j).collect();
    js.sort_unstable();
    js.dedup();
    js
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.9}")).unwrap_or_default()
}

fn simulate(common: &Common) -> Result<()> {
    let cfg = load_config(common, Mode::Simulate, &[])?;
    let res = run_sweep(&cfg)?;
    match &cfg.output {
        Some(path) => {
            res.write(path)?;
            eprintln!("wrote {} and {}", path.display(), path.with_extension("json").display());
        }
        None => print!("{}", res.to_csv()),
    }
    Ok(())
}

fn de(a: &Analysis) -> Result<()> {
    let cfg = load_config(&a.common, Mode::De, &a.ensembles)?;
    let fams: Vec<Family> = families(&a.families, &["bec", "lm1", "lm2mb"])?;
    let mut out = String::from("family,j,k,threshold\n");
    for e in &cfg.ensembles {
        for f in &fams {
            let t = find_threshold(&f.recursion(e.j, e.k)?, cfg.de_tolerance)?;
            writeln!(out, "{},{},{},{t:.9}", f.name(), e.j, e.k)?;
        }
    }
    emit(&cfg, &out)
}

fn scaling(a: &Analysis) -> Result<()> {
    let cfg = load_config(&a.common, Mode::Scaling, &a.ensembles)?;
    let fams: Vec<Family> = families(&a.families, &["bec", "lm1", "lm2mb"])?;
    let mut out = String::from("family,j,k,threshold,predicted,ratio\n");
    for e in &cfg.ensembles {
        for f in &fams {
            let t = find_threshold(&f.recursion(e.j, e.k)?, cfg.de_tolerance)?;
            let p = f.scaling_law(e.j, e.k)?;
            writeln!(out, "{},{},{},{t:.9},{p:.9},{:.6}", f.name(), e.j, e.k, t / p)?;
        }
    }
    emit(&cfg, &out)
}

fn threshold(a: &Analysis) -> Result<()> {
    let cfg = load_config(&a.common, Mode::Threshold, &a.ensembles)?;
    let fams: Vec<ScalingFamily> = families(&a.families, &["bec", "lm1", "lm2mb", "ss-lm1"])?;
    let mut out = String::from("family,j,alpha_bar,interior_optimum,gamma0\n");
    for j in unique_js(&cfg) {
        for f in &fams {
            let c = match f {
                ScalingFamily::Bec => alpha_bar_bec(j)?,
                ScalingFamily::Lm1 => alpha_bar_lm1(j)?,
                ScalingFamily::Lm2Mb => alpha_bar_lm2mb(j)?,
                ScalingFamily::SsLm1 => lm1_beta_bar(j)?,
                ScalingFamily::SsBec => bail!("ss-bec has no j-only constant; use the stopping subcommand"),
            };
            let gamma0 = match f {
                ScalingFamily::Lm1 | ScalingFamily::Lm2Mb | ScalingFamily::SsLm1 => oversampling_gamma0(*f, j, cfg.delta).ok(),
                _ => None,
            };
            writeln!(out, "{},{j},{:.9},{},{}", f.name(), c.value(), fmt_opt(c.interior_optimum), fmt_opt(gamma0))?;
        }
    }
    emit(&cfg, &out)
}

fn stopping(a: &Analysis) -> Result<()> {
    let cfg = load_config(&a.common, Mode::Stopping, &a.ensembles)?;
    let fams: Vec<StoppingFamily> = families(&a.families, &["bec", "lm1"])?;
    let pts = cfg.grid_points;
    let mut out = String::from("family,j,k,alpha,beta,x0,y0,gamma\n");
    let mut summary = String::new();
    for e in &cfg.ensembles {
        for f in &fams {
            match f {
                StoppingFamily::Bec => {
                    for i in 0..pts {
                        let alpha = 0.5 * (i + 1) as f64 / pts as f64;
                        let p = bec_gamma(e.j, e.k, alpha)?;
                        writeln!(out, "bec,{},{},{:.9},{:.9},{:.9},,{:.9}", e.j, e.k, p.alpha, p.beta, p.x0, p.gamma)?;
                    }
                    let r = bec_critical_ratio(e.j, e.k)?;
                    writeln!(summary, "# bec j={} k={} critical_ratio={r:.9}", e.j, e.k)?;
                }
                StoppingFamily::Lm1 => {
                    for i in 0..pts {
                        let beta = 0.3 * (i + 1) as f64 / pts as f64;
                        let p = lm1_w(e.j, e.k, beta)?.argmax;
                        writeln!(
                            out,
                            "lm1,{},{},{:.9},{:.9},{:.9},{},{:.9}",
                            e.j,
                            e.k,
                            p.alpha,
                            p.beta,
                            p.x0,
                            fmt_opt(p.y0),
                            p.gamma
                        )?;
                    }
                    let r = lm1_beta_star(e.j, e.k)?;
                    writeln!(summary, "# lm1 j={} k={} critical_ratio={r:.9}", e.j, e.k)?;
                }
            }
        }
    }
    out.push_str(&summary);
    emit(&cfg, &out)
}

fn infobound(a: &Analysis) -> Result<()> {
    let cfg = load_config(&a.common, Mode::Infobound, &a.ensembles)?;
    let p = cfg.infobound;
    let mut out = String::from("j,hz,lambda,omega,n_max\n");
    for j in unique_js(&cfg) {
        let n_max = info_bound_max_n(p.hz, j, p.lambda, p.omega)?;
        writeln!(out, "{j},{},{},{},{n_max:.6e}", p.hz, p.lambda, p.omega)?;
    }
    emit(&cfg, &out)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let threads = match &cli.command {
        Command::Simulate(c) => c.threads,
        Command::De(a) | Command::Threshold(a) | Command::Stopping(a) | Command::Scaling(a) | Command::Infobound(a) => a.common.threads,
    };
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    }
    match &cli.command {
        Command::Simulate(c) => simulate(c),
        Command::De(a) => de(a),
        Command::Threshold(a) => threshold(a),
        Command::Stopping(a) => stopping(a),
        Command::Scaling(a) => scaling(a),
        Command::Infobound(a) => infobound(a),
    }
}
