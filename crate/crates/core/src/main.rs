use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use recsim::expcli::{
    load_config, recompute_metrics, render_metrics_dir, run_experiment, run_sweep, ExperimentConfig, SweepAxis, SweepSpec,
};
use recsim::policy::Policy;
use recsim::{Error, Result};

#[derive(Parser)]
#[command(name = "recsim", version, about = "Seeded simulations of in-network content recommendation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Overrides {
    /// Use seeds 0..N instead of the configured list.
    #[arg(long)]
    seed_count: Option<u64>,
    /// Worker threads, one run per worker.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    users: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    burn_in: Option<usize>,
    #[arg(long)]
    policy: Option<String>,
    /// Skip event-log CSVs; only metrics are written.
    #[arg(long)]
    no_logs: bool,
    /// Print the resolved configuration and exit.
    #[arg(long)]
    print_config: bool,
}

impl Overrides {
    fn apply(&self, mut config: ExperimentConfig) -> Result<ExperimentConfig> {
        if let Some(n) = self.seed_count {
            config.seeds = (0..n).collect();
        }
        if let Some(out) = &self.out {
            config.output_dir = out.clone();
        }
        if let Some(n) = self.users {
            config.population.n = n;
        }
        if let Some(t) = self.steps {
            config.engine.steps = t;
        }
        if let Some(b) = self.burn_in {
            config.metrics.burn_in = b;
        }
        if let Some(p) = &self.policy {
            config.engine.policy = Policy::parse(p).ok_or_else(|| Error::config("policy", format!("unknown policy `{p}`")))?;
        }
        if self.no_logs {
            config.write_logs = false;
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment: every seed, per-run logs and metrics, aggregates.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run one experiment per value of a parameter axis.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// minority_share, sbm_params, beta4 or policy.
        #[arg(long)]
        axis: String,
        /// Comma-separated values; SBM tuples as `maj_maj:min_min:maj_min:min_maj`. Defaults to the axis grid.
        #[arg(long)]
        values: Option<String>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Recompute per-run metrics from a stored run directory.
    Metrics {
        #[arg(long)]
        log_dir: PathBuf,
        /// Where to write the metric files; defaults to the log directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render SVG plots from metric CSVs.
    Render {
        #[arg(long)]
        metrics_dir: PathBuf,
    },
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { config, overrides } => {
            let config = overrides.apply(load_config(&config)?)?;
            if overrides.print_config {
                println!("{}", config.to_json_pretty());
                return Ok(());
            }
            let summary = run_experiment(&config, overrides.jobs)?;
            println!("wrote {} runs to {}", summary.runs.len(), summary.output_dir.display());
            if let Some(r) = summary.mean_ratio() {
                println!("mean professional ratio after burn-in: {r:.4}");
            }
            if let Some(t) = &summary.trend {
                println!("mean trend slope: {:.3e} (t = {:.3}, p = {:.4})", t.test.mean, t.test.t, t.test.p_value);
            }
            for w in &summary.warnings {
                eprintln!("warning: {w}");
            }
        }
        Command::Sweep { config, axis, values, overrides } => {
            let config = overrides.apply(load_config(&config)?)?;
            let spec = SweepSpec::parse(SweepAxis::parse(&axis)?, values.as_deref())?;
            if overrides.print_config {
                for v in &spec.values {
                    println!("{}", spec.apply(&config, v)?.to_json_pretty());
                }
                return Ok(());
            }
            for row in run_sweep(&config, &spec, overrides.jobs)? {
                println!(
                    "{} = {}: final ratio {}, trend slope {}",
                    axis,
                    row.axis_value,
                    row.mean_final_ratio.map(|v| format!("{v:.4}")).unwrap_or_else(|| "undefined".into()),
                    row.trend_slope().map(|v| format!("{v:.3e}")).unwrap_or_else(|| "undefined".into()),
                );
            }
        }
        Command::Metrics { log_dir, out } => {
            let m = recompute_metrics(&log_dir, out.as_deref())?;
            println!("recomputed metrics for seed {}", m.seed);
        }
        Command::Render { metrics_dir } => {
            let (files, warnings) = render_metrics_dir(&metrics_dir)?;
            for f in files {
                println!("wrote {}", metrics_dir.join(f).display());
            }
            for w in warnings {
                eprintln!("warning: {w}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
