use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use qwalk::config::SmoothingSetting;
use qwalk::runner::{simulate_single, with_workers};
use qwalk::table::format_sig15;
use qwalk::{
    run_experiment, run_oracle, workers_from_env, CliError, ExperimentConfig, Format, Lattice,
    Observable, Overrides, Result,
};

#[derive(Parser)]
#[command(
    name = "qwalk",
    version,
    about = "Disordered coined quantum walks on one-dimensional lattices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve one realization and dump its amplitudes at the snapshot times.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Index into the disorder list.
        #[arg(long, default_value_t = 0)]
        w_index: usize,
        #[arg(long, default_value_t = 0)]
        realization: usize,
    },
    /// Run the disorder ensemble and emit the observable table.
    Ensemble {
        #[command(flatten)]
        common: Common,
    },
    /// Compare the clean walk against its exact Fourier-integral solution.
    Oracle {
        #[command(flatten)]
        common: Common,
    },
    /// Check a configuration and print the resolved settings.
    Validate {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// TOML configuration file; flags override its keys.
    #[arg(long, short)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_lattice)]
    lattice: Option<Lattice>,
    #[arg(long)]
    sites: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated disorder strengths.
    #[arg(long, value_delimiter = ',')]
    disorder: Option<Vec<f64>>,
    /// Comma-separated snapshot times.
    #[arg(long, value_delimiter = ',')]
    snapshots: Option<Vec<usize>>,
    /// Comma-separated observable names.
    #[arg(long, value_delimiter = ',', value_parser = parse_observable)]
    observables: Option<Vec<Observable>>,
    #[arg(long)]
    stride: Option<usize>,
    #[arg(long, value_parser = parse_format)]
    format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// `gcv` or a positive penalty weight.
    #[arg(long, value_parser = parse_smoothing)]
    smoothing: Option<SmoothingSetting>,
    /// Comma-separated oracle comparison times.
    #[arg(long, value_delimiter = ',')]
    oracle_times: Option<Vec<usize>>,
    #[arg(long)]
    quad_points: Option<usize>,
}

fn parse_lattice(s: &str) -> std::result::Result<Lattice, String> {
    match s {
        "line" => Ok(Lattice::Line),
        "ring" => Ok(Lattice::Ring),
        "segment" => Ok(Lattice::Segment),
        _ => Err("expected line, ring or segment".into()),
    }
}

fn parse_observable(s: &str) -> std::result::Result<Observable, String> {
    Observable::parse(s).ok_or_else(|| {
        let names: Vec<_> = Observable::ALL.iter().map(|o| o.name()).collect();
        format!("expected one of {}", names.join(", "))
    })
}

fn parse_format(s: &str) -> std::result::Result<Format, String> {
    match s {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        _ => Err("expected csv or json".into()),
    }
}

fn parse_smoothing(s: &str) -> std::result::Result<SmoothingSetting, String> {
    SmoothingSetting::parse(s).ok_or_else(|| "expected gcv or a number".into())
}

impl Common {
    fn resolve(self) -> Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        config.apply(Overrides {
            lattice: self.lattice,
            sites: self.sites,
            steps: self.steps,
            realizations: self.realizations,
            master_seed: self.seed,
            disorder: self.disorder,
            snapshot_times: self.snapshots,
            observables: self.observables,
            scalar_stride: self.stride,
            format: self.format,
            output: self.output,
            smoothing: self.smoothing,
            oracle_times: self.oracle_times,
            quad_points: self.quad_points,
        });
        config.validate()?;
        Ok(config)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::config(
                e.kind().to_string() + ": " + e.to_string().lines().next().unwrap_or(""),
            );
            return fail(&err);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.category().exit_code() as u8)
}

fn run(cli: Cli) -> Result<()> {
    let workers = workers_from_env()?;
    match cli.command {
        Command::Simulate {
            common,
            w_index,
            realization,
        } => {
            let config = common.resolve()?;
            let states = with_workers(workers, || simulate_single(&config, w_index, realization))??;
            let text = render_states(&states, config.output.format);
            write_out(&text, config.output.path.as_deref())
        }
        Command::Ensemble { common } => {
            let config = common.resolve()?;
            let table = with_workers(workers, || run_experiment(&config))??;
            table.emit(config.output.format, config.output.path.as_deref())
        }
        Command::Oracle { common } => {
            let config = common.resolve()?;
            let table = with_workers(workers, || run_oracle(&config))??;
            table.emit(config.output.format, config.output.path.as_deref())
        }
        Command::Validate { common } => {
            let config = common.resolve()?;
            let summary = Summary::new(&config, workers);
            let text = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";
            write_out(&text, None)
        }
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    valid: bool,
    sites: usize,
    snapshot_times: Vec<usize>,
    workers: Option<usize>,
    config: &'a ExperimentConfig,
}

impl<'a> Summary<'a> {
    fn new(config: &'a ExperimentConfig, workers: Option<usize>) -> Self {
        Summary {
            valid: true,
            sites: config.sites(),
            snapshot_times: config.snapshot_times(),
            workers,
            config,
        }
    }
}

#[derive(Serialize)]
struct AmplitudeRow {
    t: usize,
    x: i64,
    up_re: f64,
    up_im: f64,
    down_re: f64,
    down_im: f64,
}

fn render_states(states: &[qwalk_core::WalkState], format: Format) -> String {
    let rows = states.iter().flat_map(|s| {
        let g = s.geometry();
        (0..g.sites()).map(move |i| {
            let [up, down] = s.spinor(i);
            AmplitudeRow {
                t: s.time(),
                x: g.position(i),
                up_re: up.re,
                up_im: up.im,
                down_re: down.re,
                down_im: down.im,
            }
        })
    });
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["t", "x", "up_re", "up_im", "down_re", "down_im"])
                .expect("writing to memory cannot fail");
            for r in rows {
                w.write_record([
                    r.t.to_string(),
                    r.x.to_string(),
                    format_sig15(r.up_re),
                    format_sig15(r.up_im),
                    format_sig15(r.down_re),
                    format_sig15(r.down_im),
                ])
                .expect("writing to memory cannot fail");
            }
            String::from_utf8(w.into_inner().expect("flush to memory"))
                .expect("CSV output is UTF-8")
        }
        Format::Json => {
            let rows: Vec<_> = rows.collect();
            serde_json::to_string_pretty(&rows).expect("rows serialize") + "\n"
        }
    }
}

fn write_out(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}
