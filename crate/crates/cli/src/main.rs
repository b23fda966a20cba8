//! `qwalk`: quantum-walk quantumness sweeps from the command line.

mod commands;
mod params;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qwalk::{ChannelKind, Error};

use crate::commands::{CheckFailure, EvolveArgs, OracleArgs, Output};
use crate::params::{parse_init, parse_mode, usage, Axis, CoinArg, LoopArgs, Params, UsageError};
use crate::table::Format;

#[derive(Parser)]
#[command(
    name = "qwalk",
    version,
    about = "Quantumness of discrete-time quantum walks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a walk and print moments per recorded step.
    Evolve {
        #[command(flatten)]
        walk: WalkArgs,
        /// Number of steps.
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, default_value_t = 1)]
        record_every: usize,
        /// Add the full position distribution as a column.
        #[arg(long)]
        full_distribution: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Q, coherence and total quantumness, optionally swept.
    Quantumness {
        #[command(flatten)]
        walk: WalkArgs,
        #[arg(long)]
        tau: Option<usize>,
        /// `name:start:stop:count`; repeat for a grid.
        #[arg(long)]
        sweep: Vec<String>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Transport efficiency on a loop with a sink.
    Transport {
        #[command(flatten)]
        walk: WalkArgs,
        #[arg(long)]
        tau: Option<usize>,
        #[arg(long)]
        sweep: Vec<String>,
        /// `optimal` or `fixed:<p>`.
        #[arg(long, default_value = "optimal")]
        classical_mode: String,
        /// Emit a row every k steps instead of only at tau.
        #[arg(long)]
        record_every: Option<usize>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Compare the closed-form state with the step-by-step engine.
    OracleCheck {
        /// Coin to check; repeatable.
        #[arg(long)]
        coin: Vec<String>,
        #[arg(long, allow_hyphen_values = true)]
        init: Option<String>,
        #[arg(long, default_value_t = 30)]
        max_tau: usize,
        #[arg(long, default_value_t = 0)]
        random_coins: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct WalkArgs {
    /// `hadamard`, `identity`, `pauli-z` or `param:<alpha>,<beta>,<theta>`.
    #[arg(long, default_value = "hadamard", allow_hyphen_values = true)]
    coin: String,
    /// `"<eta>;<gamma>"`; `+` and `-` stand for eta = 0 and pi/2.
    #[arg(long, allow_hyphen_values = true)]
    init: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    init_eta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    init_gamma: Option<f64>,
    #[arg(long, default_value = "identity")]
    channel: String,
    #[arg(long = "channel-param", visible_alias = "q")]
    channel_param: Option<f64>,
    /// Loop size `n`; omit for the line.
    #[arg(long = "loop")]
    loop_n: Option<usize>,
    #[arg(long)]
    sink_site: Option<usize>,
    #[arg(long)]
    sink_r: Option<f64>,
    #[arg(long, default_value_t = 1)]
    start_site: usize,
}

#[derive(Args)]
struct OutArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
}

impl WalkArgs {
    fn resolve(
        &self,
        tau: Option<usize>,
        tau_flag: &str,
        tau_swept: bool,
    ) -> anyhow::Result<Params> {
        let coin = CoinArg::parse(&self.coin)?;
        let (mut eta, mut gamma) = match &self.init {
            Some(s) => parse_init(s)?,
            None => (0.0, 0.0),
        };
        if let Some(e) = self.init_eta {
            eta = e;
        }
        if let Some(g) = self.init_gamma {
            gamma = g;
        }
        let channel: ChannelKind = match self.channel.parse() {
            Ok(c) => c,
            Err(e) => return usage(format!("--channel: {e}")),
        };
        let tau = match (tau, tau_swept) {
            (Some(t), _) => t,
            (None, true) => 0,
            (None, false) => return usage(format!("--{tau_flag} is required")),
        };
        let looped = match self.loop_n {
            None => {
                if self.sink_site.is_some() || self.sink_r.is_some() {
                    return usage("--sink-site and --sink-r need --loop");
                }
                None
            }
            Some(n) => {
                let Some(sink_site) = self.sink_site else {
                    return usage("--loop needs --sink-site");
                };
                let Some(leak) = self.sink_r else {
                    return usage("--loop needs --sink-r");
                };
                Some(LoopArgs {
                    n,
                    sink_site,
                    leak,
                    start: self.start_site,
                })
            }
        };
        Ok(Params {
            coin,
            eta,
            gamma,
            channel,
            channel_param: self.channel_param,
            tau,
            looped,
        })
    }
}

fn parse_axes(sweep: &[String]) -> anyhow::Result<Vec<Axis>> {
    let axes: Vec<Axis> = sweep
        .iter()
        .map(|s| Axis::parse(s))
        .collect::<anyhow::Result<_>>()?;
    for (i, a) in axes.iter().enumerate() {
        if axes[..i].iter().any(|b| b.name == a.name) {
            return usage(format!("--sweep: axis {} given twice", a.name));
        }
    }
    Ok(axes)
}

fn writer(path: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            Box::new(BufWriter::new(File::create(p).map_err(|e| {
                UsageError(format!("--output {}: {e}", p.display()))
            })?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Evolve {
            walk,
            steps,
            record_every,
            full_distribution,
            out,
        } => {
            let params = walk.resolve(steps, "steps", false)?;
            let mut w = writer(&out.output)?;
            let o = Output {
                format: out.format,
                threads: out.threads,
            };
            commands::evolve(
                EvolveArgs {
                    params,
                    record_every,
                    full_distribution,
                },
                &o,
                &mut w,
            )?;
            w.flush()?;
        }
        Command::Quantumness {
            walk,
            tau,
            sweep,
            out,
        } => {
            let axes = parse_axes(&sweep)?;
            let params = walk.resolve(tau, "tau", axes.iter().any(|a| a.name == "tau"))?;
            let o = Output {
                format: out.format,
                threads: out.threads,
            };
            let mut buf = Vec::new();
            commands::quantumness(params, axes, &o, &mut buf)?;
            let mut w = writer(&out.output)?;
            w.write_all(&buf)?;
            w.flush()?;
        }
        Command::Transport {
            walk,
            tau,
            sweep,
            classical_mode,
            record_every,
            out,
        } => {
            let axes = parse_axes(&sweep)?;
            let params = walk.resolve(tau, "tau", axes.iter().any(|a| a.name == "tau"))?;
            let mode = parse_mode(&classical_mode)?;
            let o = Output {
                format: out.format,
                threads: out.threads,
            };
            let mut buf = Vec::new();
            commands::transport(params, axes, mode, record_every, &o, &mut buf)?;
            let mut w = writer(&out.output)?;
            w.write_all(&buf)?;
            w.flush()?;
        }
        Command::OracleCheck {
            coin,
            init,
            max_tau,
            random_coins,
            seed,
            output,
        } => {
            let coins = coin
                .iter()
                .map(|c| CoinArg::parse(c))
                .collect::<anyhow::Result<_>>()?;
            let init = match init {
                Some(s) => parse_init(&s)?,
                None => (0.0, 0.0),
            };
            let mut buf = Vec::new();
            let result = commands::oracle_check(
                OracleArgs {
                    coins,
                    init,
                    max_tau,
                    random_coins,
                    seed,
                },
                &mut buf,
            );
            let mut w = writer(&output)?;
            w.write_all(&buf)?;
            w.flush()?;
            result?;
        }
    }
    Ok(())
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    if e.downcast_ref::<CheckFailure>().is_some() {
        return 1;
    }
    match e.downcast_ref::<Error>() {
        Some(Error::IdentityViolation { .. }) | None => 1,
        Some(_) => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
