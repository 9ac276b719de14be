use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use greenroute::mspnd::brute_force_mspnd;
use greenroute::net::{DuplexMode, Network, TrafficMatrix};
use greenroute::routing::mlu;
use greenroute::scalar::{parse_decimal, Rational};

use workbench::activation_csv::{read_activation, write_activation};
use workbench::config::{parse_config, parse_lengths, parse_mode};
use workbench::experiment::{run_algorithm, Cell, SolveOptions};
use workbench::preprocess::{build_network, normalize_traffic};
use workbench::{
    emit_report, run_experiment, Algorithm, LengthMode, RepetitaInstance, ReportFormat,
};

#[derive(Parser)]
#[command(
    name = "greenroute",
    version,
    about = "Switch off network connections while keeping traffic routable"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance with one algorithm.
    Solve(SolveArgs),
    /// Run a batch described by a TOML file.
    Bench {
        config: PathBuf,
        #[arg(long, default_value = "csv")]
        format: ReportFormat,
        /// Report destination; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maximum link utilization of an activation on each matrix.
    Evaluate {
        #[command(flatten)]
        instance: InstanceArgs,
        /// `arc_id,chi` csv.
        #[arg(long)]
        activation: PathBuf,
    },
    /// Exhaustive MSPND optimum for small instances.
    Oracle {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Demand file to optimize for, by position.
        #[arg(long, default_value_t = 0)]
        matrix: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct InstanceArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, num_args = 1.., required = true)]
    demands: Vec<PathBuf>,
    #[arg(long, value_parser = parse_rho, default_value = "1/2")]
    rho: Rational,
    #[arg(long, default_value_t = 1)]
    mu: u32,
    #[arg(long, value_parser = parse_mode, default_value = "simplex")]
    mode: DuplexMode,
    #[arg(long, value_parser = parse_lengths, default_value = "given")]
    lengths: LengthMode,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    algorithm: Algorithm,
    #[command(flatten)]
    instance: InstanceArgs,
    /// Demand file traffic-aware algorithms optimize for, by position.
    #[arg(long, default_value_t = 0)]
    matrix: usize,
    /// Seconds.
    #[arg(long, default_value_t = 600.0)]
    time_limit: f64,
    #[arg(long, value_parser = parse_switch, default_value = "on")]
    strengthening: bool,
    /// Activation csv destination.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: ReportFormat,
}

fn parse_rho(s: &str) -> Result<Rational, String> {
    let r = parse_decimal(s).ok_or_else(|| format!("cannot read {s:?} as a number"))?;
    if r <= Rational::from_integer(0.into()) || r >= Rational::from_integer(1.into()) {
        return Err("rho must lie strictly between 0 and 1".into());
    }
    Ok(r)
}

fn parse_switch(s: &str) -> Result<bool, String> {
    match s {
        "on" => Ok(true),
        "off" => Ok(false),
        _ => Err(format!("expected on or off, got {s:?}")),
    }
}

struct Prepared {
    inst: RepetitaInstance,
    net: Network,
    /// Normalized and rho-scaled; `None` for matrices cut off in the full network.
    scaled: Vec<Option<TrafficMatrix>>,
}

fn prepare(args: &InstanceArgs) -> Result<Prepared> {
    let inst = RepetitaInstance::load(None, &args.graph, &args.demands)?;
    let net = build_network(&inst.graph, args.mode, args.lengths, args.mu)?;
    let mut scaled = Vec::new();
    for (id, t) in inst.matrix_ids.iter().zip(&inst.matrices) {
        match normalize_traffic(&net, t) {
            Ok(t) => scaled.push(Some(t.scaled(&args.rho)?)),
            Err(e) => {
                eprintln!("warning: {id}: {e}");
                scaled.push(None);
            }
        }
    }
    Ok(Prepared { inst, net, scaled })
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn solve(args: SolveArgs) -> Result<()> {
    if !(args.time_limit.is_finite() && args.time_limit > 0.0) {
        bail!("time limit must be positive");
    }
    let p = prepare(&args.instance)?;
    let cell = Cell {
        instance: &p.inst.id,
        rho: &args.instance.rho,
        mu: args.instance.mu,
        mode: args.instance.mode,
    };
    let (matrix, traffic) = if args.algorithm.traffic_aware() {
        let Some(t) = p.scaled.get(args.matrix) else {
            bail!("no demand file at position {}", args.matrix);
        };
        let Some(t) = t else {
            bail!("matrix {} has a demand without a path", args.matrix);
        };
        (p.inst.matrix_ids[args.matrix].clone(), t.clone())
    } else {
        ("all".to_string(), TrafficMatrix::new(p.net.num_vertices()))
    };
    let opts = SolveOptions {
        time_limit: Some(Duration::from_secs_f64(args.time_limit)),
        strengthening: args.strengthening,
    };
    let outcome = run_algorithm(args.algorithm, &p.net, &traffic, &args.instance.rho, &opts);
    let row = cell.outcome_row(args.algorithm, &matrix, &p.net, &outcome, &p.scaled);
    print!("{}", emit_report(&[row], args.format));
    if let (Some(path), Some(act)) = (&args.out, &outcome.activation) {
        write_out(Some(path), &write_activation(act))?;
    }
    Ok(())
}

fn bench(config: &Path, format: ReportFormat, out: Option<&Path>) -> Result<ExitCode> {
    let text =
        fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
    let base = config.parent().unwrap_or(Path::new("."));
    let (config, specs) = match parse_config(&text, base) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(2));
        }
    };
    let mut instances = Vec::with_capacity(specs.len());
    for spec in &specs {
        instances.push(RepetitaInstance::load(
            spec.id.as_deref(),
            &spec.graph,
            &spec.demands,
        )?);
    }
    let rows = run_experiment(&config, &instances);
    write_out(out, &emit_report(&rows, format))?;
    Ok(ExitCode::SUCCESS)
}

fn evaluate(instance: &InstanceArgs, activation: &Path) -> Result<()> {
    let p = prepare(instance)?;
    let text = fs::read_to_string(activation)
        .with_context(|| format!("reading {}", activation.display()))?;
    let act = read_activation(&p.net, &text)?;
    println!("matrix,mlu");
    for (id, t) in p.inst.matrix_ids.iter().zip(&p.scaled) {
        let value = match t {
            Some(t) => mlu(&p.net, &act, t).to_string(),
            None => "inf".to_string(),
        };
        println!("{id},{value}");
    }
    Ok(())
}

fn oracle(instance: &InstanceArgs, matrix: usize, out: Option<&Path>) -> Result<()> {
    let p = prepare(instance)?;
    let Some(Some(t)) = p.scaled.get(matrix) else {
        bail!("no usable demand file at position {matrix}");
    };
    let act = brute_force_mspnd(&p.net, t)?;
    eprintln!("optimum: {} connections", act.value());
    write_out(out, &write_activation(&act))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Solve(args) => solve(args).map(|()| ExitCode::SUCCESS),
        Command::Bench {
            config,
            format,
            out,
        } => bench(&config, format, out.as_deref()),
        Command::Evaluate {
            instance,
            activation,
        } => evaluate(&instance, &activation).map(|()| ExitCode::SUCCESS),
        Command::Oracle {
            instance,
            matrix,
            out,
        } => oracle(&instance, matrix, out.as_deref()).map(|()| ExitCode::SUCCESS),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
