use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use unitree::cli::{run, write_artifacts, Command, RunConfig};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
    TreeBall,
    Quotient,
    Euler,
    Cusps,
    Stabilizer,
    Abelianization,
    FixedPoint,
    ClassGroup,
    Census,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Command {
        match c {
            Cmd::TreeBall => Command::TreeBall,
            Cmd::Quotient => Command::Quotient,
            Cmd::Euler => Command::Euler,
            Cmd::Cusps => Command::Cusps,
            Cmd::Stabilizer => Command::Stabilizer,
            Cmd::Abelianization => Command::Abelianization,
            Cmd::FixedPoint => Command::FixedPoint,
            Cmd::ClassGroup => Command::ClassGroup,
            Cmd::Census => Command::Census,
        }
    }
}

/// Quotients of the Bruhat-Tits tree of SU(3) over F_q(t).
#[derive(Parser, Debug)]
#[command(version)]
struct Args {
    #[arg(value_enum)]
    command: Cmd,
    /// TOML run configuration
    #[arg(long)]
    config: Option<PathBuf>,
    /// output directory (default: config `out`, else ./out)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    radius: Option<usize>,
    #[arg(long)]
    deg_bound: Option<i64>,
    /// recorded in the output; commands themselves are deterministic
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match &args.config {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    };
    let mut cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Some(r) = args.radius {
        cfg.radius = r;
    }
    if let Some(d) = args.deg_bound {
        cfg.deg_bound = d;
    }
    let cmd: Command = args.command.into();
    let dir = args.out.or(cfg.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
    match run(cmd, &cfg) {
        Ok(mut out) => {
            if let Some(s) = args.seed {
                out.json["seed"] = s.into();
            }
            if let Err(e) = write_artifacts(&dir, cmd, &out) {
                eprintln!("error: writing {}: {e}", dir.display());
                return ExitCode::from(1);
            }
            print!("{}", out.summary);
            ExitCode::from(out.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
