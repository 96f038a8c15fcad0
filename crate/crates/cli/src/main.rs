use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser)]
#[command(name = "bitqpke", version, about = "Bit-oriented quantum public-key encryption toolkit")]
struct Cli {
    /// Seed for every random choice; drawn from the system and printed when absent.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a private key.
    Keygen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        p: usize,
        /// Directory that receives `private.key`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Issue public keys into a registry.
    Issue {
        /// Directory holding `private.key`.
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        registry: PathBuf,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Encrypt one bit with a registered public key, consuming it.
    Encrypt {
        #[arg(long)]
        registry: PathBuf,
        #[arg(long)]
        key_id: String,
        #[arg(long, value_parser = parse_bit, action = ArgAction::Set)]
        bit: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decrypt a ciphertext and print the bit.
    Decrypt {
        /// Directory holding `private.key`.
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        ct: PathBuf,
        /// Also run the measurement circuit on the dense simulator.
        #[arg(long)]
        dense: bool,
    },
    /// Numerically verify a security claim.
    Verify {
        #[arg(value_enum)]
        claim: Claim,
        #[command(flatten)]
        opts: VerifyOpts,
    },
    /// Run an adversary.
    Attack {
        #[command(subcommand)]
        attack: Attack,
    },
    /// Mixture of several ciphertext copies under one key, with trace
    /// distances to every other bit pattern.
    Multicopy {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        pattern: String,
    },
    /// Time full-ensemble enumeration.
    Bench {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
    },
    /// The baseline scheme.
    Py12 {
        #[command(subcommand)]
        command: Py12Command,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Claim {
    PerfectEncryption,
    Mixture,
    Prop1,
    Prop2,
}

#[derive(Clone, Copy, ValueEnum)]
enum Domain {
    Odd,
    Nonzero,
    All,
}

#[derive(Args)]
struct VerifyOpts {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// `k1` range for the mixture check.
    #[arg(long, value_enum, default_value_t = Domain::Odd)]
    domain: Domain,
    /// Random input states for the perfect-encryption check.
    #[arg(long, default_value_t = 20)]
    states: usize,
    /// Also report sampled-ensemble distances at these sizes (comma separated).
    #[arg(long, value_delimiter = ',')]
    sampled: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    reps: usize,
}

#[derive(Subcommand)]
enum Attack {
    /// Hadamard-measurement key recovery against the baseline scheme.
    Py12 {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        max_samples: usize,
        /// Repeat the attack and report the success rate.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// The same pipeline against dressed public keys.
    Newscheme {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 50)]
        max_samples: usize,
    },
    /// Recover a Boolean function from its full truth table.
    RecoverF {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 4)]
        n: usize,
    },
    /// Partial-key guessing attack.
    Guess {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
    },
}

#[derive(Subcommand)]
enum Py12Command {
    /// Generate a key; writes `py12.key` and `py12.pub` into `--out`.
    Keygen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        out: PathBuf,
    },
    Encrypt {
        #[arg(long = "pub")]
        public: PathBuf,
        #[arg(long, value_parser = parse_bit, action = ArgAction::Set)]
        bit: bool,
        #[arg(long)]
        out: PathBuf,
    },
    Decrypt {
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        ct: PathBuf,
    },
}

fn parse_bit(s: &str) -> Result<bool, String> {
    match s {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(format!("expected 0 or 1, got {s:?}")),
    }
}

fn parse_pattern(s: &str) -> anyhow::Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => bail!("pattern must contain only 0 and 1, got {s:?}"),
        })
        .collect()
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Whether the command met its claim or precondition.
pub enum Outcome {
    Success,
    Failure,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let result = commands::run(cli, &mut out);
    print!("{out}");
    match result {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Failure) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
