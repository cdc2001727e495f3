use clap::{Parser, Subcommand};
use metator::gen::Profile;
use metator::instance::Issue;
use metator::run;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "metator", version, about = "Invariants of metaplectic covers of tori")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Emit a seeded random instance file.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "default")]
        profile: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the lattice-side invariants of one instance.
    Invariants {
        file: PathBuf,
        #[arg(long)]
        cap: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute invariants and cross-check them against brute-force oracles.
    Check {
        file: PathBuf,
        #[arg(long)]
        cap: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate and check a corpus of seeded instances.
    Batch {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        count: u64,
        #[arg(long, default_value = "default")]
        profile: String,
        #[arg(long)]
        cap: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_profile(text: &str, out: Option<&PathBuf>) -> Result<Profile, i32> {
    text.parse().map_err(|rule| {
        let issue = Issue { path: "profile".into(), rule };
        let value = serde_json::json!({ "errors": [issue.to_value()] });
        let rendered = metator::report::render(&value);
        match out {
            None => print!("{rendered}"),
            Some(path) => {
                let _ = std::fs::write(path, rendered);
            }
        }
        metator::EXIT_INVALID
    })
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Gen { seed, profile, out } => match parse_profile(&profile, out.as_ref()) {
            Ok(p) => run::run_gen(seed, p, out.as_deref()),
            Err(code) => code,
        },
        Cmd::Invariants { file, cap, out } => {
            run::run_invariants(&file, cap, out.as_deref())
        }
        Cmd::Check { file, cap, out } => run::run_check(&file, cap, out.as_deref()),
        Cmd::Batch { seed, count, profile, cap, out } => {
            match parse_profile(&profile, out.as_ref()) {
                Ok(p) => run::run_batch(seed, count, p, cap, out.as_deref()),
                Err(code) => code,
            }
        }
    };
    std::process::exit(code);
}
