use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use netmap_core::harness::{apply_override, parse_entries, run_job, spec_from_entries, JobKind, JobSpec};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    EquiM,
    UniJ,
    MultiMReal,
    MultiJReal,
    Sweep,
    Analyze,
    Verify,
}

impl Command {
    fn kind_name(self) -> &'static str {
        match self {
            Command::EquiM => "equi-m",
            Command::UniJ => "uni-j",
            Command::MultiMReal => "multi-m-real",
            Command::MultiJReal => "multi-j-real",
            Command::Sweep => "sweep",
            Command::Analyze => "analyze",
            Command::Verify => "verify",
        }
    }
}

/// Render, measure and verify sets of coupled quadratic-map networks.
#[derive(Debug, Parser)]
#[command(name = "netmap", version)]
struct Cli {
    /// Job kind; must agree with `kind` in the config when both are given.
    #[arg(value_enum)]
    command: Command,

    /// Job configuration file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Override one config key, e.g. `--set render.resolution=200`.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    overrides: Vec<String>,

    /// Worker threads (default: all hardware threads).
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
}

fn load_spec(cli: &Cli) -> Result<JobSpec, String> {
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?,
        None => String::new(),
    };
    let mut entries = parse_entries(&text).map_err(|e| format!("config: {e}"))?;
    let wanted = cli.command.kind_name();
    match entries.iter().find(|e| e.section == "job" && e.key == "kind") {
        Some(entry) if entry.value != wanted => {
            return Err(format!(
                "subcommand {wanted} does not match kind = {} in the config",
                entry.value
            ))
        }
        Some(_) => {}
        None => apply_override(&mut entries, &format!("job.kind={wanted}")).map_err(|e| e.to_string())?,
    }
    for assignment in &cli.overrides {
        apply_override(&mut entries, assignment).map_err(|e| format!("--set {assignment}: {e}"))?;
    }
    spec_from_entries(&entries).map_err(|e| format!("config: {e}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let spec = match load_spec(&cli) {
        Ok(spec) => spec,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let report = match run_job(&spec) {
        Ok(report) => report,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    for line in &report.checks {
        println!("{}", line.to_text());
    }
    println!(
        "{}: wrote {} files to {}",
        spec.id,
        report.manifest.entries.len() + 1,
        spec.output_dir.display()
    );
    if spec.kind == JobKind::Verify && !report.passed() {
        return ExitCode::from(EXIT_VERIFY_FAILED);
    }
    ExitCode::SUCCESS
}
