use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dnwr_cli::config::{parse_config, CliError, ExperimentConfig};
use dnwr_cli::{presets, runner};

#[derive(Parser)]
#[command(
    name = "dnwr",
    about = "Dirichlet-Neumann waveform relaxation experiments for the delayed \
             1-D reaction-diffusion equation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a config file or a named preset and write convergence CSVs
    Run {
        /// Path to a key-value config file, or a preset name
        target: String,
        /// Output CSV path (multi-configuration presets append a label to
        /// the file stem)
        #[arg(long)]
        output: Option<PathBuf>,
        /// Override the iteration cap
        #[arg(long = "max-iter")]
        max_iter: Option<usize>,
        /// Override the stopping tolerance
        #[arg(long)]
        tol: Option<f64>,
    },
    /// List the built-in presets
    ListPresets,
}

fn with_label(path: &Path, label: &str) -> PathBuf {
    if label.is_empty() {
        return path.to_path_buf();
    }
    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
    let mut name = format!("{stem}-{label}");
    if let Some(ext) = path.extension() {
        name.push('.');
        name.push_str(&ext.to_string_lossy());
    }
    path.with_file_name(name)
}

fn load_targets(target: &str) -> Result<(String, Vec<(String, ExperimentConfig)>), CliError> {
    if let Some(preset) = presets::find(target) {
        return Ok((preset.name.to_string(), preset.configs));
    }
    let path = Path::new(target);
    if !path.exists() {
        return Err(CliError::Usage(format!(
            "`{target}` is neither a preset name nor a config file; \
             see `dnwr list-presets`"
        )));
    }
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let config = parse_config(&text)?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "experiment".into());
    Ok((stem, vec![(String::new(), config)]))
}

fn run(
    target: &str,
    output: Option<PathBuf>,
    max_iter: Option<usize>,
    tol: Option<f64>,
) -> Result<(), CliError> {
    let (stem, mut configs) = load_targets(target)?;
    for (_, config) in &mut configs {
        if let Some(n) = max_iter {
            config.max_iterations = n;
        }
        if let Some(t) = tol {
            config.tolerance = t;
        }
    }
    for (label, config) in &configs {
        let base = output
            .clone()
            .or_else(|| config.output.clone())
            .unwrap_or_else(|| PathBuf::from(format!("{stem}.csv")));
        let path = with_label(&base, label);
        let result = runner::run_experiment(config, &path)?;
        for run in &result.runs {
            let summary = match run.record.iterations_to(result.tolerance) {
                Some(k) => format!("reached {:.1e} after {k} iterations", result.tolerance),
                None => format!(
                    "did not reach {:.1e} within {} iterations",
                    result.tolerance, run.record.iterations
                ),
            };
            println!("theta = {}: {summary}", run.theta);
        }
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn list_presets() {
    for preset in presets::all() {
        println!("{}", preset.name);
        println!("    {}", preset.description);
        if preset.configs.len() > 1 {
            let labels: Vec<&str> = preset.configs.iter().map(|(l, _)| l.as_str()).collect();
            println!("    configurations: {}", labels.join(", "));
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            target,
            output,
            max_iter,
            tol,
        } => match run(&target, output, max_iter, tol) {
            Ok(()) => ExitCode::SUCCESS,
            Err(err) => {
                eprintln!("error: {err}");
                ExitCode::FAILURE
            }
        },
        Command::ListPresets => {
            list_presets();
            ExitCode::SUCCESS
        }
    }
}
