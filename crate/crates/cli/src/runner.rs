//! Experiment execution: build the problem from a configuration, run the
//! DNWR loop once per relaxation weight, and emit the convergence history
//! as CSV.
//!
//! The CSV layout is fixed: a header
//! `theta,iteration,interface_index,interface_norm,aggregate_norm`, one row
//! per (theta, iteration, interface), a blank line, then a summary block
//! `theta,iterations_to_tolerance,stop_reason` with one row per theta.
//! Norms are printed with 17 significant digits so re-parsing reproduces
//! the in-memory values exactly; LF line endings, `.` decimal separator.

use std::fs;
use std::path::Path;

use dnwr_core::{
    build_grid, initialize_interfaces, manufactured_problem, run_dnwr, ConvergenceRecord,
    Decomposition, IterationRecord, Mode, ProblemSpec, RunParams, StopReason, TimeFn,
};

use crate::config::{CliError, ExperimentConfig, Strips};

/// Convergence record of one relaxation weight.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaRun {
    pub theta: f64,
    pub record: ConvergenceRecord,
}

/// In-memory result of one experiment (one CSV file).
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub runs: Vec<ThetaRun>,
    pub tolerance: f64,
}

fn problem_from(config: &ExperimentConfig) -> Result<ProblemSpec, CliError> {
    match config.mode {
        Mode::Error => Ok(ProblemSpec::homogeneous(
            config.nu,
            config.a1,
            config.a2,
            config.tau,
            config.horizon,
            config.domain,
        )?),
        // the flat config cannot carry arbitrary source/history data, so
        // full mode runs the built-in manufactured problem
        Mode::Full => Ok(manufactured_problem(
            config.nu,
            config.a1,
            config.a2,
            config.tau,
            config.domain,
            config.horizon,
        )?
        .spec),
    }
}

/// Execute every theta of the configuration and collect the records.
pub fn execute(config: &ExperimentConfig) -> Result<ExperimentResult, CliError> {
    let spec = problem_from(config)?;
    let grid = build_grid(&spec, config.dx, config.dt)?;
    let decomp = match &config.strips {
        Strips::EqualCount(n) => Decomposition::equal(&grid, *n)?,
        Strips::Sizes(sizes) => Decomposition::partition(&grid, sizes)?,
    };
    let inits: Vec<TimeFn> = config.initializers.iter().map(|i| i.to_fn()).collect();
    let traces = initialize_interfaces(&grid, &decomp, &inits)?;

    let mut runs = Vec::with_capacity(config.thetas.len());
    for &theta in &config.thetas {
        let params = RunParams::new(theta, config.tolerance, config.max_iterations, config.mode)?;
        let outcome = run_dnwr(
            &spec,
            &grid,
            &decomp,
            config.arrangement,
            &params,
            traces.clone(),
        )?;
        runs.push(ThetaRun {
            theta,
            record: outcome.record,
        });
    }
    Ok(ExperimentResult {
        runs,
        tolerance: config.tolerance,
    })
}

/// 17 significant digits: enough to reproduce any f64 exactly on re-parse.
fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

fn stop_reason_str(reason: StopReason) -> &'static str {
    match reason {
        StopReason::ToleranceMet => "tolerance_met",
        StopReason::MaxIterations => "max_iterations",
    }
}

/// Render the CSV text for a result. Pure function of the input, so two
/// runs of the same configuration produce byte-identical output.
pub fn render_csv(result: &ExperimentResult) -> String {
    let mut out = String::new();
    out.push_str("theta,iteration,interface_index,interface_norm,aggregate_norm\n");
    for run in &result.runs {
        for rec in &run.record.history {
            for (i, norm) in rec.per_interface.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    run.theta,
                    rec.iteration,
                    i + 1,
                    sig17(*norm),
                    sig17(rec.aggregate),
                ));
            }
        }
    }
    out.push('\n');
    out.push_str("theta,iterations_to_tolerance,stop_reason\n");
    for run in &result.runs {
        let reached = run
            .record
            .iterations_to(result.tolerance)
            .map(|k| k.to_string())
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{}\n",
            run.theta,
            reached,
            stop_reason_str(run.record.stop_reason),
        ));
    }
    out
}

/// Run the configuration and write its CSV to `path`.
pub fn run_experiment(
    config: &ExperimentConfig,
    path: &Path,
) -> Result<ExperimentResult, CliError> {
    let result = execute(config)?;
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|source| CliError::Io {
                path: parent.to_path_buf(),
                source,
            })?;
        }
    }
    fs::write(path, render_csv(&result)).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(result)
}

/// Summary line parsed back from a CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedSummary {
    pub theta: f64,
    pub iterations_to_tolerance: Option<usize>,
    pub stop_reason: String,
}

/// A CSV parsed back into per-theta histories and summary rows.
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedCsv {
    pub histories: Vec<(f64, Vec<IterationRecord>)>,
    pub summary: Vec<ParsedSummary>,
}

/// Re-parse an emitted CSV. Inverse of [`render_csv`] up to the grouping
/// of rows into iteration records.
pub fn parse_csv(text: &str) -> Result<ParsedCsv, String> {
    let mut sections = text.split("\n\n");
    let main = sections.next().ok_or("empty file")?;
    let summary_text = sections.next().ok_or("missing summary block")?;

    let mut histories: Vec<(f64, Vec<IterationRecord>)> = Vec::new();
    let mut lines = main.lines();
    let header = lines.next().ok_or("missing header")?;
    if header != "theta,iteration,interface_index,interface_norm,aggregate_norm" {
        return Err(format!("unexpected header `{header}`"));
    }
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(format!("bad row `{line}`"));
        }
        let theta: f64 = fields[0].parse().map_err(|_| "bad theta")?;
        let iteration: usize = fields[1].parse().map_err(|_| "bad iteration")?;
        let interface: usize = fields[2].parse().map_err(|_| "bad interface")?;
        let norm: f64 = fields[3].parse().map_err(|_| "bad norm")?;
        let aggregate: f64 = fields[4].parse().map_err(|_| "bad aggregate")?;

        if histories.last().map(|(t, _)| *t) != Some(theta) {
            histories.push((theta, Vec::new()));
        }
        let records = &mut histories.last_mut().unwrap().1;
        if records.last().map(|r| r.iteration) != Some(iteration) {
            records.push(IterationRecord {
                iteration,
                per_interface: Vec::new(),
                aggregate,
            });
        }
        let rec = records.last_mut().unwrap();
        if rec.per_interface.len() + 1 != interface {
            return Err(format!("interface indices out of order at `{line}`"));
        }
        rec.per_interface.push(norm);
        if rec.aggregate != aggregate {
            return Err(format!("inconsistent aggregate at `{line}`"));
        }
    }

    let mut summary = Vec::new();
    let mut lines = summary_text.lines();
    let header = lines.next().ok_or("missing summary header")?;
    if header != "theta,iterations_to_tolerance,stop_reason" {
        return Err(format!("unexpected summary header `{header}`"));
    }
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(format!("bad summary row `{line}`"));
        }
        summary.push(ParsedSummary {
            theta: fields[0].parse().map_err(|_| "bad theta")?,
            iterations_to_tolerance: if fields[1].is_empty() {
                None
            } else {
                Some(fields[1].parse().map_err(|_| "bad iteration count")?)
            },
            stop_reason: fields[2].to_string(),
        });
    }
    Ok(ParsedCsv { histories, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn arr3_long_aggregate_decreases() {
        let preset = presets::find("arr3-long").unwrap();
        let result = execute(&preset.configs[0].1).unwrap();
        let history = &result.runs[0].record.history;
        assert!(history.len() > 3);
        for w in history.windows(2) {
            assert!(
                w[1].aggregate < w[0].aggregate,
                "aggregate not decreasing: {} -> {}",
                w[0].aggregate,
                w[1].aggregate
            );
        }
        assert_eq!(result.runs[0].record.stop_reason, StopReason::ToleranceMet);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let preset = presets::find("arr3-short").unwrap();
        let result = execute(&preset.configs[0].1).unwrap();
        let text = render_csv(&result);
        let parsed = parse_csv(&text).unwrap();

        assert_eq!(parsed.histories.len(), result.runs.len());
        for ((theta, records), run) in parsed.histories.iter().zip(&result.runs) {
            assert_eq!(*theta, run.theta);
            assert_eq!(records.len(), run.record.history.len());
            for (a, b) in records.iter().zip(&run.record.history) {
                assert_eq!(a.iteration, b.iteration);
                assert_eq!(a.per_interface, b.per_interface);
                assert_eq!(a.aggregate, b.aggregate);
            }
        }
        assert_eq!(parsed.summary.len(), result.runs.len());
        for (s, run) in parsed.summary.iter().zip(&result.runs) {
            assert_eq!(s.theta, run.theta);
            assert_eq!(
                s.iterations_to_tolerance,
                run.record.iterations_to(result.tolerance)
            );
            assert_eq!(s.stop_reason, stop_reason_str(run.record.stop_reason));
        }
    }

    #[test]
    fn rendering_is_deterministic() {
        let preset = presets::find("two-subdomain-twostep").unwrap();
        let a = render_csv(&execute(&preset.configs[0].1).unwrap());
        let b = render_csv(&execute(&preset.configs[0].1).unwrap());
        assert_eq!(a, b);
        assert!(a.ends_with('\n'));
        assert!(!a.contains('\r'));
    }

    #[test]
    fn noncommensurate_delay_is_a_setup_error() {
        let mut config = presets::find("arr1-long").unwrap().configs.remove(0).1;
        config.dt = 0.4; // tau/dt = 7.5
        let err = execute(&config).unwrap_err();
        let message = err.to_string();
        assert!(message.contains("tau/dt"), "{message}");
        assert!(message.contains("7.5"), "{message}");
    }

    #[test]
    fn full_mode_runs_the_manufactured_problem() {
        let mut config = presets::find("arr3-long").unwrap().configs.remove(0).1;
        config.mode = Mode::Full;
        config.tau = 0.2;
        config.horizon = 1.0;
        config.dt = 0.05;
        config.tolerance = 1e-9;
        let result = execute(&config).unwrap();
        assert_eq!(result.runs[0].record.stop_reason, StopReason::ToleranceMet);
        // full-mode histories carry increment norms from iteration 1 on
        assert_eq!(result.runs[0].record.history[0].iteration, 1);
    }
}
