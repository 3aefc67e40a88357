//! The three multi-subdomain DNWR arrangements: iteration schedules over
//! subdomain solves, the relaxation update of the interface waveforms, and
//! the outer convergence loop.
//!
//! Every iteration consumes the previous traces h^{k-1} only and publishes
//! h^k after all solves of the iteration completed, so the schedule within
//! one iteration is free to run its independent solves concurrently
//! (red-black phases, the two central-outward branches) without changing
//! the result.

use rayon::prelude::*;

use crate::error::SolverError;
use crate::model::{
    check_same_shape, ConvergenceRecord, Decomposition, InterfaceTrace, IterationRecord, Mode,
    ProblemSpec, Side, SpaceTimeGrid, StopReason, SubdomainField,
};
use crate::oracle::interface_norm;
use crate::stepper::{
    extract_coupling_flux, extract_dirichlet_trace, solve_subdomain, EndCondition,
};

/// Assignment of Dirichlet/Neumann sides and solve order across the strip.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ArrangementKind {
    /// Left-to-right sequential sweep: Dirichlet solve in the first strip,
    /// then mixed Neumann-Dirichlet solves in the remaining ones.
    Sweep,
    /// Dirichlet solves on the odd strips in parallel, then Neumann solves
    /// on the even strips in parallel.
    RedBlack,
    /// Dirichlet solve in the central strip, then the two branches march
    /// outward with mixed conditions; needs an odd strip count.
    CentralOutward,
}

impl ArrangementKind {
    pub fn name(&self) -> &'static str {
        match self {
            ArrangementKind::Sweep => "sweep",
            ArrangementKind::RedBlack => "red-black",
            ArrangementKind::CentralOutward => "central-outward",
        }
    }

    /// Check compatibility with a subdomain count.
    pub fn validate(&self, subdomains: usize) -> Result<(), SolverError> {
        match self {
            ArrangementKind::Sweep | ArrangementKind::RedBlack => {
                if subdomains < 2 {
                    return Err(SolverError::InvalidParameter(format!(
                        "{} needs at least 2 subdomains, got {subdomains}",
                        self.name()
                    )));
                }
            }
            ArrangementKind::CentralOutward => {
                if subdomains < 3 || subdomains % 2 == 0 {
                    return Err(SolverError::EvenSubdomainCount { count: subdomains });
                }
            }
        }
        Ok(())
    }
}

/// Outer-loop parameters of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunParams {
    /// Relaxation weight, in (0, 1].
    pub theta: f64,
    /// Stop once the aggregate interface norm falls at or below this.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub mode: Mode,
}

impl RunParams {
    pub fn new(
        theta: f64,
        tolerance: f64,
        max_iterations: usize,
        mode: Mode,
    ) -> Result<Self, SolverError> {
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(SolverError::InvalidParameter(format!(
                "theta must lie in (0, 1], got {theta}"
            )));
        }
        if !(tolerance > 0.0) {
            return Err(SolverError::InvalidParameter(format!(
                "tolerance must be positive, got {tolerance}"
            )));
        }
        if max_iterations == 0 {
            return Err(SolverError::InvalidParameter(
                "max_iterations must be at least 1".into(),
            ));
        }
        Ok(Self {
            theta,
            tolerance,
            max_iterations,
            mode,
        })
    }
}

/// State of the outer iteration: current traces h^k, the fields of the
/// latest iteration, and the norm history so far.
#[derive(Clone, Debug)]
pub struct DnwrState {
    pub iteration: usize,
    pub traces: Vec<InterfaceTrace>,
    pub fields: Vec<SubdomainField>,
    pub norm_history: Vec<IterationRecord>,
}

impl DnwrState {
    /// Seed the iteration with initial traces. In error mode the norm of
    /// the initial guess is recorded as iteration 0 (the exact interface
    /// values are zero, so it is directly meaningful).
    pub fn initial(traces: Vec<InterfaceTrace>, grid: &SpaceTimeGrid, mode: Mode) -> Self {
        let norm_history = match mode {
            Mode::Error => {
                let per: Vec<f64> = traces.iter().map(|t| interface_norm(t, grid)).collect();
                vec![IterationRecord::new(0, per)]
            }
            Mode::Full => Vec::new(),
        };
        Self {
            iteration: 0,
            traces,
            fields: Vec::new(),
            norm_history,
        }
    }
}

/// Relaxed interface update `theta * new + (1 - theta) * old`.
pub fn relax_update(
    theta: f64,
    new_trace: &InterfaceTrace,
    old_trace: &InterfaceTrace,
) -> Result<InterfaceTrace, SolverError> {
    check_same_shape(new_trace, old_trace)?;
    Ok(InterfaceTrace {
        interface_index: new_trace.interface_index,
        values: new_trace
            .values
            .iter()
            .zip(&old_trace.values)
            .map(|(n, o)| theta * n + (1.0 - theta) * o)
            .collect(),
    })
}

/// Dirichlet data at the physical boundary: zero for the error equations,
/// sampled outer data for the full problem.
fn physical_trace(
    spec: &ProblemSpec,
    grid: &SpaceTimeGrid,
    decomp: &Decomposition,
    side: Side,
    mode: Mode,
) -> InterfaceTrace {
    let index = match side {
        Side::Left => 0,
        Side::Right => decomp.subdomain_count(),
    };
    match mode {
        Mode::Error => InterfaceTrace::zeros(index, grid),
        Mode::Full => {
            let f = match side {
                Side::Left => &spec.outer_bc.0,
                Side::Right => &spec.outer_bc.1,
            };
            InterfaceTrace::sampled(index, grid, f)
        }
    }
}

fn neumann_from(
    spec: &ProblemSpec,
    grid: &SpaceTimeGrid,
    field: &SubdomainField,
    side: Side,
    mode: Mode,
) -> Result<EndCondition, SolverError> {
    Ok(EndCondition::Neumann(extract_coupling_flux(
        spec, grid, field, side, mode,
    )?))
}

/// Compute the new norms and assemble the successor state.
fn finish_iteration(
    state: &DnwrState,
    grid: &SpaceTimeGrid,
    params: &RunParams,
    new_traces: Vec<InterfaceTrace>,
    fields: Vec<SubdomainField>,
) -> Result<DnwrState, SolverError> {
    let per: Result<Vec<f64>, SolverError> = new_traces
        .iter()
        .zip(&state.traces)
        .map(|(new, old)| match params.mode {
            Mode::Error => Ok(interface_norm(new, grid)),
            Mode::Full => Ok(interface_norm(&new.difference(old)?, grid)),
        })
        .collect();
    let mut norm_history = state.norm_history.clone();
    norm_history.push(IterationRecord::new(state.iteration + 1, per?));
    Ok(DnwrState {
        iteration: state.iteration + 1,
        traces: new_traces,
        fields,
        norm_history,
    })
}

/// One sweep iteration: Dirichlet solve in Ω_1, then left to right each
/// Ω_j takes the Neumann flux of its left neighbour at Γ_{j-1} and the
/// Dirichlet trace h_{j}^{k-1} at Γ_j. Every interior interface then
/// relaxes toward the trace of the Neumann-side solution.
pub fn iterate_sweep(
    state: &DnwrState,
    spec: &ProblemSpec,
    grid: &SpaceTimeGrid,
    decomp: &Decomposition,
    params: &RunParams,
) -> Result<DnwrState, SolverError> {
    let s = decomp.subdomain_count();
    let h = &state.traces;
    let mode = params.mode;

    let mut fields: Vec<SubdomainField> = Vec::with_capacity(s);
    let left = EndCondition::Dirichlet(physical_trace(spec, grid, decomp, Side::Left, mode));
    let right = EndCondition::Dirichlet(h[0].clone());
    fields.push(solve_subdomain(spec, grid, decomp, 1, &left, &right, mode)?);
    for j in 2..=s {
        let left = neumann_from(spec, grid, &fields[j - 2], Side::Right, mode)?;
        let right = if j < s {
            EndCondition::Dirichlet(h[j - 1].clone())
        } else {
            EndCondition::Dirichlet(physical_trace(spec, grid, decomp, Side::Right, mode))
        };
        fields.push(solve_subdomain(spec, grid, decomp, j, &left, &right, mode)?);
    }

    let new_traces: Result<Vec<InterfaceTrace>, SolverError> = (1..s)
        .map(|i| {
            let raw = extract_dirichlet_trace(&fields[i], Side::Left);
            relax_update(params.theta, &raw, &h[i - 1])
        })
        .collect();
    finish_iteration(state, grid, params, new_traces?, fields)
}

/// One red-black iteration: parallel Dirichlet solves on the odd strips,
/// then parallel Neumann solves on the even strips with fluxes from phase
/// one. Every interior interface relaxes toward the Dirichlet trace of its
/// adjacent even (Neumann-solved) strip.
pub fn iterate_redblack(
    state: &DnwrState,
    spec: &ProblemSpec,
    grid: &SpaceTimeGrid,
    decomp: &Decomposition,
    params: &RunParams,
) -> Result<DnwrState, SolverError> {
    let s = decomp.subdomain_count();
    let h = &state.traces;
    let mode = params.mode;

    let dirichlet_at = |i: usize| -> EndCondition {
        if i == 0 {
            EndCondition::Dirichlet(physical_trace(spec, grid, decomp, Side::Left, mode))
        } else if i == s {
            EndCondition::Dirichlet(physical_trace(spec, grid, decomp, Side::Right, mode))
        } else {
            EndCondition::Dirichlet(h[i - 1].clone())
        }
    };

    let odd: Vec<usize> = (1..=s).step_by(2).collect();
    let odd_fields: Vec<Result<SubdomainField, SolverError>> = odd
        .par_iter()
        .map(|&j| {
            let left = dirichlet_at(j - 1);
            let right = dirichlet_at(j);
            solve_subdomain(spec, grid, decomp, j, &left, &right, mode)
        })
        .collect();

    let mut slots: Vec<Option<SubdomainField>> = (0..s).map(|_| None).collect();
    for (&j, field) in odd.iter().zip(odd_fields) {
        slots[j - 1] = Some(field?);
    }

    let even: Vec<usize> = (2..=s).step_by(2).collect();
    let even_fields: Vec<Result<SubdomainField, SolverError>> = even
        .par_iter()
        .map(|&j| {
            let left = neumann_from(
                spec,
                grid,
                slots[j - 2].as_ref().unwrap(),
                Side::Right,
                mode,
            )?;
            let right = if j == s {
                EndCondition::Dirichlet(physical_trace(spec, grid, decomp, Side::Right, mode))
            } else {
                neumann_from(spec, grid, slots[j].as_ref().unwrap(), Side::Left, mode)?
            };
            solve_subdomain(spec, grid, decomp, j, &left, &right, mode)
        })
        .collect();
    for (&j, field) in even.iter().zip(even_fields) {
        slots[j - 1] = Some(field?);
    }
    let fields: Vec<SubdomainField> = slots.into_iter().map(|f| f.unwrap()).collect();

    let new_traces: Result<Vec<InterfaceTrace>, SolverError> = (1..s)
        .map(|m| {
            // The even strip adjacent to Γ_m: strip m when m is even
            // (its right end), strip m+1 when m is odd (its left end).
            let raw = if m % 2 == 0 {
                extract_dirichlet_trace(&fields[m - 1], Side::Right)
            } else {
                extract_dirichlet_trace(&fields[m], Side::Left)
            };
            relax_update(params.theta, &raw, &h[m - 1])
        })
        .collect();
    finish_iteration(state, grid, params, new_traces?, fields)
}

/// One central-outward iteration on S = 2n+1 strips: Dirichlet solve in
/// the central strip, then the left branch marches i = n..1 and the right
/// branch j = n+2..2n+1, each strip taking the Neumann flux of its inner
/// neighbour and the Dirichlet trace h^{k-1} on its outer interface. The
/// two branches are independent and run concurrently.
pub fn iterate_central(
    state: &DnwrState,
    spec: &ProblemSpec,
    grid: &SpaceTimeGrid,
    decomp: &Decomposition,
    params: &RunParams,
) -> Result<DnwrState, SolverError> {
    let s = decomp.subdomain_count();
    ArrangementKind::CentralOutward.validate(s)?;
    let n = (s - 1) / 2;
    let center = n + 1;
    let h = &state.traces;
    let mode = params.mode;

    let center_field = {
        let left = EndCondition::Dirichlet(h[n - 1].clone());
        let right = EndCondition::Dirichlet(h[n].clone());
        solve_subdomain(spec, grid, decomp, center, &left, &right, mode)?
    };

    let left_branch = || -> Result<Vec<SubdomainField>, SolverError> {
        // solved for i = n down to 1, stored innermost-first
        let mut branch: Vec<SubdomainField> = Vec::with_capacity(n);
        for i in (1..=n).rev() {
            let inner = if i == n {
                &center_field
            } else {
                branch.last().unwrap()
            };
            let right = neumann_from(spec, grid, inner, Side::Left, mode)?;
            let left = if i == 1 {
                EndCondition::Dirichlet(physical_trace(spec, grid, decomp, Side::Left, mode))
            } else {
                EndCondition::Dirichlet(h[i - 2].clone())
            };
            branch.push(solve_subdomain(spec, grid, decomp, i, &left, &right, mode)?);
        }
        Ok(branch)
    };
    let right_branch = || -> Result<Vec<SubdomainField>, SolverError> {
        let mut branch: Vec<SubdomainField> = Vec::with_capacity(n);
        for j in (n + 2)..=s {
            let inner = if j == n + 2 {
                &center_field
            } else {
                branch.last().unwrap()
            };
            let left = neumann_from(spec, grid, inner, Side::Right, mode)?;
            let right = if j == s {
                EndCondition::Dirichlet(physical_trace(spec, grid, decomp, Side::Right, mode))
            } else {
                EndCondition::Dirichlet(h[j - 1].clone())
            };
            branch.push(solve_subdomain(spec, grid, decomp, j, &left, &right, mode)?);
        }
        Ok(branch)
    };
    let (left_fields, right_fields) = rayon::join(left_branch, right_branch);
    let (left_fields, right_fields) = (left_fields?, right_fields?);

    let mut fields: Vec<SubdomainField> = Vec::with_capacity(s);
    fields.extend(left_fields.into_iter().rev());
    fields.push(center_field);
    fields.extend(right_fields);

    let new_traces: Result<Vec<InterfaceTrace>, SolverError> = (1..s)
        .map(|m| {
            // Γ_m takes the trace of the outward (Neumann-solved) side:
            // strip m for the left interfaces, strip m+1 for the right.
            let raw = if m <= n {
                extract_dirichlet_trace(&fields[m - 1], Side::Right)
            } else {
                extract_dirichlet_trace(&fields[m], Side::Left)
            };
            relax_update(params.theta, &raw, &h[m - 1])
        })
        .collect();
    finish_iteration(state, grid, params, new_traces?, fields)
}

/// Dispatch one iteration of the chosen arrangement.
pub fn iterate(
    arrangement: ArrangementKind,
    state: &DnwrState,
    spec: &ProblemSpec,
    grid: &SpaceTimeGrid,
    decomp: &Decomposition,
    params: &RunParams,
) -> Result<DnwrState, SolverError> {
    match arrangement {
        ArrangementKind::Sweep => iterate_sweep(state, spec, grid, decomp, params),
        ArrangementKind::RedBlack => iterate_redblack(state, spec, grid, decomp, params),
        ArrangementKind::CentralOutward => iterate_central(state, spec, grid, decomp, params),
    }
}

/// Result of a complete DNWR run.
#[derive(Clone, Debug)]
pub struct DnwrOutcome {
    pub record: ConvergenceRecord,
    /// Interface traces after the last iteration.
    pub traces: Vec<InterfaceTrace>,
    /// Subdomain fields of the last iteration.
    pub fields: Vec<SubdomainField>,
}

/// Run the outer loop until the aggregate interface norm falls at or below
/// the tolerance or `max_iterations` is reached. In error mode the norm is
/// the interface norm of h^k itself (the exact values are zero); in full
/// mode it is the norm of the increment h^k - h^{k-1}. Not converging is
/// not an error: the record's stop reason says which way the loop ended.
pub fn run_dnwr(
    spec: &ProblemSpec,
    grid: &SpaceTimeGrid,
    decomp: &Decomposition,
    arrangement: ArrangementKind,
    params: &RunParams,
    initial_traces: Vec<InterfaceTrace>,
) -> Result<DnwrOutcome, SolverError> {
    let s = decomp.subdomain_count();
    arrangement.validate(s)?;
    if initial_traces.len() != s - 1 {
        return Err(SolverError::ShapeMismatch {
            detail: format!(
                "{} initial traces for {} interior interfaces",
                initial_traces.len(),
                s - 1
            ),
        });
    }
    for (i, trace) in initial_traces.iter().enumerate() {
        if trace.interface_index != i + 1 || trace.len() != grid.num_levels() {
            return Err(SolverError::ShapeMismatch {
                detail: format!(
                    "initial trace {} has interface index {} and {} levels, expected {} and {}",
                    i,
                    trace.interface_index,
                    trace.len(),
                    i + 1,
                    grid.num_levels()
                ),
            });
        }
    }

    let mut state = DnwrState::initial(initial_traces, grid, params.mode);
    let mut stop_reason = StopReason::MaxIterations;
    for _ in 0..params.max_iterations {
        state = iterate(arrangement, &state, spec, grid, decomp, params)?;
        let aggregate = state.norm_history.last().unwrap().aggregate;
        if aggregate <= params.tolerance {
            stop_reason = StopReason::ToleranceMet;
            break;
        }
    }
    Ok(DnwrOutcome {
        record: ConvergenceRecord {
            history: state.norm_history,
            stop_reason,
            iterations: state.iteration,
        },
        traces: state.traces,
        fields: state.fields,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_grid, initialize_interfaces, time_fn, ProblemSpec};

    fn long_window() -> (ProblemSpec, SpaceTimeGrid, Decomposition) {
        let spec = ProblemSpec::homogeneous(1.0, 0.0, 0.028, 3.0, 10.0, (0.0, 5.0)).unwrap();
        let grid = build_grid(&spec, 0.1, 0.2).unwrap();
        let decomp = Decomposition::equal(&grid, 5).unwrap();
        (spec, grid, decomp)
    }

    fn error_params(theta: f64) -> RunParams {
        RunParams::new(theta, 1e-6, 100, Mode::Error).unwrap()
    }

    #[test]
    fn relax_with_theta_one_returns_new_trace() {
        let (_, grid, _) = long_window();
        let new = InterfaceTrace::sampled(1, &grid, &time_fn(|t| (2.0 * t).sin()));
        let old = InterfaceTrace::sampled(1, &grid, &time_fn(|t| t * t));
        let relaxed = relax_update(1.0, &new, &old).unwrap();
        assert_eq!(relaxed.values, new.values);
    }

    #[test]
    fn relax_halves_old_trace_against_zero() {
        let (_, grid, _) = long_window();
        let new = InterfaceTrace::zeros(1, &grid);
        let old = InterfaceTrace::sampled(1, &grid, &time_fn(|t| t * t));
        let relaxed = relax_update(0.5, &new, &old).unwrap();
        for (r, o) in relaxed.values.iter().zip(&old.values) {
            assert_eq!(*r, o / 2.0);
        }
    }

    #[test]
    fn relax_fixed_point_when_new_equals_old() {
        let (_, grid, _) = long_window();
        let old = InterfaceTrace::sampled(1, &grid, &time_fn(|t| (1.3 * t).sin()));
        for theta in [0.3, 0.5, 0.7, 1.0] {
            let relaxed = relax_update(theta, &old, &old).unwrap();
            for (r, o) in relaxed.values.iter().zip(&old.values) {
                assert!((r - o).abs() <= 1e-15 * o.abs());
            }
        }
    }

    #[test]
    fn relax_output_lies_between_old_and_new() {
        let (_, grid, _) = long_window();
        let new = InterfaceTrace::sampled(1, &grid, &time_fn(|t| (2.0 * t).sin()));
        let old = InterfaceTrace::sampled(1, &grid, &time_fn(|t| t - 3.0));
        for theta in [0.1, 0.5, 0.9, 1.0] {
            let relaxed = relax_update(theta, &new, &old).unwrap();
            for ((r, n), o) in relaxed.values.iter().zip(&new.values).zip(&old.values) {
                let (lo, hi) = if n < o { (*n, *o) } else { (*o, *n) };
                assert!(*r >= lo - 1e-14 && *r <= hi + 1e-14);
            }
        }
    }

    #[test]
    fn relax_rejects_mismatched_traces() {
        let (_, grid, _) = long_window();
        let a = InterfaceTrace::zeros(1, &grid);
        let b = InterfaceTrace::zeros(2, &grid);
        assert!(matches!(
            relax_update(0.5, &a, &b),
            Err(SolverError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn zero_traces_stay_zero_for_all_arrangements() {
        let (spec, grid, decomp) = long_window();
        let zeros: Vec<InterfaceTrace> = (1..=4).map(|i| InterfaceTrace::zeros(i, &grid)).collect();
        for arrangement in [
            ArrangementKind::Sweep,
            ArrangementKind::RedBlack,
            ArrangementKind::CentralOutward,
        ] {
            let state = DnwrState::initial(zeros.clone(), &grid, Mode::Error);
            let next = iterate(
                arrangement,
                &state,
                &spec,
                &grid,
                &decomp,
                &error_params(0.5),
            )
            .unwrap();
            for trace in &next.traces {
                assert!(trace.values.iter().all(|&v| v == 0.0));
            }
            for field in &next.fields {
                assert!(field.values.iter().flatten().all(|&v| v == 0.0));
            }
        }
    }

    #[test]
    fn run_with_zero_guess_stops_at_iteration_one() {
        let (spec, grid, decomp) = long_window();
        let zeros: Vec<InterfaceTrace> = (1..=4).map(|i| InterfaceTrace::zeros(i, &grid)).collect();
        let outcome = run_dnwr(
            &spec,
            &grid,
            &decomp,
            ArrangementKind::Sweep,
            &error_params(0.5),
            zeros,
        )
        .unwrap();
        assert_eq!(outcome.record.iterations, 1);
        assert_eq!(outcome.record.stop_reason, StopReason::ToleranceMet);
        assert_eq!(outcome.record.aggregate_at(1), Some(0.0));
    }

    #[test]
    fn sweep_aggregate_decreases_over_first_iterations() {
        let (spec, grid, decomp) = long_window();
        let traces = initialize_interfaces(&grid, &decomp, &[time_fn(|t| t * t)]).unwrap();
        let outcome = run_dnwr(
            &spec,
            &grid,
            &decomp,
            ArrangementKind::Sweep,
            &RunParams::new(0.5, 1e-14, 5, Mode::Error).unwrap(),
            traces,
        )
        .unwrap();
        let aggregates: Vec<f64> = outcome.record.history.iter().map(|r| r.aggregate).collect();
        assert_eq!(aggregates.len(), 6); // iteration 0 plus 5 iterations
        for w in aggregates.windows(2) {
            assert!(w[1] < w[0], "aggregate did not decrease: {aggregates:?}");
        }
    }

    #[test]
    fn redblack_converges_on_short_window() {
        let spec = ProblemSpec::homogeneous(1.0, 0.0, 0.028, 0.03, 0.1, (0.0, 5.0)).unwrap();
        let grid = build_grid(&spec, 0.1, 0.001).unwrap();
        let decomp = Decomposition::equal(&grid, 5).unwrap();
        let traces = initialize_interfaces(&grid, &decomp, &[time_fn(|t| t * t)]).unwrap();
        let outcome = run_dnwr(
            &spec,
            &grid,
            &decomp,
            ArrangementKind::RedBlack,
            &RunParams::new(0.5, 1e-6, 50, Mode::Error).unwrap(),
            traces,
        )
        .unwrap();
        assert_eq!(outcome.record.stop_reason, StopReason::ToleranceMet);
        assert!(outcome.record.iterations <= 50);
    }

    #[test]
    fn central_requires_odd_subdomain_count() {
        let spec = ProblemSpec::homogeneous(1.0, 0.0, 0.028, 3.0, 10.0, (0.0, 4.0)).unwrap();
        let grid = build_grid(&spec, 0.1, 0.2).unwrap();
        let decomp = Decomposition::equal(&grid, 4).unwrap();
        let traces: Vec<InterfaceTrace> =
            (1..=3).map(|i| InterfaceTrace::zeros(i, &grid)).collect();
        let err = run_dnwr(
            &spec,
            &grid,
            &decomp,
            ArrangementKind::CentralOutward,
            &error_params(0.5),
            traces,
        )
        .unwrap_err();
        assert!(matches!(err, SolverError::EvenSubdomainCount { count: 4 }));
    }

    #[test]
    fn arrangement_validation() {
        assert!(ArrangementKind::Sweep.validate(2).is_ok());
        assert!(ArrangementKind::Sweep.validate(1).is_err());
        assert!(ArrangementKind::RedBlack.validate(2).is_ok());
        assert!(ArrangementKind::CentralOutward.validate(3).is_ok());
        assert!(ArrangementKind::CentralOutward.validate(5).is_ok());
        assert!(ArrangementKind::CentralOutward.validate(1).is_err());
    }

    #[test]
    fn run_rejects_wrong_trace_count() {
        let (spec, grid, decomp) = long_window();
        let traces: Vec<InterfaceTrace> =
            (1..=3).map(|i| InterfaceTrace::zeros(i, &grid)).collect();
        assert!(matches!(
            run_dnwr(
                &spec,
                &grid,
                &decomp,
                ArrangementKind::Sweep,
                &error_params(0.5),
                traces
            ),
            Err(SolverError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn params_validation() {
        assert!(RunParams::new(0.0, 1e-6, 10, Mode::Error).is_err());
        assert!(RunParams::new(1.1, 1e-6, 10, Mode::Error).is_err());
        assert!(RunParams::new(0.5, 0.0, 10, Mode::Error).is_err());
        assert!(RunParams::new(0.5, 1e-6, 0, Mode::Error).is_err());
        assert!(RunParams::new(1.0, 1e-6, 1, Mode::Full).is_ok());
    }

    #[test]
    fn full_mode_records_increment_norms() {
        let m = crate::oracle::manufactured_problem(1.0, 0.0, 0.5, 0.25, (0.0, 5.0), 1.0).unwrap();
        let grid = build_grid(&m.spec, 0.1, 0.05).unwrap();
        let decomp = Decomposition::equal(&grid, 5).unwrap();
        let traces = initialize_interfaces(&grid, &decomp, &[time_fn(|t| t * t)]).unwrap();
        let outcome = run_dnwr(
            &m.spec,
            &grid,
            &decomp,
            ArrangementKind::Sweep,
            &RunParams::new(0.5, 1e-10, 100, Mode::Full).unwrap(),
            traces,
        )
        .unwrap();
        assert_eq!(outcome.record.stop_reason, StopReason::ToleranceMet);
        // full-mode history starts at iteration 1
        assert_eq!(outcome.record.history[0].iteration, 1);
        let last = outcome.record.history.last().unwrap();
        assert!(last.aggregate <= 1e-10);
    }
}
