//! Backward-Euler finite-difference stepping of the delayed
//! reaction-diffusion operator on a single subdomain, with Dirichlet or
//! Neumann data at either end, plus trace and flux extraction.
//!
//! One step solves
//!
//! ```text
//! (1/dt + a1) u^{m+1} - nu^2 D_xx u^{m+1} = u^m/dt - a2 u(t_{m+1}-tau) + f(., t_{m+1})
//! ```
//!
//! with `D_xx` the 3-point second difference. Dirichlet ends pin the end
//! node to the trace value; Neumann ends impose the +x derivative through
//! ghost-node elimination, keeping the system tridiagonal.

use std::collections::VecDeque;

use crate::error::SolverError;
use crate::model::{
    Decomposition, EndKind, FluxTrace, InterfaceTrace, Mode, ProblemSpec, Side, SpaceTimeGrid,
    SubdomainField,
};

/// Boundary data for one end of a subdomain over the whole time window.
#[derive(Clone, Debug)]
pub enum EndCondition {
    Dirichlet(InterfaceTrace),
    Neumann(FluxTrace),
}

impl EndCondition {
    pub fn kind(&self) -> EndKind {
        match self {
            EndCondition::Dirichlet(_) => EndKind::Dirichlet,
            EndCondition::Neumann(_) => EndKind::Neumann,
        }
    }

    fn len(&self) -> usize {
        match self {
            EndCondition::Dirichlet(t) => t.len(),
            EndCondition::Neumann(t) => t.len(),
        }
    }
}

/// Ring of the most recent `delay_steps + 1` solution levels plus the
/// sampled history segment for t in [-tau, 0), backing the delayed term.
#[derive(Clone, Debug)]
pub struct DelayBuffer {
    delay_steps: usize,
    /// Sampled w0 at levels -delay_steps..=-1.
    history: Vec<Vec<f64>>,
    /// (level, values) for the most recent solution levels.
    ring: VecDeque<(usize, Vec<f64>)>,
}

impl DelayBuffer {
    /// `history[j]` must hold the values at level `j - delay_steps`
    /// (so `history.len() == delay_steps`).
    pub fn new(delay_steps: usize, history: Vec<Vec<f64>>) -> Self {
        assert_eq!(
            history.len(),
            delay_steps,
            "history must cover levels -k..=-1"
        );
        Self {
            delay_steps,
            history,
            ring: VecDeque::with_capacity(delay_steps + 2),
        }
    }

    /// Store the next solution level. Levels must be pushed consecutively
    /// starting from 0.
    pub fn push(&mut self, level: usize, values: Vec<f64>) {
        if let Some((last, _)) = self.ring.back() {
            assert_eq!(level, last + 1, "levels must be pushed in order");
        } else {
            assert_eq!(level, 0, "first pushed level must be 0");
        }
        self.ring.push_back((level, values));
        while self.ring.len() > self.delay_steps + 1 {
            self.ring.pop_front();
        }
    }

    /// Values at a (possibly negative) level: stored solution levels for
    /// `level >= 0`, sampled history for `level < 0`.
    pub fn lookup(&self, level: isize) -> &[f64] {
        if level < 0 {
            let idx = level + self.delay_steps as isize;
            assert!(idx >= 0, "level {level} is before the history window");
            &self.history[idx as usize]
        } else {
            let oldest = self.ring.front().expect("buffer is empty").0 as isize;
            let idx = level - oldest;
            assert!(
                idx >= 0 && (idx as usize) < self.ring.len(),
                "level {level} is outside the retained window"
            );
            &self.ring[idx as usize].1
        }
    }
}

/// Solve a tridiagonal system in place. `lower[i]` multiplies `x[i]` in row
/// `i+1`, `upper[i]` multiplies `x[i+1]` in row `i`.
fn solve_tridiagonal(
    lower: &[f64],
    diag: &mut [f64],
    upper: &[f64],
    rhs: &mut [f64],
) -> Result<(), SolverError> {
    let n = diag.len();
    for i in 1..n {
        if diag[i - 1].abs() < 1e-300 {
            return Err(SolverError::SingularSystem { row: i - 1 });
        }
        let m = lower[i - 1] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    if diag[n - 1].abs() < 1e-300 {
        return Err(SolverError::SingularSystem { row: n - 1 });
    }
    rhs[n - 1] /= diag[n - 1];
    for i in (0..n - 1).rev() {
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
    }
    Ok(())
}

/// Advance one implicit step: given the level-m values, the delayed level
/// (values at t_{m+1} - tau) and the source at t_{m+1}, return the level
/// m+1 values. End conditions are read at level m+1.
#[allow(clippy::too_many_arguments)]
pub fn step_subdomain(
    spec: &ProblemSpec,
    grid: &SpaceTimeGrid,
    left: &EndCondition,
    right: &EndCondition,
    current_level: &[f64],
    delayed_level: &[f64],
    source_next: &[f64],
    m: usize,
) -> Result<Vec<f64>, SolverError> {
    let n = current_level.len();
    assert!(n >= 2, "a subdomain needs at least 2 nodes");
    assert_eq!(delayed_level.len(), n);
    assert_eq!(source_next.len(), n);

    let nu2 = spec.diffusivity * spec.diffusivity;
    let r = nu2 / (grid.dx * grid.dx);
    let c0 = 1.0 / grid.dt + spec.reaction;

    let mut lower = vec![-r; n - 1];
    let mut upper = vec![-r; n - 1];
    let mut diag = vec![c0 + 2.0 * r; n];
    let mut rhs: Vec<f64> = (0..n)
        .map(|i| current_level[i] / grid.dt - spec.delay_coeff * delayed_level[i] + source_next[i])
        .collect();

    match left {
        EndCondition::Dirichlet(trace) => {
            diag[0] = 1.0;
            upper[0] = 0.0;
            rhs[0] = trace.values[m + 1];
        }
        EndCondition::Neumann(flux) => {
            // ghost node u_{-1} = u_1 - 2 dx q eliminated into row 0
            upper[0] = -2.0 * r;
            rhs[0] -= 2.0 * nu2 / grid.dx * flux.values[m + 1];
        }
    }
    match right {
        EndCondition::Dirichlet(trace) => {
            diag[n - 1] = 1.0;
            lower[n - 2] = 0.0;
            rhs[n - 1] = trace.values[m + 1];
        }
        EndCondition::Neumann(flux) => {
            lower[n - 2] = -2.0 * r;
            rhs[n - 1] += 2.0 * nu2 / grid.dx * flux.values[m + 1];
        }
    }

    solve_tridiagonal(&lower, &mut diag, &upper, &mut rhs)?;
    Ok(rhs)
}

/// March the stepper over the whole window on one subdomain, maintaining
/// the delay buffer. In error mode the history, source and initial level
/// are zero regardless of the problem data.
pub fn solve_subdomain(
    spec: &ProblemSpec,
    grid: &SpaceTimeGrid,
    decomp: &Decomposition,
    subdomain_index: usize,
    left: &EndCondition,
    right: &EndCondition,
    mode: Mode,
) -> Result<SubdomainField, SolverError> {
    let (first, last) = decomp.node_range(subdomain_index);
    let n = last - first + 1;
    let levels = grid.num_levels();
    for (side, cond) in [("left", left), ("right", right)] {
        if cond.len() != levels {
            return Err(SolverError::ShapeMismatch {
                detail: format!(
                    "{side} end condition has {} levels, grid has {levels}",
                    cond.len()
                ),
            });
        }
    }

    let xs: Vec<f64> = (first..=last).map(|l| grid.node_x(l)).collect();
    let k = grid.delay_steps;

    let history: Vec<Vec<f64>> = (0..k)
        .map(|j| {
            let t = (j as isize - k as isize) as f64 * grid.dt;
            match mode {
                Mode::Error => vec![0.0; n],
                Mode::Full => xs.iter().map(|&x| (spec.history)(x, t)).collect(),
            }
        })
        .collect();
    let level0: Vec<f64> = match mode {
        Mode::Error => vec![0.0; n],
        Mode::Full => xs.iter().map(|&x| (spec.history)(x, 0.0)).collect(),
    };

    let mut buffer = DelayBuffer::new(k, history.clone());
    buffer.push(0, level0.clone());

    let mut values = Vec::with_capacity(levels);
    values.push(level0);
    for m in 0..grid.num_steps {
        let t_next = grid.time(m + 1);
        let source_next: Vec<f64> = match mode {
            Mode::Error => vec![0.0; n],
            Mode::Full => xs.iter().map(|&x| (spec.source)(x, t_next)).collect(),
        };
        let delayed = buffer.lookup(m as isize + 1 - k as isize).to_vec();
        let next = step_subdomain(
            spec,
            grid,
            left,
            right,
            &values[m],
            &delayed,
            &source_next,
            m,
        )?;
        buffer.push(m + 1, next.clone());
        values.push(next);
    }

    Ok(SubdomainField {
        subdomain_index,
        first_node: first,
        local_nodes: n,
        values,
        history,
        left_kind: left.kind(),
        right_kind: right.kind(),
    })
}

/// Copy the end-node value at each level into an interface trace. The
/// trace index follows the subdomain's position: the left end of Ω_j is
/// Γ_{j-1}, the right end Γ_j.
pub fn extract_dirichlet_trace(field: &SubdomainField, side: Side) -> InterfaceTrace {
    let interface_index = match side {
        Side::Left => field.subdomain_index - 1,
        Side::Right => field.subdomain_index,
    };
    InterfaceTrace {
        interface_index,
        values: (0..field.values.len())
            .map(|m| field.end_value(m, side))
            .collect(),
    }
}

/// +x-oriented derivative at an end node per level, using the one-sided
/// second-order 3-point formula (exact on polynomials of degree <= 2).
pub fn extract_flux(
    field: &SubdomainField,
    grid: &SpaceTimeGrid,
    side: Side,
) -> Result<FluxTrace, SolverError> {
    let n = field.local_nodes;
    if n < 3 {
        return Err(SolverError::TooFewNodes { nodes: n });
    }
    let interface_index = match side {
        Side::Left => field.subdomain_index - 1,
        Side::Right => field.subdomain_index,
    };
    let values: Vec<f64> = field
        .values
        .iter()
        .map(|u| one_sided_derivative(u, grid.dx, side))
        .collect();
    debug_assert!(values.iter().all(|v| v.is_finite()));
    Ok(FluxTrace {
        interface_index,
        values,
    })
}

fn one_sided_derivative(u: &[f64], dx: f64, side: Side) -> f64 {
    let n = u.len();
    match side {
        Side::Left => (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * dx),
        Side::Right => (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * dx),
    }
}

/// +x-oriented end derivative recovered from the scheme's own stencil: the
/// value q for which the ghost-eliminated Neumann row reproduces this field
/// bit-for-bit. Passing it to the neighbour makes the two-sided coupling
/// match the undecomposed discretization exactly.
///
/// At the right end node N (and mirrored at the left end),
///
/// ```text
/// q = (u_N - u_{N-1})/dx + dx/(2 nu^2) * R_N,
/// R_N = (u_N^{m} - u_N^{m-1})/dt + a1 u_N^m + a2 u_N^{m-k} - f(x_N, t_m)
/// ```
///
/// The level-0 entry is never consumed by a Neumann march (steps read
/// levels >= 1) and is filled with the one-sided 3-point derivative.
pub fn extract_coupling_flux(
    spec: &ProblemSpec,
    grid: &SpaceTimeGrid,
    field: &SubdomainField,
    side: Side,
    mode: Mode,
) -> Result<FluxTrace, SolverError> {
    let n = field.local_nodes;
    if n < 3 {
        return Err(SolverError::TooFewNodes { nodes: n });
    }
    let interface_index = match side {
        Side::Left => field.subdomain_index - 1,
        Side::Right => field.subdomain_index,
    };
    let nu2 = spec.diffusivity * spec.diffusivity;
    let k = grid.delay_steps as isize;
    let (end, inner) = match side {
        Side::Left => (0usize, 1usize),
        Side::Right => (n - 1, n - 2),
    };
    let x_end = grid.node_x(field.first_node + end);

    let mut values = Vec::with_capacity(field.values.len());
    values.push(one_sided_derivative(&field.values[0], grid.dx, side));
    for m in 1..field.values.len() {
        let u = &field.values[m];
        let prev = &field.values[m - 1];
        let delayed = field.level_or_history(m as isize - k);
        let f = match mode {
            Mode::Error => 0.0,
            Mode::Full => (spec.source)(x_end, grid.time(m)),
        };
        let residual = (u[end] - prev[end]) / grid.dt
            + spec.reaction * u[end]
            + spec.delay_coeff * delayed[end]
            - f;
        let slope = match side {
            Side::Left => (u[inner] - u[end]) / grid.dx - grid.dx / (2.0 * nu2) * residual,
            Side::Right => (u[end] - u[inner]) / grid.dx + grid.dx / (2.0 * nu2) * residual,
        };
        values.push(slope);
    }
    debug_assert!(values.iter().all(|v| v.is_finite()));
    Ok(FluxTrace {
        interface_index,
        values,
    })
}
