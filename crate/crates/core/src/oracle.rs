//! Monodomain reference solver, manufactured solutions, norms and solution
//! gluing: the verification backbone the iteration results are checked
//! against.

use std::f64::consts::PI;

use crate::error::SolverError;
use crate::model::{
    space_time_fn, time_fn, Decomposition, EndKind, InterfaceTrace, Mode, ProblemSpec, Side,
    SpaceTimeGrid, SubdomainField,
};
use crate::stepper::{solve_subdomain, EndCondition};

/// Discrete solution on the whole domain: `values[m][l]` at time level m
/// and global node l.
#[derive(Clone, Debug, PartialEq)]
pub struct GlobalField {
    pub values: Vec<Vec<f64>>,
}

impl GlobalField {
    /// Column of values at one node, viewed as an interface trace.
    pub fn trace_at_node(&self, node: usize, interface_index: usize) -> InterfaceTrace {
        InterfaceTrace {
            interface_index,
            values: self.values.iter().map(|row| row[node]).collect(),
        }
    }

    /// Interface traces at every interior interface of the decomposition.
    pub fn interface_traces(&self, decomp: &Decomposition) -> Vec<InterfaceTrace> {
        decomp
            .interface_nodes
            .iter()
            .enumerate()
            .map(|(i, &node)| self.trace_at_node(node, i + 1))
            .collect()
    }

    pub fn max_abs_difference(&self, other: &GlobalField) -> f64 {
        self.values
            .iter()
            .flatten()
            .zip(other.values.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Backward-Euler march on the undecomposed domain with the outer Dirichlet
/// data. Shares the stepper code path (a monodomain run is a one-subdomain
/// decomposition with physical ends), so comparisons against it isolate the
/// interface iteration rather than discretization differences.
pub fn monodomain_solve(
    spec: &ProblemSpec,
    grid: &SpaceTimeGrid,
) -> Result<GlobalField, SolverError> {
    let decomp = Decomposition::partition(grid, &[spec.width()])?;
    let left = EndCondition::Dirichlet(InterfaceTrace::sampled(0, grid, &spec.outer_bc.0));
    let right = EndCondition::Dirichlet(InterfaceTrace::sampled(1, grid, &spec.outer_bc.1));
    let field = solve_subdomain(spec, grid, &decomp, 1, &left, &right, Mode::Full)?;
    Ok(GlobalField {
        values: field.values,
    })
}

/// Time profile of a manufactured solution.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum TimeProfile {
    /// 1 + t: backward Euler integrates this exactly, which isolates the
    /// spatial error.
    Linear,
    /// 1 + t^2: carries temporal curvature, making the O(dt) error of the
    /// stepper observable.
    Quadratic,
}

impl TimeProfile {
    fn value(self, t: f64) -> f64 {
        match self {
            TimeProfile::Linear => 1.0 + t,
            TimeProfile::Quadratic => 1.0 + t * t,
        }
    }

    fn derivative(self, t: f64) -> f64 {
        match self {
            TimeProfile::Linear => 1.0,
            TimeProfile::Quadratic => 2.0 * t,
        }
    }
}

/// A problem whose exact solution is known in closed form:
/// `w(x,t) = sin(pi (x - x_left)/L) * profile(t)`, extended to t in
/// [-tau, 0] as the history, with the source chosen so the equation holds
/// identically.
#[derive(Clone)]
pub struct ManufacturedProblem {
    pub spec: ProblemSpec,
    profile: TimeProfile,
}

impl ManufacturedProblem {
    pub fn exact(&self, x: f64, t: f64) -> f64 {
        let arg = PI * (x - self.spec.x_left) / self.spec.width();
        arg.sin() * self.profile.value(t)
    }

    /// Exact nodal values at every grid level.
    pub fn exact_field(&self, grid: &SpaceTimeGrid) -> GlobalField {
        let values = (0..grid.num_levels())
            .map(|m| {
                (0..grid.num_nodes)
                    .map(|l| self.exact(grid.node_x(l), grid.time(m)))
                    .collect()
            })
            .collect();
        GlobalField { values }
    }

    /// Max nodal error of a computed field against the exact solution.
    pub fn max_error(&self, grid: &SpaceTimeGrid, field: &GlobalField) -> f64 {
        self.exact_field(grid).max_abs_difference(field)
    }
}

fn manufactured_with_profile(
    diffusivity: f64,
    reaction: f64,
    delay_coeff: f64,
    delay: f64,
    domain: (f64, f64),
    horizon: f64,
    profile: TimeProfile,
) -> Result<ManufacturedProblem, SolverError> {
    let width = domain.1 - domain.0;
    let x_left = domain.0;
    let wave = PI / width;
    let nu2 = diffusivity * diffusivity;
    // f = dw/dt - nu^2 w_xx + a1 w + a2 w(t - tau)
    //   = sin(pi x'/L) [p'(t) + nu^2 (pi/L)^2 p(t) + a1 p(t) + a2 p(t - tau)]
    let source = space_time_fn(move |x, t| {
        (wave * (x - x_left)).sin()
            * (profile.derivative(t)
                + nu2 * wave * wave * profile.value(t)
                + reaction * profile.value(t)
                + delay_coeff * profile.value(t - delay))
    });
    let history = space_time_fn(move |x, t| (wave * (x - x_left)).sin() * profile.value(t));
    let spec = ProblemSpec::new(
        diffusivity,
        reaction,
        delay_coeff,
        delay,
        horizon,
        domain,
        source,
        history,
        (time_fn(|_| 0.0), time_fn(|_| 0.0)),
    )?;
    Ok(ManufacturedProblem { spec, profile })
}

/// Manufactured problem with exact solution
/// `sin(pi (x - x_left)/L) * (1 + t)`.
pub fn manufactured_problem(
    diffusivity: f64,
    reaction: f64,
    delay_coeff: f64,
    delay: f64,
    domain: (f64, f64),
    horizon: f64,
) -> Result<ManufacturedProblem, SolverError> {
    manufactured_with_profile(
        diffusivity,
        reaction,
        delay_coeff,
        delay,
        domain,
        horizon,
        TimeProfile::Linear,
    )
}

/// Manufactured problem with exact solution
/// `sin(pi (x - x_left)/L) * (1 + t^2)`. Its solution is curved in time,
/// so the stepper's O(dt) error shows up in refinement studies, unlike the
/// linear-in-time variant which backward Euler integrates exactly.
pub fn manufactured_problem_time_quadratic(
    diffusivity: f64,
    reaction: f64,
    delay_coeff: f64,
    delay: f64,
    domain: (f64, f64),
    horizon: f64,
) -> Result<ManufacturedProblem, SolverError> {
    manufactured_with_profile(
        diffusivity,
        reaction,
        delay_coeff,
        delay,
        domain,
        horizon,
        TimeProfile::Quadratic,
    )
}

/// Restrict a global field to one subdomain (both end kinds are marked
/// Dirichlet; the history segment is zeroed).
pub fn restrict_field(
    global: &GlobalField,
    grid: &SpaceTimeGrid,
    decomp: &Decomposition,
    subdomain_index: usize,
) -> SubdomainField {
    let (first, last) = decomp.node_range(subdomain_index);
    SubdomainField {
        subdomain_index,
        first_node: first,
        local_nodes: last - first + 1,
        values: global
            .values
            .iter()
            .map(|row| row[first..=last].to_vec())
            .collect(),
        history: vec![vec![0.0; last - first + 1]; grid.delay_steps],
        left_kind: EndKind::Dirichlet,
        right_kind: EndKind::Dirichlet,
    }
}

/// Concatenate subdomain fields into a global field. Adjacent fields must
/// agree at shared interface nodes within `tolerance`; the shared node
/// takes the value from the side that was solved with Dirichlet data
/// there.
pub fn glue(
    decomp: &Decomposition,
    fields: &[SubdomainField],
    tolerance: f64,
) -> Result<GlobalField, SolverError> {
    let s = decomp.subdomain_count();
    if fields.len() != s {
        return Err(SolverError::ShapeMismatch {
            detail: format!("{} fields for {s} subdomains", fields.len()),
        });
    }
    for (j, field) in fields.iter().enumerate() {
        let expect = decomp.local_nodes(j + 1);
        if field.subdomain_index != j + 1 || field.local_nodes != expect {
            return Err(SolverError::ShapeMismatch {
                detail: format!(
                    "field {} has index {} and {} nodes, expected index {} and {} nodes",
                    j,
                    field.subdomain_index,
                    field.local_nodes,
                    j + 1,
                    expect
                ),
            });
        }
    }
    let levels = fields[0].values.len();

    for i in 1..s {
        let gap = (0..levels)
            .map(|m| {
                (fields[i - 1].end_value(m, Side::Right) - fields[i].end_value(m, Side::Left)).abs()
            })
            .fold(0.0, f64::max);
        if gap > tolerance {
            return Err(SolverError::InterfaceMismatch {
                interface: i,
                gap,
                tolerance,
            });
        }
    }

    let total = decomp.breakpoint_node(s) + 1;
    let mut values = vec![vec![0.0; total]; levels];
    for (j, field) in fields.iter().enumerate() {
        for m in 0..levels {
            for i in 0..field.local_nodes {
                values[m][field.first_node + i] = field.values[m][i];
            }
        }
        // Re-assert the left shared node from the Dirichlet side: if this
        // field received Dirichlet data at its left end, it wins over the
        // neighbour's value written in the previous pass.
        if j > 0 && field.left_kind != EndKind::Dirichlet {
            for m in 0..levels {
                values[m][field.first_node] = fields[j - 1].end_value(m, Side::Right);
            }
        }
    }
    Ok(GlobalField { values })
}

/// `sqrt( sum_{m=1}^{M} dt * (max_l |u(l, t_m)|)^2 )`, the discrete
/// L2-in-time, max-in-space norm. The t_0 level is excluded.
pub fn norm_l2t_linfx(values: &[Vec<f64>], grid: &SpaceTimeGrid) -> f64 {
    values
        .iter()
        .skip(1)
        .map(|row| {
            let sup = row.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            grid.dt * sup * sup
        })
        .sum::<f64>()
        .sqrt()
}

/// `sqrt( sum_{m=1}^{M} dt * h(t_m)^2 )`: the restriction of the space-time
/// norm to a single interface node.
pub fn interface_norm(trace: &InterfaceTrace, grid: &SpaceTimeGrid) -> f64 {
    trace
        .values
        .iter()
        .skip(1)
        .map(|h| grid.dt * h * h)
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_grid;

    #[test]
    fn monodomain_zero_data_gives_zero_field() {
        let spec = ProblemSpec::homogeneous(1.0, 0.3, 0.5, 0.2, 1.0, (0.0, 1.0)).unwrap();
        let grid = build_grid(&spec, 0.1, 0.05).unwrap();
        let field = monodomain_solve(&spec, &grid).unwrap();
        assert!(field.values.iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn manufactured_source_matches_closed_form_for_heat_equation() {
        let m = manufactured_problem(1.0, 0.0, 0.0, 0.5, (0.0, 2.0), 1.0).unwrap();
        let wave = PI / 2.0;
        for (x, t) in [(0.3, 0.0), (1.1, 0.4), (1.9, 0.97)] {
            let expect = (wave * x).sin() * (1.0 + wave * wave * (1.0 + t));
            let got = (m.spec.source)(x, t);
            assert!(
                (got - expect).abs() < 1e-14,
                "f({x},{t}) = {got}, want {expect}"
            );
        }
    }

    #[test]
    fn manufactured_source_satisfies_equation_by_finite_differences() {
        let m = manufactured_problem(0.7, 0.4, 0.9, 0.3, (-1.0, 2.0), 1.0).unwrap();
        let nu2 = 0.7f64 * 0.7;
        let eps = 1e-4;
        for (x, t) in [(-0.4, 0.2), (0.5, 0.8), (1.6, 0.5)] {
            let w = |x: f64, t: f64| m.exact(x, t);
            let dt_w = (w(x, t + eps) - w(x, t - eps)) / (2.0 * eps);
            let dxx_w = (w(x + eps, t) - 2.0 * w(x, t) + w(x - eps, t)) / (eps * eps);
            let residual =
                dt_w - nu2 * dxx_w + 0.4 * w(x, t) + 0.9 * w(x, t - 0.3) - (m.spec.source)(x, t);
            assert!(residual.abs() < 1e-5, "residual {residual} at ({x},{t})");
        }
    }

    #[test]
    fn manufactured_delay_term_contributes_shifted_profile() {
        let base = manufactured_problem(1.0, 0.2, 0.0, 0.4, (0.0, 1.0), 1.0).unwrap();
        let delayed = manufactured_problem(1.0, 0.2, 0.6, 0.4, (0.0, 1.0), 1.0).unwrap();
        for (x, t) in [(0.25, 0.1), (0.5, 0.7), (0.75, 1.0)] {
            let diff = (delayed.spec.source)(x, t) - (base.spec.source)(x, t);
            let expect = 0.6 * (PI * x).sin() * (1.0 + t - 0.4);
            assert!((diff - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn manufactured_history_is_continuous_at_zero() {
        let m = manufactured_problem(1.0, 0.1, 0.2, 0.5, (0.0, 3.0), 2.0).unwrap();
        for x in [0.0, 0.4, 1.7, 3.0] {
            assert_eq!((m.spec.history)(x, 0.0), m.exact(x, 0.0));
        }
    }

    #[test]
    fn monodomain_first_order_in_time_on_quadratic_profile() {
        let m = manufactured_problem_time_quadratic(1.0, 0.0, 0.0, 0.5, (0.0, 1.0), 1.0).unwrap();
        let mut errors = Vec::new();
        for dt in [0.1, 0.05, 0.025] {
            let grid = build_grid(&m.spec, 1.0 / 128.0, dt).unwrap();
            let field = monodomain_solve(&m.spec, &grid).unwrap();
            errors.push(m.max_error(&grid, &field));
        }
        for pair in errors.windows(2) {
            let ratio = pair[0] / pair[1];
            assert!(
                (1.6..=2.4).contains(&ratio),
                "temporal ratio {ratio}, errors {errors:?}"
            );
        }
    }

    #[test]
    fn monodomain_second_order_in_space_on_linear_profile() {
        // The linear-in-time profile is integrated exactly by the stepper,
        // so the measured error is purely spatial.
        let m = manufactured_problem(1.0, 0.5, 0.75, 0.25, (0.0, 1.0), 1.0).unwrap();
        let mut errors = Vec::new();
        for cells in [8, 16, 32] {
            let grid = build_grid(&m.spec, 1.0 / cells as f64, 0.05).unwrap();
            let field = monodomain_solve(&m.spec, &grid).unwrap();
            errors.push(m.max_error(&grid, &field));
        }
        for pair in errors.windows(2) {
            let ratio = pair[0] / pair[1];
            assert!(
                (3.2..=4.8).contains(&ratio),
                "spatial ratio {ratio}, errors {errors:?}"
            );
        }
    }

    #[test]
    fn glue_of_single_subdomain_is_identity() {
        let m = manufactured_problem(1.0, 0.0, 0.5, 0.25, (0.0, 1.0), 0.5).unwrap();
        let grid = build_grid(&m.spec, 0.125, 0.05).unwrap();
        let global = monodomain_solve(&m.spec, &grid).unwrap();
        let decomp = Decomposition::partition(&grid, &[1.0]).unwrap();
        let restricted = restrict_field(&global, &grid, &decomp, 1);
        let glued = glue(&decomp, &[restricted], 1e-12).unwrap();
        assert_eq!(glued, global);
    }

    #[test]
    fn glue_after_restriction_is_identity() {
        let m = manufactured_problem(1.0, 0.0, 0.5, 0.25, (0.0, 1.0), 0.5).unwrap();
        let grid = build_grid(&m.spec, 0.125, 0.05).unwrap();
        let global = monodomain_solve(&m.spec, &grid).unwrap();
        let decomp = Decomposition::partition(&grid, &[0.25, 0.375, 0.375]).unwrap();
        let fields: Vec<SubdomainField> = (1..=3)
            .map(|j| restrict_field(&global, &grid, &decomp, j))
            .collect();
        let glued = glue(&decomp, &fields, 0.0).unwrap();
        assert_eq!(glued, global);
    }

    #[test]
    fn glue_rejects_perturbed_interface() {
        let m = manufactured_problem(1.0, 0.0, 0.5, 0.25, (0.0, 1.0), 0.5).unwrap();
        let grid = build_grid(&m.spec, 0.125, 0.05).unwrap();
        let global = monodomain_solve(&m.spec, &grid).unwrap();
        let decomp = Decomposition::partition(&grid, &[0.5, 0.5]).unwrap();
        let mut fields: Vec<SubdomainField> = (1..=2)
            .map(|j| restrict_field(&global, &grid, &decomp, j))
            .collect();
        let last = fields[0].local_nodes - 1;
        fields[0].values[3][last] += 1e-3;
        match glue(&decomp, &fields, 1e-8) {
            Err(SolverError::InterfaceMismatch {
                interface: 1, gap, ..
            }) => {
                assert!((gap - 1e-3).abs() < 1e-12);
            }
            other => panic!("expected InterfaceMismatch, got {other:?}"),
        }
    }

    #[test]
    fn norm_of_zero_field_is_zero() {
        let spec = ProblemSpec::homogeneous(1.0, 0.0, 1.0, 0.5, 1.0, (0.0, 1.0)).unwrap();
        let grid = build_grid(&spec, 0.25, 0.1).unwrap();
        let values = vec![vec![0.0; grid.num_nodes]; grid.num_levels()];
        assert_eq!(norm_l2t_linfx(&values, &grid), 0.0);
        assert_eq!(interface_norm(&InterfaceTrace::zeros(1, &grid), &grid), 0.0);
    }

    #[test]
    fn norm_of_constant_field_is_c_sqrt_t() {
        let spec = ProblemSpec::homogeneous(1.0, 0.0, 1.0, 0.5, 2.5, (0.0, 1.0)).unwrap();
        let grid = build_grid(&spec, 0.25, 0.1).unwrap();
        let c = -3.0;
        let values = vec![vec![c; grid.num_nodes]; grid.num_levels()];
        let norm = norm_l2t_linfx(&values, &grid);
        assert!((norm - c.abs() * 2.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn norm_of_linear_ramp_matches_direct_summation() {
        let spec = ProblemSpec::homogeneous(1.0, 0.0, 1.0, 0.5, 1.0, (0.0, 1.0)).unwrap();
        let grid = build_grid(&spec, 0.25, 0.1).unwrap();
        let values: Vec<Vec<f64>> = (0..=grid.num_steps)
            .map(|m| vec![grid.time(m); grid.num_nodes])
            .collect();
        // 0.1 * (0.01 + 0.04 + ... + 1.00) = 0.385
        let direct: f64 = (1..=10).map(|m| 0.1 * (0.1 * m as f64).powi(2)).sum();
        assert!((direct - 0.385).abs() < 1e-15);
        assert!((norm_l2t_linfx(&values, &grid) - direct.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn interface_norm_matches_direct_summation_for_t_squared() {
        let spec = ProblemSpec::homogeneous(1.0, 0.0, 0.028, 3.0, 10.0, (0.0, 5.0)).unwrap();
        let grid = build_grid(&spec, 0.1, 0.2).unwrap();
        let trace = InterfaceTrace::sampled(1, &grid, &time_fn(|t| t * t));
        let direct: f64 = (1..=50)
            .map(|m| {
                let t = 0.2 * m as f64;
                0.2 * t.powi(4)
            })
            .sum();
        assert!((interface_norm(&trace, &grid) - direct.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn interface_norm_is_homogeneous() {
        let spec = ProblemSpec::homogeneous(1.0, 0.0, 0.028, 3.0, 10.0, (0.0, 5.0)).unwrap();
        let grid = build_grid(&spec, 0.1, 0.2).unwrap();
        let trace = InterfaceTrace::sampled(1, &grid, &time_fn(f64::sin));
        let base = interface_norm(&trace, &grid);
        for alpha in [2.0, -1.0, 0.25] {
            let scaled = interface_norm(&trace.scaled(alpha), &grid);
            assert!((scaled - alpha.abs() * base).abs() < 1e-12 * base.max(1.0));
        }
    }

    #[test]
    fn norm_triangle_inequality_on_random_like_traces() {
        let spec = ProblemSpec::homogeneous(1.0, 0.0, 0.028, 3.0, 10.0, (0.0, 5.0)).unwrap();
        let grid = build_grid(&spec, 0.1, 0.2).unwrap();
        let a = InterfaceTrace::sampled(1, &grid, &time_fn(|t| (3.1 * t).sin() - 0.2 * t));
        let b = InterfaceTrace::sampled(1, &grid, &time_fn(|t| (1.7 * t).cos() * t));
        let sum = InterfaceTrace {
            interface_index: 1,
            values: a.values.iter().zip(&b.values).map(|(x, y)| x + y).collect(),
        };
        let na = interface_norm(&a, &grid);
        let nb = interface_norm(&b, &grid);
        let ns = interface_norm(&sum, &grid);
        assert!(ns <= na + nb + 1e-12);
    }
}
