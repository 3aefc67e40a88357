//! Continuous problem description, space-time grid, strip decomposition and
//! the containers exchanged between subdomain solves.

use std::sync::Arc;

use crate::error::SolverError;

/// Function of (x, t), shareable across concurrent subdomain solves.
pub type SpaceTimeFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Function of t only (boundary data, interface initializers).
pub type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Wrap a closure of (x, t) as a shareable [`SpaceTimeFn`].
pub fn space_time_fn(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> SpaceTimeFn {
    Arc::new(f)
}

/// Wrap a closure of t as a shareable [`TimeFn`].
pub fn time_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> TimeFn {
    Arc::new(f)
}

/// Relative tolerance used for all grid commensurability checks.
const COMMENSURATE_RTOL: f64 = 1e-12;

/// Whether a run solves the homogeneous error equations (zero data, the
/// exact interface values are zero) or the full problem.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Mode {
    Error,
    Full,
}

/// The continuous problem
///
/// ```text
/// dw/dt - nu^2 w_xx + a1 w(x,t) + a2 w(x,t-tau) = f(x,t)   on (x_left,x_right) x (0,T)
/// w(x,t) = w0(x,t)                                         for t in [-tau, 0]
/// w(x_left,t) = g_left(t),  w(x_right,t) = g_right(t)
/// ```
#[derive(Clone)]
pub struct ProblemSpec {
    /// nu > 0; the diffusion coefficient in the equation is nu^2.
    pub diffusivity: f64,
    /// a1, the undelayed reaction coefficient.
    pub reaction: f64,
    /// a2, the coefficient of the delayed term. Zero is allowed (no-delay
    /// degenerate case, used as the oracle for delay-term tests).
    pub delay_coeff: f64,
    /// tau > 0, the constant time delay.
    pub delay: f64,
    /// T > 0, the end of the time window.
    pub horizon: f64,
    pub x_left: f64,
    pub x_right: f64,
    /// Source term f(x, t).
    pub source: SpaceTimeFn,
    /// History w0(x, t), defined for t in [-tau, 0].
    pub history: SpaceTimeFn,
    /// Outer Dirichlet boundary data (left, right) as functions of t.
    pub outer_bc: (TimeFn, TimeFn),
}

impl ProblemSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        diffusivity: f64,
        reaction: f64,
        delay_coeff: f64,
        delay: f64,
        horizon: f64,
        domain: (f64, f64),
        source: SpaceTimeFn,
        history: SpaceTimeFn,
        outer_bc: (TimeFn, TimeFn),
    ) -> Result<Self, SolverError> {
        if !(diffusivity > 0.0) {
            return Err(SolverError::InvalidParameter(format!(
                "diffusivity must be positive, got {diffusivity}"
            )));
        }
        if !(delay > 0.0) {
            return Err(SolverError::InvalidParameter(format!(
                "delay must be positive, got {delay}"
            )));
        }
        if !(horizon > 0.0) {
            return Err(SolverError::InvalidParameter(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        if !(domain.0 < domain.1) {
            return Err(SolverError::InvalidParameter(format!(
                "domain must satisfy x_left < x_right, got ({}, {})",
                domain.0, domain.1
            )));
        }
        Ok(Self {
            diffusivity,
            reaction,
            delay_coeff,
            delay,
            horizon,
            x_left: domain.0,
            x_right: domain.1,
            source,
            history,
            outer_bc,
        })
    }

    /// Problem with zero source, zero history and zero outer boundary data:
    /// the setting of the error equations, whose exact solution is zero.
    pub fn homogeneous(
        diffusivity: f64,
        reaction: f64,
        delay_coeff: f64,
        delay: f64,
        horizon: f64,
        domain: (f64, f64),
    ) -> Result<Self, SolverError> {
        Self::new(
            diffusivity,
            reaction,
            delay_coeff,
            delay,
            horizon,
            domain,
            space_time_fn(|_, _| 0.0),
            space_time_fn(|_, _| 0.0),
            (time_fn(|_| 0.0), time_fn(|_| 0.0)),
        )
    }

    pub fn width(&self) -> f64 {
        self.x_right - self.x_left
    }
}

/// Uniform space-time mesh. Nodes are `x_l = x_left + l*dx` for
/// `l = 0..num_nodes`, levels are `t_m = m*dt` for `m = 0..=num_steps`,
/// and the delay is exactly `delay_steps * dt`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceTimeGrid {
    pub dx: f64,
    pub dt: f64,
    /// Total node count (cells + 1).
    pub num_nodes: usize,
    /// Time level count after t_0, i.e. the march performs this many steps.
    pub num_steps: usize,
    /// k with k*dt = tau, k >= 1.
    pub delay_steps: usize,
    pub x_left: f64,
}

impl SpaceTimeGrid {
    pub fn node_x(&self, l: usize) -> f64 {
        self.x_left + l as f64 * self.dx
    }

    pub fn time(&self, m: usize) -> f64 {
        m as f64 * self.dt
    }

    /// Number of stored time levels, t_0 through t_M.
    pub fn num_levels(&self) -> usize {
        self.num_steps + 1
    }

    pub fn last_node(&self) -> usize {
        self.num_nodes - 1
    }
}

/// Round `ratio` to the nearest integer, requiring commensurability of
/// `numerator = n * denominator` in relative terms.
fn integer_ratio(
    numerator: f64,
    denominator: f64,
    name: &'static str,
) -> Result<usize, SolverError> {
    let ratio = numerator / denominator;
    let n = ratio.round();
    if n < 1.0 || (n * denominator - numerator).abs() > COMMENSURATE_RTOL * numerator.abs() {
        return Err(SolverError::NonCommensurate { name, ratio });
    }
    Ok(n as usize)
}

/// Build the uniform grid, checking that dx divides the domain width, dt
/// divides the horizon, and dt divides the delay (integer-multiple delay).
pub fn build_grid(spec: &ProblemSpec, dx: f64, dt: f64) -> Result<SpaceTimeGrid, SolverError> {
    if !(dx > 0.0) {
        return Err(SolverError::InvalidParameter(format!(
            "dx must be positive, got {dx}"
        )));
    }
    if !(dt > 0.0) {
        return Err(SolverError::InvalidParameter(format!(
            "dt must be positive, got {dt}"
        )));
    }
    let cells = integer_ratio(spec.width(), dx, "domain/dx")?;
    let num_steps = integer_ratio(spec.horizon, dt, "T/dt")?;
    let delay_steps = integer_ratio(spec.delay, dt, "tau/dt")?;
    Ok(SpaceTimeGrid {
        dx,
        dt,
        num_nodes: cells + 1,
        num_steps,
        delay_steps,
        x_left: spec.x_left,
    })
}

/// Which end of a subdomain an operation refers to.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// The kind of boundary condition imposed at a subdomain end.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum EndKind {
    Dirichlet,
    Neumann,
}

/// Strip partition of the domain into S subdomains. Subdomain j
/// (1-based, j = 1..=S) spans breakpoints `x̂_{j-1}..x̂_j`; interior
/// interfaces Γ_1..Γ_{S-1} sit exactly on grid nodes, and Γ_0 / Γ_S name
/// the physical boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    /// Breakpoints x̂_0 = x_left < ... < x̂_S = x_right.
    pub breakpoints: Vec<f64>,
    /// Global node index of each interior interface Γ_1..Γ_{S-1}.
    pub interface_nodes: Vec<usize>,
    num_nodes: usize,
}

impl Decomposition {
    /// Partition by explicit strip widths; the widths must sum to the domain
    /// width and every resulting breakpoint must land on a grid node.
    pub fn partition(grid: &SpaceTimeGrid, sizes: &[f64]) -> Result<Self, SolverError> {
        if sizes.is_empty() {
            return Err(SolverError::InvalidParameter(
                "at least one subdomain size is required".into(),
            ));
        }
        if sizes.iter().any(|&s| !(s > 0.0)) {
            return Err(SolverError::InvalidParameter(
                "subdomain sizes must all be positive".into(),
            ));
        }
        let width = grid.dx * (grid.num_nodes - 1) as f64;
        let total: f64 = sizes.iter().sum();
        if (total - width).abs() > COMMENSURATE_RTOL * width {
            return Err(SolverError::InvalidParameter(format!(
                "subdomain sizes sum to {total}, expected the domain width {width}"
            )));
        }

        let mut breakpoints = Vec::with_capacity(sizes.len() + 1);
        breakpoints.push(grid.x_left);
        let mut acc = grid.x_left;
        for &s in sizes {
            acc += s;
            breakpoints.push(acc);
        }
        // Snap the last breakpoint onto x_right so the final subdomain is
        // never misaligned by summation rounding.
        *breakpoints.last_mut().unwrap() = grid.node_x(grid.last_node());

        let mut nodes = Vec::with_capacity(breakpoints.len());
        for (i, &b) in breakpoints.iter().enumerate() {
            let idx = ((b - grid.x_left) / grid.dx).round();
            let idx = if idx < 0.0 { 0 } else { idx as usize };
            let gap = (b - grid.node_x(idx)).abs();
            if idx > grid.last_node() || gap > 1e-12 * grid.dx {
                return Err(SolverError::MisalignedBreakpoint {
                    index: i,
                    x: b,
                    gap,
                });
            }
            nodes.push(idx);
        }
        for j in 1..nodes.len() {
            let cells = nodes[j].saturating_sub(nodes[j - 1]);
            if cells < 2 {
                return Err(SolverError::TooThinSubdomain { index: j, cells });
            }
        }
        Ok(Self {
            breakpoints,
            interface_nodes: nodes[1..nodes.len() - 1].to_vec(),
            num_nodes: grid.num_nodes,
        })
    }

    /// Split the domain into `count` equal strips.
    pub fn equal(grid: &SpaceTimeGrid, count: usize) -> Result<Self, SolverError> {
        if count == 0 {
            return Err(SolverError::InvalidParameter(
                "subdomain count must be at least 1".into(),
            ));
        }
        let width = grid.dx * (grid.num_nodes - 1) as f64;
        let sizes = vec![width / count as f64; count];
        Self::partition(grid, &sizes)
    }

    pub fn subdomain_count(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn num_interfaces(&self) -> usize {
        self.interface_nodes.len()
    }

    /// Global node index of breakpoint x̂_i, i = 0..=S.
    pub fn breakpoint_node(&self, i: usize) -> usize {
        let s = self.subdomain_count();
        match i {
            0 => 0,
            _ if i == s => self.num_nodes - 1,
            _ => self.interface_nodes[i - 1],
        }
    }

    /// Inclusive global node span of subdomain j (1-based).
    pub fn node_range(&self, j: usize) -> (usize, usize) {
        (self.breakpoint_node(j - 1), self.breakpoint_node(j))
    }

    /// Node count of subdomain j (1-based).
    pub fn local_nodes(&self, j: usize) -> usize {
        let (a, b) = self.node_range(j);
        b - a + 1
    }
}

/// Time series of Dirichlet values at one interface node, one value per
/// time level t_0..t_M.
#[derive(Clone, Debug, PartialEq)]
pub struct InterfaceTrace {
    pub interface_index: usize,
    pub values: Vec<f64>,
}

impl InterfaceTrace {
    /// Sample a function of time at every grid level.
    pub fn sampled(interface_index: usize, grid: &SpaceTimeGrid, f: &TimeFn) -> Self {
        let values = (0..grid.num_levels()).map(|m| f(grid.time(m))).collect();
        Self {
            interface_index,
            values,
        }
    }

    pub fn zeros(interface_index: usize, grid: &SpaceTimeGrid) -> Self {
        Self {
            interface_index,
            values: vec![0.0; grid.num_levels()],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            interface_index: self.interface_index,
            values: self.values.iter().map(|v| alpha * v).collect(),
        }
    }

    /// Pointwise difference, for increment norms in full-problem runs.
    pub fn difference(&self, other: &Self) -> Result<Self, SolverError> {
        check_same_shape(self, other)?;
        Ok(Self {
            interface_index: self.interface_index,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }
}

pub(crate) fn check_same_shape(a: &InterfaceTrace, b: &InterfaceTrace) -> Result<(), SolverError> {
    if a.interface_index != b.interface_index || a.len() != b.len() {
        return Err(SolverError::ShapeMismatch {
            detail: format!(
                "interface {} (len {}) vs interface {} (len {})",
                a.interface_index,
                a.len(),
                b.interface_index,
                b.len()
            ),
        });
    }
    Ok(())
}

/// Time series of the +x-oriented derivative at one interface node.
#[derive(Clone, Debug, PartialEq)]
pub struct FluxTrace {
    pub interface_index: usize,
    pub values: Vec<f64>,
}

impl FluxTrace {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Discrete solution on one subdomain: `values[m][i]` is the value at time
/// level m and local node i, plus the sampled history segment for the
/// delayed term on t in [-tau, 0).
#[derive(Clone, Debug, PartialEq)]
pub struct SubdomainField {
    /// 1-based index of the subdomain this field lives on.
    pub subdomain_index: usize,
    /// Global node index of the leftmost local node.
    pub first_node: usize,
    pub local_nodes: usize,
    /// Levels t_0..t_M.
    pub values: Vec<Vec<f64>>,
    /// Levels t_{-k}..t_{-1}, sampled from w0 (zero in error mode).
    pub history: Vec<Vec<f64>>,
    pub left_kind: EndKind,
    pub right_kind: EndKind,
}

impl SubdomainField {
    pub fn level(&self, m: usize) -> &[f64] {
        &self.values[m]
    }

    /// Value of the end node at a given level.
    pub fn end_value(&self, m: usize, side: Side) -> f64 {
        match side {
            Side::Left => self.values[m][0],
            Side::Right => self.values[m][self.local_nodes - 1],
        }
    }

    /// Level `d` where negative indices address the sampled history
    /// segment: `d = -k` maps to t = -tau.
    pub fn level_or_history(&self, d: isize) -> &[f64] {
        if d >= 0 {
            &self.values[d as usize]
        } else {
            let k = self.history.len() as isize;
            &self.history[(d + k) as usize]
        }
    }
}

/// Why an outer DNWR loop stopped.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum StopReason {
    ToleranceMet,
    MaxIterations,
}

/// Per-iteration interface norms of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    /// One norm per interior interface, ordered by interface index.
    pub per_interface: Vec<f64>,
    /// Max over interfaces of `per_interface`.
    pub aggregate: f64,
}

impl IterationRecord {
    pub fn new(iteration: usize, per_interface: Vec<f64>) -> Self {
        let aggregate = per_interface.iter().cloned().fold(0.0, f64::max);
        Self {
            iteration,
            per_interface,
            aggregate,
        }
    }
}

/// Full convergence history of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRecord {
    pub history: Vec<IterationRecord>,
    pub stop_reason: StopReason,
    /// The last performed iteration index.
    pub iterations: usize,
}

impl ConvergenceRecord {
    /// First iteration k >= 1 whose aggregate norm fell at or below `tol`.
    pub fn iterations_to(&self, tol: f64) -> Option<usize> {
        self.history
            .iter()
            .find(|r| r.iteration >= 1 && r.aggregate <= tol)
            .map(|r| r.iteration)
    }

    pub fn aggregate_at(&self, iteration: usize) -> Option<f64> {
        self.history
            .iter()
            .find(|r| r.iteration == iteration)
            .map(|r| r.aggregate)
    }
}

/// Sample one initializer per interior interface (a single initializer is
/// broadcast to all interfaces).
pub fn initialize_interfaces(
    grid: &SpaceTimeGrid,
    decomp: &Decomposition,
    initializers: &[TimeFn],
) -> Result<Vec<InterfaceTrace>, SolverError> {
    let n = decomp.num_interfaces();
    let pick = |i: usize| -> &TimeFn {
        if initializers.len() == 1 {
            &initializers[0]
        } else {
            &initializers[i]
        }
    };
    if initializers.len() != n && !(initializers.len() == 1 || (n == 0 && initializers.is_empty()))
    {
        return Err(SolverError::ArityMismatch {
            expected: n,
            got: initializers.len(),
        });
    }
    Ok((0..n)
        .map(|i| InterfaceTrace::sampled(i + 1, grid, pick(i)))
        .collect())
}
