//! Dirichlet-Neumann waveform relaxation (DNWR) with multiple subdomains
//! for the 1-D reaction-diffusion equation with a constant time delay
//!
//! The equation solved on (x_left, x_right) x (0, T) is
//!
//! ```text
//! dw/dt - nu^2 w_xx + a1 w(x,t) + a2 w(x,t-tau) = f(x,t)
//! ```
//!
//! with history data on [-tau, 0] and Dirichlet outer boundaries. The
//! domain is cut into strips; each DNWR iteration solves every strip over
//! the whole time window, exchanging Dirichlet traces and Neumann fluxes
//! at the interfaces, and relaxes the interface waveforms by a convex
//! combination with weight theta.
//!
//! Three arrangements of the transmission conditions are provided
//! ([`ArrangementKind`]): a sequential left-to-right sweep, a red-black
//! schedule with two parallel phases, and a central-outward schedule with
//! two parallel branches.
//!
//! ```no_run
//! use dnwr_core::{
//!     build_grid, initialize_interfaces, run_dnwr, time_fn, ArrangementKind, Decomposition,
//!     Mode, ProblemSpec, RunParams,
//! };
//!
//! # fn main() -> Result<(), dnwr_core::SolverError> {
//! let spec = ProblemSpec::homogeneous(1.0, 0.0, 0.028, 3.0, 10.0, (0.0, 5.0))?;
//! let grid = build_grid(&spec, 0.1, 0.2)?;
//! let decomp = Decomposition::equal(&grid, 5)?;
//! let traces = initialize_interfaces(&grid, &decomp, &[time_fn(|t| t * t)])?;
//! let params = RunParams::new(0.5, 1e-6, 100, Mode::Error)?;
//! let outcome = run_dnwr(&spec, &grid, &decomp, ArrangementKind::CentralOutward, &params, traces)?;
//! println!("converged in {} iterations", outcome.record.iterations);
//! # Ok(())
//! # }
//! ```

pub mod dnwr;
pub mod error;
pub mod model;
pub mod oracle;
pub mod stepper;

pub use dnwr::{
    iterate, iterate_central, iterate_redblack, iterate_sweep, relax_update, run_dnwr,
    ArrangementKind, DnwrOutcome, DnwrState, RunParams,
};
pub use error::SolverError;
pub use model::{
    build_grid, initialize_interfaces, space_time_fn, time_fn, ConvergenceRecord, Decomposition,
    EndKind, FluxTrace, InterfaceTrace, IterationRecord, Mode, ProblemSpec, Side, SpaceTimeFn,
    SpaceTimeGrid, StopReason, SubdomainField, TimeFn,
};
pub use oracle::{
    glue, interface_norm, manufactured_problem, manufactured_problem_time_quadratic,
    monodomain_solve, norm_l2t_linfx, restrict_field, GlobalField, ManufacturedProblem,
};
pub use stepper::{
    extract_coupling_flux, extract_dirichlet_trace, extract_flux, solve_subdomain, step_subdomain,
    DelayBuffer, EndCondition,
};
