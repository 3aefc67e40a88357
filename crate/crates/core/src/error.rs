use thiserror::Error;

/// Errors produced while setting up or running a solve.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    /// A ratio that must be an integer (domain/dx, T/dt or tau/dt) is not.
    #[error(
        "{name} = {ratio} is not an integer within tolerance; adjust the step so it divides evenly"
    )]
    NonCommensurate { name: &'static str, ratio: f64 },

    /// A requested subdomain breakpoint does not coincide with a grid node.
    #[error(
        "breakpoint {index} at x = {x} does not lie on a grid node (nearest node off by {gap:e})"
    )]
    MisalignedBreakpoint { index: usize, x: f64, gap: f64 },

    /// A subdomain spans fewer than two grid cells.
    #[error("subdomain {index} has only {cells} grid cell(s); at least 2 are required")]
    TooThinSubdomain { index: usize, cells: usize },

    /// Initializer count does not match the number of interior interfaces.
    #[error("expected {expected} interface initializer(s) (or a single shared one), got {got}")]
    ArityMismatch { expected: usize, got: usize },

    /// Two traces that must share an interface and length do not.
    #[error("trace shape mismatch: {detail}")]
    ShapeMismatch { detail: String },

    /// Flux extraction needs at least three nodes for the one-sided stencil.
    #[error("subdomain has {nodes} node(s); flux extraction needs at least 3")]
    TooFewNodes { nodes: usize },

    /// The tridiagonal system hit a vanishing pivot. Cannot occur for
    /// dt > 0 and a1 >= -1/dt; kept as a diagnostic.
    #[error("tridiagonal solve hit a zero pivot at row {row}")]
    SingularSystem { row: usize },

    /// The central-outward arrangement needs an odd subdomain count.
    #[error("central-outward arrangement needs an odd number of subdomains >= 3, got {count}")]
    EvenSubdomainCount { count: usize },

    /// Adjacent subdomain fields disagree at a shared interface node.
    #[error(
        "fields disagree at interface {interface}: max gap {gap:e} exceeds tolerance {tolerance:e}"
    )]
    InterfaceMismatch {
        interface: usize,
        gap: f64,
        tolerance: f64,
    },

    /// A constructor argument violated an invariant (message names the field).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
