use thiserror::Error;

use crate::filter::ConstraintClass;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BasisError {
    #[error("polynomial order must be at least 1, got {0}")]
    OrderTooLow(usize),
    #[error("unsupported dimension {0} (expected 1 or 2)")]
    Dimension(usize),
    #[error("Vandermonde matrix is singular for order {0}")]
    SingularVandermonde(usize),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("element count must be positive along every axis, got {0:?}")]
    ElementCount(Vec<usize>),
    #[error("degenerate domain extent [{lo}, {hi}] along axis {axis}")]
    Extent { axis: usize, lo: f64, hi: f64 },
    #[error("unsupported dimension {0} (expected 1 or 2)")]
    Dimension(usize),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhysicsError {
    #[error("degenerate state: density is zero")]
    ZeroDensity,
    #[error("inadmissible state: rho = {rho:e}, P = {pressure:e}")]
    Inadmissible { rho: f64, pressure: f64 },
    #[error("vacuum state reached the Riemann solver: rho = {rho:e}, P = {pressure:e}")]
    Vacuum { rho: f64, pressure: f64 },
    #[error(
        "exact Riemann solver: Newton iteration did not converge after {iterations} iterations"
    )]
    NewtonDivergence { iterations: usize },
    #[error("exact Riemann solver: initial data generates vacuum")]
    VacuumGeneration,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FilterError {
    #[error("element mean violates the {class} constraint; the time step or Riemann solver cannot keep means admissible")]
    MeanViolation { class: ConstraintClass },
    #[error("filtered solution infeasible even at zeta_max")]
    InfeasibleAtMax,
    #[error("filtered element violates the {class} constraint after filtering")]
    PostStateInfeasible { class: ConstraintClass },
    #[error("negative filter strength {0}")]
    NegativeZeta(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("element {element}: {source}")]
    Filter {
        element: usize,
        #[source]
        source: FilterError,
    },
    #[error("t = {time:.6e}, stage {stage}: {source}")]
    Stage {
        time: f64,
        stage: usize,
        #[source]
        source: Box<SolverError>,
    },
    #[error("non-finite flux divergence at element {element}, node {node}")]
    NonFinite { element: usize, node: usize },
    #[error("boundary tag '{0}' has no boundary condition")]
    UnknownBoundary(String),
    #[error(
        "periodic boundary on side '{0}' must be wired by the mesh, not resolved as a ghost state"
    )]
    PeriodicGhost(String),
    #[error("non-positive time step {0:e}")]
    NonPositiveDt(f64),
    #[error("cannot advance backwards: t_end = {t_end} < t = {time}")]
    BackwardsInTime { time: f64, t_end: f64 },
    #[error(transparent)]
    Physics(#[from] PhysicsError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Basis(#[from] BasisError),
}

impl SolverError {
    /// True when the run aborted because a physical constraint could not be met
    /// (mean violation or infeasible filter), as opposed to a setup problem.
    pub fn is_constraint_violation(&self) -> bool {
        match self {
            SolverError::Filter { .. } => true,
            SolverError::Stage { source, .. } => source.is_constraint_violation(),
            SolverError::Physics(PhysicsError::Vacuum { .. }) => true,
            SolverError::NonFinite { .. } => true,
            _ => false,
        }
    }
}
