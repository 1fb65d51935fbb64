use std::collections::BTreeMap;

use crate::error::SolverError;
use crate::mesh::SIDE_NAMES;
use crate::physics::{ConservativeState, GasModel, PrimitiveState};

/// Exterior-state rule for one domain side.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryCondition {
    /// Wired through the mesh; never evaluated as a ghost state.
    Periodic,
    /// Prescribed exterior state (supersonic inflow, far field).
    FixedState(PrimitiveState),
    /// Ghost equals the interior state.
    Transmissive,
    /// Reflective wall: the normal velocity component is mirrored.
    SlipWall,
    /// Moving oblique shock of the double Mach reflection: `post` for
    /// `x <= x0 + tan(angle) y + speed t`, `pre` otherwise.
    ShockLocus {
        x0: f64,
        angle: f64,
        speed: f64,
        post: PrimitiveState,
        pre: PrimitiveState,
    },
    /// Piecewise rule along the face: `below` where `x[coord] < threshold`
    /// (or `<=` when `inclusive`), `above` elsewhere.
    Split {
        coord: usize,
        threshold: f64,
        inclusive: bool,
        below: Box<BoundaryCondition>,
        above: Box<BoundaryCondition>,
    },
}

impl BoundaryCondition {
    pub fn dmr_top(post: PrimitiveState, pre: PrimitiveState) -> Self {
        Self::ShockLocus {
            x0: 1.0 / 6.0,
            angle: 30f64.to_radians(),
            speed: 10.0 / 30f64.to_radians().cos(),
            post,
            pre,
        }
    }
}

/// Side name to condition. Keys are the mesh side names (`left`, `right`,
/// `bottom`, `top`).
pub type BoundaryMap = BTreeMap<String, BoundaryCondition>;

/// Exterior ghost state for a boundary face node.
///
/// `normal` is the outward unit normal of the interior element, `x` the
/// physical position of the face node.
pub fn apply_boundary_conditions(
    interior: &ConservativeState,
    bc: &BoundaryCondition,
    normal: [f64; 2],
    x: [f64; 2],
    time: f64,
    gas: &GasModel,
) -> Result<ConservativeState, SolverError> {
    Ok(match bc {
        BoundaryCondition::Periodic => return Err(SolverError::PeriodicGhost(side_of(normal))),
        BoundaryCondition::FixedState(q) => gas.prim_to_cons(q),
        BoundaryCondition::Transmissive => *interior,
        BoundaryCondition::SlipWall => {
            let vn = (interior.mom[0] * normal[0] + interior.mom[1] * normal[1]) * 2.0;
            ConservativeState::new(
                interior.rho,
                [
                    interior.mom[0] - vn * normal[0],
                    interior.mom[1] - vn * normal[1],
                ],
                interior.energy,
            )
        }
        BoundaryCondition::ShockLocus {
            x0,
            angle,
            speed,
            post,
            pre,
        } => {
            let xs = x0 + angle.tan() * x[1] + speed * time;
            gas.prim_to_cons(if x[0] <= xs { post } else { pre })
        }
        BoundaryCondition::Split {
            coord,
            threshold,
            inclusive,
            below,
            above,
        } => {
            let c = x[*coord];
            let is_below = if *inclusive {
                c <= *threshold
            } else {
                c < *threshold
            };
            let inner = if is_below { below } else { above };
            return apply_boundary_conditions(interior, inner, normal, x, time, gas);
        }
    })
}

fn side_of(normal: [f64; 2]) -> String {
    let idx = if normal[0] < 0.0 {
        0
    } else if normal[0] > 0.0 {
        1
    } else if normal[1] < 0.0 {
        2
    } else {
        3
    };
    SIDE_NAMES[idx].to_string()
}
