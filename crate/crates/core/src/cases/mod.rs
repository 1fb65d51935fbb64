//! Benchmark problem definitions and their reference solutions.

mod exact_riemann;
mod godunov;

pub use exact_riemann::{exact_riemann, ExactRiemann};
pub use godunov::{godunov_reference, ReferenceProfile};

use std::f64::consts::PI;

use crate::mesh::MeshSpec;
use crate::physics::PrimitiveState;
use crate::solver::{BoundaryCondition, BoundaryMap};

pub const CASE_NAMES: [&str; 6] = ["sod", "shu-osher", "vortex", "dmr", "kh", "jet"];

const GAMMA: f64 = 1.4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseKind {
    Sod,
    ShuOsher,
    Vortex,
    DoubleMach,
    KelvinHelmholtz,
    Jet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    ExactRiemann,
    Analytic,
    ReferenceRun,
    None,
}

/// Isentropic vortex parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VortexParams {
    pub strength: f64,
    pub radius: f64,
    pub advection: [f64; 2],
    pub mach: f64,
    pub center: [f64; 2],
}

impl Default for VortexParams {
    fn default() -> Self {
        Self {
            strength: 13.5,
            radius: 1.5,
            advection: [0.0, 1.0],
            mach: 0.4,
            center: [0.0, 0.0],
        }
    }
}

impl VortexParams {
    /// Unbounded-domain vortex state at `x` relative to its centre. Density
    /// is `(gamma M^2 P)^(1/gamma)` so the free stream has unit density and
    /// the pressure gradient balances the centripetal acceleration.
    pub fn state(&self, x: [f64; 2]) -> PrimitiveState {
        let g = GAMMA;
        let (dx, dy) = (x[0] - self.center[0], x[1] - self.center[1]);
        let r2 = dx * dx + dy * dy;
        let phi = ((1.0 - r2) / (2.0 * self.radius * self.radius)).exp();
        let amp = self.strength / (2.0 * PI * self.radius);
        let m2 = self.mach * self.mach;
        let p = 1.0 / (g * m2)
            * (1.0 - self.strength * self.strength * m2 * (g - 1.0) / (8.0 * PI * PI) * phi * phi)
                .powf(g / (g - 1.0));
        PrimitiveState::new(
            (g * m2 * p).powf(1.0 / g),
            [
                self.advection[0] + amp * dy * phi,
                self.advection[1] - amp * dx * phi,
            ],
            p,
        )
    }
}

#[derive(Debug, Clone)]
pub struct CaseSpec {
    pub kind: CaseKind,
    pub name: &'static str,
    pub dim: usize,
    pub lower: [f64; 2],
    pub upper: [f64; 2],
    pub default_mesh: [usize; 2],
    pub boundaries: BoundaryMap,
    pub t_end: f64,
    pub oracle: OracleKind,
    pub orders: Vec<usize>,
    /// CFL number used when the run configuration does not override it.
    pub cfl: f64,
}

fn bmap(entries: &[(&str, BoundaryCondition)]) -> BoundaryMap {
    entries
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

pub const SOD_LEFT: PrimitiveState = PrimitiveState {
    rho: 1.0,
    vel: [0.0, 0.0],
    p: 1.0,
};
pub const SOD_RIGHT: PrimitiveState = PrimitiveState {
    rho: 0.125,
    vel: [0.0, 0.0],
    p: 0.1,
};
pub const SHU_OSHER_LEFT: PrimitiveState = PrimitiveState {
    rho: 3.857143,
    vel: [2.629369, 0.0],
    p: 10.333333,
};
pub const DMR_POST: PrimitiveState = PrimitiveState {
    rho: 8.0,
    vel: [7.14471, -4.125],
    p: 116.5,
};
pub const DMR_PRE: PrimitiveState = PrimitiveState {
    rho: 1.4,
    vel: [0.0, 0.0],
    p: 1.0,
};
pub const KH_INNER: PrimitiveState = PrimitiveState {
    rho: 2.0,
    vel: [0.5, 0.0],
    p: 2.5,
};
pub const KH_OUTER: PrimitiveState = PrimitiveState {
    rho: 1.0,
    vel: [-0.5, 0.0],
    p: 2.5,
};
pub const JET_INFLOW: PrimitiveState = PrimitiveState {
    rho: GAMMA,
    vel: [0.0, 800.0],
    p: 1.0,
};
pub const JET_AMBIENT: PrimitiveState = PrimitiveState {
    rho: 0.1 * GAMMA,
    vel: [0.0, 0.0],
    p: 1.0,
};

pub fn sod_case() -> CaseSpec {
    CaseSpec {
        kind: CaseKind::Sod,
        name: "sod",
        dim: 1,
        lower: [0.0, 0.0],
        upper: [1.0, 0.0],
        default_mesh: [50, 1],
        boundaries: bmap(&[
            ("left", BoundaryCondition::Transmissive),
            ("right", BoundaryCondition::Transmissive),
        ]),
        t_end: 0.2,
        oracle: OracleKind::ExactRiemann,
        orders: vec![3, 5],
        cfl: 0.5,
    }
}

pub fn shu_osher_case() -> CaseSpec {
    CaseSpec {
        kind: CaseKind::ShuOsher,
        name: "shu-osher",
        dim: 1,
        lower: [-5.0, 0.0],
        upper: [5.0, 0.0],
        default_mesh: [200, 1],
        boundaries: bmap(&[
            ("left", BoundaryCondition::Transmissive),
            ("right", BoundaryCondition::Transmissive),
        ]),
        t_end: 1.8,
        oracle: OracleKind::ReferenceRun,
        orders: vec![3],
        cfl: 0.5,
    }
}

pub fn vortex_case() -> CaseSpec {
    CaseSpec {
        kind: CaseKind::Vortex,
        name: "vortex",
        dim: 2,
        lower: [-10.0, -10.0],
        upper: [10.0, 10.0],
        default_mesh: [40, 40],
        boundaries: bmap(&[
            ("left", BoundaryCondition::Periodic),
            ("right", BoundaryCondition::Periodic),
            ("bottom", BoundaryCondition::Periodic),
            ("top", BoundaryCondition::Periodic),
        ]),
        t_end: 20.0,
        oracle: OracleKind::Analytic,
        orders: vec![2, 3, 4, 5, 6, 7],
        cfl: 0.25,
    }
}

pub fn dmr_case() -> CaseSpec {
    CaseSpec {
        kind: CaseKind::DoubleMach,
        name: "dmr",
        dim: 2,
        lower: [0.0, 0.0],
        upper: [4.0, 1.0],
        default_mesh: [240, 60],
        boundaries: bmap(&[
            ("left", BoundaryCondition::FixedState(DMR_POST)),
            ("right", BoundaryCondition::FixedState(DMR_PRE)),
            (
                "bottom",
                BoundaryCondition::Split {
                    coord: 0,
                    threshold: 1.0 / 6.0,
                    inclusive: false,
                    below: Box::new(BoundaryCondition::FixedState(DMR_POST)),
                    above: Box::new(BoundaryCondition::SlipWall),
                },
            ),
            ("top", BoundaryCondition::dmr_top(DMR_POST, DMR_PRE)),
        ]),
        t_end: 0.2,
        oracle: OracleKind::None,
        orders: vec![3],
        cfl: 0.25,
    }
}

pub fn kh_case() -> CaseSpec {
    CaseSpec {
        kind: CaseKind::KelvinHelmholtz,
        name: "kh",
        dim: 2,
        lower: [-0.5, -0.5],
        upper: [0.5, 0.5],
        default_mesh: [64, 64],
        boundaries: bmap(&[
            ("left", BoundaryCondition::Periodic),
            ("right", BoundaryCondition::Periodic),
            ("bottom", BoundaryCondition::Periodic),
            ("top", BoundaryCondition::Periodic),
        ]),
        t_end: 2.0,
        oracle: OracleKind::None,
        orders: vec![4],
        cfl: 0.25,
    }
}

pub fn jet_case() -> CaseSpec {
    CaseSpec {
        kind: CaseKind::Jet,
        name: "jet",
        dim: 2,
        lower: [0.0, 0.0],
        upper: [0.5, 1.5],
        default_mesh: [100, 300],
        boundaries: bmap(&[
            ("left", BoundaryCondition::SlipWall),
            ("right", BoundaryCondition::Transmissive),
            (
                "bottom",
                BoundaryCondition::Split {
                    coord: 0,
                    threshold: 0.05,
                    inclusive: true,
                    below: Box::new(BoundaryCondition::FixedState(JET_INFLOW)),
                    above: Box::new(BoundaryCondition::Transmissive),
                },
            ),
            ("top", BoundaryCondition::Transmissive),
        ]),
        t_end: 0.002,
        oracle: OracleKind::None,
        orders: vec![3],
        cfl: 0.25,
    }
}

impl CaseSpec {
    pub fn by_name(name: &str) -> Option<Self> {
        Some(match name {
            "sod" => sod_case(),
            "shu-osher" => shu_osher_case(),
            "vortex" => vortex_case(),
            "dmr" => dmr_case(),
            "kh" => kh_case(),
            "jet" => jet_case(),
            _ => return None,
        })
    }

    pub fn is_periodic(&self, axis: usize) -> bool {
        let sides = [["left", "right"], ["bottom", "top"]][axis];
        sides
            .iter()
            .all(|s| matches!(self.boundaries.get(*s), Some(BoundaryCondition::Periodic)))
    }

    pub fn mesh_spec(&self, counts: [usize; 2]) -> MeshSpec {
        if self.dim == 1 {
            MeshSpec::line(self.lower[0], self.upper[0], counts[0], self.is_periodic(0))
        } else {
            MeshSpec::rect(
                self.lower,
                self.upper,
                counts,
                [self.is_periodic(0), self.is_periodic(1)],
            )
        }
    }

    /// Whether the initial condition contains discontinuities.
    pub fn is_discontinuous(&self) -> bool {
        self.kind != CaseKind::Vortex
    }

    pub fn initial(&self, x: [f64; 2]) -> PrimitiveState {
        match self.kind {
            CaseKind::Sod => {
                if x[0] <= 0.5 {
                    SOD_LEFT
                } else {
                    SOD_RIGHT
                }
            }
            CaseKind::ShuOsher => {
                if x[0] <= -4.0 {
                    SHU_OSHER_LEFT
                } else {
                    PrimitiveState::new_1d(1.0 + 0.2 * (5.0 * x[0]).sin(), 0.0, 1.0)
                }
            }
            CaseKind::Vortex => vortex_exact(x, 0.0),
            CaseKind::DoubleMach => {
                if x[0] < 1.0 / 6.0 + 30f64.to_radians().tan() * x[1] {
                    DMR_POST
                } else {
                    DMR_PRE
                }
            }
            CaseKind::KelvinHelmholtz => {
                if x[1].abs() <= 0.25 {
                    KH_INNER
                } else {
                    KH_OUTER
                }
            }
            CaseKind::Jet => JET_AMBIENT,
        }
    }

    /// Analytic or exact solution where one exists.
    pub fn exact(&self, x: [f64; 2], t: f64) -> Option<PrimitiveState> {
        match self.kind {
            CaseKind::Sod => {
                if t == 0.0 {
                    return Some(self.initial(x));
                }
                exact_riemann(&SOD_LEFT, &SOD_RIGHT, (x[0] - 0.5) / t, GAMMA).ok()
            }
            CaseKind::Vortex => Some(vortex_exact(x, t)),
            _ => None,
        }
    }
}

/// Vortex advected with the free stream on the periodic `[-10, 10]^2` domain.
pub fn vortex_exact(x: [f64; 2], t: f64) -> PrimitiveState {
    let v = VortexParams::default();
    let wrap = |c: f64| (c + 10.0).rem_euclid(20.0) - 10.0;
    let xs = [
        wrap(x[0] - v.advection[0] * t),
        wrap(x[1] - v.advection[1] * t),
    ];
    v.state(xs)
}

/// Highly resolved Shu–Osher reference at `t = 1.8`.
pub fn shu_osher_reference(cells: usize) -> Result<ReferenceProfile, crate::error::PhysicsError> {
    let case = shu_osher_case();
    godunov_reference(
        |x| case.initial([x, 0.0]),
        case.lower[0],
        case.upper[0],
        cells,
        case.t_end,
        0.9,
        &crate::physics::GasModel::default(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn sod_initial_condition() {
        let c = sod_case();
        assert_eq!(c.initial([0.25, 0.0]), SOD_LEFT);
        assert_eq!(c.initial([0.75, 0.0]), SOD_RIGHT);
        assert_eq!(c.initial([0.5, 0.0]), SOD_LEFT);
    }

    #[test]
    fn shu_osher_initial_condition() {
        let c = shu_osher_case();
        assert_eq!(
            c.initial([-4.5, 0.0]),
            PrimitiveState::new_1d(3.857143, 2.629369, 10.333333)
        );
        assert_eq!(c.initial([0.0, 0.0]), PrimitiveState::new_1d(1.0, 0.0, 1.0));
        assert_abs_diff_eq!(c.initial([PI / 10.0, 0.0]).rho, 1.2, epsilon = 1e-15);
    }

    #[test]
    fn vortex_center_and_far_field() {
        let q = vortex_exact([0.0, 0.0], 0.0);
        assert_eq!(q.vel, [0.0, 1.0]);
        let v = VortexParams::default();
        let far = v.state([1e3, 1e3]);
        let p_inf = 1.0 / (GAMMA * 0.16);
        assert_abs_diff_eq!(far.p, p_inf, epsilon = 1e-12);
        assert_abs_diff_eq!(far.rho, 1.0, epsilon = 1e-12);
        assert_eq!(far.vel, [0.0, 1.0]);
        let x = [1.3, -2.7];
        let a = vortex_exact(x, 0.0);
        let b = vortex_exact(x, 20.0);
        assert_abs_diff_eq!(a.rho, b.rho, epsilon = 1e-12);
        assert_abs_diff_eq!(a.vel[0], b.vel[0], epsilon = 1e-12);
    }

    #[test]
    fn vortex_is_in_radial_equilibrium() {
        // dP/dr = rho u_theta^2 / r, checked with central differences
        let v = VortexParams {
            advection: [0.0, 0.0],
            ..Default::default()
        };
        for r in [0.3, 1.0, 1.7, 3.2] {
            let h = 1e-5;
            let dpdr = (v.state([r + h, 0.0]).p - v.state([r - h, 0.0]).p) / (2.0 * h);
            let q = v.state([r, 0.0]);
            let ut = q.vel[1];
            assert_abs_diff_eq!(dpdr, q.rho * ut * ut / r, epsilon = 1e-8);
        }
    }

    #[test]
    fn vortex_is_isentropic() {
        let g = crate::physics::GasModel::default();
        let s_inf = (1.0 / (GAMMA * 0.16f64)).ln();
        for x in [[0.0, 0.0], [1.0, 0.5], [4.0, -3.0]] {
            let q = vortex_exact(x, 0.0);
            assert_abs_diff_eq!(g.entropy(&g.prim_to_cons(&q)), s_inf, epsilon = 1e-13);
        }
    }

    #[test]
    fn dmr_initial_and_boundary() {
        let c = dmr_case();
        assert_eq!(c.initial([0.0, 0.0]), DMR_POST);
        assert_eq!(c.initial([3.0, 0.0]), DMR_PRE);
        assert!(!c.is_periodic(0));
    }

    #[test]
    fn kh_states() {
        let c = kh_case();
        assert_eq!(c.initial([0.0, 0.0]), KH_INNER);
        assert_eq!(c.initial([0.0, 0.4]), KH_OUTER);
        assert_eq!(c.initial([0.3, -0.25]), KH_INNER);
        for y in [-0.5, -0.2, 0.0, 0.26, 0.49] {
            assert_eq!(c.initial([0.1, y]).p, 2.5);
        }
        assert!(c.is_periodic(0) && c.is_periodic(1));
    }

    #[test]
    fn jet_states() {
        let c = jet_case();
        let g = crate::physics::GasModel::default();
        assert_abs_diff_eq!(c.initial([0.2, 0.3]).rho, 0.14, epsilon = 1e-15);
        let mach = 800.0 / g.sound_speed(&JET_INFLOW);
        assert_abs_diff_eq!(mach, 800.0, epsilon = 1e-9);
        let bottom = &c.boundaries["bottom"];
        let u = g.prim_to_cons(&JET_AMBIENT);
        let ghost =
            crate::solver::apply_boundary_conditions(&u, bottom, [0.0, -1.0], [0.2, 0.0], 0.0, &g)
                .unwrap();
        assert_eq!(ghost, u);
    }

    #[test]
    fn names_round_trip() {
        for n in CASE_NAMES {
            assert_eq!(CaseSpec::by_name(n).unwrap().name, n);
        }
        assert!(CaseSpec::by_name("tgv").is_none());
    }
}
