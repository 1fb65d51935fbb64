//! Quick property checks run by `entrofilt selftest`. The full suites live in
//! the crate's integration tests; these are fast spot checks of the same
//! properties on a handful of deterministic inputs.

use crate::basis::ReferenceBasis;
use crate::cases::{ExactRiemann, SOD_LEFT, SOD_RIGHT};
use crate::filter::{apply_filter, filter_element, FilterConstraints, FilterMode};
use crate::mesh::{build_mesh, MeshSpec};
use crate::physics::{ConservativeState, GasModel, PrimitiveState};
use crate::solver::{BoundaryCondition, BoundaryMap, Solver, SolverConfig};

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, value: f64, tol: f64) -> CheckResult {
    CheckResult {
        name,
        passed: value <= tol,
        detail: format!("{value:.3e} (tolerance {tol:.0e})"),
    }
}

/// Deterministic values in `[0, 1)` from a 64-bit LCG.
struct Sequence(u64);

impl Sequence {
    fn next(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
}

fn transmissive_map() -> BoundaryMap {
    ["left", "right", "bottom", "top"]
        .iter()
        .map(|s| (s.to_string(), BoundaryCondition::Transmissive))
        .collect()
}

fn polynomial_solver(order: usize, dim: usize) -> Solver {
    let spec = if dim == 1 {
        MeshSpec::line(-1.0, 2.0, 5, false)
    } else {
        MeshSpec::rect([-1.0, 0.0], [2.0, 1.5], [4, 3], [false, false])
    };
    let mesh = build_mesh(&spec).expect("valid mesh");
    let basis = ReferenceBasis::new(order, dim).expect("valid basis");
    Solver::new(basis, mesh, &transmissive_map(), SolverConfig::default()).expect("valid solver")
}

/// Constant velocity and pressure with a density that is a degree-`p`
/// polynomial in each coordinate; the flux divergence is then exactly
/// `-(v . grad rho) (1, v, |v|^2 / 2)`.
pub fn fr_polynomial_residual(order: usize, dim: usize) -> f64 {
    let solver = polynomial_solver(order, dim);
    let v = [0.7, if dim == 2 { -0.4 } else { 0.0 }];
    let pw = order as i32;
    let rho =
        |x: [f64; 2]| 2.0 + 0.1 * x[0].powi(pw) + if dim == 2 { 0.05 * x[1].powi(pw) } else { 0.0 };
    let drho = |x: [f64; 2]| {
        let gx = 0.1 * pw as f64 * x[0].powi(pw - 1);
        let gy = if dim == 2 {
            0.05 * pw as f64 * x[1].powi(pw - 1)
        } else {
            0.0
        };
        [gx, gy]
    };
    let field = solver.initialize(|x| PrimitiveState::new(rho(x), v, 1.0));
    let rhs = solver.compute_rhs(&field.states, 0.0).expect("rhs");
    let mut err: f64 = 0.0;
    for (r, &x) in rhs.iter().zip(solver.node_coords()) {
        let g = drho(x);
        let a = -(v[0] * g[0] + v[1] * g[1]);
        let expected = [a, a * v[0], a * v[1], a * 0.5 * (v[0] * v[0] + v[1] * v[1])];
        for (got, want) in r.as_array().iter().zip(expected) {
            err = err.max((got - want).abs());
        }
    }
    err
}

/// Largest mismatch between the quadrature mean of the residual and the
/// net outward interface flux of each element.
pub fn mean_update_residual(order: usize, dim: usize) -> f64 {
    let solver = polynomial_solver(order, dim);
    let mut seq = Sequence(order as u64 * 31 + dim as u64);
    let gas = *solver.gas();
    let states: Vec<ConservativeState> = (0..solver.node_coords().len())
        .map(|_| {
            gas.prim_to_cons(&PrimitiveState::new(
                0.5 + seq.next(),
                [seq.next() - 0.5, seq.next() - 0.5],
                0.5 + seq.next(),
            ))
        })
        .collect();
    let rhs = solver.compute_rhs(&states, 0.0).expect("rhs");
    let w = solver.basis.face_weights();
    let mut err: f64 = 0.0;
    for k in 0..solver.mesh.num_elements() {
        let mean = solver.element_mean(&rhs, k);
        let faces = solver
            .element_face_fluxes(&states, k, 0.0)
            .expect("face fluxes");
        let mut net = ConservativeState::default();
        for (lf, f) in faces.iter().enumerate() {
            let len = if dim == 1 {
                1.0
            } else {
                0.5 * solver.mesh.element_size[1 - lf / 2]
            };
            for (j, flux) in f.iter().enumerate() {
                net += *flux * (w[j] * len);
            }
        }
        let expected = net * (-1.0 / solver.mesh.element_volume());
        for (a, b) in mean.as_array().iter().zip(expected.as_array()) {
            err = err.max((a - b).abs());
        }
    }
    err
}

fn random_modes(basis: &ReferenceBasis, seq: &mut Sequence) -> Vec<f64> {
    (0..basis.npts)
        .map(|i| {
            if i == 0 {
                1.0 + seq.next()
            } else {
                seq.next() - 0.5
            }
        })
        .collect()
}

pub fn run_all() -> Vec<CheckResult> {
    let mut out = Vec::new();

    let mut gll: f64 = 0.0;
    for dim in 1..=2 {
        for p in 1..=10 {
            let b = ReferenceBasis::new(p, dim).expect("basis");
            gll = gll.max((b.quad_weights.iter().sum::<f64>() - 2f64.powi(dim as i32)).abs());
        }
    }
    out.push(check("gll weights sum to 2^dim", gll, 1e-13));

    let mut rt: f64 = 0.0;
    let mut seq = Sequence(1);
    for p in 1..=8 {
        let b = ReferenceBasis::new(p, 2).expect("basis");
        let v: Vec<f64> = (0..b.npts).map(|_| seq.next()).collect();
        let back = b.to_nodal(&b.to_modal(&v));
        rt = rt.max(
            v.iter()
                .zip(&back)
                .map(|(a, c)| (a - c).abs())
                .fold(0.0, f64::max),
        );
    }
    out.push(check("modal round trip", rt, 1e-12));

    let mut fr: f64 = 0.0;
    let mut mu: f64 = 0.0;
    for dim in 1..=2 {
        for p in 1..=5 {
            fr = fr.max(fr_polynomial_residual(p, dim));
            mu = mu.max(mean_update_residual(p, dim));
        }
    }
    out.push(check("flux divergence polynomial exactness", fr, 1e-10));
    out.push(check(
        "mean update equals interface flux balance",
        mu,
        1e-10,
    ));

    let p_star = ExactRiemann::new(&SOD_LEFT, &SOD_RIGHT, 1.4)
        .map(|r| r.p_star)
        .unwrap_or(f64::NAN);
    out.push(check("sod star pressure", (p_star - 0.30313).abs(), 1e-4));

    let (mut cons, mut diss, mut ident) = (0.0f64, 0.0f64, 0.0f64);
    for mode in [FilterMode::Entropy, FilterMode::Linear] {
        for p in 1..=6 {
            let b = ReferenceBasis::new(p, 2).expect("basis");
            let modes = random_modes(&b, &mut seq);
            for zeta in [0.0, 1e-3, 0.3, 2.0, 46.0] {
                let f = apply_filter(mode, &modes, &b.mode_orders, zeta).expect("filter");
                cons = cons.max((f[0] - modes[0]).abs());
                for (a, c) in f.iter().zip(&modes) {
                    diss = diss.max(a.abs() - c.abs());
                }
            }
            let gas = GasModel::default();
            let mut states: Vec<ConservativeState> = (0..b.npts)
                .map(|_| {
                    gas.prim_to_cons(&PrimitiveState::new(
                        1.0 + 0.1 * seq.next(),
                        [0.1, 0.2],
                        1.0 + 0.1 * seq.next(),
                    ))
                })
                .collect();
            let before = states.clone();
            let c = FilterConstraints {
                sigma_min: -10.0,
                gas: &gas,
            };
            let o = filter_element(&mut states, &b, &c, mode).expect("filter");
            if o.zeta != 0.0 || states != before {
                ident = 1.0;
            }
        }
    }
    out.push(check("filter preserves the element mean", cons, 1e-12));
    out.push(check("filter never amplifies a mode", diss, 0.0));
    out.push(check(
        "feasible elements pass through unchanged",
        ident,
        0.0,
    ));

    let mesh = build_mesh(&MeshSpec::rect(
        [0.0, 0.0],
        [1.0, 1.0],
        [4, 4],
        [true, true],
    ))
    .expect("mesh");
    let basis = ReferenceBasis::new(3, 2).expect("basis");
    let solver =
        Solver::new(basis, mesh, &BoundaryMap::new(), SolverConfig::default()).expect("solver");
    let q = PrimitiveState::new(1.2, [0.3, -0.5], 0.8);
    let mut field = solver.initialize(|_| q);
    let u0 = field.states[0];
    let mut drift: f64 = 0.0;
    for _ in 0..5 {
        let dt = solver.stable_dt(&field.states, 0.0).expect("dt");
        if solver.ssp_rk3_step(&mut field, dt).is_err() {
            drift = f64::INFINITY;
            break;
        }
    }
    for u in &field.states {
        for (a, b) in u.as_array().iter().zip(u0.as_array()) {
            drift = drift.max((a - b).abs());
        }
    }
    out.push(check("free stream preserved", drift, 1e-12));
    out
}
