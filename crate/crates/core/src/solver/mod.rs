//! Flux reconstruction discretisation of the Euler equations with SSP-RK3
//! time stepping and the adaptive filter applied after every stage.

mod boundary;

pub use boundary::{apply_boundary_conditions, BoundaryCondition, BoundaryMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::ReferenceBasis;
use crate::error::SolverError;
use crate::filter::{self, FilterMode, FilterOutcome};
use crate::mesh::{MeshTopology, Neighbor, SIDE_NAMES};
use crate::physics::{ConservativeState, GasModel, PrimitiveState, RiemannSolver};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub cfl: f64,
    pub riemann: RiemannSolver,
    pub filter: FilterMode,
    pub gas: GasModel,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            cfl: 0.5,
            riemann: RiemannSolver::Hllc,
            filter: FilterMode::Entropy,
            gas: GasModel::default(),
        }
    }
}

/// Nodal solution on every element, element-major then node-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField {
    pub states: Vec<ConservativeState>,
    pub time: f64,
}

/// Filter activity aggregated over the stages of one step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepStats {
    pub activations: usize,
    pub evaluations: usize,
    pub max_zeta: f64,
    pub density_bound: usize,
    pub pressure_bound: usize,
    pub entropy_bound: usize,
}

impl StepStats {
    fn absorb(&mut self, outcomes: &[FilterOutcome]) {
        self.evaluations += outcomes.len();
        for o in outcomes.iter().filter(|o| o.activated) {
            self.activations += 1;
            self.max_zeta = self.max_zeta.max(o.zeta);
            match o.binding {
                filter::ConstraintClass::Density => self.density_bound += 1,
                filter::ConstraintClass::Pressure => self.pressure_bound += 1,
                filter::ConstraintClass::Entropy => self.entropy_bound += 1,
                filter::ConstraintClass::None => {}
            }
        }
    }

    pub fn activation_fraction(&self) -> f64 {
        if self.evaluations == 0 {
            0.0
        } else {
            self.activations as f64 / self.evaluations as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub time: f64,
    pub dt: f64,
    pub stats: StepStats,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunStats {
    pub steps: usize,
    pub activations: usize,
    pub evaluations: usize,
    pub max_zeta: f64,
    pub records: Vec<StepRecord>,
}

impl RunStats {
    pub fn activation_fraction(&self) -> f64 {
        if self.evaluations == 0 {
            0.0
        } else {
            self.activations as f64 / self.evaluations as f64
        }
    }
}

pub struct Solver {
    pub basis: ReferenceBasis,
    pub mesh: MeshTopology,
    pub config: SolverConfig,
    /// Boundary condition per side index (see [`SIDE_NAMES`]).
    bcs: [Option<BoundaryCondition>; 4],
    coords: Vec<[f64; 2]>,
}

/// Per-thread buffers for the element loop.
struct Scratch {
    flux: [Vec<ConservativeState>; 2],
}

impl Solver {
    /// Every boundary side present in the mesh must resolve to a condition.
    pub fn new(
        basis: ReferenceBasis,
        mesh: MeshTopology,
        bcs: &BoundaryMap,
        config: SolverConfig,
    ) -> Result<Self, SolverError> {
        assert_eq!(basis.dim, mesh.dim, "basis and mesh dimensions differ");
        let mut resolved: [Option<BoundaryCondition>; 4] = Default::default();
        for nb in mesh.neighbors.iter().flatten() {
            if let Neighbor::Boundary(side) = *nb {
                if resolved[side].is_none() {
                    let bc = bcs.get(SIDE_NAMES[side]).ok_or_else(|| {
                        SolverError::UnknownBoundary(SIDE_NAMES[side].to_string())
                    })?;
                    if *bc == BoundaryCondition::Periodic {
                        return Err(SolverError::PeriodicGhost(SIDE_NAMES[side].to_string()));
                    }
                    resolved[side] = Some(bc.clone());
                }
            }
        }
        let coords = (0..mesh.num_elements())
            .flat_map(|k| basis.nodes.iter().map(move |&xi| (k, xi)))
            .map(|(k, xi)| mesh.map_point(k, xi))
            .collect();
        Ok(Self {
            basis,
            mesh,
            config,
            bcs: resolved,
            coords,
        })
    }

    pub fn gas(&self) -> &GasModel {
        &self.config.gas
    }

    pub fn npts(&self) -> usize {
        self.basis.npts
    }

    /// Physical coordinates of every solution node, in field order.
    pub fn node_coords(&self) -> &[[f64; 2]] {
        &self.coords
    }

    pub fn initialize(&self, q0: impl Fn([f64; 2]) -> PrimitiveState) -> SolutionField {
        let gas = self.config.gas;
        SolutionField {
            states: self
                .coords
                .iter()
                .map(|&x| gas.prim_to_cons(&q0(x)))
                .collect(),
            time: 0.0,
        }
    }

    fn face_points(&self) -> usize {
        if self.mesh.dim == 1 {
            1
        } else {
            self.basis.n1
        }
    }

    fn ghost(
        &self,
        states: &[ConservativeState],
        elem: usize,
        local_face: usize,
        j: usize,
        side: usize,
        time: f64,
    ) -> Result<ConservativeState, SolverError> {
        let node = self.basis.face_index_sets[local_face][j];
        let gi = elem * self.npts() + node;
        let axis = local_face / 2;
        let mut normal = [0.0; 2];
        normal[axis] = if local_face % 2 == 0 { -1.0 } else { 1.0 };
        let bc = self.bcs[side]
            .as_ref()
            .ok_or_else(|| SolverError::UnknownBoundary(SIDE_NAMES[side].to_string()))?;
        apply_boundary_conditions(
            &states[gi],
            bc,
            normal,
            self.coords[gi],
            time,
            &self.config.gas,
        )
    }

    /// Common fluxes on every face node, oriented along `+axis`.
    fn face_fluxes(
        &self,
        states: &[ConservativeState],
        time: f64,
    ) -> Result<Vec<ConservativeState>, SolverError> {
        let nf = self.face_points();
        let npts = self.npts();
        let gas = &self.config.gas;
        let riemann = self.config.riemann;
        let mut out = vec![ConservativeState::default(); self.mesh.faces.len() * nf];
        out.par_chunks_mut(nf)
            .zip(self.mesh.faces.par_iter())
            .try_for_each(|(dst, face)| -> Result<(), SolverError> {
                let a = face.axis;
                let mut n = [0.0; 2];
                n[a] = 1.0;
                for (j, d) in dst.iter_mut().enumerate() {
                    let minus = match face.minus {
                        Neighbor::Element(m) => {
                            states[m * npts + self.basis.face_index_sets[2 * a + 1][j]]
                        }
                        Neighbor::Boundary(side) => {
                            let Neighbor::Element(p) = face.plus else {
                                unreachable!("face without elements")
                            };
                            self.ghost(states, p, 2 * a, j, side, time)?
                        }
                    };
                    let plus = match face.plus {
                        Neighbor::Element(p) => {
                            states[p * npts + self.basis.face_index_sets[2 * a][j]]
                        }
                        Neighbor::Boundary(side) => {
                            let Neighbor::Element(m) = face.minus else {
                                unreachable!("face without elements")
                            };
                            self.ghost(states, m, 2 * a + 1, j, side, time)?
                        }
                    };
                    *d = riemann.flux(gas, &minus, &plus, n)?;
                }
                Ok(())
            })?;
        Ok(out)
    }

    /// Semi-discrete time derivative of every nodal state.
    pub fn compute_rhs(
        &self,
        states: &[ConservativeState],
        time: f64,
    ) -> Result<Vec<ConservativeState>, SolverError> {
        let face_flux = self.face_fluxes(states, time)?;
        let mut rhs = vec![ConservativeState::default(); states.len()];
        let npts = self.npts();
        let n1 = self.basis.n1;
        let dim = self.mesh.dim;
        let nf = self.face_points();
        let gamma = self.config.gas.gamma;
        let scale = [
            2.0 / self.mesh.element_size[0],
            2.0 / self.mesh.element_size[1],
        ];
        let d = &self.basis.diff_1d;

        rhs.par_chunks_mut(npts)
            .zip(states.par_chunks(npts))
            .enumerate()
            .try_for_each_init(
                || Scratch {
                    flux: [
                        vec![ConservativeState::default(); npts],
                        vec![ConservativeState::default(); npts],
                    ],
                },
                |scratch, (k, (out, el))| -> Result<(), SolverError> {
                    for (i, u) in el.iter().enumerate() {
                        let p = u.pressure(gamma);
                        let inv_rho = 1.0 / u.rho;
                        let vx = u.mom[0] * inv_rho;
                        scratch.flux[0][i] = ConservativeState::new(
                            u.mom[0],
                            [u.mom[0] * vx + p, u.mom[1] * vx],
                            (u.energy + p) * vx,
                        );
                        if dim == 2 {
                            let vy = u.mom[1] * inv_rho;
                            scratch.flux[1][i] = ConservativeState::new(
                                u.mom[1],
                                [u.mom[0] * vy, u.mom[1] * vy + p],
                                (u.energy + p) * vy,
                            );
                        }
                    }
                    // interior divergence along grid lines
                    for b in 0..npts / n1 {
                        for a in 0..n1 {
                            let mut acc = ConservativeState::default();
                            for (c, f) in d[a * n1..(a + 1) * n1]
                                .iter()
                                .zip(&scratch.flux[0][b * n1..(b + 1) * n1])
                            {
                                acc += *f * *c;
                            }
                            out[b * n1 + a] = acc * scale[0];
                        }
                    }
                    if dim == 2 {
                        for b in 0..n1 {
                            for a in 0..n1 {
                                let mut acc = ConservativeState::default();
                                for kk in 0..n1 {
                                    acc += scratch.flux[1][kk * n1 + a] * d[b * n1 + kk];
                                }
                                out[b * n1 + a] += acc * scale[1];
                            }
                        }
                    }
                    // interface corrections
                    for lf in 0..2 * dim {
                        let axis = lf / 2;
                        let sign = if lf % 2 == 0 { -1.0 } else { 1.0 };
                        let f = self.mesh.element_faces[k][lf];
                        let g = &self.basis.corr_grad_1d[lf % 2];
                        for j in 0..nf {
                            let node = self.basis.face_index_sets[lf][j];
                            // outward common minus outward interior normal flux
                            let jump = (face_flux[f * nf + j] - scratch.flux[axis][node])
                                * (sign * scale[axis]);
                            for t in 0..n1 {
                                let line_node = if axis == 0 { j * n1 + t } else { t * n1 + j };
                                out[line_node] += jump * g[t];
                            }
                        }
                    }
                    for (i, o) in out.iter_mut().enumerate() {
                        *o = -*o;
                        if !o.is_finite() {
                            return Err(SolverError::NonFinite {
                                element: k,
                                node: i,
                            });
                        }
                    }
                    Ok(())
                },
            )?;
        Ok(rhs)
    }

    /// Largest stable step `cfl * min_k h / ((2p + 1) lambda_k)`. Boundary
    /// ghost states at `time` count toward the wavespeed, so an inflow
    /// faster than the interior flow limits the step.
    pub fn stable_dt(&self, states: &[ConservativeState], time: f64) -> Result<f64, SolverError> {
        let gas = &self.config.gas;
        let interior = states
            .par_iter()
            .map(|u| gas.max_wavespeed(u))
            .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
        let nf = self.face_points();
        let boundary = (0..self.mesh.num_elements())
            .into_par_iter()
            .map(|k| {
                let mut lam: f64 = 0.0;
                for (lf, nb) in self.mesh.neighbors[k].iter().enumerate() {
                    if let Neighbor::Boundary(side) = *nb {
                        for j in 0..nf {
                            lam = lam.max(
                                gas.max_wavespeed(&self.ghost(states, k, lf, j, side, time)?)?,
                            );
                        }
                    }
                }
                Ok::<f64, SolverError>(lam)
            })
            .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
        let lam = interior.max(boundary);
        let h = self.mesh.min_element_size();
        let dt = self.config.cfl * h / ((2 * self.basis.order + 1) as f64 * lam);
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(SolverError::NonPositiveDt(dt));
        }
        Ok(dt)
    }

    /// Minimum boundary-state entropy over each element's boundary faces.
    fn boundary_entropy(
        &self,
        states: &[ConservativeState],
        time: f64,
    ) -> Result<Vec<f64>, SolverError> {
        let nf = self.face_points();
        (0..self.mesh.num_elements())
            .into_par_iter()
            .map(|k| {
                let mut s = f64::INFINITY;
                for (lf, nb) in self.mesh.neighbors[k].iter().enumerate() {
                    if let Neighbor::Boundary(side) = *nb {
                        for j in 0..nf {
                            let g = self.ghost(states, k, lf, j, side, time)?;
                            s = s.min(self.config.gas.entropy(&g));
                        }
                    }
                }
                Ok(s)
            })
            .collect()
    }

    /// Local minimum entropy bound for every element from a stage solution.
    pub fn sigma_min(
        &self,
        states: &[ConservativeState],
        time: f64,
    ) -> Result<Vec<f64>, SolverError> {
        let star = filter::element_min_entropies(states, self.npts(), &self.config.gas);
        let bnd = self.boundary_entropy(states, time)?;
        Ok(filter::compute_sigma_min(&self.mesh, &star, &bnd))
    }

    fn apply_filter(
        &self,
        states: &mut [ConservativeState],
        sigma_min: &[f64],
    ) -> Result<Vec<FilterOutcome>, SolverError> {
        filter::filter_field(
            states,
            &self.basis,
            sigma_min,
            &self.config.gas,
            self.config.filter,
        )
    }

    fn stage(
        &self,
        base: &[ConservativeState],
        stage_in: &[ConservativeState],
        t_in: f64,
        dt: f64,
        weights: (f64, f64),
    ) -> Result<(Vec<ConservativeState>, Vec<FilterOutcome>), SolverError> {
        let sigma_min = if self.config.filter == FilterMode::Off {
            Vec::new()
        } else {
            self.sigma_min(stage_in, t_in)?
        };
        let l = self.compute_rhs(stage_in, t_in)?;
        let (wa, wb) = weights;
        let mut next: Vec<ConservativeState> = base
            .par_iter()
            .zip(stage_in.par_iter().zip(l.par_iter()))
            .map(|(u0, (ui, li))| {
                if wa == 0.0 {
                    *ui + *li * dt
                } else {
                    *u0 * wa + (*ui + *li * dt) * wb
                }
            })
            .collect();
        let outcomes = if self.config.filter == FilterMode::Off {
            Vec::new()
        } else {
            self.apply_filter(&mut next, &sigma_min)?
        };
        Ok((next, outcomes))
    }

    /// One Shu–Osher SSP-RK3 step with filtering after every stage.
    pub fn ssp_rk3_step(
        &self,
        field: &mut SolutionField,
        dt: f64,
    ) -> Result<StepStats, SolverError> {
        let t = field.time;
        let wrap = |stage: usize| {
            move |e: SolverError| SolverError::Stage {
                time: t,
                stage,
                source: Box::new(e),
            }
        };
        let u0 = &field.states;
        let mut stats = StepStats::default();
        let (u1, o) = self.stage(u0, u0, t, dt, (0.0, 1.0)).map_err(wrap(1))?;
        stats.absorb(&o);
        let (u2, o) = self
            .stage(u0, &u1, t + dt, dt, (0.75, 0.25))
            .map_err(wrap(2))?;
        stats.absorb(&o);
        let (u3, o) = self
            .stage(u0, &u2, t + 0.5 * dt, dt, (1.0 / 3.0, 2.0 / 3.0))
            .map_err(wrap(3))?;
        stats.absorb(&o);
        field.states = u3;
        field.time = t + dt;
        Ok(stats)
    }

    /// Steps until `t_end`, clipping the final step to land on it exactly.
    pub fn advance_to_time(
        &self,
        field: &mut SolutionField,
        t_end: f64,
        mut on_step: impl FnMut(&StepRecord, &SolutionField),
    ) -> Result<RunStats, SolverError> {
        if t_end < field.time {
            return Err(SolverError::BackwardsInTime {
                time: field.time,
                t_end,
            });
        }
        let mut run = RunStats::default();
        while field.time < t_end {
            let mut dt = self.stable_dt(&field.states, field.time)?;
            let last = field.time + dt >= t_end;
            if last {
                dt = t_end - field.time;
            }
            let stats = self.ssp_rk3_step(field, dt)?;
            if last {
                field.time = t_end;
            }
            run.steps += 1;
            run.activations += stats.activations;
            run.evaluations += stats.evaluations;
            run.max_zeta = run.max_zeta.max(stats.max_zeta);
            let rec = StepRecord {
                step: run.steps,
                time: field.time,
                dt,
                stats,
            };
            on_step(&rec, field);
            run.records.push(rec);
        }
        Ok(run)
    }

    /// Domain integrals of the conserved variables.
    pub fn totals(&self, states: &[ConservativeState]) -> [f64; 4] {
        let mut acc = [0.0; 4];
        for el in states.chunks(self.npts()) {
            for (u, w) in el.iter().zip(&self.basis.quad_weights) {
                for (a, v) in acc.iter_mut().zip(u.as_array()) {
                    *a += w * v * self.mesh.jacobian;
                }
            }
        }
        acc
    }

    /// Quadrature-weighted element means of one element's states.
    pub fn element_mean(&self, states: &[ConservativeState], k: usize) -> ConservativeState {
        let n = self.npts();
        filter::element_mean(&states[k * n..(k + 1) * n], &self.basis)
    }

    /// Boundary flux integral `sum_faces sum_j m_j F.n` over domain boundary faces,
    /// with `n` pointing out of the domain.
    pub fn boundary_flux_integral(
        &self,
        states: &[ConservativeState],
        time: f64,
    ) -> Result<[f64; 4], SolverError> {
        let nf = self.face_points();
        let ff = self.face_fluxes(states, time)?;
        let w = self.basis.face_weights();
        let mut acc = [0.0; 4];
        for (fi, face) in self.mesh.faces.iter().enumerate() {
            let sign = match (face.minus, face.plus) {
                (Neighbor::Boundary(_), _) => -1.0,
                (_, Neighbor::Boundary(_)) => 1.0,
                _ => continue,
            };
            let len = if self.mesh.dim == 1 {
                1.0
            } else {
                0.5 * self.mesh.element_size[1 - face.axis]
            };
            for j in 0..nf {
                for (a, v) in acc.iter_mut().zip(ff[fi * nf + j].as_array()) {
                    *a += sign * w[j] * len * v;
                }
            }
        }
        Ok(acc)
    }

    /// Common outward normal fluxes of element `k`, per local face then face node.
    pub fn element_face_fluxes(
        &self,
        states: &[ConservativeState],
        k: usize,
        time: f64,
    ) -> Result<Vec<Vec<ConservativeState>>, SolverError> {
        let nf = self.face_points();
        let ff = self.face_fluxes(states, time)?;
        Ok((0..2 * self.mesh.dim)
            .map(|lf| {
                let f = self.mesh.element_faces[k][lf];
                let sign = if lf % 2 == 0 { -1.0 } else { 1.0 };
                (0..nf).map(|j| ff[f * nf + j] * sign).collect()
            })
            .collect())
    }
}
