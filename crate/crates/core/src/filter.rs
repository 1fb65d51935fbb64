//! Positivity-preserving, entropy-constrained adaptive modal filtering.
//!
//! Each element's modes are damped by `exp(-zeta * p_i^2)`; `zeta` is the
//! smallest strength (found by bisection) for which every solution node has
//! `rho >= rho_min`, `P >= P_min` and `sigma >= sigma_min - eps_sigma`, where
//! `sigma_min` is the minimum nodal entropy over the element and its face
//! neighbours at the previous stage.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::ReferenceBasis;
use crate::error::{FilterError, SolverError};
use crate::mesh::MeshTopology;
use crate::physics::{ConservativeState, GasModel};

/// Strength at which the filtered element is numerically its mean
/// (`exp(-46) < 1e-20`).
pub const ZETA_MAX: f64 = 46.0;
pub const BISECTION_ITERS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FilterMode {
    /// Exponential modal filter `exp(-zeta p^2)`.
    #[default]
    Entropy,
    /// Single damping factor `theta = exp(-zeta)` on every non-mean mode, the
    /// linear scaling limiter toward the element mean.
    Linear,
    Off,
}

impl std::str::FromStr for FilterMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "entropy" => Ok(Self::Entropy),
            "linear" => Ok(Self::Linear),
            "off" => Ok(Self::Off),
            _ => Err(format!(
                "unknown filter mode '{s}' (expected entropy, linear or off)"
            )),
        }
    }
}

impl fmt::Display for FilterMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Entropy => "entropy",
            Self::Linear => "linear",
            Self::Off => "off",
        })
    }
}

impl FilterMode {
    /// Damping factor of a mode of order `p` at strength `zeta`.
    #[inline]
    pub fn damping(&self, zeta: f64, p: usize) -> f64 {
        if p == 0 {
            return 1.0;
        }
        match self {
            Self::Entropy => (-zeta * (p * p) as f64).exp(),
            Self::Linear => (-zeta).exp(),
            Self::Off => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintClass {
    Density,
    Pressure,
    Entropy,
    None,
}

impl fmt::Display for ConstraintClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Density => "density",
            Self::Pressure => "pressure",
            Self::Entropy => "entropy",
            Self::None => "none",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterOutcome {
    pub zeta: f64,
    pub iterations: usize,
    pub activated: bool,
    /// First constraint class violated by the unfiltered element.
    pub binding: ConstraintClass,
}

impl FilterOutcome {
    pub const INACTIVE: Self = Self {
        zeta: 0.0,
        iterations: 0,
        activated: false,
        binding: ConstraintClass::None,
    };
}

#[derive(Debug, Clone, Copy)]
pub struct FilterConstraints<'a> {
    pub sigma_min: f64,
    pub gas: &'a GasModel,
}

/// Minimum nodal entropy of an element; `-inf` if any node is inadmissible.
pub fn element_min_entropy(states: &[ConservativeState], gas: &GasModel) -> f64 {
    states
        .iter()
        .map(|u| gas.entropy(u))
        .fold(f64::INFINITY, f64::min)
}

/// `sigma_min^k`: minimum of `sigma_*` over `A(k)` and over the boundary-state
/// entropies of `k`'s boundary faces (`+inf` where there are none).
pub fn compute_sigma_min(
    mesh: &MeshTopology,
    sigma_star: &[f64],
    boundary_sigma: &[f64],
) -> Vec<f64> {
    mesh.adjacency_with_self
        .iter()
        .enumerate()
        .map(|(k, adj)| {
            adj.iter()
                .map(|&e| sigma_star[e])
                .fold(boundary_sigma[k], f64::min)
        })
        .collect()
}

/// Modes scaled by the filter's damping factor at strength `zeta`.
pub fn apply_filter(
    mode: FilterMode,
    modes: &[f64],
    mode_orders: &[usize],
    zeta: f64,
) -> Result<Vec<f64>, FilterError> {
    if zeta < 0.0 || zeta.is_nan() {
        return Err(FilterError::NegativeZeta(zeta));
    }
    Ok(modes
        .iter()
        .zip(mode_orders)
        .map(|(m, &p)| m * mode.damping(zeta, p))
        .collect())
}

/// Exponential filter `H_i(u_i) = u_i exp(-zeta p_i^2)`.
pub fn apply_exponential_filter(
    modes: &[f64],
    mode_orders: &[usize],
    zeta: f64,
) -> Result<Vec<f64>, FilterError> {
    apply_filter(FilterMode::Entropy, modes, mode_orders, zeta)
}

#[inline]
fn check_state(u: &ConservativeState, sigma_min: f64, gas: &GasModel) -> ConstraintClass {
    if !(u.rho >= gas.rho_min) {
        return ConstraintClass::Density;
    }
    let p = u.pressure(gas.gamma);
    if !(p >= gas.p_min) {
        return ConstraintClass::Pressure;
    }
    if !(gas.entropy_of(u.rho, p) >= sigma_min - gas.eps_sigma) {
        return ConstraintClass::Entropy;
    }
    ConstraintClass::None
}

/// Whether every node satisfies the density, pressure and entropy bounds.
/// Also reports the first violated class in node order.
pub fn constraints_satisfied(
    states: &[ConservativeState],
    constraints: &FilterConstraints,
) -> (bool, ConstraintClass) {
    for u in states {
        let c = check_state(u, constraints.sigma_min, constraints.gas);
        if c != ConstraintClass::None {
            return (false, c);
        }
    }
    (true, ConstraintClass::None)
}

/// Quadrature-weighted element mean of the conserved variables.
pub fn element_mean(states: &[ConservativeState], basis: &ReferenceBasis) -> ConservativeState {
    let mut acc = [0.0; 4];
    for (u, w) in states.iter().zip(&basis.quad_weights) {
        for (a, v) in acc.iter_mut().zip(u.as_array()) {
            *a += w * v;
        }
    }
    let vol = basis.reference_volume();
    ConservativeState::from_array(acc.map(|a| a / vol))
}

struct ModalElement<'a> {
    basis: &'a ReferenceBasis,
    /// `modes[m][var]`
    modes: Vec<[f64; 4]>,
}

impl<'a> ModalElement<'a> {
    fn new(states: &[ConservativeState], basis: &'a ReferenceBasis) -> Self {
        let n = basis.npts;
        let modes = (0..n)
            .map(|m| {
                let row = &basis.modal_fwd[m * n..(m + 1) * n];
                let mut acc = [0.0; 4];
                for (c, u) in row.iter().zip(states) {
                    let a = u.as_array();
                    for v in 0..4 {
                        acc[v] += c * a[v];
                    }
                }
                acc
            })
            .collect();
        Self { basis, modes }
    }

    fn reconstruct(&self, mode: FilterMode, zeta: f64, out: &mut [ConservativeState]) {
        let n = self.basis.npts;
        let scaled: Vec<[f64; 4]> = self
            .modes
            .iter()
            .zip(&self.basis.mode_orders)
            .map(|(m, &p)| {
                let d = mode.damping(zeta, p);
                m.map(|x| x * d)
            })
            .collect();
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.basis.modal_inv[i * n..(i + 1) * n];
            let mut acc = [0.0; 4];
            for (c, m) in row.iter().zip(&scaled) {
                for v in 0..4 {
                    acc[v] += c * m[v];
                }
            }
            *o = ConservativeState::from_array(acc);
        }
    }

    fn feasible(
        &self,
        mode: FilterMode,
        zeta: f64,
        constraints: &FilterConstraints,
        scratch: &mut [ConservativeState],
    ) -> bool {
        self.reconstruct(mode, zeta, scratch);
        constraints_satisfied(scratch, constraints).0
    }
}

/// Filters one element in place and reports the applied strength.
///
/// Feasible elements are left bit-identical with `zeta = 0`. Otherwise the
/// strength is bisected on `[0, ZETA_MAX]` for [`BISECTION_ITERS`] iterations
/// and the feasible (upper) end of the final bracket is applied. The written
/// state is checked again, so every returned element satisfies the bounds.
pub fn filter_element(
    states: &mut [ConservativeState],
    basis: &ReferenceBasis,
    constraints: &FilterConstraints,
    mode: FilterMode,
) -> Result<FilterOutcome, FilterError> {
    if mode == FilterMode::Off {
        return Ok(FilterOutcome::INACTIVE);
    }
    let (ok, binding) = constraints_satisfied(states, constraints);
    if ok {
        return Ok(FilterOutcome::INACTIVE);
    }
    let mean = element_mean(states, basis);
    let mean_class = check_state(&mean, constraints.sigma_min, constraints.gas);
    if mean_class != ConstraintClass::None {
        return Err(FilterError::MeanViolation { class: mean_class });
    }

    let modal = ModalElement::new(states, basis);
    let mut scratch = vec![ConservativeState::default(); states.len()];
    if !modal.feasible(mode, ZETA_MAX, constraints, &mut scratch) {
        return Err(FilterError::InfeasibleAtMax);
    }
    let (mut lo, mut hi) = (0.0, ZETA_MAX);
    for _ in 0..BISECTION_ITERS {
        let mid = 0.5 * (lo + hi);
        if modal.feasible(mode, mid, constraints, &mut scratch) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    modal.reconstruct(mode, hi, states);
    let (ok, class) = constraints_satisfied(states, constraints);
    if !ok {
        return Err(FilterError::PostStateInfeasible { class });
    }
    Ok(FilterOutcome {
        zeta: hi,
        iterations: BISECTION_ITERS,
        activated: true,
        binding,
    })
}

/// `sigma_*` of every element, feeding [`compute_sigma_min`].
pub fn element_min_entropies(
    states: &[ConservativeState],
    npts: usize,
    gas: &GasModel,
) -> Vec<f64> {
    states
        .par_chunks(npts)
        .map(|el| element_min_entropy(el, gas))
        .collect()
}

/// Filters every element given precomputed `sigma_min`. Elements are
/// independent; the returned outcomes are indexed by element.
pub fn filter_field(
    states: &mut [ConservativeState],
    basis: &ReferenceBasis,
    sigma_min: &[f64],
    gas: &GasModel,
    mode: FilterMode,
) -> Result<Vec<FilterOutcome>, SolverError> {
    states
        .par_chunks_mut(basis.npts)
        .zip(sigma_min.par_iter())
        .enumerate()
        .map(|(k, (el, &sm))| {
            let c = FilterConstraints { sigma_min: sm, gas };
            filter_element(el, basis, &c, mode)
                .map_err(|source| SolverError::Filter { element: k, source })
        })
        .collect()
}

/// Boundary-entropy vector that ignores boundary states (every entry `+inf`).
pub fn no_boundary_entropy(mesh: &MeshTopology) -> Vec<f64> {
    mesh.neighbors.iter().map(|_| f64::INFINITY).collect()
}
