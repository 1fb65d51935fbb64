use crate::basis::{gauss_legendre, lagrange_interp_matrix};
use crate::error::BasisError;
use crate::physics::PrimitiveState;
use crate::solver::{SolutionField, Solver};

use super::HarnessError;

/// Density error norms over the `M` solution points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointwiseNorms {
    /// `(1/M) sum |e|`
    pub l1: f64,
    /// `sqrt((1/M) sum e^2)`
    pub l2: f64,
    /// `sqrt(sum e^2) / M`
    pub l2_root_sum: f64,
}

/// Point-mean density error norms of the field against `oracle`.
pub fn error_norms_pointwise(
    solver: &Solver,
    field: &SolutionField,
    oracle: impl Fn([f64; 2]) -> Option<PrimitiveState>,
) -> Result<PointwiseNorms, HarnessError> {
    let errors = field
        .states
        .iter()
        .zip(solver.node_coords())
        .map(|(u, &x)| {
            oracle(x)
                .map(|q| u.rho - q.rho)
                .ok_or(HarnessError::NoOracle)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(pointwise_from_errors(&errors))
}

/// Norms of a raw list of density errors.
pub fn pointwise_from_errors(errors: &[f64]) -> PointwiseNorms {
    let m = errors.len() as f64;
    let sum_sq: f64 = errors.iter().map(|e| e * e).sum();
    PointwiseNorms {
        l1: errors.iter().map(|e| e.abs()).sum::<f64>() / m,
        l2: (sum_sq / m).sqrt(),
        l2_root_sum: sum_sq.sqrt() / m,
    }
}

/// Volume-normalised L2 density error, integrated per element with a
/// `(2p)^dim`-point Gauss–Legendre rule.
pub fn error_norm_l2_integral(
    solver: &Solver,
    field: &SolutionField,
    oracle: impl Fn([f64; 2]) -> Option<PrimitiveState>,
) -> Result<f64, HarnessError> {
    let basis = &solver.basis;
    let mesh = &solver.mesh;
    if basis.order < 1 {
        return Err(BasisError::OrderTooLow(basis.order).into());
    }
    let nq = 2 * basis.order;
    let (gx, gw) = gauss_legendre(nq);
    let interp = lagrange_interp_matrix(&basis.nodes_1d, &gx);
    let n1 = basis.n1;
    let npts = basis.npts;
    let mut total = 0.0;
    for k in 0..mesh.num_elements() {
        let rho: Vec<f64> = field.states[k * npts..(k + 1) * npts]
            .iter()
            .map(|u| u.rho)
            .collect();
        if mesh.dim == 1 {
            for (q, w) in gw.iter().enumerate() {
                let r: f64 = (0..n1).map(|a| interp[q * n1 + a] * rho[a]).sum();
                let x = mesh.map_point(k, [gx[q], 0.0]);
                let e = r - oracle(x).ok_or(HarnessError::NoOracle)?.rho;
                total += w * mesh.jacobian * e * e;
            }
        } else {
            // interpolate along x first, then y
            let mut rows = vec![0.0; nq * n1];
            for b in 0..n1 {
                for q in 0..nq {
                    rows[b * nq + q] = (0..n1).map(|a| interp[q * n1 + a] * rho[b * n1 + a]).sum();
                }
            }
            for qy in 0..nq {
                for qx in 0..nq {
                    let r: f64 = (0..n1)
                        .map(|b| interp[qy * n1 + b] * rows[b * nq + qx])
                        .sum();
                    let x = mesh.map_point(k, [gx[qx], gx[qy]]);
                    let e = r - oracle(x).ok_or(HarnessError::NoOracle)?.rho;
                    total += gw[qx] * gw[qy] * mesh.jacobian * e * e;
                }
            }
        }
    }
    Ok((total / mesh.domain_volume()).sqrt())
}
