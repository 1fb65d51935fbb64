//! First-order Godunov finite-volume solver with the exact Riemann flux, used
//! to build highly resolved 1D reference profiles.

use rayon::prelude::*;

use super::exact_riemann::ExactRiemann;
use crate::basis::gauss_legendre;
use crate::error::PhysicsError;
use crate::physics::{ConservativeState, GasModel, PrimitiveState};

/// Cell-centred reference profile.
#[derive(Debug, Clone)]
pub struct ReferenceProfile {
    pub x: Vec<f64>,
    pub q: Vec<PrimitiveState>,
}

impl ReferenceProfile {
    /// Piecewise-linear interpolation between cell centres (constant beyond the ends).
    pub fn sample(&self, x: f64) -> PrimitiveState {
        let n = self.x.len();
        if x <= self.x[0] {
            return self.q[0];
        }
        if x >= self.x[n - 1] {
            return self.q[n - 1];
        }
        let dx = self.x[1] - self.x[0];
        let i = (((x - self.x[0]) / dx).floor() as usize).min(n - 2);
        let w = (x - self.x[i]) / dx;
        let (a, b) = (self.q[i], self.q[i + 1]);
        PrimitiveState::new(
            a.rho + w * (b.rho - a.rho),
            [a.vel[0] + w * (b.vel[0] - a.vel[0]), 0.0],
            a.p + w * (b.p - a.p),
        )
    }
}

/// Runs the Godunov scheme on `[lo, hi]` with transmissive ends. Initial cell
/// averages use 4-point Gauss quadrature of `q0`.
pub fn godunov_reference(
    q0: impl Fn(f64) -> PrimitiveState + Sync,
    lo: f64,
    hi: f64,
    cells: usize,
    t_end: f64,
    cfl: f64,
    gas: &GasModel,
) -> Result<ReferenceProfile, PhysicsError> {
    let dx = (hi - lo) / cells as f64;
    let (gx, gw) = gauss_legendre(4);
    let centers: Vec<f64> = (0..cells).map(|i| lo + (i as f64 + 0.5) * dx).collect();
    let mut u: Vec<ConservativeState> = centers
        .iter()
        .map(|&xc| {
            let mut acc = ConservativeState::default();
            for (x, w) in gx.iter().zip(&gw) {
                acc += gas.prim_to_cons(&q0(xc + 0.5 * dx * x)) * (0.5 * w);
            }
            acc
        })
        .collect();

    let mut t = 0.0;
    let mut flux = vec![ConservativeState::default(); cells + 1];
    while t < t_end {
        let prim: Vec<PrimitiveState> = u
            .par_iter()
            .map(|s| gas.cons_to_prim_unchecked(s))
            .collect();
        let smax = prim
            .iter()
            .map(|q| q.vel[0].abs() + gas.sound_speed(q))
            .fold(0.0, f64::max);
        let mut dt = cfl * dx / smax;
        if t + dt > t_end {
            dt = t_end - t;
        }
        flux.par_iter_mut().enumerate().try_for_each(|(f, out)| {
            let ql = prim[f.saturating_sub(1)];
            let qr = prim[f.min(cells - 1)];
            *out = ExactRiemann::new(&ql, &qr, gas.gamma)?.godunov_flux(gas);
            Ok::<(), PhysicsError>(())
        })?;
        let r = dt / dx;
        u.par_iter_mut().enumerate().for_each(|(i, ui)| {
            *ui += (flux[i] - flux[i + 1]) * r;
        });
        t += dt;
    }
    Ok(ReferenceProfile {
        x: centers,
        q: u.iter().map(|s| gas.cons_to_prim_unchecked(s)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cases::exact_riemann::exact_riemann;

    #[test]
    fn godunov_converges_to_exact_sod() {
        let gas = GasModel::default();
        let l = PrimitiveState::new_1d(1.0, 0.0, 1.0);
        let r = PrimitiveState::new_1d(0.125, 0.0, 0.1);
        let q0 = |x: f64| if x <= 0.5 { l } else { r };
        let mut errs = Vec::new();
        for cells in [200, 800] {
            let prof = godunov_reference(q0, 0.0, 1.0, cells, 0.2, 0.9, &gas).unwrap();
            let e: f64 = prof
                .x
                .iter()
                .zip(&prof.q)
                .map(|(&x, q)| {
                    (q.rho - exact_riemann(&l, &r, (x - 0.5) / 0.2, 1.4).unwrap().rho).abs()
                })
                .sum::<f64>()
                / cells as f64;
            errs.push(e);
        }
        assert!(errs[1] < 0.6 * errs[0], "{errs:?}");
        assert!(errs[1] < 1e-2);
    }

    #[test]
    fn profile_interpolation() {
        let prof = ReferenceProfile {
            x: vec![0.0, 1.0, 2.0],
            q: vec![
                PrimitiveState::new_1d(1.0, 0.0, 1.0),
                PrimitiveState::new_1d(3.0, 2.0, 1.0),
                PrimitiveState::new_1d(5.0, 0.0, 1.0),
            ],
        };
        assert_eq!(prof.sample(0.5).rho, 2.0);
        assert_eq!(prof.sample(1.5).vel[0], 1.0);
        assert_eq!(prof.sample(-1.0).rho, 1.0);
        assert_eq!(prof.sample(9.0).rho, 5.0);
    }
}
