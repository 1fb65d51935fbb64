//! Exact solution of the 1D Euler Riemann problem (two-shock/rarefaction
//! pressure function solved by Newton iteration, then wave-fan sampling).

use crate::error::PhysicsError;
use crate::physics::{ConservativeState, GasModel, PrimitiveState};

const TOL: f64 = 1e-12;
const MAX_ITER: usize = 100;

#[derive(Debug, Clone, Copy)]
struct Side {
    rho: f64,
    u: f64,
    p: f64,
    c: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct ExactRiemann {
    left: Side,
    right: Side,
    gamma: f64,
    pub p_star: f64,
    pub u_star: f64,
}

impl ExactRiemann {
    /// Uses the x-velocity of the primitive states; the y-velocity is ignored.
    pub fn new(ql: &PrimitiveState, qr: &PrimitiveState, gamma: f64) -> Result<Self, PhysicsError> {
        for q in [ql, qr] {
            if !(q.rho > 0.0 && q.p > 0.0) {
                return Err(PhysicsError::Inadmissible {
                    rho: q.rho,
                    pressure: q.p,
                });
            }
        }
        let side = |q: &PrimitiveState| Side {
            rho: q.rho,
            u: q.vel[0],
            p: q.p,
            c: (gamma * q.p / q.rho).sqrt(),
        };
        let (l, r) = (side(ql), side(qr));
        if 2.0 / (gamma - 1.0) * (l.c + r.c) <= r.u - l.u {
            return Err(PhysicsError::VacuumGeneration);
        }
        let (p_star, u_star) = if l.p == r.p && l.u == r.u {
            (l.p, l.u)
        } else {
            star_region(&l, &r, gamma)?
        };
        Ok(Self {
            left: l,
            right: r,
            gamma,
            p_star,
            u_star,
        })
    }

    /// Self-similar solution at `s = x / t`.
    pub fn sample(&self, s: f64) -> PrimitiveState {
        let g = self.gamma;
        let (ps, us) = (self.p_star, self.u_star);
        let (rho, u, p) = if s <= us {
            let Side {
                rho: dl,
                u: ul,
                p: pl,
                c: cl,
            } = self.left;
            if ps > pl {
                let sl = ul - cl * ((g + 1.0) / (2.0 * g) * ps / pl + (g - 1.0) / (2.0 * g)).sqrt();
                if s <= sl {
                    (dl, ul, pl)
                } else {
                    let r = ps / pl;
                    let gr = (g - 1.0) / (g + 1.0);
                    (dl * (r + gr) / (gr * r + 1.0), us, ps)
                }
            } else {
                let shl = ul - cl;
                let cml = cl * (ps / pl).powf((g - 1.0) / (2.0 * g));
                let stl = us - cml;
                if s <= shl {
                    (dl, ul, pl)
                } else if s > stl {
                    (dl * (ps / pl).powf(1.0 / g), us, ps)
                } else {
                    let c = 2.0 / (g + 1.0) * (cl + (g - 1.0) / 2.0 * (ul - s));
                    let u = 2.0 / (g + 1.0) * (cl + (g - 1.0) / 2.0 * ul + s);
                    let rho = dl * (c / cl).powf(2.0 / (g - 1.0));
                    let p = pl * (c / cl).powf(2.0 * g / (g - 1.0));
                    (rho, u, p)
                }
            }
        } else {
            let Side {
                rho: dr,
                u: ur,
                p: pr,
                c: cr,
            } = self.right;
            if ps > pr {
                let sr = ur + cr * ((g + 1.0) / (2.0 * g) * ps / pr + (g - 1.0) / (2.0 * g)).sqrt();
                if s >= sr {
                    (dr, ur, pr)
                } else {
                    let r = ps / pr;
                    let gr = (g - 1.0) / (g + 1.0);
                    (dr * (r + gr) / (gr * r + 1.0), us, ps)
                }
            } else {
                let shr = ur + cr;
                let cmr = cr * (ps / pr).powf((g - 1.0) / (2.0 * g));
                let str_ = us + cmr;
                if s >= shr {
                    (dr, ur, pr)
                } else if s <= str_ {
                    (dr * (ps / pr).powf(1.0 / g), us, ps)
                } else {
                    let c = 2.0 / (g + 1.0) * (cr - (g - 1.0) / 2.0 * (ur - s));
                    let u = 2.0 / (g + 1.0) * (-cr + (g - 1.0) / 2.0 * ur + s);
                    let rho = dr * (c / cr).powf(2.0 / (g - 1.0));
                    let p = pr * (c / cr).powf(2.0 * g / (g - 1.0));
                    (rho, u, p)
                }
            }
        };
        PrimitiveState::new_1d(rho, u, p)
    }

    /// Godunov flux: the physical x-flux of the state on `x / t = 0`.
    pub fn godunov_flux(&self, gas: &GasModel) -> ConservativeState {
        let q = self.sample(0.0);
        gas.normal_flux(&gas.prim_to_cons(&q), [1.0, 0.0])
    }
}

fn pressure_function(p: f64, k: &Side, g: f64) -> (f64, f64) {
    if p > k.p {
        let a = 2.0 / ((g + 1.0) * k.rho);
        let b = (g - 1.0) / (g + 1.0) * k.p;
        let q = (a / (b + p)).sqrt();
        ((p - k.p) * q, q * (1.0 - 0.5 * (p - k.p) / (b + p)))
    } else {
        let r = p / k.p;
        (
            2.0 * k.c / (g - 1.0) * (r.powf((g - 1.0) / (2.0 * g)) - 1.0),
            1.0 / (k.rho * k.c) * r.powf(-(g + 1.0) / (2.0 * g)),
        )
    }
}

fn star_region(l: &Side, r: &Side, g: f64) -> Result<(f64, f64), PhysicsError> {
    let du = r.u - l.u;
    let ppv = 0.5 * (l.p + r.p) - 0.125 * du * (l.rho + r.rho) * (l.c + r.c);
    let mut p = ppv.max(TOL);
    for _ in 0..MAX_ITER {
        let (fl, dl) = pressure_function(p, l, g);
        let (fr, dr) = pressure_function(p, r, g);
        let mut next = p - (fl + fr + du) / (dl + dr);
        if next < 0.0 {
            next = TOL;
        }
        let change = 2.0 * (next - p).abs() / (next + p);
        p = next;
        if change < TOL {
            let (fl, _) = pressure_function(p, l, g);
            let (fr, _) = pressure_function(p, r, g);
            return Ok((p, 0.5 * (l.u + r.u) + 0.5 * (fr - fl)));
        }
    }
    Err(PhysicsError::NewtonDivergence {
        iterations: MAX_ITER,
    })
}

/// Exact Riemann solution at `x / t` for the given initial states.
pub fn exact_riemann(
    ql: &PrimitiveState,
    qr: &PrimitiveState,
    s: f64,
    gamma: f64,
) -> Result<PrimitiveState, PhysicsError> {
    Ok(ExactRiemann::new(ql, qr, gamma)?.sample(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sod() -> (PrimitiveState, PrimitiveState) {
        (
            PrimitiveState::new_1d(1.0, 0.0, 1.0),
            PrimitiveState::new_1d(0.125, 0.0, 0.1),
        )
    }

    #[test]
    fn sod_star_state() {
        let (l, r) = sod();
        let rs = ExactRiemann::new(&l, &r, 1.4).unwrap();
        assert_abs_diff_eq!(rs.p_star, 0.30313, epsilon = 1e-4);
        assert_abs_diff_eq!(rs.u_star, 0.92745, epsilon = 1e-4);
        let q = rs.sample(0.0);
        assert_abs_diff_eq!(q.p, rs.p_star, epsilon = 1e-14);
    }

    #[test]
    fn trivial_problem() {
        let q = PrimitiveState::new_1d(0.7, 0.3, 2.0);
        for s in [-3.0, -0.1, 0.0, 0.2, 5.0] {
            let out = exact_riemann(&q, &q, s, 1.4).unwrap();
            assert_abs_diff_eq!(out.rho, q.rho, epsilon = 1e-14);
            assert_abs_diff_eq!(out.vel[0], q.vel[0], epsilon = 1e-14);
            assert_abs_diff_eq!(out.p, q.p, epsilon = 1e-14);
        }
    }

    #[test]
    fn rankine_hugoniot_pair_is_a_single_shock() {
        // right-moving shock of Mach 3 into a gas at rest
        let g: f64 = 1.4;
        let (r1, p1) = (1.0, 1.0);
        let c1 = (g * p1 / r1).sqrt();
        let m: f64 = 3.0;
        let p2 = p1 * (2.0 * g * m * m - (g - 1.0)) / (g + 1.0);
        let r2 = r1 * (g + 1.0) * m * m / ((g - 1.0) * m * m + 2.0);
        let shock_speed = m * c1;
        let u2 = shock_speed * (1.0 - r1 / r2);
        let ql = PrimitiveState::new_1d(r2, u2, p2);
        let qr = PrimitiveState::new_1d(r1, 0.0, p1);
        let rs = ExactRiemann::new(&ql, &qr, g).unwrap();
        assert_abs_diff_eq!(rs.p_star, p2, epsilon = 1e-9 * p2);
        assert_abs_diff_eq!(rs.u_star, u2, epsilon = 1e-9);
        let behind = rs.sample(shock_speed - 1e-6);
        let ahead = rs.sample(shock_speed + 1e-6);
        assert_abs_diff_eq!(behind.rho, r2, epsilon = 1e-9);
        assert_abs_diff_eq!(ahead.rho, r1, epsilon = 1e-14);
    }

    #[test]
    fn vacuum_generation_rejected() {
        let l = PrimitiveState::new_1d(1.0, -20.0, 0.1);
        let r = PrimitiveState::new_1d(1.0, 20.0, 0.1);
        assert!(matches!(
            ExactRiemann::new(&l, &r, 1.4),
            Err(PhysicsError::VacuumGeneration)
        ));
    }

    #[test]
    fn integral_conservation() {
        // average of the sampled solution over [-L, L] at time t equals the
        // initial average plus the net boundary flux (states at the ends are unchanged)
        let (l, r) = sod();
        let gas = GasModel::default();
        let rs = ExactRiemann::new(&l, &r, 1.4).unwrap();
        let (half, t) = (1.0, 0.2);
        let g: f64 = 1.4;
        let (cl, cr) = ((g * l.p / l.rho).sqrt(), (g * r.p / r.rho).sqrt());
        // wave-fan breakpoints: rarefaction head/tail, contact, shock
        let fan = [
            -cl,
            rs.u_star - cl * (rs.p_star / l.p).powf((g - 1.0) / (2.0 * g)),
            rs.u_star,
            cr * ((g + 1.0) / (2.0 * g) * rs.p_star / r.p + (g - 1.0) / (2.0 * g)).sqrt(),
        ];
        let mut breaks = vec![-half];
        breaks.extend(fan.iter().map(|s| s * t));
        breaks.push(half);
        let (gx, gw) = crate::basis::gauss_legendre(12);
        let mut acc = [0.0; 4];
        for w in breaks.windows(2) {
            let panels = 50;
            let h = (w[1] - w[0]) / panels as f64;
            for k in 0..panels {
                let a = w[0] + k as f64 * h;
                for (x, wt) in gx.iter().zip(&gw) {
                    let xx = a + 0.5 * h * (x + 1.0);
                    let u = gas.prim_to_cons(&rs.sample(xx / t));
                    for (s, v) in acc.iter_mut().zip(u.as_array()) {
                        *s += 0.5 * h * wt * v;
                    }
                }
            }
        }
        let ul = gas.prim_to_cons(&l).as_array();
        let ur = gas.prim_to_cons(&r).as_array();
        let fl = gas
            .normal_flux(&gas.prim_to_cons(&l), [1.0, 0.0])
            .as_array();
        let fr = gas
            .normal_flux(&gas.prim_to_cons(&r), [1.0, 0.0])
            .as_array();
        for v in 0..4 {
            let expected = half * (ul[v] + ur[v]) + t * (fl[v] - fr[v]);
            assert_abs_diff_eq!(acc[v], expected, epsilon = 1e-6);
        }
    }
}
