//! Compressible Euler equations: states, fluxes, entropy and Riemann solvers.
//!
//! States always carry two momentum components; 1D problems keep the second
//! one at zero, which the x-direction flux preserves exactly.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::PhysicsError;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConservativeState {
    pub rho: f64,
    pub mom: [f64; 2],
    pub energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PrimitiveState {
    pub rho: f64,
    pub vel: [f64; 2],
    pub p: f64,
}

impl ConservativeState {
    pub const NVARS: usize = 4;

    pub fn new(rho: f64, mom: [f64; 2], energy: f64) -> Self {
        Self { rho, mom, energy }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.rho, self.mom[0], self.mom[1], self.energy]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], [a[1], a[2]], a[3])
    }

    /// Pressure without the zero-density check; see [`pressure`].
    #[inline]
    pub fn pressure(&self, gamma: f64) -> f64 {
        let ke = 0.5 * (self.mom[0] * self.mom[0] + self.mom[1] * self.mom[1]) / self.rho;
        (gamma - 1.0) * (self.energy - ke)
    }

    pub fn is_finite(&self) -> bool {
        self.rho.is_finite()
            && self.mom[0].is_finite()
            && self.mom[1].is_finite()
            && self.energy.is_finite()
    }
}

impl PrimitiveState {
    pub fn new(rho: f64, vel: [f64; 2], p: f64) -> Self {
        Self { rho, vel, p }
    }

    pub fn new_1d(rho: f64, v: f64, p: f64) -> Self {
        Self::new(rho, [v, 0.0], p)
    }
}

impl Add for ConservativeState {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(
            self.rho + o.rho,
            [self.mom[0] + o.mom[0], self.mom[1] + o.mom[1]],
            self.energy + o.energy,
        )
    }
}

impl AddAssign for ConservativeState {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for ConservativeState {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(
            self.rho - o.rho,
            [self.mom[0] - o.mom[0], self.mom[1] - o.mom[1]],
            self.energy - o.energy,
        )
    }
}

impl Mul<f64> for ConservativeState {
    type Output = Self;
    #[inline]
    fn mul(self, a: f64) -> Self {
        Self::new(
            self.rho * a,
            [self.mom[0] * a, self.mom[1] * a],
            self.energy * a,
        )
    }
}

impl Mul<ConservativeState> for f64 {
    type Output = ConservativeState;
    #[inline]
    fn mul(self, u: ConservativeState) -> ConservativeState {
        u * self
    }
}

impl Neg for ConservativeState {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.rho, [-self.mom[0], -self.mom[1]], -self.energy)
    }
}

/// Entropy functional used by the minimum entropy constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum EntropyFunctional {
    /// Specific entropy `log(P rho^-gamma)`.
    #[default]
    Specific,
    /// Density-weighted entropy `rho log(P rho^-gamma)`.
    Density,
}

impl EntropyFunctional {
    /// `-inf` for inadmissible states.
    #[inline]
    pub fn eval(&self, rho: f64, p: f64, gamma: f64) -> f64 {
        if !(rho > 0.0 && p > 0.0) {
            return f64::NEG_INFINITY;
        }
        let s = p.ln() - gamma * rho.ln();
        match self {
            Self::Specific => s,
            Self::Density => rho * s,
        }
    }
}

impl std::str::FromStr for EntropyFunctional {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "specific" => Ok(Self::Specific),
            "density" => Ok(Self::Density),
            _ => Err(format!(
                "unknown entropy functional '{s}' (expected specific or density)"
            )),
        }
    }
}

impl std::fmt::Display for EntropyFunctional {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Specific => "specific",
            Self::Density => "density",
        })
    }
}

/// Ideal-gas closure plus the admissibility floors and entropy tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasModel {
    pub gamma: f64,
    pub rho_min: f64,
    pub p_min: f64,
    pub eps_sigma: f64,
    pub entropy: EntropyFunctional,
}

impl Default for GasModel {
    fn default() -> Self {
        Self {
            gamma: 1.4,
            rho_min: 1e-8,
            p_min: 1e-8,
            eps_sigma: 1e-4,
            entropy: EntropyFunctional::Specific,
        }
    }
}

impl GasModel {
    pub fn prim_to_cons(&self, q: &PrimitiveState) -> ConservativeState {
        let ke = 0.5 * q.rho * (q.vel[0] * q.vel[0] + q.vel[1] * q.vel[1]);
        ConservativeState::new(
            q.rho,
            [q.rho * q.vel[0], q.rho * q.vel[1]],
            q.p / (self.gamma - 1.0) + ke,
        )
    }

    pub fn cons_to_prim(&self, u: &ConservativeState) -> Result<PrimitiveState, PhysicsError> {
        if u.rho == 0.0 {
            return Err(PhysicsError::ZeroDensity);
        }
        Ok(self.cons_to_prim_unchecked(u))
    }

    #[inline]
    pub fn cons_to_prim_unchecked(&self, u: &ConservativeState) -> PrimitiveState {
        PrimitiveState::new(
            u.rho,
            [u.mom[0] / u.rho, u.mom[1] / u.rho],
            u.pressure(self.gamma),
        )
    }

    pub fn pressure(&self, u: &ConservativeState) -> Result<f64, PhysicsError> {
        pressure(u, self.gamma)
    }

    /// Numerical entropy of the configured functional; `-inf` for inadmissible states.
    #[inline]
    pub fn entropy(&self, u: &ConservativeState) -> f64 {
        if !(u.rho > 0.0) {
            return f64::NEG_INFINITY;
        }
        self.entropy_of(u.rho, u.pressure(self.gamma))
    }

    #[inline]
    pub fn entropy_of(&self, rho: f64, p: f64) -> f64 {
        self.entropy.eval(rho, p, self.gamma)
    }

    pub fn sound_speed(&self, q: &PrimitiveState) -> f64 {
        (self.gamma * q.p / q.rho).sqrt()
    }

    /// `|v| + c`, an upper bound on the local wave speed.
    pub fn max_wavespeed(&self, u: &ConservativeState) -> Result<f64, PhysicsError> {
        let q = self.cons_to_prim(u)?;
        if !(q.rho > 0.0 && q.p > 0.0) {
            return Err(PhysicsError::Inadmissible {
                rho: q.rho,
                pressure: q.p,
            });
        }
        Ok(q.vel[0].hypot(q.vel[1]) + self.sound_speed(&q))
    }

    /// Physical flux along both coordinate directions.
    pub fn euler_flux(&self, u: &ConservativeState) -> [ConservativeState; 2] {
        let p = u.pressure(self.gamma);
        [
            normal_flux_with(u, p, [1.0, 0.0]),
            normal_flux_with(u, p, [0.0, 1.0]),
        ]
    }

    /// `F(u) . n`.
    #[inline]
    pub fn normal_flux(&self, u: &ConservativeState, n: [f64; 2]) -> ConservativeState {
        normal_flux_with(u, u.pressure(self.gamma), n)
    }

    /// Admissibility floors applied before a state enters a Riemann solver.
    /// True vacuum (non-positive density or pressure) is an error.
    fn floored(
        &self,
        u: &ConservativeState,
    ) -> Result<(ConservativeState, PrimitiveState), PhysicsError> {
        let p = u.pressure(self.gamma);
        if !(u.rho > 0.0 && p > 0.0) {
            return Err(PhysicsError::Vacuum {
                rho: u.rho,
                pressure: p,
            });
        }
        if u.rho >= self.rho_min && p >= self.p_min {
            let q = PrimitiveState::new(u.rho, [u.mom[0] / u.rho, u.mom[1] / u.rho], p);
            return Ok((*u, q));
        }
        let q = PrimitiveState::new(
            u.rho.max(self.rho_min),
            [u.mom[0] / u.rho, u.mom[1] / u.rho],
            p.max(self.p_min),
        );
        Ok((self.prim_to_cons(&q), q))
    }
}

pub fn pressure(u: &ConservativeState, gamma: f64) -> Result<f64, PhysicsError> {
    if u.rho == 0.0 {
        return Err(PhysicsError::ZeroDensity);
    }
    Ok(u.pressure(gamma))
}

/// Density-weighted entropy `rho log(P rho^-gamma)`; `-inf` for inadmissible states.
#[inline]
pub fn entropy_from(rho: f64, p: f64, gamma: f64) -> f64 {
    EntropyFunctional::Density.eval(rho, p, gamma)
}

#[inline]
fn normal_flux_with(u: &ConservativeState, p: f64, n: [f64; 2]) -> ConservativeState {
    let vn = (u.mom[0] * n[0] + u.mom[1] * n[1]) / u.rho;
    ConservativeState::new(
        u.rho * vn,
        [u.mom[0] * vn + p * n[0], u.mom[1] * vn + p * n[1]],
        (u.energy + p) * vn,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum RiemannSolver {
    #[default]
    Hllc,
    Rusanov,
}

impl std::str::FromStr for RiemannSolver {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "hllc" => Ok(Self::Hllc),
            "rusanov" => Ok(Self::Rusanov),
            _ => Err(format!(
                "unknown Riemann solver '{s}' (expected hllc or rusanov)"
            )),
        }
    }
}

impl std::fmt::Display for RiemannSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Hllc => "hllc",
            Self::Rusanov => "rusanov",
        })
    }
}

impl RiemannSolver {
    /// Common normal flux `F(uL, uR) . n` for a unit normal pointing from L to R.
    pub fn flux(
        &self,
        gas: &GasModel,
        ul: &ConservativeState,
        ur: &ConservativeState,
        n: [f64; 2],
    ) -> Result<ConservativeState, PhysicsError> {
        let (ul, ql) = gas.floored(ul)?;
        let (ur, qr) = gas.floored(ur)?;
        Ok(match self {
            Self::Rusanov => rusanov(gas, &ul, &ql, &ur, &qr, n),
            Self::Hllc => hllc(gas, &ul, &ql, &ur, &qr, n),
        })
    }
}

pub fn rusanov_flux(
    gas: &GasModel,
    ul: &ConservativeState,
    ur: &ConservativeState,
    n: [f64; 2],
) -> Result<ConservativeState, PhysicsError> {
    RiemannSolver::Rusanov.flux(gas, ul, ur, n)
}

pub fn hllc_flux(
    gas: &GasModel,
    ul: &ConservativeState,
    ur: &ConservativeState,
    n: [f64; 2],
) -> Result<ConservativeState, PhysicsError> {
    RiemannSolver::Hllc.flux(gas, ul, ur, n)
}

fn rusanov(
    gas: &GasModel,
    ul: &ConservativeState,
    ql: &PrimitiveState,
    ur: &ConservativeState,
    qr: &PrimitiveState,
    n: [f64; 2],
) -> ConservativeState {
    let fl = normal_flux_with(ul, ql.p, n);
    let fr = normal_flux_with(ur, qr.p, n);
    let vnl = ql.vel[0] * n[0] + ql.vel[1] * n[1];
    let vnr = qr.vel[0] * n[0] + qr.vel[1] * n[1];
    let lam = (vnl.abs() + gas.sound_speed(ql)).max(vnr.abs() + gas.sound_speed(qr));
    (fl + fr) * 0.5 - (*ur - *ul) * (0.5 * lam)
}

fn hllc(
    gas: &GasModel,
    ul: &ConservativeState,
    ql: &PrimitiveState,
    ur: &ConservativeState,
    qr: &PrimitiveState,
    n: [f64; 2],
) -> ConservativeState {
    // rotate into the face frame: (normal, tangential)
    let t = [-n[1], n[0]];
    let rot = |q: &PrimitiveState| {
        (
            q.vel[0] * n[0] + q.vel[1] * n[1],
            q.vel[0] * t[0] + q.vel[1] * t[1],
        )
    };
    let (vl, wl) = rot(ql);
    let (vr, wr) = rot(qr);
    let (rl, pl, el) = (ql.rho, ql.p, ul.energy);
    let (rr, pr, er) = (qr.rho, qr.p, ur.energy);
    let cl = gas.sound_speed(ql);
    let cr = gas.sound_speed(qr);

    let sl = (vl - cl).min(vr - cr);
    let sr = (vl + cl).max(vr + cr);

    let flux_1d =
        |r: f64, v: f64, w: f64, p: f64, e: f64| [r * v, r * v * v + p, r * v * w, (e + p) * v];

    let f = if sl >= 0.0 {
        flux_1d(rl, vl, wl, pl, el)
    } else if sr <= 0.0 {
        flux_1d(rr, vr, wr, pr, er)
    } else {
        let ml = rl * (sl - vl);
        let mr = rr * (sr - vr);
        let s_star = (pr - pl + vl * ml - vr * mr) / (ml - mr);
        let star = |r: f64, v: f64, w: f64, p: f64, e: f64, s: f64| {
            let coef = r * (s - v) / (s - s_star);
            [
                coef,
                coef * s_star,
                coef * w,
                coef * (e / r + (s_star - v) * (s_star + p / (r * (s - v)))),
            ]
        };
        if s_star >= 0.0 {
            let fl = flux_1d(rl, vl, wl, pl, el);
            let us = star(rl, vl, wl, pl, el, sl);
            let u = [rl, rl * vl, rl * wl, el];
            [
                fl[0] + sl * (us[0] - u[0]),
                fl[1] + sl * (us[1] - u[1]),
                fl[2] + sl * (us[2] - u[2]),
                fl[3] + sl * (us[3] - u[3]),
            ]
        } else {
            let fr = flux_1d(rr, vr, wr, pr, er);
            let us = star(rr, vr, wr, pr, er, sr);
            let u = [rr, rr * vr, rr * wr, er];
            [
                fr[0] + sr * (us[0] - u[0]),
                fr[1] + sr * (us[1] - u[1]),
                fr[2] + sr * (us[2] - u[2]),
                fr[3] + sr * (us[3] - u[3]),
            ]
        }
    };
    ConservativeState::new(
        f[0],
        [f[1] * n[0] + f[2] * t[0], f[1] * n[1] + f[2] * t[1]],
        f[3],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gas() -> GasModel {
        GasModel::default()
    }

    #[test]
    fn pressure_examples() {
        let g = 1.4;
        assert_abs_diff_eq!(
            pressure(&ConservativeState::new(1.0, [0.0; 2], 2.5), g).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_eq!(
            pressure(&ConservativeState::new(1.0, [0.0; 2], 0.0), g).unwrap(),
            0.0
        );
        assert_abs_diff_eq!(
            pressure(&ConservativeState::new(0.125, [0.0; 2], 0.25), g).unwrap(),
            0.1,
            epsilon = 1e-15
        );
        assert_eq!(
            pressure(&ConservativeState::new(0.0, [0.0; 2], 1.0), g),
            Err(PhysicsError::ZeroDensity)
        );
    }

    #[test]
    fn conversions() {
        let g = gas();
        let u = g.prim_to_cons(&PrimitiveState::new_1d(1.0, 0.0, 1.0));
        assert_eq!((u.rho, u.mom), (1.0, [0.0; 2]));
        assert_abs_diff_eq!(u.energy, 2.5, epsilon = 1e-15);
        let jet = PrimitiveState::new(1.4, [0.0, 800.0], 1.0);
        let u = g.prim_to_cons(&jet);
        assert_abs_diff_eq!(
            u.energy,
            1.0 / 0.4 + 0.5 * 1.4 * 800.0 * 800.0,
            epsilon = 1e-9
        );
        assert!(g.cons_to_prim(&ConservativeState::default()).is_err());
    }

    #[test]
    fn conversion_round_trip_random() {
        let g = gas();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let q = PrimitiveState::new(
                rng.gen_range(0.01..10.0),
                [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)],
                rng.gen_range(0.01..10.0),
            );
            let back = g.cons_to_prim(&g.prim_to_cons(&q)).unwrap();
            assert!((back.rho - q.rho).abs() <= 1e-13 * q.rho);
            assert!((back.vel[0] - q.vel[0]).abs() <= 1e-13 * (1.0 + q.vel[0].abs()));
            assert!((back.vel[1] - q.vel[1]).abs() <= 1e-13 * (1.0 + q.vel[1].abs()));
            assert!((back.p - q.p).abs() <= 1e-12 * (1.0 + q.p));
        }
    }

    #[test]
    fn flux_examples() {
        let g = gas();
        let f = g.euler_flux(&ConservativeState::new(1.0, [0.0; 2], 2.5));
        assert_eq!((f[0].rho, f[0].mom[1], f[0].energy), (0.0, 0.0, 0.0));
        assert_abs_diff_eq!(f[0].mom[0], 1.0, epsilon = 1e-15);
        let u = g.prim_to_cons(&PrimitiveState::new_1d(1.0, 1.0, 1.0));
        let f = g.euler_flux(&u)[0];
        // E = 1/0.4 + 0.5 = 3.0, energy flux (E + P) v = 4.0
        assert_abs_diff_eq!(f.rho, 1.0);
        assert_abs_diff_eq!(f.mom[0], 2.0);
        assert_abs_diff_eq!(f.energy, 4.0, epsilon = 1e-15);
    }

    #[test]
    fn flux_rotation_equivariance() {
        let g = gas();
        let q = PrimitiveState::new(1.3, [0.7, -0.4], 2.1);
        let theta = 0.83_f64;
        let (c, s) = (theta.cos(), theta.sin());
        let rotv = |v: [f64; 2]| [c * v[0] - s * v[1], s * v[0] + c * v[1]];
        let qr = PrimitiveState::new(q.rho, rotv(q.vel), q.p);
        let n = [0.3_f64, 0.9_f64];
        let norm = n[0].hypot(n[1]);
        let n = [n[0] / norm, n[1] / norm];
        let f = g.normal_flux(&g.prim_to_cons(&q), n);
        let fr = g.normal_flux(&g.prim_to_cons(&qr), rotv(n));
        assert_abs_diff_eq!(f.rho, fr.rho, epsilon = 1e-13);
        assert_abs_diff_eq!(f.energy, fr.energy, epsilon = 1e-13);
        let m = rotv(f.mom);
        assert_abs_diff_eq!(m[0], fr.mom[0], epsilon = 1e-13);
        assert_abs_diff_eq!(m[1], fr.mom[1], epsilon = 1e-13);
    }

    #[test]
    fn entropy_examples() {
        let g = GasModel {
            entropy: EntropyFunctional::Density,
            ..gas()
        };
        assert_eq!(
            g.entropy(&g.prim_to_cons(&PrimitiveState::new_1d(1.0, 0.0, 1.0))),
            0.0
        );
        let e = std::f64::consts::E;
        assert_abs_diff_eq!(
            g.entropy(&g.prim_to_cons(&PrimitiveState::new_1d(1.0, 0.0, e))),
            1.0,
            epsilon = 1e-14
        );
        let s = g.entropy(&g.prim_to_cons(&PrimitiveState::new_1d(0.125, 0.0, 0.1)));
        assert_abs_diff_eq!(
            s,
            0.125 * (0.1 * 0.125_f64.powf(-1.4)).ln(),
            epsilon = 1e-14
        );
        assert_eq!(
            g.entropy(&ConservativeState::new(-1.0, [0.0; 2], 1.0)),
            f64::NEG_INFINITY
        );
        assert_eq!(
            g.entropy(&ConservativeState::new(1.0, [0.0; 2], -1.0)),
            f64::NEG_INFINITY
        );

        let specific = gas();
        let u = specific.prim_to_cons(&PrimitiveState::new_1d(0.125, 0.0, 0.1));
        assert_abs_diff_eq!(
            specific.entropy(&u),
            (0.1 * 0.125_f64.powf(-1.4)).ln(),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(specific.entropy(&u) * 0.125, s, epsilon = 1e-15);
        assert_eq!(
            specific.entropy(&ConservativeState::new(1.0, [0.0; 2], -1.0)),
            f64::NEG_INFINITY
        );
        assert_eq!(
            "density".parse::<EntropyFunctional>().unwrap(),
            EntropyFunctional::Density
        );
        assert!("rho".parse::<EntropyFunctional>().is_err());
    }

    #[test]
    fn entropy_monotone_in_pressure() {
        let g = 1.4;
        let mut prev = f64::NEG_INFINITY;
        for k in 1..100 {
            let s = entropy_from(0.7, k as f64 * 0.1, g);
            assert!(s > prev);
            prev = s;
        }
        // d sigma / d rho = log(P rho^-g) - g
        let (rho, p) = (0.5, 2.0);
        let h = 1e-6;
        let fd = (entropy_from(rho + h, p, g) - entropy_from(rho - h, p, g)) / (2.0 * h);
        let analytic = (p * rho.powf(-g)).ln() - g;
        assert_abs_diff_eq!(fd, analytic, epsilon = 1e-6);
        assert_eq!(fd.signum(), analytic.signum());
    }

    #[test]
    fn wavespeed_examples() {
        let g = gas();
        let ws = |q| g.max_wavespeed(&g.prim_to_cons(&q)).unwrap();
        assert_abs_diff_eq!(ws(PrimitiveState::new_1d(1.0, 0.0, 1.0)), 1.4_f64.sqrt());
        assert_abs_diff_eq!(
            ws(PrimitiveState::new(1.0, [3.0, 4.0], 1.0)),
            5.0 + 1.4_f64.sqrt()
        );
        assert_abs_diff_eq!(
            ws(PrimitiveState::new(1.4, [0.0, 800.0], 1.0)),
            801.0,
            epsilon = 1e-12
        );
        assert!(g
            .max_wavespeed(&ConservativeState::new(1.0, [0.0; 2], -1.0))
            .is_err());
    }

    fn random_state(rng: &mut ChaCha8Rng, g: &GasModel) -> ConservativeState {
        g.prim_to_cons(&PrimitiveState::new(
            rng.gen_range(0.05..5.0),
            [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)],
            rng.gen_range(0.05..5.0),
        ))
    }

    #[test]
    fn riemann_consistency() {
        let g = gas();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let u = random_state(&mut rng, &g);
            let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let n = [a.cos(), a.sin()];
            let exact = g.normal_flux(&u, n);
            for solver in [RiemannSolver::Hllc, RiemannSolver::Rusanov] {
                let f = solver.flux(&g, &u, &u, n).unwrap();
                for (x, y) in f.as_array().iter().zip(exact.as_array()) {
                    assert_abs_diff_eq!(*x, y, epsilon = 1e-12 * (1.0 + y.abs()));
                }
            }
        }
    }

    #[test]
    fn riemann_swap_antisymmetry() {
        let g = gas();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let a = random_state(&mut rng, &g);
            let b = random_state(&mut rng, &g);
            let ang: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let n = [ang.cos(), ang.sin()];
            let m = [-n[0], -n[1]];
            let f = rusanov_flux(&g, &a, &b, n).unwrap();
            let r = rusanov_flux(&g, &b, &a, m).unwrap();
            assert_eq!(f, -r);
            let f = hllc_flux(&g, &a, &b, n).unwrap();
            let r = hllc_flux(&g, &b, &a, m).unwrap();
            for (x, y) in f.as_array().iter().zip((-r).as_array()) {
                assert!((x - y).abs() <= 1e-13 * (1.0 + y.abs()), "{x} vs {y}");
            }
        }
    }

    #[test]
    fn supersonic_upwinding() {
        let g = gas();
        let ul = g.prim_to_cons(&PrimitiveState::new_1d(1.0, 3.0, 1.0));
        let ur = g.prim_to_cons(&PrimitiveState::new_1d(0.5, 3.0, 1.0));
        let exact = g.normal_flux(&ul, [1.0, 0.0]);
        let f = hllc_flux(&g, &ul, &ur, [1.0, 0.0]).unwrap();
        assert_eq!(f, exact);
    }

    #[test]
    fn vacuum_is_rejected() {
        let g = gas();
        let good = ConservativeState::new(1.0, [0.0; 2], 2.5);
        let bad = ConservativeState::new(0.0, [0.0; 2], 1.0);
        assert!(matches!(
            hllc_flux(&g, &good, &bad, [1.0, 0.0]),
            Err(PhysicsError::Vacuum { .. })
        ));
        let neg_p = ConservativeState::new(1.0, [0.0; 2], -0.1);
        assert!(rusanov_flux(&g, &neg_p, &good, [1.0, 0.0]).is_err());
    }

    #[test]
    fn near_vacuum_states_are_floored() {
        let g = gas();
        let tiny = ConservativeState::new(1e-12, [0.0; 2], 1e-12);
        let good = ConservativeState::new(1.0, [0.0; 2], 2.5);
        let f = hllc_flux(&g, &tiny, &good, [1.0, 0.0]).unwrap();
        assert!(f.is_finite());
    }
}
