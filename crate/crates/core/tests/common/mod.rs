//! Element generators and brute-force feasibility scans shared by the filter
//! tests and the acceptance suite.
#![allow(dead_code)]

use entrofilt::basis::ReferenceBasis;
use entrofilt::filter::{
    apply_filter, constraints_satisfied, element_mean, filter_element, FilterConstraints,
    FilterMode, BISECTION_ITERS, ZETA_MAX,
};
use entrofilt::physics::{ConservativeState, GasModel, PrimitiveState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_mean(rng: &mut ChaCha8Rng, gas: &GasModel) -> ConservativeState {
    gas.prim_to_cons(&PrimitiveState::new(
        rng.gen_range(0.3..2.0),
        [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
        rng.gen_range(0.3..2.0),
    ))
}

/// Nodal states whose mean is `mean` plus a zero-mean modal perturbation of
/// size `scale` in every variable.
pub fn perturbed_element(
    rng: &mut ChaCha8Rng,
    basis: &ReferenceBasis,
    mean: &ConservativeState,
    scale: f64,
) -> Vec<ConservativeState> {
    let m = mean.as_array();
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for v in 0..4 {
        let mut modes: Vec<f64> = (0..basis.npts).map(|_| rng.gen_range(-1.0..1.0)).collect();
        modes[0] = 0.0;
        let nodal = basis.to_nodal(&modes);
        cols.push(
            nodal
                .iter()
                .map(|x| m[v] + scale * m[v].abs().max(0.5) * x)
                .collect(),
        );
    }
    (0..basis.npts)
        .map(|i| ConservativeState::from_array([cols[0][i], cols[1][i], cols[2][i], cols[3][i]]))
        .collect()
}

/// An element violating its constraints while its mean satisfies them.
pub fn violating_element(
    rng: &mut ChaCha8Rng,
    basis: &ReferenceBasis,
    gas: &GasModel,
    sigma_min: f64,
    mean: &ConservativeState,
) -> Vec<ConservativeState> {
    let c = FilterConstraints { sigma_min, gas };
    let mut scale = 0.05;
    loop {
        let el = perturbed_element(rng, basis, mean, scale);
        if !constraints_satisfied(&el, &c).0 {
            return el;
        }
        scale *= 1.5;
    }
}

pub fn max_mean_change(
    a: &[ConservativeState],
    b: &[ConservativeState],
    basis: &ReferenceBasis,
) -> f64 {
    let ma = element_mean(a, basis).as_array();
    let mb = element_mean(b, basis).as_array();
    ma.iter()
        .zip(mb)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Modal coefficients of an element's conserved variables.
pub fn element_modes(basis: &ReferenceBasis, el: &[ConservativeState]) -> Vec<[f64; 4]> {
    (0..basis.npts)
        .map(|m| {
            let row = &basis.modal_fwd[m * basis.npts..(m + 1) * basis.npts];
            let mut acc = [0.0; 4];
            for (r, u) in row.iter().zip(el) {
                for (a, x) in acc.iter_mut().zip(u.as_array()) {
                    *a += r * x;
                }
            }
            acc
        })
        .collect()
}

/// Feasibility of the filtered element on a uniform grid of `points`
/// strengths over `[0, ZETA_MAX]`. Returns every infeasible-to-feasible
/// transition (the feasible grid point) in increasing order.
pub fn scan_transitions(
    basis: &ReferenceBasis,
    modes: &[[f64; 4]],
    mode: FilterMode,
    c: &FilterConstraints,
    points: usize,
) -> Vec<f64> {
    let n = basis.npts;
    let max_order = *basis.mode_orders.iter().max().unwrap();
    let mut nodal = vec![ConservativeState::default(); n];
    let mut scaled = vec![[0.0; 4]; n];
    let mut transitions = Vec::new();
    let mut prev_feasible = true;
    for g in 0..points {
        let zeta = ZETA_MAX * g as f64 / (points - 1) as f64;
        let damp: Vec<f64> = (0..=max_order).map(|p| mode.damping(zeta, p)).collect();
        for (s, (m, &p)) in scaled.iter_mut().zip(modes.iter().zip(&basis.mode_orders)) {
            *s = m.map(|x| x * damp[p]);
        }
        for (i, o) in nodal.iter_mut().enumerate() {
            let row = &basis.modal_inv[i * n..(i + 1) * n];
            let mut acc = [0.0; 4];
            for (r, s) in row.iter().zip(&scaled) {
                for v in 0..4 {
                    acc[v] += r * s[v];
                }
            }
            *o = ConservativeState::from_array(acc);
        }
        let feasible = constraints_satisfied(&nodal, c).0;
        if feasible && !prev_feasible {
            transitions.push(zeta);
        }
        prev_feasible = feasible;
    }
    transitions
}

pub fn nearest(values: &[f64], x: f64) -> f64 {
    values
        .iter()
        .map(|v| (v - x).abs())
        .fold(f64::INFINITY, f64::min)
}

/// Largest change of the element mean over random modal data, orders 1 to 6
/// in 1D and 2D, and strengths spanning zero to beyond `ZETA_MAX`.
pub fn worst_mean_change_any_zeta(mode: FilterMode, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for dim in 1..=2 {
        for p in 1..=6 {
            let basis = ReferenceBasis::new(p, dim).unwrap();
            for _ in 0..5 {
                let mut modes: Vec<f64> =
                    (0..basis.npts).map(|_| rng.gen_range(-1.0..1.0)).collect();
                modes[0] = rng.gen_range(0.5..2.0);
                let nodal = basis.to_nodal(&modes);
                for zeta in [0.0, 1e-6, 0.01, 0.5, 3.0, 17.0, ZETA_MAX, 1e3] {
                    let f = apply_filter(mode, &modes, &basis.mode_orders, zeta).unwrap();
                    let back = basis.to_nodal(&f);
                    worst = worst.max((basis.mean(&back) - basis.mean(&nodal)).abs());
                }
            }
        }
    }
    worst
}

/// Largest `|H(u)_i| - |u_i|` over random modes and strengths. Non-positive
/// means no mode was amplified.
pub fn worst_mode_amplification(mode: FilterMode, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for p in 1..=7 {
        let basis = ReferenceBasis::new(p, 2).unwrap();
        let modes: Vec<f64> = (0..basis.npts).map(|_| rng.gen_range(-5.0..5.0)).collect();
        for _ in 0..50 {
            let zeta = rng.gen_range(0.0..ZETA_MAX);
            let f = apply_filter(mode, &modes, &basis.mode_orders, zeta).unwrap();
            for (a, b) in f.iter().zip(&modes) {
                worst = worst.max(a.abs() - b.abs());
            }
        }
    }
    worst
}

/// Number of feasible random elements that the filter changed in any bit or
/// reported a nonzero strength for.
pub fn feasible_pass_through_mismatches(mode: FilterMode, seed: u64) -> usize {
    let gas = GasModel::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = 0;
    for dim in 1..=2 {
        for p in 1..=6 {
            let basis = ReferenceBasis::new(p, dim).unwrap();
            let mean = random_mean(&mut rng, &gas);
            let el = perturbed_element(&mut rng, &basis, &mean, 0.01);
            let sigma_min = el
                .iter()
                .map(|u| gas.entropy(u))
                .fold(f64::INFINITY, f64::min);
            let c = FilterConstraints {
                sigma_min,
                gas: &gas,
            };
            let mut out = el.clone();
            let o = filter_element(&mut out, &basis, &c, mode).unwrap();
            let same = el
                .iter()
                .zip(&out)
                .all(|(a, b)| a.as_array().map(f64::to_bits) == b.as_array().map(f64::to_bits));
            if o.zeta != 0.0 || o.activated || !same {
                bad += 1;
            }
        }
    }
    bad
}

/// Largest distance between the bisected strength and the minimal feasible
/// strength found by a `points`-point scan, over `elements` random violating
/// 2D P3 elements. Even elements are bound by positivity alone, odd ones by
/// an entropy bound just below the mean's entropy.
pub fn worst_bisection_distance(
    mode: FilterMode,
    elements: usize,
    points: usize,
    seed: u64,
) -> f64 {
    let gas = GasModel::default();
    let basis = ReferenceBasis::new(3, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for case in 0..elements {
        let mean = random_mean(&mut rng, &gas);
        let sigma_min = if case % 2 == 0 {
            f64::NEG_INFINITY
        } else {
            gas.entropy(&mean) - 0.05
        };
        let el = violating_element(&mut rng, &basis, &gas, sigma_min, &mean);
        let c = FilterConstraints {
            sigma_min,
            gas: &gas,
        };
        let mut out = el.clone();
        let o = filter_element(&mut out, &basis, &c, mode).unwrap();
        let transitions = scan_transitions(&basis, &element_modes(&basis, &el), mode, &c, points);
        // the first infeasible-to-feasible transition is the minimal feasible strength
        let d = transitions
            .first()
            .map_or(f64::INFINITY, |t| (o.zeta - t).abs());
        worst = worst.max(d);
    }
    worst
}

/// Width of the final bisection bracket, doubled.
pub fn bisection_tolerance() -> f64 {
    ZETA_MAX * 2f64.powi(-(BISECTION_ITERS as i32)) * 2.0
}
