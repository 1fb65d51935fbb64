//! Reference-element operators on `[-1, 1]^dim`.
//!
//! Solution points are the Gauss–Legendre–Lobatto (GLL) nodes, tensor-producted
//! in 2D with the x index running fastest: node `(a, b)` has flat index
//! `b * (p + 1) + a`. Faces are numbered `0 = -x`, `1 = +x`, `2 = -y`, `3 = +y`.

use nalgebra::DMatrix;

use crate::error::BasisError;

const NEWTON_TOL: f64 = 1e-14;
const NEWTON_MAX_ITER: usize = 100;

/// Legendre polynomial `P_n(x)` and its derivative.
pub fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p_prev, mut p) = (1.0, x);
    let (mut d_prev, mut d) = (0.0, 1.0);
    for k in 1..n {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        let d_next = d_prev + (2.0 * kf + 1.0) * p;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
    }
    (p, d)
}

/// Legendre polynomial normalised to unit L2 norm on `[-1, 1]`.
pub fn orthonormal_legendre(n: usize, x: f64) -> f64 {
    ((2 * n + 1) as f64 / 2.0).sqrt() * legendre(n, x).0
}

/// GLL nodes and weights for polynomial order `p` (`p + 1` points).
pub fn build_gll(p: usize) -> Result<(Vec<f64>, Vec<f64>), BasisError> {
    if p == 0 {
        return Err(BasisError::OrderTooLow(p));
    }
    let n = p + 1;
    let pf = p as f64;
    let mut nodes = vec![0.0; n];
    nodes[0] = -1.0;
    nodes[p] = 1.0;
    // interior nodes: roots of P_p'
    for (k, node) in nodes.iter_mut().enumerate().take(p).skip(1) {
        let mut x = -(std::f64::consts::PI * k as f64 / pf).cos();
        for _ in 0..NEWTON_MAX_ITER {
            let (pv, dv) = legendre(p, x);
            let d2 = (2.0 * x * dv - pf * (pf + 1.0) * pv) / (1.0 - x * x);
            let dx = dv / d2;
            x -= dx;
            if dx.abs() < NEWTON_TOL {
                break;
            }
        }
        *node = x;
    }
    for k in 0..n / 2 {
        let s = 0.5 * (nodes[p - k] - nodes[k]);
        nodes[k] = -s;
        nodes[p - k] = s;
    }
    if n % 2 == 1 {
        nodes[p / 2] = 0.0;
    }
    let weights = nodes
        .iter()
        .map(|&x| {
            let pv = legendre(p, x).0;
            2.0 / (pf * (pf + 1.0) * pv * pv)
        })
        .collect();
    Ok((nodes, weights))
}

/// Gauss–Legendre nodes and weights with `n` points.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let nf = n as f64;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for k in 0..n {
        let mut x = -(std::f64::consts::PI * (k as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..NEWTON_MAX_ITER {
            let (pv, dv) = legendre(n, x);
            let dx = pv / dv;
            x -= dx;
            if dx.abs() < NEWTON_TOL {
                break;
            }
        }
        let dv = legendre(n, x).1;
        nodes[k] = x;
        weights[k] = 2.0 / ((1.0 - x * x) * dv * dv);
    }
    (nodes, weights)
}

fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    nodes
        .iter()
        .enumerate()
        .map(|(j, &xj)| {
            let prod: f64 = nodes
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, &xk)| xj - xk)
                .product();
            1.0 / prod
        })
        .collect()
}

/// Lagrange differentiation matrix, row-major: `D[i * n + j] = l_j'(x_i)`.
pub fn lagrange_diff_matrix(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let w = barycentric_weights(nodes);
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                let v = (w[j] / w[i]) / (nodes[i] - nodes[j]);
                d[i * n + j] = v;
                diag -= v;
            }
        }
        d[i * n + i] = diag;
    }
    d
}

/// Interpolation matrix from `nodes` to `targets`, row-major `targets.len() x nodes.len()`.
pub fn lagrange_interp_matrix(nodes: &[f64], targets: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let w = barycentric_weights(nodes);
    let mut out = vec![0.0; targets.len() * n];
    for (r, &t) in targets.iter().enumerate() {
        let row = &mut out[r * n..(r + 1) * n];
        if let Some(hit) = nodes.iter().position(|&x| x == t) {
            row[hit] = 1.0;
            continue;
        }
        let terms: Vec<f64> = (0..n).map(|j| w[j] / (t - nodes[j])).collect();
        let sum: f64 = terms.iter().sum();
        for j in 0..n {
            row[j] = terms[j] / sum;
        }
    }
    out
}

/// Left DG correction function `g_L` (right Radau polynomial of degree `p + 1`)
/// and its derivative.
pub fn correction_left(p: usize, x: f64) -> (f64, f64) {
    let sign = if (p + 1) % 2 == 0 { 0.5 } else { -0.5 };
    let (a, da) = legendre(p + 1, x);
    let (b, db) = legendre(p, x);
    (sign * (a - b), sign * (da - db))
}

/// Correction-gradient tables on the 1D GLL nodes for the `-x` and `+x` faces.
///
/// Entry `[f][i]` is the divergence of the vector correction function of face
/// `f` at node `i`, where the vector function is oriented along the outward
/// normal (`n . g = 1` on its own face, zero on the opposite face).
pub fn build_correction_gradients(p: usize) -> Result<[Vec<f64>; 2], BasisError> {
    let (nodes, _) = build_gll(p)?;
    let left = nodes.iter().map(|&x| -correction_left(p, x).1).collect();
    let right = nodes.iter().map(|&x| -correction_left(p, -x).1).collect();
    Ok([left, right])
}

fn invert(n: usize, row_major: &[f64], order: usize) -> Result<Vec<f64>, BasisError> {
    let m = DMatrix::from_row_slice(n, n, row_major);
    let inv = m
        .try_inverse()
        .ok_or(BasisError::SingularVandermonde(order))?;
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = inv[(i, j)];
        }
    }
    Ok(out)
}

/// Nodal/modal transforms for the orthonormal (tensor-product) Legendre basis.
///
/// Returns `(modal_fwd, modal_inv, mode_orders)`; both matrices are row-major
/// `npts x npts`. Mode `(mx, my)` has flat index `my * (p + 1) + mx` and order
/// `max(mx, my)`.
pub fn build_modal_transform(
    p: usize,
    dim: usize,
) -> Result<(Vec<f64>, Vec<f64>, Vec<usize>), BasisError> {
    if !(1..=2).contains(&dim) {
        return Err(BasisError::Dimension(dim));
    }
    let (nodes, _) = build_gll(p)?;
    let n1 = p + 1;
    let mut v1 = vec![0.0; n1 * n1];
    for (i, &x) in nodes.iter().enumerate() {
        for m in 0..n1 {
            v1[i * n1 + m] = orthonormal_legendre(m, x);
        }
    }
    let v1_inv = invert(n1, &v1, p)?;
    if dim == 1 {
        let orders = (0..n1).collect();
        return Ok((v1_inv, v1, orders));
    }
    let n = n1 * n1;
    let mut inv = vec![0.0; n * n];
    let mut fwd = vec![0.0; n * n];
    let mut orders = vec![0; n];
    for my in 0..n1 {
        for mx in 0..n1 {
            let m = my * n1 + mx;
            orders[m] = mx.max(my);
            for b in 0..n1 {
                for a in 0..n1 {
                    let i = b * n1 + a;
                    inv[i * n + m] = v1[a * n1 + mx] * v1[b * n1 + my];
                    fwd[m * n + i] = v1_inv[mx * n1 + a] * v1_inv[my * n1 + b];
                }
            }
        }
    }
    Ok((fwd, inv, orders))
}

/// All reference-element operators for one polynomial order and dimension.
#[derive(Debug, Clone)]
pub struct ReferenceBasis {
    pub order: usize,
    pub dim: usize,
    /// Points per direction, `p + 1`.
    pub n1: usize,
    /// Solution points per element, `(p + 1)^dim`.
    pub npts: usize,
    pub nodes_1d: Vec<f64>,
    pub weights_1d: Vec<f64>,
    /// Reference coordinates of every solution node (`y = 0` in 1D).
    pub nodes: Vec<[f64; 2]>,
    pub quad_weights: Vec<f64>,
    /// 1D differentiation matrix, row-major `n1 x n1`.
    pub diff_1d: Vec<f64>,
    /// Dense `npts x npts` derivative operator per reference direction.
    pub diff_matrix: Vec<Vec<f64>>,
    pub modal_fwd: Vec<f64>,
    pub modal_inv: Vec<f64>,
    pub mode_orders: Vec<usize>,
    /// 1D correction-gradient tables for the `-` and `+` faces.
    pub corr_grad_1d: [Vec<f64>; 2],
    /// Per face, the correction-gradient value at every solution node due to
    /// the face node on the same grid line.
    pub corr_grad: Vec<Vec<f64>>,
    /// Per face, the solution-node indices lying on it, ordered along the face.
    pub face_index_sets: Vec<Vec<usize>>,
}

impl ReferenceBasis {
    pub fn new(order: usize, dim: usize) -> Result<Self, BasisError> {
        if !(1..=2).contains(&dim) {
            return Err(BasisError::Dimension(dim));
        }
        let (nodes_1d, weights_1d) = build_gll(order)?;
        let n1 = order + 1;
        let npts = n1.pow(dim as u32);
        let diff_1d = lagrange_diff_matrix(&nodes_1d);
        let corr_grad_1d = build_correction_gradients(order)?;
        let (modal_fwd, modal_inv, mode_orders) = build_modal_transform(order, dim)?;

        let (nodes, quad_weights, diff_matrix, corr_grad, face_index_sets) = if dim == 1 {
            let nodes = nodes_1d.iter().map(|&x| [x, 0.0]).collect();
            let faces = vec![vec![0], vec![order]];
            (
                nodes,
                weights_1d.clone(),
                vec![diff_1d.clone()],
                corr_grad_1d.to_vec(),
                faces,
            )
        } else {
            let mut nodes = Vec::with_capacity(npts);
            let mut w = Vec::with_capacity(npts);
            for b in 0..n1 {
                for a in 0..n1 {
                    nodes.push([nodes_1d[a], nodes_1d[b]]);
                    w.push(weights_1d[a] * weights_1d[b]);
                }
            }
            let mut dx = vec![0.0; npts * npts];
            let mut dy = vec![0.0; npts * npts];
            for b in 0..n1 {
                for a in 0..n1 {
                    let i = b * n1 + a;
                    for k in 0..n1 {
                        dx[i * npts + b * n1 + k] = diff_1d[a * n1 + k];
                        dy[i * npts + k * n1 + a] = diff_1d[b * n1 + k];
                    }
                }
            }
            let mut corr = vec![vec![0.0; npts]; 4];
            for b in 0..n1 {
                for a in 0..n1 {
                    let i = b * n1 + a;
                    corr[0][i] = corr_grad_1d[0][a];
                    corr[1][i] = corr_grad_1d[1][a];
                    corr[2][i] = corr_grad_1d[0][b];
                    corr[3][i] = corr_grad_1d[1][b];
                }
            }
            let faces = vec![
                (0..n1).map(|b| b * n1).collect(),
                (0..n1).map(|b| b * n1 + order).collect(),
                (0..n1).collect(),
                (0..n1).map(|a| order * n1 + a).collect(),
            ];
            (nodes, w, vec![dx, dy], corr, faces)
        };

        Ok(Self {
            order,
            dim,
            n1,
            npts,
            nodes_1d,
            weights_1d,
            nodes,
            quad_weights,
            diff_1d,
            diff_matrix,
            modal_fwd,
            modal_inv,
            mode_orders,
            corr_grad_1d,
            corr_grad,
            face_index_sets,
        })
    }

    pub fn num_faces(&self) -> usize {
        2 * self.dim
    }

    /// Measure of the reference element, `2^dim`.
    pub fn reference_volume(&self) -> f64 {
        (1 << self.dim) as f64
    }

    /// Quadrature-weighted mean of nodal scalar values.
    pub fn mean(&self, values: &[f64]) -> f64 {
        let s: f64 = values
            .iter()
            .zip(&self.quad_weights)
            .map(|(v, w)| v * w)
            .sum();
        s / self.reference_volume()
    }

    /// Nodal scalar values to modal coefficients.
    pub fn to_modal(&self, nodal: &[f64]) -> Vec<f64> {
        matvec(&self.modal_fwd, nodal)
    }

    /// Modal coefficients to nodal scalar values.
    pub fn to_nodal(&self, modal: &[f64]) -> Vec<f64> {
        matvec(&self.modal_inv, modal)
    }

    /// Face-node quadrature weights (the 1D GLL weights in 2D, `[1]` in 1D).
    pub fn face_weights(&self) -> Vec<f64> {
        if self.dim == 1 {
            vec![1.0]
        } else {
            self.weights_1d.clone()
        }
    }
}

fn matvec(m: &[f64], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    m.chunks_exact(n)
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}
