use serde::Serialize;

use super::tree::ZeroTree;
use super::{JacobianError, C64};
use crate::linalg::{det_complex, det_real};

/// Zeros `z_1, …, z_m` of a monic polynomial with `Σ z_j = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroConfig {
    pub z: Vec<C64>,
}

impl ZeroConfig {
    pub fn new(z: Vec<C64>) -> Result<Self, JacobianError> {
        if z.len() < 2 {
            return Err(JacobianError::TooFew(z.len()));
        }
        let sum: C64 = z.iter().sum();
        let scale = z.iter().map(|w| w.norm()).fold(1.0, f64::max);
        if sum.norm() > 1e-12 * scale * z.len() as f64 {
            return Err(JacobianError::NotCentered(sum));
        }
        Ok(ZeroConfig { z })
    }

    /// Translate so the zeros sum to zero.
    pub fn centered(z: Vec<C64>) -> Result<Self, JacobianError> {
        let mean = z.iter().sum::<C64>() / z.len().max(1) as f64;
        Self::new(z.into_iter().map(|w| w - mean).collect())
    }

    pub fn m(&self) -> usize {
        self.z.len()
    }

    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..self.z.len() {
            for j in i + 1..self.z.len() {
                d = d.max((self.z[i] - self.z[j]).norm());
            }
        }
        d
    }

    pub fn conj(&self) -> Self {
        ZeroConfig {
            z: self.z.iter().map(|w| w.conj()).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        ZeroConfig {
            z: self.z.iter().map(|w| w * c).collect(),
        }
    }

    /// `Σ_{i<j} log|z_i − z_j|`.
    pub fn log_discriminant(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.z.len() {
            for j in i + 1..self.z.len() {
                acc += (self.z[i] - self.z[j]).norm().ln();
            }
        }
        acc
    }
}

/// `a_0, …, a_{m−1}` with `z^m + Σ a_i z^i = ∏ (z − z_j)`.
pub fn monic_coefficients(z: &[C64]) -> Vec<C64> {
    let mut c = vec![C64::new(1.0, 0.0)];
    for &r in z {
        let mut next = vec![C64::new(0.0, 0.0); c.len() + 1];
        for (i, &a) in c.iter().enumerate() {
            next[i + 1] += a;
            next[i] -= a * r;
        }
        c = next;
    }
    c.pop();
    c
}

/// `a_0, …, a_{m−2}`; `a_{m−1} = −Σ z_j` vanishes on centered configurations.
pub fn zeros_to_coeffs(cfg: &ZeroConfig) -> Vec<C64> {
    let mut a = monic_coefficients(&cfg.z);
    a.pop();
    a
}

/// `∏_{i<j} (z_i − z_j)`.
pub fn vandermonde_jacobian(cfg: &ZeroConfig) -> C64 {
    let mut p = C64::new(1.0, 0.0);
    for i in 0..cfg.z.len() {
        for j in i + 1..cfg.z.len() {
            p *= cfg.z[i] - cfg.z[j];
        }
    }
    p
}

/// Orientation factor: with rows `a_0, …, a_{m−1}` and columns `z_1, …, z_m`,
/// `det ∂a/∂z = (−1)^m ∏_{i<j} (z_i − z_j)`.
pub fn vandermonde_sign(m: usize) -> f64 {
    if m.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Zeros from tree edge vectors under `Σ z = −a_{m−1}`.
pub fn zeros_from_edges(tree: &ZeroTree, e: &[C64], a_top: C64) -> Vec<C64> {
    let m = tree.m;
    let mut rel = vec![C64::new(0.0, 0.0); m];
    for &k in &tree.order {
        let (tail, head) = tree.edges[k];
        rel[head] = rel[tail] + e[k];
    }
    let shift = (-a_top - rel.iter().sum::<C64>()) / m as f64;
    rel.into_iter().map(|w| w + shift).collect()
}

/// `a_0, …, a_{m−2}` as a function of the edge vectors on `Σ z = 0`.
pub fn coeffs_from_edges(tree: &ZeroTree, e: &[C64]) -> Vec<C64> {
    let z = zeros_from_edges(tree, e, C64::new(0.0, 0.0));
    let mut a = monic_coefficients(&z);
    a.pop();
    a
}

/// `(−1)^m · det ∂(z_1, …, z_m)/∂(ē_1, …, ē_{m−1}, a_{m−1})`, so that
/// `∂(a_0, …, a_{m−2})/∂(ē) = chain_constant · ∏_{i<j}(z_i − z_j)`.
pub fn chain_constant(tree: &ZeroTree) -> f64 {
    let m = tree.m;
    // the map is linear: columns are images of unit inputs
    let mut cols = Vec::with_capacity(m);
    for k in 0..m {
        let mut e = vec![C64::new(0.0, 0.0); m - 1];
        let mut top = C64::new(0.0, 0.0);
        if k < m - 1 {
            e[k] = C64::new(1.0, 0.0);
        } else {
            top = C64::new(1.0, 0.0);
        }
        cols.push(zeros_from_edges(tree, &e, top));
    }
    let mat: Vec<Vec<f64>> = (0..m)
        .map(|i| (0..m).map(|k| cols[k][i].re).collect())
        .collect();
    vandermonde_sign(m) * det_real(&mat)
}

/// Central differences of a holomorphic map with a real step.
pub(super) fn fd_jacobian(f: impl Fn(&[C64]) -> Vec<C64>, x: &[C64], h: f64) -> Vec<Vec<C64>> {
    let n = x.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[j] += h;
        xm[j] -= h;
        let (fp, fm) = (f(&xp), f(&xm));
        cols.push(
            fp.iter()
                .zip(&fm)
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect::<Vec<C64>>(),
        );
    }
    let rows = cols.first().map_or(0, |c| c.len());
    (0..rows)
        .map(|i| (0..n).map(|j| cols[j][i]).collect())
        .collect()
}

pub(super) fn det(a: &[Vec<C64>]) -> C64 {
    det_complex(a)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainReport {
    pub m: usize,
    /// `|det_fd / (c_T ∏(z_i − z_j)) − 1|`.
    pub rel_err: f64,
    pub constant: f64,
    pub pass: bool,
}

/// Finite-difference `∂(a_0, …, a_{m−2})/∂(ē)` against `c_T · ∏(z_i − z_j)`.
pub fn jacobian_chain_check(cfg: &ZeroConfig, tree: &ZeroTree, fd_step: f64) -> ChainReport {
    let e = tree.edge_vectors(cfg);
    let h = fd_step * cfg.diameter();
    let jac = fd_jacobian(|x| coeffs_from_edges(tree, x), &e, h);
    let constant = chain_constant(tree);
    let expected = vandermonde_jacobian(cfg) * constant;
    let rel_err = (det(&jac) / expected - 1.0).norm();
    ChainReport {
        m: cfg.m(),
        rel_err,
        constant,
        pass: rel_err <= 1e-5,
    }
}
