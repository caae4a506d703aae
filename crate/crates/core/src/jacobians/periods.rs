use serde::Serialize;

use super::poly::{det, fd_jacobian, zeros_from_edges, ZeroConfig};
use super::quadrature::gauss_kronrod;
use super::tree::{d_plus, ZeroTree};
use super::{JacobianError, C64};

/// Periods `Ω_k` along the tree edges.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodSet {
    pub omega: Vec<C64>,
    pub errors: Vec<f64>,
    /// Largest relative change under one more halving of every segment.
    pub halving_change: f64,
}

/// `∫_{e⁻}^{e⁺} √(∏_p (z − z_p)) dz` on the segment. With
/// `z = e⁻ + ē(1 − cos θ)/2` the endpoint factor becomes `i ē sin θ / 2`, and
/// the remaining root is continued from the midpoint, seeded with the product
/// of principal roots there.
fn edge_period(
    z: &[C64],
    tail: usize,
    head: usize,
    edge: usize,
    tol: f64,
) -> Result<(C64, f64, f64), JacobianError> {
    let (a, b) = (z[tail], z[head]);
    let e = b - a;
    let others: Vec<C64> = (0..z.len())
        .filter(|&p| p != tail && p != head)
        .map(|p| z[p])
        .collect();
    for (k, &zp) in others.iter().enumerate() {
        let u = ((zp - a) / e).re;
        let dist = ((zp - a) / e).im.abs() * e.norm();
        if (0.0..=1.0).contains(&u) && dist <= 1e-12 * e.norm() {
            let zero = (0..z.len())
                .filter(|&p| p != tail && p != head)
                .nth(k)
                .unwrap();
            return Err(JacobianError::ThroughZero { edge, zero });
        }
    }
    // offsets from the tail keep the integrand free of cancellation far from the origin
    let off: Vec<C64> = others.iter().map(|&zp| a - zp).collect();
    let seed: C64 = off.iter().map(|&d| (d + e * 0.5).sqrt()).product();
    let f = |theta: f64| {
        let s = theta.sin();
        let u = (0.5 * theta).sin().powi(2);
        let tail_root: C64 = off
            .iter()
            .map(|&d| ((d + e * u) / (d + e * 0.5)).sqrt())
            .product();
        seed * tail_root * (0.25 * s * s)
    };
    let q = gauss_kronrod(f, 0.0, std::f64::consts::PI, tol);
    if !q.converged {
        return Err(JacobianError::Quadrature {
            edge,
            error: q.error,
        });
    }
    let pre = C64::new(0.0, 1.0) * e * e;
    Ok((pre * q.value, q.error * pre.norm(), q.halving_change))
}

pub fn period_integrals_with(
    cfg: &ZeroConfig,
    tree: &ZeroTree,
    tol: f64,
) -> Result<PeriodSet, JacobianError> {
    let mut omega = Vec::new();
    let mut errors = Vec::new();
    let mut halving_change = 0.0f64;
    for (k, &(tail, head)) in tree.edges.iter().enumerate() {
        let (v, err, h) = edge_period(&cfg.z, tail, head, k, tol)?;
        omega.push(v);
        errors.push(err);
        halving_change = halving_change.max(h);
    }
    Ok(PeriodSet {
        omega,
        errors,
        halving_change,
    })
}

pub fn period_integrals(cfg: &ZeroConfig, tree: &ZeroTree) -> Result<PeriodSet, JacobianError> {
    period_integrals_with(cfg, tree, 1e-12)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodJacobianReport {
    pub m: usize,
    /// `|det ∂Ω/∂ē|`.
    pub det_modulus: f64,
    pub discriminant: f64,
    /// `|det ∂Ω/∂ē| / ∏|z_i − z_j|`.
    pub ratio: f64,
    /// `max_{k,j} |∂Ω_k/∂z_j| / ∏_p d₊(z_p, e_k)^{1/2}`.
    pub entry_constant: f64,
}

fn periods_at(tree: &ZeroTree, z: &[C64], tol: f64) -> Vec<C64> {
    tree.edges
        .iter()
        .enumerate()
        .map(|(k, &(t, h))| {
            edge_period(z, t, h, k, tol)
                .map(|r| r.0)
                .unwrap_or(C64::new(f64::NAN, f64::NAN))
        })
        .collect()
}

/// Finite-difference Jacobian of the periods in the edge vectors (zeros
/// rebuilt under `Σ z = 0`) and in the free zeros. The step is `fd_step`
/// times the smallest zero separation.
pub fn period_jacobian_report(
    cfg: &ZeroConfig,
    tree: &ZeroTree,
    fd_step: f64,
) -> Result<PeriodJacobianReport, JacobianError> {
    let diam = cfg.diameter();
    let mut sep = f64::INFINITY;
    for i in 0..cfg.m() {
        for j in i + 1..cfg.m() {
            let d = (cfg.z[i] - cfg.z[j]).norm();
            if d <= 1e-10 * diam {
                return Err(JacobianError::IllConditioned(i, j));
            }
            sep = sep.min(d);
        }
    }
    // the step must resolve the closest pair, not just the diameter
    let h = fd_step * sep;
    // quadrature noise must sit well below the difference step
    let tol = 1e-13;
    period_integrals_with(cfg, tree, tol)?;
    let e = tree.edge_vectors(cfg);
    let zero = C64::new(0.0, 0.0);
    let jac = fd_jacobian(
        |x| periods_at(tree, &zeros_from_edges(tree, x, zero), tol),
        &e,
        h,
    );
    let det_modulus = det(&jac).norm();
    let discriminant = cfg.log_discriminant().exp();
    let free = fd_jacobian(|x| periods_at(tree, x, tol), &cfg.z, h);
    let mut entry_constant = 0.0f64;
    for (k, &(t, hd)) in tree.edges.iter().enumerate() {
        let scale: f64 = cfg
            .z
            .iter()
            .map(|&zp| d_plus(zp, cfg.z[t], cfg.z[hd]).sqrt())
            .product();
        for d in &free[k] {
            entry_constant = entry_constant.max(d.norm() / scale);
        }
    }
    if !det_modulus.is_finite() {
        return Err(JacobianError::Quadrature {
            edge: 0,
            error: f64::NAN,
        });
    }
    Ok(PeriodJacobianReport {
        m: cfg.m(),
        det_modulus,
        discriminant,
        ratio: det_modulus / discriminant,
        entry_constant,
    })
}
