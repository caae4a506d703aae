use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::periods::{period_integrals_with, period_jacobian_report};
use super::poly::{
    det, fd_jacobian, jacobian_chain_check, monic_coefficients, vandermonde_jacobian,
    vandermonde_sign, ZeroConfig,
};
use super::residue::residue_b;
use super::tree::{build_zero_tree, strange_comb_ratio};
use super::{JacobianError, C64};
use crate::stats;

/// `m` zeros uniform in the unit disk, then centered.
pub fn random_config<R: Rng>(rng: &mut R, m: usize) -> ZeroConfig {
    loop {
        let z: Vec<C64> = (0..m)
            .map(|_| {
                let r = rng.gen::<f64>().sqrt();
                C64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
            })
            .collect();
        if let Ok(c) = ZeroConfig::centered(z) {
            if build_zero_tree(&c).is_ok() {
                return c;
            }
        }
    }
}

fn template(m: usize) -> Vec<C64> {
    // irregular polygon: no three zeros collinear
    (0..m)
        .map(|k| {
            C64::from_polar(
                1.0 + 0.13 * k as f64,
                0.4 + std::f64::consts::TAU * k as f64 / m as f64 + 0.07 * (k * k) as f64,
            )
        })
        .collect()
}

/// Two unit-size clusters of `⌈m/2⌉` and `⌊m/2⌋` zeros at distance `sep`.
pub fn separated_clusters(m: usize, sep: f64) -> ZeroConfig {
    let a = template(m.div_ceil(2));
    let b = template(m / 2);
    let mut z: Vec<C64> = a.iter().map(|w| w * 0.5 - sep / 2.0).collect();
    z.extend(
        b.iter()
            .map(|w| w.conj() * 0.5 + sep / 2.0 + C64::new(0.0, 0.1)),
    );
    ZeroConfig::centered(z).unwrap()
}

/// The template with zero 1 moved to distance `eps` from zero 0.
pub fn collision_config(m: usize, eps: f64) -> ZeroConfig {
    let mut z = template(m);
    z[1] = z[0] + C64::from_polar(eps, 0.9);
    ZeroConfig::centered(z).unwrap()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VandermondeCheck {
    pub fd_det: C64Pair,
    pub expected: C64Pair,
    pub rel_err: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct C64Pair {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for C64Pair {
    fn from(c: C64) -> Self {
        C64Pair { re: c.re, im: c.im }
    }
}

/// Central-difference determinant of `z ↦ (a_0, …, a_{m−1})` against
/// `(−1)^m ∏_{i<j}(z_i − z_j)`.
pub fn vandermonde_check(cfg: &ZeroConfig, step: f64) -> VandermondeCheck {
    let jac = fd_jacobian(monic_coefficients, &cfg.z, step);
    let d = det(&jac);
    let expected = vandermonde_jacobian(cfg) * vandermonde_sign(cfg.m());
    VandermondeCheck {
        fd_det: d.into(),
        expected: expected.into(),
        rel_err: (d / expected - 1.0).norm(),
    }
}

/// One line of the verification table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub max_ratio: f64,
    pub mean_rel_err: f64,
    pub pass: bool,
}

fn row(name: &str, max_ratio: f64, mean_rel_err: f64, pass: bool) -> CheckRow {
    CheckRow {
        name: name.to_string(),
        max_ratio,
        mean_rel_err,
        pass,
    }
}

/// Ratio sweep row: `max_ratio` is the sup, `mean_rel_err` the relative gap
/// between the sup over the first half of the sample and over all of it.
fn doubling_row(name: &str, values: &[f64]) -> CheckRow {
    let half = stats::max(&values[..values.len().div_ceil(2)]);
    let all = stats::max(values);
    row(
        name,
        all,
        all / half - 1.0,
        all.is_finite() && all <= 2.0 * half,
    )
}

/// Collision or separation sweep: bounded by ten times its median.
fn sweep_row(name: &str, values: &[f64]) -> CheckRow {
    let med = stats::median(values);
    let all = stats::max(values);
    row(
        name,
        all,
        all / med - 1.0,
        all.is_finite() && all <= 10.0 * med,
    )
}

/// Sweep settings for [`verify`].
#[derive(Clone, Debug, PartialEq)]
pub struct VerifySettings {
    pub fd_step: f64,
    pub tol_quad: f64,
}

impl Default for VerifySettings {
    fn default() -> Self {
        VerifySettings {
            fd_step: 1e-5,
            tol_quad: 1e-12,
        }
    }
}

/// Every Jacobian check for degree `m` on `samples` random configurations.
/// Configurations are drawn sequentially; the per-configuration work runs in
/// parallel and is collected in draw order.
pub fn verify(
    m: usize,
    samples: usize,
    seed: u64,
    settings: &VerifySettings,
) -> Result<Vec<CheckRow>, JacobianError> {
    use rand::SeedableRng;
    if m < 2 {
        return Err(JacobianError::TooFew(m));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let samples = samples.max(2);
    let configs: Vec<ZeroConfig> = (0..samples).map(|_| random_config(&mut rng, m)).collect();
    let mut rows = Vec::new();

    let vm: Vec<f64> = configs
        .par_iter()
        .map(|c| vandermonde_check(c, settings.fd_step).rel_err)
        .collect();
    rows.push(row(
        "vandermonde",
        stats::max(&vm),
        stats::mean(&vm),
        stats::max(&vm) <= 1e-6,
    ));

    let trees: Vec<_> = configs
        .iter()
        .map(build_zero_tree)
        .collect::<Result<_, _>>()?;
    let chain: Vec<f64> = configs
        .par_iter()
        .zip(&trees)
        .map(|(c, t)| jacobian_chain_check(c, t, settings.fd_step).rel_err)
        .collect();
    rows.push(row(
        "chain_rule",
        stats::max(&chain),
        stats::mean(&chain),
        stats::max(&chain) <= 1e-5,
    ));

    let comp: Vec<f64> = trees.iter().map(|t| t.comparability).collect();
    rows.push(row(
        "tree_comparability",
        stats::max(&comp),
        0.0,
        stats::max(&comp) <= (m - 1).max(1) as f64 + 1e-9,
    ));

    let comb: Vec<f64> = configs
        .iter()
        .zip(&trees)
        .map(|(c, t)| strange_comb_ratio(c, t))
        .collect();
    rows.push(doubling_row("comb_random", &comb));

    let seps: Vec<f64> = (0..=12).map(|k| 10f64.powf(k as f64 / 2.0)).collect();
    let clusters: Vec<ZeroConfig> = seps.iter().map(|&s| separated_clusters(m, s)).collect();
    let cl: Vec<f64> = clusters
        .iter()
        .map(|c| strange_comb_ratio(c, &build_zero_tree(c).unwrap()))
        .collect();
    rows.push(sweep_row("comb_clusters", &cl));

    let jac: Vec<_> = configs
        .par_iter()
        .zip(&trees)
        .map(|(c, t)| period_jacobian_report(c, t, settings.fd_step))
        .collect::<Result<_, _>>()?;
    let ratios: Vec<f64> = jac.iter().map(|r| r.ratio).collect();
    rows.push(doubling_row("period_det_random", &ratios));
    let entries: Vec<f64> = jac.iter().map(|r| r.entry_constant).collect();
    rows.push(doubling_row("period_entry_random", &entries));

    let eps: Vec<f64> = (0..=8).map(|k| 10f64.powf(-(k as f64) / 2.0)).collect();
    let coll: Vec<ZeroConfig> = eps.iter().map(|&e| collision_config(m, e)).collect();
    let coll_jac: Vec<_> = coll
        .par_iter()
        .map(|c| period_jacobian_report(c, &build_zero_tree(c)?, settings.fd_step))
        .collect::<Result<_, _>>()?;
    let cr: Vec<f64> = coll_jac.iter().map(|r| r.ratio).collect();
    rows.push(sweep_row("period_det_collision", &cr));
    let ce: Vec<f64> = coll_jac.iter().map(|r| r.entry_constant).collect();
    rows.push(sweep_row("period_entry_collision", &ce));
    let cluster_jac: Vec<_> = clusters
        .par_iter()
        .map(|c| period_jacobian_report(c, &build_zero_tree(c)?, settings.fd_step))
        .collect::<Result<_, _>>()?;
    let sr: Vec<f64> = cluster_jac.iter().map(|r| r.ratio).collect();
    rows.push(sweep_row("period_det_clusters", &sr));

    let all: Vec<&ZeroConfig> = configs.iter().chain(&coll).chain(&clusters).collect();
    let halving: Vec<f64> = all
        .par_iter()
        .map(|c| {
            period_integrals_with(c, &build_zero_tree(c)?, settings.tol_quad)
                .map(|p| p.halving_change)
        })
        .collect::<Result<_, _>>()?;
    rows.push(row(
        "quadrature_halving",
        stats::max(&halving),
        stats::mean(&halving),
        stats::max(&halving) < 1e-8,
    ));

    let unit = ZeroConfig::new(vec![C64::new(-1.0, 0.0), C64::new(1.0, 0.0)])?;
    let omega = period_integrals_with(&unit, &build_zero_tree(&unit)?, settings.tol_quad)?.omega[0];
    let err = (omega.norm() - std::f64::consts::FRAC_PI_2).abs() / std::f64::consts::FRAC_PI_2;
    rows.push(row(
        "period_half_disk",
        omega.norm() / std::f64::consts::FRAC_PI_2,
        err,
        err <= 1e-9,
    ));

    if m.is_multiple_of(2) {
        let consts: Vec<(f64, f64)> = (0..samples)
            .map(|_| {
                let size = 10f64.powf(rng.gen_range(-4.0..-2.0));
                let a: Vec<C64> = (0..m)
                    .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                let norm = a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                a.into_iter()
                    .map(|c| c * (size / norm))
                    .collect::<Vec<C64>>()
            })
            .collect::<Vec<_>>()
            .par_iter()
            .map(|a| {
                let b = residue_b(a, 1.0)?.value();
                let lead = C64::new(0.0, std::f64::consts::PI) * a[m / 2 - 1];
                let norm2 = a.iter().map(|c| c.norm_sqr()).sum::<f64>();
                Ok((
                    (b - lead).norm() / norm2,
                    (b - lead).norm() / (std::f64::consts::PI * norm2.sqrt()),
                ))
            })
            .collect::<Result<_, JacobianError>>()?;
        let c: Vec<f64> = consts.iter().map(|p| p.0).collect();
        let rel: Vec<f64> = consts.iter().map(|p| p.1).collect();
        let mut r = doubling_row("residue_quadratic", &c);
        r.mean_rel_err = stats::mean(&rel);
        rows.push(r);
    }
    Ok(rows)
}
