mod common;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use teichcount::jacobians::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn real(z: &[f64]) -> ZeroConfig {
    ZeroConfig::new(z.iter().map(|&x| c(x, 0.0)).collect()).unwrap()
}

/// Durand–Kerner iteration for `z^m + Σ a_i z^i`.
fn durand_kerner(a: &[C64]) -> Vec<C64> {
    let m = a.len();
    let p = |z: C64| a.iter().rev().fold(c(1.0, 0.0), |acc, &ai| acc * z + ai);
    let mut r: Vec<C64> = (0..m).map(|k| c(0.4, 0.9).powu(k as u32)).collect();
    for _ in 0..2000 {
        let prev = r.clone();
        for i in 0..m {
            let denom: C64 = (0..m).filter(|&j| j != i).map(|j| r[i] - r[j]).product();
            let step = p(r[i]) / denom;
            r[i] -= step;
        }
        if r.iter().zip(&prev).all(|(x, y)| (x - y).norm() < 1e-15) {
            break;
        }
    }
    r
}

fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

/// Central differences assembled into an nalgebra matrix.
fn nalgebra_fd_det(z: &[C64], h: f64) -> C64 {
    let m = z.len();
    let mut j = DMatrix::<C64>::zeros(m, m);
    for col in 0..m {
        let mut zp = z.to_vec();
        let mut zm = z.to_vec();
        zp[col] += h;
        zm[col] -= h;
        let (fp, fm) = (monic_coefficients(&zp), monic_coefficients(&zm));
        for row in 0..m {
            j[(row, col)] = (fp[row] - fm[row]) / (2.0 * h);
        }
    }
    j.determinant()
}

/// Power series of `√(1 + Σ p_k w^k)`.
fn sqrt_series(p: &[C64], n: usize) -> Vec<C64> {
    let coef = |k: usize| {
        if k == 0 {
            c(1.0, 0.0)
        } else {
            p.get(k - 1).copied().unwrap_or_default()
        }
    };
    let mut s = vec![c(1.0, 0.0)];
    for k in 1..=n {
        let cross: C64 = (1..k).map(|i| s[i] * s[k - i]).sum();
        s.push((coef(k) - cross) / 2.0);
    }
    s
}

/// `∮ √q` from the Laurent expansion: `2πi` times the `w^{m/2+1}` coefficient
/// of `√(1 + a_{m−1} w + … + a_0 w^m)`.
fn residue_series(a: &[C64]) -> C64 {
    let m = a.len();
    let p: Vec<C64> = (0..m).map(|k| a[m - 1 - k]).collect();
    c(0.0, std::f64::consts::TAU) * sqrt_series(&p, m / 2 + 1)[m / 2 + 1]
}

/// Composite Simpson in `θ` with the square root continued step by step.
fn period_oracle(z: &[C64], tail: usize, head: usize) -> C64 {
    let (a, b) = (z[tail], z[head]);
    let e = b - a;
    let n = 200_000;
    let f = |th: f64| a + e * (0.5 * (1.0 - th.cos()));
    let q = |w: C64| {
        z.iter()
            .enumerate()
            .filter(|&(p, _)| p != tail && p != head)
            .map(|(_, &zp)| w - zp)
            .product::<C64>()
    };
    let mut root = q(f(0.0)).sqrt();
    let mut acc = c(0.0, 0.0);
    let h = std::f64::consts::PI / n as f64;
    for k in 0..=n {
        let th = k as f64 * h;
        let mut r = q(f(th)).sqrt();
        if (r - root).norm() > (r + root).norm() {
            r = -r;
        }
        root = r;
        let w = if k == 0 || k == n {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += r * (0.25 * th.sin().powi(2)) * w;
    }
    c(0.0, 1.0) * e * e * acc * (h / 3.0)
}

#[test]
fn coefficient_examples() {
    let a = zeros_to_coeffs(&real(&[1.0, -1.0]));
    assert_eq!(a, vec![c(-1.0, 0.0)]);
    let a = zeros_to_coeffs(&real(&[0.0, 0.0, 0.0]));
    assert_eq!(a, vec![c(0.0, 0.0); 2]);
    assert_eq!(vandermonde_jacobian(&real(&[1.0, -1.0])), c(2.0, 0.0));
    assert_eq!(vandermonde_jacobian(&real(&[1.0, 0.0, -1.0])), c(2.0, 0.0));
    assert_eq!(
        ZeroConfig::new(vec![c(1.0, 0.0)]),
        Err(JacobianError::TooFew(1))
    );
    assert!(matches!(
        ZeroConfig::new(vec![c(1.0, 0.0), c(1.0, 0.0)]),
        Err(JacobianError::NotCentered(_))
    ));
}

#[test]
fn root_finder_recovers_zeros() {
    let mut rng = common::rng(21);
    for m in 2..=6 {
        for _ in 0..50 {
            let cfg = random_config(&mut rng, m);
            let roots = durand_kerner(&monic_coefficients(&cfg.z));
            assert!(
                multiset_distance(&cfg.z, &roots) < 1e-8,
                "{:?} {:?}",
                cfg.z,
                roots
            );
        }
    }
}

#[test]
fn vandermonde_matches_nalgebra_fd_determinant() {
    let mut rng = common::rng(22);
    for m in 2..=5 {
        for _ in 0..100 {
            let cfg = random_config(&mut rng, m);
            let oracle = nalgebra_fd_det(&cfg.z, 1e-5);
            let expected = vandermonde_sign(m) * vandermonde_jacobian(&cfg);
            assert!((oracle / expected - 1.0).norm() < 1e-6, "m={m}");
            assert!(vandermonde_check(&cfg, 1e-5).rel_err < 1e-6);
        }
    }
}

#[test]
fn chain_constant_hand_example() {
    let cfg = real(&[0.7, -0.7]);
    // edge from z₂ to z₁: ē = 2c, da₀/dē = −c, ∏ = 2c
    let reversed = ZeroTree {
        m: 2,
        edges: vec![(1, 0)],
        order: vec![0],
        comparability: 1.0,
    };
    assert!((chain_constant(&reversed) + 0.5).abs() < 1e-15);
    let r = jacobian_chain_check(&cfg, &reversed, 1e-5);
    assert!(r.pass, "{r:?}");
    let tree = build_zero_tree(&cfg).unwrap();
    assert!((chain_constant(&tree) - 0.5).abs() < 1e-15);
}

#[test]
fn chain_rule_on_random_configs() {
    let mut rng = common::rng(23);
    for m in 2..=6 {
        for _ in 0..100 {
            let cfg = random_config(&mut rng, m);
            let tree = build_zero_tree(&cfg).unwrap();
            let r = jacobian_chain_check(&cfg, &tree, 1e-5);
            assert!(r.pass, "{r:?}");
            assert!((r.constant.abs() - 1.0 / m as f64).abs() < 1e-12);
        }
    }
}

#[test]
fn tree_examples() {
    let cfg = real(&[-1.0, 0.0, 1.0]);
    let t = build_zero_tree(&cfg).unwrap();
    let mut e: Vec<(usize, usize)> = t.edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    e.sort();
    assert_eq!(e, vec![(0, 1), (1, 2)]);
    assert_eq!(t.comparability, 1.0);
    let t = build_zero_tree(&real(&[2.0, -2.0])).unwrap();
    assert_eq!((t.edges.len(), t.comparability), (1, 1.0));
    assert_eq!(
        build_zero_tree(&real(&[1.0, 1.0, -2.0])),
        Err(JacobianError::Repeated(0, 1))
    );
    let mut rng = common::rng(24);
    for _ in 0..300 {
        let cfg = random_config(&mut rng, 6);
        let t = build_zero_tree(&cfg).unwrap();
        assert!(t.comparability <= 5.0 + 1e-12);
        // direct pair check
        let len: Vec<f64> = t.edge_vectors(&cfg).iter().map(|v| v.norm()).collect();
        for i in 0..6 {
            for j in i + 1..6 {
                let p: f64 = t.path(i, j).iter().map(|&k| len[k]).sum();
                assert!(p >= (cfg.z[i] - cfg.z[j]).norm() - 1e-12);
                assert!(p <= t.comparability * (cfg.z[i] - cfg.z[j]).norm() * (1.0 + 1e-12));
            }
        }
    }
}

#[test]
fn strange_comb_examples() {
    let cfg = real(&[0.3, -0.3]);
    assert!((strange_comb_ratio(&cfg, &build_zero_tree(&cfg).unwrap()) - 1.0).abs() < 1e-14);
    let ratios: Vec<f64> = (0..=12)
        .map(|k| {
            let cfg = separated_clusters(4, 10f64.powf(k as f64 / 2.0));
            strange_comb_ratio(&cfg, &build_zero_tree(&cfg).unwrap())
        })
        .collect();
    let max = ratios.iter().cloned().fold(0.0, f64::max);
    assert!(
        max.is_finite() && max < 10.0 * ratios[ratios.len() - 1].min(ratios[0]).max(1.0),
        "{ratios:?}"
    );
    // the ratio settles as the clusters separate
    assert!((ratios[12] / ratios[11] - 1.0).abs() < 1e-3);
}

#[test]
fn half_disk_period() {
    let cfg = real(&[-1.0, 1.0]);
    let p = period_integrals(&cfg, &build_zero_tree(&cfg).unwrap()).unwrap();
    assert!((p.omega[0].norm() - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
    assert!((p.omega[0] - c(0.0, std::f64::consts::FRAC_PI_2)).norm() < 1e-9);
    assert!(p.halving_change < 1e-8);
    let big = cfg.scale(2.0);
    let q = period_integrals(&big, &build_zero_tree(&big).unwrap()).unwrap();
    assert!((q.omega[0] / p.omega[0] - 4.0).norm() < 1e-12);
}

#[test]
fn periods_match_simpson_oracle() {
    let mut rng = common::rng(25);
    for m in 3..=5 {
        for _ in 0..4 {
            let cfg = random_config(&mut rng, m);
            let tree = build_zero_tree(&cfg).unwrap();
            let p = period_integrals(&cfg, &tree).unwrap();
            for (k, &(t, h)) in tree.edges.iter().enumerate() {
                let oracle = period_oracle(&cfg.z, t, h);
                // the branch is fixed only up to sign
                let err = (p.omega[k] / oracle - 1.0)
                    .norm()
                    .min((p.omega[k] / oracle + 1.0).norm());
                assert!(err < 1e-7, "m={m} edge {k}: {} {}", p.omega[k], oracle);
            }
            let scaled = cfg.scale(1.7);
            let q = period_integrals(&scaled, &tree).unwrap();
            let factor = 1.7f64.powf((m as f64 + 2.0) / 2.0);
            for k in 0..m - 1 {
                assert!((q.omega[k].norm() / p.omega[k].norm() / factor - 1.0).abs() < 1e-10);
            }
            let conj = period_integrals(&cfg.conj(), &tree).unwrap();
            for k in 0..m - 1 {
                assert!((conj.omega[k] + p.omega[k].conj()).norm() < 1e-10 * p.omega[k].norm());
            }
        }
    }
}

#[test]
fn edge_through_a_zero_is_rejected() {
    let cfg = real(&[-1.0, 0.0, 1.0]);
    let tree = ZeroTree {
        m: 3,
        edges: vec![(0, 2), (0, 1)],
        order: vec![0, 1],
        comparability: 1.0,
    };
    assert_eq!(
        period_integrals(&cfg, &tree),
        Err(JacobianError::ThroughZero { edge: 0, zero: 1 })
    );
}

#[test]
fn quadrature_basics() {
    let r = gauss_kronrod(|x| c(x.sin(), 0.0), 0.0, std::f64::consts::PI, 1e-13);
    assert!((r.value.re - 2.0).abs() < 1e-14 && r.converged);
    let r = gauss_kronrod(|x| c(x.sqrt(), x), 0.0, 1.0, 1e-12);
    assert!((r.value - c(2.0 / 3.0, 0.5)).norm() < 1e-11);
    assert!(r.segments > 1);
}

#[test]
fn residue_examples() {
    assert!(residue_b(&[c(0.0, 0.0); 2], 1.0).unwrap().value().norm() < 1e-14);
    assert!(residue_b(&[c(0.0, 0.0); 4], 1.0).unwrap().value().norm() < 1e-14);
    for &a0 in &[c(1e-3, 0.0), c(-2e-3, 1e-3), c(0.3, -0.2)] {
        let b = residue_b(&[a0, c(0.0, 0.0)], 1.0).unwrap().value();
        assert!((b - c(0.0, std::f64::consts::PI) * a0).norm() < 1e-12);
    }
    let a1 = c(2e-3, -1e-3);
    let b = residue_b(&[c(0.0, 0.0), a1, c(0.0, 0.0), c(0.0, 0.0)], 1.0)
        .unwrap()
        .value();
    assert!((b - c(0.0, std::f64::consts::PI) * a1).norm() < 1e-12);
    assert_eq!(
        residue_b(&[c(0.0, 0.0); 3], 1.0),
        Err(JacobianError::OddDegree(3))
    );
    assert!(matches!(
        residue_b(&[c(-4.0, 0.0), c(0.0, 0.0)], 1.0),
        Err(JacobianError::NotEnclosed { winding: 0, .. })
    ));
}

#[test]
fn residue_matches_series_oracle() {
    let mut rng = common::rng(26);
    use rand::Rng;
    for m in [2usize, 4, 6] {
        for _ in 0..30 {
            let a: Vec<C64> = (0..m)
                .map(|_| c(rng.gen_range(-0.05..0.05), rng.gen_range(-0.05..0.05)))
                .collect();
            let b = residue_b(&a, 1.0).unwrap().value();
            assert!((b - residue_series(&a)).norm() < 1e-12, "m={m}");
        }
    }
}

#[test]
fn m2_period_jacobian_stable_across_scales() {
    let ratios: Vec<f64> = [1e-3, 1e-1, 1.0, 10.0, 1e3]
        .iter()
        .map(|&s| {
            let cfg = ZeroConfig::new(vec![c(s, 0.3 * s), c(-s, -0.3 * s)]).unwrap();
            period_jacobian_report(&cfg, &build_zero_tree(&cfg).unwrap(), 1e-5)
                .unwrap()
                .ratio
        })
        .collect();
    // Ω = (iπ/8) ē² here, so the ratio is |πē/4| / |ē| = π/4
    for r in &ratios {
        assert!((r - std::f64::consts::FRAC_PI_4).abs() < 1e-6, "{ratios:?}");
    }
}

#[test]
fn collision_sweep_stays_bounded() {
    for m in [3usize, 4] {
        let rows: Vec<f64> = (0..=8)
            .map(|k| {
                let cfg = collision_config(m, 10f64.powf(-(k as f64) / 2.0));
                let r =
                    period_jacobian_report(&cfg, &build_zero_tree(&cfg).unwrap(), 1e-5).unwrap();
                assert!(r.det_modulus > 0.0 && r.discriminant > 0.0);
                r.ratio
            })
            .collect();
        let mut sorted = rows.clone();
        sorted.sort_by(f64::total_cmp);
        let med = sorted[sorted.len() / 2];
        assert!(rows.iter().all(|&r| r <= 10.0 * med), "m={m}: {rows:?}");
    }
}

#[test]
fn verify_table_passes() {
    for m in 2..=5 {
        let rows = verify(m, 40, 7, &VerifySettings::default()).unwrap();
        for r in &rows {
            assert!(r.pass, "m={m}: {r:?}");
        }
        assert_eq!(rows, verify(m, 40, 7, &VerifySettings::default()).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coefficients_are_symmetric(xs in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..6), k in 0usize..6) {
        let z: Vec<C64> = xs.iter().map(|&(a, b)| c(a, b)).collect();
        let mut w = z.clone();
        w.rotate_left(k % z.len());
        w.swap(0, z.len() - 1);
        let (p, q) = (monic_coefficients(&z), monic_coefficients(&w));
        for (x, y) in p.iter().zip(&q) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn edge_relabeling_keeps_determinant(seed in 0u64..1000, m in 3usize..6) {
        let mut rng = common::rng(seed);
        let cfg = random_config(&mut rng, m);
        let tree = build_zero_tree(&cfg).unwrap();
        let mut perm = tree.clone();
        perm.edges.reverse();
        perm.order = (0..m - 1).rev().collect();
        prop_assert!((chain_constant(&perm).abs() - chain_constant(&tree).abs()).abs() < 1e-12);
        let a = period_jacobian_report(&cfg, &tree, 1e-5).unwrap();
        let b = period_jacobian_report(&cfg, &perm, 1e-5).unwrap();
        prop_assert!((a.det_modulus / b.det_modulus - 1.0).abs() < 1e-5);
    }

    #[test]
    fn ratios_are_scale_invariant(seed in 0u64..1000, m in 2usize..6, s in 0.1f64..10.0) {
        let mut rng = common::rng(seed);
        let cfg = random_config(&mut rng, m);
        let tree = build_zero_tree(&cfg).unwrap();
        let big = cfg.scale(s);
        prop_assert!((strange_comb_ratio(&big, &tree) / strange_comb_ratio(&cfg, &tree) - 1.0).abs() < 1e-10);
    }
}
