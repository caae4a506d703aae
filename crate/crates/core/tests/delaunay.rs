mod common;

use std::f64::consts::{FRAC_PI_4, SQRT_2};

use proptest::prelude::*;
use rand::Rng;
use teichcount::delaunay::{
    check_delaunay_lemma, delaunayize, delaunayize_with, euclidean_distance, is_delaunay,
    period_coordinates, DelaunayError, INCIRCLE_TOL,
};
use teichcount::surface::random::{perturb, random_genus2, random_quadratic_genus2};
use teichcount::surface::shapes::{l_origami, unit_torus, BOTTOM, DIAG, DIAG_BACK, TOP};
use teichcount::{FlatSurface, Holonomy};

/// Signed distance from the far apex to the circumcircle of the near
/// triangle, relative to the circumradius (negative: strictly inside).
fn apex_clearance(s: &FlatSurface, h: usize) -> f64 {
    let hp = s.partner(h);
    let a = Holonomy::ZERO;
    let b = s.holonomy(h);
    let c = b + s.holonomy(s.next(h));
    let far = s.holonomy(s.next(hp)) * s.sign(h) as f64;
    // circumcenter by perpendicular bisectors
    let d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    let (na, nb, nc) = (a.norm2(), b.norm2(), c.norm2());
    let ux = (na * (b.y - c.y) + nb * (c.y - a.y) + nc * (a.y - b.y)) / d;
    let uy = (na * (c.x - b.x) + nb * (a.x - c.x) + nc * (b.x - a.x)) / d;
    let center = Holonomy::new(ux, uy);
    let r = (a - center).norm();
    ((far - center).norm() - r) / r
}

fn oracle_is_delaunay(s: &FlatSurface, slack: f64) -> bool {
    s.edges().all(|h| apex_clearance(s, h) >= -slack)
}

/// Rotate so the diagonal of the square torus is horizontal, then stretch it.
fn stretched_diagonal_torus(t: f64) -> FlatSurface {
    unit_torus().rotate(-FRAC_PI_4).geodesic_flow(t)
}

#[test]
fn square_torus_is_cocircular() {
    let t = unit_torus();
    assert!(apex_clearance(&t, DIAG_BACK).abs() < 1e-12);
    assert!(is_delaunay(&t));
    assert_eq!(delaunayize_with(&t, INCIRCLE_TOL).unwrap().flips, 0);
}

#[test]
fn flowed_square_torus_stays_rectangular() {
    // a flowed square is a rectangle: the diagonal quad stays cocircular
    for t in [1.0, 2.0] {
        let s = unit_torus().geodesic_flow(t);
        assert!(apex_clearance(&s, DIAG_BACK).abs() < 1e-12);
        assert!(is_delaunay(&s));
        assert_eq!(delaunayize_with(&s, INCIRCLE_TOL).unwrap().flips, 0);
    }
}

#[test]
fn stretched_diagonal_is_flipped() {
    let s = stretched_diagonal_torus(1.0);
    assert!(apex_clearance(&s, DIAG_BACK) < -0.05);
    assert!(!is_delaunay(&s));
    let log = delaunayize_with(&s, INCIRCLE_TOL).unwrap();
    assert_eq!(log.flips, 1);
    let d = log.surface;
    assert!(is_delaunay(&d) && oracle_is_delaunay(&d, 1e-9));
    // the new diagonal is the short vertical one, (0, √2/e) up to sign
    let v = d.holonomy(DIAG_BACK);
    assert!(v.x.abs() < 1e-12 && (v.y.abs() - SQRT_2 / 1f64.exp()).abs() < 1e-12);
    assert!((d.area() - 1.0).abs() < 1e-12);
}

#[test]
fn flowed_torus_t2_rejected_before_flipping() {
    let s = stretched_diagonal_torus(2.0);
    assert!(!is_delaunay(&s));
    assert!(!oracle_is_delaunay(&s, 0.0));
    assert!(is_delaunay(&delaunayize(&s).unwrap()));
}

#[test]
fn delaunayize_matches_oracle_and_is_idempotent() {
    let mut rng = common::rng(5);
    for i in 0..40 {
        let base = if i % 2 == 0 {
            random_genus2(&mut rng)
        } else {
            random_quadratic_genus2(&mut rng)
        };
        let s = base.geodesic_flow(rng.gen_range(-3.0..3.0));
        let d = delaunayize(&s).unwrap();
        assert!(is_delaunay(&d));
        assert!(oracle_is_delaunay(&d, 1e-8));
        let dd = delaunayize(&d).unwrap();
        assert_eq!(dd, d);
    }
}

#[test]
fn flips_are_isometries() {
    let mut rng = common::rng(6);
    for i in 0..20 {
        let base = if i % 2 == 0 {
            random_genus2(&mut rng)
        } else {
            random_quadratic_genus2(&mut rng)
        };
        let s = base.geodesic_flow(rng.gen_range(-3.0..3.0));
        let d = delaunayize(&s).unwrap();
        assert!((d.area() - s.area()).abs() < 1e-12);
        assert_eq!(d.genus(), s.genus());
        let mut ca: Vec<u32> = s.cone_points().iter().map(|c| c.angle_pi).collect();
        let mut cb: Vec<u32> = d.cone_points().iter().map(|c| c.angle_pi).collect();
        ca.sort();
        cb.sort();
        assert_eq!(ca, cb);
        let sys = s.systole();
        assert!((d.systole() - sys).abs() < 1e-12 * sys.max(1.0));
        let a = common::sorted_lengths(s.saddle_connections(3.0 * sys).iter().map(|c| c.length));
        let b = common::sorted_lengths(d.saddle_connections(3.0 * sys).iter().map(|c| c.length));
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9);
        }
    }
}

#[test]
fn circumradius_sum_decreases() {
    let mut rng = common::rng(7);
    let mut total = 0;
    for i in 0..60 {
        let base = if i % 2 == 0 {
            random_genus2(&mut rng)
        } else {
            random_quadratic_genus2(&mut rng)
        };
        let s = base.geodesic_flow(rng.gen_range(-3.0..3.0));
        let log = delaunayize_with(&s, INCIRCLE_TOL).unwrap();
        total += log.flips;
        assert_eq!(log.trace.len(), log.flips + 1);
        for w in log.trace.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12), "{} -> {}", w[0], w[1]);
        }
    }
    assert!(total > 0);
}

/// Independent lemma check from the ray sweep: every non-edge connection
/// is at least `√2` times the shortest one.
fn oracle_lemma(s: &FlatSurface) -> bool {
    let sys = s.systole();
    let found = common::ray_sweep_classified(s, SQRT_2 * sys + 1e-6);
    let min = found
        .iter()
        .map(|(v, _)| v.norm())
        .fold(f64::INFINITY, f64::min);
    assert!((min - sys).abs() < 1e-9);
    found
        .iter()
        .all(|(v, edge)| *edge || v.norm() >= SQRT_2 * sys - 1e-9)
}

#[test]
fn lemma_on_l_origami() {
    let d = delaunayize(&l_origami()).unwrap();
    let r = check_delaunay_lemma(&d);
    assert!(r.pass);
    assert!((r.systole - 1.0).abs() < 1e-12);
    assert!((r.threshold - SQRT_2).abs() < 1e-12);
    assert!(r
        .connections
        .iter()
        .any(|c| !c.is_edge && (c.length - SQRT_2).abs() < 1e-12));
    assert!(oracle_lemma(&d));
}

#[test]
fn lemma_negative_control() {
    // unflipped: the short vertical connection is not an edge
    let s = stretched_diagonal_torus(1.0);
    let r = check_delaunay_lemma(&s);
    assert!(!r.pass);
    assert!(!oracle_lemma(&s));
    assert!(check_delaunay_lemma(&delaunayize(&s).unwrap()).pass);
}

#[test]
fn lemma_agrees_with_oracle_on_random_surfaces() {
    let mut rng = common::rng(8);
    for i in 0..12 {
        let base = if i % 2 == 0 {
            random_genus2(&mut rng)
        } else {
            random_quadratic_genus2(&mut rng)
        };
        let s = base.geodesic_flow(rng.gen_range(-1.0..1.0));
        let d = delaunayize(&s).unwrap();
        let r = check_delaunay_lemma(&d);
        assert!(r.pass);
        assert!(oracle_lemma(&d));
        let swept = common::ray_sweep_classified(&d, r.threshold + 1e-9);
        assert_eq!(swept.len(), 2 * r.connections.len());
    }
}

#[test]
fn torus_periods() {
    let t = unit_torus();
    let p = period_coordinates(&t).unwrap();
    assert_eq!(
        p.periods,
        vec![Holonomy::new(1.0, 0.0), Holonomy::new(0.0, 1.0)]
    );
    let f = period_coordinates(&t.geodesic_flow(0.7)).unwrap();
    let e = 0.7f64.exp();
    assert!((f.periods[0] - Holonomy::new(e, 0.0)).norm() < 1e-14);
    assert!((f.periods[1] - Holonomy::new(0.0, 1.0 / e)).norm() < 1e-14);
}

#[test]
fn period_dimensions() {
    let mut rng = common::rng(9);
    let a = delaunayize(&random_genus2(&mut rng)).unwrap();
    assert_eq!(period_coordinates(&a).unwrap().len(), 4);
    let q = delaunayize(&random_quadratic_genus2(&mut rng)).unwrap();
    assert_eq!(period_coordinates(&q).unwrap().len(), 6);
}

#[test]
fn periods_are_edge_sums() {
    let mut rng = common::rng(10);
    let s = delaunayize(&random_genus2(&mut rng)).unwrap();
    let p = period_coordinates(&s).unwrap();
    for (b, per) in p.basis.iter().zip(&p.periods) {
        assert!(b.is_closed(&s));
        let mut sum = Holonomy::ZERO;
        // weights are antisymmetric under the gluing: count each edge once
        for h in 0..s.num_half_edges() {
            assert_eq!(b.weight(h), -b.weight(s.partner(h)));
            sum += s.holonomy(h) * (0.5 * b.weight(h) as f64);
        }
        assert!((sum - *per).norm() < 1e-12);
    }
}

fn random_unimodular(rng: &mut impl Rng, n: usize) -> Vec<Vec<i64>> {
    let mut u: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| (i == j) as i64).collect())
        .collect();
    for _ in 0..6 {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i == j {
            continue;
        }
        let k = rng.gen_range(-2..=2);
        for c in 0..n {
            u[i][c] += k * u[j][c];
        }
    }
    u
}

#[test]
fn basis_change_transforms_periods() {
    let mut rng = common::rng(12);
    for i in 0..10 {
        let s = if i % 2 == 0 {
            random_genus2(&mut rng)
        } else {
            random_quadratic_genus2(&mut rng)
        };
        let p = period_coordinates(&s).unwrap();
        let u = random_unimodular(&mut rng, p.len());
        let q = p.change_basis(&u);
        let surf = match s.orientation_double_cover() {
            teichcount::surface::DoubleCover::Connected { surface, .. } => surface,
            _ => s.clone(),
        };
        for (b, per) in q.basis.iter().zip(&q.periods) {
            assert!((b.period(&surf) - *per).norm() < 1e-12);
        }
    }
}

fn shifted_torus(eps: f64) -> FlatSurface {
    let t = unit_torus();
    let mut hol = t.holonomies().to_vec();
    let dx = Holonomy::new(eps, 0.0);
    hol[BOTTOM] += dx;
    hol[DIAG] += dx;
    hol[TOP] += -dx;
    hol[DIAG_BACK] += -dx;
    t.with_holonomies(hol).unwrap()
}

#[test]
fn distance_basics() {
    let t = unit_torus();
    assert_eq!(euclidean_distance(&t, &t).unwrap(), 0.0);
    let d = euclidean_distance(&t, &shifted_torus(0.01)).unwrap();
    assert!((d - 0.01).abs() < 1e-15);
    let flipped = delaunayize(&stretched_diagonal_torus(1.0)).unwrap();
    assert_eq!(
        euclidean_distance(&t, &flipped),
        Err(DelaunayError::Incomparable)
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn distance_is_a_pseudometric(seed in 0u64..10_000, quadratic in any::<bool>()) {
        let mut rng = common::rng(seed);
        let s = if quadratic { random_quadratic_genus2(&mut rng) } else { random_genus2(&mut rng) };
        let a = perturb(&s, &mut rng, 0.05);
        let b = perturb(&s, &mut rng, 0.05);
        let dab = euclidean_distance(&a, &b).unwrap();
        let dba = euclidean_distance(&b, &a).unwrap();
        let dsa = euclidean_distance(&s, &a).unwrap();
        let dsb = euclidean_distance(&s, &b).unwrap();
        prop_assert_eq!(dab, dba);
        prop_assert!(dab <= dsa + dsb + 1e-12);
        prop_assert!(dsa <= dab + dsb + 1e-12);
        prop_assert_eq!(euclidean_distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn delaunay_output_satisfies_lemma(seed in 0u64..10_000, t in -2.0f64..2.0) {
        let s = random_genus2(&mut common::rng(seed)).geodesic_flow(t);
        let d = delaunayize(&s).unwrap();
        prop_assert!(is_delaunay(&d));
        prop_assert!(check_delaunay_lemma(&d).pass);
    }

    #[test]
    fn flow_scales_periods(seed in 0u64..10_000, t in -2.0f64..2.0) {
        let s = random_genus2(&mut common::rng(seed));
        let p = period_coordinates(&s).unwrap();
        let q = period_coordinates(&s.geodesic_flow(t)).unwrap();
        for (x, y) in p.periods.iter().zip(&q.periods) {
            prop_assert!((x.x * t.exp() - y.x).abs() < 1e-12 * x.norm().max(1.0) * t.exp());
            prop_assert!((x.y * (-t).exp() - y.y).abs() < 1e-12 * x.norm().max(1.0));
        }
    }
}
