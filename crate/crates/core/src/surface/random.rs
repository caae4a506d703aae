//! Random genus-2 surfaces for sweeps and property tests.

use rand::seq::SliceRandom;
use rand::Rng;

use super::shapes::{pillowcase_tiled, symmetric_polygon};
use super::{FlatSurface, Holonomy};

/// Stratum of a random abelian genus-2 surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Genus2Stratum {
    /// One zero of order 2 (octagon).
    H2,
    /// Two simple zeros (decagon).
    H11,
}

/// Random centrally symmetric polygon surface of area 1.
pub fn random_abelian_genus2<R: Rng + ?Sized>(rng: &mut R, stratum: Genus2Stratum) -> FlatSurface {
    let n = match stratum {
        Genus2Stratum::H2 => 4,
        Genus2Stratum::H11 => 5,
    };
    let min_gap = 0.15;
    loop {
        let mut angles: Vec<f64> = (0..n)
            .map(|_| rng.gen_range(0.0..std::f64::consts::PI))
            .collect();
        angles.sort_by(|a, b| a.total_cmp(b));
        let gaps_ok = angles.windows(2).all(|w| w[1] - w[0] > min_gap)
            && angles[0] + std::f64::consts::PI - angles[n - 1] > min_gap;
        if !gaps_ok {
            continue;
        }
        let sides: Vec<Holonomy> = angles
            .iter()
            .map(|&a| Holonomy::new(rng.gen_range(0.5..1.5), 0.0).rotate(a))
            .collect();
        if let Ok(s) = symmetric_polygon(&sides) {
            return s.scale(1.0 / s.area().sqrt());
        }
    }
}

/// Random abelian genus-2 surface, stratum chosen uniformly.
pub fn random_genus2<R: Rng + ?Sized>(rng: &mut R) -> FlatSurface {
    let stratum = if rng.gen_bool(0.5) {
        Genus2Stratum::H2
    } else {
        Genus2Stratum::H11
    };
    random_abelian_genus2(rng, stratum)
}

/// Random genus-2 half-translation surface in the principal stratum (four
/// simple zeros, possibly with extra regular vertices), not a global square,
/// perturbed off the square-tiled locus and scaled to area 1.
pub fn random_quadratic_genus2<R: Rng + ?Sized>(rng: &mut R) -> FlatSurface {
    const SQUARES: usize = 6;
    loop {
        let h = random_matching(rng, 2 * SQUARES);
        let v = random_matching(rng, 2 * SQUARES);
        let Ok(s) = pillowcase_tiled(SQUARES, &h, &v) else {
            continue;
        };
        let odd = s
            .cone_points()
            .iter()
            .filter(|c| c.angle_pi % 2 == 1)
            .count();
        if s.genus() != 2 || odd != 4 || s.cone_points().iter().any(|c| c.angle_pi == 1) {
            continue;
        }
        if !s.orientation_double_cover().is_connected() {
            continue;
        }
        let p = perturb(&s, rng, 0.15);
        return p.scale(1.0 / p.area().sqrt());
    }
}

fn random_matching<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<(usize, usize)> {
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(rng);
    ids.chunks(2).map(|c| (c[0], c[1])).collect()
}

/// Deform the holonomies along closed dual loops with trivial sign character,
/// keeping every triangle closed and every gluing compatible. Amplitudes are
/// drawn from `[-amp, amp]` relative to the shortest edge and halved until the
/// result is nondegenerate.
pub fn perturb<R: Rng + ?Sized>(s: &FlatSurface, rng: &mut R, amp: f64) -> FlatSurface {
    let loops = dual_loops(s);
    let base = s.shortest_edge();
    let ws: Vec<Holonomy> = loops
        .iter()
        .map(|_| Holonomy::new(rng.gen_range(-amp..amp), rng.gen_range(-amp..amp)) * base)
        .collect();
    let mut k = 1.0;
    for _ in 0..40 {
        let mut hol = s.holonomies().to_vec();
        for (lp, &w) in loops.iter().zip(&ws) {
            add_loop(s, &mut hol, lp, w * k);
        }
        if let Ok(out) = s.with_holonomies(hol) {
            return out;
        }
        k *= 0.5;
    }
    s.clone()
}

/// Add `w` along a dual loop given by its exit half-edges. Entering a
/// triangle through `p` and leaving through `q` adds `-w` to `p` and `w` to
/// `q` in the local frame; crossing a gluing of sign `σ` turns `w` into `σw`.
pub fn add_loop(s: &FlatSurface, hol: &mut [Holonomy], exits: &[usize], w: Holonomy) {
    let mut w = w;
    for &q in exits {
        hol[q] += w;
        let p = s.partner(q);
        w = w * s.sign(q) as f64;
        hol[p] += -w;
    }
}

/// Fundamental dual loops of a spanning tree of the dual graph, each given as
/// its sequence of exit half-edges; loops with nontrivial sign character are
/// traversed twice.
pub fn dual_loops(s: &FlatSurface) -> Vec<Vec<usize>> {
    let nt = s.num_triangles();
    let mut parent_edge = vec![usize::MAX; nt];
    let mut seen = vec![false; nt];
    let mut in_tree = vec![false; s.num_half_edges()];
    seen[0] = true;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(t) = queue.pop_front() {
        for &h in &s.triangles()[t] {
            let p = s.partner(h);
            let u = s.triangle_of(p);
            if !seen[u] {
                seen[u] = true;
                parent_edge[u] = p;
                in_tree[h] = true;
                in_tree[p] = true;
                queue.push_back(u);
            }
        }
    }
    // path from root to t as exit half-edges
    let root_path = |mut t: usize| {
        let mut out = Vec::new();
        while parent_edge[t] != usize::MAX {
            let e = parent_edge[t];
            let from = s.partner(e);
            out.push(from);
            t = s.triangle_of(from);
        }
        out.reverse();
        out
    };
    let mut loops = Vec::new();
    for h in s.edges() {
        if in_tree[h] {
            continue;
        }
        let t = s.triangle_of(h);
        let u = s.triangle_of(s.partner(h));
        // root -> t, cross h, u -> root
        let mut lp = root_path(t);
        lp.push(h);
        let back: Vec<usize> = root_path(u).iter().rev().map(|&e| s.partner(e)).collect();
        lp.extend(back);
        let character: i8 = lp.iter().map(|&e| s.sign(e)).product();
        if character == -1 {
            let again = lp.clone();
            lp.extend(again);
        }
        loops.push(lp);
    }
    loops
}
