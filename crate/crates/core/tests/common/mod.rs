#![allow(dead_code)]

use std::collections::BTreeSet;

use teichcount::surface::FlatSurface;
use teichcount::Holonomy;

#[derive(Clone)]
struct Win {
    h: usize,
    p: Holonomy,
    q: Holonomy,
    eps: f64,
}

/// Crossings of the ray from the start of `h0` in direction `d`, up to distance `reach`.
fn trace(s: &FlatSurface, h0: usize, d: Holonomy, reach: f64) -> Vec<Win> {
    let a = s.holonomy(h0);
    let b = -s.holonomy(s.prev(h0));
    let mut w = Win {
        h: s.next(h0),
        p: a,
        q: b,
        eps: 1.0,
    };
    let mut out = Vec::new();
    loop {
        let e = w.q - w.p;
        let t = w.p.cross(e) / d.cross(e);
        out.push(w.clone());
        if t > reach {
            return out;
        }
        let hp = s.partner(w.h);
        let eps = w.eps * s.sign(w.h) as f64;
        let f1 = s.next(hp);
        let f2 = s.next(f1);
        let c = w.p + s.holonomy(f1) * eps;
        w = if d.cross(c) > 0.0 {
            Win {
                h: f1,
                p: w.p,
                q: c,
                eps,
            }
        } else {
            Win {
                h: f2,
                p: c,
                q: w.q,
                eps,
            }
        };
    }
}

fn dir(theta: f64) -> Holonomy {
    Holonomy::new(theta.cos(), theta.sin())
}

#[allow(clippy::too_many_arguments)]
fn bisect(
    s: &FlatSurface,
    h0: usize,
    l: f64,
    t0: f64,
    w0: &[Win],
    t1: f64,
    w1: &[Win],
    found: &mut BTreeSet<Vec<usize>>,
    out: &mut Vec<(Holonomy, bool)>,
) {
    let k = w0.iter().zip(w1).take_while(|(x, y)| x.h == y.h).count();
    if k == w0.len() && k == w1.len() {
        return;
    }
    if t1 - t0 < 1e-12 {
        // a prefix only means one ray ran out of reach; keep real vertices only
        if k == 0 {
            return;
        }
        let w = &w0[k - 1];
        let hp = s.partner(w.h);
        let eps = w.eps * s.sign(w.h) as f64;
        let c = w.p + s.holonomy(s.next(hp)) * eps;
        let on_ray = dir(t0).cross(c).abs() <= 1e-9 * c.norm() && dir(t0).dot(c) > 0.0;
        let key: Vec<usize> = w0[..k].iter().map(|x| x.h).collect();
        if on_ray && c.norm() <= l + 1e-9 && found.insert(key) {
            out.push((c, false));
        }
        return;
    }
    let tm = 0.5 * (t0 + t1);
    let wm = trace(s, h0, dir(tm), 1.5 * l);
    bisect(s, h0, l, t0, w0, tm, &wm, found, out);
    bisect(s, h0, l, tm, &wm, t1, w1, found, out);
}

/// Oriented saddle connections of length ≤ `l` found by sweeping rays over
/// every corner and bisecting on changes of the crossed-edge sequence.
/// Every unoriented connection is returned twice, once from each end.
pub fn ray_sweep_holonomies(s: &FlatSurface, l: f64) -> Vec<Holonomy> {
    ray_sweep_classified(s, l)
        .into_iter()
        .map(|(v, _)| v)
        .collect()
}

/// As [`ray_sweep_holonomies`], flagging connections that run along an edge.
pub fn ray_sweep_classified(s: &FlatSurface, l: f64) -> Vec<(Holonomy, bool)> {
    let mut out = Vec::new();
    let mut edges_seen = BTreeSet::new();
    for h0 in 0..s.num_half_edges() {
        let a = s.holonomy(h0);
        if a.norm() <= l + 1e-9 && edges_seen.insert(h0) {
            out.push((a, true));
        }
        let b = -s.holonomy(s.prev(h0));
        let ta = a.y.atan2(a.x);
        let mut tb = b.y.atan2(b.x);
        while tb <= ta {
            tb += 2.0 * std::f64::consts::PI;
        }
        let (t0, t1) = (ta + 1e-11, tb - 1e-11);
        // identical crossing sequences prove a sector empty only when it is
        // narrow enough that the chord of the first far edge stays beyond `l`
        let pieces = ((t1 - t0) / 1.0).ceil() as usize;
        let mut ts = vec![t0];
        ts.extend((1..pieces).map(|j| t0 + (t1 - t0) * (j as f64 - 0.381966) / pieces as f64));
        ts.push(t1);
        let traces: Vec<Vec<Win>> = ts.iter().map(|&t| trace(s, h0, dir(t), 1.5 * l)).collect();
        let mut found = BTreeSet::new();
        for j in 0..pieces {
            bisect(
                s,
                h0,
                l,
                ts[j],
                &traces[j],
                ts[j + 1],
                &traces[j + 1],
                &mut found,
                &mut out,
            );
        }
    }
    out
}

pub fn sorted_lengths(v: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut out: Vec<f64> = v.into_iter().collect();
    out.sort_by(|a, b| a.total_cmp(b));
    out
}

pub fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
