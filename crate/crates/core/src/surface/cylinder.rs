//! Flat cylinders, found by tracing bands of parallel leaves across edges.

use std::collections::BTreeSet;

use super::{FlatSurface, Holonomy, LENGTH_TOL};

#[derive(Clone, Debug, PartialEq)]
pub struct CylinderRecord {
    /// Holonomy of the core curve.
    pub core: Holonomy,
    pub circumference: f64,
    pub height: f64,
    /// Saddle connections on the two boundary components, as holonomies
    /// parallel to the core.
    pub boundary: [Vec<Holonomy>; 2],
}

#[derive(Clone)]
struct Visit {
    entry: usize,
    a: Holonomy,
    b: Holonomy,
    c: Holonomy,
}

#[derive(Clone)]
struct Band {
    g: usize,
    eps: f64,
    a: Holonomy,
    b: Holonomy,
    y0: f64,
    y1: f64,
    visits: Vec<Visit>,
}

pub(super) fn detect(s: &FlatSurface, l: f64) -> Vec<CylinderRecord> {
    let mut dirs: Vec<f64> = s
        .saddle_connections(l)
        .iter()
        .map(|c| {
            let a = c.holonomy.y.atan2(c.holonomy.x);
            a.rem_euclid(std::f64::consts::PI)
        })
        .collect();
    dirs.sort_by(|a, b| a.total_cmp(b));
    let mut uniq: Vec<f64> = Vec::new();
    for d in dirs {
        let close = |u: f64| {
            let diff = (u - d).abs();
            diff < 1e-9 || (std::f64::consts::PI - diff) < 1e-9
        };
        if !uniq.iter().any(|&u| close(u)) {
            uniq.push(d);
        }
    }
    let mut out = Vec::new();
    for theta in uniq {
        let r = s.rotate(-theta);
        for (w, h, bottom, top) in horizontal_cylinders(&r, l) {
            let side = |marks: &[f64]| -> Vec<Holonomy> {
                boundary_pieces(marks, w)
                    .into_iter()
                    .map(|len| Holonomy::new(len, 0.0).rotate(theta))
                    .collect()
            };
            out.push(CylinderRecord {
                core: Holonomy::new(w, 0.0).rotate(theta),
                circumference: w,
                height: h,
                boundary: [side(&bottom), side(&top)],
            });
        }
    }
    out.sort_by(|a, b| {
        a.circumference
            .total_cmp(&b.circumference)
            .then(a.core.angle().total_cmp(&b.core.angle()))
    });
    out
}

fn boundary_pieces(marks: &[f64], w: f64) -> Vec<f64> {
    let mut m: Vec<f64> = marks.iter().map(|x| x.rem_euclid(w)).collect();
    m.sort_by(|a, b| a.total_cmp(b));
    let tol = 1e-9 * w.max(1.0);
    let mut uniq: Vec<f64> = Vec::new();
    for x in m {
        if uniq.last().is_none_or(|&u| x - u > tol) {
            uniq.push(x);
        }
    }
    if uniq.len() > 1 && (uniq[0] + w - uniq[uniq.len() - 1]) <= tol {
        uniq.pop();
    }
    if uniq.len() <= 1 {
        return vec![w];
    }
    let mut out: Vec<f64> = uniq.windows(2).map(|p| p[1] - p[0]).collect();
    out.push(uniq[0] + w - uniq[uniq.len() - 1]);
    out
}

/// Horizontal cylinders with circumference at most `l`:
/// `(circumference, height, bottom marks, top marks)`.
fn horizontal_cylinders(s: &FlatSurface, l: f64) -> Vec<(f64, f64, Vec<f64>, Vec<f64>)> {
    let bound = l + LENGTH_TOL;
    let scale = s.holonomies().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let htol = 1e-10 * scale;
    let mut keys = BTreeSet::new();
    let mut out = Vec::new();
    for h in s.edges() {
        let v = s.holonomy(h);
        if v.y.abs() <= htol {
            continue;
        }
        let eps0 = if v.y < 0.0 { 1.0 } else { -1.0 };
        let a0 = Holonomy::ZERO;
        let b0 = v * eps0;
        let start_x = move |y: f64| a0.x + (y - a0.y) / (b0.y - a0.y) * (b0.x - a0.x);
        let mut stack = vec![Band {
            g: h,
            eps: eps0,
            a: a0,
            b: b0,
            y0: b0.y,
            y1: a0.y,
            visits: Vec::new(),
        }];
        while let Some(mut band) = stack.pop() {
            if band.y1 - band.y0 <= htol {
                continue;
            }
            let g1 = s.next(band.g);
            let g2 = s.next(g1);
            let c = band.b + s.holonomy(g1) * band.eps;
            band.visits.push(Visit {
                entry: band.g,
                a: band.a,
                b: band.b,
                c,
            });
            let mut exits: Vec<(usize, Holonomy, Holonomy, f64, f64)> = Vec::new();
            if c.y > band.y0 + htol && c.y < band.y1 - htol {
                exits.push((g1, band.b, c, band.y0, c.y));
                exits.push((g2, c, band.a, c.y, band.y1));
            } else if c.y >= band.y1 - htol {
                exits.push((g1, band.b, c, band.y0, band.y1));
            } else {
                exits.push((g2, c, band.a, band.y0, band.y1));
            }
            for (f, x, y, lo, hi) in exits {
                let fp = s.partner(f);
                let eps = band.eps * s.sign(f) as f64;
                // entering through fp from y (top) to x (bottom)
                let (na, nb) = (y, x);
                let edge_x = |yy: f64| na.x + (yy - na.y) / (nb.y - na.y) * (nb.x - na.x);
                let d_lo = edge_x(lo) - start_x(lo);
                let d_hi = edge_x(hi) - start_x(hi);
                if d_lo.min(d_hi) > bound {
                    continue;
                }
                let next = Band {
                    g: fp,
                    eps,
                    a: na,
                    b: nb,
                    y0: lo,
                    y1: hi,
                    visits: band.visits.clone(),
                };
                if fp == h && eps == eps0 && (na.y - a0.y).abs() <= htol {
                    let w = na.x - a0.x;
                    if w <= bound && hi - lo > htol {
                        let key = band_key(s, &next);
                        if keys.insert(key) {
                            let mut bottom = Vec::new();
                            let mut top = Vec::new();
                            for vis in &next.visits {
                                for p in [vis.a, vis.b, vis.c] {
                                    if (p.y - lo).abs() <= htol {
                                        bottom.push(p.x - start_x(lo));
                                    }
                                    if (p.y - hi).abs() <= htol {
                                        top.push(p.x - start_x(hi));
                                    }
                                }
                            }
                            out.push((w, hi - lo, bottom, top));
                        }
                    }
                    continue;
                }
                stack.push(next);
            }
        }
    }
    out
}

/// Canonical identity of a band: the smallest (edge, position) crossing.
fn band_key(s: &FlatSurface, band: &Band) -> (usize, i64) {
    let ym = 0.5 * (band.y0 + band.y1);
    let mut best = (usize::MAX, i64::MAX);
    for vis in &band.visits {
        let u = (ym - vis.a.y) / (vis.b.y - vis.a.y);
        let canon = s.canonical(vis.entry);
        let param = if canon == vis.entry { u } else { 1.0 - u };
        let k = (canon, (param * 1e7).round() as i64);
        if k < best {
            best = k;
        }
    }
    best
}
