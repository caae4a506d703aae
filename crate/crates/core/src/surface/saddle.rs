//! Saddle connections by unfolding triangle chains inside visibility wedges.

use std::collections::BTreeMap;

use super::{FlatSurface, Holonomy, LENGTH_TOL};

/// Relative tolerance for "strictly inside the wedge".
const WEDGE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct SaddleConnection {
    pub start: usize,
    pub end: usize,
    /// Holonomy in the frame of the starting triangle.
    pub holonomy: Holonomy,
    pub length: f64,
    /// Outgoing half-edge whose corner contains the initial direction.
    pub start_half_edge: usize,
    /// `Some(h)` (canonical half-edge) when the connection is an edge of the triangulation.
    pub edge: Option<usize>,
    /// Half-edges crossed in order, each from its own triangle into its partner's.
    pub crossings: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Edge(usize),
    Path(Vec<usize>),
}

struct Node {
    parent: usize,
    crossed: usize,
}

struct Window {
    node: usize,
    h: usize,
    p: Holonomy,
    q: Holonomy,
    lo: Holonomy,
    hi: Holonomy,
    eps: f64,
}

fn strictly_inside(lo: Holonomy, hi: Holonomy, c: Holonomy) -> bool {
    let nc = c.norm();
    lo.cross(c) > WEDGE_TOL * lo.norm() * nc && c.cross(hi) > WEDGE_TOL * nc * hi.norm()
}

/// Distance from the origin to the part of segment `pq` lying in the wedge.
fn clipped_distance(w: &Window) -> Option<f64> {
    let d = w.q - w.p;
    let mut s0 = 0.0f64;
    let mut s1 = 1.0f64;
    for (c0, c1) in [
        (w.lo.cross(w.p), w.lo.cross(d)),
        (w.p.cross(w.hi), d.cross(w.hi)),
    ] {
        // c0 + s*c1 >= 0
        if c1.abs() < 1e-300 {
            if c0 < 0.0 {
                return None;
            }
        } else if c1 > 0.0 {
            s0 = s0.max(-c0 / c1);
        } else {
            s1 = s1.min(-c0 / c1);
        }
    }
    if s0 > s1 + 1e-12 {
        return None;
    }
    let a = w.p + d * s0.clamp(0.0, 1.0);
    let b = w.p + d * s1.clamp(0.0, 1.0);
    let ab = b - a;
    let len2 = ab.norm2();
    let s = if len2 > 0.0 {
        (-a.dot(ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    Some((a + ab * s).norm())
}

pub(super) fn enumerate(s: &FlatSurface, l: f64) -> Vec<SaddleConnection> {
    let mut found: BTreeMap<Key, SaddleConnection> = BTreeMap::new();
    if !(l > 0.0) {
        return Vec::new();
    }
    let bound = l + LENGTH_TOL;
    let mut nodes: Vec<Node> = Vec::new();
    for h0 in 0..s.num_half_edges() {
        let a = s.holonomy(h0);
        let h1 = s.next(h0);
        let b = -s.holonomy(s.prev(h0));
        if a.norm() <= bound {
            let key = Key::Edge(s.canonical(h0));
            found.entry(key).or_insert_with(|| SaddleConnection {
                start: s.start_vertex(h0),
                end: s.end_vertex(h0),
                holonomy: a,
                length: a.norm(),
                start_half_edge: h0,
                edge: Some(s.canonical(h0)),
                crossings: Vec::new(),
            });
        }
        nodes.clear();
        nodes.push(Node {
            parent: usize::MAX,
            crossed: usize::MAX,
        });
        let mut stack = vec![Window {
            node: 0,
            h: h1,
            p: a,
            q: b,
            lo: a,
            hi: b,
            eps: 1.0,
        }];
        while let Some(w) = stack.pop() {
            match clipped_distance(&w) {
                Some(d) if d <= bound => {}
                _ => continue,
            }
            let hp = s.partner(w.h);
            let eps = w.eps * s.sign(w.h) as f64;
            let f1 = s.next(hp);
            let f2 = s.next(f1);
            let c = w.p + s.holonomy(f1) * eps;
            nodes.push(Node {
                parent: w.node,
                crossed: w.h,
            });
            let node = nodes.len() - 1;
            if strictly_inside(w.lo, w.hi, c) {
                let len = c.norm();
                if len <= bound {
                    let crossings = path(&nodes, node);
                    let rev: Vec<usize> = crossings.iter().rev().map(|&h| s.partner(h)).collect();
                    let key = Key::Path(if rev < crossings {
                        rev
                    } else {
                        crossings.clone()
                    });
                    found.entry(key).or_insert_with(|| SaddleConnection {
                        start: s.start_vertex(h0),
                        end: s.start_vertex(f2),
                        holonomy: c,
                        length: len,
                        start_half_edge: h0,
                        edge: None,
                        crossings,
                    });
                }
                stack.push(Window {
                    node,
                    h: f1,
                    p: w.p,
                    q: c,
                    lo: w.lo,
                    hi: c,
                    eps,
                });
                stack.push(Window {
                    node,
                    h: f2,
                    p: c,
                    q: w.q,
                    lo: c,
                    hi: w.hi,
                    eps,
                });
            } else if w.lo.cross(c) <= WEDGE_TOL * w.lo.norm() * c.norm() {
                // c is on or past the low ray: the whole wedge leaves through f2
                stack.push(Window {
                    node,
                    h: f2,
                    p: c,
                    q: w.q,
                    lo: w.lo,
                    hi: w.hi,
                    eps,
                });
            } else {
                stack.push(Window {
                    node,
                    h: f1,
                    p: w.p,
                    q: c,
                    lo: w.lo,
                    hi: w.hi,
                    eps,
                });
            }
        }
    }
    let mut out: Vec<SaddleConnection> = found.into_values().collect();
    out.sort_by(|a, b| {
        a.length
            .total_cmp(&b.length)
            .then(a.holonomy.angle().total_cmp(&b.holonomy.angle()))
    });
    out
}

fn path(nodes: &[Node], mut i: usize) -> Vec<usize> {
    let mut out = Vec::new();
    while nodes[i].parent != usize::MAX {
        out.push(nodes[i].crossed);
        i = nodes[i].parent;
    }
    out.reverse();
    out
}

pub(super) fn systole(s: &FlatSurface) -> f64 {
    let l = s.shortest_edge();
    enumerate(s, l)
        .iter()
        .map(|c| c.length)
        .fold(f64::INFINITY, f64::min)
}
