//! Delaunay triangulations by edge flips, the short-saddle-connection check,
//! period coordinates and the Euclidean distance in period coordinates.

use serde::Serialize;
use thiserror::Error;

use crate::homology::{odd_frame, HomologyClass, HomologyError, HomologyFrame};
use crate::surface::{build_surface, FlatSurface, Gluing, Holonomy, Kind, SurfaceError};

pub const INCIRCLE_TOL: f64 = 1e-10;
pub const MAX_FLIPS: usize = 1_000_000;
/// Slack on the length threshold of the short-connection check.
pub const LEMMA_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum DelaunayError {
    #[error("no Delaunay triangulation after {flips} flips (last circumradius sum {last:e})")]
    FlipBudget { flips: usize, last: f64 },
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(
        "surfaces have different triangulations; compare through intermediate points sharing one"
    )]
    Incomparable,
}

/// Unfolded quadrilateral around edge `h`: `p[0] -> p[1]` is `h`, `p[2]` is
/// the apex of the triangle of `h`, `p[3]` the apex across.
struct Quad {
    p: [Holonomy; 4],
}

fn quad(s: &FlatSurface, h: usize) -> Option<Quad> {
    let hp = s.partner(h);
    if s.triangle_of(hp) == s.triangle_of(h) {
        return None;
    }
    let sigma = s.sign(h) as f64;
    let p1 = s.holonomy(h);
    let p2 = p1 + s.holonomy(s.next(h));
    let p3 = s.holonomy(s.next(hp)) * sigma;
    Some(Quad {
        p: [Holonomy::ZERO, p1, p2, p3],
    })
}

impl Quad {
    /// Normalized incircle determinant: positive when the far apex lies inside
    /// the circumcircle of the near triangle.
    fn incircle(&self) -> f64 {
        let d = self.p[3];
        let rows: Vec<[f64; 3]> = self.p[..3]
            .iter()
            .map(|&q| {
                let r = q - d;
                [r.x, r.y, r.norm2()]
            })
            .collect();
        let det = rows[0][0] * (rows[1][1] * rows[2][2] - rows[1][2] * rows[2][1])
            - rows[0][1] * (rows[1][0] * rows[2][2] - rows[1][2] * rows[2][0])
            + rows[0][2] * (rows[1][0] * rows[2][1] - rows[1][1] * rows[2][0]);
        let scale = rows.iter().map(|r| r[2]).fold(0.0, f64::max);
        det / (scale * scale)
    }

    fn alternative(&self) -> Holonomy {
        self.p[2] - self.p[3]
    }

    fn convex(&self) -> bool {
        let [p0, p1, p2, p3] = self.p;
        let eps = 1e-14 * (p2 - p3).norm2().max((p1 - p0).norm2());
        (p3 - p0).cross(p2 - p3) > eps && (p1 - p3).cross(p2 - p1) > eps
    }
}

fn diag_key(v: Holonomy) -> (f64, f64) {
    (v.x.abs(), v.y.abs())
}

/// Normalized incircle value of the edge through `h` (`None` when the edge
/// bounds the same triangle on both sides).
pub fn incircle_value(s: &FlatSurface, h: usize) -> Option<f64> {
    quad(s, h).map(|q| q.incircle())
}

fn wants_flip(s: &FlatSurface, h: usize, tol: f64) -> bool {
    let Some(q) = quad(s, h) else {
        return false;
    };
    let v = q.incircle();
    if v > tol {
        return q.convex();
    }
    if v >= -tol {
        let (cur, alt) = (diag_key(s.holonomy(h)), diag_key(q.alternative()));
        return (alt.0 < cur.0 || (alt.0 == cur.0 && alt.1 < cur.1)) && q.convex();
    }
    false
}

/// Replace the edge through `h` by the other diagonal of its quadrilateral.
/// Half-edge ids are kept: `h` and its partner become the new diagonal.
pub fn flip(s: &FlatSurface, h: usize) -> Result<FlatSurface, SurfaceError> {
    let n = s.num_half_edges();
    let hp = s.partner(h);
    let (a, b) = (s.next(h), s.prev(h));
    let (c, d) = (s.next(hp), s.prev(hp));
    let (t, tp) = (s.triangle_of(h), s.triangle_of(hp));
    let mut hol = s.holonomies().to_vec();
    let mut sign: Vec<i8> = (0..n).map(|x| s.sign(x)).collect();
    if s.sign(h) == -1 {
        let far = [hp, c, d];
        for x in far {
            hol[x] = -hol[x];
        }
        for x in [c, d] {
            let p = s.partner(x);
            if !far.contains(&p) {
                sign[x] = -sign[x];
                sign[p] = -sign[p];
            }
        }
        sign[h] = 1;
        sign[hp] = 1;
    }
    hol[h] = -hol[b] - hol[c];
    hol[hp] = -hol[h];
    let mut tris = s.triangles().to_vec();
    tris[t] = [c, h, b];
    tris[tp] = [d, a, hp];
    let gl: Vec<Gluing> = (0..n)
        .filter(|&x| x < s.partner(x))
        .map(|x| Gluing::new(x, s.partner(x), sign[x]))
        .collect();
    build_surface(tris, &gl, hol, s.kind())
}

/// Σ R² over triangles, R the circumradius.
pub fn circumradius_sum(s: &FlatSurface) -> f64 {
    s.triangles()
        .iter()
        .enumerate()
        .map(|(t, tri)| {
            let area = s.triangle_area(t);
            let prod: f64 = tri.iter().map(|&h| s.holonomy(h).norm2()).product();
            prod / (16.0 * area * area)
        })
        .sum()
}

#[derive(Clone, Debug)]
pub struct FlipLog {
    pub surface: FlatSurface,
    pub flips: usize,
    /// Circumradius sum before the first flip and after each flip.
    pub trace: Vec<f64>,
}

pub fn delaunayize_with(s: &FlatSurface, tol: f64) -> Result<FlipLog, DelaunayError> {
    let mut cur = s.clone();
    let mut trace = vec![circumradius_sum(&cur)];
    let mut flips = 0;
    loop {
        let Some(h) = cur.edges().find(|&h| wants_flip(&cur, h, tol)) else {
            return Ok(FlipLog {
                surface: cur,
                flips,
                trace,
            });
        };
        if flips == MAX_FLIPS {
            return Err(DelaunayError::FlipBudget {
                flips,
                last: *trace.last().unwrap(),
            });
        }
        cur = flip(&cur, h)?;
        flips += 1;
        trace.push(circumradius_sum(&cur));
    }
}

pub fn delaunayize(s: &FlatSurface) -> Result<FlatSurface, DelaunayError> {
    Ok(delaunayize_with(s, INCIRCLE_TOL)?.surface)
}

pub fn is_delaunay(s: &FlatSurface) -> bool {
    s.edges()
        .all(|h| incircle_value(s, h).is_none_or(|v| v <= INCIRCLE_TOL))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShortConnection {
    pub length: f64,
    pub is_edge: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaReport {
    pub systole: f64,
    pub threshold: f64,
    pub connections: Vec<ShortConnection>,
    pub pass: bool,
}

/// Every saddle connection shorter than `√2·ℓ` must be an edge.
pub fn check_delaunay_lemma(s: &FlatSurface) -> LemmaReport {
    let systole = s.systole();
    let threshold = std::f64::consts::SQRT_2 * systole;
    let connections: Vec<ShortConnection> = s
        .saddle_connections(threshold + LEMMA_TOL)
        .into_iter()
        .map(|c| ShortConnection {
            length: c.length,
            is_edge: c.edge.is_some(),
        })
        .collect();
    let pass = connections
        .iter()
        .all(|c| c.is_edge || c.length >= threshold - LEMMA_TOL);
    LemmaReport {
        systole,
        threshold,
        connections,
        pass,
    }
}

/// Periods of a basis of (odd) homology built from edges of the triangulation.
#[derive(Clone, Debug)]
pub struct PeriodVector {
    pub basis: Vec<HomologyClass>,
    pub periods: Vec<Holonomy>,
}

impl PeriodVector {
    pub fn len(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }

    /// Periods in the basis `b_i' = Σ_j u[i][j] b_j`.
    pub fn change_basis(&self, u: &[Vec<i64>]) -> PeriodVector {
        let basis = u
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&self.basis)
                    .fold(self.basis[0].scale(0), |acc, (&k, b)| acc.add(&b.scale(k)))
            })
            .collect();
        let periods = u
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&self.periods)
                    .fold(Holonomy::ZERO, |acc, (&k, &p)| acc + p * k as f64)
            })
            .collect();
        PeriodVector { basis, periods }
    }

    pub fn distance(&self, other: &PeriodVector) -> f64 {
        self.periods
            .iter()
            .zip(&other.periods)
            .map(|(&a, &b)| (a - b).norm2())
            .sum::<f64>()
            .sqrt()
    }
}

/// Abelian surfaces: tree–cotree basis of `H_1`. Quadratic surfaces: a basis
/// of the odd part of `H_1` of the orientation double cover.
pub fn period_coordinates(s: &FlatSurface) -> Result<PeriodVector, DelaunayError> {
    match s.kind() {
        Kind::Abelian => {
            let frame = HomologyFrame::new(s);
            let periods = frame.basis.iter().map(|b| b.period(s)).collect();
            Ok(PeriodVector {
                basis: frame.basis,
                periods,
            })
        }
        Kind::Quadratic => {
            let odd = odd_frame(s)?;
            let periods = odd.basis.iter().map(|b| b.period(&odd.cover)).collect();
            Ok(PeriodVector {
                basis: odd.basis,
                periods,
            })
        }
    }
}

/// Norm of the difference of period vectors in the basis shared by two
/// surfaces with the same triangulation.
pub fn euclidean_distance(s1: &FlatSurface, s2: &FlatSurface) -> Result<f64, DelaunayError> {
    if !s1.same_combinatorics(s2) {
        return Err(DelaunayError::Incomparable);
    }
    Ok(period_coordinates(s1)?.distance(&period_coordinates(s2)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::shapes::unit_torus;

    #[test]
    fn torus_is_cocircular() {
        let t = unit_torus();
        assert!(is_delaunay(&t));
        assert_eq!(delaunayize_with(&t, INCIRCLE_TOL).unwrap().flips, 0);
    }

    #[test]
    fn flip_keeps_area() {
        let t = unit_torus()
            .rotate(-std::f64::consts::FRAC_PI_4)
            .geodesic_flow(1.0);
        let f = flip(&t, 2).unwrap();
        assert!((f.area() - t.area()).abs() < 1e-12);
        assert_eq!(f.genus(), 1);
    }
}
