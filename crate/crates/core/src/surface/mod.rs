//! Triangulated flat surfaces.
//!
//! A surface is a list of triangles whose sides are half-edges. Each half-edge
//! carries a holonomy vector in the frame of its own triangle; the three
//! vectors of a triangle are listed counterclockwise and sum to zero. Two
//! glued half-edges `a`, `b` with sign `s` satisfy `v(b) = -s * v(a)`:
//! `s = +1` is a translation gluing, `s = -1` composes it with `v -> -v`.

mod cover;
mod cylinder;
pub mod io;
pub mod random;
mod saddle;
pub mod shapes;

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cover::DoubleCover;
pub use cylinder::CylinderRecord;
pub use saddle::SaddleConnection;

/// Relative tolerance used when validating closure and gluings.
pub const VALIDATION_TOL: f64 = 1e-9;
/// Absolute tolerance for the `<= L` decision in saddle-connection searches.
pub const LENGTH_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Holonomy {
    pub x: f64,
    pub y: f64,
}

impl Holonomy {
    pub const ZERO: Holonomy = Holonomy { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Holonomy { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm2(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn dot(self, o: Holonomy) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Holonomy) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn rotate(self, angle: f64) -> Holonomy {
        let (s, c) = angle.sin_cos();
        Holonomy::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// Angle in `[0, 2π)`.
    pub fn angle(self) -> f64 {
        let a = self.y.atan2(self.x);
        if a < 0.0 {
            a + std::f64::consts::TAU
        } else {
            a
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Holonomy {
    type Output = Holonomy;
    fn add(self, o: Holonomy) -> Holonomy {
        Holonomy::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Holonomy {
    fn add_assign(&mut self, o: Holonomy) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Holonomy {
    type Output = Holonomy;
    fn sub(self, o: Holonomy) -> Holonomy {
        Holonomy::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Holonomy {
    type Output = Holonomy;
    fn neg(self) -> Holonomy {
        Holonomy::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Holonomy {
    type Output = Holonomy;
    fn mul(self, k: f64) -> Holonomy {
        Holonomy::new(self.x * k, self.y * k)
    }
}

impl fmt::Display for Holonomy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Abelian,
    Quadratic,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Abelian => f.write_str("abelian"),
            Kind::Quadratic => f.write_str("quadratic"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gluing {
    pub a: usize,
    pub b: usize,
    pub sign: i8,
}

impl Gluing {
    pub fn new(a: usize, b: usize, sign: i8) -> Self {
        Gluing { a, b, sign }
    }
}

/// A vertex of the triangulation with its total angle in units of π.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConePoint {
    pub angle_pi: u32,
    /// Half-edges starting at this vertex, in counterclockwise order.
    pub outgoing: Vec<usize>,
}

impl ConePoint {
    /// Order of the zero: `k` with angle `(k+2)π` for quadratic surfaces,
    /// `m` with angle `2π(m+1)` for abelian ones.
    pub fn order(&self, kind: Kind) -> i64 {
        match kind {
            Kind::Quadratic => self.angle_pi as i64 - 2,
            Kind::Abelian => self.angle_pi as i64 / 2 - 1,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SurfaceError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("triangle {triangle} does not close (residual {residual:e})")]
    NotClosing { triangle: usize, residual: f64 },
    #[error("half-edge {0} is not glued exactly once")]
    UnmatchedGluing(usize),
    #[error("glued half-edges {a} and {b} have incompatible holonomy")]
    GluingMismatch { a: usize, b: usize },
    #[error("triangle {0} has non-positive area")]
    ZeroArea(usize),
    #[error("half-translation gluing on half-edge {0} of an abelian surface")]
    HalfTranslationOnAbelian(usize),
    #[error("vertex {vertex} has cone angle {angle_over_pi}π, not an admissible multiple of π")]
    ConeAngle { vertex: usize, angle_over_pi: f64 },
    #[error("Gauss-Bonnet violated: orders sum to {sum}, expected {expected}")]
    GaussBonnet { sum: i64, expected: i64 },
    #[error("triangles do not form a connected surface")]
    Disconnected,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlatSurface {
    kind: Kind,
    triangles: Vec<[usize; 3]>,
    hol: Vec<Holonomy>,
    partner: Vec<usize>,
    sign: Vec<i8>,
    slot: Vec<(usize, usize)>,
    vertex: Vec<usize>,
    cones: Vec<ConePoint>,
    genus: usize,
}

/// Validate and assemble a surface. `holonomies[h]` is the vector of half-edge `h`.
pub fn build_surface(
    triangles: Vec<[usize; 3]>,
    gluings: &[Gluing],
    holonomies: Vec<Holonomy>,
    kind: Kind,
) -> Result<FlatSurface, SurfaceError> {
    let n = triangles.len() * 3;
    if triangles.is_empty() {
        return Err(SurfaceError::Malformed("no triangles".into()));
    }
    if holonomies.len() != n {
        return Err(SurfaceError::Malformed(format!(
            "expected {} holonomies, got {}",
            n,
            holonomies.len()
        )));
    }
    let mut slot = vec![(usize::MAX, 0); n];
    for (t, tri) in triangles.iter().enumerate() {
        for (i, &h) in tri.iter().enumerate() {
            if h >= n {
                return Err(SurfaceError::Malformed(format!(
                    "half-edge id {h} out of range"
                )));
            }
            if slot[h].0 != usize::MAX {
                return Err(SurfaceError::Malformed(format!("half-edge {h} used twice")));
            }
            slot[h] = (t, i);
        }
    }
    if let Some(h) = holonomies.iter().position(|v| !v.is_finite()) {
        return Err(SurfaceError::Malformed(format!(
            "half-edge {h} has non-finite holonomy"
        )));
    }
    let mut partner = vec![usize::MAX; n];
    let mut sign = vec![0i8; n];
    for g in gluings {
        if g.a >= n || g.b >= n || g.a == g.b {
            return Err(SurfaceError::Malformed(format!(
                "bad gluing ({}, {})",
                g.a, g.b
            )));
        }
        if g.sign != 1 && g.sign != -1 {
            return Err(SurfaceError::Malformed(format!(
                "gluing sign {} not ±1",
                g.sign
            )));
        }
        for h in [g.a, g.b] {
            if partner[h] != usize::MAX {
                return Err(SurfaceError::UnmatchedGluing(h));
            }
        }
        partner[g.a] = g.b;
        partner[g.b] = g.a;
        sign[g.a] = g.sign;
        sign[g.b] = g.sign;
    }
    if let Some(h) = partner.iter().position(|&p| p == usize::MAX) {
        return Err(SurfaceError::UnmatchedGluing(h));
    }
    let s = FlatSurface {
        kind,
        triangles,
        hol: holonomies,
        partner,
        sign,
        slot,
        vertex: Vec::new(),
        cones: Vec::new(),
        genus: 0,
    };
    s.check_geometry()?;
    s.finish()
}

impl FlatSurface {
    fn check_geometry(&self) -> Result<(), SurfaceError> {
        for (t, tri) in self.triangles.iter().enumerate() {
            let [a, b, c] = tri.map(|h| self.hol[h]);
            let scale = a.norm().max(b.norm()).max(c.norm());
            let residual = (a + b + c).norm();
            if residual > VALIDATION_TOL * scale.max(1e-300) {
                return Err(SurfaceError::NotClosing {
                    triangle: t,
                    residual,
                });
            }
            if !(a.cross(b) > 1e-13 * a.norm() * b.norm()) {
                return Err(SurfaceError::ZeroArea(t));
            }
        }
        for h in 0..self.hol.len() {
            let p = self.partner[h];
            if h > p {
                continue;
            }
            if self.kind == Kind::Abelian && self.sign[h] != 1 {
                return Err(SurfaceError::HalfTranslationOnAbelian(h));
            }
            let expected = self.hol[h] * -(self.sign[h] as f64);
            let scale = self.hol[h].norm().max(self.hol[p].norm());
            if (expected - self.hol[p]).norm() > VALIDATION_TOL * scale {
                return Err(SurfaceError::GluingMismatch { a: h, b: p });
            }
        }
        Ok(())
    }

    /// Compute vertices, cone angles and genus; check connectivity and Gauss–Bonnet.
    fn finish(mut self) -> Result<FlatSurface, SurfaceError> {
        let n = self.hol.len();
        let nt = self.triangles.len();
        // connectivity
        let mut seen = vec![false; nt];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(t) = stack.pop() {
            for &h in &self.triangles[t] {
                let u = self.slot[self.partner[h]].0;
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        if seen.iter().any(|&b| !b) {
            return Err(SurfaceError::Disconnected);
        }
        // vertices: walk the counterclockwise rotation at each start point
        let mut vertex = vec![usize::MAX; n];
        let mut cones = Vec::new();
        for h0 in 0..n {
            if vertex[h0] != usize::MAX {
                continue;
            }
            let id = cones.len();
            let mut outgoing = Vec::new();
            let mut angle = 0.0;
            let mut h = h0;
            loop {
                vertex[h] = id;
                outgoing.push(h);
                angle += self.corner_angle(h);
                h = self.next_ccw(h);
                if h == h0 {
                    break;
                }
                if vertex[h] != usize::MAX {
                    return Err(SurfaceError::Malformed(
                        "inconsistent vertex rotation".into(),
                    ));
                }
            }
            let over_pi = angle / std::f64::consts::PI;
            let k = over_pi.round();
            let admissible = match self.kind {
                Kind::Quadratic => k >= 1.0,
                Kind::Abelian => k >= 2.0 && (k as i64) % 2 == 0,
            };
            if (over_pi - k).abs() > 1e-6 || !admissible {
                return Err(SurfaceError::ConeAngle {
                    vertex: id,
                    angle_over_pi: over_pi,
                });
            }
            cones.push(ConePoint {
                angle_pi: k as u32,
                outgoing,
            });
        }
        let v = cones.len() as i64;
        let e = (n / 2) as i64;
        let f = nt as i64;
        let chi = v - e + f;
        if chi > 2 || (2 - chi) % 2 != 0 {
            return Err(SurfaceError::Malformed(format!(
                "Euler characteristic {chi}"
            )));
        }
        let genus = (2 - chi) / 2;
        let sum: i64 = cones.iter().map(|c| c.order(self.kind)).sum();
        let expected = match self.kind {
            Kind::Quadratic => 4 * genus - 4,
            Kind::Abelian => 2 * genus - 2,
        };
        if sum != expected {
            return Err(SurfaceError::GaussBonnet { sum, expected });
        }
        self.vertex = vertex;
        self.cones = cones;
        self.genus = genus as usize;
        Ok(self)
    }

    fn corner_angle(&self, h: usize) -> f64 {
        let a = self.hol[h];
        let b = -self.hol[self.prev(h)];
        a.cross(b).atan2(a.dot(b))
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_half_edges(&self) -> usize {
        self.hol.len()
    }

    pub fn holonomy(&self, h: usize) -> Holonomy {
        self.hol[h]
    }

    pub fn holonomies(&self) -> &[Holonomy] {
        &self.hol
    }

    pub fn partner(&self, h: usize) -> usize {
        self.partner[h]
    }

    /// Gluing sign shared by `h` and its partner.
    pub fn sign(&self, h: usize) -> i8 {
        self.sign[h]
    }

    /// `(triangle, position)` of a half-edge.
    pub fn slot(&self, h: usize) -> (usize, usize) {
        self.slot[h]
    }

    pub fn triangle_of(&self, h: usize) -> usize {
        self.slot[h].0
    }

    pub fn next(&self, h: usize) -> usize {
        let (t, i) = self.slot[h];
        self.triangles[t][(i + 1) % 3]
    }

    pub fn prev(&self, h: usize) -> usize {
        let (t, i) = self.slot[h];
        self.triangles[t][(i + 2) % 3]
    }

    /// The next outgoing half-edge counterclockwise around the start of `h`.
    pub fn next_ccw(&self, h: usize) -> usize {
        self.partner[self.prev(h)]
    }

    pub fn start_vertex(&self, h: usize) -> usize {
        self.vertex[h]
    }

    pub fn end_vertex(&self, h: usize) -> usize {
        self.vertex[self.next(h)]
    }

    pub fn cone_points(&self) -> &[ConePoint] {
        &self.cones
    }

    pub fn num_vertices(&self) -> usize {
        self.cones.len()
    }

    /// Representative half-edge of the undirected edge through `h`.
    pub fn canonical(&self, h: usize) -> usize {
        h.min(self.partner[h])
    }

    /// One half-edge per undirected edge, in increasing id order.
    pub fn edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.hol.len()).filter(move |&h| h < self.partner[h])
    }

    pub fn gluings(&self) -> Vec<Gluing> {
        self.edges()
            .map(|h| Gluing::new(h, self.partner[h], self.sign[h]))
            .collect()
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, _] = self.triangles[t].map(|h| self.hol[h]);
        0.5 * a.cross(b)
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| self.triangle_area(t))
            .sum()
    }

    pub fn shortest_edge(&self) -> f64 {
        self.edges()
            .map(|h| self.hol[h].norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// True when both surfaces have identical triangles and gluings.
    pub fn same_combinatorics(&self, other: &FlatSurface) -> bool {
        self.kind == other.kind
            && self.triangles == other.triangles
            && self.partner == other.partner
            && self.sign == other.sign
    }

    /// Apply an orientation-preserving linear map to every holonomy.
    pub fn apply_linear(&self, m: [[f64; 2]; 2]) -> FlatSurface {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        assert!(det > 0.0, "linear map must preserve orientation");
        let mut out = self.clone();
        for v in out.hol.iter_mut() {
            *v = Holonomy::new(m[0][0] * v.x + m[0][1] * v.y, m[1][0] * v.x + m[1][1] * v.y);
        }
        out
    }

    /// Teichmüller geodesic flow: `(x, y) -> (e^t x, e^-t y)`.
    pub fn geodesic_flow(&self, t: f64) -> FlatSurface {
        let mut out = self.clone();
        let (a, b) = (t.exp(), (-t).exp());
        for v in out.hol.iter_mut() {
            v.x *= a;
            v.y *= b;
        }
        out
    }

    pub fn rotate(&self, angle: f64) -> FlatSurface {
        let mut out = self.clone();
        for v in out.hol.iter_mut() {
            *v = v.rotate(angle);
        }
        out
    }

    pub fn scale(&self, k: f64) -> FlatSurface {
        assert!(k > 0.0);
        let mut out = self.clone();
        for v in out.hol.iter_mut() {
            *v = *v * k;
        }
        out
    }

    /// Replace holonomies while keeping the combinatorics. Closure, gluing
    /// compatibility and positivity are re-checked; cone angles cannot change
    /// along a path of nondegenerate triangulations so they are carried over.
    pub fn with_holonomies(&self, hol: Vec<Holonomy>) -> Result<FlatSurface, SurfaceError> {
        if hol.len() != self.hol.len() {
            return Err(SurfaceError::Malformed("holonomy count changed".into()));
        }
        let mut out = self.clone();
        out.hol = hol;
        out.check_geometry()?;
        Ok(out)
    }

    /// Rebuild from scratch (full validation) with new triangles and gluings.
    pub fn rebuild(
        kind: Kind,
        triangles: Vec<[usize; 3]>,
        gluings: &[Gluing],
        hol: Vec<Holonomy>,
    ) -> Result<FlatSurface, SurfaceError> {
        build_surface(triangles, gluings, hol, kind)
    }

    /// Same surface regarded as a quadratic differential (squares of the 1-form).
    pub fn as_quadratic(&self) -> FlatSurface {
        if self.kind == Kind::Quadratic {
            return self.clone();
        }
        let mut out = self.clone();
        out.kind = Kind::Quadratic;
        out.finish_kind_change()
    }

    fn finish_kind_change(self) -> FlatSurface {
        let tris = self.triangles.clone();
        let gl = self.gluings();
        build_surface(tris, &gl, self.hol.clone(), self.kind)
            .expect("kind change of a valid surface is valid")
    }

    /// Enumerate saddle connections of length at most `l`.
    pub fn saddle_connections(&self, l: f64) -> Vec<SaddleConnection> {
        saddle::enumerate(self, l)
    }

    /// Length of the shortest saddle connection.
    pub fn systole(&self) -> f64 {
        saddle::systole(self)
    }

    pub fn cylinders(&self, l: f64) -> Vec<CylinderRecord> {
        cylinder::detect(self, l)
    }

    pub fn orientation_double_cover(&self) -> DoubleCover {
        cover::double_cover(self)
    }
}

/// Free-function forms of the surface operations.
pub fn area(s: &FlatSurface) -> f64 {
    s.area()
}

pub fn geodesic_flow(s: &FlatSurface, t: f64) -> FlatSurface {
    s.geodesic_flow(t)
}

pub fn enumerate_saddle_connections(s: &FlatSurface, l: f64) -> Vec<SaddleConnection> {
    s.saddle_connections(l)
}

pub fn systole(s: &FlatSurface) -> f64 {
    s.systole()
}

pub fn detect_cylinders(s: &FlatSurface, l: f64) -> Vec<CylinderRecord> {
    s.cylinders(l)
}

pub fn orientation_double_cover(s: &FlatSurface) -> DoubleCover {
    s.orientation_double_cover()
}
