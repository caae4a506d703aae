//! Standard surfaces: square-tiled surfaces and glued polygons.

use super::{build_surface, FlatSurface, Gluing, Holonomy, Kind, SurfaceError};

/// Half-edge offsets inside square `i` (ids `6i + offset`).
pub const BOTTOM: usize = 0;
pub const RIGHT: usize = 1;
pub const DIAG_BACK: usize = 2;
pub const DIAG: usize = 3;
pub const TOP: usize = 4;
pub const LEFT: usize = 5;

fn square_triangles(n: usize) -> (Vec<[usize; 3]>, Vec<Holonomy>) {
    let mut tris = Vec::with_capacity(2 * n);
    let mut hol = Vec::with_capacity(6 * n);
    for i in 0..n {
        let b = 6 * i;
        tris.push([b + BOTTOM, b + RIGHT, b + DIAG_BACK]);
        tris.push([b + DIAG, b + TOP, b + LEFT]);
        hol.extend_from_slice(&[
            Holonomy::new(1.0, 0.0),
            Holonomy::new(0.0, 1.0),
            Holonomy::new(-1.0, -1.0),
            Holonomy::new(1.0, 1.0),
            Holonomy::new(-1.0, 0.0),
            Holonomy::new(0.0, -1.0),
        ]);
    }
    (tris, hol)
}

fn check_perm(p: &[usize], n: usize) -> Result<(), SurfaceError> {
    let mut seen = vec![false; n];
    for &x in p {
        if x >= n || seen[x] {
            return Err(SurfaceError::Malformed(
                "square data is not a permutation".into(),
            ));
        }
        seen[x] = true;
    }
    Ok(())
}

/// Origami: square `i` has square `r[i]` on its right and `u[i]` above it.
pub fn square_tiled(r: &[usize], u: &[usize]) -> Result<FlatSurface, SurfaceError> {
    let n = r.len();
    if n == 0 || u.len() != n {
        return Err(SurfaceError::Malformed(
            "r and u must be nonempty and of equal length".into(),
        ));
    }
    check_perm(r, n)?;
    check_perm(u, n)?;
    let (tris, hol) = square_triangles(n);
    let mut gl = Vec::with_capacity(3 * n);
    for i in 0..n {
        gl.push(Gluing::new(6 * i + DIAG_BACK, 6 * i + DIAG, 1));
        gl.push(Gluing::new(6 * i + TOP, 6 * u[i] + BOTTOM, 1));
        gl.push(Gluing::new(6 * i + RIGHT, 6 * r[i] + LEFT, 1));
    }
    build_surface(tris, &gl, hol, Kind::Abelian)
}

/// Square torus with one marked point.
pub fn unit_torus() -> FlatSurface {
    square_tiled(&[0], &[0]).expect("torus")
}

/// Three squares in an L: squares 0 and 1 side by side, square 2 on top of 0.
pub fn l_origami() -> FlatSurface {
    square_tiled(&[1, 0, 2], &[2, 1, 0]).expect("L-shaped origami")
}

/// Which side of a square a side id refers to. Horizontal ids: `2i` bottom,
/// `2i+1` top. Vertical ids: `2i` left, `2i+1` right.
fn horizontal_half_edge(id: usize) -> (usize, bool) {
    let i = id / 2;
    if id.is_multiple_of(2) {
        (6 * i + BOTTOM, false)
    } else {
        (6 * i + TOP, true)
    }
}

fn vertical_half_edge(id: usize) -> (usize, bool) {
    let i = id / 2;
    if id.is_multiple_of(2) {
        (6 * i + LEFT, false)
    } else {
        (6 * i + RIGHT, true)
    }
}

/// Square-tiled half-translation surface. `horizontal` pairs up the `2n`
/// bottom/top sides and `vertical` the `2n` left/right sides (ids as in
/// [`horizontal_half_edge`]); pairing two sides of the same type glues by a
/// half-turn.
pub fn pillowcase_tiled(
    n: usize,
    horizontal: &[(usize, usize)],
    vertical: &[(usize, usize)],
) -> Result<FlatSurface, SurfaceError> {
    if horizontal.len() != n || vertical.len() != n {
        return Err(SurfaceError::Malformed(
            "need n horizontal and n vertical pairs".into(),
        ));
    }
    let (tris, hol) = square_triangles(n);
    let mut gl = Vec::with_capacity(3 * n);
    for i in 0..n {
        gl.push(Gluing::new(6 * i + DIAG_BACK, 6 * i + DIAG, 1));
    }
    for (pairs, side) in [
        (
            horizontal,
            horizontal_half_edge as fn(usize) -> (usize, bool),
        ),
        (vertical, vertical_half_edge),
    ] {
        for &(a, b) in pairs {
            if a >= 2 * n || b >= 2 * n {
                return Err(SurfaceError::Malformed(format!(
                    "side id out of range in ({a}, {b})"
                )));
            }
            let (ha, ta) = side(a);
            let (hb, tb) = side(b);
            gl.push(Gluing::new(ha, hb, if ta != tb { 1 } else { -1 }));
        }
    }
    build_surface(tris, &gl, hol, Kind::Quadratic)
}

/// Polygon with the given side vectors (counterclockwise, summing to zero),
/// sides `a`, `b` of each pair glued with the given sign. Triangulated by ear
/// clipping; side `i` becomes half-edge `i`.
pub fn polygon_surface(
    sides: &[Holonomy],
    pairs: &[(usize, usize, i8)],
    kind: Kind,
) -> Result<FlatSurface, SurfaceError> {
    let n = sides.len();
    if n < 3 || 2 * pairs.len() != n {
        return Err(SurfaceError::Malformed(
            "polygon needs an even number ≥ 4 of paired sides".into(),
        ));
    }
    let mut pts = Vec::with_capacity(n);
    let mut p = Holonomy::ZERO;
    for &w in sides {
        pts.push(p);
        p += w;
    }
    let scale = sides.iter().map(|w| w.norm()).fold(0.0, f64::max);
    if p.norm() > 1e-9 * scale {
        return Err(SurfaceError::Malformed("polygon sides do not close".into()));
    }
    let mut hol: Vec<Holonomy> = sides.to_vec();
    let mut gl: Vec<Gluing> = pairs
        .iter()
        .map(|&(a, b, s)| Gluing::new(a, b, s))
        .collect();
    let mut tris = Vec::with_capacity(n - 2);
    // ring[k] is a polygon vertex; seg[k] is the half-edge from ring[k] to ring[k+1]
    let mut ring: Vec<usize> = (0..n).collect();
    let mut seg: Vec<usize> = (0..n).collect();
    while ring.len() > 3 {
        let m = ring.len();
        let ear = (0..m).find(|&k| {
            let (a, b, c) = (
                pts[ring[(k + m - 1) % m]],
                pts[ring[k]],
                pts[ring[(k + 1) % m]],
            );
            if (b - a).cross(c - b) <= 1e-12 * scale * scale {
                return false;
            }
            (0..m).all(|j| {
                if j == k || j == (k + m - 1) % m || j == (k + 1) % m {
                    return true;
                }
                let q = pts[ring[j]];
                !((b - a).cross(q - a) >= 0.0
                    && (c - b).cross(q - b) >= 0.0
                    && (a - c).cross(q - c) >= 0.0)
            })
        });
        let Some(k) = ear else {
            return Err(SurfaceError::Malformed("polygon is not simple".into()));
        };
        let kp = (k + m - 1) % m;
        let (a, c) = (pts[ring[kp]], pts[ring[(k + 1) % m]]);
        let d = hol.len();
        hol.push(a - c);
        hol.push(c - a);
        gl.push(Gluing::new(d, d + 1, 1));
        tris.push([seg[kp], seg[k], d]);
        seg[kp] = d + 1;
        ring.remove(k);
        seg.remove(k);
    }
    tris.push([seg[0], seg[1], seg[2]]);
    build_surface(tris, &gl, hol, kind)
}

/// Centrally symmetric `2n`-gon with sides `w_1..w_n, -w_1..-w_n`, opposite
/// sides glued by translation.
pub fn symmetric_polygon(half_sides: &[Holonomy]) -> Result<FlatSurface, SurfaceError> {
    let n = half_sides.len();
    let mut sides = half_sides.to_vec();
    sides.extend(half_sides.iter().map(|&w| -w));
    let pairs: Vec<(usize, usize, i8)> = (0..n).map(|i| (i, i + n, 1)).collect();
    polygon_surface(&sides, &pairs, Kind::Abelian)
}
