//! Orientation double cover of a half-translation surface.

use super::{build_surface, FlatSurface, Gluing, Holonomy, Kind};

#[derive(Clone, Debug)]
pub enum DoubleCover {
    /// Half-edge `(h, k)` of the base has id `h + k * n`; sheet 1 carries
    /// negated holonomies. `involution[h]` is the deck transformation.
    Connected {
        surface: FlatSurface,
        involution: Vec<usize>,
    },
    /// The differential is already a square: two copies of the abelian surface,
    /// the second with negated holonomies. Half-edge ids match the base.
    Disconnected { copies: [FlatSurface; 2] },
}

impl DoubleCover {
    pub fn is_connected(&self) -> bool {
        matches!(self, DoubleCover::Connected { .. })
    }
}

pub(super) fn double_cover(s: &FlatSurface) -> DoubleCover {
    let n = s.num_half_edges();
    let nt = s.num_triangles();
    // sheet[t] for the component containing (triangle 0, sheet 0)
    let mut sheet = vec![None::<usize>; nt];
    sheet[0] = Some(0);
    let mut stack = vec![0usize];
    let mut connected = false;
    while let Some(t) = stack.pop() {
        let k = sheet[t].unwrap();
        for &h in &s.triangles()[t] {
            let p = s.partner(h);
            let u = s.triangle_of(p);
            let ku = if s.sign(h) == 1 { k } else { 1 - k };
            match sheet[u] {
                None => {
                    sheet[u] = Some(ku);
                    stack.push(u);
                }
                Some(x) if x != ku => connected = true,
                _ => {}
            }
        }
    }
    if connected {
        let mut tris = Vec::with_capacity(2 * nt);
        let mut hol = vec![Holonomy::ZERO; 2 * n];
        for k in 0..2 {
            for tri in s.triangles() {
                tris.push(tri.map(|h| h + k * n));
            }
            for h in 0..n {
                hol[h + k * n] = if k == 0 {
                    s.holonomy(h)
                } else {
                    -s.holonomy(h)
                };
            }
        }
        let mut gl = Vec::with_capacity(n);
        for h in 0..n {
            let p = s.partner(h);
            if h > p {
                continue;
            }
            for k in 0..2 {
                let kp = if s.sign(h) == 1 { k } else { 1 - k };
                gl.push(Gluing::new(h + k * n, p + kp * n, 1));
            }
        }
        let surface = build_surface(tris, &gl, hol, Kind::Abelian)
            .expect("orientation cover of a valid surface is valid");
        let involution = (0..2 * n)
            .map(|i| if i < n { i + n } else { i - n })
            .collect();
        DoubleCover::Connected {
            surface,
            involution,
        }
    } else {
        let mut hol = vec![Holonomy::ZERO; n];
        for (t, tri) in s.triangles().iter().enumerate() {
            let f = if sheet[t] == Some(0) { 1.0 } else { -1.0 };
            for &h in tri {
                hol[h] = s.holonomy(h) * f;
            }
        }
        let gl: Vec<Gluing> = s
            .gluings()
            .into_iter()
            .map(|g| Gluing::new(g.a, g.b, 1))
            .collect();
        let tris = s.triangles().to_vec();
        let a = build_surface(tris.clone(), &gl, hol.clone(), Kind::Abelian)
            .expect("square root of a square is a valid abelian surface");
        let neg: Vec<Holonomy> = hol.iter().map(|&v| -v).collect();
        let b = build_surface(tris, &gl, neg, Kind::Abelian).expect("negated copy is valid");
        DoubleCover::Disconnected { copies: [a, b] }
    }
}
