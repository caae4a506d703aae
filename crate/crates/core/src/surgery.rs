//! Systole inflation along the unstable leaf: transverse multicurves crossing
//! the short Delaunay edges, their antisymmetrization on the orientation
//! cover, and the horizontal shear they induce.

use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use crate::delaunay::{delaunayize, euclidean_distance, DelaunayError};
use crate::surface::{DoubleCover, FlatSurface, Holonomy, Kind, SurfaceError};

/// Rotation applied when the triangulation has vertical edges.
pub const THETA: f64 = 1e-7;
/// Slack on the per-step growth inequality.
pub const GROWTH_TOL: f64 = 1e-9;
/// Grid step for the shear parameter.
pub const RHO_STEP: f64 = 1e-4;
pub const MAX_STEPS: usize = 100_000;

#[derive(Debug, Error, PartialEq)]
pub enum SurgeryError {
    #[error("shear degenerates triangle {triangle}; largest feasible t is {max_t:e}")]
    Degenerate { triangle: usize, max_t: f64 },
    #[error("antisymmetrized multicurve has zero algebraic intersection with every edge")]
    Cancelled,
    #[error("weights cover {got} half-edges, surface has {expected}")]
    Size { expected: usize, got: usize },
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Delaunay(#[from] DelaunayError),
}

#[derive(Clone, Debug)]
pub struct OrientedTriangulation {
    pub surface: FlatSurface,
    /// Angle by which the surface was rotated to decide orientations.
    pub theta: f64,
    /// `positive[h]`: `h` points to the right after rotating by `theta`.
    pub positive: Vec<bool>,
}

impl OrientedTriangulation {
    /// The positively oriented half of the edge through `h`.
    pub fn positive_half(&self, h: usize) -> usize {
        if self.positive[h] {
            h
        } else {
            self.surface.partner(h)
        }
    }
}

fn has_vertical(s: &FlatSurface, angle: f64) -> bool {
    s.edges().any(|h| {
        let v = s.holonomy(h).rotate(angle);
        v.x.abs() <= 1e-12 * v.norm()
    })
}

/// Orient every edge of a translation surface so that its horizontal
/// component is positive, rotating by a multiple of [`THETA`] when some edge
/// is vertical.
pub fn orient_edges(s: &FlatSurface) -> OrientedTriangulation {
    let mut k = 0;
    while has_vertical(s, k as f64 * THETA) {
        k += 1;
    }
    let theta = k as f64 * THETA;
    let positive = (0..s.num_half_edges())
        .map(|h| s.holonomy(h).rotate(theta).x > 0.0)
        .collect();
    OrientedTriangulation {
        surface: s.clone(),
        theta,
        positive,
    }
}

/// Directed graph on the components of the surface cut along `W`: an arc
/// from the component left of each `W` edge to the component on its right.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentGraph {
    /// Component of each triangle.
    pub component: Vec<usize>,
    pub count: usize,
    /// `(from, to, h)` with `h` the positive half of the crossed `W` edge.
    pub arcs: Vec<(usize, usize, usize)>,
}

pub fn component_graph(o: &OrientedTriangulation, w: &[usize]) -> ComponentGraph {
    let s = &o.surface;
    let in_w = w_mask(s, w);
    let nt = s.num_triangles();
    let mut component = vec![usize::MAX; nt];
    let mut count = 0;
    for start in 0..nt {
        if component[start] != usize::MAX {
            continue;
        }
        component[start] = count;
        let mut stack = vec![start];
        while let Some(t) = stack.pop() {
            for &h in &s.triangles()[t] {
                if in_w[h] {
                    continue;
                }
                let u = s.triangle_of(s.partner(h));
                if component[u] == usize::MAX {
                    component[u] = count;
                    stack.push(u);
                }
            }
        }
        count += 1;
    }
    let mut arcs: Vec<(usize, usize, usize)> = w
        .iter()
        .map(|&e| {
            let h = o.positive_half(e);
            let left = component[s.triangle_of(h)];
            let right = component[s.triangle_of(s.partner(h))];
            (left, right, h)
        })
        .collect();
    arcs.sort_unstable();
    arcs.dedup();
    ComponentGraph {
        component,
        count,
        arcs,
    }
}

fn w_mask(s: &FlatSurface, w: &[usize]) -> Vec<bool> {
    let mut in_w = vec![false; s.num_half_edges()];
    for &e in w {
        in_w[e] = true;
        in_w[s.partner(e)] = true;
    }
    in_w
}

/// Directed cycles covering every arc, each a list of arc indices. Cycles are
/// closed greedily: an uncovered arc `a → b` followed by a shortest directed
/// path `b → a`. `None` when some arc lies on no cycle.
pub fn cycle_cover(vertices: usize, arcs: &[(usize, usize)]) -> Option<Vec<Vec<usize>>> {
    let mut out_arcs = vec![Vec::new(); vertices];
    for (i, &(a, _)) in arcs.iter().enumerate() {
        out_arcs[a].push(i);
    }
    let mut covered = vec![false; arcs.len()];
    let mut cycles = Vec::new();
    for first in 0..arcs.len() {
        if covered[first] {
            continue;
        }
        let (a, b) = arcs[first];
        let mut via = vec![usize::MAX; vertices];
        let mut seen = vec![false; vertices];
        seen[b] = true;
        let mut queue = VecDeque::from([b]);
        while let Some(v) = queue.pop_front() {
            if v == a {
                break;
            }
            for &i in &out_arcs[v] {
                let u = arcs[i].1;
                if !seen[u] {
                    seen[u] = true;
                    via[u] = i;
                    queue.push_back(u);
                }
            }
        }
        if !seen[a] {
            return None;
        }
        let mut path = Vec::new();
        let mut v = a;
        while v != b {
            path.push(via[v]);
            v = arcs[via[v]].0;
        }
        path.reverse();
        let mut cycle = vec![first];
        cycle.extend(path);
        for &i in &cycle {
            covered[i] = true;
        }
        cycles.push(cycle);
    }
    Some(cycles)
}

/// A multicurve in general position with respect to the triangulation,
/// stored as closed sequences of exit half-edges.
#[derive(Clone, Debug, PartialEq)]
pub struct TransverseMulticurve {
    /// `exits[h]`: number of crossings of `h` from its left to its right.
    pub exits: Vec<u32>,
    pub cycles: Vec<Vec<usize>>,
}

impl TransverseMulticurve {
    pub fn from_cycles(s: &FlatSurface, cycles: Vec<Vec<usize>>) -> Self {
        let mut exits = vec![0u32; s.num_half_edges()];
        for c in &cycles {
            for &h in c {
                exits[h] += 1;
            }
        }
        TransverseMulticurve { exits, cycles }
    }

    /// Algebraic intersection with the edge through `h`, left-to-right positive.
    pub fn flux(&self, s: &FlatSurface, h: usize) -> i64 {
        self.exits[h] as i64 - self.exits[s.partner(h)] as i64
    }

    /// Number of crossings with the edge through `h`.
    pub fn crossings(&self, s: &FlatSurface, h: usize) -> u32 {
        self.exits[h] + self.exits[s.partner(h)]
    }

    pub fn max_crossings(&self, s: &FlatSurface) -> u32 {
        s.edges().map(|h| self.crossings(s, h)).max().unwrap_or(0)
    }

    /// Each cycle enters every triangle through one side and leaves through
    /// another.
    pub fn is_closed(&self, s: &FlatSurface) -> bool {
        self.cycles.iter().all(|c| {
            !c.is_empty()
                && (0..c.len()).all(|k| {
                    let enter = s.partner(c[k]);
                    let leave = c[(k + 1) % c.len()];
                    s.triangle_of(enter) == s.triangle_of(leave) && enter != leave
                })
        })
    }
}

/// Shortest dual path from triangle `from` to triangle `to` avoiding `W`,
/// as exit half-edges.
fn transit(s: &FlatSurface, in_w: &[bool], from: usize, to: usize) -> Vec<usize> {
    let nt = s.num_triangles();
    let mut via = vec![usize::MAX; nt];
    let mut seen = vec![false; nt];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(t) = queue.pop_front() {
        if t == to {
            break;
        }
        for &h in &s.triangles()[t] {
            if in_w[h] {
                continue;
            }
            let u = s.triangle_of(s.partner(h));
            if !seen[u] {
                seen[u] = true;
                via[u] = h;
                queue.push_back(u);
            }
        }
    }
    assert!(
        seen[to],
        "triangles {from} and {to} lie in different components"
    );
    let mut path = Vec::new();
    let mut t = to;
    while t != from {
        path.push(via[t]);
        t = s.triangle_of(via[t]);
    }
    path.reverse();
    path
}

/// Multicurve crossing every edge of `W` at least once, always from left to
/// right, realized from a cycle cover of the component graph.
///
/// # Panics
/// When some arc of the component graph lies on no directed cycle, which the
/// orientation argument rules out.
pub fn build_transverse_multicurve(o: &OrientedTriangulation, w: &[usize]) -> TransverseMulticurve {
    assert!(!w.is_empty(), "W must be nonempty");
    let s = &o.surface;
    let g = component_graph(o, w);
    let pairs: Vec<(usize, usize)> = g.arcs.iter().map(|&(a, b, _)| (a, b)).collect();
    let cover = cycle_cover(g.count, &pairs).expect("component graph is strongly connected");
    let in_w = w_mask(s, w);
    let cycles = cover
        .iter()
        .map(|cycle| {
            let hs: Vec<usize> = cycle.iter().map(|&i| g.arcs[i].2).collect();
            let mut exits = Vec::new();
            for k in 0..hs.len() {
                let h = hs[k];
                exits.push(h);
                let next = hs[(k + 1) % hs.len()];
                exits.extend(transit(
                    s,
                    &in_w,
                    s.triangle_of(s.partner(h)),
                    s.triangle_of(next),
                ));
            }
            exits
        })
        .collect();
    TransverseMulticurve::from_cycles(s, cycles)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyReport {
    /// (a) closed, transverse and away from the vertices.
    pub transverse: bool,
    /// (b) every `W` edge crossed.
    pub covers_w: bool,
    /// (c) crossings of `W` edges all left to right.
    pub left_to_right: bool,
    /// (d) largest number of crossings with one edge, and its cap.
    pub n: u32,
    pub cap: u32,
    pub pass: bool,
}

/// Cap on crossings per edge: each cycle is simple in the component graph and
/// each transit is simple in the dual graph.
pub fn crossing_cap(o: &OrientedTriangulation, w: &[usize]) -> u32 {
    let g = component_graph(o, w);
    (2 * g.arcs.len() * g.count.max(1)) as u32
}

pub fn check_properties(
    o: &OrientedTriangulation,
    w: &[usize],
    d: &TransverseMulticurve,
    cap: u32,
) -> PropertyReport {
    let s = &o.surface;
    let transverse = d.is_closed(s);
    let covers_w = w.iter().all(|&e| d.crossings(s, e) >= 1);
    let left_to_right = w.iter().all(|&e| {
        let h = o.positive_half(e);
        d.exits[s.partner(h)] == 0
    });
    let n = d.max_crossings(s);
    PropertyReport {
        transverse,
        covers_w,
        left_to_right,
        n,
        cap,
        pass: transverse && covers_w && left_to_right && n <= cap,
    }
}

/// `Δ − τ(Δ)` for a deck involution `tau` of the cover. The deck
/// transformation preserves orientation, so the image of a crossing of `h`
/// is the same-direction crossing of `τ(h)`; reversing it exits through the
/// partner.
pub fn antisymmetrize(
    s: &FlatSurface,
    d: &TransverseMulticurve,
    tau: &[usize],
) -> Result<TransverseMulticurve, SurgeryError> {
    let mut cycles = d.cycles.clone();
    for c in &d.cycles {
        cycles.push(c.iter().rev().map(|&h| s.partner(tau[h])).collect());
    }
    let out = TransverseMulticurve::from_cycles(s, cycles);
    if s.edges().all(|h| out.flux(s, h) == 0) {
        return Err(SurgeryError::Cancelled);
    }
    Ok(out)
}

/// Horizontal shear: half-edge `h` moves by `weights[h]·t·ℓ` in `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct Shear {
    pub weights: Vec<i64>,
}

impl Shear {
    /// Largest `t` keeping every triangle nondegenerate (∞ if none collapses).
    pub fn max_feasible(&self, s: &FlatSurface, l: f64) -> (f64, usize) {
        let mut best = (f64::INFINITY, usize::MAX);
        for (t, tri) in s.triangles().iter().enumerate() {
            let [a, b] = [tri[0], tri[1]].map(|h| s.holonomy(h));
            let (wa, wb) = (
                self.weights[tri[0]] as f64 * l,
                self.weights[tri[1]] as f64 * l,
            );
            // only x moves, so twice the area is linear in t
            let rate = wa * b.y - wb * a.y;
            if rate < 0.0 {
                let root = -a.cross(b) / rate;
                if root < best.0 {
                    best = (root, t);
                }
            }
        }
        best
    }
}

pub fn deform(s: &FlatSurface, shear: &Shear, t: f64, l: f64) -> Result<FlatSurface, SurgeryError> {
    if shear.weights.len() != s.num_half_edges() {
        return Err(SurgeryError::Size {
            expected: s.num_half_edges(),
            got: shear.weights.len(),
        });
    }
    let (max_t, triangle) = shear.max_feasible(s, l);
    if t >= max_t {
        return Err(SurgeryError::Degenerate { triangle, max_t });
    }
    let hol: Vec<Holonomy> = (0..s.num_half_edges())
        .map(|h| s.holonomy(h) + Holonomy::new(shear.weights[h] as f64 * t * l, 0.0))
        .collect();
    Ok(s.with_holonomies(hol)?)
}

/// Largest `ρ` on the grid with `√2 − n·m·ρ ≥ (1 + ρ)²`.
pub fn choose_rho1(n: u32, m: u32) -> f64 {
    let nm = n as f64 * m as f64;
    let mut k = (std::f64::consts::SQRT_2 / RHO_STEP).floor() as i64;
    while k > 0 {
        let rho = k as f64 * RHO_STEP;
        if std::f64::consts::SQRT_2 - nm * rho >= (1.0 + rho) * (1.0 + rho) {
            return rho;
        }
        k -= 1;
    }
    0.0
}

/// `∫₀^ρ |log(ℓ√(1+t²))|^{1/2} dt` by composite Simpson.
pub fn cost_integral(l: f64, rho: f64) -> f64 {
    let n = 64;
    let h = rho / n as f64;
    let f = |t: f64| (l * (1.0 + t * t).sqrt()).ln().abs().sqrt();
    let mut acc = f(0.0) + f(rho);
    for k in 1..n {
        acc += if k % 2 == 1 { 4.0 } else { 2.0 } * f(k as f64 * h);
    }
    acc * h / 3.0
}

/// Everything one shear step needs, computed on the Delaunay triangulation.
#[derive(Clone, Debug)]
pub struct StepPlan {
    pub surface: FlatSurface,
    pub systole: f64,
    pub theta: f64,
    pub w: Vec<usize>,
    pub properties: PropertyReport,
    /// Crossings per edge of the multicurve actually used.
    pub n: u32,
    pub m: u32,
    pub rho1: f64,
    pub shear: Shear,
}

/// The orientation cover as a translation surface with its deck involution;
/// abelian surfaces are their own cover.
fn cover_of(s: &FlatSurface) -> (FlatSurface, Option<Vec<usize>>) {
    match s.kind() {
        Kind::Abelian => (s.clone(), None),
        Kind::Quadratic => match s.orientation_double_cover() {
            DoubleCover::Connected {
                surface,
                involution,
            } => (surface, Some(involution)),
            DoubleCover::Disconnected { copies: [a, _] } => (a, None),
        },
    }
}

pub fn plan_step(s: &FlatSurface) -> Result<StepPlan, SurgeryError> {
    let d = delaunayize(s)?;
    let systole = d.systole();
    let (cover, tau) = cover_of(&d);
    let o = orient_edges(&cover);
    let w: Vec<usize> = cover
        .edges()
        .filter(|&h| cover.holonomy(h).norm() <= std::f64::consts::SQRT_2 * systole * (1.0 + 1e-9))
        .collect();
    let delta = build_transverse_multicurve(&o, &w);
    let properties = check_properties(&o, &w, &delta, crossing_cap(&o, &w));
    let used = match &tau {
        Some(tau) => antisymmetrize(&cover, &delta, tau)?,
        None => delta,
    };
    let n = used.max_crossings(&cover);
    let m = (cover.num_vertices() as u32).saturating_sub(1).max(1);
    let rho1 = choose_rho1(n, m);
    let weights = (0..d.num_half_edges())
        .map(|h| used.flux(&cover, h))
        .collect();
    Ok(StepPlan {
        surface: d,
        systole,
        theta: o.theta,
        w,
        properties,
        n,
        m,
        rho1,
        shear: Shear { weights },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepLog {
    pub step: usize,
    pub systole_before: f64,
    pub systole_after: f64,
    pub rho1: f64,
    pub n: u32,
    pub m: u32,
    pub theta: f64,
    /// Smallest `ℓ(γ(t)) − ℓ(γ(0))√(1+t²)` over the sampled `t`.
    pub growth_margin: f64,
    pub growth_ok: bool,
    pub properties_ok: bool,
    pub euclidean_length: f64,
    pub cost: f64,
}

#[derive(Clone, Debug)]
pub struct OpenUpResult {
    pub surface: FlatSurface,
    pub log: Vec<StepLog>,
    /// `ε / ℓ(output)` when the target was missed, else 1.
    pub kappa: f64,
    pub failure: Option<String>,
}

/// Fractions of `ρ₁` at which the growth inequality is checked.
pub const SAMPLES: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

pub fn shear_step(plan: &StepPlan, step: usize) -> Result<(FlatSurface, StepLog), SurgeryError> {
    let (s, l, rho) = (&plan.surface, plan.systole, plan.rho1);
    let mut margin = f64::INFINITY;
    let mut last = s.clone();
    for f in SAMPLES {
        let t = f * rho;
        last = deform(s, &plan.shear, t, l)?;
        margin = margin.min(last.systole() - l * (1.0 + t * t).sqrt());
    }
    let log = StepLog {
        step,
        systole_before: l,
        systole_after: last.systole(),
        rho1: rho,
        n: plan.n,
        m: plan.m,
        theta: plan.theta,
        growth_margin: margin,
        growth_ok: margin >= -GROWTH_TOL,
        properties_ok: plan.properties.pass,
        euclidean_length: euclidean_distance(s, &last)?,
        cost: cost_integral(l, rho),
    };
    Ok((last, log))
}

/// Shear repeatedly until the systole reaches `epsilon`.
pub fn open_up(s: &FlatSurface, epsilon: f64) -> OpenUpResult {
    let mut cur = s.clone();
    let mut log = Vec::new();
    let mut failure = None;
    while cur.systole() < epsilon {
        if log.len() == MAX_STEPS {
            failure = Some(format!("no progress to {epsilon} after {MAX_STEPS} steps"));
            break;
        }
        let step = plan_step(&cur).and_then(|p| shear_step(&p, log.len()));
        match step {
            Ok((next, entry)) => {
                cur = next;
                log.push(entry);
            }
            Err(e) => {
                failure = Some(e.to_string());
                break;
            }
        }
    }
    let kappa = (epsilon / cur.systole()).max(1.0);
    OpenUpResult {
        surface: cur,
        log,
        kappa,
        failure,
    }
}
