//! Integral homology of a triangulated surface: tree–cotree bases, the
//! intersection form, coordinates and Poincaré duals, and the odd part of the
//! orientation double cover.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use thiserror::Error;

use crate::linalg::{self, IntMatrix};
use crate::surface::{DoubleCover, FlatSurface, Holonomy, Kind};

#[derive(Debug, Error, PartialEq)]
pub enum HomologyError {
    #[error("classes live on different triangulations")]
    Mismatch,
    #[error("chain is not closed")]
    NotClosed,
    #[error("surface is abelian: the double cover is disconnected")]
    NoOddPart,
}

/// An integral 1-chain on the edges of a triangulation. `weights[h]` is the
/// coefficient of half-edge `h`; `weights[partner(h)] = -weights[h]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HomologyClass {
    weights: Vec<i64>,
    tag: u64,
}

/// Fingerprint of a triangulation's combinatorics.
pub fn combinatorial_tag(s: &FlatSurface) -> u64 {
    let mut h = DefaultHasher::new();
    s.triangles().hash(&mut h);
    for e in 0..s.num_half_edges() {
        (s.partner(e), s.sign(e)).hash(&mut h);
    }
    h.finish()
}

impl HomologyClass {
    pub fn zero(s: &FlatSurface) -> Self {
        HomologyClass {
            weights: vec![0; s.num_half_edges()],
            tag: combinatorial_tag(s),
        }
    }

    /// Chain `Σ w·[h]` over the given half-edges.
    pub fn from_half_edges(s: &FlatSurface, terms: &[(usize, i64)]) -> Self {
        let mut c = Self::zero(s);
        for &(h, w) in terms {
            c.weights[h] += w;
            c.weights[s.partner(h)] -= w;
        }
        c
    }

    /// Closed edge path given as consecutive half-edges.
    pub fn from_path(s: &FlatSurface, path: &[usize]) -> Self {
        let terms: Vec<(usize, i64)> = path.iter().map(|&h| (h, 1)).collect();
        Self::from_half_edges(s, &terms)
    }

    pub fn weight(&self, h: usize) -> i64 {
        self.weights[h]
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn tag(&self) -> u64 {
        self.tag
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(|&w| w == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let weights = self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| a + b)
            .collect();
        HomologyClass {
            weights,
            tag: self.tag,
        }
    }

    pub fn scale(&self, k: i64) -> Self {
        HomologyClass {
            weights: self.weights.iter().map(|w| w * k).collect(),
            tag: self.tag,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1))
    }

    /// Image under a half-edge permutation (e.g. a deck transformation).
    pub fn map(&self, perm: &[usize]) -> Self {
        let mut weights = vec![0; self.weights.len()];
        for (h, &w) in self.weights.iter().enumerate() {
            weights[perm[h]] += w;
        }
        HomologyClass {
            weights,
            tag: self.tag,
        }
    }

    pub fn is_closed(&self, s: &FlatSurface) -> bool {
        let mut b = vec![0i64; s.num_vertices()];
        for h in s.edges() {
            let w = self.weights[h];
            b[s.end_vertex(h)] += w;
            b[s.start_vertex(h)] -= w;
        }
        b.iter().all(|&x| x == 0)
    }

    /// Period: the holonomy integrated along the chain. On half-translation
    /// surfaces this is only meaningful up to the local sign choice.
    pub fn period(&self, s: &FlatSurface) -> Holonomy {
        let mut p = Holonomy::ZERO;
        for h in s.edges() {
            p += s.holonomy(h) * self.weights[h] as f64;
        }
        p
    }
}

/// A basis of `H_1` from a tree–cotree decomposition, with the dual loops
/// used to read off coordinates and the intersection matrix of the basis.
#[derive(Clone, Debug)]
pub struct HomologyFrame {
    tag: u64,
    pub basis: Vec<HomologyClass>,
    /// Edge paths realising the basis, as consecutive half-edges.
    pub paths: Vec<Vec<usize>>,
    /// Dual loops as sequences of crossed half-edges (from the triangle of
    /// `h` into its partner's); loop `j` meets basis cycle `j` only.
    pub dual_loops: Vec<Vec<usize>>,
    /// `I(basis_j, dual_j)`, always ±1.
    dual_sign: Vec<i64>,
    /// `form[i][j] = I(basis_i, basis_j)`.
    pub form: IntMatrix,
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let n = self.0[y];
            self.0[y] = r;
            y = n;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        self.0[a] = b;
        true
    }
}

/// Algebraic intersection of a dual loop with a chain.
fn dual_pairing(chain: &HomologyClass, crossings: &[usize]) -> i64 {
    crossings.iter().map(|&h| -chain.weights[h]).sum()
}

impl HomologyFrame {
    /// Primal spanning tree by increasing edge id, dual spanning tree on the
    /// remaining edges by decreasing edge id; the leftover edges close up to
    /// the basis cycles. The choice depends only on the combinatorics.
    pub fn new(s: &FlatSurface) -> Self {
        let tag = combinatorial_tag(s);
        let edges: Vec<usize> = s.edges().collect();
        let mut dsu = Dsu::new(s.num_vertices());
        let mut in_tree = vec![false; s.num_half_edges()];
        for &h in &edges {
            if dsu.union(s.start_vertex(h), s.end_vertex(h)) {
                in_tree[h] = true;
                in_tree[s.partner(h)] = true;
            }
        }
        let mut dual = Dsu::new(s.num_triangles());
        let mut in_cotree = vec![false; s.num_half_edges()];
        for &h in edges.iter().rev() {
            if in_tree[h] {
                continue;
            }
            if dual.union(s.triangle_of(h), s.triangle_of(s.partner(h))) {
                in_cotree[h] = true;
                in_cotree[s.partner(h)] = true;
            }
        }
        let leftover: Vec<usize> = edges
            .iter()
            .copied()
            .filter(|&h| !in_tree[h] && !in_cotree[h])
            .collect();
        debug_assert_eq!(leftover.len(), 2 * s.genus());

        let tree_adj = adjacency(s, &in_tree, true);
        let cotree_adj = adjacency(s, &in_cotree, false);
        let mut basis = Vec::new();
        let mut paths = Vec::new();
        let mut dual_loops = Vec::new();
        for &l in &leftover {
            let mut path = vec![l];
            path.extend(tree_path(
                &tree_adj,
                s.end_vertex(l),
                s.start_vertex(l),
                |h| s.end_vertex(h),
                |h| s.start_vertex(h),
            ));
            basis.push(HomologyClass::from_path(s, &path));
            paths.push(path);
            let mut lp = vec![l];
            lp.extend(tree_path(
                &cotree_adj,
                s.triangle_of(s.partner(l)),
                s.triangle_of(l),
                |h| s.triangle_of(s.partner(h)),
                |h| s.triangle_of(h),
            ));
            dual_loops.push(lp);
        }
        let dual_sign: Vec<i64> = basis
            .iter()
            .zip(&dual_loops)
            .map(|(b, d)| dual_pairing(b, d))
            .collect();
        debug_assert!(dual_sign.iter().all(|x| x.abs() == 1));
        let n = basis.len();
        let mut form = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                form[i][j] = path_intersection(s, &paths[i], &basis[j]);
            }
        }
        HomologyFrame {
            tag,
            basis,
            paths,
            dual_loops,
            dual_sign,
            form,
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn tag(&self) -> u64 {
        self.tag
    }

    /// Coordinates of a closed chain in the basis.
    pub fn coords(&self, a: &HomologyClass) -> Result<Vec<i64>, HomologyError> {
        if a.tag != self.tag {
            return Err(HomologyError::Mismatch);
        }
        Ok(self
            .dual_loops
            .iter()
            .zip(&self.dual_sign)
            .map(|(d, s)| dual_pairing(a, d) * s)
            .collect())
    }

    pub fn class_of(&self, coords: &[i64]) -> HomologyClass {
        let mut c = HomologyClass {
            weights: vec![0; self.basis[0].weights.len()],
            tag: self.tag,
        };
        for (b, &k) in self.basis.iter().zip(coords) {
            if k != 0 {
                c = c.add(&b.scale(k));
            }
        }
        c
    }

    /// `I(a, b)` via coordinates and the basis form.
    pub fn intersection_number(
        &self,
        a: &HomologyClass,
        b: &HomologyClass,
    ) -> Result<i64, HomologyError> {
        let x = self.coords(a)?;
        let y = self.coords(b)?;
        Ok(bilinear(&self.form, &x, &y))
    }

    /// Poincaré dual of `a`: the functional `β ↦ I(β, a)`, as its values on the basis.
    pub fn poincare_dual(&self, a: &HomologyClass) -> Result<Vec<i64>, HomologyError> {
        Ok(linalg::mat_vec(&self.form, &self.coords(a)?))
    }

    /// Evaluate a functional given on the basis at a class.
    pub fn pair(&self, functional: &[i64], b: &HomologyClass) -> Result<i64, HomologyError> {
        Ok(functional
            .iter()
            .zip(self.coords(b)?)
            .map(|(f, x)| f * x)
            .sum())
    }
}

pub fn bilinear(form: &IntMatrix, x: &[i64], y: &[i64]) -> i64 {
    let mut s = 0;
    for (i, xi) in x.iter().enumerate() {
        if *xi == 0 {
            continue;
        }
        for (j, yj) in y.iter().enumerate() {
            s += xi * form[i][j] * yj;
        }
    }
    s
}

/// Adjacency of the primal (vertices) or dual (triangles) tree.
fn adjacency(s: &FlatSurface, mask: &[bool], primal: bool) -> Vec<Vec<usize>> {
    let n = if primal {
        s.num_vertices()
    } else {
        s.num_triangles()
    };
    let mut adj = vec![Vec::new(); n];
    for h in 0..s.num_half_edges() {
        if mask[h] {
            let from = if primal {
                s.start_vertex(h)
            } else {
                s.triangle_of(h)
            };
            adj[from].push(h);
        }
    }
    adj
}

/// Half-edges along the unique tree path from `a` to `b`.
fn tree_path(
    adj: &[Vec<usize>],
    a: usize,
    b: usize,
    head: impl Fn(usize) -> usize,
    tail: impl Fn(usize) -> usize,
) -> Vec<usize> {
    let mut via = vec![usize::MAX; adj.len()];
    let mut seen = vec![false; adj.len()];
    seen[a] = true;
    let mut stack = vec![a];
    while let Some(x) = stack.pop() {
        if x == b {
            break;
        }
        for &h in &adj[x] {
            let y = head(h);
            if !seen[y] {
                seen[y] = true;
                via[y] = h;
                stack.push(y);
            }
        }
    }
    let mut out = Vec::new();
    let mut x = b;
    while x != a {
        let h = via[x];
        out.push(h);
        x = tail(h);
    }
    out.reverse();
    out
}

/// `I(path, b)` by pushing the closed edge path off to its left: at each
/// vertex the push-off sweeps clockwise from the incoming edge to the outgoing
/// one, crossing the outgoing half-edges strictly in between.
pub fn path_intersection(s: &FlatSurface, path: &[usize], b: &HomologyClass) -> i64 {
    let k = path.len();
    let mut total = 0;
    for m in 0..k {
        let d_in = s.partner(path[m]);
        let d_out = path[(m + 1) % k];
        let mut x = s.next_ccw(d_out);
        while x != d_in {
            total += b.weights[x];
            x = s.next_ccw(x);
        }
    }
    total
}

/// Odd part of homology on the orientation double cover of a quadratic surface.
#[derive(Clone, Debug)]
pub struct OddFrame {
    pub cover: FlatSurface,
    pub involution: Vec<usize>,
    pub frame: HomologyFrame,
    /// Classes `c - τc` spanning the odd part over the rationals.
    pub basis: Vec<HomologyClass>,
    /// Coordinates of `basis` in `frame`.
    pub coords: Vec<Vec<i64>>,
    pub form: IntMatrix,
}

pub fn odd_frame(s: &FlatSurface) -> Result<OddFrame, HomologyError> {
    if s.kind() == Kind::Abelian {
        return Err(HomologyError::NoOddPart);
    }
    let DoubleCover::Connected {
        surface: cover,
        involution,
    } = s.orientation_double_cover()
    else {
        return Err(HomologyError::NoOddPart);
    };
    let frame = HomologyFrame::new(&cover);
    let mut basis = Vec::new();
    let mut coords: Vec<Vec<i64>> = Vec::new();
    for b in &frame.basis {
        let c = b.sub(&b.map(&involution));
        let x = frame.coords(&c).expect("same triangulation");
        let mut trial = coords.clone();
        trial.push(x.clone());
        if linalg::rank(&trial) == trial.len() {
            basis.push(c);
            coords.push(x);
        }
    }
    let n = basis.len();
    let mut form = vec![vec![0; n]; n];
    for i in 0..n {
        for j in 0..n {
            form[i][j] = bilinear(&frame.form, &coords[i], &coords[j]);
        }
    }
    Ok(OddFrame {
        cover,
        involution,
        frame,
        basis,
        coords,
        form,
    })
}

pub fn homology_basis(s: &FlatSurface) -> Vec<HomologyClass> {
    HomologyFrame::new(s).basis
}

pub fn intersection_number(
    s: &FlatSurface,
    a: &HomologyClass,
    b: &HomologyClass,
) -> Result<i64, HomologyError> {
    HomologyFrame::new(s).intersection_number(a, b)
}

pub fn poincare_dual(s: &FlatSurface, a: &HomologyClass) -> Result<Vec<i64>, HomologyError> {
    HomologyFrame::new(s).poincare_dual(a)
}
