//! Square-tiled surfaces and the action of their affine automorphisms on homology.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::homology::{HomologyClass, HomologyFrame};
use crate::linalg::IntMatrix;
use crate::surface::shapes::{self, BOTTOM, DIAG, DIAG_BACK, LEFT, RIGHT, TOP};
use crate::surface::{FlatSurface, SurfaceError};

#[derive(Debug, Error, PartialEq)]
pub enum OrigamiError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("linear part {0:?} is not in SL(2, Z)")]
    NotSl2z([[i64; 2]; 2]),
    #[error("square permutation does not conjugate the image origami to the original")]
    NotAutomorphism,
    #[error("unknown surface id `{0}`")]
    UnknownSurface(String),
}

/// Square `i` has `r[i]` to its right and `u[i]` above it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Origami {
    pub r: Vec<usize>,
    pub u: Vec<usize>,
}

fn inverse(p: &[usize]) -> Vec<usize> {
    let mut q = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        q[x] = i;
    }
    q
}

fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    // (a ∘ b)(i) = a[b[i]]
    b.iter().map(|&i| a[i]).collect()
}

/// Chain on the square complex: `h[i]` bottom side of square `i` (rightward),
/// `v[i]` left side of square `i` (upward).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareChain {
    pub h: Vec<i64>,
    pub v: Vec<i64>,
}

impl SquareChain {
    fn zero(n: usize) -> Self {
        SquareChain {
            h: vec![0; n],
            v: vec![0; n],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    /// `[[1,1],[0,1]]`
    Shear,
    /// `[[1,-1],[0,1]]`
    ShearInv,
    /// `[[0,-1],[1,0]]`
    Rotate,
}

impl Step {
    pub fn matrix(self) -> [[i64; 2]; 2] {
        match self {
            Step::Shear => [[1, 1], [0, 1]],
            Step::ShearInv => [[1, -1], [0, 1]],
            Step::Rotate => [[0, -1], [1, 0]],
        }
    }
}

pub fn mul2(a: [[i64; 2]; 2], b: [[i64; 2]; 2]) -> [[i64; 2]; 2] {
    let mut c = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// Write `m ∈ SL(2,Z)` as a product of steps, listed in the order they are
/// applied (the last factor first).
pub fn decompose(m: [[i64; 2]; 2]) -> Result<Vec<Step>, OrigamiError> {
    if m[0][0] * m[1][1] - m[0][1] * m[1][0] != 1 {
        return Err(OrigamiError::NotSl2z(m));
    }
    // left-multiply by generators until the identity is reached
    let s = Step::Rotate.matrix();
    let mut cur = m;
    let mut applied: Vec<[[i64; 2]; 2]> = Vec::new();
    let mut push = |g: [[i64; 2]; 2], cur: &mut [[i64; 2]; 2]| {
        *cur = mul2(g, *cur);
        applied.push(g);
    };
    while cur[1][0] != 0 {
        let (a, c) = (cur[0][0], cur[1][0]);
        if a.abs() < c.abs() {
            push(s, &mut cur);
        } else if (a > 0) == (c > 0) {
            push(Step::ShearInv.matrix(), &mut cur);
        } else {
            push(Step::Shear.matrix(), &mut cur);
        }
    }
    if cur[0][0] == -1 {
        push(s, &mut cur);
        push(s, &mut cur);
    }
    while cur[0][1] != 0 {
        let g = if cur[0][1] > 0 {
            Step::ShearInv.matrix()
        } else {
            Step::Shear.matrix()
        };
        push(g, &mut cur);
    }
    debug_assert_eq!(cur, [[1, 0], [0, 1]]);
    // m = g_1^{-1} g_2^{-1} ... g_k^{-1}; applying m means g_k^{-1} first
    let mut steps = Vec::new();
    for g in applied.iter().rev() {
        if *g == s {
            steps.extend([Step::Rotate; 3]);
        } else if *g == Step::Shear.matrix() {
            steps.push(Step::ShearInv);
        } else {
            steps.push(Step::Shear);
        }
    }
    Ok(steps)
}

impl Origami {
    pub fn new(r: Vec<usize>, u: Vec<usize>) -> Self {
        Origami { r, u }
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn surface(&self) -> Result<FlatSurface, SurfaceError> {
        shapes::square_tiled(&self.r, &self.u)
    }

    pub fn torus() -> Self {
        Origami::new(vec![0], vec![0])
    }

    pub fn l_shape() -> Self {
        Origami::new(vec![1, 0, 2], vec![2, 1, 0])
    }

    pub fn builtin(name: &str) -> Result<Self, OrigamiError> {
        match name {
            "torus" => Ok(Self::torus()),
            "l" | "l-origami" | "L" => Ok(Self::l_shape()),
            _ => Err(OrigamiError::UnknownSurface(name.to_string())),
        }
    }

    /// Image origami and chain map of one step.
    pub fn apply_step(&self, step: Step, c: &SquareChain) -> (Origami, SquareChain) {
        let n = self.len();
        let rinv = inverse(&self.r);
        let mut out = SquareChain::zero(n);
        match step {
            Step::Shear => {
                let o = Origami::new(self.r.clone(), compose(&self.u, &rinv));
                for i in 0..n {
                    out.h[i] += c.h[i];
                    out.h[i] += c.v[i];
                    out.v[o.r[i]] += c.v[i];
                }
                (o, out)
            }
            Step::ShearInv => {
                let o = Origami::new(self.r.clone(), compose(&self.u, &self.r));
                for i in 0..n {
                    out.h[i] += c.h[i];
                    out.h[rinv[i]] -= c.v[i];
                    out.v[rinv[i]] += c.v[i];
                }
                (o, out)
            }
            Step::Rotate => {
                let o = Origami::new(inverse(&self.u), self.r.clone());
                for i in 0..n {
                    out.v[o.r[i]] += c.h[i];
                    out.h[i] -= c.v[i];
                }
                (o, out)
            }
        }
    }

    /// Express a triangulation chain of `self.surface()` on the square complex.
    pub fn to_square_chain(&self, a: &HomologyClass) -> SquareChain {
        let n = self.len();
        let mut c = SquareChain::zero(n);
        let partner = |x: usize| {
            let (i, k) = (x / 6, x % 6);
            match k {
                BOTTOM => 6 * inverse(&self.u)[i] + TOP,
                TOP => 6 * self.u[i] + BOTTOM,
                RIGHT => 6 * self.r[i] + LEFT,
                LEFT => 6 * inverse(&self.r)[i] + RIGHT,
                DIAG => 6 * i + DIAG_BACK,
                _ => 6 * i + DIAG,
            }
        };
        for x in 0..6 * n {
            if x > partner(x) {
                continue;
            }
            let w = a.weight(x);
            if w == 0 {
                continue;
            }
            let i = x / 6;
            match x % 6 {
                BOTTOM => c.h[i] += w,
                TOP => c.h[self.u[i]] -= w,
                RIGHT => c.v[self.r[i]] += w,
                LEFT => c.v[i] -= w,
                DIAG => {
                    c.h[i] += w;
                    c.v[self.r[i]] += w;
                }
                _ => {
                    c.h[i] -= w;
                    c.v[self.r[i]] -= w;
                }
            }
        }
        c
    }

    /// Inverse of [`Origami::to_square_chain`] on closed chains.
    pub fn from_square_chain(&self, s: &FlatSurface, c: &SquareChain) -> HomologyClass {
        let rinv = inverse(&self.r);
        let mut terms = Vec::new();
        for i in 0..self.len() {
            if c.h[i] != 0 {
                terms.push((6 * i + BOTTOM, c.h[i]));
            }
            if c.v[i] != 0 {
                terms.push((6 * rinv[i] + RIGHT, c.v[i]));
            }
        }
        HomologyClass::from_half_edges(s, &terms)
    }
}

/// Affine automorphism given by its derivative and the induced square relabelling.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Automorphism {
    pub linear_part: [[i64; 2]; 2],
    pub square_perm: Vec<usize>,
}

/// Apply the linear part to the origami: image origami and chain map.
pub fn image(
    o: &Origami,
    m: [[i64; 2]; 2],
) -> Result<(Origami, impl Fn(&SquareChain) -> SquareChain), OrigamiError> {
    let steps = decompose(m)?;
    let mut cur = o.clone();
    let mut stages = Vec::with_capacity(steps.len());
    for &st in &steps {
        stages.push((cur.clone(), st));
        let (next, _) = cur.apply_step(st, &SquareChain::zero(o.len()));
        cur = next;
    }
    let map = move |c: &SquareChain| {
        let mut x = c.clone();
        for (o, st) in &stages {
            x = o.apply_step(*st, &x).1;
        }
        x
    };
    Ok((cur, map))
}

/// Check `σ ∘ r' = r ∘ σ` and `σ ∘ u' = u ∘ σ` for the image origami.
pub fn conjugates(o: &Origami, image: &Origami, sigma: &[usize]) -> bool {
    sigma.len() == o.len()
        && compose(sigma, &image.r) == compose(&o.r, sigma)
        && compose(sigma, &image.u) == compose(&o.u, sigma)
}

/// All square permutations conjugating the image of `m` back to `o`.
pub fn find_square_perms(o: &Origami, m: [[i64; 2]; 2]) -> Result<Vec<Vec<usize>>, OrigamiError> {
    let (img, _) = image(o, m)?;
    let n = o.len();
    let mut out = Vec::new();
    // a conjugacy is determined by the image of square 0 when the origami is connected
    for s0 in 0..n {
        let mut sigma = vec![usize::MAX; n];
        sigma[0] = s0;
        let mut stack = vec![0];
        let mut ok = true;
        while let Some(i) = stack.pop() {
            for (pi, qi) in [(&img.r, &o.r), (&img.u, &o.u)] {
                let j = pi[i];
                let t = qi[sigma[i]];
                if sigma[j] == usize::MAX {
                    sigma[j] = t;
                    stack.push(j);
                } else if sigma[j] != t {
                    ok = false;
                }
            }
            let rinv = inverse(&img.r);
            let uinv = inverse(&img.u);
            for (pi, qi) in [(&rinv, inverse(&o.r)), (&uinv, inverse(&o.u))] {
                let j = pi[i];
                let t = qi[sigma[i]];
                if sigma[j] == usize::MAX {
                    sigma[j] = t;
                    stack.push(j);
                } else if sigma[j] != t {
                    ok = false;
                }
            }
        }
        if ok && sigma.iter().all(|&x| x != usize::MAX) && conjugates(o, &img, &sigma) {
            out.push(sigma);
        }
    }
    Ok(out)
}

/// Matrix of the automorphism on the homology frame of `o.surface()`:
/// column `k` holds the coordinates of the image of basis cycle `k`.
pub fn mapping_class_matrix(
    o: &Origami,
    phi: &Automorphism,
) -> Result<(IntMatrix, HomologyFrame), OrigamiError> {
    let s = o.surface()?;
    let frame = HomologyFrame::new(&s);
    let (img, map) = image(o, phi.linear_part)?;
    if !conjugates(o, &img, &phi.square_perm) {
        return Err(OrigamiError::NotAutomorphism);
    }
    let n = o.len();
    let k = frame.rank();
    let mut a = vec![vec![0i64; k]; k];
    for (col, b) in frame.basis.iter().enumerate() {
        let c = map(&o.to_square_chain(b));
        let mut back = SquareChain::zero(n);
        for j in 0..n {
            back.h[phi.square_perm[j]] += c.h[j];
            back.v[phi.square_perm[j]] += c.v[j];
        }
        let cls = o.from_square_chain(&s, &back);
        let x = frame.coords(&cls).expect("same triangulation");
        for row in 0..k {
            a[row][col] = x[row];
        }
    }
    Ok((a, frame))
}
