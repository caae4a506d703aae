use super::poly::ZeroConfig;
use super::{JacobianError, C64};

/// Spanning tree on the zeros; edge `k` runs from `edges[k].0` to `edges[k].1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroTree {
    pub m: usize,
    pub edges: Vec<(usize, usize)>,
    /// Edge indices with every tail reached before its head, from zero 0.
    pub order: Vec<usize>,
    /// Largest ratio of tree-path length to direct distance.
    pub comparability: f64,
}

impl ZeroTree {
    /// `ē_k = z(head) − z(tail)`.
    pub fn edge_vectors(&self, cfg: &ZeroConfig) -> Vec<C64> {
        self.edges
            .iter()
            .map(|&(a, b)| cfg.z[b] - cfg.z[a])
            .collect()
    }

    /// Edges on the tree path between two zeros.
    pub fn path(&self, from: usize, to: usize) -> Vec<usize> {
        let mut parent = vec![(usize::MAX, usize::MAX); self.m];
        let mut seen = vec![false; self.m];
        seen[from] = true;
        let mut stack = vec![from];
        while let Some(v) = stack.pop() {
            for (k, &(a, b)) in self.edges.iter().enumerate() {
                let u = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    continue;
                };
                if !seen[u] {
                    seen[u] = true;
                    parent[u] = (v, k);
                    stack.push(u);
                }
            }
        }
        let mut out = Vec::new();
        let mut v = to;
        while v != from {
            out.push(parent[v].1);
            v = parent[v].0;
        }
        out
    }
}

/// Euclidean minimum spanning tree (Prim from zero 0), edges oriented away
/// from zero 0.
pub fn build_zero_tree(cfg: &ZeroConfig) -> Result<ZeroTree, JacobianError> {
    let m = cfg.m();
    let z = &cfg.z;
    let scale = cfg.diameter().max(f64::MIN_POSITIVE);
    for i in 0..m {
        for j in i + 1..m {
            if (z[i] - z[j]).norm() <= 1e-14 * scale {
                return Err(JacobianError::Repeated(i, j));
            }
        }
    }
    let mut in_tree = vec![false; m];
    let mut best = vec![(f64::INFINITY, 0usize); m];
    in_tree[0] = true;
    for j in 1..m {
        best[j] = ((z[j] - z[0]).norm(), 0);
    }
    let mut edges = Vec::with_capacity(m - 1);
    for _ in 1..m {
        let v = (0..m)
            .filter(|&j| !in_tree[j])
            .min_by(|&a, &b| best[a].0.total_cmp(&best[b].0))
            .unwrap();
        in_tree[v] = true;
        edges.push((best[v].1, v));
        for j in 0..m {
            let d = (z[j] - z[v]).norm();
            if !in_tree[j] && d < best[j].0 {
                best[j] = (d, v);
            }
        }
    }
    let order = (0..edges.len()).collect();
    let mut tree = ZeroTree {
        m,
        edges,
        order,
        comparability: 1.0,
    };
    let len: Vec<f64> = tree
        .edges
        .iter()
        .map(|&(a, b)| (z[b] - z[a]).norm())
        .collect();
    for i in 0..m {
        for j in i + 1..m {
            let p: f64 = tree.path(i, j).iter().map(|&k| len[k]).sum();
            tree.comparability = tree.comparability.max(p / (z[i] - z[j]).norm());
        }
    }
    Ok(tree)
}

/// `max(|z − e⁻|, |z − e⁺|)`.
pub fn d_plus(z: C64, tail: C64, head: C64) -> f64 {
    (z - tail).norm().max((z - head).norm())
}

/// `∏_{e∈T} ∏_p d₊(z_p, e)^{1/2} / ∏_{i<j} |z_i − z_j|`, in log space.
pub fn strange_comb_ratio(cfg: &ZeroConfig, tree: &ZeroTree) -> f64 {
    let mut lhs = 0.0;
    for &(a, b) in &tree.edges {
        for &zp in &cfg.z {
            lhs += 0.5 * d_plus(zp, cfg.z[a], cfg.z[b]).ln();
        }
    }
    (lhs - cfg.log_discriminant()).exp()
}
