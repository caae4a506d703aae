use super::C64;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
/// Gauss weights at `XGK[1], XGK[3], XGK[5], XGK[7]`.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

const MAX_SEGMENTS: usize = 4000;

fn kronrod(f: &impl Fn(f64) -> C64, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let pair = f(c - h * XGK[i]) + f(c + h * XGK[i]);
        k += pair * WGK[i];
        if i % 2 == 1 {
            g += pair * WG[i / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadResult {
    pub value: C64,
    pub error: f64,
    pub segments: usize,
    /// Relative change when every accepted segment is split once more.
    pub halving_change: f64,
    pub converged: bool,
}

/// Globally adaptive 7–15 Gauss–Kronrod on `[a, b]` for a complex integrand.
pub fn gauss_kronrod(f: impl Fn(f64) -> C64, a: f64, b: f64, rel_tol: f64) -> QuadResult {
    let (v, e) = kronrod(&f, a, b);
    let mut segs = vec![(a, b, v, e)];
    loop {
        let total: C64 = segs.iter().map(|s| s.2).sum();
        let err: f64 = segs.iter().map(|s| s.3).sum();
        let done = err <= rel_tol * total.norm() || err <= 1e-300;
        if done || segs.len() >= MAX_SEGMENTS {
            let refined: C64 = segs
                .iter()
                .map(|&(x, y, _, _)| {
                    let mid = 0.5 * (x + y);
                    kronrod(&f, x, mid).0 + kronrod(&f, mid, y).0
                })
                .sum();
            let halving_change = (refined - total).norm() / total.norm().max(f64::MIN_POSITIVE);
            return QuadResult {
                value: total,
                error: err,
                segments: segs.len(),
                halving_change,
                converged: done,
            };
        }
        let worst = (0..segs.len())
            .max_by(|&i, &j| segs[i].3.total_cmp(&segs[j].3))
            .unwrap();
        let (x, y, _, _) = segs.swap_remove(worst);
        let mid = 0.5 * (x + y);
        let (v1, e1) = kronrod(&f, x, mid);
        let (v2, e2) = kronrod(&f, mid, y);
        segs.push((x, mid, v1, e1));
        segs.push((mid, y, v2, e2));
    }
}
