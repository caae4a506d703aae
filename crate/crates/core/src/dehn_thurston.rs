//! Multicurves in Dehn–Thurston coordinates, the max-type extremal length
//! estimate, lattice counts in its balls and the cocycles built from it.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative slack when testing `norm ≤ L`, so that lattice points on the
/// boundary are counted consistently.
pub const BALL_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum DtError {
    #[error("genus must be at least 2, got {0}")]
    Genus(usize),
    #[error("expected {expected} pants curves, got {got}")]
    Size { expected: usize, got: usize },
    #[error("s_{index} = {value} must be positive and finite")]
    Scale { index: usize, value: f64 },
    #[error("intersection number m_{0} is negative")]
    NegativeIntersection(usize),
    #[error("twist t_{0} must be nonnegative when m_{0} = 0")]
    TwistSign(usize),
    #[error("intersection numbers around a pair of pants have odd sum")]
    Parity,
    #[error("the empty multicurve has no projective class")]
    Empty,
}

/// A point of Teichmüller space seen through a pants decomposition:
/// `s[i] = √Ext(α_i)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkedPoint {
    pub genus: usize,
    pub s: Vec<f64>,
    #[serde(default)]
    pub label: String,
}

impl MarkedPoint {
    pub fn new(genus: usize, s: Vec<f64>) -> Result<Self, DtError> {
        let p = MarkedPoint {
            genus,
            s,
            label: String::new(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self
    }

    pub fn validate(&self) -> Result<(), DtError> {
        if self.genus < 2 {
            return Err(DtError::Genus(self.genus));
        }
        let n = 3 * self.genus - 3;
        if self.s.len() != n {
            return Err(DtError::Size {
                expected: n,
                got: self.s.len(),
            });
        }
        for (index, &value) in self.s.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(DtError::Scale { index, value });
            }
        }
        Ok(())
    }

    pub fn curves(&self) -> usize {
        self.s.len()
    }

    /// `6g − 6`.
    pub fn dimension(&self) -> i32 {
        6 * self.genus as i32 - 6
    }

    /// Largest `max(s_i, 1/s_i)`.
    pub fn thickness(&self) -> f64 {
        self.s.iter().map(|&s| s.max(1.0 / s)).fold(1.0, f64::max)
    }
}

/// Genus 2 uses the pants decomposition by three nonseparating curves, each
/// pair of pants bounded by all three, so `m_1 + m_2 + m_3` must be even.
/// Higher genera carry no parity table and count every sign-normalized vector.
pub fn parity_ok(genus: usize, m: &[i64]) -> bool {
    genus != 2 || m.iter().sum::<i64>() % 2 == 0
}

/// Multicurve coordinates `(m_i, t_i)` per pants curve, ordered
/// lexicographically on `(m_1, t_1, m_2, t_2, …)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DTCoordinate {
    pub m: Vec<i64>,
    pub t: Vec<i64>,
}

impl Ord for DTCoordinate {
    fn cmp(&self, other: &Self) -> Ordering {
        let a = self.m.iter().zip(&self.t);
        let b = other.m.iter().zip(&other.t);
        a.cmp(b)
    }
}

impl PartialOrd for DTCoordinate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl DTCoordinate {
    /// Validated coordinate for genus `g`.
    pub fn new(genus: usize, m: Vec<i64>, t: Vec<i64>) -> Result<Self, DtError> {
        if genus < 2 {
            return Err(DtError::Genus(genus));
        }
        let n = 3 * genus - 3;
        if m.len() != n || t.len() != n {
            return Err(DtError::Size {
                expected: n,
                got: m.len().max(t.len()),
            });
        }
        for i in 0..n {
            if m[i] < 0 {
                return Err(DtError::NegativeIntersection(i));
            }
            if m[i] == 0 && t[i] < 0 {
                return Err(DtError::TwistSign(i));
            }
        }
        if !parity_ok(genus, &m) {
            return Err(DtError::Parity);
        }
        Ok(DTCoordinate { m, t })
    }

    pub fn zero(n: usize) -> Self {
        DTCoordinate {
            m: vec![0; n],
            t: vec![0; n],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().chain(&self.t).all(|&x| x == 0)
    }

    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    pub fn scale(&self, k: i64) -> Self {
        assert!(k > 0);
        DTCoordinate {
            m: self.m.iter().map(|x| x * k).collect(),
            t: self.t.iter().map(|x| x * k).collect(),
        }
    }

    /// Divide out the gcd of all coordinates.
    pub fn primitive(&self) -> Self {
        let g = self.m.iter().chain(&self.t).fold(0i64, |g, &x| gcd(g, x));
        if g <= 1 {
            return self.clone();
        }
        DTCoordinate {
            m: self.m.iter().map(|x| x / g).collect(),
            t: self.t.iter().map(|x| x / g).collect(),
        }
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `√(m²/s² + t²s²)`.
pub fn curve_term(m: i64, t: i64, s: f64) -> f64 {
    let (a, b) = (m as f64 / s, t as f64 * s);
    (a * a + b * b).sqrt()
}

/// `max_j √(m_j²/s_j² + t_j² s_j²)`.
pub fn quasi_sqrt_ext(beta: &DTCoordinate, y: &MarkedPoint) -> f64 {
    beta.m
        .iter()
        .zip(&beta.t)
        .zip(&y.s)
        .map(|((&m, &t), &s)| curve_term(m, t, s))
        .fold(0.0, f64::max)
}

/// Right Dehn twist `h_{α_i}^r`: `t_i ← t_i + r·m_i`.
pub fn dehn_twist(beta: &DTCoordinate, i: usize, r: i64) -> DTCoordinate {
    let mut out = beta.clone();
    out.t[i] += r * out.m[i];
    out
}

/// Simultaneous twist `h_{α_1}^{r_1} ⋯ h_{α_n}^{r_n}`.
pub fn multi_twist(beta: &DTCoordinate, r: &[i64]) -> DTCoordinate {
    let mut out = beta.clone();
    for (i, &ri) in r.iter().enumerate() {
        out.t[i] += ri * out.m[i];
    }
    out
}

fn within(norm: f64, l: f64) -> bool {
    norm <= l * (1.0 + BALL_TOL)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsReport {
    pub s: f64,
    pub l: f64,
    pub count: u64,
    pub bound: f64,
    pub pass: bool,
}

/// `|{(a, b) ∈ ℤ≥0² : a·s + b/s ≤ L}|` by scanning every pair in the box,
/// against `4·max{s, 1/s}·L²`.
pub fn count_as(s: f64, l: f64) -> AsReport {
    let amax = (l / s).floor() as i64;
    let bmax = (l * s).floor() as i64;
    let mut count = 0u64;
    for a in 0..=amax.max(0) {
        for b in 0..=bmax.max(0) {
            if a as f64 * s + b as f64 / s <= l * (1.0 + BALL_TOL) {
                count += 1;
            }
        }
    }
    let bound = 4.0 * s.max(1.0 / s) * l * l;
    AsReport {
        s,
        l,
        count,
        bound,
        pass: count as f64 <= bound,
    }
}

/// Sign-normalized pairs `(m, t)` with `√(m²/s² + t²s²) ≤ L`, sorted.
pub fn coordinate_pairs(s: f64, l: f64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let mmax = (l * s * (1.0 + BALL_TOL)).floor() as i64;
    for m in 0..=mmax {
        let tmax = twist_bound(m, s, l);
        if tmax < 0 {
            continue;
        }
        let lo = if m == 0 { 0 } else { -tmax };
        out.extend((lo..=tmax).map(|t| (m, t)));
    }
    out
}

/// Largest `t ≥ 0` with `(m, t)` in the ball, or −1.
fn twist_bound(m: i64, s: f64, l: f64) -> i64 {
    if !within(curve_term(m, 0, s), l) {
        return -1;
    }
    let a = m as f64 / s;
    let rem = (l * l - a * a).max(0.0);
    let mut t = (rem.sqrt() / s).floor() as i64;
    while within(curve_term(m, t + 1, s), l) {
        t += 1;
    }
    while t > 0 && !within(curve_term(m, t, s), l) {
        t -= 1;
    }
    t
}

/// Lexicographic stream of nonempty multicurves with `quasi_sqrt_ext ≤ L`.
pub struct Multicurves {
    genus: usize,
    lists: Vec<Vec<(i64, i64)>>,
    idx: Vec<usize>,
    done: bool,
}

impl Multicurves {
    fn current(&self) -> DTCoordinate {
        let (m, t) = self.idx.iter().zip(&self.lists).map(|(&k, l)| l[k]).unzip();
        DTCoordinate { m, t }
    }

    fn advance(&mut self) {
        for j in (0..self.idx.len()).rev() {
            self.idx[j] += 1;
            if self.idx[j] < self.lists[j].len() {
                return;
            }
            self.idx[j] = 0;
        }
        self.done = true;
    }
}

impl Iterator for Multicurves {
    type Item = DTCoordinate;

    fn next(&mut self) -> Option<DTCoordinate> {
        while !self.done {
            let c = self.current();
            self.advance();
            if !c.is_zero() && parity_ok(self.genus, &c.m) {
                return Some(c);
            }
        }
        None
    }
}

pub fn enumerate_multicurves(y: &MarkedPoint, l: f64) -> Multicurves {
    let lists: Vec<Vec<(i64, i64)>> = y.s.iter().map(|&s| coordinate_pairs(s, l)).collect();
    let n = lists.len();
    Multicurves {
        genus: y.genus,
        lists,
        idx: vec![0; n],
        done: n == 0,
    }
}

/// Per curve: number of pairs in the ball with `m` even and with `m` odd.
fn parity_counts(s: f64, l: f64) -> [u128; 2] {
    let mut c = [0u128; 2];
    let mmax = (l * s * (1.0 + BALL_TOL)).floor() as i64;
    for m in 0..=mmax {
        let tmax = twist_bound(m, s, l);
        if tmax < 0 {
            continue;
        }
        let k = if m == 0 { tmax + 1 } else { 2 * tmax + 1 };
        c[(m % 2) as usize] += k as u128;
    }
    c
}

/// `E(y, L)`: the ball is a product over pants curves, so the count is a
/// product of per-curve counts split by the parity of `m`.
pub fn count_multicurves(y: &MarkedPoint, l: f64) -> u128 {
    let per: Vec<[u128; 2]> = y.s.iter().map(|&s| parity_counts(s, l)).collect();
    if y.genus != 2 {
        return per.iter().map(|c| c[0] + c[1]).product::<u128>() - 1;
    }
    // generating function in the parity of Σ m
    let mut acc = [1u128, 0u128];
    for c in &per {
        acc = [acc[0] * c[0] + acc[1] * c[1], acc[0] * c[1] + acc[1] * c[0]];
    }
    acc[0] - 1
}

/// `E(y, L)` by walking the enumeration, split over the leading pair.
pub fn count_by_enumeration(y: &MarkedPoint, l: f64) -> u64 {
    let lists: Vec<Vec<(i64, i64)>> = y.s.iter().map(|&s| coordinate_pairs(s, l)).collect();
    if lists.is_empty() {
        return 0;
    }
    lists[0]
        .par_iter()
        .map(|&lead| {
            let mut sub = lists.clone();
            sub[0] = vec![lead];
            let n = sub.len();
            Multicurves {
                genus: y.genus,
                lists: sub,
                idx: vec![0; n],
                done: false,
            }
            .count() as u64
        })
        .sum()
}

/// `G(y) = 1 + ∏ 1/s_i` over the pants curves with `s_i ≤ ε₀` (empty product 1).
pub fn g_factor(y: &MarkedPoint, epsilon0: f64) -> f64 {
    1.0 + y
        .s
        .iter()
        .filter(|&&s| s <= epsilon0)
        .map(|s| 1.0 / s)
        .product::<f64>()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountReport {
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "E")]
    pub e: u128,
    #[serde(rename = "G")]
    pub g: f64,
    /// `C·G(y)·L^{6g−6}`.
    pub bound: f64,
    /// `E / (G(y)·L^{6g−6})`.
    pub ratio: f64,
}

pub fn count_e(y: &MarkedPoint, l: f64, epsilon0: f64, c: f64) -> CountReport {
    let e = count_multicurves(y, l);
    let g = g_factor(y, epsilon0);
    let scale = g * l.powi(y.dimension());
    CountReport {
        l,
        e,
        g,
        bound: c * scale,
        ratio: e as f64 / scale,
    }
}

/// `E(y, L) / L^{6g−6}`.
pub fn lambda_estimate(y: &MarkedPoint, l: f64) -> f64 {
    count_multicurves(y, l) as f64 / l.powi(y.dimension())
}

/// Estimates at `L, 2L, 4L, …` (`steps` values).
pub fn lambda_sequence(y: &MarkedPoint, l: f64, steps: usize) -> Vec<(f64, f64)> {
    (0..steps)
        .map(|k| {
            let lk = l * f64::powi(2.0, k as i32);
            (lk, lambda_estimate(y, lk))
        })
        .collect()
}

/// `sup log(q(β, x) / q(β, y))` over nonempty multicurves with `q(β, x) ≤ L`.
///
/// For a max-type norm the supremum is attained on multicurves with one
/// nonzero pants coordinate, or two with odd `m` when parity forces a
/// partner; any further coordinate can only dilute the ratio.
pub fn kerckhoff_distance(x: &MarkedPoint, y: &MarkedPoint, l: f64) -> f64 {
    let n = x.curves();
    let terms: Vec<Vec<(i64, f64, f64)>> = (0..n)
        .map(|j| {
            coordinate_pairs(x.s[j], l)
                .into_iter()
                .filter(|&p| p != (0, 0))
                .map(|(m, t)| (m, curve_term(m, t, x.s[j]), curve_term(m, t, y.s[j])))
                .collect()
        })
        .collect();
    let mut best = f64::NEG_INFINITY;
    for list in &terms {
        for &(m, a, b) in list {
            if parity_ok(x.genus, &[m]) {
                best = best.max(a / b);
            }
        }
    }
    if x.genus == 2 {
        for j in 0..n {
            for k in j + 1..n {
                let odd_k: Vec<(f64, f64)> = terms[k]
                    .iter()
                    .filter(|p| p.0 % 2 == 1)
                    .map(|p| (p.1, p.2))
                    .collect();
                for &(m, a, b) in &terms[j] {
                    if m % 2 == 0 {
                        continue;
                    }
                    for &(a2, b2) in &odd_k {
                        best = best.max(a.max(a2) / b.max(b2));
                    }
                }
            }
        }
    }
    if best == f64::NEG_INFINITY {
        return 0.0;
    }
    best.ln()
}

/// Same supremum by walking every multicurve in the ball.
pub fn kerckhoff_distance_brute(x: &MarkedPoint, y: &MarkedPoint, l: f64) -> f64 {
    enumerate_multicurves(x, l)
        .map(|b| (quasi_sqrt_ext(&b, x) / quasi_sqrt_ext(&b, y)).ln())
        .fold(0.0f64, |acc, v| if acc == 0.0 { v } else { acc.max(v) })
}

/// `log(q(ξ, x) / q(ξ, y))`, evaluated on the primitive part of `ξ`.
pub fn busemann_cocycle(
    xi: &DTCoordinate,
    x: &MarkedPoint,
    y: &MarkedPoint,
) -> Result<f64, DtError> {
    if xi.is_zero() {
        return Err(DtError::Empty);
    }
    let p = xi.primitive();
    Ok(quasi_sqrt_ext(&p, x).ln() - quasi_sqrt_ext(&p, y).ln())
}

/// `dν_x/dν_y` at `[ξ]`: `exp(δ·β_ξ(y, x))` with `δ = 6g − 6`.
pub fn ps_density_ratio(
    xi: &DTCoordinate,
    x: &MarkedPoint,
    y: &MarkedPoint,
) -> Result<f64, DtError> {
    let b = busemann_cocycle(xi, y, x)?;
    Ok((x.dimension() as f64 * b).exp())
}

/// `max(m_i, |t_i|) ≤ max(s_i, 1/s_i)·q(β, y)` for every pants curve.
pub fn coordinate_bound_holds(beta: &DTCoordinate, y: &MarkedPoint) -> bool {
    let q = quasi_sqrt_ext(beta, y);
    let c1 = y.thickness();
    beta.m
        .iter()
        .chain(&beta.t)
        .all(|&v| (v.abs() as f64) <= c1 * q * (1.0 + BALL_TOL))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwistOrbitReport {
    #[serde(rename = "R")]
    pub r: f64,
    pub count: u64,
    /// Per pants curve, the admitted twist range `[lo, hi]` from the probes.
    pub box_bounds: Vec<(i64, i64)>,
    /// `max_i |r_i|·s_i(y₀) / e^R` over admitted vectors.
    pub c2: f64,
    pub probes: usize,
}

/// Probe multicurves for the orbit count: every nonempty multicurve with
/// `q(β, x) ≤ l`.
pub fn probe_set(x: &MarkedPoint, l: f64) -> Vec<DTCoordinate> {
    enumerate_multicurves(x, l).collect()
}

/// Count twist vectors `r` with `h^r(y₀)` in the radius-`R` ball about `x`,
/// membership tested by `sup_β |log(q(β, x) / q(h^{−r}β, y₀))| ≤ R` over the
/// probe set.
pub fn twist_orbit_count(
    x: &MarkedPoint,
    y0: &MarkedPoint,
    r: f64,
    probes: &[DTCoordinate],
) -> TwistOrbitReport {
    let n = x.curves();
    let er = r.exp();
    let qx: Vec<f64> = probes.iter().map(|b| quasi_sqrt_ext(b, x)).collect();
    // q(h^{-r}β, y0) ≤ e^R q(β, x) splits per pants curve
    let mut ranges = Vec::with_capacity(n);
    let mut allowed: Vec<Vec<i64>> = Vec::with_capacity(n);
    for i in 0..n {
        let s = y0.s[i];
        let mut reach = i64::MAX;
        for (b, &q) in probes.iter().zip(&qx) {
            if b.m[i] > 0 {
                let k = ((er * q / s + b.t[i].abs() as f64) / b.m[i] as f64).ceil() as i64 + 1;
                reach = reach.min(k);
            }
        }
        assert!(reach < i64::MAX, "probe set must cross every pants curve");
        let ok: Vec<i64> = (-reach..=reach)
            .filter(|&ri| {
                probes
                    .iter()
                    .zip(&qx)
                    .all(|(b, &q)| within(curve_term(b.m[i], b.t[i] - ri * b.m[i], s), er * q))
            })
            .collect();
        ranges.push((*ok.first().unwrap_or(&0), *ok.last().unwrap_or(&0)));
        allowed.push(ok);
    }
    // q(β, x) ≤ e^R q(h^{-r}β, y0): a max over pants curves, checked jointly
    let need: Vec<f64> = qx.iter().map(|q| q / er).collect();
    let per_curve = |i: usize, ri: i64| -> Vec<f64> {
        probes
            .iter()
            .map(|b| curve_term(b.m[i], b.t[i] - ri * b.m[i], y0.s[i]))
            .collect()
    };
    // the max meets the need iff one curve's term does: one probe bitmask per twist
    let words = probes.len().div_ceil(64);
    let masks: Vec<Vec<Vec<u64>>> = (0..n)
        .map(|i| {
            allowed[i]
                .iter()
                .map(|&ri| {
                    let mut mask = vec![0u64; words];
                    for (p, q) in per_curve(i, ri).into_iter().enumerate() {
                        if q * (1.0 + BALL_TOL) >= need[p] {
                            mask[p / 64] |= 1 << (p % 64);
                        }
                    }
                    mask
                })
                .collect()
        })
        .collect();
    let full: Vec<u64> = (0..words)
        .map(|w| {
            if w + 1 < words || probes.len().is_multiple_of(64) {
                u64::MAX
            } else {
                (1u64 << (probes.len() % 64)) - 1
            }
        })
        .collect();
    let scaled = |i: usize, ri: i64| ri.abs() as f64 * y0.s[i] / er;
    let (count, c2) = (0..allowed[0].len())
        .into_par_iter()
        .map(|k0| {
            let mut count = 0u64;
            let mut c2 = 0.0f64;
            let mut idx = vec![0usize; n];
            idx[0] = k0;
            loop {
                let ok = (0..words)
                    .all(|w| (0..n).fold(0u64, |acc, i| acc | masks[i][idx[i]][w]) == full[w]);
                if ok {
                    count += 1;
                    let v = (0..n)
                        .map(|i| scaled(i, allowed[i][idx[i]]))
                        .fold(0.0, f64::max);
                    c2 = c2.max(v);
                }
                let mut j = n - 1;
                loop {
                    if j == 0 {
                        return (count, c2);
                    }
                    idx[j] += 1;
                    if idx[j] < allowed[j].len() {
                        break;
                    }
                    idx[j] = 0;
                    j -= 1;
                }
            }
        })
        .reduce(|| (0, 0.0), |a, b| (a.0 + b.0, a.1.max(b.1)));
    TwistOrbitReport {
        r,
        count,
        box_bounds: ranges,
        c2,
        probes: probes.len(),
    }
}
