use serde::Serialize;

use super::{JacobianError, C64};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidueResult {
    pub re: f64,
    pub im: f64,
    pub nodes: usize,
}

impl ResidueResult {
    pub fn value(&self) -> C64 {
        C64::new(self.re, self.im)
    }
}

fn poly(a: &[C64], z: C64) -> C64 {
    // z^m + Σ a_i z^i
    let mut acc = C64::new(1.0, 0.0);
    for &c in a.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

fn trapezoid(a: &[C64], delta: f64, n: usize) -> Result<C64, JacobianError> {
    let m = a.len();
    let half = m / 2;
    let mut prev: Option<C64> = None;
    let mut first = C64::new(0.0, 0.0);
    let mut acc = C64::new(0.0, 0.0);
    let mut turn = 0.0;
    let mut last_q = C64::new(0.0, 0.0);
    for k in 0..=n {
        let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let z = C64::from_polar(delta, th);
        let q = poly(a, z);
        if q.norm() == 0.0 {
            return Err(JacobianError::Branch(delta));
        }
        let mut s = q.sqrt();
        match prev {
            None => {
                // the branch asymptotic to z^{m/2}
                if (s * z.powu(half as u32).conj()).re < 0.0 {
                    s = -s;
                }
                first = s;
            }
            Some(p) => {
                if (s - p).norm() > (s + p).norm() {
                    s = -s;
                }
                if (s - p).norm() > 0.5 * s.norm().max(p.norm()) {
                    return Err(JacobianError::Branch(delta));
                }
                turn += (q / last_q).arg();
            }
        }
        last_q = q;
        prev = Some(s);
        if k < n {
            acc += s * C64::new(0.0, 1.0) * z;
        }
    }
    if (prev.unwrap() - first).norm() > 1e-8 * first.norm() {
        return Err(JacobianError::Branch(delta));
    }
    let winding = (turn / (2.0 * std::f64::consts::PI)).round() as i64;
    if winding != m as i64 {
        return Err(JacobianError::NotEnclosed {
            winding,
            expected: m,
        });
    }
    Ok(acc * (2.0 * std::f64::consts::PI / n as f64))
}

/// `∮_{|z|=δ} √q dz` for `q = z^m + Σ a_i z^i`, `m = a.len()` even, by the
/// trapezoidal rule with the root continued around the circle.
pub fn residue_b(a: &[C64], delta: f64) -> Result<ResidueResult, JacobianError> {
    let m = a.len();
    if m % 2 == 1 || m == 0 {
        return Err(JacobianError::OddDegree(m));
    }
    let mut n = 64;
    let mut prev = trapezoid(a, delta, n)?;
    loop {
        n *= 2;
        let cur = trapezoid(a, delta, n)?;
        let scale = delta.powi(m as i32 / 2 + 1);
        if (cur - prev).norm() <= 1e-15 * scale || n >= 1 << 16 {
            return Ok(ResidueResult {
                re: cur.re,
                im: cur.im,
                nodes: n,
            });
        }
        prev = cur;
    }
}
