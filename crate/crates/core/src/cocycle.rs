//! Integer cocycle matrices of origami automorphisms and the diagonal flow
//! action on cohomology with coefficients in the plane.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, IntMatrix};
use crate::origami::{self, Automorphism, Origami, OrigamiError};

pub const PRODUCT_TOL: f64 = 1e-8;
pub const PAIRING_TOL: f64 = 1e-8;

#[derive(Debug, Error, PartialEq)]
pub enum CocycleError {
    #[error(transparent)]
    Origami(#[from] OrigamiError),
    #[error("catalog entry {index}: {msg}")]
    Catalog { index: usize, msg: String },
}

/// Matrix of a mapping class on a homology basis, with the intersection form
/// of that basis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CocycleMatrix {
    pub matrix: IntMatrix,
    pub form: IntMatrix,
}

impl CocycleMatrix {
    /// `AᵀJA = J` in exact integer arithmetic.
    pub fn is_symplectic(&self) -> bool {
        linalg::is_symplectic(&self.matrix, &self.form)
    }

    pub fn det(&self) -> i128 {
        linalg::det(&self.matrix)
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }
}

/// Action on the standard basis of the surface's square-tiled homology frame.
pub fn mapping_class_matrix(
    o: &Origami,
    phi: &Automorphism,
) -> Result<CocycleMatrix, CocycleError> {
    let (matrix, frame) = origami::mapping_class_matrix(o, phi)?;
    Ok(CocycleMatrix {
        matrix,
        form: frame.form,
    })
}

/// `(dg_t)_*` on `H¹(X; ℝ²) = H¹ ⊗ ℝ²`, composed with `A`: the `+` block is
/// `e^t A`, the `−` block `e^{−t} A`.
pub fn flow_action(t: f64, a: &IntMatrix) -> Vec<Vec<f64>> {
    let n = a.len();
    let (up, down) = (t.exp(), (-t).exp());
    let mut m = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = up * a[i][j] as f64;
            m[n + i][n + j] = down * a[i][j] as f64;
        }
    }
    m
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularValueReport {
    pub t: f64,
    /// Descending.
    pub values: Vec<f64>,
    pub product: f64,
    pub product_ok: bool,
    /// Largest `|λ_i λ_{n+1−i} − 1|`.
    pub pairing_error: f64,
    pub pairing_ok: bool,
    /// `λ_1 ≥ e^t` and `λ_n ≤ e^{−t}`.
    pub bracketing_ok: bool,
    /// The integral frame is not the Hodge frame, so `λ_1` may exceed `e^t`.
    pub frame_discrepancy: bool,
    pub pass: bool,
}

pub fn singular_value_report(a: &IntMatrix, t: f64) -> SingularValueReport {
    let values = linalg::singular_values(&flow_action(t, a));
    let n = values.len();
    let log_sum: f64 = values.iter().map(|v| v.ln()).sum();
    let product = log_sum.exp();
    let product_ok = (product - 1.0).abs() <= PRODUCT_TOL;
    let pairing_error = (0..n / 2)
        .map(|i| (values[i] * values[n - 1 - i] - 1.0).abs())
        .fold(0.0, f64::max);
    let pairing_ok = pairing_error <= PAIRING_TOL;
    let (et, emt) = (t.exp(), (-t).exp());
    let bracketing_ok =
        values[0] >= et * (1.0 - PAIRING_TOL) && values[n - 1] <= emt * (1.0 + PAIRING_TOL);
    let frame_discrepancy = (values[0] - et).abs() > PAIRING_TOL * et;
    SingularValueReport {
        t,
        values,
        product,
        product_ok,
        pairing_error,
        pairing_ok,
        bracketing_ok,
        frame_discrepancy,
        pass: product_ok && pairing_ok && bracketing_ok,
    }
}

/// One line of an automorphism catalog file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogEntry {
    pub surface_id: String,
    pub linear_part: [[i64; 2]; 2],
    pub square_perm: Vec<usize>,
}

impl CatalogEntry {
    pub fn origami(&self) -> Result<Origami, OrigamiError> {
        Origami::builtin(&self.surface_id)
    }

    pub fn automorphism(&self) -> Automorphism {
        Automorphism {
            linear_part: self.linear_part,
            square_perm: self.square_perm.clone(),
        }
    }

    pub fn matrix(&self) -> Result<CocycleMatrix, CocycleError> {
        mapping_class_matrix(&self.origami()?, &self.automorphism())
    }
}

pub fn parse_catalog(text: &str) -> Result<Vec<CatalogEntry>, CocycleError> {
    serde_json::from_str(text).map_err(|e| CocycleError::Catalog {
        index: 0,
        msg: e.to_string(),
    })
}

/// Affine automorphisms of the torus and of the three-square L.
pub fn builtin_catalog() -> Vec<CatalogEntry> {
    let e = |id: &str, m: [[i64; 2]; 2], p: &[usize]| CatalogEntry {
        surface_id: id.to_string(),
        linear_part: m,
        square_perm: p.to_vec(),
    };
    vec![
        e("torus", [[1, 0], [0, 1]], &[0]),
        e("torus", [[1, 1], [0, 1]], &[0]),
        e("torus", [[1, 0], [1, 1]], &[0]),
        e("torus", [[0, -1], [1, 0]], &[0]),
        e("torus", [[2, 1], [1, 1]], &[0]),
        e("l", [[1, 0], [0, 1]], &[0, 1, 2]),
        e("l", [[1, 2], [0, 1]], &[0, 1, 2]),
        e("l", [[1, 0], [2, 1]], &[0, 1, 2]),
        e("l", [[0, -1], [1, 0]], &[0, 2, 1]),
        e("l", [[-1, 0], [0, -1]], &[0, 1, 2]),
    ]
}

/// Validate every entry and compute its matrix.
pub fn catalog_matrices(entries: &[CatalogEntry]) -> Result<Vec<CocycleMatrix>, CocycleError> {
    entries
        .iter()
        .enumerate()
        .map(|(index, e)| {
            e.matrix().map_err(|err| CocycleError::Catalog {
                index,
                msg: err.to_string(),
            })
        })
        .collect()
}
