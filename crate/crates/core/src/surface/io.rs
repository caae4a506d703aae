//! JSON surface documents.
//!
//! ```json
//! {"version": 1, "kind": "abelian", "triangles": [[0,1,2],[3,4,5]],
//!  "holonomies": {"0": [1,0], "1": [0,1], ...}, "gluings": [[2,3,1], ...]}
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{build_surface, FlatSurface, Gluing, Holonomy, Kind, SurfaceError};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceDoc {
    pub version: u32,
    pub kind: Kind,
    pub triangles: Vec<[usize; 3]>,
    pub holonomies: BTreeMap<usize, [f64; 2]>,
    pub gluings: Vec<(usize, usize, i8)>,
}

impl SurfaceDoc {
    pub fn from_surface(s: &FlatSurface) -> Self {
        SurfaceDoc {
            version: FORMAT_VERSION,
            kind: s.kind(),
            triangles: s.triangles().to_vec(),
            holonomies: s
                .holonomies()
                .iter()
                .enumerate()
                .map(|(h, v)| (h, [v.x, v.y]))
                .collect(),
            gluings: s
                .gluings()
                .into_iter()
                .map(|g| (g.a, g.b, g.sign))
                .collect(),
        }
    }

    pub fn to_surface(&self) -> Result<FlatSurface, SurfaceError> {
        if self.version != FORMAT_VERSION {
            return Err(SurfaceError::Malformed(format!(
                "unsupported version {}",
                self.version
            )));
        }
        let n = 3 * self.triangles.len();
        let mut hol = vec![None; n];
        for (&h, &[x, y]) in &self.holonomies {
            if h >= n {
                return Err(SurfaceError::Malformed(format!(
                    "holonomies: key {h} out of range"
                )));
            }
            hol[h] = Some(Holonomy::new(x, y));
        }
        let hol = hol
            .into_iter()
            .enumerate()
            .map(|(h, v)| {
                v.ok_or_else(|| SurfaceError::Malformed(format!("holonomies: missing edge {h}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let gl: Vec<Gluing> = self
            .gluings
            .iter()
            .map(|&(a, b, s)| Gluing::new(a, b, s))
            .collect();
        build_surface(self.triangles.clone(), &gl, hol, self.kind)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ReadError {
    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse {
        line: usize,
        column: usize,
        msg: String,
    },
    #[error(transparent)]
    Invalid(#[from] SurfaceError),
}

pub fn to_json(s: &FlatSurface) -> String {
    serde_json::to_string_pretty(&SurfaceDoc::from_surface(s)).expect("serializable")
}

pub fn from_json(text: &str) -> Result<FlatSurface, ReadError> {
    let doc: SurfaceDoc = serde_json::from_str(text).map_err(|e| ReadError::Parse {
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })?;
    Ok(doc.to_surface()?)
}
