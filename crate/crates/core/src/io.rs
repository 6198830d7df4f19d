//! JSON problem files.
//!
//! ```json
//! {
//!   "ambient_dim": 3,
//!   "field": "complex",
//!   "norm": {"p": "inf", "weights": [1, 1, 2]},
//!   "basis": [[1, 1, 0], [[0, 1], 0, 1]],
//!   "pair": [[1, 0, 0], [0, [0, 1], 0]]
//! }
//! ```
//!
//! Entries are numbers or `[re, im]` pairs. `pair` is optional; `basis` may
//! be omitted when `pair` is present, in which case the pair spans the
//! subspace.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Ambient, CplxVec, Exponent, Field, NormSpec};
use crate::search::Subspace;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl From<Entry> for Complex64 {
    fn from(e: Entry) -> Self {
        match e {
            Entry::Real(x) => Complex64::new(x, 0.0),
            Entry::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PValue {
    Number(f64),
    Name(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormEntry {
    pub p: PValue,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub ambient_dim: usize,
    pub field: Field,
    pub norm: NormEntry,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub basis: Vec<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<[Vec<Entry>; 2]>,
}

/// A validated problem.
#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    pub ambient: Ambient,
    pub subspace: Subspace,
    pub pair: Option<(CplxVec, CplxVec)>,
}

impl Problem {
    /// The pair, or a diagnostic naming the missing field.
    pub fn require_pair(&self) -> Result<(&CplxVec, &CplxVec)> {
        self.pair
            .as_ref()
            .map(|(u, v)| (u, v))
            .ok_or_else(|| Error::parse("pair", "this command needs a `pair` of two vectors"))
    }
}

fn parse_exponent(p: &PValue) -> Result<Exponent> {
    match p {
        PValue::Number(x) => Ok(Exponent::Finite(*x)),
        PValue::Name(s) if matches!(s.to_ascii_lowercase().as_str(), "inf" | "infinity") => {
            Ok(Exponent::Infinity)
        }
        PValue::Name(s) => Err(Error::parse("norm.p", format!("expected a number or \"inf\", got {s:?}"))),
    }
}

fn vector(entries: &[Entry], context: String, ambient: &Ambient) -> Result<CplxVec> {
    let v = CplxVec::new(entries.iter().map(|&e| e.into()).collect())
        .map_err(|e| Error::parse(context.clone(), e.to_string()))?;
    ambient
        .check_vector(&v)
        .map_err(|e| Error::parse(context, e.to_string()))?;
    Ok(v)
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            Error::parse(format!("line {}, column {}", e.line(), e.column()), e.to_string())
        })
    }

    pub fn validate(&self) -> Result<Problem> {
        let exponent = parse_exponent(&self.norm.p)?;
        let norm = NormSpec::new(exponent, self.norm.weights.clone())
            .map_err(|e| Error::parse("norm", e.to_string()))?;
        let ambient = Ambient::new(self.ambient_dim, self.field, norm)
            .map_err(|e| Error::parse("ambient_dim", e.to_string()))?;
        let pair = match &self.pair {
            Some([u, v]) => Some((
                vector(u, "pair[0]".into(), &ambient)?,
                vector(v, "pair[1]".into(), &ambient)?,
            )),
            None => None,
        };
        let basis = if self.basis.is_empty() {
            match &pair {
                Some((u, v)) => vec![u.clone(), v.clone()],
                None => return Err(Error::parse("basis", "need a nonempty `basis` or a `pair`")),
            }
        } else {
            self.basis
                .iter()
                .enumerate()
                .map(|(i, b)| vector(b, format!("basis[{i}]"), &ambient))
                .collect::<Result<Vec<_>>>()?
        };
        let subspace = Subspace::new(ambient.clone(), basis).map_err(|e| Error::parse("basis", e.to_string()))?;
        Ok(Problem {
            ambient,
            subspace,
            pair,
        })
    }
}

/// Parses and validates a problem file.
pub fn load_problem(text: &str) -> Result<Problem> {
    ProblemFile::from_json(text)?.validate()
}
