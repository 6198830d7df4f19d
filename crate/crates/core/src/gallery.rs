//! Built-in example subspaces.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{perp_measure, Ambient, CplxVec, NormSpec};
use crate::phase::separation;
use crate::search::Subspace;

/// `E = span{u, w} ⊂ ℓ∞⁴` with `u = (1,1,1,0)`, `w = (1,i,0,1)`, and the
/// normalized pair `(u, v)`, `v = A(iu + δw)`, `A = 1/(1+δ)`.
///
/// `E` does phase retrieval, yet `perp(u, v) = √(Aδ)` can be made as small
/// as desired. The pair escapes the SPR mechanism because its separation
/// is also small, at most `2Aδ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct C4Example {
    pub delta: f64,
    pub space: Subspace,
    pub u: CplxVec,
    pub v: CplxVec,
    /// Measured `perp(u, v)`.
    pub perp: f64,
    /// Closed form `√(Aδ)`.
    pub perp_exact: f64,
    /// Measured `min_λ ‖u − λv‖∞`.
    pub separation: f64,
    /// Analytic upper bound `2Aδ` on the separation.
    pub separation_bound: f64,
}

pub fn example_c4(delta: f64) -> Result<C4Example> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param("delta", format!("must lie in (0, 1), got {delta}")));
    }
    let ambient = Ambient::complex(4, NormSpec::linf())?;
    let i = Complex64::i();
    let u = CplxVec::real(&[1.0, 1.0, 1.0, 0.0]);
    let w = CplxVec::from_pairs(&[(1.0, 0.0), (0.0, 1.0), (0.0, 0.0), (1.0, 0.0)]);
    let a = 1.0 / (1.0 + delta);
    let v = (&u.scale(i) + &w.scale_real(delta)).scale_real(a);
    let space = Subspace::new(ambient.clone(), vec![u.clone(), w])?;
    Ok(C4Example {
        delta,
        perp: perp_measure(&u, &v, &ambient.norm)?,
        perp_exact: (a * delta).sqrt(),
        separation: separation(&u, &v, &ambient)?,
        separation_bound: 2.0 * a * delta,
        space,
        u,
        v,
    })
}
