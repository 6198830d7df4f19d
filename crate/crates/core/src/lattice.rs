//! Coordinate Banach lattices over ℝ and ℂ.
//!
//! Vectors live in ℝⁿ or ℂⁿ with the pointwise order. Lattice operations,
//! the modulus of the complexification and every functional-calculus
//! expression used by the crate are literal coordinatewise formulas here.
//! Norms are weighted p-norms of the modulus, which are lattice norms for
//! every `1 <= p <= ∞` and strictly positive weights.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// Real vector with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct RealVec(Vec<f64>);

impl RealVec {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if let Some(index) = entries.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(RealVec(entries))
    }

    pub fn zeros(n: usize) -> Self {
        RealVec(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &f64> + '_ {
        self.0.iter()
    }

    /// Coordinatewise `self <= other`, with slack `tol`.
    pub fn le(&self, other: &RealVec, tol: f64) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| *a <= *b + tol)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

impl From<RealVec> for Vec<f64> {
    fn from(v: RealVec) -> Self {
        v.0
    }
}

/// Element of the complexification `X ⊕ iX`.
#[derive(Clone, Debug, PartialEq)]
pub struct CplxVec(Vec<Complex64>);

impl CplxVec {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if let Some(index) = entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(CplxVec(entries))
    }

    pub fn from_parts(re: &RealVec, im: &RealVec) -> Result<Self> {
        same_dim(re.len(), im.len())?;
        Ok(CplxVec(
            re.iter()
                .zip(im.iter())
                .map(|(a, b)| Complex64::new(*a, *b))
                .collect(),
        ))
    }

    pub fn from_real(re: &RealVec) -> Self {
        CplxVec(re.iter().map(|a| Complex64::new(*a, 0.0)).collect())
    }

    /// Convenience constructor from `(re, im)` pairs. Panics on non-finite input.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Self {
        CplxVec::new(pairs.iter().map(|&(a, b)| Complex64::new(a, b)).collect())
            .expect("finite entries")
    }

    /// Convenience constructor from real entries. Panics on non-finite input.
    pub fn real(entries: &[f64]) -> Self {
        CplxVec::from_real(&RealVec::new(entries.to_vec()).expect("finite entries"))
    }

    pub fn zeros(n: usize) -> Self {
        CplxVec(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &Complex64> + '_ {
        self.0.iter()
    }

    pub fn re(&self) -> RealVec {
        RealVec(self.0.iter().map(|z| z.re).collect())
    }

    pub fn im(&self) -> RealVec {
        RealVec(self.0.iter().map(|z| z.im).collect())
    }

    pub fn is_real(&self) -> bool {
        self.0.iter().all(|z| z.im == 0.0)
    }

    pub fn scale(&self, c: Complex64) -> CplxVec {
        CplxVec(self.0.iter().map(|z| z * c).collect())
    }

    pub fn scale_real(&self, c: f64) -> CplxVec {
        CplxVec(self.0.iter().map(|z| z * c).collect())
    }

    pub fn try_add(&self, other: &CplxVec) -> Result<CplxVec> {
        same_dim(self.len(), other.len())?;
        Ok(self + other)
    }

    pub fn try_sub(&self, other: &CplxVec) -> Result<CplxVec> {
        same_dim(self.len(), other.len())?;
        Ok(self - other)
    }

    /// Largest coordinate modulus.
    pub fn max_modulus(&self) -> f64 {
        self.0.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Unweighted Euclidean inner product `Σ xᵢ conj(yᵢ)`.
    pub fn dot(&self, other: &CplxVec) -> Complex64 {
        self.0.iter().zip(&other.0).map(|(x, y)| x * y.conj()).sum()
    }

    pub(crate) fn from_unchecked(entries: Vec<Complex64>) -> Self {
        CplxVec(entries)
    }
}

impl<'a> Add<&'a CplxVec> for &'a CplxVec {
    type Output = CplxVec;

    /// Panics on dimension mismatch; use [`CplxVec::try_add`] for checked addition.
    fn add(self, rhs: &'a CplxVec) -> CplxVec {
        assert_eq!(self.len(), rhs.len(), "dimension mismatch");
        CplxVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl<'a> Sub<&'a CplxVec> for &'a CplxVec {
    type Output = CplxVec;

    fn sub(self, rhs: &'a CplxVec) -> CplxVec {
        assert_eq!(self.len(), rhs.len(), "dimension mismatch");
        CplxVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<Complex64> for &CplxVec {
    type Output = CplxVec;

    fn mul(self, rhs: Complex64) -> CplxVec {
        self.scale(rhs)
    }
}

pub(crate) fn same_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

fn zip_with(x: &RealVec, y: &RealVec, op: impl Fn(f64, f64) -> f64) -> Result<RealVec> {
    same_dim(x.len(), y.len())?;
    Ok(RealVec(
        x.0.iter().zip(&y.0).map(|(a, b)| op(*a, *b)).collect(),
    ))
}

/// Coordinatewise minimum `x ∧ y`.
pub fn meet(x: &RealVec, y: &RealVec) -> Result<RealVec> {
    zip_with(x, y, f64::min)
}

/// Coordinatewise maximum `x ∨ y`.
pub fn join(x: &RealVec, y: &RealVec) -> Result<RealVec> {
    zip_with(x, y, f64::max)
}

pub fn abs_real(x: &RealVec) -> RealVec {
    RealVec(x.0.iter().map(|a| a.abs()).collect())
}

/// `|z| = (|Re z|² + |Im z|²)^½` coordinatewise.
pub fn modulus(z: &CplxVec) -> RealVec {
    RealVec(z.0.iter().map(|c| c.norm()).collect())
}

/// `|xy|^½` coordinatewise, i.e. `(|x| ∨ |y|)^½ (|x| ∧ |y|)^½`.
pub fn abs_prod_sqrt(x: &RealVec, y: &RealVec) -> Result<RealVec> {
    zip_with(x, y, |a, b| (a * b).abs().sqrt())
}

/// `Re(f ḡ) = Re f·Re g + Im f·Im g` coordinatewise.
pub fn re_prod(f: &CplxVec, g: &CplxVec) -> Result<RealVec> {
    same_dim(f.len(), g.len())?;
    Ok(RealVec(
        f.0.iter()
            .zip(&g.0)
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .collect(),
    ))
}

/// `|Re(f ḡ)|^½` coordinatewise.
pub fn perp_profile(f: &CplxVec, g: &CplxVec) -> Result<RealVec> {
    let mut r = re_prod(f, g)?;
    for x in &mut r.0 {
        *x = x.abs().sqrt();
    }
    Ok(r)
}

/// `‖ |Re(f ḡ)|^½ ‖`; zero exactly for perpendicular pairs.
pub fn perp_measure(f: &CplxVec, g: &CplxVec, norm: &NormSpec) -> Result<f64> {
    norm.norm_real(&perp_profile(f, g)?)
}

/// `‖ |u| ∧ |v| ‖`; zero exactly for disjoint pairs.
pub fn disjointness(u: &CplxVec, v: &CplxVec, norm: &NormSpec) -> Result<f64> {
    norm.norm_real(&meet(&modulus(u), &modulus(v))?)
}

/// `‖ |u v|^½ ‖`.
pub fn product_measure(u: &CplxVec, v: &CplxVec, norm: &NormSpec) -> Result<f64> {
    norm.norm_real(&abs_prod_sqrt(&modulus(u), &modulus(v))?)
}

/// `‖ |f| − |g| ‖`.
pub fn modulus_gap(f: &CplxVec, g: &CplxVec, norm: &NormSpec) -> Result<f64> {
    same_dim(f.len(), g.len())?;
    norm.check_dim(f.len())?;
    Ok(norm.norm_of_moduli(
        f.0.iter().zip(&g.0).map(|(a, b)| (a.norm() - b.norm()).abs()),
    ))
}

/// Largest coordinatewise residuals of the functional-calculus identities at
/// one pair, each relative to `max(1, |f|², |g|²)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IdentityResiduals {
    /// `√|xy| = √(|x| ∨ |y|)·√(|x| ∧ |y|)` on the real parts.
    pub product_split: f64,
    /// `|Re(λf·conj(μg))|^½ = √(|λ||μ|)·|Re(f ḡ)|^½` for `λ = s·e^{iφ}`, `μ = t·e^{iφ}`.
    pub homogeneity: f64,
    /// `2|Re(f ḡ)|^½ = √||f+g|² − |f−g|²|`.
    pub difference_of_squares: f64,
    /// `2|Re(f ḡ)|^½ = √(|f+g| + |f−g|)·√||f+g| − |f−g||`.
    pub sum_difference: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        self.product_split
            .max(self.homogeneity)
            .max(self.difference_of_squares)
            .max(self.sum_difference)
    }
}

/// Homogeneity only holds when `λμ̄` is real, hence the shared phase `φ`
/// with real (possibly negative) moduli `s, t`.
pub fn identity_residuals(f: &CplxVec, g: &CplxVec, phi: f64, s: f64, t: f64) -> Result<IdentityResiduals> {
    same_dim(f.len(), g.len())?;
    let scale = f.max_modulus().max(g.max_modulus()).powi(2).max(1.0);
    let (x, y) = (f.re(), g.re());
    let (ax, ay) = (abs_real(&x), abs_real(&y));
    let lhs = abs_prod_sqrt(&x, &y)?;
    let (hi, lo) = (join(&ax, &ay)?, meet(&ax, &ay)?);
    let product_split = (0..x.len()).fold(0.0f64, |m, i| m.max((lhs.0[i] - hi.0[i].sqrt() * lo.0[i].sqrt()).abs()));

    let phase = Complex64::from_polar(1.0, phi);
    let scaled = perp_profile(&f.scale(phase * s), &g.scale(phase * t))?;
    let base = perp_profile(f, g)?;
    let factor = (s * t).abs().sqrt();
    let homogeneity = (0..x.len()).fold(0.0f64, |m, i| m.max((scaled.0[i] - factor * base.0[i]).abs()))
        / (s * t).abs().max(1.0);

    let (sum, diff) = (modulus(&(f + g)), modulus(&(f - g)));
    let (mut dsq, mut sd) = (0.0f64, 0.0f64);
    for i in 0..x.len() {
        let (a, b) = (sum.0[i], diff.0[i]);
        dsq = dsq.max((2.0 * base.0[i] - (a * a - b * b).abs().sqrt()).abs());
        sd = sd.max((2.0 * base.0[i] - (a + b).sqrt() * (a - b).abs().sqrt()).abs());
    }
    Ok(IdentityResiduals {
        product_split: product_split / scale,
        homogeneity: homogeneity / scale,
        difference_of_squares: dsq / scale,
        sum_difference: sd / scale,
    })
}

/// Exponent of a weighted p-norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

/// Weighted p-norm `(Σ wᵢ|xᵢ|^p)^{1/p}`, or `max wᵢ|xᵢ|` for `p = ∞`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormSpec {
    exponent: Exponent,
    weights: Option<Vec<f64>>,
}

impl NormSpec {
    pub fn new(exponent: Exponent, weights: Option<Vec<f64>>) -> Result<Self> {
        if let Exponent::Finite(p) = exponent {
            if !(p >= 1.0 && p.is_finite()) {
                return Err(Error::InvalidNorm(format!("p must lie in [1, ∞], got {p}")));
            }
        }
        if let Some(w) = &weights {
            if let Some(i) = w.iter().position(|x| !(x.is_finite() && *x > 0.0)) {
                return Err(Error::InvalidNorm(format!(
                    "weight {i} must be finite and strictly positive, got {}",
                    w[i]
                )));
            }
        }
        Ok(NormSpec { exponent, weights })
    }

    pub fn lp(p: f64) -> Result<Self> {
        NormSpec::new(Exponent::Finite(p), None)
    }

    pub fn l1() -> Self {
        NormSpec::new(Exponent::Finite(1.0), None).unwrap()
    }

    pub fn l2() -> Self {
        NormSpec::new(Exponent::Finite(2.0), None).unwrap()
    }

    pub fn linf() -> Self {
        NormSpec::new(Exponent::Infinity, None).unwrap()
    }

    pub fn exponent(&self) -> Exponent {
        self.exponent
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    /// True for the weighted 2-norm, where the norm comes from an inner product.
    pub fn is_euclidean(&self) -> bool {
        self.exponent == Exponent::Finite(2.0)
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        match &self.weights {
            Some(w) => same_dim(w.len(), n),
            None => Ok(()),
        }
    }

    #[inline]
    pub(crate) fn weight_at(&self, i: usize) -> f64 {
        self.weight(i)
    }

    fn weight(&self, i: usize) -> f64 {
        match &self.weights {
            Some(w) => w[i],
            None => 1.0,
        }
    }

    /// Norm of a vector given by its (nonnegative) coordinate moduli.
    /// The caller guarantees the length matches the weights.
    pub(crate) fn norm_of_moduli(&self, moduli: impl Iterator<Item = f64>) -> f64 {
        match self.exponent {
            Exponent::Infinity => moduli
                .enumerate()
                .fold(0.0, |m, (i, a)| m.max(self.weight(i) * a)),
            Exponent::Finite(p) if p == 1.0 => {
                moduli.enumerate().map(|(i, a)| self.weight(i) * a).sum()
            }
            Exponent::Finite(p) if p == 2.0 => moduli
                .enumerate()
                .map(|(i, a)| self.weight(i) * a * a)
                .sum::<f64>()
                .sqrt(),
            Exponent::Finite(p) if p.fract() == 0.0 && p <= 32.0 => moduli
                .enumerate()
                .map(|(i, a)| self.weight(i) * a.powi(p as i32))
                .sum::<f64>()
                .powf(1.0 / p),
            Exponent::Finite(p) => moduli
                .enumerate()
                .map(|(i, a)| self.weight(i) * a.powf(p))
                .sum::<f64>()
                .powf(1.0 / p),
        }
    }

    pub fn norm_real(&self, x: &RealVec) -> Result<f64> {
        self.check_dim(x.len())?;
        Ok(self.norm_of_moduli(x.0.iter().map(|a| a.abs())))
    }

    /// `‖z‖ = ‖ |z| ‖`.
    pub fn norm(&self, z: &CplxVec) -> Result<f64> {
        self.check_dim(z.len())?;
        Ok(self.norm_of_moduli(z.0.iter().map(|c| c.norm())))
    }

    /// Weighted Euclidean inner product `Σ wᵢ xᵢ conj(yᵢ)`.
    pub(crate) fn weighted_dot(&self, x: &CplxVec, y: &CplxVec) -> Complex64 {
        x.0.iter()
            .zip(&y.0)
            .enumerate()
            .map(|(i, (a, b))| a * b.conj() * self.weight(i))
            .sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::Real => "real",
            Field::Complex => "complex",
        })
    }
}

/// The lattice `X` a subspace sits in.
#[derive(Clone, Debug, PartialEq)]
pub struct Ambient {
    pub dim: usize,
    pub field: Field,
    pub norm: NormSpec,
}

impl Ambient {
    pub fn new(dim: usize, field: Field, norm: NormSpec) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("dim", "ambient dimension must be at least 1"));
        }
        norm.check_dim(dim)?;
        Ok(Ambient { dim, field, norm })
    }

    pub fn real(dim: usize, norm: NormSpec) -> Result<Self> {
        Ambient::new(dim, Field::Real, norm)
    }

    pub fn complex(dim: usize, norm: NormSpec) -> Result<Self> {
        Ambient::new(dim, Field::Complex, norm)
    }

    /// Checks dimension and, for a real ambient, that the vector is real.
    pub fn check_vector(&self, v: &CplxVec) -> Result<()> {
        same_dim(self.dim, v.len())?;
        if self.field == Field::Real && !v.is_real() {
            return Err(Error::param(
                "vector",
                "complex entries are not allowed in a real ambient lattice",
            ));
        }
        Ok(())
    }

    pub fn norm(&self, v: &CplxVec) -> Result<f64> {
        self.norm.norm(v)
    }
}

// JSON vector literals: a real vector is an array of numbers, a complex
// vector has every entry as `[re, im]`.
impl Serialize for RealVec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl Serialize for CplxVec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.len()))?;
        if self.is_real() {
            for z in &self.0 {
                seq.serialize_element(&z.re)?;
            }
        } else {
            for z in &self.0 {
                seq.serialize_element(&[z.re, z.im])?;
            }
        }
        seq.end()
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => s.serialize_f64(*p),
            Exponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl Serialize for NormSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(None)?;
        map.serialize_entry("p", &self.exponent)?;
        if let Some(w) = &self.weights {
            map.serialize_entry("weights", w)?;
        }
        map.end()
    }
}

impl Serialize for Ambient {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(3))?;
        map.serialize_entry("ambient_dim", &self.dim)?;
        map.serialize_entry("field", &self.field)?;
        map.serialize_entry("norm", &self.norm)?;
        map.end()
    }
}
