//! Constructive maps between the obstructions to (stable) phase retrieval:
//! disjoint pairs, almost disjoint pairs, almost perpendicular pairs and
//! pairs violating the SPR inequality.
//!
//! Every builder re-measures its output and fails with a diagnostic when an
//! inequality it is supposed to guarantee does not hold numerically.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{ensure_le, Error, Result};
use crate::hilbert::{fit_hilbert_norm, orthogonal_reduce, reduce_pair};
use crate::lattice::{disjointness, modulus_gap, perp_measure, Ambient, CplxVec};
use crate::linalg::ensure_independent;
use crate::phase::{separation, spr_ratio, RatioReport};
use crate::search::PairWitness;

/// Absolute slack on every asserted inequality (inputs are normalized).
pub const ASSERT_TOL: f64 = 1e-8;

/// Factor turning the strict `C > max{…}` into a floating-point-safe margin.
pub const STRICT_MARGIN: f64 = 1.01;

/// Tolerance for `‖u‖ = ‖v‖ = 1` on inputs.
const NORMALIZED_TOL: f64 = 1e-10;

/// Upper end `1/√2 − 1/2` of the admissible separation levels.
pub fn m_max() -> f64 {
    1.0 / SQRT_2 - 0.5
}

/// `m(θ) = (1−θ)/√2 + √(1+(1−θ)²)/(2√2) − 1`, strictly decreasing on `[0, 1]`.
pub fn m_of_theta(theta: f64) -> f64 {
    let s = 1.0 - theta;
    s / SQRT_2 + (1.0 + s * s).sqrt() / (2.0 * SQRT_2) - 1.0
}

fn check_m(m: f64) -> Result<()> {
    if m > 0.0 && m < m_max() {
        Ok(())
    } else {
        Err(Error::param("m", format!("must lie in (0, {}), got {m}", m_max())))
    }
}

/// Solves `m(θ) = m` by bisection to `1e-12`.
pub fn theta_for_m(m: f64) -> Result<f64> {
    check_m(m)?;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if m_of_theta(mid) > m {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `δ = (1 + (1 + m/2)²)^{-½}`, chosen so that `√(1−δ²) − δ = δm/2`.
pub fn delta_for_m(m: f64) -> f64 {
    (1.0 + (1.0 + 0.5 * m).powi(2)).powf(-0.5)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BuilderParams {
    pub m: f64,
    pub epsilon: f64,
    pub theta: f64,
    pub delta: f64,
    /// `1.01 · max{8√2/((1+(1−θ)²)ε²), 2√2/θ}`.
    pub c_required: f64,
}

impl BuilderParams {
    pub fn new(m: f64, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::param("epsilon", format!("must be positive, got {epsilon}")));
        }
        let theta = theta_for_m(m)?;
        let s = 1.0 - theta;
        let c_required = STRICT_MARGIN
            * (8.0 * SQRT_2 / ((1.0 + s * s) * epsilon * epsilon)).max(2.0 * SQRT_2 / theta);
        Ok(BuilderParams {
            m,
            epsilon,
            theta,
            delta: delta_for_m(m),
            c_required,
        })
    }
}

fn check_normalized(ambient: &Ambient, pairs: [(&str, &CplxVec); 2]) -> Result<()> {
    for (name, x) in pairs {
        ambient.check_vector(x)?;
        let n = ambient.norm(x)?;
        if (n - 1.0).abs() > NORMALIZED_TOL {
            return Err(Error::Precondition {
                what: "normalized input",
                detail: format!("‖{name}‖ = {n}"),
            });
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrFailure {
    /// `F = f + g`.
    pub f_sum: CplxVec,
    /// `G = f − g`.
    pub g_diff: CplxVec,
    /// `max |(|F| − |G|)|`, zero up to rounding.
    pub modulus_residual: f64,
}

/// A disjoint pair `f, g` yields `F = f+g`, `G = f−g` with `|F| = |G|`.
pub fn disjoint_to_pr_failure(f: &CplxVec, g: &CplxVec, ambient: &Ambient) -> Result<PrFailure> {
    ambient.check_vector(f)?;
    ambient.check_vector(g)?;
    let scale = f.max_modulus().max(g.max_modulus());
    if f.max_modulus() == 0.0 || g.max_modulus() == 0.0 {
        return Err(Error::param("pair", "inputs must be nonzero"));
    }
    let atol = 1e-12 * scale;
    if let Some(i) = (0..f.len()).find(|&i| f.as_slice()[i].norm().min(g.as_slice()[i].norm()) > atol) {
        return Err(Error::Precondition {
            what: "disjoint inputs",
            detail: format!(
                "|f| ∧ |g| = {} at index {i}",
                f.as_slice()[i].norm().min(g.as_slice()[i].norm())
            ),
        });
    }
    let f_sum = f + g;
    let g_diff = f - g;
    let modulus_residual = f_sum
        .iter()
        .zip(g_diff.iter())
        .fold(0.0f64, |m, (a, b)| m.max((a.norm() - b.norm()).abs()));
    ensure_le("|F| = |G|", modulus_residual, 4.0 * atol + 1e-15 * scale)?;
    ensure_independent(&[f_sum.clone(), g_diff.clone()])?;
    Ok(PrFailure {
        f_sum,
        g_diff,
        modulus_residual,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdpCertificate {
    pub f_prime: CplxVec,
    pub g_prime: CplxVec,
    /// `ε′ = ‖ |u| ∧ |v| ‖`.
    pub epsilon: f64,
    pub distortion_k: f64,
    pub mu: Complex64,
    pub r: f64,
    /// `min_λ ‖f′ − λg′‖`, `‖ |f′| − |g′| ‖` and their ratio.
    pub report: RatioReport,
}

/// Almost disjoint pair ⇒ SPR violation: Hilbert fit on `span{u, v}`, phase
/// alignment, orthogonal reduction. The output satisfies
/// `‖ |f′| − |g′| ‖ ≤ 2ε′` and `min_λ ‖f′ − λg′‖ ≥ √2`, so its ratio exceeds
/// `1/(√2 ε′)`.
pub fn adp_to_spr_violation(u: &CplxVec, v: &CplxVec, ambient: &Ambient) -> Result<AdpCertificate> {
    check_normalized(ambient, [("u", u), ("v", v)])?;
    let epsilon = disjointness(u, v, &ambient.norm)?;
    if !(epsilon < 1.0) {
        return Err(Error::Precondition {
            what: "‖|u| ∧ |v|‖ < 1",
            detail: format!("‖|u| ∧ |v|‖ = {epsilon}"),
        });
    }
    let form = fit_hilbert_norm(u, v, ambient)?;
    let (_, reduced) = reduce_pair(u, v, &form)?;
    let report = spr_ratio(&reduced.f_prime, &reduced.g_prime, ambient)?;
    ensure_le("‖|f'|-|g'|‖ <= 2ε'", report.denominator, 2.0 * epsilon + ASSERT_TOL)?;
    ensure_le("min_λ‖f'-λg'‖ >= √2", SQRT_2 - ASSERT_TOL, report.numerator)?;
    Ok(AdpCertificate {
        f_prime: reduced.f_prime,
        g_prime: reduced.g_prime,
        epsilon,
        distortion_k: form.distortion_k,
        mu: reduced.mu,
        r: reduced.r,
        report,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerpConstruction {
    pub witness: PairWitness,
    pub params: BuilderParams,
    /// Ratio of the input pair, which must exceed `C_required`.
    pub input_ratio: RatioReport,
    /// Reduced pair rescaled so that `‖f′‖ = 1 ≥ ‖g′‖`.
    pub f_prime: CplxVec,
    pub g_prime: CplxVec,
    pub distortion_k: f64,
    /// `‖g′‖ < 1 − θ`: the ratio cleared `C_required` too narrowly for the
    /// argument's intermediate bound to survive rounding.
    pub marginal: bool,
}

/// SPR violation ⇒ separated almost perpendicular pair.
///
/// `(f, g)` is reduced to an `H`-orthogonal pair `(f′, g′)` with
/// `‖ |f′| − |g′| ‖ ≤ ‖ |f| − |g| ‖` (after rotating `g` so that `⟨f, g⟩_H ≥ 0`),
/// rescaled to `‖f′‖ = 1 ≥ ‖g′‖`, and `u, v` are the normalized
/// `(f′ ± g′)/2`. The outputs satisfy `min_λ ‖u − λv‖ ≥ m` and `perp(u, v) < ε`.
pub fn spr_failure_to_perp_pair(
    f: &CplxVec,
    g: &CplxVec,
    ambient: &Ambient,
    params: &BuilderParams,
) -> Result<PerpConstruction> {
    ambient.check_vector(f)?;
    ambient.check_vector(g)?;
    let input_ratio = spr_ratio(f, g, ambient)?;
    if !input_ratio.ratio.exceeds(params.c_required) {
        return Err(Error::RatioHypothesis {
            required: params.c_required,
            measured: input_ratio.ratio.to_string(),
        });
    }
    let form = fit_hilbert_norm(f, g, ambient)?;
    let ip = form.inner(f, g)?;
    let rot = if ip.norm() > 0.0 { ip / ip.norm() } else { Complex64::new(1.0, 0.0) };
    let g_rot = g.scale(rot);
    let reduced = orthogonal_reduce(f, &g_rot, &form)?;

    let (mut fp, mut gp) = (reduced.f_prime, reduced.g_prime);
    if ambient.norm(&gp)? > ambient.norm(&fp)? {
        std::mem::swap(&mut fp, &mut gp);
    }
    let nf = ambient.norm(&fp)?;
    let fp = fp.scale_real(1.0 / nf);
    let gp = gp.scale_real(1.0 / nf);
    let marginal = ambient.norm(&gp)? < 1.0 - params.theta;

    let u_raw = (&fp + &gp).scale_real(0.5);
    let v_raw = (&fp - &gp).scale_real(0.5);
    let witness = PairWitness::normalized(&u_raw, &v_raw, ambient)?;
    ensure_le("min_λ‖u-λv‖ >= m", params.m - ASSERT_TOL, witness.separation)?;
    if !(witness.perp < params.epsilon) {
        return Err(Error::Assertion {
            what: "perp(u,v) < ε",
            lhs: witness.perp,
            rhs: params.epsilon,
        });
    }
    Ok(PerpConstruction {
        witness,
        params: *params,
        input_ratio,
        f_prime: fp,
        g_prime: gp,
        distortion_k: form.distortion_k,
        marginal,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SprFailure {
    pub f: CplxVec,
    pub g: CplxVec,
    pub report: RatioReport,
    pub perp: f64,
    pub delta: f64,
    /// Sampled `min ‖αu + βv‖` over `|α|² + |β|² = 1`.
    pub m_sampled: f64,
    /// The analytic lower bound `δm/2` for it.
    pub m_bound: f64,
}

/// Grid size per angle for sampling `αu + βv` on the unit sphere of `ℂ²`.
const SPHERE_GRID: usize = 96;

/// `min ‖αu + βv‖` over `α = cos t`, `β = e^{iφ} sin t`. A global phase
/// does not change the norm, so `α ≥ 0` loses nothing.
fn sampled_sphere_min(u: &CplxVec, v: &CplxVec, ambient: &Ambient) -> Result<f64> {
    let mut best = f64::INFINITY;
    for a in 0..=SPHERE_GRID {
        let t = 0.5 * PI * a as f64 / SPHERE_GRID as f64;
        for b in 0..SPHERE_GRID {
            let phi = 2.0 * PI * b as f64 / SPHERE_GRID as f64;
            let beta = Complex64::from_polar(t.sin(), phi);
            let x = &u.scale_real(t.cos()) + &v.scale(beta);
            best = best.min(ambient.norm(&x)?);
        }
    }
    Ok(best)
}

/// Separated almost perpendicular pair ⇒ SPR violation at constant `C`:
/// `f = u + v`, `g = u − v` satisfy `min_λ ‖f − λg‖ > C ‖ |f| − |g| ‖`.
pub fn perp_pair_to_spr_failure(u: &CplxVec, v: &CplxVec, ambient: &Ambient, m: f64, c: f64) -> Result<SprFailure> {
    // Any positive m works here; the upper limit only matters for θ.
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::param("m", format!("must be positive, got {m}")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::param("C", format!("must be positive, got {c}")));
    }
    check_normalized(ambient, [("u", u), ("v", v)])?;
    let sep = separation(u, v, ambient)?;
    if sep < m - ASSERT_TOL {
        return Err(Error::Precondition {
            what: "min_λ‖u-λv‖ >= m",
            detail: format!("separation {sep} is below m = {m} by {}", m - sep),
        });
    }
    let delta = delta_for_m(m);
    let perp = perp_measure(u, v, &ambient.norm)?;
    let limit = delta * m / (2.0 * c);
    if !(perp < limit) {
        return Err(Error::Precondition {
            what: "perp(u,v) < δm/(2C)",
            detail: format!("perp {perp} exceeds δm/(2C) = {limit} by {}", perp - limit),
        });
    }
    let f = u + v;
    let g = u - v;
    ensure_independent(&[f.clone(), g.clone()])?;
    let gap = modulus_gap(&f, &g, &ambient.norm)?;
    ensure_le("‖|f|-|g|‖ <= 2 perp(u,v)", gap, 2.0 * perp + ASSERT_TOL)?;
    let m_bound = 0.5 * delta * m;
    let m_sampled = sampled_sphere_min(u, v, ambient)?;
    ensure_le("min ‖αu+βv‖ >= δm/2", m_bound - ASSERT_TOL, m_sampled)?;
    let report = spr_ratio(&f, &g, ambient)?;
    if !report.ratio.exceeds(c) {
        return Err(Error::Assertion {
            what: "min_λ‖f-λg‖ > C‖|f|-|g|‖",
            lhs: report.ratio.value(),
            rhs: c,
        });
    }
    Ok(SprFailure {
        f,
        g,
        report,
        perp,
        delta,
        m_sampled,
        m_bound,
    })
}

/// The four characterizations of a PR failure evaluated on one pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PrEquivalences {
    /// `|u| = |v|` for `u = f + g`, `v = f − g`.
    pub equal_moduli: bool,
    /// `|f − g| = |f + g|`.
    pub sum_difference: bool,
    /// `|Re(f ḡ)|^½ = 0`.
    pub perpendicular: bool,
    /// `|f + g| = (|f|² + |g|²)^½`.
    pub pythagorean: bool,
}

impl PrEquivalences {
    pub fn agree(&self) -> bool {
        let all = [self.equal_moduli, self.sum_difference, self.perpendicular, self.pythagorean];
        all.iter().all(|b| *b) || all.iter().all(|b| !*b)
    }

    pub fn all(&self) -> bool {
        self.equal_moduli && self.sum_difference && self.perpendicular && self.pythagorean
    }
}

/// Evaluates the conditions coordinatewise within `atol`. Condition (3) has
/// the units of a square root, so it is compared as `|Re(f ḡ)| ≤ atol·sᵢ`
/// with `sᵢ = |fᵢ| + |gᵢ|`, the scale at which the other three are tested.
pub fn complex_pr_equivalences(f: &CplxVec, g: &CplxVec, atol: f64) -> Result<PrEquivalences> {
    crate::lattice::same_dim(f.len(), g.len())?;
    if !(atol >= 0.0) {
        return Err(Error::param("atol", format!("must be nonnegative, got {atol}")));
    }
    ensure_independent(&[f.clone(), g.clone()])?;
    let u = f + g;
    let v = f - g;
    let mut out = PrEquivalences {
        equal_moduli: true,
        sum_difference: true,
        perpendicular: true,
        pythagorean: true,
    };
    for i in 0..f.len() {
        let (a, b) = (f.as_slice()[i], g.as_slice()[i]);
        let (s, d) = (u.as_slice()[i].norm(), v.as_slice()[i].norm());
        out.equal_moduli &= (s - d).abs() <= atol;
        out.sum_difference &= (d - s).abs() <= atol;
        out.perpendicular &= (a * b.conj()).re.abs() <= atol * (a.norm() + b.norm());
        out.pythagorean &= (s - a.norm().hypot(b.norm())).abs() <= atol;
    }
    if !out.agree() {
        return Err(Error::Precondition {
            what: "equivalent PR conditions agree",
            detail: format!("{out:?}; the pair is within rounding of the boundary"),
        });
    }
    Ok(out)
}
