//! The quotient phase metric `min_{|λ|=1} ‖f − λg‖` and the SPR ratio.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{modulus_gap, same_dim, Ambient, CplxVec, Exponent, Field, NormSpec};

/// Default absolute tolerance of [`unimodular_distance`].
pub const DEFAULT_TOL: f64 = 1e-10;

/// Number of θ-grid points scanned before local refinement.
pub const GRID_POINTS: usize = 512;

/// At most this many grid brackets are refined.
const MAX_BRACKETS: usize = 16;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhaseAlignment {
    pub distance: f64,
    /// Minimizing unimodular scalar (±1 in the real field).
    pub lambda: Complex64,
}

/// Global minimum of `‖f − λg‖` over unimodular `λ`, to absolute tolerance `tol`.
///
/// The real field compares `λ = ±1` exactly. For a weighted 2-norm the closed
/// form `‖f‖² + ‖g‖² − 2|⟨f,g⟩|` is used. Otherwise a 512-point θ-grid locates
/// candidate brackets which are refined by golden-section search; the
/// objective is `‖g‖`-Lipschitz in θ so every bracket that could hide the
/// global minimum gets refined.
pub fn unimodular_distance(
    f: &CplxVec,
    g: &CplxVec,
    ambient: &Ambient,
    tol: f64,
) -> Result<PhaseAlignment> {
    same_dim(f.len(), g.len())?;
    same_dim(ambient.dim, f.len())?;
    if !(tol > 0.0) {
        return Err(Error::param("tol", format!("must be positive, got {tol}")));
    }
    let norm = &ambient.norm;
    let one = Complex64::new(1.0, 0.0);

    if ambient.field == Field::Real {
        let minus = norm.norm(&(f - g))?;
        let plus = norm.norm(&(f + g))?;
        return Ok(if plus < minus {
            PhaseAlignment { distance: plus, lambda: -one }
        } else {
            PhaseAlignment { distance: minus, lambda: one }
        });
    }

    if norm.is_euclidean() {
        let ff = norm.weighted_dot(f, f).re;
        let gg = norm.weighted_dot(g, g).re;
        let fg = norm.weighted_dot(f, g);
        let r = fg.norm();
        let lambda = if r > 0.0 { fg / r } else { one };
        let distance = (ff + gg - 2.0 * r).max(0.0).sqrt();
        return Ok(PhaseAlignment { distance, lambda });
    }

    let fs = f.as_slice();
    let gs = g.as_slice();
    if norm.exponent() == Exponent::Infinity && fs.len() <= EXACT_SUP_MAX_DIM {
        let g_norm = norm.norm(g)?;
        if g_norm == 0.0 {
            return Ok(PhaseAlignment { distance: norm.norm(f)?, lambda: one });
        }
        return Ok(sup_distance(fs, gs, norm, g_norm, tol));
    }
    scan_distance(f, g, norm, tol)
}

/// The grid-and-golden-section solver on its own, over complex unimodular
/// `λ` and without the closed-form shortcuts of [`unimodular_distance`].
pub fn unimodular_distance_numeric(
    f: &CplxVec,
    g: &CplxVec,
    ambient: &Ambient,
    tol: f64,
) -> Result<PhaseAlignment> {
    same_dim(f.len(), g.len())?;
    same_dim(ambient.dim, f.len())?;
    if !(tol > 0.0) {
        return Err(Error::param("tol", format!("must be positive, got {tol}")));
    }
    scan_distance(f, g, &ambient.norm, tol)
}

fn scan_distance(f: &CplxVec, g: &CplxVec, norm: &NormSpec, tol: f64) -> Result<PhaseAlignment> {
    let one = Complex64::new(1.0, 0.0);
    let g_norm = norm.norm(g)?;
    if g_norm == 0.0 {
        return Ok(PhaseAlignment { distance: norm.norm(f)?, lambda: one });
    }
    let fs = f.as_slice();
    let gs = g.as_slice();
    let at = |lambda: Complex64| {
        norm.norm_of_moduli(fs.iter().zip(gs).map(|(a, b)| (a - lambda * b).norm()))
    };
    let objective = |theta: f64| at(Complex64::from_polar(1.0, theta));

    let h = 2.0 * PI / GRID_POINTS as f64;
    let values: Vec<f64> = unit_grid().iter().map(|&l| at(l)).collect();
    let (mut best_theta, mut best) = values
        .iter()
        .enumerate()
        .fold((0.0, f64::INFINITY), |(bt, bv), (j, &v)| {
            if v < bv {
                (j as f64 * h, v)
            } else {
                (bt, bv)
            }
        });

    // Grid local minima, best first. On a cell [θⱼ, θⱼ₊₁] the objective is
    // bounded below by (vⱼ + vⱼ₊₁ − ‖g‖h)/2, so a bracket is skipped once
    // neither adjacent cell can undercut the incumbent.
    let lip = g_norm * h;
    let cell_floor = |j: usize, k: usize| 0.5 * (values[j] + values[k] - lip);
    let mut brackets: Vec<(f64, f64, usize)> = (0..GRID_POINTS)
        .filter_map(|j| {
            let prev = (j + GRID_POINTS - 1) % GRID_POINTS;
            let next = (j + 1) % GRID_POINTS;
            let local_min = values[j] <= values[prev] && values[j] <= values[next];
            local_min.then(|| (values[j], cell_floor(prev, j).min(cell_floor(j, next)), j))
        })
        .collect();
    brackets.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));

    let theta_tol = (tol / g_norm).max(1e-13);
    let mut refined = 0;
    for &(_, floor, j) in &brackets {
        if refined == MAX_BRACKETS || floor >= best - tol {
            continue;
        }
        refined += 1;
        let centre = j as f64 * h;
        let (theta, value) = golden_section(&objective, centre - h, centre + h, theta_tol);
        if value < best {
            best = value;
            best_theta = theta;
        }
    }

    Ok(PhaseAlignment {
        distance: best,
        lambda: Complex64::from_polar(1.0, best_theta),
    })
}

/// Exact ℓ∞ solve up to this dimension (the candidate set grows like n²).
const EXACT_SUP_MAX_DIM: usize = 16;

/// Weighted sup-norm case. Each squared term
/// `wᵢ²|fᵢ − e^{iθ}gᵢ|² = kᵢ − pᵢ cos θ + qᵢ sin θ` is a sinusoid of the same
/// frequency, so the minimum of their maximum sits at the minimum of a
/// single term or where two terms cross. All such angles are enumerated in
/// closed form, then the best one is polished by golden section.
fn sup_distance(fs: &[Complex64], gs: &[Complex64], norm: &NormSpec, g_norm: f64, tol: f64) -> PhaseAlignment {
    let terms: Vec<(f64, f64, f64)> = fs
        .iter()
        .zip(gs)
        .enumerate()
        .map(|(i, (a, b))| {
            let w2 = norm.weight_at(i).powi(2);
            let z = b * a.conj();
            (w2 * (a.norm_sqr() + b.norm_sqr()), 2.0 * w2 * z.re, 2.0 * w2 * z.im)
        })
        .collect();
    let mut candidates = vec![0.0];
    for (i, &(ki, pi, qi)) in terms.iter().enumerate() {
        // kᵢ − rᵢ cos(θ − φᵢ) with rᵢ e^{iφᵢ} = pᵢ − i qᵢ.
        candidates.push((-qi).atan2(pi));
        for &(kj, pj, qj) in &terms[i + 1..] {
            // (pᵢ − pⱼ) cos θ − (qᵢ − qⱼ) sin θ = kᵢ − kⱼ
            let (a, b, d) = (pi - pj, -(qi - qj), ki - kj);
            let r = a.hypot(b);
            if r > 0.0 && d.abs() <= r {
                let phase = b.atan2(a);
                let spread = (d / r).acos();
                candidates.push(phase + spread);
                candidates.push(phase - spread);
            }
        }
    }
    let objective = |theta: f64| {
        let lambda = Complex64::from_polar(1.0, theta);
        norm.norm_of_moduli(fs.iter().zip(gs).map(|(a, b)| (a - lambda * b).norm()))
    };
    let (mut best_theta, mut best) = candidates
        .iter()
        .map(|&t| (t, objective(t)))
        .fold((0.0, f64::INFINITY), |acc, c| if c.1 < acc.1 { c } else { acc });
    // Candidate angles can be off by ~√ε near tangencies.
    let theta_tol = (tol / g_norm).max(1e-13);
    let (t, v) = golden_section(&objective, best_theta - 1e-6, best_theta + 1e-6, theta_tol);
    if v < best {
        best = v;
        best_theta = t;
    }
    PhaseAlignment {
        distance: best,
        lambda: Complex64::from_polar(1.0, best_theta),
    }
}

fn unit_grid() -> &'static [Complex64] {
    static GRID: OnceLock<Vec<Complex64>> = OnceLock::new();
    GRID.get_or_init(|| {
        let h = 2.0 * PI / GRID_POINTS as f64;
        (0..GRID_POINTS).map(|j| Complex64::from_polar(1.0, j as f64 * h)).collect()
    })
}

/// Separation of a pair at the default tolerance.
pub fn separation(u: &CplxVec, v: &CplxVec, ambient: &Ambient) -> Result<f64> {
    Ok(unimodular_distance(u, v, ambient, DEFAULT_TOL)?.distance)
}

fn golden_section(objective: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = objective(c);
    let mut fd = objective(d);
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = objective(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Outcome of an SPR ratio evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Ratio {
    Finite(f64),
    /// `|f| = |g|` but `f` is not a unimodular multiple of `g`: a PR failure.
    Infinite,
    /// `f ~ g`: both sides of the SPR inequality vanish.
    Degenerate,
}

impl Ratio {
    /// Numeric value; `+∞` for [`Ratio::Infinite`] and NaN for [`Ratio::Degenerate`].
    pub fn value(&self) -> f64 {
        match *self {
            Ratio::Finite(r) => r,
            Ratio::Infinite => f64::INFINITY,
            Ratio::Degenerate => f64::NAN,
        }
    }

    /// Strictly greater than `c`.
    pub fn exceeds(&self, c: f64) -> bool {
        match *self {
            Ratio::Finite(r) => r > c,
            Ratio::Infinite => true,
            Ratio::Degenerate => false,
        }
    }
}

impl std::fmt::Display for Ratio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Ratio::Finite(r) => write!(f, "{r}"),
            Ratio::Infinite => f.write_str("infinite"),
            Ratio::Degenerate => f.write_str("degenerate"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatioReport {
    /// `min_{|λ|=1} ‖f − λg‖`.
    pub numerator: f64,
    /// `‖ |f| − |g| ‖`.
    pub denominator: f64,
    pub ratio: Ratio,
}

/// Zero-test threshold for a pair: `1e-9 · max(‖f‖, ‖g‖, 1)`.
pub fn pair_atol(f: &CplxVec, g: &CplxVec, ambient: &Ambient) -> Result<f64> {
    Ok(1e-9 * ambient.norm(f)?.max(ambient.norm(g)?).max(1.0))
}

/// The ratio `min_{|λ|=1} ‖f − λg‖ / ‖ |f| − |g| ‖` measured by the SPR inequality.
pub fn spr_ratio(f: &CplxVec, g: &CplxVec, ambient: &Ambient) -> Result<RatioReport> {
    let numerator = unimodular_distance(f, g, ambient, DEFAULT_TOL)?.distance;
    let denominator = modulus_gap(f, g, &ambient.norm)?;
    let atol = pair_atol(f, g, ambient)?;
    let ratio = if denominator <= atol {
        if numerator <= atol {
            Ratio::Degenerate
        } else {
            Ratio::Infinite
        }
    } else {
        Ratio::Finite(numerator / denominator)
    };
    Ok(RatioReport {
        numerator,
        denominator,
        ratio,
    })
}
