//! Hilbert norms on two-dimensional spans and the orthogonal reduction.
//!
//! A [`HilbertForm`] is a Hermitian positive-definite form `G` on the
//! coefficient space of `span{f, g}`: for `h = c₀f + c₁g`,
//! `‖h‖_H² = Σ conj(cⱼ) Gⱼₖ cₖ` and `⟨x, y⟩_H` is linear in `x`.
//! The fit minimizes the measured distortion `max ρ / min ρ` of
//! `ρ(h) = ‖h‖_H / ‖h‖` over the unit sphere of the span (modulo phase),
//! then rescales `G` so that `min ρ = 1`, i.e. `‖h‖ ≤ ‖h‖_H ≤ K‖h‖`.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use num_complex::Complex64;
use serde::Serialize;
use minilp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::{ensure_le, Error, Result};
use crate::lattice::{Ambient, CplxVec, Field};
use crate::linalg::{coordinates2, ensure_independent};
use crate::optim::NelderMead;

/// Fits with distortion above `√2 + FIT_SLACK` are rejected.
pub const FIT_SLACK: f64 = 0.05;

/// Sphere samples used to measure distortion during the fit.
pub const SPHERE_SAMPLES: usize = 2048;

/// Relative residual above which a vector is considered outside the span.
const SPAN_TOL: f64 = 1e-8;

const CUT_ROUNDS: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HilbertForm {
    pub basis: [CplxVec; 2],
    /// Hermitian positive-definite Gram matrix on coefficients.
    pub gram: [[Complex64; 2]; 2],
    /// Measured `K` with `‖h‖ ≤ ‖h‖_H ≤ K‖h‖`.
    pub distortion_k: f64,
}

fn quad(gram: &[[Complex64; 2]; 2], c: &[Complex64; 2]) -> f64 {
    gram[0][0].re * c[0].norm_sqr()
        + gram[1][1].re * c[1].norm_sqr()
        + 2.0 * (c[0].conj() * gram[0][1] * c[1]).re
}

fn sesq(gram: &[[Complex64; 2]; 2], x: &[Complex64; 2], y: &[Complex64; 2]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..2 {
        for k in 0..2 {
            acc += y[j].conj() * gram[j][k] * x[k];
        }
    }
    acc
}

impl HilbertForm {
    /// Builds a form from an explicit Gram matrix, measuring its distortion.
    pub fn from_gram(
        basis: [CplxVec; 2],
        gram: [[Complex64; 2]; 2],
        ambient: &Ambient,
    ) -> Result<Self> {
        let herm = (gram[0][1] - gram[1][0].conj()).norm();
        let det = gram[0][0].re * gram[1][1].re - gram[0][1].norm_sqr();
        if herm > 1e-12 * (gram[0][0].re.abs() + gram[1][1].re.abs())
            || gram[0][0].im.abs() > 0.0
            || gram[1][1].im.abs() > 0.0
            || !(gram[0][0].re > 0.0 && det > 0.0)
        {
            return Err(Error::param("gram", "must be Hermitian positive definite"));
        }
        let mut form = HilbertForm {
            basis,
            gram,
            distortion_k: 1.0,
        };
        let (lo, hi) = form.measure_distortion(ambient, SPHERE_SAMPLES)?;
        form.distortion_k = hi / lo;
        Ok(form)
    }

    /// Coordinates of `h` in the basis; fails if `h` is not in the span.
    pub fn coefficients(&self, h: &CplxVec) -> Result<[Complex64; 2]> {
        crate::lattice::same_dim(self.basis[0].len(), h.len())?;
        let (c, residual) = coordinates2(&self.basis, h);
        if residual > SPAN_TOL {
            return Err(Error::OutsideSpan { residual });
        }
        Ok(c)
    }

    pub fn combine(&self, c: &[Complex64; 2]) -> CplxVec {
        &self.basis[0].scale(c[0]) + &self.basis[1].scale(c[1])
    }

    pub fn inner_coeffs(&self, x: &[Complex64; 2], y: &[Complex64; 2]) -> Complex64 {
        sesq(&self.gram, x, y)
    }

    pub fn norm_coeffs(&self, c: &[Complex64; 2]) -> f64 {
        quad(&self.gram, c).max(0.0).sqrt()
    }

    /// `⟨x, y⟩_H`, linear in `x` and conjugate-linear in `y`.
    pub fn inner(&self, x: &CplxVec, y: &CplxVec) -> Result<Complex64> {
        Ok(self.inner_coeffs(&self.coefficients(x)?, &self.coefficients(y)?))
    }

    pub fn norm_h(&self, x: &CplxVec) -> Result<f64> {
        Ok(self.norm_coeffs(&self.coefficients(x)?))
    }

    /// Extremes `(min ρ, max ρ)` of `ρ(h) = ‖h‖_H / ‖h‖` over a sampled sphere
    /// of the span, each polished by local search.
    pub fn measure_distortion(&self, ambient: &Ambient, samples: usize) -> Result<(f64, f64)> {
        let sphere = Sphere::new(&self.basis, ambient, samples)?;
        let (lo, hi) = sphere.extremes(&self.gram, true);
        Ok((lo.sqrt(), hi.sqrt()))
    }
}

/// Sampled unit sphere of a two-dimensional span, modulo phase.
struct Sphere<'a> {
    basis: &'a [CplxVec; 2],
    ambient: &'a Ambient,
    /// `(angles, coefficients, ‖h‖²)`
    points: Vec<([f64; 2], [Complex64; 2], f64)>,
}

impl<'a> Sphere<'a> {
    fn new(basis: &'a [CplxVec; 2], ambient: &'a Ambient, samples: usize) -> Result<Self> {
        let mut sphere = Sphere {
            basis,
            ambient,
            points: Vec::with_capacity(samples + 2),
        };
        match ambient.field {
            Field::Real => {
                for j in 0..samples {
                    sphere.push([PI * j as f64 / samples as f64, 0.0])?;
                }
            }
            Field::Complex => {
                // t ∈ (0, π/2) × φ ∈ [0, 2π) covers CP¹; the poles are added explicitly.
                let nphi = ((2 * samples) as f64).sqrt().round().max(4.0) as usize;
                let nt = (samples / nphi).max(2);
                for i in 0..nt {
                    let t = FRAC_PI_2 * (i as f64 + 0.5) / nt as f64;
                    for k in 0..nphi {
                        sphere.push([t, 2.0 * PI * k as f64 / nphi as f64])?;
                    }
                }
                sphere.push([0.0, 0.0])?;
                sphere.push([FRAC_PI_2, 0.0])?;
            }
        }
        Ok(sphere)
    }

    fn coeffs(angles: [f64; 2]) -> [Complex64; 2] {
        [
            Complex64::new(angles[0].cos(), 0.0),
            Complex64::from_polar(angles[0].sin(), angles[1]),
        ]
    }

    fn lattice_sq(&self, c: &[Complex64; 2]) -> f64 {
        let b0 = self.basis[0].as_slice();
        let b1 = self.basis[1].as_slice();
        let n = self
            .ambient
            .norm
            .norm_of_moduli(b0.iter().zip(b1).map(|(x, y)| (c[0] * x + c[1] * y).norm()));
        n * n
    }

    fn push(&mut self, angles: [f64; 2]) -> Result<()> {
        let c = Self::coeffs(angles);
        let n2 = self.lattice_sq(&c);
        if !(n2 > 0.0) {
            return Err(Error::Dependent { gram_det: 0.0 });
        }
        self.points.push((angles, c, n2));
        Ok(())
    }

    /// Squared ratio `‖h‖_H² / ‖h‖²` at a given angle.
    fn ratio_sq_at(&self, gram: &[[Complex64; 2]; 2], angles: &[f64]) -> f64 {
        let c = Self::coeffs([angles[0], *angles.get(1).unwrap_or(&0.0)]);
        quad(gram, &c) / self.lattice_sq(&c)
    }

    fn sampled_extremes(&self, gram: &[[Complex64; 2]; 2]) -> (f64, f64) {
        self.points.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), (_, c, n2)| {
            let r = quad(gram, c) / n2;
            (lo.min(r), hi.max(r))
        })
    }

    /// Local extremes of the squared ratio, polished by Nelder–Mead.
    /// Returns the polished `(min, max)` and, if `add` is set, the polished
    /// points are appended to the sample set.
    fn refine(&mut self, gram: &[[Complex64; 2]; 2], add: bool) -> (f64, f64) {
        let mut ranked: Vec<(f64, usize)> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, (_, c, n2))| (quad(gram, c) / n2, i))
            .collect();
        ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let dims = if self.ambient.field == Field::Real { 1 } else { 2 };
        let nm = NelderMead {
            max_iters: 300,
            initial_step: 0.02,
            xtol: 1e-12,
            ftol: 1e-15,
            polish_rounds: 1,
        };
        let (mut lo, mut hi) = self.sampled_extremes(gram);
        let picks: Vec<(usize, bool)> = ranked
            .iter()
            .take(3)
            .map(|&(_, i)| (i, false))
            .chain(ranked.iter().rev().take(3).map(|&(_, i)| (i, true)))
            .collect();
        let mut extra = Vec::new();
        for (i, maximize) in picks {
            let start = &self.points[i].0[..dims];
            let sign = if maximize { -1.0 } else { 1.0 };
            let m = nm.minimize(|a| sign * self.ratio_sq_at(gram, a), start);
            let value = sign * m.value;
            if maximize {
                hi = hi.max(value);
            } else {
                lo = lo.min(value);
            }
            extra.push([m.x[0], *m.x.get(1).unwrap_or(&0.0)]);
        }
        if add {
            for a in extra {
                // Failure only for a zero lattice norm, impossible for independent bases.
                let _ = self.push(a);
            }
        }
        (lo, hi)
    }

    fn extremes(&self, gram: &[[Complex64; 2]; 2], polish: bool) -> (f64, f64) {
        if polish {
            let mut scratch = Sphere {
                basis: self.basis,
                ambient: self.ambient,
                points: self.points.clone(),
            };
            scratch.refine(gram, false)
        } else {
            self.sampled_extremes(gram)
        }
    }
}

/// Minimizes `λ` subject to `1 ≤ ‖h‖_H²/‖h‖² ≤ λ` over the sample set.
/// The constraints are linear in `(G₁₁, G₂₂, Re G₁₂, Im G₁₂, λ)`.
fn solve_fit_lp(sphere: &Sphere, complex: bool) -> Result<[[Complex64; 2]; 2]> {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let free = (f64::NEG_INFINITY, f64::INFINITY);
    let a = lp.add_var(0.0, (0.0, f64::INFINITY));
    let b = lp.add_var(0.0, (0.0, f64::INFINITY));
    let x = lp.add_var(0.0, free);
    let y = complex.then(|| lp.add_var(0.0, free));
    let lam = lp.add_var(1.0, (1.0, f64::INFINITY));
    for (_, c, n2) in &sphere.points {
        let z = c[0].conj() * c[1];
        let mut row = vec![
            (a, c[0].norm_sqr() / n2),
            (b, c[1].norm_sqr() / n2),
            (x, 2.0 * z.re / n2),
        ];
        if let Some(y) = y {
            row.push((y, -2.0 * z.im / n2));
        }
        lp.add_constraint(row.as_slice(), ComparisonOp::Ge, 1.0);
        row.push((lam, -1.0));
        lp.add_constraint(row.as_slice(), ComparisonOp::Le, 0.0);
    }
    let sol = lp
        .solve()
        .map_err(|e| Error::param("hilbert fit", format!("linear program failed: {e}")))?;
    let g12 = Complex64::new(sol[x], y.map_or(0.0, |y| sol[y]));
    Ok([
        [Complex64::new(sol[a], 0.0), g12],
        [g12.conj(), Complex64::new(sol[b], 0.0)],
    ])
}

/// Fits a Hilbert norm on `span{f, g}` that is `K`-equivalent to the lattice
/// norm, minimizing the measured `K`.
///
/// Solved as a linear program over sampled sphere points, refined by
/// cutting planes at the polished extremes of the current fit.
pub fn fit_hilbert_norm(f: &CplxVec, g: &CplxVec, ambient: &Ambient) -> Result<HilbertForm> {
    ambient.check_vector(f)?;
    ambient.check_vector(g)?;
    let basis = [f.clone(), g.clone()];
    ensure_independent(&basis)?;
    let complex = ambient.field == Field::Complex;
    let mut sphere = Sphere::new(&basis, ambient, SPHERE_SAMPLES)?;

    let mut gram = solve_fit_lp(&sphere, complex)?;
    for _ in 0..CUT_ROUNDS {
        let (slo, shi) = sphere.sampled_extremes(&gram);
        let (lo, hi) = sphere.refine(&gram, true);
        if hi / lo <= (shi / slo) * (1.0 + 1e-12) {
            break;
        }
        gram = solve_fit_lp(&sphere, complex)?;
    }

    let (lo, hi) = sphere.extremes(&gram, true);
    if !(lo > 0.0) {
        return Err(Error::param("gram", "fitted form is not positive definite"));
    }
    let scale = 1.0 / lo;
    let gram = [
        [gram[0][0] * scale, gram[0][1] * scale],
        [gram[1][0] * scale, gram[1][1] * scale],
    ];
    let distortion_k = (hi / lo).sqrt();
    let limit = SQRT_2 + FIT_SLACK;
    if distortion_k > limit {
        return Err(Error::HilbertFit {
            distortion: distortion_k,
            limit,
        });
    }
    Ok(HilbertForm {
        basis,
        gram,
        distortion_k,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Alignment {
    pub f: CplxVec,
    pub g: CplxVec,
    pub mu: Complex64,
    /// Inputs were swapped to get `‖u‖_H ≥ ‖v‖_H`.
    pub swapped: bool,
}

/// `μ = ⟨u,v⟩/|⟨u,v⟩|` (or 1), `f = u + μv`, `g = u − μv`, after ordering
/// the inputs so that `‖u‖_H ≥ ‖v‖_H`. Then `⟨f, g⟩_H = ‖u‖_H² − ‖v‖_H² ≥ 0`.
pub fn align_pair(u: &CplxVec, v: &CplxVec, form: &HilbertForm) -> Result<Alignment> {
    let cu = form.coefficients(u)?;
    let cv = form.coefficients(v)?;
    let swapped = form.norm_coeffs(&cu) < form.norm_coeffs(&cv);
    let (u, v, cu, cv) = if swapped { (v, u, cv, cu) } else { (u, v, cu, cv) };
    let ip = form.inner_coeffs(&cu, &cv);
    let r = ip.norm();
    let mu = if r > 1e-15 * form.norm_coeffs(&cu) * form.norm_coeffs(&cv) {
        ip / r
    } else {
        Complex64::new(1.0, 0.0)
    };
    let mv = v.scale(mu);
    Ok(Alignment {
        f: u + &mv,
        g: u - &mv,
        mu,
        swapped,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReductionResult {
    pub f_prime: CplxVec,
    pub g_prime: CplxVec,
    /// Phase used by the alignment step (1 when the input was reduced directly).
    pub mu: Complex64,
    /// Reduction parameter in `[0, ½]`.
    pub r: f64,
    /// `⟨f′, g′⟩_H`, zero up to rounding.
    pub inner_residual: Complex64,
}

/// `f′ = f − R(f+g)`, `g′ = g − R(f+g)` with `R` the smaller root of
/// `S R² − S R + ⟨f,g⟩_H = 0`, `S = ‖f+g‖_H²`, so that `⟨f′,g′⟩_H = 0`.
///
/// Requires `⟨f, g⟩_H` real and nonnegative, as produced by [`align_pair`].
/// Orthogonality, coordinatewise domination `||f′|−|g′|| ≤ ||f|−|g||` and
/// `f′ − g′ = f − g` are checked before returning.
pub fn orthogonal_reduce(f: &CplxVec, g: &CplxVec, form: &HilbertForm) -> Result<ReductionResult> {
    ensure_independent(&[f.clone(), g.clone()])?;
    let cf = form.coefficients(f)?;
    let cg = form.coefficients(g)?;
    let nf = form.norm_coeffs(&cf);
    let ng = form.norm_coeffs(&cg);
    let ip = form.inner_coeffs(&cf, &cg);
    let tol = 1e-9 * nf * ng;
    if ip.im.abs() > tol || ip.re < -tol {
        return Err(Error::Precondition {
            what: "<f,g>_H real and nonnegative",
            detail: format!("<f,g>_H = {ip}"),
        });
    }
    // Already orthogonal up to rounding: leave the pair unchanged.
    let c = if ip.norm() <= 1e-12 * nf * ng { 0.0 } else { ip.re.max(0.0) };
    let cs = [cf[0] + cg[0], cf[1] + cg[1]];
    let s = quad(&form.gram, &cs);
    let disc = 1.0 - 4.0 * c / s;
    if disc < -1e-12 {
        return Err(Error::Assertion {
            what: "orthogonal reduction discriminant >= 0",
            lhs: disc,
            rhs: 0.0,
        });
    }
    // (1 − √d)/2 without cancellation.
    let r = 2.0 * c / (s * (1.0 + disc.max(0.0).sqrt()));
    let shift = (f + g).scale_real(r);
    let f_prime = f - &shift;
    let g_prime = g - &shift;

    let cfp = [cf[0] - r * cs[0], cf[1] - r * cs[1]];
    let cgp = [cg[0] - r * cs[0], cg[1] - r * cs[1]];
    let inner_residual = form.inner_coeffs(&cfp, &cgp);
    ensure_le(
        "<f',g'>_H = 0",
        inner_residual.norm(),
        1e-10 * form.norm_coeffs(&cfp) * form.norm_coeffs(&cgp) + 1e-300,
    )?;

    let scale = f.max_modulus().max(g.max_modulus()).max(1.0);
    for i in 0..f.len() {
        let before = (f.as_slice()[i].norm() - g.as_slice()[i].norm()).abs();
        let after = (f_prime.as_slice()[i].norm() - g_prime.as_slice()[i].norm()).abs();
        ensure_le("||f'|-|g'|| <= ||f|-|g|| coordinatewise", after, before + 1e-12 * scale)?;
        let drift = ((f_prime.as_slice()[i] - g_prime.as_slice()[i])
            - (f.as_slice()[i] - g.as_slice()[i]))
            .norm();
        ensure_le("f'-g' = f-g", drift, 1e-14 * scale)?;
    }

    Ok(ReductionResult {
        f_prime,
        g_prime,
        mu: Complex64::new(1.0, 0.0),
        r,
        inner_residual,
    })
}

/// Align then reduce: the pipeline applied to a pair `u, v`.
pub fn reduce_pair(u: &CplxVec, v: &CplxVec, form: &HilbertForm) -> Result<(Alignment, ReductionResult)> {
    let aligned = align_pair(u, v, form)?;
    let mut reduced = orthogonal_reduce(&aligned.f, &aligned.g, form)?;
    reduced.mu = aligned.mu;
    Ok((aligned, reduced))
}
