//! Seeded multi-start searches over pairs in a subspace `E`.
//!
//! Elements of `E` are `e(a) = Σ aⱼ·basisⱼ` for real or complex coefficient
//! vectors `a`. A pair is parameterized by two unconstrained coefficient
//! vectors; each is normalized in the lattice norm, which keeps the search
//! compact without constraining the optimizer. Restarts run in parallel and
//! are merged by objective value with ties broken on restart index, so a
//! fixed seed and budget give identical results.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{disjointness, perp_measure, product_measure, Ambient, CplxVec, Field};
use crate::linalg::ensure_independent;
use crate::optim::NelderMead;
use crate::phase::{separation, spr_ratio, Ratio, RatioReport};

/// Ratios above this count as unbounded.
pub const UNBOUNDED_RATIO: f64 = 1e9;

/// Default threshold below which a perpendicularity measure counts as zero.
pub const DEFAULT_EPS_FAIL: f64 = 1e-6;

/// Slack allowed on the separation constraint of a returned witness.
pub const SEPARATION_SLACK: f64 = 1e-7;

/// Default separation levels, inside `(0, 1/√2 − 1/2)`.
pub const DEFAULT_M_GRID: [f64; 3] = [0.05, 0.1, 0.2];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Subspace {
    ambient: Ambient,
    basis: Vec<CplxVec>,
}

impl Subspace {
    pub fn new(ambient: Ambient, basis: Vec<CplxVec>) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::param("basis", "at least one basis vector is required"));
        }
        for b in &basis {
            ambient.check_vector(b)?;
        }
        ensure_independent(&basis)?;
        Ok(Subspace { ambient, basis })
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn basis(&self) -> &[CplxVec] {
        &self.basis
    }

    /// Dimension `k` of the subspace.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn element(&self, coeffs: &[Complex64]) -> Result<CplxVec> {
        crate::lattice::same_dim(self.dim(), coeffs.len())?;
        if self.ambient.field == Field::Real && coeffs.iter().any(|c| c.im != 0.0) {
            return Err(Error::param("coeffs", "real subspace needs real coefficients"));
        }
        Ok(self.combine(coeffs.iter().copied()))
    }

    fn combine(&self, coeffs: impl Iterator<Item = Complex64>) -> CplxVec {
        let mut out = vec![Complex64::new(0.0, 0.0); self.ambient.dim];
        for (c, b) in coeffs.zip(&self.basis) {
            for (o, x) in out.iter_mut().zip(b.as_slice()) {
                *o += c * x;
            }
        }
        CplxVec::from_unchecked(out)
    }

    /// Real parameters per element: `k` (real field) or `2k` (complex).
    fn param_len(&self) -> usize {
        match self.ambient.field {
            Field::Real => self.dim(),
            Field::Complex => 2 * self.dim(),
        }
    }

    fn element_from_params(&self, x: &[f64]) -> CplxVec {
        match self.ambient.field {
            Field::Real => self.combine(x.iter().map(|a| Complex64::new(*a, 0.0))),
            Field::Complex => {
                self.combine(x.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])))
            }
        }
    }

    /// Lattice-normalized element, `None` when the element vanishes.
    fn unit_from_params(&self, x: &[f64]) -> Option<CplxVec> {
        let e = self.element_from_params(x);
        let n = self.ambient.norm.norm(&e).ok()?;
        (n > 1e-300 && n.is_finite()).then(|| e.scale_real(1.0 / n))
    }

    fn random_params(&self, rng: &mut ChaCha8Rng, count: usize) -> Vec<f64> {
        (0..count).map(|_| rng.sample(StandardNormal)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SearchBudget {
    pub restarts: usize,
    pub iterations_per_restart: usize,
    pub penalty_rounds: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            restarts: 16,
            iterations_per_restart: 1000,
            penalty_rounds: 4,
        }
    }
}

impl SearchBudget {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.iterations_per_restart == 0 || self.penalty_rounds == 0 {
            return Err(Error::param("budget", "restarts, iterations and penalty rounds must be positive"));
        }
        Ok(())
    }

    fn optimizer(&self) -> NelderMead {
        NelderMead {
            max_iters: self.iterations_per_restart,
            initial_step: 0.5,
            xtol: 1e-12,
            ftol: 1e-15,
            polish_rounds: 2,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BudgetUsed {
    pub restarts: usize,
    pub iterations: usize,
    pub evaluations: usize,
}

impl BudgetUsed {
    fn add(&mut self, iterations: usize, evaluations: usize) {
        self.iterations += iterations;
        self.evaluations += evaluations;
    }
}

/// Log scale turns the square-root kinks at zero into geometric descent.
fn log_floor(x: f64) -> f64 {
    x.max(1e-300).ln()
}

fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64 + 1);
    rng
}

/// Normalized pair together with every measure the characterizations use.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairWitness {
    pub u: CplxVec,
    pub v: CplxVec,
    /// `min_{|λ|=1} ‖u − λv‖`.
    pub separation: f64,
    /// `‖ |u| ∧ |v| ‖`.
    pub disjointness: f64,
    /// `‖ |Re(u v̄)|^½ ‖`.
    pub perp: f64,
    /// `‖ |uv|^½ ‖`.
    pub product: f64,
}

impl PairWitness {
    /// Measures a pair from scratch. Both vectors must be normalized.
    pub fn measure(u: &CplxVec, v: &CplxVec, ambient: &Ambient) -> Result<Self> {
        ambient.check_vector(u)?;
        ambient.check_vector(v)?;
        for (name, x) in [("u", u), ("v", v)] {
            let n = ambient.norm(x)?;
            if (n - 1.0).abs() > 1e-10 {
                return Err(Error::Precondition {
                    what: "normalized pair",
                    detail: format!("‖{name}‖ = {n}"),
                });
            }
        }
        Ok(PairWitness {
            u: u.clone(),
            v: v.clone(),
            separation: separation(u, v, ambient)?,
            disjointness: disjointness(u, v, &ambient.norm)?,
            perp: perp_measure(u, v, &ambient.norm)?,
            product: product_measure(u, v, &ambient.norm)?,
        })
    }

    /// Normalizes both vectors, then measures.
    pub fn normalized(u: &CplxVec, v: &CplxVec, ambient: &Ambient) -> Result<Self> {
        let nu = ambient.norm(u)?;
        let nv = ambient.norm(v)?;
        if !(nu > 0.0 && nv > 0.0) {
            return Err(Error::param("pair", "vectors must be nonzero"));
        }
        Self::measure(&u.scale_real(1.0 / nu), &v.scale_real(1.0 / nv), ambient)
    }
}

/// Lower bound for the optimal SPR constant of a subspace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum SprBound {
    Finite(f64),
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SprEstimate {
    pub c_lower: SprBound,
    pub f: CplxVec,
    pub g: CplxVec,
    /// The witness pair re-evaluated from scratch.
    pub witness: RatioReport,
    pub budget_used: BudgetUsed,
    pub seed: u64,
}

fn classify(report: &RatioReport) -> Option<SprBound> {
    match report.ratio {
        Ratio::Infinite => Some(SprBound::Unbounded),
        Ratio::Finite(r) if r > UNBOUNDED_RATIO => Some(SprBound::Unbounded),
        Ratio::Finite(r) => Some(SprBound::Finite(r)),
        Ratio::Degenerate => None,
    }
}

/// Maximizes the SPR ratio over pairs in `E`.
///
/// Pairs are `f = e(a)/‖e(a)‖`, `g = s·e(b)/‖e(b)‖` with `s = 1/(1+t²) ∈ (0, 1]`;
/// the ratio is symmetric and jointly scale invariant, so this covers every
/// pair up to a common factor. The pair `(2e, e)`, whose ratio is exactly 1,
/// seeds the incumbent so the bound never drops below 1.
pub fn estimate_spr_constant(space: &Subspace, budget: &SearchBudget, seed: u64) -> Result<SprEstimate> {
    budget.validate()?;
    let ambient = space.ambient();
    let pl = space.param_len();
    let nm = budget.optimizer();

    let build = |x: &[f64]| -> Option<(CplxVec, CplxVec)> {
        let f = space.unit_from_params(&x[..pl])?;
        let g = space.unit_from_params(&x[pl..2 * pl])?;
        let s = 1.0 / (1.0 + x[2 * pl] * x[2 * pl]);
        Some((f, g.scale_real(s)))
    };
    let objective = |x: &[f64]| -> f64 {
        let Some((f, g)) = build(x) else {
            return f64::INFINITY;
        };
        match spr_ratio(&f, &g, ambient).map(|r| r.ratio) {
            Ok(Ratio::Finite(r)) => -r.max(1e-300).ln(),
            Ok(Ratio::Infinite) => -700.0,
            Ok(Ratio::Degenerate) => 0.0,
            Err(_) => f64::INFINITY,
        }
    };

    let runs: Vec<(f64, usize, Vec<f64>, usize, usize)> = (0..budget.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = restart_rng(seed, r);
            let x0 = space.random_params(&mut rng, 2 * pl + 1);
            let m = nm.minimize(objective, &x0);
            (m.value, r, m.x, m.iters, m.evals)
        })
        .collect();

    let mut used = BudgetUsed {
        restarts: budget.restarts,
        ..Default::default()
    };
    for run in &runs {
        used.add(run.3, run.4);
    }

    let e = space.unit_from_params(&vec![1.0; pl]).unwrap_or_else(|| space.basis[0].clone());
    let mut best = (e.scale_real(2.0), e.clone());
    let mut best_report = spr_ratio(&best.0, &best.1, ambient)?;
    let mut best_bound = classify(&best_report).unwrap_or(SprBound::Finite(1.0));

    let mut ranked: Vec<_> = runs.into_iter().collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for (_, _, x, _, _) in ranked.into_iter().take(4) {
        let Some((f, g)) = build(&x) else { continue };
        let report = spr_ratio(&f, &g, ambient)?;
        let Some(bound) = classify(&report) else { continue };
        let better = match (bound, best_bound) {
            (SprBound::Unbounded, SprBound::Finite(_)) => true,
            (SprBound::Finite(a), SprBound::Finite(b)) => a > b,
            _ => false,
        };
        if better {
            best = (f, g);
            best_report = report;
            best_bound = bound;
        }
    }

    Ok(SprEstimate {
        c_lower: best_bound,
        f: best.0,
        g: best.1,
        witness: best_report,
        budget_used: used,
        seed,
    })
}

fn best_pair(
    space: &Subspace,
    runs: Vec<(f64, usize, Vec<f64>)>,
) -> Result<PairWitness> {
    let pl = space.param_len();
    let mut ranked = runs;
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for (_, _, x) in ranked {
        if let (Some(u), Some(v)) = (space.unit_from_params(&x[..pl]), space.unit_from_params(&x[pl..])) {
            return PairWitness::measure(&u, &v, space.ambient());
        }
    }
    Err(Error::param("search", "no restart produced a nonzero pair"))
}

/// Below this disjointness a pair counts as disjoint, matching an unbounded constant.
pub const DISJOINT_ATOL: f64 = 1e-6;

/// Real fields only: the optimal SPR constant is the inverse of the minimal
/// disjointness, so both searches should agree.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RealSprCheck {
    /// `1/c_lower`, zero when the constant is unbounded.
    pub inverse_constant: f64,
    pub min_disjointness: f64,
    pub relative_gap: f64,
    pub consistent: bool,
}

pub fn real_spr_crosscheck(estimate: &SprEstimate, disjoint: &DisjointSearch, rel_tol: f64) -> RealSprCheck {
    let d = disjoint.witness.disjointness;
    let inverse_constant = match estimate.c_lower {
        SprBound::Finite(c) => 1.0 / c,
        SprBound::Unbounded => 0.0,
    };
    let (relative_gap, consistent) = if d <= DISJOINT_ATOL {
        let gap = (inverse_constant - d).abs();
        (gap / DISJOINT_ATOL, inverse_constant <= DISJOINT_ATOL)
    } else {
        let gap = (inverse_constant - d).abs() / d;
        (gap, gap <= rel_tol)
    };
    RealSprCheck {
        inverse_constant,
        min_disjointness: d,
        relative_gap,
        consistent,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DisjointSearch {
    pub witness: PairWitness,
    pub budget_used: BudgetUsed,
    pub seed: u64,
}

/// Minimizes `‖ |u| ∧ |v| ‖` over normalized pairs in `E` (on a log scale).
pub fn search_almost_disjoint(space: &Subspace, budget: &SearchBudget, seed: u64) -> Result<DisjointSearch> {
    budget.validate()?;
    let pl = space.param_len();
    let norm = &space.ambient().norm;
    let nm = budget.optimizer();
    let objective = |x: &[f64]| -> f64 {
        match (space.unit_from_params(&x[..pl]), space.unit_from_params(&x[pl..])) {
            (Some(u), Some(v)) => disjointness(&u, &v, norm).map_or(f64::INFINITY, log_floor),
            _ => f64::INFINITY,
        }
    };
    let runs: Vec<(f64, usize, Vec<f64>, usize, usize)> = (0..budget.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = restart_rng(seed, r);
            let x0 = space.random_params(&mut rng, 2 * pl);
            let m = nm.minimize(objective, &x0);
            (m.value, r, m.x, m.iters, m.evals)
        })
        .collect();
    let mut used = BudgetUsed {
        restarts: budget.restarts,
        ..Default::default()
    };
    for run in &runs {
        used.add(run.3, run.4);
    }
    let witness = best_pair(space, runs.into_iter().map(|r| (r.0, r.1, r.2)).collect())?;
    Ok(DisjointSearch {
        witness,
        budget_used: used,
        seed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerpSearch {
    /// Best pair found; when `feasible` it satisfies `separation ≥ m − 1e-7`.
    pub witness: PairWitness,
    pub feasible: bool,
    pub m: f64,
    pub budget_used: BudgetUsed,
    pub seed: u64,
}

/// Minimizes `‖ |Re(u v̄)|^½ ‖` over normalized pairs with
/// `min_{|λ|=1} ‖u − λv‖ ≥ m`, via an exterior quadratic penalty on
/// `ln perp` whose weight grows tenfold per round. `m = 0` drops the constraint.
pub fn search_perp_pair(space: &Subspace, m: f64, budget: &SearchBudget, seed: u64) -> Result<PerpSearch> {
    budget.validate()?;
    if !(m >= 0.0 && m.is_finite()) {
        return Err(Error::param("m", format!("must be nonnegative, got {m}")));
    }
    let ambient = space.ambient();
    let pl = space.param_len();
    let nm = budget.optimizer();

    // (perp, separation) of a parameter vector.
    let measure = |x: &[f64]| -> Option<(f64, f64)> {
        let u = space.unit_from_params(&x[..pl])?;
        let v = space.unit_from_params(&x[pl..])?;
        let perp = perp_measure(&u, &v, &ambient.norm).ok()?;
        let sep = if m > 0.0 { separation(&u, &v, ambient).ok()? } else { f64::INFINITY };
        Some((perp, sep))
    };

    type Run = (bool, f64, usize, Vec<f64>, usize, usize);
    let runs: Vec<Run> = (0..budget.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = restart_rng(seed, r);
            let mut x = space.random_params(&mut rng, 2 * pl);
            // Best feasible point seen, and the least-violating point as fallback.
            let mut feasible: Option<(f64, Vec<f64>)> = None;
            let mut fallback: (f64, f64, Vec<f64>) = (f64::INFINITY, f64::INFINITY, x.clone());
            let (mut iters, mut evals) = (0, 0);
            for round in 0..budget.penalty_rounds {
                let rho = 10f64.powi(round as i32 + 1);
                let res = nm.minimize(
                    |y| {
                        let Some((perp, sep)) = measure(y) else {
                            return f64::INFINITY;
                        };
                        let violation = (m - sep).max(0.0);
                        if sep >= m - SEPARATION_SLACK {
                            if feasible.as_ref().map_or(true, |(p, _)| perp < *p) {
                                feasible = Some((perp, y.to_vec()));
                            }
                        } else if (violation, perp) < (fallback.0, fallback.1) {
                            fallback = (violation, perp, y.to_vec());
                        }
                        log_floor(perp) + rho * violation * violation
                    },
                    &x,
                );
                iters += res.iters;
                evals += res.evals;
                x = res.x;
            }
            match feasible {
                Some((perp, y)) => (true, perp, r, y, iters, evals),
                None => (false, fallback.0, r, fallback.2, iters, evals),
            }
        })
        .collect();

    let mut used = BudgetUsed {
        restarts: budget.restarts,
        ..Default::default()
    };
    for run in &runs {
        used.add(run.4, run.5);
    }
    let best = runs
        .into_iter()
        .min_by(|a, b| {
            b.0.cmp(&a.0)
                .then(a.1.total_cmp(&b.1))
                .then(a.2.cmp(&b.2))
        })
        .expect("at least one restart");
    let (feasible, _, _, x, _, _) = best;
    let u = space.unit_from_params(&x[..pl]);
    let v = space.unit_from_params(&x[pl..]);
    let (Some(u), Some(v)) = (u, v) else {
        return Err(Error::param("search", "no restart produced a nonzero pair"));
    };
    let witness = PairWitness::measure(&u, &v, ambient)?;
    let feasible = feasible && witness.separation >= m - SEPARATION_SLACK;
    Ok(PerpSearch {
        witness,
        feasible,
        m,
        budget_used: used,
        seed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerpRecord {
    pub m: f64,
    /// Smallest perpendicularity among feasible pairs, `None` if none was found.
    pub min_perp: Option<f64>,
    pub witness: PairWitness,
}

/// One-sided numerical PR verdict. A pass only means no witness was found
/// within the budget; it is a record of search effort, not a proof.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PrVerdict {
    FailsWithWitness { m: f64, witness: PairWitness },
    PassesUpToBudget { per_m: Vec<PerpRecord> },
}

impl PrVerdict {
    pub fn fails(&self) -> bool {
        matches!(self, PrVerdict::FailsWithWitness { .. })
    }
}

/// Runs [`search_perp_pair`] for each separation level; the subspace fails
/// PR once a pair with `separation ≥ m` and `perp < eps_fail` turns up.
pub fn check_pr(
    space: &Subspace,
    m_grid: &[f64],
    budget: &SearchBudget,
    seed: u64,
    eps_fail: f64,
) -> Result<PrVerdict> {
    if m_grid.is_empty() {
        return Err(Error::param("m_grid", "must not be empty"));
    }
    if let Some(m) = m_grid.iter().find(|m| !(**m > 0.0)) {
        return Err(Error::param("m_grid", format!("values must be positive, got {m}")));
    }
    let mut per_m = Vec::with_capacity(m_grid.len());
    for &m in m_grid {
        let search = search_perp_pair(space, m, budget, seed)?;
        if search.feasible && search.witness.perp < eps_fail {
            return Ok(PrVerdict::FailsWithWitness {
                m,
                witness: search.witness,
            });
        }
        per_m.push(PerpRecord {
            m,
            min_perp: search.feasible.then_some(search.witness.perp),
            witness: search.witness,
        });
    }
    Ok(PrVerdict::PassesUpToBudget { per_m })
}
