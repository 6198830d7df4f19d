use std::f64::consts::{PI, SQRT_2};
use std::io::Read;
use std::path::Path;

use phaselat::builders::{
    adp_to_spr_violation, complex_pr_equivalences, perp_pair_to_spr_failure, spr_failure_to_perp_pair,
    BuilderParams,
};
use phaselat::hilbert::{align_pair, fit_hilbert_norm, orthogonal_reduce};
use phaselat::lattice::{identity_residuals, modulus_gap, IdentityResiduals};
use phaselat::search::{
    check_pr, estimate_spr_constant, real_spr_crosscheck, search_almost_disjoint, SearchBudget, Subspace,
    DEFAULT_M_GRID,
};
use phaselat::{gallery, load_problem, Ambient, Complex64, CplxVec, Error, NormSpec, Problem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use serde_json::{json, Value};

use crate::BudgetArgs;

pub struct Report {
    pub command: &'static str,
    /// Every asserted inequality held.
    pub ok: bool,
    pub parameters: Value,
    pub result: Value,
}

#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        self.code
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Assertion { .. } | Error::HilbertFit { .. } => 1,
            _ => 2,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<Report, CliError>;

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

fn read_problem(path: &Path) -> Result<Problem, CliError> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::usage(format!("cannot read stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?
    };
    load_problem(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn budget_of(b: &BudgetArgs) -> SearchBudget {
    SearchBudget {
        restarts: b.restarts,
        iterations_per_restart: b.iters,
        penalty_rounds: b.rounds,
    }
}

fn search_params(b: &BudgetArgs) -> Value {
    json!({"budget": budget_of(b), "seed": b.seed})
}

fn problem_value(p: &Problem) -> Value {
    json!({
        "ambient": p.ambient,
        "basis": p.subspace.basis(),
        "dim": p.subspace.dim(),
    })
}

fn normalize(x: &CplxVec, ambient: &Ambient) -> Result<CplxVec, CliError> {
    let n = ambient.norm(x)?;
    if !(n > 0.0) {
        return Err(CliError::usage("pair vectors must be nonzero"));
    }
    Ok(x.scale_real(1.0 / n))
}

fn normalized_pair(p: &Problem) -> Result<(CplxVec, CplxVec), CliError> {
    let (u, v) = p.require_pair()?;
    Ok((normalize(u, &p.ambient)?, normalize(v, &p.ambient)?))
}

pub fn analyze(file: &Path, b: &BudgetArgs, tol: f64) -> Outcome {
    let p = read_problem(file)?;
    let budget = budget_of(b);
    let estimate = estimate_spr_constant(&p.subspace, &budget, b.seed)?;
    let disjoint = search_almost_disjoint(&p.subspace, &budget, b.seed)?;
    let (check, ok) = match p.ambient.field {
        phaselat::Field::Real => {
            let c = real_spr_crosscheck(&estimate, &disjoint, tol);
            (to_value(&c), c.consistent)
        }
        // An almost disjoint pair at level ε forces a constant above 1/(√2 ε).
        phaselat::Field::Complex => {
            let d = disjoint.witness.disjointness;
            (json!({"implied_lower_bound": if d > 0.0 { Some(1.0 / (SQRT_2 * d)) } else { None }}), true)
        }
    };
    Ok(Report {
        command: "analyze",
        ok,
        parameters: json!({"search": search_params(b), "tol": tol}),
        result: json!({
            "problem": problem_value(&p),
            "spr_estimate": estimate,
            "disjoint": disjoint,
            "crosscheck": check,
        }),
    })
}

pub fn search_disjoint(file: &Path, b: &BudgetArgs) -> Outcome {
    let p = read_problem(file)?;
    let found = search_almost_disjoint(&p.subspace, &budget_of(b), b.seed)?;
    Ok(Report {
        command: "search-disjoint",
        ok: true,
        parameters: search_params(b),
        result: json!({"problem": problem_value(&p), "disjoint": found}),
    })
}

fn m_grid(m: &[f64]) -> Vec<f64> {
    if m.is_empty() {
        DEFAULT_M_GRID.to_vec()
    } else {
        m.to_vec()
    }
}

pub fn search_perp(file: &Path, b: &BudgetArgs, m: &[f64], tol: f64) -> Outcome {
    let p = read_problem(file)?;
    let grid = m_grid(m);
    let verdict = check_pr(&p.subspace, &grid, &budget_of(b), b.seed, tol)?;
    Ok(Report {
        command: "search-perp",
        ok: true,
        parameters: json!({"search": search_params(b), "m_grid": grid, "eps_fail": tol}),
        result: json!({"problem": problem_value(&p), "pr": verdict}),
    })
}

pub fn reduce(file: &Path, align: bool) -> Outcome {
    let p = read_problem(file)?;
    let (u, v) = p.require_pair()?;
    let form = fit_hilbert_norm(u, v, &p.ambient)?;
    let (f, g, mu, swapped) = if align {
        let a = align_pair(u, v, &form)?;
        (a.f, a.g, a.mu, a.swapped)
    } else {
        // Rotate g so that ⟨f, g⟩_H is real and nonnegative.
        let ip = form.inner(u, v)?;
        let mu = if ip.norm() > 0.0 { ip / ip.norm() } else { Complex64::new(1.0, 0.0) };
        (u.clone(), v.scale(mu), mu, false)
    };
    let reduced = orthogonal_reduce(&f, &g, &form)?;
    let norm = &p.ambient.norm;
    Ok(Report {
        command: "reduce",
        ok: true,
        parameters: json!({"align": align}),
        result: json!({
            "hilbert_form": form,
            "f": f,
            "g": g,
            "mu": mu,
            "swapped": swapped,
            "r": reduced.r,
            "f_prime": reduced.f_prime,
            "g_prime": reduced.g_prime,
            "inner_residual": reduced.inner_residual,
            "modulus_gap_before": modulus_gap(&f, &g, norm)?,
            "modulus_gap_after": modulus_gap(&reduced.f_prime, &reduced.g_prime, norm)?,
        }),
    })
}

pub fn build_adp2spr(file: &Path) -> Outcome {
    let p = read_problem(file)?;
    let (u, v) = normalized_pair(&p)?;
    let cert = adp_to_spr_violation(&u, &v, &p.ambient)?;
    let bound = if cert.epsilon > 0.0 { Some(1.0 / (SQRT_2 * cert.epsilon)) } else { None };
    Ok(Report {
        command: "build adp2spr",
        ok: true,
        parameters: json!({"u": u, "v": v}),
        result: json!({"certificate": cert, "certified_lower_bound": bound}),
    })
}

pub fn build_spr2perp(file: &Path, m: f64, eps: f64) -> Outcome {
    let p = read_problem(file)?;
    let (f, g) = p.require_pair()?;
    let params = BuilderParams::new(m, eps)?;
    let out = spr_failure_to_perp_pair(f, g, &p.ambient, &params)?;
    Ok(Report {
        command: "build spr2perp",
        ok: true,
        parameters: json!({"builder": params}),
        result: to_value(&out),
    })
}

pub fn build_perp2spr(file: &Path, m: f64, c: f64) -> Outcome {
    let p = read_problem(file)?;
    let (u, v) = normalized_pair(&p)?;
    let out = perp_pair_to_spr_failure(&u, &v, &p.ambient, m, c)?;
    Ok(Report {
        command: "build perp2spr",
        ok: true,
        parameters: json!({"m": m, "C": c, "u": u, "v": v}),
        result: to_value(&out),
    })
}

pub fn build_pr_equiv(file: &Path, tol: f64) -> Outcome {
    let p = read_problem(file)?;
    let (f, g) = p.require_pair()?;
    let eq = complex_pr_equivalences(f, g, tol)?;
    Ok(Report {
        command: "build pr-equiv",
        ok: true,
        parameters: json!({"atol": tol}),
        result: json!({"conditions": eq, "all_hold": eq.all()}),
    })
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn cnormal(r: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(r.sample(StandardNormal), r.sample(StandardNormal))
}

fn random_cvec(r: &mut ChaCha8Rng, n: usize) -> CplxVec {
    CplxVec::new((0..n).map(|_| cnormal(r)).collect()).expect("finite samples")
}

fn positive(name: &str, x: usize) -> Result<(), CliError> {
    if x == 0 {
        return Err(CliError::usage(format!("--{name} must be positive")));
    }
    Ok(())
}

pub fn verify_identities(dim: usize, samples: usize, seed: u64, tol: f64) -> Outcome {
    positive("dim", dim)?;
    let mut r = rng(seed);
    let mut worst = IdentityResiduals {
        product_split: 0.0,
        homogeneity: 0.0,
        difference_of_squares: 0.0,
        sum_difference: 0.0,
    };
    let mut failures = 0usize;
    for _ in 0..samples {
        let f = random_cvec(&mut r, dim);
        let g = random_cvec(&mut r, dim);
        let phi = r.gen_range(0.0..2.0 * PI);
        let s: f64 = r.sample(StandardNormal);
        let t: f64 = r.sample(StandardNormal);
        let res = identity_residuals(&f, &g, phi, s, t)?;
        if res.max() > tol {
            failures += 1;
        }
        worst.product_split = worst.product_split.max(res.product_split);
        worst.homogeneity = worst.homogeneity.max(res.homogeneity);
        worst.difference_of_squares = worst.difference_of_squares.max(res.difference_of_squares);
        worst.sum_difference = worst.sum_difference.max(res.sum_difference);
    }
    Ok(Report {
        command: "verify identities",
        ok: failures == 0,
        parameters: json!({"dim": dim, "samples": samples, "seed": seed, "tol": tol}),
        result: json!({"worst_relative_residual": worst, "failures": failures}),
    })
}

pub fn verify_real_spr(dim: usize, samples: usize, b: &BudgetArgs, tol: f64) -> Outcome {
    if dim < 2 {
        return Err(CliError::usage("--dim must be at least 2"));
    }
    let norms = [NormSpec::l1(), NormSpec::l2(), NormSpec::linf()];
    let mut r = rng(b.seed);
    let budget = budget_of(b);
    let mut cases = Vec::with_capacity(samples);
    let mut failures = 0usize;
    for k in 0..samples {
        let norm = norms[k % norms.len()].clone();
        let ambient = Ambient::real(dim, norm)?;
        let basis: Vec<CplxVec> = (0..2)
            .map(|_| CplxVec::real(&(0..dim).map(|_| r.sample(StandardNormal)).collect::<Vec<f64>>()))
            .collect();
        let space = Subspace::new(ambient.clone(), basis)?;
        let seed = b.seed.wrapping_add(k as u64);
        let estimate = estimate_spr_constant(&space, &budget, seed)?;
        let disjoint = search_almost_disjoint(&space, &budget, seed)?;
        let check = real_spr_crosscheck(&estimate, &disjoint, tol);
        if !check.consistent {
            failures += 1;
        }
        cases.push(json!({"norm": ambient.norm, "basis": space.basis(), "c_lower": estimate.c_lower, "check": check}));
    }
    Ok(Report {
        command: "verify real-spr",
        ok: failures == 0,
        parameters: json!({"dim": dim, "samples": samples, "search": search_params(b), "tol": tol}),
        result: json!({"cases": cases, "failures": failures}),
    })
}

/// Unit pair in `ℂⁿ` supported on complementary halves, plus `noise`.
fn near_disjoint(r: &mut ChaCha8Rng, ambient: &Ambient, noise: f64) -> Result<(CplxVec, CplxVec), CliError> {
    let n = ambient.dim;
    let split = r.gen_range(1..n);
    let mut u = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b) = (cnormal(r), cnormal(r) * noise);
        if i < split {
            u.push(a);
            v.push(b);
        } else {
            u.push(b);
            v.push(a);
        }
    }
    let u = CplxVec::new(u)?;
    let v = CplxVec::new(v)?;
    Ok((normalize(&u, ambient)?, normalize(&v, ambient)?))
}

pub fn verify_complex_spr(dim: usize, samples: usize, seed: u64, m: f64, eps: f64, c: f64) -> Outcome {
    if dim < 2 {
        return Err(CliError::usage("--dim must be at least 2"));
    }
    let params = BuilderParams::new(m, eps)?;
    let norms = [NormSpec::l2(), NormSpec::linf()];
    let mut r = rng(seed);
    let mut failures: Vec<Value> = Vec::new();
    let (mut adp_ok, mut chain_ok) = (0usize, 0usize);
    let mut worst_margin = f64::INFINITY;
    for k in 0..samples {
        let ambient = Ambient::complex(dim, norms[k % norms.len()].clone())?;

        // Almost disjoint pair: the certificate must clear 1/(√2 ε′).
        let noise = r.gen_range(0.0..0.2);
        let (u, v) = near_disjoint(&mut r, &ambient, noise)?;
        match adp_to_spr_violation(&u, &v, &ambient) {
            Ok(cert) => {
                adp_ok += 1;
                if cert.epsilon > 0.0 {
                    let margin = cert.report.numerator / cert.report.denominator.max(f64::MIN_POSITIVE)
                        - 1.0 / (SQRT_2 * cert.epsilon);
                    worst_margin = worst_margin.min(margin);
                }
            }
            Err(e) => failures.push(json!({"case": k, "stage": "adp2spr", "error": e.to_string()})),
        }

        // Disjoint pair ⇒ infinite ratio ⇒ perpendicular pair ⇒ SPR failure at C.
        let (u, v) = near_disjoint(&mut r, &ambient, 0.0)?;
        let chain = adp_to_spr_violation(&u, &v, &ambient)
            .map_err(|e| ("adp2spr", e))
            .and_then(|cert| {
                spr_failure_to_perp_pair(&cert.f_prime, &cert.g_prime, &ambient, &params).map_err(|e| ("spr2perp", e))
            })
            .and_then(|perp| {
                perp_pair_to_spr_failure(&perp.witness.u, &perp.witness.v, &ambient, m, c).map_err(|e| ("perp2spr", e))
            });
        match chain {
            Ok(_) => chain_ok += 1,
            Err((stage, e)) => failures.push(json!({"case": k, "stage": stage, "error": e.to_string()})),
        }
    }
    Ok(Report {
        command: "verify complex-spr",
        ok: failures.is_empty(),
        parameters: json!({"dim": dim, "samples": samples, "seed": seed, "builder": params, "C": c}),
        result: json!({
            "adp_certificates": adp_ok,
            "chains_closed": chain_ok,
            "worst_certificate_margin": if worst_margin.is_finite() { Some(worst_margin) } else { None },
            "failures": failures,
        }),
    })
}

pub fn example_c4(delta: f64, b: &BudgetArgs, m: &[f64], tol: f64) -> Outcome {
    let ex = gallery::example_c4(delta)?;
    let grid = m_grid(m);
    let verdict = check_pr(&ex.space, &grid, &budget_of(b), b.seed, tol)?;
    let perp_ok = (ex.perp - ex.perp_exact).abs() <= 1e-12;
    let sep_ok = ex.separation <= ex.separation_bound + 1e-9;
    Ok(Report {
        command: "example c4",
        ok: perp_ok && sep_ok && !verdict.fails(),
        parameters: json!({"delta": delta, "search": search_params(b), "m_grid": grid, "eps_fail": tol}),
        result: json!({
            "example": ex,
            "checks": {"perp_matches_closed_form": perp_ok, "separation_within_bound": sep_ok},
            "pr": verdict,
        }),
    })
}
