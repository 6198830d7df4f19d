//! Derivative-free local minimization (Nelder–Mead with dimension-adaptive
//! coefficients). The p = 1 and p = ∞ objectives of this crate are
//! nonsmooth, so no gradients are used anywhere.

#[derive(Clone, Copy, Debug)]
pub(crate) struct NelderMead {
    pub max_iters: usize,
    pub initial_step: f64,
    pub xtol: f64,
    pub ftol: f64,
    /// Restarts from the incumbent with a fresh simplex.
    pub polish_rounds: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead {
            max_iters: 400,
            initial_step: 0.3,
            xtol: 1e-10,
            ftol: 1e-13,
            polish_rounds: 2,
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iters: usize,
    pub evals: usize,
}

impl NelderMead {
    pub fn minimize(&self, mut objective: impl FnMut(&[f64]) -> f64, x0: &[f64]) -> Minimum {
        let mut best = Minimum {
            x: x0.to_vec(),
            value: objective(x0),
            iters: 0,
            evals: 1,
        };
        let mut step = self.initial_step;
        for round in 0..=self.polish_rounds {
            let before = best.value;
            let run = self.run(&mut objective, &best.x, step);
            best.iters += run.iters;
            best.evals += run.evals;
            if run.value <= best.value {
                best.x = run.x;
                best.value = run.value;
            }
            if round > 0 && before - best.value <= self.ftol * (1.0 + before.abs()) {
                break;
            }
            step *= 0.25;
        }
        best
    }

    fn run(&self, objective: &mut impl FnMut(&[f64]) -> f64, x0: &[f64], step: f64) -> Minimum {
        let n = x0.len();
        let nf = n as f64;
        let alpha = 1.0;
        let gamma = 1.0 + 2.0 / nf;
        let rho = 0.75 - 1.0 / (2.0 * nf);
        let sigma = 1.0 - 1.0 / nf.max(2.0);

        let mut evals = 0;
        let mut eval = |x: &[f64], evals: &mut usize| {
            *evals += 1;
            let v = objective(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };

        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((x0.to_vec(), eval(x0, &mut evals)));
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += if x[i].abs() > 1e-8 { step * x[i].abs().max(0.5) } else { step };
            let v = eval(&x, &mut evals);
            simplex.push((x, v));
        }

        let mut iters = 0;
        while iters < self.max_iters {
            iters += 1;
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let f_best = simplex[0].1;
            let f_worst = simplex[n].1;
            let size = simplex[1..]
                .iter()
                .map(|(x, _)| {
                    x.iter()
                        .zip(&simplex[0].0)
                        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
                })
                .fold(0.0f64, f64::max);
            if size < self.xtol && (f_worst - f_best).abs() <= self.ftol * (1.0 + f_best.abs()) {
                break;
            }
            if size < self.xtol * 1e-3 {
                break;
            }

            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / nf;
                }
            }
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[n].0)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };

            let xr = along(alpha);
            let fr = eval(&xr, &mut evals);
            if fr < simplex[0].1 {
                let xe = along(gamma);
                let fe = eval(&xe, &mut evals);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < simplex[n].1 {
                let xc = along(alpha * rho);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            } else {
                let xc = along(-rho);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            };
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
                continue;
            }
            let x_best = simplex[0].0.clone();
            for (x, v) in simplex.iter_mut().skip(1) {
                for (xi, bi) in x.iter_mut().zip(&x_best) {
                    *xi = bi + sigma * (*xi - bi);
                }
                *v = eval(x, &mut evals);
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (x, value) = simplex.swap_remove(0);
        Minimum {
            x,
            value,
            iters,
            evals,
        }
    }
}
