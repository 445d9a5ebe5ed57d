//! Derivative-free and quasi-Newton minimizers for small smooth problems.
//!
//! Objectives return `f64::INFINITY` (or NaN) for infeasible points; both
//! methods treat those as worse than any finite value.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Nelder-Mead simplex search with dimension-adaptive coefficients
/// (Gao & Han 2012).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    pub max_iter: usize,
    /// Stop once `f_worst - f_best <= ftol * (1 + |f_best|)`.
    pub ftol: f64,
    pub initial_step: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead {
            max_iter: 2000,
            ftol: 1e-8,
            initial_step: 0.25,
        }
    }
}

impl NelderMead {
    pub fn minimize<F: FnMut(&[f64]) -> f64>(&self, mut f: F, x0: &[f64]) -> Minimum {
        let n = x0.len();
        let nf = n as f64;
        let (alpha, beta, gamma, delta) = if n >= 2 {
            (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf)
        } else {
            (1.0, 2.0, 0.5, 0.5)
        };
        let mut evals = 0;
        let mut eval = |x: &[f64], evals: &mut usize| {
            *evals += 1;
            sanitize(f(x))
        };

        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        let v0 = eval(x0, &mut evals);
        simplex.push((x0.to_vec(), v0));
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += if x[i] != 0.0 { self.initial_step * x[i].abs().max(1.0) } else { self.initial_step };
            let v = eval(&x, &mut evals);
            simplex.push((x, v));
        }

        let mut iterations = 0;
        let mut converged = false;
        while iterations < self.max_iter {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let best = simplex[0].1;
            let worst = simplex[n].1;
            if best.is_finite() && worst - best <= self.ftol * (1.0 + best.abs()) {
                converged = true;
                break;
            }
            iterations += 1;

            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / nf;
                }
            }
            let toward = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[n].0)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };

            let xr = toward(alpha);
            let fr = eval(&xr, &mut evals);
            if fr < simplex[0].1 {
                let xe = toward(alpha * beta);
                let fe = eval(&xe, &mut evals);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < simplex[n].1 {
                let xc = toward(alpha * gamma);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            } else {
                let xc = toward(-gamma);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            };
            if fc < fr.min(simplex[n].1) {
                simplex[n] = (xc, fc);
                continue;
            }
            // shrink toward the best vertex
            let x_best = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                for (xi, bi) in vertex.0.iter_mut().zip(&x_best) {
                    *xi = bi + delta * (*xi - bi);
                }
                vertex.1 = eval(&vertex.0, &mut evals);
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (x, value) = simplex.swap_remove(0);
        Minimum {
            x,
            value,
            iterations,
            evaluations: evals,
            converged,
        }
    }
}

/// BFGS on central-difference gradients with Armijo backtracking.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bfgs {
    pub max_iter: usize,
    /// Relative objective change that counts as converged.
    pub ftol: f64,
    /// Gradient infinity-norm that counts as converged.
    pub gtol: f64,
    pub fd_step: f64,
}

impl Default for Bfgs {
    fn default() -> Self {
        Bfgs {
            max_iter: 2000,
            ftol: 1e-8,
            gtol: 1e-6,
            fd_step: 1e-5,
        }
    }
}

impl Bfgs {
    pub fn minimize<F: FnMut(&[f64]) -> f64>(&self, mut f: F, x0: &[f64]) -> Minimum {
        let n = x0.len();
        let mut evals = 0;
        let mut eval = |x: &[f64], evals: &mut usize| {
            *evals += 1;
            sanitize(f(x))
        };
        let fd = self.fd_step;
        let gradient = |eval: &mut dyn FnMut(&[f64], &mut usize) -> f64, x: &[f64], evals: &mut usize| -> Option<Vec<f64>> {
            let mut g = vec![0.0; n];
            let mut xp = x.to_vec();
            for i in 0..n {
                let h = fd * x[i].abs().max(1.0);
                xp[i] = x[i] + h;
                let fp = eval(&xp, evals);
                xp[i] = x[i] - h;
                let fm = eval(&xp, evals);
                xp[i] = x[i];
                if !(fp.is_finite() && fm.is_finite()) {
                    return None;
                }
                g[i] = (fp - fm) / (2.0 * h);
            }
            Some(g)
        };

        let mut x = x0.to_vec();
        let mut fx = eval(&x, &mut evals);
        let unconverged = |x: Vec<f64>, value, iterations, evaluations| Minimum {
            x,
            value,
            iterations,
            evaluations,
            converged: false,
        };
        if !fx.is_finite() {
            return unconverged(x, fx, 0, evals);
        }
        let Some(mut g) = gradient(&mut eval, &x, &mut evals) else {
            return unconverged(x, fx, 0, evals);
        };
        let identity = |n: usize| {
            let mut m = vec![vec![0.0; n]; n];
            for (i, row) in m.iter_mut().enumerate() {
                row[i] = 1.0;
            }
            m
        };
        let mut hinv = identity(n);
        let mut iterations = 0;
        let mut small_steps = 0;
        let mut reset_once = false;

        while iterations < self.max_iter {
            if g.iter().fold(0.0_f64, |a, v| a.max(v.abs())) <= self.gtol * (1.0 + fx.abs()) {
                return Minimum { x, value: fx, iterations, evaluations: evals, converged: true };
            }
            iterations += 1;
            let mut dir: Vec<f64> = hinv
                .iter()
                .map(|row| -row.iter().zip(&g).map(|(h, gi)| h * gi).sum::<f64>())
                .collect();
            let mut slope: f64 = dir.iter().zip(&g).map(|(d, gi)| d * gi).sum();
            if !(slope < 0.0) {
                hinv = identity(n);
                dir = g.iter().map(|v| -v).collect();
                slope = -g.iter().map(|v| v * v).sum::<f64>();
            }

            let mut step = 1.0;
            let mut accepted = None;
            for _ in 0..40 {
                let xn: Vec<f64> = x.iter().zip(&dir).map(|(xi, d)| xi + step * d).collect();
                let fnew = eval(&xn, &mut evals);
                if fnew.is_finite() && fnew <= fx + 1e-4 * step * slope {
                    accepted = Some((xn, fnew));
                    break;
                }
                step *= 0.5;
            }
            let Some((xn, fnew)) = accepted else {
                if reset_once {
                    break;
                }
                reset_once = true;
                hinv = identity(n);
                continue;
            };
            let Some(gn) = gradient(&mut eval, &xn, &mut evals) else {
                break;
            };
            reset_once = false;

            let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
            let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
            if sy > 1e-12 * libm::sqrt(s.iter().map(|v| v * v).sum::<f64>() * y.iter().map(|v| v * v).sum::<f64>()) {
                let rho = 1.0 / sy;
                let hy: Vec<f64> = hinv
                    .iter()
                    .map(|row| row.iter().zip(&y).map(|(h, yi)| h * yi).sum())
                    .collect();
                let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
                for i in 0..n {
                    for j in 0..n {
                        hinv[i][j] += -rho * (hy[i] * s[j] + s[i] * hy[j])
                            + (rho * rho * yhy + rho) * s[i] * s[j];
                    }
                }
            }

            let change = fx - fnew;
            x = xn;
            fx = fnew;
            g = gn;
            if change <= self.ftol * (1.0 + fx.abs()) {
                small_steps += 1;
                if small_steps >= 2 {
                    return Minimum { x, value: fx, iterations, evaluations: evals, converged: true };
                }
            } else {
                small_steps = 0;
            }
        }
        unconverged(x, fx, iterations, evals)
    }
}
