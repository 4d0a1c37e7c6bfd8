//! Derivative-free local search: Nelder-Mead simplex and golden-section
//! line search.

/// Nelder-Mead settings. Reflection/expansion/contraction/shrink follow the
/// dimension-adaptive schedule of Gao and Han (2012), which behaves far
/// better than the textbook constants once the dimension passes ~10.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    pub max_iters: usize,
    /// Minimum improvement of the best value over `patience` iterations.
    pub tol: f64,
    pub patience: usize,
    /// Edge length of the initial axis-aligned simplex.
    pub initial_step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self { max_iters: 5000, tol: 1e-7, patience: 50, initial_step: 0.5 }
    }
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

impl NelderMead {
    pub fn minimize(&self, mut f: impl FnMut(&[f64]) -> f64, x0: &[f64]) -> Minimum {
        let n = x0.len();
        let mut evaluations = 0usize;
        let mut eval = |x: &[f64]| {
            evaluations += 1;
            sanitize(f(x))
        };
        if n == 0 {
            let value = eval(x0);
            return Minimum { x: Vec::new(), value, iterations: 0, evaluations: 1, converged: true };
        }

        let nf = n as f64;
        let alpha = 1.0;
        let gamma = 1.0 + 2.0 / nf;
        let rho = 0.75 - 1.0 / (2.0 * nf);
        let sigma = if n > 1 { 1.0 - 1.0 / nf } else { 0.5 };

        let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        let mut values: Vec<f64> = Vec::with_capacity(n + 1);
        simplex.push(x0.to_vec());
        values.push(eval(x0));
        for k in 0..n {
            let mut x = x0.to_vec();
            x[k] += self.initial_step;
            values.push(eval(&x));
            simplex.push(x);
        }

        let mut best_history: Vec<f64> = Vec::with_capacity(self.max_iters.min(1 << 16) + 1);
        let mut order: Vec<usize> = (0..=n).collect();
        let mut iterations = 0;
        let mut converged = false;

        loop {
            order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
            let best = values[order[0]];
            best_history.push(best);
            let len = best_history.len();
            if len > self.patience && best_history[len - 1 - self.patience] - best <= self.tol {
                converged = true;
                break;
            }
            if iterations >= self.max_iters {
                break;
            }
            iterations += 1;

            let worst = order[n];
            let second_worst = values[order[n - 1]];
            let mut centroid = vec![0.0; n];
            for &i in &order[..n] {
                for (c, x) in centroid.iter_mut().zip(&simplex[i]) {
                    *c += x;
                }
            }
            centroid.iter_mut().for_each(|c| *c /= nf);
            let towards = |t: f64| -> Vec<f64> {
                centroid.iter().zip(&simplex[worst]).map(|(c, w)| c + t * (c - w)).collect()
            };

            let xr = towards(alpha);
            let fr = eval(&xr);
            if fr < best {
                let xe = towards(alpha * gamma);
                let fe = eval(&xe);
                if fe < fr {
                    simplex[worst] = xe;
                    values[worst] = fe;
                } else {
                    simplex[worst] = xr;
                    values[worst] = fr;
                }
                continue;
            }
            if fr < second_worst {
                simplex[worst] = xr;
                values[worst] = fr;
                continue;
            }
            let (xc, fc) = if fr < values[worst] {
                let xc = towards(alpha * rho);
                let fc = eval(&xc);
                (xc, fc)
            } else {
                let xc = towards(-rho);
                let fc = eval(&xc);
                (xc, fc)
            };
            if fc < fr.min(values[worst]) {
                simplex[worst] = xc;
                values[worst] = fc;
                continue;
            }
            // Shrink towards the best vertex.
            let best_idx = order[0];
            let anchor = simplex[best_idx].clone();
            for i in 0..=n {
                if i == best_idx {
                    continue;
                }
                for (x, a) in simplex[i].iter_mut().zip(&anchor) {
                    *x = a + sigma * (*x - a);
                }
                values[i] = eval(&simplex[i]);
            }
        }

        let best_idx = order[0];
        Minimum {
            x: simplex[best_idx].clone(),
            value: values[best_idx],
            iterations,
            evaluations,
            converged,
        }
    }
}

/// Minimizes a 1-D function on `[lo, hi]` with `evals` golden-section
/// evaluations. Returns the best `(t, f(t))` seen.
pub fn golden_section(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, evals: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = sanitize(f(x1));
    let mut f2 = sanitize(f(x2));
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    for _ in 2..evals {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = sanitize(f(x1));
            if f1 < best.1 {
                best = (x1, f1);
            }
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = sanitize(f(x2));
            if f2 < best.1 {
                best = (x2, f2);
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> f64 {
        x.windows(2).map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2)).sum()
    }

    #[test]
    fn finds_quadratic_minimum() {
        let nm = NelderMead { max_iters: 5000, tol: 1e-14, patience: 100, initial_step: 1.0 };
        let m = nm.minimize(|x| x.iter().enumerate().map(|(i, v)| (v - i as f64).powi(2)).sum(), &[5.0; 6]);
        assert!(m.converged);
        assert!(m.value < 1e-10, "{}", m.value);
    }

    #[test]
    fn rosenbrock_2d() {
        let nm = NelderMead { max_iters: 5000, tol: 1e-16, patience: 200, initial_step: 0.5 };
        let m = nm.minimize(rosenbrock, &[-1.2, 1.0]);
        assert!((m.x[0] - 1.0).abs() < 1e-4 && (m.x[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn best_value_never_worse_than_start_and_respects_budget() {
        let nm = NelderMead { max_iters: 10, tol: 0.0, patience: 1000, initial_step: 0.1 };
        let start = [0.3, -0.7, 2.0];
        let m = nm.minimize(rosenbrock, &start);
        assert!(m.value <= rosenbrock(&start));
        assert_eq!(m.iterations, 10);
        assert!(!m.converged);
    }

    #[test]
    fn infinite_regions_are_avoided() {
        let nm = NelderMead::default();
        let m = nm.minimize(|x| if x[0] < 0.0 { f64::NAN } else { (x[0] - 0.5).powi(2) }, &[2.0]);
        assert!((m.x[0] - 0.5).abs() < 1e-3);
    }

    #[test]
    fn golden_section_brackets_minimum() {
        let (t, v) = golden_section(|t| (t - 0.3).powi(2), 0.0, 1.0, 60);
        assert!((t - 0.3).abs() < 1e-9 && v < 1e-17);
    }
}
