use nalgebra::{DMatrix, DVector};

pub(crate) struct NewtonOutcome {
    pub u: Vec<f64>,
    pub iterations: usize,
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Damped Newton with a forward-difference Jacobian and backtracking on the
/// Euclidean residual norm. Stops once `‖F‖∞ ≤ tol`, on stagnation, or after
/// `max_iterations` steps; returns the best iterate seen.
pub(crate) fn damped_newton<F>(mut u: Vec<f64>, f: F, tol: f64, max_iterations: usize) -> NewtonOutcome
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n = u.len();
    let mut fu = f(&u);
    let mut iterations = 0;
    while iterations < max_iterations && norm_inf(&fu) > tol {
        iterations += 1;

        let mut jac = DMatrix::<f64>::zeros(n, n);
        let mut probe = u.clone();
        for j in 0..n {
            let h = 1.5e-8 * u[j].abs().max(1.0);
            probe[j] = u[j] + h;
            let fp = f(&probe);
            probe[j] = u[j];
            for i in 0..n {
                jac[(i, j)] = (fp[i] - fu[i]) / h;
            }
        }
        let rhs = DVector::from_iterator(n, fu.iter().map(|v| -v));
        let Some(step) = jac.lu().solve(&rhs) else {
            break;
        };

        let base = norm2(&fu);
        let mut alpha = 1.0;
        let mut accepted = None;
        while alpha > 1e-6 {
            let trial: Vec<f64> = u.iter().zip(step.iter()).map(|(a, d)| a + alpha * d).collect();
            let ft = f(&trial);
            if ft.iter().all(|v| v.is_finite()) && norm2(&ft) < (1.0 - 1e-4 * alpha) * base {
                accepted = Some((trial, ft));
                break;
            }
            alpha *= 0.5;
        }
        match accepted {
            Some((trial, ft)) => {
                u = trial;
                fu = ft;
            }
            None => break,
        }
    }
    NewtonOutcome { u, iterations }
}
