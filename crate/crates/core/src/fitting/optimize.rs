//! Box-constrained least squares for a handful of parameters.
//!
//! Levenberg-Marquardt with a central-difference Jacobian and projection
//! onto the box, plus a Nelder-Mead simplex for residuals that are not
//! smooth enough for the Jacobian to be trusted.

/// Outcome of one local minimisation.
#[derive(Clone, Debug)]
pub(crate) struct Minimum {
    pub params: Vec<f64>,
    pub wssr: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Why Levenberg-Marquardt gave up.
#[derive(Clone, Debug)]
pub(crate) enum LmFailure {
    /// Jacobian columns are (nearly) linearly dependent or vanish.
    IllConditioned(Minimum),
}

pub(crate) struct Problem<'a> {
    /// Residual vector at a point inside the box; `None` if the model cannot
    /// be evaluated there.
    pub residuals: &'a dyn Fn(&[f64]) -> Option<Vec<f64>>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub max_iterations: usize,
    /// Stop once an accepted step lowers the WSSR by less than this fraction.
    pub tol: f64,
}

impl Problem<'_> {
    fn project(&self, p: &mut [f64]) {
        for (i, x) in p.iter_mut().enumerate() {
            *x = x.clamp(self.lower[i], self.upper[i]);
        }
    }

    fn wssr(&self, p: &[f64]) -> f64 {
        match (self.residuals)(p) {
            Some(r) => {
                let s: f64 = r.iter().map(|x| x * x).sum();
                if s.is_finite() {
                    s
                } else {
                    f64::INFINITY
                }
            }
            None => f64::INFINITY,
        }
    }

    fn jacobian(&self, p: &[f64], r0: &[f64]) -> Option<Vec<Vec<f64>>> {
        let mut cols = Vec::with_capacity(p.len());
        for j in 0..p.len() {
            let h = 1e-6 * p[j].abs().max(1e-2);
            let (mut lo, mut hi) = (p.to_vec(), p.to_vec());
            lo[j] = (p[j] - h).max(self.lower[j]);
            hi[j] = (p[j] + h).min(self.upper[j]);
            let span = hi[j] - lo[j];
            if span <= 0.0 {
                return None;
            }
            let rl = if lo[j] == p[j] { r0.to_vec() } else { (self.residuals)(&lo)? };
            let rh = if hi[j] == p[j] { r0.to_vec() } else { (self.residuals)(&hi)? };
            cols.push(rh.iter().zip(&rl).map(|(a, b)| (a - b) / span).collect());
        }
        Some(cols)
    }
}

/// Solves the small symmetric system `a x = b` by Gaussian elimination with
/// partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[piv][c] == 0.0 || !a[piv][c].is_finite() {
            return None;
        }
        a.swap(c, piv);
        b.swap(c, piv);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            let (upper, lower) = a.split_at_mut(r);
            for (x, &y) in lower[0][c..].iter_mut().zip(&upper[c][c..]) {
                *x -= f * y;
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Determinant of the correlation matrix of the normal equations; near zero
/// when parameters are not separately identifiable.
fn conditioning(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    if a.iter().enumerate().any(|(i, row)| !(row[i] > 0.0)) {
        return 0.0;
    }
    let mut c: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| a[i][j] / (a[i][i] * a[j][j]).sqrt()).collect()).collect();
    let mut det = 1.0;
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| c[i][k].abs().total_cmp(&c[j][k].abs())).unwrap();
        if c[piv][k] == 0.0 {
            return 0.0;
        }
        if piv != k {
            c.swap(k, piv);
            det = -det;
        }
        det *= c[k][k];
        for r in k + 1..n {
            let f = c[r][k] / c[k][k];
            let (upper, lower) = c.split_at_mut(r);
            for (x, &y) in lower[0][k..].iter_mut().zip(&upper[k][k..]) {
                *x -= f * y;
            }
        }
    }
    det.abs()
}

const ILL_CONDITIONED: f64 = 1e-12;

pub(crate) fn levenberg_marquardt(problem: &Problem, start: &[f64]) -> Result<Minimum, LmFailure> {
    let mut p = start.to_vec();
    problem.project(&mut p);
    let Some(mut r) = (problem.residuals)(&p) else {
        return Err(LmFailure::IllConditioned(Minimum {
            params: p,
            wssr: f64::INFINITY,
            iterations: 0,
            converged: false,
        }));
    };
    let mut s: f64 = r.iter().map(|x| x * x).sum();
    let mut mu = 1e-3;
    let mut iterations = 0;
    let done =
        |p: Vec<f64>, s: f64, it: usize, converged: bool| Minimum { params: p, wssr: s, iterations: it, converged };
    while iterations < problem.max_iterations {
        iterations += 1;
        if s == 0.0 {
            return Ok(done(p, s, iterations, true));
        }
        let Some(jac) = problem.jacobian(&p, &r) else {
            return Err(LmFailure::IllConditioned(done(p, s, iterations, false)));
        };
        let np = p.len();
        let a: Vec<Vec<f64>> =
            (0..np).map(|i| (0..np).map(|j| jac[i].iter().zip(&jac[j]).map(|(x, y)| x * y).sum()).collect()).collect();
        let g: Vec<f64> = (0..np).map(|i| jac[i].iter().zip(&r).map(|(x, y)| x * y).sum()).collect();
        if conditioning(&a) < ILL_CONDITIONED {
            return Err(LmFailure::IllConditioned(done(p, s, iterations, false)));
        }
        // parameters pinned at a bound with the gradient pushing outward
        // stay put this iteration
        let active: Vec<usize> = (0..np)
            .filter(|&i| !((p[i] <= problem.lower[i] && g[i] > 0.0) || (p[i] >= problem.upper[i] && g[i] < 0.0)))
            .collect();
        if active.is_empty() {
            return Ok(done(p, s, iterations, true));
        }
        let mut accepted = None;
        while mu < 1e16 {
            let mut damped: Vec<Vec<f64>> = active.iter().map(|&i| active.iter().map(|&j| a[i][j]).collect()).collect();
            for (d, &i) in active.iter().enumerate() {
                damped[d][d] += mu * a[i][i];
            }
            let Some(reduced) = solve(damped, active.iter().map(|&i| -g[i]).collect()) else {
                mu *= 4.0;
                continue;
            };
            let mut step = vec![0.0; np];
            for (d, &i) in active.iter().enumerate() {
                step[i] = reduced[d];
            }
            let mut q: Vec<f64> = p.iter().zip(&step).map(|(x, d)| x + d).collect();
            problem.project(&mut q);
            if q == p {
                break;
            }
            if let Some(rq) = (problem.residuals)(&q) {
                let sq: f64 = rq.iter().map(|x| x * x).sum();
                if sq.is_finite() && sq < s {
                    accepted = Some((q, rq, sq));
                    mu = (mu / 3.0).max(1e-15);
                    break;
                }
            }
            mu *= 4.0;
        }
        match accepted {
            Some((q, rq, sq)) => {
                let gain = (s - sq) / s;
                p = q;
                r = rq;
                s = sq;
                if gain < problem.tol {
                    return Ok(done(p, s, iterations, true));
                }
            }
            // no damping lowers the WSSR: a (projected) stationary point
            None => return Ok(done(p, s, iterations, true)),
        }
    }
    Ok(done(p, s, iterations, false))
}

/// Nelder-Mead on the projected objective, restarted once from its best
/// vertex to guard against a collapsed simplex.
pub(crate) fn nelder_mead(problem: &Problem, start: &[f64], budget: usize) -> Minimum {
    let first = nelder_mead_once(problem, start, budget);
    let second = nelder_mead_once(problem, &first.params, budget.saturating_sub(first.iterations).max(1));
    let iterations = first.iterations + second.iterations;
    if second.wssr <= first.wssr {
        Minimum { iterations, ..second }
    } else {
        Minimum { iterations, ..first }
    }
}

fn nelder_mead_once(problem: &Problem, start: &[f64], budget: usize) -> Minimum {
    let n = start.len();
    let eval = |p: &[f64]| -> (Vec<f64>, f64) {
        let mut q = p.to_vec();
        problem.project(&mut q);
        let s = problem.wssr(&q);
        (q, s)
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = vec![eval(start)];
    for j in 0..n {
        let mut p = simplex[0].0.clone();
        let step = 0.1 * p[j].abs().max(0.1);
        p[j] = if p[j] + step <= problem.upper[j] { p[j] + step } else { p[j] - step };
        simplex.push(eval(&p));
    }
    let mut iterations = 0;
    let mut converged = false;
    while iterations < budget {
        iterations += 1;
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (best, worst) = (simplex[0].1, simplex[n].1);
        let spread = (worst - best).abs();
        let size = (1..=n)
            .flat_map(|v| (0..n).map(move |j| (v, j)))
            .map(|(v, j)| (simplex[v].0[j] - simplex[0].0[j]).abs() / simplex[0].0[j].abs().max(1.0))
            .fold(0.0, f64::max);
        if best.is_finite() && spread <= problem.tol * best.abs().max(1e-300) && size < 1e-8 {
            converged = true;
            break;
        }
        if best == 0.0 {
            converged = true;
            break;
        }
        let centroid: Vec<f64> = (0..n).map(|j| simplex[..n].iter().map(|v| v.0[j]).sum::<f64>() / n as f64).collect();
        let along =
            |t: f64| -> Vec<f64> { (0..n).map(|j| centroid[j] + t * (simplex[n].0[j] - centroid[j])).collect() };
        let reflected = eval(&along(-1.0));
        if reflected.1 < simplex[0].1 {
            let expanded = eval(&along(-2.0));
            simplex[n] = if expanded.1 < reflected.1 { expanded } else { reflected };
        } else if reflected.1 < simplex[n - 1].1 {
            simplex[n] = reflected;
        } else {
            let contracted = if reflected.1 < simplex[n].1 { eval(&along(-0.5)) } else { eval(&along(0.5)) };
            if contracted.1 < simplex[n].1.min(reflected.1) {
                simplex[n] = contracted;
            } else {
                let anchor = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    let p: Vec<f64> = (0..n).map(|j| anchor[j] + 0.5 * (v.0[j] - anchor[j])).collect();
                    *v = eval(&p);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (params, wssr) = simplex.swap_remove(0);
    Minimum { params, wssr, iterations, converged }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock_residuals(p: &[f64]) -> Option<Vec<f64>> {
        Some(vec![10.0 * (p[1] - p[0] * p[0]), 1.0 - p[0]])
    }

    fn problem(f: &dyn Fn(&[f64]) -> Option<Vec<f64>>) -> Problem<'_> {
        Problem { residuals: f, lower: vec![-5.0, -5.0], upper: vec![5.0, 5.0], max_iterations: 500, tol: 1e-15 }
    }

    #[test]
    fn lm_solves_rosenbrock() {
        let p = problem(&rosenbrock_residuals);
        let m = levenberg_marquardt(&p, &[-1.2, 1.0]).unwrap();
        assert!(m.converged);
        assert!((m.params[0] - 1.0).abs() < 1e-6 && (m.params[1] - 1.0).abs() < 1e-6, "{:?}", m.params);
    }

    #[test]
    fn simplex_solves_rosenbrock() {
        let p = problem(&rosenbrock_residuals);
        let m = nelder_mead(&p, &[-1.2, 1.0], 5000);
        assert!((m.params[0] - 1.0).abs() < 1e-5 && (m.params[1] - 1.0).abs() < 1e-5, "{:?}", m.params);
    }

    #[test]
    fn bounds_are_respected() {
        // unconstrained minimum at x = -3 lies outside [0, 5]
        let f = |p: &[f64]| Some(vec![p[0] + 3.0, 0.1 * p[1]]);
        let mut p = problem(&f);
        p.lower = vec![0.0, -5.0];
        let m = levenberg_marquardt(&p, &[2.0, 1.0]).unwrap();
        assert_eq!(m.params[0], 0.0);
        let m = nelder_mead(&p, &[2.0, 1.0], 2000);
        assert!(m.params[0].abs() < 1e-6);
    }

    #[test]
    fn dependent_columns_are_ill_conditioned() {
        let f = |p: &[f64]| Some((0..5).map(|i| (p[0] + p[1]) * i as f64 - 1.0).collect());
        let p = problem(&f);
        assert!(matches!(levenberg_marquardt(&p, &[0.3, 0.4]), Err(LmFailure::IllConditioned(_))));
    }
}
