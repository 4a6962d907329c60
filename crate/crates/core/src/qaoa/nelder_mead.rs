//! Derivative-free simplex minimization with dimension-adaptive coefficients
//! (reflection 1, expansion 1 + 2/n, contraction 0.75 - 1/2n, shrink 1 - 1/n).

#[derive(Debug, Clone)]
pub struct NelderMead {
    pub max_evaluations: usize,
    /// Stop once the spread of objective values across the simplex is at most this.
    pub tolerance: f64,
    /// Edge length of the initial simplex along each coordinate.
    pub initial_step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

struct Counted<F> {
    f: F,
    evaluations: usize,
}

impl<F: FnMut(&[f64]) -> f64> Counted<F> {
    fn call(&mut self, x: &[f64]) -> f64 {
        self.evaluations += 1;
        let v = (self.f)(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }
}

impl NelderMead {
    pub fn minimize<F: FnMut(&[f64]) -> f64>(&self, f: F, start: &[f64]) -> Minimum {
        let n = start.len();
        let mut f = Counted { f, evaluations: 0 };
        if n == 0 {
            let value = f.call(start);
            return Minimum { point: Vec::new(), value, evaluations: 1, converged: true };
        }
        let nf = n as f64;
        let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);

        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        let v0 = f.call(start);
        simplex.push((start.to_vec(), v0));
        for i in 0..n {
            if f.evaluations >= self.max_evaluations {
                break;
            }
            let mut x = start.to_vec();
            x[i] += self.initial_step;
            let v = f.call(&x);
            simplex.push((x, v));
        }
        if simplex.len() < n + 1 {
            return best_of(simplex, f.evaluations, false);
        }

        // Running sum of all vertices; the centroid of the best n is (sum - worst) / n.
        let mut sum = vec![0.0; n];
        for (x, _) in &simplex {
            for (s, xi) in sum.iter_mut().zip(x) {
                *s += xi;
            }
        }
        let mut centroid = vec![0.0; n];
        let mut trial = vec![0.0; n];
        let mut converged = false;
        while f.evaluations < self.max_evaluations {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let spread = simplex[n].1 - simplex[0].1;
            if spread <= self.tolerance {
                converged = true;
                break;
            }

            for ((c, s), w) in centroid.iter_mut().zip(&sum).zip(&simplex[n].0) {
                *c = (s - w) / nf;
            }
            let f_worst = simplex[n].1;
            let f_best = simplex[0].1;
            let f_second = simplex[n - 1].1;

            along(&centroid, &simplex[n].0, alpha, &mut trial);
            let f_reflect = f.call(&trial);

            let replacement = if f_reflect < f_best {
                let reflected = trial.clone();
                if f.evaluations >= self.max_evaluations {
                    Some((reflected, f_reflect))
                } else {
                    along(&centroid, &simplex[n].0, alpha * gamma, &mut trial);
                    let f_expand = f.call(&trial);
                    Some(if f_expand < f_reflect { (trial.clone(), f_expand) } else { (reflected, f_reflect) })
                }
            } else if f_reflect < f_second {
                Some((trial.clone(), f_reflect))
            } else if f.evaluations >= self.max_evaluations {
                None
            } else {
                let outside = f_reflect < f_worst;
                let coeff = if outside { alpha * rho } else { -rho };
                along(&centroid, &simplex[n].0, coeff, &mut trial);
                let f_contract = f.call(&trial);
                let threshold = if outside { f_reflect } else { f_worst };
                if f_contract <= threshold {
                    Some((trial.clone(), f_contract))
                } else {
                    let best = simplex[0].0.clone();
                    for vertex in simplex.iter_mut().skip(1) {
                        if f.evaluations >= self.max_evaluations {
                            break;
                        }
                        for (xi, bi) in vertex.0.iter_mut().zip(&best) {
                            *xi = bi + sigma * (*xi - bi);
                        }
                        vertex.1 = f.call(&vertex.0);
                    }
                    sum.iter_mut().for_each(|s| *s = 0.0);
                    for (x, _) in &simplex {
                        for (s, xi) in sum.iter_mut().zip(x) {
                            *s += xi;
                        }
                    }
                    None
                }
            };
            if let Some(vertex) = replacement {
                for ((s, new), old) in sum.iter_mut().zip(&vertex.0).zip(&simplex[n].0) {
                    *s += new - old;
                }
                simplex[n] = vertex;
            }
        }
        let evaluations = f.evaluations;
        best_of(simplex, evaluations, converged)
    }
}

/// `out = centroid + coeff * (centroid - worst)`.
fn along(centroid: &[f64], worst: &[f64], coeff: f64, out: &mut [f64]) {
    for ((o, c), w) in out.iter_mut().zip(centroid).zip(worst) {
        *o = c + coeff * (c - w);
    }
}

fn best_of(simplex: Vec<(Vec<f64>, f64)>, evaluations: usize, converged: bool) -> Minimum {
    let (point, value) = simplex
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("simplex has at least one vertex");
    Minimum { point, value, evaluations, converged }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nm(max_evaluations: usize) -> NelderMead {
        NelderMead { max_evaluations, tolerance: 1e-12, initial_step: 0.5 }
    }

    #[test]
    fn quadratic_bowl() {
        let m = nm(5000).minimize(|x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2), &[0.0, 0.0]);
        assert!(m.converged);
        assert!((m.point[0] - 1.0).abs() < 1e-4 && (m.point[1] + 2.0).abs() < 1e-4);
    }

    #[test]
    fn rosenbrock() {
        let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let m = nm(20_000).minimize(rosen, &[-1.2, 1.0]);
        assert!(m.value < 1e-8, "{m:?}");
    }

    #[test]
    fn budget_is_respected() {
        let mut calls = 0;
        let m = nm(37).minimize(
            |x| {
                calls += 1;
                x.iter().map(|v| v.sin()).sum()
            },
            &[0.3; 10],
        );
        assert_eq!(m.evaluations, calls);
        assert!(calls <= 37);
    }

    #[test]
    fn nan_is_treated_as_worst() {
        let m = nm(2000).minimize(|x| if x[0] < 0.0 { f64::NAN } else { (x[0] - 2.0).powi(2) }, &[1.0]);
        assert!((m.point[0] - 2.0).abs() < 1e-4);
    }
}
