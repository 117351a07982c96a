//! Derivative-free Nelder–Mead minimization.
//!
//! Uses the dimension-adaptive coefficients of Gao & Han, which keep the
//! simplex from collapsing prematurely in high dimensions, and rebuilds the
//! simplex around the incumbent whenever it converges while budget remains.

/// Settings for one minimization run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    pub max_evaluations: usize,
    /// Stop once `max f - min f` over the simplex falls below this.
    pub f_tolerance: f64,
    /// Edge length of the initial axis-aligned simplex.
    pub initial_step: f64,
    /// Rebuild the simplex at the incumbent after convergence, shrinking the
    /// step by this factor each time. `None` disables rebuilding.
    pub rebuild_factor: Option<f64>,
    /// Rebuilds that improve by less than `f_tolerance` end the run.
    pub max_rebuilds: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            max_evaluations: 10_000,
            f_tolerance: 1e-10,
            initial_step: 0.1,
            rebuild_factor: Some(0.5),
            max_rebuilds: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evaluations: usize,
    /// The final simplex met the spread tolerance before the budget ran out.
    pub converged: bool,
}

struct Coefficients {
    reflect: f64,
    expand: f64,
    contract: f64,
    shrink: f64,
}

impl Coefficients {
    fn adaptive(n: usize) -> Self {
        let n = n.max(2) as f64;
        Coefficients {
            reflect: 1.0,
            expand: 1.0 + 2.0 / n,
            contract: 0.75 - 1.0 / (2.0 * n),
            shrink: 1.0 - 1.0 / n,
        }
    }
}

struct Simplex {
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
    /// Running sum of all vertices, for O(n) centroid updates.
    sum: Vec<f64>,
}

impl Simplex {
    fn around<F: FnMut(&[f64]) -> f64>(
        x0: &[f64],
        f0: Option<f64>,
        step: f64,
        f: &mut F,
        evals: &mut usize,
    ) -> Self {
        let n = x0.len();
        let mut points = Vec::with_capacity(n + 1);
        let mut values = Vec::with_capacity(n + 1);
        points.push(x0.to_vec());
        values.push(match f0 {
            Some(v) => v,
            None => {
                *evals += 1;
                f(x0)
            }
        });
        for i in 0..n {
            let mut p = x0.to_vec();
            p[i] += step;
            *evals += 1;
            values.push(f(&p));
            points.push(p);
        }
        let mut s = Simplex {
            points,
            values,
            sum: vec![0.0; n],
        };
        s.recompute_sum();
        s
    }

    fn recompute_sum(&mut self) {
        self.sum.iter_mut().for_each(|v| *v = 0.0);
        for p in &self.points {
            for (s, x) in self.sum.iter_mut().zip(p) {
                *s += x;
            }
        }
    }

    /// Indices of best, worst and second-worst vertices.
    fn ranks(&self) -> (usize, usize, usize) {
        let mut best = 0;
        let mut worst = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v < self.values[best] {
                best = i;
            }
            if v > self.values[worst] {
                worst = i;
            }
        }
        let mut second = if worst == 0 { 1 } else { 0 };
        for (i, &v) in self.values.iter().enumerate() {
            if i != worst && v > self.values[second] {
                second = i;
            }
        }
        (best, worst, second)
    }

    fn replace(&mut self, idx: usize, p: Vec<f64>, v: f64) {
        for ((s, new), old) in self.sum.iter_mut().zip(&p).zip(&self.points[idx]) {
            *s += new - old;
        }
        self.points[idx] = p;
        self.values[idx] = v;
    }
}

fn lerp(from: &[f64], to: &[f64], t: f64) -> Vec<f64> {
    from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect()
}

/// Minimizes `f` starting from `x0`. Non-finite objective values are treated
/// as `+∞`.
pub fn minimize<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    opts: &SimplexOptions,
) -> SimplexResult {
    let n = x0.len();
    assert!(n >= 1, "empty parameter vector");
    let mut safe = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let k = Coefficients::adaptive(n);
    let mut evals = 0usize;
    let mut step = opts.initial_step;
    let mut simplex = Simplex::around(x0, None, step, &mut safe, &mut evals);
    let mut rebuilds = 0usize;
    let mut last_converged_best = f64::INFINITY;

    loop {
        let (best, worst, second) = simplex.ranks();
        let spread = simplex.values[worst] - simplex.values[best];
        if spread <= opts.f_tolerance {
            let fb = simplex.values[best];
            let stalled = last_converged_best - fb <= opts.f_tolerance;
            match opts.rebuild_factor {
                Some(factor)
                    if !stalled
                        && rebuilds < opts.max_rebuilds
                        && evals + n < opts.max_evaluations =>
                {
                    last_converged_best = fb;
                    rebuilds += 1;
                    step *= factor;
                    let xb = simplex.points[best].clone();
                    simplex = Simplex::around(&xb, Some(fb), step, &mut safe, &mut evals);
                    continue;
                }
                _ => {
                    return SimplexResult {
                        x: simplex.points[best].clone(),
                        f: fb,
                        evaluations: evals,
                        converged: true,
                    };
                }
            }
        }
        if evals >= opts.max_evaluations {
            return SimplexResult {
                x: simplex.points[best].clone(),
                f: simplex.values[best],
                evaluations: evals,
                converged: false,
            };
        }

        let worst_pt = simplex.points[worst].clone();
        let centroid: Vec<f64> = simplex
            .sum
            .iter()
            .zip(&worst_pt)
            .map(|(s, w)| (s - w) / n as f64)
            .collect();

        let reflected = lerp(&centroid, &worst_pt, -k.reflect);
        let fr = safe(&reflected);
        evals += 1;

        if fr < simplex.values[best] {
            let expanded = lerp(&centroid, &worst_pt, -k.reflect * k.expand);
            let fe = safe(&expanded);
            evals += 1;
            if fe < fr {
                simplex.replace(worst, expanded, fe);
            } else {
                simplex.replace(worst, reflected, fr);
            }
            continue;
        }
        if fr < simplex.values[second] {
            simplex.replace(worst, reflected, fr);
            continue;
        }

        let (candidate, fc) = if fr < simplex.values[worst] {
            let outside = lerp(&centroid, &reflected, k.contract);
            let fo = safe(&outside);
            evals += 1;
            (outside, fo)
        } else {
            let inside = lerp(&centroid, &worst_pt, k.contract);
            let fi = safe(&inside);
            evals += 1;
            (inside, fi)
        };
        let threshold = fr.min(simplex.values[worst]);
        if fc < threshold {
            simplex.replace(worst, candidate, fc);
            continue;
        }

        // Shrink toward the best vertex.
        let best_pt = simplex.points[best].clone();
        for i in 0..=n {
            if i == best {
                continue;
            }
            let p = lerp(&best_pt, &simplex.points[i], k.shrink);
            simplex.values[i] = safe(&p);
            simplex.points[i] = p;
            evals += 1;
        }
        simplex.recompute_sum();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let r = minimize(
            |x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2),
            &[0.0, 0.0],
            &SimplexOptions::default(),
        );
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-4 && (r.x[1] + 2.0).abs() < 1e-4);
        assert!(r.f < 1e-9);
    }

    #[test]
    fn rosenbrock() {
        let opts = SimplexOptions {
            max_evaluations: 20_000,
            f_tolerance: 1e-14,
            ..Default::default()
        };
        let r = minimize(
            |x| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2),
            &[-1.2, 1.0],
            &opts,
        );
        assert!((r.x[0] - 1.0).abs() < 1e-4, "{r:?}");
    }

    #[test]
    fn high_dimensional_sphere() {
        let n = 40;
        let opts = SimplexOptions {
            max_evaluations: 200_000,
            f_tolerance: 1e-12,
            initial_step: 0.5,
            ..Default::default()
        };
        let r = minimize(
            |x| x.iter().enumerate().map(|(i, v)| (v - i as f64 * 0.01).powi(2)).sum(),
            &vec![1.0; n],
            &opts,
        );
        assert!(r.f < 1e-6, "f = {}", r.f);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let opts = SimplexOptions {
            max_evaluations: 30,
            ..Default::default()
        };
        let r = minimize(|x| x.iter().map(|v| v * v).sum(), &[5.0; 6], &opts);
        assert!(!r.converged);
        assert!(r.evaluations >= 30);
    }

    #[test]
    fn nan_is_treated_as_infinite() {
        let r = minimize(
            |x| if x[0] < 0.0 { f64::NAN } else { (x[0] - 0.5).powi(2) },
            &[0.2],
            &SimplexOptions::default(),
        );
        assert!((r.x[0] - 0.5).abs() < 1e-4);
    }
}
