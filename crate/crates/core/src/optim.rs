//! Derivative-free maximization with the Nelder-Mead simplex. Deterministic
//! for a fixed starting point, so callers seed restarts however they like.

/// Knobs for one simplex run.
#[derive(Debug, Clone)]
pub struct SimplexOptions {
    /// Hard budget on objective evaluations.
    pub max_evals: usize,
    /// Converged when the simplex value spread drops below this.
    pub value_tol: f64,
    /// Edge length of the initial axis-aligned simplex.
    pub initial_step: f64,
    /// Stop as soon as the best value reaches this, if set.
    pub target: Option<f64>,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            max_evals: 5000,
            value_tol: 1e-9,
            initial_step: 0.5,
            target: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Maximizes `f` starting from `x0`. The budget in `opts.max_evals` is never
/// exceeded; `converged` reports whether the spread criterion (or the target)
/// was met before the budget ran out.
pub fn maximize<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    opts: &SimplexOptions,
) -> SimplexResult {
    let d = x0.len();
    assert!(d >= 1, "cannot optimize over zero variables");
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        f(x)
    };

    // simplex of d+1 vertices, each (point, value)
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    let v0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), v0));
    for i in 0..d {
        if evals >= opts.max_evals {
            break;
        }
        let mut x = x0.to_vec();
        x[i] += opts.initial_step;
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }
    if simplex.len() < d + 1 {
        // budget too small to even build the simplex
        let best = simplex
            .into_iter()
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        return SimplexResult {
            x: best.0,
            value: best.1,
            evals,
            converged: false,
        };
    }

    let hit_target = |v: f64| opts.target.is_some_and(|t| v >= t);
    let mut converged = false;
    loop {
        // best first
        simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        let best = simplex[0].1;
        let spread = best - simplex[d].1;
        if hit_target(best) || spread <= opts.value_tol {
            converged = true;
            break;
        }
        // worst case evals in one iteration: reflect + expand/contract, or shrink
        if evals + (2 + d).max(d + 1) > opts.max_evals {
            break;
        }

        let centroid: Vec<f64> = (0..d)
            .map(|j| simplex[..d].iter().map(|(x, _)| x[j]).sum::<f64>() / d as f64)
            .collect();
        let worst = simplex[d].clone();
        let shifted = |coef: f64| -> Vec<f64> {
            (0..d)
                .map(|j| centroid[j] + coef * (centroid[j] - worst.0[j]))
                .collect()
        };

        let xr = shifted(1.0);
        let vr = eval(&xr, &mut evals);
        if vr > simplex[0].1 {
            let xe = shifted(2.0);
            let ve = eval(&xe, &mut evals);
            simplex[d] = if ve > vr { (xe, ve) } else { (xr, vr) };
            continue;
        }
        if vr > simplex[d - 1].1 {
            simplex[d] = (xr, vr);
            continue;
        }
        // contraction, outside when the reflection beat the worst vertex
        let xc = if vr > worst.1 {
            shifted(0.5)
        } else {
            shifted(-0.5)
        };
        let vc = eval(&xc, &mut evals);
        if vc > vr.max(worst.1) {
            simplex[d] = (xc, vc);
            continue;
        }
        // shrink toward the best vertex
        let anchor = simplex[0].0.clone();
        for k in 1..=d {
            let x: Vec<f64> = (0..d)
                .map(|j| anchor[j] + 0.5 * (simplex[k].0[j] - anchor[j]))
                .collect();
            let v = eval(&x, &mut evals);
            simplex[k] = (x, v);
        }
    }

    simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    SimplexResult {
        x: simplex[0].0.clone(),
        value: simplex[0].1,
        evals,
        converged,
    }
}
