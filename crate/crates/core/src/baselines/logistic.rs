use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Penalty {
    /// `λ Σ |w_j|`
    L1,
    /// `(λ/2) Σ w_j²`
    L2,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogisticOptions {
    /// Stop once one step lowers the objective by less than this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for LogisticOptions {
    fn default() -> Self {
        LogisticOptions { tol: 1e-10, max_iter: 100_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub penalty: Penalty,
    pub lambda: f64,
    pub objective: f64,
    pub iterations: usize,
}

impl LogisticModel {
    pub fn score(&self, row: &[f64]) -> f64 {
        self.intercept + self.weights.iter().zip(row).map(|(w, x)| w * x).sum::<f64>()
    }

    pub fn predict_proba(&self, row: &[f64]) -> f64 {
        sigmoid(self.score(row))
    }

    pub fn predict(&self, row: &[f64]) -> i8 {
        if self.score(row) > 0.0 {
            1
        } else {
            -1
        }
    }

    pub fn nonzero_weights(&self) -> usize {
        self.weights.iter().filter(|w| **w != 0.0).count()
    }
}

pub fn logistic_predict_proba(model: &LogisticModel, row: &[f64]) -> f64 {
    model.predict_proba(row)
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^{-m})` without overflow.
fn log1p_exp_neg(m: f64) -> f64 {
    if m > 0.0 {
        (-m).exp().ln_1p()
    } else {
        -m + m.exp().ln_1p()
    }
}

fn check_inputs(x: &[Vec<f64>], y: &[i8], lambda: f64) -> Result<usize> {
    if x.is_empty() {
        return Err(Error::Empty("logistic regression needs at least one row".into()));
    }
    if x.len() != y.len() {
        return Err(Error::Dimension { expected: x.len(), actual: y.len() });
    }
    let p = x[0].len();
    for row in x {
        if row.len() != p {
            return Err(Error::Dimension { expected: p, actual: row.len() });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidProblem("non-finite feature value".into()));
        }
    }
    if y.iter().any(|&v| v != 1 && v != -1) {
        return Err(Error::InvalidProblem("labels must be -1 or +1".into()));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidConfig(format!("lambda must be finite and non-negative, got {lambda}")));
    }
    Ok(p)
}

fn mean_loss(x: &[Vec<f64>], y: &[i8], w: &[f64], b: f64) -> f64 {
    let loss: f64 = x
        .iter()
        .zip(y)
        .map(|(row, &yi)| log1p_exp_neg(yi as f64 * (b + w.iter().zip(row).map(|(a, v)| a * v).sum::<f64>())))
        .sum();
    loss / x.len() as f64
}

fn penalty_term(penalty: Penalty, lambda: f64, w: &[f64]) -> f64 {
    match penalty {
        Penalty::L1 => lambda * w.iter().map(|v| v.abs()).sum::<f64>(),
        Penalty::L2 => 0.5 * lambda * w.iter().map(|v| v * v).sum::<f64>(),
    }
}

fn loss_gradient(x: &[Vec<f64>], y: &[i8], w: &[f64], b: f64) -> (Vec<f64>, f64) {
    let n = x.len() as f64;
    let mut gw = vec![0.0; w.len()];
    let mut gb = 0.0;
    for (row, &yi) in x.iter().zip(y) {
        let yi = yi as f64;
        let m = yi * (b + w.iter().zip(row).map(|(a, v)| a * v).sum::<f64>());
        let c = -yi * sigmoid(-m) / n;
        for (g, v) in gw.iter_mut().zip(row) {
            *g += c * v;
        }
        gb += c;
    }
    (gw, gb)
}

/// Full penalized objective at `(w, b)`. The intercept is never penalized.
pub fn logistic_objective(x: &[Vec<f64>], y: &[i8], penalty: Penalty, lambda: f64, w: &[f64], b: f64) -> f64 {
    mean_loss(x, y, w, b) + penalty_term(penalty, lambda, w)
}

/// Gradient of the differentiable part of the objective, as `(∂w, ∂b)`.
/// For L2 this is the gradient of the full objective.
pub fn logistic_gradient(
    x: &[Vec<f64>],
    y: &[i8],
    penalty: Penalty,
    lambda: f64,
    w: &[f64],
    b: f64,
) -> (Vec<f64>, f64) {
    let (mut gw, gb) = loss_gradient(x, y, w, b);
    if penalty == Penalty::L2 {
        for (g, v) in gw.iter_mut().zip(w) {
            *g += lambda * v;
        }
    }
    (gw, gb)
}

fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// Penalized logistic regression by accelerated proximal gradient with
/// backtracking and adaptive restart. Starts from zero weights and the
/// class log-odds as intercept.
pub fn logistic_fit(
    x: &[Vec<f64>],
    y: &[i8],
    penalty: Penalty,
    lambda: f64,
    opts: &LogisticOptions,
) -> Result<LogisticModel> {
    let p = check_inputs(x, y, lambda)?;
    let pos = y.iter().filter(|&&v| v == 1).count() as f64;
    let neg = y.len() as f64 - pos;
    let b0 = ((pos + 0.5) / (neg + 0.5)).ln();
    let start = (vec![0.0; p], b0);
    fit_from(x, y, penalty, lambda, opts, start)
}

fn fit_from(
    x: &[Vec<f64>],
    y: &[i8],
    penalty: Penalty,
    lambda: f64,
    opts: &LogisticOptions,
    start: (Vec<f64>, f64),
) -> Result<LogisticModel> {
    let (mut w, mut b) = start;
    let p = w.len();
    let objective = |w: &[f64], b: f64| logistic_objective(x, y, penalty, lambda, w, b);
    let mut f_cur = objective(&w, b);
    // momentum point
    let (mut zw, mut zb) = (w.clone(), b);
    let mut t = 1.0f64;
    let mut step = 1.0f64;
    for iter in 1..=opts.max_iter {
        let f_z = mean_loss(x, y, &zw, zb);
        let (gw, gb) = loss_gradient(x, y, &zw, zb);
        let (nw, nb) = loop {
            let nw: Vec<f64> = (0..p)
                .map(|j| {
                    let v = zw[j] - step * gw[j];
                    match penalty {
                        Penalty::L1 => soft_threshold(v, step * lambda),
                        Penalty::L2 => v / (1.0 + step * lambda),
                    }
                })
                .collect();
            let nb = zb - step * gb;
            let dw: Vec<f64> = (0..p).map(|j| nw[j] - zw[j]).collect();
            let db = nb - zb;
            let lin: f64 = dw.iter().zip(&gw).map(|(d, g)| d * g).sum::<f64>() + db * gb;
            let sq: f64 = dw.iter().map(|d| d * d).sum::<f64>() + db * db;
            if mean_loss(x, y, &nw, nb) <= f_z + lin + sq / (2.0 * step) + 1e-15 || step < 1e-12 {
                break (nw, nb);
            }
            step *= 0.5;
        };
        let f_new = objective(&nw, nb);
        if f_new > f_cur {
            // restart momentum from the last accepted point
            t = 1.0;
            zw.clone_from(&w);
            zb = b;
            continue;
        }
        let decrease = f_cur - f_new;
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_next;
        zw = (0..p).map(|j| nw[j] + beta * (nw[j] - w[j])).collect();
        zb = nb + beta * (nb - b);
        t = t_next;
        w = nw;
        b = nb;
        f_cur = f_new;
        if decrease < opts.tol {
            if w.iter().any(|v| !v.is_finite()) || !b.is_finite() {
                break;
            }
            return Ok(LogisticModel { weights: w, intercept: b, penalty, lambda, objective: f_cur, iterations: iter });
        }
        step *= 1.2;
    }
    Err(Error::NotConverged { iterations: opts.max_iter, objective: f_cur })
}

/// Default regularization grid, strongest first.
pub fn default_lambda_grid() -> Vec<f64> {
    vec![1.0, 0.3, 0.1, 0.03, 0.01, 0.003, 0.001]
}
