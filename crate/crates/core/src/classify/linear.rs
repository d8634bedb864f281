//! One-vs-rest linear models: logistic regression and linear SVM.
//!
//! Every binary head minimizes, in sum form over the `n` training rows,
//!
//! ```text
//! logistic:  Σ ln(1 + exp(-yᵢ(w·xᵢ + b))) + (1/C)·R(w)
//! svm:       Σ max(0, 1 - yᵢ(w·xᵢ + b))    + (1/C)·R(w)     (squared: max(..)²)
//! ```
//!
//! with `R(w) = ½‖w‖²` (L2) or `‖w‖₁` (L1). The logistic bias is
//! unregularized; the SVM bias is treated as a weight on a constant feature
//! and penalized with `R` like the rest of `w`.
//!
//! Logistic regression runs accelerated proximal gradient (FISTA with
//! backtracking and function-value restart) until the relative objective
//! change drops below `tol` or `max_iter` iterations pass. The L2 SVM runs
//! dual coordinate descent for at most `max_iter` epochs; the L1 SVM runs
//! proximal subgradient epochs with step `1/(n√t)` and keeps the best
//! iterate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_training_input, present_classes, Algorithm, Penalty, SvmLoss, TrainConfig};
use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::features::SparseVector;
use crate::rng::SplitMix64;

/// Parameters of one binary problem.
#[derive(Debug, Clone, Copy)]
pub struct Objective {
    pub penalty: Penalty,
    pub c: f64,
}

impl Objective {
    fn regularizer(&self, w: &[f64]) -> f64 {
        match self.penalty {
            Penalty::L2 => 0.5 * w.iter().map(|v| v * v).sum::<f64>() / self.c,
            Penalty::L1 => w.iter().map(|v| v.abs()).sum::<f64>() / self.c,
        }
    }

    fn bias_regularizer(&self, b: f64) -> f64 {
        self.regularizer(&[b])
    }

    fn regularizer_grad(&self, w: &[f64], grad: &mut [f64]) {
        for (g, &v) in grad.iter_mut().zip(w) {
            *g += match self.penalty {
                Penalty::L2 => v / self.c,
                Penalty::L1 if v == 0.0 => 0.0,
                Penalty::L1 => v.signum() / self.c,
            };
        }
    }
}

fn margins(x: &[SparseVector], w: &[f64], b: f64) -> Vec<f64> {
    x.iter().map(|row| row.dot(w) + b).collect()
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Logistic loss plus penalty. `y` holds ±1.
pub fn logistic_objective(x: &[SparseVector], y: &[f64], w: &[f64], b: f64, obj: Objective) -> f64 {
    logistic_loss(x, y, w, b) + obj.regularizer(w)
}

fn logistic_loss(x: &[SparseVector], y: &[f64], w: &[f64], b: f64) -> f64 {
    margins(x, w, b)
        .iter()
        .zip(y)
        .map(|(m, yi)| softplus(-yi * m))
        .sum()
}

/// Gradient of [`logistic_objective`] with respect to `(w, b)`. For L1 the
/// penalty contributes `sign(w)/C` (zero at zero).
pub fn logistic_gradient(
    x: &[SparseVector],
    y: &[f64],
    w: &[f64],
    b: f64,
    obj: Objective,
) -> (Vec<f64>, f64) {
    let (mut g, gb) = logistic_loss_grad(x, y, w, b);
    obj.regularizer_grad(w, &mut g);
    (g, gb)
}

fn logistic_loss_grad(x: &[SparseVector], y: &[f64], w: &[f64], b: f64) -> (Vec<f64>, f64) {
    let mut g = vec![0.0; w.len()];
    let mut gb = 0.0;
    for (row, (&yi, m)) in x.iter().zip(y.iter().zip(margins(x, w, b))) {
        let coef = -yi * sigmoid(-yi * m);
        gb += coef;
        for (i, v) in row.iter() {
            g[i] += coef * v;
        }
    }
    (g, gb)
}

/// Hinge (or squared hinge) loss plus penalty on `(w, b)`. `y` holds ±1.
pub fn svm_objective(
    x: &[SparseVector],
    y: &[f64],
    w: &[f64],
    b: f64,
    obj: Objective,
    loss: SvmLoss,
) -> f64 {
    svm_loss(&margins(x, w, b), y, loss) + obj.regularizer(w) + obj.bias_regularizer(b)
}

fn svm_loss(m: &[f64], y: &[f64], loss: SvmLoss) -> f64 {
    m.iter()
        .zip(y)
        .map(|(m, yi)| {
            let slack = (1.0 - yi * m).max(0.0);
            match loss {
                SvmLoss::Hinge => slack,
                SvmLoss::SquaredHinge => slack * slack,
            }
        })
        .sum()
}

fn svm_loss_grad(
    x: &[SparseVector],
    y: &[f64],
    m: &[f64],
    dim: usize,
    loss: SvmLoss,
) -> (Vec<f64>, f64) {
    let mut g = vec![0.0; dim];
    let mut gb = 0.0;
    for (row, (&yi, &mi)) in x.iter().zip(y.iter().zip(m)) {
        let slack = 1.0 - yi * mi;
        if slack <= 0.0 {
            continue;
        }
        let coef = match loss {
            SvmLoss::Hinge => -yi,
            SvmLoss::SquaredHinge => -2.0 * slack * yi,
        };
        gb += coef;
        for (i, v) in row.iter() {
            g[i] += coef * v;
        }
    }
    (g, gb)
}

/// A subgradient of [`svm_objective`]; rows exactly on the hinge contribute
/// nothing.
pub fn svm_subgradient(
    x: &[SparseVector],
    y: &[f64],
    w: &[f64],
    b: f64,
    obj: Objective,
    loss: SvmLoss,
) -> (Vec<f64>, f64) {
    let (mut g, mut gb) = svm_loss_grad(x, y, &margins(x, w, b), w.len(), loss);
    obj.regularizer_grad(w, &mut g);
    let mut gbs = [0.0];
    obj.regularizer_grad(&[b], &mut gbs);
    gb += gbs[0];
    (g, gb)
}

fn soft_threshold(w: &mut [f64], amount: f64) {
    for v in w {
        *v = v.signum() * (v.abs() - amount).max(0.0);
    }
}

fn relative_change(prev: f64, cur: f64) -> f64 {
    (prev - cur).abs() / prev.abs().max(cur.abs()).max(1e-12)
}

/// One logistic head. Returns `(w, b)`.
pub fn fit_logistic_head(
    x: &[SparseVector],
    y: &[f64],
    dim: usize,
    obj: Objective,
    tol: f64,
    max_iter: usize,
) -> (Vec<f64>, f64) {
    // smooth part: loss (+ L2 penalty); non-smooth part: L1 penalty
    let l2 = obj.penalty == Penalty::L2;
    let smooth = |w: &[f64], b: f64| -> f64 {
        logistic_loss(x, y, w, b) + if l2 { obj.regularizer(w) } else { 0.0 }
    };
    let smooth_grad = |w: &[f64], b: f64| -> (Vec<f64>, f64) {
        let (mut g, gb) = logistic_loss_grad(x, y, w, b);
        if l2 {
            obj.regularizer_grad(w, &mut g);
        }
        (g, gb)
    };
    let nonsmooth = |w: &[f64]| -> f64 {
        if l2 {
            0.0
        } else {
            obj.regularizer(w)
        }
    };

    let (mut w, mut b) = (vec![0.0; dim], 0.0);
    let (mut yw, mut yb) = (w.clone(), b);
    let mut t = 1.0f64;
    let mut lipschitz = 1.0f64;
    let mut f_cur = smooth(&w, b) + nonsmooth(&w);

    for _ in 0..max_iter {
        let fy = smooth(&yw, yb);
        let (gw, gb) = smooth_grad(&yw, yb);
        let (zw, zb, fz_smooth) = loop {
            let step = 1.0 / lipschitz;
            let mut zw: Vec<f64> = yw.iter().zip(&gw).map(|(v, g)| v - step * g).collect();
            let zb = yb - step * gb;
            if !l2 {
                soft_threshold(&mut zw, step / obj.c);
            }
            let fz = smooth(&zw, zb);
            let diff_sq: f64 = zw.iter().zip(&yw).map(|(a, b)| (a - b).powi(2)).sum::<f64>()
                + (zb - yb).powi(2);
            let lin: f64 = zw
                .iter()
                .zip(&yw)
                .zip(&gw)
                .map(|((a, b), g)| g * (a - b))
                .sum::<f64>()
                + gb * (zb - yb);
            if fz <= fy + lin + 0.5 * lipschitz * diff_sq + 1e-12 * fy.abs() || lipschitz > 1e12 {
                break (zw, zb, fz);
            }
            lipschitz *= 2.0;
        };
        let f_new = fz_smooth + nonsmooth(&zw);
        if f_new > f_cur {
            // momentum overshot: restart from the last accepted point
            yw.clone_from(&w);
            yb = b;
            t = 1.0;
            continue;
        }
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let beta = (t - 1.0) / t_next;
        yw = zw.iter().zip(&w).map(|(z, p)| z + beta * (z - p)).collect();
        yb = zb + beta * (zb - b);
        let change = relative_change(f_cur, f_new);
        w = zw;
        b = zb;
        f_cur = f_new;
        t = t_next;
        lipschitz *= 0.9;
        if change < tol {
            break;
        }
    }
    (w, b)
}

/// One SVM head. Returns `(w, b)`.
///
/// L2: dual coordinate descent over rows in a seeded random order per epoch,
/// stopping when the projected-gradient spread falls below `tol` or after
/// `max_iter` epochs. L1: proximal subgradient epochs keeping the best
/// iterate. Either way the result is never worse than `w = 0, b = 0`.
pub fn fit_svm_head(
    x: &[SparseVector],
    y: &[f64],
    dim: usize,
    obj: Objective,
    loss: SvmLoss,
    tol: f64,
    max_iter: usize,
) -> (Vec<f64>, f64) {
    let (w, b) = match obj.penalty {
        Penalty::L2 => svm_dual_cd(x, y, dim, obj.c, loss, tol, max_iter),
        Penalty::L1 => svm_prox_subgradient(x, y, dim, obj, loss, max_iter),
    };
    let zero = x.len() as f64;
    if svm_objective(x, y, &w, b, obj, loss) > zero {
        return (vec![0.0; dim], 0.0);
    }
    (w, b)
}

/// Dual coordinate descent on `½‖(w, b)‖² + C·Σ loss`, the bias acting as a
/// constant feature of value 1.
fn svm_dual_cd(
    x: &[SparseVector],
    y: &[f64],
    dim: usize,
    c: f64,
    loss: SvmLoss,
    tol: f64,
    max_iter: usize,
) -> (Vec<f64>, f64) {
    let (upper, diag) = match loss {
        SvmLoss::Hinge => (c, 0.0),
        SvmLoss::SquaredHinge => (f64::INFINITY, 0.5 / c),
    };
    let q: Vec<f64> = x.iter().map(|r| r.l2_norm().powi(2) + 1.0 + diag).collect();
    let mut alpha = vec![0.0; x.len()];
    let (mut w, mut b) = (vec![0.0; dim], 0.0);
    let mut order: Vec<usize> = (0..x.len()).collect();
    let mut rng = SplitMix64::new(x.len() as u64);

    for _ in 0..max_iter {
        rng.shuffle(&mut order);
        let (mut pg_max, mut pg_min) = (f64::NEG_INFINITY, f64::INFINITY);
        for &i in &order {
            let g = y[i] * (x[i].dot(&w) + b) - 1.0 + diag * alpha[i];
            let pg = if alpha[i] == 0.0 {
                g.min(0.0)
            } else if alpha[i] == upper {
                g.max(0.0)
            } else {
                g
            };
            pg_max = pg_max.max(pg);
            pg_min = pg_min.min(pg);
            if pg == 0.0 {
                continue;
            }
            let old = alpha[i];
            alpha[i] = (old - g / q[i]).clamp(0.0, upper);
            let delta = (alpha[i] - old) * y[i];
            for (j, v) in x[i].iter() {
                w[j] += delta * v;
            }
            b += delta;
        }
        if pg_max - pg_min < tol {
            break;
        }
    }
    (w, b)
}

fn svm_prox_subgradient(
    x: &[SparseVector],
    y: &[f64],
    dim: usize,
    obj: Objective,
    loss: SvmLoss,
    max_iter: usize,
) -> (Vec<f64>, f64) {
    let n = x.len() as f64;
    // squared hinge is smooth; its gradient is 2Σ‖(xᵢ, 1)‖²-Lipschitz
    let max_step = match loss {
        SvmLoss::Hinge => f64::INFINITY,
        SvmLoss::SquaredHinge => {
            let lipschitz: f64 = x.iter().map(|r| 2.0 * (r.l2_norm().powi(2) + 1.0)).sum();
            1.0 / lipschitz
        }
    };
    let (mut w, mut b) = (vec![0.0; dim], 0.0);
    let mut m = margins(x, &w, b);
    let mut best = (svm_objective(x, y, &w, b, obj, loss), w.clone(), b);

    for epoch in 1..=max_iter {
        let (g, gb) = svm_loss_grad(x, y, &m, dim, loss);
        let step = (1.0 / (n * (epoch as f64).sqrt())).min(max_step);
        for (v, gi) in w.iter_mut().zip(&g) {
            *v -= step * gi;
        }
        b -= step * gb;
        soft_threshold(&mut w, step / obj.c);
        b = b.signum() * (b.abs() - step / obj.c).max(0.0);
        m = margins(x, &w, b);
        let value = svm_loss(&m, y, loss) + obj.regularizer(&w) + obj.bias_regularizer(b);
        if value < best.0 {
            best = (value, w.clone(), b);
        }
    }
    (best.1, best.2)
}

/// One weight vector and bias per class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub algorithm: Algorithm,
    pub classes: Vec<Label>,
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

impl LinearModel {
    pub fn fit(x: &[SparseVector], y: &[Label], dim: usize, config: &TrainConfig) -> Result<Self> {
        let algorithm = config.algorithm;
        if !matches!(algorithm, Algorithm::Logreg | Algorithm::Svm) {
            return Err(Error::InvalidConfig(format!(
                "{algorithm} is not a linear model"
            )));
        }
        check_training_input(x, y, dim)?;
        let classes = present_classes(y);
        if classes.len() < 2 {
            return Err(Error::TooFewClasses(classes.len()));
        }
        let obj = Objective {
            penalty: config.penalty,
            c: config.c,
        };
        let max_iter = config.effective_max_iter();
        let heads: Vec<(Vec<f64>, f64)> = classes
            .par_iter()
            .map(|c| {
                let yb: Vec<f64> = y.iter().map(|l| if l == c { 1.0 } else { -1.0 }).collect();
                match algorithm {
                    Algorithm::Svm => {
                        fit_svm_head(x, &yb, dim, obj, config.svm_loss, config.tol, max_iter)
                    }
                    _ => fit_logistic_head(x, &yb, dim, obj, config.tol, max_iter),
                }
            })
            .collect();
        let (weights, bias) = heads.into_iter().unzip();
        Ok(Self {
            algorithm,
            classes,
            weights,
            bias,
        })
    }

    /// Zero-weight model that always answers `label`; used when training data
    /// holds a single class.
    pub fn constant(algorithm: Algorithm, label: Label, dim: usize) -> Self {
        Self {
            algorithm,
            classes: vec![label],
            weights: vec![vec![0.0; dim]],
            bias: vec![0.0],
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.first().map_or(0, Vec::len)
    }

    pub fn decision_function(&self, x: &SparseVector) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(w, b)| x.dot(w) + b)
            .collect()
    }

    /// SVM: raw margins. Logistic regression: log of the per-head
    /// probabilities normalized over heads.
    pub fn scores(&self, x: &SparseVector) -> Vec<f64> {
        let margins = self.decision_function(x);
        match self.algorithm {
            Algorithm::Logreg => {
                // ln σ(m) = -softplus(-m)
                let mut logp: Vec<f64> = margins.iter().map(|m| -softplus(-m)).collect();
                super::naive_bayes::normalize_log(&mut logp);
                logp
            }
            _ => margins,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn v(dense: &[f64]) -> SparseVector {
        SparseVector::from_dense(dense)
    }

    fn separable() -> (Vec<SparseVector>, Vec<Label>) {
        // single feature: +1 for Easy, -1 for Medium
        let x = vec![v(&[1.0]), v(&[1.0]), v(&[-1.0]), v(&[-1.0])];
        (x, vec![Label::Easy, Label::Easy, Label::Medium, Label::Medium])
    }

    fn random_rows(rng: &mut SplitMix64, n: usize, dim: usize) -> Vec<SparseVector> {
        (0..n)
            .map(|_| v(&(0..dim).map(|_| rng.next_f64() - 0.5).collect::<Vec<_>>()))
            .collect()
    }

    #[test]
    fn logistic_separable() {
        let (x, y) = separable();
        let m = LinearModel::fit(&x, &y, 1, &TrainConfig::new(Algorithm::Logreg)).unwrap();
        assert!(m.weights[0][0] > 0.0);
        for (row, label) in x.iter().zip(&y) {
            let s = m.scores(row);
            let best = if s[0] >= s[1] { Label::Easy } else { Label::Medium };
            assert_eq!(best, *label);
        }
    }

    #[test]
    fn svm_separable_margins() {
        let (x, y) = separable();
        let m = LinearModel::fit(&x, &y, 1, &TrainConfig::new(Algorithm::Svm)).unwrap();
        assert!(m.weights[0][0] > 0.0);
        for (row, label) in x.iter().zip(&y) {
            let d = m.decision_function(row);
            let k = m.classes.iter().position(|c| c == label).unwrap();
            assert!(d[k] >= 0.0);
            assert!(d[1 - k] <= 0.0);
        }
    }

    #[test]
    fn svm_objective_never_worse_than_zero() {
        let mut rng = SplitMix64::new(3);
        let x = random_rows(&mut rng, 30, 5);
        let y: Vec<f64> = x
            .iter()
            .map(|r| if r.get(0) + 0.2 * r.get(1) > 0.0 { 1.0 } else { -1.0 })
            .collect();
        for penalty in [Penalty::L2, Penalty::L1] {
            for loss in [SvmLoss::Hinge, SvmLoss::SquaredHinge] {
                let obj = Objective { penalty, c: 1.0 };
                let (w, b) = fit_svm_head(&x, &y, 5, obj, loss, 1e-6, 300);
                let final_value = svm_objective(&x, &y, &w, b, obj, loss);
                let zero = svm_objective(&x, &y, &[0.0; 5], 0.0, obj, loss);
                assert_eq!(zero, 30.0);
                assert!(final_value <= zero);
                assert!(final_value < 0.95 * zero, "{penalty:?} {loss:?}: {final_value}");
            }
        }
    }

    #[test]
    fn dual_cd_solution_is_a_minimum() {
        let mut rng = SplitMix64::new(17);
        let x = random_rows(&mut rng, 40, 4);
        let y: Vec<f64> = x
            .iter()
            .map(|r| if r.get(0) - r.get(2) + 0.2 * (rng.next_f64() - 0.5) > 0.0 { 1.0 } else { -1.0 })
            .collect();
        for loss in [SvmLoss::Hinge, SvmLoss::SquaredHinge] {
            let obj = Objective { penalty: Penalty::L2, c: 2.0 };
            let (w, b) = fit_svm_head(&x, &y, 4, obj, loss, 1e-10, 20_000);
            let f = svm_objective(&x, &y, &w, b, obj, loss);
            // convex objective: no random nearby point may do better
            for _ in 0..200 {
                let d: Vec<f64> = (0..5).map(|_| 1e-3 * (rng.next_f64() - 0.5)).collect();
                let wd: Vec<f64> = w.iter().zip(&d).map(|(a, e)| a + e).collect();
                let fd = svm_objective(&x, &y, &wd, b + d[4], obj, loss);
                assert!(fd >= f - 1e-7, "{loss:?}: {fd} < {f}");
            }
        }
    }

    #[test]
    fn logistic_converges_to_stationary_point() {
        let mut rng = SplitMix64::new(11);
        let x = random_rows(&mut rng, 40, 4);
        let y: Vec<f64> = x
            .iter()
            .map(|r| if r.get(0) + 0.3 * rng.next_f64() > 0.1 { 1.0 } else { -1.0 })
            .collect();
        let obj = Objective { penalty: Penalty::L2, c: 1.0 };
        let (w, b) = fit_logistic_head(&x, &y, 4, obj, 1e-14, 5000);
        let (g, gb) = logistic_gradient(&x, &y, &w, b, obj);
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt() + gb.abs();
        assert!(norm < 1e-4, "gradient norm {norm}");
    }

    #[test]
    fn l1_logistic_produces_sparse_weights() {
        let mut rng = SplitMix64::new(5);
        // only feature 0 carries signal
        let x = random_rows(&mut rng, 60, 6);
        let y: Vec<f64> = x.iter().map(|r| if r.get(0) > 0.0 { 1.0 } else { -1.0 }).collect();
        let obj = Objective { penalty: Penalty::L1, c: 0.5 };
        let (w, _) = fit_logistic_head(&x, &y, 6, obj, 1e-8, 2000);
        assert!(w[0] > 0.0);
        assert!(w[1..].iter().filter(|v| **v == 0.0).count() >= 3, "{w:?}");
    }

    #[test]
    fn tiny_c_collapses_to_majority() {
        let x = vec![v(&[1.0, 0.0]), v(&[1.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0])];
        let y = vec![Label::Easy, Label::Easy, Label::Easy, Label::Medium];
        let mut cfg = TrainConfig::new(Algorithm::Logreg);
        cfg.c = 0.001;
        let m = LinearModel::fit(&x, &y, 2, &cfg).unwrap();
        assert!(m.weights.iter().flatten().all(|w| w.abs() < 0.01));
        for row in &x {
            let s = m.scores(row);
            assert!(s[0] > s[1]);
        }
    }

    #[test]
    fn single_class_is_an_error() {
        let x = vec![v(&[1.0])];
        assert!(matches!(
            LinearModel::fit(&x, &[Label::Easy], 1, &TrainConfig::new(Algorithm::Svm)),
            Err(Error::TooFewClasses(1))
        ));
    }

    #[test]
    fn logreg_scores_are_log_probabilities() {
        let (x, y) = separable();
        let m = LinearModel::fit(&x, &y, 1, &TrainConfig::new(Algorithm::Logreg)).unwrap();
        let s: f64 = m.scores(&x[0]).iter().map(|l| l.exp()).sum();
        assert!((s - 1.0).abs() < 1e-12);
    }
}
