//! Weighted nonlinear least-squares by Levenberg–Marquardt.
//!
//! One engine backs every model fit in the crate. The algorithm is pinned
//! for reproducibility:
//!
//! * cost is `sum(((y_i - f(x_i; theta)) / sigma_i)^2)`;
//! * the Jacobian uses forward finite differences with per-parameter step
//!   `max(1e-9 * |theta_j|, 1e-12)` — small enough that location-like
//!   parameters (a peak center far from zero, varying on a linewidth scale)
//!   keep truncation error below 1e-4 of the derivative;
//! * damping uses Marquardt diagonal scaling, `(JtJ + lambda diag(JtJ))
//!   delta = Jt r`, with `lambda` starting at 1e-3, times 10 on a rejected
//!   step, divided by 10 on an accepted one;
//! * convergence: relative cost decrease below 1e-10 on an accepted step, or
//!   proposed step norm below 1e-12; hard cap of 200 iterations (one
//!   Jacobian evaluation each).
//!
//! Diagonal scaling makes steps invariant under rescaling of individual
//! parameters, so fitting a rate in 1/us or 1/ps gives the same physical
//! optimum.
//!
//! The parameter covariance is the inverse of the weighted normal-equations
//! matrix `JtJ` at the optimum; `stderr(i)` is the square root of its
//! diagonal.

pub mod models;

use crate::error::{Error, Result};

const REL_COST_TOL: f64 = 1e-10;
const STEP_NORM_TOL: f64 = 1e-12;
const FD_REL_STEP: f64 = 1e-9;
const FD_ABS_FLOOR: f64 = 1e-12;
const LAMBDA_INIT: f64 = 1e-3;
const LAMBDA_MIN: f64 = 1e-12;
const LAMBDA_MAX: f64 = 1e14;
const MAX_ITERATIONS: usize = 200;

/// Why the optimizer stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Relative cost decrease fell below 1e-10.
    RelativeCostTol,
    /// Proposed step norm fell below 1e-12.
    StepNormTol,
    /// Residuals are exactly zero.
    CostZero,
    /// Iteration cap reached without meeting a tolerance.
    MaxIterations,
    /// The damped normal equations were singular (a parameter has no
    /// observable effect on the model).
    SingularNormalEquations,
    /// No step could reduce the cost even at maximum damping.
    LambdaOverflow,
    /// Converged, but `JtJ` at the optimum was not invertible.
    SingularCovariance,
}

impl Termination {
    fn is_converged(self) -> bool {
        matches!(
            self,
            Termination::RelativeCostTol | Termination::StepNormTol | Termination::CostZero
        )
    }
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let msg = match self {
            Termination::RelativeCostTol => "relative cost decrease below tolerance",
            Termination::StepNormTol => "step norm below tolerance",
            Termination::CostZero => "zero residual",
            Termination::MaxIterations => "iteration limit reached",
            Termination::SingularNormalEquations => "singular normal equations",
            Termination::LambdaOverflow => "no descent step found",
            Termination::SingularCovariance => "singular covariance at optimum",
        };
        f.write_str(msg)
    }
}

/// Outcome of one least-squares fit.
#[derive(Debug, Clone)]
pub struct FitResult {
    /// Best parameter vector found.
    pub params: Vec<f64>,
    /// Parameter covariance from `(JtJ)^-1` at the optimum; NaN-filled when
    /// it could not be computed.
    pub covariance: Vec<Vec<f64>>,
    /// Final cost divided by degrees of freedom `n - p`; NaN when `n == p`.
    pub chi2_reduced: f64,
    /// Number of Jacobian evaluations performed.
    pub iterations: usize,
    pub converged: bool,
    pub termination: Termination,
    /// Cost after the initial evaluation and after each accepted step;
    /// non-increasing by construction.
    pub cost_history: Vec<f64>,
}

impl FitResult {
    /// 1-sigma uncertainty of parameter `i`.
    pub fn stderr(&self, i: usize) -> f64 {
        self.covariance[i][i].max(0.0).sqrt()
    }
}

/// Minimizes the weighted sum of squared residuals of `model` over the data.
///
/// `model(x, theta)` evaluates the fit function at one sample point.
/// Requirements: equal-length data arrays with at least as many points as
/// parameters, strictly positive finite `sigmas`, finite `init`.
///
/// A NaN model output at the current parameter vector is an error; singular
/// normal equations are reported through `converged = false` rather than an
/// error, since the partial result is still diagnostic.
pub fn lm_fit<F>(
    model: F,
    xs: &[f64],
    ys: &[f64],
    sigmas: &[f64],
    init: &[f64],
) -> Result<FitResult>
where
    F: Fn(f64, &[f64]) -> f64,
{
    let n = xs.len();
    let p = init.len();
    if ys.len() != n || sigmas.len() != n {
        return Err(Error::contract(format!(
            "data length mismatch: {} xs, {} ys, {} sigmas",
            n,
            ys.len(),
            sigmas.len()
        )));
    }
    if p == 0 {
        return Err(Error::contract("no parameters to fit"));
    }
    if n < p {
        return Err(Error::contract(format!(
            "need at least as many points ({n}) as parameters ({p})"
        )));
    }
    if sigmas.iter().any(|s| !s.is_finite() || *s <= 0.0) {
        return Err(Error::contract("sigmas must be positive and finite"));
    }
    if init.iter().any(|v| !v.is_finite()) {
        return Err(Error::contract("initial parameters must be finite"));
    }

    let mut theta = init.to_vec();
    let mut resid = residuals(&model, xs, ys, sigmas, &theta)?;
    let mut cost = sq_norm(&resid);
    if !cost.is_finite() {
        return Err(Error::fit(format!(
            "non-finite model output at the initial parameters {theta:?}"
        )));
    }
    let mut cost_history = vec![cost];
    let mut lambda = LAMBDA_INIT;
    let mut iterations = 0;
    let mut termination = Termination::MaxIterations;

    if cost == 0.0 {
        termination = Termination::CostZero;
    } else {
        'outer: while iterations < MAX_ITERATIONS {
            iterations += 1;
            let jac = jacobian(&model, xs, sigmas, &theta)?;
            let jtj = normal_matrix(&jac);
            let jtr = normal_rhs(&jac, &resid);

            loop {
                let delta = match solve_damped(&jtj, &jtr, lambda) {
                    Some(d) => d,
                    None => {
                        lambda *= 10.0;
                        if lambda > LAMBDA_MAX {
                            termination = Termination::SingularNormalEquations;
                            break 'outer;
                        }
                        continue;
                    }
                };
                if sq_norm(&delta).sqrt() < STEP_NORM_TOL {
                    termination = Termination::StepNormTol;
                    break 'outer;
                }
                let trial: Vec<f64> =
                    theta.iter().zip(&delta).map(|(t, d)| t + d).collect();
                let trial_cost = match residuals(&model, xs, ys, sigmas, &trial) {
                    Ok(r) => {
                        let c = sq_norm(&r);
                        if c.is_finite() {
                            resid = r;
                            c
                        } else {
                            f64::INFINITY
                        }
                    }
                    // A wild trial step may leave the model's domain; treat
                    // that as a rejected step, not a hard failure.
                    Err(_) => f64::INFINITY,
                };

                if trial_cost < cost {
                    let rel_decrease = (cost - trial_cost) / cost.max(f64::MIN_POSITIVE);
                    theta = trial;
                    cost = trial_cost;
                    cost_history.push(cost);
                    lambda = (lambda / 10.0).max(LAMBDA_MIN);
                    if rel_decrease < REL_COST_TOL {
                        termination = Termination::RelativeCostTol;
                        break 'outer;
                    }
                    if cost == 0.0 {
                        termination = Termination::CostZero;
                        break 'outer;
                    }
                    break;
                }
                lambda *= 10.0;
                if lambda > LAMBDA_MAX {
                    termination = Termination::LambdaOverflow;
                    break 'outer;
                }
            }
        }
    }

    let mut converged = termination.is_converged();
    let covariance = match covariance_at(&model, xs, sigmas, &theta) {
        Some(c) => c,
        None => {
            if converged {
                converged = false;
                termination = Termination::SingularCovariance;
            }
            vec![vec![f64::NAN; p]; p]
        }
    };
    let chi2_reduced = if n > p {
        cost / (n - p) as f64
    } else {
        f64::NAN
    };

    Ok(FitResult {
        params: theta,
        covariance,
        chi2_reduced,
        iterations,
        converged,
        termination,
        cost_history,
    })
}

/// The engine's forward-difference Jacobian of the weighted model,
/// `J[i][j] = (df(x_i)/dtheta_j) / sigma_i`, exposed so tests can hold it
/// against an independent derivative oracle.
pub fn fd_jacobian<F>(
    model: F,
    xs: &[f64],
    sigmas: &[f64],
    theta: &[f64],
) -> Result<Vec<Vec<f64>>>
where
    F: Fn(f64, &[f64]) -> f64,
{
    jacobian(&model, xs, sigmas, theta)
}

fn residuals<F>(
    model: &F,
    xs: &[f64],
    ys: &[f64],
    sigmas: &[f64],
    theta: &[f64],
) -> Result<Vec<f64>>
where
    F: Fn(f64, &[f64]) -> f64,
{
    xs.iter()
        .zip(ys)
        .zip(sigmas)
        .map(|((&x, &y), &s)| {
            let f = model(x, theta);
            if f.is_nan() {
                return Err(Error::fit(format!("model returned NaN at x = {x}")));
            }
            Ok((y - f) / s)
        })
        .collect()
}

/// Forward-difference Jacobian of the weighted model, `J[i][j] =
/// (df(x_i)/dtheta_j) / sigma_i`.
fn jacobian<F>(model: &F, xs: &[f64], sigmas: &[f64], theta: &[f64]) -> Result<Vec<Vec<f64>>>
where
    F: Fn(f64, &[f64]) -> f64,
{
    let p = theta.len();
    let base: Vec<f64> = xs.iter().map(|&x| model(x, theta)).collect();
    if base.iter().any(|v| v.is_nan()) {
        return Err(Error::fit("model returned NaN during Jacobian"));
    }
    let mut jac = vec![vec![0.0; p]; xs.len()];
    let mut bumped = theta.to_vec();
    for j in 0..p {
        let h = (FD_REL_STEP * theta[j].abs()).max(FD_ABS_FLOOR);
        bumped[j] = theta[j] + h;
        for (i, &x) in xs.iter().enumerate() {
            let f = model(x, &bumped);
            if f.is_nan() {
                return Err(Error::fit("model returned NaN during Jacobian"));
            }
            jac[i][j] = (f - base[i]) / h / sigmas[i];
        }
        bumped[j] = theta[j];
    }
    Ok(jac)
}

fn sq_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

#[allow(clippy::needless_range_loop)] // index form mirrors the matrix algebra
fn normal_matrix(jac: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let p = jac.first().map_or(0, Vec::len);
    let mut a = vec![vec![0.0; p]; p];
    for row in jac {
        for i in 0..p {
            for j in i..p {
                a[i][j] += row[i] * row[j];
            }
        }
    }
    for i in 0..p {
        for j in 0..i {
            a[i][j] = a[j][i];
        }
    }
    a
}

fn normal_rhs(jac: &[Vec<f64>], resid: &[f64]) -> Vec<f64> {
    let p = jac.first().map_or(0, Vec::len);
    let mut g = vec![0.0; p];
    for (row, &r) in jac.iter().zip(resid) {
        for j in 0..p {
            g[j] += row[j] * r;
        }
    }
    g
}

/// Solves `(JtJ + lambda diag(JtJ)) delta = g` after symmetric diagonal
/// equilibration, which keeps the elimination well-scaled even when
/// parameters differ by many orders of magnitude.
fn solve_damped(jtj: &[Vec<f64>], g: &[f64], lambda: f64) -> Option<Vec<f64>> {
    let p = g.len();
    let mut scale = vec![0.0; p];
    for i in 0..p {
        let d = jtj[i][i];
        if !d.is_finite() || d <= 0.0 {
            return None;
        }
        scale[i] = d.sqrt();
    }
    let mut m = vec![vec![0.0; p + 1]; p];
    for i in 0..p {
        for j in 0..p {
            m[i][j] = jtj[i][j] / (scale[i] * scale[j]);
        }
        m[i][i] += lambda;
        m[i][p] = g[i] / scale[i];
    }
    let x = gauss_solve(&mut m)?;
    Some((0..p).map(|i| x[i] / scale[i]).collect())
}

/// Gaussian elimination with partial pivoting on an augmented `p x (p+1)`
/// system. The matrix is assumed equilibrated; pivots below 1e-12 are
/// treated as singular.
#[allow(clippy::needless_range_loop)]
fn gauss_solve(m: &mut [Vec<f64>]) -> Option<Vec<f64>> {
    let p = m.len();
    for col in 0..p {
        let pivot_row = (col..p).max_by(|&a, &b| {
            m[a][col]
                .abs()
                .partial_cmp(&m[b][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if !m[pivot_row][col].is_finite() || m[pivot_row][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, pivot_row);
        for row in col + 1..p {
            let factor = m[row][col] / m[col][col];
            for k in col..=p {
                m[row][k] -= factor * m[col][k];
            }
        }
    }
    let mut x = vec![0.0; p];
    for col in (0..p).rev() {
        let mut acc = m[col][p];
        for k in col + 1..p {
            acc -= m[col][k] * x[k];
        }
        x[col] = acc / m[col][col];
    }
    Some(x)
}

/// `(JtJ)^-1` at `theta`, computed column-by-column through the equilibrated
/// solver and symmetrized.
#[allow(clippy::needless_range_loop)]
fn covariance_at<F>(model: &F, xs: &[f64], sigmas: &[f64], theta: &[f64]) -> Option<Vec<Vec<f64>>>
where
    F: Fn(f64, &[f64]) -> f64,
{
    let jac = jacobian(model, xs, sigmas, theta).ok()?;
    let jtj = normal_matrix(&jac);
    let p = theta.len();
    let mut cov = vec![vec![0.0; p]; p];
    for j in 0..p {
        let mut e = vec![0.0; p];
        e[j] = 1.0;
        let col = solve_damped(&jtj, &e, 0.0)?;
        for i in 0..p {
            cov[i][j] = col[i];
        }
    }
    for i in 0..p {
        for j in 0..i {
            let s = 0.5 * (cov[i][j] + cov[j][i]);
            cov[i][j] = s;
            cov[j][i] = s;
        }
    }
    Some(cov)
}
