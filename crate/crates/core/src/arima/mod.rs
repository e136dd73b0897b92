//! ARIMA(p,d,q) modeling: differencing, conditional-sum-of-squares
//! estimation, AICc order selection, forecasting, and an order taxonomy.
//!
//! Estimation minimizes the conditional sum of squares of the one-step
//! residuals, with pre-sample observations taken at the model constant and
//! pre-sample residuals at zero. The constant is parametrized as the mean
//! of the differenced series, so a fitted (0,1,0)-with-constant model is a
//! random walk whose drift is exactly the mean first difference.

mod report;

pub use report::{parse_model_report, write_model_report, ModelReportEntry};

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::numopt::{self, OptimError, OptimizerOptions};

#[derive(Debug, Error)]
pub enum ArimaError {
    #[error("series of length {len} cannot be differenced {d} times")]
    CannotDifference { len: usize, d: usize },
    #[error("series has {len} observations; fitting {order} requires more than {required}")]
    TooShort {
        len: usize,
        order: ArimaOrder,
        required: usize,
    },
    #[error("parameter vector has length {got}, expected {expected} (ar..., ma..., constant)")]
    ParamLength { expected: usize, got: usize },
    #[error("heads vector has length {got}, expected {expected} (one per differencing level)")]
    HeadsLength { expected: usize, got: usize },
    #[error("forecast horizon must be at least 1")]
    ZeroHorizon,
    #[error(transparent)]
    Optim(#[from] OptimError),
    #[error("every candidate order failed to fit: {}", format_failures(.0))]
    AllCandidatesFailed(Vec<(ArimaOrder, String)>),
    #[error("model report line {line}: {message}")]
    ReportParse { line: usize, message: String },
}

fn format_failures(failures: &[(ArimaOrder, String)]) -> String {
    failures
        .iter()
        .map(|(order, reason)| format!("{order}: {reason}"))
        .collect::<Vec<_>>()
        .join("; ")
}

/// The `(p, d, q)` triple: autoregressive lags, non-seasonal differences,
/// moving-average lags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ArimaOrder {
    pub p: usize,
    pub d: usize,
    pub q: usize,
}

impl ArimaOrder {
    pub const fn new(p: usize, d: usize, q: usize) -> Self {
        Self { p, d, q }
    }

    /// Free parameters counted by the information criterion: coefficients,
    /// optional constant, plus the innovation variance.
    fn parameter_count(&self, include_constant: bool) -> usize {
        self.p + self.q + usize::from(include_constant) + 1
    }
}

impl fmt::Display for ArimaOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.p, self.d, self.q)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("expected order as `p,d,q`, got `{0}`")]
pub struct ParseOrderError(String);

impl FromStr for ArimaOrder {
    type Err = ParseOrderError;

    /// Accepts `p,d,q` with optional surrounding parentheses.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim();
        let inner = trimmed
            .strip_prefix('(')
            .and_then(|rest| rest.strip_suffix(')'))
            .unwrap_or(trimmed);
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(ParseOrderError(s.to_owned()));
        }
        let parse = |part: &str| part.parse::<usize>().map_err(|_| ParseOrderError(s.to_owned()));
        Ok(ArimaOrder::new(parse(parts[0])?, parse(parts[1])?, parse(parts[2])?))
    }
}

/// Taxonomy of fitted orders by which components are active.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelCategory {
    Autoregressive,
    AutoregressiveIntegrated,
    IntegratedMovingAverage,
    AutoregressiveMovingAverage,
    GeneralIntegrated,
    WhiteNoise,
}

impl fmt::Display for ModelCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ModelCategory::Autoregressive => "Autoregressive",
            ModelCategory::AutoregressiveIntegrated => "AutoregressiveIntegrated",
            ModelCategory::IntegratedMovingAverage => "IntegratedMovingAverage",
            ModelCategory::AutoregressiveMovingAverage => "AutoregressiveMovingAverage",
            ModelCategory::GeneralIntegrated => "GeneralIntegrated",
            ModelCategory::WhiteNoise => "WhiteNoise",
        };
        f.write_str(name)
    }
}

impl FromStr for ModelCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Autoregressive" => Ok(ModelCategory::Autoregressive),
            "AutoregressiveIntegrated" => Ok(ModelCategory::AutoregressiveIntegrated),
            "IntegratedMovingAverage" => Ok(ModelCategory::IntegratedMovingAverage),
            "AutoregressiveMovingAverage" => Ok(ModelCategory::AutoregressiveMovingAverage),
            "GeneralIntegrated" => Ok(ModelCategory::GeneralIntegrated),
            "WhiteNoise" => Ok(ModelCategory::WhiteNoise),
            other => Err(format!("unknown model category `{other}`")),
        }
    }
}

/// Maps an order to its category. Every order lands in exactly one bucket.
///
/// Mixed orders (p>0, d>0, q>0) are grouped with the autoregressive
/// integrated family; a pure moving average (p=0, d=0, q>0) is grouped with
/// the stationary ARMA family.
pub fn classify(order: ArimaOrder) -> ModelCategory {
    match (order.p > 0, order.d > 0, order.q > 0) {
        (false, false, false) => ModelCategory::WhiteNoise,
        (true, false, false) => ModelCategory::Autoregressive,
        (true, true, false) => ModelCategory::AutoregressiveIntegrated,
        (false, true, true) => ModelCategory::IntegratedMovingAverage,
        (true, false, true) => ModelCategory::AutoregressiveMovingAverage,
        (false, true, false) => ModelCategory::GeneralIntegrated,
        (false, false, true) => ModelCategory::AutoregressiveMovingAverage,
        (true, true, true) => ModelCategory::AutoregressiveIntegrated,
    }
}

/// A fitted ARIMA model.
#[derive(Debug, Clone, PartialEq)]
pub struct ArimaModel {
    pub order: ArimaOrder,
    pub ar_coefficients: Vec<f64>,
    pub ma_coefficients: Vec<f64>,
    /// Mean of the differenced series under the fitted model; 0 when the
    /// model carries no constant.
    pub constant: f64,
    /// Innovation variance estimate, `css / n_effective`.
    pub sigma2: f64,
    /// Conditional sum of squares at the fitted parameters.
    pub css: f64,
    /// Observations remaining after differencing.
    pub n_effective: usize,
    /// Small-sample corrected information criterion.
    pub aicc: f64,
    /// False when the optimizer hit its iteration cap; the model then holds
    /// the best point found.
    pub converged: bool,
}

impl ArimaModel {
    pub fn category(&self) -> ModelCategory {
        classify(self.order)
    }

    /// A perfectly explained series (e.g. an exactly linear series under
    /// d=1) fits with zero innovation variance.
    pub fn is_zero_variance(&self) -> bool {
        self.sigma2 == 0.0
    }
}

/// Point forecasts on the original (undifferenced) scale.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastResult {
    pub horizon: usize,
    pub point_forecasts: Vec<f64>,
    /// Last training year, when the caller tracks calendar years.
    pub origin_year: Option<i32>,
}

impl ForecastResult {
    pub fn with_origin_year(mut self, year: i32) -> Self {
        self.origin_year = Some(year);
        self
    }
}

/// Applies the first-difference operator `d` times.
pub fn difference(series: &[f64], d: usize) -> Result<Vec<f64>, ArimaError> {
    if series.len() <= d {
        return Err(ArimaError::CannotDifference {
            len: series.len(),
            d,
        });
    }
    let mut out = series.to_vec();
    for _ in 0..d {
        out = out.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Ok(out)
}

/// Differences `d` times, also returning the head value consumed at each
/// level: `heads[m]` is the first value of the `m`-times differenced series.
pub fn difference_with_heads(series: &[f64], d: usize) -> Result<(Vec<f64>, Vec<f64>), ArimaError> {
    if series.len() <= d {
        return Err(ArimaError::CannotDifference {
            len: series.len(),
            d,
        });
    }
    let mut heads = Vec::with_capacity(d);
    let mut current = series.to_vec();
    for _ in 0..d {
        heads.push(current[0]);
        current = current.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Ok((current, heads))
}

/// Exact inverse of [`difference`], given the per-level heads from
/// [`difference_with_heads`]. `heads.len()` must equal `d`.
pub fn integrate(diffs: &[f64], heads: &[f64], d: usize) -> Result<Vec<f64>, ArimaError> {
    if heads.len() != d {
        return Err(ArimaError::HeadsLength {
            expected: d,
            got: heads.len(),
        });
    }
    let mut current = diffs.to_vec();
    for &head in heads.iter().rev() {
        let mut level = Vec::with_capacity(current.len() + 1);
        let mut acc = head;
        level.push(acc);
        for &delta in &current {
            acc += delta;
            level.push(acc);
        }
        current = level;
    }
    Ok(current)
}

/// True when the polynomial `1 - c1 z - ... - cp z^p` has all roots strictly
/// outside the unit circle (the step-down reflection-coefficient test).
fn roots_outside_unit_circle(coeffs: &[f64]) -> bool {
    let mut a = coeffs.to_vec();
    for m in (1..=a.len()).rev() {
        let k = a[m - 1];
        if !(k.abs() < 1.0) {
            // Also catches NaN.
            return false;
        }
        let denom = 1.0 - k * k;
        let reduced: Vec<f64> = (0..m - 1)
            .map(|j| (a[j] + k * a[m - 2 - j]) / denom)
            .collect();
        a = reduced;
    }
    true
}

fn ar_stationary(ar: &[f64]) -> bool {
    roots_outside_unit_circle(ar)
}

fn ma_invertible(ma: &[f64]) -> bool {
    // The MA polynomial is 1 + t1 z + ...; flip signs to reuse the AR test.
    let flipped: Vec<f64> = ma.iter().map(|t| -t).collect();
    roots_outside_unit_circle(&flipped)
}

/// One-step residuals of the conditional recursion
/// `e_t = (w_t - c) - sum_i ar_i (w_{t-i} - c) - sum_j ma_j e_{t-j}`,
/// with pre-sample `w` at the constant and pre-sample `e` at zero.
/// Returns the residuals and their sum of squares.
fn conditional_residuals(w: &[f64], ar: &[f64], ma: &[f64], constant: f64) -> (Vec<f64>, f64) {
    let mut residuals = vec![0.0; w.len()];
    let mut total = 0.0;
    for t in 0..w.len() {
        let mut value = w[t] - constant;
        for (i, &phi) in ar.iter().enumerate() {
            if t > i {
                value -= phi * (w[t - 1 - i] - constant);
            }
        }
        for (j, &theta) in ma.iter().enumerate() {
            if t > j {
                value -= theta * residuals[t - 1 - j];
            }
        }
        residuals[t] = value;
        total += value * value;
    }
    (residuals, total)
}

/// Objective core shared by [`css`] and the fitting loop: `+inf` outside the
/// stationary/invertible region, otherwise the conditional sum of squares.
fn css_value(w: &[f64], p: usize, q: usize, params: &[f64]) -> f64 {
    if params.iter().any(|v| !v.is_finite()) {
        return f64::INFINITY;
    }
    let ar = &params[..p];
    let ma = &params[p..p + q];
    let constant = params[p + q];
    if !ar_stationary(ar) || !ma_invertible(ma) {
        return f64::INFINITY;
    }
    conditional_residuals(w, ar, ma, constant).1
}

/// Conditional sum of squares of `params = [ar..., ma..., constant]` on an
/// already-differenced series. Parameters violating stationarity or
/// invertibility score `+inf` rather than failing.
pub fn css(differenced: &[f64], order: ArimaOrder, params: &[f64]) -> Result<f64, ArimaError> {
    let expected = order.p + order.q + 1;
    if params.len() != expected {
        return Err(ArimaError::ParamLength {
            expected,
            got: params.len(),
        });
    }
    Ok(css_value(differenced, order.p, order.q, params))
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Gaussian elimination with partial pivoting; `None` when the system is
/// singular to working precision.
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |acc, &v| acc.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return None;
    }
    for col in 0..n {
        let pivot_row = (col..n).max_by(|&r1, &r2| a[r1][col].abs().total_cmp(&a[r2][col].abs()))?;
        if a[pivot_row][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut value = b[row];
        for k in row + 1..n {
            value -= a[row][k] * x[k];
        }
        x[row] = value / a[row][row];
    }
    Some(x)
}

/// Least-squares regression of the centered series on its `p` centered lags
/// (the Hannan–Rissanen first stage), pulled inside the stationary region by
/// halving if needed.
fn initial_ar(w: &[f64], p: usize, center: f64) -> Vec<f64> {
    if p == 0 {
        return Vec::new();
    }
    let n = w.len();
    if n <= p {
        return vec![0.0; p];
    }
    let x: Vec<f64> = w.iter().map(|v| v - center).collect();
    let mut a = vec![vec![0.0; p]; p];
    let mut b = vec![0.0; p];
    for t in p..n {
        for i in 0..p {
            b[i] += x[t] * x[t - 1 - i];
            for j in i..p {
                a[i][j] += x[t - 1 - i] * x[t - 1 - j];
            }
        }
    }
    for i in 0..p {
        for j in 0..i {
            a[i][j] = a[j][i];
        }
    }
    let mut coeffs = match solve_linear(a, b) {
        Some(c) if c.iter().all(|v| v.is_finite()) => c,
        _ => return vec![0.0; p],
    };
    let mut halvings = 0;
    while !ar_stationary(&coeffs) {
        for c in &mut coeffs {
            *c *= 0.5;
        }
        halvings += 1;
        if halvings > 64 {
            return vec![0.0; p];
        }
    }
    coeffs
}

fn aicc_score(css: f64, n: usize, k: usize) -> f64 {
    let n = n as f64;
    let k = k as f64;
    let base = n * (css / n).ln() + 2.0 * k;
    let denom = n - k - 1.0;
    if denom > 0.0 {
        base + 2.0 * k * (k + 1.0) / denom
    } else {
        f64::INFINITY
    }
}

/// Fits an ARIMA model by conditional sum of squares.
///
/// The series is differenced `order.d` times, then the residual sum of
/// squares is minimized over `[ar..., ma..., constant]` with Nelder–Mead
/// from a deterministic start (lag regression for the AR part, zeros for
/// the MA part, the differenced mean for the constant). With `p = q = 0`
/// the fit is closed-form: the constant is exactly the differenced mean.
pub fn fit(series: &[f64], order: ArimaOrder, include_constant: bool) -> Result<ArimaModel, ArimaError> {
    let required = order.d + order.p + order.q + 2;
    if series.len() <= required {
        return Err(ArimaError::TooShort {
            len: series.len(),
            order,
            required,
        });
    }
    let w = difference(series, order.d)?;
    let n = w.len();
    let (p, q) = (order.p, order.q);

    let (ar, ma, constant, css_min, converged) = if p == 0 && q == 0 {
        let constant = if include_constant { mean(&w) } else { 0.0 };
        let (_, total) = conditional_residuals(&w, &[], &[], constant);
        (Vec::new(), Vec::new(), constant, total, true)
    } else {
        let center = if include_constant { mean(&w) } else { 0.0 };
        let mut x0 = initial_ar(&w, p, center);
        x0.extend(std::iter::repeat(0.0).take(q));
        if include_constant {
            x0.push(center);
        }
        let objective = |x: &[f64]| -> f64 {
            if include_constant {
                css_value(&w, p, q, x)
            } else {
                let mut full = Vec::with_capacity(p + q + 1);
                full.extend_from_slice(x);
                full.push(0.0);
                css_value(&w, p, q, &full)
            }
        };
        let result = numopt::minimize(objective, &x0, &OptimizerOptions::default())?;
        let ar = result.minimizer[..p].to_vec();
        let ma = result.minimizer[p..p + q].to_vec();
        let constant = if include_constant {
            result.minimizer[p + q]
        } else {
            0.0
        };
        (ar, ma, constant, result.minimum, result.converged)
    };

    let sigma2 = css_min / n as f64;
    let aicc = aicc_score(css_min, n, order.parameter_count(include_constant));
    Ok(ArimaModel {
        order,
        ar_coefficients: ar,
        ma_coefficients: ma,
        constant,
        sigma2,
        css: css_min,
        n_effective: n,
        aicc,
        converged,
    })
}

/// Point forecasts at `1..=horizon` steps ahead on the original scale.
///
/// The ARMA recursion is iterated on the differenced scale with future
/// innovations at zero and in-sample residuals from the conditional pass,
/// then the forecasts are integrated back up through the differencing
/// levels. A (0,1,0) model uses the random-walk-with-drift closed form
/// `last + h * constant`.
pub fn forecast(
    model: &ArimaModel,
    series: &[f64],
    horizon: usize,
) -> Result<ForecastResult, ArimaError> {
    if horizon == 0 {
        return Err(ArimaError::ZeroHorizon);
    }
    let d = model.order.d;
    if series.len() <= d {
        return Err(ArimaError::CannotDifference {
            len: series.len(),
            d,
        });
    }
    let (p, q) = (model.order.p, model.order.q);
    let constant = model.constant;

    // Last value of each differencing level, for integrating back up.
    let mut tails = Vec::with_capacity(d);
    let mut current = series.to_vec();
    for _ in 0..d {
        tails.push(*current.last().expect("non-empty by length check"));
        current = current.windows(2).map(|w| w[1] - w[0]).collect();
    }
    let w = current;
    let n = w.len();

    let diff_forecasts: Vec<f64> = if p == 0 && q == 0 {
        vec![constant; horizon]
    } else {
        let (residuals, _) = conditional_residuals(
            &w,
            &model.ar_coefficients,
            &model.ma_coefficients,
            constant,
        );
        let mut extended = w.clone();
        let mut out = Vec::with_capacity(horizon);
        for _ in 0..horizon {
            let t = extended.len();
            let mut value = constant;
            for (i, &phi) in model.ar_coefficients.iter().enumerate() {
                if t > i {
                    value += phi * (extended[t - 1 - i] - constant);
                }
            }
            for (j, &theta) in model.ma_coefficients.iter().enumerate() {
                if t > j {
                    let idx = t - 1 - j;
                    if idx < n {
                        value += theta * residuals[idx];
                    }
                }
            }
            extended.push(value);
            out.push(value);
        }
        out
    };

    let point_forecasts = if d == 0 {
        diff_forecasts
    } else if p == 0 && q == 0 && d == 1 {
        let last = *series.last().expect("non-empty by length check");
        (1..=horizon).map(|h| last + h as f64 * constant).collect()
    } else {
        let mut tails = tails;
        let mut out = Vec::with_capacity(horizon);
        for &df in &diff_forecasts {
            let mut value = df;
            for m in (0..d).rev() {
                value += tails[m];
                tails[m] = value;
            }
            out.push(value);
        }
        out
    };

    Ok(ForecastResult {
        horizon,
        point_forecasts,
        origin_year: None,
    })
}

/// Whether candidate orders carry a constant term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConstantPolicy {
    /// Constant for d <= 1; none under d = 2, where it would imply
    /// quadratic drift.
    #[default]
    Auto,
    Always,
    Never,
}

impl ConstantPolicy {
    pub fn include_for(self, d: usize) -> bool {
        match self {
            ConstantPolicy::Auto => d <= 1,
            ConstantPolicy::Always => true,
            ConstantPolicy::Never => false,
        }
    }
}

impl FromStr for ConstantPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(ConstantPolicy::Auto),
            "always" | "on" | "yes" => Ok(ConstantPolicy::Always),
            "never" | "off" | "no" => Ok(ConstantPolicy::Never),
            other => Err(format!("unknown constant policy `{other}` (expected auto, always, or never)")),
        }
    }
}

/// Candidate grid for [`select_order`]: all orders in
/// `0..=max_p x 0..=max_d x 0..=max_q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelectGrid {
    pub max_p: usize,
    pub max_d: usize,
    pub max_q: usize,
}

impl Default for SelectGrid {
    fn default() -> Self {
        Self {
            max_p: 3,
            max_d: 2,
            max_q: 3,
        }
    }
}

/// Fits every order on the grid and returns the minimum-AICc model.
///
/// Candidates that fail to fit are skipped. Exact AICc ties break toward
/// smaller `p+d+q`, then smaller `d`, then smaller `p`, so the result does
/// not depend on evaluation order.
pub fn select_order(
    series: &[f64],
    grid: SelectGrid,
    constant: ConstantPolicy,
) -> Result<(ArimaOrder, ArimaModel), ArimaError> {
    let mut best: Option<ArimaModel> = None;
    let mut failures: Vec<(ArimaOrder, String)> = Vec::new();
    for p in 0..=grid.max_p {
        for d in 0..=grid.max_d {
            for q in 0..=grid.max_q {
                let order = ArimaOrder::new(p, d, q);
                match fit(series, order, constant.include_for(d)) {
                    Ok(model) => {
                        let replace = match &best {
                            None => true,
                            Some(current) => {
                                model.aicc < current.aicc
                                    || (model.aicc == current.aicc
                                        && tie_break_key(model.order) < tie_break_key(current.order))
                            }
                        };
                        if replace {
                            best = Some(model);
                        }
                    }
                    Err(e) => failures.push((order, e.to_string())),
                }
            }
        }
    }
    best.map(|model| (model.order, model))
        .ok_or(ArimaError::AllCandidatesFailed(failures))
}

fn tie_break_key(order: ArimaOrder) -> (usize, usize, usize) {
    (order.p + order.d + order.q, order.d, order.p)
}
