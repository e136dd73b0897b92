//! Deterministic Nelder–Mead simplex minimization for small parameter
//! vectors. No gradients, no randomness: identical inputs give bit-identical
//! results.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum OptimError {
    #[error("objective is not finite at the starting point")]
    NonFiniteAtStart,
    #[error("starting point must have at least one coordinate")]
    EmptyStart,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerOptions {
    /// Converged when every vertex is within this distance (per coordinate)
    /// of the best vertex.
    pub x_tolerance: f64,
    /// Converged when the best-to-worst objective spread drops below this.
    pub f_tolerance: f64,
    pub max_iterations: usize,
    /// Offset added along each axis to build the initial simplex.
    pub initial_step: f64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            x_tolerance: 1e-8,
            f_tolerance: 1e-10,
            max_iterations: 5000,
            initial_step: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimResult {
    pub minimizer: Vec<f64>,
    /// Objective value at `minimizer`, as evaluated during the search.
    pub minimum: f64,
    pub iterations: usize,
    pub converged: bool,
}

const REFLECTION: f64 = 1.0;
const EXPANSION: f64 = 2.0;
const CONTRACTION: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimizes `objective` from `x0` with a fixed-coefficient Nelder–Mead
/// simplex (reflection 1, expansion 2, contraction 0.5, shrink 0.5).
///
/// The initial simplex is `x0` plus `initial_step` along each axis. A `NaN`
/// objective value mid-run is treated as `+inf`, so the point is rejected;
/// a non-finite value at `x0` itself is an error.
pub fn minimize<F>(
    mut objective: F,
    x0: &[f64],
    options: &OptimizerOptions,
) -> Result<OptimResult, OptimError>
where
    F: FnMut(&[f64]) -> f64,
{
    if x0.is_empty() {
        return Err(OptimError::EmptyStart);
    }
    let f0 = objective(x0);
    if !f0.is_finite() {
        return Err(OptimError::NonFiniteAtStart);
    }

    let dim = x0.len();
    let mut eval = move |x: &[f64]| -> f64 {
        let v = objective(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    let mut values: Vec<f64> = Vec::with_capacity(dim + 1);
    simplex.push(x0.to_vec());
    values.push(f0);
    for axis in 0..dim {
        let mut point = x0.to_vec();
        point[axis] += options.initial_step;
        values.push(eval(&point));
        simplex.push(point);
    }

    let mut iterations = 0;
    let converged = loop {
        sort_simplex(&mut simplex, &mut values);
        if x_spread(&simplex) < options.x_tolerance
            || values[dim] - values[0] < options.f_tolerance
        {
            break true;
        }
        if iterations >= options.max_iterations {
            break false;
        }
        iterations += 1;

        let centroid = centroid_excluding_worst(&simplex);
        let reflected = affine(&centroid, &simplex[dim], REFLECTION);
        let f_reflected = eval(&reflected);

        if f_reflected < values[0] {
            let expanded = affine(&centroid, &simplex[dim], EXPANSION);
            let f_expanded = eval(&expanded);
            if f_expanded < f_reflected {
                accept(&mut simplex, &mut values, expanded, f_expanded);
            } else {
                accept(&mut simplex, &mut values, reflected, f_reflected);
            }
        } else if f_reflected < values[dim - 1] {
            accept(&mut simplex, &mut values, reflected, f_reflected);
        } else if f_reflected < values[dim] {
            // Outside contraction, between the reflected point and centroid.
            let contracted = affine(&centroid, &simplex[dim], REFLECTION * CONTRACTION);
            let f_contracted = eval(&contracted);
            if f_contracted <= f_reflected {
                accept(&mut simplex, &mut values, contracted, f_contracted);
            } else {
                shrink(&mut simplex, &mut values, &mut eval);
            }
        } else {
            // Inside contraction, between the worst point and centroid.
            let contracted = affine(&centroid, &simplex[dim], -CONTRACTION);
            let f_contracted = eval(&contracted);
            if f_contracted < values[dim] {
                accept(&mut simplex, &mut values, contracted, f_contracted);
            } else {
                shrink(&mut simplex, &mut values, &mut eval);
            }
        }
    };

    Ok(OptimResult {
        minimizer: simplex[0].clone(),
        minimum: values[0],
        iterations,
        converged,
    })
}

/// Stable sort by objective value; ties keep their current order, so a flat
/// start leaves `x0` in front.
fn sort_simplex(simplex: &mut [Vec<f64>], values: &mut [f64]) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted_simplex: Vec<Vec<f64>> = order.iter().map(|&i| simplex[i].clone()).collect();
    let sorted_values: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    for (slot, point) in simplex.iter_mut().zip(sorted_simplex) {
        *slot = point;
    }
    values.copy_from_slice(&sorted_values);
}

fn x_spread(simplex: &[Vec<f64>]) -> f64 {
    let best = &simplex[0];
    simplex[1..]
        .iter()
        .flat_map(|point| {
            point
                .iter()
                .zip(best.iter())
                .map(|(a, b)| (a - b).abs())
        })
        .fold(0.0, f64::max)
}

fn centroid_excluding_worst(simplex: &[Vec<f64>]) -> Vec<f64> {
    let dim = simplex.len() - 1;
    let mut centroid = vec![0.0; dim];
    for point in &simplex[..dim] {
        for (c, x) in centroid.iter_mut().zip(point) {
            *c += x;
        }
    }
    for c in &mut centroid {
        *c /= dim as f64;
    }
    centroid
}

/// `centroid + t * (centroid - from)`.
fn affine(centroid: &[f64], from: &[f64], t: f64) -> Vec<f64> {
    centroid
        .iter()
        .zip(from)
        .map(|(c, x)| c + t * (c - x))
        .collect()
}

fn accept(simplex: &mut [Vec<f64>], values: &mut [f64], point: Vec<f64>, value: f64) {
    let worst = simplex.len() - 1;
    simplex[worst] = point;
    values[worst] = value;
}

fn shrink<F: FnMut(&[f64]) -> f64>(simplex: &mut [Vec<f64>], values: &mut [f64], eval: &mut F) {
    let best = simplex[0].clone();
    for i in 1..simplex.len() {
        let point: Vec<f64> = best
            .iter()
            .zip(&simplex[i])
            .map(|(b, x)| b + SHRINK * (x - b))
            .collect();
        values[i] = eval(&point);
        simplex[i] = point;
    }
}
