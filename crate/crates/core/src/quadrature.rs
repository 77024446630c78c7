//! Composite Simpson quadrature on uniform grids of ideal time.

use crate::error::{invalid, Result};

/// Uniform grid `t_min, ..., t_max` with `n_points` nodes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    t_min: f64,
    t_max: f64,
    n_points: usize,
}

impl TimeGrid {
    pub fn new(t_min: f64, t_max: f64, n_points: usize) -> Result<Self> {
        if !(t_min < t_max) || !t_min.is_finite() || !t_max.is_finite() {
            return Err(invalid(
                "t_grid",
                format!("need finite t_min < t_max, got [{t_min}, {t_max}]"),
            ));
        }
        if n_points < 3 {
            return Err(invalid("t_grid", format!("need at least 3 points, got {n_points}")));
        }
        Ok(Self { t_min, t_max, n_points })
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn span(&self) -> f64 {
        self.t_max - self.t_min
    }

    pub fn spacing(&self) -> f64 {
        self.span() / (self.n_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.t_max
        } else {
            self.t_min + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|i| self.point(i))
    }

    /// Same spacing, twice the span, same center.
    pub fn enlarged(&self) -> Self {
        let half = self.span();
        let center = 0.5 * (self.t_min + self.t_max);
        Self {
            t_min: center - half,
            t_max: center + half,
            n_points: 2 * (self.n_points - 1) + 1,
        }
    }

    pub fn simpson_weights(&self) -> Vec<f64> {
        simpson_weights(self.n_points, self.spacing())
    }
}

/// Weights of composite Simpson's rule on `n` equally spaced nodes.
///
/// An odd number of intervals is closed with Simpson's 3/8 rule on the last
/// three intervals; two nodes fall back to the trapezoid rule.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    assert!(n >= 2, "need at least two nodes");
    let mut w = vec![0.0; n];
    let intervals = n - 1;
    if intervals == 1 {
        w[0] = 0.5 * h;
        w[1] = 0.5 * h;
        return w;
    }
    let (simpson_intervals, tail) = if intervals.is_multiple_of(2) {
        (intervals, false)
    } else {
        (intervals - 3, true)
    };
    for k in (0..simpson_intervals).step_by(2) {
        w[k] += h / 3.0;
        w[k + 1] += 4.0 * h / 3.0;
        w[k + 2] += h / 3.0;
    }
    if tail {
        let s = simpson_intervals;
        let c = 3.0 * h / 8.0;
        w[s] += c;
        w[s + 1] += 3.0 * c;
        w[s + 2] += 3.0 * c;
        w[s + 3] += c;
    }
    w
}

/// Simpson integral of samples together with a Richardson error estimate
/// from the rule on every other node.
pub fn simpson_with_estimate(values: &[f64], h: f64) -> (f64, f64) {
    let fine: f64 = simpson_weights(values.len(), h)
        .iter()
        .zip(values)
        .map(|(w, v)| w * v)
        .sum();
    if values.len() < 5 {
        return (fine, f64::INFINITY);
    }
    let coarse_vals: Vec<f64> = values.iter().step_by(2).copied().collect();
    let coarse_h = 2.0 * h;
    // Coarse nodes must span the same interval.
    let covered = (coarse_vals.len() - 1) * 2 == values.len() - 1;
    if !covered {
        let c: Vec<f64> = values[..values.len() - 1].iter().step_by(2).copied().collect();
        let sub_fine: f64 = simpson_weights(values.len() - 1, h)
            .iter()
            .zip(&values[..values.len() - 1])
            .map(|(w, v)| w * v)
            .sum();
        let sub_coarse: f64 = simpson_weights(c.len(), coarse_h)
            .iter()
            .zip(&c)
            .map(|(w, v)| w * v)
            .sum();
        return (fine, (sub_fine - sub_coarse).abs() / 15.0);
    }
    let coarse: f64 = simpson_weights(coarse_vals.len(), coarse_h)
        .iter()
        .zip(&coarse_vals)
        .map(|(w, v)| w * v)
        .sum();
    (fine, (fine - coarse).abs() / 15.0)
}
