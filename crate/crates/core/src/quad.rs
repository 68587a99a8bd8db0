//! Gauss-Legendre quadrature on [0, 1].
//!
//! Nodes are the Legendre roots found by Newton iteration from the Chebyshev
//! initial guess; superexponentially convergent for the smooth integrands
//! that appear in the averaged-covariance integrals.

use crate::error::{Error, Result};

/// A Gauss-Legendre rule mapped to the unit interval.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Rule with `order` points (order >= 2).
    pub fn new(order: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidArgument(format!(
                "quadrature order must be >= 2, got {order}"
            )));
        }
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        // roots come in +- pairs on [-1,1]; solve the upper half
        for k in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_and_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[k] = -x;
            nodes[n - 1 - k] = x;
            weights[k] = w;
            weights[n - 1 - k] = w;
        }
        // map [-1,1] -> [0,1]
        for x in nodes.iter_mut() {
            *x = 0.5 * (*x + 1.0);
        }
        for w in weights.iter_mut() {
            *w *= 0.5;
        }
        Ok(GaussLegendre { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes in (0, 1), ascending.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Weights summing to 1.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integral of `f` over [0, 1].
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// P_n(x) and P_n'(x) by the Bonnet recurrence.
fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
