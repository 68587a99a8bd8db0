//! Closed-form bounds: universal critical temperature, thermal correlation
//! length, minimum distance, clustering/locality envelopes, and the
//! cluster-expansion approximation bounds.
//!
//! All logarithms are natural and |beta| is taken internally, so callers may
//! pass signed inverse temperatures. Operations whose statement only holds
//! from a minimum distance onward return a tagged error instead of silently
//! extrapolating.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::lattice::{InteractionGraph, Vertex};

/// Parameters every bound depends on: growth constant, local interaction
/// strength, inverse temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    pub alpha: f64,
    pub j: f64,
    pub beta: f64,
}

impl BoundParams {
    pub fn new(alpha: f64, j: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::InvalidArgument("alpha must be positive".into()));
        }
        if !(j >= 0.0) {
            return Err(Error::InvalidArgument("J must be nonnegative".into()));
        }
        Ok(BoundParams { alpha, j, beta })
    }
}

/// alpha_y(x) = alpha e^{|x|} (e^{|x|} - 1), the cluster-series weight base.
pub fn alpha_y(x: f64, alpha: f64) -> f64 {
    let e = x.abs().exp();
    alpha * e * (e - 1.0)
}

/// Universal inverse critical temperature
/// beta* = ln[(1 + sqrt(1 + 4/alpha)) / 2] / (2 J); alpha_y(2 beta* J) = 1.
pub fn beta_star(alpha: f64, j: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument("alpha must be positive".into()));
    }
    if !(j > 0.0) {
        return Err(Error::InvalidArgument("J must be positive".into()));
    }
    Ok(((1.0 + (1.0 + 4.0 / alpha).sqrt()) / 2.0).ln() / (2.0 * j))
}

/// Thermal correlation length xi(beta) = 1 / |ln alpha_y(2 |beta| J)|.
pub fn xi(beta: f64, alpha: f64, j: f64) -> Result<f64> {
    if !(alpha > 0.0) || !(j >= 0.0) {
        return Err(Error::InvalidArgument("need alpha > 0 and J >= 0".into()));
    }
    let ay = alpha_y(2.0 * beta.abs() * j, alpha);
    let log = ay.ln();
    if log.abs() < 1e-12 {
        return Err(Error::DivergentLength);
    }
    Ok(1.0 / log.abs())
}

/// Minimum distance L0(beta, a) = xi |ln( ln(3) (1 - e^{-1/xi}) / a )| from
/// which the clustering bound is asserted.
pub fn l_zero(beta: f64, a: f64, alpha: f64, j: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::InvalidArgument("boundary size a must be positive".into()));
    }
    let bs = beta_star(alpha, j)?;
    if beta.abs() >= bs {
        return Err(Error::OutOfRegime(format!(
            "|beta| = {} is not below beta* = {bs}",
            beta.abs()
        )));
    }
    let x = xi(beta, alpha, j)?;
    Ok(x * ((3.0f64.ln() * (1.0 - (-1.0 / x).exp())) / a).ln().abs())
}

/// Exponential clustering envelope (valid for |beta| < beta* and
/// dist >= L0(beta, a)):
/// 4 a ||A|| ||B|| / (ln 3 (1 - e^{-1/xi})) * e^{-dist/xi}.
pub fn clustering_rhs(
    beta: f64,
    a: f64,
    dist: f64,
    norm_a: f64,
    norm_b: f64,
    alpha: f64,
    j: f64,
) -> Result<f64> {
    let l0 = l_zero(beta, a, alpha, j)?;
    if dist < l0 {
        return Err(Error::BoundInapplicable { dist, l_zero: l0 });
    }
    let x = xi(beta, alpha, j)?;
    let denom = 3.0f64.ln() * (1.0 - (-1.0 / x).exp());
    Ok(4.0 * a * norm_a * norm_b / denom * (-dist / x).exp())
}

/// The tighter covariance envelope, per unit operator norms:
/// 2 (e^{ |dA| alpha_y(2 beta J)^L / (1 - alpha_y(2 beta J)) } - 1),
/// valid whenever alpha_y(2 beta J) < 1, i.e. |beta| < beta*.
pub fn clustering_rhs_tight(
    beta: f64,
    boundary_a: f64,
    dist: f64,
    alpha: f64,
    j: f64,
) -> Result<f64> {
    if !(boundary_a >= 1.0) {
        return Err(Error::InvalidArgument("boundary size must be >= 1".into()));
    }
    let ay = alpha_y(2.0 * beta * j, alpha);
    if ay >= 1.0 {
        return Err(Error::OutOfRegime(format!(
            "alpha_y(2 beta J) = {ay} is not below 1"
        )));
    }
    Ok(2.0 * ((boundary_a * ay.powf(dist) / (1.0 - ay)).exp() - 1.0))
}

/// Locality envelope for || g^S - (g|B)^S ||_1 (valid for |beta| < beta* and
/// dist(S, dB) >= L0(beta, |dS|)):
/// v |beta| J / (1 - e^{-1/xi}) * e^{-dist/xi}, v = 4 |dS| |dB| / ln 3.
pub fn locality_rhs(
    beta: f64,
    boundary_s: f64,
    boundary_b: f64,
    dist: f64,
    alpha: f64,
    j: f64,
) -> Result<f64> {
    if !(boundary_s >= 1.0) || !(boundary_b >= 1.0) {
        return Err(Error::InvalidArgument("boundary sizes must be >= 1".into()));
    }
    let l0 = l_zero(beta, boundary_s, alpha, j)?;
    if dist < l0 {
        return Err(Error::BoundInapplicable { dist, l_zero: l0 });
    }
    let x = xi(beta, alpha, j)?;
    let v = 4.0 * boundary_s * boundary_b / 3.0f64.ln();
    Ok(v * beta.abs() * j / (1.0 - (-1.0 / x).exp()) * (-dist / x).exp())
}

/// Trace-norm error of the cluster-expansion proxy state:
/// exp(|E| alpha_y(beta J)^L / (1 - alpha_y(beta J))) - 1,
/// valid for alpha_y(beta J) < 1, i.e. |beta| < 2 beta*.
pub fn mpo_error_bound(edge_count: usize, l: f64, beta: f64, j: f64, alpha: f64) -> Result<f64> {
    let ay = alpha_y(beta * j, alpha);
    if ay >= 1.0 {
        return Err(Error::OutOfRegime(format!(
            "alpha_y(beta J) = {ay} is not below 1 (needs |beta| < 2 beta*)"
        )));
    }
    Ok((edge_count as f64 * ay.powf(l) / (1.0 - ay)).exp() - 1.0)
}

/// N(L): the largest number of vertices within graph distance < L of any
/// single vertex.
pub fn n_of_l(g: &InteractionGraph, l: usize) -> Result<usize> {
    if l < 1 {
        return Err(Error::InvalidArgument("L must be >= 1".into()));
    }
    let mut best = 0usize;
    for &x0 in g.vertices() {
        let from: BTreeSet<Vertex> = [x0].into_iter().collect();
        let count = g
            .vertices()
            .iter()
            .filter(|&&x| {
                let to: BTreeSet<Vertex> = [x].into_iter().collect();
                match g.vertex_set_distance(&from, &to) {
                    Ok(d) => d < l,
                    Err(_) => false,
                }
            })
            .count();
        best = best.max(count);
    }
    Ok(best)
}

/// Tensor-size exponent bound of the cluster-expansion approximation:
/// 2 M (ln(C n / eps) / ln(1 / alpha_y(beta J)))^D. The constants M
/// (N(L) <= M L^D) and C (the beta-dependent prefactor) are caller-supplied.
#[allow(clippy::too_many_arguments)]
pub fn tensor_size_bound(
    edge_count: usize,
    eps: f64,
    beta: f64,
    j: f64,
    alpha: f64,
    dimension: u32,
    m_const: f64,
    c_const: f64,
) -> Result<f64> {
    if !(eps > 0.0) || !(m_const > 0.0) || !(c_const > 0.0) {
        return Err(Error::InvalidArgument(
            "eps, M and C must be positive".into(),
        ));
    }
    let ay = alpha_y(beta * j, alpha);
    if ay >= 1.0 {
        return Err(Error::OutOfRegime(format!(
            "alpha_y(beta J) = {ay} is not below 1"
        )));
    }
    let ratio = (c_const * edge_count as f64 / eps).ln() / (1.0 / ay).ln();
    Ok(2.0 * m_const * ratio.powi(dimension as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const ALPHA_4E: f64 = 4.0 * std::f64::consts::E;

    // Frozen reference values computed independently with 30-digit decimal
    // arithmetic from the defining formulas.
    const ALPHA_Y_004: f64 = 0.461_850_146_855_857_2;
    const BETA_STAR_4E: f64 = 0.040_689_472_431_522_79;
    const INV_BETA_STAR_4E: f64 = 24.576_381_561_174_63;
    const BETA_STAR_100: f64 = 0.004_926_624_139_353_47;
    const XI_002: f64 = 1.294_473_585_007_202;
    const L_ZERO_002_A4: f64 = 2.474_858_421_725_969;
    const TIGHT_2_HALF_3: f64 = 1.297_442_541_400_256_3;
    const MPO_3_HALF_2: f64 = 3.481_689_070_338_065;
    const TENSOR_D2: f64 = 353.126_600_563_263_4;

    #[test]
    fn alpha_y_values() {
        assert_eq!(alpha_y(0.0, 7.3), 0.0);
        // alpha = 1, x = ln 2: 2 * (2 - 1) = 2
        assert_abs_diff_eq!(alpha_y(2f64.ln(), 1.0), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(alpha_y(0.04, ALPHA_4E), ALPHA_Y_004, epsilon = 1e-13);
        // even in x
        assert_eq!(alpha_y(-0.3, 2.0), alpha_y(0.3, 2.0));
    }

    #[test]
    fn beta_star_values() {
        let bs = beta_star(ALPHA_4E, 1.0).unwrap();
        assert_abs_diff_eq!(bs, BETA_STAR_4E, epsilon = 1e-14);
        // the headline number: 1/(beta* J) ~ 24.58 for the 2D lattice bound
        assert_abs_diff_eq!(1.0 / bs, INV_BETA_STAR_4E, epsilon = 1e-10);
        assert_abs_diff_eq!(beta_star(100.0, 1.0).unwrap(), BETA_STAR_100, epsilon = 1e-14);
        assert!(beta_star(ALPHA_4E, 0.0).is_err());
        // defining identity alpha_y(2 beta* J) = 1
        for (alpha, j) in [(ALPHA_4E, 1.0), (2.0 * std::f64::consts::E, 0.7), (100.0, 3.0)] {
            let bs = beta_star(alpha, j).unwrap();
            assert_abs_diff_eq!(alpha_y(2.0 * bs * j, alpha), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn xi_values_and_identity() {
        assert_abs_diff_eq!(xi(0.02, ALPHA_4E, 1.0).unwrap(), XI_002, epsilon = 1e-12);
        // e^{-1/xi} = alpha_y(2 |beta| J) below beta*
        for beta in [0.005, 0.015, 0.03, -0.02] {
            let x = xi(beta, ALPHA_4E, 1.0).unwrap();
            assert_abs_diff_eq!(
                (-1.0 / x).exp(),
                alpha_y(2.0 * beta.abs(), ALPHA_4E),
                epsilon = 1e-12
            );
        }
        // divergence at the critical point
        let bs = beta_star(ALPHA_4E, 1.0).unwrap();
        assert!(matches!(xi(bs, ALPHA_4E, 1.0), Err(Error::DivergentLength)));
        // monotone increase toward beta*
        let grid: Vec<f64> = (1..=9).map(|k| 0.1 * k as f64 * bs).collect();
        let mut last = 0.0;
        for b in grid {
            let x = xi(b, ALPHA_4E, 1.0).unwrap();
            assert!(x > last);
            last = x;
        }
    }

    #[test]
    fn l_zero_values() {
        assert_abs_diff_eq!(
            l_zero(0.02, 4.0, ALPHA_4E, 1.0).unwrap(),
            L_ZERO_002_A4,
            epsilon = 1e-12
        );
        // unit log argument: a = ln 3 (1 - e^{-1/xi}) gives L0 = 0
        let x = xi(0.02, ALPHA_4E, 1.0).unwrap();
        let a_unit = 3.0f64.ln() * (1.0 - (-1.0 / x).exp());
        assert_abs_diff_eq!(l_zero(0.02, a_unit, ALPHA_4E, 1.0).unwrap(), 0.0, epsilon = 1e-12);
        // monotone in a (for a above the unit-argument point)
        assert!(
            l_zero(0.02, 8.0, ALPHA_4E, 1.0).unwrap() > l_zero(0.02, 4.0, ALPHA_4E, 1.0).unwrap()
        );
        assert!(matches!(
            l_zero(0.05, 4.0, ALPHA_4E, 1.0),
            Err(Error::OutOfRegime(_))
        ));
    }

    #[test]
    fn clustering_rhs_shape() {
        let beta = 0.02;
        let r4 = clustering_rhs(beta, 2.0, 4.0, 1.0, 1.0, ALPHA_4E, 1.0).unwrap();
        let r8 = clustering_rhs(beta, 2.0, 8.0, 1.0, 1.0, ALPHA_4E, 1.0).unwrap();
        let x = xi(beta, ALPHA_4E, 1.0).unwrap();
        // doubling the distance multiplies by e^{-4/xi}
        assert_abs_diff_eq!(r8 / r4, (-4.0 / x).exp(), epsilon = 1e-12);
        // monotone decreasing in dist, increasing in a and norms
        assert!(r8 < r4);
        assert!(clustering_rhs(beta, 4.0, 4.0, 1.0, 1.0, ALPHA_4E, 1.0).unwrap() > r4);
        assert!(clustering_rhs(beta, 2.0, 4.0, 2.0, 1.0, ALPHA_4E, 1.0).unwrap() > r4);
        // below L0 the bound is tagged inapplicable, not evaluated
        assert!(matches!(
            clustering_rhs(beta, 2.0, 0.25, 1.0, 1.0, ALPHA_4E, 1.0),
            Err(Error::BoundInapplicable { .. })
        ));
        // increasing in |beta| below beta* (at a distance both betas allow)
        let r_hot = clustering_rhs(0.03, 2.0, 8.0, 1.0, 1.0, ALPHA_4E, 1.0).unwrap();
        assert!(r_hot > r8);
    }

    #[test]
    fn clustering_rhs_tight_values() {
        // alpha_y(2 beta J) = 1/2 at 2 beta J = ln[(1+sqrt(1+2/alpha))/2]:
        // pick alpha and solve numerically by bisection for the test point
        let alpha = ALPHA_4E;
        let mut lo = 0.0;
        let mut hi = 1.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if alpha_y(mid, alpha) < 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let beta = lo / 2.0; // so alpha_y(2 beta J) = 1/2 with J = 1
        let v = clustering_rhs_tight(beta, 2.0, 3.0, alpha, 1.0).unwrap();
        assert_abs_diff_eq!(v, TIGHT_2_HALF_3, epsilon = 1e-9);
        // decays to zero with distance
        assert!(clustering_rhs_tight(beta, 2.0, 40.0, alpha, 1.0).unwrap() < 1e-10);
        // out of regime at beta*
        let bs = beta_star(alpha, 1.0).unwrap();
        assert!(clustering_rhs_tight(bs * 1.01, 2.0, 3.0, alpha, 1.0).is_err());
    }

    #[test]
    fn locality_rhs_shape() {
        assert_eq!(locality_rhs(0.0, 2.0, 2.0, 3.0, ALPHA_4E, 1.0).unwrap(), 0.0);
        let r = locality_rhs(0.02, 2.0, 2.0, 3.0, ALPHA_4E, 1.0).unwrap();
        let r_wider = locality_rhs(0.02, 2.0, 4.0, 3.0, ALPHA_4E, 1.0).unwrap();
        // linear in |dB|
        assert_abs_diff_eq!(r_wider, 2.0 * r, epsilon = 1e-12);
        assert!(matches!(
            locality_rhs(0.02, 4.0, 2.0, 0.5, ALPHA_4E, 1.0),
            Err(Error::BoundInapplicable { .. })
        ));
    }

    #[test]
    fn mpo_error_values() {
        // alpha_y = 1/2: exp(3 * 0.25 / 0.5) - 1 = e^{3/2} - 1
        let alpha = 2.0 * std::f64::consts::E;
        let mut lo = 0.0;
        let mut hi = 1.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if alpha_y(mid, alpha) < 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let v = mpo_error_bound(3, 2.0, lo, 1.0, alpha).unwrap();
        assert_abs_diff_eq!(v, MPO_3_HALF_2, epsilon = 1e-9);
        // L -> infinity: vanishes
        assert!(mpo_error_bound(3, 60.0, lo, 1.0, alpha).unwrap() < 1e-12);
        // the regime boundary is 2 beta*: alpha_y(beta J) < 1
        let bs = beta_star(alpha, 1.0).unwrap();
        assert!(mpo_error_bound(3, 2.0, 1.99 * bs, 1.0, alpha).is_ok());
        assert!(mpo_error_bound(3, 2.0, 2.01 * bs, 1.0, alpha).is_err());
    }

    #[test]
    fn n_of_l_values() {
        let chain = InteractionGraph::chain(9, false).unwrap();
        assert_eq!(n_of_l(&chain, 1).unwrap(), 1);
        assert_eq!(n_of_l(&chain, 3).unwrap(), 5);
        let grid = InteractionGraph::square_lattice(5, 5, false).unwrap();
        assert_eq!(n_of_l(&grid, 2).unwrap(), 5);
        assert!(n_of_l(&grid, 0).is_err());
    }

    #[test]
    fn tensor_size_values() {
        // D = 2, M = C = 1, n = 100, eps = 0.01, alpha_y = 1/2
        let alpha = ALPHA_4E;
        let mut lo = 0.0;
        let mut hi = 1.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if alpha_y(mid, alpha) < 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let v = tensor_size_bound(100, 0.01, lo, 1.0, alpha, 2, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(v, TENSOR_D2, epsilon = 1e-6);
        // D = 1: linear in ln(n/eps); doubling C n / eps adds 2 M ln2 / ln(1/ay)
        let v1 = tensor_size_bound(100, 0.01, lo, 1.0, alpha, 1, 1.0, 1.0).unwrap();
        let v2 = tensor_size_bound(200, 0.01, lo, 1.0, alpha, 1, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(v2 - v1, 2.0 * 2f64.ln() / 2f64.ln(), epsilon = 1e-12);
    }
}
