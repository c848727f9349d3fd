//! Closed-form predictors for RLS and m-RLS error behaviour, and the
//! brute-force oracles used to check them.
//!
//! All logarithms are natural.

mod acf;
mod complexity;
pub mod oracles;

pub use acf::{acf_propagate, coherence_chain, coherence_from_acf, coherence_recursion, AcfCurve};
pub use complexity::{complexity_counts, Implementation, OpCounts};

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::error::{MrlsError, Result};
use crate::estimators::FilterParams;

/// Constants derived from `(M, λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedConstants {
    pub taps: usize,
    pub lambda: f64,
    /// `ε = 1 − λ`.
    pub epsilon: f64,
    /// `ρ = 1 − 2ε + ε²M`, the per-sample contraction of the estimation error.
    pub rho: f64,
    /// `ψ = ε²M / (1 − ρ)`.
    pub psi: f64,
    /// `g = log(ρ / λ²)`.
    pub g: f64,
}

impl DerivedConstants {
    pub fn new(taps: usize, lambda: f64) -> Self {
        let m = taps as f64;
        let epsilon = 1.0 - lambda;
        let rho = 1.0 - 2.0 * epsilon + epsilon * epsilon * m;
        DerivedConstants {
            taps,
            lambda,
            epsilon,
            rho,
            psi: epsilon * epsilon * m / (1.0 - rho),
            g: (rho / (lambda * lambda)).ln(),
        }
    }

    pub fn from_params(params: &FilterParams) -> Self {
        Self::new(params.taps, params.lambda)
    }

    /// `α = log 2 / N`, the decay rate of an exponential ACF with coherence `N`.
    pub fn alpha(coherence: f64) -> f64 {
        LN_2 / coherence
    }

    fn check_domain(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(MrlsError::Domain(format!(
                "rho = {} is outside (0, 1); lambda = {} is not in the stable range",
                self.rho, self.lambda
            )));
        }
        Ok(())
    }
}

/// Steady-state MSE of classic RLS tracking a system of coherence `N`:
/// `ρᴺ + (1 − ρᴺ⁺¹)ψσ_w²` (lag error plus estimation noise).
pub fn rls_mse(params: &FilterParams, coherence: f64) -> Result<f64> {
    let c = DerivedConstants::from_params(params);
    c.check_domain()?;
    let lag = c.rho.powf(coherence);
    Ok(lag + (1.0 - lag * c.rho) * c.psi * params.noise_variance)
}

/// m-RLS MSE prediction for the given per-layer coherence lengths, with the
/// cross-correlation term `u(l)` taken as zero.
///
/// The estimation-noise recursion starts from `v(1) = (1 − ρ^{N₁+1})ψσ_w²`,
/// which makes the one-layer prediction equal [`rls_mse`].
pub fn mrls_mse_predict(params: &FilterParams, coherences: &[f64]) -> Result<f64> {
    let (&first, rest) = coherences
        .split_first()
        .ok_or_else(|| MrlsError::argument("need at least one coherence length"))?;
    let c = DerivedConstants::from_params(params);
    c.check_domain()?;
    let en = |n: f64| (1.0 - c.rho.powf(n + 1.0)) * c.psi * params.noise_variance;
    let mut lag = c.rho.powf(first);
    let mut v = en(first);
    for &n in rest {
        let contraction = c.rho.powf(n);
        lag *= contraction;
        v = contraction * v + en(n);
    }
    Ok(lag + v)
}

/// Offset `(1 − 2(1 − εM)^l)σ_w²` relating the effective-IR power to the a
/// posteriori error power: `E‖h_(l+1)‖² = E|d_(l+1)|² + offset`.
pub fn posteriori_power_offset(layer: usize, params: &FilterParams) -> f64 {
    (1.0 - 2.0 * (1.0 - params.epsilon_m()).powi(layer as i32)) * params.noise_variance
}

/// `E‖c[n]‖² = ε²M·(1 − ρᴺ)/(1 − ρ)·σ_w²`, power of the noise term after `N`
/// samples.
pub fn noise_term_power(params: &FilterParams, coherence: f64) -> f64 {
    let c = DerivedConstants::from_params(params);
    let m = params.taps as f64;
    let geometric = if (1.0 - c.rho).abs() < 1e-300 {
        coherence
    } else {
        (1.0 - c.rho.powf(coherence)) / (1.0 - c.rho)
    };
    c.epsilon * c.epsilon * m * geometric * params.noise_variance
}

/// Diagonal of `Q = Bᴴ_(l)[n]B_(l)[n−m]` for BPSK input:
/// `λ^{2m}ρ^{N−m}` for `m ≤ N`, `λ^{2N}` beyond.
pub fn q_diagonal(lag: usize, coherence: usize, consts: &DerivedConstants) -> f64 {
    let lambda2 = consts.lambda * consts.lambda;
    if lag <= coherence {
        lambda2.powi(lag as i32) * consts.rho.powi((coherence - lag) as i32)
    } else {
        lambda2.powi(coherence as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn paper_params(noise: f64) -> FilterParams {
        let mut p = FilterParams::with_taps(50, noise);
        p.lambda = 0.99;
        p
    }

    #[test]
    fn constants_for_default_experiment() {
        let c = DerivedConstants::new(50, 0.99);
        assert_abs_diff_eq!(c.rho, 0.985, epsilon = 1e-12);
        assert_abs_diff_eq!(c.psi, 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.g, (0.985f64 / 0.9801).ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(c.g, 0.004_987_5, epsilon = 1e-6);
    }

    #[test]
    fn rls_mse_reference_point() {
        // ρ²⁰⁰ + (1 − ρ²⁰¹)·(1/3)·0.01
        let rho: f64 = 0.985;
        let expected = rho.powi(200) + (1.0 - rho.powi(201)) / 3.0 * 0.01;
        let mu = rls_mse(&paper_params(0.01), 200.0).unwrap();
        assert_abs_diff_eq!(mu, expected, epsilon = 1e-12);
        assert_abs_diff_eq!(mu, 0.051_84, epsilon = 5e-5);
        assert_abs_diff_eq!(10.0 * mu.log10(), -12.85, epsilon = 0.01);
    }

    #[test]
    fn rls_mse_limits() {
        assert!(rls_mse(&paper_params(0.0), 1e7).unwrap() < 1e-12);
        // ε → 0: the estimation-noise term vanishes with N fixed
        let mut p = paper_params(0.1);
        p.lambda = 1.0 - 1e-7;
        let c = DerivedConstants::from_params(&p);
        assert_abs_diff_eq!(c.psi, 50.0 * 1e-7 / 2.0, epsilon = 1e-9);
        let en = rls_mse(&p, 100.0).unwrap() - c.rho.powf(100.0);
        assert!(en < 1e-8);
    }

    #[test]
    fn rls_mse_unstable_lambda() {
        let mut p = paper_params(0.01);
        p.lambda = 0.5;
        assert!(matches!(rls_mse(&p, 200.0), Err(MrlsError::Domain(_))));
    }

    #[test]
    fn mrls_single_layer_is_rls() {
        for noise in [0.0, 0.01, 0.1] {
            let p = paper_params(noise);
            for n in [10.0, 200.0, 2000.0] {
                assert_abs_diff_eq!(
                    mrls_mse_predict(&p, &[n]).unwrap(),
                    rls_mse(&p, n).unwrap(),
                    epsilon = 1e-15
                );
            }
        }
    }

    #[test]
    fn mrls_noiseless_is_pure_lag() {
        let p = paper_params(0.0);
        let mu = mrls_mse_predict(&p, &[200.0, 53.0, 33.0]).unwrap();
        assert_abs_diff_eq!(mu, 0.985f64.powi(286), epsilon = 1e-15);
        assert!(mrls_mse_predict(&p, &[]).is_err());
    }

    #[test]
    fn mrls_two_layers_by_hand() {
        let p = paper_params(0.01);
        let (r, psi, s) = (0.985f64, 1.0 / 3.0, 0.01);
        let v1 = (1.0 - r.powi(201)) * psi * s;
        let v2 = r.powi(53) * v1 + (1.0 - r.powi(54)) * psi * s;
        let expected = r.powi(200) * r.powi(53) + v2;
        assert_abs_diff_eq!(
            mrls_mse_predict(&p, &[200.0, 53.0]).unwrap(),
            expected,
            epsilon = 1e-14
        );
    }

    #[test]
    fn offsets() {
        let p = paper_params(0.01);
        assert_abs_diff_eq!(posteriori_power_offset(1, &p), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(posteriori_power_offset(2, &p), 0.005, epsilon = 1e-15);
        let q = paper_params(0.0);
        for l in 1..6 {
            assert_eq!(posteriori_power_offset(l, &q), 0.0);
        }
    }

    #[test]
    fn noise_term_cases() {
        let p = paper_params(0.01);
        assert_abs_diff_eq!(
            noise_term_power(&p, 1.0),
            1e-4 * 50.0 * 0.01,
            epsilon = 1e-16
        );
        let v = noise_term_power(&p, 200.0);
        let expected = 1e-4 * 50.0 * (1.0 - 0.985f64.powi(200)) / 0.015 * 0.01;
        assert_abs_diff_eq!(v, expected, epsilon = 1e-15);
        assert_abs_diff_eq!(v, 3.171e-3, epsilon = 1e-6);
    }

    #[test]
    fn q_diagonal_cases() {
        let c = DerivedConstants::new(50, 0.99);
        assert_abs_diff_eq!(q_diagonal(0, 10, &c), 0.985f64.powi(10), epsilon = 1e-15);
        assert_abs_diff_eq!(q_diagonal(11, 10, &c), 0.99f64.powi(20), epsilon = 1e-15);
        assert_abs_diff_eq!(q_diagonal(25, 10, &c), 0.99f64.powi(20), epsilon = 1e-15);
        let v = q_diagonal(3, 10, &c);
        assert_abs_diff_eq!(v, 0.99f64.powi(6) * 0.985f64.powi(7), epsilon = 1e-15);
        assert_abs_diff_eq!(v, 0.8470, epsilon = 1e-4);
    }
}
