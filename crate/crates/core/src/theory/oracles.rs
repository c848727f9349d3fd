//! Brute-force and Monte Carlo evaluations of the quantities the closed forms
//! predict. These share no code with the closed forms.

use num_complex::Complex64;

use crate::estimators::FilterParams;
use crate::numerics::{CMat, CVec, RngStream};

fn bpsk_vector(rng: &mut RngStream, taps: usize) -> CVec {
    (0..taps).map(|_| rng.next_bpsk()).collect()
}

/// `a ← Θa` with `Θ = I − εxxᴴ`.
fn apply_theta(a: &mut CVec, x: &CVec, epsilon: f64) {
    let xa: Complex64 = x.iter().zip(a.iter()).map(|(xi, ai)| xi.conj() * ai).sum();
    a.axpy(-xa * epsilon, x);
}

/// `Θ = I − εxxᴴ` as an explicit matrix.
pub fn theta_matrix(x: &CVec, epsilon: f64) -> CMat {
    let m = x.len();
    let mut t = CMat::scaled_identity(m, 1.0);
    for i in 0..m {
        for j in 0..m {
            t[(i, j)] -= x[i] * x[j].conj() * epsilon;
        }
    }
    t
}

/// Monte Carlo estimate of `E‖Θ[n]…Θ[n−N+1]a‖² / E‖a‖²` over independent
/// BPSK regressors and Gaussian `a`. For `chain = 1` this is the one-step
/// contraction, for larger `chain` the `N`-fold product `B[n]`.
pub fn theta_contraction_oracle(
    taps: usize,
    lambda: f64,
    trials: usize,
    chain: usize,
    seed: u64,
) -> f64 {
    let epsilon = 1.0 - lambda;
    let mut x_rng = RngStream::with_stream(seed, 0);
    let mut a_rng = RngStream::with_stream(seed, 1);
    let (mut num, mut den) = (0.0, 0.0);
    for _ in 0..trials {
        let mut a: CVec = (0..taps).map(|_| a_rng.next_cgauss(1.0)).collect();
        den += a.norm_sqr();
        for _ in 0..chain {
            let x = bpsk_vector(&mut x_rng, taps);
            apply_theta(&mut a, &x, epsilon);
        }
        num += a.norm_sqr();
    }
    num / den
}

/// Monte Carlo `E‖c[n]‖²` with
/// `c[n] = γ[n] + Σ_{k=1}^{N−1} Θ[n]…Θ[n−k+1] γ[n−k]`, `γ[j] = εw*[j]x[j]`,
/// over independent BPSK regressors and white noise of the configured power.
pub fn noise_term_monte_carlo(
    params: &FilterParams,
    coherence: usize,
    realizations: usize,
    seed: u64,
) -> f64 {
    let epsilon = params.epsilon();
    let taps = params.taps;
    let mut x_rng = RngStream::with_stream(seed, 0);
    let mut w_rng = RngStream::with_stream(seed, 1);
    let mut total = 0.0;
    for _ in 0..realizations {
        // Horner form, oldest term first: acc ← γ[j] + Θ[j]·acc.
        let mut acc = CVec::zeros(taps);
        for _ in 0..coherence {
            let x = bpsk_vector(&mut x_rng, taps);
            let w = w_rng.next_cgauss(params.noise_variance);
            apply_theta(&mut acc, &x, epsilon);
            acc.axpy(w.conj() * epsilon, &x);
        }
        total += acc.norm_sqr();
    }
    total / realizations as f64
}

/// Diagonal of `Q = Bᴴ[n]B[n−m]` evaluated factor by factor from explicit
/// `Θ` matrices: time instants shared by both products contribute
/// `(Θᴴ[t]Θ[t])ᵢᵢ`, the others `Θ[t]ᵢᵢ`.
///
/// `regressors[k]` is `x[n−k]`; at least `lag + coherence` are needed.
pub fn q_diagonal_factorwise(
    regressors: &[CVec],
    lag: usize,
    coherence: usize,
    epsilon: f64,
) -> Vec<f64> {
    assert!(regressors.len() >= lag + coherence, "not enough regressors");
    let taps = regressors[0].len();
    let mut diag = vec![1.0; taps];
    let newer = 0..coherence;
    let older = lag..lag + coherence;
    for (t, x) in regressors.iter().enumerate().take(lag + coherence) {
        let (in_newer, in_older) = (newer.contains(&t), older.contains(&t));
        if !(in_newer || in_older) {
            continue;
        }
        let theta = theta_matrix(x, epsilon);
        let factor = if in_newer && in_older {
            theta
                .conj_transpose()
                .mul_mat(&theta)
                .expect("square")
                .diagonal()
        } else {
            theta.diagonal()
        };
        for (d, f) in diag.iter_mut().zip(factor) {
            *d *= f.re;
        }
    }
    diag
}

/// Full diagonal of `Bᴴ[n]B[n−m]` from explicit matrix products. Unlike the
/// factor-wise form it depends on the realization; only its mean matches the
/// closed form.
pub fn q_diagonal_full(
    regressors: &[CVec],
    lag: usize,
    coherence: usize,
    epsilon: f64,
) -> Vec<f64> {
    assert!(regressors.len() >= lag + coherence, "not enough regressors");
    let taps = regressors[0].len();
    let product = |start: usize| {
        let mut b = CMat::scaled_identity(taps, 1.0);
        for x in &regressors[start..start + coherence] {
            b = b.mul_mat(&theta_matrix(x, epsilon)).expect("square");
        }
        b
    };
    let q = product(0)
        .conj_transpose()
        .mul_mat(&product(lag))
        .expect("square");
    q.diagonal().iter().map(|v| v.re).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::{noise_term_power, q_diagonal, DerivedConstants};

    #[test]
    fn no_forgetting_means_no_contraction() {
        assert_eq!(theta_contraction_oracle(8, 1.0, 100, 3, 1), 1.0);
    }

    #[test]
    fn contraction_single_step() {
        let c = DerivedConstants::new(50, 0.99);
        let r = theta_contraction_oracle(50, 0.99, 10_000, 1, 17);
        assert!((r / c.rho - 1.0).abs() < 0.02, "ratio {r}");
    }

    #[test]
    fn contraction_chain_of_five() {
        let c = DerivedConstants::new(50, 0.99);
        let r = theta_contraction_oracle(50, 0.99, 10_000, 5, 23);
        assert!((r / c.rho.powi(5) - 1.0).abs() < 0.05, "ratio {r}");
    }

    #[test]
    fn noise_term_single_sample() {
        let mut p = FilterParams::with_taps(50, 0.01);
        p.lambda = 0.99;
        // c = γ = εw*x and ‖x‖² = M exactly, so E‖c‖² = ε²Mσ²
        let mc = noise_term_monte_carlo(&p, 1, 20_000, 5);
        assert!((mc / noise_term_power(&p, 1.0) - 1.0).abs() < 0.05);
    }

    #[test]
    fn factorwise_q_matches_closed_form() {
        let c = DerivedConstants::new(50, 0.99);
        let mut rng = RngStream::new(4);
        let n = 10;
        let regs: Vec<CVec> = (0..3 * n).map(|_| bpsk_vector(&mut rng, 50)).collect();
        for m in [0usize, 3, 10, 14] {
            let want = q_diagonal(m, n, &c);
            for v in q_diagonal_factorwise(&regs, m, n, c.epsilon) {
                assert!((v - want).abs() < 1e-12, "m={m}: {v} vs {want}");
            }
        }
    }

    #[test]
    fn full_q_matches_on_average() {
        let taps = 16;
        let lambda = 1.0 - 1.0 / 32.0;
        let c = DerivedConstants::new(taps, lambda);
        let n = 6;
        let mut rng = RngStream::new(8);
        for m in [0usize, 2, 9] {
            let mut mean = 0.0;
            let trials = 300;
            for _ in 0..trials {
                let regs: Vec<CVec> = (0..m + n).map(|_| bpsk_vector(&mut rng, taps)).collect();
                mean += q_diagonal_full(&regs, m, n, c.epsilon).iter().sum::<f64>() / taps as f64;
            }
            mean /= trials as f64;
            let want = q_diagonal(m, n, &c);
            assert!((mean / want - 1.0).abs() < 0.01, "m={m}: {mean} vs {want}");
        }
    }
}
