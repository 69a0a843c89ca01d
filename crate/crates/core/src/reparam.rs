//! Stochastic gradients of Dirichlet expectations.
//!
//! The pathwise estimator differentiates through the Gamma draws behind a
//! Dirichlet sample using implicit reparameterization: for `g ~ Gamma(b, 1)`
//! the sample's sensitivity is `dg/db = -(∂F/∂b) / p(g; b)` where `F` is the
//! Gamma CDF. The score-function estimator serves as an independent check.

use alloc::format;

#[allow(unused_imports)] // inherent in core on recent toolchains
use num_traits::Float;

use crate::dist::{gamma_draw, SIMPLEX_FLOOR};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::special::{digamma_unchecked, gamma_sample_shape_grad};
use crate::tape::{Tape, Var};
use crate::N_CLASSES;

/// Reparameterized `z ~ Dir(beta)` on the tape. Gamma draws become nodes
/// whose parent is the matching concentration; the simplex point is clamped
/// to `[1e-8, 1 - 1e-8]` and renormalized.
pub fn dirichlet_rsample(tape: &mut Tape, beta: [Var; N_CLASSES], rng: &mut RngStream) -> [Var; N_CLASSES] {
    let gammas = beta.map(|b| {
        let shape = tape.value(b);
        let g = gamma_draw(shape, rng).max(f64::MIN_POSITIVE);
        let dg = gamma_sample_shape_grad(shape, g);
        tape.unary(b, g, dg)
    });
    let total = tape.sum(&gammas);
    let z = gammas.map(|g| {
        let zk = tape.div(g, total);
        tape.clamp(zk, SIMPLEX_FLOOR, 1.0 - SIMPLEX_FLOOR)
    });
    let s = tape.sum(&z);
    z.map(|zk| tape.div(zk, s))
}

/// Monte Carlo gradient estimate with per-component standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradEstimate {
    pub mean: [f64; N_CLASSES],
    pub std_err: [f64; N_CLASSES],
    pub n_samples: usize,
}

#[derive(Default)]
struct Moments {
    sum: [f64; N_CLASSES],
    sum_sq: [f64; N_CLASSES],
    n: usize,
}

impl Moments {
    fn push(&mut self, g: &[f64; N_CLASSES]) {
        for k in 0..N_CLASSES {
            self.sum[k] += g[k];
            self.sum_sq[k] += g[k] * g[k];
        }
        self.n += 1;
    }

    fn finish(self) -> GradEstimate {
        let n = self.n as f64;
        let mean = self.sum.map(|s| s / n);
        let mut std_err = [0.0; N_CLASSES];
        for k in 0..N_CLASSES {
            let var = if self.n > 1 {
                ((self.sum_sq[k] - n * mean[k] * mean[k]) / (n - 1.0)).max(0.0)
            } else {
                0.0
            };
            std_err[k] = (var / n).sqrt();
        }
        GradEstimate {
            mean,
            std_err,
            n_samples: self.n,
        }
    }
}

fn check_inputs(beta: &[f64; N_CLASSES], n_samples: usize) -> Result<()> {
    if n_samples < 1 {
        return Err(Error::Config("n_samples must be at least 1".into()));
    }
    if beta.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
        return Err(Error::Domain(format!("beta must be positive, got {beta:?}")));
    }
    Ok(())
}

/// Pathwise estimate of `∇_beta E_{Dir(beta)}[objective(z)]`. The objective
/// builds its value on the tape from the sampled simplex point.
pub fn reparam_grad_elbo<F>(
    objective: F,
    beta: [f64; N_CLASSES],
    n_samples: usize,
    rng: &mut RngStream,
) -> Result<GradEstimate>
where
    F: Fn(&mut Tape, [Var; N_CLASSES]) -> Var,
{
    check_inputs(&beta, n_samples)?;
    let mut tape = Tape::with_capacity(64);
    let mut acc = Moments::default();
    for _ in 0..n_samples {
        tape.clear();
        let b = beta.map(|v| tape.leaf(v));
        let z = dirichlet_rsample(&mut tape, b, rng);
        let f = objective(&mut tape, z);
        let adj = tape.grad(f)?;
        acc.push(&b.map(|v| adj[v.index()]));
    }
    Ok(acc.finish())
}

/// Score-function (REINFORCE) estimate of the same gradient:
/// `f(z) ∇_beta log Dir(z; beta)`.
pub fn score_function_grad<F>(
    objective: F,
    beta: [f64; N_CLASSES],
    n_samples: usize,
    rng: &mut RngStream,
) -> Result<GradEstimate>
where
    F: Fn(&[f64; N_CLASSES]) -> f64,
{
    check_inputs(&beta, n_samples)?;
    let psi_sum = digamma_unchecked(beta.iter().sum());
    let psi = beta.map(digamma_unchecked);
    let mut acc = Moments::default();
    for _ in 0..n_samples {
        let g = beta.map(|b| gamma_draw(b, rng));
        let total: f64 = g.iter().sum();
        let z = g.map(|v| v / total);
        let f = objective(&z);
        let mut est = [0.0; N_CLASSES];
        for k in 0..N_CLASSES {
            est[k] = f * (psi_sum - psi[k] + z[k].ln());
        }
        acc.push(&est);
    }
    Ok(acc.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_objective_has_zero_pathwise_gradient() {
        let mut rng = RngStream::new(0);
        let est = reparam_grad_elbo(|t, _| t.leaf(1.5), [2.0, 3.0, 1.5], 100, &mut rng).unwrap();
        assert_eq!(est.mean, [0.0; 3]);
    }

    #[test]
    fn rejects_zero_samples() {
        let mut rng = RngStream::new(0);
        let r = reparam_grad_elbo(|t, z| t.add(z[0], z[1]), [1.0; 3], 0, &mut rng);
        assert!(matches!(r, Err(Error::Config(_))));
        assert!(score_function_grad(|_| 0.0, [1.0; 3], 0, &mut rng).is_err());
    }

    #[test]
    fn first_component_mean_gradient() {
        // E[z_1] = b_1 / Σb, gradient ((Σb - b_1), -b_1, -b_1) / (Σb)^2
        let beta = [2.0, 2.0, 2.0];
        let mut rng = RngStream::new(11);
        let est = reparam_grad_elbo(|_, z| z[0], beta, 20_000, &mut rng).unwrap();
        let s: f64 = beta.iter().sum();
        let truth = [(s - beta[0]) / (s * s), -beta[0] / (s * s), -beta[0] / (s * s)];
        for k in 0..3 {
            assert!(
                (est.mean[k] - truth[k]).abs() < 3.0 * est.std_err[k] + 1e-12,
                "k={k} est={:?} truth={truth:?}",
                est
            );
        }
    }
}
