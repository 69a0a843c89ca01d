//! Gamma and Dirichlet sampling, densities and divergence.

use alloc::format;

#[allow(unused_imports)] // inherent in core on recent toolchains
use num_traits::Float;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::special::{digamma_unchecked, ln_gamma};
use crate::N_CLASSES;

/// Lower clamp applied to simplex samples before log-density evaluation.
pub const SIMPLEX_FLOOR: f64 = 1e-8;

fn check_positive(params: &[f64], what: &str) -> Result<()> {
    if params.iter().all(|p| p.is_finite() && *p > 0.0) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} parameters must be positive, got {params:?}")))
    }
}

/// `Gamma(shape, 1)` draw by Marsaglia-Tsang; shapes below one are boosted
/// through `Gamma(shape + 1) * U^(1/shape)`.
pub fn sample_gamma(shape: f64, rng: &mut RngStream) -> Result<f64> {
    check_positive(&[shape], "gamma")?;
    Ok(gamma_draw(shape, rng))
}

pub(crate) fn gamma_draw(shape: f64, rng: &mut RngStream) -> f64 {
    if shape < 1.0 {
        let boost = rng.open01().powf(1.0 / shape);
        return gamma_draw(shape + 1.0, rng) * boost;
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x: f64 = StandardNormal.sample(rng);
        let v = 1.0 + c * x;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u = rng.open01();
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

/// Dirichlet draw as normalized independent Gamma draws. Also returns the
/// unnormalized Gamma draws, which the implicit gradient needs.
pub fn sample_dirichlet_with_gammas(
    alpha: &[f64; N_CLASSES],
    rng: &mut RngStream,
) -> Result<([f64; N_CLASSES], [f64; N_CLASSES])> {
    check_positive(alpha, "dirichlet")?;
    let mut gammas = [0.0; N_CLASSES];
    for (g, &a) in gammas.iter_mut().zip(alpha) {
        *g = gamma_draw(a, rng);
    }
    let total: f64 = gammas.iter().sum();
    let mut z = [0.0; N_CLASSES];
    if total > 0.0 {
        for (zk, g) in z.iter_mut().zip(&gammas) {
            *zk = g / total;
        }
    } else {
        // every draw underflowed: fall back to the mean
        let s: f64 = alpha.iter().sum();
        for (zk, a) in z.iter_mut().zip(alpha) {
            *zk = a / s;
        }
    }
    Ok((z, gammas))
}

pub fn sample_dirichlet(alpha: &[f64; N_CLASSES], rng: &mut RngStream) -> Result<[f64; N_CLASSES]> {
    sample_dirichlet_with_gammas(alpha, rng).map(|(z, _)| z)
}

/// Dirichlet mean `alpha / Σ alpha`.
pub fn dirichlet_mean(alpha: &[f64; N_CLASSES]) -> [f64; N_CLASSES] {
    let s: f64 = alpha.iter().sum();
    alpha.map(|a| a / s)
}

/// Clamp every component to `[1e-8, 1 - 1e-8]` and renormalize.
pub fn clamp_simplex(z: &[f64; N_CLASSES]) -> [f64; N_CLASSES] {
    let c = z.map(|v| v.clamp(SIMPLEX_FLOOR, 1.0 - SIMPLEX_FLOOR));
    let s: f64 = c.iter().sum();
    c.map(|v| v / s)
}

/// Log density of `Dir(alpha)` at `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDensity {
    pub value: f64,
    /// `z` touches the boundary of the simplex; `value` may be infinite.
    pub at_boundary: bool,
}

pub fn dirichlet_log_pdf(z: &[f64; N_CLASSES], alpha: &[f64; N_CLASSES]) -> Result<LogDensity> {
    check_positive(alpha, "dirichlet")?;
    let sum: f64 = z.iter().sum();
    if z.iter().any(|v| !(0.0..=1.0).contains(v)) || (sum - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!("{z:?} is not a simplex point")));
    }
    let a_sum: f64 = alpha.iter().sum();
    let mut value = ln_gamma(a_sum);
    let mut at_boundary = false;
    for (&zk, &ak) in z.iter().zip(alpha) {
        value -= ln_gamma(ak);
        if zk == 0.0 {
            at_boundary = true;
            if ak != 1.0 {
                value += if ak < 1.0 { f64::INFINITY } else { f64::NEG_INFINITY };
            }
        } else {
            value += (ak - 1.0) * zk.ln();
        }
    }
    Ok(LogDensity { value, at_boundary })
}

/// Closed-form `KL(Dir(beta) || Dir(alpha))`.
pub fn dirichlet_kl(beta: &[f64; N_CLASSES], alpha: &[f64; N_CLASSES]) -> Result<f64> {
    check_positive(beta, "dirichlet")?;
    check_positive(alpha, "dirichlet")?;
    let b_sum: f64 = beta.iter().sum();
    let a_sum: f64 = alpha.iter().sum();
    let psi_sum = digamma_unchecked(b_sum);
    let mut kl = ln_gamma(b_sum) - ln_gamma(a_sum);
    for (&b, &a) in beta.iter().zip(alpha) {
        kl += ln_gamma(a) - ln_gamma(b) + (b - a) * (digamma_unchecked(b) - psi_sum);
    }
    Ok(kl)
}
