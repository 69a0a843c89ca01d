//! Monte Carlo and analytic oracles for sampling, densities, KL and the
//! Dirichlet gradient estimators.

use lexifuse_core::dist::{dirichlet_kl, dirichlet_log_pdf, sample_dirichlet, sample_gamma};
use lexifuse_core::reparam::{reparam_grad_elbo, score_function_grad};
use lexifuse_core::RngStream;

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

#[test]
fn dirichlet_sample_means() {
    let mut rng = RngStream::new(11);
    for (alpha, tol) in [([1.0, 1.0, 1.0], 0.005), ([10.0, 1.0, 1.0], 0.01)] {
        let n = 100_000;
        let mut acc = [0.0; 3];
        for _ in 0..n {
            let z = sample_dirichlet(&alpha, &mut rng).unwrap();
            assert!(z.iter().all(|&v| v >= 0.0));
            assert!((z.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            for k in 0..3 {
                acc[k] += z[k];
            }
        }
        let total: f64 = alpha.iter().sum();
        for k in 0..3 {
            let m = acc[k] / n as f64;
            assert!((m - alpha[k] / total).abs() < tol, "alpha {alpha:?} k {k}: {m}");
        }
    }
}

#[test]
fn gamma_moments_within_three_standard_errors() {
    let mut rng = RngStream::new(12);
    for k in [4.2, 0.3] {
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| sample_gamma(k, &mut rng).unwrap()).collect();
        let (m, _) = mean_and_se(&xs);
        let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n as f64 - 1.0);
        // Gamma(k, 1): mean = var = k, fourth central moment k^2 (3 + 6/k)
        let se_mean = (k / n as f64).sqrt();
        let se_var = k * ((2.0 + 6.0 / k) / n as f64).sqrt();
        assert!((m - k).abs() < 3.0 * se_mean, "shape {k}: mean {m}");
        assert!((var - k).abs() < 3.0 * se_var, "shape {k}: var {var}");
    }
}

#[test]
fn log_pdf_integrates_to_one() {
    // E_{z ~ uniform simplex}[p(z)] / 2 = 1, since the uniform density is 2
    let mut rng = RngStream::new(13);
    for alpha in [[2.0, 3.0, 1.5], [1.0, 1.0, 4.0], [5.0, 5.0, 5.0]] {
        let xs: Vec<f64> = (0..200_000)
            .map(|_| {
                let z = sample_dirichlet(&[1.0, 1.0, 1.0], &mut rng).unwrap();
                dirichlet_log_pdf(&z, &alpha).unwrap().value.exp() / 2.0
            })
            .collect();
        let (m, se) = mean_and_se(&xs);
        assert!((m - 1.0).abs() < 3.0 * se, "alpha {alpha:?}: {m} +- {se}");
    }
}

/// `E_{z ~ Dir(beta)}[log q(z) - log p(z)]` by Monte Carlo.
fn kl_monte_carlo(beta: &[f64; 3], alpha: &[f64; 3], n: usize, rng: &mut RngStream) -> (f64, f64) {
    let xs: Vec<f64> = (0..n)
        .map(|_| {
            let z = sample_dirichlet(beta, rng).unwrap();
            dirichlet_log_pdf(&z, beta).unwrap().value - dirichlet_log_pdf(&z, alpha).unwrap().value
        })
        .collect();
    mean_and_se(&xs)
}

#[test]
fn kl_matches_monte_carlo_reference_pair() {
    let mut rng = RngStream::new(14);
    let (beta, alpha) = ([2.0, 1.0, 1.0], [1.0, 1.0, 1.0]);
    let kl = dirichlet_kl(&beta, &alpha).unwrap();
    let (m, se) = kl_monte_carlo(&beta, &alpha, 1_000_000, &mut rng);
    assert!(kl >= 0.0);
    assert!((kl - m).abs() < 3.0 * se, "closed {kl} mc {m} +- {se}");
    // hand value: log B(1,1,1)/B(2,1,1) + (psi(2) - psi(4)) = ln 3 - 5/6
    assert!((kl - (3f64.ln() - 5.0 / 6.0)).abs() < 1e-12);
}

#[test]
fn kl_is_nonnegative_and_zero_only_on_the_diagonal() {
    let mut rng = RngStream::new(15);
    let draw = |rng: &mut RngStream| [0; 3].map(|_| 0.05 + 9.95 * rng.open01());
    for _ in 0..1000 {
        let beta = draw(&mut rng);
        let alpha = draw(&mut rng);
        let kl = dirichlet_kl(&beta, &alpha).unwrap();
        assert!(kl > 0.0, "KL({beta:?} || {alpha:?}) = {kl}");
        assert!(dirichlet_kl(&beta, &beta).unwrap().abs() < 1e-10);
    }
    assert_eq!(dirichlet_kl(&[4.0, 1.0, 1.0], &[4.0, 1.0, 1.0]).unwrap(), 0.0);
}

#[test]
fn reparam_first_component_matches_analytic() {
    // d/d beta_j of beta_1 / S = (delta_1j S - beta_1) / S^2
    let beta = [2.0, 2.0, 2.0];
    let s: f64 = beta.iter().sum();
    let want = [(s - beta[0]) / (s * s), -beta[0] / (s * s), -beta[0] / (s * s)];
    let est = reparam_grad_elbo(|_, z| z[0], beta, 100_000, &mut RngStream::new(16)).unwrap();
    for k in 0..3 {
        assert!(
            (est.mean[k] - want[k]).abs() < 3.0 * est.std_err[k],
            "k {k}: {} +- {} vs {}",
            est.mean[k],
            est.std_err[k],
            want[k]
        );
    }
}

#[test]
fn reparam_agrees_with_score_function_on_sum_of_squares() {
    let beta = [3.0, 2.0, 4.0];
    let n = 1_000_000;
    let rep = reparam_grad_elbo(
        |t, z| {
            let sq = z.map(|v| t.square(v));
            t.sum(&sq)
        },
        beta,
        n,
        &mut RngStream::new(17),
    )
    .unwrap();
    let sf = score_function_grad(|z| z.iter().map(|v| v * v).sum(), beta, n, &mut RngStream::new(18))
        .unwrap();
    // analytic: E[z_k^2] = b_k (b_k + 1) / (S (S + 1))
    let s: f64 = beta.iter().sum();
    let d = s * (s + 1.0);
    let q: f64 = beta.iter().map(|b| b * (b + 1.0)).sum();
    for k in 0..3 {
        let se = (rep.std_err[k].powi(2) + sf.std_err[k].powi(2)).sqrt();
        assert!(
            (rep.mean[k] - sf.mean[k]).abs() < 3.0 * se,
            "k {k}: reparam {} score {} se {se}",
            rep.mean[k],
            sf.mean[k]
        );
        let exact = (2.0 * beta[k] + 1.0) / d - q * (2.0 * s + 1.0) / (d * d);
        assert!((rep.mean[k] - exact).abs() < 3.0 * rep.std_err[k], "k {k}");
    }
}

#[test]
fn seeded_streams_are_bit_identical() {
    let draw = |seed| {
        let mut r = RngStream::new(seed);
        (0..100)
            .map(|_| sample_dirichlet(&[0.7, 2.0, 3.5], &mut r).unwrap())
            .collect::<Vec<_>>()
    };
    let (a, b) = (draw(5), draw(5));
    assert!(a.iter().zip(&b).all(|(x, y)| x.map(f64::to_bits) == y.map(f64::to_bits)));
    assert_ne!(a, draw(6));
}
