//! Stochastic variational inference: minibatches of words, scaled ELBO
//! gradients and Adam.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent in core on recent toolchains
use num_traits::Float;

use crate::error::{Error, Result};
use crate::lexicon::ScaleFamily;
use crate::model::{
    elbo_word_gradient, EmissionFamily, MlpHead, ModelState, ViewModel, WordGradient,
    WordObservation, DEFAULT_HIDDEN,
};
use crate::rng::RngStream;
use crate::N_CLASSES;

const INIT_TAG: u64 = 0x1417;
const SHUFFLE_TAG: u64 = 0x5_0000_0000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    /// Words per minibatch.
    pub batch_size: usize,
    pub epochs: u64,
    /// Monte Carlo samples per word ELBO.
    pub n_mc: usize,
    pub seed: u64,
    pub weight_init_scale: f64,
    pub hidden_dim: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 1e-2,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
            batch_size: 256,
            epochs: 50,
            n_mc: 1,
            seed: 0,
            weight_init_scale: 0.1,
            hidden_dim: DEFAULT_HIDDEN,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(format!("invalid {what}")));
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate");
        }
        if !(self.adam_beta1 > 0.0 && self.adam_beta1 < 1.0) {
            return bad("adam_beta1");
        }
        if !(self.adam_beta2 > 0.0 && self.adam_beta2 < 1.0) {
            return bad("adam_beta2");
        }
        if !(self.adam_eps > 0.0) {
            return bad("adam_eps");
        }
        if self.batch_size == 0 {
            return bad("batch_size");
        }
        if self.n_mc == 0 {
            return bad("n_mc");
        }
        if !(self.weight_init_scale >= 0.0 && self.weight_init_scale.is_finite()) {
            return bad("weight_init_scale");
        }
        if self.hidden_dim == 0 {
            return bad("hidden_dim");
        }
        Ok(())
    }
}

/// First/second moment estimates per parameter.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub step: u64,
}

impl AdamState {
    pub fn new(n_params: usize) -> Self {
        AdamState {
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            step: 0,
        }
    }
}

/// One bias-corrected Adam update minimizing a loss with gradient `grads`.
pub fn adam_step(
    params: &mut [f64],
    grads: &[f64],
    state: &mut AdamState,
    config: &TrainConfig,
) -> Result<()> {
    if params.len() != grads.len() || state.m.len() != params.len() || state.v.len() != params.len()
    {
        return Err(Error::Usage(format!(
            "adam shapes differ: params {}, grads {}, moments {}/{}",
            params.len(),
            grads.len(),
            state.m.len(),
            state.v.len()
        )));
    }
    state.step += 1;
    let (b1, b2) = (config.adam_beta1, config.adam_beta2);
    let t = state.step as i32;
    let c1 = 1.0 - b1.powi(t);
    let c2 = 1.0 - b2.powi(t);
    for i in 0..params.len() {
        let g = grads[i];
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * g;
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g;
        let m_hat = state.m[i] / c1;
        let v_hat = state.v[i] / c2;
        params[i] -= config.learning_rate * m_hat / (v_hat.sqrt() + config.adam_eps);
    }
    Ok(())
}

/// One encoder and one decoder head per view, weights `~ U(-s, s)` with
/// `s = weight_init_scale / sqrt(fan_in)`, zero biases.
pub fn init_model<'a>(
    views: impl IntoIterator<Item = (&'a str, ScaleFamily)>,
    config: &TrainConfig,
    rng: &mut RngStream,
) -> Result<ModelState> {
    config.validate()?;
    let h = config.hidden_dim;
    let s = config.weight_init_scale;
    let mut out = Vec::new();
    for (id, scale) in views {
        if out.iter().any(|v: &ViewModel| v.id == id) {
            return Err(Error::Config(format!("duplicate view id {id:?}")));
        }
        let emission = EmissionFamily::for_scale(scale);
        let encoder = MlpHead::init(scale.encoded_dim(), h, N_CLASSES, s, rng);
        let decoder = MlpHead::init(N_CLASSES, h, emission.rho_dim(), s, rng);
        out.push(ViewModel {
            id: id.to_string(),
            scale,
            emission,
            encoder,
            decoder,
        });
    }
    if out.is_empty() {
        return Err(Error::Config("at least one view is required".into()));
    }
    let mut state = ModelState {
        views: out,
        optimizer: AdamState::default(),
        epoch: 0,
    };
    state.optimizer = AdamState::new(state.n_params());
    Ok(state)
}

/// [`init_model`] with the stream derived from `config.seed`.
pub fn init_model_seeded<'a>(
    views: impl IntoIterator<Item = (&'a str, ScaleFamily)>,
    config: &TrainConfig,
) -> Result<ModelState> {
    init_model(views, config, &mut RngStream::derive(config.seed, INIT_TAG))
}

/// Noise stream for word `index` in `epoch`; independent of batch layout
/// and evaluation order.
pub fn word_stream(seed: u64, epoch: u64, index: usize) -> RngStream {
    RngStream::derive(seed, (epoch << 32) ^ index as u64)
}

/// ELBO gradient of observation `index` during `epoch`.
pub fn word_gradient(
    state: &ModelState,
    obs: &WordObservation,
    index: usize,
    epoch: u64,
    config: &TrainConfig,
) -> Result<WordGradient> {
    let mut rng = word_stream(config.seed, epoch, index);
    elbo_word_gradient(obs, state, config.n_mc, &mut rng)
}

/// Evaluates the words of a minibatch. Results come back in batch order so
/// the reduction is deterministic however they were computed.
pub trait BatchEvaluator {
    fn evaluate(
        &self,
        state: &ModelState,
        batch: &[(usize, &WordObservation)],
        epoch: u64,
        config: &TrainConfig,
    ) -> Vec<Result<WordGradient>>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl BatchEvaluator for Sequential {
    fn evaluate(
        &self,
        state: &ModelState,
        batch: &[(usize, &WordObservation)],
        epoch: u64,
        config: &TrainConfig,
    ) -> Vec<Result<WordGradient>> {
        batch
            .iter()
            .map(|&(i, obs)| word_gradient(state, obs, i, epoch, config))
            .collect()
    }
}

/// Mean per-word ELBO terms over one epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochLog {
    /// 1-based epoch number.
    pub epoch: u64,
    pub mean_elbo: f64,
    pub recon_term: f64,
    pub kl_term: f64,
    /// Standard error of `mean_elbo` across words.
    pub elbo_std_err: f64,
}

/// Scaled loss gradient of one minibatch: `-(|W| / |batch|) Σ ∇ elbo_w`.
/// Returns the gradient and the per-word results in batch order.
pub fn batch_gradient<E: BatchEvaluator>(
    state: &ModelState,
    observations: &[WordObservation],
    batch: &[usize],
    epoch: u64,
    config: &TrainConfig,
    executor: &E,
) -> Result<(Vec<f64>, Vec<WordGradient>)> {
    let items: Vec<(usize, &WordObservation)> =
        batch.iter().map(|&i| (i, &observations[i])).collect();
    let results = executor.evaluate(state, &items, epoch, config);
    let scale = -(observations.len() as f64) / batch.len() as f64;
    let mut grad = vec![0.0; state.n_params()];
    let mut words = Vec::with_capacity(results.len());
    for r in results {
        let wg = r?;
        for (off, g) in &wg.grad {
            for (acc, v) in grad[*off..off + g.len()].iter_mut().zip(g) {
                *acc += scale * v;
            }
        }
        words.push(wg);
    }
    Ok((grad, words))
}

fn shuffled(n: usize, seed: u64, epoch: u64) -> Vec<usize> {
    let mut rng = RngStream::derive(seed, SHUFFLE_TAG + epoch);
    let mut idx: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.below(i + 1);
        idx.swap(i, j);
    }
    idx
}

/// Continue training `state` from its recorded epoch up to `config.epochs`.
/// `on_epoch` sees each epoch's log and the state after it.
pub fn fit<E: BatchEvaluator>(
    state: &mut ModelState,
    observations: &[WordObservation],
    config: &TrainConfig,
    executor: &E,
    mut on_epoch: impl FnMut(&EpochLog, &ModelState),
) -> Result<Vec<EpochLog>> {
    config.validate()?;
    if observations.is_empty() {
        return Err(Error::Config("no observations to train on".into()));
    }
    if state.optimizer.m.len() != state.n_params() {
        state.optimizer = AdamState::new(state.n_params());
    }
    let mut logs = Vec::new();
    while state.epoch < config.epochs {
        let epoch = state.epoch;
        let order = shuffled(observations.len(), config.seed, epoch);
        let (mut s_elbo, mut s_sq, mut s_recon, mut s_kl) = (0.0, 0.0, 0.0, 0.0);
        for batch in order.chunks(config.batch_size) {
            let (grad, words) =
                batch_gradient(state, observations, batch, epoch, config, executor)?;
            for w in &words {
                s_elbo += w.elbo;
                s_sq += w.elbo * w.elbo;
                s_recon += w.recon;
                s_kl += w.kl;
            }
            let mut params = state.gather();
            adam_step(&mut params, &grad, &mut state.optimizer, config)?;
            state.scatter(&params)?;
        }
        if !state.all_finite() {
            return Err(Error::Numeric(format!(
                "non-finite parameters after epoch {}",
                epoch + 1
            )));
        }
        state.epoch += 1;
        let n = observations.len() as f64;
        let mean = s_elbo / n;
        let var = if n > 1.0 {
            ((s_sq - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        let log = EpochLog {
            epoch: state.epoch,
            mean_elbo: mean,
            recon_term: s_recon / n,
            kl_term: s_kl / n,
            elbo_std_err: (var / n).sqrt(),
        };
        on_epoch(&log, state);
        logs.push(log);
    }
    Ok(logs)
}

/// Initialize from the views present in `observations` and train
/// sequentially.
pub fn train<'a>(
    views: impl IntoIterator<Item = (&'a str, ScaleFamily)>,
    observations: &[WordObservation],
    config: &TrainConfig,
) -> Result<(ModelState, Vec<EpochLog>)> {
    let mut state = init_model_seeded(views, config)?;
    let logs = fit(&mut state, observations, config, &Sequential, |_, _| {})?;
    Ok((state, logs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_adam_step_is_lr_sign() {
        let cfg = TrainConfig::default();
        for g in [3.0, -0.2, 1e-3] {
            let mut p = [0.0];
            let mut st = AdamState::new(1);
            adam_step(&mut p, &[g], &mut st, &cfg).unwrap();
            // m = 0.1 g, v = 0.001 g^2 -> m_hat = g, v_hat = g^2
            let want = -cfg.learning_rate * g / (g.abs() + cfg.adam_eps);
            assert!((p[0] - want).abs() < 1e-15, "g={g} p={} want={want}", p[0]);
            assert!((st.m[0] - 0.1 * g).abs() < 1e-15);
            assert!((st.v[0] - 0.001 * g * g).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_gradient_leaves_params() {
        let cfg = TrainConfig::default();
        let mut p = [0.7, -1.2];
        let mut st = AdamState::new(2);
        adam_step(&mut p, &[0.0, 0.0], &mut st, &cfg).unwrap();
        assert_eq!(p, [0.7, -1.2]);
    }

    #[test]
    fn adam_shape_mismatch() {
        let cfg = TrainConfig::default();
        let mut st = AdamState::new(2);
        assert!(matches!(
            adam_step(&mut [0.0; 2], &[0.0; 3], &mut st, &cfg),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        let mut c = TrainConfig::default();
        c.adam_beta1 = 1.0;
        assert!(c.validate().is_err());
        let mut c = TrainConfig::default();
        c.batch_size = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn shuffle_is_permutation() {
        let mut s = shuffled(100, 3, 2);
        assert_ne!(s, (0..100).collect::<Vec<_>>());
        s.sort_unstable();
        assert_eq!(s, (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn init_dims_per_family() {
        let cfg = TrainConfig::default();
        let views = [
            ("swn", ScaleFamily::PairContinuous),
            ("vader", ScaleFamily::VADER),
            ("senticnet", ScaleFamily::SignedContinuous),
            ("mpqa", ScaleFamily::Binary),
            ("huliu", ScaleFamily::Binary),
            ("gi", ScaleFamily::Binary),
        ];
        let st = init_model_seeded(views, &cfg).unwrap();
        let enc: Vec<usize> = st.views.iter().map(|v| v.encoder.input_dim()).collect();
        let dec: Vec<usize> = st.views.iter().map(|v| v.decoder.output_dim()).collect();
        assert_eq!(enc, [2, 10, 1, 1, 1, 1]);
        assert_eq!(dec, [2, 9, 2, 1, 1, 1]);
        assert!(st.views.iter().all(|v| v.encoder.hidden_dim() == 32));
        assert_eq!(st, init_model_seeded(views, &cfg).unwrap());
    }
}
