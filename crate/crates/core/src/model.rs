//! Encoder/decoder heads, emission families, posterior construction and the
//! per-word ELBO.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // inherent in core on recent toolchains
use num_traits::Float;

use crate::dist::{dirichlet_mean, gamma_draw};
use crate::error::{Error, Result};
use crate::lexicon::{
    compute_prior, CoarseThresholds, CombinedVocabulary, DirichletPrior,
    LexiconView, PolarityLabel, ScaleFamily,
};
use crate::reparam::dirichlet_rsample;
use crate::rng::RngStream;
use crate::tape::{sigmoid, softplus, Tape, Var};
use crate::train::AdamState;
use crate::N_CLASSES;

pub const DEFAULT_HIDDEN: usize = 32;
/// Fixed variance of the pair-continuous Gaussian emission.
pub const PAIR_VARIANCE: f64 = 0.01;
/// Variance floor of the mean/variance Gaussian emission.
pub const VARIANCE_FLOOR: f64 = 0.01;

/// Two affine layers with a tanh hidden layer. Parameters are stored flat:
/// `w1` (hidden x input, row major), `b1`, `w2` (output x hidden), `b2`.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpHead {
    input_dim: usize,
    hidden_dim: usize,
    output_dim: usize,
    params: Vec<f64>,
}

impl MlpHead {
    pub fn n_params_for(input_dim: usize, hidden_dim: usize, output_dim: usize) -> usize {
        hidden_dim * input_dim + hidden_dim + output_dim * hidden_dim + output_dim
    }

    pub fn zeros(input_dim: usize, hidden_dim: usize, output_dim: usize) -> Self {
        MlpHead {
            input_dim,
            hidden_dim,
            output_dim,
            params: vec![0.0; Self::n_params_for(input_dim, hidden_dim, output_dim)],
        }
    }

    /// Weights `~ U(-s, s)` with `s = scale / sqrt(fan_in)`; zero biases.
    pub fn init(
        input_dim: usize,
        hidden_dim: usize,
        output_dim: usize,
        scale: f64,
        rng: &mut RngStream,
    ) -> Self {
        let mut head = Self::zeros(input_dim, hidden_dim, output_dim);
        let s1 = scale / (input_dim as f64).sqrt();
        let s2 = scale / (hidden_dim as f64).sqrt();
        let (w1, rest) = head.params.split_at_mut(hidden_dim * input_dim);
        for w in w1 {
            *w = s1 * (2.0 * rng.open01() - 1.0);
        }
        let w2 = &mut rest[hidden_dim..hidden_dim + output_dim * hidden_dim];
        for w in w2 {
            *w = s2 * (2.0 * rng.open01() - 1.0);
        }
        head
    }

    pub fn from_params(
        input_dim: usize,
        hidden_dim: usize,
        output_dim: usize,
        params: Vec<f64>,
    ) -> Result<Self> {
        let want = Self::n_params_for(input_dim, hidden_dim, output_dim);
        if params.len() != want {
            return Err(Error::Config(format!(
                "head {input_dim}x{hidden_dim}x{output_dim} needs {want} parameters, got {}",
                params.len()
            )));
        }
        Ok(MlpHead {
            input_dim,
            hidden_dim,
            output_dim,
            params,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn hidden_dim(&self) -> usize {
        self.hidden_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    fn check_input(&self, len: usize) -> Result<()> {
        if len == self.input_dim {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "head expects {} inputs, got {len}",
                self.input_dim
            )))
        }
    }

    fn split(&self) -> (&[f64], &[f64], &[f64], &[f64]) {
        let (w1, rest) = self.params.split_at(self.hidden_dim * self.input_dim);
        let (b1, rest) = rest.split_at(self.hidden_dim);
        let (w2, b2) = rest.split_at(self.output_dim * self.hidden_dim);
        (w1, b1, w2, b2)
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x.len())?;
        let (w1, b1, w2, b2) = self.split();
        let hidden: Vec<f64> = (0..self.hidden_dim)
            .map(|j| {
                let row = &w1[j * self.input_dim..(j + 1) * self.input_dim];
                (b1[j] + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()).tanh()
            })
            .collect();
        Ok((0..self.output_dim)
            .map(|k| {
                let row = &w2[k * self.hidden_dim..(k + 1) * self.hidden_dim];
                b2[k] + row.iter().zip(&hidden).map(|(w, h)| w * h).sum::<f64>()
            })
            .collect())
    }

    /// Forward pass on the tape with parameters bound to `params` (same
    /// flat layout as [`MlpHead::params`]).
    pub fn forward_tape(&self, tape: &mut Tape, params: &[Var], x: &[Var]) -> Result<Vec<Var>> {
        self.check_input(x.len())?;
        let (i, h, o) = (self.input_dim, self.hidden_dim, self.output_dim);
        let (w1, rest) = params.split_at(h * i);
        let (b1, rest) = rest.split_at(h);
        let (w2, b2) = rest.split_at(o * h);
        let hidden: Vec<Var> = (0..h)
            .map(|j| {
                let pre = tape.affine(&w1[j * i..(j + 1) * i], x, b1[j]);
                tape.tanh(pre)
            })
            .collect();
        Ok((0..o)
            .map(|k| tape.affine(&w2[k * h..(k + 1) * h], &hidden, b2[k]))
            .collect())
    }
}

/// Per-lexicon emission distribution `P_d(x | rho)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmissionFamily {
    /// Two Gaussians with sigmoid means and variance 0.01.
    PairGaussianFixedVar,
    /// `n_raters` categoricals over `n_points` outcomes sharing one set of logits.
    TenCategorical { n_raters: u32, n_points: u32 },
    /// Bernoulli with `p = sigmoid(raw)`.
    Bernoulli,
    /// Gaussian with mean `tanh(raw_1)` and variance `softplus(raw_2) + 0.01`.
    GaussianMeanVar,
}

impl EmissionFamily {
    pub fn for_scale(scale: ScaleFamily) -> Self {
        match scale {
            ScaleFamily::PairContinuous => EmissionFamily::PairGaussianFixedVar,
            ScaleFamily::RaterHistogram { n_raters, n_points } => {
                EmissionFamily::TenCategorical { n_raters, n_points }
            }
            ScaleFamily::Binary => EmissionFamily::Bernoulli,
            ScaleFamily::SignedContinuous => EmissionFamily::GaussianMeanVar,
        }
    }

    pub fn scale(&self) -> ScaleFamily {
        match *self {
            EmissionFamily::PairGaussianFixedVar => ScaleFamily::PairContinuous,
            EmissionFamily::TenCategorical { n_raters, n_points } => {
                ScaleFamily::RaterHistogram { n_raters, n_points }
            }
            EmissionFamily::Bernoulli => ScaleFamily::Binary,
            EmissionFamily::GaussianMeanVar => ScaleFamily::SignedContinuous,
        }
    }

    /// Dimension of the decoder output `rho`.
    pub fn rho_dim(&self) -> usize {
        match self {
            EmissionFamily::PairGaussianFixedVar => 2,
            EmissionFamily::TenCategorical { n_points, .. } => *n_points as usize,
            EmissionFamily::Bernoulli => 1,
            EmissionFamily::GaussianMeanVar => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EmissionFamily::PairGaussianFixedVar => "pair-gaussian-fixed-var",
            EmissionFamily::TenCategorical { .. } => "ten-categorical",
            EmissionFamily::Bernoulli => "bernoulli",
            EmissionFamily::GaussianMeanVar => "gaussian-mean-var",
        }
    }

    /// Map raw decoder outputs to distribution parameters: means for the
    /// pair Gaussian, probabilities for the categorical, `p` for the
    /// Bernoulli, `(mean, variance)` for the mean/variance Gaussian.
    pub fn link(&self, raw: &[f64]) -> Result<Vec<f64>> {
        if raw.len() != self.rho_dim() {
            return Err(Error::Config(format!(
                "{} expects {} decoder outputs, got {}",
                self.name(),
                self.rho_dim(),
                raw.len()
            )));
        }
        Ok(match self {
            EmissionFamily::PairGaussianFixedVar | EmissionFamily::Bernoulli => {
                raw.iter().map(|&r| sigmoid(r)).collect()
            }
            EmissionFamily::TenCategorical { .. } => {
                let m = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let e: Vec<f64> = raw.iter().map(|r| (r - m).exp()).collect();
                let s: f64 = e.iter().sum();
                e.into_iter().map(|v| v / s).collect()
            }
            EmissionFamily::GaussianMeanVar => {
                vec![raw[0].tanh(), softplus(raw[1]) + VARIANCE_FLOOR]
            }
        })
    }

    fn check_label(&self, label: &PolarityLabel) -> Result<()> {
        if label.family() == self.scale() {
            Ok(())
        } else {
            Err(Error::Usage(format!(
                "{} cannot score a {} label",
                self.name(),
                label.family()
            )))
        }
    }
}

fn gaussian_log_density(tape: &mut Tape, x: f64, mean: Var, var: Var) -> Var {
    // -0.5 ln(2π var) - (x - mean)^2 / (2 var)
    let neg_x = tape.leaf(-x);
    let diff = tape.add(mean, neg_x);
    let sq = tape.square(diff);
    let two_var = tape.mul_const(var, 2.0);
    let quad = tape.div(sq, two_var);
    let ln_var = tape.ln(var);
    let norm = tape.mul_const(ln_var, -0.5);
    let norm = tape.add_const(norm, -0.5 * (2.0 * PI).ln());
    tape.sub(norm, quad)
}

/// `log P_d(label | raw)` built on the tape from raw decoder outputs.
pub fn emission_log_likelihood_tape(
    tape: &mut Tape,
    label: &PolarityLabel,
    raw: &[Var],
    family: &EmissionFamily,
) -> Result<Var> {
    family.check_label(label)?;
    if raw.len() != family.rho_dim() {
        return Err(Error::Config(format!(
            "{} expects {} decoder outputs, got {}",
            family.name(),
            family.rho_dim(),
            raw.len()
        )));
    }
    let ll = match (family, label) {
        (EmissionFamily::PairGaussianFixedVar, PolarityLabel::Pair(p, n)) => {
            let var = tape.leaf(PAIR_VARIANCE);
            let mut terms = Vec::with_capacity(2);
            for (x, &r) in [*p, *n].into_iter().zip(raw) {
                let mean = tape.sigmoid(r);
                terms.push(gaussian_log_density(tape, x, mean, var));
            }
            tape.sum(&terms)
        }
        (EmissionFamily::TenCategorical { .. }, PolarityLabel::Raters { ratings, .. }) => {
            let logp = tape.log_softmax(raw);
            let mut counts = vec![0u32; raw.len()];
            for &r in ratings {
                counts[r as usize] += 1;
            }
            let terms: Vec<Var> = counts
                .iter()
                .zip(&logp)
                .filter(|(c, _)| **c > 0)
                .map(|(&c, &lp)| tape.mul_const(lp, f64::from(c)))
                .collect();
            tape.sum(&terms)
        }
        (EmissionFamily::Bernoulli, PolarityLabel::Binary(x)) => {
            if *x == 1 {
                tape.log_sigmoid(raw[0])
            } else {
                let neg = tape.neg(raw[0]);
                tape.log_sigmoid(neg)
            }
        }
        (EmissionFamily::GaussianMeanVar, PolarityLabel::Signed(x)) => {
            let mean = tape.tanh(raw[0]);
            let sp = tape.softplus(raw[1]);
            let var = tape.add_const(sp, VARIANCE_FLOOR);
            gaussian_log_density(tape, *x, mean, var)
        }
        _ => unreachable!("label family checked above"),
    };
    Ok(ll)
}

/// `log P_d(label | raw)` for raw decoder outputs.
pub fn emission_log_likelihood(
    label: &PolarityLabel,
    raw: &[f64],
    family: &EmissionFamily,
) -> Result<f64> {
    let mut tape = Tape::with_capacity(64);
    let vars = tape.leaves(raw);
    let ll = emission_log_likelihood_tape(&mut tape, label, &vars, family)?;
    Ok(tape.value(ll))
}

fn softmax3(raw: &[f64]) -> [f64; N_CLASSES] {
    let m = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut out = [0.0; N_CLASSES];
    for (o, r) in out.iter_mut().zip(raw) {
        *o = (r - m).exp();
    }
    let s: f64 = out.iter().sum();
    out.map(|v| v / s)
}

/// `omega = softmax(g(x; phi))`: one pseudocount split across the classes.
pub fn encode(label: &PolarityLabel, head: &MlpHead) -> Result<[f64; N_CLASSES]> {
    if head.output_dim() != N_CLASSES {
        return Err(Error::Config(format!(
            "encoder must have {N_CLASSES} outputs, has {}",
            head.output_dim()
        )));
    }
    Ok(softmax3(&head.forward(&label.encoded())?))
}

/// Raw decoder output `f(z; theta)`.
pub fn decode_raw(z: &[f64; N_CLASSES], head: &MlpHead) -> Result<Vec<f64>> {
    head.forward(z)
}

/// Decoder output mapped through the family's link functions.
pub fn decode(z: &[f64; N_CLASSES], head: &MlpHead, family: &EmissionFamily) -> Result<Vec<f64>> {
    if head.input_dim() != N_CLASSES || head.output_dim() != family.rho_dim() {
        return Err(Error::Config(format!(
            "decoder {}->{} does not fit {} (3->{})",
            head.input_dim(),
            head.output_dim(),
            family.name(),
            family.rho_dim()
        )));
    }
    family.link(&head.forward(z)?)
}

/// Variational posterior `Dir(beta)` for one word.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatentPosterior {
    pub beta: [f64; N_CLASSES],
    pub mean: [f64; N_CLASSES],
}

impl LatentPosterior {
    pub fn from_beta(beta: [f64; N_CLASSES]) -> Self {
        LatentPosterior {
            beta,
            mean: dirichlet_mean(&beta),
        }
    }

    /// `beta = 1 + Σ omega_d`.
    pub fn from_omegas<'a>(omegas: impl IntoIterator<Item = &'a [f64; N_CLASSES]>) -> Self {
        let mut beta = [1.0; N_CLASSES];
        for o in omegas {
            for k in 0..N_CLASSES {
                beta[k] += o[k];
            }
        }
        Self::from_beta(beta)
    }
}

/// A word with its labels in every view that contains it.
#[derive(Debug, Clone, PartialEq)]
pub struct WordObservation {
    pub word: String,
    /// `(view id, label)` pairs, sorted by view id.
    pub labels: Vec<(String, PolarityLabel)>,
    pub prior: DirichletPrior,
}

impl WordObservation {
    pub fn n_views(&self) -> usize {
        self.labels.len()
    }
}

/// One observation per vocabulary word, in vocabulary order.
pub fn build_observations(
    views: &[LexiconView],
    vocab: &CombinedVocabulary,
    thresholds: &CoarseThresholds,
) -> Vec<WordObservation> {
    let by_id: BTreeMap<&str, &LexiconView> = views.iter().map(|v| (v.id(), v)).collect();
    vocab
        .words()
        .filter_map(|w| {
            let labels: Vec<(String, PolarityLabel)> = vocab
                .membership(w)?
                .iter()
                .filter_map(|id| {
                    let label = by_id.get(id.as_str())?.get(w)?;
                    Some((id.clone(), label.clone()))
                })
                .collect();
            if labels.is_empty() {
                return None;
            }
            Some(WordObservation {
                word: w.to_string(),
                labels,
                prior: compute_prior(w, views, vocab, thresholds),
            })
        })
        .collect()
}

/// Heads and emission family for one lexicon.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewModel {
    pub id: String,
    pub scale: ScaleFamily,
    pub emission: EmissionFamily,
    pub encoder: MlpHead,
    pub decoder: MlpHead,
}

/// All trainable weights plus optimizer state.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelState {
    pub views: Vec<ViewModel>,
    pub optimizer: AdamState,
    /// Completed epochs.
    pub epoch: u64,
}

impl ModelState {
    pub fn view_index(&self, id: &str) -> Option<usize> {
        self.views.iter().position(|v| v.id == id)
    }

    pub fn view(&self, id: &str) -> Option<&ViewModel> {
        self.views.iter().find(|v| v.id == id)
    }

    /// Flat offsets of each view's (encoder, decoder) parameters.
    pub fn offsets(&self) -> Vec<(usize, usize)> {
        let mut off = 0;
        self.views
            .iter()
            .map(|v| {
                let enc = off;
                off += v.encoder.n_params();
                let dec = off;
                off += v.decoder.n_params();
                (enc, dec)
            })
            .collect()
    }

    pub fn n_params(&self) -> usize {
        self.views
            .iter()
            .map(|v| v.encoder.n_params() + v.decoder.n_params())
            .sum()
    }

    pub fn gather(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_params());
        for v in &self.views {
            out.extend_from_slice(v.encoder.params());
            out.extend_from_slice(v.decoder.params());
        }
        out
    }

    pub fn scatter(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.n_params() {
            return Err(Error::Usage(format!(
                "expected {} parameters, got {}",
                self.n_params(),
                flat.len()
            )));
        }
        let mut off = 0;
        for v in &mut self.views {
            for head in [&mut v.encoder, &mut v.decoder] {
                let n = head.n_params();
                head.params_mut().copy_from_slice(&flat[off..off + n]);
                off += n;
            }
        }
        Ok(())
    }

    pub fn all_finite(&self) -> bool {
        self.views.iter().all(|v| {
            v.encoder.params().iter().all(|p| p.is_finite())
                && v.decoder.params().iter().all(|p| p.is_finite())
        })
    }
}

/// Posterior from the encoders of the views a word was observed in.
pub fn posterior_params(obs: &WordObservation, state: &ModelState) -> Result<LatentPosterior> {
    let mut omegas = Vec::with_capacity(obs.labels.len());
    for (id, label) in &obs.labels {
        let view = state
            .view(id)
            .ok_or_else(|| Error::Config(format!("no encoder for view {id:?}")))?;
        omegas.push(encode(label, &view.encoder)?);
    }
    Ok(LatentPosterior::from_omegas(&omegas))
}

/// Parameter leaves of the heads used on one tape, created on first use.
#[derive(Debug, Default)]
pub struct TapeParams {
    /// `(flat offset, leaves)` per bound head.
    bound: BTreeMap<usize, Vec<Var>>,
}

impl TapeParams {
    pub fn new() -> Self {
        Self::default()
    }

    fn bind(&mut self, tape: &mut Tape, offset: usize, head: &MlpHead) -> Vec<Var> {
        self.bound
            .entry(offset)
            .or_insert_with(|| tape.leaves(head.params()))
            .clone()
    }

    /// Add `scale * adjoint` of every bound leaf into a flat gradient.
    pub fn accumulate(&self, adjoints: &[f64], scale: f64, grad: &mut [f64]) {
        for (&off, leaves) in &self.bound {
            for (g, v) in grad[off..off + leaves.len()].iter_mut().zip(leaves) {
                *g += scale * adjoints[v.index()];
            }
        }
    }

    /// Sparse gradient: `(offset, values)` per bound head.
    pub fn extract(&self, adjoints: &[f64], scale: f64) -> Vec<(usize, Vec<f64>)> {
        self.bound
            .iter()
            .map(|(&off, leaves)| (off, leaves.iter().map(|v| scale * adjoints[v.index()]).collect()))
            .collect()
    }
}

/// ELBO pieces for one word: `elbo = recon - kl`.
#[derive(Debug, Clone, Copy)]
pub struct ElboTerms {
    pub elbo: Var,
    pub recon: Var,
    pub kl: Var,
}

/// Closed-form `KL(Dir(beta) || Dir(alpha))` on the tape, `alpha` constant.
pub fn dirichlet_kl_tape(tape: &mut Tape, beta: [Var; N_CLASSES], alpha: &[f64; N_CLASSES]) -> Var {
    let b_sum = tape.sum(&beta);
    let a_sum: f64 = alpha.iter().sum();
    let psi_sum = tape.digamma(b_sum);
    let lg_sum = tape.lgamma(b_sum);
    let mut constant = -crate::special::ln_gamma(a_sum);
    let mut terms = vec![lg_sum];
    for (&b, &a) in beta.iter().zip(alpha) {
        constant += crate::special::ln_gamma(a);
        let lg = tape.lgamma(b);
        terms.push(tape.neg(lg));
        let psi = tape.digamma(b);
        let dpsi = tape.sub(psi, psi_sum);
        let gap = tape.add_const(b, -a);
        terms.push(tape.mul(gap, dpsi));
    }
    let s = tape.sum(&terms);
    tape.add_const(s, constant)
}

/// Per-word ELBO on the tape: `n_mc` reparameterized samples for the
/// reconstruction term, closed-form KL to the word's prior.
pub fn elbo_word(
    tape: &mut Tape,
    params: &mut TapeParams,
    obs: &WordObservation,
    state: &ModelState,
    n_mc: usize,
    rng: &mut RngStream,
) -> Result<ElboTerms> {
    if n_mc == 0 {
        return Err(Error::Config("n_mc must be at least 1".into()));
    }
    if obs.labels.is_empty() {
        return Err(Error::Usage(format!("word {:?} has no observations", obs.word)));
    }
    let offsets = state.offsets();
    let mut resolved = Vec::with_capacity(obs.labels.len());
    for (id, label) in &obs.labels {
        let idx = state
            .view_index(id)
            .ok_or_else(|| Error::Config(format!("no heads for view {id:?}")))?;
        resolved.push((idx, label));
    }

    let mut omegas = Vec::with_capacity(resolved.len());
    for &(idx, label) in &resolved {
        let view = &state.views[idx];
        let p = params.bind(tape, offsets[idx].0, &view.encoder);
        let x = tape.leaves(&label.encoded());
        let logits = view.encoder.forward_tape(tape, &p, &x)?;
        omegas.push(tape.softmax(&logits));
    }
    let beta: [Var; N_CLASSES] = core::array::from_fn(|k| {
        let parts: Vec<Var> = omegas.iter().map(|o| o[k]).collect();
        let s = tape.sum(&parts);
        tape.add_const(s, 1.0)
    });

    let mut recon_terms = Vec::with_capacity(n_mc * resolved.len());
    for _ in 0..n_mc {
        let z = dirichlet_rsample(tape, beta, rng);
        for &(idx, label) in &resolved {
            let view = &state.views[idx];
            let p = params.bind(tape, offsets[idx].1, &view.decoder);
            let raw = view.decoder.forward_tape(tape, &p, &z)?;
            let ll = emission_log_likelihood_tape(tape, label, &raw, &view.emission)?;
            if !tape.value(ll).is_finite() {
                return Err(Error::Numeric(format!(
                    "non-finite log-likelihood for word {:?} in view {:?}",
                    obs.word, view.id
                )));
            }
            recon_terms.push(ll);
        }
    }
    let recon_sum = tape.sum(&recon_terms);
    let recon = tape.mul_const(recon_sum, 1.0 / n_mc as f64);
    let kl = dirichlet_kl_tape(tape, beta, &obs.prior.alpha);
    let elbo = tape.sub(recon, kl);
    if !tape.value(elbo).is_finite() {
        return Err(Error::Numeric(format!(
            "non-finite ELBO for word {:?} (kl = {})",
            obs.word,
            tape.value(kl)
        )));
    }
    Ok(ElboTerms { elbo, recon, kl })
}

/// Values and parameter gradient of one word's ELBO.
#[derive(Debug, Clone)]
pub struct WordGradient {
    pub elbo: f64,
    pub recon: f64,
    pub kl: f64,
    /// `(flat offset, d elbo / d params)` per head the word touches.
    pub grad: Vec<(usize, Vec<f64>)>,
}

pub fn elbo_word_gradient(
    obs: &WordObservation,
    state: &ModelState,
    n_mc: usize,
    rng: &mut RngStream,
) -> Result<WordGradient> {
    let mut tape = Tape::with_capacity(8192);
    let mut params = TapeParams::new();
    let terms = elbo_word(&mut tape, &mut params, obs, state, n_mc, rng)?;
    let adj = tape.grad(terms.elbo)?;
    Ok(WordGradient {
        elbo: tape.value(terms.elbo),
        recon: tape.value(terms.recon),
        kl: tape.value(terms.kl),
        grad: params.extract(&adj, 1.0),
    })
}

/// Draw `z ~ Dir(beta)` without a tape (for synthetic data and diagnostics).
pub fn sample_latent(beta: &[f64; N_CLASSES], rng: &mut RngStream) -> [f64; N_CLASSES] {
    let g = beta.map(|b| gamma_draw(b, rng));
    let s: f64 = g.iter().sum();
    g.map(|v| v / s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_head_encodes_uniform() {
        let head = MlpHead::zeros(1, DEFAULT_HIDDEN, 3);
        let w = encode(&PolarityLabel::Signed(0.65), &head).unwrap();
        for v in w {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn encode_dimension_mismatch() {
        let head = MlpHead::zeros(2, DEFAULT_HIDDEN, 3);
        assert!(matches!(
            encode(&PolarityLabel::Signed(0.1), &head),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn posterior_from_two_omegas() {
        let p = LatentPosterior::from_omegas(&[[0.7, 0.2, 0.1], [0.6, 0.3, 0.1]]);
        let want = [2.3, 1.5, 1.2];
        for k in 0..3 {
            assert!((p.beta[k] - want[k]).abs() < 1e-12);
        }
        let want_mean = [0.46, 0.30, 0.24];
        for k in 0..3 {
            assert!((p.mean[k] - want_mean[k]).abs() < 1e-12);
        }
        let m = LatentPosterior::from_beta([2.0, 1.0, 1.0]).mean;
        assert_eq!(m, [0.5, 0.25, 0.25]);
    }

    #[test]
    fn link_functions_at_zero() {
        let pair = EmissionFamily::PairGaussianFixedVar.link(&[0.0, 0.0]).unwrap();
        assert_eq!(pair, vec![0.5, 0.5]);
        let mv = EmissionFamily::GaussianMeanVar.link(&[0.0, 0.0]).unwrap();
        assert_eq!(mv[0], 0.0);
        assert!((mv[1] - (2f64.ln() + 0.01)).abs() < 1e-15);
    }

    #[test]
    fn decode_zero_weights_is_link_of_bias() {
        let mut head = MlpHead::zeros(3, DEFAULT_HIDDEN, 2);
        let n = head.n_params();
        head.params_mut()[n - 2] = 0.4;
        head.params_mut()[n - 1] = -1.0;
        let rho = decode(&[0.2, 0.3, 0.5], &head, &EmissionFamily::GaussianMeanVar).unwrap();
        assert!((rho[0] - 0.4f64.tanh()).abs() < 1e-15);
        assert!((rho[1] - (softplus(-1.0) + 0.01)).abs() < 1e-15);
        assert!(decode(&[0.2, 0.3, 0.5], &head, &EmissionFamily::Bernoulli).is_err());
    }

    #[test]
    fn emission_hand_values() {
        let ll = emission_log_likelihood(&PolarityLabel::Binary(1), &[0.0], &EmissionFamily::Bernoulli)
            .unwrap();
        assert!((ll - 0.5f64.ln()).abs() < 1e-15);
        let ll = emission_log_likelihood(
            &PolarityLabel::Pair(0.5, 0.5),
            &[0.0, 0.0],
            &EmissionFamily::PairGaussianFixedVar,
        )
        .unwrap();
        assert!((ll - 2.0 * (-0.5 * (2.0 * PI * 0.01).ln())).abs() < 1e-12);
        assert!((ll - 2.767_293_119_578_746).abs() < 1e-12);
        let vader = EmissionFamily::for_scale(ScaleFamily::VADER);
        let label = PolarityLabel::Raters {
            n_points: 9,
            ratings: vec![0, 1, 2, 3, 4, 5, 6, 7, 8, 8],
        };
        let ll = emission_log_likelihood(&label, &[0.0; 9], &vader).unwrap();
        assert!((ll - 10.0 * (1.0f64 / 9.0).ln()).abs() < 1e-12);
        assert!((ll + 21.972_245_773).abs() < 1e-8);
    }

    #[test]
    fn emission_family_mismatch() {
        let r = emission_log_likelihood(&PolarityLabel::Binary(1), &[0.0, 0.0], &EmissionFamily::GaussianMeanVar);
        assert!(matches!(r, Err(Error::Usage(_))));
    }

    #[test]
    fn extreme_raw_outputs_stay_finite() {
        for raw in [-800.0, -40.0, 0.0, 40.0, 800.0] {
            for (label, fam) in [
                (PolarityLabel::Binary(1), EmissionFamily::Bernoulli),
                (PolarityLabel::Binary(0), EmissionFamily::Bernoulli),
            ] {
                assert!(emission_log_likelihood(&label, &[raw], &fam).unwrap().is_finite());
            }
            let v = emission_log_likelihood(&PolarityLabel::Signed(-1.0), &[raw, raw], &EmissionFamily::GaussianMeanVar).unwrap();
            assert!(v.is_finite());
            let v = emission_log_likelihood(&PolarityLabel::Pair(1.0, 0.0), &[raw, -raw], &EmissionFamily::PairGaussianFixedVar).unwrap();
            assert!(v.is_finite());
        }
    }
}
