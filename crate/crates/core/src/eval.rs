//! Downstream evaluation: average-polarity text features, multinomial
//! logistic regression, accuracy and coverage.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)] // inherent in core on recent toolchains
use num_traits::Float;

use crate::error::{Error, Result};
use crate::lexicon::{LexiconView, PolarityLabel, ScaleFamily};
use crate::unified::UnifiedLexicon;

/// Lowercase and split on anything that is not alphanumeric.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCorpus {
    pub texts: Vec<Vec<String>>,
    pub labels: Vec<usize>,
    pub n_classes: usize,
}

impl LabeledCorpus {
    pub fn new(texts: Vec<Vec<String>>, labels: Vec<usize>, n_classes: usize) -> Result<Self> {
        if texts.is_empty() {
            return Err(Error::Config("corpus has no texts".into()));
        }
        if texts.len() != labels.len() {
            return Err(Error::Config(format!(
                "{} texts but {} labels",
                texts.len(),
                labels.len()
            )));
        }
        if let Some(bad) = labels.iter().find(|&&l| l >= n_classes) {
            return Err(Error::Config(format!(
                "label {bad} outside 0..{n_classes}"
            )));
        }
        Ok(LabeledCorpus {
            texts,
            labels,
            n_classes,
        })
    }

    pub fn len(&self) -> usize {
        self.texts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.texts.is_empty()
    }

    /// Split into the first `n` texts and the rest.
    pub fn split_at(&self, n: usize) -> Result<(LabeledCorpus, LabeledCorpus)> {
        if n == 0 || n >= self.len() {
            return Err(Error::Config(format!(
                "cannot split {} texts at {n}",
                self.len()
            )));
        }
        let a = LabeledCorpus::new(self.texts[..n].to_vec(), self.labels[..n].to_vec(), self.n_classes)?;
        let b = LabeledCorpus::new(self.texts[n..].to_vec(), self.labels[n..].to_vec(), self.n_classes)?;
        Ok((a, b))
    }

    /// Unique token types.
    pub fn types(&self) -> BTreeSet<&str> {
        self.texts
            .iter()
            .flat_map(|t| t.iter().map(String::as_str))
            .collect()
    }
}

/// Which representation supplies per-word features.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeatureMode {
    FusedMean,
    FusedBeta,
    /// One lexicon's own numeric form, by view id.
    Single(String),
    /// Concatenation of every lexicon's unbucketed numeric form.
    Concat,
}

impl fmt::Display for FeatureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureMode::FusedMean => f.write_str("fused-mean"),
            FeatureMode::FusedBeta => f.write_str("fused-beta"),
            FeatureMode::Single(v) => write!(f, "single:{v}"),
            FeatureMode::Concat => f.write_str("concat"),
        }
    }
}

impl FromStr for FeatureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fused-mean" => Ok(FeatureMode::FusedMean),
            "fused-beta" => Ok(FeatureMode::FusedBeta),
            "concat" => Ok(FeatureMode::Concat),
            _ => match s.strip_prefix("single:") {
                Some(v) if !v.is_empty() => Ok(FeatureMode::Single(v.to_string())),
                _ => Err(Error::Usage(format!(
                    "unknown mode {s:?}; expected fused-mean, fused-beta, single:<view> or concat"
                ))),
            },
        }
    }
}

/// Standalone feature width of a lexicon (rater histograms are bucketed to
/// one scalar).
pub fn single_dim(family: &ScaleFamily) -> usize {
    match family {
        ScaleFamily::PairContinuous => 2,
        _ => 1,
    }
}

/// Width of a lexicon inside the concatenation (rater histograms unbucketed).
pub fn concat_view_dim(family: &ScaleFamily) -> usize {
    match family {
        ScaleFamily::PairContinuous => 2,
        ScaleFamily::RaterHistogram { n_raters, .. } => *n_raters as usize,
        _ => 1,
    }
}

pub fn concat_dim(families: &[ScaleFamily]) -> usize {
    families.iter().map(concat_view_dim).sum()
}

fn rater_mid(n_points: u32) -> f64 {
    f64::from(n_points - 1) / 2.0
}

/// Standalone numeric form: binary to ±1, rater ratings bucketed below,
/// at and above the midpoint to -1, 0, +1 and averaged.
pub fn single_feature(label: &PolarityLabel) -> Vec<f64> {
    match label {
        PolarityLabel::Binary(v) => vec![if *v == 1 { 1.0 } else { -1.0 }],
        PolarityLabel::Signed(v) => vec![*v],
        PolarityLabel::Pair(p, n) => vec![*p, *n],
        PolarityLabel::Raters { n_points, ratings } => {
            let mid = rater_mid(*n_points);
            let total: f64 = ratings
                .iter()
                .map(|&r| {
                    let r = f64::from(r);
                    if r < mid {
                        -1.0
                    } else if r > mid {
                        1.0
                    } else {
                        0.0
                    }
                })
                .sum();
            vec![total / ratings.len() as f64]
        }
    }
}

/// Concatenation form of one label: ratings rescaled to `[-1, 1]`.
fn concat_feature(label: &PolarityLabel, out: &mut Vec<f64>) {
    match label {
        PolarityLabel::Raters { n_points, ratings } => {
            let mid = rater_mid(*n_points);
            out.extend(ratings.iter().map(|&r| (f64::from(r) - mid) / mid));
        }
        other => out.extend(single_feature(other)),
    }
}

/// Turns tokens into average-polarity vectors under one [`FeatureMode`].
#[derive(Debug, Clone)]
pub struct EvalFeaturizer<'a> {
    mode: FeatureMode,
    fused: Option<&'a UnifiedLexicon>,
    views: &'a [LexiconView],
    dim: usize,
}

impl<'a> EvalFeaturizer<'a> {
    pub fn new(
        mode: FeatureMode,
        fused: Option<&'a UnifiedLexicon>,
        views: &'a [LexiconView],
    ) -> Result<Self> {
        let dim = match &mode {
            FeatureMode::FusedMean | FeatureMode::FusedBeta => {
                if fused.is_none() {
                    return Err(Error::Config(format!("mode {mode} needs a fused lexicon")));
                }
                crate::N_CLASSES
            }
            FeatureMode::Single(id) => {
                let v = views
                    .iter()
                    .find(|v| v.id() == id)
                    .ok_or_else(|| Error::Config(format!("no lexicon view named {id:?}")))?;
                single_dim(&v.family())
            }
            FeatureMode::Concat => {
                if views.is_empty() {
                    return Err(Error::Config("concat mode needs lexicon views".into()));
                }
                concat_dim(&views.iter().map(LexiconView::family).collect::<Vec<_>>())
            }
        };
        Ok(EvalFeaturizer {
            mode,
            fused,
            views,
            dim,
        })
    }

    pub fn mode(&self) -> &FeatureMode {
        &self.mode
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Whether `word` has a feature under this mode.
    pub fn covers(&self, word: &str) -> bool {
        match &self.mode {
            FeatureMode::FusedMean | FeatureMode::FusedBeta => {
                self.fused.is_some_and(|f| f.contains(word))
            }
            FeatureMode::Single(id) => self.views.iter().any(|v| v.id() == id && v.contains(word)),
            FeatureMode::Concat => self.views.iter().any(|v| v.contains(word)),
        }
    }

    pub fn word_feature(&self, word: &str) -> Option<Vec<f64>> {
        match &self.mode {
            FeatureMode::FusedMean => self.fused?.lookup(word).map(|e| e.mean.to_vec()),
            FeatureMode::FusedBeta => self.fused?.lookup(word).map(|e| e.beta.to_vec()),
            FeatureMode::Single(id) => self
                .views
                .iter()
                .find(|v| v.id() == id)?
                .get(word)
                .map(single_feature),
            FeatureMode::Concat => {
                if !self.covers(word) {
                    return None;
                }
                let mut out = Vec::with_capacity(self.dim);
                for v in self.views {
                    match v.get(word) {
                        Some(label) => concat_feature(label, &mut out),
                        None => out.extend(core::iter::repeat_n(0.0, concat_view_dim(&v.family()))),
                    }
                }
                Some(out)
            }
        }
    }

    /// Mean feature over covered tokens; zeros when none is covered.
    pub fn featurize_text<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<f64> {
        let mut acc = vec![0.0; self.dim];
        let mut n = 0usize;
        for t in tokens {
            if let Some(f) = self.word_feature(t.as_ref()) {
                for (a, v) in acc.iter_mut().zip(&f) {
                    *a += v;
                }
                n += 1;
            }
        }
        if n > 0 {
            for a in &mut acc {
                *a /= n as f64;
            }
        }
        acc
    }

    pub fn featurize_corpus(&self, corpus: &LabeledCorpus) -> Vec<Vec<f64>> {
        corpus.texts.iter().map(|t| self.featurize_text(t)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub l2: f64,
    pub max_iter: usize,
    /// Stop once the gradient norm drops below this.
    pub tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            l2: 1e-4,
            max_iter: 2000,
            tol: 1e-8,
        }
    }
}

/// Multinomial softmax regression.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    pub n_classes: usize,
    pub dim: usize,
    /// Row-major `n_classes x dim`.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub l2: f64,
    pub iterations: usize,
    pub converged: bool,
    pub grad_norm: f64,
}

impl LogisticModel {
    pub fn zeros(n_classes: usize, dim: usize, l2: f64) -> Self {
        LogisticModel {
            n_classes,
            dim,
            weights: vec![0.0; n_classes * dim],
            bias: vec![0.0; n_classes],
            l2,
            iterations: 0,
            converged: false,
            grad_norm: f64::INFINITY,
        }
    }

    fn logits(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n_classes)
            .map(|c| {
                let row = &self.weights[c * self.dim..(c + 1) * self.dim];
                self.bias[c] + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
            })
            .collect()
    }

    pub fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        let z = self.logits(x);
        let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let e: Vec<f64> = z.iter().map(|v| (v - m).exp()).collect();
        let s: f64 = e.iter().sum();
        e.into_iter().map(|v| v / s).collect()
    }

    /// Highest-scoring class; ties go to the lower index.
    pub fn predict(&self, x: &[f64]) -> usize {
        let z = self.logits(x);
        let mut best = 0;
        for (c, v) in z.iter().enumerate() {
            if *v > z[best] {
                best = c;
            }
        }
        best
    }

    fn unpack(&mut self, theta: &[f64]) {
        let nw = self.n_classes * self.dim;
        self.weights.copy_from_slice(&theta[..nw]);
        self.bias.copy_from_slice(&theta[nw..]);
    }

    fn pack(&self) -> Vec<f64> {
        let mut t = self.weights.clone();
        t.extend_from_slice(&self.bias);
        t
    }

    /// Mean negative log-likelihood plus `l2 / 2 * ||W||^2` (bias excluded).
    pub fn objective(&self, features: &[Vec<f64>], labels: &[usize]) -> f64 {
        self.objective_and_grad(features, labels, false).0
    }

    fn objective_and_grad(
        &self,
        features: &[Vec<f64>],
        labels: &[usize],
        want_grad: bool,
    ) -> (f64, Vec<f64>) {
        let (k, d) = (self.n_classes, self.dim);
        let n = features.len() as f64;
        let mut grad = if want_grad { vec![0.0; k * d + k] } else { Vec::new() };
        let mut loss = 0.0;
        for (x, &y) in features.iter().zip(labels) {
            let z = self.logits(x);
            let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lse = m + z.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
            loss += lse - z[y];
            if want_grad {
                for c in 0..k {
                    let r = (z[c] - lse).exp() - if c == y { 1.0 } else { 0.0 };
                    for (g, v) in grad[c * d..(c + 1) * d].iter_mut().zip(x) {
                        *g += r * v;
                    }
                    grad[k * d + c] += r;
                }
            }
        }
        loss /= n;
        let w2: f64 = self.weights.iter().map(|w| w * w).sum();
        loss += 0.5 * self.l2 * w2;
        if want_grad {
            for g in &mut grad {
                *g /= n;
            }
            for (g, w) in grad[..k * d].iter_mut().zip(&self.weights) {
                *g += self.l2 * w;
            }
        }
        (loss, grad)
    }
}

/// Full-batch gradient descent. Each iteration tries a Barzilai-Borwein
/// step and halves it until the Armijo condition holds.
pub fn fit_logistic(
    features: &[Vec<f64>],
    labels: &[usize],
    n_classes: usize,
    opts: &FitOptions,
) -> Result<LogisticModel> {
    let dim = features.first().map_or(0, Vec::len);
    fit_logistic_from(LogisticModel::zeros(n_classes, dim, opts.l2), features, labels, opts)
}

/// As [`fit_logistic`], starting from `init`.
pub fn fit_logistic_from(
    init: LogisticModel,
    features: &[Vec<f64>],
    labels: &[usize],
    opts: &FitOptions,
) -> Result<LogisticModel> {
    if features.is_empty() || features.len() != labels.len() {
        return Err(Error::Config(format!(
            "{} feature rows for {} labels",
            features.len(),
            labels.len()
        )));
    }
    let mut model = init;
    model.l2 = opts.l2;
    if features.iter().any(|f| f.len() != model.dim) {
        return Err(Error::Config("ragged feature matrix".into()));
    }
    if labels.iter().any(|&l| l >= model.n_classes) {
        return Err(Error::Config("label outside class range".into()));
    }
    let present: BTreeSet<usize> = labels.iter().copied().collect();
    if present.len() < 2 {
        return Err(Error::Config(
            "logistic regression needs at least two classes present".into(),
        ));
    }

    let mut theta = model.pack();
    let (mut loss, mut grad) = model.objective_and_grad(features, labels, true);
    let mut step = 1.0;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    model.iterations = 0;
    model.converged = false;
    for _ in 0..opts.max_iter {
        let gnorm2: f64 = grad.iter().map(|g| g * g).sum();
        model.grad_norm = gnorm2.sqrt();
        if model.grad_norm < opts.tol {
            model.converged = true;
            break;
        }
        model.iterations += 1;
        // Barzilai-Borwein trial step, else grow the last accepted one
        step = match &prev {
            Some((t0, g0)) => {
                let (mut ss, mut sy) = (0.0, 0.0);
                for i in 0..theta.len() {
                    let (ds, dy) = (theta[i] - t0[i], grad[i] - g0[i]);
                    ss += ds * ds;
                    sy += ds * dy;
                }
                if sy > 0.0 {
                    (ss / sy).clamp(1e-10, 1e10)
                } else {
                    step * 2.0
                }
            }
            None => step * 2.0,
        };
        let mut trial = model.clone();
        loop {
            let cand: Vec<f64> = theta.iter().zip(&grad).map(|(t, g)| t - step * g).collect();
            trial.unpack(&cand);
            let new_loss = trial.objective(features, labels);
            if new_loss <= loss - 1e-4 * step * gnorm2 {
                prev = Some((core::mem::replace(&mut theta, cand), grad.clone()));
                break;
            }
            step *= 0.5;
            if step < 1e-20 {
                // no further descent is representable
                model.unpack(&theta);
                model.converged = model.grad_norm < opts.tol;
                return Ok(model);
            }
        }
        model.unpack(&theta);
        let (l, g) = model.objective_and_grad(features, labels, true);
        loss = l;
        grad = g;
    }
    model.grad_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    model.converged = model.grad_norm < opts.tol;
    Ok(model)
}

pub fn accuracy(model: &LogisticModel, features: &[Vec<f64>], labels: &[usize]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let hits = features
        .iter()
        .zip(labels)
        .filter(|(x, &y)| model.predict(x) == y)
        .count();
    hits as f64 / labels.len() as f64
}

/// Percentage of the corpus's unique types for which `covered` holds.
pub fn coverage(covered: impl Fn(&str) -> bool, corpus: &LabeledCorpus) -> f64 {
    let types = corpus.types();
    if types.is_empty() {
        return 0.0;
    }
    let hit = types.iter().filter(|t| covered(t)).count();
    100.0 * hit as f64 / types.len() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub mode: String,
    pub n_train: usize,
    pub n_test: usize,
    pub feature_dim: usize,
    pub accuracy: f64,
    /// Coverage of the training portion, in percent.
    pub coverage: f64,
    pub converged: bool,
}

/// Fit on the training corpus, score on the test corpus.
pub fn evaluate(
    train: &LabeledCorpus,
    test: &LabeledCorpus,
    featurizer: &EvalFeaturizer<'_>,
    opts: &FitOptions,
) -> Result<EvalReport> {
    if train.n_classes != test.n_classes {
        return Err(Error::Config(format!(
            "train has {} classes, test has {}",
            train.n_classes, test.n_classes
        )));
    }
    let xtr = featurizer.featurize_corpus(train);
    let model = fit_logistic(&xtr, &train.labels, train.n_classes, opts)?;
    let xte = featurizer.featurize_corpus(test);
    Ok(EvalReport {
        mode: featurizer.mode().to_string(),
        n_train: train.len(),
        n_test: test.len(),
        feature_dim: featurizer.dim(),
        accuracy: accuracy(&model, &xte, &test.labels),
        coverage: coverage(|w| featurizer.covers(w), train),
        converged: model.converged,
    })
}

/// Fused entries limited to the words of one lexicon.
pub fn restrict_vocabulary(fused: &UnifiedLexicon, view: &LexiconView) -> UnifiedLexicon {
    fused.filtered(|w| view.contains(w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::LatentPosterior;
    use crate::unified::UnifiedEntry;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s)
    }

    #[test]
    fn tokenizer_lowercases_and_splits() {
        assert_eq!(toks("Great, GREAT movie!!  so-so"), ["great", "great", "movie", "so", "so"]);
        assert!(toks("  ...  ").is_empty());
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("single:mpqa".parse::<FeatureMode>().unwrap(), FeatureMode::Single("mpqa".into()));
        assert_eq!("concat".parse::<FeatureMode>().unwrap(), FeatureMode::Concat);
        assert!("single:".parse::<FeatureMode>().is_err());
        assert!("mean".parse::<FeatureMode>().is_err());
    }

    fn fused() -> UnifiedLexicon {
        [
            UnifiedEntry::from_posterior("good", &LatentPosterior::from_beta([2.0, 1.0, 1.0]), 1),
            UnifiedEntry::from_posterior("bad", &LatentPosterior::from_beta([1.0, 2.0, 1.0]), 1),
        ]
        .into_iter()
        .collect()
    }

    #[test]
    fn text_features_average_covered_tokens() {
        let f = fused();
        let fz = EvalFeaturizer::new(FeatureMode::FusedBeta, Some(&f), &[]).unwrap();
        assert_eq!(fz.featurize_text(&toks("what")), vec![0.0; 3]);
        assert_eq!(fz.featurize_text(&toks("good")), vec![2.0, 1.0, 1.0]);
        assert_eq!(fz.featurize_text(&toks("good bad what")), vec![1.5, 1.5, 1.0]);
    }

    #[test]
    fn single_lexicon_features() {
        assert_eq!(single_feature(&PolarityLabel::Binary(1)), vec![1.0]);
        assert_eq!(single_feature(&PolarityLabel::Binary(0)), vec![-1.0]);
        let flat = PolarityLabel::Raters { n_points: 9, ratings: vec![4; 10] };
        assert_eq!(single_feature(&flat), vec![0.0]);
        let mixed = PolarityLabel::Raters {
            n_points: 9,
            ratings: vec![0, 3, 4, 5, 8, 8, 8, 4, 4, 4],
        };
        // -1 -1 0 +1 +1 +1 +1 0 0 0
        assert!((single_feature(&mixed)[0] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn concat_fills_missing_views_with_neutral() {
        let mut a = LexiconView::new("a", ScaleFamily::PairContinuous);
        a.insert("good", PolarityLabel::Pair(0.8, 0.1)).unwrap();
        let mut b = LexiconView::new("b", ScaleFamily::VADER);
        b.insert("fine", PolarityLabel::Raters { n_points: 9, ratings: vec![8; 10] }).unwrap();
        let views = [a, b];
        let fz = EvalFeaturizer::new(FeatureMode::Concat, None, &views).unwrap();
        assert_eq!(fz.dim(), 12);
        let g = fz.word_feature("good").unwrap();
        assert_eq!(&g[..2], &[0.8, 0.1]);
        assert!(g[2..].iter().all(|v| *v == 0.0));
        let f = fz.word_feature("fine").unwrap();
        assert_eq!(&f[..2], &[0.0, 0.0]);
        assert!(f[2..].iter().all(|v| *v == 1.0));
        assert!(fz.word_feature("other").is_none());
    }

    #[test]
    fn six_schema_concat_dim_is_sixteen() {
        let fams = [
            ScaleFamily::PairContinuous,
            ScaleFamily::Binary,
            ScaleFamily::SignedContinuous,
            ScaleFamily::Binary,
            ScaleFamily::Binary,
            ScaleFamily::VADER,
        ];
        assert_eq!(concat_dim(&fams), 16);
    }

    #[test]
    fn separable_1d_fits_perfectly() {
        let xs: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64 - 9.5]).collect();
        let ys: Vec<usize> = (0..20).map(|i| usize::from(i >= 10)).collect();
        let m = fit_logistic(&xs, &ys, 2, &FitOptions::default()).unwrap();
        assert_eq!(accuracy(&m, &xs, &ys), 1.0);
    }

    #[test]
    fn uniform_predictor_loss_is_log_k() {
        let xs: Vec<Vec<f64>> = (0..9).map(|i| vec![i as f64, 1.0]).collect();
        let ys: Vec<usize> = (0..9).map(|i| i % 3).collect();
        let m = LogisticModel::zeros(3, 2, 0.0);
        assert!((m.objective(&xs, &ys) - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn single_class_rejected() {
        let xs = vec![vec![1.0], vec![2.0]];
        assert!(matches!(
            fit_logistic(&xs, &[1, 1], 2, &FitOptions::default()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn coverage_extremes() {
        let corpus = LabeledCorpus::new(vec![toks("a b c"), toks("b d")], vec![0, 1], 2).unwrap();
        assert_eq!(coverage(|_| true, &corpus), 100.0);
        assert_eq!(coverage(|_| false, &corpus), 0.0);
        assert_eq!(coverage(|w| w == "a" || w == "d", &corpus), 50.0);
    }

    #[test]
    fn restriction() {
        let f = fused();
        let mut v = LexiconView::new("v", ScaleFamily::Binary);
        v.insert("good", PolarityLabel::Binary(1)).unwrap();
        v.insert("other", PolarityLabel::Binary(1)).unwrap();
        let r = restrict_vocabulary(&f, &v);
        assert_eq!(r.words().collect::<Vec<_>>(), ["good"]);
        assert!(restrict_vocabulary(&f, &LexiconView::new("e", ScaleFamily::Binary)).is_empty());
    }
}
