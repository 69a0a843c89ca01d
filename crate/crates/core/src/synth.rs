//! Synthetic lexica and corpora with known word sentiments.
//!
//! Every word gets a ground-truth class. Each view labels a random 40-70%
//! of the words eligible for its scale (binary scales only list polar
//! words), emitting a label in the coarse class of the truth, or of a
//! uniformly chosen other class with probability `label_noise`. Texts are
//! bags of words whose label is the majority ground-truth class of their
//! polar tokens.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::eval::LabeledCorpus;
use crate::lexicon::{LexiconView, PolarityLabel, ScaleFamily, Sentiment};
use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n_words: usize,
    pub n_views_per_family: usize,
    pub label_noise: f64,
    pub n_texts: usize,
    pub text_len: usize,
    pub families: Vec<ScaleFamily>,
    /// Class proportions (positive, negative, neutral).
    pub class_weights: [f64; 3],
    /// Probability that a token is drawn from the polar words.
    pub polar_token_rate: f64,
    /// Probability that a polar token agrees with the document's class.
    pub on_topic_rate: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_words: 500,
            n_views_per_family: 1,
            label_noise: 0.1,
            n_texts: 2500,
            text_len: 20,
            families: Vec::from([
                ScaleFamily::PairContinuous,
                ScaleFamily::VADER,
                ScaleFamily::Binary,
                ScaleFamily::SignedContinuous,
            ]),
            class_weights: [0.35, 0.35, 0.3],
            polar_token_rate: 0.5,
            on_topic_rate: 0.75,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthData {
    pub views: Vec<LexiconView>,
    pub truth: BTreeMap<String, Sentiment>,
    /// Two classes: 0 positive, 1 negative.
    pub corpus: LabeledCorpus,
}

fn family_short(f: &ScaleFamily) -> &'static str {
    match f {
        ScaleFamily::Binary => "binary",
        ScaleFamily::SignedContinuous => "signed",
        ScaleFamily::PairContinuous => "pair",
        ScaleFamily::RaterHistogram { .. } => "rater",
    }
}

pub fn word_name(i: usize) -> String {
    format!("w{i:05}")
}

fn uniform(rng: &mut RngStream, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.open01()
}

fn int_between(rng: &mut RngStream, lo: u32, hi: u32) -> u32 {
    lo + rng.below((hi - lo + 1) as usize) as u32
}

/// A label whose coarse class (under default thresholds) is `class`.
pub fn emit_label(family: &ScaleFamily, class: Sentiment, rng: &mut RngStream) -> PolarityLabel {
    match *family {
        ScaleFamily::Binary => PolarityLabel::Binary(u8::from(class == Sentiment::Positive)),
        ScaleFamily::SignedContinuous => PolarityLabel::Signed(match class {
            Sentiment::Positive => uniform(rng, 0.15, 1.0),
            Sentiment::Negative => uniform(rng, -1.0, -0.15),
            Sentiment::Neutral => uniform(rng, -0.04, 0.04),
        }),
        ScaleFamily::PairContinuous => {
            let (p, n) = match class {
                Sentiment::Positive => (uniform(rng, 0.3, 1.0), uniform(rng, 0.0, 0.2)),
                Sentiment::Negative => (uniform(rng, 0.0, 0.2), uniform(rng, 0.3, 1.0)),
                Sentiment::Neutral => {
                    let p = uniform(rng, 0.0, 0.3);
                    (p, (p + uniform(rng, -0.04, 0.04)).clamp(0.0, 1.0))
                }
            };
            PolarityLabel::Pair(p, n)
        }
        ScaleFamily::RaterHistogram { n_raters, n_points } => {
            let top = n_points - 1;
            let mid2 = top; // twice the midpoint
            // strictly above / below the midpoint
            let hi_lo = mid2 / 2 + 1;
            let lo_hi = mid2.div_ceil(2) - 1;
            let centre = mid2 / 2;
            let ratings = loop {
                let r: Vec<u32> = (0..n_raters)
                    .map(|_| match class {
                        Sentiment::Positive => int_between(rng, hi_lo, top),
                        Sentiment::Negative => int_between(rng, 0, lo_hi),
                        Sentiment::Neutral => {
                            let lo = centre.saturating_sub(1);
                            int_between(rng, lo, (centre + 1).min(top))
                        }
                    })
                    .collect();
                if class != Sentiment::Neutral {
                    break r;
                }
                let mean = r.iter().map(|&v| f64::from(v)).sum::<f64>() / f64::from(n_raters);
                if (mean - f64::from(top) / 2.0).abs() <= 0.5 {
                    break r;
                }
            };
            PolarityLabel::Raters { n_points, ratings }
        }
    }
}

fn draw_class(weights: &[f64; 3], rng: &mut RngStream) -> Sentiment {
    let total: f64 = weights.iter().sum();
    let u = rng.open01() * total;
    if u < weights[0] {
        Sentiment::Positive
    } else if u < weights[0] + weights[1] {
        Sentiment::Negative
    } else {
        Sentiment::Neutral
    }
}

fn corrupt(class: Sentiment, family: &ScaleFamily, noise: f64, rng: &mut RngStream) -> Sentiment {
    if rng.open01() >= noise {
        return class;
    }
    if *family == ScaleFamily::Binary {
        return match class {
            Sentiment::Positive => Sentiment::Negative,
            _ => Sentiment::Positive,
        };
    }
    let others: Vec<Sentiment> = Sentiment::ALL.into_iter().filter(|&c| c != class).collect();
    others[rng.below(others.len())]
}

pub fn synth_generate(config: &SynthConfig, rng: &mut RngStream) -> Result<SynthData> {
    if config.n_words == 0 || config.n_views_per_family == 0 || config.n_texts == 0 || config.text_len == 0 {
        return Err(Error::Config("synthetic sizes must be positive".into()));
    }
    if !(0.0..0.5).contains(&config.label_noise) {
        return Err(Error::Config("label_noise must lie in [0, 0.5)".into()));
    }
    if config.families.is_empty() {
        return Err(Error::Config("no scale families requested".into()));
    }

    let words: Vec<String> = (0..config.n_words).map(word_name).collect();
    let classes: Vec<Sentiment> = (0..config.n_words)
        .map(|_| draw_class(&config.class_weights, rng))
        .collect();

    let mut views = Vec::new();
    for family in &config.families {
        for j in 0..config.n_views_per_family {
            let id = format!("{}-{j}", family_short(family));
            let mut view = LexiconView::new(id, *family);
            let frac = uniform(rng, 0.4, 0.7);
            for (w, &c) in words.iter().zip(&classes) {
                if *family == ScaleFamily::Binary && c == Sentiment::Neutral {
                    continue;
                }
                if rng.open01() >= frac {
                    continue;
                }
                let emitted = corrupt(c, family, config.label_noise, rng);
                view.insert(w, emit_label(family, emitted, rng))?;
            }
            views.push(view);
        }
    }

    let by_class = |s: Sentiment| -> Vec<usize> {
        (0..config.n_words).filter(|&i| classes[i] == s).collect()
    };
    let pools = [
        by_class(Sentiment::Positive),
        by_class(Sentiment::Negative),
        by_class(Sentiment::Neutral),
    ];
    let mut texts = Vec::with_capacity(config.n_texts);
    let mut labels = Vec::with_capacity(config.n_texts);
    for _ in 0..config.n_texts {
        let doc = rng.below(2);
        let mut votes = [0usize; 2];
        let mut tokens = Vec::with_capacity(config.text_len);
        for _ in 0..config.text_len {
            let polar = rng.open01() < config.polar_token_rate;
            let wanted = if polar {
                if rng.open01() < config.on_topic_rate { doc } else { 1 - doc }
            } else {
                2
            };
            // fall back to any non-empty pool; at least one exists since n_words > 0
            let pool = [wanted, 2, 0, 1]
                .into_iter()
                .find(|&p| !pools[p].is_empty())
                .unwrap_or(0);
            let wi = pools[pool][rng.below(pools[pool].len())];
            if pool < 2 {
                votes[pool] += 1;
            }
            tokens.push(words[wi].clone());
        }
        let label = match votes[0].cmp(&votes[1]) {
            core::cmp::Ordering::Greater => 0,
            core::cmp::Ordering::Less => 1,
            core::cmp::Ordering::Equal => doc,
        };
        texts.push(tokens);
        labels.push(label);
    }

    let truth = words.into_iter().zip(classes).collect();
    Ok(SynthData {
        views,
        truth,
        corpus: LabeledCorpus::new(texts, labels, 2)?,
    })
}
