//! Logistic regression and evaluation pipeline properties.

use lexifuse_core::eval::{
    evaluate, fit_logistic, fit_logistic_from, restrict_vocabulary, EvalFeaturizer, FeatureMode,
    FitOptions, LogisticModel,
};
use lexifuse_core::lexicon::{build_vocabulary, CoarseThresholds};
use lexifuse_core::model::build_observations;
use lexifuse_core::synth::{synth_generate, SynthConfig, SynthData};
use lexifuse_core::train::init_model_seeded;
use lexifuse_core::unified::export_lexicon;
use lexifuse_core::{RngStream, TrainConfig, UnifiedLexicon};

fn data(seed: u64) -> SynthData {
    let cfg = SynthConfig {
        n_words: 200,
        n_texts: 400,
        ..SynthConfig::default()
    };
    synth_generate(&cfg, &mut RngStream::new(seed)).unwrap()
}

fn untrained_fused(d: &SynthData) -> UnifiedLexicon {
    let cfg = TrainConfig {
        hidden_dim: 8,
        weight_init_scale: 2.0,
        ..TrainConfig::default()
    };
    let state = init_model_seeded(d.views.iter().map(|v| (v.id(), v.family())), &cfg).unwrap();
    let vocab = build_vocabulary(&d.views).unwrap();
    let obs = build_observations(&d.views, &vocab, &CoarseThresholds::default());
    export_lexicon(&state, &obs).unwrap().lexicon
}

#[test]
fn optimum_is_independent_of_initialization() {
    let d = data(1);
    let fused = untrained_fused(&d);
    let opts = FitOptions::default();
    for mode in [FeatureMode::Concat, FeatureMode::FusedBeta, FeatureMode::FusedMean] {
        let f = EvalFeaturizer::new(mode.clone(), Some(&fused), &d.views).unwrap();
        let x = f.featurize_corpus(&d.corpus);
        let y = &d.corpus.labels;
        let base = fit_logistic(&x, y, 2, &opts).unwrap();
        assert!(base.converged, "{mode}: grad norm {}", base.grad_norm);
        assert!(base.grad_norm < 10.0 * opts.tol);
        let mut rng = RngStream::new(7);
        for _ in 0..3 {
            let mut init = LogisticModel::zeros(2, f.dim(), opts.l2);
            for w in init.weights.iter_mut().chain(init.bias.iter_mut()) {
                *w = 4.0 * rng.open01() - 2.0;
            }
            let m = fit_logistic_from(init, &x, y, &opts).unwrap();
            assert!(m.grad_norm < 10.0 * opts.tol, "{mode}: grad norm {}", m.grad_norm);
            let (a, b) = (base.objective(&x, y), m.objective(&x, y));
            assert!((a - b).abs() < 1e-6, "{mode}: {a} vs {b}");
        }
    }
}

#[test]
fn evaluation_is_deterministic_and_bounded() {
    let d = data(2);
    let fused = untrained_fused(&d);
    let (train, test) = d.corpus.split_at(300).unwrap();
    let mut modes = vec![FeatureMode::FusedMean, FeatureMode::FusedBeta, FeatureMode::Concat];
    modes.extend(d.views.iter().map(|v| FeatureMode::Single(v.id().to_string())));
    for mode in modes {
        let f = EvalFeaturizer::new(mode, Some(&fused), &d.views).unwrap();
        let a = evaluate(&train, &test, &f, &FitOptions::default()).unwrap();
        let b = evaluate(&train, &test, &f, &FitOptions::default()).unwrap();
        assert_eq!(a, b);
        assert!((0.0..=1.0).contains(&a.accuracy));
        assert!((0.0..=100.0).contains(&a.coverage));
        assert_eq!((a.n_train, a.n_test), (300, 100));
    }
}

#[test]
fn separable_features_on_identical_splits_score_perfectly() {
    let x: Vec<Vec<f64>> = (0..40).map(|i| vec![if i % 2 == 0 { 1.0 } else { -1.0 }, 0.1 * i as f64]).collect();
    let y: Vec<usize> = (0..40).map(|i| i % 2).collect();
    let m = fit_logistic(&x, &y, 2, &FitOptions::default()).unwrap();
    assert_eq!(lexifuse_core::eval::accuracy(&m, &x, &y), 1.0);
}

#[test]
fn restriction_keeps_exactly_the_shared_words() {
    let d = data(3);
    let fused = untrained_fused(&d);
    for v in &d.views {
        let r = restrict_vocabulary(&fused, v);
        let shared = v.words().filter(|w| fused.contains(w)).count();
        assert_eq!(r.len(), shared);
        assert!(r.words().all(|w| v.contains(w)));
    }
    let empty = lexifuse_core::LexiconView::new("empty", lexifuse_core::ScaleFamily::Binary);
    assert!(restrict_vocabulary(&fused, &empty).is_empty());
}
