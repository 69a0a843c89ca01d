//! Stage functions shared by the CLI and the integration tests.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use lexifuse_core::eval::{evaluate, EvalFeaturizer, EvalReport, FeatureMode, LabeledCorpus};
use lexifuse_core::lexicon::{build_vocabulary, ParseReport};
use lexifuse_core::model::build_observations;
use lexifuse_core::synth::{synth_generate, SynthConfig, SynthData};
use lexifuse_core::train::{fit, init_model_seeded, BatchEvaluator, EpochLog};
use lexifuse_core::unified::{export_lexicon, Export};
use lexifuse_core::{
    CombinedVocabulary, Error, LexiconView, ModelState, RngStream, UnifiedLexicon, WordObservation,
};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::formats::{self, Provenance};

/// `[id=]path[:schema]`. The id defaults to the file stem; without a schema
/// the file is read in the normalized format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViewSpec {
    pub id: String,
    pub path: PathBuf,
    pub schema: Option<String>,
}

impl FromStr for ViewSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (id, rest) = match s.split_once('=') {
            Some((id, rest)) if !id.contains(['/', '\\']) => (Some(id.trim()), rest),
            _ => (None, s),
        };
        let (path, schema) = match rest.rsplit_once(':') {
            Some((p, sc)) if !p.is_empty() && !sc.is_empty() && !sc.contains(['/', '\\']) => {
                (p, Some(sc.to_string()))
            }
            _ => (rest, None),
        };
        if path.is_empty() {
            return Err(format!("empty path in view spec {s:?}"));
        }
        let path = PathBuf::from(path);
        let id = match id {
            Some(id) if !id.is_empty() => id.to_string(),
            Some(_) => return Err(format!("empty view id in {s:?}")),
            None => path
                .file_stem()
                .and_then(|s| s.to_str())
                .ok_or_else(|| format!("cannot derive a view id from {s:?}"))?
                .to_string(),
        };
        if id.contains(char::is_whitespace) {
            return Err(format!("view id {id:?} contains whitespace"));
        }
        Ok(ViewSpec { id, path, schema })
    }
}

/// Read every view, resolving schema names against the run config.
pub fn load_views(
    specs: &[ViewSpec],
    cfg: &RunConfig,
) -> CliResult<Vec<(LexiconView, ParseReport)>> {
    specs
        .iter()
        .map(|spec| {
            let schema = match &spec.schema {
                Some(name) => Some(cfg.schemas.get(name).ok_or_else(|| {
                    CliError::Usage(format!("schema {name:?} is not declared in the config"))
                })?),
                None => None,
            };
            formats::read_lexicon(&spec.path, &spec.id, schema)
        })
        .collect()
}

/// Views, their union vocabulary and one observation per word.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub views: Vec<LexiconView>,
    pub vocab: CombinedVocabulary,
    pub observations: Vec<WordObservation>,
}

pub fn prepare(views: Vec<LexiconView>, cfg: &RunConfig) -> CliResult<Prepared> {
    let vocab = build_vocabulary(&views)?;
    let observations = build_observations(&views, &vocab, &cfg.thresholds);
    Ok(Prepared {
        views,
        vocab,
        observations,
    })
}

/// Train from scratch, or continue `resume` up to `cfg.train.epochs`.
pub fn train_model<E: BatchEvaluator>(
    prep: &Prepared,
    cfg: &RunConfig,
    resume: Option<ModelState>,
    executor: &E,
    on_epoch: impl FnMut(&EpochLog, &ModelState),
) -> CliResult<(ModelState, Vec<EpochLog>)> {
    let mut state = match resume {
        Some(s) => {
            for v in &prep.views {
                match s.view(v.id()) {
                    Some(m) if m.scale == v.family() => {}
                    _ => {
                        return Err(CliError::Usage(format!(
                            "checkpoint has no head for view {:?} ({})",
                            v.id(),
                            v.family()
                        )))
                    }
                }
            }
            s
        }
        None => init_model_seeded(prep.views.iter().map(|v| (v.id(), v.family())), &cfg.train)?,
    };
    let logs = fit(&mut state, &prep.observations, &cfg.train, executor, on_epoch)?;
    Ok((state, logs))
}

pub fn export(state: &ModelState, prep: &Prepared) -> CliResult<Export> {
    let out = export_lexicon(state, &prep.observations)?;
    for w in &out.skipped {
        log::warn!("skipping {w:?}: no trained encoder for one of its views");
    }
    Ok(out)
}

/// One report per mode, in the given order.
pub fn evaluate_modes(
    modes: &[FeatureMode],
    fused: Option<&UnifiedLexicon>,
    views: &[LexiconView],
    train: &LabeledCorpus,
    test: &LabeledCorpus,
    cfg: &RunConfig,
) -> CliResult<Vec<EvalReport>> {
    modes
        .iter()
        .map(|m| {
            let f = EvalFeaturizer::new(m.clone(), fused, views)?;
            Ok(evaluate(train, test, &f, &cfg.fit)?)
        })
        .collect()
}

/// Synthetic data plus its corpus split into train and test.
#[derive(Debug, Clone)]
pub struct SynthSplit {
    pub data: SynthData,
    pub train: LabeledCorpus,
    pub test: LabeledCorpus,
}

/// Generate synthetic data; the first `n_train` texts form the training set.
pub fn synth(config: &SynthConfig, seed: u64, n_train: usize) -> CliResult<SynthSplit> {
    if n_train == 0 || n_train >= config.n_texts {
        return Err(CliError::Usage(format!(
            "n_train must lie in 1..{}, got {n_train}",
            config.n_texts
        )));
    }
    let data = synth_generate(config, &mut RngStream::new(seed))?;
    let (train, test) = data.corpus.split_at(n_train)?;
    Ok(SynthSplit { data, train, test })
}

/// Write synthetic views, truth table and corpora into `dir`.
pub fn write_synth(dir: &Path, split: &SynthSplit, prov: &Provenance) -> CliResult<Vec<PathBuf>> {
    let mut written = Vec::new();
    for v in &split.data.views {
        let p = dir.join(format!("{}.tsv", v.id()));
        formats::write_text(&p, &formats::lexicon_to_string(v, prov))?;
        written.push(p);
    }
    let mut truth = prov.lines();
    truth.push_str("word\tsentiment\n");
    for (w, s) in &split.data.truth {
        truth.push_str(&format!("{w}\t{}\n", s.as_str()));
    }
    for (name, text) in [
        ("truth.tsv", truth),
        ("train.tsv", formats::corpus_to_string(&split.train, prov)),
        ("test.tsv", formats::corpus_to_string(&split.test, prov)),
    ] {
        let p = dir.join(name);
        formats::write_text(&p, &text)?;
        written.push(p);
    }
    Ok(written)
}

/// Parse a mode, mapping failures to a usage error.
pub fn parse_mode(s: &str) -> CliResult<FeatureMode> {
    s.parse()
        .map_err(|e: Error| CliError::Usage(format!("bad --mode {s:?}: {e}")))
}
