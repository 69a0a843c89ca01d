//! The fused lexicon: per-word Dirichlet concentration and its mean.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::Result;
use crate::model::{posterior_params, LatentPosterior, ModelState, WordObservation};
use crate::N_CLASSES;

#[derive(Debug, Clone, PartialEq)]
pub struct UnifiedEntry {
    pub word: String,
    pub beta: [f64; N_CLASSES],
    pub mean: [f64; N_CLASSES],
    pub n_views: usize,
}

impl UnifiedEntry {
    pub fn from_posterior(word: &str, posterior: &LatentPosterior, n_views: usize) -> Self {
        UnifiedEntry {
            word: word.to_string(),
            beta: posterior.beta,
            mean: posterior.mean,
            n_views,
        }
    }
}

/// Fused lexicon keyed by case-folded word.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct UnifiedLexicon {
    entries: BTreeMap<String, UnifiedEntry>,
}

impl UnifiedLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, mut entry: UnifiedEntry) {
        entry.word = entry.word.to_lowercase();
        self.entries.insert(entry.word.clone(), entry);
    }

    pub fn lookup(&self, word: &str) -> Option<&UnifiedEntry> {
        match self.entries.get(word) {
            Some(e) => Some(e),
            None if word.chars().any(char::is_uppercase) => {
                self.entries.get(&word.to_lowercase())
            }
            None => None,
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.lookup(word).is_some()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries sorted by word.
    pub fn iter(&self) -> impl Iterator<Item = &UnifiedEntry> {
        self.entries.values()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Keep only entries whose word satisfies `keep`.
    pub fn filtered(&self, mut keep: impl FnMut(&str) -> bool) -> UnifiedLexicon {
        UnifiedLexicon {
            entries: self
                .entries
                .iter()
                .filter(|(w, _)| keep(w))
                .map(|(w, e)| (w.clone(), e.clone()))
                .collect(),
        }
    }
}

impl FromIterator<UnifiedEntry> for UnifiedLexicon {
    fn from_iter<I: IntoIterator<Item = UnifiedEntry>>(iter: I) -> Self {
        let mut lex = UnifiedLexicon::new();
        for e in iter {
            lex.insert(e);
        }
        lex
    }
}

/// Result of an export: the lexicon plus words skipped for lack of encoder
/// coverage.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Export {
    pub lexicon: UnifiedLexicon,
    pub skipped: Vec<String>,
}

/// Run every observation through the trained encoders.
pub fn export_lexicon(state: &ModelState, observations: &[WordObservation]) -> Result<Export> {
    let mut out = Export::default();
    for obs in observations {
        let covered = obs.labels.iter().all(|(id, _)| state.view(id).is_some());
        if !covered || obs.labels.is_empty() {
            out.skipped.push(obs.word.clone());
            continue;
        }
        let post = posterior_params(obs, state)?;
        out.lexicon
            .insert(UnifiedEntry::from_posterior(&obs.word, &post, obs.n_views()));
    }
    Ok(out)
}
