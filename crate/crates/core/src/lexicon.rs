//! Heterogeneous lexicon ingestion: scale families, label validation,
//! the combined vocabulary and the agreement-spurred Dirichlet prior.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::N_CLASSES;

/// Coarse sentiment class. The discriminant is the component index used by
/// every 3-vector in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sentiment {
    Positive = 0,
    Negative = 1,
    Neutral = 2,
}

impl Sentiment {
    pub const ALL: [Sentiment; N_CLASSES] =
        [Sentiment::Positive, Sentiment::Negative, Sentiment::Neutral];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sentiment::Positive => "positive",
            Sentiment::Negative => "negative",
            Sentiment::Neutral => "neutral",
        }
    }
}

/// The label scale a lexicon annotates with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScaleFamily {
    /// `{0, 1}`; 1 is positive.
    Binary,
    /// A real value in `[-1, 1]`, 0 neutral.
    SignedContinuous,
    /// `(positive strength, negative strength)`, each in `[0, 1]`.
    PairContinuous,
    /// `n_raters` integer ratings on a `0..n_points` scale, midpoint neutral.
    RaterHistogram { n_raters: u32, n_points: u32 },
}

impl ScaleFamily {
    /// The rater layout used by VADER: ten raters on a nine-point scale.
    pub const VADER: ScaleFamily = ScaleFamily::RaterHistogram {
        n_raters: 10,
        n_points: 9,
    };

    pub fn tag(&self) -> &'static str {
        match self {
            ScaleFamily::Binary => "binary",
            ScaleFamily::SignedContinuous => "signed-continuous",
            ScaleFamily::PairContinuous => "pair-continuous",
            ScaleFamily::RaterHistogram { .. } => "rater-histogram",
        }
    }

    /// Length of the numeric vector fed to an encoder head.
    pub fn encoded_dim(&self) -> usize {
        match self {
            ScaleFamily::Binary | ScaleFamily::SignedContinuous => 1,
            ScaleFamily::PairContinuous => 2,
            ScaleFamily::RaterHistogram { n_raters, .. } => *n_raters as usize,
        }
    }

    /// Parse one label field. Pair and rater labels are comma separated.
    /// Binary accepts `0`/`1` plus the usual pos/neg spellings.
    pub fn parse_label(&self, field: &str) -> Result<PolarityLabel> {
        let field = field.trim();
        let bad = |what: &str| Error::Domain(format!("cannot read {what} label from {field:?}"));
        let label = match self {
            ScaleFamily::Binary => {
                let v = match field.to_lowercase().as_str() {
                    "1" | "pos" | "positive" | "+" | "+1" => 1,
                    "0" | "neg" | "negative" | "-" | "-1" => 0,
                    _ => return Err(bad("binary")),
                };
                PolarityLabel::Binary(v)
            }
            ScaleFamily::SignedContinuous => {
                PolarityLabel::Signed(parse_f64(field).ok_or_else(|| bad("signed"))?)
            }
            ScaleFamily::PairContinuous => {
                let parts: Vec<&str> = split_list(field).collect();
                if parts.len() != 2 {
                    return Err(bad("pair"));
                }
                let p = parse_f64(parts[0]).ok_or_else(|| bad("pair"))?;
                let n = parse_f64(parts[1]).ok_or_else(|| bad("pair"))?;
                PolarityLabel::Pair(p, n)
            }
            ScaleFamily::RaterHistogram { n_points, .. } => {
                let ratings = split_list(field)
                    .map(|s| s.parse::<u32>().map_err(|_| bad("rater")))
                    .collect::<Result<Vec<_>>>()?;
                PolarityLabel::Raters {
                    n_points: *n_points,
                    ratings,
                }
            }
        };
        label.validate_for(self)?;
        Ok(label)
    }
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|p| !p.is_empty())
}

fn parse_f64(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

impl fmt::Display for ScaleFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScaleFamily::RaterHistogram { n_raters, n_points } => {
                write!(f, "{},n_raters={n_raters},n_points={n_points}", self.tag())
            }
            _ => f.write_str(self.tag()),
        }
    }
}

impl FromStr for ScaleFamily {
    type Err = Error;

    /// Accepts the normalized header form (`rater-histogram,n_raters=10,n_points=9`)
    /// and short aliases (`binary`, `signed`, `pair`, `rater`, `vader`).
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.trim().split(',').map(str::trim);
        let tag = parts.next().unwrap_or_default().to_lowercase();
        let mut n_raters = 10u32;
        let mut n_points = 9u32;
        for kv in parts {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("bad family option {kv:?}")))?;
            let v: u32 = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad family option {kv:?}")))?;
            match k.trim() {
                "n_raters" => n_raters = v,
                "n_points" => n_points = v,
                _ => return Err(Error::Config(format!("unknown family option {k:?}"))),
            }
        }
        let family = match tag.as_str() {
            "binary" => ScaleFamily::Binary,
            "signed-continuous" | "signed" => ScaleFamily::SignedContinuous,
            "pair-continuous" | "pair" => ScaleFamily::PairContinuous,
            "rater-histogram" | "rater" | "vader" => {
                if n_raters == 0 || n_points < 2 {
                    return Err(Error::Config(
                        "rater histogram needs n_raters >= 1 and n_points >= 2".into(),
                    ));
                }
                ScaleFamily::RaterHistogram { n_raters, n_points }
            }
            _ => return Err(Error::Config(format!("unknown scale family {tag:?}"))),
        };
        Ok(family)
    }
}

/// One observed label `x_d^w`.
#[derive(Debug, Clone, PartialEq)]
pub enum PolarityLabel {
    Binary(u8),
    Signed(f64),
    /// (positive strength, negative strength)
    Pair(f64, f64),
    Raters { n_points: u32, ratings: Vec<u32> },
}

impl PolarityLabel {
    pub fn family(&self) -> ScaleFamily {
        match self {
            PolarityLabel::Binary(_) => ScaleFamily::Binary,
            PolarityLabel::Signed(_) => ScaleFamily::SignedContinuous,
            PolarityLabel::Pair(..) => ScaleFamily::PairContinuous,
            PolarityLabel::Raters { n_points, ratings } => ScaleFamily::RaterHistogram {
                n_raters: ratings.len() as u32,
                n_points: *n_points,
            },
        }
    }

    /// Check the value against its own family's domain.
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            PolarityLabel::Binary(v) => *v <= 1,
            PolarityLabel::Signed(v) => v.is_finite() && (-1.0..=1.0).contains(v),
            PolarityLabel::Pair(p, n) => {
                [p, n].iter().all(|v| v.is_finite() && (0.0..=1.0).contains(*v))
            }
            PolarityLabel::Raters { n_points, ratings } => {
                !ratings.is_empty() && *n_points >= 2 && ratings.iter().all(|r| r < n_points)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("label {self} outside its domain")))
        }
    }

    /// Validate and check the label belongs to `family`.
    pub fn validate_for(&self, family: &ScaleFamily) -> Result<()> {
        self.validate()?;
        if self.family() != *family {
            return Err(Error::Domain(format!(
                "label {self} does not belong to family {family}"
            )));
        }
        Ok(())
    }

    /// Numeric encoder input. Ratings are rescaled to `[0, 1]`.
    pub fn encoded(&self) -> Vec<f64> {
        match self {
            PolarityLabel::Binary(v) => alloc::vec![f64::from(*v)],
            PolarityLabel::Signed(v) => alloc::vec![*v],
            PolarityLabel::Pair(p, n) => alloc::vec![*p, *n],
            PolarityLabel::Raters { n_points, ratings } => {
                let top = f64::from(n_points - 1);
                ratings.iter().map(|&r| f64::from(r) / top).collect()
            }
        }
    }
}

impl fmt::Display for PolarityLabel {
    /// Normalized-format label field.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolarityLabel::Binary(v) => write!(f, "{v}"),
            PolarityLabel::Signed(v) => write!(f, "{v}"),
            PolarityLabel::Pair(p, n) => write!(f, "{p},{n}"),
            PolarityLabel::Raters { ratings, .. } => {
                for (i, r) in ratings.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{r}")?;
                }
                Ok(())
            }
        }
    }
}

/// Dead-zone widths used to coarsen labels into three classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoarseThresholds {
    /// For signed and pair labels.
    pub continuous: f64,
    /// For the mean rating around the scale midpoint.
    pub rater: f64,
}

impl Default for CoarseThresholds {
    fn default() -> Self {
        CoarseThresholds {
            continuous: 0.05,
            rater: 0.5,
        }
    }
}

/// Coarse class of a valid label.
pub fn coarse_sentiment(label: &PolarityLabel, thresholds: &CoarseThresholds) -> Sentiment {
    let signed = |v: f64, tau: f64| {
        if v > tau {
            Sentiment::Positive
        } else if v < -tau {
            Sentiment::Negative
        } else {
            Sentiment::Neutral
        }
    };
    match label {
        PolarityLabel::Binary(1) => Sentiment::Positive,
        PolarityLabel::Binary(_) => Sentiment::Negative,
        PolarityLabel::Signed(v) => signed(*v, thresholds.continuous),
        PolarityLabel::Pair(p, n) => signed(p - n, thresholds.continuous),
        PolarityLabel::Raters { n_points, ratings } => {
            let mid = f64::from(n_points - 1) / 2.0;
            let mean =
                ratings.iter().map(|&r| f64::from(r)).sum::<f64>() / ratings.len().max(1) as f64;
            signed(mean - mid, thresholds.rater)
        }
    }
}

/// One lexicon: a word to label map on a single scale.
#[derive(Debug, Clone, PartialEq)]
pub struct LexiconView {
    id: String,
    family: ScaleFamily,
    entries: BTreeMap<String, PolarityLabel>,
}

impl LexiconView {
    pub fn new(id: impl Into<String>, family: ScaleFamily) -> Self {
        LexiconView {
            id: id.into(),
            family,
            entries: BTreeMap::new(),
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn family(&self) -> ScaleFamily {
        self.family
    }

    /// Insert a case-folded entry. Returns `true` when an earlier entry for
    /// the same word was replaced.
    pub fn insert(&mut self, word: &str, label: PolarityLabel) -> Result<bool> {
        label.validate_for(&self.family)?;
        Ok(self.entries.insert(word.to_lowercase(), label).is_some())
    }

    pub fn get(&self, word: &str) -> Option<&PolarityLabel> {
        self.entries.get(word)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &PolarityLabel)> {
        self.entries.iter().map(|(w, l)| (w.as_str(), l))
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

/// Field separator for adapted (non-normalized) lexicon files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delimiter {
    Tab,
    Comma,
    Whitespace,
}

/// Column layout of a lexicon file in some foreign format.
#[derive(Debug, Clone, PartialEq)]
pub struct LexiconSchema {
    pub family: ScaleFamily,
    pub word_col: usize,
    /// Columns joined with `,` to form the label field.
    pub label_cols: Vec<usize>,
    pub delimiter: Delimiter,
    /// Leading lines to skip (column headers).
    pub skip_lines: usize,
    /// Lines starting with this prefix are ignored.
    pub comment: Option<String>,
    /// Extra binary spellings, e.g. `("priorpolarity=positive", 1)`.
    pub binary_map: Vec<(String, u8)>,
}

impl LexiconSchema {
    /// `word<TAB>label` under `family`.
    pub fn simple(family: ScaleFamily) -> Self {
        LexiconSchema {
            family,
            word_col: 0,
            label_cols: alloc::vec![1],
            delimiter: Delimiter::Tab,
            skip_lines: 0,
            comment: Some("#".to_string()),
            binary_map: Vec::new(),
        }
    }
}

/// Bookkeeping from a parse: rows replaced by a later duplicate and rows
/// skipped because the entry is a multi-word expression.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseReport {
    pub rows: usize,
    pub duplicates: usize,
    pub skipped_multiword: usize,
}

/// Parse a lexicon laid out as described by `schema`.
pub fn parse_lexicon(
    id: &str,
    text: &str,
    schema: &LexiconSchema,
) -> Result<(LexiconView, ParseReport)> {
    let mut view = LexiconView::new(id, schema.family);
    let mut report = ParseReport::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        if idx < schema.skip_lines {
            continue;
        }
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        if let Some(prefix) = &schema.comment {
            if line.starts_with(prefix.as_str()) {
                continue;
            }
        }
        let fields: Vec<&str> = match schema.delimiter {
            Delimiter::Tab => line.split('\t').collect(),
            Delimiter::Comma => line.split(',').collect(),
            Delimiter::Whitespace => line.split_whitespace().collect(),
        };
        let word = fields
            .get(schema.word_col)
            .map(|w| w.trim())
            .filter(|w| !w.is_empty())
            .ok_or_else(|| Error::parse(line_no, "missing word column"))?;
        let mut label_parts = Vec::with_capacity(schema.label_cols.len());
        for &c in &schema.label_cols {
            let f = fields
                .get(c)
                .ok_or_else(|| Error::parse(line_no, format!("missing label column {c}")))?;
            label_parts.push(f.trim());
        }
        if word.split_whitespace().nth(1).is_some() {
            report.skipped_multiword += 1;
            continue;
        }
        let field = label_parts.join(",");
        let label = match schema
            .binary_map
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(&field))
        {
            Some((_, v)) if schema.family == ScaleFamily::Binary => PolarityLabel::Binary(*v),
            _ => schema.family.parse_label(&field).map_err(|e| match e {
                Error::Domain(msg) => Error::Domain(format!("line {line_no}: {msg}")),
                other => other,
            })?,
        };
        report.rows += 1;
        if view.insert(word, label)? {
            report.duplicates += 1;
        }
    }
    Ok((view, report))
}

/// Header line of the normalized format.
pub fn normalized_header(family: &ScaleFamily) -> String {
    format!("#family={family}")
}

/// Parse the normalized format: a `#family=...` header, then `word<TAB>label`.
/// Lines starting with `# ` are comments (a word never contains a space).
pub fn parse_normalized(id: &str, text: &str) -> Result<(LexiconView, ParseReport)> {
    let first = text
        .lines()
        .next()
        .ok_or_else(|| Error::parse(1, "empty lexicon file"))?;
    let family: ScaleFamily = first
        .trim()
        .strip_prefix("#family=")
        .ok_or_else(|| Error::parse(1, "expected `#family=<tag>` header"))?
        .parse()
        .map_err(|e: Error| Error::parse(1, format!("{e}")))?;
    let mut schema = LexiconSchema::simple(family);
    schema.skip_lines = 1;
    schema.comment = Some("# ".into());
    parse_lexicon(id, text, &schema)
}

/// Serialize a view in the normalized format (rows sorted by word).
pub fn to_normalized(view: &LexiconView) -> String {
    let mut out = normalized_header(&view.family);
    out.push('\n');
    for (w, l) in view.entries() {
        out.push_str(w);
        out.push('\t');
        out.push_str(&l.to_string());
        out.push('\n');
    }
    out
}

/// The union vocabulary `W` with per-word lexicon membership.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CombinedVocabulary {
    membership: BTreeMap<String, BTreeSet<String>>,
}

impl CombinedVocabulary {
    pub fn len(&self) -> usize {
        self.membership.len()
    }

    pub fn is_empty(&self) -> bool {
        self.membership.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.membership.contains_key(word)
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.membership.keys().map(String::as_str)
    }

    /// Ids of the views containing `word`.
    pub fn membership(&self, word: &str) -> Option<&BTreeSet<String>> {
        self.membership.get(word)
    }

    /// `c(w)`: number of views containing `word` (0 when absent).
    pub fn count(&self, word: &str) -> usize {
        self.membership.get(word).map_or(0, BTreeSet::len)
    }
}

/// Union of all views' words with membership sets.
pub fn build_vocabulary(views: &[LexiconView]) -> Result<CombinedVocabulary> {
    if views.is_empty() {
        return Err(Error::Config("no lexicon views given".into()));
    }
    let mut ids = BTreeSet::new();
    let mut membership: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for v in views {
        if !ids.insert(v.id()) {
            return Err(Error::Config(format!("duplicate view id {:?}", v.id())));
        }
        for w in v.words() {
            membership
                .entry(w.to_string())
                .or_default()
                .insert(v.id().to_string());
        }
    }
    Ok(CombinedVocabulary { membership })
}

/// Three-component Dirichlet prior `alpha^w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirichletPrior {
    pub alpha: [f64; N_CLASSES],
}

impl DirichletPrior {
    pub const UNIFORM: DirichletPrior = DirichletPrior {
        alpha: [1.0; N_CLASSES],
    };
}

/// Prior for `word`: uniform, plus `c(w)` on the agreed class when every
/// view containing the word assigns it the same coarse class.
pub fn compute_prior(
    word: &str,
    views: &[LexiconView],
    vocab: &CombinedVocabulary,
    thresholds: &CoarseThresholds,
) -> DirichletPrior {
    let Some(members) = vocab.membership(word) else {
        return DirichletPrior::UNIFORM;
    };
    let mut classes = views
        .iter()
        .filter(|v| members.contains(v.id()))
        .filter_map(|v| v.get(word))
        .map(|l| coarse_sentiment(l, thresholds));
    let Some(first) = classes.next() else {
        return DirichletPrior::UNIFORM;
    };
    if classes.all(|c| c == first) {
        let mut alpha = [1.0; N_CLASSES];
        alpha[first.index()] += members.len() as f64;
        DirichletPrior { alpha }
    } else {
        DirichletPrior::UNIFORM
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn view(id: &str, family: ScaleFamily, rows: &[(&str, PolarityLabel)]) -> LexiconView {
        let mut v = LexiconView::new(id, family);
        for (w, l) in rows {
            v.insert(w, l.clone()).unwrap();
        }
        v
    }

    #[test]
    fn parses_signed_and_binary_rows() {
        let (v, _) =
            parse_lexicon("sn", "peppy\t0.65\n", &LexiconSchema::simple(ScaleFamily::SignedContinuous))
                .unwrap();
        assert_eq!(v.get("peppy"), Some(&PolarityLabel::Signed(0.65)));

        let mut schema = LexiconSchema::simple(ScaleFamily::Binary);
        schema.binary_map = vec![("pos".into(), 1), ("neg".into(), 0)];
        let (v, _) = parse_lexicon("hl", "Peppy\tpos\n", &schema).unwrap();
        assert_eq!(v.get("peppy"), Some(&PolarityLabel::Binary(1)));
    }

    #[test]
    fn out_of_domain_is_a_domain_error() {
        let err = parse_lexicon(
            "sn",
            "good\t1.5\n",
            &LexiconSchema::simple(ScaleFamily::SignedContinuous),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Domain(_)), "{err:?}");
    }

    #[test]
    fn malformed_row_reports_line() {
        let err = parse_lexicon(
            "sn",
            "good\t0.5\nbad\n",
            &LexiconSchema::simple(ScaleFamily::SignedContinuous),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn duplicates_last_wins_and_multiword_skipped() {
        let (v, report) = parse_lexicon(
            "sn",
            "good\t0.5\nGood\t0.7\nnot good\t-0.5\n",
            &LexiconSchema::simple(ScaleFamily::SignedContinuous),
        )
        .unwrap();
        assert_eq!(v.get("good"), Some(&PolarityLabel::Signed(0.7)));
        assert_eq!(report.duplicates, 1);
        assert_eq!(report.skipped_multiword, 1);
        assert_eq!(v.len(), 1);
    }

    #[test]
    fn rater_labels_validate_range_and_count() {
        let fam = ScaleFamily::VADER;
        assert!(fam.parse_label("4,4,4,4,4,4,4,4,4,4").is_ok());
        assert!(fam.parse_label("4,4,4,4,4,4,4,4,4,9").is_err());
        assert!(fam.parse_label("4,4,4").is_err());
    }

    #[test]
    fn family_header_round_trip() {
        for fam in [
            ScaleFamily::Binary,
            ScaleFamily::SignedContinuous,
            ScaleFamily::PairContinuous,
            ScaleFamily::VADER,
        ] {
            let s = fam.to_string();
            assert_eq!(s.parse::<ScaleFamily>().unwrap(), fam);
        }
        assert!("ternary".parse::<ScaleFamily>().is_err());
    }

    #[test]
    fn coarse_classes() {
        let t = CoarseThresholds::default();
        assert_eq!(coarse_sentiment(&PolarityLabel::Signed(0.65), &t), Sentiment::Positive);
        assert_eq!(coarse_sentiment(&PolarityLabel::Signed(-0.3), &t), Sentiment::Negative);
        assert_eq!(coarse_sentiment(&PolarityLabel::Signed(0.05), &t), Sentiment::Neutral);
        assert_eq!(coarse_sentiment(&PolarityLabel::Pair(0.0, 0.0), &t), Sentiment::Neutral);
        assert_eq!(coarse_sentiment(&PolarityLabel::Pair(1.0, 0.0), &t), Sentiment::Positive);
        assert_eq!(coarse_sentiment(&PolarityLabel::Binary(0), &t), Sentiment::Negative);
        let all4 = PolarityLabel::Raters {
            n_points: 9,
            ratings: vec![4; 10],
        };
        assert_eq!(coarse_sentiment(&all4, &t), Sentiment::Neutral);
        let high = PolarityLabel::Raters {
            n_points: 9,
            ratings: vec![6; 10],
        };
        assert_eq!(coarse_sentiment(&high, &t), Sentiment::Positive);
    }

    #[test]
    fn vocabulary_union_and_counts() {
        let a = view("A", ScaleFamily::Binary, &[("x", PolarityLabel::Binary(1)), ("y", PolarityLabel::Binary(1))]);
        let b = view("B", ScaleFamily::Binary, &[("y", PolarityLabel::Binary(1)), ("z", PolarityLabel::Binary(0))]);
        let vocab = build_vocabulary(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(vocab.words().collect::<Vec<_>>(), ["x", "y", "z"]);
        assert_eq!(vocab.count("y"), 2);
        assert_eq!(vocab.count("x"), 1);
        assert_eq!(vocab.count("z"), 1);
        assert_eq!(build_vocabulary(&[b, a]).unwrap(), vocab);

        assert!(matches!(build_vocabulary(&[]), Err(Error::Config(_))));
        let dup = view("A", ScaleFamily::Binary, &[]);
        assert!(build_vocabulary(&[dup.clone(), dup]).is_err());
    }

    #[test]
    fn prior_spur_rules() {
        let t = CoarseThresholds::default();
        let views = [
            view("A", ScaleFamily::Binary, &[("superb", PolarityLabel::Binary(1)), ("meh", PolarityLabel::Binary(1))]),
            view("B", ScaleFamily::SignedContinuous, &[("superb", PolarityLabel::Signed(0.9)), ("meh", PolarityLabel::Signed(-0.4)), ("so", PolarityLabel::Signed(0.0))]),
            view("C", ScaleFamily::PairContinuous, &[("superb", PolarityLabel::Pair(0.8, 0.1))]),
        ];
        let vocab = build_vocabulary(&views).unwrap();
        assert_eq!(compute_prior("superb", &views, &vocab, &t).alpha, [4.0, 1.0, 1.0]);
        assert_eq!(compute_prior("meh", &views, &vocab, &t).alpha, [1.0, 1.0, 1.0]);
        // single neutral view: 1 + c(w) = 2 on the neutral (third) component
        assert_eq!(compute_prior("so", &views, &vocab, &t).alpha, [1.0, 1.0, 2.0]);
        assert_eq!(compute_prior("absent", &views, &vocab, &t).alpha, [1.0, 1.0, 1.0]);
    }
}
