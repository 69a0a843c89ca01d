//! On-disk formats: lexicon views, the unified lexicon, corpora,
//! checkpoints, training logs and evaluation reports.
//!
//! Every artifact starts with `# ` provenance lines naming the tool
//! version, seed and config hash. Readers skip them.

use std::fmt::Write as _;
use std::path::Path;

use lexifuse_core::eval::{tokenize, EvalReport, LabeledCorpus};
use lexifuse_core::lexicon::{parse_lexicon, parse_normalized, to_normalized, LexiconSchema, ParseReport};
use lexifuse_core::model::ViewModel;
use lexifuse_core::train::EpochLog;
use lexifuse_core::{
    AdamState, EmissionFamily, Error, LexiconView, MlpHead, ModelState, ScaleFamily, UnifiedEntry,
    UnifiedLexicon, COMPONENT_ORDER,
};

use crate::error::{CliError, CliResult};
use crate::TOOL_VERSION;

/// Seed and config hash stamped on every artifact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub seed: u64,
    pub config_hash: String,
}

impl Provenance {
    pub fn lines(&self) -> String {
        format!(
            "# {TOOL_VERSION}\n# seed={}\n# config_hash={}\n",
            self.seed, self.config_hash
        )
    }

    /// Recover provenance from the `# ` lines of an artifact, if present.
    pub fn scan(text: &str) -> Option<Provenance> {
        let mut seed = None;
        let mut hash = None;
        for line in text.lines().take_while(|l| l.starts_with('#')) {
            if let Some(v) = line.strip_prefix("# seed=") {
                seed = v.trim().parse().ok();
            } else if let Some(v) = line.strip_prefix("# config_hash=") {
                hash = Some(v.trim().to_string());
            }
        }
        Some(Provenance {
            seed: seed?,
            config_hash: hash?,
        })
    }
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Read a view in the normalized format, or through `schema` if given.
pub fn read_lexicon(
    path: &Path,
    id: &str,
    schema: Option<&LexiconSchema>,
) -> CliResult<(LexiconView, ParseReport)> {
    let text = read_text(path)?;
    let parsed = match schema {
        Some(s) => parse_lexicon(id, &text, s),
        None => parse_normalized(id, &text),
    };
    parsed.map_err(|e| CliError::in_file(path, e))
}

/// Normalized format with provenance comments after the family header.
pub fn lexicon_to_string(view: &LexiconView, prov: &Provenance) -> String {
    let body = to_normalized(view);
    let (header, rows) = body.split_once('\n').unwrap_or((&body, ""));
    format!("{header}\n{}{rows}", prov.lines())
}

pub const UNIFIED_HEADER: &str =
    "word\tbeta_pos\tbeta_neg\tbeta_neu\tmean_pos\tmean_neg\tmean_neu\tn_views";

/// 12 significant digits.
fn sci(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn unified_to_string(lexicon: &UnifiedLexicon, prov: &Provenance) -> String {
    let mut out = prov.lines();
    out.push_str(UNIFIED_HEADER);
    out.push('\n');
    for e in lexicon.iter() {
        let _ = write!(out, "{}", e.word);
        for x in e.beta.iter().chain(&e.mean) {
            let _ = write!(out, "\t{}", sci(*x));
        }
        let _ = writeln!(out, "\t{}", e.n_views);
    }
    out
}

pub fn parse_unified(text: &str) -> Result<UnifiedLexicon, Error> {
    let mut lex = UnifiedLexicon::new();
    let mut seen_header = false;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        if !seen_header {
            if line.trim_end() != UNIFIED_HEADER {
                return Err(Error::parse(line_no, "expected unified lexicon header"));
            }
            seen_header = true;
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 8 {
            return Err(Error::parse(line_no, format!("expected 8 fields, got {}", f.len())));
        }
        let mut nums = [0.0; 6];
        for (k, slot) in nums.iter_mut().enumerate() {
            *slot = f[k + 1]
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad number {:?}", f[k + 1])))?;
        }
        let n_views = f[7]
            .parse()
            .map_err(|_| Error::parse(line_no, format!("bad view count {:?}", f[7])))?;
        lex.insert(UnifiedEntry {
            word: f[0].to_string(),
            beta: [nums[0], nums[1], nums[2]],
            mean: [nums[3], nums[4], nums[5]],
            n_views,
        });
    }
    if !seen_header {
        return Err(Error::parse(1, "missing unified lexicon header"));
    }
    Ok(lex)
}

pub fn read_unified(path: &Path) -> CliResult<UnifiedLexicon> {
    parse_unified(&read_text(path)?).map_err(|e| CliError::in_file(path, e))
}

/// `label<TAB>text` rows. The class count is `max label + 1` unless given.
pub fn parse_corpus(text: &str, n_classes: Option<usize>) -> Result<LabeledCorpus, Error> {
    let mut texts = Vec::new();
    let mut labels = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let (label, body) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(i + 1, "expected label<TAB>text"))?;
        let label: usize = label
            .trim()
            .parse()
            .map_err(|_| Error::parse(i + 1, format!("bad label {label:?}")))?;
        labels.push(label);
        texts.push(tokenize(body));
    }
    let k = n_classes.unwrap_or_else(|| labels.iter().max().map_or(0, |m| m + 1));
    LabeledCorpus::new(texts, labels, k)
}

pub fn corpus_to_string(corpus: &LabeledCorpus, prov: &Provenance) -> String {
    let mut out = prov.lines();
    for (t, l) in corpus.texts.iter().zip(&corpus.labels) {
        let _ = writeln!(out, "{l}\t{}", t.join(" "));
    }
    out
}

/// Read a train/test pair with a shared class count.
pub fn read_corpus_pair(train: &Path, test: &Path) -> CliResult<(LabeledCorpus, LabeledCorpus)> {
    let (tr_text, te_text) = (read_text(train)?, read_text(test)?);
    let max_label = |t: &str| -> usize {
        t.lines()
            .filter(|l| !l.starts_with('#'))
            .filter_map(|l| l.split_once('\t')?.0.trim().parse::<usize>().ok())
            .max()
            .map_or(0, |m| m + 1)
    };
    let k = max_label(&tr_text).max(max_label(&te_text));
    let tr = parse_corpus(&tr_text, Some(k)).map_err(|e| CliError::in_file(train, e))?;
    let te = parse_corpus(&te_text, Some(k)).map_err(|e| CliError::in_file(test, e))?;
    Ok((tr, te))
}

pub const CHECKPOINT_MAGIC: &str = "lexifuse-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

/// A model snapshot with the settings it was trained under.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub state: ModelState,
    pub provenance: Provenance,
}

fn join_floats(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn head_line(tag: &str, h: &MlpHead) -> String {
    format!(
        "{tag}\t{}\t{}\t{}\t{}",
        h.input_dim(),
        h.hidden_dim(),
        h.output_dim(),
        join_floats(h.params())
    )
}

/// Line-oriented text dump. Floats use the shortest representation that
/// parses back to the same bits.
pub fn checkpoint_to_string(ck: &Checkpoint) -> String {
    let st = &ck.state;
    let mut out = format!("{CHECKPOINT_MAGIC} {CHECKPOINT_VERSION}\n");
    out.push_str(&ck.provenance.lines());
    let order: Vec<&str> = COMPONENT_ORDER.iter().map(|s| s.as_str()).collect();
    let _ = writeln!(out, "components\t{}", order.join(","));
    let _ = writeln!(out, "config_hash\t{}", ck.provenance.config_hash);
    let _ = writeln!(out, "seed\t{}", ck.provenance.seed);
    let _ = writeln!(out, "epoch\t{}", st.epoch);
    let _ = writeln!(out, "views\t{}", st.views.len());
    for v in &st.views {
        let _ = writeln!(out, "view\t{}\t{}", v.id, v.scale);
        let _ = writeln!(out, "{}", head_line("encoder", &v.encoder));
        let _ = writeln!(out, "{}", head_line("decoder", &v.decoder));
    }
    let _ = writeln!(out, "adam_step\t{}", st.optimizer.step);
    let _ = writeln!(out, "adam_m\t{}", join_floats(&st.optimizer.m));
    let _ = writeln!(out, "adam_v\t{}", join_floats(&st.optimizer.v));
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line_no: usize,
}

impl<'a> Lines<'a> {
    /// Next non-comment line split into a key and the rest.
    fn field(&mut self, key: &str) -> Result<&'a str, Error> {
        for (i, line) in self.inner.by_ref() {
            if line.starts_with('#') {
                continue;
            }
            self.line_no = i + 1;
            let (k, rest) = line.split_once('\t').unwrap_or((line, ""));
            if k != key {
                return Err(Error::parse(self.line_no, format!("expected {key:?}, got {k:?}")));
            }
            return Ok(rest);
        }
        Err(Error::parse(self.line_no + 1, format!("missing {key:?}")))
    }

    fn number<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, Error> {
        let v = self.field(key)?;
        v.trim()
            .parse()
            .map_err(|_| Error::parse(self.line_no, format!("bad {key} {v:?}")))
    }

    fn floats(&self, s: &str) -> Result<Vec<f64>, Error> {
        s.split_whitespace()
            .map(|x| {
                x.parse()
                    .map_err(|_| Error::parse(self.line_no, format!("bad number {x:?}")))
            })
            .collect()
    }

    fn head(&mut self, key: &str) -> Result<MlpHead, Error> {
        let rest = self.field(key)?;
        let mut parts = rest.splitn(4, '\t');
        let mut dim = || -> Result<usize, Error> {
            parts
                .next()
                .and_then(|d| d.parse().ok())
                .ok_or_else(|| Error::parse(self.line_no, format!("bad {key} dimensions")))
        };
        let (i, h, o) = (dim()?, dim()?, dim()?);
        let params = self.floats(parts.next().unwrap_or(""))?;
        MlpHead::from_params(i, h, o, params).map_err(|e| Error::parse(self.line_no, e.to_string()))
    }
}

pub fn parse_checkpoint(text: &str) -> Result<Checkpoint, Error> {
    let mut it = Lines {
        inner: text.lines().enumerate(),
        line_no: 0,
    };
    let magic = it.inner.next().map(|(_, l)| l).unwrap_or("");
    it.line_no = 1;
    let version = magic
        .strip_prefix(CHECKPOINT_MAGIC)
        .and_then(|v| v.trim().parse::<u32>().ok())
        .ok_or_else(|| Error::parse(1, "not a lexifuse checkpoint"))?;
    if version != CHECKPOINT_VERSION {
        return Err(Error::parse(1, format!("unsupported checkpoint version {version}")));
    }
    let components = it.field("components")?;
    let want: Vec<&str> = COMPONENT_ORDER.iter().map(|s| s.as_str()).collect();
    if components.trim() != want.join(",") {
        return Err(Error::parse(
            it.line_no,
            format!("component order {components:?} differs from {}", want.join(",")),
        ));
    }
    let config_hash = it.field("config_hash")?.trim().to_string();
    let seed = it.number("seed")?;
    let epoch = it.number("epoch")?;
    let n_views: usize = it.number("views")?;
    let mut views = Vec::with_capacity(n_views);
    for _ in 0..n_views {
        let rest = it.field("view")?;
        let (id, scale) = rest
            .split_once('\t')
            .ok_or_else(|| Error::parse(it.line_no, "expected view<TAB>id<TAB>scale"))?;
        let scale: ScaleFamily = scale
            .parse()
            .map_err(|e: Error| Error::parse(it.line_no, e.to_string()))?;
        let emission = EmissionFamily::for_scale(scale);
        let encoder = it.head("encoder")?;
        let decoder = it.head("decoder")?;
        if encoder.input_dim() != scale.encoded_dim() || decoder.output_dim() != emission.rho_dim() {
            return Err(Error::parse(it.line_no, format!("head shapes do not fit view {id:?}")));
        }
        views.push(ViewModel {
            id: id.to_string(),
            scale,
            emission,
            encoder,
            decoder,
        });
    }
    let step = it.number("adam_step")?;
    let m_line = it.field("adam_m")?;
    let m = it.floats(m_line)?;
    let v_line = it.field("adam_v")?;
    let v = it.floats(v_line)?;
    let state = ModelState {
        views,
        optimizer: AdamState { m, v, step },
        epoch,
    };
    if state.optimizer.m.len() != state.n_params() || state.optimizer.v.len() != state.n_params() {
        return Err(Error::parse(it.line_no, "optimizer moments do not match parameter count"));
    }
    Ok(Checkpoint {
        state,
        provenance: Provenance { seed, config_hash },
    })
}

pub fn read_checkpoint(path: &Path) -> CliResult<Checkpoint> {
    parse_checkpoint(&read_text(path)?).map_err(|e| CliError::in_file(path, e))
}

pub const TRAIN_LOG_HEADER: &str = "epoch,mean_elbo,recon_term,kl_term,wall_time_s";

pub fn train_log_row(log: &EpochLog, wall_time_s: f64) -> String {
    format!(
        "{},{},{},{},{:.3}",
        log.epoch, log.mean_elbo, log.recon_term, log.kl_term, wall_time_s
    )
}

pub const REPORT_HEADER: &str = "mode,dataset,n_train,n_test,accuracy,coverage,feature_dim";

pub fn report_row(report: &EvalReport, dataset: &str) -> String {
    format!(
        "{},{},{},{},{:.6},{:.4},{}",
        report.mode,
        dataset,
        report.n_train,
        report.n_test,
        report.accuracy,
        report.coverage,
        report.feature_dim
    )
}

pub fn report_to_string(rows: &[(EvalReport, String)], prov: &Provenance) -> String {
    let mut out = prov.lines();
    out.push_str(REPORT_HEADER);
    out.push('\n');
    for (r, dataset) in rows {
        out.push_str(&report_row(r, dataset));
        out.push('\n');
    }
    out
}
