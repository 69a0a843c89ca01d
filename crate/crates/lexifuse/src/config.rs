//! Run configuration: `key = value` lines, `#` comments.
//!
//! Training keys are the [`TrainConfig`] field names. Ingest and evaluation
//! add `tau_continuous`, `tau_rater`, `l2`, `max_iter` and `tol`. Column
//! layouts for foreign lexicon files are declared as named schemas:
//!
//! ```text
//! schema.mpqa.family = binary
//! schema.mpqa.delimiter = whitespace
//! schema.mpqa.word_col = 0
//! schema.mpqa.label_cols = 1
//! schema.mpqa.binary.positive = 1
//! schema.mpqa.binary.negative = 0
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use lexifuse_core::eval::FitOptions;
use lexifuse_core::lexicon::{CoarseThresholds, Delimiter, LexiconSchema};
use lexifuse_core::{Error, ScaleFamily, TrainConfig};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub train: TrainConfig,
    pub thresholds: CoarseThresholds,
    pub fit: FitOptions,
    pub schemas: BTreeMap<String, LexiconSchema>,
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, Error> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("bad value {value:?} for {key}")))
}

fn delimiter_name(d: Delimiter) -> &'static str {
    match d {
        Delimiter::Tab => "tab",
        Delimiter::Comma => "comma",
        Delimiter::Whitespace => "whitespace",
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut cfg = RunConfig::default();
        let mut raw_schemas: BTreeMap<String, Vec<(String, String)>> = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(i + 1, format!("expected key = value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            if let Some(rest) = key.strip_prefix("schema.") {
                let (name, field) = rest
                    .split_once('.')
                    .ok_or_else(|| Error::Config(format!("bad schema key {key:?}")))?;
                raw_schemas
                    .entry(name.to_string())
                    .or_default()
                    .push((field.to_string(), value.to_string()));
                continue;
            }
            cfg.set(key, value)?;
        }
        for (name, fields) in raw_schemas {
            let schema = build_schema(&name, &fields)?;
            cfg.schemas.insert(name, schema);
        }
        cfg.train.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| CliError::in_file(path, e))
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), Error> {
        let t = &mut self.train;
        match key {
            "learning_rate" => t.learning_rate = num(key, value)?,
            "adam_beta1" => t.adam_beta1 = num(key, value)?,
            "adam_beta2" => t.adam_beta2 = num(key, value)?,
            "adam_eps" => t.adam_eps = num(key, value)?,
            "batch_size" => t.batch_size = num(key, value)?,
            "epochs" => t.epochs = num(key, value)?,
            "n_mc" => t.n_mc = num(key, value)?,
            "seed" => t.seed = num(key, value)?,
            "weight_init_scale" => t.weight_init_scale = num(key, value)?,
            "hidden_dim" => t.hidden_dim = num(key, value)?,
            "tau_continuous" => self.thresholds.continuous = num(key, value)?,
            "tau_rater" => self.thresholds.rater = num(key, value)?,
            "l2" => self.fit.l2 = num(key, value)?,
            "max_iter" => self.fit.max_iter = num(key, value)?,
            "tol" => self.fit.tol = num(key, value)?,
            _ => return Err(Error::Config(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    /// Every effective setting except the seed, one `key=value` per line in
    /// a fixed order.
    pub fn canonical(&self) -> String {
        let t = &self.train;
        let mut s = String::new();
        let _ = writeln!(s, "learning_rate={}", t.learning_rate);
        let _ = writeln!(s, "adam_beta1={}", t.adam_beta1);
        let _ = writeln!(s, "adam_beta2={}", t.adam_beta2);
        let _ = writeln!(s, "adam_eps={}", t.adam_eps);
        let _ = writeln!(s, "batch_size={}", t.batch_size);
        let _ = writeln!(s, "epochs={}", t.epochs);
        let _ = writeln!(s, "n_mc={}", t.n_mc);
        let _ = writeln!(s, "weight_init_scale={}", t.weight_init_scale);
        let _ = writeln!(s, "hidden_dim={}", t.hidden_dim);
        let _ = writeln!(s, "tau_continuous={}", self.thresholds.continuous);
        let _ = writeln!(s, "tau_rater={}", self.thresholds.rater);
        let _ = writeln!(s, "l2={}", self.fit.l2);
        let _ = writeln!(s, "max_iter={}", self.fit.max_iter);
        let _ = writeln!(s, "tol={}", self.fit.tol);
        for (name, sc) in &self.schemas {
            let cols: Vec<String> = sc.label_cols.iter().map(|c| c.to_string()).collect();
            let _ = writeln!(
                s,
                "schema.{name}={}|{}|{}|{}|{}|{:?}|{:?}",
                sc.family,
                sc.word_col,
                cols.join(","),
                delimiter_name(sc.delimiter),
                sc.skip_lines,
                sc.comment,
                sc.binary_map
            );
        }
        s
    }

    /// First 16 hex digits of the SHA-256 of [`RunConfig::canonical`].
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().take(8).fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

fn build_schema(name: &str, fields: &[(String, String)]) -> Result<LexiconSchema, Error> {
    let family = fields
        .iter()
        .find(|(k, _)| k == "family")
        .ok_or_else(|| Error::Config(format!("schema {name:?} has no family")))?
        .1
        .parse::<ScaleFamily>()?;
    let mut schema = LexiconSchema::simple(family);
    for (k, v) in fields {
        let key = format!("schema.{name}.{k}");
        match k.as_str() {
            "family" => {}
            "word_col" => schema.word_col = num(&key, v)?,
            "label_cols" => {
                schema.label_cols = v
                    .split(',')
                    .map(|c| num(&key, c.trim()))
                    .collect::<Result<_, _>>()?
            }
            "delimiter" => {
                schema.delimiter = match v.as_str() {
                    "tab" => Delimiter::Tab,
                    "comma" => Delimiter::Comma,
                    "whitespace" => Delimiter::Whitespace,
                    _ => return Err(Error::Config(format!("bad delimiter {v:?} for {key}"))),
                }
            }
            "skip_lines" => schema.skip_lines = num(&key, v)?,
            "comment" => schema.comment = if v.is_empty() { None } else { Some(v.clone()) },
            other => match other.strip_prefix("binary.") {
                Some(token) => schema.binary_map.push((token.to_string(), num(&key, v)?)),
                None => return Err(Error::Config(format!("unknown schema key {key:?}"))),
            },
        }
    }
    if schema.label_cols.is_empty() {
        return Err(Error::Config(format!("schema {name:?} has no label columns")));
    }
    Ok(schema)
}
