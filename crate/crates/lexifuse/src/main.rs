use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use lexifuse::config::RunConfig;
use lexifuse::formats::{self, Checkpoint, Provenance};
use lexifuse::parallel::Parallel;
use lexifuse::pipeline::{self, ViewSpec};
use lexifuse::{CliError, CliResult};
use lexifuse_core::eval::{restrict_vocabulary, FeatureMode};
use lexifuse_core::synth::SynthConfig;

#[derive(Parser)]
#[command(name = "lexifuse", version, about = "Fuse sentiment lexica into one Dirichlet-valued lexicon")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run config file (`key = value` lines)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config seed
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn load(&self) -> CliResult<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.train.seed = s;
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Train encoder/decoder heads on a set of lexicon views
    Train {
        #[command(flatten)]
        common: Common,
        /// Views as `[id=]path[:schema]`
        #[arg(long, num_args = 1.., required = true)]
        views: Vec<ViewSpec>,
        /// Output directory for checkpoint.txt and train_log.csv
        #[arg(long)]
        out: PathBuf,
        /// Continue from this checkpoint
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Write the unified lexicon from a trained checkpoint
    Export {
        #[command(flatten)]
        common: Common,
        /// Checkpoint written by `train`
        #[arg(long)]
        checkpoint: PathBuf,
        /// The views the checkpoint was trained on
        #[arg(long, num_args = 1.., required = true)]
        views: Vec<ViewSpec>,
        /// Unified lexicon TSV to write
        #[arg(long)]
        out: PathBuf,
    },
    /// Downstream classification accuracy and coverage per representation
    Eval {
        #[command(flatten)]
        common: Common,
        /// fused-mean, fused-beta, single:<view> or concat; repeatable
        #[arg(long, num_args = 1.., default_value = "fused-mean")]
        mode: Vec<String>,
        /// Unified lexicon TSV, needed by the fused modes
        #[arg(long)]
        lexicon: Option<PathBuf>,
        /// Views for the single and concat modes and for --restrict
        #[arg(long, num_args = 1..)]
        views: Vec<ViewSpec>,
        /// Training and test corpora (`label<TAB>text`)
        #[arg(long, num_args = 2, value_names = ["TRAIN", "TEST"], required = true)]
        corpus: Vec<PathBuf>,
        /// Restrict the fused lexicon to the vocabulary of this view
        #[arg(long)]
        restrict: Option<String>,
        /// Report CSV to write
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate synthetic views, ground truth and a labeled corpus
    Synth {
        #[command(flatten)]
        common: Common,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
        /// Size of the ground-truth vocabulary
        #[arg(long, default_value_t = 500)]
        n_words: usize,
        /// Views per scale family (pair, rater, binary, signed)
        #[arg(long, default_value_t = 1)]
        views_per_family: usize,
        /// Probability that a view mislabels a word
        #[arg(long, default_value_t = 0.1)]
        label_noise: f64,
        /// Labeled texts in the corpus
        #[arg(long, default_value_t = 2500)]
        n_texts: usize,
        /// Texts in the training split; the rest are test texts
        #[arg(long, default_value_t = 2000)]
        n_train: usize,
        /// Tokens per text
        #[arg(long, default_value_t = 20)]
        text_len: usize,
    },
    /// Parse views and report schema and domain problems
    Validate {
        #[command(flatten)]
        common: Common,
        /// Views as `[id=]path[:schema]`
        #[arg(long, num_args = 1.., required = true)]
        views: Vec<ViewSpec>,
    },
}

fn provenance(cfg: &RunConfig) -> Provenance {
    Provenance {
        seed: cfg.train.seed,
        config_hash: cfg.hash(),
    }
}

fn cmd_train(common: &Common, views: &[ViewSpec], out: &Path, resume: Option<&Path>) -> CliResult<()> {
    let cfg = common.load()?;
    let prov = provenance(&cfg);
    let loaded = pipeline::load_views(views, &cfg)?;
    let prep = pipeline::prepare(loaded.into_iter().map(|(v, _)| v).collect(), &cfg)?;
    let resume = match resume {
        Some(p) => {
            let ck = formats::read_checkpoint(p)?;
            if ck.provenance != prov {
                log::warn!(
                    "resuming from {} trained with seed {} config {}; now seed {} config {}",
                    p.display(),
                    ck.provenance.seed,
                    ck.provenance.config_hash,
                    prov.seed,
                    prov.config_hash
                );
            }
            Some(ck.state)
        }
        None => None,
    };
    let executor = Parallel::from_env()?;
    log::info!(
        "training on {} words from {} views with {} threads",
        prep.observations.len(),
        prep.views.len(),
        executor.threads()
    );
    let start = Instant::now();
    let mut log_csv = prov.lines();
    log_csv.push_str(formats::TRAIN_LOG_HEADER);
    log_csv.push('\n');
    let (state, _) = pipeline::train_model(&prep, &cfg, resume, &executor, |l, _| {
        log::info!("epoch {} mean elbo {:.4}", l.epoch, l.mean_elbo);
        log_csv.push_str(&formats::train_log_row(l, start.elapsed().as_secs_f64()));
        log_csv.push('\n');
    })?;
    let ck = Checkpoint {
        state,
        provenance: prov,
    };
    formats::write_text(&out.join("checkpoint.txt"), &formats::checkpoint_to_string(&ck))?;
    formats::write_text(&out.join("train_log.csv"), &log_csv)?;
    Ok(())
}

fn cmd_export(common: &Common, checkpoint: &Path, views: &[ViewSpec], out: &Path) -> CliResult<()> {
    let cfg = common.load()?;
    let ck = formats::read_checkpoint(checkpoint)?;
    let loaded = pipeline::load_views(views, &cfg)?;
    let prep = pipeline::prepare(loaded.into_iter().map(|(v, _)| v).collect(), &cfg)?;
    let export = pipeline::export(&ck.state, &prep)?;
    log::info!(
        "exported {} words, skipped {}",
        export.lexicon.len(),
        export.skipped.len()
    );
    formats::write_text(out, &formats::unified_to_string(&export.lexicon, &ck.provenance))
}

struct EvalArgs<'a> {
    modes: &'a [String],
    lexicon: Option<&'a Path>,
    views: &'a [ViewSpec],
    corpus: &'a [PathBuf],
    restrict: Option<&'a str>,
    out: &'a Path,
}

fn cmd_eval(common: &Common, a: EvalArgs<'_>) -> CliResult<()> {
    let cfg = common.load()?;
    let modes: Vec<FeatureMode> = a.modes.iter().map(|m| pipeline::parse_mode(m)).collect::<CliResult<_>>()?;
    let needs_fused = modes
        .iter()
        .any(|m| matches!(m, FeatureMode::FusedMean | FeatureMode::FusedBeta));
    let mut prov = provenance(&cfg);
    let fused = match a.lexicon {
        Some(p) => {
            let text = formats::read_text(p)?;
            if common.seed.is_none() {
                if let Some(lp) = Provenance::scan(&text) {
                    prov.seed = lp.seed;
                }
            }
            Some(formats::parse_unified(&text).map_err(|e| CliError::in_file(p, e))?)
        }
        None if needs_fused => {
            return Err(CliError::Usage("fused modes need --lexicon".into()));
        }
        None => None,
    };
    let views: Vec<_> = pipeline::load_views(a.views, &cfg)?
        .into_iter()
        .map(|(v, _)| v)
        .collect();
    let fused = match (fused, a.restrict) {
        (Some(f), Some(id)) => {
            let view = views
                .iter()
                .find(|v| v.id() == id)
                .ok_or_else(|| CliError::Usage(format!("--restrict names unknown view {id:?}")))?;
            Some(restrict_vocabulary(&f, view))
        }
        (f, _) => f,
    };
    let (train, test) = formats::read_corpus_pair(&a.corpus[0], &a.corpus[1])?;
    let dataset = a.corpus[0]
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("corpus")
        .to_string();
    let reports = pipeline::evaluate_modes(&modes, fused.as_ref(), &views, &train, &test, &cfg)?;
    let rows: Vec<_> = reports
        .into_iter()
        .map(|r| {
            log::info!("{}: accuracy {:.4}, feature_dim {}", r.mode, r.accuracy, r.feature_dim);
            if !r.converged {
                log::warn!("{}: logistic regression hit max_iter before converging", r.mode);
            }
            (r, dataset.clone())
        })
        .collect();
    formats::write_text(a.out, &formats::report_to_string(&rows, &prov))
}

fn cmd_validate(common: &Common, views: &[ViewSpec]) -> CliResult<()> {
    let cfg = common.load()?;
    let mut first_err = None;
    println!("view\tfamily\trows\tentries\tduplicates\tskipped_multiword");
    for spec in views {
        match pipeline::load_views(std::slice::from_ref(spec), &cfg) {
            Ok(mut v) => {
                let (view, r) = v.remove(0);
                println!(
                    "{}\t{}\t{}\t{}\t{}\t{}",
                    view.id(),
                    view.family(),
                    r.rows,
                    view.len(),
                    r.duplicates,
                    r.skipped_multiword
                );
            }
            Err(e) => {
                eprintln!("{}: {e}", spec.id);
                first_err.get_or_insert(e);
            }
        }
    }
    first_err.map_or(Ok(()), Err)
}

fn run(cli: Cli) -> CliResult<()> {
    match &cli.command {
        Command::Train {
            common,
            views,
            out,
            resume,
        } => cmd_train(common, views, out, resume.as_deref()),
        Command::Export {
            common,
            checkpoint,
            views,
            out,
        } => cmd_export(common, checkpoint, views, out),
        Command::Eval {
            common,
            mode,
            lexicon,
            views,
            corpus,
            restrict,
            out,
        } => cmd_eval(
            common,
            EvalArgs {
                modes: mode,
                lexicon: lexicon.as_deref(),
                views,
                corpus,
                restrict: restrict.as_deref(),
                out,
            },
        ),
        Command::Synth {
            common,
            out,
            n_words,
            views_per_family,
            label_noise,
            n_texts,
            n_train,
            text_len,
        } => {
            let cfg = common.load()?;
            let sc = SynthConfig {
                n_words: *n_words,
                n_views_per_family: *views_per_family,
                label_noise: *label_noise,
                n_texts: *n_texts,
                text_len: *text_len,
                ..SynthConfig::default()
            };
            let split = pipeline::synth(&sc, cfg.train.seed, *n_train)?;
            for p in pipeline::write_synth(out, &split, &provenance(&cfg))? {
                log::info!("wrote {}", p.display());
            }
            Ok(())
        }
        Command::Validate { common, views } => cmd_validate(common, views),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lexifuse: {} error: {e}", e.category());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
