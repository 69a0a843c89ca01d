use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn lexifuse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lexifuse"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SYNTH_VIEWS: [&str; 4] = ["pair-0", "rater-0", "binary-0", "signed-0"];

fn view_args(dir: &Path) -> Vec<PathBuf> {
    SYNTH_VIEWS.iter().map(|v| dir.join(format!("{v}.tsv"))).collect()
}

#[test]
fn synth_train_export_eval_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cfg = d.join("run.cfg");
    std::fs::write(&cfg, "# short run\nepochs = 4\nhidden_dim = 8\n").unwrap();
    let synth = d.join("synth");
    let o = lexifuse(&["synth", "--out", p(&synth), "--seed", "2", "--n-words", "150", "--n-texts", "300", "--n-train", "200"]);
    assert!(o.status.success(), "{}", stderr(&o));

    let views = view_args(&synth);
    let views: Vec<&str> = views.iter().map(|v| p(v)).collect();
    let run = d.join("run");
    let mut args = vec!["train", "--config", p(&cfg), "--seed", "2", "--out", p(&run), "--views"];
    args.extend(&views);
    let o = lexifuse(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    let log = std::fs::read_to_string(run.join("train_log.csv")).unwrap();
    assert!(log.contains("epoch,mean_elbo,recon_term,kl_term,wall_time_s"));
    assert_eq!(log.lines().filter(|l| !l.starts_with('#')).count(), 5);

    let lex = d.join("unified.tsv");
    let ck = run.join("checkpoint.txt");
    let mut args = vec!["export", "--config", p(&cfg), "--checkpoint", p(&ck), "--out", p(&lex), "--views"];
    args.extend(&views);
    let o = lexifuse(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&lex).unwrap();
    assert!(text.contains("# seed=2"));
    assert!(text.contains("word\tbeta_pos\tbeta_neg\tbeta_neu\tmean_pos\tmean_neg\tmean_neu\tn_views"));

    let report = d.join("report.csv");
    let (train, test) = (synth.join("train.tsv"), synth.join("test.tsv"));
    let o = lexifuse(&[
        "eval", "--config", p(&cfg), "--mode", "fused-mean", "--lexicon", p(&lex),
        "--corpus", p(&train), p(&test), "--out", p(&report),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = std::fs::read_to_string(&report).unwrap();
    assert!(r.contains("# config_hash="));
    let rows: Vec<&str> = r.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "mode,dataset,n_train,n_test,accuracy,coverage,feature_dim");
    assert!(rows[1].starts_with("fused-mean,train,200,100,"));

    // resuming a finished run with more epochs continues from the checkpoint
    let more = d.join("more.cfg");
    std::fs::write(&more, "epochs = 6\nhidden_dim = 8\n").unwrap();
    let run2 = d.join("run2");
    let mut args = vec!["train", "--config", p(&more), "--seed", "2", "--resume", p(&ck), "--out", p(&run2), "--views"];
    args.extend(&views);
    let o = lexifuse(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    let log = std::fs::read_to_string(run2.join("train_log.csv")).unwrap();
    assert!(log.lines().any(|l| l.starts_with("6,")));
    assert!(!log.lines().any(|l| l.starts_with("4,")));
}

#[test]
fn missing_input_exits_2_naming_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("no_such_lexicon.tsv");
    let o = lexifuse(&["validate", "--views", p(&missing)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no_such_lexicon.tsv"), "{}", stderr(&o));

    let o = lexifuse(&["train", "--config", p(&dir.path().join("absent.cfg")), "--views", p(&missing), "--out", p(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("absent.cfg"));
}

#[test]
fn error_categories_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.tsv");
    std::fs::write(&bad, "#family=signed-continuous\ngood\t1.5\n").unwrap();
    let o = lexifuse(&["validate", "--views", p(&bad)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("parse error"), "{}", stderr(&o));

    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "learning_rat = 0.1\n").unwrap();
    let good = dir.path().join("good.tsv");
    std::fs::write(&good, "#family=binary\ngood\t1\n").unwrap();
    let o = lexifuse(&["validate", "--config", p(&cfg), "--views", p(&good)]);
    assert_eq!(o.status.code(), Some(2));

    let o = lexifuse(&["eval", "--mode", "sideways", "--corpus", "a", "b", "--out", "c"]);
    assert_eq!(o.status.code(), Some(2));

    let o = Command::new(env!("CARGO_BIN_EXE_lexifuse"))
        .args(["train", "--views", p(&good), "--out", p(dir.path())])
        .env("LEXIFUSE_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

/// The six lexicon schemas of the reference setup, in small raw and
/// normalized layouts.
fn six_lexica(dir: &Path) -> (PathBuf, Vec<String>) {
    let w = |name: &str, text: &str| {
        let path = dir.join(name);
        std::fs::write(&path, text).unwrap();
        path
    };
    let swn = w("swn.tsv", "#family=pair-continuous\ngood\t0.75,0\nbad\t0,0.625\ntable\t0,0\n");
    let vader = w(
        "vader.tsv",
        "#family=rater-histogram,n_raters=10,n_points=9\ngood\t6,7,6,5,7,6,6,8,7,6\nbad\t1,2,1,0,2,3,1,2,1,1\n",
    );
    let senticnet = w("senticnet.tsv", "#family=signed-continuous\ngood\t0.8\npeppy\t0.65\nbad\t-0.7\n");
    let mpqa = w("mpqa.txt", "strongsubj good adj positive\nweaksubj awful adj negative\n");
    let huliu = w("huliu.txt", ";; opinion lexicon\ngood\tpos\nawful\tneg\n");
    let gi = w("gi.csv", "Entry,Positiv,Negativ\nGOOD,1,0\nBAD,0,1\n");
    let cfg = w(
        "six.cfg",
        "schema.mpqa.family = binary\nschema.mpqa.delimiter = whitespace\n\
         schema.mpqa.word_col = 1\nschema.mpqa.label_cols = 3\n\
         schema.mpqa.binary.positive = 1\nschema.mpqa.binary.negative = 0\n\
         schema.huliu.family = binary\nschema.huliu.label_cols = 1\nschema.huliu.comment = ;\n\
         schema.gi.family = binary\nschema.gi.delimiter = comma\nschema.gi.skip_lines = 1\n\
         schema.gi.label_cols = 1\n",
    );
    let views = vec![
        format!("swn={}", p(&swn)),
        format!("vader={}", p(&vader)),
        format!("senticnet={}", p(&senticnet)),
        format!("mpqa={}:mpqa", p(&mpqa)),
        format!("huliu={}:huliu", p(&huliu)),
        format!("gi={}:gi", p(&gi)),
    ];
    (cfg, views)
}

#[test]
fn concat_over_six_schemas_is_sixteen_dimensional() {
    let dir = tempfile::tempdir().unwrap();
    let (cfg, views) = six_lexica(dir.path());
    let train = dir.path().join("train.tsv");
    std::fs::write(&train, "0\tA good day\n1\tSuch a bad, awful day\n0\tpeppy and good\n1\tbad table\n").unwrap();
    let report = dir.path().join("r.csv");
    let mut args = vec!["eval", "--config", p(&cfg), "--mode", "concat", "--corpus", p(&train), p(&train), "--out", p(&report), "--views"];
    args.extend(views.iter().map(String::as_str));
    let o = lexifuse(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = std::fs::read_to_string(&report).unwrap();
    let row = r.lines().find(|l| l.starts_with("concat,")).unwrap();
    assert!(row.ends_with(",16"), "{row}");

    let mut args = vec!["validate", "--config", p(&cfg), "--views"];
    args.extend(views.iter().map(String::as_str));
    let o = lexifuse(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 7);
}
