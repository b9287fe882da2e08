use std::path::{Path, PathBuf};
use std::process::ExitCode;

use acl_core::datastore::Dataset;
use acl_core::eval::{ar_f, emit_arf, emit_report, render_arf, render_report, scored_set, EvalReport, ReportLayout};
use acl_core::localize::{load_predictions, localize_dataset, prediction_rows, save_predictions, ScoreMode};
use acl_core::model::{
    acl_gradcheck, model_dims, train_acl, train_actionness, write_log_csv, ActionnessSet, AlignedSet, Variant,
};
use acl_core::synth::generate;
use acl_core::temporal::collect_training_samples;
use acl_core::{AclParams32, ActionnessParams32, Error, ErrorKind, Result};
use clap::{Args, Parser, Subcommand};

use acl_cli::config::RunConfig;

#[derive(Parser)]
#[command(name = "acl", version, about = "Activity-concept based temporal localization of language queries")]
struct Cli {
    /// JSON run configuration; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for parallel training and scoring (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic benchmark directory.
    Synth(SynthArgs),
    /// Train the window actionness classifier.
    TrainActionness(TrainActionnessArgs),
    /// Train the cross-modal alignment network.
    TrainAcl(TrainAclArgs),
    /// Score and rank test windows for every query.
    Localize(LocalizeArgs),
    /// Compute R@n,IoU=m and optionally the AR-F curve.
    Evaluate(EvaluateArgs),
    /// Finite-difference check of the alignment loss gradients.
    Gradcheck(GradcheckArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Output directory for the benchmark.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    num_videos: Option<usize>,
}

#[derive(Args)]
struct TrainActionnessArgs {
    /// Training manifest.
    #[arg(long)]
    data: PathBuf,
    /// Checkpoint to write.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    batch_size: Option<usize>,
    /// Hidden width of the classifier.
    #[arg(long)]
    hidden: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct TrainAclArgs {
    /// Training manifest.
    #[arg(long)]
    data: PathBuf,
    /// Checkpoint to write.
    #[arg(long)]
    out: PathBuf,
    /// full | activity | wo-sac | wo-vac | concat
    #[arg(long, default_value = "full")]
    variant: Variant,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    batch_size: Option<usize>,
    /// Weight of the regression loss.
    #[arg(long)]
    beta: Option<f64>,
    /// Weight of the aligned-pair term.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Width d_t of the sentence and clip projections.
    #[arg(long)]
    text_dim: Option<usize>,
    /// Width d_a of the concept projections.
    #[arg(long)]
    concept_dim: Option<usize>,
    /// Hidden width of the alignment head.
    #[arg(long)]
    hidden: Option<usize>,
}

#[derive(Args)]
struct LocalizeArgs {
    /// Test manifest.
    #[arg(long)]
    data: PathBuf,
    /// Alignment checkpoint.
    #[arg(long)]
    acl: PathBuf,
    /// Actionness checkpoint; required by swin-score and prop-score.
    #[arg(long)]
    actionness: Option<PathBuf>,
    /// swin | swin-score | prop-score
    #[arg(long, default_value = "swin-score")]
    mode: ScoreMode,
    /// Late-fusion threshold θ on the label similarity.
    #[arg(long)]
    late_fusion: Option<f64>,
    /// Share of windows kept by prop-score.
    #[arg(long)]
    prop_keep: Option<f64>,
    /// Prediction CSV to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Prediction CSV from localize.
    #[arg(long)]
    pred: PathBuf,
    /// Manifest holding the ground truth.
    #[arg(long)]
    data: PathBuf,
    /// Report CSV to write.
    #[arg(long)]
    out: PathBuf,
    /// Also write the AR-F curve to this file.
    #[arg(long)]
    arf: Option<PathBuf>,
    /// charades | tacos
    #[arg(long)]
    layout: Option<String>,
    /// Row label in the report (default: prediction file stem).
    #[arg(long)]
    method: Option<String>,
}

#[derive(Args)]
struct GradcheckArgs {
    /// full | activity | wo-sac | wo-vac | concat
    #[arg(long)]
    variant: Option<Variant>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    batch_size: Option<usize>,
    /// Central-difference step.
    #[arg(long)]
    eps: Option<f64>,
    /// Largest accepted relative error.
    #[arg(long)]
    tolerance: Option<f64>,
}

fn set<T>(slot: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = v;
    }
}

/// `<path>.<suffix>` next to an output file.
fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

fn synth(mut cfg: RunConfig, a: SynthArgs) -> Result<()> {
    set(&mut cfg.synth.seed, a.seed);
    set(&mut cfg.synth.num_videos, a.num_videos);
    let s = generate(&cfg.synth, &a.out)?;
    cfg.echo(&a.out.join("run.json"))?;
    println!(
        "videos={} train_videos={} test_videos={} queries={} vo_queries={}",
        s.videos, s.train_videos, s.test_videos, s.queries, s.vo_queries
    );
    Ok(())
}

fn train_actionness_cmd(mut cfg: RunConfig, a: TrainActionnessArgs) -> Result<()> {
    let c = &mut cfg.actionness;
    set(&mut c.epochs, a.epochs);
    set(&mut c.lr, a.lr);
    set(&mut c.batch_size, a.batch_size);
    set(&mut c.hidden, a.hidden);
    set(&mut c.seed, a.seed);
    let ds = Dataset::open(&a.data)?;
    let s = &cfg.samples;
    let data = ActionnessSet::<f32>::from_dataset(&ds, &s.scales_frames, s.overlap, s.context_frames, s.pos_tiou, s.neg_tiou)?;
    let trained = train_actionness(&data, &cfg.actionness)?;
    trained.params.save(&a.out)?;
    let mut log = String::from("step,L_act\n");
    for (step, loss) in &trained.log {
        log.push_str(&format!("{step},{loss}\n"));
    }
    write_text(&sidecar(&a.out, "log.csv"), &log)?;
    cfg.echo(&sidecar(&a.out, "config.json"))?;
    println!(
        "windows={} positives={} steps={} final_loss={}",
        data.labels.len(),
        data.positives(),
        trained.log.len(),
        trained.log.last().map_or(f64::NAN, |l| l.1)
    );
    Ok(())
}

fn train_acl_cmd(mut cfg: RunConfig, a: TrainAclArgs) -> Result<()> {
    let t = &mut cfg.train;
    set(&mut t.epochs, a.epochs);
    set(&mut t.lr, a.lr);
    set(&mut t.batch_size, a.batch_size);
    set(&mut t.beta, a.beta);
    set(&mut t.gamma, a.gamma);
    set(&mut t.seed, a.seed);
    set(&mut cfg.model.text_dim, a.text_dim);
    set(&mut cfg.model.concept_proj_dim, a.concept_dim);
    set(&mut cfg.model.hidden, a.hidden);
    let ds = Dataset::open(&a.data)?;
    let s = &cfg.samples;
    let samples = collect_training_samples(&ds.manifest, &s.scales_frames, s.overlap, s.context_frames, s.pos_tiou)?;
    let set = AlignedSet::<f32>::from_samples(&ds, &samples.samples)?;
    let w = &cfg.model;
    let dims = model_dims(&ds).with_widths(w.text_dim, w.concept_proj_dim, w.hidden);
    let trained = train_acl(&set, a.variant, dims, &cfg.train)?;
    trained.params.save(&a.out)?;
    let mut log = Vec::new();
    write_log_csv(&mut log, &trained.log).map_err(|e| Error::Config(format!("log: {e}")))?;
    write_text(&sidecar(&a.out, "log.csv"), &String::from_utf8(log).expect("utf-8 log"))?;
    cfg.echo(&sidecar(&a.out, "config.json"))?;
    let last = trained.log.last();
    println!(
        "variant={} samples={} steps={} final_loss={}",
        a.variant,
        set.pairs.len(),
        trained.log.len(),
        last.map_or(f64::NAN, |r| r.total)
    );
    Ok(())
}

fn localize_cmd(mut cfg: RunConfig, a: LocalizeArgs) -> Result<()> {
    if a.late_fusion.is_some() {
        cfg.localize.late_fusion = a.late_fusion;
    }
    set(&mut cfg.localize.prop_keep, a.prop_keep);
    let ds = Dataset::open(&a.data)?;
    let acl = AclParams32::load(&a.acl)?;
    let act = a.actionness.as_deref().map(ActionnessParams32::load).transpose()?;
    if a.mode.needs_actionness() && act.is_none() {
        return Err(Error::Config(format!("mode {} needs --actionness", a.mode.as_str())));
    }
    let results = localize_dataset(&acl, act.as_ref(), &ds, a.mode, &cfg.localize)?;
    let rows = prediction_rows(&ds.manifest, &results);
    save_predictions(&a.out, &rows)?;
    cfg.echo(&sidecar(&a.out, "config.json"))?;
    let fused = results.iter().filter(|r| r.fusion.as_ref().is_some_and(|f| f.applied)).count();
    println!("mode={} queries={} rows={} late_fused={fused}", a.mode.as_str(), results.len(), rows.len());
    Ok(())
}

fn evaluate_cmd(mut cfg: RunConfig, a: EvaluateArgs) -> Result<()> {
    set(&mut cfg.evaluate.layout, a.layout);
    let layout: ReportLayout = cfg.evaluate.layout.parse()?;
    let ds = Dataset::open(&a.data)?;
    let scored = scored_set(&ds.manifest, load_predictions(&a.pred)?)?;
    let method = a
        .method
        .unwrap_or_else(|| a.pred.file_stem().map_or("model".into(), |s| s.to_string_lossy().into_owned()));
    // the layout's columns are always computed, whatever the configured grid
    let (mut ns, mut ms) = (cfg.evaluate.ns.clone(), cfg.evaluate.ms.clone());
    for (n, m) in layout.columns() {
        ns.push(n);
        ms.push(m);
    }
    ns.sort_unstable();
    ns.dedup();
    ms.sort_by(f64::total_cmp);
    ms.dedup();
    let mut report = EvalReport::evaluate(&method, &scored.queries, &ns, &ms);
    emit_report(std::slice::from_ref(&report), layout, &a.out)?;
    print!("{}", render_report(std::slice::from_ref(&report), layout)?);
    if let Some(path) = &a.arf {
        report.arf = ar_f(&scored.arf_items, cfg.evaluate.arf_iou, &cfg.evaluate.frequencies);
        emit_arf(&report.arf, path)?;
        print!("{}", render_arf(&report.arf));
    }
    cfg.echo(&sidecar(&a.out, "config.json"))?;
    Ok(())
}

fn gradcheck_cmd(mut cfg: RunConfig, a: GradcheckArgs) -> Result<()> {
    let g = &mut cfg.gradcheck;
    set(&mut g.variant, a.variant);
    set(&mut g.seed, a.seed);
    set(&mut g.batch_size, a.batch_size);
    set(&mut g.eps, a.eps);
    let tol = a.tolerance.unwrap_or(1e-4);
    let r = acl_gradcheck(&cfg.gradcheck)?;
    println!(
        "variant={} coordinates={} max_rel_error={:e}",
        cfg.gradcheck.variant, r.coordinates_checked, r.max_rel_error
    );
    if !r.passes(tol) {
        return Err(Error::Numeric(format!(
            "max relative error {:e} at coordinate {:?} exceeds {tol:e}",
            r.max_rel_error, r.worst_coordinate
        )));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let cfg = RunConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Synth(a) => synth(cfg, a),
        Command::TrainActionness(a) => train_actionness_cmd(cfg, a),
        Command::TrainAcl(a) => train_acl_cmd(cfg, a),
        Command::Localize(a) => localize_cmd(cfg, a),
        Command::Evaluate(a) => evaluate_cmd(cfg, a),
        Command::Gradcheck(a) => gradcheck_cmd(cfg, a),
    }
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Config => 2,
        ErrorKind::Data => 3,
        ErrorKind::Numeric => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error[config]: cannot start {n} workers: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = match e.kind() {
                ErrorKind::Config => "config",
                ErrorKind::Data => "data",
                ErrorKind::Numeric => "numeric",
            };
            eprintln!("error[{kind}]: {}", e.to_string().replace('\n', " "));
            ExitCode::from(exit_code(e.kind()))
        }
    }
}
