use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use incbound::experiment::{emit_tables, generate_modifications, run_experiment, DataSource, ExperimentConfig};
use incbound::{
    classify, compute_gap, param_change_upper, screen_samples, should_retrain, tightened_bounds, train,
    update_delta_stats, BoundCase, Bounds, BoundsDocument, BoundsReport, Budget, Dataset, Modifications, Objective,
    ObjectiveConfig, Overlay, PartialPlan, RetrainPolicy, Scenario, StatsFile, TrainOptions,
};

#[derive(Parser)]
#[command(name = "incbound", version, about = "Certified bounds for linear classifiers after data edits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model and write stats.json and objective.json.
    Train(TrainArgs),
    /// Summarize a stats file.
    Stats(StatsArgs),
    /// Draw a random modification set.
    Modify(ModifyArgs),
    /// Bound the optimum of the modified problem.
    Bounds(BoundsArgs),
    /// Certify labels of test points from a bounds file.
    Classify(ClassifyArgs),
    /// List training rows certified to be non-support vectors.
    Screen(ScreenArgs),
    /// Bound the parameter drift and decide whether to retrain.
    Drift(DriftArgs),
    /// Run the experiment grid and write trials.csv and aggregates.json.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct DataArgs {
    /// LIBSVM file or `synthetic:n,d,density[,seed]`.
    #[arg(long)]
    data: String,
    /// Keep rows as read instead of scaling them to unit norm.
    #[arg(long)]
    raw: bool,
}

impl DataArgs {
    fn load(&self) -> Result<Dataset> {
        let src: DataSource = self.data.parse()?;
        src.load(!self.raw)
            .with_context(|| format!("loading {}", self.data))
    }
}

#[derive(Args)]
struct ModelArgs {
    /// Stats file written by `train`.
    #[arg(long)]
    stats: PathBuf,
    /// Objective file; defaults to objective.json next to the stats file.
    #[arg(long)]
    objective: Option<PathBuf>,
}

impl ModelArgs {
    fn load(&self) -> Result<(incbound::Solution, incbound::CachedStats, Objective)> {
        let (sol, stats) = StatsFile::load(&self.stats)
            .with_context(|| format!("reading {}", self.stats.display()))?
            .into_parts()?;
        let path = self.objective.clone().unwrap_or_else(|| {
            self.stats
                .parent()
                .unwrap_or_else(|| Path::new("."))
                .join("objective.json")
        });
        let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        let cfg: ObjectiveConfig = serde_json::from_str(&text)?;
        Ok((sol, stats, Objective::from_config(&cfg)?))
    }
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 0.1)]
    lambda: f64,
    #[arg(long, default_value_t = ExperimentConfig::DEFAULT_GAMMA)]
    gamma: f64,
    /// Relative duality-gap tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    #[arg(long, default_value_t = 10_000)]
    max_epochs: usize,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args)]
struct ModifyArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_enum)]
    scenario: ScenarioArg,
    #[arg(long)]
    magnitude: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output JSON file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    Spot,
    Instance,
    Feature,
}

impl From<ScenarioArg> for Scenario {
    fn from(s: ScenarioArg) -> Self {
        match s {
            ScenarioArg::Spot => Scenario::Spot,
            ScenarioArg::Instance => Scenario::Instance,
            ScenarioArg::Feature => Scenario::Feature,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    Dual,
    Primal,
    Combined,
}

impl From<CaseArg> for BoundCase {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::Dual => BoundCase::Dual,
            CaseArg::Primal => BoundCase::Primal,
            CaseArg::Combined => BoundCase::Combined,
        }
    }
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Modification set JSON.
    #[arg(long)]
    mods: PathBuf,
    #[arg(long, value_enum, default_value = "combined")]
    case: CaseArg,
    /// Write only the touched coordinates.
    #[arg(long)]
    sparse: bool,
    /// Tighten with partial optimization for this scenario.
    #[arg(long, value_enum)]
    partial: Option<ScenarioArg>,
    #[arg(long, default_value = "bounds.json")]
    out: PathBuf,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    bounds: PathBuf,
    /// Test points in LIBSVM format or a synthetic spec.
    #[arg(long)]
    test: String,
    #[arg(long)]
    raw: bool,
    /// Needed to expand a sparse bounds file.
    #[command(flatten)]
    model: OptionalModel,
    /// Output JSON-lines file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OptionalModel {
    #[arg(long)]
    stats: Option<PathBuf>,
    #[arg(long)]
    objective: Option<PathBuf>,
}

#[derive(Args)]
struct ScreenArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    mods: PathBuf,
}

#[derive(Args)]
struct DriftArgs {
    #[arg(long)]
    bounds: PathBuf,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_delimiter = ',', default_values_t = ExperimentConfig::DEFAULT_LAMBDAS.to_vec())]
    lambda: Vec<f64>,
    #[arg(long, default_value_t = ExperimentConfig::DEFAULT_GAMMA)]
    gamma: f64,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "spot")]
    scenario: Vec<ScenarioArg>,
    #[arg(long, value_delimiter = ',', default_value = "10")]
    magnitude: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8,9,10")]
    seeds: Vec<u64>,
    #[arg(long, default_value_t = 0.8)]
    train_fraction: f64,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    /// Skip wall-clock timing; all time columns become zero.
    #[arg(long)]
    no_timing: bool,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Train(a) => cmd_train(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Modify(a) => cmd_modify(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Screen(a) => cmd_screen(a),
        Command::Drift(a) => cmd_drift(a),
        Command::Experiment(a) => cmd_experiment(a),
    }
}

fn cmd_train(a: TrainArgs) -> Result<()> {
    let ds = a.data.load()?;
    let obj = Objective::new(a.gamma, a.lambda)?;
    let opts = TrainOptions {
        tolerance: a.tolerance,
        max_epochs: a.max_epochs,
        ..TrainOptions::default()
    };
    let out = train(&ds, &obj, &opts)?;
    if !out.converged {
        eprintln!("warning: stopped after {} epochs without reaching the tolerance", out.epochs);
    }
    std::fs::create_dir_all(&a.out)?;
    StatsFile::new(&out.solution, &out.stats).save(&a.out.join("stats.json"))?;
    std::fs::write(a.out.join("objective.json"), serde_json::to_string_pretty(&obj.config())? + "\n")?;
    println!(
        "{}",
        serde_json::json!({
            "n": ds.n(),
            "d": ds.d(),
            "epochs": out.epochs,
            "converged": out.converged,
            "residual_gap": out.solution.residual_gap,
        })
    );
    Ok(())
}

fn cmd_stats(a: StatsArgs) -> Result<()> {
    let (sol, stats, obj) = a.model.load()?;
    let support = sol.alpha.iter().filter(|&&x| x > 0.0).count();
    println!(
        "{}",
        serde_json::to_string_pretty(&serde_json::json!({
            "n": stats.n(),
            "d": stats.d(),
            "lambda": obj.lambda(),
            "gamma": obj.gamma(),
            "residual_gap": sol.residual_gap,
            "support_vectors": support,
            "w_norm": sol.w.iter().map(|x| x * x).sum::<f64>().sqrt(),
        }))?
    );
    Ok(())
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_modify(a: ModifyArgs) -> Result<()> {
    let ds = a.data.load()?;
    let mods = generate_modifications(&ds, a.scenario.into(), a.magnitude, a.seed)?;
    write_out(a.out.as_deref(), &(mods.to_json()? + "\n"))
}

fn load_mods(path: &Path) -> Result<Modifications> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Modifications::from_json(&text)?)
}

fn cmd_bounds(a: BoundsArgs) -> Result<()> {
    let ds = a.data.load()?;
    let (sol, stats, obj) = a.model.load()?;
    let mods = load_mods(&a.mods)?;
    let view = Overlay::new(&ds, &mods)?;
    let delta = update_delta_stats(&stats, &view, &sol)?;
    let gap = compute_gap(&stats, &delta, &obj);
    let bounds = Bounds::new(&stats, &sol, &delta, gap.value, &obj)?;
    let case: BoundCase = a.case.into();

    let check;
    let tight;
    let used = match a.partial {
        Some(s) if !mods.is_empty() => {
            let plan = PartialPlan::new(s.into(), Budget::relative_to(gap.value));
            check = incbound::run_partial(&plan, &view, &obj, &sol, &stats, &delta)?;
            tight = tightened_bounds(&check, &bounds)?;
            &tight
        }
        _ => &bounds,
    };
    let doc = if a.sparse {
        BoundsDocument::Sparse(used.sparse_report(case)?)
    } else {
        BoundsDocument::Full(used.report(case)?)
    };
    std::fs::write(&a.out, serde_json::to_string(&doc)? + "\n")?;
    eprintln!("gap {} from {} touched entries", used.gap(), delta.touched() + gap.touched);
    Ok(())
}

fn load_bounds(path: &Path, model: Option<&ModelArgs>) -> Result<BoundsReport> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    match serde_json::from_str::<BoundsDocument<f64>>(&text)? {
        BoundsDocument::Full(r) => Ok(r),
        BoundsDocument::Sparse(r) => {
            let Some(model) = model else {
                bail!("{} holds sparse bounds; pass --stats to expand them", path.display());
            };
            let (sol, stats, obj) = model.load()?;
            Ok(r.expand(&stats, &sol, &obj)?)
        }
    }
}

fn cmd_classify(a: ClassifyArgs) -> Result<()> {
    let model = a.model.stats.clone().map(|stats| ModelArgs {
        stats,
        objective: a.model.objective.clone(),
    });
    let report = load_bounds(&a.bounds, model.as_ref())?;
    let test = DataArgs {
        data: a.test.clone(),
        raw: a.raw,
    }
    .load()?;
    if test.d() > report.w_bounds.len() {
        bail!("test data has {} features, bounds cover {}", test.d(), report.w_bounds.len());
    }
    let mut sink: Box<dyn Write> = match &a.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    };
    for i in 0..test.n() {
        let x: Vec<(usize, f64)> = test.row_iter(i).collect();
        let v = classify(&x, &report.w_bounds)?;
        writeln!(sink, "{}", v.json_line(i)?)?;
    }
    sink.flush()?;
    Ok(())
}

fn cmd_screen(a: ScreenArgs) -> Result<()> {
    let ds = a.data.load()?;
    let (sol, stats, obj) = a.model.load()?;
    let mods = load_mods(&a.mods)?;
    let view = Overlay::new(&ds, &mods)?;
    let delta = update_delta_stats(&stats, &view, &sol)?;
    let gap = compute_gap(&stats, &delta, &obj);
    let rows = screen_samples(&delta, &stats, gap.value, &obj);
    println!("{}", serde_json::json!({ "gap": gap.value, "screened": rows }));
    Ok(())
}

fn cmd_drift(a: DriftArgs) -> Result<()> {
    let report = load_bounds(&a.bounds, Some(&a.model))?;
    let (sol, _, _) = a.model.load()?;
    let policy = RetrainPolicy::new(a.theta)?;
    let drift = param_change_upper(&sol.w, &report.w_bounds)?;
    println!(
        "{}",
        serde_json::json!({
            "drift_upper": drift,
            "theta": a.theta,
            "retrain": should_retrain(&policy, drift),
        })
    );
    Ok(())
}

fn cmd_experiment(a: ExperimentArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::new(a.data.data.parse()?);
    cfg.normalize = !a.data.raw;
    cfg.lambdas = a.lambda;
    cfg.gamma = a.gamma;
    cfg.scenarios = a.scenario.into_iter().map(Scenario::from).collect();
    cfg.magnitudes = a.magnitude;
    cfg.seeds = a.seeds;
    cfg.train_fraction = a.train_fraction;
    cfg.tolerance = a.tolerance;
    cfg.theta = a.theta;
    cfg.timing = !a.no_timing;
    let results = run_experiment(&cfg)?;
    emit_tables(&results, &a.out)?;
    let bad: usize = results.iter().map(|r| r.contradictions).sum();
    eprintln!("{} trials written to {} ({} oracle contradictions)", results.len(), a.out.display(), bad);
    Ok(())
}
