use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use relieflab::diff::ProgressiveSchedule;
use relieflab::experiment::{
    self, separability, DesignConfig, Manifest, RecordWriter,
};
use relieflab::generators::{self, GeneratorSpec, ProblemKind};
use relieflab::io;
use relieflab::plot::{self, PlotData, PlotMode};
use relieflab::relief::{self, Progression, ReliefConfig, Variant};

#[derive(Debug, Parser)]
#[command(name = "relieflab", version, about = "Relief-family feature weighting laboratory")]
struct Cli {
    /// Seed for generation, sampling, or the design's base seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file (generate) or directory (experiment, plot).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Machine-readable output on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic dataset (CSV plus JSON sidecar).
    Generate(GenerateArgs),
    /// Weigh the features of a dataset file.
    Weigh(WeighArgs),
    /// Run the blocking design and write records plus a manifest.
    Experiment(ExperimentArgs),
    /// Plot separability curves from a records file.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Rdg1Continuous,
    Rdg1Categoric,
    RandomRbf,
    NonMonotonic,
    MajorityN,
    ModuloP,
}

impl From<Kind> for ProblemKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Rdg1Continuous => ProblemKind::Rdg1Continuous,
            Kind::Rdg1Categoric => ProblemKind::Rdg1Categoric,
            Kind::RandomRbf => ProblemKind::RandomRbf,
            Kind::NonMonotonic => ProblemKind::NonMonotonic,
            Kind::MajorityN => ProblemKind::MajorityN,
            Kind::ModuloP => ProblemKind::ModuloP,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Algo {
    Relief,
    Relieved,
    Relieff,
    Drelieff,
    Pdrelieff,
}

impl From<Algo> for Variant {
    fn from(a: Algo) -> Self {
        match a {
            Algo::Relief => Variant::Relief,
            Algo::Relieved => Variant::Relieved,
            Algo::Relieff => Variant::ReliefF,
            Algo::Drelieff => Variant::DReliefF,
            Algo::Pdrelieff => Variant::PdReliefF,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Separability,
    Accumulated,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long)]
    relevant: usize,
    #[arg(long, default_value_t = 0)]
    irrelevant: usize,
    #[arg(long, default_value_t = generators::DEFAULT_INSTANCES)]
    instances: usize,
    /// Modulus (modulo-p only).
    #[arg(long)]
    p: Option<u32>,
    /// Number of classes (rdg1-* and random-rbf only).
    #[arg(long)]
    classes: Option<usize>,
    /// Centers per class (random-rbf only).
    #[arg(long)]
    centers: Option<usize>,
}

#[derive(Debug, Args)]
struct WeighArgs {
    dataset: PathBuf,
    #[arg(long, value_enum, default_value = "relieff")]
    algo: Algo,
    #[arg(long, default_value_t = relief::DEFAULT_K)]
    k: usize,
    /// Sampled instances; defaults to all.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = ProgressiveSchedule::DEFAULT_S)]
    s: f64,
    #[arg(long, default_value_t = ProgressiveSchedule::DEFAULT_A)]
    a: f64,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// Reduced design: max relevant 10, 3 iterations.
    #[arg(long)]
    smoke: bool,
    #[arg(long, value_enum, value_delimiter = ',')]
    problems: Vec<Kind>,
    #[arg(long)]
    max_relevant: Option<usize>,
    #[arg(long)]
    irr_multiplier: Option<usize>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    instances: Option<usize>,
    #[arg(long, default_value_t = relief::DEFAULT_K)]
    k: usize,
    #[arg(long, default_value_t = ProgressiveSchedule::DEFAULT_S)]
    s: f64,
    #[arg(long, default_value_t = ProgressiveSchedule::DEFAULT_A)]
    a: f64,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Write zero wall times so reruns are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Debug, Args)]
struct PlotArgs {
    records: PathBuf,
    #[arg(long, value_enum, default_value = "separability")]
    mode: Mode,
    #[arg(long, value_enum)]
    problem: Option<Kind>,
    #[arg(long, default_value_t = 800)]
    width: u32,
    #[arg(long, default_value_t = 500)]
    height: u32,
}

/// Flag combinations clap cannot express; reported with exit code 2.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", format!("{e:#}").replace('\n', " "));
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Generate(args) => cmd_generate(cli, args),
        Command::Weigh(args) => cmd_weigh(cli, args),
        Command::Experiment(args) => cmd_experiment(cli, args),
        Command::Plot(args) => cmd_plot(cli, args),
    }
}

fn cmd_generate(cli: &Cli, args: &GenerateArgs) -> Result<()> {
    let kind = ProblemKind::from(args.kind);
    if args.p.is_some() && kind != ProblemKind::ModuloP {
        return Err(usage("--p only applies to --kind modulo-p"));
    }
    let takes_classes = matches!(
        kind,
        ProblemKind::Rdg1Continuous | ProblemKind::Rdg1Categoric | ProblemKind::RandomRbf
    );
    if args.classes.is_some() && !takes_classes {
        return Err(usage("--classes only applies to rdg1-* and random-rbf"));
    }
    if args.centers.is_some() && kind != ProblemKind::RandomRbf {
        return Err(usage("--centers only applies to --kind random-rbf"));
    }
    if args.instances < 2 {
        return Err(usage("--instances must be at least 2"));
    }
    if args.relevant == 0 {
        return Err(usage("--relevant must be at least 1"));
    }
    let mut spec = GeneratorSpec::new(kind, args.relevant, args.irrelevant)
        .with_instances(args.instances)
        .with_seed(cli.seed);
    if let Some(p) = args.p {
        spec.p = p;
    }
    if let Some(c) = args.classes {
        spec.n_classes = c;
    }
    if let Some(c) = args.centers {
        spec.centers_per_class = c;
    }
    spec.validate().map_err(|e| usage(e.to_string()))?;

    let ds = generators::generate(&spec)?;
    let path = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{kind}.csv")));
    io::write_dataset(&ds, &path).with_context(|| format!("writing {}", path.display()))?;
    let sidecar = io::sidecar_path(&path);
    if cli.json {
        println!(
            "{}",
            json!({
                "csv": path,
                "sidecar": sidecar,
                "kind": kind.name(),
                "instances": ds.n_instances(),
                "features": ds.n_features(),
                "classes": ds.n_classes(),
                "present_classes": ds.present_classes(),
            })
        );
    } else {
        println!(
            "wrote {} ({} instances, {} features, {} classes) and {}",
            path.display(),
            ds.n_instances(),
            ds.n_features(),
            ds.present_classes(),
            sidecar.display()
        );
    }
    Ok(())
}

fn cmd_weigh(cli: &Cli, args: &WeighArgs) -> Result<()> {
    let ds = io::read_dataset(&args.dataset)
        .with_context(|| format!("reading {}", args.dataset.display()))?;
    let variant = Variant::from(args.algo);
    let mut cfg = ReliefConfig::new(variant)
        .with_k(args.k)
        .with_seed(cli.seed)
        .with_progression(Progression::Closed {
            s: args.s,
            a: args.a,
        });
    cfg.m = args.m;
    let weights = relief::weigh(&ds, &cfg)?;
    let relevant = ds.relevant_flags();
    let sep = separability(weights.as_slice(), &relevant).ok();

    if cli.json {
        let features: Vec<_> = ds
            .features()
            .iter()
            .zip(weights.as_slice())
            .map(|(f, w)| json!({"name": f.name, "weight": w, "relevant": f.relevant}))
            .collect();
        println!(
            "{}",
            json!({
                "algorithm": variant.name(),
                "k": args.k,
                "seed": cli.seed,
                "weights": features,
                "separability": sep,
            })
        );
    } else {
        for (f, w) in ds.features().iter().zip(weights.as_slice()) {
            let mark = if f.relevant { "  relevant" } else { "" };
            println!("{}\t{w:.9}{mark}", f.name);
        }
        if let Some(s) = sep {
            println!("separability\t{s:.9}");
        }
    }
    Ok(())
}

fn design_from(cli: &Cli, args: &ExperimentArgs) -> DesignConfig {
    let mut cfg = if args.smoke {
        DesignConfig::smoke()
    } else {
        DesignConfig::default()
    };
    if !args.problems.is_empty() {
        cfg.problems = args.problems.iter().map(|&k| ProblemKind::from(k)).collect();
    }
    if let Some(v) = args.max_relevant {
        cfg.max_relevant = v;
    }
    if let Some(v) = args.irr_multiplier {
        cfg.irr_multiplier = v;
    }
    if let Some(v) = args.iterations {
        cfg.iterations = v;
    }
    if let Some(v) = args.instances {
        cfg.n_instances = v;
    }
    cfg.k = args.k;
    cfg.progression = Progression::Closed {
        s: args.s,
        a: args.a,
    };
    cfg.base_seed = cli.seed;
    cfg
}

fn cmd_experiment(cli: &Cli, args: &ExperimentArgs) -> Result<()> {
    let cfg = design_from(cli, args);
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    ProgressiveSchedule::new(args.s, args.a, 1).map_err(|e| usage(e.to_string()))?;
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("results"));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let records_path = dir.join("records.csv");
    let file = fs::File::create(&records_path)
        .with_context(|| format!("creating {}", records_path.display()))?;
    let mut writer = RecordWriter::new(std::io::BufWriter::new(file), true, !args.no_timing)?;
    let mut count = 0usize;
    experiment::run_design_with(&cfg, args.threads, |r| {
        count += 1;
        writer.write(&r)
    })?;
    writer.flush()?;
    let manifest = Manifest::new(cfg, "records.csv", count);
    experiment::write_manifest(&manifest, &dir.join("manifest.json"))?;
    if cli.json {
        println!(
            "{}",
            json!({"records": records_path, "manifest": dir.join("manifest.json"), "count": count})
        );
    } else {
        println!("wrote {count} records to {}", records_path.display());
    }
    Ok(())
}

fn cmd_plot(cli: &Cli, args: &PlotArgs) -> Result<()> {
    let records = experiment::read_records(&args.records)
        .with_context(|| format!("reading {}", args.records.display()))?;
    if records.is_empty() {
        bail!("{} holds no records", args.records.display());
    }
    let mode = match args.mode {
        Mode::Separability => PlotMode::Separability,
        Mode::Accumulated => PlotMode::Accumulated,
    };
    let problems: Vec<ProblemKind> = match args.problem {
        Some(k) => vec![k.into()],
        None => ProblemKind::ALL
            .into_iter()
            .filter(|p| records.iter().any(|r| r.problem == *p))
            .collect(),
    };
    // Build every plot before writing anything so a bad filter emits no files.
    let plots = problems
        .iter()
        .map(|&p| plot::plot_data(&records, p, mode).with_context(|| format!("problem {p}")))
        .collect::<Result<Vec<_>>>()?;

    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("plots"));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    for data in &plots {
        let stem = format!("{}-{}", data.problem, mode.name());
        let tsv_path = dir.join(format!("{stem}.tsv"));
        let svg_path = dir.join(format!("{stem}.svg"));
        write_plot(data, &tsv_path, &svg_path, args.width, args.height)?;
        written.push((tsv_path, svg_path));
    }
    if cli.json {
        let files: Vec<_> = written
            .iter()
            .map(|(d, s)| json!({"data": d, "image": s}))
            .collect();
        println!("{}", json!({ "plots": files }));
    } else {
        for (d, s) in &written {
            println!("wrote {} and {}", s.display(), d.display());
        }
    }
    Ok(())
}

/// The image is rendered from the data file as written.
fn write_plot(data: &PlotData, tsv: &Path, svg: &Path, width: u32, height: u32) -> Result<()> {
    let text = data.to_tsv();
    fs::write(tsv, &text).with_context(|| format!("writing {}", tsv.display()))?;
    let reread = PlotData::from_tsv(&text)?;
    fs::write(svg, plot::render_svg(&reread, width, height))
        .with_context(|| format!("writing {}", svg.display()))?;
    Ok(())
}
