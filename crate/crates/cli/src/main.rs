//! `bclab`: the branch-and-cut policy laboratory command line.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};

use bclab_core::bounds::{bound_table, bound_table_csv, bound_table_text, BoundInputs};
use bclab_core::engine::{export_trace, solve_bnc, BncConfig, PenaltySpec};
use bclab_core::instance::{generate_instance, parse_instance, serialize_instance, Family};
use bclab_core::lab::{
    emit_report, erm_tune, measure_gap, run_experiment, run_verification, ExperimentConfig,
};
use bclab_core::policy::PolicyBundle;
use bclab_core::probe::{
    census_output_vectors, census_to_csv, scan_slice, scan_to_csv, ParamSampler, SliceSpec,
};
use bclab_core::rng::SplitMix64;

#[derive(Parser)]
#[command(name = "bclab", version, about = "Branch-and-cut policy laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate instances and write them as .mip text files.
    Gen(GenArgs),
    /// Run branch-and-cut on one instance and print the outcome.
    Solve(SolveArgs),
    /// Scan the cost along random parameter slices of an experiment.
    Scan(ConfigArgs),
    /// Census of distinct cost vectors over sampled parameters.
    Census(ConfigArgs),
    /// Evaluate every bound for a bound-inputs file.
    Bounds(BoundsArgs),
    /// Random-search ERM over the parameter box of an experiment.
    Erm(ConfigArgs),
    /// Measure train/test gaps and emit the full report.
    Gap(ConfigArgs),
    /// Run the verification suites for an experiment config.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct GenArgs {
    /// knapsack | packing | covering
    #[arg(long, default_value = "knapsack")]
    family: String,
    #[arg(long, default_value_t = 5)]
    n1: usize,
    #[arg(long, default_value_t = 0)]
    n2: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    lo: i64,
    #[arg(long, default_value_t = 9)]
    hi: i64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Output directory; stdout when omitted and count is 1.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file in the .mip text format.
    #[arg(long)]
    instance: PathBuf,
    /// Policy file (JSON); the built-in reference policy when omitted.
    #[arg(long)]
    policy: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    max_rounds: usize,
    #[arg(long, default_value_t = 1e-6)]
    eps_gap: f64,
    #[arg(long, default_value_t = 1)]
    root_cut_rounds: usize,
    #[arg(long, default_value_t = 2)]
    kappa: usize,
    #[arg(long, default_value_t = 8)]
    cut_cap: usize,
    /// Write the run trace (one JSON record per line) here.
    #[arg(long)]
    trace_out: Option<PathBuf>,
}

#[derive(Args)]
struct ConfigArgs {
    /// Experiment config file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for reports and CSVs.
    #[arg(long, default_value = "bclab-out")]
    out: PathBuf,
}

#[derive(Args)]
struct BoundsArgs {
    /// Bound-inputs file (JSON).
    #[arg(long)]
    inputs: PathBuf,
    /// Also write the table as CSV here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Experiment config file (JSON); the default config when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn read_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    Ok(ExperimentConfig::from_json(&text)?)
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Gen(args) => gen(args),
        Command::Solve(args) => solve(args),
        Command::Scan(args) => scan(args),
        Command::Census(args) => census(args),
        Command::Bounds(args) => bounds(args),
        Command::Erm(args) => erm(args),
        Command::Gap(args) => gap(args),
        Command::Verify(args) => verify(args),
    }
}

fn gen(args: GenArgs) -> Result<()> {
    let family = Family::parse(&args.family)?;
    if args.out.is_none() && args.count != 1 {
        bail!("--out is required when generating more than one instance");
    }
    let mut seed_stream = SplitMix64::new(args.seed);
    for i in 0..args.count {
        let seed = if args.count == 1 {
            args.seed
        } else {
            seed_stream.next_u64()
        };
        let inst = generate_instance(family, args.n1, args.n2, args.m, (args.lo, args.hi), seed)?;
        let text = serialize_instance(&inst);
        match &args.out {
            Some(dir) => {
                std::fs::create_dir_all(dir)?;
                let path = dir.join(format!("{}.mip", inst.name));
                std::fs::write(&path, text)?;
                println!("wrote {}", path.display());
            }
            None => print!("{text}"),
        }
        let _ = i;
    }
    Ok(())
}

fn solve(args: SolveArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.instance)
        .with_context(|| format!("reading instance {}", args.instance.display()))?;
    let inst = parse_instance(&text)?;
    let policy = match &args.policy {
        Some(path) => PolicyBundle::from_json(&std::fs::read_to_string(path)?)?,
        None => PolicyBundle::reference(),
    };
    let cfg = BncConfig {
        max_rounds: args.max_rounds,
        eps_gap: args.eps_gap,
        root_cut_rounds: args.root_cut_rounds,
        kappa: args.kappa,
        cut_cap: args.cut_cap,
        ..BncConfig::default()
    };
    let (result, cost, trace) = solve_bnc(&inst, &policy, &cfg, &PenaltySpec::default())?;
    println!("instance    {}", inst.name);
    println!("status      {:?}", result.status);
    match result.value {
        Some(v) => println!("value       {v}"),
        None => println!("value       none"),
    }
    println!(
        "bounds      [{}, {}]",
        result.lower_bound, result.upper_bound
    );
    println!("rounds      {}", result.rounds);
    println!("cost        {cost}");
    println!("cuts        {}", result.generated_cuts.len());
    if let Some(path) = &args.trace_out {
        std::fs::write(path, export_trace(&trace))?;
        println!("trace       {}", path.display());
    }
    Ok(())
}

fn scan(args: ConfigArgs) -> Result<()> {
    let cfg = read_config(&args.config)?;
    let template = cfg.template();
    let dim = template.param_count();
    let penalties = PenaltySpec::default();
    let instances = cfg.train_instances()?;
    std::fs::create_dir_all(&args.out)?;
    let mut rng = SplitMix64::new(cfg.seed ^ 0x5CA2);
    for (ii, inst) in instances.iter().enumerate() {
        for slice in 0..cfg.slices_per_instance.max(1) {
            let anchor: Vec<f64> = (0..dim)
                .map(|_| rng.uniform(cfg.param_lo, cfg.param_hi))
                .collect();
            let direction: Vec<f64> = (0..dim).map(|_| rng.uniform(-1.0, 1.0)).collect();
            let spec = SliceSpec::new(anchor, direction);
            let scan = scan_slice(
                std::slice::from_ref(inst),
                &template,
                &cfg.bnc,
                &penalties,
                &spec,
            )?;
            let path = args.out.join(format!("scan_{ii:02}_{slice:02}.csv"));
            std::fs::write(&path, scan_to_csv(&scan))?;
            println!(
                "{}: slice {} -> {} breakpoints, {} pieces ({})",
                inst.name,
                slice,
                scan.breakpoints.len(),
                scan.piece_values.len(),
                path.display()
            );
        }
    }
    Ok(())
}

fn census(args: ConfigArgs) -> Result<()> {
    let cfg = read_config(&args.config)?;
    let template = cfg.template();
    let penalties = PenaltySpec::default();
    let instances = cfg.train_instances()?;
    let sampler = ParamSampler {
        count: cfg.census_samples,
        seed: cfg.tuner_seed ^ 0xCE45,
        lo: cfg.param_lo,
        hi: cfg.param_hi,
    };
    let census = census_output_vectors(&instances, &template, &cfg.bnc, &penalties, &sampler)?;
    std::fs::create_dir_all(&args.out)?;
    let path = args.out.join("census.csv");
    std::fs::write(&path, census_to_csv(&census))?;
    println!(
        "{} distinct cost vectors over {} samples on {} instances (q sums {:?})",
        census.distinct_count(),
        census.sample_count,
        census.n_instances,
        census.q_sums
    );
    println!("wrote {}", path.display());
    Ok(())
}

fn bounds(args: BoundsArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.inputs)
        .with_context(|| format!("reading inputs {}", args.inputs.display()))?;
    let inputs: BoundInputs = serde_json::from_str(&text)?;
    inputs.validate()?;
    let rows = bound_table(&inputs)?;
    print!("{}", bound_table_text(&rows));
    if let Some(path) = &args.csv {
        std::fs::write(path, bound_table_csv(&rows))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn erm(args: ConfigArgs) -> Result<()> {
    let cfg = read_config(&args.config)?;
    let result = erm_tune(&cfg)?;
    println!("budget          {}", result.draws.len());
    println!("best index      {}", result.best_index);
    println!("best train cost {}", result.best_train_cost);
    println!("best w          {:?}", result.best_w);
    std::fs::create_dir_all(&args.out)?;
    let path = args.out.join("erm.json");
    let record = serde_json::json!({
        "schema": "bclab-erm-v1",
        "best_index": result.best_index,
        "best_train_cost": result.best_train_cost,
        "best_w": result.best_w,
        "summaries": result.summaries,
    });
    std::fs::write(&path, serde_json::to_string_pretty(&record)?)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn gap(args: ConfigArgs) -> Result<()> {
    let cfg = read_config(&args.config)?;
    let erm = erm_tune(&cfg)?;
    let gap = measure_gap(&cfg, &erm.draws)?;
    println!("sampled w       {}", gap.per_w.len());
    println!("sup gap         {}", gap.sup_gap);
    let report = run_experiment(&cfg)?;
    let written = emit_report(&report, &args.out)?;
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn verify(args: VerifyArgs) -> Result<()> {
    let cfg = match &args.config {
        Some(path) => read_config(path)?,
        None => ExperimentConfig::default(),
    };
    let report = run_verification(&cfg)?;
    for suite in &report.suites {
        println!(
            "{} {:28} {}",
            if suite.passed { "PASS" } else { "FAIL" },
            suite.name,
            suite.detail
        );
    }
    if !report.all_passed {
        bail!("verification failed");
    }
    Ok(())
}
