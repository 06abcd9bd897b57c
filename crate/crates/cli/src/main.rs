//! `loqc-certify`: reproduces the numerical studies and certifies simulated
//! or recorded count data.

mod config;
mod svg;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use loqc_core::certify::{
    export_counts, ingest_counts, reference_fidelity, ActualMap, Certificate, Setting,
};
use loqc_core::engine::{distribution_csv, output_distribution, sample_distribution, ExperimentSpec};
use loqc_core::studies::{
    certify_ingested, run_fidelity_demo, run_partition_study, run_perturbation_study, run_witness_compare,
    simulate_certification, WitnessBench,
};
use loqc_core::unitaries::{fourier_unitary, perturb};
use serde::Serialize;

use config::{parse_unitary, CountsCertifyParams, Scenario, ScenarioConfig, SimulateParams};
use svg::{Plot, Series};

#[derive(Parser, Debug)]
#[command(name = "loqc-certify", version, about = "Linear-optical state certification studies")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct Global {
    /// Scenario configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed, overriding the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Exact distributions instead of sampling.
    #[arg(long, global = true, conflicts_with = "shots")]
    exact: bool,
    /// Shots per setting.
    #[arg(long, global = true)]
    shots: Option<u64>,
    /// Failure probability of the finite-size bounds.
    #[arg(long, global = true)]
    epsilon: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// All four witnesses over an overlap grid.
    WitnessCompare,
    /// Overshoot statistics under perturbed witness interferometers.
    PerturbStudy,
    /// Partition weights and witness values along the time-delay family.
    PartitionStudy,
    /// Source-witness fidelity certificates for Haar-random targets.
    FidelityDemo,
    /// Certificate from a reversal count file and one witness count file.
    CountsCertify {
        /// Counts recorded under the inverse target
        #[arg(long)]
        rev: Option<PathBuf>,
        /// Counts recorded on a witness interferometer
        #[arg(long)]
        witness: Option<PathBuf>,
        /// Target unitary: fourier, identity, haar:<seed>, file:<path>.
        #[arg(long)]
        target: Option<String>,
        /// Accept only if the certified threshold reaches this value.
        #[arg(long)]
        accept_above: Option<f64>,
    },
    /// Output distribution dump, optionally with count export and a certificate.
    Simulate,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::WitnessCompare => "witness-compare",
            Command::PerturbStudy => "perturb-study",
            Command::PartitionStudy => "partition-study",
            Command::FidelityDemo => "fidelity-demo",
            Command::CountsCertify { .. } => "counts-certify",
            Command::Simulate => "simulate",
        }
    }

    fn default_scenario(&self) -> Scenario {
        match self {
            Command::WitnessCompare => Scenario::WitnessCompare(Default::default()),
            Command::PerturbStudy => Scenario::PerturbStudy(Default::default()),
            Command::PartitionStudy => Scenario::PartitionStudy(Default::default()),
            Command::FidelityDemo => Scenario::FidelityDemo(Default::default()),
            Command::CountsCertify { .. } => Scenario::CountsCertify(Default::default()),
            Command::Simulate => Scenario::Simulate(Default::default()),
        }
    }
}

fn shots_override(g: &Global) -> Option<u64> {
    if g.exact {
        Some(0)
    } else {
        g.shots
    }
}

fn ignored(flag: &str, scenario: &str) {
    eprintln!("note: {flag} has no effect on {scenario}");
}

/// Applies the global flags on top of the configured scenario.
fn apply_overrides(s: &mut Scenario, g: &Global) {
    let name = s.name();
    let shots = shots_override(g);
    match s {
        Scenario::WitnessCompare(p) => {
            if let Some(v) = g.seed {
                p.seed = v;
            }
            if let Some(v) = shots {
                p.shots = v;
            }
            if let Some(v) = g.epsilon {
                p.epsilon = v;
            }
        }
        Scenario::PerturbStudy(p) => {
            if let Some(v) = g.seed {
                p.seed = v;
            }
            if shots.is_some() {
                ignored("--shots/--exact", name);
            }
            if g.epsilon.is_some() {
                ignored("--epsilon", name);
            }
        }
        Scenario::PartitionStudy(_) => {
            if g.seed.is_some() || shots.is_some() || g.epsilon.is_some() {
                ignored("--seed/--shots/--exact/--epsilon", name);
            }
        }
        Scenario::FidelityDemo(p) => {
            if let Some(v) = g.seed {
                p.seed = v;
            }
            if let Some(v) = shots {
                p.shots = v;
            }
            if let Some(v) = g.epsilon {
                p.epsilon = v;
            }
        }
        Scenario::CountsCertify(p) => {
            if let Some(v) = g.epsilon {
                p.options.epsilon = v;
            }
            if g.seed.is_some() || shots.is_some() {
                ignored("--seed/--shots/--exact", name);
            }
        }
        Scenario::Simulate(p) => {
            if let Some(v) = g.seed {
                p.seed = v;
            }
            if let Some(v) = shots {
                p.shots = v;
            }
            if let (Some(v), Some(c)) = (g.epsilon, p.certification.as_mut()) {
                c.epsilon = v;
            }
        }
    }
}

struct Output {
    dir: PathBuf,
}

impl Output {
    fn new(dir: PathBuf) -> anyhow::Result<Self> {
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { dir })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn csv<T: Serialize>(&self, name: &str, rows: &[T]) -> anyhow::Result<()> {
        let mut w = csv::Writer::from_path(self.path(name)).with_context(|| format!("writing {name}"))?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    fn json<T: Serialize + ?Sized>(&self, name: &str, value: &T) -> anyhow::Result<()> {
        fs::write(self.path(name), serde_json::to_string_pretty(value)? + "\n")
            .with_context(|| format!("writing {name}"))
    }

    fn text(&self, name: &str, body: &str) -> anyhow::Result<()> {
        fs::write(self.path(name), body).with_context(|| format!("writing {name}"))
    }

    fn svg(&self, name: &str, plot: &Plot) -> anyhow::Result<()> {
        self.text(name, &plot.render())
    }
}

fn witness_compare(p: &loqc_core::studies::WitnessCompareParams, out: &Output) -> anyhow::Result<i32> {
    let bench = WitnessBench::new(3, p.witness.clone())?;
    let rows = run_witness_compare(&bench, p)?;
    out.csv("witness_compare.csv", &rows)?;
    out.json("witness_compare.json", &rows)?;
    let xs: Vec<f64> = rows.iter().map(|r| r.cyclic_overlap).collect();
    let curve = |f: &dyn Fn(&loqc_core::studies::WitnessCompareRow) -> f64| {
        xs.iter().copied().zip(rows.iter().map(f)).collect::<Vec<_>>()
    };
    out.svg(
        "witness_compare.svg",
        &Plot {
            title: format!("witness estimates (shots = {})", p.shots),
            x_label: "cyclic overlap x12 x13 x23".into(),
            y_label: "estimate of c3".into(),
            series: vec![
                Series::new("true c3", curve(&|r| r.true_c)).dashed(),
                Series::new("fourier", curve(&|r| r.fourier_corrected.unwrap_or(r.fourier_raw))),
                Series::new("cyclic", curve(&|r| r.cyclic_corrected.unwrap_or(r.cyclic_raw))),
                Series::new("hom", curve(&|r| r.hom_corrected.unwrap_or(r.hom_raw))),
                Series::new("twomode", curve(&|r| r.twomode_corrected.unwrap_or(r.twomode_raw))),
            ],
        },
    )?;
    println!("witness-compare: {} grid points -> {}", rows.len(), out.dir.display());
    Ok(0)
}

fn perturb_study(p: &loqc_core::studies::PerturbationParams, out: &Output) -> anyhow::Result<i32> {
    let bench = WitnessBench::new(p.state.n(), p.witness.clone())?;
    let (rows, summary) = run_perturbation_study(&bench, p)?;
    out.csv("perturbation.csv", &rows)?;
    out.csv("perturbation_summary.csv", &summary)?;
    out.json("perturbation_summary.json", &summary)?;
    // sorted excess over the true value, one curve per witness at the largest perturbation
    let top = p.perturbations.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let series = bench
        .methods()
        .into_iter()
        .map(|m| {
            let mut ex: Vec<f64> = rows
                .iter()
                .filter(|r| r.method == m && r.perturbation == top)
                .map(|r| r.c_raw - r.true_c)
                .collect();
            ex.sort_by(f64::total_cmp);
            let k = ex.len().max(1) as f64;
            Series::new(m.name(), ex.into_iter().enumerate().map(|(i, e)| (i as f64 / k, e)).collect())
        })
        .collect();
    out.svg(
        "perturbation.svg",
        &Plot {
            title: format!("raw estimate minus true c at perturbation {top}"),
            x_label: "fraction of devices".into(),
            y_label: "c_raw - c_true".into(),
            series,
        },
    )?;
    for s in &summary {
        println!(
            "{:<8} eps={:<5} overshoots {}/{} (max excess {:+.3e})",
            s.method, s.perturbation, s.overshoots, s.trials, s.max_excess
        );
    }
    Ok(0)
}

fn partition_study(p: &loqc_core::studies::PartitionStudyParams, out: &Output) -> anyhow::Result<i32> {
    let bench = WitnessBench::new(3, p.witness.clone())?;
    let rows = run_partition_study(&bench, p)?;
    out.csv("partition.csv", &rows)?;
    type Col = fn(&loqc_core::studies::PartitionRow) -> f64;
    let curve = |f: Col| rows.iter().map(|r| (r.tau, f(r))).collect::<Vec<_>>();
    out.svg(
        "partition_weights.svg",
        &Plot {
            title: "partition weights along the time-delay family".into(),
            x_label: "tau".into(),
            y_label: "weight".into(),
            series: vec![
                Series::new("(1,2)(3)", curve(|r| r.w_12_3)),
                Series::new("(1,3)(2)", curve(|r| r.w_13_2)),
                Series::new("(2,3)(1)", curve(|r| r.w_23_1)),
                Series::new("(1,2,3)", curve(|r| r.w_123)),
                Series::new("(1)(2)(3)", curve(|r| r.w_1_2_3)),
            ],
        },
    )?;
    out.svg(
        "partition_witnesses.svg",
        &Plot {
            title: "witness estimates along the time-delay family".into(),
            x_label: "tau".into(),
            y_label: "estimate of c3".into(),
            series: vec![
                Series::new("true c3", curve(|r| r.true_c)).dashed(),
                Series::new("fourier", curve(|r| r.fourier_raw)),
                Series::new("cyclic", curve(|r| r.cyclic_raw)),
                Series::new("hom", curve(|r| r.hom_raw)),
                Series::new("twomode", curve(|r| r.twomode_raw)),
            ],
        },
    )?;
    let negative = rows.iter().filter(|r| r.negative).count();
    println!("partition-study: {} delays, {negative} with a negative weight", rows.len());
    Ok(0)
}

fn fidelity_demo(p: &loqc_core::studies::FidelityDemoParams, out: &Output) -> anyhow::Result<i32> {
    let (rows, certs) = run_fidelity_demo(p)?;
    out.csv("fidelity.csv", &rows)?;
    out.json("certificates.json", &certs)?;
    let mut by_eps: BTreeMap<usize, (f64, Vec<(f64, f64)>)> = BTreeMap::new();
    for r in &rows {
        let k = p.source_epsilons.iter().position(|&e| e == r.source_epsilon).unwrap_or(0);
        by_eps.entry(k).or_insert((r.source_epsilon, Vec::new())).1.push((r.reference_fidelity, r.threshold));
    }
    let mut series: Vec<Series> = by_eps
        .into_values()
        .map(|(eps, mut pts)| {
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            Series::new(format!("source eps {eps}"), pts)
        })
        .collect();
    let lo = rows.iter().map(|r| r.reference_fidelity).fold(f64::INFINITY, f64::min);
    let hi = rows.iter().map(|r| r.reference_fidelity).fold(f64::NEG_INFINITY, f64::max);
    series.push(Series::new("T = reference", vec![(lo, lo), (hi, hi)]).dashed());
    out.svg(
        "fidelity.svg",
        &Plot {
            title: format!("certified threshold vs reference (shots = {})", p.shots),
            x_label: "reference fidelity".into(),
            y_label: "threshold T".into(),
            series,
        },
    )?;
    let sound = rows.iter().filter(|r| r.sound).count();
    println!("fidelity-demo: {} runs, {sound} with T <= reference", rows.len());
    Ok(0)
}

fn report(cert: &Certificate) {
    println!(
        "theorem {}: T = {:.6} (p1 = {:.6}, second = {:.6}, delta1 = {:.3e}, delta2 = {:.3e})",
        cert.theorem.number(),
        cert.threshold,
        cert.p1.value,
        cert.second.value,
        cert.delta1,
        cert.delta2
    );
    if let Some(v) = cert.verdict {
        println!("verdict: {v:?} (accept above {})", cert.accept_above.unwrap_or(f64::NAN));
    }
}

fn counts_certify(p: &CountsCertifyParams, out: &Output) -> anyhow::Result<i32> {
    let rev_path = p.rev.as_ref().context("missing reversal count file (--rev)")?;
    let wit_path = p.witness.as_ref().context("missing witness count file (--witness)")?;
    let target_spec = p.target.as_deref().context("missing target unitary (--target)")?;
    let rev = ingest_counts(rev_path)?;
    let witness = ingest_counts(wit_path)?;
    let target = parse_unitary(target_spec, rev.n, rev.m)?;
    let mut cert = certify_ingested(&target, &rev, &witness, &p.options)?;
    if let Some(t) = p.accept_above {
        cert = cert.judged(t);
    }
    eprintln!(
        "ingested rev: {} retained, {} dropped; {:?}: {} retained, {} dropped",
        rev.retained, rev.dropped, witness.setting, witness.retained, witness.dropped
    );
    out.json("certificate.json", &cert)?;
    report(&cert);
    Ok(cert.exit_code())
}

fn simulate(p: &SimulateParams, out: &Output) -> anyhow::Result<i32> {
    let model = p.model.build()?;
    let n = model.n();
    let u = parse_unitary(&p.unitary, n, p.modes)?;
    let spec = ExperimentSpec::new(u.clone(), p.input(n)?, model.clone())?;
    let dist = output_distribution(&spec)?;
    out.text("distribution.csv", &distribution_csv(&dist))?;
    if p.shots > 0 {
        let counts = sample_distribution(&dist, p.shots, p.seed);
        if let Some(setting) = p.setting {
            export_counts(&out.path("counts.json"), n, setting, &u, &counts)?;
        }
    }
    println!("simulate: {} output patterns -> {}", dist.entries().len(), out.dir.display());
    let Some(c) = &p.certification else {
        return Ok(0);
    };
    let target = parse_unitary(&c.target, n, p.modes)?;
    let actual = ActualMap::Unitary(perturb(&target, c.device_perturbation, c.device_seed)?);
    let run = simulate_certification(&target, &actual, &model, p.shots, p.seed, c.epsilon, c.epsilon_split)?;
    if let (Some(rev), Some(wit)) = (&run.rev_counts, &run.witness_counts) {
        export_counts(&out.path("rev.json"), n, Setting::Rev, &target.adjoint(), rev)?;
        export_counts(&out.path("fourier.json"), n, Setting::Fourier, &fourier_unitary(n)?, wit)?;
    }
    let mut cert = run.certificate;
    if let Some(t) = c.accept_above {
        cert = cert.judged(t);
    }
    out.json("certificate.json", &cert)?;
    if let Ok(f) = reference_fidelity(&target, &actual, &model) {
        println!("reference fidelity {f:.6}");
    }
    report(&cert);
    Ok(cert.exit_code())
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("LOQC_CERTIFY_THREADS") {
        let k: usize = v.trim().parse().with_context(|| format!("LOQC_CERTIFY_THREADS={v:?}"))?;
        if k == 0 {
            bail!("LOQC_CERTIFY_THREADS must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(k).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    configure_threads()?;
    let g = &cli.global;
    let mut cfg = match &g.config {
        Some(path) => config::load(path)?,
        None => ScenarioConfig {
            scenario: cli.command.default_scenario(),
            out: None,
        },
    };
    if cfg.scenario.name() != cli.command.name() {
        bail!(
            "config describes scenario {:?} but the subcommand is {:?}",
            cfg.scenario.name(),
            cli.command.name()
        );
    }
    apply_overrides(&mut cfg.scenario, g);
    if let (
        Command::CountsCertify {
            rev,
            witness,
            target,
            accept_above,
        },
        Scenario::CountsCertify(p),
    ) = (&cli.command, &mut cfg.scenario)
    {
        p.rev = rev.clone().or(p.rev.take());
        p.witness = witness.clone().or(p.witness.take());
        p.target = target.clone().or(p.target.take());
        p.accept_above = accept_above.or(p.accept_above);
    }
    let dir = g
        .out
        .clone()
        .or(cfg.out.clone())
        .unwrap_or_else(|| Path::new("out").join(cfg.scenario.name()));
    let out = Output::new(dir)?;
    cfg.out = None;
    out.json("config.json", &cfg)?;
    match &cfg.scenario {
        Scenario::WitnessCompare(p) => witness_compare(p, &out),
        Scenario::PerturbStudy(p) => perturb_study(p, &out),
        Scenario::PartitionStudy(p) => partition_study(p, &out),
        Scenario::FidelityDemo(p) => fidelity_demo(p, &out),
        Scenario::CountsCertify(p) => counts_certify(p, &out),
        Scenario::Simulate(p) => simulate(p, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
