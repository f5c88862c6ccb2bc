//! `greedy-lab`: experiment driver for the matching laboratory.

mod family;

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use greedy_lab::certifier::{self, Mode};
use greedy_lab::exact;
use greedy_lab::instances::Instance;
use greedy_lab::matchers::{self, Algorithm, MatcherConfig};
use greedy_lab::priority;
use greedy_lab::rng::mix_seed;
use greedy_lab::{DynamicGraph, Graph, NaiveDegreeOracle, TiePolicy};
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use family::Params;

/// Bad flags or configuration (exit 2).
#[derive(Debug)]
pub struct Usage(pub String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

/// A check found a counterexample (exit 1).
#[derive(Debug)]
pub struct Violation(pub String);

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Violation {}

#[derive(Parser)]
#[command(name = "greedy-lab", version, about = "Greedy matching heuristics, hard instances and certificates")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write an instance (`<out>/<name>.graph` plus metadata).
    Generate {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, default_value = "instance")]
        name: String,
    },
    /// Run a matcher for several trials and emit one CSV row per trial.
    Run {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long, default_value = "mingreedy")]
        algo: String,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Certify min-degree executions with the transfer scheme.
    Certify {
        #[command(flatten)]
        inst: InstanceArgs,
        /// `mingreedy` (random ties) or `mingreedy-det` (lowest ids).
        #[arg(long, default_value = "mingreedy")]
        algo: String,
        /// Enumerate every min-degree execution instead of sampling.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 100_000)]
        limit: usize,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long)]
        delta: Option<usize>,
        /// JSON summary destination (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Priority-game experiments.
    Game {
        #[command(subcommand)]
        cmd: GameCmd,
    },
    /// Time build plus full deletion of the degree structure.
    Bench {
        #[arg(long, value_enum, default_value = "dynamic")]
        structure: Structure,
        /// Comma-separated node counts; `1e5` notation accepted.
        #[arg(long, default_value = "1e5,2e5,4e5")]
        n: String,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Exit 1 unless every doubling factor lies in [1.5, 2.5].
        #[arg(long)]
        check: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fan a JSON experiment config across worker threads.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        emit_plot_data: bool,
    },
}

#[derive(Subcommand)]
enum GameCmd {
    Run {
        #[arg(long, value_enum)]
        adversary: AdversaryArg,
        /// Strategy id, or `all` for the bundled zoo.
        #[arg(long, default_value = "all")]
        strategy: String,
        #[arg(long, default_value_t = 4)]
        delta: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Include full transcripts in the output.
        #[arg(long)]
        transcripts: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AdversaryArg {
    Thm4,
    Thm6,
    Yao,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Regular,
    Indirect,
}

#[derive(Clone, Copy, ValueEnum)]
enum Structure {
    Dynamic,
    Naive,
}

#[derive(Args, Clone)]
struct InstanceArgs {
    /// Generator family.
    #[arg(long, conflicts_with = "input")]
    family: Option<String>,
    /// Saved instance (`name.graph`).
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    a: Option<i64>,
    #[arg(long)]
    b: Option<i64>,
    #[arg(long)]
    n: Option<i64>,
    #[arg(long)]
    m: Option<i64>,
    #[arg(long)]
    d: Option<i64>,
    #[arg(long)]
    cap: Option<i64>,
    /// Gadget labeling as six digits, e.g. 102345.
    #[arg(long)]
    perm: Option<i64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl InstanceArgs {
    fn params(&self) -> Params {
        [("a", self.a), ("b", self.b), ("n", self.n), ("m", self.m), ("d", self.d), ("cap", self.cap), ("perm", self.perm)]
            .into_iter()
            .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
            .collect()
    }

    fn build(&self) -> Result<(String, Params, Instance)> {
        match (&self.family, &self.input) {
            (Some(f), None) => Ok((f.clone(), self.params(), family::build(f, &self.params(), self.seed)?)),
            (None, Some(p)) => {
                let inst = family::load(p)?;
                Ok((inst.family.clone(), inst.params.clone(), inst))
            }
            _ => Err(Usage("give exactly one of --family or --input".into()).into()),
        }
    }
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// CSV destination (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the rows as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Per-trial runtimes, kept apart so result files stay deterministic.
    #[arg(long)]
    runtime: Option<PathBuf>,
    /// Write `x y` column files (trial, ratio) into this directory.
    #[arg(long)]
    emit_plot_data: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub family: String,
    pub params: String,
    pub algorithm: String,
    pub trial: usize,
    pub seed: u64,
    pub size: usize,
    pub optimum: Option<usize>,
    pub ratio: Option<String>,
    pub ratio_value: Option<f64>,
    pub unmatched: usize,
}

#[derive(Clone, Debug, Serialize)]
struct RuntimeRow {
    experiment: String,
    params: String,
    algorithm: String,
    trial: usize,
    seconds: f64,
}

fn parse_algo(name: &str) -> Result<(Algorithm, bool)> {
    let (base, det) = match name.strip_suffix("-det") {
        Some(b) => (b, true),
        None => (name, false),
    };
    let alg: Algorithm = base.parse().map_err(|e: greedy_lab::Error| Usage(e.to_string()))?;
    Ok((alg, det))
}

fn config_for(alg: Algorithm, det: bool, seed: u64) -> MatcherConfig {
    let cfg = MatcherConfig::new(alg, seed);
    if det {
        cfg.with_policies(TiePolicy::LowestId, TiePolicy::LowestId)
    } else {
        cfg
    }
}

struct Cell<'a> {
    experiment: &'a str,
    family: &'a str,
    params: String,
    algo: &'a str,
    inst: &'a Instance,
    optimum: Option<usize>,
}

/// Runs the trials of one cell; every matching is verified before it is reported.
fn run_cell(cell: &Cell, trials: usize, seed_of: impl Fn(usize) -> u64 + Sync) -> Result<Vec<(ResultRow, RuntimeRow)>> {
    let (alg, det) = parse_algo(cell.algo)?;
    let g = &cell.inst.graph;
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let seed = seed_of(trial);
            let start = Instant::now();
            let (m, _) = matchers::run(g, &config_for(alg, det, seed));
            let seconds = start.elapsed().as_secs_f64();
            let rep = exact::verify_matching(g, &m);
            if !rep.valid || !rep.maximal {
                bail!(Violation(format!("{} produced a bad matching: {:?}", cell.algo, rep.problems)));
            }
            let ratio = cell.optimum.filter(|&o| o > 0).map(|o| Ratio::new(m.size() as i64, o as i64));
            let row = ResultRow {
                experiment: cell.experiment.to_string(),
                family: cell.family.to_string(),
                params: cell.params.clone(),
                algorithm: cell.algo.to_string(),
                trial,
                seed,
                size: m.size(),
                optimum: cell.optimum,
                ratio: ratio.map(|r| format!("{}/{}", r.numer(), r.denom())),
                ratio_value: ratio.map(|r| *r.numer() as f64 / *r.denom() as f64),
                unmatched: (0..g.n()).filter(|&v| g.degree(v) > 0 && !m.is_covered(v)).count(),
            };
            let rt = RuntimeRow {
                experiment: cell.experiment.to_string(),
                params: cell.params.clone(),
                algorithm: cell.algo.to_string(),
                trial,
                seconds,
            };
            Ok((row, rt))
        })
        .collect()
}

fn writer(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            Box::new(io::BufWriter::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?))
        }
        None => Box::new(io::stdout().lock()),
    })
}

fn write_csv<T: Serialize>(path: Option<&Path>, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer(path)?);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize + ?Sized>(path: Option<&Path>, value: &T) -> Result<()> {
    let mut w = writer(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn write_plot(dir: &Path, name: &str, points: &[(f64, f64)]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut w = io::BufWriter::new(fs::File::create(dir.join(format!("{name}.dat")))?);
    for (x, y) in points {
        writeln!(w, "{x} {y}")?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_generate(args: &InstanceArgs, out: &Path, name: &str) -> Result<()> {
    let (_, _, inst) = args.build()?;
    inst.save(out, name)?;
    eprintln!("wrote {} ({} nodes, {} edges)", out.join(format!("{name}.graph")).display(), inst.graph.n(), inst.graph.m());
    Ok(())
}

fn cmd_run(args: &InstanceArgs, algo: &str, trials: usize, out: &OutputArgs) -> Result<()> {
    if trials == 0 {
        bail!(Usage("--trials must be at least 1".into()));
    }
    let (fam, params, inst) = args.build()?;
    let cell = Cell {
        experiment: "run",
        family: &fam,
        params: family::describe(&params),
        algo,
        optimum: family::optimum(&inst),
        inst: &inst,
    };
    let master = args.seed;
    let rows = run_cell(&cell, trials, |t| mix_seed(master, &[t as u64]))?;
    let (results, runtimes): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    write_csv(out.out.as_deref(), &results)?;
    if let Some(p) = &out.json {
        write_json(Some(p), &results)?;
    }
    if let Some(p) = &out.runtime {
        write_csv(Some(p), &runtimes)?;
    }
    if let Some(dir) = &out.emit_plot_data {
        let pts: Vec<(f64, f64)> = results.iter().filter_map(|r| r.ratio_value.map(|v| (r.trial as f64, v))).collect();
        write_plot(dir, &format!("ratio_{algo}"), &pts)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct CertifySummary {
    mode: Mode,
    delta: usize,
    executions: usize,
    passed: usize,
    failed: usize,
    optimum: usize,
    worst_ratio: String,
    target: String,
    first_failure: Option<certifier::Certification>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_certify(
    args: &InstanceArgs,
    algo: &str,
    exhaustive: bool,
    samples: usize,
    limit: usize,
    mode: Option<ModeArg>,
    delta: Option<usize>,
    out: Option<&Path>,
) -> Result<()> {
    let (_, _, inst) = args.build()?;
    let g = &inst.graph;
    let (alg, det) = parse_algo(algo)?;
    if alg != Algorithm::MinGreedy {
        bail!(Usage(format!("certify needs a min-degree run, got `{algo}`")));
    }
    let opt = match inst.optimum.as_ref().and_then(|c| c.witness.clone()) {
        Some(w) => w,
        None => exact::max_matching_exact(g)?.witness.context("exact solver returned no witness")?,
    };
    let delta = delta.unwrap_or(g.max_degree().max(3));
    let mode = match mode {
        Some(ModeArg::Regular) => Mode::Regular,
        Some(ModeArg::Indirect) => Mode::Indirect,
        None if g.is_regular(delta) || (delta == 3 && g.max_degree() <= 3) => Mode::Regular,
        None => Mode::Indirect,
    };
    let runs = if exhaustive {
        matchers::enumerate_min_degree_executions(g, limit)?
    } else if det {
        vec![matchers::run(g, &config_for(alg, true, args.seed))]
    } else {
        matchers::sample_min_degree_executions(g, samples, args.seed)
    };
    let certs: Vec<certifier::Certification> =
        runs.par_iter().map(|(_, t)| certifier::certify(g, t, &opt, mode, delta)).collect::<greedy_lab::Result<_>>()?;
    let worst = runs.iter().map(|(m, _)| m.size()).min().unwrap_or(opt.size());
    let failed = certs.iter().filter(|c| !c.passed()).count();
    let worst_ratio = if opt.size() == 0 { Ratio::from_integer(1) } else { Ratio::new(worst as i64, opt.size() as i64) };
    let summary = CertifySummary {
        mode,
        delta,
        executions: certs.len(),
        passed: certs.len() - failed,
        failed,
        optimum: opt.size(),
        worst_ratio: format!("{}/{}", worst_ratio.numer(), worst_ratio.denom()),
        target: certifier::fmt_q(&mode.target(delta)),
        first_failure: certs.into_iter().find(|c| !c.passed()),
    };
    write_json(out, &summary)?;
    if failed > 0 {
        bail!(Violation(format!("{failed} executions failed certification")));
    }
    Ok(())
}

#[derive(Serialize)]
struct GameRow {
    strategy: String,
    adversary: String,
    delta: Option<usize>,
    matching: Option<usize>,
    optimum: Option<usize>,
    ratio: String,
    consistent: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    yao: Option<priority::YaoStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    transcript: Option<priority::GameTranscript>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn q(r: Ratio<i64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[allow(clippy::too_many_arguments)]
fn cmd_game(
    adversary: AdversaryArg,
    strategy: &str,
    delta: usize,
    trials: usize,
    seed: u64,
    transcripts: bool,
    out: Option<&Path>,
) -> Result<()> {
    let zoo: Vec<Box<dyn priority::Strategy>> = if strategy == "all" {
        priority::strategy_zoo()
    } else {
        vec![priority::strategy_by_name(strategy).ok_or_else(|| Usage(format!("unknown strategy `{strategy}`")))?]
    };
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for s in &zoo {
        let s = s.as_ref();
        let played = match adversary {
            AdversaryArg::Thm4 => Some(priority::play(s, &mut priority::thm4_adversary(), seed).map(|t| (t, None))),
            AdversaryArg::Thm6 => Some(priority::play_thm6(s, delta).map(|(t, _)| (t, Some(delta)))),
            AdversaryArg::Yao => None,
        };
        let row = match played {
            Some(Ok((t, d))) => {
                let consistent = priority::check_consistency(&t, Some(s)).ok;
                if !consistent {
                    violations.push(s.name());
                }
                GameRow {
                    strategy: s.name(),
                    adversary: t.adversary.clone(),
                    delta: d,
                    matching: Some(t.matching_size()),
                    optimum: Some(t.optimum_size()?),
                    ratio: q(t.ratio()?),
                    consistent: Some(consistent),
                    yao: None,
                    transcript: transcripts.then_some(t),
                    error: None,
                }
            }
            Some(Err(e)) => GameRow {
                strategy: s.name(),
                adversary: adversary_name(adversary).to_string(),
                delta: None,
                matching: None,
                optimum: None,
                ratio: String::new(),
                consistent: None,
                yao: None,
                transcript: None,
                error: Some(e.to_string()),
            },
            None => {
                if trials == 0 {
                    bail!(Usage("--trials must be at least 1".into()));
                }
                let stats = priority::yao_expected_ratio(s, trials, seed)?;
                GameRow {
                    strategy: s.name(),
                    adversary: "yao".into(),
                    delta: None,
                    matching: None,
                    optimum: Some(3),
                    ratio: q(priority::yao_exact_ratio(s)?),
                    consistent: None,
                    yao: Some(stats),
                    transcript: None,
                    error: None,
                }
            }
        };
        rows.push(row);
    }
    write_json(out, &rows)?;
    if !violations.is_empty() {
        bail!(Violation(format!("inconsistent transcripts: {}", violations.join(", "))));
    }
    Ok(())
}

fn adversary_name(a: AdversaryArg) -> &'static str {
    match a {
        AdversaryArg::Thm4 => "thm4",
        AdversaryArg::Thm6 => "thm6",
        AdversaryArg::Yao => "yao",
    }
}

fn parse_sizes(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<usize>()
                .ok()
                .or_else(|| t.parse::<f64>().ok().filter(|x| x.is_finite() && *x >= 1.0).map(|x| x.round() as usize))
                .ok_or_else(|| Usage(format!("bad size `{t}`")).into())
        })
        .collect()
}

#[derive(Serialize)]
struct BenchRow {
    structure: &'static str,
    n: usize,
    m: usize,
    seconds: f64,
    factor: Option<f64>,
}

fn time_structure(g: &Graph, structure: Structure) -> f64 {
    let start = Instant::now();
    match structure {
        Structure::Dynamic => {
            let mut dg = DynamicGraph::new(g);
            for e in 0..g.m() {
                dg.delete_edge_id(e).expect("edge is live");
            }
        }
        Structure::Naive => {
            let mut nv = NaiveDegreeOracle::new(g);
            for (u, v) in g.edges() {
                nv.delete_edge(u, v).expect("edge is live");
            }
        }
    }
    start.elapsed().as_secs_f64()
}

fn cmd_bench(structure: Structure, sizes: &str, repeats: usize, seed: u64, check: bool, out: Option<&Path>) -> Result<()> {
    let sizes = parse_sizes(sizes)?;
    let name = match structure {
        Structure::Dynamic => "dynamic",
        Structure::Naive => "naive",
    };
    let mut rows: Vec<BenchRow> = Vec::new();
    for &n in &sizes {
        let g = greedy_lab::instances::gen_erdos_renyi(n, 3 * n, mix_seed(seed, &[n as u64]))?.graph;
        let seconds = (0..repeats.max(1)).map(|_| time_structure(&g, structure)).fold(f64::INFINITY, f64::min);
        let factor = rows.last().map(|p: &BenchRow| seconds / p.seconds * p.n as f64 * 2.0 / n as f64);
        rows.push(BenchRow { structure: name, n, m: g.m(), seconds, factor });
    }
    write_csv(out, &rows)?;
    if check {
        let bad: Vec<String> = rows
            .iter()
            .filter_map(|r| r.factor.filter(|f| !(1.5..=2.5).contains(f)).map(|f| format!("n={} factor {f:.2}", r.n)))
            .collect();
        if !bad.is_empty() {
            bail!(Violation(format!("doubling factors outside [1.5, 2.5]: {}", bad.join(", "))));
        }
    }
    Ok(())
}

/// Sweep configuration file.
#[derive(Clone, Debug, Deserialize)]
pub struct ExperimentConfig {
    pub id: String,
    pub family: String,
    /// Parameter name to the values it takes; cells are the cartesian product.
    pub grid: std::collections::BTreeMap<String, Vec<i64>>,
    pub algorithms: Vec<String>,
    pub trials: usize,
    pub seed: u64,
    /// Output directory.
    pub output: PathBuf,
}

impl ExperimentConfig {
    fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() || self.grid.values().any(|v| v.is_empty()) {
            bail!(Usage("grids must be non-empty".into()));
        }
        if self.trials == 0 {
            bail!(Usage("trials must be at least 1".into()));
        }
        for a in &self.algorithms {
            parse_algo(a)?;
        }
        Ok(())
    }

    fn param_cells(&self) -> Vec<Params> {
        let mut cells = vec![Params::new()];
        for (k, vs) in &self.grid {
            cells = cells
                .into_iter()
                .flat_map(|c| {
                    vs.iter().map(move |&v| {
                        let mut c = c.clone();
                        c.insert(k.clone(), v);
                        c
                    })
                })
                .collect();
        }
        cells
    }
}

#[derive(Serialize)]
struct CellSummary {
    params: String,
    algorithm: String,
    trials: usize,
    optimum: Option<usize>,
    mean_ratio: Option<f64>,
    min_ratio: Option<f64>,
    mean_size: f64,
}

fn cmd_sweep(config: &Path, plot: bool) -> Result<()> {
    let text = fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
    let cfg: ExperimentConfig = serde_json::from_str(&text).map_err(|e| Usage(format!("bad config: {e}")))?;
    cfg.validate()?;
    let cells = cfg.param_cells();
    let instances: Vec<(Params, Instance, Option<usize>)> = cells
        .into_par_iter()
        .enumerate()
        .map(|(i, p)| {
            let inst = family::build(&cfg.family, &p, mix_seed(cfg.seed, &[i as u64]))?;
            let opt = family::optimum(&inst);
            Ok((p, inst, opt))
        })
        .collect::<Result<_>>()?;
    let mut results = Vec::new();
    let mut runtimes = Vec::new();
    let mut summaries = Vec::new();
    for (ci, (p, inst, opt)) in instances.iter().enumerate() {
        for (ai, algo) in cfg.algorithms.iter().enumerate() {
            let cell = Cell {
                experiment: &cfg.id,
                family: &cfg.family,
                params: family::describe(p),
                algo,
                inst,
                optimum: *opt,
            };
            let rows = run_cell(&cell, cfg.trials, |t| mix_seed(cfg.seed, &[ci as u64, ai as u64, t as u64]))?;
            let ratios: Vec<f64> = rows.iter().filter_map(|(r, _)| r.ratio_value).collect();
            summaries.push(CellSummary {
                params: cell.params.clone(),
                algorithm: algo.clone(),
                trials: cfg.trials,
                optimum: *opt,
                mean_ratio: (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64),
                min_ratio: ratios.iter().copied().reduce(f64::min),
                mean_size: rows.iter().map(|(r, _)| r.size as f64).sum::<f64>() / rows.len() as f64,
            });
            for (r, t) in rows {
                results.push(r);
                runtimes.push(t);
            }
        }
    }
    fs::create_dir_all(&cfg.output)?;
    write_csv(Some(&cfg.output.join("results.csv")), &results)?;
    write_csv(Some(&cfg.output.join("runtime.csv")), &runtimes)?;
    write_json(Some(&cfg.output.join("summary.json")), &summaries)?;
    if plot {
        for algo in &cfg.algorithms {
            let pts: Vec<(f64, f64)> = summaries
                .iter()
                .enumerate()
                .filter(|(_, s)| &s.algorithm == algo)
                .filter_map(|(i, s)| s.mean_ratio.map(|m| (i as f64, m)))
                .collect();
            write_plot(&cfg.output.join("plot"), &format!("mean_ratio_{algo}"), &pts)?;
        }
    }
    eprintln!("{} rows written to {}", results.len(), cfg.output.display());
    Ok(())
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("GREEDY_LAB_THREADS") {
        let n: usize = v.parse().map_err(|_| Usage(format!("GREEDY_LAB_THREADS must be a positive integer, got `{v}`")))?;
        if n == 0 {
            bail!(Usage("GREEDY_LAB_THREADS must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().ok();
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    init_threads()?;
    match cli.cmd {
        Cmd::Generate { inst, out, name } => cmd_generate(&inst, &out, &name),
        Cmd::Run { inst, algo, trials, out } => cmd_run(&inst, &algo, trials, &out),
        Cmd::Certify { inst, algo, exhaustive, samples, limit, mode, delta, out } => {
            cmd_certify(&inst, &algo, exhaustive, samples, limit, mode, delta, out.as_deref())
        }
        Cmd::Game { cmd: GameCmd::Run { adversary, strategy, delta, trials, seed, transcripts, out } } => {
            cmd_game(adversary, &strategy, delta, trials, seed, transcripts, out.as_deref())
        }
        Cmd::Bench { structure, n, repeats, seed, check, out } => cmd_bench(structure, &n, repeats, seed, check, out.as_deref()),
        Cmd::Sweep { config, emit_plot_data } => cmd_sweep(&config, emit_plot_data),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Violation>().is_some() {
        return 1;
    }
    if err.downcast_ref::<Usage>().is_some() {
        return 2;
    }
    let io = err.chain().any(|e| {
        e.is::<io::Error>()
            || e.downcast_ref::<csv::Error>().is_some_and(|c| matches!(c.kind(), csv::ErrorKind::Io(_)))
            || matches!(e.downcast_ref::<greedy_lab::Error>(), Some(greedy_lab::Error::Io(_) | greedy_lab::Error::Parse { .. }))
    });
    if io {
        3
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
