mod config;

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use btwc_core::bandwidth::{percentile_provision, simulate, tradeoff_curve, DemandModel, Payload};
use btwc_core::compression::compare_with;
use btwc_core::hwcost::{cost_for_distance, CellLibrary, GateKind};
use btwc_core::montecarlo::{classify_cycles, complex_trace, estimate_ler, DecoderMode};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use config::{check_distance, check_percentile, check_positive, check_probability, parse_count, FileConfig};

#[derive(Parser, Debug)]
#[command(name = "btwc", version, about = "Surface-code triage decoder experiments")]
struct Cli {
    /// Key-value config file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Root seed for all randomness.
    #[arg(long, global = true, env = "BTWC_SEED")]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fraction of cycles handled on chip over a (d, p) grid.
    Coverage(GridArgs),
    /// Logical error rate of the baseline and triage+baseline decoders.
    Ler(LerArgs),
    /// Off-chip decode queue with percentile provisioning.
    Bandwidth(BandwidthArgs),
    /// Off-chip bits of sparse compression versus triage shipping.
    Compress(CompressArgs),
    /// Netlist cost against a cell library.
    Cost(CostArgs),
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long, value_delimiter = ',')]
    distance: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    #[arg(long, value_parser = parse_count)]
    cycles: Option<u64>,
}

#[derive(Args, Debug)]
struct LerArgs {
    #[arg(long, value_delimiter = ',')]
    distance: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    #[arg(long, value_parser = parse_count)]
    trials: Option<u64>,
    /// both, baseline or clique
    #[arg(long)]
    mode: Option<String>,
}

#[derive(Args, Debug)]
struct BandwidthArgs {
    /// Logical qubits sharing the off-chip link.
    #[arg(long)]
    qubits: Option<u32>,
    /// Per-qubit, per-cycle off-chip request probability.
    #[arg(long)]
    q: Option<f64>,
    /// Draw requests from simulated complex cycles at --distance/--p instead.
    #[arg(long)]
    trace: bool,
    #[arg(long)]
    distance: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, value_parser = parse_count)]
    cycles: Option<u64>,
    /// Provision this percentile of per-cycle demand.
    #[arg(long, conflicts_with = "bandwidth")]
    percentile: Option<f64>,
    /// Provision exactly this many decodes per cycle.
    #[arg(long)]
    bandwidth: Option<u32>,
    /// Also sweep these percentiles into a trade-off curve.
    #[arg(long, value_delimiter = ',')]
    tradeoff: Vec<f64>,
    /// Syndrome rounds shipped per request; defaults to the distance.
    #[arg(long)]
    window_rounds: Option<usize>,
}

#[derive(Args, Debug)]
struct CompressArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// Syndrome rounds shipped per complex cycle; defaults to the distance.
    #[arg(long)]
    window_rounds: Option<usize>,
}

#[derive(Args, Debug)]
struct CostArgs {
    #[arg(long, value_delimiter = ',')]
    distance: Vec<usize>,
    /// Cell library file (kind delay_ps area_um2 jj_count); bundled ERSFQ by default.
    #[arg(long)]
    library: Option<PathBuf>,
    #[arg(long)]
    clock_hz: Option<f64>,
    #[arg(long)]
    energy_j: Option<f64>,
    #[arg(long)]
    activity: Option<f64>,
}

/// Finished experiment: every file is rendered before any is written.
struct Output {
    files: Vec<(&'static str, Vec<u8>)>,
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

fn csv_file(config: &Value, header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut buf = format!("# config: {}\n", serde_json::to_string(config)?).into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
    }
    Ok(buf)
}

fn json_file(config: &Value, results: Value) -> Result<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(&json!({ "config": config, "results": results }))?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

fn pick_list<T: Clone>(flag: &[T], file: &Option<config::OneOrMany<T>>, default: &[T]) -> Vec<T> {
    if !flag.is_empty() {
        flag.to_vec()
    } else if let Some(v) = file {
        v.to_vec()
    } else {
        default.to_vec()
    }
}

fn distances(v: Vec<usize>) -> Result<Vec<usize>> {
    if v.is_empty() {
        bail!("distance list is empty");
    }
    v.into_iter().map(check_distance).collect()
}

fn probabilities(v: Vec<f64>) -> Result<Vec<f64>> {
    if v.is_empty() {
        bail!("p list is empty");
    }
    v.into_iter().map(|p| check_probability("p", p)).collect()
}

fn coverage(args: &GridArgs, file: &FileConfig, seed: u64) -> Result<Output> {
    let ds = distances(pick_list(&args.distance, &file.distance, &[3, 5, 7, 11]))?;
    let ps = probabilities(pick_list(&args.p, &file.p, &[5e-4, 1e-3, 5e-3, 1e-2]))?;
    let file_cycles = file.cycles.map(|c| c.get()).transpose()?;
    let cycles = check_positive("cycles", pick(args.cycles, file_cycles, 100_000))?;
    let config = json!({ "command": "coverage", "seed": seed, "distance": ds, "p": ps, "cycles": cycles });
    let mut rows = Vec::new();
    let mut results = Vec::new();
    for &d in &ds {
        for &p in &ps {
            let s = classify_cycles(d, p, cycles, seed)?;
            rows.push(vec![
                d.to_string(),
                p.to_string(),
                cycles.to_string(),
                s.frac_all0.to_string(),
                s.frac_local1.to_string(),
                s.frac_complex.to_string(),
                s.coverage().to_string(),
            ]);
            results.push(json!({
                "d": d, "p": p, "cycles": cycles,
                "frac_all0": s.frac_all0, "frac_local1": s.frac_local1, "frac_complex": s.frac_complex,
                "coverage": s.coverage(), "coverage_std_err": s.coverage_std_err(),
                "coverage_x": s.coverage_of(btwc_core::StabilizerType::X),
                "coverage_z": s.coverage_of(btwc_core::StabilizerType::Z),
            }));
        }
    }
    let header = ["d", "p", "cycles", "frac_all0", "frac_local1", "frac_complex", "coverage"];
    Ok(Output {
        files: vec![
            ("coverage.csv", csv_file(&config, &header, &rows)?),
            ("coverage.json", json_file(&config, Value::Array(results))?),
        ],
    })
}

fn modes(name: &str) -> Result<Vec<DecoderMode>> {
    Ok(match name {
        "both" => vec![DecoderMode::Baseline, DecoderMode::CliquePlusBaseline],
        "baseline" => vec![DecoderMode::Baseline],
        "clique" | "clique+baseline" => vec![DecoderMode::CliquePlusBaseline],
        other => bail!("mode must be both, baseline or clique, got `{other}`"),
    })
}

fn ler(args: &LerArgs, file: &FileConfig, seed: u64) -> Result<Output> {
    let ds = distances(pick_list(&args.distance, &file.distance, &[3, 5]))?;
    let ps = probabilities(pick_list(&args.p, &file.p, &[1e-3]))?;
    let file_trials = file.trials.map(|c| c.get()).transpose()?;
    let trials = check_positive("trials", pick(args.trials, file_trials, 100_000))?;
    let mode = pick(args.mode.clone(), file.mode.clone(), "both".to_string());
    let ms = modes(&mode)?;
    let config = json!({ "command": "ler", "seed": seed, "distance": ds, "p": ps, "trials": trials, "mode": mode });
    let mut rows = Vec::new();
    let mut results = Vec::new();
    for &d in &ds {
        for &p in &ps {
            for &m in &ms {
                let r = estimate_ler(d, p, trials, m, seed)?;
                rows.push(vec![
                    d.to_string(),
                    p.to_string(),
                    trials.to_string(),
                    m.to_string(),
                    r.logical_failures.to_string(),
                    r.ler.to_string(),
                    r.wilson_ci.0.to_string(),
                    r.wilson_ci.1.to_string(),
                ]);
                results.push(json!({
                    "d": d, "p": p, "trials": trials, "mode": m.to_string(),
                    "failures": r.logical_failures, "ler": r.ler,
                    "ci_lo": r.wilson_ci.0, "ci_hi": r.wilson_ci.1, "offchip_blocks": r.offchip_blocks,
                }));
            }
        }
    }
    let header = ["d", "p", "trials", "mode", "failures", "ler", "ci_lo", "ci_hi"];
    Ok(Output {
        files: vec![
            ("ler.csv", csv_file(&config, &header, &rows)?),
            ("ler.json", json_file(&config, Value::Array(results))?),
        ],
    })
}

fn bandwidth(args: &BandwidthArgs, file: &FileConfig, seed: u64) -> Result<Output> {
    let qubits = pick(args.qubits, file.qubits, 1000);
    let file_cycles = file.cycles.map(|c| c.get()).transpose()?;
    let cycles = check_positive("cycles", pick(args.cycles, file_cycles, 100_000))? as usize;
    let trace = args.trace || file.trace.unwrap_or(false);
    let file_d = file.distance.as_ref().map(|v| v.to_vec()[0]);
    let d = check_distance(pick(args.distance, file_d, 11))?;
    let window_rounds = pick(args.window_rounds, file.window_rounds, d);
    if window_rounds == 0 {
        bail!("window_rounds must be at least 1");
    }
    let (model, model_config) = if trace {
        let file_p = file.p.as_ref().map(|v| v.to_vec()[0]);
        let p = check_probability("p", pick(args.p, file_p, 1e-3))?;
        let counts = complex_trace(d, p, qubits as u64, cycles as u64, seed)?;
        (DemandModel::Trace { qubits, counts }, json!({ "kind": "trace", "qubits": qubits, "distance": d, "p": p }))
    } else {
        let q = check_probability("q", pick(args.q, file.q, 0.05))?;
        (DemandModel::bernoulli(qubits, q)?, json!({ "kind": "bernoulli", "qubits": qubits, "q": q, "distance": d }))
    };
    let bw_flag = args.bandwidth.or(if args.percentile.is_some() { None } else { file.bandwidth });
    let (provisioned, percentile) = match bw_flag {
        Some(b) => (b, None),
        None => {
            let pct = check_percentile(pick(args.percentile, file.percentile, 99.0))?;
            (percentile_provision(&model, pct, cycles)?, Some(pct))
        }
    };
    let grid: Vec<f64> =
        if !args.tradeoff.is_empty() { args.tradeoff.clone() } else { file.tradeoff.clone().unwrap_or_default() };
    for &g in &grid {
        check_percentile(g)?;
    }
    let config = json!({
        "command": "bandwidth", "seed": seed, "model": model_config, "cycles": cycles,
        "percentile": percentile, "provisioned": provisioned, "tradeoff": grid, "window_rounds": window_rounds,
    });
    let t = simulate(&model, provisioned, cycles, seed)?;
    let rows: Vec<Vec<String>> = t
        .log
        .iter()
        .enumerate()
        .map(|(i, c)| {
            vec![
                i.to_string(),
                c.new_requests.to_string(),
                c.carryover.to_string(),
                c.served.to_string(),
                (c.is_stall as u8).to_string(),
            ]
        })
        .collect();
    let s = &t.summary;
    let payload = Payload::for_distance(d, window_rounds);
    let mut results = json!({
        "mean_requests": model.mean_requests(),
        "provisioned": s.provisioned,
        "stall_fraction": s.stall_fraction,
        "exec_time_overhead": num(s.exec_time_overhead),
        "max_backlog": s.max_backlog,
        "final_backlog": s.final_backlog,
        "stall_cycles": s.stall_cycles,
        "work_cycles": s.work_cycles,
        "total_generated": s.total_generated,
        "total_served": s.total_served,
        "bandwidth_reduction": num(btwc_core::bandwidth::reduction_factor(qubits, provisioned as f64, &payload)),
    });
    let mut files =
        vec![("bandwidth_trace.csv", csv_file(&config, &["cycle", "new", "carryover", "served", "is_stall"], &rows)?)];
    if !grid.is_empty() {
        let curve = tradeoff_curve(&model, &grid, cycles, seed, &payload)?;
        let rows: Vec<Vec<String>> = curve
            .iter()
            .map(|pt| {
                vec![
                    pt.percentile.to_string(),
                    pt.provisioned.to_string(),
                    pt.bandwidth_reduction.to_string(),
                    pt.exec_time_increase.to_string(),
                    pt.stall_fraction.to_string(),
                ]
            })
            .collect();
        let header = ["percentile", "provisioned", "bandwidth_reduction", "exec_time_increase", "stall_fraction"];
        files.push(("tradeoff.csv", csv_file(&config, &header, &rows)?));
        results["max_reduction"] = num(btwc_core::bandwidth::max_reduction(&model, &payload));
        results["tradeoff"] = Value::Array(
            curve
                .iter()
                .map(|pt| {
                    json!({
                        "percentile": pt.percentile, "provisioned": pt.provisioned,
                        "bandwidth_reduction": num(pt.bandwidth_reduction),
                        "exec_time_increase": num(pt.exec_time_increase), "stall_fraction": pt.stall_fraction,
                    })
                })
                .collect(),
        );
    }
    files.push(("bandwidth.json", json_file(&config, results)?));
    Ok(Output { files })
}

fn compress(args: &CompressArgs, file: &FileConfig, seed: u64) -> Result<Output> {
    let ds = distances(pick_list(&args.grid.distance, &file.distance, &[3, 5, 7, 11]))?;
    let ps = probabilities(pick_list(&args.grid.p, &file.p, &[5e-4, 1e-3, 5e-3, 1e-2]))?;
    let file_cycles = file.cycles.map(|c| c.get()).transpose()?;
    let cycles = check_positive("cycles", pick(args.grid.cycles, file_cycles, 100_000))?;
    let rounds = args.window_rounds.or(file.window_rounds);
    if rounds == Some(0) {
        bail!("window_rounds must be at least 1");
    }
    let config = json!({
        "command": "compress", "seed": seed, "distance": ds, "p": ps, "cycles": cycles,
        "window_rounds": rounds.map_or(json!("distance"), |r| json!(r)),
    });
    let mut rows = Vec::new();
    let mut results = Vec::new();
    for &d in &ds {
        for &p in &ps {
            let c = compare_with(d, p, cycles, seed, rounds.unwrap_or(d))?;
            rows.push(vec![
                d.to_string(),
                p.to_string(),
                c.raw_bits.to_string(),
                c.afs.avg_bits_per_cycle.to_string(),
                c.clique.avg_bits_per_cycle.to_string(),
                c.afs.reduction_vs_raw.to_string(),
                c.clique.reduction_vs_raw.to_string(),
                c.ratio.to_string(),
            ]);
            results.push(json!({
                "d": d, "p": p, "raw_bits": c.raw_bits, "window_bits": c.window_bits,
                "afs_avg_bits": c.afs.avg_bits_per_cycle, "clique_avg_bits": c.clique.avg_bits_per_cycle,
                "afs_reduction": num(c.afs.reduction_vs_raw), "clique_reduction": num(c.clique.reduction_vs_raw),
                "ratio": num(c.ratio), "complex_cycles": c.complex_cycles,
            }));
        }
    }
    let header =
        ["d", "p", "raw_bits", "afs_avg_bits", "clique_avg_bits", "afs_reduction", "clique_reduction", "ratio"];
    Ok(Output {
        files: vec![
            ("compress.csv", csv_file(&config, &header, &rows)?),
            ("compress.json", json_file(&config, Value::Array(results))?),
        ],
    })
}

fn cost(args: &CostArgs, file: &FileConfig, seed: u64) -> Result<Output> {
    let ds = distances(pick_list(&args.distance, &file.distance, &[3, 5, 7, 9, 11, 13, 15, 17, 19, 21]))?;
    let library = args.library.clone().or(file.library.clone());
    let lib = match &library {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            CellLibrary::parse(&text)?
        }
        None => CellLibrary::ersfq(),
    };
    let clock_hz = pick(args.clock_hz, file.clock_hz, 5e9);
    let energy_j = pick(args.energy_j, file.energy_j, 1e-19);
    let activity = pick(args.activity, file.activity, 0.5);
    let config = json!({
        "command": "cost", "seed": seed, "distance": ds,
        "library": library.as_ref().map_or("bundled-ersfq".to_string(), |p| p.display().to_string()),
        "clock_hz": clock_hz, "energy_j": energy_j, "activity": activity,
    });
    let mut rows = Vec::new();
    let mut results = Vec::new();
    for &d in &ds {
        let c = cost_for_distance(d, &lib, clock_hz, energy_j, activity).map_err(|e| anyhow::anyhow!(e))?;
        let mut row = vec![d.to_string()];
        row.extend(GateKind::ALL.iter().map(|k| c.gates[k].to_string()));
        row.extend([
            c.report.jj_count.to_string(),
            c.report.area_um2.to_string(),
            c.report.critical_path_ps.to_string(),
            c.power_w.to_string(),
        ]);
        rows.push(row);
        let gates: serde_json::Map<String, Value> =
            GateKind::ALL.iter().map(|k| (k.to_string(), json!(c.gates[k]))).collect();
        results.push(json!({
            "d": d, "gates": gates, "jj": c.report.jj_count, "area_um2": c.report.area_um2,
            "delay_ps": c.report.critical_path_ps, "power_w": c.power_w,
            "power_note": "approximate: jj x activity x energy x clock",
        }));
    }
    let header = ["d", "xor2", "and2", "or2", "not", "dff", "split", "jj", "area_um2", "delay_ps", "power_w"];
    Ok(Output {
        files: vec![
            ("cost.csv", csv_file(&config, &header, &rows)?),
            ("cost.json", json_file(&config, Value::Array(results))?),
        ],
    })
}

fn write_all(dir: &Path, out: &Output) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    // stage everything first so a failure never leaves a partial result set
    let mut staged = Vec::new();
    for (name, bytes) in &out.files {
        let tmp = dir.join(format!(".{name}.tmp"));
        std::fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
        staged.push((tmp, dir.join(name)));
    }
    for (tmp, dest) in staged {
        std::fs::rename(&tmp, &dest).with_context(|| format!("moving {}", dest.display()))?;
        println!("{}", dest.display());
    }
    Ok(())
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let seed = pick(cli.seed, file.seed, 1);
    let out_dir = pick(cli.out.clone(), file.out.clone(), PathBuf::from("results"));
    let out = match &cli.command {
        Command::Coverage(a) => coverage(a, &file, seed)?,
        Command::Ler(a) => ler(a, &file, seed)?,
        Command::Bandwidth(a) => bandwidth(a, &file, seed)?,
        Command::Compress(a) => compress(a, &file, seed)?,
        Command::Cost(a) => cost(a, &file, seed)?,
    };
    write_all(&out_dir, &out)
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e:#}");
        std::process::exit(2);
    }
}
