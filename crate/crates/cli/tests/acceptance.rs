//! Acceptance checks. Each test prints one `criterion N: PASS|FAIL` line
//! (bypassing output capture) and then asserts the same condition.

use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use btwc_core::bandwidth::{percentile_provision, simulate, DemandModel};
use btwc_core::clique::{triage_bits, triage_oracle};
use btwc_core::compression::compare;
use btwc_core::hwcost::{
    build_netlist, evaluate, pack_inputs, reference_outputs, CellLibrary, GateKind, Netlist, RawWindow, Signal,
};
use btwc_core::lattice::{CheckGraph, Lattice, StabilizerType};
use btwc_core::matching::{brute_force_weight, decode, Defect, SpacetimeDefectSet};
use btwc_core::montecarlo::{classify_cycles, estimate_ler, DecoderMode};
use btwc_core::noise::stream_rng;
use btwc_core::TriageClass;
use rand::Rng;

fn report(n: u32, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    writeln!(out, "criterion {n}: {verdict} - {detail}").unwrap();
    out.flush().unwrap();
    assert!(pass, "criterion {n} failed: {detail}");
}

// 1: coverage headline
const C1_D: usize = 21;
const C1_P: f64 = 1e-2;
const C1_CYCLES: u64 = 1_000_000;
const C1_TARGET: f64 = 0.70;
const C1_TOL: f64 = 0.05;
const C1_MAX_SECS: f64 = 30.0 * 60.0;

#[test]
fn criterion_01_coverage_headline() {
    let start = Instant::now();
    let s = classify_cycles(C1_D, C1_P, C1_CYCLES, 2021).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let cov = s.coverage();
    let pass = (cov - C1_TARGET).abs() <= C1_TOL && secs < C1_MAX_SECS;
    report(
        1,
        pass,
        &format!(
            "d={C1_D} p={C1_P} cycles={C1_CYCLES}: coverage {cov:.4} (target {C1_TARGET} +/- {C1_TOL}; \
             per type X {:.4} Z {:.4}) in {secs:.1}s",
            s.coverage_of(StabilizerType::X),
            s.coverage_of(StabilizerType::Z)
        ),
    );
}

// 2: coverage limits
const C2_DS: [usize; 4] = [3, 5, 7, 11];
const C2_PS: [f64; 4] = [5e-4, 1e-3, 5e-3, 1e-2];
const C2_CYCLES: u64 = 200_000;
const C2_SIGMAS: f64 = 3.0;

#[test]
fn criterion_02_coverage_limits() {
    let mut problems = Vec::new();
    for &d in &C2_DS {
        let s = classify_cycles(d, 0.0, 10_000, 1).unwrap();
        if s.coverage() != 1.0 {
            problems.push(format!("p=0 d={d} coverage {}", s.coverage()));
        }
    }
    // distinct seeds keep grid points independent
    let grid: Vec<Vec<(f64, f64)>> = C2_DS
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            C2_PS
                .iter()
                .enumerate()
                .map(|(j, &p)| {
                    let s = classify_cycles(d, p, C2_CYCLES, 100 + (i * 4 + j) as u64).unwrap();
                    (s.coverage(), s.coverage_std_err())
                })
                .collect()
        })
        .collect();
    // `worse` should not exceed `better` by more than 3 sigma
    let mut check = |better: (f64, f64), worse: (f64, f64), what: String| {
        let sigma = (better.1.powi(2) + worse.1.powi(2)).sqrt();
        if worse.0 - better.0 > C2_SIGMAS * sigma {
            problems.push(format!("inversion {what}: {:.5} > {:.5}", worse.0, better.0));
        }
    };
    for i in 0..C2_DS.len() {
        for j in 0..C2_PS.len() {
            if j + 1 < C2_PS.len() {
                check(grid[i][j], grid[i][j + 1], format!("d={} p {}->{}", C2_DS[i], C2_PS[j], C2_PS[j + 1]));
            }
            if i + 1 < C2_DS.len() {
                check(grid[i][j], grid[i + 1][j], format!("p={} d {}->{}", C2_PS[j], C2_DS[i], C2_DS[i + 1]));
            }
        }
    }
    let (hi, lo) = (grid[0][0], grid[C2_DS.len() - 1][C2_PS.len() - 1]);
    let sigma = (hi.1.powi(2) + lo.1.powi(2)).sqrt();
    if hi.0 - lo.0 <= C2_SIGMAS * sigma {
        problems.push(format!("corners not separated: {:.5} vs {:.5}", hi.0, lo.0));
    }
    let table: Vec<String> = C2_DS
        .iter()
        .zip(&grid)
        .map(|(d, row)| format!("d={d}: {}", row.iter().map(|c| format!("{:.4}", c.0)).collect::<Vec<_>>().join(" ")))
        .collect();
    report(
        2,
        problems.is_empty(),
        &format!("p=0 exact, monotone at {C2_SIGMAS} sigma [{}] {}", table.join("; "), problems.join("; ")),
    );
}

// 3: LER parity
const C3_BLOCKS: u64 = 100_000;

#[test]
fn criterion_03_ler_parity() {
    let mut lines = Vec::new();
    let mut pass = true;
    for d in [3, 5] {
        for p in [1e-3, 3e-3] {
            let b = estimate_ler(d, p, C3_BLOCKS, DecoderMode::Baseline, 3).unwrap();
            let c = estimate_ler(d, p, C3_BLOCKS, DecoderMode::CliquePlusBaseline, 3).unwrap();
            let overlap = b.wilson_ci.0 <= c.wilson_ci.1 && c.wilson_ci.0 <= b.wilson_ci.1;
            pass &= overlap;
            lines.push(format!(
                "d={d} p={p}: baseline {} [{:.2e},{:.2e}] clique {} [{:.2e},{:.2e}]",
                b.logical_failures, b.wilson_ci.0, b.wilson_ci.1, c.logical_failures, c.wilson_ci.0, c.wilson_ci.1
            ));
        }
    }
    report(3, pass, &format!("{C3_BLOCKS} blocks, 95% Wilson overlap: {}", lines.join("; ")));
}

// 4: sub-threshold scaling
const C4_P: f64 = 1e-3;
const C4_TRIALS: u64 = 1_000_000;
const C4_SIGMAS: f64 = 3.0;

#[test]
fn criterion_04_subthreshold_scaling() {
    let r3 = estimate_ler(3, C4_P, C4_TRIALS, DecoderMode::Baseline, 4).unwrap();
    let r5 = estimate_ler(5, C4_P, C4_TRIALS, DecoderMode::Baseline, 5).unwrap();
    let se = |r: &btwc_core::montecarlo::LerResult| (r.ler * (1.0 - r.ler) / r.trials as f64).sqrt();
    let sigma = (se(&r3).powi(2) + se(&r5).powi(2)).sqrt();
    let gap = r3.ler - r5.ler;
    report(
        4,
        gap > C4_SIGMAS * sigma,
        &format!(
            "p={C4_P}, {C4_TRIALS} blocks: LER d=3 {:.3e} vs d=5 {:.3e}, gap {:.1} sigma",
            r3.ler,
            r5.ler,
            gap / sigma
        ),
    );
}

// 5: matching exactness
const C5_SETS: usize = 1000;
const C5_MAX_DEFECTS: usize = 8;

#[test]
fn criterion_05_matching_exactness() {
    let mut checked = 0;
    let mut mismatches = 0;
    for d in [3, 5, 7] {
        let l = Lattice::build(d).unwrap();
        let mut rng = stream_rng(5, d as u64);
        for i in 0..C5_SETS {
            let kind = StabilizerType::BOTH[i % 2];
            let g = l.checks(kind);
            let k = rng.random_range(0..=C5_MAX_DEFECTS);
            let defects: Vec<Defect> = (0..k)
                .map(|_| Defect { ancilla: rng.random_range(0..g.len()), round: rng.random_range(0..d) })
                .collect();
            let set = SpacetimeDefectSet::new(defects, d, kind);
            if decode(g, &set).total_weight != brute_force_weight(g, &set.defects) {
                mismatches += 1;
            }
            checked += 1;
        }
    }
    report(
        5,
        mismatches == 0,
        &format!("{checked} sets (<= {C5_MAX_DEFECTS} defects, d=3,5,7): {mismatches} weight mismatches"),
    );
}

// 6: triage oracle equivalence
const C6_SAMPLES_D5: usize = 100_000;

fn strongly_isolated(g: &CheckGraph, errors: &[usize]) -> bool {
    let near = |a: usize, b: usize| a == b || g.is_neighbor(a, b);
    errors.iter().enumerate().all(|(i, &p)| {
        errors[i + 1..].iter().all(|&q| g.checks_of(p).iter().all(|&a| g.checks_of(q).iter().all(|&b| !near(a, b))))
    })
}

/// (class matches oracle, trivial correction is stabilizer-equivalent)
fn triage_case(l: &Lattice, g: &CheckGraph, errors: &[usize]) -> (bool, bool) {
    let bits = g.syndrome_of(errors.iter().copied());
    let out = triage_bits(g, &bits);
    let class_ok = triage_oracle(l, g, &bits).map(|c| c == out.class).unwrap_or(false);
    let equiv_ok = out.class != TriageClass::Trivial || {
        let mut residual = vec![false; l.num_data()];
        for &q in errors.iter().chain(&out.corrections) {
            residual[q] ^= true;
        }
        g.syndrome_of_mask(&residual).iter().all(|&b| !b) && !g.logical_parity(&residual)
    };
    (class_ok, equiv_ok)
}

#[test]
fn criterion_06_triage_oracle_equivalence() {
    let (mut cases, mut class_bad, mut equiv_bad) = (0usize, 0usize, 0usize);
    let mut tally = |(c, e): (bool, bool)| {
        cases += 1;
        class_bad += !c as usize;
        equiv_bad += !e as usize;
        cases
    };
    let mut exhaustive = 0;
    let l3 = Lattice::build(3).unwrap();
    for kind in StabilizerType::BOTH {
        let g = l3.checks(kind);
        for mask in 0u32..1 << l3.num_data() {
            let errors: Vec<usize> = (0..l3.num_data()).filter(|&q| mask >> q & 1 == 1).collect();
            if strongly_isolated(g, &errors) {
                exhaustive = tally(triage_case(&l3, g, &errors));
            }
        }
    }
    let l5 = Lattice::build(5).unwrap();
    let mut rng = stream_rng(6, 5);
    for i in 0..C6_SAMPLES_D5 {
        let g = l5.checks(StabilizerType::BOTH[i % 2]);
        let target = rng.random_range(0..=5);
        let mut errors = Vec::new();
        for _ in 0..60 {
            if errors.len() == target {
                break;
            }
            errors.push(rng.random_range(0..l5.num_data()));
            if !strongly_isolated(g, &errors) {
                errors.pop();
            }
        }
        tally(triage_case(&l5, g, &errors));
    }
    report(
        6,
        class_bad == 0 && equiv_bad == 0,
        &format!(
            "{exhaustive} exhaustive d=3 sets + {} sampled d=5 sets: {class_bad} class mismatches, \
             {equiv_bad} non-equivalent corrections",
            cases - exhaustive
        ),
    );
}

// 7: backlog divergence / provisioning
const C7_QUBITS: u32 = 1000;
const C7_Q: f64 = 0.05;
const C7_CYCLES: usize = 1_000_000;
const C7_WINDOW: usize = 100;
const C7_WARMUP: usize = 100_000;
const C7_MIN_STALLS: f64 = 90.0;
const C7_MIN_WINDOW_SHARE: f64 = 0.95;
const C7_MAX_STALL_FRACTION: f64 = 0.05;

#[test]
fn criterion_07_backlog_and_provisioning() {
    let m = DemandModel::bernoulli(C7_QUBITS, C7_Q).unwrap();
    let b50 = percentile_provision(&m, 50.0, 0).unwrap();
    let b99 = percentile_provision(&m, 99.0, 0).unwrap();
    let t50 = simulate(&m, b50, C7_CYCLES, 7).unwrap();
    let windows = t50.stalls_per_window(C7_WINDOW, C7_WARMUP);
    let mean = windows.iter().sum::<usize>() as f64 / windows.len() as f64;
    let share = windows.iter().filter(|&&s| s as f64 > C7_MIN_STALLS).count() as f64 / windows.len() as f64;
    let t99 = simulate(&m, b99, C7_CYCLES, 7).unwrap();
    // bounded: the queue never holds more than one cycle's capacity
    let bounded = t99.summary.max_backlog <= b99 as u64;
    let pass = mean > C7_MIN_STALLS
        && share >= C7_MIN_WINDOW_SHARE
        && t99.summary.stall_fraction < C7_MAX_STALL_FRACTION
        && bounded;
    report(
        7,
        pass,
        &format!(
            "L={C7_QUBITS} q={C7_Q}: B50={b50} mean {mean:.1} stalls/{C7_WINDOW} cycles, {:.1}% windows > {C7_MIN_STALLS}; \
             B99={b99} stall fraction {:.4}, max backlog {}",
            share * 100.0,
            t99.summary.stall_fraction,
            t99.summary.max_backlog
        ),
    );
}

// 8: compression gap
const C8_DS: [usize; 4] = [3, 5, 7, 11];
const C8_PS: [f64; 4] = [5e-4, 1e-3, 5e-3, 1e-2];
const C8_CYCLES: u64 = 100_000;
const C8_MIN_RATIO: f64 = 10.0;

#[test]
fn criterion_08_compression_gap() {
    let mut cells = Vec::new();
    let mut failing = Vec::new();
    for &d in &C8_DS {
        for &p in &C8_PS {
            let c = compare(d, p, C8_CYCLES, 8).unwrap();
            cells.push(format!("d={d} p={p}: {:.3}", c.ratio));
            if c.ratio < C8_MIN_RATIO {
                failing.push(format!("d={d} p={p}"));
            }
        }
    }
    report(
        8,
        failing.is_empty(),
        &format!(
            "AFS/clique bit ratio >= {C8_MIN_RATIO} on the grid ({} points below) [{}]",
            failing.len(),
            cells.join("; ")
        ),
    );
}

// 9: netlist equivalence and cell costs
const C9_WINDOWS: usize = 10_000;

fn random_window(l: &Lattice, kind: StabilizerType, rng: &mut impl Rng, density: f64) -> RawWindow {
    let n = l.checks(kind).len();
    std::array::from_fn(|_| (0..n).map(|_| rng.random_bool(density)).collect())
}

#[test]
fn criterion_09_netlist_equivalence_and_costs() {
    let mut mismatches = 0;
    for d in [3, 5, 7] {
        let l = Lattice::build(d).unwrap();
        let net = build_netlist(&l);
        let mut rng = stream_rng(9, d as u64);
        for i in 0..C9_WINDOWS {
            let density = [0.02, 0.05, 0.1, 0.3][i % 4];
            let x = random_window(&l, StabilizerType::X, &mut rng, density);
            let z = random_window(&l, StabilizerType::Z, &mut rng, density);
            let out = net.simulate(&pack_inputs(&l, &x, &z), l.num_data());
            let (class, corr) = reference_outputs(&l, &x, &z);
            let mut ok = out.complex == (class == TriageClass::Complex);
            for slot in 0..2 {
                if let Some(expected) = &corr[slot] {
                    let got: Vec<usize> = (0..l.num_data()).filter(|&q| out.corrections[slot][q]).collect();
                    ok &= &got == expected;
                }
            }
            if class != TriageClass::Complex {
                ok &= out.class() == class;
            }
            mismatches += !ok as usize;
        }
    }
    let lib = CellLibrary::ersfq();
    let table = [
        (GateKind::Xor2, 6.2, 7000.0, 18),
        (GateKind::And2, 8.2, 7000.0, 16),
        (GateKind::Or2, 5.4, 7000.0, 14),
        (GateKind::Not, 12.8, 7000.0, 12),
        (GateKind::Dff, 8.6, 5600.0, 10),
        (GateKind::Split, 7.0, 3500.0, 4),
    ];
    let mut rows_ok = true;
    for (kind, delay, area, jj) in table {
        let mut n = Netlist::new(2);
        let ins = [Signal::Input(0), Signal::Input(1)];
        let g = n.add(kind, &ins[..kind.arity()]);
        n.outputs.push(g);
        let r = evaluate(&n, &lib).unwrap();
        rows_ok &= r.jj_count == jj && r.area_um2 == area && r.critical_path_ps == delay;
    }
    let mut n = Netlist::new(3);
    let x = n.add(GateKind::Xor2, &[Signal::Input(0), Signal::Input(1)]);
    let a = n.add(GateKind::And2, &[x, Signal::Input(2)]);
    n.outputs.push(a);
    let r = evaluate(&n, &lib).unwrap();
    let composite_ok = r.jj_count == 34 && r.area_um2 == 14000.0 && (r.critical_path_ps - 14.4).abs() < 1e-9;
    report(
        9,
        mismatches == 0 && rows_ok && composite_ok,
        &format!(
            "{} windows at d=3,5,7: {mismatches} mismatches; single-gate rows {}; XOR2->AND2 {} JJ {} um2 {:.1} ps",
            3 * C9_WINDOWS,
            if rows_ok { "exact" } else { "WRONG" },
            r.jj_count,
            r.area_um2,
            r.critical_path_ps
        ),
    );
}

// 10: determinism
fn run_cli(dir: &Path, threads: &str, args: &[&str]) {
    let out = Command::new(env!("CARGO_BIN_EXE_btwc"))
        .args(args)
        .args(["--seed", "17", "--out"])
        .arg(dir)
        .env("RAYON_NUM_THREADS", threads)
        .output()
        .unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn criterion_10_determinism() {
    let cases: &[&[&str]] = &[
        &["coverage", "--distance", "3,7", "--p", "1e-3,1e-2", "--cycles", "30000"],
        &["ler", "--distance", "3,5", "--p", "3e-3", "--trials", "5000"],
        &["bandwidth", "--cycles", "20000", "--tradeoff", "50,90,99,100"],
        &["bandwidth", "--trace", "--distance", "5", "--p", "5e-3", "--qubits", "50", "--cycles", "3000"],
        &["compress", "--distance", "3,5", "--p", "1e-3,1e-2", "--cycles", "30000"],
        &["cost", "--distance", "3,5,7"],
    ];
    let mut differing = Vec::new();
    let mut files = 0;
    for args in cases {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        run_cli(a.path(), "1", args);
        run_cli(b.path(), "8", args);
        let mut names: Vec<_> = std::fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        for name in names {
            files += 1;
            if std::fs::read(a.path().join(&name)).unwrap() != std::fs::read(b.path().join(&name)).unwrap_or_default() {
                differing.push(format!("{} {}", args[0], name.to_string_lossy()));
            }
        }
    }
    report(
        10,
        differing.is_empty() && files > 0,
        &format!(
            "{files} output files across {} runs at 1 vs 8 threads: {} differ {:?}",
            cases.len(),
            differing.len(),
            differing
        ),
    );
}
