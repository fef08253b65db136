//! Lifetime simulation: signature-class coverage and logical error rates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clique::{filter_rounds, flips, triage, TriageClass};
use crate::lattice::{CheckGraph, Lattice, StabilizerType};
use crate::matching::{decode, Defect, SpacetimeDefectSet};
use crate::noise::{run_block, stream_rng, ErrorFrame, NoiseParams};

/// Cycles simulated per independent random stream in coverage runs.
pub const CHUNK_CYCLES: u64 = 10_000;

/// One decode cycle of one logical qubit, both stabilizer types.
#[derive(Debug, Clone)]
pub struct CycleRecord<'a> {
    pub flips_x: &'a [bool],
    pub flips_z: &'a [bool],
    pub class_x: TriageClass,
    pub class_z: TriageClass,
}

impl CycleRecord<'_> {
    pub fn class(&self) -> TriageClass {
        self.class_x.combine(self.class_z)
    }
}

/// Noisy rounds `r_1 ..= r_{n+1}` of one species, returned as detection-event
/// vectors `f_0 ..= f_{n+1}` with `f_0` all zero (clean start).
fn flip_history(
    graph: &CheckGraph,
    num_data: usize,
    params: &NoiseParams,
    cycles: usize,
    rng: &mut impl rand::Rng,
) -> Vec<Vec<bool>> {
    let mut frame = ErrorFrame::new(graph, num_data);
    let mut prev = vec![false; graph.len()];
    let mut out = Vec::with_capacity(cycles + 2);
    out.push(vec![false; graph.len()]);
    for _ in 0..=cycles {
        let r = frame.step(graph, params, rng);
        out.push(flips(&prev, &r));
        prev = r;
    }
    out
}

/// Stream `cycles` decode cycles of a single logical qubit through the triage
/// decoder, calling `visit` once per cycle.
///
/// Each chunk of [`CHUNK_CYCLES`] cycles uses its own pair of random streams
/// (`2 * chunk` for the X checks, `2 * chunk + 1` for the Z checks).
pub fn for_each_cycle<F>(lattice: &Lattice, p: f64, cycles: u64, seed: u64, chunk: u64, mut visit: F)
where
    F: FnMut(&CycleRecord<'_>),
{
    let params = NoiseParams::uniform(p, seed).expect("probability validated by caller");
    let gx = lattice.checks(StabilizerType::X);
    let gz = lattice.checks(StabilizerType::Z);
    let n = cycles as usize;
    let fx = flip_history(gx, lattice.num_data(), &params, n, &mut stream_rng(seed, 2 * chunk));
    let fz = flip_history(gz, lattice.num_data(), &params, n, &mut stream_rng(seed, 2 * chunk + 1));
    for t in 1..=n {
        let ex = filter_rounds(&fx[t - 1], &fx[t], &fx[t + 1]);
        let ez = filter_rounds(&fz[t - 1], &fz[t], &fz[t + 1]);
        let rec = CycleRecord {
            flips_x: &fx[t],
            flips_z: &fz[t],
            class_x: triage(gx, &ex).class,
            class_z: triage(gz, &ez).class,
        };
        visit(&rec);
    }
}

/// Run `cycles` cycles split into independent chunks in parallel, folding each
/// chunk with `fold` and merging in chunk order.
pub fn par_chunks<T, F, M>(lattice: &Lattice, p: f64, cycles: u64, seed: u64, init: T, fold: F, merge: M) -> T
where
    T: Clone + Send + Sync,
    F: Fn(&mut T, &CycleRecord<'_>) + Sync,
    M: Fn(T, T) -> T,
{
    let chunks = cycles.div_ceil(CHUNK_CYCLES);
    let parts: Vec<T> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = CHUNK_CYCLES.min(cycles - c * CHUNK_CYCLES);
            let mut acc = init.clone();
            for_each_cycle(lattice, p, len, seed, c, |rec| fold(&mut acc, rec));
            acc
        })
        .collect();
    parts.into_iter().fold(init, merge)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub all_zero: u64,
    pub trivial: u64,
    pub complex: u64,
}

impl ClassCounts {
    pub fn add(&mut self, c: TriageClass) {
        match c {
            TriageClass::AllZero => self.all_zero += 1,
            TriageClass::Trivial => self.trivial += 1,
            TriageClass::Complex => self.complex += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.all_zero + self.trivial + self.complex
    }

    fn merge(self, o: ClassCounts) -> ClassCounts {
        ClassCounts {
            all_zero: self.all_zero + o.all_zero,
            trivial: self.trivial + o.trivial,
            complex: self.complex + o.complex,
        }
    }

    pub fn fractions(&self) -> Fractions {
        let n = self.total().max(1) as f64;
        Fractions { all0: self.all_zero as f64 / n, local1: self.trivial as f64 / n, complex: self.complex as f64 / n }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fractions {
    pub all0: f64,
    pub local1: f64,
    pub complex: f64,
}

impl Fractions {
    pub fn coverage(&self) -> f64 {
        self.all0 + self.local1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageStats {
    pub distance: usize,
    pub p: f64,
    pub cycles: u64,
    pub frac_all0: f64,
    pub frac_local1: f64,
    pub frac_complex: f64,
    /// Logical qubit: both types combined, complex if either is.
    pub counts: ClassCounts,
    pub counts_x: ClassCounts,
    pub counts_z: ClassCounts,
}

impl CoverageStats {
    /// Fraction of cycles handled without going off chip.
    pub fn coverage(&self) -> f64 {
        self.frac_all0 + self.frac_local1
    }

    /// Coverage of a single stabilizer type.
    pub fn coverage_of(&self, kind: StabilizerType) -> f64 {
        match kind {
            StabilizerType::X => self.counts_x.fractions().coverage(),
            StabilizerType::Z => self.counts_z.fractions().coverage(),
        }
    }

    /// Binomial standard error of the combined coverage.
    pub fn coverage_std_err(&self) -> f64 {
        let c = self.coverage();
        (c * (1.0 - c) / self.cycles as f64).sqrt()
    }
}

type Triple = (ClassCounts, ClassCounts, ClassCounts);

pub fn classify_cycles(d: usize, p: f64, cycles: u64, seed: u64) -> Result<CoverageStats, crate::LatticeError> {
    assert!(cycles >= 1);
    let lattice = Lattice::build(d)?;
    let (counts, counts_x, counts_z) = par_chunks(
        &lattice,
        p,
        cycles,
        seed,
        Triple::default(),
        |acc, rec| {
            acc.0.add(rec.class());
            acc.1.add(rec.class_x);
            acc.2.add(rec.class_z);
        },
        |a, b| (a.0.merge(b.0), a.1.merge(b.1), a.2.merge(b.2)),
    );
    let f = counts.fractions();
    Ok(CoverageStats {
        distance: d,
        p,
        cycles,
        frac_all0: f.all0,
        frac_local1: f.local1,
        frac_complex: f.complex,
        counts,
        counts_x,
        counts_z,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DecoderMode {
    Baseline,
    CliquePlusBaseline,
}

impl std::fmt::Display for DecoderMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DecoderMode::Baseline => write!(f, "baseline"),
            DecoderMode::CliquePlusBaseline => write!(f, "clique+baseline"),
        }
    }
}

/// 95% Wilson score interval for `k` successes out of `n`.
pub fn wilson_interval(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let n_f = n as f64;
    let phat = k as f64 / n_f;
    let denom = 1.0 + z * z / n_f;
    let center = (phat + z * z / (2.0 * n_f)) / denom;
    let half = z * (phat * (1.0 - phat) / n_f + z * z / (4.0 * n_f * n_f)).sqrt() / denom;
    let lo = if k == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if k == n { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LerResult {
    pub distance: usize,
    pub p: f64,
    pub trials: u64,
    pub logical_failures: u64,
    pub ler: f64,
    pub wilson_ci: (f64, f64),
    pub mode: DecoderMode,
    /// Blocks that needed the matching decoder.
    pub offchip_blocks: u64,
}

impl LerResult {
    pub fn std_err(&self) -> f64 {
        (self.ler * (1.0 - self.ler) / self.trials as f64).sqrt()
    }
}

/// What the matching decoder receives when a block goes off chip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Handoff {
    /// The whole block's detection events; on-chip corrections made earlier
    /// in the block are superseded by the matching correction.
    #[default]
    FullBlock,
    /// Only the events the triage decoder did not already consume.
    Residual,
}

/// Outcome of decoding one block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockOutcome {
    pub logical_failure: bool,
    pub used_matching: bool,
    pub total_defects: usize,
    /// Defects explained by on-chip corrections or cancelled as measurement
    /// pairs, and not handed to the matching decoder.
    pub consumed_on_chip: usize,
    pub forwarded: usize,
}

/// Decode one block of raw rounds (last round noiseless) against the final
/// frame and report whether a logical error remains.
pub fn decode_block(graph: &CheckGraph, rounds: &[Vec<bool>], frame: &ErrorFrame, mode: DecoderMode) -> BlockOutcome {
    decode_block_with(graph, rounds, frame, mode, Handoff::default())
}

pub fn decode_block_with(
    graph: &CheckGraph,
    rounds: &[Vec<bool>],
    frame: &ErrorFrame,
    mode: DecoderMode,
    handoff: Handoff,
) -> BlockOutcome {
    let n = graph.len();
    let window = rounds.len();
    let zero = vec![false; n];
    let mut f: Vec<Vec<bool>> = Vec::with_capacity(window);
    for t in 0..window {
        let prev = if t == 0 { &zero } else { &rounds[t - 1] };
        f.push(flips(prev, &rounds[t]));
    }
    let total_defects: usize = f.iter().map(|r| r.iter().filter(|&&b| b).count()).sum();
    let mut residual = frame.data_errors.clone();

    let forward = match mode {
        DecoderMode::Baseline => Some(f),
        DecoderMode::CliquePlusBaseline => {
            let mut remaining = f.clone();
            let mut complex = false;
            let mut on_chip: Vec<usize> = Vec::new();
            for t in 0..window {
                let prev = if t == 0 { &zero } else { &f[t - 1] };
                let next = if t + 1 < window { &f[t + 1] } else { &zero };
                let eff = filter_rounds(prev, &f[t], next);
                // measurement pairs are dropped on chip regardless of the verdict
                if t + 1 < window {
                    for a in 0..n {
                        if remaining[t][a] && remaining[t + 1][a] {
                            remaining[t][a] = false;
                            remaining[t + 1][a] = false;
                        }
                    }
                }
                let out = triage(graph, &eff);
                match out.class {
                    TriageClass::Trivial => {
                        on_chip.extend(out.corrections);
                        for a in (0..n).filter(|&a| eff.bits[a]) {
                            debug_assert!(remaining[t][a]);
                            remaining[t][a] = false;
                        }
                    }
                    TriageClass::Complex => complex = true,
                    TriageClass::AllZero => {}
                }
            }
            let left = remaining.iter().flatten().filter(|&&b| b).count();
            if !complex && left == 0 {
                for q in on_chip {
                    residual[q] ^= true;
                }
                None
            } else {
                match handoff {
                    Handoff::FullBlock => Some(f),
                    Handoff::Residual => {
                        for q in on_chip {
                            residual[q] ^= true;
                        }
                        Some(remaining)
                    }
                }
            }
        }
    };

    let used_matching = forward.is_some();
    let mut forwarded = 0;
    if let Some(forward) = forward {
        let defects: Vec<Defect> = forward
            .iter()
            .enumerate()
            .flat_map(|(t, r)| {
                r.iter().enumerate().filter(|(_, &b)| b).map(move |(a, _)| Defect { ancilla: a, round: t })
            })
            .collect();
        forwarded = defects.len();
        let set = SpacetimeDefectSet::new(defects, window, graph.kind());
        for q in decode(graph, &set).corrections {
            residual[q] ^= true;
        }
    }
    debug_assert!(graph.syndrome_of_mask(&residual).iter().all(|&b| !b), "corrections must clear the final syndrome");
    BlockOutcome {
        logical_failure: graph.logical_parity(&residual),
        used_matching,
        total_defects,
        consumed_on_chip: total_defects - forwarded,
        forwarded,
    }
}

/// Logical error rate per block of `d` noisy rounds plus one perfect round.
pub fn estimate_ler(
    d: usize,
    p: f64,
    trials: u64,
    mode: DecoderMode,
    seed: u64,
) -> Result<LerResult, crate::LatticeError> {
    estimate_ler_with(d, p, trials, mode, seed, StabilizerType::X, Handoff::default())
}

/// As [`estimate_ler`], choosing which check type (and hence error species)
/// to simulate and how blocks are handed off.
pub fn estimate_ler_with(
    d: usize,
    p: f64,
    trials: u64,
    mode: DecoderMode,
    seed: u64,
    kind: StabilizerType,
    handoff: Handoff,
) -> Result<LerResult, crate::LatticeError> {
    assert!(trials >= 1);
    let lattice = Lattice::build(d)?;
    let graph = lattice.checks(kind);
    let params = NoiseParams::uniform(p, seed).expect("probability in range");
    let (failures, offchip) = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = stream_rng(seed, trial);
            let block = run_block(graph, lattice.num_data(), &params, d, true, &mut rng);
            let out = decode_block_with(graph, &block.rounds, &block.final_frame, mode, handoff);
            (out.logical_failure as u64, out.used_matching as u64)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(LerResult {
        distance: d,
        p,
        trials,
        logical_failures: failures,
        ler: failures as f64 / trials as f64,
        wilson_ci: wilson_interval(failures, trials),
        mode,
        offchip_blocks: offchip,
    })
}

/// Per-cycle count of complex (off-chip) decodes across `qubits` independent
/// logical qubits, for trace-driven bandwidth simulation.
pub fn complex_trace(d: usize, p: f64, qubits: u64, cycles: u64, seed: u64) -> Result<Vec<u32>, crate::LatticeError> {
    let lattice = Lattice::build(d)?;
    let per_qubit: Vec<Vec<bool>> = (0..qubits)
        .into_par_iter()
        .map(|q| {
            let mut flags = Vec::with_capacity(cycles as usize);
            // one chunk per qubit; chunk ids are offset so each qubit gets fresh streams
            for_each_cycle(&lattice, p, cycles, seed, q, |rec| flags.push(rec.class() == TriageClass::Complex));
            flags
        })
        .collect();
    Ok((0..cycles as usize).map(|t| per_qubit.iter().filter(|f| f[t]).count() as u32).collect())
}
