//! Off-chip decode bandwidth provisioning with carryover backlog and stalls.
//!
//! Every cycle each of `L` logical qubits may need one off-chip decode. At most
//! `B` requests are served per cycle; the rest carry over. Any end-of-cycle
//! backlog stalls the next cycle, which still produces new requests.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial as BinomialDist, DiscreteCDF};
use thiserror::Error;

use crate::noise::stream_rng;

#[derive(Debug, Error, PartialEq)]
pub enum BandwidthError {
    #[error("percentile {0} is outside [0, 100]")]
    InvalidPercentile(f64),
    #[error("request probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("trace has {have} cycles but {need} were requested")]
    TraceTooShort { have: usize, need: usize },
    #[error("percentile grid is empty")]
    EmptyGrid,
}

/// Source of per-cycle off-chip requests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DemandModel {
    /// `qubits` independent logical qubits, each complex with probability `q`.
    Bernoulli { qubits: u32, q: f64 },
    /// Recorded per-cycle request counts, e.g. from a coverage simulation.
    Trace { qubits: u32, counts: Vec<u32> },
}

impl DemandModel {
    pub fn bernoulli(qubits: u32, q: f64) -> Result<Self, BandwidthError> {
        if !(0.0..=1.0).contains(&q) {
            return Err(BandwidthError::InvalidProbability(q));
        }
        Ok(DemandModel::Bernoulli { qubits, q })
    }

    pub fn qubits(&self) -> u32 {
        match self {
            DemandModel::Bernoulli { qubits, .. } | DemandModel::Trace { qubits, .. } => *qubits,
        }
    }

    pub fn mean_requests(&self) -> f64 {
        match self {
            DemandModel::Bernoulli { qubits, q } => *qubits as f64 * q,
            DemandModel::Trace { counts, .. } => {
                counts.iter().map(|&c| c as f64).sum::<f64>() / counts.len().max(1) as f64
            }
        }
    }

    fn check_len(&self, cycles: usize) -> Result<(), BandwidthError> {
        match self {
            DemandModel::Trace { counts, .. } if counts.len() < cycles => {
                Err(BandwidthError::TraceTooShort { have: counts.len(), need: cycles })
            }
            _ => Ok(()),
        }
    }
}

/// Smallest `B` with `P(requests per cycle <= B) >= percentile / 100`.
///
/// Exact binomial quantile for the Bernoulli model; nearest-rank empirical
/// quantile over the first `sample_cycles` entries for a trace.
pub fn percentile_provision(model: &DemandModel, percentile: f64, sample_cycles: usize) -> Result<u32, BandwidthError> {
    if !(0.0..=100.0).contains(&percentile) {
        return Err(BandwidthError::InvalidPercentile(percentile));
    }
    let level = percentile / 100.0;
    match model {
        DemandModel::Bernoulli { qubits, q } => {
            let dist = BinomialDist::new(*q, *qubits as u64).map_err(|_| BandwidthError::InvalidProbability(*q))?;
            // cdf is monotone; a linear scan is at most L + 1 steps
            Ok((0..=*qubits).find(|&b| dist.cdf(b as u64) >= level - 1e-12).unwrap_or(*qubits))
        }
        DemandModel::Trace { counts, .. } => {
            let n = sample_cycles.min(counts.len());
            model.check_len(n.max(1))?;
            let mut sample: Vec<u32> = counts[..n].to_vec();
            sample.sort_unstable();
            let rank = ((level * n as f64).ceil() as usize).clamp(1, n);
            Ok(sample[rank - 1])
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleLog {
    pub new_requests: u32,
    /// Backlog carried into this cycle.
    pub carryover: u64,
    pub served: u64,
    pub is_stall: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub cycles: u64,
    pub stall_cycles: u64,
    pub work_cycles: u64,
    pub stall_fraction: f64,
    /// Stall cycles per work cycle.
    pub exec_time_overhead: f64,
    pub max_backlog: u64,
    pub final_backlog: u64,
    pub total_generated: u64,
    pub total_served: u64,
    pub provisioned: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandwidthTrace {
    pub log: Vec<CycleLog>,
    pub summary: TraceSummary,
}

impl BandwidthTrace {
    /// Stall count in each consecutive `window`-cycle slice after `warmup` cycles.
    pub fn stalls_per_window(&self, window: usize, warmup: usize) -> Vec<usize> {
        self.log[warmup.min(self.log.len())..]
            .chunks_exact(window)
            .map(|w| w.iter().filter(|c| c.is_stall).count())
            .collect()
    }
}

/// Evolve the request queue for `cycles` cycles with `provisioned` decodes per cycle.
pub fn simulate(
    model: &DemandModel,
    provisioned: u32,
    cycles: usize,
    seed: u64,
) -> Result<BandwidthTrace, BandwidthError> {
    assert!(cycles >= 1);
    model.check_len(cycles)?;
    let mut rng = stream_rng(seed, 0);
    let sampler = match model {
        DemandModel::Bernoulli { qubits, q } => {
            Some(Binomial::new(*qubits as u64, *q).map_err(|_| BandwidthError::InvalidProbability(*q))?)
        }
        DemandModel::Trace { .. } => None,
    };
    let mut log = Vec::with_capacity(cycles);
    let mut backlog: u64 = 0;
    let (mut generated, mut served_total, mut max_backlog, mut stalls) = (0u64, 0u64, 0u64, 0u64);
    for t in 0..cycles {
        let new_requests = match (&sampler, model) {
            (Some(b), _) => b.sample(&mut rng) as u32,
            (None, DemandModel::Trace { counts, .. }) => counts[t],
            (None, DemandModel::Bernoulli { .. }) => unreachable!(),
        };
        let is_stall = backlog > 0;
        stalls += is_stall as u64;
        let pending = backlog + new_requests as u64;
        let served = pending.min(provisioned as u64);
        log.push(CycleLog { new_requests, carryover: backlog, served, is_stall });
        backlog = pending - served;
        generated += new_requests as u64;
        served_total += served;
        max_backlog = max_backlog.max(backlog);
    }
    let cycles = cycles as u64;
    let work = cycles - stalls;
    let summary = TraceSummary {
        cycles,
        stall_cycles: stalls,
        work_cycles: work,
        stall_fraction: stalls as f64 / cycles as f64,
        exec_time_overhead: if work == 0 { f64::INFINITY } else { stalls as f64 / work as f64 },
        max_backlog,
        final_backlog: backlog,
        total_generated: generated,
        total_served: served_total,
        provisioned,
    };
    Ok(BandwidthTrace { log, summary })
}

/// Bits each logical qubit would ship every cycle without on-chip decoding, and
/// the bits one off-chip request carries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Payload {
    pub raw_bits_per_qubit: u64,
    pub request_bits: u64,
}

impl Payload {
    /// `d^2 - 1` syndrome bits per round; a request carries `rounds` rounds.
    pub fn for_distance(d: usize, rounds: usize) -> Self {
        let n = (d * d - 1) as u64;
        Payload { raw_bits_per_qubit: n, request_bits: n * rounds as u64 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffPoint {
    pub percentile: f64,
    pub provisioned: u32,
    pub bandwidth_reduction: f64,
    pub exec_time_increase: f64,
    pub stall_fraction: f64,
}

/// Reduction factor of provisioning `b` requests per cycle relative to
/// shipping every syndrome off chip.
pub fn reduction_factor(qubits: u32, b: f64, payload: &Payload) -> f64 {
    let raw = qubits as f64 * payload.raw_bits_per_qubit as f64;
    raw / (b * payload.request_bits as f64)
}

/// Reduction at mean provisioning, reachable only with unbounded stalling.
pub fn max_reduction(model: &DemandModel, payload: &Payload) -> f64 {
    reduction_factor(model.qubits(), model.mean_requests(), payload)
}

/// Sweep provisioning percentiles; each point reuses the same demand stream.
pub fn tradeoff_curve(
    model: &DemandModel,
    percentiles: &[f64],
    cycles: usize,
    seed: u64,
    payload: &Payload,
) -> Result<Vec<TradeoffPoint>, BandwidthError> {
    if percentiles.is_empty() {
        return Err(BandwidthError::EmptyGrid);
    }
    percentiles
        .iter()
        .map(|&pct| {
            let b = percentile_provision(model, pct, cycles)?;
            let trace = simulate(model, b, cycles, seed)?;
            Ok(TradeoffPoint {
                percentile: pct,
                provisioned: b,
                bandwidth_reduction: reduction_factor(model.qubits(), b as f64, payload),
                exec_time_increase: trace.summary.exec_time_overhead,
                stall_fraction: trace.summary.stall_fraction,
            })
        })
        .collect()
}

/// Largest reduction on the curve whose execution-time increase stays within
/// `budget` (e.g. 0.10 for 10%).
pub fn best_within_budget(curve: &[TradeoffPoint], budget: f64) -> Option<&TradeoffPoint> {
    curve
        .iter()
        .filter(|p| p.exec_time_increase <= budget)
        .max_by(|a, b| a.bandwidth_reduction.total_cmp(&b.bandwidth_reduction))
}

/// Draw `cycles` per-cycle Bernoulli totals into a trace, for tests and
/// trace-mode experiments that want a fixed stream.
pub fn sample_bernoulli_trace(qubits: u32, q: f64, cycles: usize, seed: u64) -> Vec<u32> {
    let mut rng = stream_rng(seed, 1);
    (0..cycles).map(|_| (0..qubits).filter(|_| rng.random_bool(q)).count() as u32).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_and_tail_provisioning() {
        let m = DemandModel::bernoulli(1000, 0.05).unwrap();
        assert!((m.mean_requests() - 50.0).abs() < 1e-12);
        let b50 = percentile_provision(&m, 50.0, 0).unwrap();
        let b99 = percentile_provision(&m, 99.0, 0).unwrap();
        assert_eq!(b50, 50);
        let ratio = b99 as f64 / b50 as f64;
        assert!((1.2..=1.4).contains(&ratio), "ratio {ratio}");
        assert!(percentile_provision(&m, 100.0, 0).unwrap() <= 1000);
        assert!(percentile_provision(&m, 101.0, 0).is_err());
    }

    #[test]
    fn ample_bandwidth_never_stalls() {
        let m = DemandModel::bernoulli(200, 0.3).unwrap();
        let t = simulate(&m, 200, 5_000, 3).unwrap();
        assert_eq!(t.summary.stall_cycles, 0);
        assert_eq!(t.summary.max_backlog, 0);
        assert_eq!(t.summary.exec_time_overhead, 0.0);
    }

    #[test]
    fn conservation_and_carryover_recurrence() {
        let m = DemandModel::bernoulli(1000, 0.05).unwrap();
        for b in [40, 50, 60, 70] {
            let t = simulate(&m, b, 20_000, 5).unwrap();
            let s = &t.summary;
            assert_eq!(s.total_generated, s.total_served + s.final_backlog);
            for w in t.log.windows(2) {
                let next = (w[0].carryover + w[0].new_requests as u64).saturating_sub(b as u64);
                assert_eq!(w[1].carryover, next);
                assert!(w[0].served <= b as u64);
                assert_eq!(w[1].is_stall, w[1].carryover > 0);
            }
        }
    }

    #[test]
    fn trace_mode_replays_counts() {
        let counts = vec![3, 0, 5, 1, 0, 0];
        let m = DemandModel::Trace { qubits: 10, counts };
        let t = simulate(&m, 2, 6, 0).unwrap();
        let carry: Vec<u64> = t.log.iter().map(|c| c.carryover).collect();
        assert_eq!(carry, vec![0, 1, 0, 3, 2, 0]);
        let stalls: Vec<bool> = t.log.iter().map(|c| c.is_stall).collect();
        assert_eq!(stalls, vec![false, true, false, true, true, false]);
        assert!(simulate(&m, 2, 7, 0).is_err());
        assert_eq!(percentile_provision(&m, 50.0, 6).unwrap(), 0);
        assert_eq!(percentile_provision(&m, 100.0, 6).unwrap(), 5);
    }

    #[test]
    fn full_percentile_point_has_no_overhead() {
        let m = DemandModel::bernoulli(100, 0.1).unwrap();
        let curve = tradeoff_curve(&m, &[100.0], 10_000, 1, &Payload::for_distance(5, 1)).unwrap();
        assert_eq!(curve[0].exec_time_increase, 0.0);
        assert!(tradeoff_curve(&m, &[], 10, 1, &Payload::for_distance(5, 1)).is_err());
    }
}
