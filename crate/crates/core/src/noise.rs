//! Phenomenological noise: independent data flips and measurement flips per round.
//!
//! One [`ErrorFrame`] tracks a single Pauli error species against the ancillas
//! of the opposite type (Z errors against X checks and vice versa). Combined
//! statistics come from running two independent frames.

use rand::distr::{Bernoulli, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{CheckGraph, DataId};

#[derive(Debug, Error, PartialEq)]
pub enum NoiseError {
    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub p_data: f64,
    pub p_meas: f64,
    pub seed: u64,
}

impl NoiseParams {
    /// Single-parameter model: measurement flips share the data flip rate.
    pub fn uniform(p: f64, seed: u64) -> Result<Self, NoiseError> {
        Self::new(p, p, seed)
    }

    pub fn new(p_data: f64, p_meas: f64, seed: u64) -> Result<Self, NoiseError> {
        for p in [p_data, p_meas] {
            if !(0.0..=1.0).contains(&p) {
                return Err(NoiseError::InvalidProbability(p));
            }
        }
        Ok(NoiseParams { p_data, p_meas, seed })
    }

    fn data_dist(&self) -> Bernoulli {
        Bernoulli::new(self.p_data).expect("validated probability")
    }

    fn meas_dist(&self) -> Bernoulli {
        Bernoulli::new(self.p_meas).expect("validated probability")
    }
}

/// Deterministic per-trial random stream derived from a root seed.
///
/// Streams are independent of how trials are scheduled across threads.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Accumulated data errors of one Pauli species plus this round's readout flips.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorFrame {
    pub data_errors: Vec<bool>,
    pub meas_errors_this_round: Vec<bool>,
    /// True stabilizer values, kept in sync with `data_errors`.
    syndrome: Vec<bool>,
}

impl ErrorFrame {
    pub fn new(graph: &CheckGraph, num_data: usize) -> Self {
        ErrorFrame {
            data_errors: vec![false; num_data],
            meas_errors_this_round: vec![false; graph.len()],
            syndrome: vec![false; graph.len()],
        }
    }

    /// Error-free stabilizer values for the current data errors.
    pub fn true_syndrome(&self) -> &[bool] {
        &self.syndrome
    }

    pub fn toggle(&mut self, graph: &CheckGraph, q: DataId) {
        self.data_errors[q] ^= true;
        for &a in graph.checks_of(q) {
            self.syndrome[a] ^= true;
        }
    }

    /// XOR a correction into the frame.
    pub fn apply<I: IntoIterator<Item = DataId>>(&mut self, graph: &CheckGraph, qubits: I) {
        for q in qubits {
            self.toggle(graph, q);
        }
    }

    pub fn weight(&self) -> usize {
        self.data_errors.iter().filter(|&&e| e).count()
    }

    /// One noisy cycle: flip data qubits, then read out every ancilla with
    /// independent measurement flips. Only `data_errors` persists.
    pub fn step<R: Rng + ?Sized>(&mut self, graph: &CheckGraph, params: &NoiseParams, rng: &mut R) -> Vec<bool> {
        self.inject_data(graph, &params.data_dist(), rng);
        self.measure(&params.meas_dist(), rng)
    }

    fn inject_data<R: Rng + ?Sized>(&mut self, graph: &CheckGraph, dist: &Bernoulli, rng: &mut R) {
        for q in 0..self.data_errors.len() {
            if dist.sample(rng) {
                self.toggle(graph, q);
            }
        }
    }

    fn measure<R: Rng + ?Sized>(&mut self, dist: &Bernoulli, rng: &mut R) -> Vec<bool> {
        for m in self.meas_errors_this_round.iter_mut() {
            *m = dist.sample(rng);
        }
        self.syndrome.iter().zip(&self.meas_errors_this_round).map(|(&s, &m)| s ^ m).collect()
    }

    /// Readout with no measurement noise and no new data errors.
    pub fn perfect_round(&mut self) -> Vec<bool> {
        self.meas_errors_this_round.iter_mut().for_each(|m| *m = false);
        self.syndrome.clone()
    }
}

/// A decoding block of reported syndrome rounds.
#[derive(Debug, Clone)]
pub struct Block {
    pub rounds: Vec<Vec<bool>>,
    pub final_frame: ErrorFrame,
}

/// Run `rounds` noisy cycles from a clean frame, optionally followed by one
/// extra round with measurement noise disabled.
pub fn run_block<R: Rng + ?Sized>(
    graph: &CheckGraph,
    num_data: usize,
    params: &NoiseParams,
    rounds: usize,
    perfect_final: bool,
    rng: &mut R,
) -> Block {
    assert!(rounds >= 1, "a block needs at least one round");
    let mut frame = ErrorFrame::new(graph, num_data);
    let data = params.data_dist();
    let meas = params.meas_dist();
    let mut out = Vec::with_capacity(rounds + perfect_final as usize);
    for _ in 0..rounds {
        frame.inject_data(graph, &data, rng);
        out.push(frame.measure(&meas, rng));
    }
    if perfect_final {
        out.push(frame.perfect_round());
    }
    Block { rounds: out, final_frame: frame }
}
