//! Off-chip bit accounting: sparse index compression versus triage shipping.

use serde::{Deserialize, Serialize};

use crate::clique::TriageClass;
use crate::lattice::Lattice;
use crate::montecarlo::par_chunks;

/// Width of one sparse index for an `n`-bit syndrome.
pub fn index_width(n: usize) -> u32 {
    assert!(n >= 1);
    usize::BITS - (n - 1).leading_zeros()
}

/// Sparse-representation size: one flag bit, plus one fixed-width index per set bit.
pub fn afs_bits(syndrome: &[bool]) -> u64 {
    let k = syndrome.iter().filter(|&&b| b).count() as u64;
    if k == 0 {
        1
    } else {
        1 + k * index_width(syndrome.len()) as u64
    }
}

/// Encode a syndrome in the sparse representation accounted by [`afs_bits`].
pub fn afs_encode(syndrome: &[bool]) -> Vec<bool> {
    let w = index_width(syndrome.len());
    let set: Vec<usize> = (0..syndrome.len()).filter(|&i| syndrome[i]).collect();
    let mut out = vec![!set.is_empty()];
    for i in set {
        out.extend((0..w).rev().map(|b| (i >> b) & 1 == 1));
    }
    out
}

/// Inverse of [`afs_encode`] for a known syndrome length; `None` if malformed.
pub fn afs_decode(code: &[bool], n: usize) -> Option<Vec<bool>> {
    let (&flag, rest) = code.split_first()?;
    let mut out = vec![false; n];
    if !flag {
        return rest.is_empty().then_some(out);
    }
    let w = index_width(n) as usize;
    if w == 0 {
        // single-bit syndrome: the flag alone says it is set
        if !rest.is_empty() {
            return None;
        }
        out[0] = true;
        return Some(out);
    }
    if rest.is_empty() || rest.len() % w != 0 {
        return None;
    }
    for chunk in rest.chunks(w) {
        let i = chunk.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        if i >= n || out[i] {
            return None;
        }
        out[i] = true;
    }
    Some(out)
}

/// Bits shipped off chip by the triage decoder for one cycle.
pub fn clique_bits(class: TriageClass, window_bits: u64) -> u64 {
    match class {
        TriageClass::AllZero | TriageClass::Trivial => 0,
        TriageClass::Complex => window_bits,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    Raw,
    Afs,
    CliqueBtwc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BitsAccount {
    pub scheme: Scheme,
    pub avg_bits_per_cycle: f64,
    /// Raw bits over average bits; infinite when nothing is shipped.
    pub reduction_vs_raw: f64,
}

impl BitsAccount {
    fn new(scheme: Scheme, raw_bits: u64, avg: f64) -> Self {
        BitsAccount { scheme, avg_bits_per_cycle: avg, reduction_vs_raw: raw_bits as f64 / avg }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub distance: usize,
    pub p: f64,
    pub cycles: u64,
    /// Syndrome bits per round, both types.
    pub raw_bits: u64,
    /// Bits shipped per complex cycle.
    pub window_bits: u64,
    pub afs: BitsAccount,
    pub clique: BitsAccount,
    pub complex_cycles: u64,
    /// AFS bits over triage bits, i.e. how much further the triage decoder
    /// reduces traffic. Infinite when the triage decoder ships nothing.
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    afs: u64,
    complex: u64,
}

/// [`compare_with`] shipping a `d`-round window per complex cycle.
pub fn compare(d: usize, p: f64, cycles: u64, seed: u64) -> Result<Comparison, crate::LatticeError> {
    compare_with(d, p, cycles, seed, d)
}

/// Account both schemes on the same per-round detection-event stream.
///
/// AFS compresses each round's detection events (both types, `d^2 - 1` bits);
/// the triage decoder ships `window_rounds` raw rounds for every complex cycle.
pub fn compare_with(
    d: usize,
    p: f64,
    cycles: u64,
    seed: u64,
    window_rounds: usize,
) -> Result<Comparison, crate::LatticeError> {
    let lattice = Lattice::build(d)?;
    let raw_bits = lattice.syndrome_bits_per_round() as u64;
    let window_bits = raw_bits * window_rounds as u64;
    let tally = par_chunks(
        &lattice,
        p,
        cycles,
        seed,
        Tally::default(),
        |acc, rec| {
            let mut both = Vec::with_capacity(raw_bits as usize);
            both.extend_from_slice(rec.flips_x);
            both.extend_from_slice(rec.flips_z);
            acc.afs += afs_bits(&both);
            acc.complex += (rec.class() == TriageClass::Complex) as u64;
        },
        |a, b| Tally { afs: a.afs + b.afs, complex: a.complex + b.complex },
    );
    let afs_avg = tally.afs as f64 / cycles as f64;
    let clique_avg = tally.complex as f64 * window_bits as f64 / cycles as f64;
    Ok(Comparison {
        distance: d,
        p,
        cycles,
        raw_bits,
        window_bits,
        afs: BitsAccount::new(Scheme::Afs, raw_bits, afs_avg),
        clique: BitsAccount::new(Scheme::CliqueBtwc, raw_bits, clique_avg),
        complex_cycles: tally.complex,
        ratio: afs_avg / clique_avg,
    })
}
