//! The lightweight on-chip triage decoder.
//!
//! Every ancilla that reports a persistent flip opens an "active clique"
//! consisting of itself and its same-type neighbors. The clique is locally
//! trivial when an odd number of neighbors are also active (the error sits on
//! the shared data qubit), or when no neighbor is active and the ancilla has a
//! boundary discharge qubit. A single non-trivial active clique makes the whole
//! cycle complex and it is shipped to the matching decoder.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{CheckGraph, DataId, Lattice};

/// Detection bits after the two-round measurement filter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectiveSyndrome {
    pub bits: Vec<bool>,
    /// Flips at this round that repeat in the next round and are dropped as
    /// measurement errors.
    pub cancelled_pairs: usize,
}

impl EffectiveSyndrome {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        EffectiveSyndrome { bits, cancelled_pairs: 0 }
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_zero(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }
}

/// XOR of two consecutive raw rounds.
pub fn flips(prev: &[bool], curr: &[bool]) -> Vec<bool> {
    assert_eq!(prev.len(), curr.len());
    prev.iter().zip(curr).map(|(&a, &b)| a ^ b).collect()
}

/// Keep a flip only if it is fresh (no flip the round before) and sticks (no
/// flip back the round after).
pub fn filter_rounds(flips_prev: &[bool], flips_curr: &[bool], flips_next: &[bool]) -> EffectiveSyndrome {
    assert!(flips_prev.len() == flips_curr.len() && flips_curr.len() == flips_next.len());
    let mut cancelled_pairs = 0;
    let bits = flips_curr
        .iter()
        .zip(flips_prev)
        .zip(flips_next)
        .map(|((&c, &p), &n)| {
            if c && n {
                cancelled_pairs += 1;
            }
            c && !n && !p
        })
        .collect();
    EffectiveSyndrome { bits, cancelled_pairs }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TriageClass {
    AllZero,
    Trivial,
    Complex,
}

impl TriageClass {
    /// Both Pauli types of one logical qubit: complex if either is complex.
    pub fn combine(self, other: TriageClass) -> TriageClass {
        self.max(other)
    }

    pub fn handled_on_chip(self) -> bool {
        self != TriageClass::Complex
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriageOutcome {
    pub class: TriageClass,
    /// Sorted data qubits to flip; empty unless the class is `Trivial`.
    pub corrections: Vec<DataId>,
    /// Active ancillas whose clique failed the local test.
    pub complex_cliques: Vec<usize>,
}

/// Local verdict of a single active clique.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalVerdict {
    /// Odd number of active neighbors; corrections are the shared qubits.
    Paired,
    /// No active neighbor; flip this boundary qubit.
    Discharge(DataId),
    Complex,
}

/// Decide one active clique from the number of active neighbors.
pub fn local_verdict(graph: &CheckGraph, bits: &[bool], a: usize) -> LocalVerdict {
    let active = graph.neighbors(a).iter().filter(|&&(b, _)| bits[b]).count();
    if active % 2 == 1 {
        LocalVerdict::Paired
    } else if active == 0 {
        match graph.discharge(a).first() {
            Some(&q) => LocalVerdict::Discharge(q),
            None => LocalVerdict::Complex,
        }
    } else {
        LocalVerdict::Complex
    }
}

pub fn triage(graph: &CheckGraph, eff: &EffectiveSyndrome) -> TriageOutcome {
    triage_bits(graph, &eff.bits)
}

pub fn triage_bits(graph: &CheckGraph, bits: &[bool]) -> TriageOutcome {
    assert_eq!(bits.len(), graph.len());
    let mut any = false;
    let mut corrections = Vec::new();
    let mut complex_cliques = Vec::new();
    for a in (0..bits.len()).filter(|&a| bits[a]) {
        any = true;
        match local_verdict(graph, bits, a) {
            LocalVerdict::Paired => {
                corrections.extend(graph.neighbors(a).iter().filter(|&&(b, _)| b > a && bits[b]).map(|&(_, q)| q))
            }
            LocalVerdict::Discharge(q) => corrections.push(q),
            LocalVerdict::Complex => complex_cliques.push(a),
        }
    }
    let class = if !any {
        TriageClass::AllZero
    } else if complex_cliques.is_empty() {
        TriageClass::Trivial
    } else {
        TriageClass::Complex
    };
    if class != TriageClass::Trivial {
        corrections.clear();
    }
    corrections.sort_unstable();
    TriageOutcome { class, corrections, complex_cliques }
}

/// Triage both stabilizer types of one cycle and combine the verdicts.
pub fn triage_cycle(lattice: &Lattice, x: &EffectiveSyndrome, z: &EffectiveSyndrome) -> TriageClass {
    use crate::lattice::StabilizerType;
    let cx = triage(lattice.checks(StabilizerType::X), x).class;
    let cz = triage(lattice.checks(StabilizerType::Z), z).class;
    cx.combine(cz)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("enumeration bound exceeded: distance {distance} with {set_bits} set bits")]
    TooLarge { distance: usize, set_bits: usize },
}

/// Reference classification by exhaustive search for an isolated-singles
/// explanation.
///
/// The syndrome is `Trivial` iff it equals the syndrome of some set `E` of
/// single data errors where every flipped ancilla belongs to exactly one
/// element and no ancilla flipped by one element touches (shares a data qubit
/// with) an ancilla flipped by another. Works from raw support incidence rather
/// than the clique tables.
pub fn triage_oracle(lattice: &Lattice, graph: &CheckGraph, bits: &[bool]) -> Result<TriageClass, OracleError> {
    let set: Vec<usize> = (0..bits.len()).filter(|&a| bits[a]).collect();
    if lattice.distance() > 5 && set.len() > 8 {
        return Err(OracleError::TooLarge { distance: lattice.distance(), set_bits: set.len() });
    }
    if set.is_empty() {
        return Ok(TriageClass::AllZero);
    }
    let n = graph.len();
    // flipped ancillas for each data qubit, from supports
    let flipped: Vec<Vec<usize>> =
        (0..lattice.num_data()).map(|q| (0..n).filter(|&a| graph.ancilla(a).support.contains(&q)).collect()).collect();
    let touches =
        |a: usize, b: usize| a == b || graph.ancilla(a).support.iter().any(|q| graph.ancilla(b).support.contains(q));

    fn search(
        bits: &[bool],
        explained: &mut Vec<bool>,
        chosen: &mut Vec<usize>,
        flipped: &[Vec<usize>],
        touches: &dyn Fn(usize, usize) -> bool,
    ) -> bool {
        let Some(a) = (0..bits.len()).find(|&a| bits[a] && !explained[a]) else {
            return true;
        };
        for (q, fl) in flipped.iter().enumerate() {
            if !fl.contains(&a) || fl.iter().any(|&b| !bits[b] || explained[b]) {
                continue;
            }
            let isolated = chosen.iter().all(|&p| flipped[p].iter().all(|&x| fl.iter().all(|&y| !touches(x, y))));
            if !isolated {
                continue;
            }
            for &b in fl {
                explained[b] = true;
            }
            chosen.push(q);
            if search(bits, explained, chosen, flipped, touches) {
                return true;
            }
            chosen.pop();
            for &b in fl {
                explained[b] = false;
            }
        }
        false
    }

    let mut explained = vec![false; n];
    let mut chosen = Vec::new();
    if search(bits, &mut explained, &mut chosen, &flipped, &touches) {
        debug_assert_eq!(graph.syndrome_of(chosen.iter().copied()), bits);
        Ok(TriageClass::Trivial)
    } else {
        Ok(TriageClass::Complex)
    }
}
