//! Better-than-worst-case surface code decoding toolkit.
//!
//! A cheap local triage decoder handles the common all-zero and isolated-error
//! syndromes on chip and forwards the rare complex ones to an exact matching
//! decoder. Around it sit the noise simulator, coverage/logical-error Monte
//! Carlo, an off-chip bandwidth and stall model, a sparse-compression
//! comparator and an SFQ gate-level cost model.

pub mod bandwidth;
pub mod clique;
pub mod compression;
pub mod hwcost;
pub mod lattice;
pub mod matching;
pub mod montecarlo;
pub mod noise;

pub use clique::{EffectiveSyndrome, TriageClass, TriageOutcome};
pub use lattice::{CheckGraph, Lattice, LatticeError, StabilizerType};
pub use matching::{Defect, MatchingResult, SpacetimeDefectSet};
pub use noise::{ErrorFrame, NoiseParams};
