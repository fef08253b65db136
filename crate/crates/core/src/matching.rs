//! Exact minimum-weight perfect matching over space-time detection events.
//!
//! Defects may pair with each other or with the lattice boundary. Small
//! instances are solved by dynamic programming over defect subsets; larger ones
//! are reduced to a maximum-weight maximum-cardinality matching on a doubled
//! graph (one boundary twin per defect, twins joined at zero cost).

use petgraph::graph::UnGraph;
use serde::Serialize;

use crate::lattice::{CheckGraph, DataId, StabilizerType};

/// A detection event: ancilla index within its type and the round it fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Defect {
    pub ancilla: usize,
    pub round: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpacetimeDefectSet {
    pub defects: Vec<Defect>,
    pub window: usize,
    pub kind: StabilizerType,
}

impl SpacetimeDefectSet {
    /// Sorts and deduplicates the defects.
    pub fn new(mut defects: Vec<Defect>, window: usize, kind: StabilizerType) -> Self {
        defects.sort_unstable();
        defects.dedup();
        SpacetimeDefectSet { defects, window, kind }
    }

    /// Detection events of consecutive raw rounds, with an all-zero round
    /// before the first one.
    pub fn from_rounds(rounds: &[Vec<bool>], kind: StabilizerType) -> Self {
        let mut defects = Vec::new();
        let mut prev: Option<&Vec<bool>> = None;
        for (t, r) in rounds.iter().enumerate() {
            for (a, &bit) in r.iter().enumerate() {
                let before = prev.is_some_and(|p| p[a]);
                if bit != before {
                    defects.push(Defect { ancilla: a, round: t });
                }
            }
            prev = Some(r);
        }
        SpacetimeDefectSet::new(defects, rounds.len(), kind)
    }

    pub fn len(&self) -> usize {
        self.defects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defects.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Pairing {
    Pair(Defect, Defect),
    Boundary(Defect),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MatchingResult {
    pub pairs: Vec<Pairing>,
    /// Sorted data qubits flipped by the spatial projections of all pairings.
    pub corrections: Vec<DataId>,
    pub total_weight: u64,
}

pub fn distance(graph: &CheckGraph, u: Defect, v: Defect) -> u64 {
    u.round.abs_diff(v.round) as u64 + graph.hop_distance(u.ancilla, v.ancilla) as u64
}

pub fn boundary_distance(graph: &CheckGraph, u: Defect) -> u64 {
    graph.boundary_distance(u.ancilla) as u64
}

/// Above this many defects the blossom route is used.
pub const DP_LIMIT: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    Auto,
    SubsetDp,
    Blossom,
}

pub fn decode(graph: &CheckGraph, defects: &SpacetimeDefectSet) -> MatchingResult {
    decode_with(graph, defects, Solver::Auto)
}

pub fn decode_with(graph: &CheckGraph, defects: &SpacetimeDefectSet, solver: Solver) -> MatchingResult {
    let ds = &defects.defects;
    if ds.is_empty() {
        return MatchingResult::default();
    }
    let n = ds.len();
    let mut pair_w = vec![0u64; n * n];
    for i in 0..n {
        for j in 0..n {
            pair_w[i * n + j] = distance(graph, ds[i], ds[j]);
        }
    }
    let bound_w: Vec<u64> = ds.iter().map(|&d| boundary_distance(graph, d)).collect();

    let assignment = match solver {
        Solver::SubsetDp => subset_dp(n, &pair_w, &bound_w),
        Solver::Blossom => blossom(n, &pair_w, &bound_w),
        Solver::Auto if n <= DP_LIMIT => subset_dp(n, &pair_w, &bound_w),
        Solver::Auto => blossom(n, &pair_w, &bound_w),
    };

    let mut flips: Vec<DataId> = Vec::new();
    let mut pairs = Vec::with_capacity(assignment.len());
    let mut total_weight = 0;
    for m in assignment {
        match m {
            Mate::Pair(i, j) => {
                total_weight += pair_w[i * n + j];
                pairs.push(Pairing::Pair(ds[i], ds[j]));
                flips.extend(graph.path_qubits(ds[i].ancilla, ds[j].ancilla));
            }
            Mate::Boundary(i) => {
                total_weight += bound_w[i];
                pairs.push(Pairing::Boundary(ds[i]));
                flips.extend(graph.boundary_path_qubits(ds[i].ancilla));
            }
        }
    }
    MatchingResult { pairs, corrections: xor_reduce(flips), total_weight }
}

/// Keep qubits that appear an odd number of times.
fn xor_reduce(mut qubits: Vec<DataId>) -> Vec<DataId> {
    qubits.sort_unstable();
    let mut out = Vec::with_capacity(qubits.len());
    let mut i = 0;
    while i < qubits.len() {
        let mut j = i;
        while j < qubits.len() && qubits[j] == qubits[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            out.push(qubits[i]);
        }
        i = j;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mate {
    Pair(usize, usize),
    Boundary(usize),
}

/// Minimum over subsets: the lowest unmatched defect either goes to the
/// boundary or pairs with a later one.
fn subset_dp(n: usize, pair_w: &[u64], bound_w: &[u64]) -> Vec<Mate> {
    assert!(n <= 24, "subset DP is limited to 24 defects");
    let full = 1usize << n;
    let mut best = vec![u64::MAX; full];
    let mut choice = vec![u32::MAX; full];
    best[0] = 0;
    for mask in 1..full {
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut b = bound_w[i] + best[rest];
        let mut c = i as u32;
        let mut others = rest;
        while others != 0 {
            let j = others.trailing_zeros() as usize;
            others &= others - 1;
            let w = pair_w[i * n + j] + best[rest & !(1 << j)];
            if w < b {
                b = w;
                c = j as u32;
            }
        }
        best[mask] = b;
        choice[mask] = c;
    }
    let mut out = Vec::new();
    let mut mask = full - 1;
    while mask != 0 {
        let i = mask.trailing_zeros() as usize;
        let j = choice[mask] as usize;
        if j == i {
            out.push(Mate::Boundary(i));
            mask &= !(1 << i);
        } else {
            out.push(Mate::Pair(i, j));
            mask &= !((1 << i) | (1 << j));
        }
    }
    out
}

fn blossom(n: usize, pair_w: &[u64], bound_w: &[u64]) -> Vec<Mate> {
    // nodes 0..n are defects, n..2n their boundary twins
    let mut g: UnGraph<(), u64> = UnGraph::with_capacity(2 * n, n * n + n);
    let nodes: Vec<_> = (0..2 * n).map(|_| g.add_node(())).collect();
    for i in 0..n {
        for j in i + 1..n {
            let w = pair_w[i * n + j];
            if w < bound_w[i] + bound_w[j] {
                g.add_edge(nodes[i], nodes[j], w);
            }
            g.add_edge(nodes[n + i], nodes[n + j], 0);
        }
        g.add_edge(nodes[i], nodes[n + i], bound_w[i]);
    }
    let max_w = g.edge_weights().copied().max().unwrap_or(0) as i128 + 1;
    let matched = rustworkx_core::max_weight_matching::max_weight_matching(
        &g,
        true,
        |e: petgraph::graph::EdgeReference<u64>| Ok::<i128, std::convert::Infallible>(max_w - *e.weight() as i128),
        false,
    )
    .expect("infallible weights");
    let mut mates: Vec<Mate> = matched
        .into_iter()
        .filter_map(|(a, b)| {
            let (a, b) = (a.min(b), a.max(b));
            if b < n {
                Some(Mate::Pair(a, b))
            } else if a < n {
                debug_assert_eq!(b, n + a);
                Some(Mate::Boundary(a))
            } else {
                None
            }
        })
        .collect();
    mates.sort_unstable_by_key(|m| match *m {
        Mate::Pair(i, _) | Mate::Boundary(i) => i,
    });
    mates
}

/// Minimum matching weight by exhaustive enumeration of all pairings.
///
/// Independent reference for tests; exponential in the number of defects.
pub fn brute_force_weight(graph: &CheckGraph, defects: &[Defect]) -> u64 {
    fn go(graph: &CheckGraph, rest: &[Defect]) -> u64 {
        let Some((&first, tail)) = rest.split_first() else {
            return 0;
        };
        let mut best = boundary_distance(graph, first) + go(graph, tail);
        for k in 0..tail.len() {
            let mut remaining = tail.to_vec();
            let partner = remaining.remove(k);
            best = best.min(distance(graph, first, partner) + go(graph, &remaining));
        }
        best
    }
    go(graph, defects)
}
