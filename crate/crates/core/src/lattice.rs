//! Rotated surface code geometry.
//!
//! Data qubits sit on the integer grid `(row, col)` with `0 <= row, col < d`.
//! Stabilizers sit on plaquette corners `(r, c)` with `0 <= r, c <= d` and cover
//! the (up to four) data qubits `(r-1, c-1), (r-1, c), (r, c-1), (r, c)`.
//! Plaquettes with `r + c` even are X-type, odd are Z-type. Weight-2 X
//! plaquettes live on the top and bottom boundary, weight-2 Z plaquettes on the
//! left and right boundary.
//!
//! Each stabilizer type gets its own [`CheckGraph`]: the ancillas of that type,
//! the "clique" neighbor relation (same-type ancillas sharing exactly one data
//! qubit), the boundary discharge qubits and precomputed shortest paths used
//! by the matching decoder.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised while building a lattice.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("code distance must be odd and at least 3, got {0}")]
    InvalidDistance(usize),
}

/// The two stabilizer flavours of a CSS surface code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StabilizerType {
    X,
    Z,
}

impl StabilizerType {
    pub const BOTH: [StabilizerType; 2] = [StabilizerType::X, StabilizerType::Z];

    pub fn other(self) -> Self {
        match self {
            StabilizerType::X => StabilizerType::Z,
            StabilizerType::Z => StabilizerType::X,
        }
    }
}

impl fmt::Display for StabilizerType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StabilizerType::X => write!(f, "X"),
            StabilizerType::Z => write!(f, "Z"),
        }
    }
}

/// Index of a data qubit, `row * d + col`.
pub type DataId = usize;

/// A stabilizer measurement qubit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ancilla {
    /// Global id over all ancillas of the lattice (X first, then Z).
    pub id: usize,
    pub kind: StabilizerType,
    /// Position within its own type; syndrome vectors are indexed by this.
    pub index: usize,
    /// Plaquette corner `(r, c)`.
    pub position: (usize, usize),
    /// Sorted data qubit ids; 2 or 4 entries.
    pub support: Vec<DataId>,
}

/// Local neighbourhood of one ancilla.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clique {
    pub center: usize,
    /// `(neighbor index, shared data qubit)`, sorted by neighbor index.
    pub neighbors: Vec<(usize, DataId)>,
    /// Support qubits that flip no other ancilla of this type.
    pub discharge: Vec<DataId>,
}

impl Clique {
    pub fn size(&self) -> usize {
        self.neighbors.len()
    }
}

/// All ancillas of one stabilizer type and the derived adjacency structures.
#[derive(Debug, Clone)]
pub struct CheckGraph {
    kind: StabilizerType,
    ancillas: Vec<Ancilla>,
    neighbors: Vec<Vec<(usize, DataId)>>,
    discharge: Vec<Vec<DataId>>,
    /// For each data qubit, the ancillas of this type whose support contains it.
    qubit_checks: Vec<Vec<usize>>,
    /// All-pairs hop distance in the neighbor graph (row-major, `n * n`).
    hops: Vec<u32>,
    /// First hop on a shortest path from `a` towards `b` (row-major).
    next_hop: Vec<u32>,
    /// Hops to the nearest discharge-capable ancilla plus one.
    boundary_hops: Vec<u32>,
    /// Nearest discharge-capable ancilla (itself if it can discharge).
    boundary_exit: Vec<usize>,
    logical: Vec<DataId>,
}

impl CheckGraph {
    pub fn kind(&self) -> StabilizerType {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.ancillas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ancillas.is_empty()
    }

    pub fn ancillas(&self) -> &[Ancilla] {
        &self.ancillas
    }

    pub fn ancilla(&self, index: usize) -> &Ancilla {
        &self.ancillas[index]
    }

    /// Same-type neighbors of `index` together with the shared data qubit.
    pub fn neighbors(&self, index: usize) -> &[(usize, DataId)] {
        &self.neighbors[index]
    }

    /// The data qubit shared by two neighboring ancillas, if they are neighbors.
    pub fn shared_qubit(&self, a: usize, b: usize) -> Option<DataId> {
        self.neighbors[a].iter().find_map(|&(n, q)| (n == b).then_some(q))
    }

    pub fn is_neighbor(&self, a: usize, b: usize) -> bool {
        self.shared_qubit(a, b).is_some()
    }

    /// Support qubits of `index` that no other same-type ancilla contains.
    pub fn discharge(&self, index: usize) -> &[DataId] {
        &self.discharge[index]
    }

    /// Ancillas of this type whose support contains data qubit `q`.
    pub fn checks_of(&self, q: DataId) -> &[usize] {
        &self.qubit_checks[q]
    }

    pub fn clique(&self, index: usize) -> Clique {
        Clique { center: index, neighbors: self.neighbors[index].clone(), discharge: self.discharge[index].clone() }
    }

    /// Data qubits of a logical string whose errors this type detects.
    ///
    /// An error set with zero syndrome is a logical error iff it overlaps this
    /// set an odd number of times.
    pub fn logical_operator(&self) -> &[DataId] {
        &self.logical
    }

    /// Hop count between two ancillas in the neighbor graph.
    pub fn hop_distance(&self, a: usize, b: usize) -> u32 {
        self.hops[a * self.len() + b]
    }

    /// Hops to the closest discharge-capable ancilla, plus the discharge edge.
    pub fn boundary_distance(&self, a: usize) -> u32 {
        self.boundary_hops[a]
    }

    /// Data qubits along one shortest path between two ancillas.
    pub fn path_qubits(&self, a: usize, b: usize) -> Vec<DataId> {
        let n = self.len();
        let mut out = Vec::with_capacity(self.hop_distance(a, b) as usize);
        let mut cur = a;
        while cur != b {
            let next = self.next_hop[cur * n + b] as usize;
            out.push(self.shared_qubit(cur, next).expect("next hop is a neighbor"));
            cur = next;
        }
        out
    }

    /// Data qubits along one shortest path from `a` off the lattice boundary.
    pub fn boundary_path_qubits(&self, a: usize) -> Vec<DataId> {
        let exit = self.boundary_exit[a];
        let mut out = self.path_qubits(a, exit);
        out.push(self.discharge[exit][0]);
        out
    }

    /// Syndrome of a set of data errors, indexed by ancilla index.
    pub fn syndrome_of<I>(&self, errors: I) -> Vec<bool>
    where
        I: IntoIterator<Item = DataId>,
    {
        let mut s = vec![false; self.len()];
        for q in errors {
            for &a in &self.qubit_checks[q] {
                s[a] ^= true;
            }
        }
        s
    }

    /// Same as [`CheckGraph::syndrome_of`] for a dense error mask.
    pub fn syndrome_of_mask(&self, errors: &[bool]) -> Vec<bool> {
        self.syndrome_of(errors.iter().enumerate().filter_map(|(q, &e)| e.then_some(q)))
    }

    /// Parity of the overlap between a dense error mask and the logical string.
    pub fn logical_parity(&self, errors: &[bool]) -> bool {
        self.logical.iter().fold(false, |acc, &q| acc ^ errors[q])
    }

    fn new(kind: StabilizerType, ancillas: Vec<Ancilla>, num_data: usize, d: usize) -> Self {
        let n = ancillas.len();
        let mut qubit_checks = vec![Vec::new(); num_data];
        for a in &ancillas {
            for &q in &a.support {
                qubit_checks[q].push(a.index);
            }
        }

        let mut neighbors = vec![Vec::new(); n];
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                let shared: Vec<DataId> =
                    ancillas[a].support.iter().copied().filter(|q| ancillas[b].support.contains(q)).collect();
                if shared.len() == 1 {
                    neighbors[a].push((b, shared[0]));
                }
            }
        }

        let discharge: Vec<Vec<DataId>> = ancillas
            .iter()
            .map(|a| a.support.iter().copied().filter(|&q| qubit_checks[q].len() == 1).collect())
            .collect();

        // BFS from every ancilla; the graph is small (at most ~220 nodes at d=21).
        let mut hops = vec![u32::MAX; n * n];
        let mut next_hop = vec![u32::MAX; n * n];
        for src in 0..n {
            // BFS from `src`; `parent` lets us recover the first hop from any
            // node back to `src`, which is the first hop *from* that node.
            let row = src * n;
            hops[row + src] = 0;
            let mut queue = VecDeque::from([src]);
            while let Some(u) = queue.pop_front() {
                for &(v, _) in &neighbors[u] {
                    if hops[row + v] == u32::MAX {
                        hops[row + v] = hops[row + u] + 1;
                        // moving from v towards src, the first step is u
                        next_hop[v * n + src] = u as u32;
                        queue.push_back(v);
                    }
                }
            }
        }

        let mut boundary_hops = vec![u32::MAX; n];
        let mut boundary_exit = vec![usize::MAX; n];
        for a in 0..n {
            for b in 0..n {
                if discharge[b].is_empty() {
                    continue;
                }
                let h = hops[a * n + b].saturating_add(1);
                if h < boundary_hops[a] {
                    boundary_hops[a] = h;
                    boundary_exit[a] = b;
                }
            }
        }

        // X ancillas detect Z errors, which terminate on the left/right
        // boundary; a column crosses every such logical chain once. Z ancillas
        // detect X errors, which terminate on top/bottom; use a row.
        let logical = match kind {
            StabilizerType::X => (0..d).map(|row| row * d).collect(),
            StabilizerType::Z => (0..d).collect(),
        };

        CheckGraph {
            kind,
            ancillas,
            neighbors,
            discharge,
            qubit_checks,
            hops,
            next_hop,
            boundary_hops,
            boundary_exit,
            logical,
        }
    }
}

/// A distance-`d` rotated surface code patch.
#[derive(Debug, Clone)]
pub struct Lattice {
    distance: usize,
    data_sites: Vec<(usize, usize)>,
    x: CheckGraph,
    z: CheckGraph,
}

impl Lattice {
    pub fn build(d: usize) -> Result<Self, LatticeError> {
        if d < 3 || d.is_multiple_of(2) {
            return Err(LatticeError::InvalidDistance(d));
        }
        let data_sites: Vec<(usize, usize)> = (0..d).flat_map(|r| (0..d).map(move |c| (r, c))).collect();

        let mut x = Vec::new();
        let mut z = Vec::new();
        for r in 0..=d {
            for c in 0..=d {
                let kind = if (r + c) % 2 == 0 { StabilizerType::X } else { StabilizerType::Z };
                let top_bottom = r == 0 || r == d;
                let left_right = c == 0 || c == d;
                let keep = match (top_bottom, left_right) {
                    (false, false) => true,
                    (true, true) => false,
                    (true, false) => kind == StabilizerType::X,
                    (false, true) => kind == StabilizerType::Z,
                };
                if !keep {
                    continue;
                }
                let mut support = Vec::with_capacity(4);
                for (dr, dc) in [(1, 1), (1, 0), (0, 1), (0, 0)] {
                    if r >= dr && c >= dc && r - dr < d && c - dc < d {
                        support.push((r - dr) * d + (c - dc));
                    }
                }
                support.sort_unstable();
                let list = match kind {
                    StabilizerType::X => &mut x,
                    StabilizerType::Z => &mut z,
                };
                list.push(Ancilla { id: 0, kind, index: list.len(), position: (r, c), support });
            }
        }
        let nx = x.len();
        for (i, a) in x.iter_mut().enumerate() {
            a.id = i;
        }
        for (i, a) in z.iter_mut().enumerate() {
            a.id = nx + i;
        }

        let num_data = d * d;
        Ok(Lattice {
            distance: d,
            data_sites,
            x: CheckGraph::new(StabilizerType::X, x, num_data, d),
            z: CheckGraph::new(StabilizerType::Z, z, num_data, d),
        })
    }

    pub fn distance(&self) -> usize {
        self.distance
    }

    pub fn num_data(&self) -> usize {
        self.data_sites.len()
    }

    /// Grid coordinates `(row, col)` of every data qubit, indexed by id.
    pub fn data_sites(&self) -> &[(usize, usize)] {
        &self.data_sites
    }

    pub fn num_ancillas(&self) -> usize {
        self.x.len() + self.z.len()
    }

    pub fn checks(&self, kind: StabilizerType) -> &CheckGraph {
        match kind {
            StabilizerType::X => &self.x,
            StabilizerType::Z => &self.z,
        }
    }

    /// Every ancilla of both types, ordered by global id.
    pub fn ancillas(&self) -> impl Iterator<Item = &Ancilla> {
        self.x.ancillas.iter().chain(self.z.ancillas.iter())
    }

    /// Syndrome bits of ancillas of type `kind` for the given data errors.
    pub fn syndrome_of<I>(&self, errors: I, kind: StabilizerType) -> Vec<bool>
    where
        I: IntoIterator<Item = DataId>,
    {
        self.checks(kind).syndrome_of(errors)
    }

    pub fn clique_of(&self, kind: StabilizerType, index: usize) -> Clique {
        self.checks(kind).clique(index)
    }

    /// Raw syndrome bits of one measurement round, both types concatenated.
    pub fn syndrome_bits_per_round(&self) -> usize {
        self.num_ancillas()
    }
}
