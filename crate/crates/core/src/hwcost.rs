//! Gate-level netlist of the on-chip decoder and its SFQ cost.
//!
//! Every logic gate and DFF is clocked, so a signal's stage depth is the number
//! of clocked gates between it and the primary inputs. Splitters are unclocked
//! and only add delay.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clique::{filter_rounds, flips, triage_bits, TriageClass};
use crate::lattice::{DataId, Lattice, StabilizerType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GateKind {
    Xor2,
    And2,
    Or2,
    Not,
    Dff,
    Split,
}

impl GateKind {
    pub const ALL: [GateKind; 6] =
        [GateKind::Xor2, GateKind::And2, GateKind::Or2, GateKind::Not, GateKind::Dff, GateKind::Split];

    pub fn arity(self) -> usize {
        match self {
            GateKind::Xor2 | GateKind::And2 | GateKind::Or2 => 2,
            GateKind::Not | GateKind::Dff | GateKind::Split => 1,
        }
    }

    pub fn is_clocked(self) -> bool {
        self != GateKind::Split
    }

    fn eval(self, a: bool, b: bool) -> bool {
        match self {
            GateKind::Xor2 => a ^ b,
            GateKind::And2 => a & b,
            GateKind::Or2 => a | b,
            GateKind::Not => !a,
            GateKind::Dff | GateKind::Split => a,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GateKind::Xor2 => "XOR2",
            GateKind::And2 => "AND2",
            GateKind::Or2 => "OR2",
            GateKind::Not => "NOT",
            GateKind::Dff => "DFF",
            GateKind::Split => "SPLIT",
        })
    }
}

impl FromStr for GateKind {
    type Err = CostError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GateKind::ALL
            .into_iter()
            .find(|k| k.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| CostError::Parse(format!("unknown gate kind `{s}`")))
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum CostError {
    #[error("cell library has no entry for {0}")]
    MissingCell(GateKind),
    #[error("cell library: {0}")]
    Parse(String),
    #[error("power parameters must be non-negative and finite")]
    InvalidPowerParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub delay_ps: f64,
    pub area_um2: f64,
    pub jj_count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellLibrary {
    cells: BTreeMap<GateKind, Cell>,
}

const ERSFQ: &str = include_str!("../data/ersfq_cells.txt");

impl CellLibrary {
    /// The bundled ERSFQ library.
    pub fn ersfq() -> Self {
        Self::parse(ERSFQ).expect("bundled cell library parses")
    }

    /// Parse `kind delay_ps area_um2 jj_count` rows; `#` starts a comment and
    /// commas count as whitespace.
    pub fn parse(text: &str) -> Result<Self, CostError> {
        let mut cells = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").replace(',', " ");
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.is_empty() {
                continue;
            }
            let bad = |what: &str| CostError::Parse(format!("line {}: {what}", lineno + 1));
            if fields.len() != 4 {
                return Err(bad("expected 4 fields"));
            }
            let kind: GateKind = fields[0].parse()?;
            let delay_ps: f64 = fields[1].parse().map_err(|_| bad("bad delay"))?;
            let area_um2: f64 = fields[2].parse().map_err(|_| bad("bad area"))?;
            let jj_count: u64 = fields[3].parse().map_err(|_| bad("bad jj count"))?;
            if !(delay_ps > 0.0 && area_um2 > 0.0 && jj_count > 0) {
                return Err(bad("entries must be positive"));
            }
            if cells.insert(kind, Cell { delay_ps, area_um2, jj_count }).is_some() {
                return Err(bad("duplicate kind"));
            }
        }
        Ok(CellLibrary { cells })
    }

    pub fn cell(&self, kind: GateKind) -> Result<&Cell, CostError> {
        self.cells.get(&kind).ok_or(CostError::MissingCell(kind))
    }

    pub fn is_complete(&self) -> bool {
        GateKind::ALL.iter().all(|k| self.cells.contains_key(k))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Signal {
    Input(usize),
    Gate(usize),
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub fanins: Vec<Signal>,
}

/// Gates in topological order: every fanin refers to an input or an earlier gate.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Netlist {
    pub num_inputs: usize,
    pub gates: Vec<Gate>,
    pub outputs: Vec<Signal>,
}

impl Netlist {
    pub fn new(num_inputs: usize) -> Self {
        Netlist { num_inputs, ..Default::default() }
    }

    pub fn add(&mut self, kind: GateKind, fanins: &[Signal]) -> Signal {
        assert_eq!(fanins.len(), kind.arity(), "{kind} arity");
        self.gates.push(Gate { kind, fanins: fanins.to_vec() });
        Signal::Gate(self.gates.len() - 1)
    }

    pub fn gate_counts(&self) -> BTreeMap<GateKind, usize> {
        let mut counts: BTreeMap<GateKind, usize> = GateKind::ALL.iter().map(|&k| (k, 0)).collect();
        for g in &self.gates {
            *counts.entry(g.kind).or_default() += 1;
        }
        counts
    }

    /// Fanins only reference inputs or earlier gates.
    pub fn is_topological(&self) -> bool {
        let ok = |s: &Signal, bound: usize| match *s {
            Signal::Input(i) => i < self.num_inputs,
            Signal::Gate(g) => g < bound,
            Signal::Zero => true,
        };
        self.gates.iter().enumerate().all(|(i, g)| g.fanins.iter().all(|s| ok(s, i)))
            && self.outputs.iter().all(|s| ok(s, self.gates.len()))
    }

    fn fanouts(&self) -> HashMap<Signal, usize> {
        let mut fan = HashMap::new();
        for s in self.gates.iter().flat_map(|g| g.fanins.iter()).chain(self.outputs.iter()) {
            *fan.entry(*s).or_default() += 1;
        }
        fan
    }

    /// Every net drives at most one sink, except splitter outputs which drive two.
    pub fn fanout_is_legal(&self) -> bool {
        self.fanouts().into_iter().all(|(s, f)| match s {
            Signal::Gate(g) if self.gates[g].kind == GateKind::Split => f <= 2,
            Signal::Zero => true,
            _ => f <= 1,
        })
    }

    /// Clocked-stage depth of every gate output.
    pub fn stage_depths(&self) -> Vec<u32> {
        let mut depth = vec![0u32; self.gates.len()];
        for (i, g) in self.gates.iter().enumerate() {
            let d_in = g.fanins.iter().map(|s| self.depth_of(&depth, s)).max().unwrap_or(0);
            depth[i] = d_in + g.kind.is_clocked() as u32;
        }
        depth
    }

    fn depth_of(&self, depth: &[u32], s: &Signal) -> u32 {
        match *s {
            Signal::Gate(g) => depth[g],
            _ => 0,
        }
    }

    /// All fanins of every clocked gate, and all outputs, arrive at equal depth.
    pub fn is_path_balanced(&self) -> bool {
        let depth = self.stage_depths();
        let gates_ok = self.gates.iter().all(|g| {
            let mut it = g.fanins.iter().filter(|s| **s != Signal::Zero).map(|s| self.depth_of(&depth, s));
            match it.next() {
                Some(first) => it.all(|d| d == first),
                None => true,
            }
        });
        let mut outs = self.outputs.iter().filter(|s| **s != Signal::Zero).map(|s| self.depth_of(&depth, s));
        let outs_ok = match outs.next() {
            Some(first) => outs.all(|d| d == first),
            None => true,
        };
        gates_ok && outs_ok
    }

    /// Evaluate every output on one input assignment.
    pub fn simulate(&self, inputs: &[bool]) -> Vec<bool> {
        assert_eq!(inputs.len(), self.num_inputs);
        let mut val = vec![false; self.gates.len()];
        let get = |val: &[bool], s: &Signal| match *s {
            Signal::Input(i) => inputs[i],
            Signal::Gate(g) => val[g],
            Signal::Zero => false,
        };
        for (i, g) in self.gates.iter().enumerate() {
            let a = get(&val, &g.fanins[0]);
            let b = g.fanins.get(1).is_some_and(|s| get(&val, s));
            val[i] = g.kind.eval(a, b);
        }
        self.outputs.iter().map(|s| get(&val, s)).collect()
    }

    /// Insert DFF chains so that every clocked gate and every output sees
    /// equal-depth fanins. Chains are shared per source net.
    pub fn balance_paths(&self) -> Netlist {
        let mut out = Netlist::new(self.num_inputs);
        let mut map: Vec<Signal> = Vec::with_capacity(self.gates.len());
        let mut depth: HashMap<Signal, u32> = HashMap::new();
        // delayed[src] = chain of DFF taps; index k is src delayed by k + 1 stages
        let mut delayed: HashMap<Signal, Vec<Signal>> = HashMap::new();
        let mut delay_to = |out: &mut Netlist, depth: &mut HashMap<Signal, u32>, s: Signal, target: u32| -> Signal {
            let base = depth.get(&s).copied().unwrap_or(0);
            if s == Signal::Zero || base >= target {
                return s;
            }
            let chain = delayed.entry(s).or_default();
            while (chain.len() as u32) < target - base {
                let prev = chain.last().copied().unwrap_or(s);
                let dff = out.add(GateKind::Dff, &[prev]);
                depth.insert(dff, base + chain.len() as u32 + 1);
                chain.push(dff);
            }
            chain[(target - base - 1) as usize]
        };
        for g in &self.gates {
            let fanins: Vec<Signal> = g
                .fanins
                .iter()
                .map(|s| match *s {
                    Signal::Gate(i) => map[i],
                    other => other,
                })
                .collect();
            let target = fanins.iter().map(|s| depth.get(s).copied().unwrap_or(0)).max().unwrap_or(0);
            let fanins: Vec<Signal> = fanins.into_iter().map(|s| delay_to(&mut out, &mut depth, s, target)).collect();
            let s = out.add(g.kind, &fanins);
            depth.insert(s, target + g.kind.is_clocked() as u32);
            map.push(s);
        }
        let outputs: Vec<Signal> = self
            .outputs
            .iter()
            .map(|s| match *s {
                Signal::Gate(i) => map[i],
                other => other,
            })
            .collect();
        let target = outputs.iter().map(|s| depth.get(s).copied().unwrap_or(0)).max().unwrap_or(0);
        let outputs: Vec<Signal> = outputs.into_iter().map(|s| delay_to(&mut out, &mut depth, s, target)).collect();
        out.outputs = outputs;
        out
    }

    /// Realize every fanout-`f` net with a balanced tree of `f - 1` splitters.
    pub fn insert_splitters(&self) -> Netlist {
        let fan = self.fanouts();
        let mut out = Netlist::new(self.num_inputs);
        let mut map: Vec<Signal> = Vec::with_capacity(self.gates.len());
        let mut leaves: HashMap<Signal, Vec<Signal>> = HashMap::new();
        fn tree(out: &mut Netlist, src: Signal, f: usize, acc: &mut Vec<Signal>) {
            if f == 1 {
                acc.push(src);
                return;
            }
            let s = out.add(GateKind::Split, &[src]);
            tree(out, s, f.div_ceil(2), acc);
            tree(out, s, f / 2, acc);
        }
        let mut take = |out: &mut Netlist, old: Signal, new: Signal| -> Signal {
            let f = fan.get(&old).copied().unwrap_or(1);
            if f <= 1 || new == Signal::Zero {
                return new;
            }
            let slot = leaves.entry(old).or_insert_with(|| {
                let mut acc = Vec::with_capacity(f);
                tree(out, new, f, &mut acc);
                acc.reverse();
                acc
            });
            slot.pop().expect("fanout count covers every sink")
        };
        let remap = |map: &[Signal], s: Signal| match s {
            Signal::Gate(i) => map[i],
            other => other,
        };
        for g in &self.gates {
            let fanins: Vec<Signal> = g.fanins.iter().map(|&s| take(&mut out, s, remap(&map, s))).collect();
            let s = out.add(g.kind, &fanins);
            map.push(s);
        }
        let outputs: Vec<Signal> = self.outputs.iter().map(|&s| take(&mut out, s, remap(&map, s))).collect();
        out.outputs = outputs;
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub jj_count: u64,
    pub area_um2: f64,
    pub critical_path_ps: f64,
}

/// Sum JJ count and area; critical path is the largest input-to-output delay sum.
pub fn evaluate(netlist: &Netlist, lib: &CellLibrary) -> Result<CostReport, CostError> {
    let mut jj = 0;
    let mut area = 0.0;
    let mut arrival = vec![0.0f64; netlist.gates.len()];
    for (i, g) in netlist.gates.iter().enumerate() {
        let cell = lib.cell(g.kind)?;
        jj += cell.jj_count;
        area += cell.area_um2;
        let t_in = g
            .fanins
            .iter()
            .map(|s| match *s {
                Signal::Gate(j) => arrival[j],
                _ => 0.0,
            })
            .fold(0.0, f64::max);
        arrival[i] = t_in + cell.delay_ps;
    }
    let sinks: Vec<usize> = if netlist.outputs.is_empty() {
        // no declared outputs: every gate output is observable
        (0..netlist.gates.len()).collect()
    } else {
        netlist
            .outputs
            .iter()
            .filter_map(|s| match *s {
                Signal::Gate(j) => Some(j),
                _ => None,
            })
            .collect()
    };
    let critical = sinks.into_iter().map(|j| arrival[j]).fold(0.0, f64::max);
    Ok(CostReport { jj_count: jj, area_um2: area, critical_path_ps: critical })
}

/// Dynamic power `jj x activity x energy x clock`; ERSFQ has no static bias loss.
pub fn power_estimate(
    netlist: &Netlist,
    lib: &CellLibrary,
    clock_hz: f64,
    energy_per_switch_j: f64,
    activity: f64,
) -> Result<f64, CostError> {
    let valid = |x: f64| x.is_finite() && x >= 0.0;
    if !(valid(clock_hz) && valid(energy_per_switch_j) && valid(activity)) {
        return Err(CostError::InvalidPowerParams);
    }
    let jj = evaluate(netlist, lib)?.jj_count as f64;
    Ok(jj * activity * energy_per_switch_j * clock_hz)
}

/// Role of each of an ancilla's four input bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InputRole {
    /// Flip seen one cycle earlier, held from the previous decision.
    PrevFlip,
    PrevRound,
    CurrRound,
    NextRound,
}

pub const INPUTS_PER_ANCILLA: usize = 4;

/// Netlist plus the meaning of its ports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecoderNetlist {
    pub distance: usize,
    pub netlist: Netlist,
    /// Output 0 is COMPLEX; the rest are correction lines in this order.
    pub correction_lines: Vec<(StabilizerType, DataId)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecoderOutputs {
    pub complex: bool,
    /// Per type, indexed by data qubit.
    pub corrections: [Vec<bool>; 2],
}

impl DecoderOutputs {
    pub fn class(&self) -> TriageClass {
        if self.complex {
            TriageClass::Complex
        } else if self.corrections.iter().flatten().any(|&b| b) {
            TriageClass::Trivial
        } else {
            TriageClass::AllZero
        }
    }
}

fn type_slot(kind: StabilizerType) -> usize {
    match kind {
        StabilizerType::X => 0,
        StabilizerType::Z => 1,
    }
}

/// Input index of `role` for ancilla `index` of `kind`.
pub fn input_index(lattice: &Lattice, kind: StabilizerType, index: usize, role: InputRole) -> usize {
    let base = type_slot(kind) * lattice.checks(StabilizerType::X).len();
    (base + index) * INPUTS_PER_ANCILLA + role as usize
}

fn or_tree(n: &mut Netlist, mut sigs: Vec<Signal>) -> Signal {
    if sigs.is_empty() {
        return Signal::Zero;
    }
    while sigs.len() > 1 {
        sigs = sigs.chunks(2).map(|c| if c.len() == 2 { n.add(GateKind::Or2, &[c[0], c[1]]) } else { c[0] }).collect();
    }
    sigs[0]
}

fn xor_tree(n: &mut Netlist, mut sigs: Vec<Signal>) -> Signal {
    while sigs.len() > 1 {
        sigs = sigs.chunks(2).map(|c| if c.len() == 2 { n.add(GateKind::Xor2, &[c[0], c[1]]) } else { c[0] }).collect();
    }
    sigs[0]
}

/// Decision logic of one clique with center bit `e` and neighbor bits `nb`.
///
/// Returns the clique's COMPLEX contribution (if it can ever be complex) and,
/// when a discharge qubit exists, the signal that drives its correction line.
pub fn clique_decision(n: &mut Netlist, e: Signal, nb: &[Signal], discharge: bool) -> (Option<Signal>, Option<Signal>) {
    match (nb.len(), discharge) {
        (0, false) => (Some(e), None),
        (0, true) => (None, Some(e)),
        (_, false) => {
            let par = xor_tree(n, nb.to_vec());
            let even = n.add(GateKind::Not, &[par]);
            (Some(n.add(GateKind::And2, &[e, even])), None)
        }
        (1, true) => {
            let quiet = n.add(GateKind::Not, &[nb[0]]);
            (None, Some(n.add(GateKind::And2, &[e, quiet])))
        }
        (2, true) => {
            // n = 2 is the only complex case; n = 0 discharges
            let both = n.add(GateKind::And2, &[nb[0], nb[1]]);
            let complex = n.add(GateKind::And2, &[e, both]);
            let any = n.add(GateKind::Or2, &[nb[0], nb[1]]);
            let quiet = n.add(GateKind::Not, &[any]);
            (Some(complex), Some(n.add(GateKind::And2, &[e, quiet])))
        }
        (_, true) => {
            let par = xor_tree(n, nb.to_vec());
            let even = n.add(GateKind::Not, &[par]);
            let any = or_tree(n, nb.to_vec());
            let t = n.add(GateKind::And2, &[e, even]);
            let complex = n.add(GateKind::And2, &[t, any]);
            let quiet = n.add(GateKind::Not, &[any]);
            (Some(complex), Some(n.add(GateKind::And2, &[e, quiet])))
        }
    }
}

/// Logic before splitter insertion and path balancing.
pub fn build_logic(lattice: &Lattice) -> DecoderNetlist {
    let per_type = lattice.checks(StabilizerType::X).len();
    let mut n = Netlist::new(2 * per_type * INPUTS_PER_ANCILLA);
    let mut complex_signals = Vec::new();
    let mut lines = Vec::new();
    let mut line_signals = Vec::new();
    for kind in StabilizerType::BOTH {
        let g = lattice.checks(kind);
        let inp = |i: usize, r: InputRole| Signal::Input(input_index(lattice, kind, i, r));
        // round storage and two-round persistence filter
        let mut eff = Vec::with_capacity(g.len());
        for i in 0..g.len() {
            let f_prev = n.add(GateKind::Dff, &[inp(i, InputRole::PrevFlip)]);
            let s_prev = n.add(GateKind::Dff, &[inp(i, InputRole::PrevRound)]);
            let s_curr = n.add(GateKind::Dff, &[inp(i, InputRole::CurrRound)]);
            let f_curr = n.add(GateKind::Xor2, &[s_prev, s_curr]);
            let f_next = n.add(GateKind::Xor2, &[s_curr, inp(i, InputRole::NextRound)]);
            let not_prev = n.add(GateKind::Not, &[f_prev]);
            let not_next = n.add(GateKind::Not, &[f_next]);
            let a = n.add(GateKind::And2, &[f_curr, not_prev]);
            eff.push(n.add(GateKind::And2, &[a, not_next]));
        }
        // per-clique decision
        for a in 0..g.len() {
            let nb: Vec<Signal> = g.neighbors(a).iter().map(|&(b, _)| eff[b]).collect();
            let (complex, line) = clique_decision(&mut n, eff[a], &nb, !g.discharge(a).is_empty());
            complex_signals.extend(complex);
            if let Some(line) = line {
                lines.push((kind, g.discharge(a)[0]));
                line_signals.push(line);
            }
        }
        // one AND per adjacent pair drives the shared qubit's correction line
        for a in 0..g.len() {
            for &(b, q) in g.neighbors(a) {
                if a < b {
                    lines.push((kind, q));
                    line_signals.push(n.add(GateKind::And2, &[eff[a], eff[b]]));
                }
            }
        }
    }
    let complex = or_tree(&mut n, complex_signals);
    n.outputs.push(complex);
    n.outputs.extend(line_signals);
    DecoderNetlist { distance: lattice.distance(), netlist: n, correction_lines: lines }
}

/// Full netlist: logic, DFF path balancing, then splitter trees.
pub fn build_netlist(lattice: &Lattice) -> DecoderNetlist {
    let logic = build_logic(lattice);
    let netlist = logic.netlist.balance_paths().insert_splitters();
    DecoderNetlist { netlist, ..logic }
}

impl DecoderNetlist {
    pub fn simulate(&self, inputs: &[bool], num_data: usize) -> DecoderOutputs {
        let out = self.netlist.simulate(inputs);
        let mut corrections = [vec![false; num_data], vec![false; num_data]];
        for (&(kind, q), &v) in self.correction_lines.iter().zip(&out[1..]) {
            corrections[type_slot(kind)][q] |= v;
        }
        DecoderOutputs { complex: out[0], corrections }
    }
}

/// Raw syndromes of rounds `t-2 ..= t+1` for one type.
pub type RawWindow = [Vec<bool>; 4];

/// Pack X and Z windows into netlist inputs.
pub fn pack_inputs(lattice: &Lattice, x: &RawWindow, z: &RawWindow) -> Vec<bool> {
    let per_type = lattice.checks(StabilizerType::X).len();
    let mut inputs = vec![false; 2 * per_type * INPUTS_PER_ANCILLA];
    for (kind, w) in [(StabilizerType::X, x), (StabilizerType::Z, z)] {
        for i in 0..per_type {
            inputs[input_index(lattice, kind, i, InputRole::PrevFlip)] = w[0][i] ^ w[1][i];
            inputs[input_index(lattice, kind, i, InputRole::PrevRound)] = w[1][i];
            inputs[input_index(lattice, kind, i, InputRole::CurrRound)] = w[2][i];
            inputs[input_index(lattice, kind, i, InputRole::NextRound)] = w[3][i];
        }
    }
    inputs
}

/// Software reference for one window: per-type triage of the filtered flips.
pub fn reference_outputs(lattice: &Lattice, x: &RawWindow, z: &RawWindow) -> (TriageClass, [Option<Vec<DataId>>; 2]) {
    let mut class = TriageClass::AllZero;
    let mut corr = [None, None];
    for (slot, (kind, w)) in [(StabilizerType::X, x), (StabilizerType::Z, z)].into_iter().enumerate() {
        let eff = filter_rounds(&flips(&w[0], &w[1]), &flips(&w[1], &w[2]), &flips(&w[2], &w[3]));
        let out = triage_bits(lattice.checks(kind), &eff.bits);
        class = class.combine(out.class);
        if out.class != TriageClass::Complex {
            corr[slot] = Some(out.corrections);
        }
    }
    (class, corr)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceCost {
    pub distance: usize,
    pub gates: BTreeMap<GateKind, usize>,
    pub report: CostReport,
    pub power_w: f64,
}

pub fn cost_for_distance(
    d: usize,
    lib: &CellLibrary,
    clock_hz: f64,
    energy_per_switch_j: f64,
    activity: f64,
) -> Result<DistanceCost, Box<dyn std::error::Error + Send + Sync>> {
    let lattice = Lattice::build(d)?;
    let net = build_netlist(&lattice);
    let report = evaluate(&net.netlist, lib)?;
    let power_w = power_estimate(&net.netlist, lib, clock_hz, energy_per_switch_j, activity)?;
    Ok(DistanceCost { distance: d, gates: net.netlist.gate_counts(), report, power_w })
}
