use btwc_core::lattice::{Lattice, StabilizerType};
use btwc_core::matching::{brute_force_weight, decode, decode_with, Defect, Pairing, Solver, SpacetimeDefectSet};
use btwc_core::noise::stream_rng;
use rand::Rng;

fn random_set(rng: &mut impl Rng, ancillas: usize, window: usize, max: usize) -> Vec<Defect> {
    let k = rng.random_range(0..=max);
    (0..k).map(|_| Defect { ancilla: rng.random_range(0..ancillas), round: rng.random_range(0..window) }).collect()
}

#[test]
fn decode_weight_equals_enumeration() {
    for d in [3, 5, 7] {
        let l = Lattice::build(d).unwrap();
        let mut rng = stream_rng(21, d as u64);
        for kind in StabilizerType::BOTH {
            let g = l.checks(kind);
            for _ in 0..500 {
                let set = SpacetimeDefectSet::new(random_set(&mut rng, g.len(), d, 8), d, kind);
                let m = decode(g, &set);
                assert_eq!(m.total_weight, brute_force_weight(g, &set.defects), "{set:?}");
            }
        }
    }
}

#[test]
fn both_solvers_agree_on_larger_sets() {
    let l = Lattice::build(7).unwrap();
    let g = l.checks(StabilizerType::Z);
    let mut rng = stream_rng(22, 0);
    for _ in 0..100 {
        let set = SpacetimeDefectSet::new(random_set(&mut rng, g.len(), 7, 14), 7, StabilizerType::Z);
        let dp = decode_with(g, &set, Solver::SubsetDp);
        let bl = decode_with(g, &set, Solver::Blossom);
        assert_eq!(dp.total_weight, bl.total_weight);
    }
}

#[test]
fn matching_covers_every_defect_once() {
    let l = Lattice::build(9).unwrap();
    let g = l.checks(StabilizerType::X);
    let mut rng = stream_rng(23, 0);
    for _ in 0..50 {
        let set = SpacetimeDefectSet::new(random_set(&mut rng, g.len(), 9, 30), 9, StabilizerType::X);
        let m = decode(g, &set);
        let mut covered: Vec<Defect> = m
            .pairs
            .iter()
            .flat_map(|p| match *p {
                Pairing::Pair(a, b) => vec![a, b],
                Pairing::Boundary(a) => vec![a],
            })
            .collect();
        covered.sort_unstable();
        assert_eq!(covered, set.defects);
    }
}

#[test]
fn corrections_clear_data_error_syndromes() {
    // perfect measurements: one round of defects from random data errors
    let l = Lattice::build(7).unwrap();
    let mut rng = stream_rng(24, 0);
    for kind in StabilizerType::BOTH {
        let g = l.checks(kind);
        for _ in 0..200 {
            let errors: Vec<usize> = (0..rng.random_range(1..5)).map(|_| rng.random_range(0..l.num_data())).collect();
            let syndrome = g.syndrome_of(errors.iter().copied());
            let set = SpacetimeDefectSet::from_rounds(std::slice::from_ref(&syndrome), kind);
            let m = decode(g, &set);
            assert_eq!(g.syndrome_of(m.corrections.iter().copied()), syndrome);
        }
    }
}
