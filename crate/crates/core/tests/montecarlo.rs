use btwc_core::compression::{compare, compare_with};
use btwc_core::montecarlo::{classify_cycles, estimate_ler, DecoderMode};

#[test]
fn noiseless_coverage_is_total() {
    for d in [3, 7, 11] {
        let s = classify_cycles(d, 0.0, 20_000, 1).unwrap();
        assert_eq!(s.coverage(), 1.0);
        assert_eq!(s.frac_all0, 1.0);
    }
}

#[test]
fn coverage_drops_with_noise_and_size() {
    let a = classify_cycles(5, 1e-3, 50_000, 2).unwrap().coverage();
    let b = classify_cycles(5, 1e-2, 50_000, 2).unwrap().coverage();
    let c = classify_cycles(11, 1e-2, 50_000, 2).unwrap().coverage();
    assert!(a > b && b > c, "{a} {b} {c}");
}

#[test]
fn clique_bits_are_complex_fraction_times_window() {
    for (d, p) in [(5, 5e-3), (7, 1e-2)] {
        let cycles = 40_000;
        let c = compare(d, p, cycles, 3).unwrap();
        let s = classify_cycles(d, p, cycles, 3).unwrap();
        assert_eq!(c.complex_cycles, s.counts.complex);
        let expected = s.frac_complex * ((d * d - 1) * d) as f64;
        assert!((c.clique.avg_bits_per_cycle - expected).abs() < 1e-9);
    }
}

#[test]
fn afs_gains_with_distance_while_clique_loses() {
    let p = 1e-3;
    let r: Vec<_> = [3, 5, 7].iter().map(|&d| compare_with(d, p, 100_000, 4, 1).unwrap()).collect();
    assert!(r[0].afs.reduction_vs_raw < r[1].afs.reduction_vs_raw);
    assert!(r[1].afs.reduction_vs_raw < r[2].afs.reduction_vs_raw);
    assert!(r[1].clique.reduction_vs_raw > r[2].clique.reduction_vs_raw);
}

#[test]
fn noiseless_blocks_never_fail() {
    for mode in [DecoderMode::Baseline, DecoderMode::CliquePlusBaseline] {
        let r = estimate_ler(3, 0.0, 1000, mode, 5).unwrap();
        assert_eq!(r.logical_failures, 0);
        assert_eq!(r.ler, 0.0);
    }
}
