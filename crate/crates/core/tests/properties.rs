use proptest::prelude::*;
use ssa_lab::entropy::{conditional_entropy, mutual_information, t_gap, von_neumann_entropy};
use ssa_lab::qcorr::{concurrence, eof_two_qubit};
use ssa_lab::qmat::io::{density_to_json, parse_state};
use ssa_lab::qmat::{max_abs, StateSampler};
use ssa_lab::structure::{build_saturating, SaturatingSpec};

fn dims3() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=3, 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ssa_gap_nonnegative(dims in dims3(), seed in any::<u64>()) {
        let n: usize = dims.iter().product();
        let mut s = StateSampler::new(seed);
        let rank = 1 + s.index(n);
        let rho = s.density(&dims, rank).unwrap();
        let r = t_gap(&rho).unwrap();
        prop_assert!(r.t_a >= -1e-9);
    }

    #[test]
    fn entropy_bounds(dims in prop::collection::vec(1usize..=3, 2), seed in any::<u64>()) {
        let mut s = StateSampler::new(seed);
        let n: usize = dims.iter().product();
        let rho = s.density(&dims, n).unwrap();
        let sv = von_neumann_entropy(&rho);
        prop_assert!(sv >= -1e-12 && sv <= (n as f64).log2() + 1e-9);
        let i = mutual_information(&rho).unwrap();
        prop_assert!(i >= -1e-9);
        // S(A|B) >= -log2 d_A
        let c = conditional_entropy(&rho, 1).unwrap();
        prop_assert!(c >= -(dims[0] as f64).log2() - 1e-9);
    }

    #[test]
    fn partial_trace_composes(seed in any::<u64>()) {
        let mut s = StateSampler::new(seed);
        let rho = s.density(&[2, 3, 2], 4).unwrap();
        let direct = rho.partial_trace(&[0]).unwrap();
        let staged = rho.partial_trace(&[0, 1]).unwrap().partial_trace(&[0]).unwrap();
        prop_assert!(max_abs(&(direct.matrix() - staged.matrix())) <= 1e-12);
    }

    #[test]
    fn state_json_round_trip(seed in any::<u64>()) {
        let mut s = StateSampler::new(seed);
        let rho = s.density(&[2, 2], 3).unwrap();
        let back = parse_state(&density_to_json(&rho)).unwrap().into_density();
        prop_assert!(max_abs(&(back.matrix() - rho.matrix())) <= 1e-15);
    }

    #[test]
    fn eof_monotone_in_concurrence(seed in any::<u64>()) {
        let mut s = StateSampler::new(seed);
        let rho = s.density(&[2, 2], 2).unwrap();
        let c = concurrence(&rho).unwrap();
        let e = eof_two_qubit(&rho).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&c));
        prop_assert!((0.0..=1.0 + 1e-12).contains(&e));
        prop_assert!(e <= c + 1e-12);
    }

    #[test]
    fn built_specs_saturate(seed in any::<u64>()) {
        let mut s = StateSampler::new(seed);
        let spec = SaturatingSpec::random(&mut s, 36).unwrap();
        let rho = build_saturating(&spec).unwrap();
        prop_assert!(t_gap(&rho).unwrap().t_a.abs() <= 1e-8);
        let again = SaturatingSpec::from_json(&spec.to_json()).unwrap();
        prop_assert_eq!(again.blocks.len(), spec.blocks.len());
    }
}
