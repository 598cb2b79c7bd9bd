use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use quadapn::boolfun::Vbf;
use quadapn::equiv::{random_ea_transform, Fingerprint};
use quadapn::known::{kim_mapping, power_map};
use quadapn::linalg::BitMatrix;
use quadapn::search::SearchState;
use quadapn::switching::{BoolFn, SwitchingSystem};

fn table(n: usize) -> impl Strategy<Value = Vbf> {
    prop::collection::vec(0u32..(1 << n), 1 << n).prop_map(move |lut| Vbf::new(n, lut).unwrap())
}

fn invertible(n: usize) -> impl Strategy<Value = BitMatrix> {
    any::<u64>().prop_map(move |s| BitMatrix::random_invertible(n, &mut ChaCha8Rng::seed_from_u64(s)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rcf_is_similarity_invariant(m in invertible(6), p in invertible(6)) {
        let conj = p.mul(&m).mul(&p.inverse().unwrap());
        prop_assert_eq!(conj.rcf(), m.rcf());
        prop_assert_eq!(conj.invariant_factors(), m.invariant_factors());
        prop_assert_eq!(conj.order().unwrap(), m.order().unwrap());
    }

    #[test]
    fn matrix_order_is_exact(m in invertible(5)) {
        let k = m.order().unwrap();
        prop_assert!(m.pow(k).is_identity());
        for d in 1..k {
            if k % d == 0 {
                prop_assert!(!m.pow(d).is_identity());
            }
        }
    }

    #[test]
    fn anf_round_trip(f in table(5)) {
        prop_assert_eq!(f.anf().to_vbf(), f);
    }

    #[test]
    fn lut_text_round_trip(f in table(4)) {
        prop_assert_eq!(Vbf::from_lut_text(&f.to_lut_text()).unwrap(), f);
    }

    #[test]
    fn parseval_per_component(f in table(5), beta in 1u32..32) {
        let sum: i64 = f.walsh_component(beta).iter().map(|&w| (w as i64) * (w as i64)).sum();
        prop_assert_eq!(sum, 1 << 10);
    }

    #[test]
    fn spectra_invariant_under_affine_equivalence(f in table(5), a in invertible(5), b in invertible(5), c in 0u32..32, d in 0u32..32) {
        let g = Vbf::from_fn(5, |x| b.apply(f.eval(a.apply(x) ^ c)) ^ d).unwrap();
        prop_assert_eq!(g.extended_walsh_spectrum(), f.extended_walsh_spectrum());
        prop_assert_eq!(g.differential_spectrum(), f.differential_spectrum());
        prop_assert_eq!(g.algebraic_degree(), f.algebraic_degree());
    }

    #[test]
    fn lifo_replay_restores_state(ops in prop::collection::vec((1u32..16, 0u32..16), 1..16)) {
        let mut s = SearchState::new(4).unwrap();
        s.add_point(0, 0);
        let start = s.clone();
        let mut stack = Vec::new();
        for (x, y) in ops {
            if s.value(x).is_some() {
                continue;
            }
            if s.add_point(x, y) {
                stack.push(x);
                let (ddt, ctr, sum) = s.recompute();
                prop_assert_eq!(s.ddt_counters(), &ddt[..]);
                for u in 0..16usize {
                    if u.count_ones() >= 3 {
                        prop_assert_eq!((s.ctr()[u], s.sum()[u]), (ctr[u], sum[u]));
                    }
                }
            } else {
                s.remove_point(x);
            }
        }
        while let Some(x) = stack.pop() {
            s.remove_point(x);
        }
        prop_assert_eq!(s, start);
    }

    #[test]
    fn switching_solutions_form_a_subspace(v in 1u32..32, i in 0usize..64, j in 0usize..64) {
        let f = power_map(5, 3);
        let sys = SwitchingSystem::build(&f, v).unwrap();
        let basis = sys.solution_space().basis().to_vec();
        let mut a = basis[i % basis.len()].clone();
        a.xor_assign(&basis[j % basis.len()]);
        prop_assert!(sys.is_satisfied_by(&a));
        prop_assert!(a.switch(&f, v).is_apn());
    }

    #[test]
    fn random_boolean_f_is_solution_iff_apn(v in 1u32..16, bits in any::<u16>()) {
        let f = power_map(4, 3);
        let b = BoolFn::from_fn(4, |x| bits >> x & 1 == 1);
        let sys = SwitchingSystem::build(&f, v).unwrap();
        prop_assert_eq!(sys.is_satisfied_by(&b), b.switch(&f, v).is_apn());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn fingerprint_is_ea_invariant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for f in [power_map(6, 3), kim_mapping(), power_map(7, 5)] {
            let g = random_ea_transform(&f, &mut rng);
            prop_assert_eq!(Fingerprint::of(&g).unwrap(), Fingerprint::of(&f).unwrap());
        }
    }
}
