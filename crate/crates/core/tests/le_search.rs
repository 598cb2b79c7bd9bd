use std::collections::BTreeSet;
use std::time::Duration;

use quadapn::boolfun::Vbf;
use quadapn::field::Field;
use quadapn::known::power_map;
use quadapn::le::{commuting_set, deterministic_search, le_search, DetOptions, LeOptions, LeOutcome, OrbitPlan, Pruner, SeedLibrary};
use quadapn::linalg::{BitMatrix, GF2Poly};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn omega() -> BitMatrix {
    BitMatrix::companion(GF2Poly::from_bits(0b111)).unwrap()
}

/// Every quadratic APN table with F(0) = 0 satisfying F o A = B o F, by
/// trying all values on the orbit representatives without pruning.
fn brute_force(plan: &OrbitPlan) -> BTreeSet<Vec<u32>> {
    let n = plan.n();
    let size = 1u32 << n;
    let reps: Vec<u32> = plan.orbits().iter().map(|o| o[0]).filter(|&x| x != 0).collect();
    let mut out = BTreeSet::new();
    let mut choice = vec![0u32; reps.len()];
    'outer: loop {
        let mut lut = vec![u32::MAX; size as usize];
        lut[0] = 0;
        let mut ok = true;
        for (&x, &y) in reps.iter().zip(&choice) {
            let (mut xi, mut yi) = (x, y);
            for _ in 0..plan.orbit_length(x) {
                lut[xi as usize] = yi;
                xi = plan.a().apply(xi);
                yi = plan.b().apply(yi);
            }
            ok &= yi == y;
        }
        if ok {
            let f = Vbf::new(n, lut).unwrap();
            if plan.satisfied_by(&f) && f.is_apn() && f.algebraic_degree() <= 2 {
                out.insert(f.into_lut());
            }
        }
        for c in choice.iter_mut() {
            *c += 1;
            if *c < size {
                continue 'outer;
            }
            *c = 0;
        }
        break;
    }
    out
}

#[test]
fn unpruned_deterministic_matches_brute_force() {
    let a = BitMatrix::block_diag(&[omega(), omega()]).unwrap();
    let seeds = SeedLibrary::builtin().unwrap();
    let mut total = 0;
    for b in [BitMatrix::identity(4), a, a.mul(&a)] {
        let plan = OrbitPlan::new(a, b).unwrap();
        let oracle = brute_force(&plan);
        let opts = DetOptions { prune: false, ..DetOptions::default() };
        let r = deterministic_search(&plan, &seeds, &opts).unwrap();
        assert!(r.complete);
        let found: BTreeSet<Vec<u32>> = r.functions.iter().map(|(_, f)| f.lut().to_vec()).collect();
        assert_eq!(found.len(), r.functions.len());
        assert_eq!(found, oracle);
        total += oracle.len();
    }
    // x -> x^3 on GF(16) commutes with multiplication by a cube root of unity
    assert!(total > 0);
}

#[test]
fn pruning_keeps_one_per_orbit() {
    let a = BitMatrix::block_diag(&[omega(), omega()]).unwrap();
    let b = BitMatrix::identity(4);
    let plan = OrbitPlan::new(a, b).unwrap();
    let seeds = SeedLibrary::builtin().unwrap();
    let unpruned: BTreeSet<Vec<u32>> = deterministic_search(&plan, &seeds, &DetOptions { prune: false, ..DetOptions::default() })
        .unwrap()
        .functions
        .into_iter()
        .map(|(_, f)| f.into_lut())
        .collect();
    let opts = DetOptions::default();
    let pruned = deterministic_search(&plan, &seeds, &opts).unwrap();
    assert!(pruned.complete);
    assert!(!pruned.functions.is_empty());
    assert!(pruned.functions.len() < unpruned.len());

    // same pairs as the search builds from its rng seed
    let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed);
    let ca = commuting_set(&a, plan.fix_a(), opts.samples, &mut rng);
    let cb = commuting_set(&b, plan.fix_b(), opts.samples, &mut rng);
    let pruner = Pruner::new(&ca, &cb, opts.cross_pairs, &mut rng);
    let mut closure: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut frontier: Vec<Vbf> = pruned.functions.into_iter().map(|(_, f)| f).collect();
    while let Some(f) = frontier.pop() {
        if closure.insert(f.lut().to_vec()) {
            frontier.extend(pruner.transforms(&f));
        }
    }
    assert_eq!(closure, unpruned);
}

#[test]
fn seeded_restriction_equals_chosen_seed() {
    // x -> x^4 on GF(16) commutes with x^3 and fixes GF(4), so k = 2
    let field = Field::with_default_modulus(4).unwrap();
    let a = BitMatrix::from_linear_fn(4, |x| field.pow(x, 4));
    let plan = OrbitPlan::new(a, a).unwrap();
    assert!(plan.satisfied_by(&power_map(4, 3)));
    assert_eq!(plan.seed_dim(), Some(2));
    let seeds = SeedLibrary::builtin().unwrap();
    let opts = LeOptions { budget: Some(Duration::from_secs(10)), max_restarts: 5, randomize_basis: false };
    for rng_seed in 0..20 {
        let outcome = le_search(&plan, &seeds, rng_seed, &opts).unwrap();
        let LeOutcome::Found { f, seed_id, .. } = outcome else {
            panic!("rng seed {rng_seed}: {outcome:?}");
        };
        let g = &seeds.get(2)[seed_id.unwrap()];
        for c in 0..4 {
            assert_eq!(f.eval(plan.fix_a().combine(c)), plan.fix_b().combine(g.eval(c)));
        }
        assert!(plan.satisfied_by(&f) && f.is_apn() && f.algebraic_degree() <= 2);
    }
}

#[test]
fn forced_point_when_fix_a_has_two_elements() {
    // |Fix_A| = 2 < |Fix_B| = 8 on n = 5
    let a = BitMatrix::block_diag(&[omega(), omega(), BitMatrix::identity(1)]).unwrap();
    let b = BitMatrix::block_diag(&[omega(), BitMatrix::identity(3)]).unwrap();
    let plan = OrbitPlan::new(a, b).unwrap();
    assert_eq!((plan.fix_a().size(), plan.fix_b().size()), (2, 8));
    assert_eq!(plan.seed_dim(), None);
    let x = plan.fix_a().basis()[0];
    assert!(plan.forced().contains(&(x, 0)));
    assert!(!plan.position_order().contains(&x));
}

#[test]
fn moving_orbits_first_when_fix_a_between() {
    // |Fix_A| = 4 < |Fix_B| = 16 on n = 6
    let a = BitMatrix::block_diag(&[omega(), omega(), BitMatrix::identity(2)]).unwrap();
    let b = BitMatrix::block_diag(&[omega(), BitMatrix::identity(4)]).unwrap();
    let plan = OrbitPlan::new(a, b).unwrap();
    assert_eq!((plan.fix_a().size(), plan.fix_b().size()), (4, 16));
    let order = plan.position_order();
    let first_fixed = order.iter().position(|&x| plan.orbit_length(x) == 1).unwrap();
    assert!(order[first_fixed..].iter().all(|&x| plan.orbit_length(x) == 1));
    assert!(order[..first_fixed].iter().all(|&x| plan.orbit_length(x) > 1));
}

#[test]
fn plan_rejects_trivial_and_singular() {
    assert!(OrbitPlan::new(BitMatrix::identity(4), BitMatrix::identity(4)).is_err());
    assert!(OrbitPlan::new(BitMatrix::zero(4), BitMatrix::identity(4)).is_err());
    assert!(OrbitPlan::new(BitMatrix::identity(4), BitMatrix::identity(5)).is_err());
}
