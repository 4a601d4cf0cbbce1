use std::sync::LazyLock;

use proptest::prelude::*;
use proptest::sample::Index;

use pgroup_core::constructors::{build_abelian, build_direct_product, build_semidirect_cyclic};
use pgroup_core::hall::hall_modulus;
use pgroup_core::series::*;
use pgroup_core::*;

const POOL: &[&str] = &[
    "cyclic p=2 m=4",
    "abelian p=2 type=[2,1,1]",
    "abelian p=3 type=[2,1]",
    "semidirect p=2 m=3 n=1 t=5",
    "semidirect p=2 m=3 n=2 t=3",
    "semidirect p=3 m=2 n=1 t=4",
    "semidirect p=5 m=2 n=1 t=6",
    "congruence p=2 dim=2 k=3",
    "congruence p=3 dim=2 k=2",
    "dihedral m=4",
    "quaternion m=3",
    "extraspecial p=3",
    "direct {quaternion m=3} {cyclic p=2 m=1}",
];

static GROUPS: LazyLock<Vec<GroupTable>> = LazyLock::new(|| {
    POOL.iter().map(|s| s.parse::<GroupSpec>().unwrap().build(&BuildOptions::default()).unwrap()).collect()
});

fn pick(g: &GroupTable, ix: &Index) -> Elem {
    Elem::new(ix.index(g.order()))
}

fn brute_commutator<'g>(a: &SubgroupSet<'g>, b: &SubgroupSet<'g>) -> SubgroupSet<'g> {
    let g = a.group();
    let comms: Vec<Elem> =
        a.elements().iter().flat_map(|&x| b.elements().iter().map(move |&y| g.commutator(x, y))).collect();
    generated(g, comms)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn conjugation_preserves_order(gi in 0..POOL.len(), x in any::<Index>(), y in any::<Index>()) {
        let g = &GROUPS[gi];
        let (x, y) = (pick(g, &x), pick(g, &y));
        prop_assert_eq!(g.element_order(g.conjugate(x, y)), g.element_order(x));
    }

    #[test]
    fn powers_compose(gi in 0..POOL.len(), x in any::<Index>(), k in 0i64..40) {
        let g = &GROUPS[gi];
        let x = pick(g, &x);
        let p = i64::from(g.prime());
        prop_assert_eq!(g.power(x, p * k), g.power(g.power(x, p), k));
        prop_assert_eq!(g.power(x, -k), g.inv(g.power(x, k)));
    }

    #[test]
    fn lagrange(gi in 0..POOL.len(), xs in proptest::collection::vec(any::<Index>(), 0..3)) {
        let g = &GROUPS[gi];
        let h = generated(g, xs.iter().map(|ix| pick(g, ix)));
        prop_assert_eq!(g.order() % h.size(), 0);
        prop_assert!(h.size().is_power_of_two() || g.prime() != 2);
        prop_assert!(prime_power_log_ok(h.size(), g.prime()));
    }

    #[test]
    fn generated_is_a_closure_operator(gi in 0..POOL.len(), xs in proptest::collection::vec(any::<Index>(), 0..3), y in any::<Index>()) {
        let g = &GROUPS[gi];
        let seeds: Vec<Elem> = xs.iter().map(|ix| pick(g, ix)).collect();
        let h = generated(g, seeds.iter().copied());
        prop_assert!(seeds.iter().all(|&s| h.contains(s)));
        prop_assert_eq!(&generated(g, h.elements().iter().copied()), &h);
        let bigger = generated(g, seeds.iter().copied().chain([pick(g, &y)]));
        prop_assert!(h.is_subgroup_of(&bigger));
        prop_assert!(h.as_set().is_subgroup());
    }

    #[test]
    fn commutator_subgroup_matches_brute_force(gi in 0..POOL.len(), xs in proptest::collection::vec(any::<Index>(), 1..3), ys in proptest::collection::vec(any::<Index>(), 1..3)) {
        let g = &GROUPS[gi];
        let a = generated(g, xs.iter().map(|ix| pick(g, ix)));
        let b = generated(g, ys.iter().map(|ix| pick(g, ix)));
        prop_assert_eq!(commutator_subgroup(&a, &b), brute_commutator(&a, &b));
    }

    #[test]
    fn hall_modulus_is_normal_and_monotone(gi in 0..POOL.len(), xs in proptest::collection::vec(any::<Index>(), 1..3), y in any::<Index>(), n in 0u32..4) {
        let g = &GROUPS[gi];
        let h = generated(g, xs.iter().map(|ix| pick(g, ix)));
        let k = generated(g, h.elements().iter().copied().chain([pick(g, &y)]));
        let nh = hall_modulus(&h, n);
        prop_assert!(nh.is_subgroup_of(&h));
        prop_assert!(is_normal(&h, &nh));
        prop_assert!(nh.is_subgroup_of(&hall_modulus(&k, n)));
    }

    #[test]
    fn omega_and_agemo_are_monotone(gi in 0..POOL.len()) {
        let g = &GROUPS[gi];
        let whole = SubgroupSet::whole(g);
        let e = g.exponent_log() as i64;
        for i in -1..=e + 1 {
            let (lo, hi) = (omega_set(&whole, i), omega_set(&whole, i + 1));
            prop_assert!(lo.elements().iter().all(|&x| hi.contains(x)));
            prop_assert!(omega_set(&whole, i).elements().iter().all(|&x| omega_subgroup(&whole, i).contains(x)));
        }
        prop_assert_eq!(omega_set(&whole, e).size(), g.order());
        for i in 0..=e as u32 {
            prop_assert!(power_subgroup(g, i + 1).is_subgroup_of(&power_subgroup(g, i)));
            prop_assert!(is_normal(&whole, &power_subgroup(g, i)));
        }
        prop_assert!(power_subgroup(g, e as u32).is_trivial());
    }

    #[test]
    fn power_sets_are_attained_in_powerful_groups(gi in 0..POOL.len(), i in 0u32..4) {
        let g = &GROUPS[gi];
        if is_powerful(g) {
            let mut pth: Vec<Elem> = g.elements().map(|x| g.power_p(x, i)).collect();
            pth.sort_unstable();
            pth.dedup();
            prop_assert_eq!(pth.len(), power_subgroup(g, i).size());
        }
    }

    #[test]
    fn abelian_duality(p in prop::sample::select(vec![2u32, 3, 5]), parts in proptest::collection::vec(1u32..3, 1..4), i in 0i64..4) {
        let total: u32 = parts.iter().sum();
        prop_assume!(u64::from(p).pow(total) <= 729);
        let g = build_abelian(p, &parts, &BuildOptions::default()).unwrap();
        let whole = SubgroupSet::whole(&g);
        prop_assert_eq!(omega_set(&whole, i).size() * power_subgroup(&g, i as u32).size(), g.order());
        prop_assert!(is_powerful(&g));
    }

    #[test]
    fn untwisted_semidirect_is_abelian(p in prop::sample::select(vec![2u32, 3]), m in 1u32..4, n in 1u32..3) {
        let opts = BuildOptions::default();
        let s = build_semidirect_cyclic(p, m, n, 1, &opts).unwrap();
        let a = build_abelian(p, &[m, n], &opts).unwrap();
        prop_assert!(s.is_abelian());
        prop_assert_eq!(s.order(), a.order());
        // both number elements a^i b^j in the same BFS order from generators (a, b)
        for x in s.elements() {
            prop_assert_eq!(s.word(x), a.word(x));
            for y in s.elements() {
                prop_assert_eq!(s.mul(x, y), a.mul(x, y));
            }
        }
    }

    #[test]
    fn direct_product_powerfulness(ai in 0..POOL.len(), bi in 0..POOL.len()) {
        let (a, b) = (&GROUPS[ai], &GROUPS[bi]);
        prop_assume!(a.prime() == b.prime() && a.order() * b.order() <= 1024);
        let build = |i: usize| POOL[i].parse::<GroupSpec>().unwrap().build(&BuildOptions::default()).unwrap();
        let d = build_direct_product(build(ai), build(bi), &BuildOptions::default()).unwrap();
        prop_assert_eq!(d.order(), a.order() * b.order());
        prop_assert_eq!(is_powerful(&d), is_powerful(a) && is_powerful(b));
    }
}

fn prime_power_log_ok(n: usize, p: u32) -> bool {
    kernel::prime_power_log(n, p).is_some()
}

#[test]
fn rebuild_is_deterministic() {
    for spec in POOL {
        let spec: GroupSpec = spec.parse().unwrap();
        let (a, b) = (spec.build(&BuildOptions::default()).unwrap(), spec.build(&BuildOptions::default()).unwrap());
        assert_eq!(a.order(), b.order());
        for x in a.elements() {
            assert_eq!(a.row(x), b.row(x));
            assert_eq!(a.word_string(x), b.word_string(x));
        }
    }
}
