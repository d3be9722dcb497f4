//! Property tests for the ideal class, Brandt matrix and curve invariant
//! code.

use proptest::prelude::*;
use proptest::sample::select;

use shimura_aut::arith::{
    cm_class_factor, cm_sign_excess, kronecker, local_sign, primes, ExtNat, Level,
};
use shimura_aut::quaternion::IdealClassSet;
use shimura_aut::shimura::{eichler_class_number, genus, CurveInvariants};

const ORDERS: [(u64, u64); 10] = [
    (2, 5),
    (2, 11),
    (3, 7),
    (5, 3),
    (7, 1),
    (11, 2),
    (13, 1),
    (19, 1),
    (23, 1),
    (41, 1),
];

fn good_primes(disc: u64, level: u64) -> Vec<u64> {
    primes()
        .filter(|p| (disc * level) % p != 0)
        .take(5)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn brandt_matrices_commute(order in select(&ORDERS[..]), a in 0usize..5, b in 0usize..5) {
        let (disc, level) = order;
        let set = IdealClassSet::new(disc, level).unwrap();
        let ps = good_primes(disc, level);
        let (ma, mb) = (set.brandt_matrix(ps[a]).unwrap(), set.brandt_matrix(ps[b]).unwrap());
        prop_assert!(ma.commutes_with(&mb));
        let h = set.len();
        for i in 0..h {
            prop_assert_eq!(ma.entries[i].iter().sum::<u64>(), ps[a] + 1);
        }
    }

    #[test]
    fn atkin_lehner_is_an_involution_commuting_with_brandt(order in select(&ORDERS[..]), a in 0usize..5) {
        let (disc, level) = order;
        let set = IdealClassSet::new(disc, level).unwrap();
        let m = set.brandt_matrix(good_primes(disc, level)[a]).unwrap();
        for w in set.atkin_lehner_all().unwrap() {
            prop_assert!(w.is_involution());
            prop_assert!(m.is_fixed_by(&w.perm));
            let weights = set.weights();
            prop_assert!((0..set.len()).all(|i| weights[w.perm[i]] == weights[i]));
        }
    }

    #[test]
    fn brandt_matrix_ignores_representatives(
        order in select(&ORDERS[..]),
        seed in any::<u64>(),
        shifts in prop::collection::vec(prop::array::uniform4(-3i128..=3), 16),
    ) {
        let (disc, level) = order;
        let set = IdealClassSet::new(disc, level).unwrap();
        let h = set.len();
        let mut perm: Vec<usize> = (0..h).collect();
        // Fisher-Yates driven by the seed
        let mut s = seed;
        for i in (1..h).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let o = set.order();
        let reps = perm
            .iter()
            .zip(&shifts)
            .map(|(&k, shift)| {
                let mut y = o.one();
                for (c, d) in y.iter_mut().zip(shift) {
                    *c += d;
                }
                if o.norm(&y) == 0 {
                    y = o.one();
                }
                set.classes()[k].right_mul_div(&y, 1, o).unwrap()
            })
            .collect();
        let copy = set.with_representatives(&perm, reps).unwrap();
        let p = good_primes(disc, level)[0];
        prop_assert_eq!(copy.brandt_matrix(p).unwrap(), set.brandt_matrix(p).unwrap().relabel(&perm));
        prop_assert_eq!(copy.brandt_matrix_by_neighbors(p).unwrap(), copy.brandt_matrix(p).unwrap());
    }
}

fn levels() -> impl Strategy<Value = Level> {
    (6u64..3000, 1u64..60).prop_filter_map("not a valid level", |(d, n)| Level::new(d, n).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn sign_excess_and_class_factor_are_pure(level in levels(), seed in any::<u64>()) {
        let mut ps = level.primes();
        let k = ps.len();
        ps.rotate_left(seed as usize % k);
        if seed & 1 == 1 {
            ps.reverse();
        }
        let q = primes().find(|&q| q > 2 && level.dn() % q != 0).unwrap();
        let twin = Level::new(level.d(), level.n() * q).unwrap();
        for m in level.atkin_lehner_indices() {
            let deltas: Vec<i64> = match m {
                1 => vec![-4],
                2 => vec![-4, -8],
                _ if m % 4 == 3 => vec![-(m as i64)],
                _ => vec![-4 * m as i64],
            };
            let oracle = deltas
                .iter()
                .filter_map(|&d| {
                    let mut count = 0;
                    for &p in &ps {
                        let eps = local_sign(&level, p).unwrap();
                        let s = kronecker(d, p);
                        if s == eps {
                            return None;
                        }
                        if s == -eps {
                            count += 1;
                        }
                    }
                    Some(count)
                })
                .min()
                .map_or(ExtNat::Infinite, ExtNat::Finite);
            prop_assert_eq!(cm_sign_excess(&level, m).unwrap(), oracle);
            // h depends only on m and the parity of DN
            prop_assert_eq!(cm_class_factor(&twin, m).unwrap(), cm_class_factor(&level, m).unwrap());
        }
    }

    #[test]
    fn genus_is_a_non_negative_integer(level in levels()) {
        let inv = CurveInvariants::new(&level).unwrap();
        prop_assert_eq!(inv.genus, genus(&level).unwrap());
        for &p in level.d_primes() {
            prop_assert!(eichler_class_number(level.d() / p, level.n()).unwrap() >= 1);
        }
    }
}
