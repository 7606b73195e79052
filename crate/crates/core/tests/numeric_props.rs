use modcat_core::bounds::{sylvester_bound, takenouchi_bound};
use modcat_core::numeric::{
    is_perfect_square, tuple_to_profile, verify_tuple, BigInt, DimensionProfile, ReciprocalTuple,
};
use num_traits::One;
use proptest::prelude::*;

fn wide() -> impl Strategy<Value = BigInt> {
    // up to 10^15, so squares reach 10^30
    (1u64..=1_000_000_000_000_000u64).prop_map(BigInt::from)
}

/// Profiles with `d^2 | dim` for every dimension; products keep that property.
const BASE: &[&[(u64, u64)]] = &[
    &[(1, 2)],
    &[(1, 3)],
    &[(1, 4), (2, 1)],
    &[(1, 4), (2, 2)],
    &[(1, 1), (2, 2), (3, 3)],
    &[(1, 9), (3, 2)],
];

fn product(a: &DimensionProfile, b: &DimensionProfile) -> DimensionProfile {
    let mut m = std::collections::BTreeMap::new();
    for (d, k) in a.multiplicities() {
        for (e, l) in b.multiplicities() {
            *m.entry(d * e).or_insert(0u64) += k * l;
        }
    }
    DimensionProfile::new(m).unwrap()
}

proptest! {
    #[test]
    fn squares_and_neighbours(m in wide()) {
        let sq = &m * &m;
        prop_assert!(is_perfect_square(&sq).unwrap());
        prop_assert!(!is_perfect_square(&(&sq + 1u32)).unwrap());
        if m > BigInt::one() {
            prop_assert!(!is_perfect_square(&(&sq - 1u32)).unwrap());
        }
    }

    #[test]
    fn profile_round_trip(picks in prop::collection::vec(0usize..BASE.len(), 1..4)) {
        let p = picks.iter().fold(DimensionProfile::from_pairs(&[(1, 1)]).unwrap(), |acc, &i| {
            product(&acc, &DimensionProfile::from_pairs(BASE[i]).unwrap())
        });
        let t = p.to_tuple(1).unwrap();
        prop_assert_eq!(t.len() as u64, p.rank());
        prop_assert_eq!(tuple_to_profile(&t).unwrap(), p);
    }

    #[test]
    fn sum_ignores_order(mut xs in prop::collection::vec(1u64..500, 1..8), seed in any::<u64>()) {
        let a = ReciprocalTuple::from_u64s(&xs, 1).unwrap();
        let n = xs.len();
        xs.rotate_left((seed as usize) % n);
        xs.reverse();
        let b = ReciprocalTuple::from_u64s(&xs, 1).unwrap();
        prop_assert_eq!(a.weighted_sum(), b.weighted_sum());
        prop_assert_eq!(a, b);
    }
}

#[test]
fn takenouchi_with_unit_start_is_sylvester() {
    for k in 1..=10 {
        assert_eq!(
            takenouchi_bound(1, k).unwrap(),
            sylvester_bound(k).unwrap(),
            "k = {k}"
        );
    }
}

#[test]
fn sylvester_values_from_recurrence() {
    let mut u = BigInt::one();
    for k in 1..=9u32 {
        if k > 1 {
            u = &u * (&u + 1u32);
        }
        assert_eq!(sylvester_bound(k).unwrap(), u);
    }
}

#[test]
fn verify_rejects_non_square_ratio() {
    // 1/2 + 1/3 + 1/6 = 1 but 6/2 is not a square
    let t = ReciprocalTuple::from_u64s(&[2, 3, 6], 1).unwrap();
    assert!(!verify_tuple(&t));
    let t = ReciprocalTuple::from_u64s(&[2, 8, 8, 8, 8], 1).unwrap();
    assert!(verify_tuple(&t));
}
