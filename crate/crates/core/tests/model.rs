mod common;

use std::collections::BTreeSet;

use common::*;
use fairdual::io::{allocation_to_string, instance_to_string, parse_allocation, parse_instance};
use fairdual::rational::{int, ratio};
use fairdual::search::{enumerate_allocations, plan_count};
use fairdual::{Allocation, AllocationViolation, Bundle, Error, Instance, ItemType};
use proptest::prelude::*;

fn no_efx() -> Instance {
    let types = [1, 2, 3, 9]
        .iter()
        .enumerate()
        .map(|(t, _)| ItemType::new(format!("t{}", t + 1), 2))
        .collect();
    let row = vec![int(1), int(2), int(3), int(9)];
    Instance::new(3, types, vec![row; 3]).unwrap()
}

#[test]
fn bundle_values() {
    let inst = no_efx();
    assert_eq!(inst.bundle_value(0, Bundle::EMPTY).unwrap(), int(0));
    assert_eq!(inst.bundle_value(2, Bundle::from_indices([0, 3])).unwrap(), int(10));
    assert!(matches!(inst.bundle_from_names(&["t9"]), Err(Error::UnknownType(_))));
}

#[test]
fn validation_examples() {
    let inst = no_efx();
    let ok = Allocation::from_indices(&[&[0, 1, 3], &[2, 3], &[0, 1, 2]]);
    assert!(inst.validate_allocation(&ok).is_ok());

    let over = Allocation::from_indices(&[&[0, 1, 3], &[2, 3], &[0, 1, 2, 3]]);
    let err = inst.validate_allocation(&over).unwrap_err();
    assert!(err.iter().any(|v| matches!(
        v,
        AllocationViolation::CopyCount { name, expected: 2, found: 3 } if name == "t4"
    )));

    let short = Allocation::from_indices(&[&[0, 1, 3], &[2, 3]]);
    let err = inst.validate_allocation(&short).unwrap_err();
    assert!(err.iter().any(|v| matches!(v, AllocationViolation::WrongBundleCount { .. })));
}

#[test]
fn leveled_examples() {
    let ones = Instance::new(2, (0..4).map(|t| ItemType::new(format!("t{t}"), 1)).collect(), vec![vec![int(1); 4]; 2]).unwrap();
    assert!(ones.is_leveled(0).unwrap());
    let inst = no_efx();
    assert!(!inst.is_leveled(0).unwrap());
    let neg = Instance::new(1, vec![ItemType::new("c", 1)], vec![vec![int(-1)]]).unwrap();
    assert!(matches!(neg.is_leveled(0), Err(Error::NegativeValues { .. })));
    // (m + 1) * min > m * max for values in [1, 1 + 1/|T|)
    let m = 5;
    let row: Vec<_> = (0..m).map(|k| ratio(100 * m + 19 * k, 100 * m)).collect();
    let inst = Instance::new(1, (0..m).map(|t| ItemType::new(format!("t{t}"), 1)).collect(), vec![row]).unwrap();
    assert!(inst.is_leveled(0).unwrap());
}

/// Leveled iff for every size m, every (m+1)-bundle beats every m-bundle.
fn leveled_oracle(inst: &Instance, agent: usize) -> bool {
    let m = inst.type_count();
    let subsets: Vec<Bundle> = (0u64..1 << m).map(Bundle).collect();
    subsets.iter().all(|&a| {
        subsets.iter().all(|&b| {
            a.len() <= b.len()
                || inst.bundle_value(agent, a).unwrap() > inst.bundle_value(agent, b).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn serialization_round_trip((inst, alloc) in with_allocation(
        instances(1..=4, 1..=5, 7, Sign::Goods, any_copies)
    )) {
        let back = parse_instance(&instance_to_string(&inst)).unwrap();
        prop_assert_eq!(&back.instance, &inst);
        prop_assert!(back.dropped.is_empty());
        let a = parse_allocation(&allocation_to_string(&inst, &alloc), &inst).unwrap();
        prop_assert_eq!(a, alloc);
    }

    #[test]
    fn rational_values_round_trip(
        n in 1usize..4,
        vals in proptest::collection::vec((-50i64..50, 1i64..12), 1..5),
    ) {
        let types = (0..vals.len()).map(|t| ItemType::new(format!("g{t}"), 1)).collect();
        let row: Vec<_> = vals.iter().map(|&(p, q)| ratio(p.abs(), q)).collect();
        let inst = Instance::new(n, types, vec![row; n]).unwrap();
        let back = parse_instance(&instance_to_string(&inst)).unwrap().instance;
        prop_assert_eq!(back, inst);
    }

    #[test]
    fn additivity(inst in goods(1..=3, 1..=6), a in any::<u64>(), b in any::<u64>()) {
        let full = inst.all_types().0;
        let (s1, s2) = (Bundle(a & full), Bundle(b & full & !a));
        for i in 0..inst.agents() {
            let whole = inst.bundle_value(i, s1.union(s2)).unwrap();
            prop_assert_eq!(whole, inst.bundle_value(i, s1).unwrap() + inst.bundle_value(i, s2).unwrap());
        }
    }

    #[test]
    fn leveled_matches_brute_force(inst in instances(1..=2, 1..=5, 6, Sign::Goods, single)) {
        for i in 0..inst.agents() {
            prop_assert_eq!(inst.is_leveled(i).unwrap(), leveled_oracle(&inst, i));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// `validate_allocation` accepts exactly the enumerated allocations.
    #[test]
    fn validation_matches_enumeration(
        inst in instances(1..=4, 1..=5, 3, Sign::Goods, any_copies),
        probes in proptest::collection::vec(proptest::collection::vec(any::<u64>(), 4), 40),
    ) {
        let all = enumerate_allocations(&inst, u64::MAX).unwrap();
        prop_assert_eq!(all.len() as u128, plan_count(&inst));
        let members: BTreeSet<Vec<u64>> = all.iter().map(|a| a.bundles.iter().map(|b| b.0).collect()).collect();
        prop_assert_eq!(members.len(), all.len());
        for a in &all {
            prop_assert!(inst.validate_allocation(a).is_ok());
        }
        let full = inst.all_types().0;
        for probe in probes {
            let a = Allocation::new(probe[..inst.agents()].iter().map(|&x| Bundle(x & full)).collect());
            let key: Vec<u64> = a.bundles.iter().map(|b| b.0).collect();
            prop_assert_eq!(inst.validate_allocation(&a).is_ok(), members.contains(&key));
        }
        let reference: BTreeSet<Vec<u64>> = all_allocations(&inst)
            .iter()
            .map(|a| to_allocation(a).bundles.iter().map(|b| b.0).collect())
            .collect();
        prop_assert_eq!(reference, members);
    }
}
