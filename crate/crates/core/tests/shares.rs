mod common;

use common::*;
use fairdual::rational::{int, ratio};
use fairdual::search::SearchOptions;
use fairdual::shares::{
    aps_copy_shift_check, aps_share, aps_value_at_prices, check_alpha_mms,
    check_aps_entitlement_duality, mms_share, prop_share, tps_share, truncated_mean,
    verify_mms_lower_bound, Certificate, MmsSource, PriceNormalization, Verdict,
};
use fairdual::{Allocation, Error, Instance, ItemType, Rational};
use proptest::prelude::*;

fn identical(n: usize, copies: usize, vals: &[i64]) -> Instance {
    let types = (0..vals.len()).map(|t| ItemType::new(format!("t{t}"), copies)).collect();
    let row: Vec<Rational> = vals.iter().map(|&v| int(v)).collect();
    Instance::new(n, types, vec![row; n]).unwrap()
}

#[test]
fn prop_examples() {
    assert_eq!(prop_share(&identical(4, 3, &[-2, -3, -4, -5, -6]), 0).unwrap(), int(-15));
    assert_eq!(prop_share(&identical(4, 1, &[1, 3, 4, 6, 7, 19]), 0).unwrap(), int(10));
    assert_eq!(prop_share(&identical(1, 1, &[3, 4]), 0).unwrap(), int(7));
}

#[test]
fn tps_examples() {
    assert_eq!(tps_share(&identical(3, 1, &[2, 3, 5]), 0).unwrap().value, int(2));
    let mut types: Vec<_> = (0..3).map(|t| ItemType::new(format!("t{t}"), 1)).collect();
    types.push(ItemType::new("w", 3));
    let row = vec![int(2), int(3), int(5), int(3)];
    let inst = Instance::new(3, types, vec![row; 3]).unwrap();
    assert_eq!(tps_share(&inst, 0).unwrap().value, ratio(19, 3));
    assert_eq!(tps_share(&identical(4, 1, &[1, 3, 4, 6, 7, 19]), 0).unwrap().value, int(7));
}

#[test]
fn mms_examples() {
    let inst = identical(3, 2, &[1, 2, 3, 9]);
    let share = mms_share(&inst, 0, &SearchOptions::default()).unwrap();
    assert_eq!(share.value, int(6));
    assert_eq!(share.value, oracle_mms(&inst, 0));
    let Certificate::Allocation(w) = &share.certificate else { panic!("allocation certificate") };
    assert_eq!(verify_mms_lower_bound(&inst, 0, w).unwrap(), int(6));
    assert_eq!(mms_share(&identical(1, 1, &[2, 5]), 0, &SearchOptions::default()).unwrap().value, int(7));
}

#[test]
fn mms_respects_the_budget() {
    let inst = identical(4, 2, &[1; 12]);
    let opts = SearchOptions::default().with_cap(1000);
    assert!(matches!(mms_share(&inst, 0, &opts), Err(Error::BudgetExceeded { .. })));
}

#[test]
fn mnw_fixture_agent3_mms_below_prop() {
    let e = ratio(1, 1_000_000);
    let types = vec![ItemType::new("a", 2), ItemType::new("b", 1), ItemType::new("c", 1), ItemType::new("d", 1)];
    let values = vec![
        vec![int(1), int(1), int(1), e.clone()],
        vec![int(1), e.clone(), e.clone(), e.clone()],
        vec![e.clone(), e.clone(), e.clone(), int(1)],
    ];
    let inst = Instance::new(3, types, values).unwrap();
    let mms = mms_share(&inst, 2, &SearchOptions::default()).unwrap().value;
    assert_eq!(mms, oracle_mms(&inst, 2));
    assert!(mms <= prop_share(&inst, 2).unwrap());
}

#[test]
fn certificate_allocation_is_one_mms() {
    let inst = identical(3, 2, &[1, 2, 3, 9]);
    let share = mms_share(&inst, 1, &SearchOptions::default()).unwrap();
    let Certificate::Allocation(w) = share.certificate else { panic!() };
    let report = check_alpha_mms(&inst, &w, &int(1), MmsSource::LowerBound(&w)).unwrap();
    assert_ne!(report.agents[1].verdict, Verdict::Fail);
}

#[test]
fn aps_examples() {
    let chores = identical(4, 3, &[-2, -3, -4, -5, -6]);
    let b = ratio(3, 4);
    let share = aps_share(&chores, 0, &b, PriceNormalization::PerType).unwrap();
    assert_eq!(share.value, int(-16));
    let Certificate::Prices(p) = &share.certificate else { panic!("price certificate") };
    assert_eq!(p.prices.iter().sum::<Rational>(), int(1));
    assert_eq!(aps_value_at_prices(&chores, 0, &b, &p.prices).unwrap(), int(-16));

    let single = identical(1, 1, &[5]);
    assert_eq!(aps_share(&single, 0, &int(1), PriceNormalization::PerType).unwrap().value, int(5));

    let goods = identical(4, 1, &[2, 3, 4, 5, 6]);
    assert_eq!(aps_share(&goods, 0, &ratio(1, 4), PriceNormalization::PerType).unwrap().value, int(4));
}

#[test]
fn aps_rejects_bad_entitlements() {
    let goods = identical(2, 1, &[1, 2]);
    for b in [int(0), ratio(3, 2), int(-1)] {
        assert!(matches!(aps_share(&goods, 0, &b, PriceNormalization::PerType), Err(Error::Entitlement(_))));
    }
}

#[test]
fn aps_copy_shift_examples() {
    let inst = identical(2, 1, &[1, 1]);
    let r = aps_copy_shift_check(&inst, 0, &int(3)).unwrap();
    assert!(r.holds());
    assert_eq!(&r.after - &r.before, int(3));
    assert!(aps_copy_shift_check(&inst, 0, &int(0)).unwrap().holds());
}

proptest! {
    #[test]
    fn tps_fixed_point_and_prop_bound(inst in goods(1..=4, 1..=6)) {
        for i in 0..inst.agents() {
            let tps = tps_share(&inst, i).unwrap().value;
            prop_assert_eq!(truncated_mean(&inst, i, &tps), tps.clone());
            prop_assert!(tps <= prop_share(&inst, i).unwrap());
            // largest fixed point: just above it the mean falls short
            let above = &tps + ratio(1, 1000);
            prop_assert!(truncated_mean(&inst, i, &above) < above);
        }
    }

    #[test]
    fn chores_tps_below_prop(inst in instances(1..=4, 1..=6, 6, Sign::Chores, any_copies)) {
        for i in 0..inst.agents() {
            let tps = tps_share(&inst, i).unwrap().value;
            let prop = prop_share(&inst, i).unwrap();
            prop_assert!(tps <= prop);
            let worst = (0..inst.type_count()).map(|t| inst.value(i, t).clone()).min().unwrap();
            prop_assert_eq!(tps, prop.min(worst));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mms_matches_oracle_and_prop(inst in goods(1..=3, 1..=4)) {
        let opts = SearchOptions::default();
        for i in 0..inst.agents() {
            let share = mms_share(&inst, i, &opts).unwrap();
            prop_assert_eq!(&share.value, &oracle_mms(&inst, i));
            prop_assert!(share.value <= prop_share(&inst, i).unwrap());
            let Certificate::Allocation(w) = &share.certificate else { panic!() };
            prop_assert_eq!(verify_mms_lower_bound(&inst, i, w).unwrap(), share.value);
        }
    }

    #[test]
    fn chores_mms_certificate(inst in instances(1..=3, 1..=4, 4, Sign::Chores, any_copies)) {
        for i in 0..inst.agents() {
            let share = mms_share(&inst, i, &SearchOptions::default()).unwrap();
            prop_assert_eq!(&share.value, &oracle_mms(&inst, i));
        }
    }

    #[test]
    fn aps_monotone_in_entitlement(inst in goods(1..=3, 1..=5), a in 1i64..6, b in 1i64..6) {
        let (lo, hi) = (a.min(b), a.max(b));
        for i in 0..inst.agents() {
            let x = aps_share(&inst, i, &ratio(lo, 6), PriceNormalization::PerType).unwrap().value;
            let y = aps_share(&inst, i, &ratio(hi, 6), PriceNormalization::PerType).unwrap().value;
            prop_assert!(x <= y);
        }
    }

    #[test]
    fn aps_below_prop(inst in goods(1..=4, 1..=5)) {
        let n = inst.agents() as i64;
        for norm in [PriceNormalization::PerType, PriceNormalization::PerCopy] {
            for i in 0..inst.agents() {
                let share = aps_share(&inst, i, &ratio(1, n), norm).unwrap();
                prop_assert!(share.value <= prop_share(&inst, i).unwrap(), "{:?}", norm);
                let Certificate::Prices(p) = &share.certificate else { panic!() };
                prop_assert_eq!(aps_value_at_prices(&inst, i, &ratio(1, n), &p.prices).unwrap(), share.value);
            }
        }
    }

    #[test]
    fn aps_entitlement_duality(
        (inst, a) in with_allocation(instances(3..=3, 1..=4, 4, Sign::Goods, below_agents)),
        b in prop_oneof![Just(ratio(1, 4)), Just(ratio(1, 3)), Just(ratio(1, 2))],
        chores in any::<bool>(),
    ) {
        let (inst, a) = if chores {
            let p = fairdual::duality::dualize(&inst, Some(&a)).unwrap();
            (p.instance, p.allocation.unwrap())
        } else {
            (inst, a)
        };
        let r = check_aps_entitlement_duality(&inst, &a, &b).unwrap();
        prop_assert!(r.holds(), "{:?}", r);
    }

    #[test]
    fn aps_copy_shift(inst in goods(1..=3, 1..=4), value in 0i64..6) {
        for i in 0..inst.agents() {
            let r = aps_copy_shift_check(&inst, i, &int(value)).unwrap();
            prop_assert!(r.holds(), "{:?}", r);
        }
    }

    #[test]
    fn alpha_mms_exact_vs_lower_bound((inst, a) in with_allocation(goods(1..=3, 1..=4))) {
        let opts = SearchOptions::default();
        let exact = check_alpha_mms(&inst, &a, &int(1), MmsSource::Exact(&opts)).unwrap();
        for (i, agent) in exact.agents.iter().enumerate() {
            prop_assert_eq!(&agent.mms, &oracle_mms(&inst, i));
            let ok = agent.value >= agent.mms;
            prop_assert_eq!(agent.verdict, if ok { Verdict::Pass } else { Verdict::Fail });
        }
        let witness = Allocation::new(a.bundles.clone());
        let bounded = check_alpha_mms(&inst, &a, &int(1), MmsSource::LowerBound(&witness)).unwrap();
        prop_assert_ne!(bounded.verdict(), Verdict::Pass);
    }
}
