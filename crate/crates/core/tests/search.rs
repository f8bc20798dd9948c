mod common;

use common::*;
use fairdual::criteria::{is_fair, BaseCriterion, Criterion, Orientation};
use fairdual::rational::{int, ratio};
use fairdual::search::{
    check_chores_characterization, enumerate_allocations, exists_fair, max_nash_welfare,
    plan_count, EnumerationPlan, Notion, SearchOptions,
};
use fairdual::shares::{mms_all, prop_share};
use fairdual::{Allocation, Error, Instance, ItemType, Rational};
use proptest::prelude::*;

fn no_efx() -> Instance {
    let types = (1..=4).map(|t| ItemType::new(format!("t{t}"), 2)).collect();
    Instance::new(3, types, vec![vec![int(1), int(2), int(3), int(9)]; 3]).unwrap()
}

#[test]
fn plan_sizes() {
    assert_eq!(enumerate_allocations(&no_efx(), u64::MAX).unwrap().len(), 81);
    let one = Instance::new(5, vec![ItemType::new("g", 1)], vec![vec![int(1)]; 5]).unwrap();
    assert_eq!(plan_count(&one), 5);
    assert!(matches!(EnumerationPlan::new(&no_efx(), 80), Err(Error::BudgetExceeded { needed: 81, cap: 80 })));
}

#[test]
fn enumeration_order_is_lexicographic() {
    let inst = Instance::new(3, vec![ItemType::new("a", 1), ItemType::new("b", 2)], vec![vec![int(1), int(1)]; 3]).unwrap();
    let all = enumerate_allocations(&inst, u64::MAX).unwrap();
    let keys: Vec<Vec<u64>> = all
        .iter()
        .map(|a| {
            (0..2)
                .map(|t| (0..3).filter(|&i| a.bundle(i).contains(t)).fold(0u64, |m, i| m | 1 << i))
                .collect()
        })
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn no_efx_existence() {
    let inst = no_efx();
    let opts = SearchOptions::default();
    for base in [BaseCriterion::Efx, BaseCriterion::Efl] {
        let cert = exists_fair(&inst, &Notion::Envy(Criterion::goods(base)), &opts, false).unwrap();
        assert!(!cert.exists);
        assert_eq!((cert.checked, cert.plan_count), (81, 81));
    }
    let cert = exists_fair(&inst, &Notion::Envy(Criterion::goods(BaseCriterion::Efx).wc()), &opts, true).unwrap();
    assert!(cert.exists);
    let w = cert.witness.unwrap();
    assert!(is_fair(&inst, &w, Criterion::goods(BaseCriterion::Efx).wc()).unwrap().fair);
    let given = Allocation::from_indices(&[&[0, 1, 3], &[2, 3], &[0, 1, 2]]);
    assert!(is_fair(&inst, &given, Criterion::goods(BaseCriterion::Efx).wc()).unwrap().fair);
    assert!(cert.fair_count.unwrap() >= 1);
}

#[test]
fn characterization_on_dual_of_no_efx() {
    let types = (1..=4).map(|t| ItemType::new(format!("t{t}"), 1)).collect();
    let inst = Instance::new(3, types, vec![vec![int(-1), int(-2), int(-3), int(-9)]; 3]).unwrap();
    let r = check_chores_characterization(&inst, &SearchOptions::default()).unwrap();
    assert!(r.chores_efx && r.goods_efx_wc);
    let one = Instance::new(1, vec![ItemType::new("c", 1)], vec![vec![int(-2)]]).unwrap();
    assert!(check_chores_characterization(&one, &SearchOptions::default()).unwrap().holds());
}

#[test]
fn mnw_fixture() {
    let e = ratio(1, 1_000_000);
    let types = vec![ItemType::new("a", 2), ItemType::new("b", 1), ItemType::new("c", 1), ItemType::new("d", 1)];
    let values = vec![
        vec![int(1), int(1), int(1), e.clone()],
        vec![int(1), e.clone(), e.clone(), e.clone()],
        vec![e.clone(), e.clone(), e.clone(), int(1)],
    ];
    let inst = Instance::new(3, types, values).unwrap();
    let (a, nw) = max_nash_welfare(&inst, &SearchOptions::default()).unwrap();
    assert_eq!(a, Allocation::from_indices(&[&[0, 1, 2], &[0], &[3]]));
    assert_eq!(nw, int(3));
    let report = is_fair(&inst, &a, Criterion::goods(BaseCriterion::Ef1).wc()).unwrap();
    assert!(report.witnesses.iter().any(|w| (w.envious, w.envied) == (1, 0)));
}

#[test]
fn mnw_single_agent_takes_everything() {
    let inst = Instance::new(1, vec![ItemType::new("a", 1), ItemType::new("b", 1)], vec![vec![int(2), int(3)]]).unwrap();
    let (a, nw) = max_nash_welfare(&inst, &SearchOptions::default()).unwrap();
    assert_eq!(a, Allocation::from_indices(&[&[0, 1]]));
    assert_eq!(nw, int(5));
}

fn oracle_nw(inst: &Instance) -> Rational {
    all_allocations(inst)
        .iter()
        .map(|a| (0..inst.agents()).map(|i| value(inst, i, &a[i])).product::<Rational>())
        .max()
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn certificates_are_sound(inst in goods(1..=3, 1..=4), base in 0usize..4, wc in any::<bool>()) {
        let c = Criterion::goods(BaseCriterion::ALL[base]);
        let c = if wc { c.wc() } else { c };
        let opts = SearchOptions::default();
        let cert = exists_fair(&inst, &Notion::Envy(c), &opts, true).unwrap();
        prop_assert_eq!(cert.plan_count as u128, plan_count(&inst));
        prop_assert_eq!(cert.checked, cert.plan_count);
        let oracle: Vec<bool> = all_allocations(&inst)
            .iter()
            .map(|a| oracle_fair(BaseCriterion::ALL[base], false, wc, &inst, a))
            .collect();
        prop_assert_eq!(cert.fair_count.unwrap(), oracle.iter().filter(|&&f| f).count() as u64);
        match cert.witness {
            Some(w) => prop_assert!(is_fair(&inst, &w, c).unwrap().fair),
            None => prop_assert!(!cert.exists),
        }
        let quick = exists_fair(&inst, &Notion::Envy(c), &opts, false).unwrap();
        if quick.exists {
            prop_assert_eq!(quick.checked, quick.witness_index.unwrap() + 1);
        } else {
            prop_assert_eq!(quick.checked, quick.plan_count);
        }
    }

    #[test]
    fn witnesses_do_not_depend_on_workers(inst in goods(1..=3, 1..=5)) {
        let c = Notion::Envy(Criterion::goods(BaseCriterion::Efx));
        let one = exists_fair(&inst, &c, &SearchOptions::default().with_jobs(1).unwrap(), true).unwrap();
        let many = exists_fair(&inst, &c, &SearchOptions::default().with_jobs(4).unwrap(), true).unwrap();
        prop_assert_eq!(one, many);
        let m1 = max_nash_welfare(&inst, &SearchOptions::default().with_jobs(1).unwrap()).unwrap();
        let m4 = max_nash_welfare(&inst, &SearchOptions::default().with_jobs(3).unwrap()).unwrap();
        prop_assert_eq!(m1, m4);
    }

    #[test]
    fn mnw_matches_oracle(inst in goods(1..=3, 1..=4)) {
        let (a, nw) = max_nash_welfare(&inst, &SearchOptions::default()).unwrap();
        prop_assert!(inst.validate_allocation(&a).is_ok());
        prop_assert_eq!(&nw, &oracle_nw(&inst));
        let product: Rational = (0..inst.agents()).map(|i| inst.bundle_value(i, a.bundle(i)).unwrap()).product();
        prop_assert_eq!(product, nw);
    }

    #[test]
    fn share_notions(inst in goods(1..=3, 1..=4)) {
        let opts = SearchOptions::default();
        let mms = mms_all(&inst, &opts).unwrap();
        let cert = exists_fair(&inst, &Notion::Mms { alpha: int(1) }, &opts, true).unwrap();
        let expected = all_allocations(&inst)
            .iter()
            .filter(|a| (0..inst.agents()).all(|i| value(&inst, i, &a[i]) >= mms[i]))
            .count() as u64;
        prop_assert_eq!(cert.fair_count.unwrap(), expected);
        let prop = exists_fair(&inst, &Notion::Prop, &opts, true).unwrap();
        let expected = all_allocations(&inst)
            .iter()
            .filter(|a| (0..inst.agents()).all(|i| value(&inst, i, &a[i]) >= prop_share(&inst, i).unwrap()))
            .count() as u64;
        prop_assert_eq!(prop.fair_count.unwrap(), expected);
    }

    #[test]
    fn chores_characterization(inst in instances(3..=3, 1..=4, 6, Sign::Chores, single)) {
        let r = check_chores_characterization(&inst, &SearchOptions::default()).unwrap();
        prop_assert!(r.holds(), "{:?}", r);
    }
}

#[test]
fn notion_parsing() {
    assert_eq!(
        Notion::parse("EFX_WC", Orientation::Goods, None).unwrap(),
        Notion::Envy(Criterion::goods(BaseCriterion::Efx).wc())
    );
    assert_eq!(Notion::parse("mms", Orientation::Goods, Some(ratio(4, 11))).unwrap(), Notion::Mms { alpha: ratio(4, 11) });
    assert!(matches!(Notion::parse("efz", Orientation::Goods, None), Err(Error::UnknownNotion(_))));
}
