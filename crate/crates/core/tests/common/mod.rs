#![allow(dead_code)]

//! Strategies and a slow reference oracle shared by the integration tests.
//!
//! The oracle works on plain rationals and `BTreeSet` bundles and follows the
//! textual definitions directly, with chores criteria written out rather than
//! derived through the complement.

use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use fairdual::criteria::BaseCriterion;
use fairdual::random::{random_allocation, stream};
use fairdual::rational::int;
use fairdual::{Allocation, Bundle, Instance, ItemType, Rational};
use proptest::collection::vec;
use proptest::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Goods,
    Chores,
}

/// Instances with integer values in `0..=max` (negated for chores) and
/// copies in `copies(n)`.
pub fn instances(
    agents: RangeInclusive<usize>,
    types: RangeInclusive<usize>,
    max: i64,
    sign: Sign,
    copies: fn(usize) -> RangeInclusive<usize>,
) -> impl Strategy<Value = Instance> {
    (agents, types)
        .prop_flat_map(move |(n, m)| {
            (
                Just(n),
                vec(copies(n), m),
                vec(vec(0..=max, m), n),
            )
        })
        .prop_map(move |(n, ks, rows)| {
            let types = ks
                .iter()
                .enumerate()
                .map(|(t, &k)| ItemType::new(format!("t{}", t + 1), k))
                .collect();
            let values = rows
                .into_iter()
                .map(|row| {
                    row.into_iter()
                        .map(|x| int(if sign == Sign::Chores { -x } else { x }))
                        .collect()
                })
                .collect();
            Instance::new(n, types, values).unwrap()
        })
}

pub fn any_copies(n: usize) -> RangeInclusive<usize> {
    1..=n
}

pub fn single(_: usize) -> RangeInclusive<usize> {
    1..=1
}

pub fn below_agents(n: usize) -> RangeInclusive<usize> {
    1..=n.saturating_sub(1).max(1)
}

pub fn goods(agents: RangeInclusive<usize>, types: RangeInclusive<usize>) -> impl Strategy<Value = Instance> {
    instances(agents, types, 4, Sign::Goods, any_copies)
}

pub fn with_allocation<S: Strategy<Value = Instance>>(s: S) -> impl Strategy<Value = (Instance, Allocation)> {
    (s, any::<u64>()).prop_map(|(inst, seed)| {
        let a = random_allocation(&mut stream(seed, 0), &inst);
        (inst, a)
    })
}

pub type Set = BTreeSet<usize>;

pub fn sets(a: &Allocation) -> Vec<Set> {
    a.bundles.iter().map(|b| b.iter().collect()).collect()
}

pub fn value(inst: &Instance, agent: usize, s: &Set) -> Rational {
    s.iter().map(|&t| inst.value(agent, t).clone()).sum()
}

/// Every exclusive allocation, built copy by copy.
pub fn all_allocations(inst: &Instance) -> Vec<Vec<Set>> {
    fn rec(inst: &Instance, t: usize, cur: &mut Vec<Set>, out: &mut Vec<Vec<Set>>) {
        if t == inst.type_count() {
            out.push(cur.clone());
            return;
        }
        let n = inst.agents();
        for mask in 0u64..1 << n {
            if mask.count_ones() as usize != inst.copies(t) {
                continue;
            }
            for (i, set) in cur.iter_mut().enumerate() {
                if mask >> i & 1 == 1 {
                    set.insert(t);
                }
            }
            rec(inst, t + 1, cur, out);
            for (i, set) in cur.iter_mut().enumerate() {
                if mask >> i & 1 == 1 {
                    set.remove(&t);
                }
            }
        }
    }
    let mut out = Vec::new();
    rec(inst, 0, &mut vec![Set::new(); inst.agents()], &mut out);
    out
}

pub fn to_allocation(sets: &[Set]) -> Allocation {
    Allocation::new(sets.iter().map(|s| Bundle::from_indices(s.iter().copied())).collect())
}

fn without(s: &Set, g: usize) -> Set {
    let mut s = s.clone();
    s.remove(&g);
    s
}

/// Goods criteria read off the definitions: agent `i` holds `own` and looks
/// at `other`.
fn goods_ok(base: BaseCriterion, inst: &Instance, i: usize, own: &Set, other: &Set) -> bool {
    let v = |s: &Set| value(inst, i, s);
    let mine = v(own);
    match base {
        BaseCriterion::Ef => mine >= v(other),
        BaseCriterion::Ef1 => other.is_empty() || other.iter().any(|&g| mine >= v(&without(other, g))),
        BaseCriterion::Efx => other.iter().all(|&g| mine >= v(&without(other, g))),
        BaseCriterion::Efl => {
            other.len() <= 1
                || other.iter().any(|&g| {
                    mine >= v(&without(other, g)) && mine >= inst.value(i, g).clone()
                })
        }
    }
}

/// Chores criteria written directly: a chore is dropped from the agent's own
/// bundle.
fn chores_ok(base: BaseCriterion, inst: &Instance, i: usize, own: &Set, other: &Set) -> bool {
    let v = |s: &Set| value(inst, i, s);
    let theirs = v(other);
    match base {
        BaseCriterion::Ef => v(own) >= theirs,
        BaseCriterion::Ef1 => own.is_empty() || own.iter().any(|&c| v(&without(own, c)) >= theirs),
        BaseCriterion::Efx => own.iter().all(|&c| v(&without(own, c)) >= theirs),
        BaseCriterion::Efl => {
            own.len() <= 1
                || own.iter().any(|&c| {
                    v(&without(own, c)) >= theirs && inst.value(i, c).clone() >= theirs
                })
        }
    }
}

pub fn oracle_pair(base: BaseCriterion, chores: bool, wc: bool, inst: &Instance, i: usize, own: &Set, other: &Set) -> bool {
    let (own, other) = if wc {
        (own - other, other - own)
    } else {
        (own.clone(), other.clone())
    };
    if chores {
        chores_ok(base, inst, i, &own, &other)
    } else {
        goods_ok(base, inst, i, &own, &other)
    }
}

pub fn oracle_fair(base: BaseCriterion, chores: bool, wc: bool, inst: &Instance, a: &[Set]) -> bool {
    let n = a.len();
    (0..n).all(|i| (0..n).all(|j| i == j || oracle_pair(base, chores, wc, inst, i, &a[i], &a[j])))
}

pub fn oracle_mms(inst: &Instance, agent: usize) -> Rational {
    all_allocations(inst)
        .iter()
        .map(|a| a.iter().map(|s| value(inst, agent, s)).min().unwrap())
        .max()
        .unwrap()
}

pub fn oracle_prop(inst: &Instance, agent: usize) -> Rational {
    let total: Rational = (0..inst.type_count())
        .map(|t| inst.value(agent, t) * int(inst.copies(t) as i64))
        .sum();
    total / int(inst.agents() as i64)
}
