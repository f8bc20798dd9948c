//! AnyPrice share with entitlements.
//!
//! Goods: `min_p max { v(S) : p(S) <= b }`. Chores: `min_p max { v(S) : p(S) >= b }`.
//! Bundles `S` range over all subsets of the type set.
//!
//! The value is the smallest bundle value `τ` for which some price vector
//! pushes every bundle worth more than `τ` out of reach. For goods that means
//! `p(S) > b` for each inclusion-minimal `S` with `v(S) > τ`. The best
//! achievable `min_S p(S)` is `1 / Y`, where `Y` is the optimum of the
//! fractional packing of those sets into the normalization weights, and the
//! packing duals give the prices. For chores, `p(S) < b` is rewritten as
//! `p(T \ S) > 1 - b` over maximal `S`, which needs prices that sum to one
//! over types.

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::lp::solve_packing;
use super::{Certificate, ShareValue};
use crate::criteria::{infer_orientation, Orientation};
use crate::duality::dualize;
use crate::error::{Error, Result};
use crate::model::{Allocation, Bundle, Instance, ItemType};
use crate::rational::Rational;

/// Subset enumeration is `2^|T|`; beyond this it is refused.
pub const APS_MAX_TYPES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PriceNormalization {
    /// `sum_t p_t = 1`.
    #[default]
    PerType,
    /// `sum_t k_t p_t = 1`, each copy carrying the type's price. Goods only.
    PerCopy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriceVector {
    pub prices: Vec<Rational>,
    pub normalization: PriceNormalization,
}

impl PriceVector {
    pub fn price(&self, bundle: Bundle) -> Rational {
        bundle.iter().map(|t| &self.prices[t]).sum()
    }
}

pub fn check_entitlement(b: &Rational) -> Result<()> {
    if !b.is_positive() || *b > Rational::one() {
        return Err(Error::Entitlement(b.to_string()));
    }
    Ok(())
}

fn subset_values(instance: &Instance, agent: usize) -> Result<Vec<i128>> {
    let m = instance.type_count();
    if m > APS_MAX_TYPES {
        return Err(Error::Unsupported(format!(
            "APS enumerates all bundles; {m} types exceed the limit of {APS_MAX_TYPES}"
        )));
    }
    let v = instance.valuation(agent);
    let mut vals = vec![0i128; 1 << m];
    for mask in 1usize..1 << m {
        let low = mask.trailing_zeros() as usize;
        vals[mask] = vals[mask & (mask - 1)] + v.item(low);
    }
    Ok(vals)
}

/// The agent's best value under fixed prices: goods maximize over
/// `p(S) <= b`, chores over `p(S) >= b`.
pub fn aps_value_at_prices(
    instance: &Instance,
    agent: usize,
    b: &Rational,
    prices: &[Rational],
) -> Result<Rational> {
    instance.check_agent(agent)?;
    let orientation = infer_orientation(instance)?;
    let vals = subset_values(instance, agent)?;
    let mut best: Option<i128> = None;
    for (mask, &val) in vals.iter().enumerate() {
        let price: Rational = Bundle(mask as u64).iter().map(|t| &prices[t]).sum();
        let ok = match orientation {
            Orientation::Goods => price <= *b,
            Orientation::Chores => price >= *b,
        };
        if ok && best.is_none_or(|x| val > x) {
            best = Some(val);
        }
    }
    let best = best.ok_or_else(|| Error::Unsupported("no bundle meets the price condition".into()))?;
    Ok(instance.valuation(agent).to_rational(best))
}

pub fn aps_share(
    instance: &Instance,
    agent: usize,
    b: &Rational,
    normalization: PriceNormalization,
) -> Result<ShareValue> {
    instance.check_agent(agent)?;
    check_entitlement(b)?;
    let orientation = infer_orientation(instance)?;
    if orientation == Orientation::Chores && normalization == PriceNormalization::PerCopy {
        return Err(Error::Unsupported(
            "per-copy price normalization is only supported for goods".into(),
        ));
    }
    let vals = subset_values(instance, agent)?;
    let mut candidates = vals.clone();
    candidates.sort_unstable();
    candidates.dedup();

    let m = instance.type_count();
    let weights: Vec<Rational> = match normalization {
        PriceNormalization::PerType => vec![Rational::one(); m],
        PriceNormalization::PerCopy => instance
            .types()
            .iter()
            .map(|t| Rational::from_integer(BigInt::from(t.copies)))
            .collect(),
    };
    let budget = match orientation {
        Orientation::Goods => b.clone(),
        Orientation::Chores => Rational::one() - b,
    };
    let feasible = |tau: i128| -> Option<Vec<Rational>> {
        let sets = match orientation {
            Orientation::Goods => minimal_above(&vals, m, tau),
            Orientation::Chores => {
                let sets = complements_of_maximal_above(&vals, m, tau);
                if sets.iter().any(|s| s.is_empty()) {
                    return None;
                }
                sets
            }
        };
        if sets.is_empty() {
            if m == 0 {
                return Some(Vec::new());
            }
            let total: Rational = weights.iter().sum();
            return Some(vec![Rational::one() / total; m]);
        }
        let sol = solve_packing(&sets, &weights);
        (&sol.optimum * &budget < Rational::one())
            .then(|| sol.duals.iter().map(|q| q / &sol.optimum).collect())
    };

    // the top candidate is always feasible; search for the lowest feasible one
    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    let mut prices = feasible(candidates[hi]).expect("top threshold is feasible");
    while lo < hi {
        let mid = (lo + hi) / 2;
        match feasible(candidates[mid]) {
            Some(p) => {
                hi = mid;
                prices = p;
            }
            None => lo = mid + 1,
        }
    }
    let value = instance.valuation(agent).to_rational(candidates[hi]);
    let check = aps_value_at_prices(instance, agent, b, &prices)?;
    if check != value {
        return Err(Error::SolverInvariant(format!(
            "APS certificate re-evaluates to {check}, expected {value}"
        )));
    }
    Ok(ShareValue {
        value,
        certificate: Certificate::Prices(PriceVector {
            prices,
            normalization,
        }),
    })
}

fn minimal_above(vals: &[i128], m: usize, tau: i128) -> Vec<Bundle> {
    (0..vals.len())
        .filter(|&mask| {
            vals[mask] > tau && (0..m).all(|t| mask >> t & 1 == 0 || vals[mask ^ 1 << t] <= tau)
        })
        .map(|mask| Bundle(mask as u64))
        .collect()
}

fn complements_of_maximal_above(vals: &[i128], m: usize, tau: i128) -> Vec<Bundle> {
    (0..vals.len())
        .filter(|&mask| {
            vals[mask] > tau && (0..m).all(|t| mask >> t & 1 == 1 || vals[mask | 1 << t] <= tau)
        })
        .map(|mask| Bundle(mask as u64).complement(m))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApsDualityAgent {
    pub aps: Rational,
    pub dual_aps: Rational,
    /// `v_i(T)`.
    pub shift: Rational,
}

impl ApsDualityAgent {
    pub fn identity_holds(&self) -> bool {
        self.dual_aps == &self.aps - &self.shift
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApsDualityReport {
    pub agents: Vec<ApsDualityAgent>,
    pub fair: bool,
    pub dual_fair: bool,
}

impl ApsDualityReport {
    pub fn holds(&self) -> bool {
        self.fair == self.dual_fair && self.agents.iter().all(ApsDualityAgent::identity_holds)
    }
}

/// Compares APS fairness of `allocation` at entitlement `b` with APS fairness
/// of its dual at `1 - b`, and checks `APS_dual = APS - v_i(T)` per agent.
pub fn check_aps_entitlement_duality(
    instance: &Instance,
    allocation: &Allocation,
    b: &Rational,
) -> Result<ApsDualityReport> {
    check_entitlement(b)?;
    if *b == Rational::one() {
        return Err(Error::Entitlement(
            "1 (the dual entitlement 0 is outside (0, 1])".into(),
        ));
    }
    let n = instance.agents();
    if let Some(t) = instance.types().iter().find(|t| t.copies >= n) {
        return Err(Error::Unsupported(format!(
            "type `{}` has {} copies; APS duality needs fewer copies than agents",
            t.name, t.copies
        )));
    }
    instance.require_valid(allocation)?;
    let pair = dualize(instance, Some(allocation))?;
    let dual_alloc = pair.allocation.as_ref().expect("allocation given");
    let dual_b = Rational::one() - b;
    let mut agents = Vec::with_capacity(n);
    let (mut fair, mut dual_fair) = (true, true);
    for i in 0..n {
        let aps = aps_share(instance, i, b, PriceNormalization::PerType)?.value;
        let dual_aps = aps_share(&pair.instance, i, &dual_b, PriceNormalization::PerType)?.value;
        fair &= instance.value_of(i, allocation.bundle(i)) >= aps;
        dual_fair &= pair.instance.value_of(i, dual_alloc.bundle(i)) >= dual_aps;
        agents.push(ApsDualityAgent {
            aps,
            dual_aps,
            shift: instance.type_set_value(i),
        });
    }
    Ok(ApsDualityReport {
        agents,
        fair,
        dual_fair,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CopyShiftReport {
    pub before: Rational,
    pub after: Rational,
    pub added_value: Rational,
}

impl CopyShiftReport {
    pub fn holds(&self) -> bool {
        self.after == &self.before + &self.added_value
    }
}

/// Adds a good worth `value` to everyone in `n` copies and compares APS at
/// entitlement `1/n` before and after, with per-copy price normalization.
pub fn aps_copy_shift_check(instance: &Instance, agent: usize, value: &Rational) -> Result<CopyShiftReport> {
    if value.is_negative() || infer_orientation(instance)? != Orientation::Goods {
        return Err(Error::Unsupported(
            "the copy-shift check is defined for goods".into(),
        ));
    }
    let n = instance.agents();
    let b = Rational::new(BigInt::one(), BigInt::from(n));
    let before = aps_share(instance, agent, &b, PriceNormalization::PerCopy)?.value;

    let mut name = String::from("added");
    while instance.type_index(&name).is_some() {
        name.push('\'');
    }
    let mut types = instance.types().to_vec();
    types.push(ItemType::new(name, n));
    let values = instance
        .value_matrix()
        .iter()
        .map(|row| {
            let mut row = row.clone();
            row.push(value.clone());
            row
        })
        .collect();
    let extended = Instance::new(n, types, values)?;
    let after = aps_share(&extended, agent, &b, PriceNormalization::PerCopy)?.value;
    Ok(CopyShiftReport {
        before,
        after,
        added_value: value.clone(),
    })
}
