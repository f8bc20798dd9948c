//! EFX_WC for goods with copies when every agent has leveled preferences
//! (a larger bundle is always strictly better).
//!
//! Round robin leaves bundle sizes at most one apart. While some agent `i`
//! EFX_WC-envies some `j`, `i` sits on the lower level; it trades its worst
//! good outside `A_j` for its best good in `A_j \ A_i`. Sizes are unchanged
//! and the rank sum `ψ` of lower-level agents strictly rises, so at most
//! `n |T|^2` swaps happen.

use crate::criteria::{check_orientation, violation, BaseCriterion, Criterion, Orientation};
use crate::error::{Error, Result};
use crate::model::{Allocation, Bundle, Instance};

/// Gives type `t`'s copies to the next `k_t` agents, cyclically, continuing
/// from where the previous type stopped.
pub fn round_robin_init(instance: &Instance) -> Allocation {
    let n = instance.agents();
    let mut bundles = vec![Bundle::EMPTY; n];
    let mut next = 0;
    for (t, ty) in instance.types().iter().enumerate() {
        for _ in 0..ty.copies {
            bundles[next] = bundles[next].with(t);
            next = (next + 1) % n;
        }
    }
    Allocation::new(bundles)
}

/// `ω_i`: ranks `1..=|T|` by ascending value, ties by type index.
fn ranks(instance: &Instance, agent: usize) -> Vec<u64> {
    let v = instance.valuation(agent);
    let mut order: Vec<usize> = (0..instance.type_count()).collect();
    order.sort_by_key(|&t| (v.item(t), t));
    let mut rank = vec![0; order.len()];
    for (pos, t) in order.into_iter().enumerate() {
        rank[t] = pos as u64 + 1;
    }
    rank
}

fn levels(allocation: &Allocation) -> Result<Option<usize>> {
    let mut sizes: Vec<usize> = allocation.bundles.iter().map(|b| b.len()).collect();
    sizes.sort_unstable();
    sizes.dedup();
    match sizes.len() {
        0 | 1 => Ok(None),
        2 => Ok(Some(sizes[0])),
        k => Err(Error::TooManyLevels(k)),
    }
}

/// `ψ`: the sum of `ω_i(g)` over goods held by lower-level agents; zero when
/// all bundles have the same size.
pub fn potential(instance: &Instance, allocation: &Allocation) -> Result<u64> {
    let Some(low) = levels(allocation)? else {
        return Ok(0);
    };
    Ok(allocation
        .bundles
        .iter()
        .enumerate()
        .filter(|(_, b)| b.len() == low)
        .map(|(i, b)| {
            let r = ranks(instance, i);
            b.iter().map(|t| r[t]).sum::<u64>()
        })
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SwapStep {
    pub envious: usize,
    pub envied: usize,
    /// Moves from the envied agent to the envious one.
    pub g_max: usize,
    /// Moves the other way.
    pub g_min: usize,
    pub psi_before: u64,
    pub psi_after: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SwapTrace {
    pub steps: Vec<SwapStep>,
}

fn first_envious_pair(instance: &Instance, allocation: &Allocation) -> Option<(usize, usize)> {
    let c = Criterion::goods(BaseCriterion::Efx).wc();
    let n = instance.agents();
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .find(|&(i, j)| {
            i != j
                && violation(c, instance.valuation(i), allocation.bundle(i), allocation.bundle(j))
                    .is_some()
        })
}

pub fn solve_leveled_efxwc(instance: &Instance) -> Result<(Allocation, SwapTrace)> {
    check_orientation(instance, Orientation::Goods, "efx_wc")?;
    for agent in 0..instance.agents() {
        if let Some((smaller, larger)) = instance.leveled_violation(agent)? {
            return Err(Error::NotLeveled {
                agent: agent + 1,
                smaller,
                larger,
            });
        }
    }
    let n = instance.agents() as u64;
    let m = instance.type_count() as u64;
    let bound = n * m * m;

    let mut allocation = round_robin_init(instance);
    let mut trace = SwapTrace::default();
    let mut psi = potential(instance, &allocation)?;
    while let Some((i, j)) = first_envious_pair(instance, &allocation) {
        let (own, other) = (allocation.bundle(i), allocation.bundle(j));
        if own.len() >= other.len() {
            return Err(Error::SolverInvariant(format!(
                "envious agent {} is not on the lower level",
                i + 1
            )));
        }
        let v = instance.valuation(i);
        let g_max = other
            .difference(own)
            .iter()
            .max_by_key(|&g| (v.item(g), std::cmp::Reverse(g)));
        let g_min = own
            .difference(other)
            .iter()
            .min_by_key(|&g| (v.item(g), g));
        let (Some(g_max), Some(g_min)) = (g_max, g_min) else {
            return Err(Error::SolverInvariant(format!(
                "no goods to exchange between agents {} and {}",
                i + 1,
                j + 1
            )));
        };
        if v.item(g_max) <= v.item(g_min) {
            return Err(Error::SolverInvariant(format!(
                "agent {} would not gain from the exchange",
                i + 1
            )));
        }
        allocation.bundles[i] = own.without(g_min).with(g_max);
        allocation.bundles[j] = other.without(g_max).with(g_min);
        let after = potential(instance, &allocation)?;
        if after <= psi {
            return Err(Error::SolverInvariant(format!(
                "potential did not increase ({psi} -> {after})"
            )));
        }
        trace.steps.push(SwapStep {
            envious: i,
            envied: j,
            g_max,
            g_min,
            psi_before: psi,
            psi_after: after,
        });
        if trace.steps.len() as u64 > bound {
            return Err(Error::SolverInvariant(format!(
                "more than n|T|^2 = {bound} swaps"
            )));
        }
        psi = after;
    }
    Ok((allocation, trace))
}
