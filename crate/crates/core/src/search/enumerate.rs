//! Enumeration of all exclusive allocations.
//!
//! An allocation is a choice, for every type `t`, of which `k_t` agents
//! receive a copy. Choices for one type are listed in lexicographic order of
//! their sorted agent lists, and allocations are ordered as mixed-radix
//! numbers with type 0 as the most significant digit. Index ranges can then
//! be scanned independently.

use std::ops::{ControlFlow, Range};
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use super::SearchOptions;
use crate::error::{Error, Result};
use crate::model::{Allocation, Bundle, Instance};

/// Ranges shorter than this are not split further.
const MIN_CHUNK: u64 = 2048;

pub fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// `prod_t C(n, k_t)`, saturating at `u128::MAX`.
pub fn plan_count(instance: &Instance) -> u128 {
    instance
        .types()
        .iter()
        .map(|t| binomial(instance.agents(), t.copies))
        .try_fold(1u128, |acc, c| acc.checked_mul(c))
        .unwrap_or(u128::MAX)
}

/// Agent subsets of size `k` out of `n`, as bitmasks, in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<u64> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().fold(0u64, |m, &a| m | 1 << a));
        let Some(pos) = (0..k).rev().find(|&p| idx[p] != p + n - k) else {
            return out;
        };
        idx[pos] += 1;
        for p in pos + 1..k {
            idx[p] = idx[p - 1] + 1;
        }
    }
}

#[derive(Debug, Clone)]
pub struct EnumerationPlan {
    agents: usize,
    choices: Vec<Vec<u64>>,
    count: u64,
}

impl EnumerationPlan {
    /// Fails when the plan has more than `cap` allocations.
    pub fn new(instance: &Instance, cap: u64) -> Result<Self> {
        let count = plan_count(instance);
        if count > cap as u128 {
            return Err(Error::BudgetExceeded {
                needed: count,
                cap: cap as u128,
            });
        }
        if instance.agents() > 64 {
            return Err(Error::Unsupported(
                "enumeration supports at most 64 agents".into(),
            ));
        }
        let choices = instance
            .types()
            .iter()
            .map(|t| combinations(instance.agents(), t.copies))
            .collect();
        Ok(EnumerationPlan {
            agents: instance.agents(),
            choices,
            count: count as u64,
        })
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    fn digits(&self, mut index: u64) -> Vec<usize> {
        let mut digits = vec![0; self.choices.len()];
        for t in (0..self.choices.len()).rev() {
            let radix = self.choices[t].len() as u64;
            digits[t] = (index % radix) as usize;
            index /= radix;
        }
        digits
    }

    fn bundles_for(&self, digits: &[usize]) -> Vec<Bundle> {
        let mut bundles = vec![Bundle::EMPTY; self.agents];
        for (t, &d) in digits.iter().enumerate() {
            add_type(&mut bundles, self.choices[t][d], t);
        }
        bundles
    }

    pub fn allocation_at(&self, index: u64) -> Allocation {
        Allocation::new(self.bundles_for(&self.digits(index)))
    }

    /// Calls `visit(index, bundles)` for each allocation in `range`, in order.
    pub fn scan<F>(&self, range: Range<u64>, mut visit: F) -> ControlFlow<()>
    where
        F: FnMut(u64, &[Bundle]) -> ControlFlow<()>,
    {
        if range.start >= range.end.min(self.count) {
            return ControlFlow::Continue(());
        }
        let end = range.end.min(self.count);
        let mut digits = self.digits(range.start);
        let mut bundles = self.bundles_for(&digits);
        let mut index = range.start;
        loop {
            visit(index, &bundles)?;
            index += 1;
            if index >= end {
                return ControlFlow::Continue(());
            }
            // odometer step, least significant digit last
            let mut t = self.choices.len();
            loop {
                t -= 1;
                let old = self.choices[t][digits[t]];
                toggle_type(&mut bundles, old, t);
                digits[t] += 1;
                if digits[t] < self.choices[t].len() {
                    toggle_type(&mut bundles, self.choices[t][digits[t]], t);
                    break;
                }
                digits[t] = 0;
                toggle_type(&mut bundles, self.choices[t][0], t);
            }
        }
    }

    pub fn for_each<F>(&self, mut visit: F)
    where
        F: FnMut(&[Bundle]),
    {
        let _ = self.scan(0..self.count, |_, b| {
            visit(b);
            ControlFlow::Continue(())
        });
    }

    fn chunks(&self) -> Vec<Range<u64>> {
        let pieces = (self.count / MIN_CHUNK).clamp(1, 4096);
        let size = self.count.div_ceil(pieces).max(1);
        (0..self.count)
            .step_by(size as usize)
            .map(|s| s..(s + size).min(self.count))
            .collect()
    }

    /// Smallest index whose allocation satisfies `pred`.
    pub fn find_first<P>(&self, options: &SearchOptions, pred: P) -> Option<u64>
    where
        P: Fn(&[Bundle]) -> bool + Sync,
    {
        let best = AtomicU64::new(u64::MAX);
        options.run(|| {
            self.chunks().into_par_iter().for_each(|range| {
                if range.start > best.load(Ordering::Relaxed) {
                    return;
                }
                let _ = self.scan(range, |index, bundles| {
                    if index > best.load(Ordering::Relaxed) {
                        return ControlFlow::Break(());
                    }
                    if pred(bundles) {
                        best.fetch_min(index, Ordering::Relaxed);
                        return ControlFlow::Break(());
                    }
                    ControlFlow::Continue(())
                });
            })
        });
        let found = best.into_inner();
        (found != u64::MAX).then_some(found)
    }

    /// Number of allocations satisfying `pred`.
    pub fn count_matching<P>(&self, options: &SearchOptions, pred: P) -> u64
    where
        P: Fn(&[Bundle]) -> bool + Sync,
    {
        options.run(|| {
            self.chunks()
                .into_par_iter()
                .map(|range| {
                    let mut hits = 0u64;
                    let _ = self.scan(range, |_, b| {
                        hits += pred(b) as u64;
                        ControlFlow::Continue(())
                    });
                    hits
                })
                .sum()
        })
    }

    /// Maximum of `score` over all allocations, with the smallest index
    /// attaining it.
    pub fn argmax<S, K>(&self, options: &SearchOptions, score: S) -> (K, u64)
    where
        S: Fn(&[Bundle]) -> K + Sync,
        K: Ord + Send,
    {
        options.run(|| {
            self.chunks()
                .into_par_iter()
                .map(|range| {
                    let mut best: Option<(K, u64)> = None;
                    let _ = self.scan(range, |index, b| {
                        let s = score(b);
                        if best.as_ref().is_none_or(|(k, _)| s > *k) {
                            best = Some((s, index));
                        }
                        ControlFlow::Continue(())
                    });
                    best.expect("non-empty chunk")
                })
                .reduce_with(|a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a })
                .expect("plans are never empty")
        })
    }
}

fn add_type(bundles: &mut [Bundle], agents: u64, t: usize) {
    let mut m = agents;
    while m != 0 {
        let a = m.trailing_zeros() as usize;
        bundles[a] = bundles[a].with(t);
        m &= m - 1;
    }
}

fn toggle_type(bundles: &mut [Bundle], agents: u64, t: usize) {
    let mut m = agents;
    while m != 0 {
        let a = m.trailing_zeros() as usize;
        bundles[a] = Bundle(bundles[a].0 ^ 1 << t);
        m &= m - 1;
    }
}

/// Streams every exclusive allocation in enumeration order.
pub fn enumerate_allocations(instance: &Instance, cap: u64) -> Result<Vec<Allocation>> {
    let plan = EnumerationPlan::new(instance, cap)?;
    let mut out = Vec::with_capacity(plan.count() as usize);
    plan.for_each(|b| out.push(Allocation::new(b.to_vec())));
    Ok(out)
}
