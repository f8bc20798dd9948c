//! The goods/chores dual: negate values, give each type `n - k_t` copies and
//! hand every agent the complement `T \ A_i` of its bundle.
//!
//! A type with `k_t = n` has no copies in the dual. It is removed and
//! recorded in [`DualPair::dropped`], and [`DualPair::restore`] puts it back.

use crate::criteria::{infer_orientation, is_fair, BaseCriterion, Criterion};
use crate::error::{Error, Result};
use crate::model::{Allocation, Bundle, Instance, ItemType};
use crate::rational::Rational;
use crate::search::SearchOptions;
use crate::shares::{mms_share, prop_share, ShareKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DroppedType {
    /// Position in the original type list.
    pub index: usize,
    pub name: String,
    /// Original per-agent values.
    pub values: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualPair {
    pub instance: Instance,
    pub allocation: Option<Allocation>,
    /// `d_i = v_i(T)` in the original instance.
    pub shifts: Vec<Rational>,
    pub dropped: Vec<DroppedType>,
}

pub fn dualize(instance: &Instance, allocation: Option<&Allocation>) -> Result<DualPair> {
    if let Some(a) = allocation {
        instance.require_valid(a)?;
    }
    let n = instance.agents();
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for (t, ty) in instance.types().iter().enumerate() {
        if ty.copies == n {
            dropped.push(DroppedType {
                index: t,
                name: ty.name.clone(),
                values: (0..n).map(|i| instance.value(i, t).clone()).collect(),
            });
        } else {
            kept.push(t);
        }
    }
    let types = kept
        .iter()
        .map(|&t| ItemType::new(instance.type_name(t), n - instance.copies(t)))
        .collect();
    let values = (0..n)
        .map(|i| kept.iter().map(|&t| -instance.value(i, t)).collect())
        .collect();
    let dual = Instance::new(n, types, values)?;
    let allocation = allocation.map(|a| {
        Allocation::new(
            a.bundles
                .iter()
                .map(|&b| {
                    Bundle::from_indices(
                        kept.iter()
                            .enumerate()
                            .filter(|&(_, &t)| !b.contains(t))
                            .map(|(k, _)| k),
                    )
                })
                .collect(),
        )
    });
    Ok(DualPair {
        instance: dual,
        allocation,
        shifts: (0..n).map(|i| instance.type_set_value(i)).collect(),
        dropped,
    })
}

impl DualPair {
    /// Dualizes back and reinserts dropped types, recovering the original.
    pub fn restore(&self) -> Result<(Instance, Option<Allocation>)> {
        let back = dualize(&self.instance, self.allocation.as_ref())?;
        if self.dropped.is_empty() {
            return Ok((back.instance, back.allocation));
        }
        let n = back.instance.agents();
        let total = back.instance.type_count() + self.dropped.len();
        // original index -> index in `back`, or the dropped record
        let mut source = Vec::with_capacity(total);
        let mut next_kept = 0;
        let mut drops = self.dropped.iter().peekable();
        for t in 0..total {
            match drops.peek() {
                Some(d) if d.index == t => source.push(Err(drops.next().expect("peeked"))),
                _ => {
                    source.push(Ok(next_kept));
                    next_kept += 1;
                }
            }
        }
        let types = source
            .iter()
            .map(|s| match s {
                Ok(k) => back.instance.types()[*k].clone(),
                Err(d) => ItemType::new(d.name.clone(), n),
            })
            .collect();
        let values = (0..n)
            .map(|i| {
                source
                    .iter()
                    .map(|s| match s {
                        Ok(k) => back.instance.value(i, *k).clone(),
                        Err(d) => d.values[i].clone(),
                    })
                    .collect()
            })
            .collect();
        let instance = Instance::new(n, types, values)?;
        let allocation = back.allocation.map(|a| {
            Allocation::new(
                a.bundles
                    .iter()
                    .map(|&b| {
                        Bundle::from_indices(source.iter().enumerate().filter_map(|(t, s)| {
                            match s {
                                Ok(k) => b.contains(*k).then_some(t),
                                Err(_) => Some(t),
                            }
                        }))
                    })
                    .collect(),
            )
        });
        Ok((instance, allocation))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvyDualityReport {
    /// The without-commons criterion checked on the original side.
    pub criterion: Criterion,
    pub original: bool,
    pub dual: bool,
}

impl EnvyDualityReport {
    pub fn holds(&self) -> bool {
        self.original == self.dual
    }
}

/// Compares `f_WC` fairness of `allocation` with `(f^c)_WC` fairness of its
/// dual.
pub fn check_envy_duality(
    instance: &Instance,
    allocation: &Allocation,
    base: BaseCriterion,
) -> Result<EnvyDualityReport> {
    let orientation = infer_orientation(instance)?;
    let criterion = Criterion {
        base,
        orientation,
        without_commons: true,
    };
    let original = is_fair(instance, allocation, criterion)?.fair;
    let pair = dualize(instance, Some(allocation))?;
    let dual_alloc = pair.allocation.as_ref().expect("allocation given");
    let dual = is_fair(&pair.instance, dual_alloc, criterion.complement())?.fair;
    Ok(EnvyDualityReport {
        criterion,
        original,
        dual,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareShift {
    pub share: Rational,
    pub dual_share: Rational,
    pub shift: Rational,
}

impl ShareShift {
    pub fn identity_holds(&self) -> bool {
        self.share == &self.dual_share + &self.shift
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareDualityReport {
    pub kind: ShareKind,
    pub agents: Vec<ShareShift>,
    pub fair: bool,
    pub dual_fair: bool,
}

impl ShareDualityReport {
    pub fn holds(&self) -> bool {
        self.fair == self.dual_fair && self.agents.iter().all(ShareShift::identity_holds)
    }
}

/// Checks `s(v_i) = s(dual v_i) + v_i(T)` for every agent and that share
/// fairness is preserved by the dual. Defined for PROP and MMS.
pub fn check_share_duality(
    instance: &Instance,
    allocation: &Allocation,
    kind: ShareKind,
    options: &SearchOptions,
) -> Result<ShareDualityReport> {
    let share = |inst: &Instance, i: usize| -> Result<Rational> {
        match kind {
            ShareKind::Prop => prop_share(inst, i),
            ShareKind::Mms => Ok(mms_share(inst, i, options)?.value),
            other => Err(Error::Unsupported(format!(
                "share duality is checked for prop and mms, not {}",
                other.name()
            ))),
        }
    };
    let pair = dualize(instance, Some(allocation))?;
    let dual_alloc = pair.allocation.as_ref().expect("allocation given");
    let mut agents = Vec::with_capacity(instance.agents());
    let (mut fair, mut dual_fair) = (true, true);
    for i in 0..instance.agents() {
        let s = share(instance, i)?;
        let ds = share(&pair.instance, i)?;
        fair &= instance.value_of(i, allocation.bundle(i)) >= s;
        dual_fair &= pair.instance.value_of(i, dual_alloc.bundle(i)) >= ds;
        agents.push(ShareShift {
            share: s,
            dual_share: ds,
            shift: pair.shifts[i].clone(),
        });
    }
    Ok(ShareDualityReport {
        kind,
        agents,
        fair,
        dual_fair,
    })
}
