//! Truncated proportional share.

use num_bigint::BigInt;
use num_traits::Zero;

use super::{prop_share, Certificate, ShareValue};
use crate::criteria::infer_orientation;
use crate::criteria::Orientation;
use crate::error::Result;
use crate::model::Instance;
use crate::rational::Rational;

/// Goods: the largest `z` with `sum_g min(v(g), z) = n z` over all copies.
/// Chores: `min(PROP, worst single chore)`.
pub fn tps_share(instance: &Instance, agent: usize) -> Result<ShareValue> {
    instance.check_agent(agent)?;
    match infer_orientation(instance)? {
        Orientation::Goods => Ok(goods_tps(instance, agent)),
        Orientation::Chores => {
            let prop = prop_share(instance, agent)?;
            let worst = instance.values(agent).iter().min().cloned();
            let value = match worst {
                Some(w) if w < prop => w,
                _ => prop,
            };
            Ok(ShareValue {
                value,
                certificate: Certificate::None,
            })
        }
    }
}

fn goods_tps(instance: &Instance, agent: usize) -> ShareValue {
    let n = instance.agents();
    let mut items: Vec<Rational> = Vec::new();
    for (t, ty) in instance.types().iter().enumerate() {
        for _ in 0..ty.copies {
            items.push(instance.value(agent, t).clone());
        }
    }
    items.sort_by(|a, b| b.cmp(a));
    let m = items.len();
    let zero = Rational::zero();
    let at = |k: usize| -> Option<&Rational> { if k == 0 { None } else { items.get(k - 1) } };

    // tail[j] = sum of the items ranked j+1..m (1-based), i.e. untruncated when j are truncated
    let mut tail = vec![Rational::zero(); m + 1];
    for j in (0..m).rev() {
        tail[j] = &tail[j + 1] + &items[j];
    }

    let mut best: Option<(Rational, usize)> = None;
    #[allow(clippy::needless_range_loop)]
    for j in 0..=m.min(n) {
        let upper = at(j);
        let lower = items.get(j).unwrap_or(&zero);
        let root = if j < n {
            let z = &tail[j] / Rational::from_integer(BigInt::from(n - j));
            (z >= *lower && upper.is_none_or(|u| z <= *u)).then_some(z)
        } else if tail[j].is_zero() {
            // every z in [v_{n+1}, v_n] solves it; the segment top is the largest
            upper.cloned()
        } else {
            None
        };
        if let Some(z) = root {
            if best.as_ref().is_none_or(|(b, _)| z > *b) {
                best = Some((z, j));
            }
        }
    }
    let (value, truncated) = best.unwrap_or((Rational::zero(), 0));
    ShareValue {
        value,
        certificate: Certificate::Truncation { truncated },
    }
}

/// `sum_g min(v(g), z) / n`, for checking the fixed point.
pub fn truncated_mean(instance: &Instance, agent: usize, z: &Rational) -> Rational {
    let sum: Rational = instance
        .types()
        .iter()
        .enumerate()
        .map(|(t, ty)| {
            let v = instance.value(agent, t);
            let capped = if v < z { v.clone() } else { z.clone() };
            capped * Rational::from_integer(BigInt::from(ty.copies))
        })
        .sum();
    sum / Rational::from_integer(BigInt::from(instance.agents()))
}
