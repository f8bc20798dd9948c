//! Seeded random instances and allocations.
//!
//! Generation is versioned: the same scheme, seed and stream index always
//! produce the same instance. Change [`SCHEME`] whenever the draws change.

use std::ops::RangeInclusive;

use num_bigint::BigInt;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Allocation, Bundle, Instance, ItemType};
use crate::rational::Rational;

pub const SCHEME: &str = "gen-v1";

/// An independent generator for item `index` of a seeded batch.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CopyMode {
    /// `1..=n`.
    Any,
    /// `1..=n-1` (1 when `n = 1`).
    BelowAgents,
    Single,
    /// Exactly `n - 1` (1 when `n = 1`).
    AllButOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignMode {
    Goods,
    Chores,
    /// Goods or chores with equal probability, per instance.
    Either,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueMode {
    /// Integers in `0..=max`.
    Integer { max: u32 },
    /// `p/q` with `q` in `1..=max_den` and `p/q` at most `max`.
    Rational { max: u32, max_den: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenConfig {
    pub agents: RangeInclusive<usize>,
    pub types: RangeInclusive<usize>,
    pub copies: CopyMode,
    pub sign: SignMode,
    pub values: ValueMode,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            agents: 1..=3,
            types: 1..=4,
            copies: CopyMode::Any,
            sign: SignMode::Goods,
            values: ValueMode::Integer { max: 4 },
        }
    }
}

fn copies(rng: &mut ChaCha8Rng, mode: CopyMode, n: usize) -> usize {
    match mode {
        CopyMode::Any => rng.gen_range(1..=n),
        CopyMode::BelowAgents => rng.gen_range(1..=n.saturating_sub(1).max(1)),
        CopyMode::Single => 1,
        CopyMode::AllButOne => n.saturating_sub(1).max(1),
    }
}

fn magnitude(rng: &mut ChaCha8Rng, mode: ValueMode) -> Rational {
    match mode {
        ValueMode::Integer { max } => Rational::from_integer(BigInt::from(rng.gen_range(0..=max))),
        ValueMode::Rational { max, max_den } => {
            let q = rng.gen_range(1..=max_den.max(1));
            let p = rng.gen_range(0..=max * q);
            Rational::new(BigInt::from(p), BigInt::from(q))
        }
    }
}

pub fn random_instance(rng: &mut ChaCha8Rng, config: &GenConfig) -> Instance {
    let n = rng.gen_range(config.agents.clone());
    let m = rng.gen_range(config.types.clone());
    let negative = match config.sign {
        SignMode::Goods => false,
        SignMode::Chores => true,
        SignMode::Either => rng.gen_bool(0.5),
    };
    let types: Vec<ItemType> = (0..m)
        .map(|t| ItemType::new(format!("t{}", t + 1), copies(rng, config.copies, n)))
        .collect();
    let values = (0..n)
        .map(|_| {
            (0..m)
                .map(|_| {
                    let v = magnitude(rng, config.values);
                    if negative {
                        -v
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    Instance::new(n, types, values).expect("generated instances are valid")
}

/// Values drawn from `[1, 1 + 1/|T|)` with denominator `100 |T|`, which makes
/// every agent leveled.
pub fn random_leveled_instance(
    rng: &mut ChaCha8Rng,
    agents: RangeInclusive<usize>,
    types: RangeInclusive<usize>,
) -> Instance {
    let n = rng.gen_range(agents);
    let m = rng.gen_range(types);
    let den = 100 * m as i64;
    let types = (0..m)
        .map(|t| ItemType::new(format!("g{}", t + 1), rng.gen_range(1..=n)))
        .collect();
    let values = (0..n)
        .map(|_| {
            (0..m)
                .map(|_| Rational::new(BigInt::from(den + rng.gen_range(0..100)), BigInt::from(den)))
                .collect()
        })
        .collect();
    Instance::new(n, types, values).expect("generated instances are valid")
}

/// Uniform over exclusive allocations: each type independently picks `k_t`
/// distinct agents.
pub fn random_allocation(rng: &mut ChaCha8Rng, instance: &Instance) -> Allocation {
    let n = instance.agents();
    let mut bundles = vec![Bundle::EMPTY; n];
    for (t, ty) in instance.types().iter().enumerate() {
        for a in sample(rng, n, ty.copies).iter() {
            bundles[a] = bundles[a].with(t);
        }
    }
    Allocation::new(bundles)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_and_valid() {
        let config = GenConfig {
            agents: 1..=4,
            types: 1..=5,
            sign: SignMode::Either,
            values: ValueMode::Rational { max: 3, max_den: 4 },
            ..GenConfig::default()
        };
        for k in 0..50 {
            let a = random_instance(&mut stream(7, k), &config);
            let b = random_instance(&mut stream(7, k), &config);
            assert_eq!(a, b);
            let alloc = random_allocation(&mut stream(8, k), &a);
            assert!(a.validate_allocation(&alloc).is_ok());
        }
    }

    #[test]
    fn leveled_generator() {
        for k in 0..200 {
            let inst = random_leveled_instance(&mut stream(3, k), 1..=5, 1..=8);
            for i in 0..inst.agents() {
                assert!(inst.is_leveled(i).unwrap());
            }
        }
    }
}
