//! Randomized exhaustive sweep over small goods instances.
//!
//! Every allocation of every generated instance is checked against the envy
//! notions below. The sweep reports the implication lattice violations it
//! finds, the smallest MMS ratio seen among allocations passing each notion,
//! and any allocation falling under the EFX_WC (4/11) or EFL_WC (1/3) MMS
//! guarantees.

use num_bigint::BigInt;
use num_traits::Signed;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::criteria::{all_fair, BaseCriterion, Criterion};
use crate::error::Result;
use crate::io::{allocation_to_value, instance_to_value};
use crate::model::{Allocation, Bundle, Instance};
use crate::random::{random_instance, stream, CopyMode, GenConfig, SignMode, ValueMode, SCHEME};
use crate::rational::{rational_to_json, Rational};
use crate::search::{EnumerationPlan, SearchOptions};
use crate::shares::mms_all;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepConfig {
    pub seed: u64,
    pub instances: u64,
    pub max_agents: usize,
    pub max_types: usize,
    pub max_value: u32,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            seed: 1,
            instances: 1000,
            max_agents: 3,
            max_types: 4,
            max_value: 4,
        }
    }
}

pub const NOTIONS: [(&str, BaseCriterion, bool); 7] = [
    ("ef", BaseCriterion::Ef, false),
    ("efx", BaseCriterion::Efx, false),
    ("efx_wc", BaseCriterion::Efx, true),
    ("efl", BaseCriterion::Efl, false),
    ("efl_wc", BaseCriterion::Efl, true),
    ("ef1_wc", BaseCriterion::Ef1, true),
    ("ef1", BaseCriterion::Ef1, false),
];

/// `(stronger, weaker)` pairs by index into [`NOTIONS`].
pub const LATTICE: [(usize, usize); 7] = [(0, 1), (1, 2), (2, 4), (4, 5), (5, 6), (1, 3), (3, 6)];

fn criterion(k: usize) -> Criterion {
    let (_, base, wc) = NOTIONS[k];
    let c = Criterion::goods(base);
    if wc {
        c.wc()
    } else {
        c
    }
}

fn bound_for(name: &str) -> Option<Rational> {
    match name {
        "efx_wc" => Some(Rational::new(BigInt::from(4), BigInt::from(11))),
        "efl_wc" => Some(Rational::new(BigInt::from(1), BigInt::from(3))),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: String,
    pub instance_index: u64,
    pub instance: Instance,
    pub allocation: Allocation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotionStats {
    pub name: &'static str,
    pub fair_allocations: u64,
    /// Smallest `min_i v_i(A_i) / MMS_i` over passing allocations, taken over
    /// agents with positive MMS.
    pub min_ratio: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub allocations: u64,
    pub notions: Vec<NotionStats>,
    pub violations: Vec<Violation>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "scheme": SCHEME,
            "seed": self.config.seed,
            "instances": self.config.instances,
            "max_agents": self.config.max_agents,
            "max_types": self.config.max_types,
            "max_value": self.config.max_value,
            "allocations": self.allocations,
            "notions": self.notions.iter().map(|s| json!({
                "notion": s.name,
                "fair_allocations": s.fair_allocations,
                "min_mms_ratio": s.min_ratio.as_ref().map(rational_to_json),
            })).collect::<Vec<_>>(),
            "violations": self.violations.iter().map(|v| json!({
                "kind": v.kind,
                "instance_index": v.instance_index,
                "instance": instance_to_value(&v.instance),
                "allocation": allocation_to_value(&v.instance, &v.allocation),
            })).collect::<Vec<_>>(),
            "passed": self.passed(),
        })
    }
}

struct InstanceResult {
    allocations: u64,
    fair: [u64; NOTIONS.len()],
    min_ratio: [Option<Rational>; NOTIONS.len()],
    violations: Vec<Violation>,
}

pub fn generator(config: &SweepConfig) -> GenConfig {
    GenConfig {
        agents: 1..=config.max_agents.max(1),
        types: 1..=config.max_types.max(1),
        copies: CopyMode::Any,
        sign: SignMode::Goods,
        values: ValueMode::Integer {
            max: config.max_value,
        },
    }
}

fn sweep_instance(index: u64, instance: Instance, options: &SearchOptions) -> Result<InstanceResult> {
    let plan = EnumerationPlan::new(&instance, options.cap)?;
    let mms = mms_all(&instance, options)?;
    let mut result = InstanceResult {
        allocations: plan.count(),
        fair: [0; NOTIONS.len()],
        min_ratio: Default::default(),
        violations: Vec::new(),
    };
    let record = |kind: String, bundles: &[Bundle], violations: &mut Vec<Violation>| {
        if violations.len() < 8 {
            violations.push(Violation {
                kind,
                instance_index: index,
                instance: instance.clone(),
                allocation: Allocation::new(bundles.to_vec()),
            });
        }
    };
    plan.for_each(|bundles| {
        let verdicts: Vec<bool> = (0..NOTIONS.len())
            .map(|k| all_fair(&instance, bundles, criterion(k)))
            .collect();
        for &(strong, weak) in &LATTICE {
            if verdicts[strong] && !verdicts[weak] {
                let kind = format!("{} without {}", NOTIONS[strong].0, NOTIONS[weak].0);
                record(kind, bundles, &mut result.violations);
            }
        }
        let ratio = (0..instance.agents())
            .filter(|&i| mms[i].is_positive())
            .map(|i| instance.value_of(i, bundles[i]) / &mms[i])
            .min();
        for (k, &fair) in verdicts.iter().enumerate() {
            if !fair {
                continue;
            }
            result.fair[k] += 1;
            let Some(r) = &ratio else { continue };
            if let Some(bound) = bound_for(NOTIONS[k].0) {
                if *r < bound {
                    record(format!("{} below {bound}-MMS", NOTIONS[k].0), bundles, &mut result.violations);
                }
            }
            if result.min_ratio[k].as_ref().is_none_or(|m| r < m) {
                result.min_ratio[k] = Some(r.clone());
            }
        }
    });
    Ok(result)
}

pub fn run_sweep(config: &SweepConfig, options: &SearchOptions) -> Result<SweepReport> {
    let gen = generator(config);
    let results: Vec<InstanceResult> = options.run(|| {
        (0..config.instances)
            .into_par_iter()
            .map(|k| {
                let instance = random_instance(&mut stream(config.seed, k), &gen);
                sweep_instance(k, instance, &SearchOptions::default().with_cap(options.cap))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut notions: Vec<NotionStats> = NOTIONS
        .iter()
        .map(|&(name, _, _)| NotionStats {
            name,
            fair_allocations: 0,
            min_ratio: None,
        })
        .collect();
    let mut allocations = 0;
    let mut violations = Vec::new();
    for r in results {
        allocations += r.allocations;
        for (k, stats) in notions.iter_mut().enumerate() {
            stats.fair_allocations += r.fair[k];
            if let Some(x) = &r.min_ratio[k] {
                if stats.min_ratio.as_ref().is_none_or(|m| x < m) {
                    stats.min_ratio = Some(x.clone());
                }
            }
        }
        violations.extend(r.violations);
    }
    Ok(SweepReport {
        config: config.clone(),
        allocations,
        notions,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweep_is_clean_and_deterministic() {
        let config = SweepConfig {
            instances: 40,
            ..SweepConfig::default()
        };
        let a = run_sweep(&config, &SearchOptions::default()).unwrap();
        let b = run_sweep(&config, &SearchOptions::default().with_jobs(2).unwrap()).unwrap();
        assert!(a.passed(), "{}", a.to_json());
        assert_eq!(a.to_json().to_string(), b.to_json().to_string());
    }

    #[test]
    fn empty_sweep() {
        let config = SweepConfig {
            instances: 0,
            ..SweepConfig::default()
        };
        let report = run_sweep(&config, &SearchOptions::default()).unwrap();
        assert!(report.passed());
        assert_eq!(report.allocations, 0);
    }
}
