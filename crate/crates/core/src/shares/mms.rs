//! Maximin share, exact and witness-based.

use num_traits::Signed;

use super::{Certificate, ShareValue};
use crate::error::{Error, Result};
use crate::model::{Allocation, Instance};
use crate::rational::Rational;
use crate::search::{EnumerationPlan, SearchOptions};

/// Exact MMS over all exclusive allocations. The certificate is the first
/// maximizing allocation in enumeration order.
pub fn mms_share(instance: &Instance, agent: usize, options: &SearchOptions) -> Result<ShareValue> {
    instance.check_agent(agent)?;
    let plan = EnumerationPlan::new(instance, options.cap)?;
    let v = instance.valuation(agent);
    let (best, index) = plan.argmax(options, |bundles| {
        bundles.iter().map(|&b| v.of(b)).min().unwrap_or(0)
    });
    Ok(ShareValue {
        value: v.to_rational(best),
        certificate: Certificate::Allocation(plan.allocation_at(index)),
    })
}

/// Exact MMS for every agent.
pub fn mms_all(instance: &Instance, options: &SearchOptions) -> Result<Vec<Rational>> {
    (0..instance.agents())
        .map(|i| mms_share(instance, i, options).map(|s| s.value))
        .collect()
}

/// `min_j v_i(A_j)` for a valid witness, a certified lower bound on MMS.
pub fn verify_mms_lower_bound(instance: &Instance, agent: usize, witness: &Allocation) -> Result<Rational> {
    instance.check_agent(agent)?;
    instance.require_valid(witness)?;
    let v = instance.valuation(agent);
    let low = witness.bundles.iter().map(|&b| v.of(b)).min().unwrap_or(0);
    Ok(v.to_rational(low))
}

pub enum MmsSource<'a> {
    Exact(&'a SearchOptions),
    /// Every agent's MMS is bounded below through this allocation.
    LowerBound(&'a Allocation),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// Only a lower bound on MMS is known and the agent clears it.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentMms {
    pub value: Rational,
    /// Exact MMS, or a lower bound when `exact` is false.
    pub mms: Rational,
    pub exact: bool,
    /// `value / mms` when `mms > 0`; an upper bound on the true ratio when
    /// `mms` is only a lower bound.
    pub ratio: Option<Rational>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaMmsReport {
    pub alpha: Rational,
    pub agents: Vec<AgentMms>,
}

impl AlphaMmsReport {
    pub fn verdict(&self) -> Verdict {
        let verdicts = self.agents.iter().map(|a| a.verdict);
        if verdicts.clone().any(|v| v == Verdict::Fail) {
            Verdict::Fail
        } else if verdicts.clone().any(|v| v == Verdict::Inconclusive) {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        }
    }
}

/// Checks `v_i(A_i) >= alpha * MMS_i` for every agent.
pub fn check_alpha_mms(
    instance: &Instance,
    allocation: &Allocation,
    alpha: &Rational,
    source: MmsSource<'_>,
) -> Result<AlphaMmsReport> {
    if !alpha.is_positive() {
        return Err(Error::Alpha(alpha.to_string()));
    }
    instance.require_valid(allocation)?;
    let mut agents = Vec::with_capacity(instance.agents());
    for i in 0..instance.agents() {
        let (mms, exact) = match &source {
            MmsSource::Exact(opts) => (mms_share(instance, i, opts)?.value, true),
            MmsSource::LowerBound(w) => (verify_mms_lower_bound(instance, i, w)?, false),
        };
        let value = instance.value_of(i, allocation.bundle(i));
        let ratio = mms.is_positive().then(|| &value / &mms);
        let clears = value >= alpha * &mms;
        let verdict = match (clears, exact) {
            (false, _) => Verdict::Fail,
            (true, true) => Verdict::Pass,
            (true, false) => Verdict::Inconclusive,
        };
        agents.push(AgentMms {
            value,
            mms,
            exact,
            ratio,
            verdict,
        });
    }
    Ok(AlphaMmsReport {
        alpha: alpha.clone(),
        agents,
    })
}
