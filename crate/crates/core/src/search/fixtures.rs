//! Replication fixtures: JSON instances with scripted claims.
//!
//! Each fixture file carries an instance, named allocations and a list of
//! claims. [`replicate`] evaluates every claim with the library and reports
//! pass or fail per claim. Agents in fixture files are numbered from 1.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;
use serde_json::Value;

use super::{exists_fair, max_nash_welfare, Notion, SearchOptions};
use crate::criteria::{
    cancel_envy_cycle, criterion_eval, infer_orientation, is_fair, pareto_dominates, Criterion,
    EnvyGraph, FairnessReport,
};
use crate::duality::dualize;
use crate::error::{Error, Result};
use crate::io::{allocation_from_value, instance_from_value};
use crate::model::{Allocation, Bundle, Instance, ItemType};
use crate::rational::{parse_rational, rational_from_json, Rational};
use crate::shares::{
    aps_share, aps_value_at_prices, mms_share, prop_share, tps_share, verify_mms_lower_bound,
    Certificate, PriceNormalization, ShareKind,
};

macro_rules! registry {
    ($($id:literal),* $(,)?) => {
        &[$(($id, include_str!(concat!("../../fixtures/", $id, ".json")))),*]
    };
}

const FIXTURES: &[(&str, &str)] = registry![
    "ex-no-efx-copies",
    "ex-efl-wc-not-efx-wc",
    "ex-efl-not-ef1wc",
    "ex-ef1-not-ef1wc",
    "tab-efx-wc-0.4-mms",
    "tab-efl-wc-third-mms-l4",
    "tab-efl-wc-third-mms-l20",
    "ex-ef1-wc-one-over-n",
    "tab-cycle-cancel",
    "tab-mnw-not-ef1wc",
    "ex-tps-not-linear",
    "ex-tps-prop",
    "ex-aps-chores",
];

pub fn fixture_ids() -> Vec<&'static str> {
    FIXTURES.iter().map(|(id, _)| *id).collect()
}

pub fn fixture_source(id: &str) -> Result<&'static str> {
    FIXTURES
        .iter()
        .find(|(k, _)| *k == id)
        .map(|(_, text)| *text)
        .ok_or_else(|| Error::UnknownFixture(id.to_string()))
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub id: String,
    pub title: String,
    pub instance: Instance,
    pub allocations: BTreeMap<String, Allocation>,
    claims: Vec<Value>,
}

impl Fixture {
    pub fn allocation(&self, name: &str) -> Result<&Allocation> {
        self.allocations
            .get(name)
            .ok_or_else(|| Error::field("allocation", format!("no allocation named `{name}`")))
    }
}

pub fn load_fixture(id: &str) -> Result<Fixture> {
    let root: Value = serde_json::from_str(fixture_source(id)?)?;
    let instance = instance_from_value(&root["instance"])?.instance;
    let mut allocations = BTreeMap::new();
    if let Some(map) = root["allocations"].as_object() {
        for (name, value) in map {
            allocations.insert(name.clone(), allocation_from_value(value, &instance)?);
        }
    }
    Ok(Fixture {
        id: id.to_string(),
        title: root["title"].as_str().unwrap_or_default().to_string(),
        instance,
        allocations,
        claims: root["claims"].as_array().cloned().unwrap_or_default(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClaimResult {
    pub claim: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixtureReport {
    pub id: String,
    pub title: String,
    pub claims: Vec<ClaimResult>,
}

impl FixtureReport {
    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.passed)
    }
}

pub fn replicate(id: &str, options: &SearchOptions) -> Result<FixtureReport> {
    let fixture = load_fixture(id)?;
    let mut claims = Vec::with_capacity(fixture.claims.len());
    for claim in &fixture.claims {
        let kind = claim["kind"].as_str().unwrap_or("?");
        let (passed, detail) = match evaluate(&fixture, claim, options) {
            Ok(outcome) => outcome,
            Err(e @ (Error::Field { .. } | Error::UnknownType(_) | Error::UnknownNotion(_))) => {
                return Err(e)
            }
            Err(e) => (false, format!("error: {e}")),
        };
        claims.push(ClaimResult {
            claim: describe(kind, claim),
            passed,
            detail,
        });
    }
    Ok(FixtureReport {
        id: fixture.id,
        title: fixture.title,
        claims,
    })
}

pub fn replicate_all(options: &SearchOptions) -> Result<Vec<FixtureReport>> {
    fixture_ids().into_iter().map(|id| replicate(id, options)).collect()
}

fn describe(kind: &str, claim: &Value) -> String {
    let mut parts = vec![kind.to_string()];
    for key in ["notion", "share", "allocation", "agent", "entitlement"] {
        match &claim[key] {
            Value::Null => {}
            Value::String(s) => parts.push(format!("{key}={s}")),
            other => parts.push(format!("{key}={other}")),
        }
    }
    parts.join(" ")
}

fn str_field<'a>(claim: &'a Value, key: &str) -> Result<&'a str> {
    claim[key]
        .as_str()
        .ok_or_else(|| Error::field(key, "expected a string"))
}

fn bool_field(claim: &Value, key: &str) -> Result<bool> {
    claim[key]
        .as_bool()
        .ok_or_else(|| Error::field(key, "expected a boolean"))
}

fn rat_field(claim: &Value, key: &str) -> Result<Rational> {
    rational_from_json(&claim[key], key)
}

fn agent_field(claim: &Value, key: &str, instance: &Instance) -> Result<usize> {
    let a = claim[key]
        .as_u64()
        .filter(|&a| a >= 1 && a as usize <= instance.agents())
        .ok_or_else(|| Error::field(key, "expected an agent number from 1 to n"))?;
    Ok(a as usize - 1)
}

fn pair_field(claim: &Value, key: &str) -> Result<Option<(usize, usize)>> {
    match &claim[key] {
        Value::Null => Ok(None),
        Value::Array(xs) => match xs.as_slice() {
            [Value::Number(a), Value::Number(b)] => {
                let (a, b) = (a.as_u64().unwrap_or(0), b.as_u64().unwrap_or(0));
                if a == 0 || b == 0 {
                    return Err(Error::field(key, "agents are numbered from 1"));
                }
                Ok(Some((a as usize - 1, b as usize - 1)))
            }
            _ => Err(Error::field(key, "expected [envious, envied]")),
        },
        _ => Err(Error::field(key, "expected [envious, envied]")),
    }
}

fn names(instance: &Instance, bundle: Bundle) -> Vec<String> {
    let mut out: Vec<String> = instance
        .bundle_names(bundle)
        .into_iter()
        .map(String::from)
        .collect();
    out.sort();
    out
}

fn bundles_field(claim: &Value, key: &str) -> Result<Vec<Vec<String>>> {
    let rows = claim[key]
        .as_array()
        .ok_or_else(|| Error::field(key, "expected a list of bundles"))?;
    rows.iter()
        .map(|row| {
            let mut names: Vec<String> = row
                .as_array()
                .ok_or_else(|| Error::field(key, "expected a list of type names"))?
                .iter()
                .map(|v| v.as_str().map(String::from).ok_or_else(|| Error::field(key, "expected a name")))
                .collect::<Result<_>>()?;
            names.sort();
            Ok(names)
        })
        .collect()
}

fn allocation_names(instance: &Instance, allocation: &Allocation) -> Vec<Vec<String>> {
    allocation.bundles.iter().map(|&b| names(instance, b)).collect()
}

fn criterion_for(instance: &Instance, claim: &Value) -> Result<Criterion> {
    Criterion::parse(str_field(claim, "notion")?, infer_orientation(instance)?)
}

fn fairness_outcome(report: &FairnessReport, fair: bool, witness: Option<(usize, usize)>) -> (bool, String) {
    let pairs: Vec<String> = report
        .witnesses
        .iter()
        .map(|w| format!("({}, {})", w.envious + 1, w.envied + 1))
        .collect();
    let mut passed = report.fair == fair;
    if let Some((i, j)) = witness {
        passed &= report.witnesses.iter().any(|w| w.envious == i && w.envied == j);
    }
    let detail = if report.fair {
        format!("{} fair", report.criterion)
    } else {
        format!("{} unfair, envious pairs {}", report.criterion, pairs.join(" "))
    };
    (passed, detail)
}

fn share(instance: &Instance, kind: ShareKind, agent: usize, b: Option<&Rational>, options: &SearchOptions) -> Result<Rational> {
    Ok(match kind {
        ShareKind::Prop => prop_share(instance, agent)?,
        ShareKind::Mms => mms_share(instance, agent, options)?.value,
        ShareKind::Tps => tps_share(instance, agent)?.value,
        ShareKind::Aps => {
            let default = Rational::new(BigInt::one(), BigInt::from(instance.agents()));
            let b = b.unwrap_or(&default);
            let sv = aps_share(instance, agent, b, PriceNormalization::PerType)?;
            if let Certificate::Prices(p) = &sv.certificate {
                let check = aps_value_at_prices(instance, agent, b, &p.prices)?;
                if check != sv.value {
                    return Err(Error::SolverInvariant(format!(
                        "APS certificate evaluates to {check}, not {}",
                        sv.value
                    )));
                }
            }
            sv.value
        }
    })
}

fn share_kind(claim: &Value) -> Result<ShareKind> {
    let text = str_field(claim, "share")?;
    ShareKind::parse(text).ok_or_else(|| Error::field("share", format!("unknown share `{text}`")))
}

fn optional_rat(claim: &Value, key: &str) -> Result<Option<Rational>> {
    match &claim[key] {
        Value::Null => Ok(None),
        _ => rat_field(claim, key).map(Some),
    }
}

fn equal(got: &Rational, want: &Rational) -> (bool, String) {
    (got == want, format!("got {got}, expected {want}"))
}

fn min_bundle(instance: &Instance, agent: usize, allocation: &Allocation) -> Rational {
    allocation
        .bundles
        .iter()
        .map(|&b| instance.value_of(agent, b))
        .min()
        .unwrap_or_default()
}

fn evaluate(fx: &Fixture, claim: &Value, options: &SearchOptions) -> Result<(bool, String)> {
    let inst = &fx.instance;
    let alloc = || fx.allocation(str_field(claim, "allocation")?);
    match str_field(claim, "kind")? {
        "valid" => {
            let violations = inst.validate_allocation(alloc()?);
            let detail = match &violations {
                Ok(()) => "valid".to_string(),
                Err(v) => v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; "),
            };
            Ok((violations.is_ok(), detail))
        }
        "exists" | "dual_exists" => {
            let dual;
            let target = if claim["kind"] == "dual_exists" {
                dual = dualize(inst, None)?.instance;
                &dual
            } else {
                inst
            };
            let notion = Notion::Envy(criterion_for(target, claim)?);
            let cert = exists_fair(target, &notion, options, false)?;
            let mut passed = cert.exists == bool_field(claim, "expect")?;
            if let Some(n) = claim["checked"].as_u64() {
                passed &= cert.checked == n;
            }
            Ok((
                passed,
                format!(
                    "{}: exists = {} after {} of {} allocations",
                    notion.name(),
                    cert.exists,
                    cert.checked,
                    cert.plan_count
                ),
            ))
        }
        "fair" => {
            let report = is_fair(inst, alloc()?, criterion_for(inst, claim)?)?;
            Ok(fairness_outcome(&report, bool_field(claim, "expect")?, pair_field(claim, "witness")?))
        }
        "dual_fair" => {
            let pair = dualize(inst, Some(alloc()?))?;
            let dual_alloc = pair.allocation.as_ref().expect("allocation given");
            let report = is_fair(&pair.instance, dual_alloc, criterion_for(&pair.instance, claim)?)?;
            Ok(fairness_outcome(&report, bool_field(claim, "expect")?, pair_field(claim, "witness")?))
        }
        "dual_allocation" => {
            let pair = dualize(inst, Some(alloc()?))?;
            let got = allocation_names(&pair.instance, pair.allocation.as_ref().expect("allocation given"));
            let want = bundles_field(claim, "expect")?;
            Ok((got == want, format!("dual bundles {got:?}")))
        }
        "criterion" => {
            let agent = agent_field(claim, "agent", inst)?;
            let own = inst.bundle_from_names(&string_list(claim, "own")?)?;
            let other = inst.bundle_from_names(&string_list(claim, "other")?)?;
            let c = criterion_for(inst, claim)?;
            let got = criterion_eval(c, inst.valuation(agent), own, other);
            Ok((got == bool_field(claim, "expect")?, format!("{c} outputs {}", if got { "fair" } else { "not fair" })))
        }
        "bundle_value" => {
            let agent = agent_field(claim, "agent", inst)?;
            let bundle = inst.bundle_from_names(&string_list(claim, "bundle")?)?;
            Ok(equal(&inst.bundle_value(agent, bundle)?, &rat_field(claim, "expect")?))
        }
        "values" => {
            let a = alloc()?;
            let got: Vec<Rational> = (0..inst.agents()).map(|i| inst.value_of(i, a.bundle(i))).collect();
            let want = rat_list(claim, "expect")?;
            Ok((got == want, format!("values {}", join(&got))))
        }
        "min_bundle" => {
            let agent = agent_field(claim, "agent", inst)?;
            Ok(equal(&min_bundle(inst, agent, alloc()?), &rat_field(claim, "expect")?))
        }
        "dual_min_bundle" => {
            let agent = agent_field(claim, "agent", inst)?;
            let pair = dualize(inst, Some(alloc()?))?;
            let dual_alloc = pair.allocation.as_ref().expect("allocation given");
            Ok(equal(&min_bundle(&pair.instance, agent, dual_alloc), &rat_field(claim, "expect")?))
        }
        "mms_lower_bound" => {
            let agent = agent_field(claim, "agent", inst)?;
            let witness = fx.allocation(str_field(claim, "witness")?)?;
            Ok(equal(&verify_mms_lower_bound(inst, agent, witness)?, &rat_field(claim, "expect")?))
        }
        "mms_ratio" => {
            let agent = agent_field(claim, "agent", inst)?;
            let a = alloc()?;
            inst.require_valid(a)?;
            let witness = fx.allocation(str_field(claim, "witness")?)?;
            let bound = verify_mms_lower_bound(inst, agent, witness)?;
            if bound <= Rational::default() {
                return Ok((false, format!("MMS lower bound {bound} is not positive")));
            }
            let ratio = inst.value_of(agent, a.bundle(agent)) / bound;
            Ok(equal(&ratio, &rat_field(claim, "expect")?))
        }
        "share" | "dual_share" => {
            let agent = agent_field(claim, "agent", inst)?;
            let dual;
            let target = if claim["kind"] == "dual_share" {
                dual = dualize(inst, None)?.instance;
                &dual
            } else {
                inst
            };
            let b = optional_rat(claim, "entitlement")?;
            let got = share(target, share_kind(claim)?, agent, b.as_ref(), options)?;
            Ok(equal(&got, &rat_field(claim, "expect")?))
        }
        "share_shift" => {
            let agent = agent_field(claim, "agent", inst)?;
            let kind = share_kind(claim)?;
            let add = &claim["add"];
            let value = rat_field(add, "value")?;
            let copies = add["copies"]
                .as_u64()
                .ok_or_else(|| Error::field("add.copies", "expected an integer"))?;
            let mut types = inst.types().to_vec();
            types.push(ItemType::new(str_field(add, "name")?, copies as usize));
            let values = inst
                .value_matrix()
                .iter()
                .map(|row| row.iter().cloned().chain([value.clone()]).collect())
                .collect();
            let extended = Instance::new(inst.agents(), types, values)?;
            let before = share(inst, kind, agent, None, options)?;
            let after = share(&extended, kind, agent, None, options)?;
            let linear = after.clone() - &before == value;
            let passed = before == rat_field(claim, "before")?
                && after == rat_field(claim, "after")?
                && linear == bool_field(claim, "linear")?;
            Ok((passed, format!("{} -> {after}, shift {} vs added {value}", before, &after - &before)))
        }
        "aps_prices" => {
            let agent = agent_field(claim, "agent", inst)?;
            let b = rat_field(claim, "entitlement")?;
            let prices = string_list(claim, "prices")?
                .iter()
                .map(|p| parse_rational(p))
                .collect::<Result<Vec<_>>>()?;
            if prices.len() != inst.type_count() {
                return Err(Error::field("prices", "expected one price per type"));
            }
            Ok(equal(&aps_value_at_prices(inst, agent, &b, &prices)?, &rat_field(claim, "expect")?))
        }
        "aps_dual" => {
            let agent = agent_field(claim, "agent", inst)?;
            let b = rat_field(claim, "entitlement")?;
            let aps = share(inst, ShareKind::Aps, agent, Some(&b), options)?;
            let dual = dualize(inst, None)?.instance;
            let dual_b = Rational::one() - &b;
            let dual_aps = share(&dual, ShareKind::Aps, agent, Some(&dual_b), options)?;
            let shift = &aps - &dual_aps;
            let passed = dual_aps == rat_field(claim, "dual")?
                && shift == rat_field(claim, "shift")?
                && shift == inst.type_set_value(agent);
            Ok((passed, format!("APS {aps} at {b}, dual APS {dual_aps} at {dual_b}, difference {shift}")))
        }
        "envy_cycle" => {
            let graph = EnvyGraph::new(inst, alloc()?);
            let cycle = agent_list(claim, "cycle", inst)?;
            let got = graph.is_cycle(&cycle);
            let edges: Vec<String> = graph.edges().iter().map(|(i, j)| format!("{}->{}", i + 1, j + 1)).collect();
            Ok((got == bool_field(claim, "expect")?, format!("envy edges {}", edges.join(" "))))
        }
        "cycle_cancel" => {
            let before = alloc()?;
            let cycle = agent_list(claim, "cycle", inst)?;
            let after = cancel_envy_cycle(inst, before, &cycle)?;
            let value_of = |a: &Allocation| -> Vec<Rational> {
                (0..inst.agents()).map(|i| inst.value_of(i, a.bundle(i))).collect()
            };
            let (vb, va) = (value_of(before), value_of(&after));
            let report = is_fair(inst, &after, criterion_for(inst, claim)?)?;
            let (fair_ok, fair_detail) =
                fairness_outcome(&report, bool_field(claim, "fair")?, pair_field(claim, "witness")?);
            let passed = vb == rat_list(claim, "values_before")?
                && va == rat_list(claim, "values_after")?
                && pareto_dominates(inst, &after, before) == bool_field(claim, "dominates")?
                && fair_ok;
            Ok((passed, format!("values {} -> {}; after: {fair_detail}", join(&vb), join(&va))))
        }
        "mnw" => {
            let (a, nw) = max_nash_welfare(inst, options)?;
            let got = allocation_names(inst, &a);
            let report = is_fair(inst, &a, criterion_for(inst, claim)?)?;
            let (fair_ok, fair_detail) =
                fairness_outcome(&report, bool_field(claim, "fair")?, pair_field(claim, "witness")?);
            let passed = got == bundles_field(claim, "expect")?
                && nw == rat_field(claim, "nash_welfare")?
                && fair_ok;
            Ok((passed, format!("MNW {got:?} with welfare {nw}; {fair_detail}")))
        }
        other => Err(Error::field("kind", format!("unknown claim kind `{other}`"))),
    }
}

fn string_list(claim: &Value, key: &str) -> Result<Vec<String>> {
    claim[key]
        .as_array()
        .ok_or_else(|| Error::field(key, "expected a list"))?
        .iter()
        .map(|v| v.as_str().map(String::from).ok_or_else(|| Error::field(key, "expected strings")))
        .collect()
}

fn rat_list(claim: &Value, key: &str) -> Result<Vec<Rational>> {
    claim[key]
        .as_array()
        .ok_or_else(|| Error::field(key, "expected a list"))?
        .iter()
        .map(|v| rational_from_json(v, key))
        .collect()
}

fn agent_list(claim: &Value, key: &str, instance: &Instance) -> Result<Vec<usize>> {
    claim[key]
        .as_array()
        .ok_or_else(|| Error::field(key, "expected a list of agents"))?
        .iter()
        .map(|v| {
            v.as_u64()
                .filter(|&a| a >= 1 && a as usize <= instance.agents())
                .map(|a| a as usize - 1)
                .ok_or_else(|| Error::field(key, "expected agent numbers from 1 to n"))
        })
        .collect()
}

fn join(xs: &[Rational]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}
