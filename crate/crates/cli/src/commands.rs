use std::path::{Path, PathBuf};

use fairdual::criteria::{
    infer_orientation, is_fair, is_pareto_optimal, BaseCriterion, FairnessReport, Orientation,
};
use fairdual::duality::{check_envy_duality, check_share_duality, dualize};
use fairdual::io::{allocation_to_string, allocation_to_value, bundles_value, instance_to_string, instance_to_value};
use fairdual::leveled::{potential, solve_leveled_efxwc};
use fairdual::rational::{display_short, parse_rational, rational_to_json};
use fairdual::search::fixtures::{fixture_ids, replicate};
use fairdual::search::{enumerate_allocations, exists_fair, max_nash_welfare, Notion, SearchOptions};
use fairdual::shares::{
    aps_share, check_alpha_mms, mms_share, prop_share, tps_share, verify_mms_lower_bound,
    AlphaMmsReport, Certificate, MmsSource, PriceNormalization, ShareKind, Verdict,
};
use fairdual::sweep::{run_sweep, SweepConfig};
use fairdual::{Allocation, Bundle, Error, Instance, Rational};
use serde_json::{json, Value};

use crate::load::{self, Failure, Result};
use crate::output::{Report, Table};
use crate::{Command, NormalizationArg, OrientationArg};

pub fn run(command: Command, opts: &SearchOptions) -> Result<Report> {
    match command {
        Command::Check {
            instance,
            allocation,
            notion,
            orientation,
            alpha,
            witness,
        } => check(opts, &instance, &allocation, &notion, orientation, alpha, witness),
        Command::Exists {
            instance,
            notion,
            orientation,
            alpha,
            all,
        } => exists(opts, &instance, &notion, orientation, alpha, all),
        Command::Dualize {
            instance,
            allocation,
            out_instance,
            out_allocation,
            check,
        } => dual(opts, &instance, allocation, out_instance, out_allocation, check),
        Command::Shares {
            instance,
            agent,
            kind,
            entitlement,
            witness,
            normalization,
        } => shares(opts, &instance, agent, &kind, entitlement, witness, normalization),
        Command::Mnw { instance } => mnw(opts, &instance),
        Command::SolveLeveled { instance, trace } => leveled(&instance, trace),
        Command::Replicate { id, all, list } => fixtures(opts, id, all, list),
        Command::Sweep {
            seed,
            instances,
            max_agents,
            max_types,
            max_value,
            out,
        } => sweep(
            opts,
            SweepConfig {
                seed,
                instances,
                max_agents,
                max_types,
                max_value,
            },
            out,
        ),
    }
}

fn r(x: &Rational) -> Value {
    rational_to_json(x)
}

fn set(instance: &Instance, b: Bundle) -> String {
    format!("{{{}}}", instance.bundle_names(b).join(", "))
}

fn verdict(ok: bool, yes: &str, no: &str) -> String {
    if ok { yes } else { no }.to_string()
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, format!("{text}\n"))
        .map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn orientation(instance: &Instance, flag: Option<OrientationArg>) -> Orientation {
    flag.map(Orientation::from)
        .unwrap_or_else(|| infer_orientation(instance).unwrap_or(Orientation::Goods))
}

fn rational_flag(text: Option<String>) -> Result<Option<Rational>> {
    Ok(text.as_deref().map(parse_rational).transpose()?)
}

fn agent_index(instance: &Instance, agent: usize) -> Result<usize> {
    if agent == 0 || agent > instance.agents() {
        return Err(Error::UnknownAgent {
            agent,
            agents: instance.agents(),
        }
        .into());
    }
    Ok(agent - 1)
}

fn allocation_table(instance: &Instance, allocation: &Allocation) -> Result<Table> {
    let mut table = Table::new(&["agent", "value", "bundle"]);
    for i in 0..allocation.agents() {
        table.row(vec![
            (i + 1).to_string(),
            display_short(&instance.bundle_value(i, allocation.bundle(i))?),
            set(instance, allocation.bundle(i)),
        ]);
    }
    Ok(table)
}

fn check(
    opts: &SearchOptions,
    instance: &Path,
    allocation: &Path,
    notion: &str,
    flag: Option<OrientationArg>,
    alpha: Option<String>,
    witness: Option<PathBuf>,
) -> Result<Report> {
    let inst = load::instance(instance)?;
    let alloc = load::allocation(allocation, &inst)?;
    if notion.eq_ignore_ascii_case("pareto") {
        let report = is_pareto_optimal(&inst, &alloc, opts)?;
        let json = json!({
            "notion": "pareto",
            "fair": report.optimal,
            "dominating": report.dominating.as_ref().map(|d| allocation_to_value(&inst, d)),
        });
        let mut text = format!("pareto: {}\n", verdict(report.optimal, "optimal", "dominated"));
        if let Some(d) = &report.dominating {
            text.push_str(&allocation_table(&inst, d)?.render());
        }
        return Ok(Report::new(json, text, report.optimal));
    }
    let alpha = rational_flag(alpha)?;
    match Notion::parse(notion, orientation(&inst, flag), alpha.clone())? {
        Notion::Envy(c) => {
            if alpha.is_some() || witness.is_some() {
                return Err(Failure("--alpha and --witness apply to mms only".into()));
            }
            envy_report(&inst, &is_fair(&inst, &alloc, c)?)
        }
        Notion::Prop => prop_report(&inst, &alloc),
        Notion::Mms { alpha } => {
            let w = witness.map(|p| load::allocation(&p, &inst)).transpose()?;
            let source = match &w {
                Some(w) => MmsSource::LowerBound(w),
                None => MmsSource::Exact(opts),
            };
            mms_report(&check_alpha_mms(&inst, &alloc, &alpha, source)?)
        }
    }
}

fn envy_report(instance: &Instance, report: &FairnessReport) -> Result<Report> {
    let witnesses: Vec<Value> = report
        .witnesses
        .iter()
        .map(|w| {
            json!({
                "envious": w.envious + 1,
                "envied": w.envied + 1,
                "item": w.item.map(|t| instance.type_name(t)),
            })
        })
        .collect();
    let json = json!({
        "notion": report.criterion.short_name(),
        "orientation": report.criterion.orientation.name(),
        "fair": report.fair,
        "witnesses": witnesses,
    });
    let mut text = format!("{}: {}\n", report.criterion, verdict(report.fair, "fair", "unfair"));
    if !report.fair {
        let mut table = Table::new(&["envious", "envied", "item"]);
        for w in &report.witnesses {
            table.row(vec![
                (w.envious + 1).to_string(),
                (w.envied + 1).to_string(),
                w.item.map_or("-".into(), |t| instance.type_name(t).to_string()),
            ]);
        }
        text.push_str(&table.render());
    }
    Ok(Report::new(json, text, report.fair))
}

fn prop_report(instance: &Instance, allocation: &Allocation) -> Result<Report> {
    let mut agents = Vec::new();
    let mut table = Table::new(&["agent", "value", "prop", "verdict"]);
    let mut fair = true;
    for i in 0..instance.agents() {
        let value = instance.bundle_value(i, allocation.bundle(i))?;
        let share = prop_share(instance, i)?;
        let ok = value >= share;
        fair &= ok;
        table.row(vec![
            (i + 1).to_string(),
            display_short(&value),
            display_short(&share),
            verdict(ok, "pass", "fail"),
        ]);
        agents.push(json!({ "agent": i + 1, "value": r(&value), "prop": r(&share), "pass": ok }));
    }
    let json = json!({ "notion": "prop", "fair": fair, "agents": agents });
    let text = format!("prop: {}\n{}", verdict(fair, "fair", "unfair"), table.render());
    Ok(Report::new(json, text, fair))
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::Inconclusive => "inconclusive",
    }
}

fn mms_report(report: &AlphaMmsReport) -> Result<Report> {
    let mut table = Table::new(&["agent", "value", "mms", "exact", "ratio", "verdict"]);
    let mut agents = Vec::new();
    for (i, a) in report.agents.iter().enumerate() {
        table.row(vec![
            (i + 1).to_string(),
            display_short(&a.value),
            display_short(&a.mms),
            a.exact.to_string(),
            a.ratio.as_ref().map_or("-".into(), display_short),
            verdict_name(a.verdict).into(),
        ]);
        agents.push(json!({
            "agent": i + 1,
            "value": r(&a.value),
            "mms": r(&a.mms),
            "exact": a.exact,
            "ratio": a.ratio.as_ref().map(r),
            "verdict": verdict_name(a.verdict),
        }));
    }
    let overall = report.verdict();
    let json = json!({
        "notion": "mms",
        "alpha": r(&report.alpha),
        "verdict": verdict_name(overall),
        "fair": overall == Verdict::Pass,
        "agents": agents,
    });
    let text = format!("{}-mms: {}\n{}", report.alpha, verdict_name(overall), table.render());
    Ok(Report::new(json, text, overall == Verdict::Pass))
}

fn exists(
    opts: &SearchOptions,
    instance: &Path,
    notion: &str,
    flag: Option<OrientationArg>,
    alpha: Option<String>,
    all: bool,
) -> Result<Report> {
    let inst = load::instance(instance)?;
    let notion = Notion::parse(notion, orientation(&inst, flag), rational_flag(alpha)?)?;
    let cert = exists_fair(&inst, &notion, opts, all)?;
    let json = json!({
        "notion": notion.name(),
        "exists": cert.exists,
        "checked": cert.checked,
        "plan_count": cert.plan_count,
        "fair_count": cert.fair_count,
        "witness_index": cert.witness_index,
        "witness": cert.witness.as_ref().map(|w| allocation_to_value(&inst, w)),
    });
    let mut text = format!(
        "{}: {} ({} of {} allocations checked)\n",
        notion.name(),
        verdict(cert.exists, "exists", "does not exist"),
        cert.checked,
        cert.plan_count
    );
    if let Some(count) = cert.fair_count {
        text.push_str(&format!("fair allocations: {count}\n"));
    }
    if let (Some(w), Some(index)) = (&cert.witness, cert.witness_index) {
        text.push_str(&format!("first witness, index {index}:\n"));
        text.push_str(&allocation_table(&inst, w)?.render());
    }
    Ok(Report::new(json, text, cert.exists))
}

fn instance_table(instance: &Instance) -> Table {
    let mut table = Table::new(&["type", "copies", "values"]);
    for (t, ty) in instance.types().iter().enumerate() {
        let first = instance.value(0, t);
        let values = if (0..instance.agents()).all(|i| instance.value(i, t) == first) {
            format!("all {}", display_short(first))
        } else {
            (0..instance.agents())
                .map(|i| display_short(instance.value(i, t)))
                .collect::<Vec<_>>()
                .join(" ")
        };
        table.row(vec![ty.name.clone(), ty.copies.to_string(), values]);
    }
    table
}

enum Harness {
    Envy(BaseCriterion),
    Share(ShareKind),
}

fn parse_harness(request: &str) -> Result<Harness> {
    let bad = || Failure(format!("--check expects envy:efx|efl|ef1|ef or share:prop|mms, got `{request}`"));
    let (family, name) = request.split_once(':').ok_or_else(bad)?;
    match family {
        "envy" => BaseCriterion::ALL
            .into_iter()
            .find(|b| b.name() == name)
            .map(Harness::Envy)
            .ok_or_else(bad),
        "share" => match ShareKind::parse(name) {
            Some(k @ (ShareKind::Prop | ShareKind::Mms)) => Ok(Harness::Share(k)),
            _ => Err(bad()),
        },
        _ => Err(bad()),
    }
}

/// Runs the duality check on the given allocation, or on every allocation of
/// the instance when none is given.
fn harness(
    opts: &SearchOptions,
    instance: &Instance,
    allocation: Option<&Allocation>,
    request: &str,
) -> Result<(Value, String, bool)> {
    const SHOWN: usize = 10;
    let harness = parse_harness(request)?;
    let allocations = match allocation {
        Some(a) => vec![a.clone()],
        None => enumerate_allocations(instance, opts.cap)?,
    };
    let mut failures = Vec::new();
    for a in &allocations {
        let holds = match harness {
            Harness::Envy(base) => check_envy_duality(instance, a, base)?.holds(),
            Harness::Share(kind) => check_share_duality(instance, a, kind, opts)?.holds(),
        };
        if !holds {
            failures.push(a);
        }
    }
    let json = json!({
        "harness": request,
        "allocations": allocations.len(),
        "counterexamples": failures.len(),
        "examples": failures.iter().take(SHOWN).map(|a| bundles_value(instance, a)).collect::<Vec<_>>(),
    });
    let mut text = format!(
        "check {request}: {} allocations, {} counterexamples\n",
        allocations.len(),
        failures.len()
    );
    for a in failures.iter().take(SHOWN) {
        let bundles: Vec<String> = a.bundles.iter().map(|&b| set(instance, b)).collect();
        text.push_str(&format!("  {}\n", bundles.join(" ")));
    }
    Ok((json, text, failures.is_empty()))
}

fn dual(
    opts: &SearchOptions,
    instance: &Path,
    allocation: Option<PathBuf>,
    out_instance: Option<PathBuf>,
    out_allocation: Option<PathBuf>,
    check: Option<String>,
) -> Result<Report> {
    let inst = load::instance(instance)?;
    let alloc = allocation.map(|p| load::allocation(&p, &inst)).transpose()?;
    if out_allocation.is_some() && alloc.is_none() {
        return Err(Failure("--out-allocation needs --allocation".into()));
    }
    let pair = dualize(&inst, alloc.as_ref())?;
    if let Some(path) = &out_instance {
        write(path, &instance_to_string(&pair.instance))?;
    }
    if let (Some(path), Some(a)) = (&out_allocation, &pair.allocation) {
        write(path, &allocation_to_string(&pair.instance, a))?;
    }
    if !pair.dropped.is_empty() {
        let names: Vec<&str> = pair.dropped.iter().map(|d| d.name.as_str()).collect();
        eprintln!("note: types held by every agent vanish from the dual: {}", names.join(", "));
    }
    let checked = check
        .map(|request| harness(opts, &inst, alloc.as_ref(), &request))
        .transpose()?;

    let json = json!({
        "instance": instance_to_value(&pair.instance),
        "allocation": pair.allocation.as_ref().map(|a| allocation_to_value(&pair.instance, a)),
        "shifts": pair.shifts.iter().map(r).collect::<Vec<_>>(),
        "dropped": pair.dropped.iter().map(|d| json!({
            "name": d.name,
            "values": d.values.iter().map(r).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "check": checked.as_ref().map(|c| c.0.clone()),
    });
    let mut text = format!("dual instance ({})\n", pair.instance.sign_class());
    text.push_str(&instance_table(&pair.instance).render());
    if let Some(a) = &pair.allocation {
        text.push_str("dual allocation\n");
        text.push_str(&allocation_table(&pair.instance, a)?.render());
    }
    let shifts: Vec<String> = pair.shifts.iter().map(display_short).collect();
    text.push_str(&format!("shifts v_i(T): {}\n", shifts.join(" ")));
    let ok = match checked {
        Some((_, t, ok)) => {
            text.push_str(&t);
            ok
        }
        None => true,
    };
    Ok(Report::new(json, text, ok))
}

fn certificate_json(instance: &Instance, certificate: &Certificate) -> Value {
    match certificate {
        Certificate::None => Value::Null,
        Certificate::Allocation(a) => json!({ "type": "allocation", "bundles": bundles_value(instance, a) }),
        Certificate::Truncation { truncated } => json!({ "type": "truncation", "truncated": truncated }),
        Certificate::Prices(p) => json!({
            "type": "prices",
            "normalization": match p.normalization {
                PriceNormalization::PerType => "per-type",
                PriceNormalization::PerCopy => "per-copy",
            },
            "prices": p.prices.iter().enumerate().map(|(t, x)| json!({
                "type": instance.type_name(t),
                "price": r(x),
            })).collect::<Vec<_>>(),
        }),
    }
}

fn certificate_text(instance: &Instance, certificate: &Certificate) -> Result<String> {
    Ok(match certificate {
        Certificate::None => String::new(),
        Certificate::Allocation(a) => format!("partition:\n{}", allocation_table(instance, a)?.render()),
        Certificate::Truncation { truncated } => format!("copies truncated at the share: {truncated}\n"),
        Certificate::Prices(p) => {
            let mut table = Table::new(&["type", "price"]);
            for (t, x) in p.prices.iter().enumerate() {
                table.row(vec![instance.type_name(t).to_string(), display_short(x)]);
            }
            format!("prices:\n{}", table.render())
        }
    })
}

fn shares(
    opts: &SearchOptions,
    instance: &Path,
    agent: usize,
    kind: &str,
    entitlement: Option<String>,
    witness: Option<PathBuf>,
    normalization: NormalizationArg,
) -> Result<Report> {
    let inst = load::instance(instance)?;
    let i = agent_index(&inst, agent)?;
    let kind = ShareKind::parse(kind).ok_or_else(|| Failure(format!("unknown share kind `{kind}`")))?;
    if entitlement.is_some() && kind != ShareKind::Aps {
        return Err(Failure("--entitlement applies to aps only".into()));
    }
    if witness.is_some() && kind != ShareKind::Mms {
        return Err(Failure("--witness applies to mms only".into()));
    }
    let mut entitled = None;
    let (value, certificate, exact) = match kind {
        ShareKind::Prop => (prop_share(&inst, i)?, Certificate::None, true),
        ShareKind::Tps => {
            let s = tps_share(&inst, i)?;
            (s.value, s.certificate, true)
        }
        ShareKind::Mms => match witness {
            Some(path) => {
                let w = load::allocation(&path, &inst)?;
                (verify_mms_lower_bound(&inst, i, &w)?, Certificate::Allocation(w), false)
            }
            None => {
                let s = mms_share(&inst, i, opts)?;
                (s.value, s.certificate, true)
            }
        },
        ShareKind::Aps => {
            let b = rational_flag(entitlement)?
                .unwrap_or_else(|| Rational::new(1.into(), (inst.agents() as i64).into()));
            let s = aps_share(&inst, i, &b, normalization.into())?;
            entitled = Some(b);
            (s.value, s.certificate, true)
        }
    };
    let json = json!({
        "agent": agent,
        "kind": kind.name(),
        "value": r(&value),
        "exact": exact,
        "entitlement": entitled.as_ref().map(r),
        "certificate": certificate_json(&inst, &certificate),
    });
    let mut text = format!("agent {agent} {} = {}", kind.name(), display_short(&value));
    if let Some(b) = &entitled {
        text.push_str(&format!(" at entitlement {b}"));
    }
    if !exact {
        text.push_str(" (lower bound from witness)");
    }
    text.push('\n');
    text.push_str(&certificate_text(&inst, &certificate)?);
    Ok(Report::new(json, text, true))
}

fn mnw(opts: &SearchOptions, instance: &Path) -> Result<Report> {
    let inst = load::instance(instance)?;
    let (a, nw) = max_nash_welfare(&inst, opts)?;
    let values = (0..inst.agents())
        .map(|i| inst.bundle_value(i, a.bundle(i)).map(|v| r(&v)))
        .collect::<fairdual::Result<Vec<_>>>()?;
    let json = json!({
        "allocation": allocation_to_value(&inst, &a),
        "nash_welfare": r(&nw),
        "values": values,
    });
    let text = format!("nash welfare = {}\n{}", display_short(&nw), allocation_table(&inst, &a)?.render());
    Ok(Report::new(json, text, true))
}

fn leveled(instance: &Path, trace_path: Option<PathBuf>) -> Result<Report> {
    let inst = load::instance(instance)?;
    let (a, trace) = solve_leveled_efxwc(&inst)?;
    let psi = potential(&inst, &a)?;
    let bound = inst.agents() * inst.type_count() * inst.type_count();
    if let Some(path) = &trace_path {
        let steps: Vec<Value> = trace
            .steps
            .iter()
            .map(|s| {
                json!({
                    "envious": s.envious + 1,
                    "envied": s.envied + 1,
                    "g_max": inst.type_name(s.g_max),
                    "g_min": inst.type_name(s.g_min),
                    "psi_before": s.psi_before,
                    "psi_after": s.psi_after,
                })
            })
            .collect();
        let doc = json!({ "bound": bound, "steps": steps });
        write(path, &serde_json::to_string_pretty(&doc).expect("serializable"))?;
    }
    let json = json!({
        "allocation": allocation_to_value(&inst, &a),
        "swaps": trace.steps.len(),
        "potential": psi,
        "bound": bound,
    });
    let text = format!(
        "efx_wc allocation after {} swaps (potential {psi}, bound {bound})\n{}",
        trace.steps.len(),
        allocation_table(&inst, &a)?.render()
    );
    Ok(Report::new(json, text, true))
}

fn fixtures(opts: &SearchOptions, id: Option<String>, all: bool, list: bool) -> Result<Report> {
    if list {
        let ids = fixture_ids();
        let text = ids.iter().map(|id| format!("{id}\n")).collect();
        return Ok(Report::new(json!(ids), text, true));
    }
    let ids: Vec<String> = match id {
        Some(id) if !all => vec![id],
        _ => fixture_ids().into_iter().map(String::from).collect(),
    };
    let mut reports = Vec::new();
    let mut text = String::new();
    let mut passed = true;
    for id in &ids {
        let report = replicate(id, opts)?;
        passed &= report.passed();
        text.push_str(&format!(
            "{}  {}  {}\n",
            verdict(report.passed(), "PASS", "FAIL"),
            report.id,
            report.title
        ));
        for c in report.claims.iter().filter(|c| !c.passed) {
            text.push_str(&format!("      {}: {}\n", c.claim, c.detail));
        }
        reports.push(json!({
            "id": report.id,
            "title": report.title,
            "passed": report.passed(),
            "claims": report.claims.iter().map(|c| json!({
                "claim": c.claim,
                "passed": c.passed,
                "detail": c.detail,
            })).collect::<Vec<_>>(),
        }));
    }
    let json = json!({ "fixtures": reports, "passed": passed });
    Ok(Report::new(json, text, passed))
}

fn sweep(opts: &SearchOptions, config: SweepConfig, out: Option<PathBuf>) -> Result<Report> {
    if config.max_agents == 0 || config.max_types == 0 || config.max_value == 0 {
        return Err(Failure("--max-agents, --max-types and --max-value must be positive".into()));
    }
    if config.max_types > fairdual::model::MAX_TYPES {
        return Err(Error::TooManyTypes(config.max_types).into());
    }
    let report = run_sweep(&config, opts)?;
    let json = report.to_json();
    if let Some(path) = &out {
        write(path, &serde_json::to_string_pretty(&json).expect("serializable"))?;
    }
    let mut text = format!(
        "seed {}, {} instances, {} allocations\n",
        config.seed, config.instances, report.allocations
    );
    let mut table = Table::new(&["notion", "fair allocations", "min mms ratio"]);
    for s in &report.notions {
        table.row(vec![
            s.name.to_string(),
            s.fair_allocations.to_string(),
            s.min_ratio.as_ref().map_or("-".into(), display_short),
        ]);
    }
    text.push_str(&table.render());
    for v in &report.violations {
        text.push_str(&format!("violation: {} on instance {}\n", v.kind, v.instance_index));
    }
    text.push_str(&format!("{}\n", verdict(report.passed(), "PASS", "FAIL")));
    Ok(Report::new(json, text, report.passed()))
}
