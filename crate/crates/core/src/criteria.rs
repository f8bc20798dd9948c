//! Envy-based comparison criteria, envy graphs and Pareto checks.
//!
//! A criterion compares an agent's own bundle `I` with another bundle `U`
//! under the agent's valuation. Goods forms:
//!
//! * EF: `v(I) >= v(U)`
//! * EF1: `U` is empty or `v(I) >= v(U \ {g})` for some `g` in `U`
//! * EFX: `v(I) >= v(U \ {g})` for every `g` in `U`
//! * EFL: `|U| <= 1` or `v(I) >= max(v(U \ {g}), v(g))` for some `g` in `U`
//!
//! The chores form of a criterion `f` is `f(-v, U, I)`. The without-commons
//! form first removes `I ∩ U` from both bundles. The chores form of EFL is
//! obtained only this way; there is no separate definition behind it.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{Allocation, Bundle, Instance, SignClass, Valuation};
use crate::search::{EnumerationPlan, SearchOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseCriterion {
    Ef,
    Ef1,
    Efx,
    Efl,
}

impl BaseCriterion {
    pub const ALL: [BaseCriterion; 4] = [
        BaseCriterion::Ef,
        BaseCriterion::Ef1,
        BaseCriterion::Efx,
        BaseCriterion::Efl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaseCriterion::Ef => "ef",
            BaseCriterion::Ef1 => "ef1",
            BaseCriterion::Efx => "efx",
            BaseCriterion::Efl => "efl",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Goods,
    Chores,
}

impl Orientation {
    pub fn flip(self) -> Orientation {
        match self {
            Orientation::Goods => Orientation::Chores,
            Orientation::Chores => Orientation::Goods,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Orientation::Goods => "goods",
            Orientation::Chores => "chores",
        }
    }
}

impl FromStr for Orientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "goods" => Ok(Orientation::Goods),
            "chores" => Ok(Orientation::Chores),
            other => Err(Error::UnknownNotion(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Criterion {
    pub base: BaseCriterion,
    pub orientation: Orientation,
    pub without_commons: bool,
}

impl Criterion {
    pub fn goods(base: BaseCriterion) -> Self {
        Criterion {
            base,
            orientation: Orientation::Goods,
            without_commons: false,
        }
    }

    pub fn chores(base: BaseCriterion) -> Self {
        Criterion {
            orientation: Orientation::Chores,
            ..Criterion::goods(base)
        }
    }

    pub fn wc(self) -> Self {
        Criterion {
            without_commons: true,
            ..self
        }
    }

    /// The same base and flag with the opposite orientation.
    pub fn complement(self) -> Self {
        Criterion {
            orientation: self.orientation.flip(),
            ..self
        }
    }

    /// Parses `ef`, `ef1`, `efx`, `efl`, each optionally suffixed by `_wc`.
    pub fn parse(text: &str, orientation: Orientation) -> Result<Self> {
        let lower = text.to_ascii_lowercase();
        let (stem, wc) = match lower.strip_suffix("_wc") {
            Some(stem) => (stem, true),
            None => (lower.as_str(), false),
        };
        let base = BaseCriterion::ALL
            .into_iter()
            .find(|b| b.name() == stem)
            .ok_or_else(|| Error::UnknownNotion(text.to_string()))?;
        Ok(Criterion {
            base,
            orientation,
            without_commons: wc,
        })
    }

    /// `efx_wc` style name, without the orientation.
    pub fn short_name(self) -> String {
        if self.without_commons {
            format!("{}_wc", self.base.name())
        } else {
            self.base.name().to_string()
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.short_name(), self.orientation.name())
    }
}

/// Evaluates the goods form on scaled integer values `sign * v`.
/// Returns `None` when fair, otherwise the offending item where one exists.
fn goods_violation(
    base: BaseCriterion,
    v: &Valuation,
    sign: i128,
    own: Bundle,
    other: Bundle,
) -> Option<Option<usize>> {
    let value = |b: Bundle| sign * v.of(b);
    let item = |t: usize| sign * v.item(t);
    let mine = value(own);
    let theirs = value(other);
    match base {
        BaseCriterion::Ef => (mine < theirs).then_some(None),
        BaseCriterion::Ef1 => {
            let ok = other.is_empty() || other.iter().any(|g| mine >= theirs - item(g));
            (!ok).then_some(None)
        }
        BaseCriterion::Efx => other
            .iter()
            .find(|&g| mine < theirs - item(g))
            .map(Some),
        BaseCriterion::Efl => {
            let ok = other.len() <= 1
                || other
                    .iter()
                    .any(|g| mine >= theirs - item(g) && mine >= item(g));
            (!ok).then_some(None)
        }
    }
}

/// Returns `None` when the criterion outputs fair, else the offending item
/// if the criterion names one (EFX only).
pub(crate) fn violation(
    c: Criterion,
    v: &Valuation,
    own: Bundle,
    other: Bundle,
) -> Option<Option<usize>> {
    let (own, other) = if c.without_commons {
        (own.difference(other), other.difference(own))
    } else {
        (own, other)
    };
    match c.orientation {
        Orientation::Goods => goods_violation(c.base, v, 1, own, other),
        Orientation::Chores => goods_violation(c.base, v, -1, other, own),
    }
}

/// True when the criterion outputs fair for an agent with valuation `v`
/// holding `own` and looking at `other`.
pub fn criterion_eval(c: Criterion, v: &Valuation, own: Bundle, other: Bundle) -> bool {
    violation(c, v, own, other).is_none()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Witness {
    pub envious: usize,
    pub envied: usize,
    pub item: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FairnessReport {
    pub criterion: Criterion,
    pub fair: bool,
    /// Violating pairs in lexicographic order.
    pub witnesses: Vec<Witness>,
}

pub fn check_orientation(instance: &Instance, orientation: Orientation, name: &str) -> Result<()> {
    let mismatch = || Error::OrientationMismatch {
        criterion: format!("{name} ({})", orientation.name()),
        instance: instance.sign_class().to_string(),
    };
    match (instance.sign_class(), orientation) {
        (SignClass::Mixed, _) => Err(Error::MixedInstance),
        (SignClass::Goods, Orientation::Chores) | (SignClass::Chores, Orientation::Goods) => {
            Err(mismatch())
        }
        _ => Ok(()),
    }
}

/// The orientation an instance implies, goods for all-zero instances.
pub fn infer_orientation(instance: &Instance) -> Result<Orientation> {
    match instance.sign_class() {
        SignClass::Goods | SignClass::Null => Ok(Orientation::Goods),
        SignClass::Chores => Ok(Orientation::Chores),
        SignClass::Mixed => Err(Error::MixedInstance),
    }
}

pub fn is_fair(instance: &Instance, allocation: &Allocation, c: Criterion) -> Result<FairnessReport> {
    instance.require_valid(allocation)?;
    check_orientation(instance, c.orientation, &c.short_name())?;
    let mut witnesses = Vec::new();
    for i in 0..instance.agents() {
        let v = instance.valuation(i);
        for j in 0..instance.agents() {
            if i == j {
                continue;
            }
            if let Some(item) = violation(c, v, allocation.bundle(i), allocation.bundle(j)) {
                witnesses.push(Witness {
                    envious: i,
                    envied: j,
                    item,
                });
            }
        }
    }
    Ok(FairnessReport {
        criterion: c,
        fair: witnesses.is_empty(),
        witnesses,
    })
}

/// Fast verdict for hot loops; assumes a valid allocation.
pub(crate) fn all_fair(instance: &Instance, bundles: &[Bundle], c: Criterion) -> bool {
    let n = bundles.len();
    (0..n).all(|i| {
        let v = instance.valuation(i);
        (0..n).all(|j| i == j || violation(c, v, bundles[i], bundles[j]).is_none())
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvyGraph {
    adjacency: Vec<Vec<bool>>,
}

impl EnvyGraph {
    pub fn new(instance: &Instance, allocation: &Allocation) -> Self {
        let n = allocation.agents();
        let adjacency = (0..n)
            .map(|i| {
                let v = instance.valuation(i);
                let mine = v.of(allocation.bundle(i));
                (0..n)
                    .map(|j| i != j && mine < v.of(allocation.bundle(j)))
                    .collect()
            })
            .collect();
        EnvyGraph { adjacency }
    }

    pub fn agents(&self) -> usize {
        self.adjacency.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i][j]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.agents();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.adjacency[i][j])
            .collect()
    }

    pub fn is_cycle(&self, cycle: &[usize]) -> bool {
        let n = self.agents();
        let distinct = cycle
            .iter()
            .enumerate()
            .all(|(k, a)| *a < n && !cycle[..k].contains(a));
        distinct
            && cycle.len() >= 2
            && (0..cycle.len()).all(|k| self.adjacency[cycle[k]][cycle[(k + 1) % cycle.len()]])
    }

    /// Some directed cycle, found by depth-first search from agent 0 upward.
    pub fn find_cycle(&self) -> Option<Vec<usize>> {
        let n = self.agents();
        // 0 = unseen, 1 = on stack, 2 = done
        let mut state = vec![0u8; n];
        let mut stack = Vec::new();
        for start in 0..n {
            if state[start] == 0 {
                if let Some(c) = self.dfs(start, &mut state, &mut stack) {
                    return Some(c);
                }
            }
        }
        None
    }

    fn dfs(&self, u: usize, state: &mut [u8], stack: &mut Vec<usize>) -> Option<Vec<usize>> {
        state[u] = 1;
        stack.push(u);
        for w in 0..self.agents() {
            if !self.adjacency[u][w] {
                continue;
            }
            if state[w] == 1 {
                let pos = stack.iter().position(|&x| x == w).expect("on stack");
                return Some(stack[pos..].to_vec());
            }
            if state[w] == 0 {
                if let Some(c) = self.dfs(w, state, stack) {
                    return Some(c);
                }
            }
        }
        stack.pop();
        state[u] = 2;
        None
    }
}

/// Passes bundles backwards along `cycle`: `cycle[k]` receives the bundle of
/// `cycle[k + 1]`.
pub fn cancel_envy_cycle(
    instance: &Instance,
    allocation: &Allocation,
    cycle: &[usize],
) -> Result<Allocation> {
    if cycle.is_empty() {
        return Ok(allocation.clone());
    }
    if !EnvyGraph::new(instance, allocation).is_cycle(cycle) {
        return Err(Error::NotACycle(cycle.iter().map(|a| a + 1).collect()));
    }
    let mut out = allocation.clone();
    for k in 0..cycle.len() {
        out.bundles[cycle[k]] = allocation.bundle(cycle[(k + 1) % cycle.len()]);
    }
    Ok(out)
}

/// Whether `better` gives every agent at least as much as `base`, and some
/// agent strictly more.
pub fn pareto_dominates(instance: &Instance, better: &Allocation, base: &Allocation) -> bool {
    dominates(instance, &better.bundles, &base.bundles)
}

fn dominates(instance: &Instance, better: &[Bundle], base: &[Bundle]) -> bool {
    let mut strict = false;
    for i in 0..instance.agents() {
        let v = instance.valuation(i);
        let (a, b) = (v.of(better[i]), v.of(base[i]));
        if a < b {
            return false;
        }
        strict |= a > b;
    }
    strict
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParetoReport {
    pub optimal: bool,
    /// The first dominating allocation in enumeration order.
    pub dominating: Option<Allocation>,
}

pub fn is_pareto_optimal(
    instance: &Instance,
    allocation: &Allocation,
    options: &SearchOptions,
) -> Result<ParetoReport> {
    instance.require_valid(allocation)?;
    let plan = EnumerationPlan::new(instance, options.cap)?;
    let found = plan.find_first(options, |bundles| {
        dominates(instance, bundles, &allocation.bundles)
    });
    Ok(ParetoReport {
        optimal: found.is_none(),
        dominating: found.map(|index| plan.allocation_at(index)),
    })
}
