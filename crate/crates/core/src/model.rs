//! Instances, bundles and allocations.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{lcm_of_denominators, Rational};

/// Bundles are bitmasks over type indices, so this is the hard limit on `|T|`.
pub const MAX_TYPES: usize = 64;

/// Scaled per-item magnitudes above this are rejected so that bundle sums and
/// their differences stay far inside `i128`.
const VALUE_LIMIT_BITS: u64 = 100;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItemType {
    pub name: String,
    pub copies: usize,
}

impl ItemType {
    pub fn new(name: impl Into<String>, copies: usize) -> Self {
        ItemType {
            name: name.into(),
            copies,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ItemKind {
    Good,
    Chore,
    /// Worth zero to everyone; compatible with either orientation.
    Null,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignClass {
    Goods,
    Chores,
    Null,
    Mixed,
}

impl fmt::Display for SignClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SignClass::Goods => "goods",
            SignClass::Chores => "chores",
            SignClass::Null => "all-zero",
            SignClass::Mixed => "mixed goods/chores",
        })
    }
}

/// A set of item types, at most one copy of each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Bundle(pub u64);

impl Bundle {
    pub const EMPTY: Bundle = Bundle(0);

    /// The bundle holding every one of the first `types` types.
    pub fn full(types: usize) -> Bundle {
        if types >= 64 {
            Bundle(u64::MAX)
        } else {
            Bundle((1u64 << types) - 1)
        }
    }

    pub fn singleton(t: usize) -> Bundle {
        Bundle(1u64 << t)
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Bundle {
        indices.into_iter().fold(Bundle::EMPTY, |b, t| b.with(t))
    }

    pub fn contains(self, t: usize) -> bool {
        t < 64 && self.0 >> t & 1 == 1
    }

    pub fn with(self, t: usize) -> Bundle {
        Bundle(self.0 | 1u64 << t)
    }

    pub fn without(self, t: usize) -> Bundle {
        Bundle(self.0 & !(1u64 << t))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Bundle) -> Bundle {
        Bundle(self.0 | other.0)
    }

    pub fn intersection(self, other: Bundle) -> Bundle {
        Bundle(self.0 & other.0)
    }

    pub fn difference(self, other: Bundle) -> Bundle {
        Bundle(self.0 & !other.0)
    }

    pub fn complement(self, types: usize) -> Bundle {
        Bundle::full(types).difference(self)
    }

    pub fn is_subset(self, other: Bundle) -> bool {
        self.0 & !other.0 == 0
    }

    /// Type indices in increasing order.
    pub fn iter(self) -> BundleIter {
        BundleIter(self.0)
    }
}

pub struct BundleIter(u64);

impl Iterator for BundleIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let t = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Allocation {
    pub bundles: Vec<Bundle>,
}

impl Allocation {
    pub fn new(bundles: Vec<Bundle>) -> Self {
        Allocation { bundles }
    }

    pub fn from_indices(bundles: &[&[usize]]) -> Self {
        Allocation::new(
            bundles
                .iter()
                .map(|b| Bundle::from_indices(b.iter().copied()))
                .collect(),
        )
    }

    pub fn bundle(&self, agent: usize) -> Bundle {
        self.bundles[agent]
    }

    pub fn agents(&self) -> usize {
        self.bundles.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AllocationViolation {
    WrongBundleCount { expected: usize, found: usize },
    UnknownTypeIndex { agent: usize, index: usize },
    CopyCount {
        name: String,
        expected: usize,
        found: usize,
    },
}

impl fmt::Display for AllocationViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AllocationViolation::WrongBundleCount { expected, found } => {
                write!(f, "expected {expected} bundles, found {found}")
            }
            AllocationViolation::UnknownTypeIndex { agent, index } => {
                write!(f, "bundle of agent {} holds unknown type index {index}", agent + 1)
            }
            AllocationViolation::CopyCount {
                name,
                expected,
                found,
            } => write!(
                f,
                "type `{name}` allocated {found} times, but has {expected} copies"
            ),
        }
    }
}

/// One agent's values over a common denominator: `v(t) = nums[t] / denom`.
///
/// Bundle values of a single agent can then be summed and compared as plain
/// integers. Values of different agents are not comparable in this form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Valuation {
    nums: Vec<i128>,
    denom: BigInt,
}

impl Valuation {
    pub fn new(values: &[Rational]) -> Option<Valuation> {
        let denom = lcm_of_denominators(values);
        let mut nums = Vec::with_capacity(values.len());
        for v in values {
            let scaled = v.numer() * (&denom / v.denom());
            if scaled.bits() > VALUE_LIMIT_BITS {
                return None;
            }
            nums.push(scaled.to_i128()?);
        }
        if denom.bits() > VALUE_LIMIT_BITS {
            return None;
        }
        Some(Valuation { nums, denom })
    }

    pub fn negated(&self) -> Valuation {
        Valuation {
            nums: self.nums.iter().map(|x| -x).collect(),
            denom: self.denom.clone(),
        }
    }

    pub fn item(&self, t: usize) -> i128 {
        self.nums[t]
    }

    pub fn items(&self) -> &[i128] {
        &self.nums
    }

    pub fn of(&self, bundle: Bundle) -> i128 {
        bundle.iter().map(|t| self.nums[t]).sum()
    }

    pub fn to_rational(&self, scaled: i128) -> Rational {
        Rational::new(BigInt::from(scaled), self.denom.clone())
    }

    pub fn denom(&self) -> &BigInt {
        &self.denom
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    agents: usize,
    types: Vec<ItemType>,
    values: Vec<Vec<Rational>>,
    kinds: Vec<ItemKind>,
    valuations: Vec<Valuation>,
}

impl Instance {
    /// `values[i][t]` is agent `i`'s value for one copy of type `t`.
    pub fn new(agents: usize, types: Vec<ItemType>, values: Vec<Vec<Rational>>) -> Result<Self> {
        if agents == 0 {
            return Err(Error::NoAgents);
        }
        if types.len() > MAX_TYPES {
            return Err(Error::TooManyTypes(types.len()));
        }
        for (k, ty) in types.iter().enumerate() {
            if types[..k].iter().any(|o| o.name == ty.name) {
                return Err(Error::DuplicateType(ty.name.clone()));
            }
            if ty.copies == 0 || ty.copies > agents {
                return Err(Error::Copies {
                    name: ty.name.clone(),
                    copies: ty.copies,
                    agents,
                });
            }
        }
        if values.len() != agents {
            return Err(Error::field(
                "values",
                format!("expected rows for {agents} agents, found {}", values.len()),
            ));
        }
        for row in &values {
            if row.len() != types.len() {
                return Err(Error::field(
                    "values",
                    format!("expected {} values per agent, found {}", types.len(), row.len()),
                ));
            }
        }
        let mut kinds = Vec::with_capacity(types.len());
        for (t, ty) in types.iter().enumerate() {
            let pos = values.iter().any(|row| row[t].is_positive());
            let neg = values.iter().any(|row| row[t].is_negative());
            kinds.push(match (pos, neg) {
                (true, true) => return Err(Error::MixedSignType(ty.name.clone())),
                (true, false) => ItemKind::Good,
                (false, true) => ItemKind::Chore,
                (false, false) => ItemKind::Null,
            });
        }
        let valuations = values
            .iter()
            .enumerate()
            .map(|(agent, row)| Valuation::new(row).ok_or(Error::ValueRange { agent: agent + 1 }))
            .collect::<Result<Vec<_>>>()?;
        Ok(Instance {
            agents,
            types,
            values,
            kinds,
            valuations,
        })
    }

    pub fn agents(&self) -> usize {
        self.agents
    }

    pub fn types(&self) -> &[ItemType] {
        &self.types
    }

    pub fn type_count(&self) -> usize {
        self.types.len()
    }

    pub fn copies(&self, t: usize) -> usize {
        self.types[t].copies
    }

    pub fn value(&self, agent: usize, t: usize) -> &Rational {
        &self.values[agent][t]
    }

    pub fn values(&self, agent: usize) -> &[Rational] {
        &self.values[agent]
    }

    pub fn value_matrix(&self) -> &[Vec<Rational>] {
        &self.values
    }

    pub fn valuation(&self, agent: usize) -> &Valuation {
        &self.valuations[agent]
    }

    pub fn kind(&self, t: usize) -> ItemKind {
        self.kinds[t]
    }

    pub fn sign_class(&self) -> SignClass {
        let goods = self.kinds.contains(&ItemKind::Good);
        let chores = self.kinds.contains(&ItemKind::Chore);
        match (goods, chores) {
            (true, true) => SignClass::Mixed,
            (true, false) => SignClass::Goods,
            (false, true) => SignClass::Chores,
            (false, false) => SignClass::Null,
        }
    }

    pub fn is_single_copy(&self) -> bool {
        self.types.iter().all(|t| t.copies == 1)
    }

    pub fn type_index(&self, name: &str) -> Option<usize> {
        self.types.iter().position(|t| t.name == name)
    }

    pub fn type_name(&self, t: usize) -> &str {
        &self.types[t].name
    }

    /// The set `T` of all types, one copy each.
    pub fn all_types(&self) -> Bundle {
        Bundle::full(self.types.len())
    }

    pub fn bundle_from_names<S: AsRef<str>>(&self, names: &[S]) -> Result<Bundle> {
        names.iter().try_fold(Bundle::EMPTY, |b, name| {
            let name = name.as_ref();
            self.type_index(name)
                .map(|t| b.with(t))
                .ok_or_else(|| Error::UnknownType(name.to_string()))
        })
    }

    pub fn bundle_names(&self, bundle: Bundle) -> Vec<&str> {
        bundle.iter().map(|t| self.type_name(t)).collect()
    }

    pub fn bundle_value(&self, agent: usize, bundle: Bundle) -> Result<Rational> {
        self.check_agent(agent)?;
        if let Some(t) = bundle.iter().find(|&t| t >= self.types.len()) {
            return Err(Error::UnknownType(format!("#{t}")));
        }
        let v = &self.valuations[agent];
        Ok(v.to_rational(v.of(bundle)))
    }

    /// `v_i(T)`: one copy of every type.
    pub fn type_set_value(&self, agent: usize) -> Rational {
        self.values[agent].iter().sum()
    }

    /// `v_i(M)`: every copy of every type.
    pub fn total_value(&self, agent: usize) -> Rational {
        self.values[agent]
            .iter()
            .zip(&self.types)
            .map(|(v, ty)| v * Rational::from_integer(ty.copies.into()))
            .sum()
    }

    pub fn check_agent(&self, agent: usize) -> Result<()> {
        if agent >= self.agents {
            return Err(Error::UnknownAgent {
                agent: agent + 1,
                agents: self.agents,
            });
        }
        Ok(())
    }

    pub fn validate_allocation(
        &self,
        allocation: &Allocation,
    ) -> std::result::Result<(), Vec<AllocationViolation>> {
        let mut violations = Vec::new();
        if allocation.bundles.len() != self.agents {
            violations.push(AllocationViolation::WrongBundleCount {
                expected: self.agents,
                found: allocation.bundles.len(),
            });
        }
        let known = self.all_types();
        for (agent, b) in allocation.bundles.iter().enumerate() {
            for index in b.difference(known).iter() {
                violations.push(AllocationViolation::UnknownTypeIndex { agent, index });
            }
        }
        for (t, ty) in self.types.iter().enumerate() {
            let found = allocation.bundles.iter().filter(|b| b.contains(t)).count();
            if found != ty.copies {
                violations.push(AllocationViolation::CopyCount {
                    name: ty.name.clone(),
                    expected: ty.copies,
                    found,
                });
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    pub fn require_valid(&self, allocation: &Allocation) -> Result<()> {
        self.validate_allocation(allocation)
            .map_err(Error::InvalidAllocation)
    }

    /// Whether larger bundles are always strictly better for `agent`.
    pub fn is_leveled(&self, agent: usize) -> Result<bool> {
        Ok(self.leveled_violation(agent)?.is_none())
    }

    /// The first cardinality pair `(m, m + 1)` for which some bundle of size
    /// `m` is worth at least as much as some bundle of size `m + 1`.
    pub fn leveled_violation(&self, agent: usize) -> Result<Option<(usize, usize)>> {
        self.check_agent(agent)?;
        let v = &self.valuations[agent];
        if v.items().iter().any(|&x| x < 0) {
            return Err(Error::NegativeValues { agent: agent + 1 });
        }
        let mut sorted = v.items().to_vec();
        sorted.sort_unstable();
        let count = sorted.len();
        let mut smallest = 0i128;
        let mut largest = 0i128;
        for m in 0..count {
            smallest += sorted[m];
            if m > 0 {
                largest += sorted[count - m];
            }
            // smallest = sum of the m+1 smallest, largest = sum of the m largest
            if smallest <= largest {
                return Ok(Some((m, m + 1)));
            }
        }
        Ok(None)
    }

    /// Agent `agent`'s value for bundle as an exact rational, for a bundle
    /// known to be valid.
    pub(crate) fn value_of(&self, agent: usize, bundle: Bundle) -> Rational {
        let v = &self.valuations[agent];
        v.to_rational(v.of(bundle))
    }

    pub fn is_zero_type(&self, t: usize) -> bool {
        self.values.iter().all(|row| row[t].is_zero())
    }
}
