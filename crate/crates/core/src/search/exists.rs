use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::{EnumerationPlan, SearchOptions};
use crate::criteria::{all_fair, check_orientation, BaseCriterion, Criterion, Orientation};
use crate::duality::dualize;
use crate::error::{Error, Result};
use crate::model::{Allocation, Instance, SignClass, Valuation};
use crate::rational::Rational;
use crate::shares::{mms_all, prop_share};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Notion {
    Envy(Criterion),
    Prop,
    /// `v_i(A_i) >= alpha * MMS_i` for every agent.
    Mms { alpha: Rational },
}

impl Notion {
    /// `prop`, `mms`, or an envy criterion name such as `efx_wc`.
    pub fn parse(text: &str, orientation: Orientation, alpha: Option<Rational>) -> Result<Self> {
        match text.to_ascii_lowercase().as_str() {
            "prop" => Ok(Notion::Prop),
            "mms" => Ok(Notion::Mms {
                alpha: alpha.unwrap_or_else(|| Rational::from_integer(1.into())),
            }),
            _ => Criterion::parse(text, orientation).map(Notion::Envy),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Notion::Envy(c) => c.to_string(),
            Notion::Prop => "prop".into(),
            Notion::Mms { alpha } => format!("{alpha}-mms"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExistenceCertificate {
    pub exists: bool,
    /// First fair allocation in enumeration order.
    pub witness: Option<Allocation>,
    pub witness_index: Option<u64>,
    /// Allocations examined: up to and including the witness, or the whole
    /// plan for a refutation or a full count.
    pub checked: u64,
    pub plan_count: u64,
    /// Number of fair allocations, when a full count was requested.
    pub fair_count: Option<u64>,
}

/// The least integer `x` with `x / v.denom() >= r`, saturated to `i128`.
pub fn scaled_threshold(v: &Valuation, r: &Rational) -> i128 {
    let scaled = r * Rational::from_integer(v.denom().clone());
    let ceil: BigInt = scaled.numer().div_ceil(scaled.denom());
    ceil.to_i128().unwrap_or(if ceil.sign() == num_bigint::Sign::Minus {
        i128::MIN
    } else {
        i128::MAX
    })
}

pub fn exists_fair(
    instance: &Instance,
    notion: &Notion,
    options: &SearchOptions,
    count_all: bool,
) -> Result<ExistenceCertificate> {
    let plan = EnumerationPlan::new(instance, options.cap)?;
    let thresholds: Vec<i128> = match notion {
        Notion::Envy(c) => {
            check_orientation(instance, c.orientation, &c.short_name())?;
            Vec::new()
        }
        Notion::Prop => (0..instance.agents())
            .map(|i| Ok(scaled_threshold(instance.valuation(i), &prop_share(instance, i)?)))
            .collect::<Result<_>>()?,
        Notion::Mms { alpha } => {
            if *alpha <= Rational::from_integer(0.into()) {
                return Err(Error::Alpha(alpha.to_string()));
            }
            mms_all(instance, options)?
                .iter()
                .enumerate()
                .map(|(i, m)| scaled_threshold(instance.valuation(i), &(alpha * m)))
                .collect()
        }
    };
    let pred = |bundles: &[crate::model::Bundle]| match notion {
        Notion::Envy(c) => all_fair(instance, bundles, *c),
        _ => bundles
            .iter()
            .enumerate()
            .all(|(i, &b)| instance.valuation(i).of(b) >= thresholds[i]),
    };
    let first = plan.find_first(options, pred);
    let fair_count = count_all.then(|| plan.count_matching(options, pred));
    Ok(ExistenceCertificate {
        exists: first.is_some(),
        witness: first.map(|i| plan.allocation_at(i)),
        witness_index: first,
        checked: match (count_all, first) {
            (false, Some(i)) => i + 1,
            _ => plan.count(),
        },
        plan_count: plan.count(),
        fair_count,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterizationReport {
    /// An EFX allocation of the chores exists.
    pub chores_efx: bool,
    /// An EFX_WC allocation of the dual goods (`n - 1` copies each) exists.
    pub goods_efx_wc: bool,
}

impl CharacterizationReport {
    pub fn holds(&self) -> bool {
        self.chores_efx == self.goods_efx_wc
    }
}

/// For single-copy chores: EFX exists iff EFX_WC exists for the dual goods.
pub fn check_chores_characterization(
    instance: &Instance,
    options: &SearchOptions,
) -> Result<CharacterizationReport> {
    if !matches!(instance.sign_class(), SignClass::Chores | SignClass::Null) {
        return Err(Error::OrientationMismatch {
            criterion: "efx (chores)".into(),
            instance: instance.sign_class().to_string(),
        });
    }
    if !instance.is_single_copy() {
        return Err(Error::Unsupported(
            "the characterization is stated for single-copy chores".into(),
        ));
    }
    let chores = exists_fair(
        instance,
        &Notion::Envy(Criterion::chores(BaseCriterion::Efx)),
        options,
        false,
    )?;
    let dual = dualize(instance, None)?;
    let goods = exists_fair(
        &dual.instance,
        &Notion::Envy(Criterion::goods(BaseCriterion::Efx).wc()),
        options,
        false,
    )?;
    Ok(CharacterizationReport {
        chores_efx: chores.exists,
        goods_efx_wc: goods.exists,
    })
}
