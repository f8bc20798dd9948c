//! Share-based notions: PROP, MMS, TPS and APS.

mod aps;
pub mod lp;
mod mms;
mod prop;
mod tps;

pub use aps::{
    aps_copy_shift_check, aps_share, aps_value_at_prices, check_aps_entitlement_duality,
    check_entitlement, ApsDualityAgent, ApsDualityReport, CopyShiftReport, PriceNormalization,
    PriceVector, APS_MAX_TYPES,
};
pub use mms::{
    check_alpha_mms, mms_all, mms_share, verify_mms_lower_bound, AgentMms, AlphaMmsReport,
    MmsSource, Verdict,
};
pub use prop::prop_share;
pub use tps::{tps_share, truncated_mean};

use crate::model::Allocation;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    None,
    /// An allocation whose worst bundle attains the share.
    Allocation(Allocation),
    /// Number of item copies truncated at the share level.
    Truncation { truncated: usize },
    Prices(PriceVector),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareValue {
    pub value: Rational,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShareKind {
    Prop,
    Mms,
    Tps,
    Aps,
}

impl ShareKind {
    pub fn parse(text: &str) -> Option<ShareKind> {
        match text.to_ascii_lowercase().as_str() {
            "prop" => Some(ShareKind::Prop),
            "mms" => Some(ShareKind::Mms),
            "tps" => Some(ShareKind::Tps),
            "aps" => Some(ShareKind::Aps),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ShareKind::Prop => "prop",
            ShareKind::Mms => "mms",
            ShareKind::Tps => "tps",
            ShareKind::Aps => "aps",
        }
    }
}
