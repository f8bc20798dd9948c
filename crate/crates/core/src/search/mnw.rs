use num_bigint::BigInt;
use num_traits::One;

use super::{EnumerationPlan, SearchOptions};
use crate::criteria::{check_orientation, Orientation};
use crate::error::Result;
use crate::model::{Allocation, Instance};
use crate::rational::Rational;

/// Allocation maximizing `prod_i v_i(A_i)`, first in enumeration order among
/// ties, with its Nash welfare.
pub fn max_nash_welfare(instance: &Instance, options: &SearchOptions) -> Result<(Allocation, Rational)> {
    check_orientation(instance, Orientation::Goods, "mnw")?;
    let plan = EnumerationPlan::new(instance, options.cap)?;
    let n = instance.agents();
    // products of scaled values share the denominator prod_i denom_i
    let (best, index) = plan.argmax(options, |bundles| {
        (0..n).fold(BigInt::one(), |acc, i| {
            acc * BigInt::from(instance.valuation(i).of(bundles[i]))
        })
    });
    let denom = (0..n).fold(BigInt::one(), |acc, i| acc * instance.valuation(i).denom());
    Ok((plan.allocation_at(index), Rational::new(best, denom)))
}
