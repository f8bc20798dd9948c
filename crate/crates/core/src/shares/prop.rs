use num_bigint::BigInt;

use crate::error::Result;
use crate::model::Instance;
use crate::rational::Rational;

/// `v_i(M) / n`.
pub fn prop_share(instance: &Instance, agent: usize) -> Result<Rational> {
    instance.check_agent(agent)?;
    Ok(instance.total_value(agent) / Rational::from_integer(BigInt::from(instance.agents())))
}
