//! Geometric-rank estimation through extension towers: count |Z_k| over
//! GF(q^l) for l = 1..l_max and read the dimension off the last successive
//! count ratio. The raw log_{q^l}(count) converges too slowly (union-of-
//! components constant factors shift it by log_q(const)); the ratio of
//! consecutive counts cancels those constants.

use crate::error::{Error, Result};
use crate::ranks::{analytic_rank_zero_count, GREstimate};
use crate::tensor::{base_change, Tensor};
use num_traits::ToPrimitive;

pub fn geometric_rank_estimate(
    t: &Tensor,
    k: usize,
    l_max: usize,
    budget: u128,
) -> Result<GREstimate> {
    if l_max < 2 {
        return Err(Error::InvalidInput(format!(
            "tower needs l_max >= 2, got {l_max}"
        )));
    }
    let q = t.field().q();
    let mut levels = Vec::with_capacity(l_max);
    let mut m = 0u32;
    for l in 1..=l_max {
        let (native, _) = base_change(t, l)?;
        let ar = analytic_rank_zero_count(&native, k, budget)?;
        m = ar.m();
        levels.push((l, ar.zero_count().clone()));
    }
    let last = levels[l_max - 1].1.to_f64().expect("count fits f64");
    let prev = levels[l_max - 2].1.to_f64().expect("count fits f64");
    let log_ratio = (last / prev).ln() / (q as f64).ln();
    let dim_estimate = log_ratio.round() as i64;
    let residual = (log_ratio - dim_estimate as f64).abs();
    if residual >= 0.5 {
        return Err(Error::Inconclusive { residual });
    }
    Ok(GREstimate {
        q,
        m,
        mode: k,
        levels,
        dim_estimate,
        gr: m as i64 - dim_estimate,
        residual,
    })
}
