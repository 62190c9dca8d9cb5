use crate::error::{invalid, Result};

/// Sum of absolute adjacent differences of an x-sorted value list.
pub fn total_variation(values: &[f64]) -> f64 {
    values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Fat-shattering dimension of BV(v) at scale t: `1 + ⌊v / (2t)⌋`.
pub fn fat_dim_bv(v: f64, t: f64) -> Result<u64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(invalid(format!("scale t = {t} must be positive")));
    }
    if !(v > 0.0) || !v.is_finite() {
        return Err(invalid(format!(
            "variation budget v = {v} must be positive"
        )));
    }
    Ok(1 + (v / (2.0 * t)).floor() as u64)
}

/// Fat-shattering dimension estimate for L-Lipschitz functions on a space of
/// diameter `diam` and doubling dimension `ddim`: `⌈c · ⌈L·diam/t⌉^ddim⌉`.
/// The leading constant `c` is not pinned down by theory; 1 is the default.
pub fn fat_dim_lipschitz(l: f64, diam: f64, ddim: f64, t: f64, c: f64) -> Result<u64> {
    for (name, val) in [("L", l), ("diam", diam), ("t", t), ("c", c)] {
        if !(val > 0.0) || !val.is_finite() {
            return Err(invalid(format!("{name} = {val} must be positive")));
        }
    }
    if !(ddim >= 0.0) || !ddim.is_finite() {
        return Err(invalid(format!("ddim = {ddim} must be nonnegative")));
    }
    let base = (l * diam / t).ceil();
    Ok((c * base.powf(ddim)).ceil() as u64)
}
