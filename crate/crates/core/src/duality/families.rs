//! Explicit families whose dual classes are large at scale `t`.

use super::gray::{balanced_gray_code, MAX_GRAY_BITS};
use super::shatter::{is_t_shattered, ShatteringCertificate};
use super::table::FunctionTable;
use crate::error::{invalid, Error, Result};
use crate::learners::{bv_erm, MidpointExtension, StepFunction};
use crate::types::Point;

/// Relative slack on packing distances to absorb coordinate round-off.
pub const PACKING_TOLERANCE: f64 = 1e-12;

/// Functions as table rows, points as columns, and a certificate that the
/// functions themselves (columns of the dual table) are t-shattered with
/// zero offsets.
#[derive(Debug, Clone)]
pub struct ShatteredFamily {
    pub table: FunctionTable,
    pub certificate: ShatteringCertificate,
}

#[derive(Debug, Clone)]
pub struct BvFamily {
    pub family: ShatteredFamily,
    /// Left-continuous step versions, each in BV(v).
    pub functions: Vec<StepFunction>,
}

fn certify(table: FunctionTable, t: f64) -> Result<ShatteredFamily> {
    let k = table.n_rows();
    let cols: Vec<usize> = (0..k).collect();
    let certificate = is_t_shattered(&table.dual(), &cols, t, Some(&vec![0.0; k]))?
        .ok_or_else(|| Error::Internal("constructed family is not shattered".into()))?;
    Ok(ShatteredFamily { table, certificate })
}

/// `n = ⌊log₂(v/t)⌋` functions on the grid `x_j = j/2^n`, taking value `+t`
/// where column `i` of a balanced Gray code is 1 and `−t` elsewhere.
pub fn bv_shattered_family(v: f64, t: f64) -> Result<BvFamily> {
    if !(t > 0.0) || !v.is_finite() || !(4.0 * t < v) {
        return Err(invalid(format!("need 0 < 4t < v, got v = {v}, t = {t}")));
    }
    let n = (v / t).log2().floor() as usize;
    if n > MAX_GRAY_BITS {
        return Err(Error::Unsupported(format!(
            "v/t = {} needs a {n}-bit Gray code",
            v / t
        )));
    }
    let code = balanced_gray_code(n)?;
    let size = 1usize << n;
    let grid: Vec<Point> = (1..=size)
        .map(|j| Point::scalar(j as f64 / size as f64))
        .collect();
    let values: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..size)
                .map(|j| if code.get(j, i) == 1 { t } else { -t })
                .collect()
        })
        .collect();
    let functions = values
        .iter()
        .map(|row| {
            let pts: Vec<(Point, f64)> = grid.iter().cloned().zip(row.iter().copied()).collect();
            bv_erm(&pts, v)
        })
        .collect::<Result<Vec<_>>>()?;
    let family = certify(FunctionTable::with_points(values, grid)?, t)?;
    Ok(BvFamily { family, functions })
}

#[derive(Debug, Clone)]
pub struct LipschitzFamily {
    pub family: ShatteredFamily,
    /// Unclamped midpoint extensions to the whole space.
    pub functions: Vec<MidpointExtension>,
}

/// `⌊log₂ m⌋` functions on a `2t/L`-packing of `m` points: function `i` is
/// `+t` at `p_j` when bit `i` of `j mod 2^k` is set and `−t` otherwise. Every
/// pattern appears because `j mod 2^k` covers `0..2^k`.
pub fn lipschitz_shattered_family(packing: &[Point], l: f64, t: f64) -> Result<LipschitzFamily> {
    if packing.len() < 2 {
        return Err(invalid("packing needs at least two points"));
    }
    if !(l > 0.0) || !(t > 0.0) {
        return Err(invalid("L and t must be positive"));
    }
    let sep = 2.0 * t / l;
    for i in 0..packing.len() {
        for j in i + 1..packing.len() {
            let d = packing[i].distance(&packing[j]);
            if d < sep * (1.0 - PACKING_TOLERANCE) {
                return Err(invalid(format!(
                    "points {i} and {j} are {d} apart, below the packing radius {sep}"
                )));
            }
        }
    }
    let m = packing.len();
    let k = m.ilog2() as usize;
    let values: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            (0..m)
                .map(|j| if (j % (1 << k)) >> i & 1 == 1 { t } else { -t })
                .collect()
        })
        .collect();
    let functions = values
        .iter()
        .map(|row| {
            MidpointExtension::unclamped(
                packing.iter().cloned().zip(row.iter().copied()).collect(),
                l,
            )
        })
        .collect();
    let family = certify(FunctionTable::with_points(values, packing.to_vec())?, t)?;
    Ok(LipschitzFamily { family, functions })
}
