//! Brute-force fat shattering on finite tables.
//!
//! Columns `c_1, …, c_k` are t-shattered with offsets `r` when for every
//! pattern `b ∈ {0,1}^k` some row takes value `≥ r_i + t` at `c_i` where
//! `b_i = 1` and `≤ r_i − t` where `b_i = 0`.
//!
//! When no offsets are given they are searched over `{v − t}` for the values
//! `v` in each column: raising `r_i` to the smallest value used by a 1-witness
//! minus `t` keeps every witness valid, so this finite set loses nothing.

use rayon::prelude::*;

use super::table::FunctionTable;
use crate::error::{invalid, Error, Result};

pub const MAX_CANDIDATES: usize = 20;
pub const DEFAULT_SUBSET_BUDGET: u64 = 5_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ShatteringCertificate {
    /// Shattered column indices.
    pub shattered: Vec<usize>,
    pub offsets: Vec<f64>,
    /// `witnesses[b]` is a row realizing pattern `b`, bit `i` of `b` for
    /// `shattered[i]`.
    pub witnesses: Vec<usize>,
}

impl ShatteringCertificate {
    /// Re-checks every witness against the table.
    pub fn verify(&self, table: &FunctionTable, t: f64) -> bool {
        let k = self.shattered.len();
        if self.offsets.len() != k || self.witnesses.len() != 1 << k {
            return false;
        }
        self.witnesses.iter().enumerate().all(|(b, &row)| {
            row < table.n_rows()
                && self
                    .shattered
                    .iter()
                    .zip(&self.offsets)
                    .enumerate()
                    .all(|(i, (&c, &r))| {
                        let v = table.value(row, c);
                        if b >> i & 1 == 1 {
                            v >= r + t
                        } else {
                            v <= r - t
                        }
                    })
        })
    }
}

/// Pattern bit of `v` against offset `r`, or `None` in the dead zone.
fn side(v: f64, r: f64, t: f64) -> Option<usize> {
    if v >= r + t {
        Some(1)
    } else if v <= r - t {
        Some(0)
    } else {
        None
    }
}

fn witnesses_for(
    table: &FunctionTable,
    cols: &[usize],
    offsets: &[f64],
    t: f64,
) -> Option<Vec<usize>> {
    let k = cols.len();
    let mut witnesses = vec![usize::MAX; 1 << k];
    let mut found = 0;
    for row in 0..table.n_rows() {
        let mut pattern = 0;
        let mut ok = true;
        for (i, (&c, &r)) in cols.iter().zip(offsets).enumerate() {
            match side(table.value(row, c), r, t) {
                Some(bit) => pattern |= bit << i,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && witnesses[pattern] == usize::MAX {
            witnesses[pattern] = row;
            found += 1;
        }
    }
    (found == 1 << k).then_some(witnesses)
}

struct Search<'a> {
    table: &'a FunctionTable,
    cols: &'a [usize],
    t: f64,
    candidates: Vec<Vec<f64>>,
    offsets: Vec<f64>,
}

impl Search<'_> {
    /// `patterns[row]` is the partial pattern over the first `depth` columns,
    /// `None` once the row falls in a dead zone.
    fn extend(&mut self, depth: usize, patterns: &[Option<u32>]) -> bool {
        if depth == self.cols.len() {
            return true;
        }
        let col = self.cols[depth];
        let need = 1usize << (depth + 1);
        let mut seen = vec![false; need];
        for ci in 0..self.candidates[depth].len() {
            let r = self.candidates[depth][ci];
            let next: Vec<Option<u32>> = patterns
                .iter()
                .enumerate()
                .map(|(row, p)| {
                    let p = (*p)?;
                    side(self.table.value(row, col), r, self.t).map(|b| p | (b as u32) << depth)
                })
                .collect();
            seen.iter_mut().for_each(|s| *s = false);
            let mut count = 0;
            for p in next.iter().flatten() {
                if !seen[*p as usize] {
                    seen[*p as usize] = true;
                    count += 1;
                }
            }
            if count < need {
                continue;
            }
            self.offsets[depth] = r;
            if self.extend(depth + 1, &next) {
                return true;
            }
        }
        false
    }
}

/// Certificate that `cols` are t-shattered, with the given offsets or with
/// searched ones.
pub fn is_t_shattered(
    table: &FunctionTable,
    cols: &[usize],
    t: f64,
    offsets: Option<&[f64]>,
) -> Result<Option<ShatteringCertificate>> {
    let k = cols.len();
    if k > MAX_CANDIDATES {
        return Err(invalid(format!(
            "{k} candidates exceed the limit of {MAX_CANDIDATES}"
        )));
    }
    if !(t > 0.0) {
        return Err(invalid(format!("scale t = {t} must be positive")));
    }
    if let Some(&c) = cols.iter().find(|&&c| c >= table.n_cols()) {
        return Err(invalid(format!("column {c} out of range")));
    }
    if let Some(r) = offsets {
        if r.len() != k {
            return Err(invalid("offset vector length differs from candidate count"));
        }
        return Ok(
            witnesses_for(table, cols, r, t).map(|witnesses| ShatteringCertificate {
                shattered: cols.to_vec(),
                offsets: r.to_vec(),
                witnesses,
            }),
        );
    }
    if table.n_rows() < 1 << k {
        return Ok(None);
    }
    let candidates = cols
        .iter()
        .map(|&c| {
            let mut v: Vec<f64> = table.column(c).into_iter().map(|x| x - t).collect();
            v.sort_by(f64::total_cmp);
            v.dedup();
            v
        })
        .collect();
    let mut search = Search {
        table,
        cols,
        t,
        candidates,
        offsets: vec![0.0; k],
    };
    let start = vec![Some(0u32); table.n_rows()];
    if !search.extend(0, &start) {
        return Ok(None);
    }
    let offsets = search.offsets;
    let witnesses = witnesses_for(table, cols, &offsets, t).ok_or_else(|| {
        Error::Internal("offset search returned an unshattered configuration".into())
    })?;
    Ok(Some(ShatteringCertificate {
        shattered: cols.to_vec(),
        offsets,
        witnesses,
    }))
}

/// Size-`k` sets all of whose `(k−1)`-subsets are in `prev` (sorted, each set sorted).
fn next_level(prev: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let known: std::collections::HashSet<&[usize]> = prev.iter().map(Vec::as_slice).collect();
    let mut out = Vec::new();
    for (i, a) in prev.iter().enumerate() {
        let k = a.len();
        for b in &prev[i + 1..] {
            if a[..k - 1] != b[..k - 1] {
                break;
            }
            let mut cand = a.clone();
            cand.push(b[k - 1]);
            let all_sub = (0..k - 1).all(|drop| {
                let sub: Vec<usize> = cand
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != drop)
                    .map(|(_, &c)| c)
                    .collect();
                known.contains(sub.as_slice())
            });
            if all_sub {
                out.push(cand);
            }
        }
    }
    out
}

/// Largest `k ≤ k_max` such that some `k` columns are t-shattered, together
/// with a certificate for one such set.
///
/// Shattering is hereditary, so level `k` only examines sets whose every
/// `(k−1)`-subset was shattered. Returns a budget error once more than
/// `budget` subsets would be examined.
pub fn fat_shattering_search(
    table: &FunctionTable,
    t: f64,
    k_max: usize,
    budget: u64,
) -> Result<(usize, ShatteringCertificate)> {
    let empty = ShatteringCertificate {
        shattered: vec![],
        offsets: vec![],
        witnesses: vec![0],
    };
    if table.n_rows() == 0 {
        return Ok((
            0,
            ShatteringCertificate {
                witnesses: vec![],
                ..empty
            },
        ));
    }
    let mut best = (0, empty);
    let mut level: Vec<Vec<usize>> = vec![vec![]];
    let mut spent: u64 = 0;
    for k in 1..=k_max.min(MAX_CANDIDATES) {
        let candidates = if k == 1 {
            (0..table.n_cols()).map(|c| vec![c]).collect()
        } else {
            next_level(&level)
        };
        if candidates.is_empty() || table.n_rows() < 1 << k {
            break;
        }
        spent += candidates.len() as u64;
        if spent > budget {
            return Err(Error::Budget {
                budget,
                best: best.0,
            });
        }
        let hits: Vec<(Vec<usize>, Option<ShatteringCertificate>)> = candidates
            .into_par_iter()
            .map(|c| {
                let cert = is_t_shattered(table, &c, t, None);
                (c, cert)
            })
            .map(|(c, cert)| cert.map(|cert| (c, cert)))
            .collect::<Result<Vec<_>>>()?;
        let mut shattered = Vec::new();
        let mut first: Option<ShatteringCertificate> = None;
        for (c, cert) in hits {
            if let Some(cert) = cert {
                first.get_or_insert(cert);
                shattered.push(c);
            }
        }
        match first {
            Some(cert) => best = (k, cert),
            None => break,
        }
        level = shattered;
    }
    Ok(best)
}

/// [`fat_shattering_search`] with the default budget, returning only `k`.
pub fn fat_shattering_dim(table: &FunctionTable, t: f64, k_max: usize) -> Result<usize> {
    fat_shattering_search(table, t, k_max, DEFAULT_SUBSET_BUDGET).map(|(k, _)| k)
}

/// Dual dimension: rows shattered by columns.
pub fn dual_fat_shattering_dim(table: &FunctionTable, t: f64, k_max: usize) -> Result<usize> {
    fat_shattering_dim(&table.dual(), t, k_max)
}
