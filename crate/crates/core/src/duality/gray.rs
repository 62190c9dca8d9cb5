//! Column variation of binary matrices and balanced Gray codes.
//!
//! `V(M, i)` counts disagreements between consecutive rows `j, j+1` for
//! `j = 1..m−1`; there is no wrap-around pair.
//!
//! A balanced code keeps every column's flip count at most `⌈2^n/n⌉`. In the
//! BV construction each function flips between `±t` once per column flip, so
//! its variation is at most `2t⌈2^n/n⌉`; with `2^n ≤ v/t` and `n ≥ 2` this is
//! at most `v` (for n = 2, 3, 4, 5 it is `4t, 6t, 8t, 14t` against `v ≥ 4t, 8t,
//! 16t, 32t`).

use super::table::BinaryMatrix;
use crate::error::{Error, Result};

pub const MAX_GRAY_BITS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixVariation {
    pub per_column: Vec<usize>,
    /// `G(M) = Σ_i V(M, i)`.
    pub total: usize,
    /// `V(M) = max_i V(M, i)`.
    pub max: usize,
}

pub fn matrix_variation(m: &BinaryMatrix) -> MatrixVariation {
    let mut per_column = vec![0; m.n_cols()];
    for pair in m.rows().windows(2) {
        for (count, (a, b)) in per_column.iter_mut().zip(pair[0].iter().zip(&pair[1])) {
            *count += (a != b) as usize;
        }
    }
    let total = per_column.iter().sum();
    let max = per_column.iter().copied().max().unwrap_or(0);
    MatrixVariation {
        per_column,
        total,
        max,
    }
}

struct GraySearch {
    n: usize,
    cap: usize,
    visited: Vec<bool>,
    used: Vec<usize>,
    path: Vec<usize>,
}

impl GraySearch {
    fn dfs(&mut self) -> bool {
        if self.path.len() == 1 << self.n {
            return true;
        }
        let here = *self.path.last().unwrap();
        let mut order: Vec<usize> = (0..self.n).filter(|&c| self.used[c] < self.cap).collect();
        order.sort_by_key(|&c| (self.used[c], std::cmp::Reverse(c)));
        for c in order {
            let next = here ^ (1 << (self.n - 1 - c));
            if self.visited[next] {
                continue;
            }
            self.visited[next] = true;
            self.used[c] += 1;
            self.path.push(next);
            if self.dfs() {
                return true;
            }
            self.path.pop();
            self.used[c] -= 1;
            self.visited[next] = false;
        }
        false
    }
}

/// A Gray code on `n ≤ 5` bits with every column flipping at most `⌈2^n/n⌉`
/// times, starting from all zeros. Column 0 is the most significant bit.
pub fn balanced_gray_code(n: usize) -> Result<BinaryMatrix> {
    if n == 0 || n > MAX_GRAY_BITS {
        return Err(Error::Unsupported(format!(
            "balanced Gray codes are searched for 1 ≤ n ≤ {MAX_GRAY_BITS}, got {n}"
        )));
    }
    let size = 1usize << n;
    let mut search = GraySearch {
        n,
        cap: size.div_ceil(n),
        visited: vec![false; size],
        used: vec![0; n],
        path: vec![0],
    };
    search.visited[0] = true;
    if !search.dfs() {
        return Err(Error::Internal(format!(
            "no balanced Gray code found for n = {n}"
        )));
    }
    let rows = search
        .path
        .iter()
        .map(|&code| (0..n).map(|c| (code >> (n - 1 - c) & 1) as u8).collect())
        .collect();
    BinaryMatrix::new(rows)
}
