//! Side information: group sizes in unary followed by the rank of the
//! permutation taking group order to canonical order.
//!
//! For `n` groups holding `k` points the unary part is `k + n` bits (each size
//! `s` as `s` zeros and a one) and the rank takes exactly `⌈log₂ k!⌉` bits,
//! least significant bit first.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Bits of `⌈log₂ k!⌉`.
pub fn permutation_bits(k: usize) -> usize {
    let mut f = BigUint::one();
    for i in 2..=k as u64 {
        f *= i;
    }
    (f - 1u32).bits() as usize
}

/// `⌈k log₂ k⌉ + 2n`, the side-information budget.
pub fn side_info_budget(k: usize, n: usize) -> usize {
    let k_log_k = if k < 2 {
        0.0
    } else {
        k as f64 * (k as f64).log2()
    };
    k_log_k.ceil() as usize + 2 * n
}

/// Fenwick tree over `0..len` counting present values.
struct Fenwick {
    tree: Vec<usize>,
}

impl Fenwick {
    fn new(len: usize) -> Self {
        Self {
            tree: vec![0; len + 1],
        }
    }

    fn full(len: usize) -> Self {
        let mut f = Self::new(len);
        for i in 0..len {
            f.add(i, 1);
        }
        f
    }

    fn add(&mut self, i: usize, delta: isize) {
        let mut j = i + 1;
        while j < self.tree.len() {
            self.tree[j] = (self.tree[j] as isize + delta) as usize;
            j += j & j.wrapping_neg();
        }
    }

    /// Count of present values `< i`.
    fn prefix(&self, i: usize) -> usize {
        let mut j = i;
        let mut s = 0;
        while j > 0 {
            s += self.tree[j];
            j -= j & j.wrapping_neg();
        }
        s
    }

    /// Smallest value with `rank` present values below it.
    fn select(&self, mut rank: usize) -> usize {
        let n = self.tree.len() - 1;
        let mut pos = 0;
        let mut step = n.next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= rank {
                pos = next;
                rank -= self.tree[next];
            }
            step >>= 1;
        }
        pos
    }
}

/// Lexicographic rank of a permutation of `0..k`.
pub fn permutation_rank(perm: &[usize]) -> BigUint {
    let k = perm.len();
    let mut seen = Fenwick::new(k);
    let mut rank = BigUint::zero();
    for (i, &p) in perm.iter().enumerate() {
        let smaller_unused = p - seen.prefix(p);
        seen.add(p, 1);
        rank = rank * ((k - i) as u64) + smaller_unused as u64;
    }
    rank
}

/// Inverse of [`permutation_rank`]; `None` when `rank ≥ k!`.
pub fn permutation_unrank(rank: &BigUint, k: usize) -> Option<Vec<usize>> {
    let mut r = rank.clone();
    let mut digits = vec![0usize; k];
    for i in (0..k).rev() {
        let base = BigUint::from((k - i) as u64);
        let d = &r % &base;
        digits[i] = d.iter_u64_digits().next().unwrap_or(0) as usize;
        r /= base;
    }
    if !r.is_zero() {
        return None;
    }
    let mut free = Fenwick::full(k);
    Some(
        digits
            .into_iter()
            .map(|d| {
                let v = free.select(d);
                free.add(v, -1);
                v
            })
            .collect(),
    )
}

pub fn encode(group_sizes: &[usize], perm: &[usize]) -> Vec<bool> {
    let k = perm.len();
    let mut bits = Vec::with_capacity(k + group_sizes.len() + permutation_bits(k));
    for &s in group_sizes {
        bits.extend(std::iter::repeat_n(false, s));
        bits.push(true);
    }
    let rank = permutation_rank(perm);
    let width = permutation_bits(k);
    bits.extend((0..width as u64).map(|i| rank.bit(i)));
    bits
}

/// Recovers group sizes and the permutation for `n` groups over `k` points.
pub fn decode(bits: &[bool], n: usize, k: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut sizes = Vec::with_capacity(n);
    let mut pos = 0;
    let mut run = 0;
    while sizes.len() < n {
        match bits.get(pos) {
            None => {
                return Err(Error::Decode(
                    "side information ends inside the group sizes".into(),
                ))
            }
            Some(true) => {
                if run == 0 {
                    return Err(Error::Decode(format!("group {} is empty", sizes.len())));
                }
                sizes.push(run);
                run = 0;
            }
            Some(false) => run += 1,
        }
        pos += 1;
    }
    let total: usize = sizes.iter().sum();
    if total != k {
        return Err(Error::Decode(format!(
            "group sizes add to {total}, but {k} points are stored"
        )));
    }
    let width = permutation_bits(k);
    if bits.len() != pos + width {
        return Err(Error::Decode(format!(
            "expected {} side-information bits, found {}",
            pos + width,
            bits.len()
        )));
    }
    let mut rank = BigUint::zero();
    for (i, &b) in bits[pos..].iter().enumerate() {
        if b {
            rank.set_bit(i as u64, true);
        }
    }
    let perm = permutation_unrank(&rank, k)
        .ok_or_else(|| Error::Decode("permutation index out of range".into()))?;
    Ok((sizes, perm))
}

#[cfg(test)]
mod tests {
    use rand::seq::SliceRandom;

    use super::*;
    use crate::rng::seeded;

    #[test]
    fn small_factorial_widths() {
        assert_eq!(permutation_bits(0), 0);
        assert_eq!(permutation_bits(1), 0);
        assert_eq!(permutation_bits(2), 1);
        assert_eq!(permutation_bits(3), 3);
        assert_eq!(permutation_bits(4), 5);
        assert_eq!(permutation_bits(5), 7);
    }

    #[test]
    fn ranks_are_lexicographic() {
        let all = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        for (i, p) in all.iter().enumerate() {
            assert_eq!(permutation_rank(p), BigUint::from(i));
            assert_eq!(
                permutation_unrank(&BigUint::from(i), 3).unwrap(),
                p.to_vec()
            );
        }
        assert!(permutation_unrank(&BigUint::from(6u32), 3).is_none());
    }

    #[test]
    fn unary_plus_rank_fits_budget() {
        // k + n + ⌈log₂ k!⌉ ≤ ⌈k log₂ k⌉ + 2n needs ⌈k log₂ k⌉ − ⌈log₂ k!⌉ ≥ k − n.
        for k in 1..=2000 {
            let slack = side_info_budget(k, 0) as i64 - permutation_bits(k) as i64;
            assert!(slack >= k as i64 - 1, "k = {k}");
        }
    }

    #[test]
    fn encode_decode_round_trip() {
        let mut rng = seeded(3);
        for k in [1usize, 2, 7, 40, 300] {
            let mut perm: Vec<usize> = (0..k).collect();
            perm.shuffle(&mut rng);
            let sizes = if k >= 3 { vec![1, k - 3, 2] } else { vec![k] };
            let sizes: Vec<usize> = sizes.into_iter().filter(|&s| s > 0).collect();
            let bits = encode(&sizes, &perm);
            assert!(bits.len() <= side_info_budget(k, sizes.len()));
            let (s2, p2) = decode(&bits, sizes.len(), k).unwrap();
            assert_eq!(s2, sizes);
            assert_eq!(p2, perm);
        }
    }

    #[test]
    fn malformed_bits_are_rejected() {
        let bits = encode(&[2, 1], &[2, 0, 1]);
        assert!(decode(&bits[..bits.len() - 1], 2, 3).is_err());
        assert!(decode(&bits, 2, 4).is_err());
        let mut extra = bits.clone();
        extra.push(false);
        assert!(decode(&extra, 2, 3).is_err());
        assert!(decode(&[true, false, true], 2, 1).is_err());
    }
}
