//! Binomial coefficients and colexicographic ranking of k-subsets.
//!
//! The colex rank of a sorted set `c_0 < c_1 < ... < c_{j-1}` is
//! `sum_i C(c_i, i + 1)`. Ranks are dense in `0..C(n, j)` for subsets of
//! `0..n`, which lets (k-1)-sets serve as ground-set elements and lets the
//! random generator address potential edges by index.

/// `C(n, k)`, or `None` on `u64` overflow.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return None;
        }
    }
    Some(acc as u64)
}

/// `C(n, k)` as a float, for bounds where the exact value may overflow.
pub fn binomial_f64(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    ln_binomial(n, k).exp().round()
}

pub fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// Colex rank of a strictly increasing vertex list.
pub fn colex_rank(sorted: &[u32]) -> u64 {
    sorted
        .iter()
        .enumerate()
        .map(|(i, &c)| binomial(u64::from(c), i as u64 + 1).expect("rank overflow"))
        .sum()
}

/// Inverse of [`colex_rank`] for sets of size `size`.
pub fn colex_unrank(mut rank: u64, size: usize, out: &mut [u32]) {
    debug_assert_eq!(out.len(), size);
    for i in (1..=size).rev() {
        // largest c with C(c, i) <= rank
        let (mut lo, mut hi) = (i as u64 - 1, i as u64 - 1);
        while binomial(hi, i as u64).is_some_and(|b| b <= rank) {
            lo = hi;
            hi = hi * 2 + 1;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if binomial(mid, i as u64).is_some_and(|b| b <= rank) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out[i - 1] = lo as u32;
        rank -= binomial(lo, i as u64).unwrap();
    }
}

/// Calls `f` on every `size`-subset of `items` (which must be sorted), in
/// lexicographic order.
pub fn for_each_subset(items: &[u32], size: usize, mut f: impl FnMut(&[u32])) {
    if size > items.len() {
        return;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    let mut buf = vec![0u32; size];
    loop {
        for (b, &i) in buf.iter_mut().zip(&idx) {
            *b = items[i];
        }
        f(&buf);
        let mut j = size;
        while j > 0 && idx[j - 1] == items.len() - size + j - 1 {
            j -= 1;
        }
        if j == 0 {
            return;
        }
        idx[j - 1] += 1;
        for l in j..size {
            idx[l] = idx[l - 1] + 1;
        }
    }
}
