//! Small numeric helpers shared across the crate.

/// Sums a slice by pairwise reduction in index order.
///
/// The reduction tree depends only on the slice length, so the result is
/// reproducible across runs and thread counts as long as the inputs are.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

/// Binomial coefficient C(n, k) as an exact 128-bit integer.
///
/// Panics on overflow; the exact-arithmetic callers stay far below that
/// (n <= ~120).
pub fn binomial_u128(n: u64, k: u64) -> u128 {
    checked_binomial_u128(n, k).expect("binomial overflows u128")
}

fn checked_binomial_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // the running product is itself a binomial, so the division is exact
        acc = acc.checked_mul((n - i) as u128)? / (i + 1) as u128;
    }
    Some(acc)
}

/// Binomial coefficient as f64: exact while the value stays below 2^53,
/// correctly rounded multiplicative fallback beyond the integer range.
pub fn binomial_f64(n: u64, k: u64) -> f64 {
    match checked_binomial_u128(n, k) {
        Some(v) => v as f64,
        None => {
            let k = k.min(n - k);
            let mut acc = 1.0f64;
            for i in 0..k {
                acc = acc * (n - i) as f64 / (i + 1) as f64;
            }
            acc
        }
    }
}
