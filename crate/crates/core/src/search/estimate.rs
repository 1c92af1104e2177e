use num_bigint::BigUint;

use crate::error::{Error, Result};

/// Worst-case number of open routes examined by the exact search with
/// cost-dominance pruning, over `n` candidates and routes of up to `p` of
/// them: `n + sum_{l=2..p} l (l-1) C(n, l)`.
pub fn estimate_search_space(n: u64, p: u64) -> Result<BigUint> {
    if p > n {
        return Err(Error::input(format!("route length {p} exceeds candidate count {n}")));
    }
    let mut total = BigUint::from(n);
    let mut binom = BigUint::from(n); // C(n, 1)
    for l in 2..=p {
        binom = binom * (n - l + 1) / l;
        total += &binom * (l * (l - 1));
    }
    Ok(total)
}

/// Dominant term of [`estimate_search_space`]: `n (n-1) C(n-1, p-2)`.
pub fn closed_form_estimate(n: u64, p: u64) -> f64 {
    if p < 2 || p > n {
        return n as f64;
    }
    let mut binom = 1.0f64;
    for i in 0..(p - 2) {
        binom = binom * (n - 1 - i) as f64 / (i + 1) as f64;
    }
    (n * (n - 1)) as f64 * binom
}
