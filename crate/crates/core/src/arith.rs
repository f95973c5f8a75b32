//! Exact integer arithmetic shared by the evaluator and the oracles.

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};

/// `m!` as an arbitrary-precision integer.
pub fn factorial(m: u32) -> BigInt {
    (2..=m).fold(BigInt::one(), |acc, i| acc * i)
}

/// `n choose k`, zero when `k > n`.
pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    // Each prefix product is itself a binomial coefficient, so the division is exact.
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// The multinomial coefficient `top! / prod(parts[i]!)`.
///
/// Evaluated as a product of binomials while peeling the parts off one at a
/// time, which keeps intermediate values no larger than the result.
pub fn multinomial(top: u32, parts: &[u32]) -> Result<BigInt> {
    let sum: u64 = parts.iter().map(|&p| u64::from(p)).sum();
    if sum != u64::from(top) {
        return Err(Error::PartsMismatch { top, sum });
    }
    let mut remaining = top;
    let mut acc = BigInt::one();
    for &p in parts {
        acc *= binomial(remaining, p);
        remaining -= p;
    }
    Ok(acc)
}
