//! Lower-bound arithmetic on `Q(η, r)` and the ordered-factorization counts behind it.

use serde::Serialize;

use crate::error::{check_open_unit, Error, Result};

/// Largest `2^b` the exact minimizer will enumerate up to.
const MAX_MASS_SLOTS: f64 = (1u64 << 26) as f64;

/// `(1−γ)²(q* + 2log(1−γ) − 1)` for one round, `(1−γ)²(q* + 2log(1−γ))/(2log r + 8)`
/// otherwise; floored at 0.
pub fn simple_lower_bound(q_star: f64, gamma: f64, r: usize) -> Result<f64> {
    check_open_unit("gamma", gamma)?;
    if r == 0 {
        return Err(Error::OutOfRange {
            name: "r",
            value: 0.0,
            range: "r >= 1",
        });
    }
    let scale = (1.0 - gamma).powi(2);
    let shifted = q_star + 2.0 * (1.0 - gamma).log2();
    let value = if r == 1 {
        scale * (shifted - 1.0)
    } else {
        scale * shifted / (2.0 * (r as f64).log2() + 8.0)
    };
    Ok(value.max(0.0))
}

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Prime exponents of `k` by trial division.
pub fn prime_exponents(mut k: u64) -> Vec<u32> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= k {
        let mut a = 0;
        while k.is_multiple_of(p) {
            k /= p;
            a += 1;
        }
        if a > 0 {
            out.push(a);
        }
        p += 1;
    }
    if k > 1 {
        out.push(1);
    }
    out
}

fn count_from_exponents(exps: &[u32], r: u64) -> u128 {
    exps.iter()
        .map(|&a| binomial(a as u64 + r - 1, r - 1))
        .product()
}

/// Number of ordered `r`-tuples of positive integers with product `k`:
/// `Π C(a_j + r − 1, r − 1)` over the prime exponents `a_j` of `k`.
pub fn ordered_factorizations(k: u64, r: usize) -> Result<u128> {
    if k == 0 {
        return Err(Error::OutOfRange {
            name: "k",
            value: 0.0,
            range: "k >= 1",
        });
    }
    if r == 0 {
        return Err(Error::OutOfRange {
            name: "r",
            value: 0.0,
            range: "r >= 1",
        });
    }
    Ok(count_from_exponents(&prime_exponents(k), r as u64))
}

/// Smallest-prime-factor table for `0..=n`.
fn spf_sieve(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

fn exponents_from_sieve(mut k: usize, spf: &[u32]) -> Vec<u32> {
    let mut out = Vec::new();
    while k > 1 {
        let p = spf[k] as usize;
        let mut a = 0;
        while k.is_multiple_of(p) {
            k /= p;
            a += 1;
        }
        out.push(a);
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct LogProductMinimum {
    pub b: f64,
    pub r: usize,
    /// Minimal `Σ s·log₂(product)` subject to `s ≤ 2^{−b}`, `Σ s = 1`.
    pub value: f64,
    /// Largest product that received mass.
    pub last_product: u64,
    /// `b/(2(log₂ r + 4))` for `r > 1`.
    pub multi_round_bound: Option<f64>,
    /// The one-round constant `b − 1` and whether the exact value falls below it.
    pub one_round_stated: Option<f64>,
    pub one_round_stated_violated: Option<bool>,
    /// `b − log₂ e`, the Stirling asymptote of the one-round value.
    pub one_round_asymptote: Option<f64>,
}

/// Exact minimum of the expected log-product: mass `2^{−b}` is assigned to
/// tuples in ascending order of their product until it sums to one.
pub fn min_expected_log_product(b: f64, r: usize) -> Result<LogProductMinimum> {
    if b.is_nan() || b <= 0.0 {
        return Err(Error::OutOfRange {
            name: "b",
            value: b,
            range: "b > 0",
        });
    }
    if r == 0 {
        return Err(Error::OutOfRange {
            name: "r",
            value: 0.0,
            range: "r >= 1",
        });
    }
    let slots = b.exp2();
    if slots > MAX_MASS_SLOTS {
        return Err(Error::CapExceeded(format!("2^b = {slots:e} tuples to enumerate")));
    }
    let unit = 1.0 / slots;
    // Every product k contributes at least one tuple, so k never exceeds ⌈2^b⌉.
    let spf = spf_sieve(slots.ceil() as usize + 1);
    let mut remaining = 1.0f64;
    let mut value = 0.0f64;
    let mut k = 1usize;
    let mut last = 1u64;
    while remaining > 1e-15 {
        let n = count_from_exponents(&exponents_from_sieve(k, &spf), r as u64) as f64;
        let mass = (n * unit).min(remaining);
        value += mass * (k as f64).log2();
        remaining -= mass;
        last = k as u64;
        k += 1;
    }
    let one_round = r == 1;
    Ok(LogProductMinimum {
        b,
        r,
        value,
        last_product: last,
        multi_round_bound: (!one_round).then(|| b / (2.0 * ((r as f64).log2() + 4.0))),
        one_round_stated: one_round.then_some(b - 1.0),
        one_round_stated_violated: one_round.then_some(value < b - 1.0),
        one_round_asymptote: one_round.then_some(b - std::f64::consts::E.log2()),
    })
}
