//! Poisson probabilities that stay accurate for rates in the hundreds.
//!
//! The pmf uses Loader's saddle-point form `exp(-stirlerr(k) - bd0(k, λ)) /
//! sqrt(2πk)`, which avoids the cancellation in `k ln λ - λ - ln k!`.

use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
/// Tail sums stop once a term drops below this fraction of the running sum.
const TRUNCATE: f64 = 1e-18;

/// `ln k! - ((k + 1/2) ln k - k + ln sqrt(2π))`.
fn stirlerr(k: f64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if k <= 15.0 {
        return ln_gamma(k + 1.0) - (k + 0.5) * k.ln() + k - LN_SQRT_2PI;
    }
    let kk = k * k;
    if k > 500.0 {
        return (S0 - S1 / kk) / k;
    }
    if k > 80.0 {
        return (S0 - (S1 - S2 / kk) / kk) / k;
    }
    if k > 35.0 {
        return (S0 - (S1 - (S2 - S3 / kk) / kk) / kk) / k;
    }
    (S0 - (S1 - (S2 - (S3 - S4 / kk) / kk) / kk) / kk) / k
}

/// `x ln(x / m) + m - x` without cancellation near `x = m`.
fn bd0(x: f64, m: f64) -> f64 {
    if (x - m).abs() < 0.1 * (x + m) {
        let v = (x - m) / (x + m);
        let mut s = (x - m) * v;
        let mut ej = 2.0 * x * v;
        let v2 = v * v;
        for j in 1..1000 {
            ej *= v2;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        return s;
    }
    x * (x / m).ln() + m - x
}

fn pmf_raw(rate: f64, k: u64) -> f64 {
    if rate == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if k == 0 {
        return (-rate).exp();
    }
    let x = k as f64;
    (-stirlerr(x) - bd0(x, rate) - LN_SQRT_2PI - 0.5 * x.ln()).exp()
}

fn check_rate(rate: f64) -> Result<()> {
    if !(rate >= 0.0 && rate.is_finite()) {
        return invalid(format!("Poisson rate {rate} must be finite and non-negative"));
    }
    Ok(())
}

/// `P(X = k)` for `X ~ Poisson(rate)`.
pub fn poisson_pmf(rate: f64, k: u64) -> Result<f64> {
    check_rate(rate)?;
    Ok(pmf_raw(rate, k))
}

/// `(P(X < k), P(X >= k))`. The side away from the mode is summed
/// directly and the other one is its complement.
pub fn poisson_split(rate: f64, k: u64) -> Result<(f64, f64)> {
    check_rate(rate)?;
    if k == 0 {
        return Ok((0.0, 1.0));
    }
    if (k as f64) <= rate {
        // Terms below k - 1 shrink as j decreases.
        let mut j = k - 1;
        let mut term = pmf_raw(rate, j);
        let mut sum = term;
        while j > 0 {
            term *= j as f64 / rate;
            j -= 1;
            sum += term;
            if term < TRUNCATE * sum {
                break;
            }
        }
        Ok((sum, 1.0 - sum))
    } else {
        let mut j = k;
        let mut term = pmf_raw(rate, j);
        let mut sum = term;
        while term >= TRUNCATE * sum && term > 0.0 {
            j += 1;
            term *= rate / j as f64;
            sum += term;
        }
        Ok((1.0 - sum, sum))
    }
}

/// `P(X < k)`.
pub fn poisson_below(rate: f64, k: u64) -> Result<f64> {
    Ok(poisson_split(rate, k)?.0)
}

/// `P(X <= k)`.
pub fn poisson_cdf(rate: f64, k: u64) -> Result<f64> {
    Ok(poisson_split(rate, k + 1)?.0)
}

/// `P(X >= k)`.
pub fn poisson_at_least(rate: f64, k: u64) -> Result<f64> {
    Ok(poisson_split(rate, k)?.1)
}
