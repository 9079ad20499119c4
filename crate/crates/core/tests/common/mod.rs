//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `ln|v|` of a big integer without overflow.
pub fn ln_abs(v: &BigInt) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        return v.abs().to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top: BigInt = v.abs() >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// `ln n!` exactly from the big integer factorial.
pub fn ln_factorial(n: u64) -> f64 {
    let mut f = BigInt::one();
    for k in 2..=n {
        f *= k;
    }
    ln_abs(&f)
}

/// Sign and `ln|·|` of `e^{-x/2} L_n(x)` for integer `x`, from the exact
/// integer `n!·L_n(x) = Σ_k (−1)^k n!² x^k / (k!² (n−k)!)`.
pub fn laguerre_scaled_exact(n: u64, x: u64) -> (f64, f64) {
    let mut term = BigInt::one();
    for k in 2..=n {
        term *= k;
    }
    let mut sum = BigInt::zero();
    for k in 0..=n {
        if k % 2 == 0 {
            sum += &term;
        } else {
            sum -= &term;
        }
        if k < n {
            term = term * x * (n - k);
            term /= (k + 1) * (k + 1);
        }
    }
    let sign = match sum.sign() {
        Sign::Minus => -1.0,
        Sign::NoSign => 0.0,
        Sign::Plus => 1.0,
    };
    (sign, ln_abs(&sum) - ln_factorial(n) - x as f64 / 2.0)
}

/// Fock-state Wigner function `(2/π)(−1)^n e^{−2|α|²} L_n(4|α|²)` with
/// `4|α|² = x` an integer.
pub fn fock_wigner_exact(n: u64, x: u64) -> f64 {
    let (sign, ln) = laguerre_scaled_exact(n, x);
    let parity = if n % 2 == 0 { 1.0 } else { -1.0 };
    parity * sign * 2.0 / std::f64::consts::PI * ln.exp()
}

/// Relative error, with `ln` used when the oracle is far outside f64 range.
pub fn rel_err(value: f64, exact_sign: f64, exact_ln: f64) -> f64 {
    if value == 0.0 || value.signum() != exact_sign {
        return f64::INFINITY;
    }
    (value.abs().ln() - exact_ln).abs().exp_m1().abs()
}

/// Hellinger-type share `½(√p − √q)²` per entry; sums to `1 − B`.
pub fn hellinger_terms(p: &[f64], q: &[f64]) -> Vec<f64> {
    let len = p.len().max(q.len());
    (0..len)
        .map(|n| {
            let a = p.get(n).copied().unwrap_or(0.0).max(0.0).sqrt();
            let b = q.get(n).copied().unwrap_or(0.0).max(0.0).sqrt();
            0.5 * (a - b) * (a - b)
        })
        .collect()
}
