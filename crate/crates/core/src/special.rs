//! Exponent-carrying three-term recurrences.
//!
//! `e^{-x/2} L_n(x)` stays in `[-1, 1]` for every `n` and `x ≥ 0`, but the
//! unscaled polynomial overflows a double near `x ≈ 1440, n ≈ 330` and the
//! exponential underflows soon after. Here the recurrence runs on a mantissa
//! pair that is renormalized by exact powers of two whenever it leaves
//! `[2⁻⁵¹², 2⁵¹²]`; the count of shifts plus `−x/(2 ln 2)` form a base-2
//! exponent that is applied only when a value is read out.

use std::f64::consts::LN_2;

use num_complex::Complex64;

use crate::{Error, Result};

const RESCALE_BITS: i32 = 512;
const HI: f64 = 1.340_780_792_994_259_7e154; // 2^512
const LO: f64 = 7.458_340_731_200_207e-155; // 2^-512

/// `e^{-x/2} L_n(x)` held as `mantissa · 2^log2_scale`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaguerreScaledValue {
    pub n: usize,
    pub x: f64,
    mantissa: f64,
    log2_scale: f64,
}

impl LaguerreScaledValue {
    /// The value as a double; tiny values underflow to zero.
    pub fn value(&self) -> f64 {
        if self.mantissa == 0.0 {
            0.0
        } else {
            self.mantissa * self.log2_scale.exp2()
        }
    }

    /// `ln |e^{-x/2} L_n(x)|`, finite even where [`value`](Self::value)
    /// underflows.
    pub fn ln_abs(&self) -> f64 {
        self.mantissa.abs().ln() + self.log2_scale * LN_2
    }

    pub fn signum(&self) -> f64 {
        if self.mantissa == 0.0 {
            0.0
        } else {
            self.mantissa.signum()
        }
    }

    pub fn mantissa(&self) -> f64 {
        self.mantissa
    }

    pub fn log2_scale(&self) -> f64 {
        self.log2_scale
    }
}

fn check_x(x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "Laguerre argument must be finite and >= 0, got {x}"
        )))
    }
}

/// `e^{-x/2} L_n(x)` by the scaled three-term recurrence
/// `(k+1) L_{k+1} = (2k+1−x) L_k − k L_{k−1}`.
pub fn laguerre_scaled(n: usize, x: f64) -> Result<LaguerreScaledValue> {
    check_x(x)?;
    let mut it = LaguerreSeries::new_unchecked(x);
    for _ in 0..n {
        it.advance();
    }
    Ok(it.current())
}

/// Streams `e^{-x/2} L_k(x)` for `k = 0, 1, 2, …`.
#[derive(Clone, Debug)]
pub struct LaguerreSeries {
    x: f64,
    k: usize,
    prev: f64,
    cur: f64,
    shifts: i64,
    base: f64,
    factor: f64,
}

impl LaguerreSeries {
    pub fn new(x: f64) -> Result<Self> {
        check_x(x)?;
        Ok(Self::new_unchecked(x))
    }

    fn new_unchecked(x: f64) -> Self {
        let base = -x / (2.0 * LN_2);
        Self {
            x,
            k: 0,
            prev: 0.0,
            cur: 1.0,
            shifts: 0,
            base,
            factor: base.exp2(),
        }
    }

    /// Order of the value returned by [`current`](Self::current).
    pub fn order(&self) -> usize {
        self.k
    }

    pub fn current(&self) -> LaguerreScaledValue {
        LaguerreScaledValue {
            n: self.k,
            x: self.x,
            mantissa: self.cur,
            log2_scale: self.base + self.shifts as f64,
        }
    }

    /// Current value as a double.
    #[inline]
    pub fn value(&self) -> f64 {
        self.cur * self.factor
    }

    #[inline]
    pub fn advance(&mut self) {
        let k = self.k as f64;
        let next = ((2.0 * k + 1.0 - self.x) * self.cur - k * self.prev) / (k + 1.0);
        self.prev = self.cur;
        self.cur = next;
        self.k += 1;
        let big = self.cur.abs().max(self.prev.abs());
        if big > HI {
            self.prev *= LO;
            self.cur *= LO;
            self.shifts += RESCALE_BITS as i64;
            self.factor = (self.base + self.shifts as f64).exp2();
        } else if big < LO && big != 0.0 {
            self.prev *= HI;
            self.cur *= HI;
            self.shifts -= RESCALE_BITS as i64;
            self.factor = (self.base + self.shifts as f64).exp2();
        }
    }
}

impl Iterator for LaguerreSeries {
    type Item = f64;

    /// Yields the current value, then advances.
    fn next(&mut self) -> Option<f64> {
        let v = self.value();
        self.advance();
        Some(v)
    }
}

/// Fill `out[k] = e^{-x/2} L_k(x)` for `k < out.len()`.
pub fn laguerre_scaled_table(x: f64, out: &mut [f64]) -> Result<()> {
    check_x(x)?;
    let mut it = LaguerreSeries::new_unchecked(x);
    for slot in out.iter_mut() {
        *slot = it.value();
        it.advance();
    }
    Ok(())
}

/// Scaled complex recurrence
/// `g_{k+1} = (a·g_k − b·√k·g_{k−1}) / √(k+1)` with `g_0 = 1`, used for
/// normalized Hermite polynomials of complex argument. `log2_offset` is an
/// extra base-2 exponent folded into every read-out of `|g_k|²`.
#[derive(Clone, Debug)]
pub struct ScaledComplexSeries {
    a: Complex64,
    b: f64,
    k: usize,
    prev: Complex64,
    cur: Complex64,
    shifts: i64,
    log2_offset: f64,
    factor: f64,
}

impl ScaledComplexSeries {
    pub fn new(a: Complex64, b: f64, log2_offset: f64) -> Self {
        Self {
            a,
            b,
            k: 0,
            prev: Complex64::new(0.0, 0.0),
            cur: Complex64::new(1.0, 0.0),
            shifts: 0,
            log2_offset,
            factor: log2_offset.exp2(),
        }
    }

    /// `|g_k|² · 2^log2_offset`.
    #[inline]
    pub fn norm_sqr(&self) -> f64 {
        let m = self.cur.norm_sqr();
        if m == 0.0 {
            0.0
        } else {
            m * self.factor
        }
    }

    #[inline]
    pub fn advance(&mut self) {
        let k = self.k as f64;
        let next = (self.a * self.cur - self.prev * (self.b * k.sqrt())) / (k + 1.0).sqrt();
        self.prev = self.cur;
        self.cur = next;
        self.k += 1;
        let big = self.cur.norm_sqr().max(self.prev.norm_sqr()).sqrt();
        if big > HI {
            self.prev *= LO;
            self.cur *= LO;
            self.shifts += RESCALE_BITS as i64;
            self.refresh();
        } else if big < LO && big != 0.0 {
            self.prev *= HI;
            self.cur *= HI;
            self.shifts -= RESCALE_BITS as i64;
            self.refresh();
        }
    }

    fn refresh(&mut self) {
        // |g|² picks up twice the mantissa shift
        self.factor = (self.log2_offset + 2.0 * self.shifts as f64).exp2();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_orders() {
        for x in [0.0, 0.5, 3.0, 40.0] {
            let v = laguerre_scaled(0, x).unwrap().value();
            assert!((v - (-x / 2.0).exp()).abs() <= 1e-14 * (-x / 2.0f64).exp());
        }
        let v = laguerre_scaled(1, 2.0).unwrap().value();
        assert!((v + (-1.0f64).exp()).abs() < 1e-16);
        assert!((v + 0.367879).abs() < 1e-6);
        let l2 = |x: f64| 0.5 * (x * x - 4.0 * x + 2.0);
        let v = laguerre_scaled(2, 1.7).unwrap().value();
        assert!((v - (-0.85f64).exp() * l2(1.7)).abs() < 1e-15);
    }

    #[test]
    fn value_at_origin_is_one() {
        for n in [0, 1, 7, 330, 5000] {
            assert_eq!(laguerre_scaled(n, 0.0).unwrap().value(), 1.0);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(laguerre_scaled(3, -1.0).is_err());
        assert!(laguerre_scaled(3, f64::NAN).is_err());
        assert!(LaguerreSeries::new(f64::INFINITY).is_err());
    }

    #[test]
    fn finite_across_the_plain_double_failure_regime() {
        for (n, x) in [(330, 1440.0), (2000, 8000.0), (100_000, 100_000.0), (5, 100_000.0)] {
            let v = laguerre_scaled(n, x).unwrap();
            assert!(v.value().is_finite(), "({n}, {x})");
            assert!(v.ln_abs().is_finite(), "({n}, {x})");
            assert!(v.value().abs() <= 1.0);
        }
    }

    #[test]
    fn table_matches_pointwise() {
        let mut table = vec![0.0; 40];
        laguerre_scaled_table(17.5, &mut table).unwrap();
        for (n, t) in table.iter().enumerate() {
            assert_eq!(*t, laguerre_scaled(n, 17.5).unwrap().value());
        }
    }

    #[test]
    fn complex_series_poisson_limit() {
        // b = 0 gives g_k = a^k/√k!, so |g_k|² e^{-|a|²} is Poisson
        let a = Complex64::new(3.0, 4.0);
        let mean = a.norm_sqr();
        let mut s = ScaledComplexSeries::new(a, 0.0, -mean / LN_2);
        let mut log_fact = 0.0;
        for k in 0..80 {
            if k > 0 {
                log_fact += (k as f64).ln();
            }
            let expect = (k as f64 * mean.ln() - mean - log_fact).exp();
            assert!((s.norm_sqr() - expect).abs() < 1e-13, "k={k}");
            s.advance();
        }
    }

    proptest! {
        // residual of the unscaled recurrence after bringing three
        // consecutive values to a common exponent
        #[test]
        fn recurrence_residual(n in 1usize..3000, x in 0.0..12000.0f64) {
            let mut it = LaguerreSeries::new(x).unwrap();
            for _ in 0..n - 1 {
                it.advance();
            }
            let f0 = it.current();
            it.advance();
            let f1 = it.current();
            it.advance();
            let f2 = it.current();
            let e = f2.log2_scale().max(f1.log2_scale()).max(f0.log2_scale());
            let g = |v: &LaguerreScaledValue| v.mantissa() * (v.log2_scale() - e).exp2();
            let (a, b, c) = (g(&f0), g(&f1), g(&f2));
            let k = n as f64;
            let resid = ((k + 1.0) * c - (2.0 * k + 1.0 - x) * b + k * a).abs();
            let scale = a.abs().max(b.abs()).max(c.abs());
            prop_assert!(resid <= 1e-9 * scale, "{resid} vs {scale}");
        }
    }
}
