//! Truncated polyhomogeneous series in the boundary distance `d`.
//!
//! A [`PhSeries`] of order `N` stores
//!
//! ```text
//! Σ_{j=0}^{N} ( a_{j,0} d^j + a_{j,1} d^j log d )  -  m log d,     m ∈ {0, 1}
//! ```
//!
//! Only one power of `log d` is ever carried. Products that would produce a
//! `log² d` term inside the truncation window are rejected; the expansions
//! built by [`crate::expand`] have their single log term at order `n`, so
//! squares of it land at order `2n > n + 1` and are truncated away.
//!
//! Differentiation loses one order of validity: the top slot of a derivative
//! is always zero and is only meaningful once the caller multiplies back by
//! `d` (see [`PoleSeries::times_d_pow`]).

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PhSeries {
    order: usize,
    coeffs: Vec<[f64; 2]>,
    leading_log: u8,
}

impl PhSeries {
    pub fn zero(order: usize) -> Self {
        PhSeries { order, coeffs: vec![[0.0; 2]; order + 1], leading_log: 0 }
    }

    pub fn constant(order: usize, c: f64) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0][0] = c;
        s
    }

    /// `c d^j` (`l = 0`) or `c d^j log d` (`l = 1`).
    pub fn monomial(order: usize, j: usize, l: usize, c: f64) -> Self {
        let mut s = Self::zero(order);
        s.set(j, l, c);
        s
    }

    /// Regular power series `Σ coeffs[j] d^j`, truncated at `order`.
    pub fn from_poly(order: usize, coeffs: &[f64]) -> Self {
        let mut s = Self::zero(order);
        for (j, &c) in coeffs.iter().enumerate().take(order + 1) {
            s.coeffs[j][0] = c;
        }
        s
    }

    /// `-log d + Σ coeffs[j] d^j + c_log d^n log d`, the shape of the formal
    /// solution `v`.
    pub fn formal_solution(order: usize, coeffs: &[f64], n: usize, c_log: f64) -> Self {
        let mut s = Self::from_poly(order, coeffs);
        s.leading_log = 1;
        s.set(n, 1, c_log);
        s
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn leading_log(&self) -> u8 {
        self.leading_log
    }

    /// Stored slot `a_{j,l}`; zero beyond the truncation order.
    pub fn get(&self, j: usize, l: usize) -> f64 {
        self.coeffs.get(j).map_or(0.0, |c| c[l])
    }

    /// Sets `a_{j,l}`; writes beyond the truncation order are dropped.
    pub fn set(&mut self, j: usize, l: usize, c: f64) {
        assert!(l < 2, "log depth is capped at 1");
        if let Some(slot) = self.coeffs.get_mut(j) {
            slot[l] = c;
        }
    }

    /// Total coefficient of `log d` at order 0, prefix included.
    fn log0(&self) -> f64 {
        self.coeffs[0][1] - self.leading_log as f64
    }

    /// The same function with the `-m log d` prefix folded into slot `(0, 1)`.
    pub fn fold_prefix(&self) -> Self {
        let mut s = self.clone();
        s.coeffs[0][1] = self.log0();
        s.leading_log = 0;
        s
    }

    /// `self + m log d`: the series without its `-m log d` prefix.
    pub fn drop_prefix(&self) -> Self {
        PhSeries { leading_log: 0, ..self.clone() }
    }

    /// Lowest order carrying a nonzero log coefficient.
    pub fn lowest_log_order(&self) -> Option<usize> {
        if self.log0() != 0.0 {
            return Some(0);
        }
        (1..=self.order).find(|&j| self.coeffs[j][1] != 0.0)
    }

    pub fn has_log_content(&self) -> bool {
        self.lowest_log_order().is_some()
    }

    fn check_orders(&self, other: &Self) -> Result<()> {
        if self.order != other.order {
            return Err(Error::domain("series truncation orders differ"));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_orders(other)?;
        let leading_log = self.leading_log + other.leading_log;
        if leading_log > 1 {
            return Err(Error::domain("leading log prefix would exceed 1"));
        }
        let mut out = self.clone();
        out.leading_log = leading_log;
        for (o, t) in out.coeffs.iter_mut().zip(&other.coeffs) {
            o[0] += t[0];
            o[1] += t[1];
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_orders(other)?;
        let mut out = self.clone();
        if other.leading_log == 1 {
            if self.leading_log == 1 {
                out.leading_log = 0;
            } else {
                // -(-log d)
                out.coeffs[0][1] += 1.0;
            }
        }
        for (o, t) in out.coeffs.iter_mut().zip(&other.coeffs) {
            o[0] -= t[0];
            o[1] -= t[1];
        }
        Ok(out)
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = if self.leading_log == 0 { self.clone() } else { self.fold_prefix() };
        for slot in out.coeffs.iter_mut() {
            slot[0] *= c;
            slot[1] *= c;
        }
        out
    }

    /// Multiplication by `d^m`, dropping what falls past the truncation.
    pub fn shift(&self, m: usize) -> Self {
        let s = self.fold_prefix();
        let mut out = Self::zero(self.order);
        for j in 0..=self.order {
            if j + m <= self.order {
                out.coeffs[j + m] = s.coeffs[j];
            }
        }
        out
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_orders(other)?;
        let a = self.fold_prefix();
        let b = other.fold_prefix();
        let n = self.order;
        let mut out = Self::zero(n);
        for i in 0..=n {
            for j in 0..=n - i {
                let (ai, bj) = (a.coeffs[i], b.coeffs[j]);
                if ai[1] != 0.0 && bj[1] != 0.0 {
                    return Err(Error::domain(alloc::format!("product produces a log² term at order {}", i + j)));
                }
                out.coeffs[i + j][0] += ai[0] * bj[0];
                out.coeffs[i + j][1] += ai[0] * bj[1] + ai[1] * bj[0];
            }
        }
        Ok(out)
    }

    /// `exp(s) = Σ s^m / m!`, truncated.
    ///
    /// Requires a zero constant term, no log prefix, and log slots only at
    /// orders `> N/2`, so that no `log²` term falls inside the window.
    pub fn exp_series(&self) -> Result<Self> {
        let n = self.order;
        if self.leading_log != 0 || self.coeffs[0] != [0.0, 0.0] {
            return Err(Error::domain("exp_series needs a zero constant term and no log prefix"));
        }
        let min_log = n / 2 + 1;
        if (1..min_log.min(n + 1)).any(|j| self.coeffs[j][1] != 0.0) {
            return Err(Error::domain("exp_series needs log slots only at high orders"));
        }
        let mut out = Self::constant(n, 1.0);
        let mut term = Self::constant(n, 1.0);
        for m in 1..=n {
            term = term.mul(self)?.scale(1.0 / m as f64);
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Termwise `d/dd`. A `log d` at order zero becomes an explicit `1/d` pole.
    pub fn derivative(&self) -> PoleSeries {
        let n = self.order;
        let mut reg = Self::zero(n);
        for j in 1..=n {
            let [c0, c1] = self.coeffs[j];
            let jf = j as f64;
            reg.coeffs[j - 1][0] += jf * c0 + c1;
            reg.coeffs[j - 1][1] += jf * c1;
        }
        PoleSeries { poles: vec![self.log0()], regular: reg }
    }

    /// `1 / (c + s)` for `s` with zero constant part.
    pub fn geometric_inverse(c: f64, s: &Self) -> Result<Self> {
        if c == 0.0 {
            return Err(Error::domain("geometric_inverse needs a nonzero constant"));
        }
        if s.leading_log != 0 || s.coeffs[0] != [0.0, 0.0] {
            return Err(Error::domain("geometric_inverse needs s(0) = 0 and no log prefix"));
        }
        let n = s.order;
        let ratio = s.scale(-1.0 / c);
        let mut out = Self::constant(n, 1.0);
        let mut term = Self::constant(n, 1.0);
        for _ in 1..=n {
            term = term.mul(&ratio)?;
            out = out.add(&term)?;
        }
        Ok(out.scale(1.0 / c))
    }

    /// Numerical value at `d > 0`.
    pub fn eval(&self, d: f64) -> f64 {
        let ln = libm::log(d);
        let mut acc = -(self.leading_log as f64) * ln;
        let mut p = 1.0;
        for slot in &self.coeffs {
            acc += p * (slot[0] + slot[1] * ln);
            p *= d;
        }
        acc
    }

    /// Flat `(j, l, a_{j,l})` list covering every slot, prefix folded in.
    pub fn triples(&self) -> Vec<(usize, usize, f64)> {
        let s = self.fold_prefix();
        let mut out = Vec::with_capacity(2 * (self.order + 1));
        for (j, slot) in s.coeffs.iter().enumerate() {
            out.push((j, 0, slot[0]));
            out.push((j, 1, slot[1]));
        }
        out
    }

    /// First order `j` with a slot of magnitude above `tol`.
    pub fn first_nonzero_order(&self, tol: f64) -> Option<usize> {
        let s = self.fold_prefix();
        s.coeffs.iter().position(|c| c[0].abs() > tol || c[1].abs() > tol)
    }
}

/// A [`PhSeries`] plus finitely many poles `Σ p_i d^{-(i+1)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleSeries {
    /// `poles[i]` is the coefficient of `d^{-(i+1)}`.
    pub poles: Vec<f64>,
    pub regular: PhSeries,
}

impl PoleSeries {
    pub fn derivative(&self) -> PoleSeries {
        let inner = self.regular.derivative();
        let mut poles = vec![0.0; self.poles.len() + 1];
        poles[0] = inner.poles[0];
        for (i, &p) in self.poles.iter().enumerate() {
            poles[i + 1] -= (i + 1) as f64 * p;
        }
        PoleSeries { poles, regular: inner.regular }
    }

    /// Multiplies by `d^m`, which must clear every pole.
    pub fn times_d_pow(&self, m: usize) -> Result<PhSeries> {
        if self.poles.iter().skip(m).any(|&p| p != 0.0) {
            return Err(Error::domain("multiplying by d^m leaves a pole"));
        }
        let mut out = self.regular.shift(m);
        for (i, &p) in self.poles.iter().enumerate().take(m) {
            let j = m - i - 1;
            if j <= out.order {
                out.coeffs[j][0] += p;
            }
        }
        Ok(out)
    }
}
