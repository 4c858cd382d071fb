//! Truncated Laurent series over `F_q`.
//!
//! A [`Series`] is either an exact Laurent polynomial or a series known only
//! modulo `t^prec`. Arithmetic propagates precision pessimistically: a result
//! never claims coefficients that the inputs do not determine, and reading a
//! coefficient at or above the precision is a [`Error::Precision`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Fe, Fq};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Series {
    /// Exponent of `coeffs[0]`; zero when `coeffs` is empty.
    lo: i64,
    /// Nonzero first and last entries; empty for the zero series.
    coeffs: Vec<Fe>,
    /// `None` for exact values, `Some(h)` when known modulo `t^h`.
    prec: Option<i64>,
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl Series {
    /// Builds a series from dense coefficients starting at exponent `lo`.
    /// Coefficients at or above `prec` are dropped.
    pub fn from_coeffs(lo: i64, coeffs: Vec<Fe>, prec: Option<i64>) -> Self {
        let mut coeffs = coeffs;
        if let Some(h) = prec {
            let keep = (h - lo).clamp(0, coeffs.len() as i64) as usize;
            coeffs.truncate(keep);
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        let lead = coeffs.iter().position(|&c| c != 0).unwrap_or(coeffs.len());
        coeffs.drain(..lead);
        let lo = if coeffs.is_empty() { 0 } else { lo + lead as i64 };
        Series { lo, coeffs, prec }
    }

    /// Sparse constructor from `(exponent, coefficient)` pairs; repeated
    /// exponents are summed.
    pub fn from_terms(terms: &[(i64, Fe)], prec: Option<i64>, f: &Fq) -> Self {
        let Some(lo) = terms.iter().map(|t| t.0).min() else {
            return Self::from_coeffs(0, vec![], prec);
        };
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![0; (hi - lo + 1) as usize];
        for &(k, c) in terms {
            let slot = &mut coeffs[(k - lo) as usize];
            *slot = f.add(*slot, c);
        }
        Self::from_coeffs(lo, coeffs, prec)
    }

    pub fn zero() -> Self {
        Series { lo: 0, coeffs: vec![], prec: None }
    }

    /// The unknown series `O(t^h)`.
    pub fn big_o(h: i64) -> Self {
        Series { lo: 0, coeffs: vec![], prec: Some(h) }
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    /// The exact monomial `c t^k`.
    pub fn monomial(c: Fe, k: i64) -> Self {
        Self::from_coeffs(k, vec![c], None)
    }

    /// Least exponent with a nonzero coefficient; `None` when the series is
    /// zero inside its window.
    pub fn valuation(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.lo)
    }

    /// A lower bound for the valuation of every series this value stands for.
    /// `None` means the value is exactly zero.
    fn valuation_bound(&self) -> Option<i64> {
        self.valuation().or(self.prec)
    }

    pub fn precision(&self) -> Option<i64> {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    /// `true` when all known coefficients vanish.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exponent window `[lo, hi)` of stored coefficients; `hi` is the precision
    /// for truncated series and one past the top term for exact ones.
    pub fn window(&self) -> (i64, Option<i64>) {
        (self.lo, self.prec)
    }

    /// Top exponent with a nonzero stored coefficient.
    pub fn degree(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then(|| self.lo + self.coeffs.len() as i64 - 1)
    }

    pub fn coeff(&self, k: i64) -> Result<Fe> {
        if let Some(h) = self.prec {
            if k >= h {
                return Err(Error::Precision { needed: k + 1, available: h });
            }
        }
        let i = k - self.lo;
        Ok(if i < 0 || i >= self.coeffs.len() as i64 { 0 } else { self.coeffs[i as usize] })
    }

    /// Nonzero terms as `(exponent, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (i64, Fe)> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, &c)| c != 0).map(move |(i, &c)| (self.lo + i as i64, c))
    }

    /// Reduction modulo `t^h`; never raises the precision.
    pub fn truncate(&self, h: i64) -> Self {
        let prec = Some(self.prec.map_or(h, |p| p.min(h)));
        Self::from_coeffs(self.lo, self.coeffs.clone(), prec)
    }

    /// The stored terms as an exact Laurent polynomial.
    pub fn stored_terms(&self) -> Self {
        Series { lo: self.lo, coeffs: self.coeffs.clone(), prec: None }
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        Series {
            lo: if self.coeffs.is_empty() { 0 } else { self.lo + k },
            coeffs: self.coeffs.clone(),
            prec: self.prec.map(|h| h + k),
        }
    }

    pub fn add(&self, other: &Series, f: &Fq) -> Series {
        let prec = min_opt(self.prec, other.prec);
        if self.coeffs.is_empty() {
            return Self::from_coeffs(other.lo, other.coeffs.clone(), prec);
        }
        if other.coeffs.is_empty() {
            return Self::from_coeffs(self.lo, self.coeffs.clone(), prec);
        }
        let lo = self.lo.min(other.lo);
        let hi = self.degree().unwrap().max(other.degree().unwrap());
        let mut coeffs = vec![0; (hi - lo + 1) as usize];
        for (k, c) in self.terms().chain(other.terms()) {
            let slot = &mut coeffs[(k - lo) as usize];
            *slot = f.add(*slot, c);
        }
        Self::from_coeffs(lo, coeffs, prec)
    }

    pub fn neg(&self, f: &Fq) -> Series {
        Series { lo: self.lo, coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect(), prec: self.prec }
    }

    pub fn sub(&self, other: &Series, f: &Fq) -> Series {
        self.add(&other.neg(f), f)
    }

    pub fn scale(&self, c: Fe, f: &Fq) -> Series {
        Self::from_coeffs(self.lo, self.coeffs.iter().map(|&x| f.mul(x, c)).collect(), self.prec)
    }

    /// `n`-fold sum.
    pub fn times(&self, n: u64, f: &Fq) -> Series {
        self.scale(f.from_int((n % f.characteristic() as u64) as i64), f)
    }

    pub fn mul(&self, other: &Series, f: &Fq) -> Series {
        if (self.is_exact() && self.is_zero()) || (other.is_exact() && other.is_zero()) {
            return Series::zero();
        }
        // a = A + O(t^pa), b = B + O(t^pb): the product is known below
        // min(v(A) + pb, v(B) + pa).
        let prec = match (self.prec, other.prec) {
            (None, None) => None,
            _ => {
                let lhs = match (self.valuation_bound(), other.prec) {
                    (Some(v), Some(p)) => Some(v + p),
                    _ => None,
                };
                let rhs = match (other.valuation_bound(), self.prec) {
                    (Some(v), Some(p)) => Some(v + p),
                    _ => None,
                };
                min_opt(lhs, rhs)
            }
        };
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::from_coeffs(0, vec![], prec);
        }
        let lo = self.lo + other.lo;
        let mut len = self.coeffs.len() + other.coeffs.len() - 1;
        if let Some(h) = prec {
            len = len.min((h - lo).max(0) as usize);
        }
        let mut coeffs = vec![0; len];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 || i >= len {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                coeffs[i + j] = f.add(coeffs[i + j], f.mul(a, b));
            }
        }
        Self::from_coeffs(lo, coeffs, prec)
    }

    /// Multiplicative inverse known modulo `t^cap`, or less if the input
    /// precision does not determine that many coefficients.
    pub fn inv(&self, cap: i64, f: &Fq) -> Result<Series> {
        let Some(v) = self.valuation() else {
            return match self.prec {
                None => Err(Error::InvalidParameter("inverse of zero".into())),
                Some(h) => Err(Error::Precision { needed: h + 1, available: h }),
            };
        };
        // relative precision of the unit part
        let prec = match self.prec {
            None => cap,
            Some(h) => cap.min(h - 2 * v),
        };
        let n = (prec + v).max(0) as usize;
        let u0inv = f.inv(self.coeffs[0]).expect("leading coefficient is nonzero");
        let mut w: Vec<Fe> = Vec::with_capacity(n);
        for k in 0..n {
            if k == 0 {
                w.push(u0inv);
                continue;
            }
            let mut acc = 0;
            for j in 1..=k.min(self.coeffs.len() - 1) {
                acc = f.add(acc, f.mul(self.coeffs[j], w[k - j]));
            }
            w.push(f.neg(f.mul(u0inv, acc)));
        }
        Ok(Self::from_coeffs(-v, w, Some(prec)))
    }

    /// `self / den`, known at least modulo `t^target`.
    pub fn div(&self, den: &Series, target: i64, f: &Fq) -> Result<Series> {
        if self.is_exact() && self.is_zero() {
            return Ok(Series::zero());
        }
        let num_val = self.valuation_bound().unwrap();
        let inv = den.inv(target - num_val, f)?;
        let q = self.mul(&inv, f);
        match q.prec {
            Some(h) if h < target => Err(Error::Precision { needed: target, available: h }),
            _ => Ok(q.truncate(target)),
        }
    }

    /// Series equality on the common window.
    pub fn agrees_with(&self, other: &Series, f: &Fq) -> bool {
        self.sub(other, f).is_zero()
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "{self}")
    }
}

impl fmt::Display for Series {
    /// Sparse `(exponent, coefficient)` listing, e.g. `[(-2,1), (3,1)] + O(t^8)`.
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.terms().map(|(k, c)| format!("({k},{c})")).collect();
        write!(fm, "[{}]", terms.join(", "))?;
        if let Some(h) = self.prec {
            write!(fm, " + O(t^{h})")?;
        }
        Ok(())
    }
}
