//! Growth series of right-angled Fuchsian Weyl groups and the covolume
//! criterion `W(1/q) < inf`.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthSeries {
    pub coefficients: Vec<u64>,
    /// `(numerator, denominator)` as coefficient lists in increasing degree.
    pub closed_form: Option<(Vec<i64>, Vec<i64>)>,
}

impl GrowthSeries {
    /// Whether the closed form expands to the stored coefficients.
    pub fn closed_form_matches(&self) -> Option<bool> {
        let (num, den) = self.closed_form.as_ref()?;
        let n = self.coefficients.len().checked_sub(1)?;
        let exp = expand_rational(num, den, n).ok()?;
        Some(exp.iter().zip(&self.coefficients).all(|(e, &c)| *e == BigInt::from(c)))
    }
}

/// `(1+t)^2 / (1 - (r-2) t + t^2)`.
pub fn fuchsian_closed_form(r: usize) -> Result<(Vec<i64>, Vec<i64>)> {
    if r < 5 {
        return Err(Error::InvalidParameter(format!("polygon size r = {r} < 5")));
    }
    Ok((vec![1, 2, 1], vec![1, -(r as i64 - 2), 1]))
}

/// Power-series coefficients of `num / den` through degree `n`; `den[0]` must be 1.
pub fn expand_rational(num: &[i64], den: &[i64], n: usize) -> Result<Vec<BigInt>> {
    if den.first() != Some(&1) {
        return Err(Error::InvalidParameter("denominator must have constant term 1".into()));
    }
    let mut out: Vec<BigInt> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut c = BigInt::from(*num.get(k).unwrap_or(&0));
        for (j, &d) in den.iter().enumerate().skip(1) {
            if j <= k {
                c -= &out[k - j] * d;
            }
        }
        out.push(c);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum LatticeVerdict {
    /// `W(1/q)` converges; the exact value.
    Lattice {
        #[serde(serialize_with = "ser_rational")]
        value: BigRational,
    },
    NotLattice,
}

fn ser_rational<S: serde::Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Decides convergence of `W(1/q)` from the denominator: it converges iff
/// `q` exceeds the larger root of `x^2 - (r-2) x + 1`, i.e. iff `q` is past
/// the vertex `(r-2)/2` and the quadratic is positive at `q`. The value then
/// is `(q+1)^2 / (q^2 - (r-2) q + 1)`.
pub fn lattice_criterion(r: usize, q: u64) -> Result<LatticeVerdict> {
    if r < 5 {
        return Err(Error::InvalidParameter(format!("polygon size r = {r} < 5")));
    }
    if q < 2 {
        return Err(Error::InvalidParameter(format!("thickness parameter q = {q} < 2")));
    }
    let (r, q) = (BigInt::from(r), BigInt::from(q));
    let two = BigInt::from(2);
    let b = &r - &two;
    let quad = &q * &q - &b * &q + BigInt::one();
    if &q * &two > b && quad.is_positive() {
        let num = (&q + BigInt::one()).pow(2);
        Ok(LatticeVerdict::Lattice { value: BigRational::new(num, quad) })
    } else {
        Ok(LatticeVerdict::NotLattice)
    }
}

/// Independent evidence from the coefficients: the terms `a_n / q^n` of the
/// partial sums shrink geometrically (convergence) or do not (divergence).
/// Returns `Some(true)` for convergence, `Some(false)` for divergence and
/// `None` when `n` terms do not separate the two.
pub fn partial_sum_evidence(coeffs: &[BigInt], q: u64) -> Option<bool> {
    let n = coeffs.len();
    if n < 4 {
        return None;
    }
    let q = BigInt::from(q);
    // ratio a_{k+1} / (q a_k) for the last terms
    let ratio = |k: usize| BigRational::new(coeffs[k + 1].clone(), &coeffs[k] * &q);
    let last = ratio(n - 2);
    let prev = ratio(n - 3);
    let one = BigRational::one();
    let spread = (&last - &prev).abs();
    let margin = (&last - &one).abs();
    if margin <= spread || margin.is_zero() {
        return None;
    }
    Some(last < one)
}

/// The partial sum `sum_{k<=n} a_k q^{-k}` as an exact rational.
pub fn partial_sum(coeffs: &[BigInt], q: u64) -> BigRational {
    let q = BigInt::from(q);
    let mut pow = BigInt::one();
    let mut s = BigRational::zero();
    for c in coeffs {
        s += BigRational::new(c.clone(), pow.clone());
        pow *= &q;
    }
    s
}

pub fn rational_to_f64(x: &BigRational) -> f64 {
    x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansion_r5() {
        let (num, den) = fuchsian_closed_form(5).unwrap();
        let e = expand_rational(&num, &den, 5).unwrap();
        let expected: Vec<BigInt> = [1, 5, 15, 40, 105, 275].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(e, expected);
        assert!(fuchsian_closed_form(4).is_err());
    }

    #[test]
    fn w_of_one_third() {
        match lattice_criterion(5, 3).unwrap() {
            LatticeVerdict::Lattice { value } => assert_eq!(value, BigRational::from_integer(16.into())),
            v => panic!("{v:?}"),
        }
        assert_eq!(lattice_criterion(6, 3).unwrap(), LatticeVerdict::NotLattice);
        assert_eq!(lattice_criterion(5, 2).unwrap(), LatticeVerdict::NotLattice);
    }

    #[test]
    fn grid_matches_q_at_least_r_minus_2() {
        for r in 5..=12 {
            for q in 2..=12u64 {
                let verdict = lattice_criterion(r, q).unwrap();
                assert_eq!(matches!(verdict, LatticeVerdict::Lattice { .. }), q >= r as u64 - 2);
            }
        }
    }

    #[test]
    fn partial_sums_approach_the_value() {
        let (num, den) = fuchsian_closed_form(5).unwrap();
        let coeffs = expand_rational(&num, &den, 200).unwrap();
        assert_eq!(partial_sum_evidence(&coeffs, 3), Some(true));
        assert_eq!(partial_sum_evidence(&coeffs, 2), Some(false));
        let s = rational_to_f64(&partial_sum(&coeffs, 3));
        assert!((s - 16.0).abs() < 1e-6, "{s}");
    }
}
