//! Small finite fields `F_q` backed by precomputed tables.
//!
//! Elements are encoded as integers in `0..q`. For `q = p^k` with `k > 1` the
//! integer `d_0 + d_1 p + ... + d_{k-1} p^{k-1}` stands for the residue class of
//! `d_0 + d_1 x + ... + d_{k-1} x^{k-1}` modulo a monic irreducible polynomial.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A field element, encoded as an integer in `0..q`.
pub type Fe = u16;

/// Largest order accepted; keeps the `q * q` tables small.
pub const MAX_ORDER: u32 = 1024;

struct Tables {
    q: u32,
    p: u32,
    degree: u32,
    modulus: Vec<u32>,
    add: Vec<Fe>,
    mul: Vec<Fe>,
    neg: Vec<Fe>,
    inv: Vec<Fe>,
}

/// The finite field with `q` elements.
#[derive(Clone)]
pub struct Fq {
    t: Arc<Tables>,
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.t.q)
    }
}

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        self.t.q == other.t.q && self.t.modulus == other.t.modulus
    }
}

impl Eq for Fq {}

/// Splits `q` as `p^k`, if it is a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut k = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

impl Fq {
    /// The field of order `q`. Primes are native; `q = 4` uses `x^2 + x + 1`.
    /// Other prime powers need [`Fq::with_modulus`].
    pub fn new(q: u32) -> Result<Self> {
        let (p, k) = prime_power(q).ok_or(Error::UnsupportedField { q, reason: "not a prime power" })?;
        match k {
            1 => Self::with_modulus(p, &[0, 1]),
            _ if q == 4 => Self::with_modulus(2, &[1, 1, 1]),
            _ => Err(Error::UnsupportedField {
                q,
                reason: "prime powers other than 4 need an explicit irreducible polynomial",
            }),
        }
    }

    /// The field `F_p[x]/(f)` where `modulus` lists the coefficients of the
    /// monic polynomial `f` from the constant term upwards.
    pub fn with_modulus(p: u32, modulus: &[u32]) -> Result<Self> {
        if prime_power(p) != Some((p, 1)) {
            return Err(Error::UnsupportedField { q: p, reason: "characteristic must be prime" });
        }
        let degree = modulus.len().saturating_sub(1) as u32;
        if degree == 0 || modulus.last().copied().map(|c| c % p) != Some(1) {
            return Err(Error::UnsupportedField { q: p, reason: "modulus must be monic of positive degree" });
        }
        let q = p
            .checked_pow(degree)
            .filter(|&q| q <= MAX_ORDER)
            .ok_or(Error::UnsupportedField { q: p, reason: "field too large for table arithmetic" })?;
        let modulus: Vec<u32> = modulus.iter().map(|c| c % p).collect();
        let digits = |mut a: u32| {
            let mut d = vec![0u32; degree as usize];
            for slot in d.iter_mut() {
                *slot = a % p;
                a /= p;
            }
            d
        };
        let encode = |d: &[u32]| d.iter().rev().fold(0u32, |acc, &c| acc * p + c);

        let n = q as usize;
        let mut add = vec![0 as Fe; n * n];
        let mut mul = vec![0 as Fe; n * n];
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = encode(&sum) as Fe;

                // schoolbook product, then reduce by the monic modulus
                let mut prod = vec![0u32; 2 * degree as usize];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                for top in (degree as usize..prod.len()).rev() {
                    let c = prod[top];
                    if c == 0 {
                        continue;
                    }
                    let shift = top - degree as usize;
                    for (i, m) in modulus.iter().enumerate() {
                        prod[shift + i] = (prod[shift + i] + (p - c) * m) % p;
                    }
                }
                mul[(a * q + b) as usize] = encode(&prod[..degree as usize]) as Fe;
            }
        }
        let neg: Vec<Fe> = (0..q).map(|a| (0..q).find(|&b| add[(a * q + b) as usize] == 0).unwrap() as Fe).collect();
        let mut inv = vec![0 as Fe; n];
        for a in 1..q {
            match (1..q).find(|&b| mul[(a * q + b) as usize] == 1) {
                Some(b) => inv[a as usize] = b as Fe,
                None => return Err(Error::UnsupportedField { q, reason: "modulus is reducible" }),
            }
        }
        Ok(Fq { t: Arc::new(Tables { q, p, degree, modulus, add, mul, neg, inv }) })
    }

    pub fn order(&self) -> u32 {
        self.t.q
    }

    pub fn characteristic(&self) -> u32 {
        self.t.p
    }

    pub fn degree(&self) -> u32 {
        self.t.degree
    }

    pub fn zero(&self) -> Fe {
        0
    }

    pub fn one(&self) -> Fe {
        1
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        0..self.t.q as Fe
    }

    pub fn units(&self) -> impl Iterator<Item = Fe> {
        1..self.t.q as Fe
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        self.t.add[a as usize * self.t.q as usize + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        self.t.mul[a as usize * self.t.q as usize + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        self.t.neg[a as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: Fe) -> Option<Fe> {
        (a != 0).then(|| self.t.inv[a as usize])
    }

    /// The image of an integer under `Z -> F_p -> F_q`.
    pub fn from_int(&self, n: i64) -> Fe {
        n.rem_euclid(self.t.p as i64) as Fe
    }

    /// Multiplicative order of a unit.
    pub fn multiplicative_order(&self, a: Fe) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let mut x = a;
        let mut k = 1;
        while x != 1 {
            x = self.mul(x, a);
            k += 1;
        }
        Some(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_axioms(f: &Fq) {
        let els: Vec<Fe> = f.elements().collect();
        for &a in &els {
            assert_eq!(f.add(a, 0), a);
            assert_eq!(f.mul(a, 1), a);
            assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
            for &b in &els {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for &c in &els {
                    assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }

    #[test]
    fn axioms_exhaustive_small_orders() {
        for q in [2, 3, 4, 5] {
            check_axioms(&Fq::new(q).unwrap());
        }
    }

    #[test]
    fn f4_has_cube_roots_of_unity() {
        let f = Fq::new(4).unwrap();
        assert_eq!(f.characteristic(), 2);
        assert_eq!(f.degree(), 2);
        for a in f.units() {
            assert_eq!(f.multiplicative_order(a).unwrap().is_multiple_of(3), a != 1);
        }
    }

    #[test]
    fn explicit_modulus_for_f9() {
        // x^2 + 1 is irreducible over F_3
        let f = Fq::with_modulus(3, &[1, 0, 1]).unwrap();
        assert_eq!(f.order(), 9);
        check_axioms(&f);
        // x^2 - 1 is not
        assert!(Fq::with_modulus(3, &[2, 0, 1]).is_err());
    }

    #[test]
    fn rejects_non_prime_powers() {
        assert!(matches!(Fq::new(6), Err(Error::UnsupportedField { q: 6, .. })));
        assert!(Fq::new(1).is_err());
        assert!(Fq::new(8).is_err());
        assert_eq!(prime_power(27), Some((3, 3)));
        assert_eq!(prime_power(12), None);
    }

    #[test]
    fn exponent_p_additive_group() {
        for q in [2, 3, 4, 5, 7] {
            let f = Fq::new(q).unwrap();
            for a in f.elements() {
                let s = (0..f.characteristic()).fold(0, |acc, _| f.add(acc, a));
                assert_eq!(s, 0);
            }
        }
    }
}
