//! `SL_2` over truncated Laurent series, acting on the Bruhat-Tits tree.
//!
//! The vertex `(h, x)` is the homothety class of the lattice spanned by the
//! columns of `[[t^h, x], [0, 1]]`. A matrix `g` acts by left multiplication
//! followed by column reduction back to that shape, which amounts to the
//! Moebius rule `x' = (a x + b) / (c x + d)` or `x' = a / c` depending on
//! which entry of the bottom row has the smaller valuation.

use crate::error::{Error, Result};
use crate::field::{Fe, Fq};
use crate::series::Series;
use crate::treewall::{TreeAction, TreeVertex};

/// `[[a, b], [c, d]]` with determinant one on the common precision window.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentMatrix {
    pub a: Series,
    pub b: Series,
    pub c: Series,
    pub d: Series,
}

/// What is known about a valuation.
#[derive(Clone, Copy, Debug)]
enum Val {
    Exact(i64),
    AtLeast(i64),
    Infinite,
}

fn val(s: &Series) -> Val {
    match (s.valuation(), s.precision()) {
        (Some(v), _) => Val::Exact(v),
        (None, Some(h)) => Val::AtLeast(h),
        (None, None) => Val::Infinite,
    }
}

impl LaurentMatrix {
    pub fn new(a: Series, b: Series, c: Series, d: Series, f: &Fq) -> Result<Self> {
        let m = LaurentMatrix { a, b, c, d };
        let det = m.det(f);
        if !det.agrees_with(&Series::one(), f) {
            return Err(Error::NotInModel(format!("determinant {det} is not 1")));
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        LaurentMatrix { a: Series::one(), b: Series::zero(), c: Series::zero(), d: Series::one() }
    }

    /// `[[1, u], [0, 1]]`, acting as the translation by `u`.
    pub fn upper(u: Series) -> Self {
        LaurentMatrix { b: u, ..Self::identity() }
    }

    /// `[[1, 0], [z, 1]]`.
    pub fn lower(z: Series) -> Self {
        LaurentMatrix { c: z, ..Self::identity() }
    }

    /// `diag(s, s^{-1})` with the inverse known modulo `t^cap`.
    pub fn torus(s: &Series, cap: i64, f: &Fq) -> Result<Self> {
        Ok(LaurentMatrix { a: s.clone(), d: s.inv(cap, f)?, ..Self::identity() })
    }

    /// `diag(t^{-m}, t^m)`, which acts as `tau^m`.
    pub fn tau(m: i64) -> Self {
        LaurentMatrix { a: Series::monomial(1, -m), d: Series::monomial(1, m), ..Self::identity() }
    }

    pub fn det(&self, f: &Fq) -> Series {
        self.a.mul(&self.d, f).sub(&self.b.mul(&self.c, f), f)
    }

    pub fn mul(&self, o: &LaurentMatrix, f: &Fq) -> LaurentMatrix {
        let dot = |x: &Series, y: &Series, z: &Series, w: &Series| x.mul(y, f).add(&z.mul(w, f), f);
        LaurentMatrix {
            a: dot(&self.a, &o.a, &self.b, &o.c),
            b: dot(&self.a, &o.b, &self.b, &o.d),
            c: dot(&self.c, &o.a, &self.d, &o.c),
            d: dot(&self.c, &o.b, &self.d, &o.d),
        }
    }

    /// Inverse `[[d, -b], [-c, a]]` of a determinant-one matrix.
    pub fn inverse(&self, f: &Fq) -> LaurentMatrix {
        LaurentMatrix { a: self.d.clone(), b: self.b.neg(f), c: self.c.neg(f), d: self.a.clone() }
    }

    /// `tau^n g tau^{-n} = [[a, t^{-2n} b], [t^{2n} c, d]]`.
    pub fn conj_by_tau(&self, n: i64) -> LaurentMatrix {
        LaurentMatrix { a: self.a.clone(), b: self.b.shift(-2 * n), c: self.c.shift(2 * n), d: self.d.clone() }
    }

    /// Entries all have non-negative valuation (lower bounds count).
    pub fn is_integral(&self) -> bool {
        [&self.a, &self.b, &self.c, &self.d].iter().all(|s| match val(s) {
            Val::Exact(v) | Val::AtLeast(v) => v >= 0,
            Val::Infinite => true,
        })
    }

    pub fn entries(&self) -> [&Series; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    /// Elementary generators `c t^k` of the upper and lower root groups for
    /// `k` in `ks`, with entries known modulo `t^window`.
    pub fn elementary(f: &Fq, ks: impl Iterator<Item = i64> + Clone, window: i64) -> Vec<Self> {
        let mut out = Vec::new();
        for k in ks {
            for c in f.units() {
                let m = Series::monomial(c, k).truncate(window);
                out.push(Self::upper(m.clone()));
                out.push(Self::lower(m));
            }
        }
        out
    }

    pub fn scalar_torus(f: &Fq, window: i64) -> Result<Vec<Self>> {
        f.units()
            .filter(|&c| c != 1)
            .map(|c: Fe| Self::torus(&Series::monomial(c, 0).truncate(window), window, f))
            .collect()
    }
}

impl TreeAction for LaurentMatrix {
    fn act(&self, v: &TreeVertex, f: &Fq) -> Result<TreeVertex> {
        let h = v.height();
        let x = v.representative();
        // bottom row of g * [[t^h, x], [0, 1]]
        let m21 = self.c.shift(h);
        let m22 = self.c.mul(&x, f).add(&self.d, f);
        let det_val = match val(&self.det(f)) {
            Val::Exact(v) => v,
            Val::AtLeast(p) => return Err(Error::Precision { needed: p + 1, available: p }),
            Val::Infinite => return Err(Error::NotInModel("singular matrix".into())),
        };
        let undecided = |p: i64| Error::Precision { needed: p + 1, available: p };
        // pivot on the column whose bottom entry has the smaller valuation
        let pivot_right = match (val(&m21), val(&m22)) {
            (_, Val::Infinite) => false,
            (Val::Infinite, _) => true,
            (Val::Exact(v21), Val::Exact(v22)) => v22 <= v21,
            (Val::AtLeast(b21), Val::Exact(v22)) => {
                if v22 <= b21 {
                    true
                } else {
                    return Err(undecided(b21));
                }
            }
            (Val::Exact(v21), Val::AtLeast(b22)) => {
                if v21 < b22 {
                    false
                } else {
                    return Err(undecided(b22));
                }
            }
            (Val::AtLeast(b21), Val::AtLeast(b22)) => return Err(undecided(b21.min(b22))),
        };
        let e = if pivot_right { m22.valuation().unwrap() } else { m21.valuation().unwrap() };
        let h2 = h + det_val - 2 * e;
        let x2 = if pivot_right {
            let m12 = self.a.mul(&x, f).add(&self.b, f);
            m12.div(&m22, h2, f)?
        } else {
            self.a.div(&self.c, h2, f)?
        };
        TreeVertex::new(h2, &x2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treewall::{TreeBall, TreeWallElement};

    #[test]
    fn unipotent_and_tau_match_treewall_elements() {
        let f = Fq::new(3).unwrap();
        let ball = TreeBall::new(&f, 4);
        let u = Series::from_terms(&[(-2, 1), (0, 2), (3, 1)], None, &f);
        assert_eq!(
            LaurentMatrix::upper(u.clone()).table(&ball).unwrap(),
            TreeWallElement::Translation(u).table(&ball).unwrap()
        );
        for m in -2..=2 {
            assert_eq!(LaurentMatrix::tau(m).table(&ball).unwrap(), TreeWallElement::TauPower(m).table(&ball).unwrap());
        }
    }

    #[test]
    fn weyl_element_swaps_line_ends() {
        let f = Fq::new(2).unwrap();
        let w = LaurentMatrix::new(Series::zero(), Series::one(), Series::one(), Series::zero(), &f).unwrap();
        for m in -4..=4 {
            assert_eq!(w.act(&TreeVertex::line(m), &f).unwrap(), TreeVertex::line(-m));
        }
    }

    #[test]
    fn action_is_a_homomorphism() {
        let f = Fq::new(3).unwrap();
        let ball = TreeBall::new(&f, 3);
        let g = LaurentMatrix::lower(Series::monomial(1, 1))
            .mul(&LaurentMatrix::upper(Series::from_terms(&[(-1, 2), (0, 1)], None, &f)), &f);
        let h = LaurentMatrix::torus(&Series::from_coeffs(0, vec![2, 1], None), 20, &f)
            .unwrap()
            .mul(&LaurentMatrix::lower(Series::monomial(2, 0)), &f);
        let gh = g.mul(&h, &f);
        for v in ball.vertices() {
            let lhs = gh.act(v, &f).unwrap();
            let rhs = g.act(&h.act(v, &f).unwrap(), &f).unwrap();
            assert_eq!(lhs, rhs);
        }
        assert!(gh.table(&ball).unwrap().preserves_adjacency());
    }

    #[test]
    fn integral_matrices_fix_base_vertex() {
        let f = Fq::new(2).unwrap();
        let g = LaurentMatrix::lower(Series::one())
            .mul(&LaurentMatrix::upper(Series::from_coeffs(0, vec![1, 1], None)), &f);
        assert!(g.is_integral());
        assert_eq!(g.act(&TreeVertex::base(), &f).unwrap(), TreeVertex::base());
    }

    #[test]
    fn conjugation_shifts_corner_valuations() {
        let f = Fq::new(2).unwrap();
        let g = LaurentMatrix::new(
            Series::one(),
            Series::from_coeffs(0, vec![1, 1], None),
            Series::monomial(1, 1),
            Series::from_coeffs(0, vec![1, 1, 1], None),
            &f,
        )
        .unwrap();
        for n in -3..=3 {
            let h = g.conj_by_tau(n);
            assert_eq!(h.b.valuation(), g.b.valuation().map(|v| v - 2 * n));
            assert_eq!(h.c.valuation(), g.c.valuation().map(|v| v + 2 * n));
            // agrees with explicit conjugation by the diagonal matrix
            let explicit = LaurentMatrix::tau(n).mul(&g, &f).mul(&LaurentMatrix::tau(-n), &f);
            assert_eq!(explicit, h);
        }
    }

    #[test]
    fn truncated_entries_raise_precision_errors() {
        let f = Fq::new(2).unwrap();
        let g = LaurentMatrix::upper(Series::monomial(1, -3).truncate(1));
        assert!(g.act(&TreeVertex::new(1, &Series::zero()).unwrap(), &f).is_ok());
        assert!(matches!(g.act(&TreeVertex::new(2, &Series::zero()).unwrap(), &f), Err(Error::Precision { .. })));
    }

    #[test]
    fn rejects_wrong_determinant() {
        let f = Fq::new(3).unwrap();
        assert!(LaurentMatrix::new(Series::monomial(2, 0), Series::zero(), Series::zero(), Series::one(), &f).is_err());
    }
}
