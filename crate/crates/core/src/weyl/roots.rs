//! Real roots as half-spaces of the Coxeter complex, and a three-valued test
//! for prenilpotency of root pairs.
//!
//! A chamber `v` lies in the half-space of the root `a` when `v^{-1} a > 0`.
//! The pair `{a, b}` is prenilpotent when both `a ∩ b` and `(-a) ∩ (-b)`
//! contain chambers, i.e. when some `w` makes `w a`, `w b` both positive and
//! some `w'` makes them both negative.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rootdata::Gcm;

use super::{enumerate_ball, is_negative, normal_form, WeylElement, DEFAULT_ELEMENT_LIMIT};

/// A real root in the simple-root basis; all coordinates share one sign.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct RootVector {
    coords: Vec<i64>,
}

impl RootVector {
    pub fn new(coords: Vec<i64>) -> Result<Self> {
        let pos = coords.iter().all(|&x| x >= 0) && coords.iter().any(|&x| x > 0);
        if !pos && !is_negative(&coords) {
            return Err(Error::NotInModel(format!("{coords:?} is not a real root: mixed or zero")));
        }
        Ok(RootVector { coords })
    }

    pub fn simple(gcm: &Gcm, i: usize) -> Result<Self> {
        gcm.check_index(i)?;
        let mut c = vec![0; gcm.rank()];
        c[i] = 1;
        Ok(RootVector { coords: c })
    }

    /// `w alpha_i`.
    pub fn real_root(gcm: &Gcm, w: &WeylElement, i: usize) -> Result<Self> {
        gcm.check_index(i)?;
        RootVector::new(w.matrix().column(i))
            .map_err(|e| Error::Internal(format!("image of a simple root is not real: {e}")))
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn is_positive(&self) -> bool {
        self.coords.iter().all(|&x| x >= 0)
    }

    pub fn neg(&self) -> Self {
        RootVector { coords: self.coords.iter().map(|x| -x).collect() }
    }

    pub fn apply(&self, w: &WeylElement) -> Result<RootVector> {
        RootVector::new(w.apply(&self.coords))
    }

    /// `a^T A b`, the invariant form when `A` is symmetric.
    pub fn pairing(&self, gcm: &Gcm, other: &RootVector) -> i64 {
        let n = gcm.rank();
        (0..n).map(|i| (0..n).map(|j| self.coords[i] * gcm.get(i, j) * other.coords[j]).sum::<i64>()).sum()
    }
}

impl fmt::Debug for RootVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords)
    }
}

/// Whether chamber `v` lies in the half-space of `a`.
pub fn in_half_space(v: &WeylElement, a: &RootVector) -> bool {
    v.inverse_matrix().apply(a.coords()).iter().all(|&x| x >= 0)
}

/// The four sign regions cut out by two roots; `PlusMinus` is `a ∩ (-b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Intersection {
    PlusPlus,
    PlusMinus,
    MinusPlus,
    MinusMinus,
}

impl Intersection {
    pub const ALL: [Intersection; 4] =
        [Intersection::PlusPlus, Intersection::PlusMinus, Intersection::MinusPlus, Intersection::MinusMinus];

    fn of(wa_pos: bool, wb_pos: bool) -> Self {
        match (wa_pos, wb_pos) {
            (true, true) => Intersection::PlusPlus,
            (true, false) => Intersection::PlusMinus,
            (false, true) => Intersection::MinusPlus,
            (false, false) => Intersection::MinusMinus,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum PrenilpotencyVerdict {
    /// `w a, w b > 0` and `w' a, w' b < 0`; witnesses as normal words.
    Prenilpotent {
        positive: Vec<usize>,
        negative: Vec<usize>,
    },
    /// The region `empty` has no chamber: it sits inside `c ∩ (-c)` for the
    /// separating root `c`. Unless `a = -b`, the walls are disjoint
    /// (`|B(a, b)| >= 2`), so of the four regions exactly one is empty, and
    /// `witnesses` exhibits chambers in the other three.
    NonPrenilpotent {
        empty: Intersection,
        separating_root: RootVector,
        pairing: Option<i64>,
        witnesses: Vec<(Intersection, Vec<usize>)>,
    },
    Unknown {
        depth: usize,
    },
}

fn region(w: &WeylElement, a: &RootVector, b: &RootVector) -> Intersection {
    let pos = |v: Vec<i64>| v.iter().all(|&x| x >= 0);
    Intersection::of(pos(w.apply(a.coords())), pos(w.apply(b.coords())))
}

/// Searches Weyl elements of length at most `depth` for witnesses.
pub fn prenilpotent_pair(gcm: &Gcm, a: &RootVector, b: &RootVector, depth: usize) -> Result<PrenilpotencyVerdict> {
    for r in [a, b] {
        if r.coords().len() != gcm.rank() {
            return Err(Error::RankMismatch { expected: gcm.rank(), found: r.coords().len() });
        }
    }
    if *a == b.neg() {
        let sep = a.clone();
        return Ok(PrenilpotencyVerdict::NonPrenilpotent {
            empty: Intersection::PlusPlus,
            separating_root: sep,
            pairing: None,
            witnesses: Vec::new(),
        });
    }
    let mut found: Vec<Option<Vec<usize>>> = vec![None; 4];
    for layer in enumerate_ball(gcm, depth, DEFAULT_ELEMENT_LIMIT)? {
        for w in layer {
            let k = region(&w, a, b) as usize;
            if found[k].is_none() {
                found[k] = Some(w.word().to_vec());
            }
        }
    }
    let (pp, mm) = (Intersection::PlusPlus as usize, Intersection::MinusMinus as usize);
    if let (Some(p), Some(m)) = (&found[pp], &found[mm]) {
        return Ok(PrenilpotencyVerdict::Prenilpotent { positive: p.clone(), negative: m.clone() });
    }
    if gcm.is_symmetric() {
        let pairing = a.pairing(gcm, b);
        let missing: Vec<usize> = (0..4).filter(|&k| found[k].is_none()).collect();
        if pairing.abs() >= 2 && missing.len() == 1 {
            let empty = Intersection::ALL[missing[0]];
            let witnesses =
                Intersection::ALL.iter().zip(&found).filter_map(|(&r, w)| w.clone().map(|w| (r, w))).collect();
            return Ok(PrenilpotencyVerdict::NonPrenilpotent {
                empty,
                separating_root: b.clone(),
                pairing: Some(pairing),
                witnesses,
            });
        }
    }
    Ok(PrenilpotencyVerdict::Unknown { depth })
}

/// Re-checks a verdict by direct matrix application.
pub fn verify_certificate(gcm: &Gcm, a: &RootVector, b: &RootVector, verdict: &PrenilpotencyVerdict) -> Result<bool> {
    Ok(match verdict {
        PrenilpotencyVerdict::Prenilpotent { positive, negative } => {
            region(&normal_form(gcm, positive)?, a, b) == Intersection::PlusPlus
                && region(&normal_form(gcm, negative)?, a, b) == Intersection::MinusMinus
        }
        PrenilpotencyVerdict::NonPrenilpotent { empty, separating_root, pairing, witnesses } => {
            if *a == b.neg() {
                return Ok(separating_root == a || separating_root == b);
            }
            if !matches!(empty, Intersection::PlusPlus | Intersection::MinusMinus) {
                return Ok(false);
            }
            let p = a.pairing(gcm, b);
            let mut seen = [false; 4];
            seen[*empty as usize] = true;
            for (r, w) in witnesses {
                if region(&normal_form(gcm, w)?, a, b) != *r || r == empty {
                    return Ok(false);
                }
                seen[*r as usize] = true;
            }
            gcm.is_symmetric()
                && *pairing == Some(p)
                && p.abs() >= 2
                && seen.iter().all(|&s| s)
                && (separating_root == a || separating_root == b)
        }
        PrenilpotencyVerdict::Unknown { .. } => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::simple_reflection;

    #[test]
    fn real_roots() {
        let g = Gcm::right_angled(5, -2).unwrap();
        let id = WeylElement::identity(&g);
        assert_eq!(RootVector::real_root(&g, &id, 2).unwrap(), RootVector::simple(&g, 2).unwrap());
        let s2 = simple_reflection(&g, 2).unwrap();
        assert_eq!(RootVector::real_root(&g, &s2, 2).unwrap(), RootVector::simple(&g, 2).unwrap().neg());
        let s0 = simple_reflection(&g, 0).unwrap();
        let r = RootVector::real_root(&g, &s0, 2).unwrap();
        assert_eq!(r.coords(), &[2, 0, 1, 0, 0]);
        assert!(r.is_positive());
        assert!(RootVector::new(vec![1, -1, 0, 0, 0]).is_err());
    }

    #[test]
    fn opposite_roots() {
        let g = Gcm::right_angled(5, -2).unwrap();
        let a = RootVector::simple(&g, 1).unwrap();
        let v = prenilpotent_pair(&g, &a, &a.neg(), 3).unwrap();
        assert!(matches!(v, PrenilpotencyVerdict::NonPrenilpotent { .. }));
        assert!(verify_certificate(&g, &a, &a.neg(), &v).unwrap());
    }

    #[test]
    fn commuting_simple_roots_are_prenilpotent() {
        let g = Gcm::right_angled(5, -2).unwrap();
        let a0 = RootVector::simple(&g, 0).unwrap();
        let a1 = RootVector::simple(&g, 1).unwrap();
        let v = prenilpotent_pair(&g, &a0, &a1, 2).unwrap();
        match &v {
            PrenilpotencyVerdict::Prenilpotent { positive, negative } => {
                assert!(positive.is_empty());
                assert_eq!(negative, &vec![0, 1]);
            }
            other => panic!("{other:?}"),
        }
        assert!(verify_certificate(&g, &a0, &a1, &v).unwrap());
    }

    #[test]
    fn far_apart_negative_roots() {
        let g = Gcm::right_angled(5, -2).unwrap();
        let a = RootVector::simple(&g, 0).unwrap().neg();
        let b = RootVector::simple(&g, 2).unwrap().neg();
        let v = prenilpotent_pair(&g, &a, &b, 4).unwrap();
        match &v {
            PrenilpotencyVerdict::NonPrenilpotent { empty, .. } => {
                assert_eq!(*empty, Intersection::PlusPlus)
            }
            other => panic!("{other:?}"),
        }
        assert!(verify_certificate(&g, &a, &b, &v).unwrap());
        // tampering breaks the certificate
        if let PrenilpotencyVerdict::NonPrenilpotent { empty, separating_root, pairing, mut witnesses } = v {
            witnesses.pop();
            let bad = PrenilpotencyVerdict::NonPrenilpotent { empty, separating_root, pairing, witnesses };
            assert!(!verify_certificate(&g, &a, &b, &bad).unwrap());
        }
    }

    #[test]
    fn half_spaces() {
        let g = Gcm::right_angled(5, -2).unwrap();
        let a = RootVector::simple(&g, 3).unwrap();
        assert!(in_half_space(&WeylElement::identity(&g), &a));
        assert!(!in_half_space(&simple_reflection(&g, 3).unwrap(), &a));
        assert!(in_half_space(&simple_reflection(&g, 1).unwrap(), &a));
    }
}
