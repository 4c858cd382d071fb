//! The tree-wall `X_J` in horocyclic coordinates and the groups acting on it.
//!
//! Conventions: heights are Busemann values for the ray `[v_0 xi)` with unit
//! edge length, `v_m = (-m, 0)`, the root group `U_{a_k}` is the set of
//! monomial translations `c t^{-k}`, and `V_n` is the group of translations
//! of valuation at least `-n`. Conjugation by the two-step translation `tau`
//! multiplies translation parameters by `t^{-2}`.

mod checks;
mod decompose;
mod tree;

pub use checks::{
    decomposition_check, horoball_check, intersection_check, property_suite, proximality_demo, sylow_ball_check,
    tau_dynamics_check, translation_group_check, End, EndTrace, ProximalityReport, SylowReport,
};
pub use decompose::{decompose_d_xi, decompose_p_xi, DxiDecomposition, PxiDecomposition};
pub use tree::{BallMap, TreeBall, TreeVertex};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::Fq;
use crate::series::Series;

/// Anything that acts on tree vertices.
pub trait TreeAction {
    fn act(&self, v: &TreeVertex, f: &Fq) -> Result<TreeVertex>;

    /// Restriction to a ball.
    fn table(&self, ball: &Arc<TreeBall>) -> Result<BallMap> {
        let f = ball.field().clone();
        BallMap::tabulate(ball.clone(), |v| self.act(v, &f))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TreeWallElement {
    /// `(h, x) -> (h, x + u)`, an element of `V_{xi,A}`.
    Translation(Series),
    /// `tau^m : (h, x) -> (h - 2m, t^{-2m} x)`.
    TauPower(i64),
    /// `(h, x) -> (h, s x)` for a unit series `s`; fixes `L` pointwise.
    Scaling(Series),
    /// A ball-restricted automorphism; acts only on its ball.
    Table(BallMap),
}

impl TreeWallElement {
    pub fn identity() -> Self {
        TreeWallElement::Translation(Series::zero())
    }

    /// A scaling, rejecting non-units.
    pub fn scaling(s: Series) -> Result<Self> {
        match s.valuation() {
            Some(0) => Ok(TreeWallElement::Scaling(s)),
            _ => Err(Error::NotInModel(format!("scaling factor {s} is not a unit"))),
        }
    }

    pub fn inverse(&self, f: &Fq, cap: i64) -> Result<Self> {
        Ok(match self {
            TreeWallElement::Translation(u) => TreeWallElement::Translation(u.neg(f)),
            TreeWallElement::TauPower(m) => TreeWallElement::TauPower(-m),
            TreeWallElement::Scaling(s) => TreeWallElement::Scaling(s.inv(cap, f)?),
            TreeWallElement::Table(map) => {
                let perm = map
                    .as_permutation()
                    .ok_or_else(|| Error::NotInModel("table does not preserve its ball; no inverse".into()))?;
                let ball = map.ball().clone();
                let mut images = vec![ball.vertices()[0].clone(); ball.len()];
                for (i, &j) in perm.iter().enumerate() {
                    images[j as usize] = ball.vertices()[i].clone();
                }
                TreeWallElement::Table(BallMap::new(ball, images)?)
            }
        })
    }
}

impl TreeAction for TreeWallElement {
    fn act(&self, v: &TreeVertex, f: &Fq) -> Result<TreeVertex> {
        let h = v.height();
        match self {
            TreeWallElement::Translation(u) => TreeVertex::new(h, &v.representative().add(u, f)),
            TreeWallElement::TauPower(m) => TreeVertex::new(h - 2 * m, &v.representative().shift(-2 * m)),
            TreeWallElement::Scaling(s) => {
                if s.valuation() != Some(0) {
                    return Err(Error::NotInModel(format!("scaling factor {s} is not a unit")));
                }
                TreeVertex::new(h, &v.representative().mul(s, f))
            }
            TreeWallElement::Table(map) => map.image(v).cloned(),
        }
    }
}

/// Composite `g_1 g_2 ... g_k`, acting right to left.
#[derive(Clone, Debug, PartialEq)]
pub struct Word(pub Vec<TreeWallElement>);

impl TreeAction for Word {
    fn act(&self, v: &TreeVertex, f: &Fq) -> Result<TreeVertex> {
        self.0.iter().rev().try_fold(v.clone(), |w, g| g.act(&w, f))
    }
}

/// The Busemann function of `[v_0 xi)` (unit edge length).
pub fn busemann(v: &TreeVertex) -> i64 {
    v.height()
}

/// `tau^m g tau^{-m}`. Translations are rescaled by `t^{-2m}`; scalings and
/// powers of `tau` commute with `tau`.
pub fn conj_by_tau(g: &TreeWallElement, m: i64) -> Result<TreeWallElement> {
    match g {
        TreeWallElement::Translation(u) => Ok(TreeWallElement::Translation(u.shift(-2 * m))),
        TreeWallElement::Scaling(_) | TreeWallElement::TauPower(_) => Ok(g.clone()),
        TreeWallElement::Table(_) => {
            Err(Error::InvalidParameter("conjugation by tau is defined here for translations and scalings only".into()))
        }
    }
}

/// `U_{a_k}`: the monomial translation `c t^{-k}`.
pub fn root_group_element(c: crate::field::Fe, k: i64) -> TreeWallElement {
    TreeWallElement::Translation(Series::monomial(c, -k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u32) -> Fq {
        Fq::new(q).unwrap()
    }

    #[test]
    fn busemann_examples() {
        let f2 = f(2);
        assert_eq!(busemann(&TreeVertex::line(0)), 0);
        // one step off the line at v_1, via u_2 in U_{a_2}
        let v = root_group_element(1, 2).act(&TreeVertex::line(1), &f2).unwrap();
        assert_eq!(busemann(&v), -1);
        assert!(!v.on_line());
        assert_eq!(v.distance(&TreeVertex::line(1), &f2), 2);
        let w = TreeVertex::new(3, &Series::monomial(1, 1)).unwrap();
        let tw = TreeWallElement::TauPower(1).act(&w, &f2).unwrap();
        assert_eq!(busemann(&tw), busemann(&w) - 2);
    }

    #[test]
    fn moufang_parametrization_busemann() {
        // v = (u_N ... u_{N-m+1}).v_{N-m} has Busemann value m - N
        let f3 = f(3);
        for n in -3i64..=3 {
            for m in 0i64..=4 {
                let word = Word(((n - m + 1)..=n).rev().map(|i| root_group_element(2, i)).collect());
                let v = word.act(&TreeVertex::line(n - m), &f3).unwrap();
                assert_eq!(busemann(&v), m - n);
                // projection to L is v_N when u_N != 1
                if m > 0 {
                    assert_eq!(v.meet_height(&TreeVertex::line(n), &f3), -n);
                }
            }
        }
    }

    #[test]
    fn act_examples() {
        let f2 = f(2);
        let v0 = TreeVertex::base();
        let fix = TreeWallElement::Translation(Series::monomial(1, 3));
        assert_eq!(fix.act(&v0, &f2).unwrap(), v0);
        let mv = TreeWallElement::Translation(Series::monomial(1, -1));
        let w = mv.act(&v0, &f2).unwrap();
        assert_eq!(w.height(), 0);
        assert!(!w.on_line());
        let s = TreeWallElement::scaling(Series::from_coeffs(0, vec![1, 1, 0, 1], None)).unwrap();
        for m in -5..=5 {
            assert_eq!(s.act(&TreeVertex::line(m), &f2).unwrap(), TreeVertex::line(m));
        }
        assert!(TreeWallElement::scaling(Series::monomial(1, 1)).is_err());
    }

    #[test]
    fn translation_precision_underflow() {
        let f2 = f(2);
        let u = TreeWallElement::Translation(Series::monomial(1, -1).truncate(2));
        assert!(u.act(&TreeVertex::new(2, &Series::zero()).unwrap(), &f2).is_ok());
        assert!(matches!(u.act(&TreeVertex::new(3, &Series::zero()).unwrap(), &f2), Err(Error::Precision { .. })));
    }

    #[test]
    fn conj_by_tau_examples() {
        let one = TreeWallElement::Translation(Series::one());
        assert_eq!(conj_by_tau(&one, 1).unwrap(), TreeWallElement::Translation(Series::monomial(1, -2)));
        assert_eq!(conj_by_tau(&one, -3).unwrap(), TreeWallElement::Translation(Series::monomial(1, 6)));
        assert_eq!(conj_by_tau(&one, 0).unwrap(), one);
    }

    #[test]
    fn conj_by_tau_agrees_with_composition() {
        let f3 = f(3);
        let ball = TreeBall::new(&f3, 4);
        let u = TreeWallElement::Translation(Series::from_terms(&[(-1, 1), (2, 2)], None, &f3));
        for m in -2..=2 {
            let word = Word(vec![TreeWallElement::TauPower(m), u.clone(), TreeWallElement::TauPower(-m)]);
            assert_eq!(word.table(&ball).unwrap(), conj_by_tau(&u, m).unwrap().table(&ball).unwrap());
        }
    }

    #[test]
    fn actions_preserve_adjacency() {
        let f3 = f(3);
        let ball = TreeBall::new(&f3, 4);
        let gens = [
            TreeWallElement::Translation(Series::from_terms(&[(-2, 1), (1, 2)], None, &f3)),
            TreeWallElement::TauPower(2),
            TreeWallElement::scaling(Series::from_coeffs(0, vec![2, 1, 1], None)).unwrap(),
        ];
        for g in gens {
            assert!(g.table(&ball).unwrap().preserves_adjacency());
        }
    }
}
