//! Splitting horospheric and parabolic elements into a line-fixing part, a
//! power of `tau` and a translation in `V_{xi,A}`.
//!
//! The translation is extracted top-down along `L`: once the remaining map
//! fixes `v_m`, the image of `v_{m-1}` is an upward neighbour `(1-m, c t^{-m})`
//! of `v_m`, and the root group element `c t^{-m}` of `U_{a_m}` undoes it.

use crate::error::{Error, Result};
use crate::series::Series;

use super::tree::{BallMap, TreeVertex};
use super::{TreeAction, TreeWallElement};

/// `d = Translation(translation) . remainder` on the ball.
#[derive(Clone, Debug)]
pub struct DxiDecomposition {
    pub translation: Series,
    pub remainder: BallMap,
    /// Least `N` such that the input fixes `v_m` for every `m >= N` in the ball.
    pub fixed_ray_start: i64,
}

/// `g = tau^tau_power . Translation(translation) . remainder` on the ball.
#[derive(Clone, Debug)]
pub struct PxiDecomposition {
    pub remainder: BallMap,
    pub tau_power: i64,
    pub translation: Series,
}

impl DxiDecomposition {
    pub fn recompose(&self) -> Result<BallMap> {
        let f = self.remainder.ball().field().clone();
        let u = TreeWallElement::Translation(self.translation.clone());
        self.remainder.then(|v| u.act(v, &f))
    }
}

impl PxiDecomposition {
    pub fn recompose(&self) -> Result<BallMap> {
        let f = self.remainder.ball().field().clone();
        let u = TreeWallElement::Translation(self.translation.clone());
        let tau = TreeWallElement::TauPower(self.tau_power);
        self.remainder.then(|v| tau.act(&u.act(v, &f)?, &f))
    }
}

/// Decomposes a ball-restricted element of `D_xi`.
pub fn decompose_d_xi(d: &BallMap) -> Result<DxiDecomposition> {
    let ball = d.ball().clone();
    let f = ball.field().clone();
    for (v, w) in ball.vertices().iter().zip(d.images()) {
        if v.height() != w.height() {
            return Err(Error::NotInModel(format!("{v:?} -> {w:?} changes the Busemann value; not horospheric")));
        }
    }
    let r = ball.radius() as i64;
    let mut n = r + 1;
    while n > -r && d.image(&TreeVertex::line(n - 1))? == &TreeVertex::line(n - 1) {
        n -= 1;
    }
    if n > r {
        return Err(Error::NotInModel("no ray toward xi is fixed inside the ball".into()));
    }

    let mut acc = Series::zero();
    for m in ((-r + 1)..=n).rev() {
        let undo = TreeWallElement::Translation(acc.neg(&f));
        let img = undo.act(d.image(&TreeVertex::line(m - 1))?, &f)?;
        let c = img.coset().coeff(-m)?;
        let expected = TreeVertex::line(m).up(c, &f);
        if img != expected {
            return Err(Error::Internal(format!("image {img:?} of v_{} is not adjacent to v_{m}", m - 1)));
        }
        acc = acc.add(&Series::monomial(c, -m), &f);
    }

    let undo = TreeWallElement::Translation(acc.neg(&f));
    let remainder = d.then(|v| undo.act(v, &f))?;
    for (m, i) in ball.line_vertices() {
        if remainder.images()[i] != TreeVertex::line(m) {
            return Err(Error::Internal(format!("remainder moves v_{m}")));
        }
    }
    Ok(DxiDecomposition { translation: acc, remainder, fixed_ray_start: n })
}

/// Decomposes a ball-restricted element of `P_xi`: the `tau`-power is read
/// off the (constant, even) Busemann displacement.
pub fn decompose_p_xi(g: &BallMap) -> Result<PxiDecomposition> {
    let ball = g.ball().clone();
    let f = ball.field().clone();
    let mut shifts = ball.vertices().iter().zip(g.images()).map(|(v, w)| w.height() - v.height());
    let delta = shifts.next().unwrap_or(0);
    if shifts.any(|s| s != delta) {
        return Err(Error::NotInModel("Busemann displacement is not constant; the germ of xi is not preserved".into()));
    }
    if delta % 2 != 0 {
        return Err(Error::NotInModel(format!("odd Busemann displacement {delta} does not preserve types")));
    }
    let m = -delta / 2;
    let back = TreeWallElement::TauPower(-m);
    let d = g.then(|v| back.act(v, &f))?;
    let dec = decompose_d_xi(&d)?;
    Ok(PxiDecomposition { remainder: dec.remainder, tau_power: m, translation: dec.translation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fq;
    use crate::treewall::tree::TreeBall;
    use crate::treewall::Word;

    #[test]
    fn identity_decomposes_trivially() {
        let f = Fq::new(2).unwrap();
        let ball = TreeBall::new(&f, 5);
        let dec = decompose_d_xi(&BallMap::identity(ball.clone())).unwrap();
        assert!(dec.translation.is_zero());
        assert!(dec.remainder.is_identity());
        assert_eq!(dec.fixed_ray_start, -5);
    }

    #[test]
    fn pure_translation() {
        let f = Fq::new(2).unwrap();
        let ball = TreeBall::new(&f, 6);
        let u = Series::monomial(1, -2);
        let d = TreeWallElement::Translation(u.clone()).table(&ball).unwrap();
        let dec = decompose_d_xi(&d).unwrap();
        assert_eq!(dec.translation, u);
        assert!(dec.remainder.is_identity());
        assert_eq!(dec.fixed_ray_start, 2);
    }

    #[test]
    fn scaling_after_translation() {
        let f = Fq::new(3).unwrap();
        let ball = TreeBall::new(&f, 6);
        let s = Series::from_coeffs(0, vec![2, 1, 0, 1], None);
        let u = Series::from_terms(&[(-3, 1), (0, 2), (4, 1)], None, &f);
        let sc = TreeWallElement::scaling(s.clone()).unwrap();
        let d = Word(vec![sc.clone(), TreeWallElement::Translation(u.clone())]).table(&ball).unwrap();
        let dec = decompose_d_xi(&d).unwrap();
        // S . T_u = T_{s u} . S
        assert_eq!(dec.translation, s.mul(&u, &f).truncate(6).stored_terms());
        assert_eq!(dec.remainder, sc.table(&ball).unwrap());
        assert_eq!(dec.recompose().unwrap(), d);
    }

    #[test]
    fn parabolic_examples() {
        let f = Fq::new(2).unwrap();
        let ball = TreeBall::new(&f, 8);
        let tau2 = TreeWallElement::TauPower(1).table(&ball).unwrap();
        let dec = decompose_p_xi(&tau2).unwrap();
        assert_eq!(dec.tau_power, 1);
        assert!(dec.translation.is_zero());
        assert!(dec.remainder.is_identity());

        let g = Word(vec![TreeWallElement::TauPower(-1), TreeWallElement::Translation(Series::monomial(1, 4))])
            .table(&ball)
            .unwrap();
        let dec = decompose_p_xi(&g).unwrap();
        assert_eq!(dec.tau_power, -1);
        assert_eq!(dec.translation, Series::monomial(1, 4));
        assert_eq!(dec.recompose().unwrap(), g);

        let s = TreeWallElement::scaling(Series::from_coeffs(0, vec![1, 1], None)).unwrap();
        let dec = decompose_p_xi(&s.table(&ball).unwrap()).unwrap();
        assert_eq!(dec.tau_power, 0);
        assert!(dec.translation.is_zero());
        assert_eq!(dec.remainder, s.table(&ball).unwrap());
    }

    #[test]
    fn rejects_non_horospheric_and_odd_shift() {
        let f = Fq::new(2).unwrap();
        let ball = TreeBall::new(&f, 4);
        let tau = TreeWallElement::TauPower(1).table(&ball).unwrap();
        assert!(matches!(decompose_d_xi(&tau), Err(Error::NotInModel(_))));
        // a one-step shift along L: (h, x) -> (h - 1, t^{-1} x) flips types
        let odd = BallMap::tabulate(ball.clone(), |v| TreeVertex::new(v.height() - 1, &v.representative().shift(-1)))
            .unwrap();
        assert!(matches!(decompose_p_xi(&odd), Err(Error::NotInModel(_))));
    }
}
