//! Chabauty limits of closed subgroups of `SL_2(F_q((t)))`, seen through
//! finite balls.
//!
//! A closed subgroup `A` is observed at level `N` through its stabilizer of
//! `v_0` restricted to `B_N(v_0)`: a finite permutation group of the ball.
//! The group is generated from those supplied generators that fix `v_0`, so
//! the generating set must contain generators of `A_{v_0}` (for the groups
//! used here this follows from the Iwahori factorization). A sequence
//! converges when its observations at every level eventually equal the
//! target's.

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::field::Fq;
use crate::matrix::LaurentMatrix;
use crate::perm::{Closure, Perm};
use crate::report::CheckReport;
use crate::series::Series;
use crate::treewall::{decompose_d_xi, TreeAction, TreeBall, TreeVertex, TreeWallElement};

pub const DEFAULT_WORD_BUDGET: usize = 10_000;

/// The finite shadow of a closed subgroup at level `N`.
#[derive(Clone, Debug, Serialize)]
pub struct SubgroupObservation {
    pub level: u32,
    pub ball_size: usize,
    /// Sorted permutation tables of the ball.
    #[serde(skip)]
    pub tables: BTreeSet<Perm>,
    pub order: usize,
    pub saturated: bool,
    /// Generators fixing `v_0`, and those discarded because they move it.
    pub generators_used: usize,
    pub generators_skipped: usize,
}

/// Observations are equal when their tables are.
impl PartialEq for SubgroupObservation {
    fn eq(&self, other: &Self) -> bool {
        self.level == other.level && self.tables == other.tables
    }
}

impl Eq for SubgroupObservation {}

impl SubgroupObservation {
    pub fn trivial(ball: &TreeBall) -> Self {
        let id: Perm = (0..ball.len() as u32).collect();
        SubgroupObservation {
            level: ball.radius(),
            ball_size: ball.len(),
            tables: BTreeSet::from([id]),
            order: 1,
            saturated: true,
            generators_used: 0,
            generators_skipped: 0,
        }
    }

    /// The level-`m` observation obtained by restricting every table.
    pub fn restrict(&self, ball: &TreeBall, m: u32) -> Result<SubgroupObservation> {
        if m > self.level || ball.radius() != self.level {
            return Err(Error::InvalidParameter(format!("cannot restrict level {} to level {m}", self.level)));
        }
        let k = ball.prefix_len(m);
        let tables: BTreeSet<Perm> = self.tables.iter().map(|p| p[..k].to_vec()).collect();
        if tables.iter().flatten().any(|&i| i as usize >= k) {
            return Err(Error::Internal("a table does not preserve the smaller ball".into()));
        }
        Ok(SubgroupObservation {
            level: m,
            ball_size: k,
            order: tables.len(),
            tables,
            saturated: self.saturated,
            generators_used: self.generators_used,
            generators_skipped: self.generators_skipped,
        })
    }
}

/// Observes the subgroup generated by `gens` on `ball`.
pub fn observe<G: TreeAction>(gens: &[G], ball: &Arc<TreeBall>, word_budget: usize) -> Result<SubgroupObservation> {
    let mut perms = Vec::new();
    let mut skipped = 0;
    for g in gens {
        match g.table(ball)?.as_permutation() {
            Some(p) => perms.push(p),
            None => skipped += 1,
        }
    }
    let closure = Closure::generate(ball.len(), &perms, word_budget);
    let tables: BTreeSet<Perm> = closure.elements.into_iter().collect();
    Ok(SubgroupObservation {
        level: ball.radius(),
        ball_size: ball.len(),
        order: tables.len(),
        tables,
        saturated: closure.saturated,
        generators_used: perms.len(),
        generators_skipped: skipped,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum Convergence {
    /// Equal to the target from index `n0` to the end, with at least two
    /// confirming terms.
    Converges {
        n0: usize,
        /// Every target table is realized from `n0` on.
        targets_realized: bool,
        /// Every table present from `n0` on lies in the target.
        persistent_in_target: bool,
    },
    NotConvergent {
        reason: String,
    },
    Unknown {
        reason: String,
    },
}

impl Convergence {
    pub fn threshold(&self) -> Option<usize> {
        match self {
            Convergence::Converges { n0, .. } => Some(*n0),
            _ => None,
        }
    }
}

/// Levelwise stabilization of `seq` at the target.
pub fn geometric_converges(seq: &[SubgroupObservation], target: &SubgroupObservation) -> Convergence {
    if let Some(i) = seq.iter().position(|o| o.level != target.level) {
        return Convergence::Unknown { reason: format!("observation {i} is at level {}", seq[i].level) };
    }
    if let Some(i) = seq.iter().position(|o| !o.saturated) {
        return Convergence::Unknown { reason: format!("observation {i} did not saturate") };
    }
    if !target.saturated {
        return Convergence::Unknown { reason: "target did not saturate".into() };
    }
    let hits: Vec<bool> = seq.iter().map(|o| o.tables == target.tables).collect();
    let Some(last) = hits.last() else {
        return Convergence::Unknown { reason: "empty sequence".into() };
    };
    if !last {
        return Convergence::NotConvergent { reason: "the last observation differs from the target".into() };
    }
    let n0 = hits.iter().rposition(|&h| !h).map_or(0, |i| i + 1);
    if hits[..n0].iter().any(|&h| h) {
        return Convergence::NotConvergent { reason: "the sequence leaves the target after reaching it".into() };
    }
    if n0 + 1 >= seq.len() {
        return Convergence::Unknown { reason: "only the final observation matches".into() };
    }
    let tail = &seq[n0..];
    let targets_realized = target.tables.iter().all(|t| tail.iter().all(|o| o.tables.contains(t)));
    let persistent_in_target =
        tail[0].tables.iter().filter(|t| tail.iter().all(|o| o.tables.contains(*t))).all(|t| target.tables.contains(t));
    Convergence::Converges { n0, targets_realized, persistent_in_target }
}

/// `diag(s, s^{-1})` for `s = 1 + c t^k`, `1 <= k < window`.
fn principal_torus(f: &Fq, window: i64) -> Result<Vec<LaurentMatrix>> {
    let mut out = Vec::new();
    for k in 1..window {
        for c in f.units() {
            let s = Series::one().add(&Series::monomial(c, k), f).truncate(window);
            out.push(LaurentMatrix::torus(&s, window, f)?);
        }
    }
    Ok(out)
}

/// Generators of `SL_2(F_q[[t]])`, entries known modulo `t^window`.
pub fn sl2_integral_generators(f: &Fq, window: i64) -> Result<Vec<LaurentMatrix>> {
    let mut g = LaurentMatrix::elementary(f, 0..window, window);
    g.extend(LaurentMatrix::scalar_torus(f, window)?);
    g.extend(principal_torus(f, window)?);
    Ok(g)
}

/// Generators of the matrix model of `D_xi`: upper unipotents `c t^k`,
/// `-window <= k < window`, and the unit torus.
pub fn d_xi_generators(f: &Fq, window: i64) -> Result<Vec<LaurentMatrix>> {
    let mut g: Vec<LaurentMatrix> = (-window..window)
        .flat_map(|k| f.units().map(move |c| (c, k)))
        .map(|(c, k)| LaurentMatrix::upper(Series::monomial(c, k).truncate(window)))
        .collect();
    g.extend(LaurentMatrix::scalar_torus(f, window)?);
    g.extend(principal_torus(f, window)?);
    Ok(g)
}

fn precision_guard(level: u32, n_max: i64, window: i64) -> Result<()> {
    let needed = 2 * n_max + level as i64;
    if n_max < 0 {
        return Err(Error::InvalidParameter(format!("n_max = {n_max} < 0")));
    }
    if window < needed {
        return Err(Error::Precision { needed, available: window });
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitReport {
    pub q: u32,
    pub level: u32,
    pub n_max: i64,
    pub window: i64,
    /// Orders of `obs_N(tau^n SL_2(O) tau^{-n})` for `n = 0..=n_max`.
    pub orders: Vec<usize>,
    pub target_order: usize,
    pub verdict: Convergence,
    /// Same experiment for `tau^{-n} u tau^n`, `u = [[1, 1], [0, 1]]`, against the trivial group.
    pub unipotent_orders: Vec<usize>,
    pub unipotent_verdict: Convergence,
    /// First `n` with `c t^{-m}` upper unipotent inside `tau^n SL_2(O) tau^{-n}`, per `m`.
    pub v_m_entry: Vec<(i64, Option<i64>)>,
    /// The unit torus (which fixes `L`) lies in every conjugate.
    pub torus_inside: bool,
    pub checks: Vec<CheckReport>,
    pub passed: bool,
}

/// `lim tau^n SL_2(F_q[[t]]) tau^{-n}` at level `N` against `obs_N(D_xi)`.
pub fn conjugate_stabilizer_limit(q: u32, level: u32, n_max: i64, window: i64) -> Result<LimitReport> {
    precision_guard(level, n_max, window)?;
    let f = Fq::new(q)?;
    let ball = TreeBall::new(&f, level);
    let base = sl2_integral_generators(&f, window)?;
    let params = json!({"q": q, "level": level, "n_max": n_max, "window": window});

    let mut seq = Vec::new();
    let mut unipotent_seq = Vec::new();
    let u = LaurentMatrix::upper(Series::one());
    let mut exact = CheckReport::new("conjugation_exactness", params.clone());
    for n in 0..=n_max {
        let gens: Vec<LaurentMatrix> = base.iter().map(|g| g.conj_by_tau(n)).collect();
        seq.push(observe(&gens, &ball, DEFAULT_WORD_BUDGET)?);
        let un = u.conj_by_tau(-n);
        unipotent_seq.push(observe(std::slice::from_ref(&un), &ball, DEFAULT_WORD_BUDGET)?);
        // matrix conjugation agrees with the product and with the tree-wall model
        let prod = LaurentMatrix::tau(-n).mul(&u, &f).mul(&LaurentMatrix::tau(n), &f);
        exact.record(prod == un, || format!("tau^-{n} u tau^{n} by product"));
        let tw = crate::treewall::conj_by_tau(&TreeWallElement::Translation(Series::one()), -n)?;
        exact.record(un.table(&ball)? == tw.table(&ball)?, || format!("tree-wall model at n = {n}"));
    }
    let target = observe(&d_xi_generators(&f, window)?, &ball, DEFAULT_WORD_BUDGET)?;
    let verdict = geometric_converges(&seq, &target);
    let trivial = SubgroupObservation::trivial(&ball);
    let unipotent_verdict = geometric_converges(&unipotent_seq, &trivial);

    let mut first = CheckReport::new("n0_is_sl2_observation", params.clone());
    let sl2 = observe(&base, &ball, DEFAULT_WORD_BUDGET)?;
    first.record(seq[0] == sl2, || "the n = 0 term differs from obs(SL_2(O))".into());

    let mut monotone = CheckReport::new("monotone_restriction", params.clone());
    for m in 0..level {
        let small = TreeBall::new(&f, m);
        for (n, obs) in seq.iter().enumerate() {
            let gens: Vec<LaurentMatrix> = base.iter().map(|g| g.conj_by_tau(n as i64)).collect();
            let direct = observe(&gens, &small, DEFAULT_WORD_BUDGET)?;
            let restricted = obs.restrict(&ball, m)?;
            monotone
                .record(direct.tables == restricted.tables, || format!("level {m} of term {n} is not the restriction"));
        }
        let direct = observe(&d_xi_generators(&f, window)?, &small, DEFAULT_WORD_BUDGET)?;
        monotone.record(direct.tables == target.restrict(&ball, m)?.tables, || {
            format!("level {m} of the target is not the restriction")
        });
    }

    // both inclusions at the level of matrices
    let mut v_m_entry = Vec::new();
    for m in 0..=2 * n_max {
        let x = LaurentMatrix::upper(Series::monomial(1, -m));
        let n = (0..=n_max).find(|&n| x.conj_by_tau(-n).is_integral());
        v_m_entry.push((m, n));
    }
    let torus_inside = (0..=n_max).all(|n| {
        LaurentMatrix::scalar_torus(&f, window)
            .map(|ts| ts.iter().all(|t| t.conj_by_tau(-n).is_integral()))
            .unwrap_or(false)
    });
    let mut inclusions = CheckReport::new("d_xi_inclusions", params);
    inclusions.record(torus_inside, || "a torus element leaves a conjugate".into());
    for &(m, n) in &v_m_entry {
        let expected = (m + 1) / 2;
        inclusions.record(n == Some(expected), || format!("V_{m} enters at {n:?}, expected {expected}"));
    }

    // a single term decides nothing; it is reported as is
    let mut conv = CheckReport::new("limit_identity", json!({"q": q, "level": level}));
    if n_max > 0 {
        conv.record(
            matches!(verdict, Convergence::Converges { targets_realized: true, persistent_in_target: true, .. }),
            || format!("{verdict:?}"),
        );
        conv.record(matches!(unipotent_verdict, Convergence::Converges { .. }), || {
            format!("unipotent conjugates: {unipotent_verdict:?}")
        });
    }
    let checks = vec![conv, first, exact, monotone, inclusions];
    let passed = checks.iter().all(|c| c.passed);
    Ok(LimitReport {
        q,
        level,
        n_max,
        window,
        orders: seq.iter().map(|o| o.order).collect(),
        target_order: target.order,
        verdict,
        unipotent_orders: unipotent_seq.iter().map(|o| o.order).collect(),
        unipotent_verdict,
        v_m_entry,
        torus_inside,
        checks,
        passed,
    })
}

/// `{tau^{-n} g tau^n}_{n >= 1}` for `g` upper triangular with unit
/// diagonal: every conjugate is horospheric on the ball, its translation
/// part has valuation at least `min(0, nu(b))`, and `v_0` moves at most
/// `2 max(0, -nu(b))`.
pub fn boundedness_check(g: &LaurentMatrix, q: u32, n_max: i64, level: u32) -> Result<CheckReport> {
    let f = Fq::new(q)?;
    let unit = |s: &Series| s.valuation() == Some(0);
    if !(g.c.is_zero() && unit(&g.a) && unit(&g.d)) {
        return Err(Error::NotInModel("not upper triangular with unit diagonal".into()));
    }
    let nu = g.b.valuation().map_or(0, |v| v.min(0));
    let ball = TreeBall::new(&f, level);
    let mut rep =
        CheckReport::new("boundedness", json!({"q": q, "n_max": n_max, "level": level, "b": g.b.to_string()}));
    let mut tables = HashSet::new();
    for n in 1..=n_max {
        let table = g.conj_by_tau(-n).table(&ball)?;
        let moved = table.image(&TreeVertex::base())?.distance(&TreeVertex::base(), &f);
        rep.record(moved as i64 <= -2 * nu, || format!("v_0 moves {moved} at n = {n}"));
        match rep.record_result(decompose_d_xi(&table)) {
            Some(d) => {
                let v = d.translation.valuation().unwrap_or(i64::MAX);
                rep.record(v >= nu, || format!("translation {} at n = {n}", d.translation));
            }
            None => continue,
        }
        tables.insert(table.images().to_vec());
    }
    rep.details = json!({"distinct_tables": tables.len()});
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs(ball: &Arc<TreeBall>, gens: &[LaurentMatrix]) -> SubgroupObservation {
        observe(gens, ball, DEFAULT_WORD_BUDGET).unwrap()
    }

    #[test]
    fn identity_generates_one_table() {
        let f = Fq::new(2).unwrap();
        let ball = TreeBall::new(&f, 3);
        let o = obs(&ball, &[LaurentMatrix::identity()]);
        assert_eq!(o.order, 1);
        assert!(o.saturated);
        assert_eq!(o, SubgroupObservation::trivial(&ball));
    }

    #[test]
    fn v0_is_an_abelian_two_group() {
        let f = Fq::new(2).unwrap();
        let ball = TreeBall::new(&f, 3);
        let gens: Vec<LaurentMatrix> = (0..6).map(|k| LaurentMatrix::upper(Series::monomial(1, k))).collect();
        let o = obs(&ball, &gens);
        assert!(o.saturated);
        // translations by b mod t^3
        assert_eq!(o.order, 8);
        let ts: Vec<&Perm> = o.tables.iter().collect();
        for a in &ts {
            for b in &ts {
                assert_eq!(crate::perm::compose(a, b), crate::perm::compose(b, a));
            }
        }
    }

    #[test]
    fn sl2_observation_matches_quotient_order() {
        // SL_2(O) acts on B_2 through PGL-type quotient of SL_2(F_2[t]/t^2)
        let f = Fq::new(2).unwrap();
        let ball = TreeBall::new(&f, 1);
        let o = obs(&ball, &sl2_integral_generators(&f, 6).unwrap());
        assert!(o.saturated);
        // SL_2(F_2) = S_3 on the three neighbours
        assert_eq!(o.order, 6);
    }

    #[test]
    fn convergence_verdicts() {
        let f = Fq::new(2).unwrap();
        let ball = TreeBall::new(&f, 2);
        let a = SubgroupObservation::trivial(&ball);
        let b = obs(&ball, &[LaurentMatrix::upper(Series::one())]);
        assert_ne!(a, b);
        assert_eq!(geometric_converges(&[a.clone(), a.clone(), a.clone()], &a).threshold(), Some(0));
        let alt = [a.clone(), b.clone(), a.clone(), b.clone()];
        assert!(matches!(geometric_converges(&alt, &a), Convergence::NotConvergent { .. }));
        assert!(matches!(geometric_converges(&alt, &b), Convergence::NotConvergent { .. }));
        assert_eq!(geometric_converges(&[b.clone(), a.clone(), a.clone()], &a).threshold(), Some(1));
    }

    #[test]
    fn limit_q2() {
        let mut last = 0;
        for level in 2..=3 {
            let rep = conjugate_stabilizer_limit(2, level, 6, 24).unwrap();
            assert!(rep.passed, "{:?}", rep.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>());
            let n0 = rep.verdict.threshold().unwrap();
            assert!(n0 as u32 <= level + 1);
            assert!(n0 >= last);
            last = n0;
            assert!(rep.unipotent_verdict.threshold().unwrap() as u32 <= level + 2);
        }
    }

    #[test]
    fn precision_guard_fires_first() {
        assert!(matches!(conjugate_stabilizer_limit(2, 3, 8, 10), Err(Error::Precision { needed: 19, available: 10 })));
    }

    #[test]
    fn n_max_zero() {
        let rep = conjugate_stabilizer_limit(2, 2, 0, 4).unwrap();
        assert_eq!(rep.orders.len(), 1);
        assert!(matches!(rep.verdict, Convergence::NotConvergent { .. } | Convergence::Unknown { .. }));
        assert!(rep.passed);
    }

    #[test]
    fn boundedness() {
        let f = Fq::new(2).unwrap();
        let g = LaurentMatrix::upper(Series::monomial(1, -1));
        let rep = boundedness_check(&g, 2, 6, 4).unwrap();
        assert!(rep.passed, "{:?}", rep.failures);
        assert!(boundedness_check(&LaurentMatrix::identity(), 2, 4, 3).unwrap().passed);
        assert!(boundedness_check(&LaurentMatrix::tau(1), 2, 4, 3).is_err());
        let s = Series::from_coeffs(0, vec![1, 1], Some(12));
        let t = LaurentMatrix::torus(&s, 12, &f).unwrap().mul(&g, &f);
        assert!(boundedness_check(&t, 2, 5, 3).unwrap().passed);
    }
}
