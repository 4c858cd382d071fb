//! Finite, exhaustive checks of the structure of `V_{xi,A}`, `P_xi` and the
//! Iwahori-type edge stabilizer on balls of the tree.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::field::{Fe, Fq};
use crate::matrix::LaurentMatrix;
use crate::perm::{self, Closure, Perm};
use crate::report::CheckReport;
use crate::series::Series;

use super::decompose::{decompose_d_xi, decompose_p_xi};
use super::tree::{BallMap, TreeBall, TreeVertex};
use super::{conj_by_tau, TreeAction, TreeWallElement, Word};

fn translation(u: &Series) -> TreeWallElement {
    TreeWallElement::Translation(u.clone())
}

/// Monomials `c t^e` for every unit `c` and `e` in `lo..=hi`.
fn monomials(f: &Fq, lo: i64, hi: i64) -> Vec<Series> {
    (lo..=hi).flat_map(|e| f.units().map(move |c| Series::monomial(c, e))).collect()
}

/// Monomials plus a few deterministic binomials, and zero.
fn translation_samples(f: &Fq, window: i64) -> Vec<Series> {
    let mut out = vec![Series::zero()];
    out.extend(monomials(f, -window, window));
    let top = f.units().last().unwrap_or(1);
    for e in -window..window {
        out.push(Series::from_terms(&[(e, 1), (e + 1, top)], None, f));
    }
    out
}

/// Lemma on horoballs: `V_n` fixes the horoball `{h <= -n}`, and `U_{a_n}`
/// permutes the `q` upward edges at each vertex of the horosphere `{h = -n}`
/// simply transitively.
///
/// Generators of `V_n` are taken as monomials `c t^e` with `-n <= e <= window`.
pub fn horoball_check(f: &Fq, n: i64, depth: u32, window: i64) -> CheckReport {
    let mut rep = CheckReport::new("horoball", json!({"q": f.order(), "n": n, "depth": depth, "window": window}));
    let ball = TreeBall::new(f, depth);
    let horoball: Vec<&TreeVertex> = ball.vertices().iter().filter(|v| v.height() <= -n).collect();
    for u in monomials(f, -n, window.max(-n)) {
        let g = translation(&u);
        for v in &horoball {
            let ok = g.act(v, f).map(|w| &w == *v).unwrap_or(false);
            rep.record(ok, || format!("{u} moves {v:?} in the horoball"));
        }
    }

    let mut sphere = 0;
    for v in ball.vertices().iter().filter(|v| v.height() == -n) {
        sphere += 1;
        let children: BTreeSet<Vec<(i64, Fe)>> = f.elements().map(|c| v.up(c, f).coset().terms().collect()).collect();
        let w = v.up(0, f);
        let mut orbit = BTreeSet::new();
        let mut stabilizer = 0;
        for c in f.elements() {
            let g = translation(&Series::monomial(c, -n));
            let (Ok(gv), Ok(gw)) = (g.act(v, f), g.act(&w, f)) else {
                rep.record(false, || format!("precision failure at {v:?}"));
                continue;
            };
            rep.record(&gv == v, || format!("c t^{} moves {v:?}", -n));
            if gw == w {
                stabilizer += 1;
            }
            orbit.insert(gw.coset().terms().collect::<Vec<_>>());
        }
        rep.record(orbit == children && stabilizer == 1, || {
            format!("orbit of size {} / stabilizer {stabilizer} at {v:?}", orbit.len())
        });
    }
    rep.details = json!({"horoball_vertices": horoball.len(), "horosphere_vertices": sphere});
    rep
}

/// Lemma on intersections: `u` lies in `V_{-n}` for all `n <= n_max` exactly
/// when `nu(u) >= n_max`; and a translation fixing `[v_n xi)` inside the ball
/// lies in `V_n`.
///
/// Membership in `V_k` is decided geometrically, as fixing every ball vertex
/// of the horoball `{h <= -k}`; the ball must reach height `n_max`.
pub fn intersection_check(f: &Fq, n_max: i64, depth: u32, window: i64) -> Result<CheckReport> {
    let r = depth as i64;
    if n_max.abs() > r {
        return Err(Error::InvalidParameter(format!("n_max = {n_max} lies outside the ball of radius {depth}")));
    }
    let mut rep =
        CheckReport::new("intersection", json!({"q": f.order(), "n_max": n_max, "depth": depth, "window": window}));
    let ball = TreeBall::new(f, depth);
    let samples = translation_samples(f, window);
    let tables: Vec<BallMap> = samples.iter().map(|u| translation(u).table(&ball)).collect::<Result<_>>()?;
    let in_v = |t: &BallMap, k: i64| ball.vertices().iter().zip(t.images()).all(|(v, w)| v.height() > -k || v == w);
    let nu = |u: &Series| u.valuation().unwrap_or(i64::MAX);

    let mut survivors = 0;
    for (u, t) in samples.iter().zip(&tables) {
        let inside = (-r..=n_max).all(|n| in_v(t, -n));
        if inside {
            survivors += 1;
        }
        rep.record(inside == (nu(u) >= n_max), || {
            format!("{u}: in all V_-n is {inside}, valuation {:?}", u.valuation())
        });
    }

    for n in (-r + 1)..=r {
        for (u, t) in samples.iter().zip(&tables) {
            let fixes_ray = ball
                .line_vertices()
                .into_iter()
                .filter(|&(m, _)| m >= n)
                .all(|(_, i)| t.images()[i] == ball.vertices()[i]);
            rep.record(fixes_ray == (nu(u) >= -n), || {
                format!("{u}: fixes [v_{n} xi) is {fixes_ray}, valuation {:?}", u.valuation())
            });
        }
    }
    rep.details = json!({"samples": samples.len(), "survivors": survivors});
    Ok(rep)
}

/// Fixator law, exponent `p`, commutativity and `tau`-normalization of the
/// translation group, by exhaustion over monomials in `[-window, window]`.
pub fn translation_group_check(f: &Fq, window: i64, depth: u32) -> Result<Vec<CheckReport>> {
    let params = json!({"q": f.order(), "window": window, "depth": depth});
    let ball = TreeBall::new(f, depth);
    let monos = monomials(f, -window, window);

    let mut fixator = CheckReport::new("fixator_law", params.clone());
    for u in &monos {
        let t = translation(u).table(&ball)?;
        let nu = u.valuation().unwrap_or(i64::MAX);
        for (v, w) in ball.vertices().iter().zip(t.images()) {
            fixator
                .record((v == w) == (nu >= v.height()), || format!("{u} at {v:?}: fixed {}, valuation {nu}", v == w));
        }
    }

    let mut abelian = CheckReport::new("exponent_p_abelian", params.clone());
    let samples = translation_samples(f, window);
    let p = f.characteristic() as usize;
    let gens: Vec<TreeWallElement> = samples.iter().map(translation).collect();
    let tables: Vec<BallMap> = gens.iter().map(|g| g.table(&ball)).collect::<Result<_>>()?;
    for (i, u) in samples.iter().enumerate() {
        let mut x = BallMap::identity(ball.clone());
        for _ in 0..p {
            x = x.then(|v| gens[i].act(v, f))?;
        }
        abelian.record(x.is_identity(), || format!("{u} has order > p on the ball"));
        abelian.record(u.times(p as u64, f).is_zero(), || format!("p * {u} != 0"));
        for (j, w) in samples.iter().enumerate().skip(i + 1) {
            let ab = tables[j].then(|v| gens[i].act(v, f))?;
            let ba = tables[i].then(|v| gens[j].act(v, f))?;
            abelian.record(ab == ba, || format!("{u} and {w} do not commute"));
        }
    }

    let mut normalized = CheckReport::new("tau_normalizes_v", params);
    for u in &monos {
        let nu = u.valuation().unwrap_or(0);
        for m in -3..=3 {
            let Ok(TreeWallElement::Translation(v)) = conj_by_tau(&translation(u), m) else {
                normalized.record(false, || "conjugate is not a translation".into());
                continue;
            };
            // V_n -> V_{n+2m}: valuation -n becomes -n - 2m
            normalized.record(v.valuation() == Some(nu - 2 * m), || format!("tau^{m} {u} tau^-{m} = {v}"));
        }
    }
    Ok(vec![fixator, abelian, normalized])
}

/// `tau^{-n} u tau^n` is trivial on the ball of radius `R` exactly when
/// `nu(u) + 2n >= R`, and `tau^{-n} S T_u tau^n` stays in `S . V_{-nu(u)}`.
pub fn tau_dynamics_check(f: &Fq, depth: u32, window: i64, n_max: i64) -> Result<Vec<CheckReport>> {
    let params = json!({"q": f.order(), "depth": depth, "window": window, "n_max": n_max});
    let ball = TreeBall::new(f, depth);
    let r = depth as i64;

    let mut limit = CheckReport::new("limit_triviality", params.clone());
    let mut thresholds = Vec::new();
    for u in monomials(f, -window, window).into_iter().step_by(f.order() as usize - 1) {
        let nu = u.valuation().unwrap_or(0);
        let mut first = None;
        for n in 0..=n_max {
            let word = Word(vec![TreeWallElement::TauPower(-n), translation(&u), TreeWallElement::TauPower(n)]);
            let trivial = word.table(&ball)?.is_identity();
            if trivial && first.is_none() {
                first = Some(n);
            }
            limit.record(trivial == (nu + 2 * n >= r), || {
                format!("tau^-{n} ({u}) tau^{n} trivial on the ball is {trivial}")
            });
        }
        thresholds.push(json!({"u": u.to_string(), "threshold": first}));
    }
    limit.details = json!({"thresholds": thresholds});

    let mut bounded = CheckReport::new("boundedness", params.clone());
    let s = Series::from_coeffs(0, vec![f.units().last().unwrap_or(1), 1, 0, 1], None);
    let sc = TreeWallElement::scaling(s.clone())?;
    let sc_table = sc.table(&ball)?;
    // below degree 1 - r the translation moves all of L inside the ball, and
    // the ball cannot show which ray it fixes
    for u in monomials(f, (-window).max(1 - r), window).into_iter().step_by(f.order() as usize - 1) {
        let nu = u.valuation().unwrap_or(0);
        for n in 0..=n_max {
            let word =
                Word(vec![TreeWallElement::TauPower(-n), sc.clone(), translation(&u), TreeWallElement::TauPower(n)]);
            let Some(dec) = bounded.record_result(decompose_d_xi(&word.table(&ball)?)) else {
                continue;
            };
            let in_class = dec.remainder == sc_table && dec.translation.valuation().is_none_or(|v| v >= nu);
            bounded.record(in_class, || format!("tau^-{n} S T_({u}) tau^{n} leaves S . V_{}", -nu));
        }
    }

    // elements preserving both Busemann functions fix L
    let mut both = CheckReport::new("d_xi_cap_d_minus_xi", params);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut preserving = 0;
    let busemann_minus = |v: &TreeVertex| {
        let j = v.representative().valuation().map_or(v.height(), |x| x.min(v.height()));
        v.height() - 2 * j
    };
    for _ in 0..200 {
        let g = random_matrix(f, &mut rng, 3, 2 * r + 4)?;
        let Some(t) = both.record_result(g.table(&ball)) else { continue };
        let keeps = ball
            .vertices()
            .iter()
            .zip(t.images())
            .all(|(v, w)| v.height() == w.height() && busemann_minus(v) == busemann_minus(w));
        if keeps {
            preserving += 1;
            let fixes_line = ball.line_vertices().into_iter().all(|(_, i)| t.images()[i] == ball.vertices()[i]);
            both.record(fixes_line, || "bi-horospheric element moves L".into());
        }
    }
    both.details = json!({"sampled": 200, "preserving_both": preserving});
    Ok(vec![limit, bounded, both])
}

/// A product of `len` random elementary, torus and `tau` factors.
fn random_matrix(f: &Fq, rng: &mut ChaCha8Rng, len: usize, cap: i64) -> Result<LaurentMatrix> {
    let mut g = LaurentMatrix::identity();
    let units: Vec<Fe> = f.units().collect();
    for _ in 0..len {
        let c = units[rng.gen_range(0..units.len())];
        let k = rng.gen_range(-2..=2);
        let h = match rng.gen_range(0..4) {
            0 => LaurentMatrix::upper(Series::monomial(c, k)),
            1 => LaurentMatrix::lower(Series::monomial(c, k)),
            2 => LaurentMatrix::torus(&Series::from_coeffs(0, vec![c, 1], None), cap, f)?,
            _ => LaurentMatrix::tau(if rng.gen_bool(0.5) { 1 } else { -1 }),
        };
        g = g.mul(&h, f);
    }
    Ok(g)
}

/// The horoball, intersection, translation-group and `tau`-dynamics checks
/// on the ball of radius `depth`, with monomials of degree in
/// `[-window, window]`.
pub fn property_suite(f: &Fq, depth: u32, window: i64) -> Result<Vec<CheckReport>> {
    let r = depth as i64;
    let mut out: Vec<CheckReport> = (-r..=r).map(|n| horoball_check(f, n, depth, window)).collect();
    for n_max in (-r / 2)..=(r / 2) {
        out.push(intersection_check(f, n_max, depth, window)?);
    }
    out.extend(translation_group_check(f, window, depth)?);
    out.extend(tau_dynamics_check(f, depth, window, r)?);
    Ok(out)
}

/// Seeded round trips of both decompositions on random
/// `tau^m . Scaling(s) . Translation(u)`.
pub fn decomposition_check(f: &Fq, depth: u32, samples: usize, seed: u64) -> Result<Vec<CheckReport>> {
    let params = json!({"q": f.order(), "depth": depth, "samples": samples, "seed": seed});
    let ball = TreeBall::new(f, depth);
    let r = depth as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let units: Vec<Fe> = f.units().collect();
    let elems: Vec<Fe> = f.elements().collect();
    let line = ball.line_vertices();
    let fixes_line = |t: &BallMap| line.iter().all(|&(_, i)| t.images()[i] == ball.vertices()[i]);

    let mut d_rep = CheckReport::new("decompose_d_xi", params.clone());
    let mut p_rep = CheckReport::new("decompose_p_xi", params);
    for _ in 0..samples {
        let mut s = vec![units[rng.gen_range(0..units.len())]];
        s.extend((1..r).map(|_| elems[rng.gen_range(0..elems.len())]));
        let s = Series::from_coeffs(0, s, None);
        let mut terms: Vec<(i64, Fe)> = Vec::new();
        for e in -r..r {
            if rng.gen_bool(0.3) {
                terms.push((e, units[rng.gen_range(0..units.len())]));
            }
        }
        let u = Series::from_terms(&terms, None, f);
        let m = rng.gen_range(-2..=2);
        let sc = TreeWallElement::scaling(s.clone())?;
        let sc_table = sc.table(&ball)?;
        let expected_u = s.mul(&u, f).truncate(r).stored_terms();

        let d = Word(vec![sc.clone(), translation(&u)]).table(&ball)?;
        if let Some(dec) = d_rep.record_result(decompose_d_xi(&d)) {
            d_rep.record(dec.translation == expected_u, || {
                format!("D: recovered {} instead of {expected_u}", dec.translation)
            });
            d_rep.record(dec.remainder == sc_table, || "D: remainder is not the scaling".into());
            d_rep.record(dec.recompose().ok().as_ref() == Some(&d), || "D: recomposition".into());
        }

        let g = Word(vec![TreeWallElement::TauPower(m), sc, translation(&u)]).table(&ball)?;
        if let Some(dec) = p_rep.record_result(decompose_p_xi(&g)) {
            p_rep.record(dec.tau_power == m, || format!("P: tau power {} != {m}", dec.tau_power));
            p_rep.record(dec.translation == expected_u, || "P: translation".into());
            p_rep.record(dec.remainder == sc_table, || "P: remainder".into());
            p_rep.record(dec.recompose().ok().as_ref() == Some(&g), || "P: recomposition".into());
            // the factors sit in K_L, <tau> and V with trivial overlaps
            p_rep.record(fixes_line(&dec.remainder), || "P: remainder moves L".into());
            let t = translation(&dec.translation).table(&ball)?;
            p_rep.record(dec.translation.is_zero() || !fixes_line(&t), || "P: nonzero translation fixes L".into());
            let tau = TreeWallElement::TauPower(dec.tau_power).table(&ball)?;
            p_rep.record(dec.tau_power == 0 || !fixes_line(&tau), || "P: tau fixes L".into());
        }
    }
    Ok(vec![d_rep, p_rep])
}

/// Result of the finite Sylow analysis of the edge stabilizer on a ball.
#[derive(Clone, Debug, Serialize)]
pub struct SylowReport {
    pub q: u32,
    pub p: u32,
    pub depth: u32,
    pub ball_size: usize,
    /// `|B_N|`, `|U_N|` and `|T_N|` for the ball-restricted groups.
    pub order_b: usize,
    pub order_u: usize,
    pub order_t: usize,
    pub u_is_p_group: bool,
    pub u_is_normal: bool,
    pub semidirect: bool,
    pub t_order_prime_to_p: bool,
    pub p_elements_in_u: bool,
    pub fixes_base_edge: bool,
    /// Each candidate outside `B_N`, with whether it normalizes `U_N`.
    pub falsification: Vec<(String, bool)>,
    pub passed: bool,
}

/// Tree elements and matrices side by side, so both can be inverted exactly.
#[derive(Clone, Debug)]
enum Gen {
    Tree(TreeWallElement),
    Matrix(LaurentMatrix),
}

impl Gen {
    fn act(&self, v: &TreeVertex, f: &Fq) -> Result<TreeVertex> {
        match self {
            Gen::Tree(g) => g.act(v, f),
            Gen::Matrix(g) => g.act(v, f),
        }
    }

    fn inverse(&self, f: &Fq, cap: i64) -> Result<Gen> {
        Ok(match self {
            Gen::Tree(g) => Gen::Tree(g.inverse(f, cap)?),
            Gen::Matrix(g) => Gen::Matrix(g.inverse(f)),
        })
    }

    fn perm(&self, ball: &Arc<TreeBall>) -> Result<Perm> {
        let f = ball.field().clone();
        BallMap::tabulate(ball.clone(), |v| self.act(v, &f))?
            .as_permutation()
            .ok_or_else(|| Error::Internal(format!("{self:?} does not preserve the ball")))
    }
}

fn is_p_power(mut n: u64, p: u64) -> bool {
    while n.is_multiple_of(p) {
        n /= p;
    }
    n == 1
}

/// The stabilizer of the edge `{v_0, v_1}` restricted to the ball of radius
/// `depth` around `v_0`: its unipotent part `U_N` (upper translations with
/// `nu >= 0`, lower unipotents with `nu >= 1`, principal unit scalings) is the
/// unique Sylow `p`-subgroup, complemented by the constant scalings.
pub fn sylow_ball_check(f: &Fq, depth: u32) -> Result<SylowReport> {
    let ball = TreeBall::new(f, depth);
    let n = ball.len();
    let r = depth as i64;
    let p = f.characteristic();
    let cap = 4 * r + 8;

    let mut u_gens = Vec::new();
    for c in f.units() {
        for k in 0..r {
            u_gens.push(Gen::Tree(translation(&Series::monomial(c, k))));
        }
        for k in 1..=r + 1 {
            u_gens.push(Gen::Matrix(LaurentMatrix::lower(Series::monomial(c, k))));
        }
        for k in 1..=2 * r {
            let s = Series::from_terms(&[(0, 1), (k, c)], None, f);
            u_gens.push(Gen::Tree(TreeWallElement::scaling(s)?));
        }
    }
    let t_gens: Vec<Gen> = f
        .units()
        .filter(|&c| c != 1)
        .map(|c| TreeWallElement::scaling(Series::monomial(c, 0)).map(Gen::Tree))
        .collect::<Result<_>>()?;

    let u_perms: Vec<Perm> = u_gens.iter().map(|g| g.perm(&ball)).collect::<Result<_>>()?;
    let t_perms: Vec<Perm> = t_gens.iter().map(|g| g.perm(&ball)).collect::<Result<_>>()?;
    let budget = 100_000;
    let u_grp = Closure::generate(n, &u_perms, budget);
    let t_grp = Closure::generate(n, &t_perms, budget);
    let all: Vec<Perm> = u_perms.iter().chain(&t_perms).cloned().collect();
    let b_grp = Closure::generate(n, &all, budget);
    if !(u_grp.saturated && t_grp.saturated && b_grp.saturated) {
        return Err(Error::ResourceLimit { limit: budget, reached: budget });
    }

    let p64 = p as u64;
    let u_is_p_group = is_p_power(u_grp.len() as u64, p64);
    let u_is_normal = all.iter().all(|g| {
        let gi = perm::inverse(g);
        u_perms.iter().all(|u| u_grp.contains(&perm::compose(g, &perm::compose(u, &gi))))
    });
    let t_order_prime_to_p = !(t_grp.len() as u64).is_multiple_of(p64);
    let t_meets_u_trivially = t_grp.elements.iter().filter(|x| u_grp.contains(x)).count() == 1;
    let semidirect = u_is_normal && t_meets_u_trivially && b_grp.len() == t_grp.len() * u_grp.len();
    let p_elements_in_u = b_grp.elements.iter().filter(|x| is_p_power(perm::order(x), p64)).all(|x| u_grp.contains(x));
    let v1 = ball
        .index_of(&TreeVertex::line(1))
        .ok_or_else(|| Error::InvalidParameter("depth must be at least 1".into()))?;
    let fixes_base_edge = b_grp.elements.iter().all(|x| x[0] == 0 && x[v1] == v1 as u32);

    // elements outside B_N: none normalizes the ball image of U_N
    let mut candidates: Vec<(String, Gen)> = Vec::new();
    for k in 1..=r.min(3) {
        candidates.push((format!("translation t^-{k}"), Gen::Tree(translation(&Series::monomial(1, -k)))));
    }
    candidates.push(("tau".into(), Gen::Tree(TreeWallElement::TauPower(1))));
    candidates.push(("tau^-1".into(), Gen::Tree(TreeWallElement::TauPower(-1))));
    candidates.push(("lower unipotent 1".into(), Gen::Matrix(LaurentMatrix::lower(Series::one()))));
    let mut falsification = Vec::new();
    for (name, g) in candidates {
        let gi = g.inverse(f, cap)?;
        let mut normalizes = true;
        for u in &u_gens {
            let conj = BallMap::tabulate(ball.clone(), |v| g.act(&u.act(&gi.act(v, f)?, f)?, f))?;
            let inside = conj.as_permutation().is_some_and(|x| u_grp.contains(&x));
            if !inside {
                normalizes = false;
                break;
            }
        }
        let in_b =
            BallMap::tabulate(ball.clone(), |v| g.act(v, f))?.as_permutation().is_some_and(|x| b_grp.contains(&x));
        if in_b {
            return Err(Error::Internal(format!("candidate {name} lies in B_N")));
        }
        falsification.push((name, normalizes));
    }

    let passed = u_is_p_group
        && u_is_normal
        && semidirect
        && t_order_prime_to_p
        && p_elements_in_u
        && fixes_base_edge
        && falsification.iter().all(|(_, norm)| !norm);
    Ok(SylowReport {
        q: f.order(),
        p,
        depth,
        ball_size: n,
        order_b: b_grp.len(),
        order_u: u_grp.len(),
        order_t: t_grp.len(),
        u_is_p_group,
        u_is_normal,
        semidirect,
        t_order_prime_to_p,
        p_elements_in_u,
        fixes_base_edge,
        falsification,
        passed,
    })
}

/// An end of the tree other than through `v_0`-rays: `Xi` is the attracting
/// end `h -> -inf`; `Point(y)` is the end reached from `v_0` by climbing along
/// `y`, i.e. through the vertices `(h, y mod t^h)` as `h -> +inf`.
/// `Point(0)` is the repelling end `-xi`.
#[derive(Clone, Debug, PartialEq)]
pub enum End {
    Xi,
    Point(Series),
}

impl End {
    /// The first `len + 1` vertices of the ray from `v_0`.
    fn ray(&self, len: usize) -> Result<Vec<TreeVertex>> {
        match self {
            End::Xi => Ok((0..=len as i64).map(TreeVertex::line).collect()),
            End::Point(y) => {
                let j = y.valuation().map_or(0, |v| v.min(0));
                let mut out: Vec<TreeVertex> = (0..=-j).map(TreeVertex::line).collect();
                let mut h = j + 1;
                while out.len() <= len {
                    out.push(TreeVertex::new(h, y)?);
                    h += 1;
                }
                out.truncate(len + 1);
                Ok(out)
            }
        }
    }

    fn apply_tau(&self, n: i64) -> End {
        match self {
            End::Xi => End::Xi,
            End::Point(y) => End::Point(y.shift(-2 * n)),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EndTrace {
    pub end: String,
    /// Number of initial edges shared by `[v_0, tau^n eta)` and `[v_0, xi)`.
    pub agreement: Vec<u64>,
    /// Least `n` with agreement at least `depth`.
    pub threshold: Option<i64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProximalityReport {
    pub depth: u32,
    pub n_max: i64,
    pub traces: Vec<EndTrace>,
    pub passed: bool,
}

/// Shadow of strong proximality: `tau^n` pushes every end except `-xi`
/// toward `xi`, two edges per step once the ray branches off `L` below `v_0`.
pub fn proximality_demo(ends: &[End], n_max: i64, depth: u32) -> Result<ProximalityReport> {
    let d = depth as usize;
    let xi_ray = End::Xi.ray(d)?;
    let mut traces = Vec::new();
    let mut passed = true;
    for end in ends {
        if let End::Point(y) = end {
            if y.is_zero() {
                return Err(Error::NotInModel("-xi is the repelling end of tau; it does not converge".into()));
            }
        }
        let mut agreement = Vec::new();
        for n in 0..=n_max {
            let ray = end.apply_tau(n).ray(d)?;
            let shared = ray.iter().zip(&xi_ray).take_while(|(a, b)| a == b).count();
            agreement.push(shared as u64 - 1);
        }
        let threshold = agreement.iter().position(|&a| a >= depth as u64).map(|n| n as i64);
        // growth by exactly two per step until the ball depth is reached
        let growth_ok =
            agreement.windows(2).all(|w| w[1] >= w[0] && (w[0] == 0 || w[1] == depth as u64 || w[1] == w[0] + 2));
        passed &= growth_ok && (threshold.is_some() || n_max * 2 < depth as i64);
        let label = match end {
            End::Xi => "xi".to_string(),
            End::Point(y) => format!("point({y})"),
        };
        traces.push(EndTrace { end: label, agreement, threshold });
    }
    Ok(ProximalityReport { depth, n_max, traces, passed })
}
