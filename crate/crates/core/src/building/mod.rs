//! The right-angled Fuchsian building `I_{r,1+q}` through the graph product
//! `Gamma = <g_i | g_i^{q_i+1} = 1, [g_i, g_{i+1}] = 1>`, which acts simply
//! transitively on its chambers. A chamber is the group element reaching it
//! from the base chamber, stored as a reduced syllable word in
//! lexicographically least form (syllables of cyclically adjacent types
//! commute; ties broken by type).

mod apartment;

pub use apartment::{apartment_retraction, fundamental_polygon, place_ball, render_svg, Placement, Point};

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::report::CheckReport;
use crate::rootdata::{cyclic_adjacent, FuchsianParams, Gcm};
use crate::weyl::{normal_form, WeylElement};

/// A syllable `g_type^exp` with `1 <= exp <= q_type`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Syllable {
    pub ty: usize,
    pub exp: u32,
}

#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Chamber {
    syllables: Vec<Syllable>,
}

impl Chamber {
    pub fn base() -> Self {
        Chamber::default()
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    /// Gallery distance to the base chamber.
    pub fn length(&self) -> usize {
        self.syllables.len()
    }

    pub fn types(&self) -> Vec<usize> {
        self.syllables.iter().map(|s| s.ty).collect()
    }
}

impl fmt::Debug for Chamber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.syllables.iter().map(|s| format!("g{}^{}", s.ty, s.exp)).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// The building with its parameters and the Weyl group of the `r`-gon.
#[derive(Clone, Debug)]
pub struct Building {
    params: FuchsianParams,
    gcm: Gcm,
}

impl Building {
    pub fn new(params: FuchsianParams) -> Result<Self> {
        let gcm = Gcm::right_angled(params.r, -2)?;
        Ok(Building { params, gcm })
    }

    pub fn params(&self) -> &FuchsianParams {
        &self.params
    }

    pub fn rank(&self) -> usize {
        self.params.r
    }

    pub fn thickness(&self, i: usize) -> u32 {
        self.params.q[i]
    }

    /// The Coxeter system of the apartments.
    pub fn gcm(&self) -> &Gcm {
        &self.gcm
    }

    fn commute(&self, i: usize, j: usize) -> bool {
        cyclic_adjacent(i, j, self.params.r)
    }

    fn check(&self, s: Syllable) -> Result<()> {
        self.gcm.check_index(s.ty)?;
        let q = self.params.q[s.ty];
        if s.exp == 0 || s.exp > q {
            return Err(Error::InvalidParameter(format!("exponent {} outside 1..={q} for type {}", s.exp, s.ty)));
        }
        Ok(())
    }

    /// `c . g_ty^exp` in normal form. Any exponent is reduced mod `q_ty + 1`.
    pub fn multiply(&self, c: &Chamber, ty: usize, exp: u32) -> Result<Chamber> {
        self.gcm.check_index(ty)?;
        let modulus = self.params.q[ty] + 1;
        let exp = exp % modulus;
        let mut syl = c.syllables.clone();
        if exp == 0 {
            return Ok(c.clone());
        }
        // look back past syllables commuting with `ty` for one of type `ty`
        let mut k = syl.len();
        let mut merged = false;
        while k > 0 {
            let s = syl[k - 1];
            if s.ty == ty {
                let e = (s.exp + exp) % modulus;
                if e == 0 {
                    syl.remove(k - 1);
                } else {
                    syl[k - 1].exp = e;
                }
                merged = true;
                break;
            }
            if !self.commute(s.ty, ty) {
                break;
            }
            k -= 1;
        }
        if !merged {
            syl.push(Syllable { ty, exp });
        }
        Ok(Chamber { syllables: self.lex_least(syl) })
    }

    /// Lexicographically least rearrangement of a reduced word: repeatedly
    /// emit the smallest-type syllable that commutes with everything before it.
    fn lex_least(&self, mut rest: Vec<Syllable>) -> Vec<Syllable> {
        let mut out = Vec::with_capacity(rest.len());
        while !rest.is_empty() {
            let mut best: Option<usize> = None;
            for k in 0..rest.len() {
                let free = rest[..k].iter().all(|s| self.commute(s.ty, rest[k].ty));
                if free && best.is_none_or(|b| rest[k].ty < rest[b].ty) {
                    best = Some(k);
                }
            }
            let k = best.expect("the first syllable is always free");
            out.push(rest.remove(k));
        }
        out
    }

    pub fn from_syllables(&self, word: &[Syllable]) -> Result<Chamber> {
        let mut c = Chamber::base();
        for &s in word {
            self.check(s)?;
            c = self.multiply(&c, s.ty, s.exp)?;
        }
        Ok(c)
    }

    pub fn mul(&self, a: &Chamber, b: &Chamber) -> Result<Chamber> {
        let mut c = a.clone();
        for s in &b.syllables {
            c = self.multiply(&c, s.ty, s.exp)?;
        }
        Ok(c)
    }

    pub fn inverse(&self, c: &Chamber) -> Result<Chamber> {
        let word: Vec<Syllable> =
            c.syllables.iter().rev().map(|s| Syllable { ty: s.ty, exp: self.params.q[s.ty] + 1 - s.exp }).collect();
        self.from_syllables(&word)
    }

    /// The `1 + q_i` chambers `c . g_i^e`, `e = 0..=q_i`, sorted.
    pub fn panel_chambers(&self, c: &Chamber, i: usize) -> Result<Vec<Chamber>> {
        self.gcm.check_index(i)?;
        let mut out: Vec<Chamber> = (0..=self.params.q[i]).map(|e| self.multiply(c, i, e)).collect::<Result<_>>()?;
        out.sort();
        Ok(out)
    }

    /// The `{i, i+1}`-residue of `c`: `(1 + q_i)(1 + q_{i+1})` chambers.
    pub fn vertex_residue(&self, c: &Chamber, i: usize) -> Result<Vec<Chamber>> {
        self.gcm.check_index(i)?;
        let j = (i + 1) % self.rank();
        let mut out = Vec::new();
        for a in 0..=self.params.q[i] {
            for b in 0..=self.params.q[j] {
                out.push(self.multiply(&self.multiply(c, i, a)?, j, b)?);
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// The link of the vertex of type `{i, i+1}` at `c`.
    pub fn link(&self, c: &Chamber, i: usize) -> Result<Link> {
        let j = (i + 1) % self.rank();
        let residue = self.vertex_residue(c, i)?;
        let mut left: BTreeSet<Vec<Chamber>> = BTreeSet::new();
        let mut right: BTreeSet<Vec<Chamber>> = BTreeSet::new();
        for d in &residue {
            left.insert(self.panel_chambers(d, i)?);
            right.insert(self.panel_chambers(d, j)?);
        }
        let left: Vec<_> = left.into_iter().collect();
        let right: Vec<_> = right.into_iter().collect();
        let incidence =
            left.iter().map(|p| right.iter().map(|q| p.iter().filter(|c| q.contains(c)).count()).collect()).collect();
        Ok(Link { types: (i, j), chambers: residue.len(), left: left.len(), right: right.len(), incidence })
    }

    /// `delta(a, b)`: the type word of `a^{-1} b` in the Weyl group. The
    /// word of a normal-form chamber is reduced in `W`; this is checked.
    pub fn w_distance(&self, a: &Chamber, b: &Chamber) -> Result<WeylElement> {
        let c = self.mul(&self.inverse(a)?, b)?;
        let w = normal_form(&self.gcm, &c.types())?;
        if w.length() != c.length() {
            return Err(Error::Internal(format!("chamber word {c:?} projects to a non-reduced Weyl word")));
        }
        Ok(w)
    }

    /// Chambers at gallery distance at most `n` from the base, grouped by
    /// distance, each group sorted.
    pub fn ball(&self, n: usize, limit: usize) -> Result<Vec<Vec<Chamber>>> {
        let mut seen: HashSet<Chamber> = HashSet::from([Chamber::base()]);
        let mut layers = vec![vec![Chamber::base()]];
        for d in 0..n {
            let mut next = Vec::new();
            for c in &layers[d] {
                for i in 0..self.rank() {
                    for e in 1..=self.params.q[i] {
                        let x = self.multiply(c, i, e)?;
                        if x.length() == d + 1 && seen.insert(x.clone()) {
                            next.push(x);
                        }
                    }
                }
            }
            if seen.len() > limit {
                return Err(Error::ResourceLimit { limit, reached: d + 1 });
            }
            next.sort();
            layers.push(next);
        }
        Ok(layers)
    }

    /// Relations on all generators, the nontrivial commutators, and seeded
    /// random checks of associativity and normal-form consistency.
    pub fn verify_presentation(&self, samples: usize, seed: u64) -> Result<CheckReport> {
        let r = self.rank();
        let mut rep =
            CheckReport::new("presentation", json!({"r": r, "q": self.params.q, "samples": samples, "seed": seed}));
        let base = Chamber::base();
        for i in 0..r {
            let mut c = base.clone();
            for _ in 0..=self.params.q[i] {
                c = self.multiply(&c, i, 1)?;
            }
            rep.record(c == base, || format!("g_{i}^(q+1) != 1"));
            for j in 0..r {
                if i == j {
                    continue;
                }
                let gi = self.multiply(&base, i, 1)?;
                let gj = self.multiply(&base, j, 1)?;
                let comm = self.mul(&self.mul(&gi, &gj)?, &self.mul(&self.inverse(&gi)?, &self.inverse(&gj)?)?)?;
                let trivial = comm == base;
                rep.record(trivial == self.commute(i, j), || format!("[g_{i}, g_{j}] trivial is {trivial}"));
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let random_word = |rng: &mut ChaCha8Rng| -> Vec<Syllable> {
            let len = rng.gen_range(0..=8);
            (0..len)
                .map(|_| {
                    let ty = rng.gen_range(0..r);
                    Syllable { ty, exp: rng.gen_range(1..=self.params.q[ty]) }
                })
                .collect()
        };
        for _ in 0..samples {
            let (u, v, w) = (random_word(&mut rng), random_word(&mut rng), random_word(&mut rng));
            let (cu, cv, cw) = (self.from_syllables(&u)?, self.from_syllables(&v)?, self.from_syllables(&w)?);
            let uv: Vec<Syllable> = u.iter().chain(&v).copied().collect();
            let direct = self.from_syllables(&uv)?;
            rep.record(direct == self.mul(&cu, &cv)?, || format!("nf(uv) != nf(u) nf(v) for {u:?}, {v:?}"));
            let left = self.mul(&self.mul(&cu, &cv)?, &cw)?;
            let right = self.mul(&cu, &self.mul(&cv, &cw)?)?;
            rep.record(left == right, || "associativity".into());
            rep.record(self.mul(&cu, &self.inverse(&cu)?)? == base, || "inverse".into());
            // re-normalizing a normal form is a no-op
            rep.record(self.from_syllables(cu.syllables())? == cu, || "idempotence".into());
            // left multiplication preserves the W-distance
            rep.record(
                self.w_distance(&cv, &cw)? == self.w_distance(&self.mul(&cu, &cv)?, &self.mul(&cu, &cw)?)?,
                || "left invariance of the W-distance".into(),
            );
        }
        Ok(rep)
    }

    /// `sum_{n <= N} a_n prod q`, counted from Weyl words of length `<= N`.
    pub fn expected_ball_sizes(&self, n: usize) -> Result<Vec<u64>> {
        let mut per_len = vec![0u64; n + 1];
        for layer in crate::weyl::enumerate_ball(&self.gcm, n, crate::weyl::DEFAULT_ELEMENT_LIMIT)? {
            for w in layer {
                per_len[w.length()] += w.word().iter().map(|&i| self.params.q[i] as u64).product::<u64>();
            }
        }
        Ok(per_len)
    }

    /// Ball statistics and audits: panel sizes everywhere in the ball, and
    /// `links` vertex links sampled with the given seed.
    pub fn audit(&self, n: usize, links: usize, seed: u64) -> Result<BuildingAudit> {
        let ball = self.ball(n, 10_000_000)?;
        let counts: Vec<u64> = ball.iter().map(|l| l.len() as u64).collect();
        let expected = self.expected_ball_sizes(n)?;
        let mut panels = CheckReport::new("panel_sizes", json!({"depth": n}));
        let mut metric = CheckReport::new("gallery_metric", json!({"depth": n}));
        for (d, layer) in ball.iter().enumerate() {
            for c in layer {
                for i in 0..self.rank() {
                    let p = self.panel_chambers(c, i)?;
                    let ok = p.len() == self.params.q[i] as usize + 1
                        && p.contains(c)
                        && p.iter().all(|x| self.panel_chambers(x, i).ok().as_ref() == Some(&p));
                    panels.record(ok, || format!("panel of type {i} at {c:?}"));
                }
                metric.record(self.w_distance(&Chamber::base(), c)?.length() == d, || {
                    format!("{c:?} at BFS distance {d}")
                });
            }
        }
        let mut link_rep = CheckReport::new("links", json!({"samples": links, "seed": seed}));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let all: Vec<&Chamber> = ball.iter().flatten().collect();
        let mut shapes: BTreeMap<String, usize> = BTreeMap::new();
        for _ in 0..links {
            let c = all[rng.gen_range(0..all.len())];
            let i = rng.gen_range(0..self.rank());
            let link = self.link(c, i)?;
            let j = (i + 1) % self.rank();
            let ok = link.is_complete_bipartite(self.params.q[j] as usize + 1, self.params.q[i] as usize + 1)
                && link.chambers == link.left * link.right;
            *shapes.entry(format!("K_{{{},{}}}", link.left, link.right)).or_default() += 1;
            link_rep.record(ok, || format!("link of type {{{i},{j}}} at {c:?}"));
        }
        link_rep.details = json!({"shapes": shapes});
        let mut sizes = CheckReport::new("ball_sizes", json!({"depth": n}));
        sizes.record(counts == expected, || format!("counts {counts:?} != expected {expected:?}"));
        Ok(BuildingAudit { counts, expected, checks: vec![sizes, panels, metric, link_rep] })
    }
}

/// Panels of type `i` (left) versus type `i+1` (right) in a vertex residue;
/// `incidence[a][b]` counts shared chambers.
#[derive(Clone, Debug, Serialize)]
pub struct Link {
    pub types: (usize, usize),
    pub chambers: usize,
    pub left: usize,
    pub right: usize,
    pub incidence: Vec<Vec<usize>>,
}

impl Link {
    /// `K_{left, right}` with every cross pair meeting in exactly one chamber.
    pub fn is_complete_bipartite(&self, left: usize, right: usize) -> bool {
        self.left == left && self.right == right && self.incidence.iter().all(|row| row.iter().all(|&x| x == 1))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BuildingAudit {
    /// Chambers at each gallery distance.
    pub counts: Vec<u64>,
    pub expected: Vec<u64>,
    pub checks: Vec<CheckReport>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(r: usize, q: u32) -> Building {
        Building::new(FuchsianParams::uniform(r, q).unwrap()).unwrap()
    }

    fn syl(ty: usize, exp: u32) -> Syllable {
        Syllable { ty, exp }
    }

    #[test]
    fn multiplication_rules() {
        let b = b(5, 2);
        let base = Chamber::base();
        let c = b.multiply(&base, 3, 1).unwrap();
        assert_eq!(b.multiply(&c, 3, 2).unwrap(), base);
        let x = b.from_syllables(&[syl(0, 1), syl(1, 1)]).unwrap();
        let y = b.from_syllables(&[syl(1, 1), syl(0, 1)]).unwrap();
        assert_eq!(x, y);
        assert_eq!(y.syllables(), &[syl(0, 1), syl(1, 1)]);
        let u = b.from_syllables(&[syl(0, 1), syl(2, 1)]).unwrap();
        let v = b.from_syllables(&[syl(2, 1), syl(0, 1)]).unwrap();
        assert_ne!(u, v);
        // merging through a commuting syllable
        let w = b.from_syllables(&[syl(0, 1), syl(4, 2), syl(0, 1)]).unwrap();
        assert_eq!(w.syllables(), &[syl(0, 2), syl(4, 2)]);
        // 4 and 0 commute, so 0 moves first
        let z = b.from_syllables(&[syl(4, 1), syl(0, 1)]).unwrap();
        assert_eq!(z.syllables(), &[syl(0, 1), syl(4, 1)]);
    }

    #[test]
    fn panels() {
        let b = b(5, 2);
        let p = b.panel_chambers(&Chamber::base(), 2).unwrap();
        assert_eq!(
            p,
            vec![Chamber::base(), b.from_syllables(&[syl(2, 1)]).unwrap(), b.from_syllables(&[syl(2, 2)]).unwrap()]
        );
        for c in &p {
            assert_eq!(b.panel_chambers(c, 2).unwrap(), p);
        }
    }

    #[test]
    fn w_distances() {
        let b = b(5, 2);
        let c = b.from_syllables(&[syl(0, 1), syl(2, 2)]).unwrap();
        assert!(b.w_distance(&c, &c).unwrap().is_identity());
        let d = b.multiply(&c, 3, 1).unwrap();
        assert_eq!(b.w_distance(&c, &d).unwrap().word(), &[3]);
        let w = b.w_distance(&Chamber::base(), &c).unwrap();
        assert_eq!(w.word(), &[0, 2]);
    }

    #[test]
    fn ball_counts() {
        let b5 = b(5, 2);
        let ball = b5.ball(3, 1_000_000).unwrap();
        let cumulative: Vec<usize> = ball
            .iter()
            .scan(0, |acc, l| {
                *acc += l.len();
                Some(*acc)
            })
            .collect();
        assert_eq!(cumulative, vec![1, 11, 71, 391]);
        assert_eq!(b5.expected_ball_sizes(3).unwrap(), vec![1, 10, 60, 320]);
    }

    #[test]
    fn links_are_complete_bipartite() {
        let bb = Building::new(FuchsianParams::new(5, vec![2, 3, 2, 3, 4]).unwrap()).unwrap();
        let c = bb.from_syllables(&[syl(0, 1), syl(2, 2)]).unwrap();
        let link = bb.link(&c, 1).unwrap();
        // q_1 = 3, q_2 = 2: K_{1+q_2, 1+q_1}
        assert!(link.is_complete_bipartite(3, 4));
        assert_eq!(link.chambers, 12);
        let link = b(5, 2).link(&Chamber::base(), 4).unwrap();
        assert!(link.is_complete_bipartite(3, 3));
    }

    #[test]
    fn presentation_and_audit() {
        let b = b(5, 2);
        let rep = b.verify_presentation(100, 1).unwrap();
        assert!(rep.passed, "{:?}", rep.failures);
        let audit = b.audit(2, 10, 3).unwrap();
        assert!(audit.checks.iter().all(|c| c.passed));
        assert_eq!(audit.counts, vec![1, 10, 60]);
    }
}
