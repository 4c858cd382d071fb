//! Generalized Cartan matrices, the rule turning them into Coxeter matrices,
//! and the conditions singling out right-angled Fuchsian root data.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::prime_power;

/// A generalized Cartan matrix, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct Gcm {
    n: usize,
    a: Vec<i64>,
}

impl Gcm {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidGcm("empty matrix".into()));
        }
        if let Some(row) = rows.iter().find(|row| row.len() != n) {
            return Err(Error::RankMismatch { expected: n, found: row.len() });
        }
        let a: Vec<i64> = rows.into_iter().flatten().collect();
        for i in 0..n {
            if a[i * n + i] != 2 {
                return Err(Error::InvalidGcm(format!("A[{i}][{i}] = {} != 2", a[i * n + i])));
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                let (x, y) = (a[i * n + j], a[j * n + i]);
                if x > 0 {
                    return Err(Error::InvalidGcm(format!("A[{i}][{j}] = {x} is positive")));
                }
                if (x == 0) != (y == 0) {
                    return Err(Error::InvalidGcm(format!("A[{i}][{j}] = {x} but A[{j}][{i}] = {y}")));
                }
            }
        }
        Ok(Gcm { n, a })
    }

    /// The right-angled Fuchsian matrix of rank `r`: zero on cyclically
    /// adjacent pairs and `coeff` (at most -2) on all others.
    pub fn right_angled(r: usize, coeff: i64) -> Result<Self> {
        if r < 5 {
            return Err(Error::InvalidParameter(format!("polygon size r = {r} < 5")));
        }
        if coeff > -2 {
            return Err(Error::InvalidParameter(format!(
                "off-diagonal coefficient {coeff} gives a finite dihedral subgroup"
            )));
        }
        let rows = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| match () {
                        _ if i == j => 2,
                        _ if cyclic_adjacent(i, j, r) => 0,
                        _ => coeff,
                    })
                    .collect()
            })
            .collect();
        Gcm::new(rows)
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.a[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.a.chunks(self.n).map(<[i64]>::to_vec).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// `A[sigma(i)][sigma(j)]`.
    pub fn relabel(&self, sigma: &[usize]) -> Gcm {
        let n = self.n;
        let a = (0..n * n).map(|k| self.get(sigma[k / n], sigma[k % n])).collect();
        Gcm { n, a }
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.n {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: i, rank: self.n })
        }
    }
}

impl TryFrom<Vec<Vec<i64>>> for Gcm {
    type Error = Error;
    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self> {
        Gcm::new(rows)
    }
}

impl From<Gcm> for Vec<Vec<i64>> {
    fn from(g: Gcm) -> Self {
        g.rows()
    }
}

impl fmt::Debug for Gcm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.rows())
    }
}

pub fn cyclic_adjacent(i: usize, j: usize, r: usize) -> bool {
    (i + 1) % r == j || (j + 1) % r == i
}

/// An entry `m_ij` of a Coxeter matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CoxeterEntry {
    Finite(u32),
    Infinite,
}

impl fmt::Display for CoxeterEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoxeterEntry::Finite(m) => write!(f, "{m}"),
            CoxeterEntry::Infinite => write!(f, "inf"),
        }
    }
}

/// `m` for the pair `(A[i][j], A[j][i]) = (a, b)`: products 0, 1, 2, 3 give
/// 2, 3, 4, 6 and products of at least 4 give infinity.
pub fn coxeter_exponent(a: i64, b: i64) -> Result<CoxeterEntry> {
    if a > 0 || b > 0 {
        return Err(Error::InvalidCoxeterPair { a, b, reason: "entries must be non-positive" });
    }
    if (a == 0) != (b == 0) {
        return Err(Error::InvalidCoxeterPair { a, b, reason: "exactly one entry is zero" });
    }
    Ok(match a * b {
        0 => CoxeterEntry::Finite(2),
        1 => CoxeterEntry::Finite(3),
        2 => CoxeterEntry::Finite(4),
        3 => CoxeterEntry::Finite(6),
        _ => CoxeterEntry::Infinite,
    })
}

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoxeterMatrix {
    n: usize,
    m: Vec<CoxeterEntry>,
}

impl CoxeterMatrix {
    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> CoxeterEntry {
        self.m[i * self.n + j]
    }

    /// The Coxeter matrix of the right-angled `r`-gon group.
    pub fn right_angled_polygon(r: usize) -> Self {
        let m = (0..r * r)
            .map(|k| {
                let (i, j) = (k / r, k % r);
                match () {
                    _ if i == j => CoxeterEntry::Finite(1),
                    _ if cyclic_adjacent(i, j, r) => CoxeterEntry::Finite(2),
                    _ => CoxeterEntry::Infinite,
                }
            })
            .collect();
        CoxeterMatrix { n: r, m }
    }
}

impl fmt::Debug for CoxeterMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> =
            self.m.chunks(self.n).map(|row| row.iter().map(ToString::to_string).collect()).collect();
        write!(f, "{rows:?}")
    }
}

pub fn coxeter_matrix_of(gcm: &Gcm) -> CoxeterMatrix {
    let n = gcm.rank();
    let m = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            if i == j {
                CoxeterEntry::Finite(1)
            } else {
                coxeter_exponent(gcm.get(i, j), gcm.get(j, i)).expect("validated GCM entries always have an exponent")
            }
        })
        .collect();
    CoxeterMatrix { n, m }
}

/// The first pair violating Fuchsian admissibility.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Offense {
    pub i: usize,
    pub j: usize,
    pub entries: (i64, i64),
    pub exponent: CoxeterEntry,
    pub expected: CoxeterEntry,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub offense: Option<Offense>,
}

/// Whether the Weyl group of `gcm` is the right-angled `r`-gon group with
/// generators in cyclic order: `A[i][i+1] = 0` and every non-adjacent pair
/// has `A[i][j] A[j][i] >= 4`.
pub fn fuchsian_admissible(gcm: &Gcm, r: usize) -> Result<Admissibility> {
    if gcm.rank() != r {
        return Err(Error::RankMismatch { expected: r, found: gcm.rank() });
    }
    for i in 0..r {
        for j in (i + 1)..r {
            let entries = (gcm.get(i, j), gcm.get(j, i));
            let exponent = coxeter_exponent(entries.0, entries.1)?;
            let expected =
                if r >= 3 && cyclic_adjacent(i, j, r) { CoxeterEntry::Finite(2) } else { CoxeterEntry::Infinite };
            if exponent != expected {
                return Ok(Admissibility {
                    admissible: false,
                    offense: Some(Offense { i, j, entries, exponent, expected }),
                });
            }
        }
    }
    Ok(Admissibility { admissible: true, offense: None })
}

/// Both coefficients `A[i-1][i+1]` and `A[i+1][i-1]` are at most -2
/// (indices mod `r`).
pub fn abelian_radical_condition(gcm: &Gcm, i: usize) -> bool {
    let r = gcm.rank();
    let (prev, next) = ((i + r - 1) % r, (i + 1) % r);
    gcm.get(prev, next) <= -2 && gcm.get(next, prev) <= -2
}

/// All Fuchsian-admissible matrices of rank `r` with entries bounded by
/// `coeff_bound` in absolute value, in lexicographic (row-major) order.
pub fn enumerate_admissible_gcms(r: usize, coeff_bound: i64, limit: usize) -> Result<Vec<Gcm>> {
    if r < 5 {
        return Err(Error::InvalidParameter(format!("polygon size r = {r} < 5")));
    }
    if coeff_bound < 0 {
        return Err(Error::InvalidParameter("negative coefficient bound".into()));
    }
    let mut options = Vec::new();
    for a in (-coeff_bound..=-1).rev() {
        for b in (-coeff_bound..=-1).rev() {
            if a * b >= 4 {
                options.push((a, b));
            }
        }
    }
    let pairs: Vec<(usize, usize)> =
        (0..r).flat_map(|i| ((i + 1)..r).map(move |j| (i, j))).filter(|&(i, j)| !cyclic_adjacent(i, j, r)).collect();
    if options.is_empty() {
        return Ok(Vec::new());
    }
    let total = (options.len() as f64).powi(pairs.len() as i32);
    if total > limit as f64 {
        return Err(Error::ResourceLimit { limit, reached: pairs.len() });
    }

    let mut out = Vec::new();
    let mut choice = vec![0usize; pairs.len()];
    loop {
        let mut rows = vec![vec![0i64; r]; r];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = 2;
        }
        for (&(i, j), &c) in pairs.iter().zip(&choice) {
            rows[i][j] = options[c].0;
            rows[j][i] = options[c].1;
        }
        out.push(Gcm::new(rows)?);
        // odometer
        let mut k = 0;
        while k < choice.len() {
            choice[k] += 1;
            if choice[k] < options.len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
        if k == choice.len() {
            break;
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// The `2r` relabelings of `0..r` by rotations and reflections of the `r`-gon.
pub fn dihedral_relabelings(r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(2 * r);
    for k in 0..r {
        out.push((0..r).map(|i| (i + k) % r).collect());
        out.push((0..r).map(|i| (k + r - i) % r).collect());
    }
    out
}

/// Whether a set of matrices is closed under the dihedral relabelings.
pub fn is_dihedrally_closed(gcms: &[Gcm]) -> bool {
    let Some(first) = gcms.first() else { return true };
    let set: BTreeSet<&Gcm> = gcms.iter().collect();
    dihedral_relabelings(first.rank()).iter().all(|sigma| gcms.iter().all(|g| set.contains(&g.relabel(sigma))))
}

/// Polygon size and per-type panel thickness parameters of `I_{r,1+q}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuchsianParams {
    pub r: usize,
    pub q: Vec<u32>,
}

impl FuchsianParams {
    pub fn new(r: usize, q: Vec<u32>) -> Result<Self> {
        if r < 5 {
            return Err(Error::InvalidParameter(format!("polygon size r = {r} < 5")));
        }
        let q = if q.len() == 1 { vec![q[0]; r] } else { q };
        if q.len() != r {
            return Err(Error::RankMismatch { expected: r, found: q.len() });
        }
        if let Some(&bad) = q.iter().find(|&&qi| qi < 2) {
            return Err(Error::InvalidParameter(format!("thickness parameter q = {bad} < 2")));
        }
        Ok(FuchsianParams { r, q })
    }

    pub fn uniform(r: usize, q: u32) -> Result<Self> {
        Self::new(r, vec![q])
    }

    /// The common characteristic when every `q_i` is a power of one prime.
    pub fn characteristic(&self) -> Option<u32> {
        let ps: BTreeSet<u32> = self.q.iter().filter_map(|&q| prime_power(q).map(|(p, _)| p)).collect();
        let all = self.q.iter().all(|&q| prime_power(q).is_some());
        if all && ps.len() == 1 {
            ps.into_iter().next()
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Gcm::new(vec![vec![2, -1], vec![-1, 2]]).is_ok());
        assert!(Gcm::new(vec![vec![2, 1], vec![-1, 2]]).is_err());
        assert!(Gcm::new(vec![vec![2, 0], vec![-1, 2]]).is_err());
        assert!(Gcm::new(vec![vec![1, 0], vec![0, 2]]).is_err());
        assert!(matches!(Gcm::new(vec![vec![2, 0], vec![0]]), Err(Error::RankMismatch { .. })));
    }

    #[test]
    fn json_round_trip() {
        let g = Gcm::right_angled(5, -2).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.starts_with("[[2,0,-2,-2,0]"));
        assert_eq!(serde_json::from_str::<Gcm>(&s).unwrap(), g);
        assert!(serde_json::from_str::<Gcm>("[[2,1],[1,2]]").is_err());
    }

    #[test]
    fn exponents() {
        use CoxeterEntry::*;
        assert_eq!(coxeter_exponent(0, 0).unwrap(), Finite(2));
        assert_eq!(coxeter_exponent(-1, -1).unwrap(), Finite(3));
        assert_eq!(coxeter_exponent(-1, -2).unwrap(), Finite(4));
        assert_eq!(coxeter_exponent(-3, -1).unwrap(), Finite(6));
        assert_eq!(coxeter_exponent(-2, -2).unwrap(), Infinite);
        assert_eq!(coxeter_exponent(-1, -4).unwrap(), Infinite);
        assert!(coxeter_exponent(1, -1).is_err());
        assert!(coxeter_exponent(0, -1).is_err());
    }

    #[test]
    fn coxeter_matrices() {
        let a2 = Gcm::new(vec![vec![2, -1], vec![-1, 2]]).unwrap();
        assert_eq!(coxeter_matrix_of(&a2).get(0, 1), CoxeterEntry::Finite(3));
        let a11 = Gcm::new(vec![vec![2, -2], vec![-2, 2]]).unwrap();
        assert_eq!(coxeter_matrix_of(&a11).get(0, 1), CoxeterEntry::Infinite);
        let g = Gcm::right_angled(6, -3).unwrap();
        assert_eq!(coxeter_matrix_of(&g), CoxeterMatrix::right_angled_polygon(6));
    }

    #[test]
    fn admissibility() {
        let g = Gcm::right_angled(5, -2).unwrap();
        assert!(fuchsian_admissible(&g, 5).unwrap().admissible);
        let a2 = Gcm::new(vec![vec![2, -1], vec![-1, 2]]).unwrap();
        assert!(!fuchsian_admissible(&a2, 2).unwrap().admissible);
        let mut rows = g.rows();
        rows[0][2] = -1;
        rows[2][0] = -3;
        let bad = Gcm::new(rows).unwrap();
        let verdict = fuchsian_admissible(&bad, 5).unwrap();
        assert!(!verdict.admissible);
        let off = verdict.offense.unwrap();
        assert_eq!((off.i, off.j), (0, 2));
        assert_eq!(off.exponent, CoxeterEntry::Finite(6));
        assert!(matches!(fuchsian_admissible(&g, 6), Err(Error::RankMismatch { .. })));
    }

    #[test]
    fn abelian_radical() {
        let mut rows = Gcm::right_angled(5, -2).unwrap().rows();
        assert!(abelian_radical_condition(&Gcm::new(rows.clone()).unwrap(), 1));
        rows[0][2] = -1;
        rows[2][0] = -4;
        assert!(!abelian_radical_condition(&Gcm::new(rows.clone()).unwrap(), 1));
        rows[0][2] = -3;
        rows[2][0] = -2;
        assert!(abelian_radical_condition(&Gcm::new(rows).unwrap(), 1));
        // indices wrap around
        let g = Gcm::right_angled(5, -2).unwrap();
        assert!(abelian_radical_condition(&g, 0));
    }

    #[test]
    fn enumeration() {
        let two = enumerate_admissible_gcms(5, 2, 1_000_000).unwrap();
        assert_eq!(two, vec![Gcm::right_angled(5, -2).unwrap()]);
        assert!(enumerate_admissible_gcms(5, 1, 1_000_000).unwrap().is_empty());
        assert!(enumerate_admissible_gcms(2, 3, 1_000_000).is_err());
        let three = enumerate_admissible_gcms(5, 3, 1_000_000).unwrap();
        assert_eq!(three.len(), 4usize.pow(5));
        assert!(three.windows(2).all(|w| w[0] < w[1]));
        for g in &three {
            assert!(fuchsian_admissible(g, 5).unwrap().admissible);
        }
        assert!(is_dihedrally_closed(&three));
        assert!(!is_dihedrally_closed(&three[..3]));
    }

    #[test]
    fn params() {
        assert_eq!(FuchsianParams::uniform(5, 2).unwrap().q, vec![2; 5]);
        assert!(FuchsianParams::uniform(4, 2).is_err());
        assert!(FuchsianParams::new(5, vec![2, 3]).is_err());
        assert_eq!(FuchsianParams::uniform(5, 9).unwrap().characteristic(), Some(3));
        assert_eq!(FuchsianParams::new(5, vec![2, 3, 2, 3, 2]).unwrap().characteristic(), None);
    }
}
