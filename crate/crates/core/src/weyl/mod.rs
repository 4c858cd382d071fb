//! Weyl groups of generalized Cartan matrices in the integer reflection
//! representation on the root lattice.
//!
//! Convention: `s_i(alpha_j) = alpha_j - A[i][j] alpha_i`. A matrix acts on
//! coordinate vectors in the simple-root basis; column `j` of `w` is
//! `w alpha_j`. Then `l(w s_i) < l(w)` iff `w alpha_i < 0`, and
//! `l(s_i w) < l(w)` iff `w^{-1} alpha_i < 0`.

mod enumerate;
mod growth;
mod roots;

pub use enumerate::{enumerate_ball, growth_coefficients, DEFAULT_ELEMENT_LIMIT};
pub use growth::{
    expand_rational, fuchsian_closed_form, lattice_criterion, partial_sum, partial_sum_evidence, rational_to_f64,
    GrowthSeries, LatticeVerdict,
};
pub use roots::{in_half_space, prenilpotent_pair, verify_certificate, Intersection, PrenilpotencyVerdict, RootVector};

use std::fmt;
use std::hash::{Hash, Hasher};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rootdata::{CoxeterEntry, Gcm};

/// Square integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    n: usize,
    a: Vec<i64>,
}

impl IntMatrix {
    pub fn identity(n: usize) -> Self {
        let mut a = vec![0; n * n];
        for i in 0..n {
            a[i * n + i] = 1;
        }
        IntMatrix { n, a }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.a[i * self.n + j]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn mul(&self, o: &IntMatrix) -> IntMatrix {
        let n = self.n;
        let mut a = vec![0; n * n];
        for i in 0..n {
            for k in 0..n {
                let x = self.a[i * n + k];
                if x != 0 {
                    for j in 0..n {
                        a[i * n + j] += x * o.a[k * n + j];
                    }
                }
            }
        }
        IntMatrix { n, a }
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum()).collect()
    }

    /// `S_i . self`: row operation `row_i -= sum_j A[i][j] row_j`.
    fn left_reflect(&mut self, gcm: &Gcm, i: usize) {
        let n = self.n;
        for c in 0..n {
            let s: i64 = (0..n).map(|j| gcm.get(i, j) * self.a[j * n + c]).sum();
            self.a[i * n + c] -= s;
        }
    }

    /// `self . S_i`: column `j` becomes `col_j - A[i][j] col_i`.
    fn right_reflect(&mut self, gcm: &Gcm, i: usize) {
        let n = self.n;
        let col_i = self.column(i);
        for j in 0..n {
            let c = gcm.get(i, j);
            if c != 0 {
                for (row, x) in col_i.iter().enumerate() {
                    self.a[row * n + j] -= c * x;
                }
            }
        }
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.a.chunks(self.n).map(<[i64]>::to_vec).collect()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.rows())
    }
}

pub(crate) fn is_negative(v: &[i64]) -> bool {
    v.iter().all(|&x| x <= 0) && v.iter().any(|&x| x < 0)
}

/// A Weyl group element: its matrix, its inverse, and its ShortLex normal form.
#[derive(Clone)]
pub struct WeylElement {
    matrix: IntMatrix,
    inverse: IntMatrix,
    word: Vec<usize>,
}

impl PartialEq for WeylElement {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

impl Eq for WeylElement {}

impl Hash for WeylElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.matrix.hash(state);
    }
}

impl fmt::Debug for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W{:?}", self.word)
    }
}

impl Serialize for WeylElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.word.serialize(s)
    }
}

impl WeylElement {
    pub fn identity(gcm: &Gcm) -> Self {
        let id = IntMatrix::identity(gcm.rank());
        WeylElement { matrix: id.clone(), inverse: id, word: Vec::new() }
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn inverse_matrix(&self) -> &IntMatrix {
        &self.inverse
    }

    /// The ShortLex-least reduced word.
    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn length(&self) -> usize {
        self.word.len()
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }

    /// `w alpha_i < 0`.
    pub fn has_right_descent(&self, i: usize) -> bool {
        is_negative(&self.matrix.column(i))
    }

    /// `w^{-1} alpha_i < 0`.
    pub fn has_left_descent(&self, i: usize) -> bool {
        is_negative(&self.inverse.column(i))
    }

    pub fn inverse(&self, gcm: &Gcm) -> WeylElement {
        from_matrices(gcm, self.inverse.clone(), self.matrix.clone())
    }

    pub fn mul(&self, gcm: &Gcm, other: &WeylElement) -> WeylElement {
        from_matrices(gcm, self.matrix.mul(&other.matrix), other.inverse.mul(&self.inverse))
    }

    /// `w s_i`.
    pub fn times_generator(&self, gcm: &Gcm, i: usize) -> WeylElement {
        let mut m = self.matrix.clone();
        m.right_reflect(gcm, i);
        let mut inv = self.inverse.clone();
        inv.left_reflect(gcm, i);
        from_matrices(gcm, m, inv)
    }

    /// `s_i w`.
    pub fn generator_times(&self, gcm: &Gcm, i: usize) -> WeylElement {
        let mut m = self.matrix.clone();
        m.left_reflect(gcm, i);
        let mut inv = self.inverse.clone();
        inv.right_reflect(gcm, i);
        from_matrices(gcm, m, inv)
    }

    /// Applies the element to a root-lattice vector.
    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        self.matrix.apply(v)
    }
}

/// Reads off the ShortLex normal form by repeatedly stripping the smallest
/// left descent.
fn from_matrices(gcm: &Gcm, matrix: IntMatrix, inverse: IntMatrix) -> WeylElement {
    let n = gcm.rank();
    let mut m = matrix.clone();
    let mut inv = inverse.clone();
    let mut word = Vec::new();
    while let Some(i) = (0..n).find(|&i| is_negative(&inv.column(i))) {
        word.push(i);
        m.left_reflect(gcm, i);
        inv.right_reflect(gcm, i);
    }
    debug_assert_eq!(m, IntMatrix::identity(n));
    WeylElement { matrix, inverse, word }
}

pub fn simple_reflection(gcm: &Gcm, i: usize) -> Result<WeylElement> {
    gcm.check_index(i)?;
    Ok(WeylElement::identity(gcm).times_generator(gcm, i))
}

pub fn normal_form(gcm: &Gcm, word: &[usize]) -> Result<WeylElement> {
    let n = gcm.rank();
    let mut m = IntMatrix::identity(n);
    let mut inv = IntMatrix::identity(n);
    for &i in word {
        gcm.check_index(i)?;
        m.right_reflect(gcm, i);
        inv.left_reflect(gcm, i);
    }
    Ok(from_matrices(gcm, m, inv))
}

/// Order of `s_i s_j`, computed by powering the product matrix with checked
/// 128-bit arithmetic. Overflow or reaching `cutoff` gives `Infinite`, which
/// is only accepted when `A[i][j] A[j][i] >= 4`.
pub fn order_of_product(gcm: &Gcm, i: usize, j: usize, cutoff: u64) -> Result<CoxeterEntry> {
    gcm.check_index(i)?;
    gcm.check_index(j)?;
    if i == j {
        return Err(Error::InvalidParameter("order_of_product needs i != j".into()));
    }
    if cutoff < 6 {
        return Err(Error::InvalidParameter(format!("cutoff {cutoff} < 6")));
    }
    let n = gcm.rank();
    let si = simple_reflection(gcm, i)?;
    let sj = simple_reflection(gcm, j)?;
    let p: Vec<i128> = si.matrix.mul(&sj.matrix).a.iter().map(|&x| x as i128).collect();
    let id: Vec<i128> = IntMatrix::identity(n).a.iter().map(|&x| x as i128).collect();
    let mul = |x: &[i128], y: &[i128]| -> Option<Vec<i128>> {
        let mut out = vec![0i128; n * n];
        for r in 0..n {
            for k in 0..n {
                let a = x[r * n + k];
                if a == 0 {
                    continue;
                }
                for c in 0..n {
                    out[r * n + c] = out[r * n + c].checked_add(a.checked_mul(y[k * n + c])?)?;
                }
            }
        }
        Some(out)
    };
    let mut power = p.clone();
    let mut k = 1;
    let found = loop {
        if power == id {
            break Some(k);
        }
        if k >= cutoff {
            break None;
        }
        match mul(&power, &p) {
            Some(next) => power = next,
            None => break None,
        }
        k += 1;
    };
    match found {
        Some(k) => Ok(CoxeterEntry::Finite(k as u32)),
        None if gcm.get(i, j) * gcm.get(j, i) >= 4 => Ok(CoxeterEntry::Infinite),
        None => Err(Error::Internal(format!("s_{i} s_{j} has no order up to {cutoff} although A[i][j] A[j][i] <= 3"))),
    }
}

/// The panel-crossing successors of `w` under `s`: `{ws}` going up,
/// `{ws, w}` going down.
pub fn bruhat_successors(gcm: &Gcm, w: &WeylElement, s: usize) -> Result<Vec<WeylElement>> {
    gcm.check_index(s)?;
    let ws = w.times_generator(gcm, s);
    if ws.length() > w.length() {
        Ok(vec![ws])
    } else {
        Ok(vec![ws, w.clone()])
    }
}
