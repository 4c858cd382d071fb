//! Enumeration of Weyl group balls without hashing.
//!
//! ShortLex normal forms are suffix-closed, so every normal word of length
//! `k + 1` is `i . u` for a normal word `u` of length `k`. The word `i . u` is
//! normal exactly when `i` is an ascent of `u` on the left and `i` is the
//! smallest left descent of `s_i u`. Left descents only need `w^{-1}`, so the
//! search carries inverse matrices alone.

use crate::error::{Error, Result};
use crate::rootdata::Gcm;

use super::{is_negative, normal_form, IntMatrix, WeylElement};

pub const DEFAULT_ELEMENT_LIMIT: usize = 10_000_000;

/// Depth-first walk of the normal-form tree up to length `max_len`,
/// calling `visit(word)` on every element. Returns the element count.
fn walk(gcm: &Gcm, max_len: usize, limit: usize, visit: &mut dyn FnMut(&[usize])) -> Result<usize> {
    struct State<'a> {
        gcm: &'a Gcm,
        max_len: usize,
        limit: usize,
        count: usize,
        word: Vec<usize>,
    }

    fn left_descent(inv: &IntMatrix, i: usize) -> bool {
        is_negative(&inv.column(i))
    }

    fn go(st: &mut State<'_>, inv: &IntMatrix, visit: &mut dyn FnMut(&[usize])) -> Result<()> {
        st.count += 1;
        if st.count > st.limit {
            return Err(Error::ResourceLimit { limit: st.limit, reached: st.word.len() });
        }
        // `word` is stored reversed: the last entry is the first letter
        let w: Vec<usize> = st.word.iter().rev().copied().collect();
        visit(&w);
        if st.word.len() == st.max_len {
            return Ok(());
        }
        let n = st.gcm.rank();
        for i in 0..n {
            if left_descent(inv, i) {
                continue;
            }
            let mut child = inv.clone();
            child.right_reflect(st.gcm, i);
            if (0..i).any(|j| left_descent(&child, j)) {
                continue;
            }
            st.word.push(i);
            go(st, &child, visit)?;
            st.word.pop();
        }
        Ok(())
    }

    let mut st = State { gcm, max_len, limit, count: 0, word: Vec::new() };
    go(&mut st, &IntMatrix::identity(gcm.rank()), visit)?;
    Ok(st.count)
}

/// One representative per element of length at most `max_len`, grouped by
/// length and ShortLex-sorted within each length.
pub fn enumerate_ball(gcm: &Gcm, max_len: usize, limit: usize) -> Result<Vec<Vec<WeylElement>>> {
    let mut words: Vec<Vec<usize>> = Vec::new();
    walk(gcm, max_len, limit, &mut |w| words.push(w.to_vec()))?;
    let mut layers: Vec<Vec<Vec<usize>>> = vec![Vec::new(); max_len + 1];
    for w in words {
        layers[w.len()].push(w);
    }
    layers
        .into_iter()
        .map(|mut layer| {
            layer.sort();
            layer
                .iter()
                .map(|w| {
                    let e = normal_form(gcm, w)?;
                    if e.word() != w.as_slice() {
                        return Err(Error::Internal(format!("generated word {w:?} is not in normal form")));
                    }
                    Ok(e)
                })
                .collect()
        })
        .collect()
}

/// `a_k` = number of elements of length `k`, for `k <= max_len`.
pub fn growth_coefficients(gcm: &Gcm, max_len: usize, limit: usize) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; max_len + 1];
    walk(gcm, max_len, limit, &mut |w| counts[w.len()] += 1)?;
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    /// Independent oracle: breadth-first search on matrices with a hash set.
    fn bfs_counts(gcm: &Gcm, max_len: usize) -> Vec<u64> {
        let id = WeylElement::identity(gcm);
        let mut seen: HashSet<IntMatrix> = HashSet::from([id.matrix().clone()]);
        let mut layer = vec![id];
        let mut counts = vec![1];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &layer {
                for i in 0..gcm.rank() {
                    let v = w.times_generator(gcm, i);
                    if seen.insert(v.matrix().clone()) {
                        next.push(v);
                    }
                }
            }
            counts.push(next.len() as u64);
            layer = next;
        }
        counts
    }

    #[test]
    fn matches_bfs_oracle() {
        let gcms = [
            Gcm::right_angled(5, -2).unwrap(),
            Gcm::right_angled(6, -2).unwrap(),
            Gcm::new(vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]]).unwrap(),
            Gcm::new(vec![vec![2, -1, -1], vec![-1, 2, -1], vec![-1, -1, 2]]).unwrap(),
        ];
        for g in &gcms {
            assert_eq!(growth_coefficients(g, 6, DEFAULT_ELEMENT_LIMIT).unwrap(), bfs_counts(g, 6));
        }
    }

    #[test]
    fn finite_group_a3_has_24_elements() {
        let a3 = Gcm::new(vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]]).unwrap();
        let c = growth_coefficients(&a3, 10, DEFAULT_ELEMENT_LIMIT).unwrap();
        assert_eq!(c, vec![1, 3, 5, 6, 5, 3, 1, 0, 0, 0, 0]);
    }

    #[test]
    fn ball_layers() {
        let g = Gcm::right_angled(5, -2).unwrap();
        let ball = enumerate_ball(&g, 2, DEFAULT_ELEMENT_LIMIT).unwrap();
        assert_eq!(ball[0].len(), 1);
        assert!(ball[0][0].is_identity());
        assert_eq!(ball[1].len(), 5);
        assert_eq!(ball[2].len(), 15);
        assert!(ball[2].windows(2).all(|p| p[0].word() < p[1].word()));
    }

    #[test]
    fn limit_is_enforced() {
        let g = Gcm::right_angled(5, -2).unwrap();
        assert!(matches!(growth_coefficients(&g, 8, 100), Err(Error::ResourceLimit { limit: 100, .. })));
    }
}
