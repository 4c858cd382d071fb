//! Finite permutation groups on ball vertices, enumerated by word length.

use std::collections::HashSet;

pub type Perm = Vec<u32>;

pub fn identity(n: usize) -> Perm {
    (0..n as u32).collect()
}

/// `a` after `b`.
pub fn compose(a: &[u32], b: &[u32]) -> Perm {
    b.iter().map(|&i| a[i as usize]).collect()
}

pub fn inverse(a: &[u32]) -> Perm {
    let mut inv = vec![0; a.len()];
    for (i, &j) in a.iter().enumerate() {
        inv[j as usize] = i as u32;
    }
    inv
}

pub fn is_identity(a: &[u32]) -> bool {
    a.iter().enumerate().all(|(i, &j)| i as u32 == j)
}

pub fn order(a: &[u32]) -> u64 {
    let mut x = a.to_vec();
    let mut k = 1;
    while !is_identity(&x) {
        x = compose(a, &x);
        k += 1;
    }
    k
}

/// The subgroup generated by `gens`, by breadth-first search over words.
#[derive(Clone, Debug)]
pub struct Closure {
    /// Distinct elements in order of discovery; `elements[0]` is the identity.
    pub elements: Vec<Perm>,
    pub set: HashSet<Perm>,
    /// Number of new elements at each word length.
    pub layer_sizes: Vec<usize>,
    /// `true` when some word length produced nothing new within the budget.
    pub saturated: bool,
}

impl Closure {
    pub fn generate(n: usize, gens: &[Perm], word_budget: usize) -> Self {
        let id = identity(n);
        let mut set = HashSet::from([id.clone()]);
        let mut elements = vec![id];
        let mut layer_sizes = vec![1];
        let mut frontier = 0..1;
        let mut saturated = false;
        let gens: Vec<&Perm> = gens.iter().filter(|g| !is_identity(g)).collect();
        for _ in 0..word_budget {
            let start = elements.len();
            for i in frontier.clone() {
                for g in &gens {
                    let h = compose(&elements[i], g);
                    if set.insert(h.clone()) {
                        elements.push(h);
                    }
                }
            }
            layer_sizes.push(elements.len() - start);
            if elements.len() == start {
                saturated = true;
                break;
            }
            frontier = start..elements.len();
        }
        Closure { elements, set, layer_sizes, saturated }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, p: &[u32]) -> bool {
        self.set.contains(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_group_s4() {
        let gens = vec![vec![1, 0, 2, 3], vec![1, 2, 3, 0]];
        let c = Closure::generate(4, &gens, 100);
        assert!(c.saturated);
        assert_eq!(c.len(), 24);
        for p in &c.elements {
            assert!(c.contains(&inverse(p)));
            assert!(24 % order(p) == 0);
        }
    }

    #[test]
    fn budget_limits_enumeration() {
        let gens = vec![(1..50).chain([0]).collect::<Vec<u32>>()];
        let c = Closure::generate(50, &gens, 10);
        assert!(!c.saturated);
        assert_eq!(c.len(), 11);
    }
}
