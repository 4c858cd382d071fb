//! Horocyclic coordinates on the `(q+1)`-regular tree.
//!
//! A vertex is a pair `(h, x mod t^h)`: `h` is the Busemann value toward the
//! end `xi` (reached as `h -> -inf`) and `x` is a Laurent series read modulo
//! `{nu >= h}`. The line `L` is `{(h, 0)}` and `v_m = (-m, 0)`. A vertex has one
//! neighbour below it, `(h-1, x mod t^(h-1))`, and `q` above it,
//! `(h+1, x + c t^h)` for `c` in `F_q`.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Fe, Fq};
use crate::series::Series;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TreeVertex {
    height: i64,
    /// Reduced modulo `t^height`; precision is exactly `height`.
    coset: Series,
}

impl TreeVertex {
    /// The vertex `(h, x mod t^h)`; `x` must be known below `t^h`.
    pub fn new(height: i64, x: &Series) -> Result<Self> {
        if let Some(p) = x.precision() {
            if p < height {
                return Err(Error::Precision { needed: height, available: p });
            }
        }
        Ok(TreeVertex { height, coset: x.truncate(height) })
    }

    /// `v_m`, the vertex of `L` at height `-m`.
    pub fn line(m: i64) -> Self {
        TreeVertex { height: -m, coset: Series::big_o(-m) }
    }

    pub fn base() -> Self {
        Self::line(0)
    }

    pub fn height(&self) -> i64 {
        self.height
    }

    pub fn coset(&self) -> &Series {
        &self.coset
    }

    /// The canonical exact representative of the coset.
    pub fn representative(&self) -> Series {
        self.coset.stored_terms()
    }

    pub fn on_line(&self) -> bool {
        self.coset.is_zero()
    }

    /// The neighbour one step toward `xi`.
    pub fn down(&self) -> TreeVertex {
        TreeVertex { height: self.height - 1, coset: self.coset.truncate(self.height - 1) }
    }

    /// The neighbour `(h+1, x + c t^h)`.
    pub fn up(&self, c: Fe, f: &Fq) -> TreeVertex {
        let x = self.representative().add(&Series::monomial(c, self.height), f);
        TreeVertex { height: self.height + 1, coset: x.truncate(self.height + 1) }
    }

    pub fn neighbors(&self, f: &Fq) -> Vec<TreeVertex> {
        let mut out = Vec::with_capacity(f.order() as usize + 1);
        out.push(self.down());
        out.extend(f.elements().map(|c| self.up(c, f)));
        out
    }

    /// Height of the closest common ancestor toward `xi`.
    pub fn meet_height(&self, other: &TreeVertex, f: &Fq) -> i64 {
        let h = self.height.min(other.height);
        let diff = self.representative().sub(&other.representative(), f).truncate(h);
        diff.valuation().map_or(h, |v| v.min(h))
    }

    pub fn distance(&self, other: &TreeVertex, f: &Fq) -> u64 {
        let j = self.meet_height(other, f);
        ((self.height - j) + (other.height - j)) as u64
    }
}

impl fmt::Debug for TreeVertex {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.coset.terms().map(|(k, c)| format!("{c}t^{k}")).collect();
        write!(fm, "({}, {})", self.height, if terms.is_empty() { "0".into() } else { terms.join("+") })
    }
}

/// The vertices within `radius` of a center, in breadth-first order.
#[derive(Debug)]
pub struct TreeBall {
    field: Fq,
    center: TreeVertex,
    radius: u32,
    vertices: Vec<TreeVertex>,
    dist: Vec<u32>,
    index: HashMap<TreeVertex, usize>,
}

impl TreeBall {
    /// Ball around `v_0`.
    pub fn new(field: &Fq, radius: u32) -> Arc<Self> {
        Self::around(field, TreeVertex::base(), radius)
    }

    pub fn around(field: &Fq, center: TreeVertex, radius: u32) -> Arc<Self> {
        let mut vertices = vec![center.clone()];
        let mut dist = vec![0];
        let mut index = HashMap::from([(center.clone(), 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            if dist[i] == radius {
                continue;
            }
            for w in vertices[i].neighbors(field) {
                if !index.contains_key(&w) {
                    index.insert(w.clone(), vertices.len());
                    vertices.push(w);
                    dist.push(dist[i] + 1);
                    queue.push_back(vertices.len() - 1);
                }
            }
        }
        Arc::new(TreeBall { field: field.clone(), center, radius, vertices, dist, index })
    }

    pub fn field(&self) -> &Fq {
        &self.field
    }

    pub fn center(&self) -> &TreeVertex {
        &self.center
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[TreeVertex] {
        &self.vertices
    }

    pub fn distance_from_center(&self, i: usize) -> u32 {
        self.dist[i]
    }

    pub fn index_of(&self, v: &TreeVertex) -> Option<usize> {
        self.index.get(v).copied()
    }

    /// Number of vertices within distance `r <= radius`; they form a prefix.
    pub fn prefix_len(&self, r: u32) -> usize {
        self.dist.partition_point(|&d| d <= r)
    }

    /// Line vertices `v_m` inside the ball, for `m` from `-radius` to `radius`.
    pub fn line_vertices(&self) -> Vec<(i64, usize)> {
        let r = self.radius as i64;
        (-r..=r).filter_map(|m| self.index_of(&TreeVertex::line(m)).map(|i| (m, i))).collect()
    }
}

/// The restriction of a tree automorphism to a ball: image of every ball
/// vertex, in ball order. Images may lie outside the ball.
#[derive(Clone)]
pub struct BallMap {
    ball: Arc<TreeBall>,
    images: Vec<TreeVertex>,
}

impl fmt::Debug for BallMap {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fm.debug_struct("BallMap").field("radius", &self.ball.radius).field("images", &self.images.len()).finish()
    }
}

impl PartialEq for BallMap {
    fn eq(&self, other: &Self) -> bool {
        self.ball.radius == other.ball.radius && self.ball.center == other.ball.center && self.images == other.images
    }
}

impl BallMap {
    pub fn new(ball: Arc<TreeBall>, images: Vec<TreeVertex>) -> Result<Self> {
        if images.len() != ball.len() {
            return Err(Error::InvalidParameter(format!(
                "table has {} images for a ball of {} vertices",
                images.len(),
                ball.len()
            )));
        }
        Ok(BallMap { ball, images })
    }

    pub fn identity(ball: Arc<TreeBall>) -> Self {
        let images = ball.vertices.clone();
        BallMap { ball, images }
    }

    /// Tabulates `action` on every vertex of `ball`.
    pub fn tabulate(ball: Arc<TreeBall>, mut action: impl FnMut(&TreeVertex) -> Result<TreeVertex>) -> Result<Self> {
        let images = ball.vertices.iter().map(&mut action).collect::<Result<_>>()?;
        Ok(BallMap { ball, images })
    }

    pub fn ball(&self) -> &Arc<TreeBall> {
        &self.ball
    }

    pub fn images(&self) -> &[TreeVertex] {
        &self.images
    }

    pub fn image(&self, v: &TreeVertex) -> Result<&TreeVertex> {
        self.ball
            .index_of(v)
            .map(|i| &self.images[i])
            .ok_or_else(|| Error::NotInModel(format!("vertex {v:?} outside the tabulated ball")))
    }

    /// Post-composes with an exact action.
    pub fn then(&self, mut action: impl FnMut(&TreeVertex) -> Result<TreeVertex>) -> Result<Self> {
        let images = self.images.iter().map(&mut action).collect::<Result<_>>()?;
        Ok(BallMap { ball: self.ball.clone(), images })
    }

    /// The table as a permutation of ball indices, if the ball is preserved.
    pub fn as_permutation(&self) -> Option<Vec<u32>> {
        self.images.iter().map(|v| self.ball.index_of(v).map(|i| i as u32)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images == self.ball.vertices
    }

    /// Checks that adjacency inside the ball is preserved.
    pub fn preserves_adjacency(&self) -> bool {
        let f = &self.ball.field;
        self.ball.vertices.iter().enumerate().all(|(i, v)| {
            let down = v.down();
            match self.ball.index_of(&down) {
                Some(j) => self.images[i].distance(&self.images[j], f) == 1,
                None => true,
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regularity() {
        for q in [2, 3, 4] {
            let f = Fq::new(q).unwrap();
            let v = TreeVertex::new(2, &Series::monomial(1, -1)).unwrap();
            let nb = v.neighbors(&f);
            assert_eq!(nb.len(), q as usize + 1);
            assert_eq!(nb.iter().filter(|w| w.height() == 1).count(), 1);
            assert_eq!(nb.iter().filter(|w| w.height() == 3).count(), q as usize);
            for w in &nb {
                assert_eq!(v.distance(w, &f), 1);
            }
        }
    }

    #[test]
    fn ball_sizes() {
        // 1 + (q+1)(q^r - 1)/(q - 1)
        for (q, r, n) in [(2, 3, 22), (2, 4, 46), (3, 2, 17), (2, 8, 766)] {
            let f = Fq::new(q).unwrap();
            assert_eq!(TreeBall::new(&f, r).len(), n);
        }
    }

    #[test]
    fn distances_match_bfs_layers() {
        let f = Fq::new(3).unwrap();
        let ball = TreeBall::new(&f, 4);
        for (i, v) in ball.vertices().iter().enumerate() {
            assert_eq!(v.distance(&TreeVertex::base(), &f), ball.distance_from_center(i) as u64);
        }
        assert_eq!(ball.prefix_len(1), 5);
    }

    #[test]
    fn line_vertices_have_expected_heights() {
        let f = Fq::new(2).unwrap();
        let ball = TreeBall::new(&f, 3);
        let line = ball.line_vertices();
        assert_eq!(line.len(), 7);
        for (m, i) in line {
            assert_eq!(ball.vertices()[i].height(), -m);
            assert!(ball.vertices()[i].on_line());
        }
    }

    #[test]
    fn vertex_needs_enough_precision() {
        let x = Series::monomial(1, -1).truncate(2);
        assert!(TreeVertex::new(2, &x).is_ok());
        assert!(matches!(TreeVertex::new(3, &x), Err(Error::Precision { .. })));
    }
}
