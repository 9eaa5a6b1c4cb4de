//! Tournament storage and the edge-level primitives the algorithms consume.
//!
//! Every unordered pair of distinct vertices carries one orientation unless it
//! was deleted, in which case it is treated as non-adjacent in both directions
//! by every consumer (degree tests, densities, backward counts).

use std::collections::HashMap;

use crate::bitset::{popcount_and, words_for, VertexSet};
use crate::error::{Error, Result};

/// Orientation of a pair as seen from the first argument of [`Tournament::direction`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `u -> v`
    Forward,
    /// `v -> u`
    Backward,
    Deleted,
}

/// Dense tournament with optional pair deletion.
///
/// Adjacency is kept as two bit matrices: row `v` of `out` has bit `u` set when
/// the edge `v -> u` is present, row `v` of `inn` when `u -> v` is present.
/// A pair is deleted exactly when neither bit is set.
#[derive(Clone, PartialEq, Eq)]
pub struct Tournament {
    n: usize,
    stride: usize,
    out: Vec<u64>,
    inn: Vec<u64>,
}

impl std::fmt::Debug for Tournament {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Tournament")
            .field("n", &self.n)
            .field("present_pairs", &self.present_pairs())
            .finish()
    }
}

impl Tournament {
    /// A digraph on `n` vertices with every pair deleted.
    pub(crate) fn empty(n: usize) -> Self {
        let stride = words_for(n);
        Self {
            n,
            stride,
            out: vec![0; n * stride],
            inn: vec![0; n * stride],
        }
    }

    /// Builds a tournament by asking `forward(u, v)` for every `u < v`;
    /// true orients the pair `u -> v`, false orients `v -> u`.
    pub fn from_fn(n: usize, mut forward: impl FnMut(usize, usize) -> bool) -> Self {
        let mut t = Self::empty(n);
        for u in 0..n {
            for v in (u + 1)..n {
                if forward(u, v) {
                    t.orient(u, v);
                } else {
                    t.orient(v, u);
                }
            }
        }
        t
    }

    /// Transitive tournament in which earlier vertices of `order` beat later ones.
    pub fn transitive(order: &[usize]) -> Self {
        let n = order.len();
        let mut rank = vec![usize::MAX; n];
        for (pos, &v) in order.iter().enumerate() {
            rank[v] = pos;
        }
        Self::from_fn(n, |u, v| rank[u] < rank[v])
    }

    /// Builds a digraph from an explicit list of directed edges; pairs that are
    /// not listed are deleted.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut t = Self::empty(n);
        for (u, v) in edges {
            t.check_pair(u, v)?;
            if t.is_present(u, v) {
                return Err(Error::Config(format!("pair ({u}, {v}) listed twice")));
            }
            t.orient(u, v);
        }
        Ok(t)
    }

    /// Sets the pair {u, v} to `u -> v`, overwriting any previous state.
    pub(crate) fn orient(&mut self, u: usize, v: usize) {
        self.clear_pair(u, v);
        set_bit(&mut self.out[u * self.stride..], v);
        set_bit(&mut self.inn[v * self.stride..], u);
    }

    fn clear_pair(&mut self, u: usize, v: usize) {
        let s = self.stride;
        clear_bit(&mut self.out[u * s..], v);
        clear_bit(&mut self.out[v * s..], u);
        clear_bit(&mut self.inn[u * s..], v);
        clear_bit(&mut self.inn[v * s..], u);
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    fn check_pair(&self, u: usize, v: usize) -> Result<()> {
        if u == v || u >= self.n || v >= self.n {
            return Err(Error::InvalidVertex { u, v, n: self.n });
        }
        Ok(())
    }

    pub fn direction(&self, u: usize, v: usize) -> Result<Direction> {
        self.check_pair(u, v)?;
        Ok(if self.beats(u, v) {
            Direction::Forward
        } else if self.beats(v, u) {
            Direction::Backward
        } else {
            Direction::Deleted
        })
    }

    /// True when the edge `u -> v` is present. No range checks beyond indexing.
    #[inline]
    pub fn beats(&self, u: usize, v: usize) -> bool {
        self.out[u * self.stride + v / 64] & (1 << (v % 64)) != 0
    }

    #[inline]
    pub fn is_present(&self, u: usize, v: usize) -> bool {
        self.beats(u, v) || self.beats(v, u)
    }

    #[inline]
    pub(crate) fn out_row(&self, v: usize) -> &[u64] {
        &self.out[v * self.stride..(v + 1) * self.stride]
    }

    #[inline]
    pub(crate) fn in_row(&self, v: usize) -> &[u64] {
        &self.inn[v * self.stride..(v + 1) * self.stride]
    }

    pub fn present_pairs(&self) -> usize {
        self.out.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Deletes the listed unordered pairs in place and returns how many were
    /// present beforehand. Already-deleted pairs are skipped.
    pub fn delete_pairs_in_place(&mut self, pairs: &[(usize, usize)]) -> Result<usize> {
        for &(u, v) in pairs {
            self.check_pair(u, v)?;
        }
        let mut removed = 0;
        for &(u, v) in pairs {
            if self.is_present(u, v) {
                self.clear_pair(u, v);
                removed += 1;
            } else {
                log::debug!("pair ({u}, {v}) already deleted");
            }
        }
        Ok(removed)
    }

    /// Copy of this tournament with the listed pairs deleted.
    pub fn delete_pairs(&self, pairs: &[(usize, usize)]) -> Result<Tournament> {
        let mut t = self.clone();
        t.delete_pairs_in_place(pairs)?;
        Ok(t)
    }

    pub fn out_neighbors_in(&self, v: usize, within: &VertexSet) -> VertexSet {
        masked_row(self.out_row(v), within)
    }

    pub fn in_neighbors_in(&self, v: usize, within: &VertexSet) -> VertexSet {
        masked_row(self.in_row(v), within)
    }

    #[inline]
    pub fn out_degree_in(&self, v: usize, within: &VertexSet) -> usize {
        popcount_and(self.out_row(v), within.words())
    }

    #[inline]
    pub fn in_degree_in(&self, v: usize, within: &VertexSet) -> usize {
        popcount_and(self.in_row(v), within.words())
    }

    /// Number of present edges `a -> b` with `b` placed before `a` in `order`.
    ///
    /// With `cross = Some((z, p))` only edges with one endpoint in each set are
    /// counted; both sets must then be covered by the ordering.
    pub fn backward_edges(
        &self,
        order: &Ordering,
        cross: Option<(&VertexSet, &VertexSet)>,
    ) -> Result<usize> {
        let mut total = 0;
        match cross {
            None => {
                let mut earlier = VertexSet::empty(self.n);
                for &a in order.as_slice() {
                    total += popcount_and(self.out_row(a), earlier.words());
                    earlier.insert(a);
                }
            }
            Some((z, p)) => {
                let covered = order.to_set(self.n);
                if let Some(v) = z.iter().chain(p.iter()).find(|&v| !covered.contains(v)) {
                    return Err(Error::NotInOrdering(v));
                }
                let mut earlier_z = VertexSet::empty(self.n);
                let mut earlier_p = VertexSet::empty(self.n);
                for &a in order.as_slice() {
                    if z.contains(a) {
                        total += popcount_and(self.out_row(a), earlier_p.words());
                        earlier_z.insert(a);
                    }
                    if p.contains(a) {
                        total += popcount_and(self.out_row(a), earlier_z.words());
                        earlier_p.insert(a);
                    }
                }
            }
        }
        Ok(total)
    }

    /// Directed density from `x` to `y` over present pairs.
    pub fn directed_density(&self, x: &VertexSet, y: &VertexSet) -> Result<Density> {
        if !x.is_disjoint(y) {
            return Err(Error::OverlappingSets);
        }
        let mut forward = 0;
        let mut backward = 0;
        for v in x {
            forward += self.out_degree_in(v, y);
            backward += self.in_degree_in(v, y);
        }
        Ok(Density {
            forward,
            pairs: forward + backward,
        })
    }

    /// Induced subtournament on `vertices`, relabelled `0..vertices.len()` in
    /// the given order.
    pub fn induced(&self, vertices: &[usize]) -> Tournament {
        let m = vertices.len();
        let mut t = Tournament::empty(m);
        for i in 0..m {
            for j in (i + 1)..m {
                let (a, b) = (vertices[i], vertices[j]);
                if self.beats(a, b) {
                    t.orient(i, j);
                } else if self.beats(b, a) {
                    t.orient(j, i);
                }
            }
        }
        t
    }

    /// All present edges `(u, v)` meaning `u -> v`, sorted lexicographically.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::with_capacity(self.present_pairs());
        for u in 0..self.n {
            let row = VertexSet::from_words(self.n, self.out_row(u).to_vec());
            edges.extend(row.iter().map(|v| (u, v)));
        }
        edges
    }

    /// Size of the largest vertex subset inducing a transitive subtournament.
    /// Exhaustive; refuses inputs with more than 24 vertices.
    pub fn max_transitive_subset(&self) -> Result<usize> {
        const LIMIT: usize = 24;
        if self.n > LIMIT {
            return Err(Error::SizeLimit {
                what: "max_transitive_subset vertex count",
                size: self.n as u64,
                limit: LIMIT as u64,
            });
        }
        let out: Vec<u32> = (0..self.n)
            .map(|v| self.out_row(v).first().copied().unwrap_or(0) as u32)
            .collect();
        let all = if self.n == 0 { 0 } else { (1u32 << self.n) - 1 };
        let mut memo = HashMap::new();
        Ok(longest_chain(all, &out, &mut memo) as usize)
    }
}

/// A transitive set has a unique source; the rest of it lies in the source's
/// out-neighbourhood and is again transitive.
fn longest_chain(candidates: u32, out: &[u32], memo: &mut HashMap<u32, u32>) -> u32 {
    if candidates == 0 {
        return 0;
    }
    if let Some(&known) = memo.get(&candidates) {
        return known;
    }
    let mut best = 0;
    let mut rest = candidates;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let next = candidates & out[v];
        if next.count_ones() < best {
            continue;
        }
        best = best.max(1 + longest_chain(next, out, memo));
    }
    memo.insert(candidates, best);
    best
}

fn masked_row(row: &[u64], within: &VertexSet) -> VertexSet {
    let words = row.iter().zip(within.words()).map(|(a, b)| a & b).collect();
    VertexSet::from_words(within.universe(), words)
}

#[inline]
fn set_bit(row: &mut [u64], i: usize) {
    row[i / 64] |= 1 << (i % 64);
}

#[inline]
fn clear_bit(row: &mut [u64], i: usize) {
    row[i / 64] &= !(1 << (i % 64));
}

/// Edge counts from one set to another.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Density {
    pub forward: usize,
    pub pairs: usize,
}

impl Density {
    /// `forward / pairs`, or 0 when no present pair remains.
    pub fn fraction(&self) -> f64 {
        if self.pairs == 0 {
            0.0
        } else {
            self.forward as f64 / self.pairs as f64
        }
    }

    pub fn is_empty(&self) -> bool {
        self.pairs == 0
    }
}

/// A permutation of a vertex subset; position 0 is the highest rank.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ordering(Vec<usize>);

impl Ordering {
    pub fn new(sequence: Vec<usize>) -> Result<Self> {
        let mut seen = std::collections::HashSet::with_capacity(sequence.len());
        for &v in &sequence {
            if !seen.insert(v) {
                return Err(Error::Config(format!("vertex {v} repeated in ordering")));
            }
        }
        Ok(Self(sequence))
    }

    pub(crate) fn from_vec_unchecked(sequence: Vec<usize>) -> Self {
        Self(sequence)
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    pub fn to_set(&self, universe: usize) -> VertexSet {
        VertexSet::from_iter(universe, self.0.iter().copied())
    }

    /// Position of every vertex of the ordering, `usize::MAX` elsewhere.
    pub fn positions(&self, universe: usize) -> Vec<usize> {
        let mut pos = vec![usize::MAX; universe];
        for (i, &v) in self.0.iter().enumerate() {
            pos[v] = i;
        }
        pos
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_cycle() -> Tournament {
        Tournament::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    #[test]
    fn direction_on_three_cycle() {
        let t = three_cycle();
        assert_eq!(t.direction(0, 1).unwrap(), Direction::Forward);
        assert_eq!(t.direction(0, 2).unwrap(), Direction::Backward);
        assert!(matches!(t.direction(2, 2), Err(Error::InvalidVertex { .. })));
        assert!(matches!(t.direction(0, 3), Err(Error::InvalidVertex { .. })));
    }

    #[test]
    fn deletion_semantics() {
        let t = three_cycle();
        let d = t.delete_pairs(&[(0, 1)]).unwrap();
        assert_eq!(d.direction(0, 1).unwrap(), Direction::Deleted);
        assert_eq!(d.direction(1, 0).unwrap(), Direction::Deleted);
        assert_eq!(d.present_pairs(), 2);
        assert_eq!(t.delete_pairs(&[]).unwrap(), t);
        // idempotent on an already deleted pair
        let mut again = d.clone();
        assert_eq!(again.delete_pairs_in_place(&[(1, 0)]).unwrap(), 0);
        assert_eq!(again, d);
    }

    #[test]
    fn backward_edges_small_cases() {
        let t = three_cycle();
        assert_eq!(t.backward_edges(&Ordering::identity(3), None).unwrap(), 1);
        let tr = Tournament::transitive(&[3, 1, 0, 2]);
        let order = Ordering::new(vec![3, 1, 0, 2]).unwrap();
        assert_eq!(tr.backward_edges(&order, None).unwrap(), 0);
        assert_eq!(tr.backward_edges(&order.reversed(), None).unwrap(), 6);
    }

    #[test]
    fn backward_edges_cross_requires_coverage() {
        let t = three_cycle();
        let z = VertexSet::from_iter(3, [0]);
        let p = VertexSet::from_iter(3, [2]);
        let partial = Ordering::new(vec![0, 1]).unwrap();
        assert_eq!(
            t.backward_edges(&partial, Some((&z, &p))),
            Err(Error::NotInOrdering(2))
        );
        // 2 -> 0 with 0 first is backward
        let full = Ordering::identity(3);
        assert_eq!(t.backward_edges(&full, Some((&z, &p))).unwrap(), 1);
    }

    #[test]
    fn density_examples() {
        let t = Tournament::from_edges(3, [(0, 1), (2, 0), (1, 2)]).unwrap();
        let x = VertexSet::from_iter(3, [0]);
        let y = VertexSet::from_iter(3, [1, 2]);
        assert_eq!(t.directed_density(&x, &y).unwrap().fraction(), 0.5);
        let tr = Tournament::transitive(&[0, 1, 2]);
        assert_eq!(tr.directed_density(&x, &y).unwrap().fraction(), 1.0);
        assert_eq!(tr.directed_density(&y, &x).unwrap().fraction(), 0.0);
        assert_eq!(
            tr.directed_density(&x, &x),
            Err(Error::OverlappingSets)
        );
        let gone = tr.delete_pairs(&[(0, 1), (0, 2)]).unwrap();
        let d = gone.directed_density(&x, &y).unwrap();
        assert!(d.is_empty());
        assert_eq!(d.fraction(), 0.0);
    }

    #[test]
    fn neighbours_respect_deletion() {
        let t = Tournament::transitive(&[0, 1, 2, 3]);
        let w = VertexSet::from_iter(4, [1, 2, 3]);
        assert_eq!(t.out_neighbors_in(0, &w).to_vec(), vec![1, 2, 3]);
        assert!(t.in_neighbors_in(0, &w).is_empty());
        let d = t.delete_pairs(&[(0, 2)]).unwrap();
        assert_eq!(d.out_neighbors_in(0, &w).to_vec(), vec![1, 3]);
    }

    #[test]
    fn max_transitive_small() {
        assert_eq!(Tournament::transitive(&[0, 1, 2, 3, 4]).max_transitive_subset().unwrap(), 5);
        assert_eq!(three_cycle().max_transitive_subset().unwrap(), 2);
        let big = Tournament::transitive(&(0..25).collect::<Vec<_>>());
        assert!(matches!(big.max_transitive_subset(), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn max_transitive_drops_when_witness_gets_a_cycle() {
        // transitive on 5, then reverse 0->4 to create cycles through 0 and 4
        let t = Tournament::transitive(&[0, 1, 2, 3, 4]);
        let mut edges = t.edges();
        for e in edges.iter_mut() {
            if *e == (0, 4) {
                *e = (4, 0);
            }
        }
        let flipped = Tournament::from_edges(5, edges).unwrap();
        assert_eq!(flipped.max_transitive_subset().unwrap(), 4);
    }

    #[test]
    fn ordering_rejects_repeats() {
        assert!(Ordering::new(vec![0, 1, 0]).is_err());
        assert_eq!(Ordering::new(vec![2, 0]).unwrap().positions(3), vec![1, usize::MAX, 0]);
    }
}
