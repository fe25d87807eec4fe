//! Finite posets represented by downset bitsets, with transitive reduction.
//!
//! Element ids are assumed to be a linear extension: `a <= b` implies
//! `id(a) <= id(b)`. Builders in this crate number elements minimal-first.

/// A finite partial order on `0..len`, ids compatible with the order.
#[derive(Debug, Clone)]
pub struct Poset {
    /// `down[p]` holds the bitset of all `q <= p` (including `p`).
    down: Vec<Vec<u64>>,
    len: usize,
}

impl Poset {
    /// Builds from a covers-or-more relation: `below[p]` lists elements known
    /// to be `< p` directly (reachability closure is taken here). Every entry
    /// of `below[p]` must be `< p` as an id.
    pub fn from_predecessors(len: usize, below: &[Vec<usize>]) -> Self {
        let words = len.div_ceil(64);
        let mut down = vec![vec![0u64; words]; len];
        for p in 0..len {
            down[p][p / 64] |= 1 << (p % 64);
            for &q in &below[p] {
                debug_assert!(q < p, "ids must form a linear extension");
                let (a, b) = down.split_at_mut(p);
                for (w, dq) in b[0].iter_mut().zip(&a[q]) {
                    *w |= dq;
                }
            }
        }
        Poset { down, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn le(&self, a: usize, b: usize) -> bool {
        self.down[b][a / 64] & (1 << (a % 64)) != 0
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.le(a, b)
    }

    /// Elements of the downset of `p`, ascending.
    pub fn downset(&self, p: usize) -> Vec<usize> {
        (0..self.len).filter(|&q| self.le(q, p)).collect()
    }

    /// The unique minimum of `set`, if one element is below all others.
    pub fn unique_minimum(&self, set: &[usize]) -> Option<usize> {
        let mut m = *set.first()?;
        for &q in &set[1..] {
            if self.le(q, m) {
                m = q;
            }
        }
        set.iter().all(|&q| self.le(m, q)).then_some(m)
    }

    /// Minimal elements of `set` (used for diagnostics when no unique
    /// minimum exists).
    pub fn minimal_elements(&self, set: &[usize]) -> Vec<usize> {
        set.iter()
            .copied()
            .filter(|&m| set.iter().all(|&q| q == m || !self.lt(q, m)))
            .collect()
    }

    /// Covering pairs `(upper, lower)` of the order restricted to `keep`,
    /// i.e. the transitive reduction (Hasse edges).
    pub fn hasse_edges_restricted(&self, keep: &[usize]) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for &a in keep {
            for &b in keep {
                if !self.lt(b, a) {
                    continue;
                }
                let covered = keep
                    .iter()
                    .any(|&c| c != a && c != b && self.lt(b, c) && self.lt(c, a));
                if !covered {
                    edges.push((a, b));
                }
            }
        }
        edges.sort_unstable();
        edges
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diamond_order() {
        // 0 < 1 < 3, 0 < 2 < 3
        let p = Poset::from_predecessors(4, &[vec![], vec![0], vec![0], vec![1, 2]]);
        assert!(p.le(0, 3));
        assert!(p.lt(0, 1));
        assert!(!p.le(1, 2));
        assert_eq!(p.downset(3), vec![0, 1, 2, 3]);
        assert_eq!(p.unique_minimum(&[1, 3]), Some(1));
        assert_eq!(p.unique_minimum(&[1, 2]), None);
        assert_eq!(
            p.hasse_edges_restricted(&[0, 1, 2, 3]),
            vec![(1, 0), (2, 0), (3, 1), (3, 2)]
        );
        // transitive edge suppressed
        assert_eq!(p.hasse_edges_restricted(&[0, 1, 3]), vec![(1, 0), (3, 1)]);
    }
}
