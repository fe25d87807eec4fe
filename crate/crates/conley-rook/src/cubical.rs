//! Abstract cubical cell complexes.
//!
//! A complex is generated by per-direction extents `K(n)`: the vertex set in
//! direction `n` is `{0, …, K(n)+1}` and a cell is a pair `[v, w]` of a
//! position vector `v` and a 0/1 extent mask `w` with both `v` and `v + w`
//! inside the vertex grid. Every query (faces, incidence, meet/join, top
//! stars, boundary) is computed from `(v, w)` arithmetic; the complex itself
//! only stores the extents plus a cell index for deterministic enumeration.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CubicalError {
    #[error("extents must be non-empty with every K(n) >= 1")]
    BadExtents,
    #[error("cell {0} does not belong to the complex")]
    NotACell(Cell),
    #[error("cells {0} and {1} have mismatched dimension counts")]
    DimensionMismatch(Cell, Cell),
    #[error("{0} is not a face of {1}")]
    NotAFace(Cell, Cell),
    #[error("{0} is not a top cell")]
    NotATopCell(Cell),
    #[error("malformed cell literal {literal:?}: {reason}")]
    BadCellLiteral { literal: String, reason: String },
}

/// Per-direction threshold counts generating the complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extents {
    k: Vec<u32>,
}

impl Extents {
    pub fn new(k: Vec<u32>) -> Result<Self, CubicalError> {
        if k.is_empty() || k.contains(&0) {
            return Err(CubicalError::BadExtents);
        }
        Ok(Extents { k })
    }

    pub fn dims(&self) -> usize {
        self.k.len()
    }

    pub fn k(&self, n: usize) -> u32 {
        self.k[n]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.k
    }
}

/// One cube of the complex, named by position vector and extent mask.
///
/// Ordering is lexicographic on `(v, w)`; all downstream enumeration and
/// tie-breaking inherits it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    v: Vec<i32>,
    w: Vec<i32>,
}

impl Cell {
    pub fn new(v: Vec<i32>, w: Vec<i32>) -> Self {
        debug_assert_eq!(v.len(), w.len());
        debug_assert!(w.iter().all(|&b| b == 0 || b == 1));
        Cell { v, w }
    }

    pub fn dims(&self) -> usize {
        self.v.len()
    }

    pub fn v(&self) -> &[i32] {
        &self.v
    }

    pub fn w(&self) -> &[i32] {
        &self.w
    }

    pub fn dim(&self) -> usize {
        self.w.iter().map(|&b| b as usize).sum()
    }

    /// Essential directions: `{n | w_n = 1}` (0-indexed).
    pub fn essential(&self) -> Vec<usize> {
        (0..self.dims()).filter(|&n| self.w[n] == 1).collect()
    }

    /// Inessential directions: `{n | w_n = 0}` (0-indexed).
    pub fn inessential(&self) -> Vec<usize> {
        (0..self.dims()).filter(|&n| self.w[n] == 0).collect()
    }

    pub fn is_top(&self) -> bool {
        self.w.iter().all(|&b| b == 1)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: &[i32]| {
            xs.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "{};{}", join(&self.v), join(&self.w))
    }
}

impl FromStr for Cell {
    type Err = CubicalError;

    /// Parses the text form `v1,…,vN;w1,…,wN`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |reason: &str| CubicalError::BadCellLiteral {
            literal: s.to_string(),
            reason: reason.to_string(),
        };
        let (vs, ws) = s.split_once(';').ok_or_else(|| bad("missing ';'"))?;
        let parse = |part: &str| -> Result<Vec<i32>, CubicalError> {
            part.split(',')
                .map(|t| t.trim().parse::<i32>().map_err(|e| bad(&e.to_string())))
                .collect()
        };
        let v = parse(vs)?;
        let w = parse(ws)?;
        if v.len() != w.len() || v.is_empty() {
            return Err(bad("coordinate counts differ or are empty"));
        }
        if w.iter().any(|&b| b != 0 && b != 1) {
            return Err(bad("extent mask entries must be 0 or 1"));
        }
        Ok(Cell::new(v, w))
    }
}

/// The cubical complex over a grid of extents, with a fixed total order on
/// cells (lexicographic on `(v, w)`).
#[derive(Debug, Clone)]
pub struct Complex {
    extents: Extents,
    cells: Vec<Cell>,
    index: HashMap<Cell, usize>,
    tops: Vec<usize>,
}

impl Complex {
    pub fn new(extents: Extents) -> Self {
        let n = extents.dims();
        let mut cells = Vec::new();
        let mut v = vec![0i32; n];
        loop {
            let mut w = vec![0i32; n];
            loop {
                if (0..n).all(|i| v[i] + w[i] <= extents.k(i) as i32 + 1) {
                    cells.push(Cell::new(v.clone(), w.clone()));
                }
                // advance w lexicographically (last coordinate fastest)
                let mut i = n;
                loop {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                    if w[i] == 0 {
                        w[i] = 1;
                        break;
                    }
                    w[i] = 0;
                }
                if w.iter().all(|&b| b == 0) {
                    break;
                }
            }
            let mut i = n;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if v[i] < extents.k(i) as i32 + 1 {
                    v[i] += 1;
                    break;
                }
                v[i] = 0;
            }
            if v.iter().all(|&x| x == 0) {
                break;
            }
        }
        cells.sort();
        let index: HashMap<Cell, usize> = cells
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, c)| (c, i))
            .collect();
        let tops = cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_top())
            .map(|(i, _)| i)
            .collect();
        Complex {
            extents,
            cells,
            index,
            tops,
        }
    }

    pub fn extents(&self) -> &Extents {
        &self.extents
    }

    pub fn dims(&self) -> usize {
        self.extents.dims()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// All cells in the fixed total order.
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, idx: usize) -> &Cell {
        &self.cells[idx]
    }

    pub fn index_of(&self, cell: &Cell) -> Option<usize> {
        self.index.get(cell).copied()
    }

    pub fn contains(&self, cell: &Cell) -> bool {
        self.index.contains_key(cell)
    }

    /// Indices of top-dimensional cells, in cell order.
    pub fn top_cells(&self) -> &[usize] {
        &self.tops
    }

    fn check(&self, c: &Cell) -> Result<(), CubicalError> {
        if c.dims() != self.dims() {
            return Err(CubicalError::DimensionMismatch(
                c.clone(),
                self.cells[0].clone(),
            ));
        }
        if !self.contains(c) {
            return Err(CubicalError::NotACell(c.clone()));
        }
        Ok(())
    }

    /// Face relation: `a ⪯ b` iff there is `q ∈ {0,1}^N` with
    /// `a.v = b.v + q` and `a.w + q ≤ b.w`.
    pub fn is_face(&self, a: &Cell, b: &Cell) -> Result<bool, CubicalError> {
        self.check(a)?;
        self.check(b)?;
        Ok(face_unchecked(a, b))
    }

    /// Relative position vector of a face pair, componentwise
    /// `(-1)^(a.v_n - b.v_n) (a.w_n - b.w_n)`.
    pub fn relative_position(&self, a: &Cell, b: &Cell) -> Result<Vec<i32>, CubicalError> {
        self.check(a)?;
        self.check(b)?;
        if !face_unchecked(a, b) {
            return Err(CubicalError::NotAFace(a.clone(), b.clone()));
        }
        Ok((0..a.dims())
            .map(|n| {
                let sign = if (a.v[n] - b.v[n]) % 2 == 0 { 1 } else { -1 };
                sign * (a.w[n] - b.w[n])
            })
            .collect())
    }

    /// Extension directions of `a` in `b`: inessential in `a`, essential in `b`.
    pub fn extensions(&self, a: &Cell, b: &Cell) -> Vec<usize> {
        (0..a.dims())
            .filter(|&n| a.w[n] == 0 && b.w[n] == 1)
            .collect()
    }

    /// Incidence number `κ(b, a)` for `dim b = dim a + 1`; zero otherwise.
    ///
    /// With `b = [v, w]`, `w_i = 1` and `s` the count of essential directions
    /// before `i`: `κ(b, [v, w - e_i]) = -(-1)^s` and
    /// `κ(b, [v + e_i, w - e_i]) = (-1)^s`. (The alternating factor makes the
    /// boundary square to zero over the integers; reduced mod 2 it agrees
    /// with the constant-sign table.)
    pub fn incidence(&self, b: &Cell, a: &Cell) -> i32 {
        if a.dims() != b.dims() {
            return 0;
        }
        let mut seen = None;
        for i in 0..a.dims() {
            if a.w[i] == b.w[i] {
                if a.v[i] != b.v[i] {
                    return 0;
                }
                continue;
            }
            if b.w[i] == 1 && a.w[i] == 0 && seen.is_none() {
                seen = Some(i);
            } else {
                return 0;
            }
        }
        let Some(i) = seen else { return 0 };
        let alt = if (0..i).filter(|&k| b.w[k] == 1).count() % 2 == 0 {
            1
        } else {
            -1
        };
        if a.v[i] == b.v[i] {
            -alt
        } else if a.v[i] == b.v[i] + 1 {
            alt
        } else {
            0
        }
    }

    /// Codimension-one faces of `c`, with incidence signs, in cell order.
    pub fn facets(&self, c: &Cell) -> Vec<(Cell, i32)> {
        let mut out = Vec::new();
        let mut alt = 1;
        for i in 0..c.dims() {
            if c.w[i] != 1 {
                continue;
            }
            let mut w = c.w.clone();
            w[i] = 0;
            out.push((Cell::new(c.v.clone(), w.clone()), -alt));
            let mut v = c.v.clone();
            v[i] += 1;
            out.push((Cell::new(v, w), alt));
            alt = -alt;
        }
        out.sort();
        out
    }

    /// Codimension-one cofaces of `c` inside the complex, in cell order.
    pub fn cofacets(&self, c: &Cell) -> Vec<Cell> {
        let mut out = Vec::new();
        for i in 0..c.dims() {
            if c.w[i] != 0 {
                continue;
            }
            let mut w = c.w.clone();
            w[i] = 1;
            let up = Cell::new(c.v.clone(), w.clone());
            if self.contains(&up) {
                out.push(up);
            }
            let mut v = c.v.clone();
            v[i] -= 1;
            let left = Cell::new(v, w);
            if self.contains(&left) {
                out.push(left);
            }
        }
        out.sort();
        out
    }

    /// Join: minimal common coface, when one exists.
    ///
    /// The closed form `[v∧v', (v+w)∨(v'+w') - v∧v']` is declared to exist
    /// exactly when it names a cell that both arguments are faces of.
    pub fn join(&self, a: &Cell, b: &Cell) -> Result<Option<Cell>, CubicalError> {
        self.check(a)?;
        self.check(b)?;
        let n = a.dims();
        let v: Vec<i32> = (0..n).map(|i| a.v[i].min(b.v[i])).collect();
        let w: Vec<i32> = (0..n)
            .map(|i| (a.v[i] + a.w[i]).max(b.v[i] + b.w[i]) - v[i])
            .collect();
        if w.iter().any(|&x| !(0..=1).contains(&x)) {
            return Ok(None);
        }
        let cand = Cell::new(v, w);
        if self.contains(&cand) && face_unchecked(a, &cand) && face_unchecked(b, &cand) {
            Ok(Some(cand))
        } else {
            Ok(None)
        }
    }

    /// Meet: maximal common face, when one exists, by the dual closed form.
    pub fn meet(&self, a: &Cell, b: &Cell) -> Result<Option<Cell>, CubicalError> {
        self.check(a)?;
        self.check(b)?;
        let n = a.dims();
        let v: Vec<i32> = (0..n).map(|i| a.v[i].max(b.v[i])).collect();
        let w: Vec<i32> = (0..n)
            .map(|i| (a.v[i] + a.w[i]).min(b.v[i] + b.w[i]) - v[i])
            .collect();
        if w.iter().any(|&x| !(0..=1).contains(&x)) {
            return Ok(None);
        }
        let cand = Cell::new(v, w);
        if self.contains(&cand) && face_unchecked(&cand, a) && face_unchecked(&cand, b) {
            Ok(Some(cand))
        } else {
            Ok(None)
        }
    }

    /// Top cells having `c` as a face, in cell order.
    pub fn top_star(&self, c: &Cell) -> Vec<Cell> {
        let n = c.dims();
        let mut out = Vec::new();
        let free: Vec<usize> = c.inessential();
        let ones = vec![1i32; n];
        for mask in 0..(1usize << free.len()) {
            let mut v = c.v.clone();
            for (bit, &dir) in free.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    v[dir] -= 1;
                }
            }
            let cand = Cell::new(v, ones.clone());
            if self.contains(&cand) {
                out.push(cand);
            }
        }
        out.sort();
        out
    }

    /// Whether `c` lies in the boundary of the complex: some direction `n`
    /// has `w_n = 0` and `v_n ∈ {0, K(n)+1}`.
    pub fn is_boundary(&self, c: &Cell) -> bool {
        (0..c.dims())
            .any(|n| c.w[n] == 0 && (c.v[n] == 0 || c.v[n] == self.extents.k(n) as i32 + 1))
    }

    /// All boundary cells, in cell order.
    pub fn boundary_cells(&self) -> Vec<Cell> {
        self.cells
            .iter()
            .filter(|c| self.is_boundary(c))
            .cloned()
            .collect()
    }

    /// Walls `(ξ, μ)`: codimension-one face paired with a top coface.
    /// Enumerated per top cell, left wall before right wall per direction.
    pub fn walls(&self) -> Vec<(Cell, Cell)> {
        let mut out = Vec::new();
        for &t in &self.tops {
            let mu = &self.cells[t];
            for i in 0..mu.dims() {
                let mut w = mu.w.clone();
                w[i] = 0;
                out.push((Cell::new(mu.v.clone(), w.clone()), mu.clone()));
                let mut v = mu.v.clone();
                v[i] += 1;
                out.push((Cell::new(v, w), mu.clone()));
            }
        }
        out.sort();
        out
    }

    /// The unique `n`-wall of top cell `mu` that has `c` as a face
    /// (`n` inessential in `c`).
    pub fn wall_in_direction(&self, c: &Cell, mu: &Cell, n: usize) -> Cell {
        debug_assert_eq!(c.w[n], 0);
        let mut w = mu.w.clone();
        w[n] = 0;
        let mut v = mu.v.clone();
        if c.v[n] == mu.v[n] + 1 {
            v[n] += 1;
        } else {
            debug_assert_eq!(c.v[n], mu.v[n]);
        }
        Cell::new(v, w)
    }
}

fn face_unchecked(a: &Cell, b: &Cell) -> bool {
    (0..a.dims()).all(|n| {
        let q = a.v[n] - b.v[n];
        (q == 0 || q == 1) && a.w[n] + q <= b.w[n]
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complex(k: &[u32]) -> Complex {
        Complex::new(Extents::new(k.to_vec()).unwrap())
    }

    fn cell(v: &[i32], w: &[i32]) -> Cell {
        Cell::new(v.to_vec(), w.to_vec())
    }

    /// Independent enumeration oracle: all (v, w) with v, v+w in the grid.
    fn brute_cells(k: &[u32]) -> Vec<Cell> {
        let n = k.len();
        let mut out = Vec::new();
        let mut stack = vec![(Vec::<i32>::new(), Vec::<i32>::new())];
        while let Some((v, w)) = stack.pop() {
            if v.len() == n {
                out.push(Cell::new(v, w));
                continue;
            }
            let i = v.len();
            for vi in 0..=(k[i] as i32 + 1) {
                for wi in 0..=1 {
                    if vi + wi <= k[i] as i32 + 1 {
                        let mut v2 = v.clone();
                        let mut w2 = w.clone();
                        v2.push(vi);
                        w2.push(wi);
                        stack.push((v2, w2));
                    }
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn cell_counts_match_enumeration_oracle() {
        for k in [vec![2, 2], vec![1], vec![1, 1, 1]] {
            let x = complex(&k);
            assert_eq!(x.cells(), brute_cells(&k).as_slice());
            let expect: usize = k.iter().map(|&kn| 2 * kn as usize + 3).product();
            assert_eq!(x.len(), expect);
            let tops: usize = k.iter().map(|&kn| kn as usize + 1).product();
            assert_eq!(x.top_cells().len(), tops);
        }
        // spot values from the closed forms
        assert_eq!(complex(&[2, 2]).len(), 49);
        assert_eq!(complex(&[2, 2]).top_cells().len(), 9);
        assert_eq!(complex(&[1]).len(), 5);
        assert_eq!(complex(&[1, 1, 1]).len(), 125);
        assert_eq!(complex(&[1, 1, 1]).top_cells().len(), 8);
    }

    #[test]
    fn one_dimensional_complex_breakdown() {
        let x = complex(&[1]);
        let vertices = x.cells().iter().filter(|c| c.dim() == 0).count();
        let edges = x.cells().iter().filter(|c| c.dim() == 1).count();
        assert_eq!((vertices, edges), (3, 2));
    }

    #[test]
    fn rejects_bad_extents() {
        assert_eq!(Extents::new(vec![]), Err(CubicalError::BadExtents));
        assert_eq!(Extents::new(vec![2, 0]), Err(CubicalError::BadExtents));
    }

    #[test]
    fn face_relation_examples() {
        let x = complex(&[2, 2]);
        assert!(x
            .is_face(&cell(&[1, 2], &[0, 0]), &cell(&[0, 2], &[1, 0]))
            .unwrap());
        let a = cell(&[1, 1], &[0, 1]);
        assert!(x.is_face(&a, &a).unwrap());
        let x1 = complex(&[2]);
        assert!(!x1.is_face(&cell(&[1], &[0]), &cell(&[2], &[1])).unwrap());
    }

    #[test]
    fn face_rejects_mismatched_dimensions() {
        let x = complex(&[2, 2]);
        let err = x.is_face(&cell(&[1], &[0]), &cell(&[1, 1], &[0, 0]));
        assert!(matches!(err, Err(CubicalError::DimensionMismatch(_, _))));
    }

    #[test]
    fn relative_position_examples() {
        let x = complex(&[2, 2]);
        assert_eq!(
            x.relative_position(&cell(&[1, 1], &[0, 0]), &cell(&[1, 1], &[1, 1]))
                .unwrap(),
            vec![-1, -1]
        );
        assert_eq!(
            x.relative_position(&cell(&[1, 1], &[0, 0]), &cell(&[0, 0], &[1, 1]))
                .unwrap(),
            vec![1, 1]
        );
        assert_eq!(
            x.relative_position(&cell(&[1, 1], &[0, 0]), &cell(&[0, 1], &[1, 0]))
                .unwrap()[0],
            1
        );
        let err = x.relative_position(&cell(&[0, 0], &[0, 0]), &cell(&[2, 2], &[1, 1]));
        assert!(matches!(err, Err(CubicalError::NotAFace(_, _))));
    }

    #[test]
    fn position_consistent_along_coface_chains() {
        // p_n(a, b) = p_n(a, c) for every chain a ⪯ b ⪯ c and n in Ex(a, b).
        let x = complex(&[1, 1]);
        for a in x.cells() {
            for b in x.cells() {
                if !face_unchecked(a, b) {
                    continue;
                }
                for c in x.cells() {
                    if !face_unchecked(b, c) {
                        continue;
                    }
                    let pab = x.relative_position(a, b).unwrap();
                    let pac = x.relative_position(a, c).unwrap();
                    for n in x.extensions(a, b) {
                        assert_eq!(pab[n], pac[n], "a={a} b={b} c={c} n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn join_and_meet_examples() {
        let x1 = complex(&[1]);
        assert_eq!(
            x1.join(&cell(&[1], &[0]), &cell(&[2], &[0])).unwrap(),
            Some(cell(&[1], &[1]))
        );
        assert_eq!(x1.join(&cell(&[0], &[0]), &cell(&[2], &[0])).unwrap(), None);
        let x = complex(&[2, 2]);
        assert_eq!(
            x.meet(&cell(&[1, 1], &[1, 1]), &cell(&[2, 1], &[1, 1]))
                .unwrap(),
            Some(cell(&[2, 1], &[0, 1]))
        );
    }

    #[test]
    fn join_meet_match_brute_force_extrema() {
        for k in [
            vec![1],
            vec![2],
            vec![1, 1],
            vec![1, 2],
            vec![2, 1],
            vec![2, 2],
            vec![1, 1, 1],
            vec![2, 1, 2],
        ] {
            let x = complex(&k);
            for a in x.cells() {
                for b in x.cells() {
                    let common_cofaces: Vec<&Cell> = x
                        .cells()
                        .iter()
                        .filter(|c| face_unchecked(a, c) && face_unchecked(b, c))
                        .collect();
                    let join = x.join(a, b).unwrap();
                    match join {
                        Some(j) => {
                            assert!(common_cofaces.iter().all(|c| face_unchecked(&j, c)));
                            assert!(common_cofaces.contains(&&j));
                        }
                        None => assert!(common_cofaces.is_empty(), "a={a} b={b}"),
                    }
                    let common_faces: Vec<&Cell> = x
                        .cells()
                        .iter()
                        .filter(|c| face_unchecked(c, a) && face_unchecked(c, b))
                        .collect();
                    let meet = x.meet(a, b).unwrap();
                    match meet {
                        Some(m) => {
                            assert!(common_faces.iter().all(|c| face_unchecked(c, &m)));
                            assert!(common_faces.contains(&&m));
                        }
                        None => assert!(common_faces.is_empty(), "a={a} b={b}"),
                    }
                }
            }
        }
    }

    #[test]
    fn top_star_and_directions() {
        let x = complex(&[2, 2]);
        let interior = cell(&[1, 1], &[0, 0]);
        assert_eq!(x.top_star(&interior).len(), 4);
        let top = cell(&[1, 1], &[1, 1]);
        assert_eq!(x.top_star(&top), vec![top.clone()]);
        assert!(top.inessential().is_empty());
        let c = cell(&[1, 2], &[0, 0]);
        let up = cell(&[1, 2], &[1, 0]);
        assert_eq!(x.extensions(&c, &up), vec![0]);
    }

    #[test]
    fn boundary_matches_unique_coface_definition() {
        for k in [vec![1], vec![2, 2], vec![1, 1, 1]] {
            let x = complex(&k);
            // closure of codimension-one cells with a unique top coface
            let n = x.dims();
            let mut flagged = vec![false; x.len()];
            for (i, c) in x.cells().iter().enumerate() {
                if c.dim() == n - 1 && x.top_star(c).len() == 1 {
                    flagged[i] = true;
                }
            }
            let mut closure = vec![false; x.len()];
            for (i, c) in x.cells().iter().enumerate() {
                if flagged[i] {
                    for (j, f) in x.cells().iter().enumerate() {
                        if face_unchecked(f, c) {
                            closure[j] = true;
                        }
                    }
                }
            }
            for (i, c) in x.cells().iter().enumerate() {
                assert_eq!(x.is_boundary(c), closure[i], "k={k:?} cell={c}");
            }
        }
    }

    #[test]
    fn boundary_examples() {
        let x = complex(&[2, 2]);
        let perimeter = x
            .boundary_cells()
            .into_iter()
            .filter(|c| c.dim() == 0)
            .count();
        assert_eq!(perimeter, 12);
        let x1 = complex(&[1]);
        assert_eq!(
            x1.boundary_cells(),
            vec![cell(&[0], &[0]), cell(&[2], &[0])]
        );
        assert!(!x.is_boundary(&cell(&[1, 1], &[0, 0])));
    }

    #[test]
    fn incidence_squares_to_zero() {
        for k in [vec![2, 2], vec![1, 1, 1]] {
            let x = complex(&k);
            for c in x.cells() {
                if c.dim() < 2 {
                    continue;
                }
                // sum over middle cells of κ(c, m) κ(m, f)
                let mut acc: HashMap<Cell, i32> = HashMap::new();
                for (m, s1) in x.facets(c) {
                    for (f, s2) in x.facets(&m) {
                        *acc.entry(f).or_insert(0) += s1 * s2;
                    }
                }
                assert!(acc.values().all(|&s| s == 0), "∂∂ ≠ 0 at {c}");
            }
        }
    }

    #[test]
    fn incidence_implies_facet() {
        let x = complex(&[2, 2]);
        for a in x.cells() {
            for b in x.cells() {
                let k = x.incidence(b, a);
                if k != 0 {
                    assert!(face_unchecked(a, b));
                    assert_eq!(b.dim(), a.dim() + 1);
                    assert!(k == 1 || k == -1);
                }
            }
        }
    }

    #[test]
    fn position_support_equals_extensions() {
        let x = complex(&[1, 1]);
        for a in x.cells() {
            for b in x.cells() {
                if !face_unchecked(a, b) {
                    continue;
                }
                let p = x.relative_position(a, b).unwrap();
                let support: Vec<usize> = (0..2).filter(|&n| p[n] != 0).collect();
                assert_eq!(support, x.extensions(a, b));
            }
        }
    }

    #[test]
    fn cell_text_round_trip() {
        let c = cell(&[1, 2], &[0, 1]);
        assert_eq!(c.to_string(), "1,2;0,1");
        assert_eq!("1,2;0,1".parse::<Cell>().unwrap(), c);
        assert!("1,2;0,2".parse::<Cell>().is_err());
        assert!("1,2".parse::<Cell>().is_err());
        assert!("a;0".parse::<Cell>().is_err());
    }

    #[test]
    fn wall_enumeration_counts() {
        let x = complex(&[2, 2]);
        assert_eq!(x.walls().len(), 36); // 9 top cells x 4 walls
        let interior = x
            .walls()
            .iter()
            .filter(|(xi, _)| !x.is_boundary(xi))
            .count();
        assert_eq!(interior, 24);
    }
}
