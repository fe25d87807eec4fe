//! Graded chain complexes over GF(2), their reduction to a complex with
//! strictly grade-decreasing boundary, homological indices of downset pairs,
//! and enumeration of all boundary operators conjugate to the reduced one.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::blowup::{BlowupComplex, ExtendedGrading};
use crate::cubical::{Cell, Complex};
use crate::poset::Poset;

#[derive(Debug, Error)]
pub enum ConleyError {
    #[error("{pairs} perturbation pairs exceed the enumeration budget of {budget} bits")]
    EnumerationBudget { pairs: usize, budget: usize },
}

/// A chain complex over GF(2) with basis cells carrying a degree and a grade,
/// whose boundary never increases the grade.
#[derive(Debug, Clone)]
pub struct GradedComplex {
    pub cells: Vec<Cell>,
    pub degree: Vec<usize>,
    pub grade: Vec<usize>,
    /// Sparse boundary columns: sorted generator indices with coefficient 1.
    pub boundary: Vec<Vec<u32>>,
    pub poset: Poset,
    /// Ambient dimension (maximal degree).
    pub top_degree: usize,
}

impl GradedComplex {
    /// Assembles the complex of all cells of `complex` with the mod-2
    /// incidence boundary and the given grading.
    pub fn new(complex: &Complex, grade: Vec<usize>, poset: Poset) -> Self {
        let cells = complex.cells().to_vec();
        let degree: Vec<usize> = cells.iter().map(Cell::dim).collect();
        let mut boundary = Vec::with_capacity(cells.len());
        for c in &cells {
            let mut col: Vec<u32> = complex
                .facets(c)
                .into_iter()
                .map(|(f, _)| complex.index_of(&f).unwrap() as u32)
                .collect();
            col.sort_unstable();
            col.dedup();
            boundary.push(col);
        }
        let top_degree = complex.dims();
        GradedComplex {
            cells,
            degree,
            grade,
            boundary,
            poset,
            top_degree,
        }
    }

    pub fn from_blowup(blowup: &BlowupComplex, ext: &ExtendedGrading) -> Self {
        Self::new(blowup.complex(), ext.grade.clone(), ext.poset.clone())
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Checks `∂∘∂ = 0` and that the boundary is grade-non-increasing.
    pub fn verify(&self) -> bool {
        for (i, col) in self.boundary.iter().enumerate() {
            let mut acc: BTreeSet<u32> = BTreeSet::new();
            for &j in col {
                if !self.poset.le(self.grade[j as usize], self.grade[i]) {
                    return false;
                }
                for &k in &self.boundary[j as usize] {
                    if !acc.remove(&k) {
                        acc.insert(k);
                    }
                }
            }
            if !acc.is_empty() {
                return false;
            }
        }
        true
    }

    /// Betti numbers of the relative complex of the downset pair at `p`:
    /// the subquotient spanned by generators of grade exactly `p`.
    ///
    /// This is a rank computation independent of the reduction path.
    pub fn index_of(&self, p: usize) -> Vec<usize> {
        let fiber: Vec<usize> = (0..self.len()).filter(|&i| self.grade[i] == p).collect();
        let pos: BTreeMap<usize, usize> = fiber.iter().enumerate().map(|(a, &i)| (i, a)).collect();
        // boundary of the quotient: entries staying inside the fiber
        let mut by_degree: Vec<Vec<usize>> = vec![Vec::new(); self.top_degree + 1];
        for &i in &fiber {
            by_degree[self.degree[i]].push(i);
        }
        let mut ranks = vec![0usize; self.top_degree + 2];
        for d in 1..=self.top_degree {
            // matrix of ∂_d restricted to the fiber
            let rows: BTreeMap<usize, usize> = by_degree[d - 1]
                .iter()
                .enumerate()
                .map(|(a, &i)| (i, a))
                .collect();
            let mut cols: Vec<BitVec> = Vec::new();
            for &i in &by_degree[d] {
                let mut col = BitVec::zeros(rows.len());
                for &j in &self.boundary[i] {
                    if let Some(&r) = rows.get(&(j as usize)) {
                        col.flip(r);
                    }
                }
                cols.push(col);
            }
            ranks[d] = column_rank(cols);
        }
        let _ = pos;
        (0..=self.top_degree)
            .map(|d| by_degree[d].len() - ranks[d] - ranks[d + 1])
            .collect()
    }

    /// Euler characteristic as the alternating sum over all generators.
    pub fn euler_characteristic(&self) -> i64 {
        self.degree
            .iter()
            .map(|&d| if d % 2 == 0 { 1 } else { -1 })
            .sum()
    }
}

/// The reduced complex: surviving generators with a strictly grade-decreasing
/// boundary operator.
#[derive(Debug, Clone)]
pub struct ConleyComplex {
    /// Surviving generators `(cell, degree, grade)`, sorted by
    /// (degree, grade, cell index in the source complex).
    pub generators: Vec<(Cell, usize, usize)>,
    /// Sparse boundary columns on generator indices.
    pub boundary: Vec<Vec<u32>>,
    pub poset: Poset,
    pub top_degree: usize,
}

impl ConleyComplex {
    /// Betti numbers per grade: `betti[p][k]` counts surviving generators of
    /// grade `p` and degree `k`.
    pub fn betti(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (_, d, p) in &self.generators {
            out.entry(*p)
                .or_insert_with(|| vec![0; self.top_degree + 1])[*d] += 1;
        }
        out
    }

    /// `Σ_p Σ_k (-1)^k dim CH_k(p)`; equals 1 for every full rectangle.
    pub fn euler_sum(&self) -> i64 {
        self.generators
            .iter()
            .map(|(_, d, _)| if d % 2 == 0 { 1 } else { -1 })
            .sum()
    }

    /// Boundary is strictly grade-decreasing and squares to zero.
    pub fn verify(&self) -> bool {
        for (i, col) in self.boundary.iter().enumerate() {
            let mut acc: BTreeSet<u32> = BTreeSet::new();
            for &j in col {
                if !self
                    .poset
                    .lt(self.generators[j as usize].2, self.generators[i].2)
                {
                    return false;
                }
                for &k in &self.boundary[j as usize] {
                    if !acc.remove(&k) {
                        acc.insert(k);
                    }
                }
            }
            if !acc.is_empty() {
                return false;
            }
        }
        true
    }

    /// Dense copy of the boundary in the fixed generator order.
    pub fn boundary_matrix(&self) -> Vec<BitVec> {
        self.boundary
            .iter()
            .map(|col| {
                let mut v = BitVec::zeros(self.generators.len());
                for &j in col {
                    v.flip(j as usize);
                }
                v
            })
            .collect()
    }
}

/// Iterative same-grade elimination: while a pair `(q, k)` exists with equal
/// grades, `deg q = deg k - 1` and `<∂k, q> = 1`, add `∂k` to every other
/// column containing `q` and delete both. Grades are processed along the
/// linear extension, degrees ascending, generators in cell order.
pub fn reduce(gcc: &GradedComplex) -> ConleyComplex {
    let n = gcc.len();
    let mut alive = vec![true; n];
    let mut boundary: Vec<BTreeSet<u32>> = gcc
        .boundary
        .iter()
        .map(|col| col.iter().copied().collect())
        .collect();
    let mut coboundary: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n];
    for (i, col) in boundary.iter().enumerate() {
        for &j in col {
            coboundary[j as usize].insert(i as u32);
        }
    }
    let mut by_grade: Vec<Vec<usize>> = vec![Vec::new(); gcc.poset.len()];
    for i in 0..n {
        by_grade[gcc.grade[i]].push(i);
    }
    for members in &mut by_grade {
        members.sort_by_key(|&i| (gcc.degree[i], i));
    }
    for members in &by_grade {
        loop {
            let mut pair = None;
            'scan: for &k in members {
                if !alive[k] {
                    continue;
                }
                for &q in &boundary[k] {
                    let q = q as usize;
                    if gcc.grade[q] == gcc.grade[k] {
                        debug_assert_eq!(gcc.degree[q] + 1, gcc.degree[k]);
                        pair = Some((q, k));
                        break 'scan;
                    }
                }
            }
            let Some((q, k)) = pair else { break };
            let col_k: Vec<u32> = boundary[k].iter().copied().collect();
            let users: Vec<u32> = coboundary[q].iter().copied().collect();
            for &c in &users {
                let c = c as usize;
                if c == k {
                    continue;
                }
                for &j in &col_k {
                    let j_us = j as usize;
                    if boundary[c].remove(&j) {
                        coboundary[j_us].remove(&(c as u32));
                    } else {
                        boundary[c].insert(j);
                        coboundary[j_us].insert(c as u32);
                    }
                }
            }
            for &j in &col_k {
                coboundary[j as usize].remove(&(k as u32));
            }
            boundary[k].clear();
            for &c in coboundary[q].clone().iter() {
                boundary[c as usize].remove(&(q as u32));
            }
            coboundary[q].clear();
            for &c in coboundary[k].clone().iter() {
                boundary[c as usize].remove(&(k as u32));
            }
            coboundary[k].clear();
            alive[q] = false;
            alive[k] = false;
        }
    }
    let mut survivors: Vec<usize> = (0..n).filter(|&i| alive[i]).collect();
    survivors.sort_by_key(|&i| (gcc.degree[i], gcc.grade[i], i));
    let renum: BTreeMap<usize, u32> = survivors
        .iter()
        .enumerate()
        .map(|(a, &i)| (i, a as u32))
        .collect();
    let generators: Vec<(Cell, usize, usize)> = survivors
        .iter()
        .map(|&i| (gcc.cells[i].clone(), gcc.degree[i], gcc.grade[i]))
        .collect();
    let out_boundary: Vec<Vec<u32>> = survivors
        .iter()
        .map(|&i| {
            let mut col: Vec<u32> = boundary[i].iter().map(|&j| renum[&(j as usize)]).collect();
            col.sort_unstable();
            col
        })
        .collect();
    let cc = ConleyComplex {
        generators,
        boundary: out_boundary,
        poset: gcc.poset.clone(),
        top_degree: gcc.top_degree,
    };
    debug_assert!(cc.verify());
    cc
}

/// Enumerates every boundary operator conjugate to `cc.boundary` by an
/// order-preserving, degree-preserving GF(2) isomorphism. Matrices are
/// returned in a canonical sorted encoding of their sparse columns.
pub fn enumerate_connection_matrices(
    cc: &ConleyComplex,
    max_bits: usize,
) -> Result<BTreeSet<Vec<Vec<u32>>>, ConleyError> {
    let m = cc.generators.len();
    let mut pairs = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if cc.generators[i].1 == cc.generators[j].1
                && cc.poset.lt(cc.generators[j].2, cc.generators[i].2)
            {
                pairs.push((i, j));
            }
        }
    }
    if pairs.len() > max_bits {
        return Err(ConleyError::EnumerationBudget {
            pairs: pairs.len(),
            budget: max_bits,
        });
    }
    let mut matrix = cc.boundary_matrix();
    let mut results = BTreeSet::new();
    enumerate_rec(&mut matrix, &pairs, 0, &mut results);
    Ok(results)
}

fn enumerate_rec(
    matrix: &mut Vec<BitVec>,
    pairs: &[(usize, usize)],
    depth: usize,
    results: &mut BTreeSet<Vec<Vec<u32>>>,
) {
    if depth == pairs.len() {
        results.insert(encode(matrix));
        return;
    }
    enumerate_rec(matrix, pairs, depth + 1, results);
    let (i, j) = pairs[depth];
    conjugate_elementary(matrix, i, j);
    enumerate_rec(matrix, pairs, depth + 1, results);
    conjugate_elementary(matrix, i, j); // involution undoes the step
}

/// Conjugation `M ← (I + E_ji) M (I + E_ji)` over GF(2): adds row `i` to row
/// `j` and column `j` to column `i` (the mixed term vanishes because the
/// (i,j) entry connects equal degrees while M shifts degree by one).
fn conjugate_elementary(matrix: &mut [BitVec], i: usize, j: usize) {
    let mij = matrix[j].get(i);
    let col_j = matrix[j].clone();
    matrix[i].xor_assign(&col_j);
    for col in matrix.iter_mut() {
        if col.get(i) {
            col.flip(j);
        }
    }
    debug_assert!(!mij, "degree-preserving pairs never carry boundary entries");
}

fn encode(matrix: &[BitVec]) -> Vec<Vec<u32>> {
    matrix.iter().map(BitVec::ones).collect()
}

/// Dense GF(2) vector.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &Self) {
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w ^= o;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn lowest_one(&self) -> Option<usize> {
        for (k, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(k * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn ones(&self) -> Vec<u32> {
        (0..self.len)
            .filter(|&i| self.get(i))
            .map(|i| i as u32)
            .collect()
    }
}

/// Rank of a set of GF(2) columns by elimination on lowest set bits.
pub fn column_rank(mut cols: Vec<BitVec>) -> usize {
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, column index)
    let mut rank = 0;
    for c in 0..cols.len() {
        while let Some(low) = cols[c].lowest_one() {
            if let Some(&(_, p)) = pivots.iter().find(|&&(r, _)| r == low) {
                let (a, b) = if p < c {
                    let (lo, hi) = cols.split_at_mut(c);
                    (&lo[p], &mut hi[0])
                } else {
                    unreachable!("pivot columns precede the current column")
                };
                b.xor_assign(a);
            } else {
                pivots.push((low, c));
                rank += 1;
                break;
            }
        }
    }
    rank
}

/// JSON document for the reduced complex. Generator cells are written in the
/// coordinates of the complex named by `complex` (the blow-up, for the
/// standard pipeline).
#[derive(Debug, Serialize)]
pub struct ConleyExport {
    pub complex: String,
    pub generators: Vec<GeneratorExport>,
    pub boundary: Vec<[u32; 2]>,
    pub betti: BTreeMap<String, Vec<usize>>,
}

#[derive(Debug, Serialize)]
pub struct GeneratorExport {
    pub id: u32,
    pub degree: usize,
    pub grade: usize,
    pub cell: String,
}

impl ConleyExport {
    pub fn new(cc: &ConleyComplex, complex: &str) -> Self {
        let generators = cc
            .generators
            .iter()
            .enumerate()
            .map(|(i, (cell, degree, grade))| GeneratorExport {
                id: i as u32,
                degree: *degree,
                grade: *grade,
                cell: cell.to_string(),
            })
            .collect();
        let mut boundary = Vec::new();
        for (i, col) in cc.boundary.iter().enumerate() {
            for &j in col {
                boundary.push([i as u32, j]);
            }
        }
        let betti = cc
            .betti()
            .into_iter()
            .map(|(p, b)| (p.to_string(), b))
            .collect();
        ConleyExport {
            complex: complex.to_string(),
            generators,
            boundary,
            betti,
        }
    }
}
