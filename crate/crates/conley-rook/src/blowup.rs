//! The doubled complex whose top cells are the cells of the source complex,
//! and the extension of a component grading over all of its cells.

use thiserror::Error;

use crate::cubical::{Cell, Complex, CubicalError, Extents};
use crate::dynamics::Grading;
use crate::poset::Poset;

#[derive(Debug, Error)]
pub enum BlowupError {
    #[error(transparent)]
    Cubical(#[from] CubicalError),
    #[error("grading minimum is not unique at {cell}: minima {minima:?} are incomparable")]
    NonUniqueMinimum { cell: Cell, minima: Vec<usize> },
}

/// The blow-up of a complex: extents are doubled (`2(K+1)`), and the bijection
/// `b([v,w]) = [2v+w, 1]` identifies source cells with top cells here.
#[derive(Debug, Clone)]
pub struct BlowupComplex {
    source: Complex,
    doubled: Complex,
}

impl BlowupComplex {
    pub fn new(source: Complex) -> Self {
        let k: Vec<u32> = source
            .extents()
            .as_slice()
            .iter()
            .map(|&kn| 2 * (kn + 1))
            .collect();
        let doubled = Complex::new(Extents::new(k).unwrap());
        BlowupComplex { source, doubled }
    }

    pub fn source(&self) -> &Complex {
        &self.source
    }

    pub fn complex(&self) -> &Complex {
        &self.doubled
    }

    /// `b([v,w]) = [2v+w, 1]`.
    pub fn up(&self, cell: &Cell) -> Cell {
        let v: Vec<i32> = cell
            .v()
            .iter()
            .zip(cell.w())
            .map(|(&v, &w)| 2 * v + w)
            .collect();
        Cell::new(v, vec![1; cell.dims()])
    }

    /// Inverse of `up` on top cells of the doubled complex.
    pub fn down(&self, top: &Cell) -> Result<Cell, BlowupError> {
        if !top.is_top() || !self.doubled.contains(top) {
            return Err(BlowupError::Cubical(CubicalError::NotATopCell(top.clone())));
        }
        let w: Vec<i32> = top.v().iter().map(|&v| v.rem_euclid(2)).collect();
        let v: Vec<i32> = top
            .v()
            .iter()
            .zip(&w)
            .map(|(&vb, &wb)| (vb - wb) / 2)
            .collect();
        Ok(Cell::new(v, w))
    }
}

/// A grading of every cell of the blow-up complex by component ids,
/// order-preserving with respect to the face relation.
#[derive(Debug, Clone)]
pub struct ExtendedGrading {
    /// Component id per blow-up cell index.
    pub grade: Vec<usize>,
    pub poset: Poset,
}

impl ExtendedGrading {
    /// Transports a component grading through the blow-up bijection and
    /// extends it to lower cells by unique minima over top cofaces.
    ///
    /// A non-unique minimum is a hard error: for the supported models it
    /// falsifies the extension theorem and always signals a defect.
    pub fn new(blowup: &BlowupComplex, grading: &Grading) -> Result<Self, BlowupError> {
        let top_grade = |top: &Cell| -> usize {
            let cell = blowup.down(top).expect("top cell of the blow-up");
            let idx = blowup.source().index_of(&cell).expect("cell of the source");
            grading.component_of[idx]
        };
        let grade = extend_top_grading(blowup.complex(), &grading.poset, &top_grade)?;
        Ok(ExtendedGrading {
            grade,
            poset: grading.poset.clone(),
        })
    }

    /// Extends an arbitrary top-cell grading of an arbitrary complex; used by
    /// graded complexes not arising from a multivalued map.
    pub fn from_top_cells(
        complex: &Complex,
        poset: &Poset,
        top_grade: &dyn Fn(&Cell) -> usize,
    ) -> Result<Self, BlowupError> {
        let grade = extend_top_grading(complex, poset, top_grade)?;
        Ok(ExtendedGrading {
            grade,
            poset: poset.clone(),
        })
    }

    /// The closed subcomplex pair of a component: cells graded at most `p`,
    /// and cells graded strictly below `p`.
    pub fn downset_pair(&self, complex: &Complex, p: usize) -> (Vec<usize>, Vec<usize>) {
        let mut closed = Vec::new();
        let mut strict = Vec::new();
        for (i, &g) in self.grade.iter().enumerate() {
            if self.poset.le(g, p) {
                closed.push(i);
                if g != p {
                    strict.push(i);
                }
            }
        }
        let _ = complex;
        (closed, strict)
    }
}

fn extend_top_grading(
    complex: &Complex,
    poset: &Poset,
    top_grade: &dyn Fn(&Cell) -> usize,
) -> Result<Vec<usize>, BlowupError> {
    let mut grade = vec![usize::MAX; complex.len()];
    for &t in complex.top_cells() {
        grade[t] = top_grade(complex.cell(t));
    }
    for (i, cell) in complex.cells().iter().enumerate() {
        if cell.is_top() {
            continue;
        }
        let candidates: Vec<usize> = complex
            .top_star(cell)
            .iter()
            .map(|mu| grade[complex.index_of(mu).unwrap()])
            .collect();
        match poset.unique_minimum(&candidates) {
            Some(m) => grade[i] = m,
            None => {
                return Err(BlowupError::NonUniqueMinimum {
                    cell: cell.clone(),
                    minima: poset.minimal_elements(&candidates),
                })
            }
        }
    }
    Ok(grade)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{self, Model};
    use crate::fixtures;

    fn cell(v: &[i32], w: &[i32]) -> Cell {
        Cell::new(v.to_vec(), w.to_vec())
    }

    #[test]
    fn blowup_map_examples() {
        let field = fixtures::running_rook_field();
        let b = BlowupComplex::new(field.complex().clone());
        assert_eq!(b.up(&cell(&[1, 2], &[0, 1])), cell(&[2, 5], &[1, 1]));
        assert_eq!(
            b.down(&cell(&[2, 5], &[1, 1])).unwrap(),
            cell(&[1, 2], &[0, 1])
        );
        assert_eq!(b.down(&cell(&[3, 4], &[1, 1])).unwrap().dim(), 1);
        assert!(b.down(&cell(&[3, 4], &[1, 0])).is_err());
    }

    #[test]
    fn blowup_is_a_bijection_onto_top_cells() {
        let field = fixtures::running_rook_field();
        let b = BlowupComplex::new(field.complex().clone());
        assert_eq!(b.source().len(), b.complex().top_cells().len());
        for c in b.source().cells() {
            let t = b.up(c);
            assert!(b.complex().contains(&t));
            assert_eq!(&b.down(&t).unwrap(), c);
        }
    }

    #[test]
    fn trivial_model_extends_to_constant_grading() {
        let field = fixtures::running_rook_field();
        let grading = dynamics::Grading::new(&dynamics::f0(&field));
        let b = BlowupComplex::new(field.complex().clone());
        let ext = ExtendedGrading::new(&b, &grading).unwrap();
        assert!(ext.grade.iter().all(|&g| g == 0));
    }

    #[test]
    fn extension_is_order_preserving() {
        let field = fixtures::running_rook_field();
        for model in [Model::F1, Model::F2, Model::F3] {
            let stg = dynamics::build(&field, model).unwrap();
            let grading = dynamics::Grading::new(&stg);
            let b = BlowupComplex::new(field.complex().clone());
            let ext = ExtendedGrading::new(&b, &grading).unwrap();
            let xb = b.complex();
            for (i, c) in xb.cells().iter().enumerate() {
                for up in xb.cofacets(c) {
                    let j = xb.index_of(&up).unwrap();
                    assert!(
                        ext.poset.le(ext.grade[i], ext.grade[j]),
                        "grading not order preserving at {c} ⪯ {up}"
                    );
                }
            }
            // every component id is attained on top cells
            let mut hit = vec![false; grading.len()];
            for &t in xb.top_cells() {
                hit[ext.grade[t]] = true;
            }
            assert!(hit.into_iter().all(|b| b));
        }
    }

    #[test]
    fn shared_vertex_takes_unique_minimum() {
        let field = fixtures::running_rook_field();
        let grading = dynamics::Grading::new(&dynamics::f3(&field).unwrap());
        let b = BlowupComplex::new(field.complex().clone());
        let ext = ExtendedGrading::new(&b, &grading).unwrap();
        let xb = b.complex();
        let zeta = cell(&[4, 4], &[0, 0]);
        let i = xb.index_of(&zeta).unwrap();
        let tops = xb.top_star(&zeta);
        assert_eq!(tops.len(), 4);
        let grades: Vec<usize> = tops
            .iter()
            .map(|mu| ext.grade[xb.index_of(mu).unwrap()])
            .collect();
        assert_eq!(ext.poset.unique_minimum(&grades), Some(ext.grade[i]));
    }

    #[test]
    fn downset_pairs_are_closed_subcomplexes() {
        let field = fixtures::running_rook_field();
        let grading = dynamics::Grading::new(&dynamics::f3(&field).unwrap());
        let b = BlowupComplex::new(field.complex().clone());
        let ext = ExtendedGrading::new(&b, &grading).unwrap();
        let xb = b.complex();
        for p in 0..grading.len() {
            let (closed, strict) = ext.downset_pair(xb, p);
            for set in [&closed, &strict] {
                let inset: std::collections::BTreeSet<usize> = set.iter().copied().collect();
                for &i in set.iter() {
                    for (f, _) in xb.facets(xb.cell(i)) {
                        let j = xb.index_of(&f).unwrap();
                        assert!(inset.contains(&j), "downset not closed at {f}");
                    }
                }
            }
            let diff: Vec<usize> = closed
                .iter()
                .copied()
                .filter(|i| !strict.contains(i))
                .collect();
            assert!(diff.iter().all(|&i| ext.grade[i] == p));
        }
        // minimal component has an empty strict part; the maximum of the
        // trivial model is everything
        let (c0, s0) = ext.downset_pair(xb, 0);
        assert!(!c0.is_empty() && s0.is_empty());
    }

    #[test]
    fn saddle_strict_downset_is_union_of_attractor_downsets() {
        let field = fixtures::running_rook_field();
        let grading = dynamics::Grading::new(&dynamics::f3(&field).unwrap());
        let b = BlowupComplex::new(field.complex().clone());
        let ext = ExtendedGrading::new(&b, &grading).unwrap();
        let xb = b.complex();
        let morse = dynamics::MorseGraph::new(&grading, &field);
        assert_eq!(morse.nodes.len(), 3);
        let saddle = morse.nodes[2].component;
        let (closed, strict) = ext.downset_pair(xb, saddle);
        // both attractor downsets sit inside the strict part (together with
        // the transient and boundary components the saddle drains through)
        let strict_set: std::collections::BTreeSet<usize> = strict.iter().copied().collect();
        for node in &morse.nodes[..2] {
            let (down, _) = ext.downset_pair(xb, node.component);
            assert!(down.iter().all(|i| strict_set.contains(i)));
            assert!(ext.poset.lt(node.component, saddle));
        }
        // the difference of the pair is exactly the saddle's fiber
        let fiber: Vec<usize> = closed
            .iter()
            .copied()
            .filter(|i| !strict_set.contains(i))
            .collect();
        assert!(fiber.iter().all(|&i| ext.grade[i] == saddle));
        assert!(!fiber.is_empty());
    }

    #[test]
    fn codimension_one_separation_on_fiber_boundaries() {
        let field = fixtures::running_rook_field();
        let grading = dynamics::Grading::new(&dynamics::f3(&field).unwrap());
        let b = BlowupComplex::new(field.complex().clone());
        let ext = ExtendedGrading::new(&b, &grading).unwrap();
        let xb = b.complex();
        let n = xb.dims();
        for p in 0..grading.len() {
            let (closed, _) = ext.downset_pair(xb, p);
            let inset: std::collections::BTreeSet<usize> = closed.iter().copied().collect();
            for &i in &closed {
                let c = xb.cell(i);
                if c.dim() != n - 1 {
                    continue;
                }
                let cof = xb.top_star(c);
                if cof.len() != 2 {
                    continue;
                }
                let g: Vec<usize> = cof
                    .iter()
                    .map(|mu| xb.index_of(mu).unwrap())
                    .map(|j| ext.grade[j])
                    .collect();
                let inside: Vec<bool> = cof
                    .iter()
                    .map(|mu| inset.contains(&xb.index_of(mu).unwrap()))
                    .collect();
                if inside[0] != inside[1] {
                    let (within, outside) = if inside[0] { (0, 1) } else { (1, 0) };
                    assert!(ext.poset.lt(g[within], g[outside]));
                }
            }
        }
    }
}
