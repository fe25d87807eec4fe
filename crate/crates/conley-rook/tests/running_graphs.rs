//! Exhaustive edge-by-edge validation of the first two refinements on the
//! mutual-repression example: the expected orientation of every
//! codimension-one face pair and the exact self-loop set.

use conley_rook::cubical::Cell;
use conley_rook::dynamics::{self, Stg};
use conley_rook::fixtures;

/// Grid positions 0..=6 per axis: even positions are pinned coordinates,
/// odd positions extended ones.
fn node(px: usize, py: usize) -> Cell {
    let coord = |p: usize| ((p / 2) as i32, (p % 2) as i32);
    let (v1, w1) = coord(px);
    let (v2, w2) = coord(py);
    Cell::new(vec![v1, v2], vec![w1, w2])
}

struct Expected {
    singles: Vec<((usize, usize), (usize, usize))>,
    doubles: Vec<((usize, usize), (usize, usize))>,
    loops: Vec<(usize, usize)>,
}

fn boundary_inward() -> Vec<((usize, usize), (usize, usize))> {
    let mut s = Vec::new();
    for y in 0..=6 {
        s.push(((0, y), (1, y))); // left edge points right
        s.push(((6, y), (5, y))); // right edge points left
    }
    for x in 0..=6 {
        s.push(((x, 0), (x, 1))); // bottom points up
        s.push(((x, 6), (x, 5))); // top points down
    }
    s
}

/// Arrows of the first refinement: rightward/upward in the lower-left
/// block, leftward/downward along the last column and row, and the two
/// crossing double-edge chains through the cycling vertex.
fn expected_f1() -> Expected {
    let mut singles = boundary_inward();
    for y in 0..=3 {
        for x in 1..=4 {
            singles.push(((x, y), (x + 1, y)));
            singles.push(((y, x), (y, x + 1)));
        }
    }
    for t in 1..=4 {
        singles.push(((t + 1, 6), (t, 6)));
        singles.push(((t + 1, 5), (t, 5)));
        singles.push(((5, t + 1), (5, t)));
        singles.push(((6, t + 1), (6, t)));
    }
    let mut doubles = Vec::new();
    for t in 1..=4 {
        doubles.push(((t, 4), (t + 1, 4)));
        doubles.push(((4, t), (4, t + 1)));
    }
    Expected {
        singles,
        doubles,
        loops: vec![(1, 5), (5, 1), (4, 4)],
    }
}

/// The second refinement resolves the two drift chains: motion along the
/// crossing lines becomes one way toward the cycling vertex, whose four
/// incident pairs keep their double edges.
fn expected_f2() -> Expected {
    let mut singles = boundary_inward();
    for y in 0..=4 {
        for x in 0..=1 {
            singles.push(((x + 1, y), (x + 2, y)));
            singles.push(((y, x + 1), (y, x + 2)));
        }
    }
    for y in 0..=3 {
        singles.push(((3, y), (4, y)));
        singles.push(((4, y), (5, y)));
        singles.push(((y, 3), (y, 4)));
        singles.push(((y, 4), (y, 5)));
    }
    for t in 1..=4 {
        singles.push(((t + 1, 6), (t, 6)));
        singles.push(((t + 1, 5), (t, 5)));
        singles.push(((5, t + 1), (5, t)));
        singles.push(((6, t + 1), (6, t)));
    }
    let mut doubles = Vec::new();
    for t in 3..=4 {
        doubles.push(((t, 4), (t + 1, 4)));
        doubles.push(((4, t), (4, t + 1)));
    }
    Expected {
        singles,
        doubles,
        loops: vec![(1, 5), (5, 1), (4, 4)],
    }
}

fn check(stg: &Stg, expected: &Expected) {
    let field = fixtures::running_rook_field();
    let x = field.complex();
    let idx = |p: (usize, usize)| x.index_of(&node(p.0, p.1)).unwrap();
    // account for every adjacent position pair exactly once
    let mut seen = std::collections::BTreeSet::new();
    for &(a, b) in &expected.singles {
        assert!(
            stg.has_edge(idx(a), idx(b)) && !stg.has_edge(idx(b), idx(a)),
            "expected single {a:?} -> {b:?}"
        );
        seen.insert((a.min(b), a.max(b)));
    }
    for &(a, b) in &expected.doubles {
        assert!(
            stg.has_edge(idx(a), idx(b)) && stg.has_edge(idx(b), idx(a)),
            "expected double {a:?} <-> {b:?}"
        );
        seen.insert((a.min(b), a.max(b)));
    }
    let mut pairs = 0;
    for px in 0..=6 {
        for py in 0..=6 {
            if px + 1 <= 6 {
                pairs += 1;
                assert!(
                    seen.contains(&(((px, py)).min((px + 1, py)), ((px, py)).max((px + 1, py)))),
                    "pair ({px},{py})-({},{py}) not covered",
                    px + 1
                );
            }
            if py + 1 <= 6 {
                pairs += 1;
                assert!(seen.contains(&(((px, py)).min((px, py + 1)), ((px, py)).max((px, py + 1)))));
            }
        }
    }
    assert_eq!(pairs, 84);
    assert_eq!(seen.len(), 84);
    // exact self-loop set
    for px in 0..=6 {
        for py in 0..=6 {
            let i = idx((px, py));
            assert_eq!(
                stg.has_edge(i, i),
                expected.loops.contains(&(px, py)),
                "self loop mismatch at ({px},{py})"
            );
        }
    }
}

#[test]
fn first_refinement_matches_expected_graph() {
    let field = fixtures::running_rook_field();
    check(&dynamics::f1(&field), &expected_f1());
}

#[test]
fn second_refinement_matches_expected_graph() {
    let field = fixtures::running_rook_field();
    check(&dynamics::f2(&field), &expected_f2());
}
