//! Built-in worked examples: small labelings used by the test suites and by
//! the `--fixtures` self-check of the CLI.

use std::collections::BTreeMap;

use crate::cubical::{Cell, Complex, Extents};
use crate::walls::{RookField, Sign, WallLabeling};

fn inward_boundary(x: &Complex, table: &mut BTreeMap<(Cell, Cell), Sign>) {
    for (xi, mu) in x.walls() {
        if x.is_boundary(&xi) {
            let n = xi.inessential()[0];
            let p = x.relative_position(&xi, &mu).unwrap()[n];
            table.insert((xi, mu), -(p as Sign));
        }
    }
}

fn vertical_wall(col: i32, row: i32) -> Cell {
    Cell::new(vec![col, row], vec![0, 1])
}

fn horizontal_wall(col: i32, row: i32) -> Cell {
    Cell::new(vec![col, row], vec![1, 0])
}

fn top(col: i32, row: i32) -> Cell {
    Cell::new(vec![col, row], vec![1, 1])
}

/// The two-species mutual-repression labeling on K=(2,2): interior walls
/// point up/right in the first two columns/rows and down/left along the last
/// column/row; the boundary points inward.
pub fn running_labeling() -> WallLabeling {
    let x = Complex::new(Extents::new(vec![2, 2]).unwrap());
    let mut table = BTreeMap::new();
    inward_boundary(&x, &mut table);
    for wall_col in 1..=2 {
        for row in 0..=2 {
            let s: Sign = if row == 2 { -1 } else { 1 };
            let w = vertical_wall(wall_col, row);
            table.insert((w.clone(), top(wall_col - 1, row)), s);
            table.insert((w, top(wall_col, row)), s);
        }
    }
    for wall_row in 1..=2 {
        for col in 0..=2 {
            let s: Sign = if col == 2 { -1 } else { 1 };
            let w = horizontal_wall(col, wall_row);
            table.insert((w.clone(), top(col, wall_row - 1)), s);
            table.insert((w, top(col, wall_row)), s);
        }
    }
    WallLabeling::new(x, table).unwrap()
}

pub fn running_rook_field() -> RookField {
    RookField::new(running_labeling()).unwrap()
}

/// A sign table on K=(1,1) that admits no local inducement map at the center
/// vertex: three walls around it keep the consistent labels but one interior
/// wall pair disagrees in two directions at once.
pub fn not_a_wall_labeling() -> WallLabeling {
    let x = Complex::new(Extents::new(vec![1, 1]).unwrap());
    let mut table = BTreeMap::new();
    inward_boundary(&x, &mut table);
    let vw = vertical_wall(1, 0);
    table.insert((vw.clone(), top(0, 0)), 1);
    table.insert((vw, top(1, 0)), 1);
    let vw = vertical_wall(1, 1);
    table.insert((vw.clone(), top(0, 1)), 1);
    table.insert((vw, top(1, 1)), -1);
    let hw = horizontal_wall(0, 1);
    table.insert((hw.clone(), top(0, 0)), 1);
    table.insert((hw, top(0, 1)), 1);
    let hw = horizontal_wall(1, 1);
    table.insert((hw.clone(), top(1, 0)), 1);
    table.insert((hw, top(1, 1)), -1);
    WallLabeling::new(x, table).unwrap()
}

/// A valid strongly dissipative labeling on K=(1,1) whose center vertex
/// breaks the hypercube-connectivity condition in the first direction:
/// the interior vertical wall converges below and diverges above, while
/// every interior horizontal wall points up.
pub fn non_monotone_labeling() -> WallLabeling {
    let x = Complex::new(Extents::new(vec![1, 1]).unwrap());
    let mut table = BTreeMap::new();
    inward_boundary(&x, &mut table);
    let vw = vertical_wall(1, 0);
    table.insert((vw.clone(), top(0, 0)), 1);
    table.insert((vw, top(1, 0)), -1);
    let vw = vertical_wall(1, 1);
    table.insert((vw.clone(), top(0, 1)), -1);
    table.insert((vw, top(1, 1)), 1);
    for col in 0..=1 {
        let hw = horizontal_wall(col, 1);
        table.insert((hw.clone(), top(col, 0)), 1);
        table.insert((hw, top(col, 1)), 1);
    }
    WallLabeling::new(x, table).unwrap()
}

/// The complete expected wall table of `running_labeling`, for bit-exact
/// comparison against labelings generated through the ramp front end.
pub fn running_labeling_table() -> BTreeMap<(Cell, Cell), Sign> {
    running_labeling().table().clone()
}

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::ramp::{Interaction, InteractionKind, RampFunction, RampSystem, Rational};

/// A random ramp system with the given dimension and at most `kmax` output
/// thresholds per direction, admissible by construction: thresholds sit at
/// integers plus one third while all rate values are twentieths, so decay
/// and rate values never coincide.
pub fn random_ramp_system<R: Rng>(rng: &mut R, dims: usize, kmax: usize) -> RampSystem {
    let q = |num: i64, den: i64| -> Rational { BigRational::new(num.into(), den.into()) };
    loop {
        // out-edges: every source picks distinct targets, every node covered
        let mut targets: Vec<Vec<usize>> = Vec::new();
        for _ in 0..dims {
            let degree = rng.gen_range(1..=kmax.min(dims));
            let mut all: Vec<usize> = (0..dims).collect();
            all.shuffle(rng);
            let mut chosen = all[..degree].to_vec();
            chosen.sort_unstable();
            targets.push(chosen);
        }
        let covered = (0..dims).all(|m| targets.iter().any(|t| t.contains(&m)));
        if !covered {
            continue;
        }
        let mut ramps: std::collections::BTreeMap<(usize, usize), RampFunction> =
            std::collections::BTreeMap::new();
        for (source, outs) in targets.iter().enumerate() {
            // distinct integer offsets for this direction's thresholds
            let mut positions: Vec<i64> = (1..=12).collect();
            positions.shuffle(rng);
            for (slot, &target) in outs.iter().enumerate() {
                let theta = q(3 * positions[slot] + 1, 3); // integer + 1/3
                let h = q(1, 4);
                let lo = q(rng.gen_range(1..=150), 20);
                let hi = &lo + q(rng.gen_range(1..=100), 20);
                let nu = if rng.gen_bool(0.5) {
                    vec![lo, hi]
                } else {
                    vec![hi, lo]
                };
                let f = RampFunction::new(nu, vec![theta], vec![h], target, source)
                    .expect("constructed parameters are valid");
                ramps.insert((target, source), f);
            }
        }
        let mut interactions = Vec::new();
        for node in 0..dims {
            let mut sources: Vec<usize> = ramps
                .keys()
                .filter(|(t, _)| *t == node)
                .map(|(_, s)| *s)
                .collect();
            sources.shuffle(rng);
            let mut partition: Vec<Vec<usize>> = Vec::new();
            for s in sources {
                if partition.is_empty() || rng.gen_bool(0.5) {
                    partition.push(vec![s]);
                } else {
                    partition.last_mut().unwrap().push(s);
                }
            }
            let kind = if rng.gen_bool(0.5) {
                InteractionKind::I
            } else {
                InteractionKind::II
            };
            interactions.push(Interaction { kind, partition });
        }
        let gamma: Vec<Rational> = (0..dims).map(|_| q(rng.gen_range(1..=2), 1)).collect();
        let sys =
            RampSystem::new(gamma, interactions, ramps).expect("constructed system is well formed");
        debug_assert!(sys.check_admissible().is_ok());
        return sys;
    }
}

/// A random valid strongly dissipative labeling: ramp-induced, then with a
/// random batch of interior wall flips kept only when the inducement-map
/// search still succeeds.
pub fn random_dissipative_labeling<R: Rng>(rng: &mut R, dims: usize, kmax: usize) -> WallLabeling {
    let sys = random_ramp_system(rng, dims, kmax);
    let base = sys.wall_labeling().expect("admissible by construction");
    if rng.gen_bool(0.5) {
        return base;
    }
    let mut current = base;
    for _ in 0..3 {
        let interior: Vec<(Cell, Cell)> = current
            .table()
            .keys()
            .filter(|(xi, _)| !current.complex().is_boundary(xi))
            .cloned()
            .collect();
        if interior.is_empty() {
            break;
        }
        let key = interior[rng.gen_range(0..interior.len())].clone();
        let mut table = current.table().clone();
        let s = table[&key];
        table.insert(key, -s);
        let flipped = WallLabeling::new(current.complex().clone(), table).expect("same wall set");
        if flipped.validate().is_ok() {
            current = flipped;
        }
    }
    current
}

pub fn random_dissipative_field<R: Rng>(rng: &mut R, dims: usize, kmax: usize) -> RookField {
    RookField::new(random_dissipative_labeling(rng, dims, kmax))
        .expect("valid and dissipative by construction")
}
