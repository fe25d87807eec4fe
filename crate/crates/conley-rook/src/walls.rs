//! Wall labelings and the derived rook field.
//!
//! A wall labeling assigns ±1 to every (codimension-one face, top cell) pair
//! and is the sole dynamical input of the pipeline. Validation searches for a
//! local inducement map at every vertex; the rook field organizes the same
//! data as a `{0,±1}^N`-valued vector per (cell, top cell) pair, from which
//! all per-cell direction classes are read off.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::cubical::{Cell, Complex, CubicalError};

#[derive(Debug, Error)]
pub enum WallError {
    #[error(transparent)]
    Cubical(#[from] CubicalError),
    #[error("missing wall record for ({0}, {1})")]
    MissingWall(Cell, Cell),
    #[error("({0}, {1}) is not a wall of the complex")]
    NotAWall(Cell, Cell),
    #[error("no local inducement map exists at vertex {0}")]
    NoInducementMap(Cell),
    #[error("labeling is not strongly dissipative at wall ({0}, {1})")]
    NotDissipative(Cell, Cell),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("{0} is not a cycle of the regulation map at {1}")]
    NotACycle(String, Cell),
}

pub type Sign = i8;

/// Total assignment of ±1 to the walls of a complex.
#[derive(Debug, Clone)]
pub struct WallLabeling {
    complex: Complex,
    table: BTreeMap<(Cell, Cell), Sign>,
}

impl WallLabeling {
    /// Builds a labeling from a total table; every wall of the complex must
    /// be present and no extra pairs are allowed.
    pub fn new(complex: Complex, table: BTreeMap<(Cell, Cell), Sign>) -> Result<Self, WallError> {
        for (xi, mu) in complex.walls() {
            if !table.contains_key(&(xi.clone(), mu.clone())) {
                return Err(WallError::MissingWall(xi, mu));
            }
        }
        let walls: std::collections::BTreeSet<(Cell, Cell)> = complex.walls().into_iter().collect();
        for key in table.keys() {
            if !walls.contains(key) {
                return Err(WallError::NotAWall(key.0.clone(), key.1.clone()));
            }
        }
        debug_assert!(table.values().all(|&s| s == 1 || s == -1));
        Ok(WallLabeling { complex, table })
    }

    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn get(&self, xi: &Cell, mu: &Cell) -> Sign {
        self.table[&(xi.clone(), mu.clone())]
    }

    pub fn table(&self) -> &BTreeMap<(Cell, Cell), Sign> {
        &self.table
    }

    /// Searches every vertex for a local inducement map; returns the first
    /// vertex admitting none.
    pub fn validate(&self) -> Result<(), WallError> {
        let x = &self.complex;
        let n = x.dims();
        for sigma in x.cells() {
            if sigma.dim() != 0 {
                continue;
            }
            if !self.vertex_admits_inducement(sigma, n) {
                return Err(WallError::NoInducementMap(sigma.clone()));
            }
        }
        Ok(())
    }

    fn vertex_admits_inducement(&self, sigma: &Cell, n: usize) -> bool {
        let x = &self.complex;
        let tops = x.top_star(sigma);
        // n-adjacent top-cell pairs in the star, keyed by the shared direction
        let mut adjacent: Vec<(usize, &Cell, &Cell)> = Vec::new();
        for (i, mu) in tops.iter().enumerate() {
            for mu2 in tops.iter().skip(i + 1) {
                let diff: Vec<usize> = (0..n).filter(|&d| mu.v()[d] != mu2.v()[d]).collect();
                if diff.len() == 1 {
                    adjacent.push((diff[0], mu, mu2));
                }
            }
        }
        // walls of sigma grouped by wall cell, for condition (ii)
        let mut by_wall: BTreeMap<Cell, Vec<Cell>> = BTreeMap::new();
        for mu in &tops {
            for d in 0..n {
                let wall = x.wall_in_direction(sigma, mu, d);
                by_wall.entry(wall).or_default().push(mu.clone());
            }
        }
        // exhaustive search over the N^N candidate maps
        let total = (n as u64).pow(n as u32);
        'cand: for code in 0..total {
            let mut o = vec![0usize; n];
            let mut c = code;
            for slot in o.iter_mut() {
                *slot = (c % n as u64) as usize;
                c /= n as u64;
            }
            // condition (i)
            for &(dir, mu, mu2) in &adjacent {
                for k in 0..n {
                    if k == dir || k == o[dir] {
                        continue;
                    }
                    let (lo, hi) = (self.left_wall(mu, k), self.left_wall(mu2, k));
                    if self.get(&lo, mu) != self.get(&hi, mu2) {
                        continue 'cand;
                    }
                    let (lo, hi) = (self.right_wall(mu, k), self.right_wall(mu2, k));
                    if self.get(&lo, mu) != self.get(&hi, mu2) {
                        continue 'cand;
                    }
                }
            }
            // condition (ii)
            for (wall, mus) in &by_wall {
                let dir = wall.inessential()[0];
                if dir == o[dir] || mus.len() < 2 {
                    continue;
                }
                let first = self.get(wall, &mus[0]);
                if mus.iter().any(|mu| self.get(wall, mu) != first) {
                    continue 'cand;
                }
            }
            return true;
        }
        false
    }

    fn left_wall(&self, mu: &Cell, k: usize) -> Cell {
        let mut w = mu.w().to_vec();
        w[k] = 0;
        Cell::new(mu.v().to_vec(), w)
    }

    fn right_wall(&self, mu: &Cell, k: usize) -> Cell {
        let mut w = mu.w().to_vec();
        w[k] = 0;
        let mut v = mu.v().to_vec();
        v[k] += 1;
        Cell::new(v, w)
    }

    /// Every boundary wall must carry the inward label `ω(ξ,μ) = -p(ξ,μ)`.
    pub fn is_strongly_dissipative(&self) -> bool {
        self.first_dissipativity_violation().is_none()
    }

    pub fn first_dissipativity_violation(&self) -> Option<(Cell, Cell)> {
        let x = &self.complex;
        for ((xi, mu), &s) in &self.table {
            if !x.is_boundary(xi) {
                continue;
            }
            let n = xi.inessential()[0];
            let p = x.relative_position(xi, mu).expect("wall is a face pair")[n];
            if s as i32 != -p {
                return Some((xi.clone(), mu.clone()));
            }
        }
        None
    }

    /// Serializes to the line-oriented text format
    /// `<wall cell> <top cell> <+1|-1>`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for ((xi, mu), s) in &self.table {
            let sign = if *s > 0 { "+1" } else { "-1" };
            out.push_str(&format!("{xi} {mu} {sign}\n"));
        }
        out
    }

    /// Parses the text format, inferring the extents from the top cells.
    /// Missing walls are a load error.
    pub fn from_text(text: &str) -> Result<Self, WallError> {
        let mut records: Vec<(Cell, Cell, Sign)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |reason: String| WallError::Parse {
                line: lineno + 1,
                reason,
            };
            let mut parts = line.split_whitespace();
            let (a, b, c) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), Some(c), None) => (a, b, c),
                _ => return Err(parse_err("expected '<wall> <top> <+1|-1>'".into())),
            };
            let xi: Cell = a.parse().map_err(|e| parse_err(format!("{e}")))?;
            let mu: Cell = b.parse().map_err(|e| parse_err(format!("{e}")))?;
            let sign = match c {
                "+1" | "1" => 1,
                "-1" => -1,
                other => return Err(parse_err(format!("bad sign {other:?}"))),
            };
            records.push((xi, mu, sign));
        }
        if records.is_empty() {
            return Err(WallError::Parse {
                line: 0,
                reason: "no wall records".into(),
            });
        }
        let n = records[0].1.dims();
        let mut k = vec![0i32; n];
        for (_, mu, _) in &records {
            for (d, slot) in k.iter_mut().enumerate() {
                *slot = (*slot).max(mu.v()[d]);
            }
        }
        let extents = crate::cubical::Extents::new(k.iter().map(|&x| x as u32).collect())
            .map_err(WallError::Cubical)?;
        let complex = Complex::new(extents);
        let mut table = BTreeMap::new();
        for (xi, mu, s) in records {
            table.insert((xi, mu), s);
        }
        WallLabeling::new(complex, table)
    }

    /// Necessary condition for ramp realizability: for every interior vertex
    /// and direction, the ±1 level sets of the wall sign on the top-star
    /// hypercube graph must each induce a connected subgraph.
    pub fn vertex_monotonicity(&self) -> Result<(), (Cell, usize)> {
        let x = &self.complex;
        let n = x.dims();
        for sigma in x.cells() {
            if sigma.dim() != 0 || x.is_boundary(sigma) {
                continue;
            }
            let tops = x.top_star(sigma);
            for dir in 0..n {
                let values: Vec<Sign> = tops
                    .iter()
                    .map(|mu| {
                        let wall = x.wall_in_direction(sigma, mu, dir);
                        self.get(&wall, mu)
                    })
                    .collect();
                for sign in [1i8, -1] {
                    if !level_set_connected(&tops, &values, sign) {
                        return Err((sigma.clone(), dir));
                    }
                }
            }
        }
        Ok(())
    }
}

fn level_set_connected(tops: &[Cell], values: &[Sign], sign: Sign) -> bool {
    let members: Vec<usize> = (0..tops.len()).filter(|&i| values[i] == sign).collect();
    if members.len() <= 1 {
        return true;
    }
    let adjacent =
        |a: &Cell, b: &Cell| a.v().iter().zip(b.v()).filter(|(x, y)| x != y).count() == 1;
    let mut seen = vec![false; members.len()];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for j in 0..members.len() {
            if !seen[j] && adjacent(&tops[members[i]], &tops[members[j]]) {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen.into_iter().all(|b| b)
}

/// Classification of a face pair by the rook field on the extension
/// directions: all top cells agree with the position vector (exit), all
/// oppose it (entrance), or neither.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Crossing {
    Exit,
    Entrance,
    Neither,
}

/// Per-cell direction classes and the regulation map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectionClasses {
    /// Gradient directions: rook field constant ±1 over the top star.
    pub gradient: Vec<usize>,
    /// Neutral directions: 0 attained over the top star.
    pub neutral: Vec<usize>,
    /// Opaque directions: both +1 and -1 attained, never 0.
    pub opaque: Vec<usize>,
    /// Actively regulating directions.
    pub act: Vec<usize>,
    /// Regulation map on `act`: `regulates[i]` is the direction whose rook
    /// component disagrees across some `act[i]`-wall pair of the cell.
    pub regulates: Vec<usize>,
}

impl DirectionClasses {
    pub fn is_equilibrium(&self) -> bool {
        self.gradient.is_empty()
    }

    pub fn is_regular(&self) -> bool {
        !self.is_equilibrium()
    }

    pub fn regulation(&self, n: usize) -> Option<usize> {
        self.act
            .iter()
            .position(|&a| a == n)
            .map(|i| self.regulates[i])
    }

    /// The regulation map restricted to `act` is a bijection onto `act`.
    pub fn is_semi_opaque(&self) -> bool {
        let mut hit = vec![false; self.act.len()];
        for &r in &self.regulates {
            match self.act.iter().position(|&a| a == r) {
                Some(i) if !hit[i] => hit[i] = true,
                _ => return false,
            }
        }
        true
    }

    /// Disjoint cycles of length >= 2 in the regulation map whose support
    /// consists of opaque directions.
    ///
    /// A cycle through a gradient direction is a bookkeeping artifact (the
    /// flow is monotone there, so no rotation exists); treating it as a real
    /// cycle severs the cell from its cofaces and breaks the unique-minimum
    /// property of the extended grading.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        if !self.is_semi_opaque() {
            return Vec::new();
        }
        let mut cycles = Vec::new();
        let mut seen = vec![false; self.act.len()];
        for start in 0..self.act.len() {
            if seen[start] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cyc.push(self.act[i]);
                let r = self.regulates[i];
                i = self.act.iter().position(|&a| a == r).unwrap();
            }
            if cyc.len() >= 2 && cyc.iter().all(|d| self.opaque.contains(d)) {
                cycles.push(cyc);
            }
        }
        cycles
    }
}

/// The rook field of a wall labeling: a `{0,±1}^N` vector for every
/// (cell, containing top cell) pair, tabulated per cell over its top star.
#[derive(Debug, Clone)]
pub struct RookField {
    labeling: WallLabeling,
    /// `rows[cell index]` lists `(top cell index, Φ(cell, top))` in top-cell order.
    rows: Vec<Vec<(usize, Vec<Sign>)>>,
    classes: Vec<DirectionClasses>,
    opaque: Vec<bool>,
}

impl RookField {
    /// Builds the rook field. The labeling must be valid and strongly
    /// dissipative; both are enforced here.
    pub fn new(labeling: WallLabeling) -> Result<Self, WallError> {
        labeling.validate()?;
        if let Some((xi, mu)) = labeling.first_dissipativity_violation() {
            return Err(WallError::NotDissipative(xi, mu));
        }
        Ok(Self::new_unchecked(labeling))
    }

    pub(crate) fn new_unchecked(labeling: WallLabeling) -> Self {
        let x = labeling.complex().clone();
        let n = x.dims();
        let mut rows = Vec::with_capacity(x.len());
        for c in x.cells() {
            let mut row = Vec::new();
            for mu in x.top_star(c) {
                let mut phi = vec![0i8; n];
                for (d, slot) in phi.iter_mut().enumerate() {
                    if c.w()[d] == 0 {
                        let wall = x.wall_in_direction(c, &mu, d);
                        *slot = labeling.get(&wall, &mu);
                    } else {
                        let mut lw = mu.w().to_vec();
                        lw[d] = 0;
                        let left = Cell::new(mu.v().to_vec(), lw.clone());
                        let mut rv = mu.v().to_vec();
                        rv[d] += 1;
                        let right = Cell::new(rv, lw);
                        let (a, b) = (labeling.get(&left, &mu), labeling.get(&right, &mu));
                        *slot = if a == b { a } else { 0 };
                    }
                }
                let t = x.index_of(&mu).unwrap();
                row.push((t, phi));
            }
            rows.push(row);
        }
        let mut field = RookField {
            labeling,
            rows,
            classes: Vec::new(),
            opaque: Vec::new(),
        };
        field.classes = (0..field.complex().len())
            .map(|i| field.compute_classes(i))
            .collect();
        field.opaque = (0..field.complex().len())
            .map(|i| {
                let c = field.complex().cell(i);
                !c.is_top()
                    && c.inessential()
                        .iter()
                        .all(|d| field.classes[i].opaque.contains(d))
            })
            .collect();
        field
    }

    pub fn labeling(&self) -> &WallLabeling {
        &self.labeling
    }

    pub fn complex(&self) -> &Complex {
        self.labeling.complex()
    }

    /// `Φ(cell, top)` for a top cell in the star of `cell`.
    pub fn phi(&self, cell: &Cell, top: &Cell) -> &[Sign] {
        let ci = self.complex().index_of(cell).expect("cell in complex");
        let ti = self.complex().index_of(top).expect("top in complex");
        &self.rows[ci]
            .iter()
            .find(|(t, _)| *t == ti)
            .expect("top cell in star")
            .1
    }

    /// The tabulated `(top index, Φ)` row of a cell.
    pub fn row(&self, cell_idx: usize) -> &[(usize, Vec<Sign>)] {
        &self.rows[cell_idx]
    }

    /// Value set `R_n(cell)` of the rook component over the top star.
    pub fn value_set(&self, cell: &Cell, n: usize) -> Vec<Sign> {
        let ci = self.complex().index_of(cell).expect("cell in complex");
        let mut vals: Vec<Sign> = self.rows[ci].iter().map(|(_, phi)| phi[n]).collect();
        vals.sort_unstable();
        vals.dedup();
        vals
    }

    pub fn classes(&self, cell: &Cell) -> &DirectionClasses {
        &self.classes[self.complex().index_of(cell).expect("cell in complex")]
    }

    pub fn classes_at(&self, idx: usize) -> &DirectionClasses {
        &self.classes[idx]
    }

    /// Opaque cells: non-top cells with every inessential direction opaque.
    pub fn is_opaque(&self, cell: &Cell) -> bool {
        self.opaque[self.complex().index_of(cell).expect("cell in complex")]
    }

    fn compute_classes(&self, ci: usize) -> DirectionClasses {
        let x = self.complex();
        let n = x.dims();
        let c = x.cell(ci);
        let mut gradient = Vec::new();
        let mut neutral = Vec::new();
        let mut opaque = Vec::new();
        for d in 0..n {
            let vals = {
                let mut v: Vec<Sign> = self.rows[ci].iter().map(|(_, phi)| phi[d]).collect();
                v.sort_unstable();
                v.dedup();
                v
            };
            if vals.contains(&0) {
                neutral.push(d);
            } else if vals.len() == 2 {
                opaque.push(d);
            } else {
                gradient.push(d);
            }
        }
        // active regulation: group the d-walls of the cell and look for a
        // component of Φ that disagrees between two top cofaces of one wall
        let mut act = Vec::new();
        let mut regulates = Vec::new();
        for d in 0..n {
            if c.w()[d] != 0 {
                continue;
            }
            let mut by_wall: BTreeMap<Cell, Vec<&Cell>> = BTreeMap::new();
            let tops = x.top_star(c);
            for mu in &tops {
                by_wall
                    .entry(x.wall_in_direction(c, mu, d))
                    .or_default()
                    .push(mu);
            }
            let mut target: Option<usize> = None;
            for (wall, mus) in &by_wall {
                for (i, mu) in mus.iter().enumerate() {
                    for mu2 in mus.iter().skip(i + 1) {
                        for k in 0..n {
                            if self.phi(wall, mu)[k] != self.phi(wall, mu2)[k] {
                                debug_assert!(
                                    target.is_none() || target == Some(k),
                                    "ambiguous regulation target at {c}"
                                );
                                target = Some(k);
                            }
                        }
                    }
                }
            }
            if let Some(k) = target {
                act.push(d);
                regulates.push(k);
            }
        }
        DirectionClasses {
            gradient,
            neutral,
            opaque,
            act,
            regulates,
        }
    }

    /// Exit/entrance classification of a strict face pair.
    pub fn crossing(&self, a: &Cell, b: &Cell) -> Result<Crossing, WallError> {
        let x = self.complex();
        if a == b || !x.is_face(a, b)? {
            return Err(WallError::Cubical(CubicalError::NotAFace(
                a.clone(),
                b.clone(),
            )));
        }
        let p = x.relative_position(a, b)?;
        let ext = x.extensions(a, b);
        let mut all_exit = true;
        let mut all_entrance = true;
        for mu in x.top_star(b) {
            let phi = self.phi(a, &mu);
            for &n in &ext {
                if phi[n] as i32 != p[n] {
                    all_exit = false;
                }
                if phi[n] as i32 != -p[n] {
                    all_entrance = false;
                }
            }
        }
        Ok(match (all_exit, all_entrance) {
            (true, false) => Crossing::Exit,
            (false, true) => Crossing::Entrance,
            _ => Crossing::Neither,
        })
    }

    /// Lap number of a top cell `mu` of a semi-opaque cell, for one cycle of
    /// the regulation map given as the list of directions it permutes.
    pub fn lap_number(&self, xi: &Cell, cycle: &[usize], mu: &Cell) -> Result<u32, WallError> {
        let classes = self.classes(xi);
        let valid_cycle = !cycle.is_empty()
            && classes.is_semi_opaque()
            && cycle
                .iter()
                .zip(cycle.iter().cycle().skip(1))
                .all(|(&a, &b)| classes.regulation(a) == Some(b));
        if !valid_cycle {
            return Err(WallError::NotACycle(format!("{cycle:?}"), xi.clone()));
        }
        let x = self.complex();
        let kappa = Cell::new(xi.v().to_vec(), vec![1; x.dims()]);
        if !x.contains(&kappa) {
            return Err(WallError::Cubical(CubicalError::NotACell(kappa)));
        }
        let p = x.relative_position(xi, mu)?;
        let mut count = 0;
        for (i, &n) in cycle.iter().enumerate() {
            let sn = cycle[(i + 1) % cycle.len()];
            let mut w = kappa.w().to_vec();
            w[sn] = 0;
            let wall = Cell::new(kappa.v().to_vec(), w);
            let omega = self.labeling.get(&wall, &kappa) as i32;
            if omega * p[n] * p[sn] < 0 {
                count += 1;
            }
        }
        Ok(count)
    }
}

impl fmt::Display for WallLabeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
