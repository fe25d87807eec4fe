//! Multivalued state-transition models derived from a rook field, their
//! strongly connected components, and the Morse graph.
//!
//! Four nested models are built on the cells of the complex: the trivial map
//! keeps every face pair bidirectional; the first refinement removes edges
//! against crossing directions; the second resolves indecisive drift via back
//! walls; the third resolves regulation cycles with lap numbers (defined up
//! to ambient dimension three).

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::cubical::Cell;
use crate::poset::Poset;
use crate::walls::{Crossing, RookField, Sign, WallError};

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Wall(#[from] WallError),
    #[error("the cycle-resolving model is undefined above dimension 3 (N = {0})")]
    DimensionTooHigh(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Model {
    F0,
    F1,
    F2,
    F3,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Model::F0 => "f0",
            Model::F1 => "f1",
            Model::F2 => "f2",
            Model::F3 => "f3",
        };
        f.write_str(s)
    }
}

/// Directed graph on cell indices realizing one of the multivalued models.
#[derive(Debug, Clone)]
pub struct Stg {
    pub model: Model,
    /// Sorted out-neighbor lists, indexed by cell index.
    pub adj: Vec<Vec<u32>>,
}

impl Stg {
    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.adj[from].binary_search(&(to as u32)).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn double_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, outs) in self.adj.iter().enumerate() {
            for &b in outs {
                let b = b as usize;
                if a < b && self.has_edge(b, a) {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// A face pair exhibiting indecisive drift, with the data that resolves it.
#[derive(Debug, Clone)]
pub struct DriftRecord {
    pub cell: Cell,
    pub coface: Cell,
    /// The single extension direction (opaque in the cell).
    pub n_o: usize,
    /// Gradient directions of the coface witnessing the drift; the first is
    /// used as the canonical gradient partner.
    pub n_g: Vec<usize>,
    /// Back walls `(wall cell, top cell)`.
    pub back: Vec<(Cell, Cell)>,
    /// Drift values over the top star of the coface, in top-star order.
    pub drift: Vec<(Cell, Sign)>,
    /// The common nonzero drift value.
    pub dir: Sign,
    /// Positive and negative drift cells (one is `cell`, the other `coface`).
    pub d_plus: Cell,
    pub d_minus: Cell,
}

/// Builds the trivial model: self-loops plus both directions on every
/// codimension-one face pair.
pub fn f0(field: &RookField) -> Stg {
    let x = field.complex();
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); x.len()];
    for (i, c) in x.cells().iter().enumerate() {
        adj[i].push(i as u32);
        for up in x.cofacets(c) {
            let j = x.index_of(&up).unwrap();
            adj[i].push(j as u32);
            adj[j].push(i as u32);
        }
    }
    for outs in &mut adj {
        outs.sort_unstable();
        outs.dedup();
    }
    Stg {
        model: Model::F0,
        adj,
    }
}

/// First refinement: no self-loop on cells with a gradient direction, and no
/// edge against an exit/entrance crossing.
pub fn f1(field: &RookField) -> Stg {
    let mut stg = f0(field);
    stg.model = Model::F1;
    refine_f1(field, &mut stg);
    stg
}

fn refine_f1(field: &RookField, stg: &mut Stg) {
    let x = field.complex();
    for (i, c) in x.cells().iter().enumerate() {
        if !field.classes_at(i).gradient.is_empty() {
            remove_edge(stg, i, i);
        }
        for up in x.cofacets(c) {
            let j = x.index_of(&up).unwrap();
            match field.crossing(c, &up).expect("cofacet pair") {
                Crossing::Exit => remove_edge(stg, i, j),
                Crossing::Entrance => remove_edge(stg, j, i),
                Crossing::Neither => {}
            }
        }
    }
}

fn remove_edge(stg: &mut Stg, from: usize, to: usize) {
    if let Ok(pos) = stg.adj[from].binary_search(&(to as u32)) {
        stg.adj[from].remove(pos);
    }
}

/// Detects every face pair exhibiting indecisive drift and assembles its
/// resolving data. Shared by the second and third refinements.
pub fn detect_drift(field: &RookField) -> Vec<DriftRecord> {
    let x = field.complex();
    let mut out = Vec::new();
    for (i, c) in x.cells().iter().enumerate() {
        let classes = field.classes_at(i);
        for up in x.cofacets(c) {
            let ext = x.extensions(c, &up);
            debug_assert_eq!(ext.len(), 1);
            let n_o = ext[0];
            // gradient directions of the coface that actively regulate the
            // extension across adjacent top-cell pairs
            let up_classes = field.classes(&up);
            let tops = x.top_star(&up);
            let mut witnesses = Vec::new();
            for &g in &up_classes.gradient {
                if up.w()[g] != 0 {
                    continue; // must be inessential in the coface
                }
                let mut found = false;
                'scan: for (a, mu) in tops.iter().enumerate() {
                    for mu2 in tops.iter().skip(a + 1) {
                        let diff: Vec<usize> =
                            (0..x.dims()).filter(|&d| mu.v()[d] != mu2.v()[d]).collect();
                        if diff == [g] && field.phi(c, mu)[n_o] != field.phi(c, mu2)[n_o] {
                            found = true;
                            break 'scan;
                        }
                    }
                }
                if found {
                    witnesses.push(g);
                }
            }
            if witnesses.is_empty() {
                continue;
            }
            // indecisiveness: every other inessential opaque direction is a
            // fixed point of the regulation map with no other preimage
            let indecisive = classes
                .opaque
                .iter()
                .filter(|&&n| c.w()[n] == 0 && n != n_o)
                .all(|&n| {
                    classes.regulation(n) == Some(n)
                        && classes
                            .act
                            .iter()
                            .zip(&classes.regulates)
                            .all(|(&a, &r)| r != n || a == n)
                });
            if !indecisive {
                continue;
            }
            // back walls; candidates displaced past the boundary do not
            // exist, and a pair without any back wall stays unresolved
            let free: Vec<usize> = up.inessential();
            let choice_sets: Vec<Vec<Sign>> = free.iter().map(|&n| field.value_set(c, n)).collect();
            debug_assert!(choice_sets.iter().flatten().all(|&r| r != 0));
            let mut back = Vec::new();
            let mut idx = vec![0usize; free.len()];
            loop {
                let mut v_hat = vec![0i32; x.dims()];
                for (slot, &n) in free.iter().enumerate() {
                    let r = choice_sets[slot][idx[slot]] as i32;
                    v_hat[n] = (1 + r) / 2;
                }
                let mut wv = c.v().to_vec();
                let mut tv = up.v().to_vec();
                for d in 0..x.dims() {
                    wv[d] -= v_hat[d];
                    tv[d] -= v_hat[d];
                }
                let mut ww = vec![1i32; x.dims()];
                ww[n_o] = 0;
                let wall = Cell::new(wv, ww);
                let topc = Cell::new(tv, vec![1; x.dims()]);
                if x.contains(&wall) && x.contains(&topc) {
                    debug_assert!(x.is_face(c, &wall).unwrap());
                    back.push((wall, topc));
                }
                // advance the mixed-radix choice index
                let mut slot = 0;
                loop {
                    if slot == free.len() {
                        break;
                    }
                    idx[slot] += 1;
                    if idx[slot] < choice_sets[slot].len() {
                        break;
                    }
                    idx[slot] = 0;
                    slot += 1;
                }
                if idx.iter().all(|&i| i == 0) {
                    break;
                }
            }
            back.sort();
            back.dedup();
            if back.is_empty() {
                continue;
            }
            let back_phi = field.phi(&back[0].0, &back[0].1)[n_o];
            debug_assert!(
                back.iter().all(|(w, t)| field.phi(w, t)[n_o] == back_phi),
                "back-wall sign not constant at ({c}, {up})"
            );
            // drift map over the top star of the coface
            let drift: Vec<(Cell, Sign)> = tops
                .iter()
                .map(|mu| {
                    let v = field.phi(c, mu)[n_o];
                    (mu.clone(), if v == back_phi { 0 } else { v })
                })
                .collect();
            let support: Vec<Sign> = drift.iter().map(|(_, s)| *s).filter(|&s| s != 0).collect();
            debug_assert!(!support.is_empty());
            debug_assert!(support.windows(2).all(|w| w[0] == w[1]));
            let dir = support[0];
            let p = x.relative_position(c, &up).unwrap()[n_o];
            let (d_plus, d_minus) = if p * dir as i32 == 1 {
                (up.clone(), c.clone())
            } else {
                (c.clone(), up.clone())
            };
            out.push(DriftRecord {
                cell: c.clone(),
                coface: up.clone(),
                n_o,
                n_g: witnesses,
                back,
                drift,
                dir,
                d_plus,
                d_minus,
            });
        }
    }
    out
}

/// Second refinement: resolves each indecisive-drift pair by the crossing
/// class of its back wall.
pub fn f2(field: &RookField) -> Stg {
    let records = detect_drift(field);
    f2_with_drift(field, &records)
}

pub fn f2_with_drift(field: &RookField, records: &[DriftRecord]) -> Stg {
    let mut stg = f1(field);
    stg.model = Model::F2;
    apply_drift(field, records, &mut stg);
    stg
}

fn apply_drift(field: &RookField, records: &[DriftRecord], stg: &mut Stg) {
    let x = field.complex();
    for rec in records {
        let (wall, topc) = &rec.back[0];
        let i = x.index_of(&rec.cell).unwrap();
        let j = x.index_of(&rec.coface).unwrap();
        match field.crossing(wall, topc).expect("back wall pair") {
            Crossing::Exit => remove_edge(stg, i, j),
            Crossing::Entrance => remove_edge(stg, j, i),
            Crossing::Neither => unreachable!("walls are exit or entrance"),
        }
    }
}

/// Third refinement, defined for ambient dimension at most three: removes
/// edges into cycle directions of semi-opaque cells and adds the unstable
/// cells determined by lap numbers.
pub fn f3(field: &RookField) -> Result<Stg, DynamicsError> {
    let records = detect_drift(field);
    f3_with_drift(field, &records)
}

pub fn f3_with_drift(field: &RookField, records: &[DriftRecord]) -> Result<Stg, DynamicsError> {
    let x = field.complex();
    let n = x.dims();
    if n > 3 {
        return Err(DynamicsError::DimensionTooHigh(n));
    }
    let mut stg = f2_with_drift(field, records);
    stg.model = Model::F3;
    for (i, c) in x.cells().iter().enumerate() {
        if c.is_top() {
            continue;
        }
        let classes = field.classes_at(i);
        if !classes.is_semi_opaque() {
            continue;
        }
        let cycles = classes.cycles();
        if cycles.is_empty() {
            continue;
        }
        // cells pressed against the far boundary have no ambient top cell at
        // their own position; lap numbers are undefined there and no
        // unstable cells are added
        let kappa = Cell::new(c.v().to_vec(), vec![1; n]);
        let kappa_ok = x.contains(&kappa);
        for cycle in &cycles {
            // strict cofaces whose extensions lie inside the cycle support
            for (j, up) in x.cells().iter().enumerate() {
                if j == i || !x.is_face(c, up).unwrap() {
                    continue;
                }
                let ext = x.extensions(c, up);
                if ext.is_empty() || !ext.iter().all(|d| cycle.contains(d)) {
                    continue;
                }
                if up.dim() == c.dim() + 1 {
                    remove_edge(&mut stg, i, j);
                } else if kappa_ok {
                    let unstable = x.top_star(up).iter().all(|mu| {
                        let lap = field.lap_number(c, cycle, mu).expect("cycle is valid");
                        (lap as usize) * 2 < cycle.len()
                    });
                    if unstable {
                        insert_edge(&mut stg, i, j);
                    }
                }
            }
        }
    }
    Ok(stg)
}

fn insert_edge(stg: &mut Stg, from: usize, to: usize) {
    if let Err(pos) = stg.adj[from].binary_search(&(to as u32)) {
        stg.adj[from].insert(pos, to as u32);
    }
}

pub fn build(field: &RookField, model: Model) -> Result<Stg, DynamicsError> {
    match model {
        Model::F0 => Ok(f0(field)),
        Model::F1 => Ok(f1(field)),
        Model::F2 => Ok(f2(field)),
        Model::F3 => f3(field),
    }
}

/// The strongly-connected-component quotient of a state-transition graph,
/// with the condensation order.
#[derive(Debug, Clone)]
pub struct Grading {
    /// Component id per cell index.
    pub component_of: Vec<usize>,
    /// Member cell indices per component, ascending.
    pub members: Vec<Vec<u32>>,
    /// A component is recurrent when it carries an edge of the model.
    pub recurrent: Vec<bool>,
    /// Condensation out-neighbors (toward smaller elements), per component.
    pub successors: Vec<Vec<usize>>,
    /// Reachability order: `le(a, b)` when `a` is reachable from `b`.
    pub poset: Poset,
}

impl Grading {
    /// Computes components with Tarjan's algorithm and numbers them along a
    /// linear extension of the condensation order, minimal elements first,
    /// ties broken by smallest member cell.
    pub fn new(stg: &Stg) -> Self {
        let n = stg.adj.len();
        let raw = tarjan(&stg.adj);
        let ncomp = raw.comp_count;
        let mut members_raw: Vec<Vec<u32>> = vec![Vec::new(); ncomp];
        for v in 0..n {
            members_raw[raw.comp_of[v]].push(v as u32);
        }
        // condensation edges on raw ids
        let mut succ_raw: Vec<Vec<usize>> = vec![Vec::new(); ncomp];
        let mut pred_count = vec![0usize; ncomp];
        {
            let mut seen: Vec<std::collections::BTreeSet<usize>> =
                vec![std::collections::BTreeSet::new(); ncomp];
            for v in 0..n {
                for &w in &stg.adj[v] {
                    let (a, b) = (raw.comp_of[v], raw.comp_of[w as usize]);
                    if a != b && seen[a].insert(b) {
                        succ_raw[a].push(b);
                        pred_count[b] += 1;
                    }
                }
            }
        }
        // Kahn from the minimal (sink) side: number components whose
        // successors are all numbered, smallest member cell first.
        let mut out_remaining: Vec<usize> = succ_raw.iter().map(Vec::len).collect();
        let mut pred_lists: Vec<Vec<usize>> = vec![Vec::new(); ncomp];
        for (a, outs) in succ_raw.iter().enumerate() {
            for &b in outs {
                pred_lists[b].push(a);
            }
        }
        let mut heap = std::collections::BinaryHeap::new();
        for c in 0..ncomp {
            if out_remaining[c] == 0 {
                heap.push(std::cmp::Reverse((members_raw[c][0], c)));
            }
        }
        let mut new_id = vec![usize::MAX; ncomp];
        let mut order = Vec::with_capacity(ncomp);
        while let Some(std::cmp::Reverse((_, c))) = heap.pop() {
            new_id[c] = order.len();
            order.push(c);
            for &p in &pred_lists[c] {
                out_remaining[p] -= 1;
                if out_remaining[p] == 0 {
                    heap.push(std::cmp::Reverse((members_raw[p][0], p)));
                }
            }
        }
        debug_assert_eq!(order.len(), ncomp);
        let component_of: Vec<usize> = raw.comp_of.iter().map(|&c| new_id[c]).collect();
        let members: Vec<Vec<u32>> = order.iter().map(|&c| members_raw[c].clone()).collect();
        let successors: Vec<Vec<usize>> = order
            .iter()
            .map(|&c| {
                let mut s: Vec<usize> = succ_raw[c].iter().map(|&b| new_id[b]).collect();
                s.sort_unstable();
                s
            })
            .collect();
        let recurrent: Vec<bool> = (0..ncomp)
            .map(|c| {
                members[c].len() > 1 || stg.has_edge(members[c][0] as usize, members[c][0] as usize)
            })
            .collect();
        let poset = Poset::from_predecessors(ncomp, &successors);
        Grading {
            component_of,
            members,
            recurrent,
            successors,
            poset,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// One node of the Morse graph.
#[derive(Debug, Clone)]
pub struct MorseNode {
    /// Component id in the full condensation.
    pub component: usize,
    /// Member cells.
    pub cells: Vec<Cell>,
    pub recurrent: bool,
    /// The component's cells share a gradient direction.
    pub common_gradient: bool,
    /// Recurrent with a common gradient direction.
    pub spurious: bool,
}

/// The poset of recurrent components without a common gradient direction.
#[derive(Debug, Clone)]
pub struct MorseGraph {
    pub nodes: Vec<MorseNode>,
    /// Hasse edges `(from, to)` with `to` below `from`, on node indices.
    pub edges: Vec<(usize, usize)>,
    /// Node index per retained component id.
    pub node_of_component: BTreeMap<usize, usize>,
}

impl MorseGraph {
    pub fn new(grading: &Grading, field: &RookField) -> Self {
        let x = field.complex();
        let n = x.dims();
        let mut nodes = Vec::new();
        let mut node_of_component = BTreeMap::new();
        for (comp, members) in grading.members.iter().enumerate() {
            let mut common: Vec<bool> = vec![true; n];
            for &ci in members {
                let g = &field.classes_at(ci as usize).gradient;
                for (d, slot) in common.iter_mut().enumerate() {
                    if !g.contains(&d) {
                        *slot = false;
                    }
                }
            }
            let common_gradient = common.into_iter().any(|b| b);
            let recurrent = grading.recurrent[comp];
            let spurious = recurrent && common_gradient;
            debug_assert!(
                recurrent || common_gradient,
                "non-recurrent component without gradient direction"
            );
            if recurrent && !common_gradient {
                node_of_component.insert(comp, nodes.len());
                nodes.push(MorseNode {
                    component: comp,
                    cells: members
                        .iter()
                        .map(|&ci| x.cell(ci as usize).clone())
                        .collect(),
                    recurrent,
                    common_gradient,
                    spurious,
                });
            }
        }
        let keep: Vec<usize> = nodes.iter().map(|nd| nd.component).collect();
        let edges: Vec<(usize, usize)> = grading
            .poset
            .hasse_edges_restricted(&keep)
            .into_iter()
            .map(|(a, b)| (node_of_component[&a], node_of_component[&b]))
            .collect();
        MorseGraph {
            nodes,
            edges,
            node_of_component,
        }
    }
}

struct TarjanResult {
    comp_of: Vec<usize>,
    comp_count: usize,
}

/// Iterative Tarjan over the adjacency lists.
fn tarjan(adj: &[Vec<u32>]) -> TarjanResult {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut comp_of = vec![usize::MAX; n];
    let mut comp_count = 0;
    let mut counter = 0;
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        call.push((root, 0));
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut ei)) = call.last_mut() {
            if *ei < adj[v].len() {
                let w = adj[v][*ei] as usize;
                *ei += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("stack underflow");
                        on_stack[w] = false;
                        comp_of[w] = comp_count;
                        if w == v {
                            break;
                        }
                    }
                    comp_count += 1;
                }
            }
        }
    }
    TarjanResult {
        comp_of,
        comp_count,
    }
}
