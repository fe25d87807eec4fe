//! End-to-end runs: from an input labeling or parameter file to the exported
//! JSON documents. This is the layer the command-line binary drives.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::blowup::{BlowupComplex, BlowupError, ExtendedGrading};
use crate::conley::{self, ConleyComplex, ConleyError, GradedComplex};
use crate::cubical::Complex;
use crate::dynamics::{self, DynamicsError, Grading, Model, MorseGraph, Stg};
use crate::ramp::{self, RampError, RampSystem};
use crate::walls::{RookField, WallError, WallLabeling};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("input: {0}")]
    Input(String),
    #[error(transparent)]
    Wall(#[from] WallError),
    #[error(transparent)]
    Ramp(#[from] RampError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Conley(#[from] ConleyError),
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
}

impl From<BlowupError> for PipelineError {
    fn from(e: BlowupError) -> Self {
        match e {
            BlowupError::NonUniqueMinimum { .. } => PipelineError::TheoremViolation(e.to_string()),
            other => PipelineError::Input(other.to_string()),
        }
    }
}

/// Everything computed for one model on one labeling.
pub struct Analysis {
    pub field: RookField,
    pub model: Model,
    pub stg: Stg,
    pub grading: Grading,
    pub morse: MorseGraph,
    pub blowup: BlowupComplex,
    pub extended: ExtendedGrading,
    pub graded: GradedComplex,
    pub conley: ConleyComplex,
}

impl Analysis {
    pub fn new(field: RookField, model: Model) -> Result<Self, PipelineError> {
        let stg = dynamics::build(&field, model)?;
        let grading = Grading::new(&stg);
        let morse = MorseGraph::new(&grading, &field);
        let blowup = BlowupComplex::new(field.complex().clone());
        let extended = ExtendedGrading::new(&blowup, &grading)?;
        let graded = GradedComplex::from_blowup(&blowup, &extended);
        let conley = conley::reduce(&graded);
        Ok(Analysis {
            field,
            model,
            stg,
            grading,
            morse,
            blowup,
            extended,
            graded,
            conley,
        })
    }

    /// Betti vector of one component, from the reduced complex.
    pub fn index_of_component(&self, comp: usize) -> Vec<usize> {
        self.conley
            .betti()
            .get(&comp)
            .cloned()
            .unwrap_or_else(|| vec![0; self.graded.top_degree + 1])
    }

    /// Viewer document for the Morse graph.
    pub fn morse_export(&self) -> MorseExport {
        let nodes = self
            .morse
            .nodes
            .iter()
            .enumerate()
            .map(|(id, node)| MorseNodeExport {
                id: id as u32,
                cells: node.cells.iter().map(|c| c.to_string()).collect(),
                conley_index: self.index_of_component(node.component),
            })
            .collect();
        let edges = self
            .morse
            .edges
            .iter()
            .map(|&(a, b)| [a as u32, b as u32])
            .collect();
        MorseExport { nodes, edges }
    }

    pub fn conley_export(&self) -> conley::ConleyExport {
        conley::ConleyExport::new(&self.conley, "blowup")
    }

    pub fn stg_export(&self) -> StgExport {
        let x = self.field.complex();
        let nodes = x.cells().iter().map(|c| c.to_string()).collect();
        let mut edges = Vec::new();
        for (i, outs) in self.stg.adj.iter().enumerate() {
            for &j in outs {
                edges.push([i as u32, j]);
            }
        }
        StgExport {
            model: self.model.to_string(),
            nodes,
            edges,
        }
    }

    pub fn grading_export(&self) -> GradingExport {
        let x = self.field.complex();
        let components = self
            .grading
            .members
            .iter()
            .enumerate()
            .map(|(id, members)| {
                let node = &self.morse.node_of_component.get(&id);
                ComponentExport {
                    id: id as u32,
                    cells: members
                        .iter()
                        .map(|&i| x.cell(i as usize).to_string())
                        .collect(),
                    recurrent: self.grading.recurrent[id],
                    morse_node: node.map(|&n| n as u32),
                }
            })
            .collect();
        let mut edges = Vec::new();
        for (a, outs) in self.grading.successors.iter().enumerate() {
            for &b in outs {
                edges.push([a as u32, b as u32]);
            }
        }
        GradingExport { components, edges }
    }

    pub fn enumerate_export(&self, max_bits: usize) -> Result<EnumerateExport, PipelineError> {
        let matrices = conley::enumerate_connection_matrices(&self.conley, max_bits)?;
        Ok(EnumerateExport {
            count: matrices.len(),
            matrices: matrices
                .into_iter()
                .map(|m| {
                    m.into_iter()
                        .enumerate()
                        .flat_map(|(i, col)| col.into_iter().map(move |j| [i as u32, j]))
                        .collect()
                })
                .collect(),
        })
    }
}

#[derive(Debug, Serialize)]
pub struct MorseExport {
    pub nodes: Vec<MorseNodeExport>,
    pub edges: Vec<[u32; 2]>,
}

#[derive(Debug, Serialize)]
pub struct MorseNodeExport {
    pub id: u32,
    pub cells: Vec<String>,
    pub conley_index: Vec<usize>,
}

#[derive(Debug, Serialize)]
pub struct StgExport {
    pub model: String,
    pub nodes: Vec<String>,
    pub edges: Vec<[u32; 2]>,
}

#[derive(Debug, Serialize)]
pub struct GradingExport {
    pub components: Vec<ComponentExport>,
    pub edges: Vec<[u32; 2]>,
}

#[derive(Debug, Serialize)]
pub struct ComponentExport {
    pub id: u32,
    pub cells: Vec<String>,
    pub recurrent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub morse_node: Option<u32>,
}

#[derive(Debug, Serialize)]
pub struct EnumerateExport {
    pub count: usize,
    /// Each matrix as its list of unit entries `[from, to]` in the fixed
    /// generator order of the reduced complex.
    pub matrices: Vec<Vec<[u32; 2]>>,
}

#[derive(Debug, Serialize)]
pub struct GeometryExport {
    pub cells: Vec<GeometryRow>,
}

#[derive(Debug, Serialize)]
pub struct GeometryRow {
    pub cell: String,
    pub intervals: Vec<[String; 2]>,
    pub lengths: Vec<String>,
    pub midpoints: Vec<String>,
    pub lower: Vec<String>,
    pub upper: Vec<String>,
}

pub fn geometry_export(sys: &RampSystem, x: &Complex) -> GeometryExport {
    let fmt = |q: &ramp::Rational| format!("{q}");
    let cells = x
        .cells()
        .iter()
        .map(|c| {
            let mut intervals = Vec::new();
            let mut lengths = Vec::new();
            let mut midpoints = Vec::new();
            let mut lower = Vec::new();
            let mut upper = Vec::new();
            for d in 0..x.dims() {
                let geo = sys.cell_geometry(c, d);
                intervals.push([fmt(&geo.interval.0), fmt(&geo.interval.1)]);
                lengths.push(fmt(&geo.length));
                midpoints.push(fmt(&geo.midpoint));
                let (l, u) = sys.rate_bounds(x, c, d);
                lower.push(fmt(&l));
                upper.push(fmt(&u));
            }
            GeometryRow {
                cell: c.to_string(),
                intervals,
                lengths,
                midpoints,
                lower,
                upper,
            }
        })
        .collect();
    GeometryExport { cells }
}

#[derive(Debug, Serialize)]
pub struct HReportExport {
    pub level: u8,
    pub pass: bool,
    pub violations: Vec<HViolationExport>,
    pub flagged_pairs: Vec<[String; 2]>,
    pub suggestions: BTreeMap<String, String>,
}

#[derive(Debug, Serialize)]
pub struct HViolationExport {
    pub level: u8,
    pub cyclic_family: bool,
    pub description: String,
}

pub fn h_report_export(sys: &RampSystem, level: u8) -> Result<HReportExport, PipelineError> {
    let report = sys.h_membership(level)?;
    let mut suggestions = BTreeMap::new();
    for l in [0u8, 1, 3] {
        if l == 3 && sys.dims() > 3 {
            continue;
        }
        if let Ok(h) = sys.suggest_uniform_h(l) {
            suggestions.insert(format!("level{l}"), h.to_string());
        }
    }
    Ok(HReportExport {
        level: report.level,
        pass: report.pass,
        violations: report
            .violations
            .iter()
            .map(|v| HViolationExport {
                level: v.level,
                cyclic_family: v.cyclic_family,
                description: v.description.clone(),
            })
            .collect(),
        flagged_pairs: report
            .flagged_pairs
            .iter()
            .map(|(a, b)| [a.to_string(), b.to_string()])
            .collect(),
        suggestions,
    })
}

/// Loads a wall labeling from one of the three input kinds.
pub fn load_labeling(kind: &str, text: &str) -> Result<WallLabeling, PipelineError> {
    match kind {
        "wall-labeling" => Ok(WallLabeling::from_text(text)?),
        "ramp" | "network" => {
            let spec = ramp::SystemSpec::parse(text)?;
            let sys = spec.build()?;
            Ok(sys.wall_labeling()?)
        }
        other => Err(PipelineError::Input(format!(
            "unknown input kind {other:?}"
        ))),
    }
}

pub fn load_system(text: &str) -> Result<RampSystem, PipelineError> {
    let spec = ramp::SystemSpec::parse(text)?;
    Ok(spec.build()?)
}
