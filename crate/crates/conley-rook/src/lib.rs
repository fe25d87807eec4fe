//! Rigorous combinatorial characterization of global ODE dynamics.
//!
//! The pipeline starts from a wall labeling on an abstract cubical complex —
//! either supplied directly or generated from ramp-system / regulatory-network
//! parameters — derives the rook field, builds a hierarchy of multivalued
//! state-transition models, grades the blow-up complex by strongly connected
//! components, and reduces the graded chain complex over GF(2) to read off
//! Morse graphs, Conley indices and connection matrices.

pub mod blowup;
pub mod conley;
pub mod cubical;
pub mod dynamics;
pub mod fixtures;
pub mod pipeline;
pub mod poset;
pub mod ramp;
pub mod walls;
