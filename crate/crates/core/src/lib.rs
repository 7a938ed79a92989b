//! List colouring of plane graphs from local girth list assignments.

pub mod canvas;
pub mod engine;
pub mod generator;
pub mod girth;
pub mod io;
pub mod oracle;
pub mod plane_graph;
pub mod wheels;
