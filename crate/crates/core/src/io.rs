//! JSON canvas files and DOT export.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canvas::{Canvas, Colour, Colouring, Precoloured};
use crate::girth::{girth_profile, Girth};
use crate::plane_graph::{GraphError, PlaneGraph, VertexId};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad graph: {0}")]
    Graph(#[from] GraphError),
    #[error("n = {n} but {found} rotations given")]
    VertexCount { n: usize, found: usize },
    #[error("vertex {0} out of range")]
    UnknownVertex(VertexId),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CanvasFile {
    pub n: usize,
    pub rotations: Vec<Vec<VertexId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer_edge: Option<[VertexId; 2]>,
    #[serde(default)]
    pub lists: BTreeMap<VertexId, Vec<Colour>>,
    #[serde(rename = "S", default)]
    pub s: Vec<VertexId>,
    #[serde(rename = "S_is_cycle", default)]
    pub s_is_cycle: bool,
    #[serde(rename = "A", default)]
    pub a: Vec<VertexId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<BTreeMap<VertexId, Colour>>,
}

impl CanvasFile {
    pub fn from_canvas(k: &Canvas, phi: Option<&Colouring>) -> Self {
        let g = &k.graph;
        CanvasFile {
            n: g.n(),
            rotations: g.rotations().to_vec(),
            outer_edge: g.outer_edge().map(|(u, v)| [u, v]),
            lists: k
                .lists
                .iter()
                .enumerate()
                .map(|(v, l)| (v, l.iter().copied().collect()))
                .collect(),
            s: k.s.vertices().to_vec(),
            s_is_cycle: k.s.is_cycle(),
            a: k.a.iter().copied().collect(),
            phi: phi.map(colouring_map),
        }
    }

    /// Vertices without an entry in `lists` get an empty list.
    pub fn to_canvas(&self) -> Result<(Canvas, Option<Colouring>), IoError> {
        if self.rotations.len() != self.n {
            return Err(IoError::VertexCount {
                n: self.n,
                found: self.rotations.len(),
            });
        }
        let n = self.n;
        let check = |v: VertexId| {
            if v < n {
                Ok(v)
            } else {
                Err(IoError::UnknownVertex(v))
            }
        };
        let g = PlaneGraph::new(self.rotations.clone(), self.outer_edge.map(|[u, v]| (u, v)))?;
        let mut lists = vec![BTreeSet::new(); n];
        for (&v, l) in &self.lists {
            lists[check(v)?] = l.iter().copied().collect();
        }
        for &v in self.s.iter().chain(&self.a) {
            check(v)?;
        }
        let s = if self.s_is_cycle {
            Precoloured::Cycle(self.s.clone())
        } else {
            Precoloured::Path(self.s.clone())
        };
        let phi = match &self.phi {
            Some(m) => {
                let mut phi = Colouring::empty(n);
                for (&v, &c) in m {
                    phi.set(check(v)?, c);
                }
                Some(phi)
            }
            None => None,
        };
        Ok((
            Canvas::new(g, lists, s, self.a.iter().copied().collect()),
            phi,
        ))
    }
}

pub fn colouring_map(phi: &Colouring) -> BTreeMap<VertexId, Colour> {
    phi.coloured().collect()
}

pub fn load_canvas(text: &str) -> Result<(Canvas, Option<Colouring>), IoError> {
    serde_json::from_str::<CanvasFile>(text)?.to_canvas()
}

pub fn store_canvas(k: &Canvas, phi: Option<&Colouring>) -> String {
    let mut out = serde_json::to_string_pretty(&CanvasFile::from_canvas(k, phi))
        .expect("canvas files always serialize");
    out.push('\n');
    out
}

fn girth_label(g: Girth) -> String {
    match g {
        Girth::Finite(x) => x.to_string(),
        Girth::Infinite => "inf".into(),
    }
}

/// Graphviz rendering: S filled, A as diamonds, colours (if any) appended.
pub fn to_dot(k: &Canvas, phi: Option<&Colouring>) -> String {
    let g = &k.graph;
    let p = girth_profile(g);
    let mut out = String::from("graph canvas {\n  node [shape=circle];\n");
    for v in 0..g.n() {
        let list: Vec<String> = k.lists[v].iter().map(|c| c.to_string()).collect();
        let mut label = format!("v{v} g={} L={{{}}}", girth_label(p.of(v)), list.join(","));
        if let Some(c) = phi.and_then(|phi| phi.get(v)) {
            let _ = write!(label, " c={c}");
        }
        let mut attrs = vec![format!("label=\"{label}\"")];
        if k.s.contains(v) {
            attrs.push("style=filled".into());
            attrs.push("fillcolor=gray30".into());
            attrs.push("fontcolor=white".into());
        }
        if k.a.contains(&v) && !k.s.contains(v) {
            attrs.push("shape=diamond".into());
        }
        let _ = writeln!(out, "  {v} [{}];", attrs.join(", "));
    }
    for (u, v) in g.edges() {
        let _ = writeln!(out, "  {u} -- {v};");
    }
    out.push_str("}\n");
    out
}
