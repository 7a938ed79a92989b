//! Canvases `(G, L, S, A)`: a plane graph, a list assignment, a precoloured
//! boundary path or cycle, and an independent set of boundary vertices
//! carrying 2-lists.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::girth::{girth_class, girth_profile, GirthProfile};
use crate::plane_graph::{PlaneGraph, VertexId};

pub type Colour = u32;
pub type ColourList = BTreeSet<Colour>;
/// Indexed by vertex id.
pub type ListAssignment = Vec<ColourList>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CanvasError {
    #[error("S is not a path of the graph")]
    NotAPath,
    #[error("S is not a cycle of the graph")]
    NotACycle,
    #[error("graph is not a subgraph of the canvas graph")]
    NotASubgraph,
    #[error("restriction of S is not a single path")]
    SNotContiguous,
    #[error("list of vertex {0} became empty")]
    ListExhausted(VertexId),
    #[error("vertex {0} is not coloured")]
    Uncoloured(VertexId),
    #[error("invalid canvas: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<CanvasViolation>),
}

/// The precoloured part `S` of a canvas.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Precoloured {
    Path(Vec<VertexId>),
    Cycle(Vec<VertexId>),
}

impl Default for Precoloured {
    fn default() -> Self {
        Precoloured::Path(vec![])
    }
}

impl Precoloured {
    pub fn vertices(&self) -> &[VertexId] {
        match self {
            Precoloured::Path(p) | Precoloured::Cycle(p) => p,
        }
    }

    pub fn len(&self) -> usize {
        self.vertices().len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices().is_empty()
    }

    pub fn is_cycle(&self) -> bool {
        matches!(self, Precoloured::Cycle(_))
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices().contains(&v)
    }

    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let p = self.vertices();
        let mut out: Vec<_> = p.windows(2).map(|w| (w[0], w[1])).collect();
        if self.is_cycle() && p.len() >= 3 {
            out.push((p[p.len() - 1], p[0]));
        }
        out
    }

    pub fn reversed(&self) -> Precoloured {
        let mut p = self.vertices().to_vec();
        p.reverse();
        match self {
            Precoloured::Path(_) => Precoloured::Path(p),
            Precoloured::Cycle(_) => Precoloured::Cycle(p),
        }
    }
}

/// A partial map from vertices to colours.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Colouring(Vec<Option<Colour>>);

impl Colouring {
    pub fn empty(n: usize) -> Self {
        Colouring(vec![None; n])
    }

    pub fn from_vec(v: Vec<Option<Colour>>) -> Self {
        Colouring(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, v: VertexId) -> Option<Colour> {
        self.0.get(v).copied().flatten()
    }

    pub fn set(&mut self, v: VertexId, c: Colour) {
        self.0[v] = Some(c);
    }

    pub fn unset(&mut self, v: VertexId) {
        self.0[v] = None;
    }

    pub fn as_slice(&self) -> &[Option<Colour>] {
        &self.0
    }

    pub fn is_total(&self) -> bool {
        self.0.iter().all(Option::is_some)
    }

    pub fn coloured(&self) -> impl Iterator<Item = (VertexId, Colour)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(v, c)| c.map(|c| (v, c)))
    }

    /// First edge whose ends share a colour.
    pub fn conflict(&self, g: &PlaneGraph) -> Option<(VertexId, VertexId)> {
        g.edges()
            .into_iter()
            .find(|&(u, v)| self.get(u).is_some() && self.get(u) == self.get(v))
    }

    pub fn is_proper(&self, g: &PlaneGraph) -> bool {
        self.0.len() == g.n() && self.conflict(g).is_none()
    }

    pub fn respects(&self, lists: &ListAssignment) -> bool {
        self.coloured()
            .all(|(v, c)| lists.get(v).is_some_and(|l| l.contains(&c)))
    }

    /// Copies the colours of a colouring of `sub` into this colouring of the
    /// graph `sub` was extracted from.
    pub fn absorb(&mut self, sub: &PlaneGraph, phi: &Colouring) {
        for (v, c) in phi.coloured() {
            self.0[sub.origin(v)] = Some(c);
        }
    }

    /// Pulls a colouring of the parent graph down to `sub`.
    pub fn restricted_to(&self, sub: &PlaneGraph) -> Colouring {
        Colouring((0..sub.n()).map(|v| self.get(sub.origin(v))).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CanvasViolation {
    ListDomain {
        expected: usize,
        found: usize,
    },
    SNotPath,
    SNotCycle,
    SOffBoundary(VertexId),
    SEdgeOffBoundary(VertexId, VertexId),
    UnknownVertex(VertexId),
    AOffBoundary(VertexId),
    ANotIndependent(VertexId, VertexId),
    ALowGirth(VertexId),
    AListSize {
        vertex: VertexId,
        size: usize,
    },
    ListTooSmall {
        vertex: VertexId,
        required: usize,
        size: usize,
    },
}

impl fmt::Display for CanvasViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use CanvasViolation::*;
        match self {
            ListDomain { expected, found } => {
                write!(f, "lists cover {found} vertices, graph has {expected}")
            }
            SNotPath => write!(f, "S is not a path"),
            SNotCycle => write!(f, "S is not a cycle"),
            SOffBoundary(v) => write!(f, "S vertex {v} is not on the outer boundary"),
            SEdgeOffBoundary(u, v) => write!(f, "S edge {u}-{v} is not on the outer boundary"),
            UnknownVertex(v) => write!(f, "vertex {v} out of range"),
            AOffBoundary(v) => write!(f, "A vertex {v} is not on the outer boundary"),
            ANotIndependent(u, v) => write!(f, "A not independent: {u}-{v}"),
            ALowGirth(v) => write!(f, "A vertex {v} has girth below five"),
            AListSize { vertex, size } => {
                write!(f, "A vertex {vertex} has list size {size}, expected 2")
            }
            ListTooSmall {
                vertex,
                required,
                size,
            } => {
                write!(f, "vertex {vertex} has list size {size}, needs {required}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Canvas {
    pub graph: PlaneGraph,
    pub lists: ListAssignment,
    pub s: Precoloured,
    pub a: BTreeSet<VertexId>,
}

/// A list-size requirement that failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThresholdViolation {
    pub vertex: VertexId,
    pub required: usize,
    pub size: usize,
}

pub fn is_local_girth_assignment(
    g: &PlaneGraph,
    profile: &GirthProfile,
    l: &ListAssignment,
) -> Result<(), ThresholdViolation> {
    for v in 0..g.n() {
        let required = girth_class(profile, v).list_threshold();
        let size = l.get(v).map_or(0, BTreeSet::len);
        if size < required {
            return Err(ThresholdViolation {
                vertex: v,
                required,
                size,
            });
        }
    }
    Ok(())
}

pub fn is_acceptable_path(
    g: &PlaneGraph,
    profile: &GirthProfile,
    s: &[VertexId],
) -> Result<bool, CanvasError> {
    if !g.is_path(s) {
        return Err(CanvasError::NotAPath);
    }
    Ok(match s.len() {
        0..=3 => true,
        4 => {
            let (a, b) = (profile.of(s[1]), profile.of(s[2]));
            (a.at_least(4) && b.at_least(4)) || a.at_least(5) || b.at_least(5)
        }
        _ => false,
    })
}

/// An edge of the cycle whose removal leaves an acceptable path, reported
/// as the path itself.
pub fn acceptable_cycle_opening(
    g: &PlaneGraph,
    profile: &GirthProfile,
    s: &[VertexId],
) -> Result<Option<Vec<VertexId>>, CanvasError> {
    if !g.is_cycle(s) {
        return Err(CanvasError::NotACycle);
    }
    for i in 0..s.len() {
        let path: Vec<VertexId> = (0..s.len()).map(|k| s[(i + 1 + k) % s.len()]).collect();
        if is_acceptable_path(g, profile, &path)? {
            return Ok(Some(path));
        }
    }
    Ok(None)
}

pub fn is_acceptable_cycle(
    g: &PlaneGraph,
    profile: &GirthProfile,
    s: &[VertexId],
) -> Result<bool, CanvasError> {
    acceptable_cycle_opening(g, profile, s).map(|o| o.is_some())
}

pub fn validate_canvas(k: &Canvas, profile: &GirthProfile) -> Result<(), Vec<CanvasViolation>> {
    use CanvasViolation::*;
    let g = &k.graph;
    let n = g.n();
    let mut out = Vec::new();
    if k.lists.len() != n {
        out.push(ListDomain {
            expected: n,
            found: k.lists.len(),
        });
        return Err(out);
    }
    let s = k.s.vertices();
    if let Some(&v) = s.iter().chain(k.a.iter()).find(|&&v| v >= n) {
        out.push(UnknownVertex(v));
        return Err(out);
    }
    match &k.s {
        Precoloured::Path(p) if !g.is_path(p) => out.push(SNotPath),
        Precoloured::Cycle(c) if !g.is_cycle(c) => out.push(SNotCycle),
        _ => {
            for &v in s {
                if !g.is_boundary_vertex(v) {
                    out.push(SOffBoundary(v));
                }
            }
            for (u, v) in k.s.edges() {
                if !g.is_boundary_edge(u, v) {
                    out.push(SEdgeOffBoundary(u, v));
                }
            }
        }
    }
    for &v in &k.a {
        if !profile.of(v).at_least(5) {
            out.push(ALowGirth(v));
        }
        if k.s.contains(v) {
            continue;
        }
        if !g.is_boundary_vertex(v) {
            out.push(AOffBoundary(v));
        }
        if k.lists[v].len() != 2 {
            out.push(AListSize {
                vertex: v,
                size: k.lists[v].len(),
            });
        }
        for &u in g.neighbours(v) {
            if u > v && k.a.contains(&u) && !k.s.contains(u) {
                out.push(ANotIndependent(v, u));
            }
        }
    }
    for v in 0..n {
        if k.a.contains(&v) && !k.s.contains(v) {
            continue;
        }
        let required = if k.s.contains(v) {
            1
        } else if g.is_boundary_vertex(v) {
            3
        } else {
            girth_class(profile, v).list_threshold()
        };
        if k.lists[v].len() < required {
            out.push(ListTooSmall {
                vertex: v,
                required,
                size: k.lists[v].len(),
            });
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

impl Canvas {
    pub fn new(
        graph: PlaneGraph,
        lists: ListAssignment,
        s: Precoloured,
        a: BTreeSet<VertexId>,
    ) -> Self {
        Canvas { graph, lists, s, a }
    }

    pub fn validate(&self) -> Result<(), Vec<CanvasViolation>> {
        validate_canvas(self, &girth_profile(&self.graph))
    }

    pub fn total_list_size(&self) -> usize {
        self.lists.iter().map(BTreeSet::len).sum()
    }

    /// Restricts the lists of S to the colours of `phi`.
    pub fn pinned(&self, phi: &Colouring) -> Result<Canvas, CanvasError> {
        let mut k = self.clone();
        for &v in self.s.vertices() {
            let c = phi.get(v).ok_or(CanvasError::Uncoloured(v))?;
            k.lists[v] = BTreeSet::from([c]);
        }
        Ok(k)
    }
}

/// Maps `S` of the parent onto `h`; fails when the surviving part of `S`
/// is not a single path (or the whole cycle).
fn restrict_s(s: &Precoloured, h: &PlaneGraph) -> Result<Precoloured, CanvasError> {
    let local: Vec<Option<VertexId>> = s.vertices().iter().map(|&v| h.local_of(v)).collect();
    let m = local.len();
    let edge_kept = |i: usize, j: usize| match (local[i], local[j]) {
        (Some(a), Some(b)) => h.has_edge(a, b),
        _ => false,
    };
    if m == 0 {
        return Ok(Precoloured::Path(vec![]));
    }
    let links: Vec<bool> = match s {
        Precoloured::Path(_) => (0..m.saturating_sub(1))
            .map(|i| edge_kept(i, i + 1))
            .collect(),
        Precoloured::Cycle(_) => (0..m).map(|i| edge_kept(i, (i + 1) % m)).collect(),
    };
    if s.is_cycle() && links.iter().all(|&b| b) {
        return Ok(Precoloured::Cycle(
            local.iter().map(|x| x.unwrap()).collect(),
        ));
    }
    // runs of kept vertices joined by kept edges
    let start = if s.is_cycle() {
        // begin right after a broken link
        (0..m).find(|&i| !links[(i + m - 1) % m]).unwrap_or(0)
    } else {
        0
    };
    let mut runs: Vec<Vec<VertexId>> = Vec::new();
    let mut current: Vec<VertexId> = Vec::new();
    for step in 0..m {
        let i = (start + step) % m;
        match local[i] {
            Some(x) => current.push(x),
            None => {
                if !current.is_empty() {
                    runs.push(std::mem::take(&mut current));
                }
                continue;
            }
        }
        let link_to_next = step + 1 < m && links[i];
        if !link_to_next {
            runs.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        runs.push(current);
    }
    match runs.len() {
        0 => Ok(Precoloured::Path(vec![])),
        1 => Ok(Precoloured::Path(runs.pop().unwrap())),
        _ => Err(CanvasError::SNotContiguous),
    }
}

/// `K[H]` for a subgraph `h` extracted from `k.graph` (origins of `h` point
/// into `k.graph`).
pub fn subcanvas(k: &Canvas, h: &PlaneGraph) -> Result<Canvas, CanvasError> {
    let g = &k.graph;
    for v in 0..h.n() {
        if h.origin(v) >= g.n() {
            return Err(CanvasError::NotASubgraph);
        }
    }
    for (u, v) in h.edges() {
        if !g.has_edge(h.origin(u), h.origin(v)) {
            return Err(CanvasError::NotASubgraph);
        }
    }
    let s = restrict_s(&k.s, h)?;
    let lists = (0..h.n()).map(|v| k.lists[h.origin(v)].clone()).collect();
    let a = (0..h.n()).filter(|&v| k.a.contains(&h.origin(v))).collect();
    let sub = Canvas {
        graph: h.clone(),
        lists,
        s,
        a,
    };
    debug_assert!(
        k.validate().is_err() || sub.validate().is_ok(),
        "subcanvas of a valid canvas must be valid"
    );
    Ok(sub)
}

/// Truncates lists to the smallest sizes the canvas definition allows,
/// keeping the smallest colours.
pub fn trim_lists(k: &Canvas, profile: &GirthProfile) -> Canvas {
    let g = &k.graph;
    let mut out = k.clone();
    for v in 0..g.n() {
        let keep = if k.s.contains(v) {
            1
        } else if k.a.contains(&v) {
            2
        } else if g.is_boundary_vertex(v) {
            3
        } else {
            girth_class(profile, v).list_threshold()
        };
        out.lists[v] = k.lists[v].iter().take(keep).copied().collect();
    }
    out
}

pub fn delete_and_subtract(
    k: &Canvas,
    coloured: &Colouring,
    doomed: &BTreeSet<VertexId>,
) -> Result<Canvas, CanvasError> {
    delete_and_subtract_except(k, coloured, doomed, &BTreeSet::new())
}

/// Deletes `doomed`, removes their colours from the lists of surviving
/// neighbours (except those in `exempt`), and recomputes `A` as the
/// vertices outside S whose lists have at most two colours.
pub fn delete_and_subtract_except(
    k: &Canvas,
    coloured: &Colouring,
    doomed: &BTreeSet<VertexId>,
    exempt: &BTreeSet<VertexId>,
) -> Result<Canvas, CanvasError> {
    let g = &k.graph;
    for &d in doomed {
        if coloured.get(d).is_none() {
            return Err(CanvasError::Uncoloured(d));
        }
    }
    let h = g.without(doomed);
    let s = restrict_s(&k.s, &h)?;
    let mut lists = Vec::with_capacity(h.n());
    for v in 0..h.n() {
        let o = h.origin(v);
        let mut l = k.lists[o].clone();
        if !exempt.contains(&o) {
            for &u in g.neighbours(o) {
                if doomed.contains(&u) {
                    l.remove(&coloured.get(u).expect("doomed vertices are coloured"));
                }
            }
        }
        if l.is_empty() {
            return Err(CanvasError::ListExhausted(o));
        }
        lists.push(l);
    }
    let a = (0..h.n())
        .filter(|&v| !s.contains(v) && lists[v].len() <= 2)
        .collect();
    Ok(Canvas {
        graph: h,
        lists,
        s,
        a,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::girth::girth_profile;

    fn cycle(n: usize) -> PlaneGraph {
        let rot = (0..n).map(|i| vec![(i + 1) % n, (i + n - 1) % n]).collect();
        PlaneGraph::new(rot, Some((0, 1))).unwrap()
    }

    fn k4() -> PlaneGraph {
        let rot = vec![vec![1, 2, 3], vec![0, 3, 2], vec![0, 1, 3], vec![0, 2, 1]];
        PlaneGraph::new(rot, Some((1, 2))).unwrap()
    }

    fn lists(sizes: &[usize]) -> ListAssignment {
        sizes.iter().map(|&s| (1..=s as Colour).collect()).collect()
    }

    #[test]
    fn local_girth_thresholds() {
        let g = k4();
        let p = girth_profile(&g);
        assert!(is_local_girth_assignment(&g, &p, &lists(&[5; 4])).is_ok());
        let err = is_local_girth_assignment(&g, &p, &lists(&[4; 4])).unwrap_err();
        assert_eq!((err.required, err.size), (5, 4));
        let c5 = cycle(5);
        assert!(is_local_girth_assignment(&c5, &girth_profile(&c5), &lists(&[3; 5])).is_ok());
    }

    #[test]
    fn acceptable_paths_and_cycles() {
        let c5 = cycle(5);
        let p = girth_profile(&c5);
        assert_eq!(is_acceptable_path(&c5, &p, &[0, 1, 2, 3]), Ok(true));
        assert_eq!(is_acceptable_path(&c5, &p, &[]), Ok(true));
        assert_eq!(
            is_acceptable_path(&c5, &p, &[0, 2]),
            Err(CanvasError::NotAPath)
        );
        let g = k4();
        let pk = girth_profile(&g);
        assert_eq!(is_acceptable_path(&g, &pk, &[0, 1, 2, 3]), Ok(false));
        assert_eq!(is_acceptable_cycle(&g, &pk, &[1, 2, 3]), Ok(true));
    }

    #[test]
    fn adjacent_a_rejected() {
        let g = cycle(5);
        let mut l = lists(&[3; 5]);
        l[2] = BTreeSet::from([1, 2]);
        l[3] = BTreeSet::from([1, 2]);
        let k = Canvas::new(g, l, Precoloured::Path(vec![0]), BTreeSet::from([2, 3]));
        let errs = k.validate().unwrap_err();
        assert!(errs.contains(&CanvasViolation::ANotIndependent(2, 3)));
    }

    #[test]
    fn delete_and_subtract_k4() {
        let g = k4();
        let k = Canvas::new(
            g,
            lists(&[5; 4]),
            Precoloured::Path(vec![1, 2]),
            BTreeSet::new(),
        );
        let mut phi = Colouring::empty(4);
        phi.set(3, 2);
        let out = delete_and_subtract(&k, &phi, &BTreeSet::from([3])).unwrap();
        assert_eq!(out.graph.n(), 3);
        assert_eq!(out.lists[0], BTreeSet::from([1, 3, 4, 5]));
        assert_eq!(out.s, Precoloured::Path(vec![1, 2]));
    }

    #[test]
    fn restrict_cycle_s() {
        let g = cycle(5);
        let s = Precoloured::Cycle(vec![0, 1, 2, 3, 4]);
        let h = g.without(&BTreeSet::from([2]));
        // vertices 0,1,3,4 renumbered 0,1,2,3; the path starts after the gap
        assert_eq!(restrict_s(&s, &h), Ok(Precoloured::Path(vec![2, 3, 0, 1])));
        let p = Precoloured::Path(vec![0, 1, 2, 3]);
        let h = g.without(&BTreeSet::from([1]));
        assert_eq!(restrict_s(&p, &h), Err(CanvasError::SNotContiguous));
    }
}
