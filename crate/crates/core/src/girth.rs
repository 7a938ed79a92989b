//! Per-vertex girth: the length of a shortest cycle through a vertex.

use std::cmp::Ordering;
use std::collections::VecDeque;
use std::fmt;

use crate::plane_graph::{GraphError, PlaneGraph, VertexId};

/// Girth of a vertex. `Infinite` means the vertex lies on no cycle; there is
/// deliberately no arithmetic on this type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Girth {
    Finite(u32),
    Infinite,
}

impl Girth {
    pub fn at_least(self, k: u32) -> bool {
        match self {
            Girth::Finite(g) => g >= k,
            Girth::Infinite => true,
        }
    }

    pub fn is(self, k: u32) -> bool {
        self == Girth::Finite(k)
    }
}

impl Ord for Girth {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Girth::Finite(a), Girth::Finite(b)) => a.cmp(b),
            (Girth::Finite(_), Girth::Infinite) => Ordering::Less,
            (Girth::Infinite, Girth::Finite(_)) => Ordering::Greater,
            (Girth::Infinite, Girth::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Girth {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Girth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Girth::Finite(g) => write!(f, "{g}"),
            Girth::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GirthClass {
    G3,
    G4,
    G5Plus,
    Acyclic,
}

impl GirthClass {
    /// Minimum list size for a vertex off the outer boundary.
    pub fn list_threshold(self) -> usize {
        match self {
            GirthClass::G3 => 5,
            GirthClass::G4 => 4,
            GirthClass::G5Plus | GirthClass::Acyclic => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GirthProfile(Vec<Girth>);

impl GirthProfile {
    pub fn of(&self, v: VertexId) -> Girth {
        self.0[v]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[Girth] {
        &self.0
    }
}

/// Shortest cycle through `v`: BFS from `v` labelling every vertex with the
/// neighbour of `v` its tree path leaves through; any edge joining two
/// branches closes a cycle of length `d(x) + d(y) + 1`.
pub fn vertex_girth(g: &PlaneGraph, v: VertexId) -> Result<Girth, GraphError> {
    if v >= g.n() {
        return Err(GraphError::UnknownVertex(v));
    }
    let n = g.n();
    let mut dist = vec![u32::MAX; n];
    let mut branch = vec![usize::MAX; n];
    dist[v] = 0;
    let mut queue = VecDeque::new();
    for &u in g.neighbours(v) {
        dist[u] = 1;
        branch[u] = u;
        queue.push_back(u);
    }
    let mut best = u32::MAX;
    while let Some(x) = queue.pop_front() {
        if 2 * dist[x] + 1 >= best {
            break;
        }
        for &y in g.neighbours(x) {
            if y == v {
                continue;
            }
            if dist[y] == u32::MAX {
                dist[y] = dist[x] + 1;
                branch[y] = branch[x];
                queue.push_back(y);
            } else if branch[y] != branch[x] {
                best = best.min(dist[x] + dist[y] + 1);
            }
        }
    }
    Ok(if best == u32::MAX {
        Girth::Infinite
    } else {
        Girth::Finite(best)
    })
}

pub fn girth_profile(g: &PlaneGraph) -> GirthProfile {
    GirthProfile(
        (0..g.n())
            .map(|v| vertex_girth(g, v).expect("vertex in range"))
            .collect(),
    )
}

pub fn girth_class(profile: &GirthProfile, v: VertexId) -> GirthClass {
    match profile.of(v) {
        Girth::Finite(3) => GirthClass::G3,
        Girth::Finite(4) => GirthClass::G4,
        Girth::Finite(_) => GirthClass::G5Plus,
        Girth::Infinite => GirthClass::Acyclic,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> PlaneGraph {
        let rot = (0..n).map(|i| vec![(i + 1) % n, (i + n - 1) % n]).collect();
        PlaneGraph::new(rot, None).unwrap()
    }

    #[test]
    fn cycles_and_trees() {
        let c5 = cycle(5);
        assert!((0..5).all(|v| vertex_girth(&c5, v) == Ok(Girth::Finite(5))));
        let path = PlaneGraph::new(vec![vec![1], vec![0, 2], vec![1]], None).unwrap();
        assert_eq!(vertex_girth(&path, 0), Ok(Girth::Infinite));
        assert_eq!(vertex_girth(&path, 7), Err(GraphError::UnknownVertex(7)));
    }

    #[test]
    fn c4_with_pendant() {
        let rot = vec![vec![1, 3, 4], vec![2, 0], vec![3, 1], vec![0, 2], vec![0]];
        let g = PlaneGraph::new(rot, None).unwrap();
        let p = girth_profile(&g);
        assert_eq!(p.of(0), Girth::Finite(4));
        assert_eq!(p.of(4), Girth::Infinite);
        assert_eq!(girth_class(&p, 2), GirthClass::G4);
        assert_eq!(girth_class(&p, 4), GirthClass::Acyclic);
    }

    #[test]
    fn ordering_puts_infinity_last() {
        assert!(Girth::Finite(100) < Girth::Infinite);
        assert!(Girth::Infinite.at_least(5));
        assert!(!Girth::Finite(4).at_least(5));
    }
}
