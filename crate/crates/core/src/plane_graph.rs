//! Combinatorial plane graphs: a simple graph with a rotation system and a
//! designated outer face per connected component.
//!
//! Rotation lists are read as clockwise. The face to the left of the dart
//! `u -> v` continues with `v -> w` where `w` follows `u` in the rotation of
//! `v`. Components are never nested inside each other's faces: every
//! component carries its own outer face.

use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

pub type VertexId = usize;
pub type Dart = (VertexId, VertexId);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {0} is out of range")]
    UnknownVertex(VertexId),
    #[error("rotation of vertex {0} contains a loop")]
    Loop(VertexId),
    #[error("rotation of vertex {0} repeats neighbour {1}")]
    RepeatedNeighbour(VertexId, VertexId),
    #[error("edge {0}-{1} appears in only one rotation")]
    Asymmetric(VertexId, VertexId),
    #[error("embedding invalid: component of vertex {vertex} has V - E + F = {euler}")]
    EmbeddingInvalid { vertex: VertexId, euler: i64 },
    #[error("outer edge {0}->{1} is not a directed edge of the graph")]
    BadOuterEdge(VertexId, VertexId),
    #[error("vertex sequence is not a path")]
    NotAPath,
    #[error("vertex sequence is not a cycle")]
    NotACycle,
    #[error("path does not separate the graph")]
    NotSeparating,
    #[error("fan identification precondition violated: {0}")]
    PreconditionViolated(&'static str),
}

/// Marks the outer face of one component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Anchor {
    /// The face to the left of this dart.
    Edge(VertexId, VertexId),
    /// An isolated vertex.
    Vertex(VertexId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryWalk {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<(VertexId, VertexId)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneGraph {
    rotations: Vec<Vec<VertexId>>,
    origin: Vec<VertexId>,
    component: Vec<usize>,
    components: Vec<Vec<VertexId>>,
    anchors: Vec<Anchor>,
    faces: Vec<Vec<Dart>>,
    dart_face: HashMap<Dart, usize>,
    outer_face: Vec<Option<usize>>,
    on_boundary: Vec<bool>,
}

fn normalize(u: VertexId, v: VertexId) -> (VertexId, VertexId) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

impl PlaneGraph {
    /// Builds a plane graph from rotation lists. `outer_edge` designates the
    /// outer face of its component; every other component gets its largest
    /// face.
    pub fn new(
        rotations: Vec<Vec<VertexId>>,
        outer_edge: Option<(VertexId, VertexId)>,
    ) -> Result<Self, GraphError> {
        let n = rotations.len();
        let origin = (0..n).collect();
        let anchors = match outer_edge {
            Some((u, v)) => vec![Anchor::Edge(u, v)],
            None => vec![],
        };
        Self::assemble(rotations, origin, anchors)
    }

    pub fn empty() -> Self {
        Self::assemble(vec![], vec![], vec![]).expect("empty graph is valid")
    }

    /// `hints` may name the outer face of any subset of components; the rest
    /// default to their largest face (lowest face index on ties).
    pub(crate) fn assemble(
        rotations: Vec<Vec<VertexId>>,
        origin: Vec<VertexId>,
        hints: Vec<Anchor>,
    ) -> Result<Self, GraphError> {
        let n = rotations.len();
        for (u, rot) in rotations.iter().enumerate() {
            let mut seen = BTreeSet::new();
            for &v in rot {
                if v >= n {
                    return Err(GraphError::UnknownVertex(v));
                }
                if v == u {
                    return Err(GraphError::Loop(u));
                }
                if !seen.insert(v) {
                    return Err(GraphError::RepeatedNeighbour(u, v));
                }
                if !rotations[v].contains(&u) {
                    return Err(GraphError::Asymmetric(u, v));
                }
            }
        }

        let mut component = vec![usize::MAX; n];
        let mut components = Vec::new();
        for s in 0..n {
            if component[s] != usize::MAX {
                continue;
            }
            let id = components.len();
            let mut members = vec![s];
            component[s] = id;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &v in &rotations[u] {
                    if component[v] == usize::MAX {
                        component[v] = id;
                        members.push(v);
                        queue.push_back(v);
                    }
                }
            }
            members.sort_unstable();
            components.push(members);
        }

        let (faces, dart_face) = trace(&rotations);

        let mut face_count = vec![0i64; components.len()];
        for f in &faces {
            face_count[component[f[0].0]] += 1;
        }
        for (c, members) in components.iter().enumerate() {
            let v = members.len() as i64;
            let e = members.iter().map(|&u| rotations[u].len()).sum::<usize>() as i64 / 2;
            let f = if e == 0 { 1 } else { face_count[c] };
            if v - e + f != 2 {
                return Err(GraphError::EmbeddingInvalid {
                    vertex: members[0],
                    euler: v - e + f,
                });
            }
        }

        let mut anchors: Vec<Option<Anchor>> = vec![None; components.len()];
        for hint in hints {
            match hint {
                Anchor::Edge(u, v) => {
                    if u >= n || !rotations[u].contains(&v) {
                        return Err(GraphError::BadOuterEdge(u, v));
                    }
                    anchors[component[u]] = Some(hint);
                }
                Anchor::Vertex(v) => {
                    if v >= n || !rotations[v].is_empty() {
                        return Err(GraphError::BadOuterEdge(v, v));
                    }
                    anchors[component[v]] = Some(hint);
                }
            }
        }
        let mut outer_face = vec![None; components.len()];
        for (c, members) in components.iter().enumerate() {
            if rotations[members[0]].is_empty() {
                anchors[c] = Some(Anchor::Vertex(members[0]));
                continue;
            }
            let face = match anchors[c] {
                Some(Anchor::Edge(u, v)) => dart_face[&(u, v)],
                _ => {
                    let mut best: Option<usize> = None;
                    for (i, f) in faces.iter().enumerate() {
                        if component[f[0].0] == c && best.is_none_or(|b| f.len() > faces[b].len()) {
                            best = Some(i);
                        }
                    }
                    let b = best.expect("component with edges has a face");
                    anchors[c] = Some(Anchor::Edge(faces[b][0].0, faces[b][0].1));
                    b
                }
            };
            outer_face[c] = Some(face);
        }

        let mut on_boundary = vec![false; n];
        for (c, members) in components.iter().enumerate() {
            match outer_face[c] {
                Some(f) => {
                    for &(u, _) in &faces[f] {
                        on_boundary[u] = true;
                    }
                }
                None => on_boundary[members[0]] = true,
            }
        }

        Ok(PlaneGraph {
            rotations,
            origin,
            component,
            components,
            anchors: anchors
                .into_iter()
                .map(|a| a.expect("anchor set"))
                .collect(),
            faces,
            dart_face,
            outer_face,
            on_boundary,
        })
    }

    pub fn n(&self) -> usize {
        self.rotations.len()
    }

    pub fn rotations(&self) -> &[Vec<VertexId>] {
        &self.rotations
    }

    pub fn neighbours(&self, v: VertexId) -> &[VertexId] {
        &self.rotations[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.rotations[v].len()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        u < self.n() && self.rotations[u].contains(&v)
    }

    pub fn edge_count(&self) -> usize {
        self.rotations.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Undirected edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, rot) in self.rotations.iter().enumerate() {
            for &v in rot {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Id of `v` in the graph this one was extracted from.
    pub fn origin(&self, v: VertexId) -> VertexId {
        self.origin[v]
    }

    pub fn origins(&self) -> &[VertexId] {
        &self.origin
    }

    /// Local id of the vertex whose origin is `o`, if present.
    pub fn local_of(&self, o: VertexId) -> Option<VertexId> {
        self.origin.iter().position(|&x| x == o)
    }

    /// Forgets the extraction history: origins become the identity.
    pub fn detached(&self) -> Self {
        let mut g = self.clone();
        g.origin = (0..self.n()).collect();
        g
    }

    pub fn anchors(&self) -> &[Anchor] {
        &self.anchors
    }

    /// The designated outer dart of the component containing vertex 0, if
    /// that component has an edge.
    pub fn outer_edge(&self) -> Option<(VertexId, VertexId)> {
        match self.anchors.first() {
            Some(Anchor::Edge(u, v)) => Some((*u, *v)),
            _ => None,
        }
    }

    pub fn components(&self) -> &[Vec<VertexId>] {
        &self.components
    }

    pub fn component_of(&self, v: VertexId) -> usize {
        self.component[v]
    }

    pub fn is_connected(&self) -> bool {
        self.components.len() <= 1
    }

    /// Every face as its closed walk of darts.
    pub fn faces(&self) -> &[Vec<Dart>] {
        &self.faces
    }

    pub fn face_of(&self, u: VertexId, v: VertexId) -> Option<usize> {
        self.dart_face.get(&(u, v)).copied()
    }

    pub fn outer_face_of_component(&self, c: usize) -> Option<usize> {
        self.outer_face[c]
    }

    pub fn is_outer_face(&self, f: usize) -> bool {
        let (u, _) = self.faces[f][0];
        self.outer_face[self.component[u]] == Some(f)
    }

    /// Outer boundary walk of the component containing vertex 0.
    pub fn outer_boundary(&self) -> BoundaryWalk {
        if self.n() == 0 {
            return BoundaryWalk {
                vertices: vec![],
                edges: vec![],
            };
        }
        self.outer_walk_of(0)
    }

    pub fn outer_walk_of(&self, c: usize) -> BoundaryWalk {
        match self.outer_face[c] {
            None => BoundaryWalk {
                vertices: vec![self.components[c][0]],
                edges: vec![],
            },
            Some(f) => BoundaryWalk {
                vertices: self.faces[f].iter().map(|d| d.0).collect(),
                edges: self.faces[f].iter().map(|d| normalize(d.0, d.1)).collect(),
            },
        }
    }

    pub fn outer_walks(&self) -> Vec<BoundaryWalk> {
        (0..self.components.len())
            .map(|c| self.outer_walk_of(c))
            .collect()
    }

    pub fn is_boundary_vertex(&self, v: VertexId) -> bool {
        self.on_boundary[v]
    }

    pub fn boundary_vertices(&self) -> Vec<VertexId> {
        (0..self.n()).filter(|&v| self.on_boundary[v]).collect()
    }

    pub fn is_boundary_edge(&self, u: VertexId, v: VertexId) -> bool {
        let on = |a, b| self.face_of(a, b).is_some_and(|f| self.is_outer_face(f));
        on(u, v) || on(v, u)
    }

    /// Successor of `u` in the rotation at `v`.
    pub fn rotation_succ(&self, v: VertexId, u: VertexId) -> VertexId {
        let rot = &self.rotations[v];
        let i = rot.iter().position(|&x| x == u).expect("u adjacent to v");
        rot[(i + 1) % rot.len()]
    }

    pub fn is_path(&self, p: &[VertexId]) -> bool {
        let mut seen = BTreeSet::new();
        p.iter().all(|&v| v < self.n() && seen.insert(v))
            && p.windows(2).all(|w| self.has_edge(w[0], w[1]))
    }

    pub fn is_cycle(&self, c: &[VertexId]) -> bool {
        c.len() >= 3 && self.is_path(c) && self.has_edge(c[c.len() - 1], c[0])
    }

    fn cycle_edges(c: &[VertexId]) -> BTreeSet<(VertexId, VertexId)> {
        (0..c.len())
            .map(|i| normalize(c[i], c[(i + 1) % c.len()]))
            .collect()
    }

    pub fn chords_of(&self, c: &[VertexId]) -> Result<Vec<(VertexId, VertexId)>, GraphError> {
        if !self.is_cycle(c) {
            return Err(GraphError::NotACycle);
        }
        let on: BTreeSet<_> = c.iter().copied().collect();
        let own = Self::cycle_edges(c);
        Ok(self
            .edges()
            .into_iter()
            .filter(|&(u, v)| on.contains(&u) && on.contains(&v) && !own.contains(&(u, v)))
            .collect())
    }

    /// Faces strictly inside the cycle `c`.
    fn inside_faces(&self, c: &[VertexId]) -> Vec<bool> {
        let own = Self::cycle_edges(c);
        let mut uf = UnionFind::new(self.faces.len());
        for (u, v) in self.edges() {
            if !own.contains(&(u, v)) {
                uf.union(self.dart_face[&(u, v)], self.dart_face[&(v, u)]);
            }
        }
        let comp = self.component[c[0]];
        let outer = uf.find(self.outer_face[comp].expect("cycle component has faces"));
        (0..self.faces.len())
            .map(|f| self.component[self.faces[f][0].0] == comp && uf.find(f) != outer)
            .collect()
    }

    /// `Int(C)` as a vertex set and `Int[C]` as a plane graph whose outer face
    /// is bounded by `c`. Origins of the closed graph point into `self`.
    pub fn interior(&self, c: &[VertexId]) -> Result<(BTreeSet<VertexId>, PlaneGraph), GraphError> {
        if !self.is_cycle(c) {
            return Err(GraphError::NotACycle);
        }
        let inside = self.inside_faces(c);
        let on_c: BTreeSet<_> = c.iter().copied().collect();
        let own = Self::cycle_edges(c);
        let mut open = BTreeSet::new();
        for (f, walk) in self.faces.iter().enumerate() {
            if inside[f] {
                for &(u, _) in walk {
                    if !on_c.contains(&u) {
                        open.insert(u);
                    }
                }
            }
        }
        let keep: Vec<bool> = (0..self.n())
            .map(|v| on_c.contains(&v) || open.contains(&v))
            .collect();
        let closed = self.subgraph(&keep, |u, v| {
            own.contains(&normalize(u, v))
                || inside[self.dart_face[&(u, v)]]
                || inside[self.dart_face[&(v, u)]]
        });
        Ok((open, closed))
    }

    /// Subgraph on the kept vertices and on kept edges among them
    /// (`keep_edge` sees original ids). Vertices are renumbered densely in
    /// increasing original order; each component's outer face is the face
    /// containing the outer face of `self`.
    pub fn subgraph(
        &self,
        keep_vertex: &[bool],
        keep_edge: impl Fn(VertexId, VertexId) -> bool,
    ) -> PlaneGraph {
        let n = self.n();
        let mut new_id = vec![usize::MAX; n];
        let mut origin = Vec::new();
        for v in 0..n {
            if keep_vertex[v] {
                new_id[v] = origin.len();
                origin.push(v);
            }
        }
        let kept_edge = |u: VertexId, v: VertexId| {
            keep_vertex[u] && keep_vertex[v] && {
                let (a, b) = normalize(u, v);
                keep_edge(a, b)
            }
        };
        let rotations: Vec<Vec<VertexId>> = origin
            .iter()
            .map(|&u| {
                self.rotations[u]
                    .iter()
                    .filter(|&&v| kept_edge(u, v))
                    .map(|&v| new_id[v])
                    .collect()
            })
            .collect();

        // components of the result, in old ids
        let m = origin.len();
        let mut comp = vec![usize::MAX; m];
        let mut hints = Vec::new();
        for s in 0..m {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = s;
            let mut members = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &v in &rotations[u] {
                    if comp[v] == usize::MAX {
                        comp[v] = s;
                        members.push(v);
                        queue.push_back(v);
                    }
                }
            }
            if rotations[s].is_empty() {
                continue;
            }
            let in_x: BTreeSet<(VertexId, VertexId)> = members
                .iter()
                .flat_map(|&u| rotations[u].iter().map(move |&v| (u, v)))
                .filter(|&(u, v)| u < v)
                .map(|(u, v)| normalize(origin[u], origin[v]))
                .collect();
            let mut uf = UnionFind::new(self.faces.len());
            for (a, b) in self.edges() {
                if !in_x.contains(&(a, b)) {
                    uf.union(self.dart_face[&(a, b)], self.dart_face[&(b, a)]);
                }
            }
            let gc = self.component[origin[s]];
            let target = uf.find(self.outer_face[gc].expect("component with edges"));
            members.sort_unstable();
            'search: for &u in &members {
                for &v in &rotations[u] {
                    if uf.find(self.dart_face[&(origin[u], origin[v])]) == target {
                        hints.push(Anchor::Edge(u, v));
                        break 'search;
                    }
                }
            }
        }
        let origin_in_self = origin;
        PlaneGraph::assemble(rotations, origin_in_self, hints)
            .expect("subgraph of a valid embedding is valid")
    }

    pub fn induced(&self, keep_vertex: &[bool]) -> PlaneGraph {
        self.subgraph(keep_vertex, |_, _| true)
    }

    /// Removes the listed vertices.
    pub fn without(&self, doomed: &BTreeSet<VertexId>) -> PlaneGraph {
        let keep: Vec<bool> = (0..self.n()).map(|v| !doomed.contains(&v)).collect();
        self.induced(&keep)
    }

    pub fn cut_vertices(&self) -> BTreeSet<VertexId> {
        let n = self.n();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut cuts = BTreeSet::new();
        let mut time = 0;
        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            // iterative DFS: (vertex, parent, next neighbour index)
            let mut stack = vec![(root, usize::MAX, 0usize)];
            disc[root] = time;
            low[root] = time;
            time += 1;
            let mut root_children = 0;
            while let Some(&mut (u, parent, ref mut idx)) = stack.last_mut() {
                if *idx < self.rotations[u].len() {
                    let v = self.rotations[u][*idx];
                    *idx += 1;
                    if disc[v] == usize::MAX {
                        disc[v] = time;
                        low[v] = time;
                        time += 1;
                        if u == root {
                            root_children += 1;
                        }
                        stack.push((v, u, 0));
                    } else if v != parent {
                        low[u] = low[u].min(disc[v]);
                    }
                } else {
                    stack.pop();
                    if parent != usize::MAX {
                        low[parent] = low[parent].min(low[u]);
                        if parent != root && low[u] >= disc[parent] {
                            cuts.insert(parent);
                        }
                    }
                }
            }
            if root_children >= 2 {
                cuts.insert(root);
            }
        }
        cuts
    }

    /// Connected, at least three vertices, and no cut vertex.
    pub fn is_2_connected(&self) -> bool {
        self.n() >= 3 && self.is_connected() && self.cut_vertices().is_empty()
    }

    /// Simple cycles with `min..=max` vertices, each listed once.
    pub fn short_cycles(&self, min: usize, max: usize) -> Vec<Vec<VertexId>> {
        fn grow(
            g: &PlaneGraph,
            max: usize,
            min: usize,
            path: &mut Vec<VertexId>,
            on: &mut [bool],
            out: &mut Vec<Vec<VertexId>>,
        ) {
            let s = path[0];
            let x = *path.last().expect("non-empty");
            for &y in g.neighbours(x) {
                if y == s && path.len() >= min && path[1] < x {
                    out.push(path.clone());
                }
                if y > s && !on[y] && path.len() < max {
                    on[y] = true;
                    path.push(y);
                    grow(g, max, min, path, on, out);
                    path.pop();
                    on[y] = false;
                }
            }
        }
        let g = self;
        let mut out = Vec::new();
        let mut on = vec![false; g.n()];
        for s in 0..g.n() {
            on[s] = true;
            grow(g, max, min.max(3), &mut vec![s], &mut on, &mut out);
            on[s] = false;
        }
        out.sort_by_key(|c| c.len());
        out
    }

    /// Splits along a separating path into two plane graphs meeting exactly
    /// in `p`. A single vertex must be a cut vertex; the first part is the
    /// one holding the smallest vertex outside `p`.
    pub fn split_along_path(&self, p: &[VertexId]) -> Result<(PlaneGraph, PlaneGraph), GraphError> {
        if p.is_empty() || !self.is_path(p) || !self.is_connected() {
            return Err(GraphError::NotSeparating);
        }
        let n = self.n();
        let on_p: BTreeSet<_> = p.iter().copied().collect();
        let path_edges: BTreeSet<_> = p.windows(2).map(|w| normalize(w[0], w[1])).collect();
        // side[v]: 0/1 for vertices off p
        let mut side = vec![usize::MAX; n];
        let mut edge_side: HashMap<(VertexId, VertexId), usize> = HashMap::new();

        if p.len() == 1 {
            let mut label = 0;
            for s in 0..n {
                if on_p.contains(&s) || side[s] != usize::MAX {
                    continue;
                }
                side[s] = label;
                let mut queue = VecDeque::from([s]);
                while let Some(u) = queue.pop_front() {
                    for &v in &self.rotations[u] {
                        if !on_p.contains(&v) && side[v] == usize::MAX {
                            side[v] = label;
                            queue.push_back(v);
                        }
                    }
                }
                label = 1;
            }
        } else {
            let ends_ok = self.on_boundary[p[0]] && self.on_boundary[p[p.len() - 1]];
            let inner_ok = p[1..p.len() - 1].iter().all(|&v| !self.on_boundary[v]);
            if !ends_ok || !inner_ok {
                return Err(GraphError::NotSeparating);
            }
            let mut uf = UnionFind::new(self.faces.len());
            for (u, v) in self.edges() {
                if path_edges.contains(&(u, v)) {
                    continue;
                }
                let (f, g) = (self.dart_face[&(u, v)], self.dart_face[&(v, u)]);
                if !self.is_outer_face(f) && !self.is_outer_face(g) {
                    uf.union(f, g);
                }
            }
            for v in 0..n {
                if on_p.contains(&v) {
                    continue;
                }
                let inner: Vec<usize> = self.rotations[v]
                    .iter()
                    .map(|&w| self.dart_face[&(v, w)])
                    .filter(|&f| !self.is_outer_face(f))
                    .collect();
                for w in inner.windows(2) {
                    uf.union(w[0], w[1]);
                }
            }
            let mut classes: Vec<usize> = Vec::new();
            let mut class_of = |f: usize, uf: &mut UnionFind| {
                let r = uf.find(f);
                match classes.iter().position(|&x| x == r) {
                    Some(i) => i,
                    None => {
                        classes.push(r);
                        classes.len() - 1
                    }
                }
            };
            for v in 0..n {
                if on_p.contains(&v) {
                    continue;
                }
                if let Some(f) = self.rotations[v]
                    .iter()
                    .map(|&w| self.dart_face[&(v, w)])
                    .find(|&f| !self.is_outer_face(f))
                {
                    side[v] = class_of(f, &mut uf);
                }
            }
            for (u, v) in self.edges() {
                if on_p.contains(&u) && on_p.contains(&v) && !path_edges.contains(&(u, v)) {
                    let f = [self.dart_face[&(u, v)], self.dart_face[&(v, u)]]
                        .into_iter()
                        .find(|&f| !self.is_outer_face(f));
                    let s = match f {
                        Some(f) => class_of(f, &mut uf),
                        None => 0,
                    };
                    edge_side.insert((u, v), s);
                }
            }
            if classes.len() != 2 {
                return Err(GraphError::NotSeparating);
            }
            // vertices seeing only the outer face follow their neighbours
            let mut queue: VecDeque<VertexId> = (0..n).filter(|&v| side[v] != usize::MAX).collect();
            while let Some(u) = queue.pop_front() {
                for &v in &self.rotations[u] {
                    if !on_p.contains(&v) && side[v] == usize::MAX {
                        side[v] = side[u];
                        queue.push_back(v);
                    }
                }
            }
            for v in 0..n {
                if !on_p.contains(&v) && side[v] == usize::MAX {
                    side[v] = 0;
                    let mut queue = VecDeque::from([v]);
                    while let Some(u) = queue.pop_front() {
                        for &w in &self.rotations[u] {
                            if !on_p.contains(&w) && side[w] == usize::MAX {
                                side[w] = 0;
                                queue.push_back(w);
                            }
                        }
                    }
                }
            }
        }

        let first = (0..n)
            .find(|&v| !on_p.contains(&v))
            .ok_or(GraphError::NotSeparating)?;
        let first_side = side[first];
        let build = |s: usize| {
            let keep: Vec<bool> = (0..n).map(|v| on_p.contains(&v) || side[v] == s).collect();
            self.subgraph(&keep, |u, v| {
                if on_p.contains(&u) && on_p.contains(&v) {
                    path_edges.contains(&(u, v))
                        || edge_side.get(&(u, v)).copied().unwrap_or(0) == s
                } else {
                    true
                }
            })
        };
        let g1 = build(first_side);
        let g2 = build(1 - first_side);
        for h in [&g1, &g2] {
            if h.n() == p.len() || !h.is_connected() {
                return Err(GraphError::NotSeparating);
            }
            let local = |o: VertexId| h.local_of(o).expect("path vertex kept");
            if !p.iter().all(|&v| h.on_boundary[local(v)]) {
                return Err(GraphError::NotSeparating);
            }
            if !p
                .windows(2)
                .all(|w| h.is_boundary_edge(local(w[0]), local(w[1])))
            {
                return Err(GraphError::NotSeparating);
            }
        }
        Ok((g1, g2))
    }

    /// Closes a fan: `wj1` has neighbours exactly `wj`, `wj2` and a hub
    /// adjacent to both, the three are consecutive on the outer walk. `wj1`
    /// is deleted and `wj`, `wj2` are identified into `z`. Returns the new
    /// graph and the id of `z` (whose origin is `wj`).
    pub fn identify_fan_ends(
        &self,
        wj: VertexId,
        wj1: VertexId,
        wj2: VertexId,
    ) -> Result<(PlaneGraph, VertexId), GraphError> {
        use GraphError::PreconditionViolated as Bad;
        let n = self.n();
        if wj >= n || wj1 >= n || wj2 >= n || wj == wj1 || wj1 == wj2 || wj == wj2 {
            return Err(Bad("three distinct vertices required"));
        }
        if !self.has_edge(wj, wj1) || !self.has_edge(wj1, wj2) {
            return Err(Bad("rim edges missing"));
        }
        if self.has_edge(wj, wj2) {
            return Err(Bad("fan ends already adjacent"));
        }
        if self.degree(wj1) != 3 {
            return Err(Bad("middle vertex must have degree three"));
        }
        let hub = *self.rotations[wj1]
            .iter()
            .find(|&&x| x != wj && x != wj2)
            .expect("degree three");
        if !self.has_edge(hub, wj) || !self.has_edge(hub, wj2) {
            return Err(Bad("hub not adjacent to both fan ends"));
        }
        let common: BTreeSet<_> = self.rotations[wj]
            .iter()
            .filter(|x| self.rotations[wj2].contains(x))
            .copied()
            .collect();
        if common != BTreeSet::from([wj1, hub]) {
            return Err(Bad("fan ends have extra common neighbours"));
        }
        let consecutive = |a: VertexId, b: VertexId| {
            self.is_outer_face(self.dart_face[&(a, wj1)]) && self.rotation_succ(wj1, a) == b
        };
        let forward = consecutive(wj, wj2);
        if !forward && !consecutive(wj2, wj) {
            return Err(Bad("vertices not consecutive on the outer walk"));
        }
        // the outer dart leaving the far end survives the operation
        let (far, far_next) = if forward {
            (wj2, self.rotation_succ(wj2, wj1))
        } else {
            (wj, self.rotation_succ(wj, wj1))
        };

        let mut rot = self.rotations.clone();
        for x in rot[wj].iter_mut() {
            if *x == wj1 {
                *x = wj2;
            }
        }
        for x in rot[wj2].iter_mut() {
            if *x == wj1 {
                *x = wj;
            }
        }
        rot[hub].retain(|&x| x != wj1);
        rot[wj1].clear();

        let after = |list: &[VertexId], pivot: VertexId| -> Vec<VertexId> {
            let i = list
                .iter()
                .position(|&x| x == pivot)
                .expect("pivot present");
            (1..list.len())
                .map(|k| list[(i + k) % list.len()])
                .collect()
        };
        let mut z_rot = after(&rot[wj], wj2);
        z_rot.extend(after(&rot[wj2], wj));
        dedup_cyclic(&mut z_rot);
        rot[wj] = z_rot;
        rot[wj2].clear();
        for (v, list) in rot.iter_mut().enumerate() {
            if v == wj || v == wj2 || v == wj1 {
                continue;
            }
            for x in list.iter_mut() {
                if *x == wj2 {
                    *x = wj;
                }
            }
            dedup_cyclic(list);
        }

        let mut new_id = vec![usize::MAX; n];
        let mut origin = Vec::new();
        for v in 0..n {
            if v != wj1 && v != wj2 {
                new_id[v] = origin.len();
                origin.push(v);
            }
        }
        let rotations: Vec<Vec<VertexId>> = origin
            .iter()
            .map(|&v| rot[v].iter().map(|&x| new_id[x]).collect())
            .collect();
        let map = |v: VertexId| if v == wj2 { new_id[wj] } else { new_id[v] };
        let mut hints = vec![Anchor::Edge(map(far), map(far_next))];
        // other components keep their anchors
        for (c, a) in self.anchors.iter().enumerate() {
            if c == self.component[wj] {
                continue;
            }
            hints.push(match *a {
                Anchor::Edge(u, v) => Anchor::Edge(new_id[u], new_id[v]),
                Anchor::Vertex(v) => Anchor::Vertex(new_id[v]),
            });
        }
        let g = PlaneGraph::assemble(rotations, origin, hints)?;
        Ok((g, new_id[wj]))
    }
}

fn dedup_cyclic(list: &mut Vec<VertexId>) {
    let mut out: Vec<VertexId> = Vec::with_capacity(list.len());
    for &x in list.iter() {
        if out.last() != Some(&x) {
            out.push(x);
        }
    }
    while out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    *list = out;
}

fn trace(rotations: &[Vec<VertexId>]) -> (Vec<Vec<Dart>>, HashMap<Dart, usize>) {
    let mut dart_face = HashMap::new();
    let mut faces = Vec::new();
    for (u, rot) in rotations.iter().enumerate() {
        for &v in rot {
            if dart_face.contains_key(&(u, v)) {
                continue;
            }
            let id = faces.len();
            let mut walk = Vec::new();
            let (mut a, mut b) = (u, v);
            loop {
                dart_face.insert((a, b), id);
                walk.push((a, b));
                let rb = &rotations[b];
                let i = rb.iter().position(|&x| x == a).expect("symmetric rotation");
                let c = rb[(i + 1) % rb.len()];
                (a, b) = (b, c);
                if (a, b) == (u, v) {
                    break;
                }
            }
            faces.push(walk);
        }
    }
    (faces, dart_face)
}

/// Face walks without building a full graph; used by the embedder to test
/// candidate rotation systems.
pub(crate) fn trace_faces_raw(rotations: &[Vec<VertexId>]) -> Vec<Vec<Dart>> {
    trace(rotations).0
}

/// Face tracing with the Euler check on every component.
pub fn trace_faces(g: &PlaneGraph) -> Result<Vec<Vec<Dart>>, GraphError> {
    PlaneGraph::assemble(g.rotations.clone(), g.origin.clone(), g.anchors.clone()).map(|h| h.faces)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> PlaneGraph {
        let rot = (0..n).map(|i| vec![(i + 1) % n, (i + n - 1) % n]).collect();
        PlaneGraph::new(rot, Some((0, 1))).unwrap()
    }

    // hub 0, rim 1..=k clockwise
    fn wheel(k: usize) -> PlaneGraph {
        let mut rot = vec![(1..=k).collect::<Vec<_>>()];
        for i in 1..=k {
            let next = if i == k { 1 } else { i + 1 };
            let prev = if i == 1 { k } else { i - 1 };
            rot.push(vec![0, prev, next]);
        }

        PlaneGraph::new(rot, None).unwrap()
    }

    #[test]
    fn triangle_and_edge_faces() {
        let g = cycle(3);
        assert_eq!(g.faces().len(), 2);
        assert!(g.faces().iter().all(|f| f.len() == 3));
        let e = PlaneGraph::new(vec![vec![1], vec![0]], Some((0, 1))).unwrap();
        assert_eq!(e.faces().len(), 1);
        assert_eq!(e.faces()[0].len(), 2);
    }

    #[test]
    fn k4_has_four_faces() {
        let rot = vec![vec![1, 2, 3], vec![0, 3, 2], vec![0, 1, 3], vec![0, 2, 1]];
        let g = PlaneGraph::new(rot, Some((1, 2))).unwrap();
        assert_eq!(g.faces().len(), 4);
        assert!(g.faces().iter().all(|f| f.len() == 3));
    }

    #[test]
    fn euler_violation_detected() {
        // K4 with a twisted rotation at one vertex
        let rot = vec![vec![1, 2, 3], vec![0, 2, 3], vec![0, 1, 3], vec![0, 2, 1]];
        assert!(matches!(
            PlaneGraph::new(rot, None),
            Err(GraphError::EmbeddingInvalid { .. })
        ));
    }

    #[test]
    fn boundary_walks() {
        assert_eq!(cycle(5).outer_boundary().vertices.len(), 5);
        let p = PlaneGraph::new(vec![vec![1], vec![0, 2], vec![1]], Some((0, 1))).unwrap();
        assert_eq!(p.outer_boundary().vertices, vec![0, 1, 2, 1]);
        let w = wheel(5);
        let walk = w.outer_boundary().vertices;
        assert_eq!(walk.len(), 5);
        assert!(!walk.contains(&0));
    }

    #[test]
    fn chords() {
        let mut rot: Vec<Vec<usize>> = (0..4).map(|i| vec![(i + 1) % 4, (i + 3) % 4]).collect();
        rot[0] = vec![1, 2, 3];
        rot[2] = vec![3, 0, 1];
        let g = PlaneGraph::new(rot, Some((0, 1))).unwrap();
        assert_eq!(g.chords_of(&[0, 1, 2, 3]).unwrap(), vec![(0, 2)]);
        assert!(cycle(5).chords_of(&[0, 1, 2, 3, 4]).unwrap().is_empty());
        assert_eq!(cycle(5).chords_of(&[0, 1, 3]), Err(GraphError::NotACycle));
    }

    #[test]
    fn wheel_interiors() {
        let w = wheel(5);
        let (open, closed) = w.interior(&[1, 2, 3, 4, 5]).unwrap();
        assert_eq!(open, BTreeSet::from([0]));
        assert_eq!(closed.n(), 6);
        assert_eq!(closed.edge_count(), 10);
        let (open, _) = w.interior(&[0, 1, 2]).unwrap();
        assert!(open.is_empty());
        let c6 = cycle(6);
        let (open, closed) = c6.interior(&[0, 1, 2, 3, 4, 5]).unwrap();
        assert!(open.is_empty());
        assert_eq!(closed.edge_count(), 6);
    }

    #[test]
    fn cut_vertices_basic() {
        // bowtie: 0 shared
        let rot = vec![
            vec![1, 2, 3, 4],
            vec![2, 0],
            vec![0, 1],
            vec![4, 0],
            vec![0, 3],
        ];
        let g = PlaneGraph::new(rot, None).unwrap();
        assert_eq!(g.cut_vertices(), BTreeSet::from([0]));
        assert!(cycle(5).is_2_connected());
        let p = PlaneGraph::new(vec![vec![1], vec![0, 2], vec![1]], None).unwrap();
        assert_eq!(p.cut_vertices(), BTreeSet::from([1]));
    }

    #[test]
    fn split_chord_and_cut_vertex() {
        let mut rot: Vec<Vec<usize>> = (0..4).map(|i| vec![(i + 1) % 4, (i + 3) % 4]).collect();
        rot[0] = vec![1, 2, 3];
        rot[2] = vec![3, 0, 1];
        let g = PlaneGraph::new(rot, Some((0, 1))).unwrap();
        let (a, b) = g.split_along_path(&[0, 2]).unwrap();
        assert_eq!((a.n(), a.edge_count()), (3, 3));
        assert_eq!((b.n(), b.edge_count()), (3, 3));

        let rot = vec![
            vec![1, 2, 3, 4],
            vec![2, 0],
            vec![0, 1],
            vec![4, 0],
            vec![0, 3],
        ];
        let bowtie = PlaneGraph::new(rot, None).unwrap();
        let (a, b) = bowtie.split_along_path(&[0]).unwrap();
        assert_eq!((a.n(), a.edge_count(), b.n(), b.edge_count()), (3, 3, 3, 3));

        assert_eq!(
            cycle(5).split_along_path(&[0, 2]),
            Err(GraphError::NotSeparating)
        );
    }

    #[test]
    fn fan_identification_small() {
        // broken wheel: hub 0, rim 1 2 3; outer walk 0 1 2 3
        let rot = vec![vec![1, 2, 3], vec![2, 0], vec![3, 0, 1], vec![0, 2]];
        let g = PlaneGraph::new(rot, None).unwrap();
        assert_eq!(g.outer_boundary().vertices.len(), 4);
        let (h, z) = g.identify_fan_ends(1, 2, 3).unwrap();
        assert_eq!(h.n(), 2);
        assert_eq!(h.edges(), vec![(0, 1)]);
        assert_eq!(h.origin(z), 1);
        assert!(g.identify_fan_ends(0, 1, 2).is_err());
    }
}
