//! Test graph production: planar embedding of abstract graphs, exhaustive
//! connected planar graphs up to isomorphism, wheel families, and seeded
//! random graphs and canvases.

use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::canvas::{is_acceptable_path, Canvas, Colour, ListAssignment, Precoloured};
use crate::girth::{girth_class, girth_profile};
use crate::plane_graph::{trace_faces_raw, PlaneGraph, VertexId};
use crate::wheels::{build_certificate, Piece, WheelCertificate};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeneratorError {
    #[error("graph is not planar")]
    NonPlanar,
    #[error("graph is not connected")]
    Disconnected,
    #[error("edge {0}-{1} is invalid")]
    BadEdge(VertexId, VertexId),
}

fn adjacency(
    n: usize,
    edges: &[(VertexId, VertexId)],
) -> Result<Vec<BTreeSet<VertexId>>, GeneratorError> {
    let mut adj = vec![BTreeSet::new(); n];
    for &(u, v) in edges {
        if u >= n || v >= n || u == v {
            return Err(GeneratorError::BadEdge(u, v));
        }
        adj[u].insert(v);
        adj[v].insert(u);
    }
    Ok(adj)
}

/// Edge sets of the blocks (maximal 2-connected pieces and bridges).
fn blocks(adj: &[BTreeSet<VertexId>]) -> Vec<Vec<(VertexId, VertexId)>> {
    let n = adj.len();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut time = 0;
    let mut stack: Vec<(VertexId, VertexId)> = Vec::new();
    let mut out = Vec::new();
    fn dfs(
        u: VertexId,
        parent: VertexId,
        adj: &[BTreeSet<VertexId>],
        disc: &mut [usize],
        low: &mut [usize],
        time: &mut usize,
        stack: &mut Vec<(VertexId, VertexId)>,
        out: &mut Vec<Vec<(VertexId, VertexId)>>,
    ) {
        disc[u] = *time;
        low[u] = *time;
        *time += 1;
        for &v in &adj[u] {
            if disc[v] == usize::MAX {
                stack.push((u, v));
                dfs(v, u, adj, disc, low, time, stack, out);
                low[u] = low[u].min(low[v]);
                if low[v] >= disc[u] {
                    let mut block = Vec::new();
                    while let Some(e) = stack.pop() {
                        block.push(e);
                        if e == (u, v) {
                            break;
                        }
                    }
                    out.push(block);
                }
            } else if v != parent && disc[v] < disc[u] {
                stack.push((u, v));
                low[u] = low[u].min(disc[v]);
            }
        }
    }
    for s in 0..n {
        if disc[s] == usize::MAX {
            dfs(
                s,
                usize::MAX,
                adj,
                &mut disc,
                &mut low,
                &mut time,
                &mut stack,
                &mut out,
            );
        }
    }
    out
}

/// Faces of a 2-connected planar block as oriented vertex cycles, by the
/// Demoucron–Malgrange–Pertuiset face-insertion method.
fn embed_block(edges: &[(VertexId, VertexId)]) -> Result<Vec<Vec<VertexId>>, GeneratorError> {
    let mut verts: Vec<VertexId> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
    verts.sort_unstable();
    verts.dedup();
    let mut adj: std::collections::BTreeMap<VertexId, BTreeSet<VertexId>> =
        verts.iter().map(|&v| (v, BTreeSet::new())).collect();
    for &(u, v) in edges {
        adj.get_mut(&u).unwrap().insert(v);
        adj.get_mut(&v).unwrap().insert(u);
    }

    // initial cycle by DFS from the smallest vertex
    let cycle = find_cycle(&adj).expect("2-connected block has a cycle");
    let mut faces: Vec<Vec<VertexId>> = vec![cycle.clone(), cycle.iter().rev().copied().collect()];
    let mut placed_v: BTreeSet<VertexId> = cycle.iter().copied().collect();
    let mut placed_e: BTreeSet<(VertexId, VertexId)> = (0..cycle.len())
        .map(|i| {
            let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
            (a.min(b), a.max(b))
        })
        .collect();
    let total_edges = edges.len();

    while placed_e.len() < total_edges {
        let frags = fragments(&adj, &placed_v, &placed_e);
        let mut choice: Option<(usize, usize, usize)> = None; // (fragment, face, #faces)
        for (fi, frag) in frags.iter().enumerate() {
            let admissible: Vec<usize> = (0..faces.len())
                .filter(|&f| frag.attachments.iter().all(|a| faces[f].contains(a)))
                .collect();
            if admissible.is_empty() {
                return Err(GeneratorError::NonPlanar);
            }
            let better = match choice {
                None => true,
                Some((_, _, c)) => admissible.len() < c,
            };
            if better {
                choice = Some((fi, admissible[0], admissible.len()));
            }
            if admissible.len() == 1 {
                break;
            }
        }
        let (fi, face_idx, _) = choice.expect("some fragment remains");
        let path = frags[fi].path(&adj, &placed_v);
        let face = faces.swap_remove(face_idx);
        let (x, y) = (path[0], path[path.len() - 1]);
        let i = face
            .iter()
            .position(|&v| v == x)
            .expect("attachment on face");
        let j = face
            .iter()
            .position(|&v| v == y)
            .expect("attachment on face");
        let k = face.len();
        let inner = &path[1..path.len() - 1];
        let mut f1: Vec<VertexId> = Vec::new();
        let mut t = i;
        loop {
            f1.push(face[t]);
            if t == j {
                break;
            }
            t = (t + 1) % k;
        }
        f1.extend(inner.iter().rev());
        let mut f2: Vec<VertexId> = Vec::new();
        let mut t = j;
        loop {
            f2.push(face[t]);
            if t == i {
                break;
            }
            t = (t + 1) % k;
        }
        f2.extend(inner.iter());
        faces.push(f1);
        faces.push(f2);
        for w in path.windows(2) {
            placed_e.insert((w[0].min(w[1]), w[0].max(w[1])));
        }
        placed_v.extend(path.iter().copied());
    }
    Ok(faces)
}

fn find_cycle(
    adj: &std::collections::BTreeMap<VertexId, BTreeSet<VertexId>>,
) -> Option<Vec<VertexId>> {
    let start = *adj.keys().next()?;
    let mut parent: std::collections::BTreeMap<VertexId, VertexId> = Default::default();
    let mut stack = vec![(start, usize::MAX)];
    let mut seen = BTreeSet::new();
    while let Some((u, p)) = stack.pop() {
        if !seen.insert(u) {
            continue;
        }
        parent.insert(u, p);
        for &v in &adj[&u] {
            if v == p {
                continue;
            }
            if seen.contains(&v) {
                // back edge closes a cycle through the tree path
                let mut path_u = vec![u];
                let mut x = u;
                while x != v {
                    x = parent[&x];
                    if x == usize::MAX {
                        break;
                    }
                    path_u.push(x);
                }
                if path_u.last() == Some(&v) {
                    return Some(path_u);
                }
            } else {
                stack.push((v, u));
            }
        }
    }
    None
}

struct Fragment {
    /// Vertices of the fragment not yet embedded.
    inner: BTreeSet<VertexId>,
    attachments: BTreeSet<VertexId>,
    /// A single chord-like edge between embedded vertices.
    chord: Option<(VertexId, VertexId)>,
}

impl Fragment {
    /// A path through the fragment between two attachments.
    fn path(
        &self,
        adj: &std::collections::BTreeMap<VertexId, BTreeSet<VertexId>>,
        placed: &BTreeSet<VertexId>,
    ) -> Vec<VertexId> {
        if let Some((u, v)) = self.chord {
            return vec![u, v];
        }
        let a = *self
            .attachments
            .iter()
            .next()
            .expect("fragment has attachments");
        // BFS from a into the inner vertices until reaching another attachment
        let mut prev: std::collections::BTreeMap<VertexId, VertexId> = Default::default();
        let mut queue = std::collections::VecDeque::new();
        for &v in &adj[&a] {
            if self.inner.contains(&v) && !prev.contains_key(&v) {
                prev.insert(v, a);
                queue.push_back(v);
            }
        }
        while let Some(u) = queue.pop_front() {
            for &v in &adj[&u] {
                if placed.contains(&v) && v != a {
                    let mut path = vec![v, u];
                    let mut x = u;
                    while prev[&x] != a {
                        x = prev[&x];
                        path.push(x);
                    }
                    path.push(a);
                    path.reverse();
                    return path;
                }
                if self.inner.contains(&v) && !prev.contains_key(&v) {
                    prev.insert(v, u);
                    queue.push_back(v);
                }
            }
        }
        unreachable!("fragment of a 2-connected block has two attachments")
    }
}

fn fragments(
    adj: &std::collections::BTreeMap<VertexId, BTreeSet<VertexId>>,
    placed_v: &BTreeSet<VertexId>,
    placed_e: &BTreeSet<(VertexId, VertexId)>,
) -> Vec<Fragment> {
    let mut out = Vec::new();
    for (&u, nb) in adj {
        for &v in nb {
            if u < v
                && placed_v.contains(&u)
                && placed_v.contains(&v)
                && !placed_e.contains(&(u, v))
            {
                out.push(Fragment {
                    inner: BTreeSet::new(),
                    attachments: BTreeSet::from([u, v]),
                    chord: Some((u, v)),
                });
            }
        }
    }
    let mut seen: BTreeSet<VertexId> = BTreeSet::new();
    for &s in adj.keys() {
        if placed_v.contains(&s) || seen.contains(&s) {
            continue;
        }
        let mut inner = BTreeSet::from([s]);
        let mut attachments = BTreeSet::new();
        let mut stack = vec![s];
        seen.insert(s);
        while let Some(u) = stack.pop() {
            for &v in &adj[&u] {
                if placed_v.contains(&v) {
                    attachments.insert(v);
                } else if seen.insert(v) {
                    inner.insert(v);
                    stack.push(v);
                }
            }
        }
        out.push(Fragment {
            inner,
            attachments,
            chord: None,
        });
    }
    out
}

/// Rotation lists from consistently oriented face cycles: for consecutive
/// `u, v, w` on a face, `w` follows `u` around `v`.
fn rotations_from_faces(n: usize, faces: &[Vec<VertexId>]) -> Vec<Vec<VertexId>> {
    let mut succ: Vec<std::collections::BTreeMap<VertexId, VertexId>> = vec![Default::default(); n];
    for f in faces {
        let k = f.len();
        for i in 0..k {
            let (u, v, w) = (f[i], f[(i + 1) % k], f[(i + 2) % k]);
            succ[v].insert(u, w);
        }
    }
    succ.iter()
        .map(|m| {
            let Some((&first, _)) = m.iter().next() else {
                return vec![];
            };
            let mut rot = vec![first];
            let mut x = m[&first];
            while x != first {
                rot.push(x);
                x = m[&x];
            }
            rot
        })
        .collect()
}

/// Embeds a simple graph in the plane. Blocks are embedded separately and
/// glued at cut vertices by concatenating rotations. Each component's outer
/// face is its largest face.
pub fn embed_planar(
    n: usize,
    edges: &[(VertexId, VertexId)],
) -> Result<PlaneGraph, GeneratorError> {
    let adj = adjacency(n, edges)?;
    let mut rotations: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    for block in blocks(&adj) {
        let block_rot: Vec<Vec<VertexId>> = if block.len() == 1 {
            let (u, v) = block[0];
            let mut r = vec![Vec::new(); n];
            r[u].push(v);
            r[v].push(u);
            r
        } else {
            let faces = embed_block(&block)?;
            rotations_from_faces(n, &faces)
        };
        for (v, r) in block_rot.into_iter().enumerate() {
            rotations[v].extend(r);
        }
    }
    // Euler check on the raw result guards against embedding bugs
    let faces = trace_faces_raw(&rotations);
    let e = edges.len() as i64;
    let comps = {
        let mut seen = vec![false; n];
        let mut c = 0;
        for s in 0..n {
            if seen[s] || adj[s].is_empty() {
                continue;
            }
            c += 1;
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(u) = stack.pop() {
                for &v in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
        }
        c
    };
    let nonisolated = adj.iter().filter(|a| !a.is_empty()).count() as i64;
    if nonisolated - e + faces.len() as i64 != 2 * comps {
        return Err(GeneratorError::NonPlanar);
    }
    PlaneGraph::new(rotations, None).map_err(|_| GeneratorError::NonPlanar)
}

/// Canonical adjacency key of a graph on at most 11 vertices: the minimum
/// upper-triangle bit string over the leaves of an
/// individualization–refinement search.
pub fn canonical_key(n: usize, adj: &[u16]) -> u64 {
    let cells: Vec<Vec<usize>> = vec![(0..n).collect()];
    let mut best = u64::MAX;
    search_canonical(n, adj, refine(n, adj, cells), &mut best);
    best
}

fn refine(n: usize, adj: &[u16], mut cells: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    loop {
        let mut changed = false;
        let mut next = Vec::with_capacity(cells.len());
        let cell_of = {
            let mut c = vec![0; n];
            for (i, cell) in cells.iter().enumerate() {
                for &v in cell {
                    c[v] = i;
                }
            }
            c
        };
        for cell in &cells {
            if cell.len() == 1 {
                next.push(cell.clone());
                continue;
            }
            let sig = |v: usize| -> Vec<u32> {
                let mut s = vec![0u32; cells.len()];
                for u in 0..n {
                    if adj[v] >> u & 1 == 1 {
                        s[cell_of[u]] += 1;
                    }
                }
                s
            };
            let mut keyed: Vec<(Vec<u32>, usize)> = cell.iter().map(|&v| (sig(v), v)).collect();
            keyed.sort();
            let mut group = vec![keyed[0].1];
            for w in keyed.windows(2) {
                if w[0].0 == w[1].0 {
                    group.push(w[1].1);
                } else {
                    next.push(std::mem::take(&mut group));
                    group.push(w[1].1);
                    changed = true;
                }
            }
            next.push(group);
        }
        cells = next;
        if !changed {
            return cells;
        }
    }
}

fn search_canonical(n: usize, adj: &[u16], cells: Vec<Vec<usize>>, best: &mut u64) {
    if let Some(target) = cells
        .iter()
        .enumerate()
        .filter(|(_, c)| c.len() > 1)
        .min_by_key(|(i, c)| (c.len(), *i))
        .map(|(i, _)| i)
    {
        for k in 0..cells[target].len() {
            let v = cells[target][k];
            let mut split = cells.clone();
            let rest: Vec<usize> = cells[target].iter().copied().filter(|&x| x != v).collect();
            split[target] = vec![v];
            split.insert(target + 1, rest);
            search_canonical(n, adj, refine(n, adj, split), best);
        }
        return;
    }
    // discrete: position i holds vertex order[i]
    let order: Vec<usize> = cells.iter().map(|c| c[0]).collect();
    let mut key = 0u64;
    let mut bit = 0;
    for i in 0..n {
        for j in i + 1..n {
            if adj[order[i]] >> order[j] & 1 == 1 {
                key |= 1 << bit;
            }
            bit += 1;
        }
    }
    *best = (*best).min(key);
}

fn edges_of(adj: &[u16]) -> Vec<(VertexId, VertexId)> {
    let n = adj.len();
    let mut out = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if adj[u] >> v & 1 == 1 {
                out.push((u, v));
            }
        }
    }
    out
}

/// One representative of every connected planar graph on `n ≤ 8` vertices,
/// embedded with its largest face outside, in a deterministic order.
pub fn all_connected_planar(n: usize) -> Vec<PlaneGraph> {
    assert!(n <= 8, "exhaustive generation is limited to 8 vertices");
    if n == 0 {
        return vec![];
    }
    let mut level: Vec<Vec<u16>> = vec![vec![0]];
    for m in 2..=n {
        let mut seen: HashSet<u64> = HashSet::new();
        let mut next = Vec::new();
        for g in &level {
            for mask in 1u16..(1 << (m - 1)) {
                let mut h = g.clone();
                h.push(mask);
                for (u, row) in h.iter_mut().enumerate().take(m - 1) {
                    if mask >> u & 1 == 1 {
                        *row |= 1 << (m - 1);
                    }
                }
                let key = canonical_key(m, &h);
                if !seen.insert(key) {
                    continue;
                }
                if embed_planar(m, &edges_of(&h)).is_ok() {
                    next.push((key, h));
                }
            }
        }
        next.sort_by_key(|(k, _)| *k);
        level = next.into_iter().map(|(_, h)| h).collect();
    }
    level
        .iter()
        .map(|h| embed_planar(h.len(), &edges_of(h)).expect("planarity checked"))
        .collect()
}

/// Rotation lists from a straight-line drawing.
fn rotations_from_positions(
    pos: &[(f64, f64)],
    edges: &[(VertexId, VertexId)],
) -> Vec<Vec<VertexId>> {
    let n = pos.len();
    let mut nb: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    for &(u, v) in edges {
        nb[u].push(v);
        nb[v].push(u);
    }
    for (v, list) in nb.iter_mut().enumerate() {
        let (x, y) = pos[v];
        list.sort_by(|&a, &b| {
            let ta = (pos[a].1 - y).atan2(pos[a].0 - x);
            let tb = (pos[b].1 - y).atan2(pos[b].0 - x);
            tb.partial_cmp(&ta).expect("finite angles")
        });
    }
    nb
}

/// Kinds of pieces in a generalized wheel around the apex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WheelPiece {
    /// A broken wheel (fan) spanning this many rim edges.
    Fan(usize),
    /// A wheel whose rim spans this many rim edges besides the apex.
    Hub(usize),
}

/// A generalized wheel glued from `pieces` around a common apex. Vertex
/// ids: rim `0..=m`, apex `m + 1`, hubs after. The principal path is
/// `(m, m + 1, 0)` and the outer cycle is the outer face.
pub fn make_generalized(pieces: &[WheelPiece]) -> (PlaneGraph, WheelCertificate) {
    assert!(!pieces.is_empty(), "need at least one piece");
    let m: usize = pieces
        .iter()
        .map(|p| match *p {
            WheelPiece::Fan(k) | WheelPiece::Hub(k) => k.max(1),
        })
        .sum();
    let apex = m + 1;
    let polygon = m + 2;
    let mut pos = vec![(0.0, 0.0); polygon];
    // polygon order: apex, rim 0 .. rim m, clockwise angles decreasing
    let angle = |i: usize| -(i as f64) * std::f64::consts::TAU / polygon as f64;
    pos[apex] = (angle(0).cos(), angle(0).sin());
    for r in 0..=m {
        pos[r] = (angle(r + 1).cos(), angle(r + 1).sin());
    }
    let mut edges: Vec<(VertexId, VertexId)> = (0..m).map(|r| (r, r + 1)).collect();
    edges.push((apex, 0));
    edges.push((apex, m));
    let mut cert_pieces = Vec::new();
    let mut s = 0;
    for p in pieces {
        match *p {
            WheelPiece::Fan(k) => {
                let k = k.max(1);
                for r in s + 1..s + k {
                    edges.push((apex, r));
                }
                for t in s..s + k {
                    cert_pieces.push(Piece {
                        s: t,
                        t: t + 1,
                        hub: None,
                    });
                }
                s += k;
            }
            WheelPiece::Hub(k) => {
                let k = k.max(1);
                let h = pos.len();
                let members: Vec<VertexId> = std::iter::once(apex).chain(s..=s + k).collect();
                let cx = members.iter().map(|&v| pos[v].0).sum::<f64>() / members.len() as f64;
                let cy = members.iter().map(|&v| pos[v].1).sum::<f64>() / members.len() as f64;
                pos.push((cx, cy));
                for &v in &members {
                    edges.push((h, v));
                }
                cert_pieces.push(Piece {
                    s,
                    t: s + k,
                    hub: Some(h),
                });
                s += k;
            }
        }
        if s < m {
            edges.push((apex, s));
        }
    }
    edges.sort_unstable_by_key(|&(u, v)| (u.min(v), u.max(v)));
    edges.dedup_by_key(|e| (e.0.min(e.1), e.0.max(e.1)));
    let rot = rotations_from_positions(&pos, &edges);
    let probe = PlaneGraph::new(rot.clone(), None).expect("straight-line drawing is plane");
    let rim: Vec<VertexId> = (0..=m).collect();
    let outer: BTreeSet<VertexId> = rim.iter().copied().chain([apex]).collect();
    let dart = probe
        .faces()
        .iter()
        .find(|f| f.len() == outer.len() && f.iter().all(|d| outer.contains(&d.0)))
        .map(|f| f[0])
        .expect("polygon face exists");
    let g = PlaneGraph::new(rot, Some(dart)).expect("valid embedding");
    let cert = build_certificate(apex, &rim, &cert_pieces);
    (g, cert)
}

/// Wheel with a rim of `q` vertices `0..q`, hub `q`, principal path
/// `(0, 1, 2)`.
pub fn make_wheel(q: usize) -> (PlaneGraph, WheelCertificate) {
    assert!(q >= 3);
    // relabel the generalized layout: rim 0..=q-2 plus apex q-1
    let (g, cert) = make_generalized(&[WheelPiece::Hub(q - 2)]);
    relabel_principal(g, cert)
}

/// Broken wheel on the cycle `0..q` with `1` adjacent to everything,
/// principal path `(0, 1, 2)`.
pub fn make_broken_wheel(q: usize) -> (PlaneGraph, WheelCertificate) {
    assert!(q >= 3);
    let (g, cert) = make_generalized(&[WheelPiece::Fan(q - 2)]);
    relabel_principal(g, cert)
}

/// Renames vertices so the principal path becomes `(0, 1, 2)` and the rest
/// of the outer cycle follows in order.
fn relabel_principal(g: PlaneGraph, cert: WheelCertificate) -> (PlaneGraph, WheelCertificate) {
    let n = g.n();
    let mut order: Vec<VertexId> = cert.outer_cycle.clone();
    for v in 0..n {
        if !order.contains(&v) {
            order.push(v);
        }
    }
    let mut new_id = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        new_id[v] = i;
    }
    let mut rot = vec![Vec::new(); n];
    for v in 0..n {
        rot[new_id[v]] = g.neighbours(v).iter().map(|&u| new_id[u]).collect();
    }
    let (a, b) = g.outer_edge().expect("wheel has edges");
    let h = PlaneGraph::new(rot, Some((new_id[a], new_id[b]))).expect("relabelled embedding");
    (h, relabel_cert(&cert, &new_id))
}

fn relabel_cert(c: &WheelCertificate, m: &[VertexId]) -> WheelCertificate {
    WheelCertificate {
        kind: c.kind,
        principal_path: c.principal_path.map(|v| m[v]),
        outer_cycle: c.outer_cycle.iter().map(|&v| m[v]).collect(),
        hub: c.hub.map(|v| m[v]),
        children: c
            .children
            .as_ref()
            .map(|ch| Box::new((relabel_cert(&ch.0, m), relabel_cert(&ch.1, m)))),
        shared_edge: c.shared_edge.map(|(x, y)| (m[x], m[y])),
    }
}

/// A random connected plane graph on `n` vertices: a stacked triangulation
/// with random edge flips, thinned by deleting edges with probability
/// `drop` (bridges are kept).
pub fn random_planar(n: usize, drop: f64, rng: &mut ChaCha8Rng) -> PlaneGraph {
    if n <= 2 {
        let edges: Vec<_> = if n == 2 { vec![(0, 1)] } else { vec![] };
        return embed_planar(n, &edges).expect("tiny graphs are planar");
    }
    let mut tris: Vec<[VertexId; 3]> = vec![[0, 1, 2], [0, 2, 1]];
    for v in 3..n {
        let i = rng.gen_range(0..tris.len());
        let [a, b, c] = tris.swap_remove(i);
        tris.extend([[a, b, v], [b, c, v], [c, a, v]]);
    }
    let mut edges: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
    for t in &tris {
        for i in 0..3 {
            let (u, v) = (t[i], t[(i + 1) % 3]);
            edges.insert((u.min(v), u.max(v)));
        }
    }
    // random flips: replace edge ab shared by abc, bad with cd
    for _ in 0..n * 2 {
        let i = rng.gen_range(0..tris.len());
        let k = rng.gen_range(0..3);
        let t = tris[i];
        let (a, b, c) = (t[k], t[(k + 1) % 3], t[(k + 2) % 3]);
        let Some(j) = tris
            .iter()
            .position(|s| (0..3).any(|r| s[r] == b && s[(r + 1) % 3] == a))
        else {
            continue;
        };
        let s = tris[j];
        let r = (0..3).find(|&r| s[r] == b).expect("shared edge");
        let d = s[(r + 2) % 3];
        if c == d || edges.contains(&(c.min(d), c.max(d))) {
            continue;
        }
        edges.remove(&(a.min(b), a.max(b)));
        edges.insert((c.min(d), c.max(d)));
        let (hi, lo) = (i.max(j), i.min(j));
        tris.swap_remove(hi);
        tris.swap_remove(lo);
        tris.push([a, d, c]);
        tris.push([d, b, c]);
    }
    let mut kept: Vec<(VertexId, VertexId)> = edges.iter().copied().collect();
    kept.shuffle(rng);
    let mut current: BTreeSet<(VertexId, VertexId)> = edges;
    for e in kept {
        if rng.gen_bool(drop.clamp(0.0, 1.0)) {
            current.remove(&e);
            if !connected(n, &current) {
                current.insert(e);
            }
        }
    }
    let list: Vec<_> = current.into_iter().collect();
    embed_planar(n, &list).expect("subgraph of a triangulation is planar")
}

fn connected(n: usize, edges: &BTreeSet<(VertexId, VertexId)>) -> bool {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen.iter().all(|&s| s)
}

/// Subdivides every edge `times` times; the result has girth at least
/// `3 * (times + 1)`.
pub fn subdivide(g: &PlaneGraph, times: usize) -> PlaneGraph {
    let mut edges = Vec::new();
    let mut n = g.n();
    for (u, v) in g.edges() {
        let mut prev = u;
        for _ in 0..times {
            edges.push((prev, n));
            prev = n;
            n += 1;
        }
        edges.push((prev, v));
    }
    embed_planar(n, &edges).expect("subdivision of a planar graph is planar")
}

/// What list sizes a random canvas should use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ListTarget {
    /// Local girth thresholds on a random planar graph.
    LocalGirth,
    /// A subdivided graph of girth at least five with 3-lists (2 on A).
    GirthFive,
}

/// A valid canvas with an acceptable precoloured path (singleton lists on
/// S form a proper colouring), a random independent A, and lists trimmed
/// to the minimum sizes. Colours come from `1..=universe`.
pub fn random_canvas(n: usize, seed: u64, target: ListTarget, universe: usize) -> Canvas {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = match target {
        ListTarget::LocalGirth => random_planar(n.max(1), rng.gen_range(0.0..0.6), &mut rng),
        ListTarget::GirthFive => {
            let base = random_planar((n / 3).max(2), rng.gen_range(0.0..0.5), &mut rng);
            subdivide(&base, 1)
        }
    };
    let profile = girth_profile(&g);
    let walk = g.outer_boundary().vertices;
    // S: a run along the outer walk, shortened until it is an acceptable path
    let mut s: Vec<VertexId> = Vec::new();
    let want = rng.gen_range(0..=4usize).min(g.n());
    if want > 0 && !walk.is_empty() {
        let start = rng.gen_range(0..walk.len());
        for i in 0..want.min(walk.len()) {
            let v = walk[(start + i) % walk.len()];
            if s.contains(&v) {
                break;
            }
            s.push(v);
        }
        while !s.is_empty() && !is_acceptable_path(&g, &profile, &s).unwrap_or(false) {
            s.pop();
        }
    }
    let mut a = BTreeSet::new();
    let mut boundary: Vec<VertexId> = g.boundary_vertices();
    boundary.shuffle(&mut rng);
    for v in boundary {
        if !s.contains(&v)
            && profile.of(v).at_least(5)
            && rng.gen_bool(0.3)
            && g.neighbours(v).iter().all(|u| !a.contains(u))
        {
            a.insert(v);
        }
    }
    let mut lists: ListAssignment = vec![BTreeSet::new(); g.n()];
    for v in 0..g.n() {
        let size = if a.contains(&v) {
            2
        } else if g.is_boundary_vertex(v) {
            3
        } else {
            girth_class(&profile, v).list_threshold()
        };
        let picked = rand::seq::index::sample(&mut rng, universe.max(size), size);
        lists[v] = picked.into_iter().map(|i| i as Colour + 1).collect();
    }
    for (i, &v) in s.iter().enumerate() {
        let taken: BTreeSet<Colour> = s[..i]
            .iter()
            .filter(|&&u| g.has_edge(u, v))
            .map(|&u| *lists[u].iter().next().expect("singleton"))
            .collect();
        let choices: Vec<Colour> = (1..=universe.max(3) as Colour)
            .filter(|c| !taken.contains(c))
            .collect();
        let c = *choices.choose(&mut rng).expect("enough colours");
        lists[v] = BTreeSet::from([c]);
    }
    Canvas::new(g, lists, Precoloured::Path(s), a)
}

/// A broken wheel with hub `hub` inside the outer cycle and rim
/// `rim = w_1..w_t` along it, closed into a plane graph by an outer path
/// from `w_t` back to `w_1` and a few extra paths.
#[derive(Debug, Clone)]
pub struct FanConfiguration {
    pub graph: PlaneGraph,
    pub hub: VertexId,
    pub rim: Vec<VertexId>,
}

/// A random fan configuration in which no cycle of length at most four
/// has a vertex inside it, a 5-cycle with a vertex inside it has only
/// girth-3 vertices and a 6-cycle with a vertex inside it has no vertex of
/// girth at least five; `None` when the draw violates any of that.
pub fn fan_configuration(seed: u64) -> Option<FanConfiguration> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = rng.gen_range(3..=6usize);
    let m = rng.gen_range(1..=6usize);
    let hub = 0;
    let rim: Vec<VertexId> = (1..=t).collect();
    let mut edges: Vec<(VertexId, VertexId)> = rim.iter().map(|&r| (hub, r)).collect();
    edges.extend(rim.windows(2).map(|w| (w[0], w[1])));
    let outer: Vec<VertexId> = (t + 1..=t + m).collect();
    let mut around = vec![t];
    around.extend(&outer);
    around.push(1);
    edges.extend(around.windows(2).map(|w| (w[0], w[1])));
    let mut n = t + m + 1;
    let mut ends: Vec<VertexId> = outer.clone();
    ends.extend([hub, 1, t]);
    for _ in 0..rng.gen_range(0..=2) {
        let a = *ends.choose(&mut rng).expect("non-empty");
        let b = *ends.choose(&mut rng).expect("non-empty");
        let len = rng.gen_range(1..=3);
        let mut prev = a;
        for _ in 0..len {
            edges.push((prev, n));
            prev = n;
            n += 1;
        }
        if b != a || len >= 2 {
            edges.push((prev, b));
        }
    }
    let graph = embed_planar(n, &edges).ok()?;
    if graph.is_boundary_vertex(hub) || !rim.iter().all(|&r| graph.is_boundary_vertex(r)) {
        return None;
    }
    if !rim.windows(2).all(|w| graph.is_boundary_edge(w[0], w[1])) {
        return None;
    }
    let profile = girth_profile(&graph);
    for c in graph.short_cycles(3, 6) {
        let Ok((inside, _)) = graph.interior(&c) else {
            return None;
        };
        if inside.is_empty() {
            continue;
        }
        let bad = match c.len() {
            3 | 4 => true,
            5 => c.iter().any(|&v| !profile.of(v).is(3)),
            _ => c.iter().any(|&v| profile.of(v).at_least(5)),
        };
        if bad {
            return None;
        }
    }
    Some(FanConfiguration { graph, hub, rim })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Vec<(VertexId, VertexId)> {
        (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect()
    }

    #[test]
    fn embeds_k4_rejects_k5_k33() {
        let k4 = embed_planar(4, &complete(4)).unwrap();
        assert_eq!(k4.faces().len(), 4);
        assert_eq!(
            embed_planar(5, &complete(5)),
            Err(GeneratorError::NonPlanar)
        );
        let k33: Vec<_> = (0..3).flat_map(|u| (3..6).map(move |v| (u, v))).collect();
        assert_eq!(embed_planar(6, &k33), Err(GeneratorError::NonPlanar));
    }

    #[test]
    fn small_counts() {
        assert_eq!(all_connected_planar(3).len(), 2);
        assert_eq!(all_connected_planar(4).len(), 6);
    }

    #[test]
    fn wheel_shapes() {
        let (w, cert) = make_wheel(5);
        assert_eq!(w.n(), 6);
        assert_eq!(w.degree(5), 5);
        assert_eq!(cert.principal_path, [0, 1, 2]);
        assert_eq!(w.outer_boundary().vertices.len(), 5);
        let (b, cert) = make_broken_wheel(3);
        assert_eq!((b.n(), b.edge_count()), (3, 3));
        assert_eq!(cert.outer_cycle.len(), 3);
    }

    #[test]
    fn random_canvas_is_valid_and_replays() {
        for seed in 0..20 {
            let k = random_canvas(6, seed, ListTarget::LocalGirth, 6);
            assert_eq!(k.validate(), Ok(()), "seed {seed}");
            assert_eq!(k, random_canvas(6, seed, ListTarget::LocalGirth, 6));
        }
    }
}
