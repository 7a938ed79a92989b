//! Wheels, broken wheels and generalized wheels; the exceptional canvas
//! types; blocked colourings of principal paths.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::canvas::{Canvas, Colour, ColourList, ListAssignment};
use crate::girth::GirthProfile;
use crate::oracle::{find_colouring_adj, SearchBudget, SearchOutcome};
use crate::plane_graph::{GraphError, PlaneGraph, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WheelError {
    #[error("lists violate the wheel list hypotheses at vertex {0}")]
    HypothesisViolated(VertexId),
    #[error("wheel certificate does not match the graph")]
    NotInGraph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum WheelKind {
    BrokenWheel,
    Wheel,
    Composite,
}

/// Decomposition of a generalized wheel. The outer cycle starts with the
/// principal path: `outer_cycle[0..3] == principal_path`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct WheelCertificate {
    pub kind: WheelKind,
    pub principal_path: [VertexId; 3],
    pub outer_cycle: Vec<VertexId>,
    pub hub: Option<VertexId>,
    pub children: Option<Box<(WheelCertificate, WheelCertificate)>>,
    /// The principal edges glued together when `Composite`.
    pub shared_edge: Option<(VertexId, VertexId)>,
}

fn norm(u: VertexId, v: VertexId) -> (VertexId, VertexId) {
    (u.min(v), u.max(v))
}

impl WheelCertificate {
    pub fn vertices(&self) -> BTreeSet<VertexId> {
        let mut out: BTreeSet<VertexId> = self.outer_cycle.iter().copied().collect();
        out.extend(self.hubs());
        out
    }

    pub fn hubs(&self) -> Vec<VertexId> {
        match (&self.children, self.hub) {
            (Some(ch), _) => {
                let mut h = ch.0.hubs();
                h.extend(ch.1.hubs());
                h
            }
            (None, Some(h)) => vec![h],
            (None, None) => vec![],
        }
    }

    pub fn edges(&self) -> BTreeSet<(VertexId, VertexId)> {
        if let Some(ch) = &self.children {
            let mut e = ch.0.edges();
            e.extend(ch.1.edges());
            return e;
        }
        let c = &self.outer_cycle;
        let mut e: BTreeSet<_> = (0..c.len())
            .map(|i| norm(c[i], c[(i + 1) % c.len()]))
            .collect();
        match self.hub {
            Some(h) => e.extend(c.iter().map(|&v| norm(h, v))),
            None => {
                let b = self.principal_path[1];
                e.extend(c.iter().filter(|&&v| v != b).map(|&v| norm(b, v)));
            }
        }
        e
    }

    pub fn is_broken_wheel(&self) -> bool {
        self.kind == WheelKind::BrokenWheel
    }

    /// The wheel as a plane graph extracted from `g`.
    pub fn subgraph_of(&self, g: &PlaneGraph) -> PlaneGraph {
        let vs = self.vertices();
        let es = self.edges();
        let keep: Vec<bool> = (0..g.n()).map(|v| vs.contains(&v)).collect();
        g.subgraph(&keep, |u, v| es.contains(&(u, v)))
    }
}

/// One piece of a rim decomposition: rim positions `s..=t`, with a hub for
/// wheel pieces and none for broken wheels.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Piece {
    pub(crate) s: usize,
    pub(crate) t: usize,
    pub(crate) hub: Option<VertexId>,
}

pub(crate) fn build_certificate(
    b: VertexId,
    rim: &[VertexId],
    pieces: &[Piece],
) -> WheelCertificate {
    // merge consecutive fan triangles into broken wheels
    let mut merged: Vec<Piece> = Vec::new();
    for &p in pieces {
        match merged.last_mut() {
            Some(last) if last.hub.is_none() && p.hub.is_none() => last.t = p.t,
            _ => merged.push(p),
        }
    }
    let leaf = |p: &Piece| {
        let mut outer = vec![rim[p.t], b, rim[p.s]];
        outer.extend((p.s + 1..p.t).map(|i| rim[i]));
        WheelCertificate {
            kind: if p.hub.is_some() {
                WheelKind::Wheel
            } else {
                WheelKind::BrokenWheel
            },
            principal_path: [rim[p.t], b, rim[p.s]],
            outer_cycle: outer,
            hub: p.hub,
            children: None,
            shared_edge: None,
        }
    };
    let mut acc = leaf(&merged[0]);
    let start = merged[0].s;
    for p in &merged[1..] {
        let right = leaf(p);
        let mut outer = vec![rim[p.t], b, rim[start]];
        outer.extend((start + 1..p.t).map(|i| rim[i]));
        acc = WheelCertificate {
            kind: WheelKind::Composite,
            principal_path: [rim[p.t], b, rim[start]],
            outer_cycle: outer,
            hub: None,
            children: Some(Box::new((acc, right))),
            shared_edge: Some((b, rim[p.s])),
        };
    }
    acc
}

/// Best decomposition of the closed rim `c = rim[0] .. rim[m] = a` around
/// `b`, maximizing the number of wheel hubs.
fn decompose(g: &PlaneGraph, b: VertexId, rim: &[VertexId]) -> Option<Vec<Piece>> {
    let m = rim.len() - 1;
    let on_rim: BTreeSet<VertexId> = rim.iter().copied().collect();
    let hub_for = |s: usize, t: usize| -> Option<VertexId> {
        g.neighbours(b)
            .iter()
            .copied()
            .filter(|h| !on_rim.contains(h))
            .filter(|&h| (s..=t).all(|i| g.has_edge(h, rim[i])))
            .min()
    };
    // best[t]: (hubs, previous split, piece)
    let mut best: Vec<Option<(usize, Piece)>> = vec![None; m + 1];
    let mut score = vec![0usize; m + 1];
    let mut reach = vec![false; m + 1];
    reach[0] = true;
    for t in 1..=m {
        if !g.has_edge(b, rim[t]) {
            continue;
        }
        for s in 0..t {
            if !reach[s] {
                continue;
            }
            let piece = match hub_for(s, t) {
                Some(h) => Some((1, Piece { s, t, hub: Some(h) })),
                None if t == s + 1 => Some((0, Piece { s, t, hub: None })),
                None => None,
            };
            if let Some((gain, piece)) = piece {
                let total = score[s] + gain;
                if !reach[t] || total > score[t] {
                    reach[t] = true;
                    score[t] = total;
                    best[t] = Some((s, piece));
                }
            }
        }
    }
    if !reach[m] {
        return None;
    }
    let mut pieces = Vec::new();
    let mut t = m;
    while t > 0 {
        let (s, piece) = best[t].expect("reachable position has a piece");
        pieces.push(piece);
        t = s;
    }
    pieces.reverse();
    Some(pieces)
}

/// Cap on rim candidates examined per principal path.
const RIM_LIMIT: usize = 20_000;

/// Finds a generalized wheel in `g` with principal path `s` whose outer
/// cycle avoids vertices outside `allowed` (the principal path itself is
/// exempt). Among candidates the longest outer cycle wins.
pub fn recognize_generalized_wheel(
    g: &PlaneGraph,
    s: &[VertexId],
    allowed: &BTreeSet<VertexId>,
) -> Result<Option<WheelCertificate>, GraphError> {
    if s.len() != 3 || !g.is_path(s) {
        return Err(GraphError::NotAPath);
    }
    let (a, b, c) = (s[0], s[1], s[2]);
    let mut rims: Vec<Vec<VertexId>> = Vec::new();
    let mut path = vec![c];
    let mut used = vec![false; g.n()];
    used[c] = true;
    used[b] = true;
    fn walk(
        g: &PlaneGraph,
        a: VertexId,
        allowed: &BTreeSet<VertexId>,
        path: &mut Vec<VertexId>,
        used: &mut [bool],
        rims: &mut Vec<Vec<VertexId>>,
    ) {
        if rims.len() >= RIM_LIMIT {
            return;
        }
        let x = *path.last().expect("non-empty");
        let mut next: Vec<VertexId> = g.neighbours(x).to_vec();
        next.sort_unstable();
        for y in next {
            if used[y] {
                continue;
            }
            if y == a {
                path.push(y);
                rims.push(path.clone());
                path.pop();
                continue;
            }
            if !allowed.contains(&y) {
                continue;
            }
            used[y] = true;
            path.push(y);
            walk(g, a, allowed, path, used, rims);
            path.pop();
            used[y] = false;
        }
    }
    walk(g, a, allowed, &mut path, &mut used, &mut rims);
    rims.sort_by_key(|r| std::cmp::Reverse(r.len()));
    for rim in rims {
        if let Some(pieces) = decompose(g, b, &rim) {
            let cert = build_certificate(b, &rim, &pieces);
            if bounds_itself(g, &cert) {
                return Ok(Some(cert));
            }
        }
    }
    Ok(None)
}

/// The candidate's own embedding must have its outer cycle as outer face.
fn bounds_itself(g: &PlaneGraph, cert: &WheelCertificate) -> bool {
    let w = cert.subgraph_of(g);
    let walk: Vec<VertexId> = w
        .outer_boundary()
        .vertices
        .iter()
        .map(|&v| w.origin(v))
        .collect();
    let expect: BTreeSet<VertexId> = cert.outer_cycle.iter().copied().collect();
    walk.len() == cert.outer_cycle.len() && walk.iter().copied().collect::<BTreeSet<_>>() == expect
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ExceptionKind {
    TypeI,
    TypeII,
    TypeIII,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ExceptionCertificate {
    pub kind: ExceptionKind,
    /// The 2-list vertex of types (i) and (ii).
    pub u: Option<VertexId>,
    /// The boundary neighbour of `u` ending the principal path in type (ii).
    pub w: Option<VertexId>,
    pub wheel: Option<WheelCertificate>,
    /// S was read in reverse to match the clause.
    pub reversed: bool,
}

fn size_three_boundary(k: &Canvas) -> BTreeSet<VertexId> {
    (0..k.graph.n())
        .filter(|&v| k.graph.is_boundary_vertex(v) && k.lists[v].len() == 3)
        .collect()
}

fn type_one(k: &Canvas, s: &[VertexId]) -> Option<VertexId> {
    let g = &k.graph;
    let (v1, v4) = (s[0], s[3]);
    k.a.iter().copied().find(|&u| {
        !k.s.contains(u) && g.has_edge(u, v1) && g.has_edge(u, v4) && {
            let union: ColourList = k.lists[v1].union(&k.lists[v4]).copied().collect();
            k.lists[u] == union
        }
    })
}

/// Scans clauses (i), (ii), (iii) in order and returns the first witness.
pub fn classify_exception(k: &Canvas, _profile: &GirthProfile) -> Option<ExceptionCertificate> {
    let g = &k.graph;
    let s = k.s.vertices();
    let size3 = size_three_boundary(k);
    if s.len() == 4 {
        if let Some(u) = type_one(k, s) {
            return Some(ExceptionCertificate {
                kind: ExceptionKind::TypeI,
                u: Some(u),
                w: None,
                wheel: None,
                reversed: false,
            });
        }
        for reversed in [false, true] {
            let mut order = s.to_vec();
            if reversed {
                order.reverse();
            }
            let (v1, v2, v4) = (order[0], order[1], order[3]);
            for &u in &k.a {
                if k.s.contains(u) || !g.has_edge(u, v4) {
                    continue;
                }
                let mut ws: Vec<VertexId> = g.neighbours(u).to_vec();
                ws.sort_unstable();
                for w in ws {
                    if k.s.contains(w)
                        || !g.is_boundary_vertex(w)
                        || !g.has_edge(v2, w)
                        || !size3.contains(&w)
                    {
                        continue;
                    }
                    if let Ok(Some(wheel)) = recognize_generalized_wheel(g, &[v1, v2, w], &size3) {
                        return Some(ExceptionCertificate {
                            kind: ExceptionKind::TypeII,
                            u: Some(u),
                            w: Some(w),
                            wheel: Some(wheel),
                            reversed,
                        });
                    }
                }
            }
        }
    }
    if s.len() == 3 && !k.s.is_cycle() {
        if let Ok(Some(wheel)) = recognize_generalized_wheel(g, s, &size3) {
            return Some(ExceptionCertificate {
                kind: ExceptionKind::TypeIII,
                u: None,
                w: None,
                wheel: Some(wheel),
                reversed: false,
            });
        }
    }
    None
}

/// Re-checks a certificate against the clause it claims.
pub fn certificate_holds(k: &Canvas, cert: &ExceptionCertificate) -> bool {
    let g = &k.graph;
    let mut s = k.s.vertices().to_vec();
    if cert.reversed {
        s.reverse();
    }
    let wheel_ok = |w: &WheelCertificate, principal: [VertexId; 3]| {
        w.principal_path == principal
            && w.edges().iter().all(|&(x, y)| g.has_edge(x, y))
            && w.outer_cycle.iter().all(|&v| {
                g.is_boundary_vertex(v) && (principal.contains(&v) || k.lists[v].len() == 3)
            })
    };
    match cert.kind {
        ExceptionKind::TypeI => {
            s.len() == 4
                && cert.u.is_some_and(|u| {
                    k.a.contains(&u)
                        && !k.s.contains(u)
                        && g.has_edge(u, s[0])
                        && g.has_edge(u, s[3])
                        && k.lists[u]
                            == k.lists[s[0]]
                                .union(&k.lists[s[3]])
                                .copied()
                                .collect::<ColourList>()
                })
        }
        ExceptionKind::TypeII => match (cert.u, cert.w, &cert.wheel) {
            (Some(u), Some(w), Some(wheel)) => {
                s.len() == 4
                    && k.a.contains(&u)
                    && !k.s.contains(u)
                    && g.has_edge(u, s[3])
                    && g.has_edge(u, w)
                    && !k.s.contains(w)
                    && k.lists[w].len() == 3
                    && wheel_ok(wheel, [s[0], s[1], w])
            }
            _ => false,
        },
        ExceptionKind::TypeIII => match &cert.wheel {
            Some(wheel) => s.len() == 3 && wheel_ok(wheel, [s[0], s[1], s[2]]),
            None => false,
        },
    }
}

/// Colourings of the principal path that fail to extend to the wheel,
/// found by exhaustive search on the wheel itself.
pub fn blocked_principal_colourings(
    g: &PlaneGraph,
    w: &WheelCertificate,
    l: &ListAssignment,
) -> Result<BTreeSet<[Colour; 3]>, WheelError> {
    let vs: Vec<VertexId> = w.vertices().into_iter().collect();
    let index: BTreeMap<VertexId, usize> = vs.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut adj = vec![Vec::new(); vs.len()];
    for (x, y) in w.edges() {
        if !g.has_edge(x, y) {
            return Err(WheelError::NotInGraph);
        }
        let (i, j) = (index[&x], index[&y]);
        adj[i].push(j);
        adj[j].push(i);
    }
    let outer: BTreeSet<VertexId> = w.outer_cycle.iter().copied().collect();
    let p = w.principal_path;
    for &v in &vs {
        let need = if p.contains(&v) {
            1
        } else if outer.contains(&v) {
            3
        } else {
            5
        };
        if l[v].len() < need {
            return Err(WheelError::HypothesisViolated(v));
        }
    }
    let lists: Vec<ColourList> = vs.iter().map(|&v| l[v].clone()).collect();
    let ends_adjacent = g.has_edge(p[0], p[2]) && w.edges().contains(&norm(p[0], p[2]));
    let mut blocked = BTreeSet::new();
    for &c1 in &l[p[0]] {
        for &c2 in &l[p[1]] {
            for &c3 in &l[p[2]] {
                if c1 == c2 || c2 == c3 || (ends_adjacent && c1 == c3) {
                    continue;
                }
                let mut partial = vec![None; vs.len()];
                partial[index[&p[0]]] = Some(c1);
                partial[index[&p[1]]] = Some(c2);
                partial[index[&p[2]]] = Some(c3);
                match find_colouring_adj(&adj, &lists, &partial, SearchBudget::default()) {
                    SearchOutcome::Found(_) => {}
                    _ => {
                        blocked.insert([c1, c2, c3]);
                    }
                }
            }
        }
    }
    Ok(blocked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canvas::Precoloured;
    use crate::girth::girth_profile;

    // K4 minus edge 1-3: outer cycle 1 2 3 4? no: principal path 1 0 2 with
    // 0 adjacent to everything
    fn broken4() -> PlaneGraph {
        // vertices: 0 = v1, 1 = v2 (apex), 2 = v3, 3 = v4; edges 01 12 23 30 13
        let rot = vec![vec![1, 3], vec![2, 3, 0], vec![3, 1], vec![0, 1, 2]];
        PlaneGraph::new(rot, None).unwrap()
    }

    fn all(g: &PlaneGraph) -> BTreeSet<VertexId> {
        (0..g.n()).collect()
    }

    #[test]
    fn broken_wheel_recognized() {
        let g = broken4();
        let cert = recognize_generalized_wheel(&g, &[0, 1, 2], &all(&g))
            .unwrap()
            .unwrap();
        assert_eq!(cert.kind, WheelKind::BrokenWheel);
        assert_eq!(cert.outer_cycle.len(), 4);
        assert_eq!(cert.edges().len(), 5);
    }

    #[test]
    fn type_three_and_blocked() {
        let g = broken4();
        let lists: ListAssignment = vec![
            BTreeSet::from([1]),
            BTreeSet::from([2]),
            BTreeSet::from([3]),
            BTreeSet::from([1, 2, 3]),
        ];
        let k = Canvas::new(
            g.clone(),
            lists.clone(),
            Precoloured::Path(vec![0, 1, 2]),
            BTreeSet::new(),
        );
        let cert = classify_exception(&k, &girth_profile(&g)).unwrap();
        assert_eq!(cert.kind, ExceptionKind::TypeIII);
        assert!(certificate_holds(&k, &cert));
        let w = cert.wheel.unwrap();
        assert_eq!(
            blocked_principal_colourings(&g, &w, &lists).unwrap(),
            BTreeSet::from([[1, 2, 3]])
        );
        let mut other = lists;
        other[3] = BTreeSet::from([1, 2, 4]);
        assert!(blocked_principal_colourings(&g, &w, &other)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn cycle_has_no_wheel() {
        let rot = (0..5).map(|i| vec![(i + 1) % 5, (i + 4) % 5]).collect();
        let g = PlaneGraph::new(rot, None).unwrap();
        assert_eq!(
            recognize_generalized_wheel(&g, &[0, 1, 2], &all(&g)),
            Ok(None)
        );
        assert_eq!(
            recognize_generalized_wheel(&g, &[0, 2, 1], &all(&g)),
            Err(GraphError::NotAPath)
        );
    }
}
