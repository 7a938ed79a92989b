//! The colouring engine. A canvas whose precoloured path is acceptable and
//! which is not exceptional is coloured by the first reduction in a fixed
//! cascade that hands back smaller canvases which are themselves valid,
//! acceptable and unexceptional; every candidate is verified before it is
//! used, and a candidate whose pieces cannot be coloured is abandoned in
//! favour of the next one.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::canvas::{
    acceptable_cycle_opening, delete_and_subtract_except, is_acceptable_path,
    is_local_girth_assignment, subcanvas, validate_canvas, Canvas, CanvasViolation, Colour,
    ColourList, Colouring, ListAssignment, Precoloured,
};
use crate::girth::{girth_profile, GirthProfile};
use crate::oracle::{blocked_colourings_of_s, find_colouring, SearchOutcome};
use crate::plane_graph::{Anchor, PlaneGraph, VertexId};
use crate::wheels::{classify_exception, ExceptionCertificate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Tag {
    Base,
    Components,
    GrowS,
    CutVertex,
    Chord,
    SeparatingShortCycle,
    SeparatingLongCycle,
    Trim,
    ThirdVertex,
    ShortBoundary,
    Prefix,
    DeletablePath,
    DeletablePathPair,
    SeparatingPath,
    FanClosure,
    Reserve,
    LowDegree,
    ShiftS,
}

impl Tag {
    /// Reductions outside the main cascade R1–R8.
    pub fn is_supporting(self) -> bool {
        matches!(
            self,
            Tag::SeparatingPath | Tag::FanClosure | Tag::Reserve | Tag::LowDegree | Tag::ShiftS
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub tag: Tag,
    pub n: usize,
    pub list_total: usize,
    pub depth: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EngineTrace {
    /// Reductions on the successful branches, innermost first.
    pub steps: Vec<TraceStep>,
    pub fallbacks: usize,
    /// Exceptional inputs handed to the oracle to decide extendability.
    pub exception_searches: usize,
    /// Generalized-wheel pieces coloured by search after their principal
    /// path was shown not to be blocked.
    pub wheel_searches: usize,
}

impl EngineTrace {
    pub fn count(&self, tag: Tag) -> usize {
        self.steps.iter().filter(|s| s.tag == tag).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("not a local girth assignment: vertex {vertex} needs {required} colours, has {size}")]
    AssignmentInvalid {
        vertex: VertexId,
        required: usize,
        size: usize,
    },
    #[error("invalid canvas: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidCanvas(Vec<CanvasViolation>),
    #[error("S is not an acceptable path or cycle")]
    UnacceptableS,
    #[error("precolouring is not a proper L-colouring of S: {0}")]
    PhiImproper(String),
    #[error("no reduction applies")]
    NoReductionApplies,
    #[error("engine could not finish without exhaustive search")]
    EngineIncomplete,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Extension {
    Coloured(Colouring),
    Exception(ExceptionCertificate),
}

/// One application of the cascade: the reduction that succeeded first, the
/// canvases it handed on, and the colouring it assembled.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub tag: Tag,
    pub subcanvases: Vec<Canvas>,
    pub colouring: Colouring,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    pub strict: bool,
    /// Calls into the cascade before giving up.
    pub max_steps: u64,
    /// Colourings of a deleted set tried per reduction.
    pub enumeration_cap: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            strict: false,
            max_steps: 2_000_000,
            enumeration_cap: 48,
        }
    }
}

type Key = (
    Vec<Vec<VertexId>>,
    Vec<Anchor>,
    Vec<Vec<Colour>>,
    Vec<VertexId>,
    Vec<VertexId>,
);

fn key(k: &Canvas) -> Key {
    (
        k.graph.rotations().to_vec(),
        k.graph.anchors().to_vec(),
        k.lists
            .iter()
            .map(|l| l.iter().copied().collect())
            .collect(),
        k.s.vertices().to_vec(),
        k.a.iter().copied().collect(),
    )
}

fn origins(h: &PlaneGraph) -> Vec<VertexId> {
    (0..h.n()).map(|v| h.origin(v)).collect()
}

fn only(l: &ColourList) -> Colour {
    *l.iter().next().expect("singleton list")
}

/// Writes `part` into `into`; false on a clash.
fn merge(into: &mut Colouring, part: &Colouring) -> bool {
    for (v, c) in part.coloured() {
        match into.get(v) {
            Some(d) if d != c => return false,
            _ => into.set(v, c),
        }
    }
    true
}

fn complete(k: &Canvas, phi: Colouring) -> Option<Colouring> {
    (phi.is_total() && phi.respects(&k.lists) && phi.is_proper(&k.graph)).then_some(phi)
}

/// Colours of already coloured neighbours of `v`.
fn used_around(g: &PlaneGraph, phi: &Colouring, v: VertexId) -> BTreeSet<Colour> {
    g.neighbours(v).iter().filter_map(|&u| phi.get(u)).collect()
}

fn s_colouring(k: &Canvas) -> Colouring {
    let mut phi = Colouring::empty(k.graph.n());
    for &v in k.s.vertices() {
        phi.set(v, only(&k.lists[v]));
    }
    phi
}

/// The outer cycle of a 2-connected graph.
fn outer_cycle(g: &PlaneGraph) -> Option<Vec<VertexId>> {
    if !g.is_2_connected() {
        return None;
    }
    let c = g.outer_boundary().vertices;
    let distinct: BTreeSet<_> = c.iter().collect();
    (distinct.len() == c.len() && g.is_cycle(&c)).then_some(c)
}

/// The outer cycle read so that it starts with S, once in each direction S
/// can be read.
fn walks_from_s(c: &[VertexId], s: &[VertexId]) -> Vec<Vec<VertexId>> {
    let mut out: Vec<Vec<VertexId>> = Vec::new();
    if s.is_empty() {
        return out;
    }
    for s in [s.to_vec(), s.iter().rev().copied().collect::<Vec<_>>()] {
        let Some(i) = c.iter().position(|&x| x == s[0]) else {
            continue;
        };
        let fwd: Vec<VertexId> = (0..c.len()).map(|t| c[(i + t) % c.len()]).collect();
        let mut bwd = vec![fwd[0]];
        bwd.extend(fwd[1..].iter().rev());
        for w in [fwd, bwd] {
            if w[..s.len()] == s[..] && !out.contains(&w) {
                out.push(w);
            }
        }
    }
    out
}

/// Proper colourings of `vs` (in order) from `lists`, avoiding the colours
/// of coloured neighbours in `fixed`, at most `cap` of them.
fn enumerate(
    g: &PlaneGraph,
    vs: &[VertexId],
    lists: &[Vec<Colour>],
    fixed: &Colouring,
    cap: usize,
) -> Vec<Vec<Colour>> {
    fn rec(
        g: &PlaneGraph,
        vs: &[VertexId],
        lists: &[Vec<Colour>],
        fixed: &Colouring,
        cap: usize,
        cur: &mut Vec<Colour>,
        out: &mut Vec<Vec<Colour>>,
    ) {
        if out.len() >= cap {
            return;
        }
        let i = cur.len();
        if i == vs.len() {
            out.push(cur.clone());
            return;
        }
        let v = vs[i];
        for &c in &lists[i] {
            let clash = g.neighbours(v).iter().any(|&u| fixed.get(u) == Some(c))
                || (0..i).any(|j| cur[j] == c && g.has_edge(v, vs[j]));
            if !clash {
                cur.push(c);
                rec(g, vs, lists, fixed, cap, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(g, vs, lists, fixed, cap, &mut Vec::new(), &mut out);
    out
}

/// Appends `v` with colour `c` to the end of S (or its start when `front`).
fn pin_at(k: &Canvas, v: VertexId, c: Colour, front: bool) -> Canvas {
    let mut s = k.s.vertices().to_vec();
    if front {
        s.insert(0, v);
    } else {
        s.push(v);
    }
    let mut out = k.clone();
    out.lists[v] = BTreeSet::from([c]);
    out.s = Precoloured::Path(s);
    out
}

/// A valid canvas with a pinned, properly coloured, acceptable path S that
/// is not exceptional: the shape every recursive call receives.
pub fn admissible(k: &Canvas) -> bool {
    let Precoloured::Path(s) = &k.s else {
        return false;
    };
    if k.lists.len() != k.graph.n()
        || s.iter()
            .any(|&v| v >= k.lists.len() || k.lists[v].len() != 1)
    {
        return false;
    }
    for (i, &u) in s.iter().enumerate() {
        for &v in &s[i + 1..] {
            if k.graph.has_edge(u, v) && k.lists[u] == k.lists[v] {
                return false;
            }
        }
    }
    let p = girth_profile(&k.graph);
    validate_canvas(k, &p).is_ok()
        && is_acceptable_path(&k.graph, &p, s) == Ok(true)
        && classify_exception(k, &p).is_none()
}

pub struct Engine {
    config: EngineConfig,
    trace: EngineTrace,
    memo: HashMap<Key, Option<Colouring>>,
    steps: u64,
    exhausted: bool,
    depth: usize,
    capture: Option<Vec<Canvas>>,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new(EngineConfig::default())
    }
}

impl Engine {
    pub fn new(config: EngineConfig) -> Self {
        Engine {
            config,
            trace: EngineTrace::default(),
            memo: HashMap::new(),
            steps: 0,
            exhausted: false,
            depth: 0,
            capture: None,
        }
    }

    pub fn strict(strict: bool) -> Self {
        Engine::new(EngineConfig {
            strict,
            ..EngineConfig::default()
        })
    }

    pub fn trace(&self) -> &EngineTrace {
        &self.trace
    }

    /// Colours a plane graph from a local girth list assignment.
    pub fn colour(&mut self, g: &PlaneGraph, l: &ListAssignment) -> Result<Colouring, EngineError> {
        let p = girth_profile(g);
        if l.len() != g.n() {
            return Err(EngineError::InvalidCanvas(vec![
                CanvasViolation::ListDomain {
                    expected: g.n(),
                    found: l.len(),
                },
            ]));
        }
        is_local_girth_assignment(g, &p, l).map_err(|t| EngineError::AssignmentInvalid {
            vertex: t.vertex,
            required: t.required,
            size: t.size,
        })?;
        let k = Canvas::new(
            g.clone(),
            l.clone(),
            Precoloured::Path(vec![]),
            BTreeSet::new(),
        );
        if let Some(phi) = self.solve(&k) {
            return Ok(phi);
        }
        self.fallback_backtrack(&k)?
            .ok_or(EngineError::EngineIncomplete)
    }

    /// Extends `phi` (defined on S) to the whole canvas, or certifies that
    /// the canvas is exceptional and `phi` does not extend.
    pub fn extend(&mut self, k: &Canvas, phi: &Colouring) -> Result<Extension, EngineError> {
        let (kk, opened) = self.prepare(k, phi)?;
        let p = girth_profile(&k.graph);
        let pinned = k
            .pinned(phi)
            .map_err(|e| EngineError::PhiImproper(e.to_string()))?;
        if let Some(cert) = classify_exception(&pinned, &p) {
            if let Some(out) = self.solve(&kk) {
                return Ok(Extension::Coloured(out));
            }
            self.trace.exception_searches += 1;
            return Ok(
                match find_colouring(&kk.graph, &kk.lists, &Colouring::empty(0)) {
                    SearchOutcome::Found(out) => Extension::Coloured(out),
                    _ => Extension::Exception(cert),
                },
            );
        }
        let _ = opened;
        if let Some(out) = self.solve(&kk) {
            return Ok(Extension::Coloured(out));
        }
        let out = self.fallback_backtrack(&kk)?;
        out.map(Extension::Coloured)
            .ok_or(EngineError::EngineIncomplete)
    }

    /// Applies the first reduction of the cascade that succeeds.
    pub fn reduce_once(&mut self, k: &Canvas, phi: &Colouring) -> Result<Reduction, EngineError> {
        let (kk, _) = self.prepare(k, phi)?;
        self.memo.clear();
        self.capture = Some(Vec::new());
        let out = self.solve(&kk);
        let subs = self.capture.take().unwrap_or_default();
        let colouring = out.ok_or(EngineError::NoReductionApplies)?;
        let tag = self
            .trace
            .steps
            .iter()
            .rev()
            .find(|s| s.depth == 1)
            .map(|s| s.tag)
            .ok_or(EngineError::NoReductionApplies)?;
        Ok(Reduction {
            tag,
            subcanvases: subs,
            colouring,
        })
    }

    /// Exhaustive search, used only when the cascade gives up.
    pub fn fallback_backtrack(&mut self, k: &Canvas) -> Result<Option<Colouring>, EngineError> {
        if self.config.strict {
            return Err(EngineError::EngineIncomplete);
        }
        self.trace.fallbacks += 1;
        Ok(find_colouring(&k.graph, &k.lists, &Colouring::empty(0)).colouring())
    }

    /// Validates the input and returns the pinned canvas with S a path.
    /// A cycle S loses one edge whose removal leaves an acceptable path;
    /// both ends are precoloured differently, so the edge is redundant.
    fn prepare(&self, k: &Canvas, phi: &Colouring) -> Result<(Canvas, bool), EngineError> {
        k.validate().map_err(EngineError::InvalidCanvas)?;
        let p = girth_profile(&k.graph);
        let pinned = k
            .pinned(phi)
            .map_err(|e| EngineError::PhiImproper(e.to_string()))?;
        for &v in k.s.vertices() {
            let c = phi.get(v).expect("pinned");
            if !k.lists[v].contains(&c) {
                return Err(EngineError::PhiImproper(format!(
                    "colour {c} not in L({v})"
                )));
            }
            for &u in k.s.vertices() {
                if k.graph.has_edge(u, v) && phi.get(u) == Some(c) {
                    return Err(EngineError::PhiImproper(format!(
                        "{u} and {v} share colour {c}"
                    )));
                }
            }
        }
        match &k.s {
            Precoloured::Path(s) => {
                if is_acceptable_path(&k.graph, &p, s) != Ok(true) {
                    return Err(EngineError::UnacceptableS);
                }
                Ok((pinned, false))
            }
            Precoloured::Cycle(s) => {
                let path = acceptable_cycle_opening(&k.graph, &p, s)
                    .ok()
                    .flatten()
                    .ok_or(EngineError::UnacceptableS)?;
                let (a, b) = (path[path.len() - 1], path[0]);
                let all = vec![true; k.graph.n()];
                let h = k
                    .graph
                    .subgraph(&all, |x, y| (x, y) != (a.min(b), a.max(b)));
                Ok((
                    Canvas::new(
                        h,
                        pinned.lists.clone(),
                        Precoloured::Path(path),
                        pinned.a.clone(),
                    ),
                    true,
                ))
            }
        }
    }

    fn solve(&mut self, k: &Canvas) -> Option<Colouring> {
        self.steps += 1;
        if self.steps > self.config.max_steps {
            self.exhausted = true;
        }
        if self.exhausted {
            return None;
        }
        let key = key(k);
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        self.depth += 1;
        let out = self.cascade(k);
        self.depth -= 1;
        if let Some(phi) = &out {
            assert!(
                phi.is_total() && phi.respects(&k.lists) && phi.is_proper(&k.graph),
                "engine produced an invalid colouring"
            );
        }
        if out.is_some() || !self.exhausted {
            self.memo.insert(key, out.clone());
        }
        out
    }

    /// Gates `sub`, colours it and lifts the colouring to `parent` via `map`.
    fn sub(&mut self, parent: &Canvas, sub: Canvas, map: &[VertexId]) -> Option<Colouring> {
        if !admissible(&sub) {
            return None;
        }
        debug_assert!(
            (sub.graph.n(), sub.total_list_size()) < (parent.graph.n(), parent.total_list_size()),
            "reduction did not shrink the canvas"
        );
        if self.depth == 1 {
            if let Some(c) = &mut self.capture {
                c.push(sub.clone());
            }
        }
        let phi = self.solve(&sub)?;
        let mut out = Colouring::empty(parent.graph.n());
        for (v, c) in phi.coloured() {
            out.set(map[v], c);
        }
        Some(out)
    }

    fn cascade(&mut self, k: &Canvas) -> Option<Colouring> {
        let g = &k.graph;
        if k.s.len() == g.n() {
            let phi = complete(k, s_colouring(k))?;
            self.record(Tag::Base, k);
            return Some(phi);
        }
        type Step = fn(&mut Engine, &Canvas) -> Option<Colouring>;
        let cascade: [(Tag, Step); 17] = [
            (Tag::Components, Engine::components),
            (Tag::GrowS, Engine::grow_s),
            (Tag::CutVertex, Engine::cut_vertex),
            (Tag::Chord, Engine::chord),
            (Tag::SeparatingShortCycle, |e, k| {
                e.separating_cycles(k, 3, 4)
            }),
            (Tag::SeparatingLongCycle, |e, k| {
                e.separating_cycles(k, 5, 6)
            }),
            (Tag::Trim, Engine::trim),
            (Tag::ThirdVertex, Engine::third_vertex),
            (Tag::ShortBoundary, Engine::short_boundary),
            (Tag::Prefix, Engine::prefix),
            (Tag::DeletablePath, Engine::deletable_path),
            (Tag::DeletablePathPair, Engine::deletable_path_pair),
            (Tag::SeparatingPath, Engine::separating_paths),
            (Tag::FanClosure, Engine::fan_closure),
            (Tag::Reserve, Engine::reserve),
            (Tag::LowDegree, Engine::low_degree),
            (Tag::ShiftS, Engine::shift_s),
        ];
        for (tag, step) in cascade {
            if self.exhausted {
                return None;
            }
            let mark = self.trace.steps.len();
            if self.depth == 1 {
                if let Some(c) = &mut self.capture {
                    c.clear();
                }
            }
            if let Some(phi) = step(self, k) {
                if let Some(phi) = complete(k, phi) {
                    self.record(tag, k);
                    return Some(phi);
                }
            }
            self.trace.steps.truncate(mark);
        }
        None
    }

    fn record(&mut self, tag: Tag, k: &Canvas) {
        self.trace.steps.push(TraceStep {
            tag,
            n: k.graph.n(),
            list_total: k.total_list_size(),
            depth: self.depth,
        });
    }

    // R1
    fn components(&mut self, k: &Canvas) -> Option<Colouring> {
        let g = &k.graph;
        if g.components().len() <= 1 {
            return None;
        }
        let mut phi = Colouring::empty(g.n());
        for comp in g.components().to_vec() {
            let set: BTreeSet<VertexId> = comp.into_iter().collect();
            let keep: Vec<bool> = (0..g.n()).map(|v| set.contains(&v)).collect();
            let h = g.induced(&keep);
            let sub = subcanvas(k, &h).ok()?;
            let part = self.sub(k, sub, &origins(&h))?;
            merge(&mut phi, &part);
        }
        Some(phi)
    }

    /// With at most one precoloured vertex, precolour a boundary vertex
    /// (and then a boundary neighbour of it).
    fn grow_s(&mut self, k: &Canvas) -> Option<Colouring> {
        let g = &k.graph;
        let s = k.s.vertices();
        match s.len() {
            0 => {
                let v = (0..g.n()).find(|&v| g.is_boundary_vertex(v))?;
                for &c in &k.lists[v] {
                    let kk = pin_at(k, v, c, false);
                    if let Some(phi) = self.sub(k, kk, &(0..g.n()).collect::<Vec<_>>()) {
                        return Some(phi);
                    }
                }
                None
            }
            1 => {
                let v = s[0];
                let fixed = only(&k.lists[v]);
                let mut nbrs: Vec<VertexId> = g
                    .neighbours(v)
                    .iter()
                    .copied()
                    .filter(|&w| g.is_boundary_edge(v, w))
                    .collect();
                nbrs.sort_unstable();
                for w in nbrs {
                    for &c in &k.lists[w] {
                        if c == fixed {
                            continue;
                        }
                        let kk = pin_at(k, w, c, false);
                        if let Some(phi) = self.sub(k, kk, &(0..g.n()).collect::<Vec<_>>()) {
                            return Some(phi);
                        }
                    }
                }
                None
            }
            _ => None,
        }
    }

    // R2: a block hanging off a cut vertex is coloured after the rest, with
    // the cut vertex as its precoloured path.
    fn cut_vertex(&mut self, k: &Canvas) -> Option<Colouring> {
        let g = &k.graph;
        if !g.is_connected() {
            return None;
        }
        let s: BTreeSet<VertexId> = k.s.vertices().iter().copied().collect();
        for u in g.cut_vertices() {
            let mut comp = vec![usize::MAX; g.n()];
            let mut count = 0;
            for r in 0..g.n() {
                if r == u || comp[r] != usize::MAX {
                    continue;
                }
                comp[r] = count;
                let mut stack = vec![r];
                while let Some(x) = stack.pop() {
                    for &y in g.neighbours(x) {
                        if y != u && comp[y] == usize::MAX {
                            comp[y] = count;
                            stack.push(y);
                        }
                    }
                }
                count += 1;
            }
            let s_comp = s.iter().find(|&&v| v != u).map(|&v| comp[v]);
            for d in 0..count {
                if Some(d) == s_comp {
                    continue;
                }
                // the rest must reach the outer face so that u bounds the
                // outer face of the hanging part
                let rest_outer =
                    (0..g.n()).any(|v| v != u && comp[v] != d && g.is_boundary_vertex(v));
                if !rest_outer {
                    continue;
                }
                let keep_x: Vec<bool> = (0..g.n()).map(|v| v == u || comp[v] != d).collect();
                let keep_y: Vec<bool> = (0..g.n()).map(|v| v == u || comp[v] == d).collect();
                let hx = g.induced(&keep_x);
                let hy = g.induced(&keep_y);
                let kx = subcanvas(k, &hx).ok()?;
                let Some(phi) = self.sub(k, kx, &origins(&hx)) else {
                    continue;
                };
                let mut ky = subcanvas(k, &hy).ok()?;
                let ul = hy.local_of(u).expect("cut vertex kept");
                ky.lists[ul] = BTreeSet::from([phi.get(u).expect("coloured")]);
                ky.s = Precoloured::Path(vec![ul]);
                let Some(rest) = self.sub(k, ky, &origins(&hy)) else {
                    continue;
                };
                let mut out = phi;
                if merge(&mut out, &rest) {
                    return Some(out);
                }
            }
        }
        None
    }

    // R3
    fn chord(&mut self, k: &Canvas) -> Option<Colouring> {
        let g = &k.graph;
        let c = outer_cycle(g)?;
        let chords = g.chords_of(&c).ok()?;
        let s: BTreeSet<VertexId> = k.s.vertices().iter().copied().collect();
        for (u, w) in chords {
            let Ok((g1, g2)) = g.split_along_path(&[u, w]) else {
                continue;
            };
            let inside = |h: &PlaneGraph| s.iter().filter(|&&v| h.local_of(v).is_some()).count();
            let mut orders = vec![(&g1, &g2), (&g2, &g1)];
            if inside(&g2) > inside(&g1) {
                orders.swap(0, 1);
            }
            for (ga, gb) in orders {
                if let Some(phi) = self.chord_split(k, ga, gb, u, w) {
                    return Some(phi);
                }
            }
            if let Some(phi) = self.chord_four_trick(k, &g1, &g2, u, w) {
                return Some(phi);
            }
        }
        None
    }

    /// Colours `ga` first, then `gb` with its part of S extended by the
    /// chord.
    fn chord_split(
        &mut self,
        k: &Canvas,
        ga: &PlaneGraph,
        gb: &PlaneGraph,
        u: VertexId,
        w: VertexId,
    ) -> Option<Colouring> {
        let ka = subcanvas(k, ga).ok()?;
        let phi = self.sub(k, ka, &origins(ga))?;
        let kb = subcanvas(k, gb).ok()?;
        let path = join_edge(&kb, gb.local_of(u)?, gb.local_of(w)?)?;
        let kb = pin_from(kb, path, &phi, gb);
        let rest = self.sub(k, kb, &origins(gb))?;
        let mut out = phi;
        merge(&mut out, &rest).then_some(out)
    }

    /// S crosses the chord at an interior vertex `w` of S. Colour the
    /// short side twice, the second time avoiding the first colour of the
    /// other chord end, and let the long side choose between the two.
    fn chord_four_trick(
        &mut self,
        k: &Canvas,
        g1: &PlaneGraph,
        g2: &PlaneGraph,
        u: VertexId,
        w: VertexId,
    ) -> Option<Colouring> {
        let s = k.s.vertices();
        for (x, y) in [(u, w), (w, u)] {
            // y interior to S, x off S with a long list
            let Some(i) = s.iter().position(|&v| v == y) else {
                continue;
            };
            if i == 0 || i + 1 == s.len() || s.contains(&x) || k.lists[x].len() < 4 {
                continue;
            }
            for (ga, gb) in [(g1, g2), (g2, g1)] {
                let count = |h: &PlaneGraph| s.iter().filter(|&&v| h.local_of(v).is_some()).count();
                if count(ga) > count(gb) {
                    continue;
                }
                let ka = subcanvas(k, ga).ok()?;
                let Some(phi1) = self.sub(k, ka.clone(), &origins(ga)) else {
                    continue;
                };
                let c1 = phi1.get(x)?;
                let mut ka2 = ka;
                ka2.lists[ga.local_of(x)?].remove(&c1);
                let Some(phi2) = self.sub(k, ka2, &origins(ga)) else {
                    continue;
                };
                let c2 = phi2.get(x)?;
                let mut kb = subcanvas(k, gb).ok()?;
                let xl = gb.local_of(x)?;
                kb.lists[xl] = [c1, c2, phi1.get(y)?]
                    .into_iter()
                    .filter(|c| k.lists[x].contains(c))
                    .collect();
                let Some(rest) = self.sub(k, kb, &origins(gb)) else {
                    continue;
                };
                let first = if rest.get(x) == Some(c1) { phi1 } else { phi2 };
                let mut out = first;
                if merge(&mut out, &rest) {
                    return Some(out);
                }
            }
        }
        None
    }

    // R4 / R5
    fn separating_cycles(&mut self, k: &Canvas, min: usize, max: usize) -> Option<Colouring> {
        let g = &k.graph;
        if !g.is_connected() {
            return None;
        }
        for t in g.short_cycles(min, max) {
            let Ok((open, int)) = g.interior(&t) else {
                continue;
            };
            if open.is_empty() {
                continue;
            }
            let keep: Vec<bool> = (0..g.n()).map(|v| !open.contains(&v)).collect();
            let ext = g.induced(&keep);
            if ext.n() == t.len() {
                continue;
            }
            let Ok(ke) = subcanvas(k, &ext) else { continue };
            let Some(phi) = self.sub(k, ke, &origins(&ext)) else {
                continue;
            };
            if let Some(rest) = self.colour_interior(k, &t, &int, &phi) {
                let mut out = phi;
                if merge(&mut out, &rest) {
                    return Some(out);
                }
            }
        }
        None
    }

    /// Colours `Int[T]` given colours on `T`: keep a short subpath of `T`
    /// as the precoloured path, delete the rest of `T` and remove its
    /// colours from the lists of interior neighbours.
    fn colour_interior(
        &mut self,
        k: &Canvas,
        t: &[VertexId],
        int: &PlaneGraph,
        phi: &Colouring,
    ) -> Option<Colouring> {
        let m = t.len();
        let local: Vec<VertexId> = t
            .iter()
            .map(|&v| int.local_of(v).expect("cycle kept"))
            .collect();
        let mut lists: ListAssignment = (0..int.n())
            .map(|v| k.lists[int.origin(v)].clone())
            .collect();
        let mut col = Colouring::empty(int.n());
        for (i, &v) in t.iter().enumerate() {
            let c = phi.get(v)?;
            lists[local[i]] = BTreeSet::from([c]);
            col.set(local[i], c);
        }
        let base = Canvas::new(
            int.clone(),
            lists,
            Precoloured::Path(vec![]),
            BTreeSet::new(),
        );
        let sizes: Vec<usize> = if m <= 4 { vec![2, 3] } else { vec![3, 2, 4] };
        for q in sizes {
            if q >= m {
                continue;
            }
            for start in 0..m {
                for dir in [1, m - 1] {
                    if q == 2 && dir != 1 {
                        continue;
                    }
                    let path: Vec<VertexId> =
                        (0..q).map(|i| local[(start + i * dir) % m]).collect();
                    let doomed: BTreeSet<VertexId> = local
                        .iter()
                        .copied()
                        .filter(|v| !path.contains(v))
                        .collect();
                    let mut kq = base.clone();
                    kq.s = Precoloured::Path(path);
                    let Ok(sub) = delete_and_subtract_except(&kq, &col, &doomed, &BTreeSet::new())
                    else {
                        continue;
                    };
                    let map: Vec<VertexId> = (0..sub.graph.n())
                        .map(|v| int.origin(sub.graph.origin(v)))
                        .collect();
                    if let Some(rest) = self.sub(k, sub, &map) {
                        return Some(rest);
                    }
                }
            }
        }
        if m <= 4 {
            // the whole cycle as S, opened at one edge
            for start in 0..m {
                let path: Vec<VertexId> = (0..m).map(|i| local[(start + i) % m]).collect();
                let (a, b) = (path[m - 1], path[0]);
                let all = vec![true; int.n()];
                let h = int.subgraph(&all, |x, y| (x, y) != (a.min(b), a.max(b)));
                let mut kc = base.clone();
                kc.graph = h;
                kc.s = Precoloured::Path(path);
                let map: Vec<VertexId> = (0..int.n()).map(|v| int.origin(v)).collect();
                if let Some(rest) = self.sub(k, kc, &map) {
                    return Some(rest);
                }
            }
        }
        None
    }

    // R6: boundary lists down to three colours, one vertex at a time, as
    // long as the canvas stays unexceptional.
    fn trim(&mut self, k: &Canvas) -> Option<Colouring> {
        let g = &k.graph;
        let mut out = k.clone();
        let mut changed = false;
        for v in 0..g.n() {
            if k.s.contains(v)
                || k.a.contains(&v)
                || !g.is_boundary_vertex(v)
                || k.lists[v].len() <= 3
            {
                continue;
            }
            let mut cand = out.clone();
            cand.lists[v] = k.lists[v].iter().take(3).copied().collect();
            if admissible(&cand) {
                out = cand;
                changed = true;
            }
        }
        if !changed {
            return None;
        }
        self.sub(k, out, &(0..g.n()).collect::<Vec<_>>())
    }

    /// Two precoloured vertices: precolour a third, or reserve two colours
    /// of it at its interior neighbour when every choice is exceptional.
    fn third_vertex(&mut self, k: &Canvas) -> Option<Colouring> {
        if k.s.len() != 2 {
            return None;
        }
        let g = &k.graph;
        let c = outer_cycle(g)?;
        if c.len() <= 4 {
            return None;
        }
        let id: Vec<VertexId> = (0..g.n()).collect();
        for walk in walks_from_s(&c, k.s.vertices()) {
            let (v2, v3) = (walk[1], walk[2]);
            let avoid = only(&k.lists[v2]);
            let front = k.s.vertices()[0] != walk[0];
            for &col in &k.lists[v3] {
                if col == avoid || g.has_edge(v3, walk[0]) && col == only(&k.lists[walk[0]]) {
                    continue;
                }
                let kk = pin_at(k, v3, col, front);
                if let Some(phi) = self.sub(k, kk, &id) {
                    return Some(phi);
                }
            }
        }
        None
    }

    /// At most three boundary vertices outside S: colour some of them and
    /// delete them.
    fn short_boundary(&mut self, k: &Canvas) -> Option<Colouring> {
        let g = &k.graph;
        let c = outer_cycle(g)?;
        let s = k.s.vertices();
        if s.is_empty() {
            return None;
        }
        let walk = walks_from_s(&c, s).into_iter().next()?;
        let rest: Vec<VertexId> = walk[s.len()..].to_vec();
        if rest.is_empty() || rest.len() > 3 {
            return None;
        }
        let fixed = s_colouring(k);
        let mut segments: Vec<Vec<VertexId>> = Vec::new();
        for len in (1..=rest.len()).rev() {
            for i in 0..=rest.len() - len {
                segments.push(rest[i..i + len].to_vec());
            }
        }
        for d in segments {
            let lists: Vec<Vec<Colour>> = d
                .iter()
                .map(|&v| k.lists[v].iter().copied().collect())
                .collect();
            for cols in enumerate(g, &d, &lists, &fixed, self.config.enumeration_cap) {
                let mut col = Colouring::empty(g.n());
                for (&v, &x) in d.iter().zip(&cols) {
                    col.set(v, x);
                }
                let doomed: BTreeSet<VertexId> = d.iter().copied().collect();
                let Ok(sub) = delete_and_subtract_except(k, &col, &doomed, &BTreeSet::new()) else {
                    continue;
                };
                let map = origins(&sub.graph);
                if let Some(part) = self.sub(k, sub, &map) {
                    let mut out = col;
                    if merge(&mut out, &part) {
                        return Some(out);
                    }
                }
            }
        }
        None
    }

    // R7: the list conditions just after S.
    fn prefix(&mut self, k: &Canvas) -> Option<Colouring> {
        let g = &k.graph;
        let c = outer_cycle(g)?;
        let s = k.s.vertices();
        let kl = s.len();
        if kl == 0 {
            return None;
        }
        for walk in walks_from_s(&c, s) {
            let q = walk.len();
            if q < kl + 3 {
                continue;
            }
            let v = |i: usize| walk[(i - 1) % q];
            let l = |i: usize| &k.lists[v(i)];
            // (1) the colour of v_k is missing from L(v_{k+1})
            if !l(kl + 1).contains(&only(l(kl))) {
                let mut col = Colouring::empty(g.n());
                col.set(v(kl), only(l(kl)));
                if let Some(out) = self.delete_then_colour(k, &col, &[], None) {
                    return Some(out);
                }
            }
            let Some((kp, avail)) = available(k, &walk) else {
                continue;
            };
            if q < kp + 3 {
                continue;
            }
            // (2) a colour of v_{k'+1} other than c missing from L(v_{k'+2})
            for &c1 in l(kp + 1) {
                if c1 == avail || l(kp + 2).contains(&c1) {
                    continue;
                }
                let mut col = Colouring::empty(g.n());
                col.set(v(kp + 1), c1);
                if let Some(out) = self.delete_then_colour(k, &col, &[v(kp)], Some(v(kp))) {
                    return Some(out);
                }
            }
            // (3) a colour of v_{k'+2} missing from L(v_{k'+3})
            for &c2 in l(kp + 2) {
                if l(kp + 3).contains(&c2) {
                    continue;
                }
                for &c1 in l(kp + 1) {
                    if c1 == avail || c1 == c2 {
                        continue;
                    }
                    let mut col = Colouring::empty(g.n());
                    col.set(v(kp + 1), c1);
                    col.set(v(kp + 2), c2);
                    if let Some(out) = self.delete_then_colour(k, &col, &[v(kp)], Some(v(kp))) {
                        return Some(out);
                    }
                }
            }
        }
        None
    }

    /// Deletes the coloured vertices of `col`, removing their colours from
    /// the lists of surviving neighbours except `exempt`, colours what is
    /// left and adds `col`. With an exempt A-vertex `keep`, the lifted
    /// colouring must avoid the deleted colours there.
    fn delete_then_colour(
        &mut self,
        k: &Canvas,
        col: &Colouring,
        exempt: &[VertexId],
        keep: Option<VertexId>,
    ) -> Option<Colouring> {
        let doomed: BTreeSet<VertexId> = col.coloured().map(|(v, _)| v).collect();
        let exempt: BTreeSet<VertexId> = exempt
            .iter()
            .copied()
            .filter(|v| !k.s.contains(*v))
            .collect();
        let sub = delete_and_subtract_except(k, col, &doomed, &exempt).ok()?;
        let _ = keep;
        let map = origins(&sub.graph);
        let part = self.sub(k, sub, &map)?;
        let mut out = col.clone();
        merge(&mut out, &part).then_some(out)
    }

    // R8
    fn deletable_path(&mut self, k: &Canvas) -> Option<Colouring> {
        let g = &k.graph;
        let c = outer_cycle(g)?;
        let s = k.s.vertices();
        if s.is_empty() {
            return None;
        }
        for walk in walks_from_s(&c, s) {
            let Some((kp, avail, j)) = find_deletable(k, &walk) else {
                continue;
            };
            let q = walk.len();
            let v = |i: usize| walk[(i - 1) % q];
            let p: Vec<VertexId> = (kp + 1..=j).map(v).collect();
            let next = v(j % q + 1);
            for cols in self.path_colourings(k, &p, avail, next, kp) {
                let mut col = Colouring::empty(g.n());
                for (&x, &y) in p.iter().zip(&cols) {
                    col.set(x, y);
                }
                if let Some(out) = self.delete_then_colour(k, &col, &[v(kp)], Some(v(kp))) {
                    return Some(out);
                }
            }
        }
        None
    }

    /// Colourings of the deletable path `p`: the last colour avoids the list
    /// after the path, the first avoids the available colour, and those
    /// using two colours on the tail are tried first.
    fn path_colourings(
        &self,
        k: &Canvas,
        p: &[VertexId],
        avail: Colour,
        next: VertexId,
        _kp: usize,
    ) -> Vec<Vec<Colour>> {
        let g = &k.graph;
        let fixed = s_colouring(k);
        let lists: Vec<Vec<Colour>> = p
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                k.lists[v]
                    .iter()
                    .copied()
                    .filter(|&c| i != 0 || c != avail)
                    .filter(|&c| i + 1 != p.len() || !k.lists[next].contains(&c))
                    .collect()
            })
            .collect();
        let mut all = enumerate(g, p, &lists, &fixed, 4096);
        let tail_from = if p.len() > 1 && k.a.contains(&p[1]) {
            2
        } else {
            1
        };
        let spread = |cols: &Vec<Colour>| {
            cols[tail_from.min(cols.len())..]
                .iter()
                .collect::<BTreeSet<_>>()
                .len()
        };
        all.sort_by_key(|cols| (spread(cols), cols.clone()));
        all.truncate(self.config.enumeration_cap);
        all
    }

    /// The deletable path with two adjacent interior vertices of girth at
    /// least five hanging off `v_{k'+1}` and `v_{k'+3}`: colour and delete
    /// them together with the path.
    fn deletable_path_pair(&mut self, k: &Canvas) -> Option<Colouring> {
        let g = &k.graph;
        let c = outer_cycle(g)?;
        let s = k.s.vertices();
        if s.is_empty() {
            return None;
        }
        let p5 = girth_profile(g);
        for walk in walks_from_s(&c, s) {
            let Some((kp, avail, j)) = find_deletable(k, &walk) else {
                continue;
            };
            let q = walk.len();
            let v = |i: usize| walk[(i - 1) % q];
            let (a, b) = (v(kp + 1), v(kp + 3));
            let deep = |x: VertexId| !g.is_boundary_vertex(x) && p5.of(x).at_least(5);
            for &u1 in g.neighbours(a) {
                for &u2 in g.neighbours(b) {
                    if u1 == u2 || !deep(u1) || !deep(u2) || !g.has_edge(u1, u2) {
                        continue;
                    }
                    let p: Vec<VertexId> = (kp + 1..=j).map(v).collect();
                    let next = v(j % q + 1);
                    for cols in self.path_colourings(k, &p, avail, next, kp) {
                        let mut col = Colouring::empty(g.n());
                        for (&x, &y) in p.iter().zip(&cols) {
                            col.set(x, y);
                        }
                        let mut fixed = s_colouring(k);
                        merge(&mut fixed, &col);
                        let extra = [u1, u2];
                        let lists: Vec<Vec<Colour>> = extra
                            .iter()
                            .map(|&x| k.lists[x].iter().copied().collect())
                            .collect();
                        for more in enumerate(g, &extra, &lists, &fixed, 4) {
                            let mut col2 = col.clone();
                            col2.set(u1, more[0]);
                            col2.set(u2, more[1]);
                            if let Some(out) =
                                self.delete_then_colour(k, &col2, &[v(kp)], Some(v(kp)))
                            {
                                return Some(out);
                            }
                        }
                    }
                }
            }
        }
        None
    }

    /// Separating paths with one or two interior vertices: colour the side
    /// holding S, then the other side with the path as its precoloured
    /// path. When that side is a generalized wheel on a 3-vertex path, its
    /// single blocked colouring is kept out of the first side.
    fn separating_paths(&mut self, k: &Canvas) -> Option<Colouring> {
        let g = &k.graph;
        outer_cycle(g)?;
        let s: BTreeSet<VertexId> = k.s.vertices().iter().copied().collect();
        let mut paths: Vec<Vec<VertexId>> = Vec::new();
        let inner = |x: VertexId| !g.is_boundary_vertex(x);
        for v in 0..g.n() {
            if inner(v) {
                continue;
            }
            for &x in g.neighbours(v) {
                if !inner(x) {
                    continue;
                }
                for &w in g.neighbours(x) {
                    if w > v && !inner(w) {
                        paths.push(vec![v, x, w]);
                    }
                }
                for &y in g.neighbours(x) {
                    if !inner(y) {
                        continue;
                    }
                    for &w in g.neighbours(y) {
                        if w > v && w != x && !inner(w) {
                            paths.push(vec![v, x, y, w]);
                        }
                    }
                }
            }
        }
        for p in paths {
            let Ok((g1, g2)) = g.split_along_path(&p) else {
                continue;
            };
            for (ga, gb) in [(&g1, &g2), (&g2, &g1)] {
                let off_b = s
                    .iter()
                    .all(|&v| gb.local_of(v).is_none() || p.contains(&v));
                if !off_b {
                    continue;
                }
                if let Some(out) = self.path_split(k, ga, gb, &p) {
                    return Some(out);
                }
            }
        }
        None
    }

    fn path_split(
        &mut self,
        k: &Canvas,
        ga: &PlaneGraph,
        gb: &PlaneGraph,
        p: &[VertexId],
    ) -> Option<Colouring> {
        let pb: Vec<VertexId> = p
            .iter()
            .map(|&v| gb.local_of(v).expect("path kept"))
            .collect();
        let ka = subcanvas(k, ga).ok()?;
        let kb0 = subcanvas(k, gb).ok()?;
        if let Some(phi) = self.sub(k, ka.clone(), &origins(ga)) {
            let kb = pin_from(kb0.clone(), pb.clone(), &phi, gb);
            if let Some(rest) = self.sub(k, kb, &origins(gb)) {
                let mut out = phi;
                if merge(&mut out, &rest) {
                    return Some(out);
                }
            }
        }
        if p.len() != 3 {
            return None;
        }
        // the other side may be a generalized wheel with at most one
        // blocked colouring of the path: keep it out of the first side
        let mut free = kb0;
        free.s = Precoloured::Path(pb.clone());
        let blocked = blocked_colourings_of_s(&free);
        if blocked.len() > 1 {
            return None;
        }
        let mut ka2 = ka;
        if let Some(bad) = blocked.iter().next() {
            let x = ga.local_of(p[1])?;
            ka2.lists[x].remove(&bad[1]);
        }
        let phi = self.sub(k, ka2, &origins(ga))?;
        let kb = pin_from(free, pb, &phi, gb);
        self.trace.wheel_searches += 1;
        let rest = find_colouring(&kb.graph, &kb.lists, &Colouring::empty(0)).colouring()?;
        let mut out = phi;
        for (v, c) in rest.coloured() {
            match out.get(gb.origin(v)) {
                Some(d) if d != c => return None,
                _ => out.set(gb.origin(v), c),
            }
        }
        Some(out)
    }

    /// A fan `w_j w_{j+1} w_{j+2}` around an interior hub with
    /// `L(w_j) = L(w_{j+2})`: identify the ends and drop the middle.
    fn fan_closure(&mut self, k: &Canvas) -> Option<Colouring> {
        let g = &k.graph;
        let c = outer_cycle(g)?;
        let q = c.len();
        for i in 0..q {
            let (a, b, d) = (c[i], c[(i + 1) % q], c[(i + 2) % q]);
            if k.s.contains(a) || k.s.contains(b) || k.s.contains(d) || k.lists[a] != k.lists[d] {
                continue;
            }
            if g.degree(b) != 3 || g.has_edge(a, d) {
                continue;
            }
            let Ok((h, z)) = g.identify_fan_ends(a, b, d) else {
                continue;
            };
            let hub = *g.neighbours(b).iter().find(|&&x| x != a && x != d)?;
            let lists: ListAssignment = (0..h.n()).map(|v| k.lists[h.origin(v)].clone()).collect();
            let s: Vec<VertexId> =
                k.s.vertices()
                    .iter()
                    .map(|&v| h.local_of(v))
                    .collect::<Option<_>>()?;
            let aset: BTreeSet<VertexId> = k.a.iter().filter_map(|&v| h.local_of(v)).collect();
            let kk = Canvas::new(h.clone(), lists, Precoloured::Path(s), aset);
            let map: Vec<VertexId> = origins(&h);
            let Some(mut phi) = self.sub(k, kk, &map) else {
                continue;
            };
            let cz = phi.get(a)?;
            let _ = z;
            phi.set(d, cz);
            let ch = phi.get(hub)?;
            let cb = k.lists[b].iter().copied().find(|&x| x != cz && x != ch)?;
            phi.set(b, cb);
            return Some(phi);
        }
        None
    }

    /// Reserve step: a vertex next to S whose other neighbours are one
    /// boundary vertex and interior vertices; reserve two of its colours by
    /// removing them from the interior neighbours, then delete it.
    fn reserve(&mut self, k: &Canvas) -> Option<Colouring> {
        let g = &k.graph;
        let c = outer_cycle(g)?;
        let s = k.s.vertices();
        if s.is_empty() {
            return None;
        }
        for walk in walks_from_s(&c, s) {
            let q = walk.len();
            if q <= s.len() + 1 {
                continue;
            }
            let x = walk[s.len()];
            let y = walk[(s.len() + 1) % q];
            let taken: BTreeSet<Colour> = g
                .neighbours(x)
                .iter()
                .filter(|&&u| k.s.contains(u))
                .map(|&u| only(&k.lists[u]))
                .collect();
            let free: Vec<Colour> = k.lists[x]
                .iter()
                .copied()
                .filter(|c| !taken.contains(c))
                .collect();
            let interior: Vec<VertexId> = g
                .neighbours(x)
                .iter()
                .copied()
                .filter(|&u| !k.s.contains(u) && u != y)
                .collect();
            if interior.iter().any(|&u| g.is_boundary_vertex(u)) {
                continue;
            }
            for i in 0..free.len() {
                for jj in i + 1..free.len() {
                    let pair = [free[i], free[jj]];
                    let mut kk = k.clone();
                    for &u in &interior {
                        for cc in pair {
                            kk.lists[u].remove(&cc);
                        }
                    }
                    let h = g.without(&BTreeSet::from([x]));
                    let Ok(mut sub) = subcanvas(&kk, &h) else {
                        continue;
                    };
                    sub.a = (0..h.n())
                        .filter(|&v| !sub.s.contains(v) && sub.lists[v].len() <= 2)
                        .collect();
                    let Some(mut phi) = self.sub(k, sub, &origins(&h)) else {
                        continue;
                    };
                    let around = used_around(g, &phi, x);
                    let Some(cx) = pair.into_iter().find(|cc| !around.contains(cc)) else {
                        continue;
                    };
                    phi.set(x, cx);
                    return Some(phi);
                }
            }
        }
        None
    }

    /// A vertex with more free colours than uncoloured neighbours is
    /// deleted and coloured last.
    fn low_degree(&mut self, k: &Canvas) -> Option<Colouring> {
        let g = &k.graph;
        let fixed = s_colouring(k);
        let mut cands: Vec<(usize, VertexId)> = Vec::new();
        for v in 0..g.n() {
            if k.s.contains(v) {
                continue;
            }
            let taken = used_around(g, &fixed, v);
            let free = k.lists[v].iter().filter(|c| !taken.contains(c)).count();
            let open = g
                .neighbours(v)
                .iter()
                .filter(|&&u| !k.s.contains(u))
                .count();
            if free > open {
                cands.push((free - open, v));
            }
        }
        cands.sort_by(|x, y| y.cmp(x));
        for (_, v) in cands {
            let h = g.without(&BTreeSet::from([v]));
            let Ok(sub) = subcanvas(k, &h) else { continue };
            let Some(mut phi) = self.sub(k, sub, &origins(&h)) else {
                continue;
            };
            let around = used_around(g, &phi, v);
            let cv = k.lists[v].iter().copied().find(|c| !around.contains(c))?;
            phi.set(v, cv);
            return Some(phi);
        }
        None
    }

    /// Moves along the boundary: precolour the next vertex after S, or
    /// delete an end of S.
    fn shift_s(&mut self, k: &Canvas) -> Option<Colouring> {
        let g = &k.graph;
        let s = k.s.vertices().to_vec();
        if s.is_empty() {
            return None;
        }
        let id: Vec<VertexId> = (0..g.n()).collect();
        if s.len() <= 3 {
            for (end, front) in [(s[s.len() - 1], false), (s[0], true)] {
                let mut nbrs: Vec<VertexId> = g
                    .neighbours(end)
                    .iter()
                    .copied()
                    .filter(|&x| !k.s.contains(x) && g.is_boundary_edge(end, x))
                    .collect();
                nbrs.sort_unstable();
                for x in nbrs {
                    let taken: BTreeSet<Colour> = g
                        .neighbours(x)
                        .iter()
                        .filter(|&&u| k.s.contains(u))
                        .map(|&u| only(&k.lists[u]))
                        .collect();
                    for &c in &k.lists[x] {
                        if taken.contains(&c) {
                            continue;
                        }
                        if let Some(out) = self.sub(k, pin_at(k, x, c, front), &id) {
                            return Some(out);
                        }
                    }
                }
            }
        }
        for end in [s[s.len() - 1], s[0]] {
            let mut col = Colouring::empty(g.n());
            col.set(end, only(&k.lists[end]));
            if let Some(out) = self.delete_then_colour(k, &col, &[], None) {
                return Some(out);
            }
        }
        None
    }
}

/// `k'` and the available colour at `v_{k'}` for a walk starting with S.
fn available(k: &Canvas, walk: &[VertexId]) -> Option<(usize, Colour)> {
    let kl = k.s.len();
    if kl == 0 || walk.len() <= kl + 1 {
        return None;
    }
    let vk = walk[kl - 1];
    let next = walk[kl];
    if k.a.contains(&next) && !k.s.contains(next) {
        let c = k.lists[next]
            .iter()
            .copied()
            .find(|c| !k.lists[vk].contains(c))?;
        Some((kl + 1, c))
    } else {
        Some((kl, only(&k.lists[vk])))
    }
}

/// The deletable path with the smallest end index `j`: returns `k'`, the
/// available colour and `j`.
fn find_deletable(k: &Canvas, walk: &[VertexId]) -> Option<(usize, Colour, usize)> {
    let q = walk.len();
    let (kp, avail) = available(k, walk)?;
    let v = |i: usize| walk[(i - 1) % q];
    let l = |i: usize| &k.lists[v(i)];
    if q < kp + 3 {
        return None;
    }
    for j in kp + 3..=q {
        let in_a = |i: usize| k.a.contains(&v(i)) && !k.s.contains(v(i));
        let a_ok = (kp + 1..=j).all(|i| !in_a(i) || i == kp + 2);
        if !a_ok {
            break;
        }
        if (kp + 1..=j).any(|i| k.s.contains(v(i))) {
            break;
        }
        let nested = (kp + 3..=j).all(|i| l(i - 1).is_subset(l(i)));
        if !nested {
            break;
        }
        if !l(j).is_subset(l(j % q + 1)) {
            return Some((kp, avail, j));
        }
    }
    None
}

/// Extends the precoloured path of `kb` by the edge `uw`, when that gives
/// a path.
fn join_edge(kb: &Canvas, u: VertexId, w: VertexId) -> Option<Vec<VertexId>> {
    let p = kb.s.vertices().to_vec();
    if p.is_empty() {
        return Some(vec![u, w]);
    }
    let has = |x| p.contains(&x);
    if has(u) && has(w) {
        return Some(p);
    }
    for (x, y) in [(u, w), (w, u)] {
        if has(x) && !has(y) {
            if p[p.len() - 1] == x {
                let mut out = p.clone();
                out.push(y);
                return Some(out);
            }
            if p[0] == x {
                let mut out = vec![y];
                out.extend(&p);
                return Some(out);
            }
        }
    }
    None
}

/// Makes `path` (local to `h`) the precoloured path of `kb`, with colours
/// from `phi` (ids of the parent of `h`).
fn pin_from(mut kb: Canvas, path: Vec<VertexId>, phi: &Colouring, h: &PlaneGraph) -> Canvas {
    for &v in &path {
        if let Some(c) = phi.get(h.origin(v)) {
            kb.lists[v] = BTreeSet::from([c]);
        }
    }
    kb.s = Precoloured::Path(path);
    kb
}

pub fn colour(g: &PlaneGraph, l: &ListAssignment) -> Result<Colouring, EngineError> {
    Engine::default().colour(g, l)
}

pub fn extend(k: &Canvas, phi: &Colouring) -> Result<Extension, EngineError> {
    Engine::default().extend(k, phi)
}

/// The girth profile is recomputed by every gate; exposed for callers that
/// want to check a canvas the way the engine does.
pub fn gate_profile(k: &Canvas) -> GirthProfile {
    girth_profile(&k.graph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::make_wheel;

    fn k4() -> PlaneGraph {
        let rot = vec![vec![1, 2, 3], vec![0, 3, 2], vec![0, 1, 3], vec![0, 2, 1]];
        PlaneGraph::new(rot, Some((1, 2))).unwrap()
    }

    fn cycle(n: usize) -> PlaneGraph {
        let rot = (0..n).map(|i| vec![(i + 1) % n, (i + n - 1) % n]).collect();
        PlaneGraph::new(rot, Some((0, 1))).unwrap()
    }

    fn lists(n: usize, size: Colour) -> ListAssignment {
        (0..n).map(|_| (1..=size).collect()).collect()
    }

    #[test]
    fn k4_from_five_lists() {
        let g = k4();
        let l = lists(4, 5);
        let mut e = Engine::strict(true);
        let phi = e.colour(&g, &l).unwrap();
        assert!(phi.is_proper(&g) && phi.respects(&l));
        assert_eq!(e.trace().fallbacks, 0);
    }

    #[test]
    fn c5_from_three_lists() {
        let g = cycle(5);
        let phi = colour(&g, &lists(5, 3)).unwrap();
        assert!(phi.is_proper(&g));
    }

    #[test]
    fn short_lists_rejected() {
        let err = colour(&k4(), &lists(4, 4)).unwrap_err();
        assert!(matches!(
            err,
            EngineError::AssignmentInvalid {
                required: 5,
                size: 4,
                ..
            }
        ));
    }

    #[test]
    fn triangle_extension() {
        let g = PlaneGraph::new(vec![vec![1, 2], vec![2, 0], vec![0, 1]], Some((0, 1))).unwrap();
        let l = vec![
            BTreeSet::from([1]),
            BTreeSet::from([2]),
            BTreeSet::from([1, 2, 3]),
        ];
        let k = Canvas::new(g, l, Precoloured::Path(vec![0, 1]), BTreeSet::new());
        let phi = Colouring::from_vec(vec![Some(1), Some(2), None]);
        match extend(&k, &phi).unwrap() {
            Extension::Coloured(out) => assert_eq!(out.get(2), Some(3)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn improper_phi_rejected() {
        let g = cycle(4);
        let k = Canvas::new(
            g,
            lists(4, 3),
            Precoloured::Path(vec![0, 1]),
            BTreeSet::new(),
        );
        let phi = Colouring::from_vec(vec![Some(1), Some(1), None, None]);
        assert!(matches!(extend(&k, &phi), Err(EngineError::PhiImproper(_))));
    }

    #[test]
    fn wheel_type_three() {
        // wheel on four rim vertices, principal path 0-1-2 through rim
        // vertex 1; lists 3 on the rim, 5 at the hub
        let (g, _) = make_wheel(4);
        let n = g.n();
        let mut l = lists(n, 5);
        for v in 0..n {
            if g.is_boundary_vertex(v) {
                l[v] = (1..=3).collect();
            }
        }
        let k = Canvas::new(g, l, Precoloured::Path(vec![0, 1, 2]), BTreeSet::new());
        let blocked = blocked_colourings_of_s(&k);
        for tuple in crate::oracle::precolourings_of_s(&k) {
            let phi = Colouring::from_vec(
                (0..n)
                    .map(|v| [0, 1, 2].iter().position(|&x| x == v).map(|i| tuple[i]))
                    .collect(),
            );
            let out = extend(&k, &phi).unwrap();
            match out {
                Extension::Coloured(c) => {
                    assert!(!blocked.contains(&tuple));
                    assert!(c.is_proper(&k.graph) && c.respects(&k.lists));
                }
                Extension::Exception(cert) => {
                    assert!(blocked.contains(&tuple) && cert.wheel.is_some())
                }
            }
        }
    }

    #[test]
    fn cut_vertex_split() {
        // two triangles sharing vertex 2
        let rot = vec![
            vec![1, 2],
            vec![2, 0],
            vec![0, 1, 3, 4],
            vec![4, 2],
            vec![2, 3],
        ];
        let g = PlaneGraph::new(rot, Some((0, 1))).unwrap();
        let l = lists(5, 5);
        let mut e = Engine::strict(true);
        let phi = e.colour(&g, &l).unwrap();
        assert!(phi.is_proper(&g));
    }
}
