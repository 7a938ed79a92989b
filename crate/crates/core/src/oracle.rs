//! Brute-force ground truth: list colouring by backtracking, blocked
//! precolourings, and bounded choosability checks.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::canvas::{Canvas, Colour, ColourList, Colouring, ListAssignment};
use crate::girth::{girth_class, girth_profile};
use crate::plane_graph::{PlaneGraph, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_nodes: u64,
    pub max_time: Option<Duration>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_nodes: 50_000_000,
            max_time: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Colouring),
    NoColouring,
    BudgetExceeded,
}

impl SearchOutcome {
    pub fn colouring(self) -> Option<Colouring> {
        match self {
            SearchOutcome::Found(c) => Some(c),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("search budget exceeded")]
    BudgetExceeded,
    #[error("universe of {universe} colours cannot supply lists of size {needed}")]
    UniverseTooSmall { universe: usize, needed: usize },
}

struct Search<'a> {
    adj: &'a [Vec<VertexId>],
    domains: Vec<Vec<Colour>>,
    colour: Vec<Option<Colour>>,
    trail: Vec<(VertexId, Colour)>,
    nodes: u64,
    budget: SearchBudget,
    started: Instant,
}

impl Search<'_> {
    /// `Some(true)` found, `Some(false)` exhausted, `None` out of budget.
    fn run(&mut self) -> Option<bool> {
        self.nodes += 1;
        if self.nodes > self.budget.max_nodes {
            return None;
        }
        if let Some(limit) = self.budget.max_time {
            if self.nodes.is_multiple_of(1024) && self.started.elapsed() > limit {
                return None;
            }
        }
        let pick = (0..self.adj.len())
            .filter(|&v| self.colour[v].is_none())
            .min_by_key(|&v| (self.domains[v].len(), v));
        let Some(v) = pick else {
            return Some(true);
        };
        let options = self.domains[v].clone();
        for c in options {
            self.colour[v] = Some(c);
            let mark = self.trail.len();
            let mut dead = false;
            for &u in &self.adj[v] {
                if self.colour[u].is_none() {
                    if let Some(i) = self.domains[u].iter().position(|&x| x == c) {
                        self.domains[u].remove(i);
                        self.trail.push((u, c));
                        if self.domains[u].is_empty() {
                            dead = true;
                        }
                    }
                }
            }
            if !dead {
                match self.run() {
                    Some(true) => return Some(true),
                    None => return None,
                    Some(false) => {}
                }
            }
            while self.trail.len() > mark {
                let (u, c) = self.trail.pop().expect("trail entry");
                let pos = self.domains[u].partition_point(|&x| x < c);
                self.domains[u].insert(pos, c);
            }
            self.colour[v] = None;
        }
        Some(false)
    }
}

/// Backtracking over an explicit adjacency. `partial` must be proper and
/// list-respecting; otherwise the answer is `NoColouring`.
pub fn find_colouring_adj(
    adj: &[Vec<VertexId>],
    lists: &[ColourList],
    partial: &[Option<Colour>],
    budget: SearchBudget,
) -> SearchOutcome {
    let n = adj.len();
    let mut domains: Vec<Vec<Colour>> = Vec::with_capacity(n);
    for v in 0..n {
        match partial.get(v).copied().flatten() {
            Some(c) => {
                if !lists[v].contains(&c)
                    || adj[v]
                        .iter()
                        .any(|&u| partial.get(u).copied().flatten() == Some(c))
                {
                    return SearchOutcome::NoColouring;
                }
                domains.push(vec![c]);
            }
            None => {
                let taken: BTreeSet<Colour> = adj[v]
                    .iter()
                    .filter_map(|&u| partial.get(u).copied().flatten())
                    .collect();
                let d: Vec<Colour> = lists[v]
                    .iter()
                    .filter(|c| !taken.contains(c))
                    .copied()
                    .collect();
                if d.is_empty() {
                    return SearchOutcome::NoColouring;
                }
                domains.push(d);
            }
        }
    }
    let colour: Vec<Option<Colour>> = (0..n).map(|v| partial.get(v).copied().flatten()).collect();
    let mut search = Search {
        adj,
        domains,
        colour,
        trail: Vec::new(),
        nodes: 0,
        budget,
        started: Instant::now(),
    };
    match search.run() {
        Some(true) => SearchOutcome::Found(Colouring::from_vec(search.colour)),
        Some(false) => SearchOutcome::NoColouring,
        None => SearchOutcome::BudgetExceeded,
    }
}

pub fn find_colouring(g: &PlaneGraph, l: &ListAssignment, partial: &Colouring) -> SearchOutcome {
    find_colouring_budgeted(g, l, partial, SearchBudget::default())
}

pub fn find_colouring_budgeted(
    g: &PlaneGraph,
    l: &ListAssignment,
    partial: &Colouring,
    budget: SearchBudget,
) -> SearchOutcome {
    let partial = if partial.is_empty() {
        Colouring::empty(g.n())
    } else {
        partial.clone()
    };
    find_colouring_adj(g.rotations(), l, partial.as_slice(), budget)
}

/// Every proper colouring of `G[V(S)]` from the lists of S, as tuples in S
/// order.
pub fn precolourings_of_s(k: &Canvas) -> Vec<Vec<Colour>> {
    let s = k.s.vertices();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(s.len());
    fn rec(k: &Canvas, s: &[VertexId], current: &mut Vec<Colour>, out: &mut Vec<Vec<Colour>>) {
        let i = current.len();
        if i == s.len() {
            out.push(current.clone());
            return;
        }
        for &c in &k.lists[s[i]] {
            let clash = (0..i).any(|j| current[j] == c && k.graph.has_edge(s[i], s[j]));
            if !clash {
                current.push(c);
                rec(k, s, current, out);
                current.pop();
            }
        }
    }
    rec(k, s, &mut current, &mut out);
    out
}

/// The proper colourings of `G[V(S)]` that do not extend to `G`.
pub fn blocked_colourings_of_s(k: &Canvas) -> BTreeSet<Vec<Colour>> {
    let s = k.s.vertices();
    let mut blocked = BTreeSet::new();
    for tuple in precolourings_of_s(k) {
        let mut partial = Colouring::empty(k.graph.n());
        for (&v, &c) in s.iter().zip(&tuple) {
            partial.set(v, c);
        }
        match find_colouring(&k.graph, &k.lists, &partial) {
            SearchOutcome::Found(_) => {}
            _ => {
                blocked.insert(tuple);
            }
        }
    }
    blocked
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChoosabilityMode {
    /// All local girth assignments over the universe, up to renaming of
    /// colours.
    Exhaustive,
    Sampled {
        count: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoosabilityVerdict {
    pub checked: usize,
    pub failures: Vec<ListAssignment>,
}

impl ChoosabilityVerdict {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Assignment cap for exhaustive mode.
pub const EXHAUSTIVE_LIMIT: usize = 2_000_000;

/// List sizes demanded by the local girth thresholds.
pub fn local_girth_sizes(g: &PlaneGraph) -> Vec<usize> {
    let profile = girth_profile(g);
    (0..g.n())
        .map(|v| girth_class(&profile, v).list_threshold())
        .collect()
}

/// A random local girth assignment with colours drawn from `1..=universe`.
pub fn sample_assignment(sizes: &[usize], universe: usize, rng: &mut ChaCha8Rng) -> ListAssignment {
    sizes
        .iter()
        .map(|&t| {
            sample(rng, universe, t)
                .into_iter()
                .map(|i| i as Colour + 1)
                .collect()
        })
        .collect()
}

pub fn check_local_girth_choosable(
    g: &PlaneGraph,
    universe_size: usize,
    mode: ChoosabilityMode,
) -> Result<ChoosabilityVerdict, OracleError> {
    let sizes = local_girth_sizes(g);
    if let Some(&needed) = sizes.iter().max() {
        if needed > universe_size {
            return Err(OracleError::UniverseTooSmall {
                universe: universe_size,
                needed,
            });
        }
    }
    let mut verdict = ChoosabilityVerdict {
        checked: 0,
        failures: Vec::new(),
    };
    let test =
        |lists: &ListAssignment, verdict: &mut ChoosabilityVerdict| -> Result<(), OracleError> {
            verdict.checked += 1;
            match find_colouring(g, lists, &Colouring::empty(g.n())) {
                SearchOutcome::Found(_) => Ok(()),
                SearchOutcome::NoColouring => {
                    verdict.failures.push(lists.clone());
                    Ok(())
                }
                SearchOutcome::BudgetExceeded => Err(OracleError::BudgetExceeded),
            }
        };
    match mode {
        ChoosabilityMode::Sampled { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..count {
                let lists = sample_assignment(&sizes, universe_size, &mut rng);
                test(&lists, &mut verdict)?;
            }
        }
        ChoosabilityMode::Exhaustive => {
            let mut visit = |lists: &ListAssignment| test(lists, &mut verdict);
            enumerate_normalized(
                &sizes,
                universe_size,
                &mut Vec::new(),
                0,
                &mut 0,
                &mut visit,
            )?;
        }
    }
    Ok(verdict)
}

/// Assignments where each list's previously unused colours are the next
/// fresh ones in order; every assignment is a colour renaming of one of
/// these.
fn enumerate_normalized(
    sizes: &[usize],
    universe: usize,
    prefix: &mut ListAssignment,
    used: usize,
    count: &mut usize,
    visit: &mut dyn FnMut(&ListAssignment) -> Result<(), OracleError>,
) -> Result<(), OracleError> {
    let i = prefix.len();
    if i == sizes.len() {
        *count += 1;
        if *count > EXHAUSTIVE_LIMIT {
            return Err(OracleError::BudgetExceeded);
        }
        return visit(prefix);
    }
    let t = sizes[i];
    // choose `old` colours among the used ones, the rest fresh
    for fresh in 0..=t {
        let old = t - fresh;
        if old > used || used + fresh > universe {
            continue;
        }
        for subset in k_subsets(used, old) {
            let mut list: ColourList = subset.iter().map(|&x| x as Colour + 1).collect();
            list.extend((used..used + fresh).map(|x| x as Colour + 1));
            prefix.push(list);
            enumerate_normalized(sizes, universe, prefix, used + fresh, count, visit)?;
            prefix.pop();
        }
    }
    Ok(())
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            if n - x < k - cur.len() {
                break;
            }
            cur.push(x);
            rec(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}
