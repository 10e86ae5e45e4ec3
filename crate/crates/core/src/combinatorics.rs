//! Exact search at desk scale: independence number, clique cover number,
//! homomorphism existence, the cohomomorphism preorder and Shannon-capacity
//! lower bounds from strong powers.
//!
//! Every search runs under a [`SearchBudget`]. Running out of budget is never
//! reported as a negative answer: decision procedures return
//! [`Decision::Unknown`] and optimisation procedures return
//! [`SearchError::BudgetExhausted`] carrying the best bounds seen so far.

use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, GraphError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SearchBudget {
    pub node_limit: u64,
    pub time_limit_ms: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            node_limit: 10_000_000,
            time_limit_ms: 60_000,
        }
    }
}

impl SearchBudget {
    /// Both limits must be positive.
    pub fn new(node_limit: u64, time_limit_ms: u64) -> Option<Self> {
        (node_limit > 0 && time_limit_ms > 0).then_some(Self {
            node_limit,
            time_limit_ms,
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("search budget exhausted after {nodes} nodes (bounds {lower}..={upper})")]
    BudgetExhausted { lower: usize, upper: usize, nodes: u64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("graph must have at least one vertex")]
    EmptyGraph,
}

/// Tri-state outcome of a budgeted decision procedure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision<W> {
    Yes(W),
    No,
    Unknown,
}

impl<W> Decision<W> {
    pub fn is_yes(&self) -> bool {
        matches!(self, Decision::Yes(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Decision::Yes(_) => "yes",
            Decision::No => "no",
            Decision::Unknown => "unknown",
        }
    }
}

struct Meter {
    nodes: u64,
    budget: SearchBudget,
    deadline: Instant,
    exhausted: bool,
}

impl Meter {
    fn new(budget: SearchBudget) -> Self {
        Self {
            nodes: 0,
            budget,
            deadline: Instant::now() + Duration::from_millis(budget.time_limit_ms),
            exhausted: false,
        }
    }

    /// Counts one node; returns false once the budget is spent.
    #[inline]
    fn tick(&mut self) -> bool {
        if self.exhausted {
            return false;
        }
        self.nodes += 1;
        if self.nodes > self.budget.node_limit
            || (self.nodes & 0x3ff == 0 && Instant::now() >= self.deadline)
        {
            self.exhausted = true;
        }
        !self.exhausted
    }
}

/// Exact maximum independent set, found by branch and bound.
pub fn maximum_independent_set(g: &Graph, budget: SearchBudget) -> Result<Vec<usize>, SearchError> {
    let mut search = MisSearch {
        g,
        meter: Meter::new(budget),
        current: Vec::new(),
        best: greedy_independent_set(g),
    };
    let mut all = FixedBitSet::with_capacity(g.n());
    all.insert_range(..);
    search.expand(all);
    let mut best = search.best;
    best.sort_unstable();
    if search.meter.exhausted {
        let upper = greedy_clique_cover_bound(g, &{
            let mut s = FixedBitSet::with_capacity(g.n());
            s.insert_range(..);
            s
        });
        return Err(SearchError::BudgetExhausted {
            lower: best.len(),
            upper,
            nodes: search.meter.nodes,
        });
    }
    debug_assert!(g.is_independent_set(&best));
    Ok(best)
}

pub fn independence_number(g: &Graph, budget: SearchBudget) -> Result<usize, SearchError> {
    maximum_independent_set(g, budget).map(|s| s.len())
}

struct MisSearch<'a> {
    g: &'a Graph,
    meter: Meter,
    current: Vec<usize>,
    best: Vec<usize>,
}

impl MisSearch<'_> {
    fn expand(&mut self, mut cand: FixedBitSet) {
        if !self.meter.tick() {
            return;
        }
        let depth = self.current.len();
        // Vertices of residual degree 0 or 1 belong to some maximum independent set.
        loop {
            let forced = cand.ones().find(|&v| residual_degree(self.g, v, &cand) <= 1);
            match forced {
                Some(v) => {
                    self.current.push(v);
                    cand.set(v, false);
                    cand.difference_with(self.g.neighbors(v));
                }
                None => break,
            }
        }
        if cand.is_clear() {
            if self.current.len() > self.best.len() {
                self.best = self.current.clone();
            }
        } else if self.current.len() + greedy_clique_cover_bound(self.g, &cand) > self.best.len() {
            // lowest-index vertex of maximum residual degree
            let mut pivot = usize::MAX;
            let mut pivot_deg = 0;
            for v in cand.ones() {
                let d = residual_degree(self.g, v, &cand);
                if d > pivot_deg {
                    pivot = v;
                    pivot_deg = d;
                }
            }
            let mut with = cand.clone();
            with.set(pivot, false);
            with.difference_with(self.g.neighbors(pivot));
            self.current.push(pivot);
            self.expand(with);
            self.current.pop();

            cand.set(pivot, false);
            self.expand(cand);
        }
        self.current.truncate(depth);
    }
}

fn residual_degree(g: &Graph, v: usize, cand: &FixedBitSet) -> usize {
    g.neighbors(v).intersection_count(cand)
}

/// Number of cliques in a greedy clique cover of `g[cand]`; an upper bound on
/// the independence number of the induced subgraph.
fn greedy_clique_cover_bound(g: &Graph, cand: &FixedBitSet) -> usize {
    // each entry holds the common neighbourhood of one clique
    let mut cliques: Vec<FixedBitSet> = Vec::new();
    for v in cand.ones() {
        match cliques.iter_mut().find(|c| c.contains(v)) {
            Some(c) => c.intersect_with(g.neighbors(v)),
            None => {
                let mut c = g.neighbors(v).clone();
                c.intersect_with(cand);
                cliques.push(c);
            }
        }
    }
    cliques.len()
}

fn greedy_independent_set(g: &Graph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by_key(|&v| (g.degree(v), v));
    let mut blocked = FixedBitSet::with_capacity(g.n());
    let mut set = Vec::new();
    for v in order {
        if !blocked.contains(v) {
            set.push(v);
            blocked.insert(v);
            blocked.union_with(g.neighbors(v));
        }
    }
    set
}

/// Exact clique cover number `χ̄(G) = χ(Ḡ)`, computed as the chromatic number
/// of the complement by DSATUR-ordered branch and bound.
pub fn clique_cover_number(g: &Graph, budget: SearchBudget) -> Result<usize, SearchError> {
    if g.n() == 0 {
        return Err(SearchError::EmptyGraph);
    }
    let h = g.complement();
    let lower = maximum_independent_set(g, budget).map(|s| s.len()).unwrap_or(1);
    let mut search = ColoringSearch {
        g: &h,
        meter: Meter::new(budget),
        colors: vec![usize::MAX; h.n()],
        best: h.n() + 1,
        lower,
    };
    search.best = greedy_coloring(&h) + 1;
    search.expand(0, 0);
    let best = search.best - 1;
    if search.meter.exhausted && best > lower {
        return Err(SearchError::BudgetExhausted {
            lower,
            upper: best,
            nodes: search.meter.nodes,
        });
    }
    Ok(best)
}

struct ColoringSearch<'a> {
    g: &'a Graph,
    meter: Meter,
    colors: Vec<usize>,
    /// one more than the smallest number of colours found so far
    best: usize,
    lower: usize,
}

impl ColoringSearch<'_> {
    fn expand(&mut self, colored: usize, used: usize) {
        if self.best - 1 <= self.lower || !self.meter.tick() {
            return;
        }
        let n = self.g.n();
        if colored == n {
            self.best = used + 1;
            return;
        }
        // DSATUR: most distinct neighbour colours, then highest degree, then lowest index
        let mut pick = usize::MAX;
        let mut key = (0usize, 0usize);
        for v in (0..n).filter(|&v| self.colors[v] == usize::MAX) {
            let mut seen = FixedBitSet::with_capacity(n);
            for w in self.g.neighbors(v).ones() {
                if self.colors[w] != usize::MAX {
                    seen.insert(self.colors[w]);
                }
            }
            let k = (seen.count_ones(..), self.g.degree(v));
            if pick == usize::MAX || k > key {
                pick = v;
                key = k;
            }
        }
        for c in 0..=used {
            if c + 1 >= self.best {
                break;
            }
            if self.g.neighbors(pick).ones().any(|w| self.colors[w] == c) {
                continue;
            }
            self.colors[pick] = c;
            self.expand(colored + 1, used.max(c + 1));
            self.colors[pick] = usize::MAX;
        }
    }
}

fn greedy_coloring(g: &Graph) -> usize {
    let mut colors = vec![usize::MAX; g.n()];
    let mut used = 0;
    for v in 0..g.n() {
        let c = (0..)
            .find(|&c| g.neighbors(v).ones().all(|w| colors[w] != c))
            .expect("some colour is free");
        colors[v] = c;
        used = used.max(c + 1);
    }
    used
}

/// Decides whether a homomorphism `G -> H` exists. A `Yes` carries the vertex
/// map, re-verified against the edge condition before it is returned.
pub fn homomorphism_exists(g: &Graph, h: &Graph, budget: SearchBudget) -> Decision<Vec<usize>> {
    let n = g.n();
    if n == 0 {
        return Decision::Yes(Vec::new());
    }
    if h.n() == 0 {
        return Decision::No;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let mut full = FixedBitSet::with_capacity(h.n());
    full.insert_range(..);
    let mut search = HomSearch {
        g,
        h,
        order,
        map: vec![usize::MAX; n],
        meter: Meter::new(budget),
    };
    let domains = vec![full; n];
    let found = search.assign(0, domains);
    if found {
        let map = search.map;
        assert!(is_homomorphism(g, h, &map), "homomorphism witness failed re-verification");
        Decision::Yes(map)
    } else if search.meter.exhausted {
        Decision::Unknown
    } else {
        Decision::No
    }
}

pub fn is_homomorphism(g: &Graph, h: &Graph, map: &[usize]) -> bool {
    map.len() == g.n() && map.iter().all(|&x| x < h.n()) && g.edges().all(|(u, v)| h.has_edge(map[u], map[v]))
}

struct HomSearch<'a> {
    g: &'a Graph,
    h: &'a Graph,
    order: Vec<usize>,
    map: Vec<usize>,
    meter: Meter,
}

impl HomSearch<'_> {
    fn assign(&mut self, depth: usize, domains: Vec<FixedBitSet>) -> bool {
        if depth == self.order.len() {
            return true;
        }
        if !self.meter.tick() {
            return false;
        }
        let u = self.order[depth];
        for target in domains[u].ones() {
            let mut next = domains.clone();
            let mut dead = false;
            for w in self.g.neighbors(u).ones() {
                if self.map[w] == usize::MAX {
                    next[w].intersect_with(self.h.neighbors(target));
                    if next[w].is_clear() {
                        dead = true;
                        break;
                    }
                }
            }
            if dead {
                continue;
            }
            self.map[u] = target;
            if self.assign(depth + 1, next) {
                return true;
            }
            self.map[u] = usize::MAX;
            if self.meter.exhausted {
                return false;
            }
        }
        false
    }
}

/// `G ≤ H` in the cohomomorphism preorder, i.e. a homomorphism `Ḡ -> H̄`.
pub fn cohom_leq(g: &Graph, h: &Graph, budget: SearchBudget) -> Decision<Vec<usize>> {
    homomorphism_exists(&g.complement(), &h.complement(), budget)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapacityEstimate {
    pub power: usize,
    /// `α(G^{⊠k})` when `exact`, otherwise the size of the best independent set found.
    pub alpha_value: usize,
    pub root: f64,
    pub exact: bool,
}

/// `α(G^{⊠k})^{1/k}`, a lower bound on the Shannon capacity for every `k`.
pub fn capacity_lower_bound(g: &Graph, power: usize, budget: SearchBudget) -> Result<CapacityEstimate, SearchError> {
    let p = g.strong_power(power)?;
    let (alpha, exact) = match independence_number(&p, budget) {
        Ok(a) => (a, true),
        Err(SearchError::BudgetExhausted { lower, .. }) => (lower, false),
        Err(e) => return Err(e),
    };
    Ok(CapacityEstimate {
        power,
        alpha_value: alpha,
        root: (alpha as f64).powf(1.0 / power as f64),
        exact,
    })
}
