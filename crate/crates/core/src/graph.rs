//! Finite simple graphs and the graph semiring operations.
//!
//! Vertices are the dense integers `0..n`. Adjacency is kept as one bitset row
//! per vertex so that neighbourhood intersections in the search routines are
//! word-parallel. Products use the row-major pairing of [`VertexPairIndex`].

use std::fmt;

use fixedbitset::FixedBitSet;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown graph kind `{0}`")]
    UnknownKind(String),
    #[error("invalid parameters for `{kind}`: {reason}")]
    BadParams { kind: String, reason: String },
    #[error("loop edge at vertex {0}")]
    Loop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("malformed graph input: {0}")]
    Malformed(String),
    #[error("strong power exponent must be at least 1")]
    ZeroPower,
    #[error("generated graph failed self-check: {0}")]
    SelfCheck(String),
}

/// A finite simple graph on the vertex set `0..n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: Vec<FixedBitSet>,
}

/// Row-major pairing `(g, h) -> g * |V(H)| + h` for product vertex sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VertexPairIndex {
    pub left: usize,
    pub right: usize,
}

impl VertexPairIndex {
    pub fn new(left: usize, right: usize) -> Self {
        Self { left, right }
    }

    #[inline]
    pub fn encode(&self, g: usize, h: usize) -> usize {
        debug_assert!(g < self.left && h < self.right);
        g * self.right + h
    }

    #[inline]
    pub fn decode(&self, index: usize) -> (usize, usize) {
        debug_assert!(index < self.len());
        (index / self.right, index % self.right)
    }

    pub fn len(&self) -> usize {
        self.left * self.right
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Graph {
    /// The edgeless graph on `n` vertices (the semiring element `n`).
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            adj: vec![FixedBitSet::with_capacity(n); n],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            g.adj[u].insert_range(..);
            g.adj[u].set(u, false);
        }
        g
    }

    pub fn cycle(n: usize) -> Result<Self, GraphError> {
        if n < 3 {
            return Err(GraphError::BadParams {
                kind: "cycle".into(),
                reason: format!("need n >= 3, got {n}"),
            });
        }
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_edges(n, &edges)
    }

    /// Outer 5-cycle `0..5`, inner pentagram `5..10`, spokes `i ~ i+5`.
    pub fn petersen() -> Self {
        let mut edges = Vec::with_capacity(15);
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
            edges.push((i, i + 5));
        }
        Self::from_edges(10, &edges).expect("petersen edges are valid")
    }

    /// Complement of the Schläfli graph, modelled on the 27 lines of a cubic
    /// surface: `a_1..a_6`, `b_1..b_6` and `c_ij` for `i < j`, adjacent when the
    /// lines meet. The result is checked to be strongly regular (27, 10, 1, 5).
    pub fn schlafli_complement() -> Result<Self, GraphError> {
        #[derive(Clone, Copy)]
        enum Line {
            A(usize),
            B(usize),
            C(usize, usize),
        }
        let mut lines = Vec::with_capacity(27);
        lines.extend((0..6).map(Line::A));
        lines.extend((0..6).map(Line::B));
        for i in 0..6 {
            for j in (i + 1)..6 {
                lines.push(Line::C(i, j));
            }
        }
        let meets = |x: Line, y: Line| -> bool {
            match (x, y) {
                (Line::A(i), Line::B(j)) | (Line::B(j), Line::A(i)) => i != j,
                (Line::A(i), Line::C(j, k))
                | (Line::C(j, k), Line::A(i))
                | (Line::B(i), Line::C(j, k))
                | (Line::C(j, k), Line::B(i)) => i == j || i == k,
                (Line::C(i, j), Line::C(k, l)) => i != k && i != l && j != k && j != l,
                _ => false,
            }
        };
        let mut edges = Vec::new();
        for u in 0..27 {
            for v in (u + 1)..27 {
                if meets(lines[u], lines[v]) {
                    edges.push((u, v));
                }
            }
        }
        let g = Self::from_edges(27, &edges)?;
        match g.strongly_regular_parameters() {
            Some((27, 10, 1, 5)) => Ok(g),
            other => Err(GraphError::SelfCheck(format!(
                "expected srg(27,10,1,5), got {other:?}"
            ))),
        }
    }

    /// Named constructor used by the CLI: `cycle n`, `complete n`, `empty n`,
    /// `petersen`, `schlafli-complement`.
    pub fn named(kind: &str, params: &[usize]) -> Result<Self, GraphError> {
        let one = |kind: &str| -> Result<usize, GraphError> {
            match params {
                [n] => Ok(*n),
                _ => Err(GraphError::BadParams {
                    kind: kind.into(),
                    reason: format!("expected one integer parameter, got {}", params.len()),
                }),
            }
        };
        let none = |kind: &str| -> Result<(), GraphError> {
            if params.is_empty() {
                Ok(())
            } else {
                Err(GraphError::BadParams {
                    kind: kind.into(),
                    reason: "takes no parameters".into(),
                })
            }
        };
        match kind {
            "cycle" => Self::cycle(one(kind)?),
            "complete" => Ok(Self::complete(one(kind)?)),
            "empty" => Ok(Self::empty(one(kind)?)),
            "petersen" => none(kind).map(|_| Self::petersen()),
            "schlafli-complement" => none(kind).and_then(|_| Self::schlafli_complement()),
            _ => Err(GraphError::UnknownKind(kind.into())),
        }
    }

    /// Builds a graph from an edge list, rejecting loops, duplicates (in either
    /// orientation) and out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::Loop(u));
            }
            if g.adj[u].contains(v) {
                return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
            }
            g.adj[u].insert(v);
            g.adj[v].insert(u);
        }
        Ok(g)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    /// True when `u == v` or `{u, v}` is an edge.
    #[inline]
    pub fn equal_or_adjacent(&self, u: usize, v: usize) -> bool {
        u == v || self.adj[u].contains(v)
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &FixedBitSet {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones(..)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|r| r.count_ones(..)).sum::<usize>() / 2
    }

    pub fn is_edgeless(&self) -> bool {
        self.adj.iter().all(|r| r.is_clear())
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.adj[u].ones().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    pub fn complement(&self) -> Self {
        let mut g = Self::empty(self.n);
        for u in 0..self.n {
            g.adj[u].insert_range(..);
            g.adj[u].difference_with(&self.adj[u]);
            g.adj[u].set(u, false);
        }
        g
    }

    /// `G ⊔ H`: the vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Self {
        let n = self.n + other.n;
        let mut g = Self::empty(n);
        for (u, v) in self.edges() {
            g.link(u, v);
        }
        for (u, v) in other.edges() {
            g.link(self.n + u, self.n + v);
        }
        g
    }

    /// `G ⊠ H` on the vertex order fixed by [`VertexPairIndex`].
    pub fn strong_product(&self, other: &Graph) -> Self {
        let idx = VertexPairIndex::new(self.n, other.n);
        let mut g = Self::empty(idx.len());
        for a in 0..idx.len() {
            let (g1, h1) = idx.decode(a);
            for b in (a + 1)..idx.len() {
                let (g2, h2) = idx.decode(b);
                if self.equal_or_adjacent(g1, g2) && other.equal_or_adjacent(h1, h2) {
                    g.link(a, b);
                }
            }
        }
        g
    }

    /// `G^{⊠k}` as a left fold; vertex indices are base-`n` numerals of the
    /// coordinate tuple, most significant coordinate first.
    pub fn strong_power(&self, k: usize) -> Result<Self, GraphError> {
        if k == 0 {
            return Err(GraphError::ZeroPower);
        }
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.strong_product(self);
        }
        Ok(acc)
    }

    /// Erdős–Rényi sample: each pair is an edge independently with probability `p`,
    /// pairs visited in lexicographic order.
    pub fn random<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.random_bool(p) {
                    g.link(u, v);
                }
            }
        }
        g
    }

    /// Relabels vertex `v` to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n, "permutation length mismatch");
        let mut g = Self::empty(self.n);
        for (u, v) in self.edges() {
            g.link(perm[u], perm[v]);
        }
        g
    }

    pub fn induced(&self, vertices: &[usize]) -> Self {
        let mut g = Self::empty(vertices.len());
        for (i, &u) in vertices.iter().enumerate() {
            for (j, &v) in vertices.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.link(i, j);
                }
            }
        }
        g
    }

    pub fn is_independent_set(&self, vertices: &[usize]) -> bool {
        vertices
            .iter()
            .enumerate()
            .all(|(i, &u)| vertices[i + 1..].iter().all(|&v| u != v && !self.has_edge(u, v)))
    }

    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices
            .iter()
            .enumerate()
            .all(|(i, &u)| vertices[i + 1..].iter().all(|&v| self.has_edge(u, v)))
    }

    /// Returns `(n, k, λ, μ)` if the graph is strongly regular.
    pub fn strongly_regular_parameters(&self) -> Option<(usize, usize, usize, usize)> {
        if self.n == 0 {
            return None;
        }
        let k = self.degree(0);
        if (0..self.n).any(|v| self.degree(v) != k) {
            return None;
        }
        let mut lambda = None;
        let mut mu = None;
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                let mut common = self.adj[u].clone();
                common.intersect_with(&self.adj[v]);
                let c = common.count_ones(..);
                let slot = if self.has_edge(u, v) { &mut lambda } else { &mut mu };
                match *slot {
                    None => *slot = Some(c),
                    Some(prev) if prev != c => return None,
                    _ => {}
                }
            }
        }
        Some((self.n, k, lambda.unwrap_or(0), mu.unwrap_or(0)))
    }

    fn link(&mut self, u: usize, v: usize) {
        debug_assert!(u != v);
        self.adj[u].insert(v);
        self.adj[v].insert(u);
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

/// JSON wire form: `{"n": int, "edges": [[u, v], ...]}` with `u < v`, sorted.
#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        GraphJson {
            n: self.n,
            edges: self.edges().map(|(u, v)| [u, v]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = GraphJson::deserialize(deserializer)?;
        let edges: Vec<_> = raw.edges.iter().map(|e| (e[0], e[1])).collect();
        Graph::from_edges(raw.n, &edges).map_err(serde::de::Error::custom)
    }
}

/// Parses either the edge-list format (`"n m"` header, then `m` lines `"u v"`)
/// or the JSON format. Input starting with `{` is treated as JSON.
pub fn parse_graph(bytes: &[u8]) -> Result<Graph, GraphError> {
    let text = std::str::from_utf8(bytes).map_err(|e| GraphError::Malformed(e.to_string()))?;
    if text.trim_start().starts_with('{') {
        return serde_json::from_str(text).map_err(|e| {
            // surface structural errors from `from_edges` unchanged where possible
            GraphError::Malformed(e.to_string())
        });
    }
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| GraphError::Malformed("missing header".into()))?;
    let (n, m) = parse_pair(header).ok_or_else(|| GraphError::Malformed(format!("bad header `{header}`")))?;
    let mut edges = Vec::with_capacity(m);
    for line in lines {
        let e = parse_pair(line).ok_or_else(|| GraphError::Malformed(format!("bad edge line `{line}`")))?;
        edges.push(e);
    }
    if edges.len() != m {
        return Err(GraphError::Malformed(format!(
            "header announces {m} edges, found {}",
            edges.len()
        )));
    }
    Graph::from_edges(n, &edges)
}

fn parse_pair(line: &str) -> Option<(usize, usize)> {
    let mut it = line.split_whitespace();
    let a = it.next()?.parse().ok()?;
    let b = it.next()?.parse().ok()?;
    it.next().is_none().then_some((a, b))
}

/// Canonical edge-list text: header, then edges `u < v` in lexicographic order.
pub fn serialize_graph(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.edge_count());
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

pub fn graph_to_json(g: &Graph) -> String {
    serde_json::to_string(g).expect("graph serialization is infallible")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_counts() {
        let c5 = Graph::named("cycle", &[5]).unwrap();
        assert_eq!((c5.n(), c5.edge_count()), (5, 5));
        let k3 = Graph::named("complete", &[3]).unwrap();
        assert_eq!((k3.n(), k3.edge_count()), (3, 3));
        let p = Graph::named("petersen", &[]).unwrap();
        assert_eq!(p.strongly_regular_parameters(), Some((10, 3, 0, 1)));
    }

    #[test]
    fn named_errors() {
        assert!(matches!(Graph::named("cycle", &[2]), Err(GraphError::BadParams { .. })));
        assert!(matches!(Graph::named("wheel", &[5]), Err(GraphError::UnknownKind(_))));
        assert!(Graph::named("petersen", &[3]).is_err());
    }

    #[test]
    fn schlafli_complement_is_srg() {
        let g = Graph::schlafli_complement().unwrap();
        assert_eq!(g.n(), 27);
        assert_eq!(g.edge_count(), 135);
        // independent triple-loop check of the srg parameters
        for u in 0..27 {
            assert_eq!(g.degree(u), 10);
            for v in (u + 1)..27 {
                let common = (0..27).filter(|&w| g.has_edge(u, w) && g.has_edge(v, w)).count();
                assert_eq!(common, if g.has_edge(u, v) { 1 } else { 5 });
            }
        }
    }

    #[test]
    fn complement_examples() {
        assert_eq!(Graph::empty(4).complement(), Graph::complete(4));
        let c7 = Graph::cycle(7).unwrap();
        assert_eq!(c7.complement().complement(), c7);
        let c5 = Graph::cycle(5).unwrap();
        assert_eq!(c5.complement().relabel(&[0, 2, 4, 1, 3]), c5);
    }

    #[test]
    fn union_examples() {
        assert_eq!(Graph::empty(2).disjoint_union(&Graph::empty(3)), Graph::empty(5));
        let c5 = Graph::cycle(5).unwrap();
        assert_eq!(c5.disjoint_union(&Graph::empty(0)), c5);
    }

    #[test]
    fn product_examples() {
        assert_eq!(Graph::complete(2).strong_product(&Graph::complete(2)), Graph::complete(4));
        let p = Graph::petersen();
        assert_eq!(p.strong_product(&Graph::empty(1)), p);
        let c5 = Graph::cycle(5).unwrap();
        let c5sq = c5.strong_product(&c5);
        assert_eq!((c5sq.n(), c5sq.edge_count()), (25, 100));
    }

    #[test]
    fn power_examples() {
        let c5 = Graph::cycle(5).unwrap();
        assert_eq!(c5.strong_power(1).unwrap(), c5);
        assert_eq!(c5.strong_power(2).unwrap().n(), 25);
        assert_eq!(c5.strong_power(0), Err(GraphError::ZeroPower));
        // edge count of C7 ⊠ C7 by explicit enumeration of adjacent pairs
        let c7 = Graph::cycle(7).unwrap();
        let mut count = 0;
        for a in 0..49usize {
            for b in (a + 1)..49usize {
                let near = |x: usize, y: usize| x == y || (x + 1) % 7 == y || (y + 1) % 7 == x;
                if near(a / 7, b / 7) && near(a % 7, b % 7) {
                    count += 1;
                }
            }
        }
        assert_eq!(count, 196);
        let sq = c7.strong_power(2).unwrap();
        assert_eq!((sq.n(), sq.edge_count()), (49, count));
    }

    #[test]
    fn parse_examples() {
        let g = parse_graph(b"3 2\n0 1\n1 2\n").unwrap();
        assert_eq!(g, Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap());
        assert_eq!(parse_graph(b"2 1\n0 0\n"), Err(GraphError::Loop(0)));
        assert!(matches!(parse_graph(b"2 1\n0 5\n"), Err(GraphError::VertexOutOfRange { .. })));
        assert!(matches!(parse_graph(b"3 2\n0 1\n1 0\n"), Err(GraphError::DuplicateEdge(0, 1))));
        assert!(matches!(parse_graph(b"x y\n"), Err(GraphError::Malformed(_))));
        assert!(matches!(parse_graph(b"3 2\n0 1\n"), Err(GraphError::Malformed(_))));
        assert!(parse_graph(br#"{"n": 2, "edges": [[0, 0]]}"#).is_err());
    }

    #[test]
    fn json_is_canonical() {
        let g = parse_graph(b"4 3\n3 2\n0 1\n2 0\n").unwrap();
        assert_eq!(graph_to_json(&g), r#"{"n":4,"edges":[[0,1],[0,2],[2,3]]}"#);
        assert_eq!(serialize_graph(&g), "4 3\n0 1\n0 2\n2 3\n");
    }

    #[test]
    fn pair_index_bijection() {
        let idx = VertexPairIndex::new(3, 4);
        let all: Vec<_> = (0..3).flat_map(|g| (0..4).map(move |h| (g, h))).collect();
        for (i, &(g, h)) in all.iter().enumerate() {
            assert_eq!(idx.encode(g, h), i);
            assert_eq!(idx.decode(i), (g, h));
        }
    }
}
