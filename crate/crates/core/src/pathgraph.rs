//! Small landscapes as hypercube graphs.
//!
//! Every genotype is a node, identified by its integer value (locus `i` is
//! bit `i`), and nodes at Hamming distance one are adjacent. An annotation
//! keeps only the edges a given heuristic would follow. Ties are broken toward
//! the lowest locus so the drawing is reproducible.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use petgraph::unionfind::UnionFind;

use crate::genotype::Genotype;
use crate::landscape::NkqLandscape;

/// Largest `N` accepted for full enumeration.
pub const MAX_GRAPH_N: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error(
        "path graphs enumerate all 2^n genotypes; n={n} exceeds the limit of {MAX_GRAPH_N} \
         (use a smaller landscape, e.g. --n 5)"
    )]
    TooLarge { n: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LandscapeGraph {
    n: usize,
    k: usize,
    q: u32,
    seed: u64,
    totals: Vec<u64>,
    evol: Vec<u64>,
}

impl LandscapeGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn node_count(&self) -> usize {
        self.totals.len()
    }

    pub fn total(&self, node: usize) -> u64 {
        self.totals[node]
    }

    pub fn totals(&self) -> &[u64] {
        &self.totals
    }

    /// Best total over the node and its direct neighbors.
    pub fn evol(&self, node: usize) -> u64 {
        self.evol[node]
    }

    /// Best total within Hamming distance 2.
    pub fn evol2(&self, node: usize) -> u64 {
        self.neighbors(node)
            .map(|v| self.evol[v])
            .fold(self.evol[node], u64::max)
    }

    /// Neighbors in locus order.
    pub fn neighbors(&self, node: usize) -> impl Iterator<Item = usize> {
        (0..self.n).map(move |i| node ^ (1 << i))
    }

    /// Every Hamming-distance-1 pair `(u, v)` with `u < v`.
    pub fn base_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u)
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn is_local(&self, node: usize) -> bool {
        self.evol[node] <= self.totals[node]
    }

    pub fn is_local2(&self, node: usize) -> bool {
        self.evol2(node) <= self.totals[node]
    }

    /// No equal-fitness neighbor has higher evolvability.
    pub fn is_local_neutral(&self, node: usize) -> bool {
        self.neighbors(node)
            .filter(|&v| self.totals[v] == self.totals[node])
            .all(|v| self.evol[v] <= self.evol[node])
    }

    fn first_neighbor(&self, node: usize, pred: impl Fn(usize) -> bool) -> Option<usize> {
        self.neighbors(node).find(|&v| pred(v))
    }
}

/// Enumerates all genotypes of a landscape with `N <= 12`.
pub fn build_graph(l: &NkqLandscape) -> Result<LandscapeGraph, GraphError> {
    let n = l.n();
    if n > MAX_GRAPH_N {
        return Err(GraphError::TooLarge { n });
    }
    let totals: Vec<u64> = (0..1u64 << n)
        .map(|v| l.total_of(&Genotype::from_index(v, n)))
        .collect();
    let evol = (0..totals.len())
        .map(|u| {
            (0..n)
                .map(|i| totals[u ^ (1 << i)])
                .fold(totals[u], u64::max)
        })
        .collect();
    Ok(LandscapeGraph {
        n,
        k: l.k(),
        q: l.q(),
        seed: l.seed(),
        totals,
        evol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnnotationKind {
    /// All hypercube edges, undirected.
    Hypercube,
    HillClimb,
    HillClimb2,
    Netcrawler,
    Scuba,
}

impl AnnotationKind {
    pub fn label(self) -> &'static str {
        match self {
            AnnotationKind::Hypercube => "cube",
            AnnotationKind::HillClimb => "hc",
            AnnotationKind::HillClimb2 => "hc2",
            AnnotationKind::Netcrawler => "nc",
            AnnotationKind::Scuba => "ss",
        }
    }
}

impl fmt::Display for AnnotationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for AnnotationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        use AnnotationKind::*;
        [Hypercube, HillClimb, HillClimb2, Netcrawler, Scuba]
            .into_iter()
            .find(|k| k.label() == s)
            .ok_or_else(|| format!("unknown graph heuristic `{s}` (expected hc|hc2|nc|ss|cube)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeStyle {
    Solid,
    Dotted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub from: usize,
    pub to: usize,
    pub style: EdgeStyle,
    pub directed: bool,
}

impl Arrow {
    fn solid(from: usize, to: usize) -> Self {
        Self {
            from,
            to,
            style: EdgeStyle::Solid,
            directed: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedGraph<'g> {
    pub graph: &'g LandscapeGraph,
    pub kind: AnnotationKind,
    pub arrows: Vec<Arrow>,
}

impl AnnotatedGraph<'_> {
    pub fn out_degree(&self, node: usize) -> usize {
        self.arrows
            .iter()
            .filter(|a| a.directed && a.from == node)
            .count()
    }
}

/// The move Scuba makes from `node` under lowest-locus tie-breaking, if any.
fn scuba_arrow(g: &LandscapeGraph, node: usize) -> Option<Arrow> {
    let t = g.totals[node];
    let best_neutral = g
        .neighbors(node)
        .filter(|&v| g.totals[v] == t)
        .map(|v| g.evol[v])
        .max();
    match best_neutral {
        Some(m) if m > g.evol[node] => {
            let to = g.first_neighbor(node, |v| g.totals[v] == t && g.evol[v] == m)?;
            Some(Arrow {
                from: node,
                to,
                style: EdgeStyle::Dotted,
                directed: true,
            })
        }
        _ if g.evol[node] > t => g
            .first_neighbor(node, |v| g.totals[v] == g.evol[node])
            .map(|to| Arrow::solid(node, to)),
        _ => None,
    }
}

/// Keeps the edges followed by one heuristic.
///
/// - `HillClimb`: one solid arrow from each non-local node to its fittest neighbor.
/// - `Scuba`: a dotted arrow to the neutral neighbor of highest evolvability
///   while that beats the node's own, otherwise a solid arrow to the fittest
///   neighbor unless the node is a local maximum.
/// - `Netcrawler`: solid arrows to every strictly fitter neighbor and an
///   undirected dotted edge between every pair of equal-fitness neighbors.
/// - `HillClimb2`: one solid arrow from each node that has a fitter point within
///   distance 2, to the neighbor chosen by the two-step rule.
pub fn annotate(graph: &LandscapeGraph, kind: AnnotationKind) -> AnnotatedGraph<'_> {
    let g = graph;
    let nodes = 0..g.node_count();
    let arrows = match kind {
        AnnotationKind::Hypercube => g
            .base_edges()
            .map(|(u, v)| Arrow {
                from: u,
                to: v,
                style: EdgeStyle::Solid,
                directed: false,
            })
            .collect(),
        AnnotationKind::HillClimb => nodes
            .filter(|&u| !g.is_local(u))
            .filter_map(|u| {
                g.first_neighbor(u, |v| g.totals[v] == g.evol[u])
                    .map(|v| Arrow::solid(u, v))
            })
            .collect(),
        AnnotationKind::HillClimb2 => nodes
            .filter_map(|u| {
                let e2 = g.evol2(u);
                if e2 <= g.totals[u] {
                    None
                } else if g.evol[u] == e2 {
                    g.first_neighbor(u, |v| g.totals[v] == e2)
                } else {
                    g.first_neighbor(u, |v| g.evol[v] == e2)
                }
                .map(|v| Arrow::solid(u, v))
            })
            .collect(),
        AnnotationKind::Netcrawler => g
            .base_edges()
            .map(|(u, v)| match g.totals[u].cmp(&g.totals[v]) {
                std::cmp::Ordering::Less => Arrow::solid(u, v),
                std::cmp::Ordering::Greater => Arrow::solid(v, u),
                std::cmp::Ordering::Equal => Arrow {
                    from: u,
                    to: v,
                    style: EdgeStyle::Dotted,
                    directed: false,
                },
            })
            .collect(),
        AnnotationKind::Scuba => nodes.filter_map(|u| scuba_arrow(g, u)).collect(),
    };
    AnnotatedGraph {
        graph,
        kind,
        arrows,
    }
}

/// Grayscale level: the landscape's lowest total is black, its highest white.
fn gray(g: &LandscapeGraph, total: u64) -> u8 {
    let lo = *g.totals.iter().min().expect("non-empty graph");
    let hi = *g.totals.iter().max().expect("non-empty graph");
    if hi == lo {
        return 255;
    }
    ((255 * (total - lo) + (hi - lo) / 2) / (hi - lo)) as u8
}

/// Renders a DOT digraph: nodes shaded by fitness, annotation edges solid or
/// dotted, undirected edges drawn with `dir=none`.
pub fn to_dot(annotated: &AnnotatedGraph<'_>) -> String {
    let g = annotated.graph;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "// n={} k={} q={} seed={} heuristic={}",
        g.n, g.k, g.q, g.seed, annotated.kind
    );
    let _ = writeln!(out, "digraph {} {{", annotated.kind);
    out.push_str("  node [shape=circle, style=filled];\n");
    for (node, &total) in g.totals.iter().enumerate() {
        let level = gray(g, total);
        let font = if level < 128 { "white" } else { "black" };
        let _ = writeln!(
            out,
            "  {node} [label=\"{node}\", fillcolor=\"#{level:02x}{level:02x}{level:02x}\", fontcolor={font}, tooltip=\"f={total}\"];"
        );
    }
    for a in &annotated.arrows {
        let style = match a.style {
            EdgeStyle::Solid => "solid",
            EdgeStyle::Dotted => "dotted",
        };
        let dir = if a.directed { "" } else { ", dir=none" };
        let _ = writeln!(out, "  {} -> {} [style={style}{dir}];", a.from, a.to);
    }
    out.push_str("}\n");
    out
}

/// Nodes that are local maxima under the one-bit neighborhood.
pub fn local_maxima(graph: &LandscapeGraph) -> Vec<usize> {
    (0..graph.node_count())
        .filter(|&u| graph.is_local(u))
        .collect()
}

/// Where Scuba ends from each start node under lowest-locus tie-breaking.
pub fn scuba_terminals(graph: &LandscapeGraph) -> Vec<usize> {
    let next: Vec<Option<usize>> = (0..graph.node_count())
        .map(|u| scuba_arrow(graph, u).map(|a| a.to))
        .collect();
    let mut end: Vec<Option<usize>> = vec![None; next.len()];
    for start in 0..next.len() {
        let mut path = Vec::new();
        let mut u = start;
        let terminal = loop {
            if let Some(t) = end[u] {
                break t;
            }
            path.push(u);
            match next[u] {
                Some(v) => u = v,
                None => break u,
            }
        };
        for p in path {
            end[p] = Some(terminal);
        }
    }
    end.into_iter()
        .map(|t| t.expect("every node resolved"))
        .collect()
}

/// Neutral-network label per node: connected components of equal-fitness
/// adjacency, labelled by their smallest node.
pub fn neutral_networks(graph: &LandscapeGraph) -> Vec<usize> {
    let mut uf = UnionFind::<usize>::new(graph.node_count());
    for (u, v) in graph.base_edges() {
        if graph.totals[u] == graph.totals[v] {
            uf.union(u, v);
        }
    }
    let roots = uf.into_labeling();
    let mut label = vec![usize::MAX; graph.node_count()];
    let mut smallest = vec![usize::MAX; graph.node_count()];
    for (u, &r) in roots.iter().enumerate() {
        smallest[r] = smallest[r].min(u);
    }
    for (u, &r) in roots.iter().enumerate() {
        label[u] = smallest[r];
    }
    label
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Census {
    pub n: usize,
    pub k: usize,
    pub q: u32,
    pub seed: u64,
    pub v_local: usize,
    pub v2_local: usize,
    pub scuba_terminals: usize,
    pub neutral_networks: usize,
}

impl Census {
    pub const HEADER: &'static str = "n,k,q,seed,v_local,v2_local,scuba_terminals,neutral_networks";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.n,
            self.k,
            self.q,
            self.seed,
            self.v_local,
            self.v2_local,
            self.scuba_terminals,
            self.neutral_networks
        )
    }
}

/// Exhaustive counts of local maxima, Scuba end points and neutral networks.
pub fn census(l: &NkqLandscape) -> Result<Census, GraphError> {
    let g = build_graph(l)?;
    let nodes = 0..g.node_count();
    Ok(Census {
        n: g.n,
        k: g.k,
        q: g.q,
        seed: g.seed,
        v_local: nodes.clone().filter(|&u| g.is_local(u)).count(),
        v2_local: nodes.filter(|&u| g.is_local2(u)).count(),
        scuba_terminals: scuba_terminals(&g)
            .into_iter()
            .collect::<BTreeSet<_>>()
            .len(),
        neutral_networks: neutral_networks(&g)
            .into_iter()
            .collect::<BTreeSet<_>>()
            .len(),
    })
}
