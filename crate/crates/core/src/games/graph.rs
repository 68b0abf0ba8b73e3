//! Weighted graphs, induced subgraph games, and random graph generators.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::game::Game;
use crate::numeric::normal_quantile;

/// Undirected weighted edge with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub u: u32,
    pub v: u32,
    pub weight: f64,
}

/// A simple undirected weighted graph.
#[derive(Clone, Debug)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    /// Panics on self-loops, out-of-range endpoints or duplicate edges.
    pub fn new(n: usize, mut edges: Vec<Edge>) -> Self {
        let mut seen = HashSet::new();
        for e in &mut edges {
            if e.u > e.v {
                std::mem::swap(&mut e.u, &mut e.v);
            }
            assert!(e.u != e.v, "self-loop at {}", e.u);
            assert!((e.v as usize) < n, "endpoint {} out of range", e.v);
            assert!(seen.insert((e.u, e.v)), "duplicate edge ({}, {})", e.u, e.v);
        }
        WeightedGraph { n, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }
}

/// Induced subgraph game: a coalition is worth the sum of edge weights
/// internal to it. Singletons are worth 0.
#[derive(Clone, Debug)]
pub struct InducedSubgraphGame {
    graph: WeightedGraph,
}

impl InducedSubgraphGame {
    pub fn new(graph: WeightedGraph) -> Self {
        InducedSubgraphGame { graph }
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }
}

impl Game for InducedSubgraphGame {
    fn player_count(&self) -> usize {
        self.graph.n
    }

    fn value(&self, coalition: &Coalition) -> f64 {
        let mut total = 0.0;
        for e in &self.graph.edges {
            if coalition.contains(e.u as usize) && coalition.contains(e.v as usize) {
                total += e.weight;
            }
        }
        total
    }
}

/// Random graph models matching the experimental families.
#[derive(Clone, Copy, Debug)]
pub enum GraphModel {
    /// Each pair is an edge independently with probability `p`.
    ErdosRenyi { p: f64 },
    /// Ring lattice with `k/2` neighbours on each side, plus a shortcut
    /// added per ring edge with probability `p` (edges are added, never
    /// rewired).
    NewmanWattsStrogatz { k: usize, p: f64 },
    /// Vertices split into `parts` equal groups (remainder to the first
    /// groups); edge probability `p_in` within a group, `p_out` across.
    Partition { parts: usize, p_in: f64, p_out: f64 },
    /// Preferential attachment where each new vertex brings `m1` edges with
    /// probability `p` and `m2` edges otherwise.
    DualBarabasiAlbert { m1: usize, m2: usize, p: f64 },
    /// Preferential attachment with `m` edges per new vertex and a
    /// triangle-closing step with probability `p` after each edge.
    PowerlawCluster { m: usize, p: f64 },
    /// Every vertex receives each of `m` universe elements independently
    /// with probability `p`; vertices are adjacent iff their element sets
    /// intersect.
    UniformIntersection { m: usize, p: f64 },
}

fn check_prob(p: f64, name: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidGraphParams(format!(
            "{name} must be in [0,1], got {p}"
        )));
    }
    Ok(())
}

fn check_count(m: usize, n: usize, name: &str) -> Result<()> {
    if m < 1 || m >= n {
        return Err(Error::InvalidGraphParams(format!(
            "{name} must be in 1..{n}, got {m}"
        )));
    }
    Ok(())
}

/// Generates the (unweighted) edge set of a simple undirected graph on `n`
/// vertices. Bit-reproducible under a fixed seed.
pub fn generate_graph(
    model: GraphModel,
    n: usize,
    rng: &mut impl Rng,
) -> Result<Vec<(u32, u32)>> {
    assert!(n >= 2);
    match model {
        GraphModel::ErdosRenyi { p } => {
            check_prob(p, "p")?;
            let mut edges = Vec::new();
            for u in 0..n as u32 {
                for v in u + 1..n as u32 {
                    if rng.gen::<f64>() < p {
                        edges.push((u, v));
                    }
                }
            }
            Ok(edges)
        }
        GraphModel::NewmanWattsStrogatz { k, p } => {
            check_prob(p, "p")?;
            check_count(k, n, "k")?;
            let half = k / 2;
            let mut set = HashSet::new();
            let mut edges = Vec::new();
            for u in 0..n {
                for j in 1..=half {
                    let v = (u + j) % n;
                    let key = (u.min(v) as u32, u.max(v) as u32);
                    if set.insert(key) {
                        edges.push(key);
                    }
                }
            }
            // shortcut pass over the ring edges
            let ring = edges.clone();
            for &(u, _) in &ring {
                if rng.gen::<f64>() < p {
                    for _ in 0..n {
                        let w = rng.gen_range(0..n) as u32;
                        if w == u {
                            continue;
                        }
                        let key = (u.min(w), u.max(w));
                        if set.insert(key) {
                            edges.push(key);
                            break;
                        }
                    }
                }
            }
            Ok(edges)
        }
        GraphModel::Partition { parts, p_in, p_out } => {
            check_prob(p_in, "p_in")?;
            check_prob(p_out, "p_out")?;
            if parts < 1 || parts > n {
                return Err(Error::InvalidGraphParams(format!(
                    "parts must be in 1..={n}, got {parts}"
                )));
            }
            // equal-size groups, remainder spread over the first groups
            let base = n / parts;
            let rem = n % parts;
            let mut group = vec![0usize; n];
            let mut idx = 0;
            for g in 0..parts {
                let size = base + usize::from(g < rem);
                for _ in 0..size {
                    group[idx] = g;
                    idx += 1;
                }
            }
            let mut edges = Vec::new();
            for u in 0..n as u32 {
                for v in u + 1..n as u32 {
                    let p = if group[u as usize] == group[v as usize] {
                        p_in
                    } else {
                        p_out
                    };
                    if rng.gen::<f64>() < p {
                        edges.push((u, v));
                    }
                }
            }
            Ok(edges)
        }
        GraphModel::DualBarabasiAlbert { m1, m2, p } => {
            check_prob(p, "p")?;
            check_count(m1, n, "m1")?;
            check_count(m2, n, "m2")?;
            let core = m1.max(m2);
            let mut edges = Vec::new();
            let mut repeated: Vec<u32> = Vec::new();
            for source in core..n {
                let m = if rng.gen::<f64>() < p { m1 } else { m2 };
                let targets = preferential_targets(source, m, &repeated, rng);
                for &t in &targets {
                    edges.push((t.min(source as u32), t.max(source as u32)));
                    repeated.push(t);
                    repeated.push(source as u32);
                }
            }
            Ok(edges)
        }
        GraphModel::PowerlawCluster { m, p } => {
            check_prob(p, "p")?;
            check_count(m, n, "m")?;
            let mut edges = HashSet::new();
            let mut neighbours: Vec<Vec<u32>> = vec![Vec::new(); n];
            let mut repeated: Vec<u32> = Vec::new();
            let mut add = |edges: &mut HashSet<(u32, u32)>,
                           neighbours: &mut Vec<Vec<u32>>,
                           repeated: &mut Vec<u32>,
                           a: u32,
                           b: u32| {
                if edges.insert((a.min(b), a.max(b))) {
                    neighbours[a as usize].push(b);
                    neighbours[b as usize].push(a);
                    repeated.push(a);
                    repeated.push(b);
                }
            };
            for source in m..n {
                let targets = preferential_targets(source, m, &repeated, rng);
                let mut count = 0usize;
                let mut last = None;
                let mut queue = targets.into_iter();
                while count < m {
                    // triangle step: link to a neighbour of the last target
                    if count > 0 && rng.gen::<f64>() < p {
                        if let Some(prev) = last {
                            let cands: Vec<u32> = neighbours[prev as usize]
                                .iter()
                                .copied()
                                .filter(|&w| {
                                    w != source as u32
                                        && !edges.contains(&(
                                            w.min(source as u32),
                                            w.max(source as u32),
                                        ))
                                })
                                .collect();
                            if let Some(&w) = cands.as_slice().choose(rng) {
                                add(&mut edges, &mut neighbours, &mut repeated, source as u32, w);
                                count += 1;
                                continue;
                            }
                        }
                    }
                    match queue.next() {
                        Some(t) => {
                            add(&mut edges, &mut neighbours, &mut repeated, source as u32, t);
                            last = Some(t);
                            count += 1;
                        }
                        None => break,
                    }
                }
            }
            let mut out: Vec<(u32, u32)> = edges.into_iter().collect();
            out.sort_unstable();
            Ok(out)
        }
        GraphModel::UniformIntersection { m, p } => {
            check_prob(p, "p")?;
            if m < 1 || m > 64 {
                return Err(Error::InvalidGraphParams(format!(
                    "m must be in 1..=64, got {m}"
                )));
            }
            let masks: Vec<u64> = (0..n)
                .map(|_| {
                    let mut mask = 0u64;
                    for e in 0..m {
                        if rng.gen::<f64>() < p {
                            mask |= 1 << e;
                        }
                    }
                    mask
                })
                .collect();
            let mut edges = Vec::new();
            for u in 0..n as u32 {
                for v in u + 1..n as u32 {
                    if masks[u as usize] & masks[v as usize] != 0 {
                        edges.push((u, v));
                    }
                }
            }
            Ok(edges)
        }
    }
}

/// Draws `m` distinct attachment targets among `0..source`, proportional to
/// current degree (uniform before any edge exists).
fn preferential_targets(
    source: usize,
    m: usize,
    repeated: &[u32],
    rng: &mut impl Rng,
) -> Vec<u32> {
    debug_assert!(m <= source);
    let mut targets = Vec::with_capacity(m);
    let mut tries = 0usize;
    while targets.len() < m {
        let t = if repeated.is_empty() {
            rng.gen_range(0..source) as u32
        } else {
            repeated[rng.gen_range(0..repeated.len())]
        };
        if (t as usize) < source && !targets.contains(&t) {
            targets.push(t);
        }
        tries += 1;
        // dense degree lists can starve the rejection loop; fall back to
        // uniform sampling over the remaining vertices
        if tries > 64 * m.max(1) {
            for v in 0..source as u32 {
                if targets.len() >= m {
                    break;
                }
                if !targets.contains(&v) {
                    targets.push(v);
                }
            }
        }
    }
    targets
}

/// Assigns Gaussian edge weights with `P(w > 0) = positive_fraction`:
/// each weight is drawn from `N(σ·z*, σ)` where `Φ(z*) = positive_fraction`.
pub fn assign_edge_weights(
    edges: &[(u32, u32)],
    n: usize,
    sigma: f64,
    positive_fraction: f64,
    rng: &mut impl Rng,
) -> WeightedGraph {
    assert!(sigma > 0.0);
    assert!(positive_fraction > 0.0 && positive_fraction < 1.0);
    let mu = sigma * normal_quantile(positive_fraction);
    let normal = Normal::new(mu, sigma).expect("sigma > 0");
    let weighted = edges
        .iter()
        .map(|&(u, v)| Edge {
            u,
            v,
            weight: normal.sample(rng),
        })
        .collect();
    WeightedGraph::new(n, weighted)
}
