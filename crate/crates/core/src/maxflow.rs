//! s-t max-flow / min-cut and the reduction of submodular pairwise binary
//! energies to cut problems.
//!
//! The solver is Dinic's blocking-flow algorithm over real capacities.
//! Residual capacities at or below a small tolerance relative to the largest
//! capacity count as saturated. The returned cut puts exactly the nodes
//! reachable from the source in the final residual graph on the source side,
//! so among several minimum cuts the one with the smallest source side wins.

use std::collections::VecDeque;

use crate::error::{Error, Result};

const REL_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct CutGraph {
    nodes: usize,
    // arc 2k is forward, 2k+1 its reverse
    head: Vec<usize>,
    capacity: Vec<f64>,
    adjacency: Vec<Vec<usize>>,
}

/// Outcome of a max-flow solve.
#[derive(Clone, Debug, PartialEq)]
pub struct MinCut {
    pub flow: f64,
    /// `true` for nodes on the source side of the cut.
    pub source_side: Vec<bool>,
}

impl CutGraph {
    /// A graph with `nodes` inner nodes plus an implicit source and sink.
    pub fn new(nodes: usize) -> Self {
        CutGraph {
            nodes,
            head: Vec::new(),
            capacity: Vec::new(),
            adjacency: vec![Vec::new(); nodes + 2],
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn source(&self) -> usize {
        self.nodes
    }

    pub fn sink(&self) -> usize {
        self.nodes + 1
    }

    /// Adds an arc `from -> to` with capacity `cap` and a reverse arc with
    /// capacity `rev_cap`. Vertices are inner node ids, [`Self::source`] or
    /// [`Self::sink`].
    pub fn add_edge(&mut self, from: usize, to: usize, cap: f64, rev_cap: f64) -> Result<()> {
        let v = self.nodes + 2;
        if from >= v || to >= v || from == to {
            return Err(Error::contract(format!("invalid arc {from} -> {to}")));
        }
        if !(cap >= 0.0 && rev_cap >= 0.0 && cap.is_finite() && rev_cap.is_finite()) {
            return Err(Error::contract(format!(
                "arc {from} -> {to} has invalid capacity ({cap}, {rev_cap})"
            )));
        }
        let e = self.head.len();
        self.head.push(to);
        self.capacity.push(cap);
        self.head.push(from);
        self.capacity.push(rev_cap);
        self.adjacency[from].push(e);
        self.adjacency[to].push(e + 1);
        Ok(())
    }

    /// Source and sink capacities of inner node `i`.
    pub fn add_terminal(&mut self, i: usize, from_source: f64, to_sink: f64) -> Result<()> {
        if from_source > 0.0 {
            self.add_edge(self.source(), i, from_source, 0.0)?;
        }
        if to_sink > 0.0 {
            self.add_edge(i, self.sink(), to_sink, 0.0)?;
        }
        if from_source < 0.0 || to_sink < 0.0 {
            return Err(Error::contract("negative terminal capacity"));
        }
        Ok(())
    }

    /// Every arc as `(from, to, capacity)`, reverse arcs included.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.head.len()).map(move |e| (self.head[e ^ 1], self.head[e], self.capacity[e]))
    }

    /// Capacity of the cut whose source side is `source_side` (inner nodes).
    pub fn cut_capacity(&self, source_side: &[bool]) -> f64 {
        let side = |v: usize| {
            if v == self.source() {
                true
            } else if v == self.sink() {
                false
            } else {
                source_side[v]
            }
        };
        self.arcs()
            .filter(|&(a, b, _)| side(a) && !side(b))
            .map(|(_, _, c)| c)
            .sum()
    }

    /// Solves max-flow on a copy of the residual state.
    pub fn max_flow(&self) -> MinCut {
        let mut residual = self.capacity.clone();
        let (s, t) = (self.source(), self.sink());
        let v = self.nodes + 2;
        let max_cap = residual.iter().cloned().fold(0.0, f64::max);
        let tol = max_cap * REL_TOL;
        let mut level = vec![usize::MAX; v];
        let mut cursor = vec![0usize; v];
        let mut flow = 0.0;
        let mut queue = VecDeque::with_capacity(v);
        loop {
            level.fill(usize::MAX);
            level[s] = 0;
            queue.clear();
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &e in &self.adjacency[u] {
                    let w = self.head[e];
                    if residual[e] > tol && level[w] == usize::MAX {
                        level[w] = level[u] + 1;
                        queue.push_back(w);
                    }
                }
            }
            if level[t] == usize::MAX {
                break;
            }
            cursor.fill(0);
            loop {
                let pushed = self.augment(s, t, f64::INFINITY, tol, &level, &mut cursor, &mut residual);
                if pushed <= tol {
                    break;
                }
                flow += pushed;
            }
        }
        // source side: reachable from s in the residual graph
        let mut reach = vec![false; v];
        reach[s] = true;
        queue.clear();
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adjacency[u] {
                let w = self.head[e];
                if residual[e] > tol && !reach[w] {
                    reach[w] = true;
                    queue.push_back(w);
                }
            }
        }
        reach.truncate(self.nodes);
        MinCut {
            flow,
            source_side: reach,
        }
    }

    // Iterative DFS along the level graph; returns the flow pushed on one path.
    #[allow(clippy::too_many_arguments)]
    fn augment(
        &self,
        s: usize,
        t: usize,
        limit: f64,
        tol: f64,
        level: &[usize],
        cursor: &mut [usize],
        residual: &mut [f64],
    ) -> f64 {
        let mut path: Vec<usize> = Vec::new();
        let mut u = s;
        loop {
            if u == t {
                let bottleneck = path.iter().fold(limit, |b, &e| b.min(residual[e]));
                for &e in &path {
                    residual[e] -= bottleneck;
                    residual[e ^ 1] += bottleneck;
                }
                return bottleneck;
            }
            let adj = &self.adjacency[u];
            let mut advanced = false;
            while cursor[u] < adj.len() {
                let e = adj[cursor[u]];
                let w = self.head[e];
                if residual[e] > tol && level[w] == level[u] + 1 {
                    path.push(e);
                    u = w;
                    advanced = true;
                    break;
                }
                cursor[u] += 1;
            }
            if !advanced {
                // dead end: retreat and skip the arc that led here
                match path.pop() {
                    None => return 0.0,
                    Some(e) => {
                        u = self.head[e ^ 1];
                        cursor[u] += 1;
                    }
                }
            }
        }
    }
}

/// Binary energy over `z ∈ {-1, +1}^k`:
/// `E(z) = Σ_i unary_i(z_i) + Σ_(i,j,v) v z_i z_j`, each listed pairwise
/// term counted once, all `v ≤ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyInstance {
    /// `(cost at z = -1, cost at z = +1)` per variable.
    unary: Vec<[f64; 2]>,
    pairwise: Vec<(usize, usize, f64)>,
}

impl EnergyInstance {
    pub fn new(unary: Vec<[f64; 2]>, pairwise: Vec<(usize, usize, f64)>) -> Result<Self> {
        let k = unary.len();
        for &(i, j, v) in &pairwise {
            if i >= k || j >= k || i == j {
                return Err(Error::contract(format!("pairwise term ({i}, {j}) invalid for k = {k}")));
            }
            if !v.is_finite() || v > 0.0 {
                return Err(Error::NotSubmodular { i, j, value: v });
            }
        }
        if unary.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::contract("non-finite unary cost"));
        }
        Ok(EnergyInstance { unary, pairwise })
    }

    /// Energy with linear unary terms `u_i z_i`.
    pub fn from_linear(u: &[f64], pairwise: Vec<(usize, usize, f64)>) -> Result<Self> {
        Self::new(u.iter().map(|&u| [-u, u]).collect(), pairwise)
    }

    pub fn len(&self) -> usize {
        self.unary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unary.is_empty()
    }

    pub fn unary(&self) -> &[[f64; 2]] {
        &self.unary
    }

    pub fn pairwise(&self) -> &[(usize, usize, f64)] {
        &self.pairwise
    }

    pub fn energy(&self, z: &[i8]) -> f64 {
        let unary: f64 = self
            .unary
            .iter()
            .zip(z)
            .map(|(c, &zi)| if zi > 0 { c[1] } else { c[0] })
            .sum();
        let pair: f64 = self
            .pairwise
            .iter()
            .map(|&(i, j, v)| v * (z[i] * z[j]) as f64)
            .sum();
        unary + pair
    }
}

/// A cut instance for an energy. Source side means `z = -1`, sink side
/// `z = +1`; every cut's capacity equals `energy(z) + constant`.
#[derive(Clone, Debug)]
pub struct CutReduction {
    pub graph: CutGraph,
    pub constant: f64,
}

impl CutReduction {
    pub fn assignment(cut: &MinCut) -> Vec<i8> {
        cut.source_side.iter().map(|&s| if s { -1 } else { 1 }).collect()
    }

    /// Minimizes the energy: returns the optimal assignment and its energy.
    pub fn solve(&self) -> (Vec<i8>, f64) {
        let cut = self.graph.max_flow();
        let energy = cut.flow - self.constant;
        (Self::assignment(&cut), energy)
    }
}

/// Builds the standard s-t graph for a submodular energy.
///
/// With `x = (z + 1) / 2`, a term `v z_i z_j` has table
/// `θ(0,0) = θ(1,1) = v`, `θ(0,1) = θ(1,0) = -v`. It is split into
/// `v + (θ10 - θ00) x_i + (θ11 - θ10) x_j + (θ01 + θ10 - θ00 - θ11)(1 - x_i) x_j`;
/// the last part becomes an arc `i -> j` of capacity `-4v`, the rest folds
/// into the unaries and the constant.
pub fn reduce_energy_to_cut(e: &EnergyInstance) -> Result<CutReduction> {
    let k = e.len();
    // cost of x = 0 and x = 1 per node
    let mut cost: Vec<[f64; 2]> = e.unary.clone();
    let mut offset = 0.0;
    let mut graph = CutGraph::new(k);
    for &(i, j, v) in &e.pairwise {
        if v > 0.0 {
            return Err(Error::NotSubmodular { i, j, value: v });
        }
        let (t00, t01, t10, t11) = (v, -v, -v, v);
        offset += t00;
        cost[i][1] += t10 - t00;
        cost[j][1] += t11 - t10;
        let w = t01 + t10 - t00 - t11;
        if w > 0.0 {
            graph.add_edge(i, j, w, 0.0)?;
        }
    }
    for (i, c) in cost.iter().enumerate() {
        let low = c[0].min(c[1]);
        offset += low;
        // s -> i is cut when i sits on the sink side (x = 1)
        graph.add_terminal(i, c[1] - low, c[0] - low)?;
    }
    Ok(CutReduction {
        graph,
        constant: -offset,
    })
}
