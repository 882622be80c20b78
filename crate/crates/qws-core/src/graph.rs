//! Finite multigraphs with symmetric arcs.
//!
//! Edge `i = (u, v)` owns arc `2i` from `u` to `v` and arc `2i + 1` from `v`
//! to `u`. The incoming-arc set `A_u = {a : t(a) = u}` is kept in a fixed order
//! which is the local basis order for the coin at `u`. [`Graph::from_edges`]
//! orders `A_u` by arc index; [`Graph::hypercubic_torus`] uses the lattice
//! labelling `+e_1, −e_1, …, +e_d, −e_d`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arc {
    pub origin: usize,
    pub terminus: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n_vertices: usize,
    edges: Vec<(usize, usize)>,
    arcs: Vec<Arc>,
    incoming: Vec<Vec<usize>>,
    local_index: Vec<usize>,
}

/// Named graph families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StandardGraph {
    Cycle(usize),
    Complete(usize),
    Bouquet(usize),
    HypercubicTorus { dim: usize, size: usize },
}

impl Graph {
    /// Builds a graph from an edge list. Self-loops and parallel edges are allowed.
    pub fn from_edges(n_vertices: usize, edges: &[(usize, usize)]) -> Result<Self> {
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= n_vertices {
                    return Err(Error::VertexOutOfRange {
                        vertex: w,
                        n_vertices,
                    });
                }
            }
        }
        let arcs: Vec<Arc> = edges
            .iter()
            .flat_map(|&(u, v)| {
                [
                    Arc { origin: u, terminus: v },
                    Arc { origin: v, terminus: u },
                ]
            })
            .collect();
        let mut incoming = vec![Vec::new(); n_vertices];
        for (a, arc) in arcs.iter().enumerate() {
            incoming[arc.terminus].push(a);
        }
        Ok(Self::assemble(n_vertices, edges.to_vec(), arcs, incoming))
    }

    fn assemble(
        n_vertices: usize,
        edges: Vec<(usize, usize)>,
        arcs: Vec<Arc>,
        incoming: Vec<Vec<usize>>,
    ) -> Self {
        let mut local_index = vec![0; arcs.len()];
        for list in &incoming {
            for (i, &a) in list.iter().enumerate() {
                local_index[a] = i;
            }
        }
        Graph {
            n_vertices,
            edges,
            arcs,
            incoming,
            local_index,
        }
    }

    pub fn standard(kind: StandardGraph) -> Result<Self> {
        match kind {
            StandardGraph::Cycle(n) => Self::cycle(n),
            StandardGraph::Complete(n) => Self::complete(n),
            StandardGraph::Bouquet(d) => Self::bouquet(d),
            StandardGraph::HypercubicTorus { dim, size } => Self::hypercubic_torus(dim, size),
        }
    }

    /// Cycle `C_n` with edges `(i, i+1 mod n)`. `n = 1` is a single loop, `n = 2` a double edge.
    pub fn cycle(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("cycle needs at least one vertex".into()));
        }
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_edges(n, &edges)
    }

    /// Complete graph `K_n`, edges `(i, j)` with `i < j` in lexicographic order.
    pub fn complete(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter("complete graph needs at least two vertices".into()));
        }
        let edges: Vec<_> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        Self::from_edges(n, &edges)
    }

    /// One vertex carrying `d` loops. Arc `2j` is labelled `+(j+1)`, arc `2j+1` is `−(j+1)`.
    pub fn bouquet(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("bouquet needs at least one loop".into()));
        }
        Self::from_edges(1, &vec![(0, 0); d])
    }

    /// The torus `Z^dim / size Z^dim`.
    ///
    /// Vertex `x` has index `Σ_j x_j size^j`. Edge `x·dim + j` joins `x` to
    /// `x + e_j`; its even arc carries the label `(x + e_j; +j)` and its odd arc
    /// `(x; −j)`, where `(y; ±j)` names the arc entering `y` from `y ∓ e_j`.
    /// `A_x` is ordered `(x;+1), (x;−1), …, (x;+dim), (x;−dim)`.
    pub fn hypercubic_torus(dim: usize, size: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("torus dimension must be positive".into()));
        }
        if size < 3 {
            return Err(Error::InvalidParameter(format!(
                "torus size {size} < 3 makes the ±e_j arc labelling ambiguous"
            )));
        }
        let layout = TorusLayout { dim, size };
        let n = layout.n_vertices()?;
        let mut edges = Vec::with_capacity(n * dim);
        for x in 0..n {
            for j in 0..dim {
                edges.push((x, layout.step(x, j, 1)));
            }
        }
        let base = Self::from_edges(n, &edges)?;
        let incoming = (0..n)
            .map(|x| {
                (0..dim)
                    .flat_map(|j| [layout.arc(x, j, 1), layout.arc(x, j, -1)])
                    .collect()
            })
            .collect();
        Ok(Self::assemble(n, base.edges, base.arcs, incoming))
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, a: usize) -> Arc {
        self.arcs[a]
    }

    pub fn origin(&self, a: usize) -> usize {
        self.arcs[a].origin
    }

    pub fn terminus(&self, a: usize) -> usize {
        self.arcs[a].terminus
    }

    /// The reversed arc `ā`.
    pub fn inverse(&self, a: usize) -> usize {
        a ^ 1
    }

    /// `A_u` in its canonical order.
    pub fn incoming(&self, u: usize) -> &[usize] {
        &self.incoming[u]
    }

    /// Position of `a` inside `A_{t(a)}`.
    pub fn local_index(&self, a: usize) -> usize {
        self.local_index[a]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.incoming[u].len()
    }

    /// `δ(G)`; zero for a graph with an isolated vertex.
    pub fn min_degree(&self) -> usize {
        (0..self.n_vertices).map(|u| self.degree(u)).min().unwrap_or(0)
    }

    pub fn is_connected(&self) -> bool {
        if self.n_vertices == 0 {
            return true;
        }
        let mut out = vec![Vec::new(); self.n_vertices];
        for arc in &self.arcs {
            out[arc.origin].push(arc.terminus);
        }
        let mut seen = vec![false; self.n_vertices];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for &v in &out[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Index arithmetic for [`Graph::hypercubic_torus`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusLayout {
    pub dim: usize,
    pub size: usize,
}

impl TorusLayout {
    pub fn n_vertices(&self) -> Result<usize> {
        u32::try_from(self.dim)
            .ok()
            .and_then(|d| self.size.checked_pow(d))
            .ok_or_else(|| Error::InvalidParameter("torus too large".into()))
    }

    /// Coordinates of vertex `x`.
    pub fn coords(&self, x: usize) -> Vec<usize> {
        let mut rest = x;
        (0..self.dim)
            .map(|_| {
                let c = rest % self.size;
                rest /= self.size;
                c
            })
            .collect()
    }

    /// `x + sign·e_j`.
    pub fn step(&self, x: usize, j: usize, sign: i32) -> usize {
        let stride = self.size.pow(j as u32);
        let c = (x / stride) % self.size;
        let shifted = if sign > 0 {
            (c + 1) % self.size
        } else {
            (c + self.size - 1) % self.size
        };
        x - c * stride + shifted * stride
    }

    /// Arc `(x; sign·(j+1))`, which enters `x` travelling in direction `sign·e_j`.
    pub fn arc(&self, x: usize, j: usize, sign: i32) -> usize {
        if sign > 0 {
            2 * (self.step(x, j, -1) * self.dim + j)
        } else {
            2 * (x * self.dim + j) + 1
        }
    }
}

/// A permutation of arc indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcPermutation {
    perm: Vec<usize>,
}

impl ArcPermutation {
    /// Wraps a list; bijectivity is checked by [`validate_shift_permutation`].
    pub fn new(perm: Vec<usize>) -> Self {
        ArcPermutation { perm }
    }

    pub fn identity(n_arcs: usize) -> Self {
        ArcPermutation {
            perm: (0..n_arcs).collect(),
        }
    }

    /// The flip-flop permutation `a ↦ ā`.
    pub fn flip_flop(g: &Graph) -> Self {
        ArcPermutation {
            perm: (0..g.n_arcs()).map(|a| g.inverse(a)).collect(),
        }
    }

    /// Moving shift on the torus: `(x; ±j) ↦ (x ± e_j; ±j)`.
    pub fn moving_shift(dim: usize, size: usize) -> Result<Self> {
        let layout = TorusLayout { dim, size };
        let n = layout.n_vertices()?;
        let mut perm = vec![0; 2 * n * dim];
        for x in 0..n {
            for j in 0..dim {
                for sign in [1, -1] {
                    perm[layout.arc(x, j, sign)] = layout.arc(layout.step(x, j, sign), j, sign);
                }
            }
        }
        Ok(ArcPermutation { perm })
    }

    pub fn apply(&self, a: usize) -> usize {
        self.perm[a]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }
}

/// Checks that `pi` is a bijection with `o(π(a)) = t(a)` for every arc.
pub fn validate_shift_permutation(g: &Graph, pi: &ArcPermutation) -> Result<()> {
    if pi.len() != g.n_arcs() {
        return Err(Error::DimensionMismatch(format!(
            "permutation has {} entries, graph has {} arcs",
            pi.len(),
            g.n_arcs()
        )));
    }
    let mut hit = vec![false; g.n_arcs()];
    for a in 0..g.n_arcs() {
        let b = pi.apply(a);
        if b >= g.n_arcs() || hit[b] {
            return Err(Error::InvalidPermutation {
                arc: a,
                reason: format!("image {b} is out of range or repeated"),
            });
        }
        hit[b] = true;
        if g.origin(b) != g.terminus(a) {
            return Err(Error::InvalidPermutation {
                arc: a,
                reason: format!("o(π(a)) = {} but t(a) = {}", g.origin(b), g.terminus(a)),
            });
        }
    }
    Ok(())
}
