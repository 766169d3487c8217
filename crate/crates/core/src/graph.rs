//! Graphs with ordered ports, directed edge states and vertex multiports.
//!
//! Each undirected edge `{a, b}` carries two basis states, `a -> b` and
//! `b -> a`. Edge `e` (in insertion order) owns state indices `2e` (traversed
//! in the orientation the edge was given) and `2e + 1` (reversed).
//!
//! A vertex of degree `d` numbers its incident edges by port `0..d`. Local
//! unitaries are stored with rows indexed by output port and columns by
//! input port.

use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Result, WalkError};
use crate::UNITARITY_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for VertexId {
    fn from(v: usize) -> Self {
        VertexId(v)
    }
}

/// A photon on edge `{tail, head}` travelling from `tail` towards `head`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DirectedEdge {
    pub tail: VertexId,
    pub head: VertexId,
}

impl DirectedEdge {
    pub fn new(tail: usize, head: usize) -> Self {
        DirectedEdge {
            tail: VertexId(tail),
            head: VertexId(head),
        }
    }

    pub fn reversed(self) -> Self {
        DirectedEdge {
            tail: self.head,
            head: self.tail,
        }
    }
}

impl fmt::Display for DirectedEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{},{}>", self.tail, self.head)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    /// Neighbor reached through each port, per vertex.
    ports: Vec<Vec<usize>>,
    edge_index: HashMap<(usize, usize), usize>,
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl Graph {
    /// Builds a simple graph; ports of every vertex are ordered by ascending
    /// neighbor id. Vertex ids must be dense `0..V`.
    pub fn build(edges: &[(usize, usize)]) -> Result<Graph> {
        let (vertex_count, edge_index) = Self::check_edges(edges)?;
        let mut ports = vec![Vec::new(); vertex_count];
        for &(a, b) in edges {
            ports[a].push(b);
            ports[b].push(a);
        }
        for p in &mut ports {
            p.sort_unstable();
        }
        Ok(Graph {
            vertex_count,
            edges: edges.to_vec(),
            ports,
            edge_index,
        })
    }

    /// Builds a graph with an explicit port order for every vertex. `ports[v]`
    /// must list each neighbor of `v` exactly once.
    pub fn with_port_order(edges: &[(usize, usize)], ports: Vec<Vec<usize>>) -> Result<Graph> {
        let (vertex_count, edge_index) = Self::check_edges(edges)?;
        if ports.len() != vertex_count {
            return Err(WalkError::InvalidParameter(format!(
                "port table covers {} vertices, graph has {}",
                ports.len(),
                vertex_count
            )));
        }
        let mut reference = vec![Vec::new(); vertex_count];
        for &(a, b) in edges {
            reference[a].push(b);
            reference[b].push(a);
        }
        for (v, (given, expected)) in ports.iter().zip(reference.iter_mut()).enumerate() {
            let mut sorted = given.clone();
            sorted.sort_unstable();
            expected.sort_unstable();
            if sorted != *expected {
                return Err(WalkError::InvalidParameter(format!(
                    "ports of vertex {v} must be a permutation of its neighbors {expected:?}"
                )));
            }
        }
        Ok(Graph {
            vertex_count,
            edges: edges.to_vec(),
            ports,
            edge_index,
        })
    }

    fn check_edges(edges: &[(usize, usize)]) -> Result<(usize, HashMap<(usize, usize), usize>)> {
        if edges.is_empty() {
            return Err(WalkError::EmptyGraph);
        }
        let mut edge_index = HashMap::with_capacity(edges.len());
        let mut vertex_count = 0;
        for (e, &(a, b)) in edges.iter().enumerate() {
            if a == b {
                return Err(WalkError::SelfLoop(a));
            }
            if edge_index.insert(edge_key(a, b), e).is_some() {
                return Err(WalkError::DuplicateEdge(a, b));
            }
            vertex_count = vertex_count.max(a + 1).max(b + 1);
        }
        let mut seen = vec![false; vertex_count];
        for &(a, b) in edges {
            seen[a] = true;
            seen[b] = true;
        }
        if let Some(vertex) = seen.iter().position(|s| !s) {
            return Err(WalkError::DanglingVertex {
                vertex,
                count: vertex_count,
            });
        }
        Ok((vertex_count, edge_index))
    }

    /// Ring `0 - 1 - ... - (n-1) - 0`. Edge `j` is `(j, j+1 mod n)`; port 0 of
    /// every vertex faces `j-1`, port 1 faces `j+1`.
    pub fn cycle(n: usize) -> Result<Graph> {
        if n < 3 {
            return Err(WalkError::CycleTooSmall(n));
        }
        let edges: Vec<_> = (0..n).map(|j| (j, (j + 1) % n)).collect();
        let ports = (0..n).map(|j| vec![(j + n - 1) % n, (j + 1) % n]).collect();
        Graph::with_port_order(&edges, ports)
    }

    /// Open path `0 - 1 - ... - (n-1)`; interior vertices have port 0 facing
    /// the lower neighbor, the two ends have degree one.
    pub fn path(n: usize) -> Result<Graph> {
        if n < 2 {
            return Err(WalkError::InvalidParameter(format!(
                "path needs at least 2 vertices, got {n}"
            )));
        }
        let edges: Vec<_> = (0..n - 1).map(|j| (j, j + 1)).collect();
        Graph::build(&edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Dimension of the walk's Hilbert space, `2E`.
    pub fn state_count(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.ports[v.0].len()
    }

    /// Neighbors of `v` in port order.
    pub fn ports(&self, v: VertexId) -> &[usize] {
        &self.ports[v.0]
    }

    pub fn neighbor_at(&self, v: VertexId, port: usize) -> Option<VertexId> {
        self.ports.get(v.0)?.get(port).copied().map(VertexId)
    }

    pub fn port_of(&self, v: VertexId, neighbor: VertexId) -> Option<usize> {
        self.ports.get(v.0)?.iter().position(|&u| u == neighbor.0)
    }

    pub fn edge_of(&self, a: VertexId, b: VertexId) -> Option<usize> {
        self.edge_index.get(&edge_key(a.0, b.0)).copied()
    }

    pub fn index_of(&self, s: DirectedEdge) -> Result<usize> {
        let e = self
            .edge_of(s.tail, s.head)
            .ok_or_else(|| WalkError::NotAnEdge(s.to_string()))?;
        let forward = self.edges[e].0 == s.tail.0;
        Ok(2 * e + usize::from(!forward))
    }

    /// Inverse of [`Graph::index_of`]. Panics if `index >= state_count()`.
    pub fn state_of(&self, index: usize) -> DirectedEdge {
        let (a, b) = self.edges[index / 2];
        if index.is_multiple_of(2) {
            DirectedEdge::new(a, b)
        } else {
            DirectedEdge::new(b, a)
        }
    }

    pub fn states(&self) -> impl Iterator<Item = DirectedEdge> + '_ {
        (0..self.state_count()).map(move |i| self.state_of(i))
    }

    /// True when the graph is exactly what [`Graph::cycle`] builds for its
    /// vertex count (edge order, orientation and port order).
    pub fn is_standard_ring(&self) -> bool {
        let n = self.vertex_count;
        n >= 3
            && self.edges.len() == n
            && self
                .edges
                .iter()
                .enumerate()
                .all(|(j, &(a, b))| a == j && b == (j + 1) % n)
            && self
                .ports
                .iter()
                .enumerate()
                .all(|(j, p)| p.as_slice() == [(j + n - 1) % n, (j + 1) % n])
    }
}

/// Square matrix acting on the ports of one vertex; `entry(out, inp)` is the
/// amplitude to leave through port `out` after arriving through port `inp`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalUnitary {
    dim: usize,
    data: Vec<Complex64>,
}

impl LocalUnitary {
    /// Row-major `dim x dim` matrix, checked for unitarity at [`UNITARITY_TOL`].
    pub fn new(dim: usize, rows: Vec<Complex64>) -> Result<Self> {
        let m = Self::unchecked(dim, rows)?;
        let dev = m.unitarity_defect();
        if dev > UNITARITY_TOL {
            return Err(WalkError::NotUnitary(format!(
                "max |(M^dag M - I)_ab| = {dev:.3e}"
            )));
        }
        Ok(m)
    }

    /// Any square matrix; used to probe [`validate_unitary`].
    pub fn unchecked(dim: usize, rows: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || rows.len() != dim * dim {
            return Err(WalkError::InvalidParameter(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                rows.len()
            )));
        }
        Ok(LocalUnitary { dim, data: rows })
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Complex64) -> Result<Self> {
        let rows = (0..dim * dim).map(|i| f(i / dim, i % dim)).collect();
        Self::new(dim, rows)
    }

    pub fn identity(dim: usize) -> Self {
        let rows = (0..dim * dim)
            .map(|i| {
                if i / dim == i % dim {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        LocalUnitary { dim, data: rows }
    }

    /// Degree-one vertex that reflects everything back with amplitude -1.
    pub fn mirror() -> Self {
        LocalUnitary {
            dim: 1,
            data: vec![Complex64::new(-1.0, 0.0)],
        }
    }

    /// Two-port beam splitter. Port 0 faces `j-1`, port 1 faces `j+1`:
    /// a photon arriving from the left is transmitted with `t` and reflected
    /// with `r`, one arriving from the right is transmitted with `t*` and
    /// reflected with `-r*`.
    pub fn beam_splitter(t: Complex64, r: Complex64) -> Result<Self> {
        let norm = t.norm_sqr() + r.norm_sqr();
        if (norm - 1.0).abs() > UNITARITY_TOL {
            return Err(WalkError::NotUnitary(format!(
                "|t|^2 + |r|^2 = {norm} (expected 1)"
            )));
        }
        Ok(LocalUnitary {
            dim: 2,
            data: vec![r, t.conj(), t, -r.conj()],
        })
    }

    /// Symmetric three-port with exit probability 1/3 through every port.
    /// Port 0 is the labelled edge `A`.
    pub fn tritter() -> Self {
        let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        let one = Complex64::new(1.0, 0.0);
        let s = 1.0 / 3f64.sqrt();
        // columns: inputs A, B, C
        let cols = [[one, one, one], [z.conj(), one, z], [z.conj(), z, one]];
        let data = (0..9).map(|i| cols[i % 3][i / 3] * s).collect();
        LocalUnitary { dim: 3, data }
    }

    /// Label-free n-port: reflection `r` back into the arrival edge,
    /// transmission `t` into every other edge.
    pub fn grover(n: usize, t: Complex64, r: Complex64) -> Result<Self> {
        if n < 2 {
            return Err(WalkError::InvalidParameter(format!(
                "Grover vertex needs n >= 2, got {n}"
            )));
        }
        let (norm, cross) = grover_conditions(n, t, r);
        if norm.abs() > UNITARITY_TOL || cross.abs() > UNITARITY_TOL {
            return Err(WalkError::NotUnitary(format!(
                "Grover conditions off by {norm:.3e} and {cross:.3e}"
            )));
        }
        Ok(LocalUnitary {
            dim: n,
            data: (0..n * n)
                .map(|i| if i / n == i % n { r } else { t })
                .collect(),
        })
    }

    /// Real member of the Grover family, `t = 2/n`, `r = -(n-2)/n`.
    pub fn grover_real(n: usize) -> Result<Self> {
        let (t, r) = grover_real_amplitudes(n);
        Self::grover(n, t, r)
    }

    /// Haar-distributed unitary (QR of a complex Ginibre matrix with the
    /// phases of R's diagonal divided out).
    pub fn haar_random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        let mut cols: Vec<Vec<Complex64>> = (0..dim)
            .map(|_| {
                (0..dim)
                    .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                    .collect()
            })
            .collect();
        for c in 0..dim {
            for p in 0..c {
                let proj: Complex64 = (0..dim).map(|i| cols[p][i].conj() * cols[c][i]).sum();
                for i in 0..dim {
                    let v = cols[p][i];
                    cols[c][i] -= proj * v;
                }
            }
            let norm = cols[c].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            for x in &mut cols[c] {
                *x /= norm;
            }
        }
        let data = (0..dim * dim).map(|i| cols[i % dim][i / dim]).collect();
        LocalUnitary { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, out: usize, inp: usize) -> Complex64 {
        self.data[out * self.dim + inp]
    }

    pub fn column(&self, inp: usize) -> impl Iterator<Item = Complex64> + '_ {
        (0..self.dim).map(move |out| self.entry(out, inp))
    }

    /// `max_ab |(M^dag M - I)_ab|`.
    pub fn unitarity_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                let g: Complex64 = (0..d)
                    .map(|k| self.entry(k, a).conj() * self.entry(k, b))
                    .sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }

    /// Same matrix with columns `a` and `b` exchanged.
    pub fn with_swapped_columns(&self, a: usize, b: usize) -> Self {
        let mut m = self.clone();
        for out in 0..self.dim {
            m.data.swap(out * self.dim + a, out * self.dim + b);
        }
        m
    }
}

pub fn validate_unitary(m: &LocalUnitary, tol: f64) -> bool {
    m.unitarity_defect() <= tol
}

/// Residuals of the two Grover unitarity conditions:
/// `(n-1)|t|^2 + |r|^2 - 1` and `(n-2)|t|^2 + r* t + t* r`.
pub fn grover_conditions(n: usize, t: Complex64, r: Complex64) -> (f64, f64) {
    let nf = n as f64;
    let norm = (nf - 1.0) * t.norm_sqr() + r.norm_sqr() - 1.0;
    let cross = Complex64::new((nf - 2.0) * t.norm_sqr(), 0.0) + r.conj() * t + t.conj() * r;
    (norm, cross.norm())
}

pub fn grover_real_amplitudes(n: usize) -> (Complex64, Complex64) {
    let nf = n as f64;
    (
        Complex64::new(2.0 / nf, 0.0),
        Complex64::new(-(nf - 2.0) / nf, 0.0),
    )
}

/// Phase shifter on one port: the amplitude picks up `e^{i phi}` each time
/// it passes through the port, on the way in and on the way out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortPhase {
    pub vertex: VertexId,
    pub port: usize,
    pub phi: f64,
}

impl PortPhase {
    pub fn new(vertex: usize, port: usize, phi: f64) -> Self {
        PortPhase {
            vertex: VertexId(vertex),
            port,
            phi,
        }
    }
}

/// Shifters on every ring edge whose left end has the given parity. On a
/// ring the shifter of edge `(j, j+1)` sits at port 0 of vertex `j+1`.
pub fn alternating_ring_phases(n: usize, phi: f64, left_end_even: bool) -> Vec<PortPhase> {
    (0..n)
        .filter(|j| (j % 2 == 0) == left_end_even)
        .map(|j| PortPhase::new((j + 1) % n, 0, phi))
        .collect()
}
