//! Global step operator assembled from vertex multiports, state evolution and
//! probability distributions over edges and vertices.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Result, WalkError};
use crate::graph::{alternating_ring_phases, DirectedEdge, Graph, LocalUnitary, PortPhase, VertexId};
use crate::sum::CompensatedSum;
use crate::UNITARITY_TOL;

/// Normalized amplitude vector over the directed edge states of a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    amplitudes: Vec<Complex64>,
}

impl WalkState {
    /// Wraps amplitudes that are already normalized (within `1e-10`).
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let s = WalkState { amplitudes };
        let norm = s.norm();
        if (norm - 1.0).abs() > UNITARITY_TOL {
            return Err(WalkError::InvalidParameter(format!(
                "state norm is {norm}, expected 1"
            )));
        }
        Ok(s)
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(WalkError::InvalidParameter(
                "cannot normalize a zero or non-finite state".into(),
            ));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(WalkState { amplitudes })
    }

    pub fn basis(graph: &Graph, s: DirectedEdge) -> Result<Self> {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); graph.state_count()];
        amplitudes[graph.index_of(s)?] = Complex64::new(1.0, 0.0);
        Ok(WalkState { amplitudes })
    }

    /// Equal-weight superposition of every directed edge state.
    pub fn uniform(graph: &Graph) -> Self {
        let n = graph.state_count();
        let a = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
        WalkState {
            amplitudes: vec![a; n],
        }
    }

    /// Gaussian random direction in `C^{2E}`.
    pub fn random<R: Rng + ?Sized>(graph: &Graph, rng: &mut R) -> Self {
        let raw = (0..graph.state_count())
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        WalkState::normalized(raw).expect("gaussian sample is nonzero")
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .collect::<CompensatedSum>()
            .value()
            .sqrt()
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }
}

/// One step of the walk as a sparse `2E x 2E` matrix, stored by source state.
#[derive(Debug, Clone)]
pub struct StepOperator {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    amplitudes: Vec<Complex64>,
}

impl StepOperator {
    /// Assembles the step operator. A photon on `u -> v` enters `v` through
    /// port `p = port(v, u)` and leaves towards `w` through `q = port(v, w)`
    /// with amplitude `e^{i phi(v,p)} U_v[q, p] e^{i phi(v,q)}`.
    pub fn build(
        graph: &Graph,
        unitaries: &BTreeMap<VertexId, LocalUnitary>,
        phases: &[PortPhase],
    ) -> Result<Self> {
        let mut port_phase: Vec<Vec<f64>> = (0..graph.vertex_count())
            .map(|v| vec![0.0; graph.degree(VertexId(v))])
            .collect();
        for p in phases {
            let degree = port_phase
                .get(p.vertex.0)
                .map(Vec::len)
                .ok_or_else(|| WalkError::InvalidParameter(format!("no vertex {}", p.vertex)))?;
            if p.port >= degree {
                return Err(WalkError::PortOutOfRange {
                    vertex: p.vertex.0,
                    port: p.port,
                    degree,
                });
            }
            if !p.phi.is_finite() {
                return Err(WalkError::InvalidParameter(format!(
                    "phase at vertex {} port {} is not finite",
                    p.vertex, p.port
                )));
            }
            port_phase[p.vertex.0][p.port] += p.phi;
        }

        for v in 0..graph.vertex_count() {
            let id = VertexId(v);
            let u = unitaries.get(&id).ok_or(WalkError::MissingUnitary(v))?;
            if u.dim() != graph.degree(id) {
                return Err(WalkError::DimensionMismatch {
                    vertex: v,
                    degree: graph.degree(id),
                    dim: u.dim(),
                });
            }
            let defect = u.unitarity_defect();
            if defect > UNITARITY_TOL {
                return Err(WalkError::NotUnitary(format!(
                    "vertex {v}: max |(M^dag M - I)_ab| = {defect:.3e}"
                )));
            }
        }

        let mut offsets = Vec::with_capacity(graph.state_count() + 1);
        let mut targets = Vec::new();
        let mut amplitudes = Vec::new();
        offsets.push(0);
        for s in graph.states() {
            let v = s.head;
            let u = &unitaries[&v];
            let p_in = graph.port_of(v, s.tail).expect("edge endpoints are neighbors");
            let phase_in = port_phase[v.0][p_in];
            for (q, &w) in graph.ports(v).iter().enumerate() {
                let m = u.entry(q, p_in);
                if m == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let amp = m * Complex64::from_polar(1.0, phase_in + port_phase[v.0][q]);
                targets.push(graph.index_of(DirectedEdge::new(v.0, w))?);
                amplitudes.push(amp);
            }
            offsets.push(targets.len());
        }
        Ok(StepOperator {
            offsets,
            targets,
            amplitudes,
        })
    }

    /// Same beam splitter at every vertex of a degree-two graph (ring).
    pub fn uniform_beam_splitters(
        graph: &Graph,
        t: Complex64,
        r: Complex64,
        phases: &[PortPhase],
    ) -> Result<Self> {
        let bs = LocalUnitary::beam_splitter(t, r)?;
        let unitaries = (0..graph.vertex_count())
            .map(|v| (VertexId(v), bs.clone()))
            .collect();
        Self::build(graph, &unitaries, phases)
    }

    pub fn dim(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Nonzero `(target, amplitude)` pairs in the column of `source`.
    pub fn column(&self, source: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let range = self.offsets[source]..self.offsets[source + 1];
        self.targets[range.clone()]
            .iter()
            .copied()
            .zip(self.amplitudes[range].iter().copied())
    }

    pub fn apply(&self, s: &WalkState) -> Result<WalkState> {
        if s.len() != self.dim() {
            return Err(WalkError::StateLength {
                expected: self.dim(),
                got: s.len(),
            });
        }
        Ok(WalkState {
            amplitudes: self.apply_slice(s.amplitudes()),
        })
    }

    pub(crate) fn apply_slice(&self, input: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); input.len()];
        self.apply_into(input, &mut out);
        out
    }

    fn apply_into(&self, input: &[Complex64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
        for (source, &a) in input.iter().enumerate() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in self.offsets[source]..self.offsets[source + 1] {
                out[self.targets[k]] += self.amplitudes[k] * a;
            }
        }
    }

    pub fn evolve(&self, s: &WalkState, steps: usize) -> Result<WalkState> {
        if s.len() != self.dim() {
            return Err(WalkError::StateLength {
                expected: self.dim(),
                got: s.len(),
            });
        }
        let mut cur = s.amplitudes.clone();
        let mut next = vec![Complex64::new(0.0, 0.0); cur.len()];
        for _ in 0..steps {
            self.apply_into(&cur, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(WalkState { amplitudes: cur })
    }

    /// Dense row-major copy; meant for small graphs in tests.
    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let n = self.dim();
        let mut m = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for source in 0..n {
            for (target, a) in self.column(source) {
                m[target][source] += a;
            }
        }
        m
    }

    /// `max_ab |(U^dag U - I)_ab|` computed from the sparse columns.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        let cols: Vec<BTreeMap<usize, Complex64>> = (0..n)
            .map(|s| {
                let mut m = BTreeMap::new();
                for (t, a) in self.column(s) {
                    *m.entry(t).or_insert(Complex64::new(0.0, 0.0)) += a;
                }
                m
            })
            .collect();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in a..n {
                let g: Complex64 = cols[a]
                    .iter()
                    .filter_map(|(t, x)| cols[b].get(t).map(|y| x.conj() * y))
                    .sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }
}

/// Probabilities over edges or vertices, labelled for output.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    pub probabilities: Vec<f64>,
    pub labels: Vec<String>,
}

impl Distribution {
    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probabilities
            .iter()
            .copied()
            .collect::<CompensatedSum>()
            .value()
    }

    pub fn max_abs_diff(&self, other: &Distribution) -> f64 {
        self.probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn edge_probs(amps: &[Complex64]) -> Vec<f64> {
    amps.chunks_exact(2)
        .map(|pair| pair[0].norm_sqr() + pair[1].norm_sqr())
        .collect()
}

fn edge_labels(graph: &Graph) -> Vec<String> {
    graph.edges().iter().map(|(a, b)| format!("{a}-{b}")).collect()
}

/// Probability of finding the photon on each undirected edge (either direction).
pub fn edge_probabilities(graph: &Graph, s: &WalkState) -> Distribution {
    Distribution {
        probabilities: edge_probs(s.amplitudes()),
        labels: edge_labels(graph),
    }
}

/// Probability of each vertex, collecting the amplitudes of all states that
/// point into it.
pub fn vertex_probabilities(graph: &Graph, s: &WalkState) -> Distribution {
    let mut probabilities = vec![0.0; graph.vertex_count()];
    for (i, a) in s.amplitudes().iter().enumerate() {
        probabilities[graph.state_of(i).head.0] += a.norm_sqr();
    }
    Distribution {
        probabilities,
        labels: (0..graph.vertex_count()).map(|v| v.to_string()).collect(),
    }
}

/// Cesàro mean of the edge distribution over steps `0..m`.
pub fn time_averaged_distribution(
    graph: &Graph,
    op: &StepOperator,
    s: &WalkState,
    m: usize,
) -> Result<Distribution> {
    if m == 0 {
        return Err(WalkError::InvalidParameter(
            "time average needs m >= 1".into(),
        ));
    }
    if s.len() != op.dim() {
        return Err(WalkError::StateLength {
            expected: op.dim(),
            got: s.len(),
        });
    }
    let mut acc = vec![CompensatedSum::new(); graph.edge_count()];
    let mut cur = s.amplitudes.clone();
    let mut next = vec![Complex64::new(0.0, 0.0); cur.len()];
    for step in 0..m {
        for (a, p) in acc.iter_mut().zip(edge_probs(&cur)) {
            a.add(p);
        }
        if step + 1 < m {
            op.apply_into(&cur, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
    }
    Ok(Distribution {
        probabilities: acc.iter().map(|a| a.value() / m as f64).collect(),
        labels: edge_labels(graph),
    })
}

/// Which ring edges carry a phase shifter in a [`LineWalk`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhasePattern {
    None,
    /// Shifter `phi` on every edge whose left end is even.
    EvenEdges(f64),
    /// Shifter `phi` on every edge whose left end is odd.
    OddEdges(f64),
    /// Shifter `phi` in front of every vertex.
    AllEdges(f64),
}

impl PhasePattern {
    pub fn ring_phases(&self, n: usize) -> Vec<PortPhase> {
        match *self {
            PhasePattern::None => Vec::new(),
            PhasePattern::EvenEdges(phi) => alternating_ring_phases(n, phi, true),
            PhasePattern::OddEdges(phi) => alternating_ring_phases(n, phi, false),
            PhasePattern::AllEdges(phi) => (0..n).map(|v| PortPhase::new(v, 0, phi)).collect(),
        }
    }
}

/// Walk on the infinite line, simulated on an even ring large enough that the
/// amplitude launched at the origin never wraps around within `max_steps`.
/// Line coordinate `j` lives in `[-N/2, N/2)`.
#[derive(Debug, Clone)]
pub struct LineWalk {
    graph: Graph,
    op: StepOperator,
    max_steps: usize,
}

impl LineWalk {
    pub fn ring_size_for(steps: usize) -> usize {
        let n = (2 * steps + 4).max(4);
        n + n % 2
    }

    pub fn new(max_steps: usize, t: Complex64, r: Complex64, phases: PhasePattern) -> Result<Self> {
        Self::with_ring_size(Self::ring_size_for(max_steps), max_steps, t, r, phases)
    }

    pub fn with_ring_size(
        n: usize,
        max_steps: usize,
        t: Complex64,
        r: Complex64,
        phases: PhasePattern,
    ) -> Result<Self> {
        let alternating = matches!(phases, PhasePattern::EvenEdges(_) | PhasePattern::OddEdges(_));
        if n < 3 || (alternating && !n.is_multiple_of(2)) {
            return Err(WalkError::InvalidParameter(format!(
                "ring of {n} vertices cannot carry this phase pattern (alternating shifters need an even ring)"
            )));
        }
        let graph = Graph::cycle(n)?;
        let op = StepOperator::uniform_beam_splitters(&graph, t, r, &phases.ring_phases(n))?;
        Ok(LineWalk {
            graph,
            op,
            max_steps,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn operator(&self) -> &StepOperator {
        &self.op
    }

    pub fn ring_size(&self) -> usize {
        self.graph.vertex_count()
    }

    /// Largest step count for which the simulation equals the infinite line.
    pub fn max_steps(&self) -> usize {
        self.max_steps
    }

    pub fn vertex_of(&self, j: i64) -> usize {
        j.rem_euclid(self.ring_size() as i64) as usize
    }

    pub fn coordinate_of(&self, v: usize) -> i64 {
        let n = self.ring_size() as i64;
        let v = v as i64;
        if v >= n / 2 {
            v - n
        } else {
            v
        }
    }

    /// Basis state `|tail, head>` given in line coordinates.
    pub fn basis(&self, tail: i64, head: i64) -> Result<WalkState> {
        if (tail - head).abs() != 1 {
            return Err(WalkError::NotAnEdge(format!("|{tail},{head}>")));
        }
        WalkState::basis(
            &self.graph,
            DirectedEdge::new(self.vertex_of(tail), self.vertex_of(head)),
        )
    }

    /// `(j, p(j, j+1))` for every edge, sorted by the line coordinate `j`.
    pub fn edge_distribution(&self, s: &WalkState) -> Vec<(i64, f64)> {
        let mut out: Vec<(i64, f64)> = edge_probs(s.amplitudes())
            .into_iter()
            .enumerate()
            .map(|(e, p)| (self.coordinate_of(e), p))
            .collect();
        out.sort_by_key(|&(j, _)| j);
        out
    }

    /// `(j, p(vertex j))` sorted by `j`.
    pub fn vertex_distribution(&self, s: &WalkState) -> Vec<(i64, f64)> {
        let d = vertex_probabilities(&self.graph, s);
        let mut out: Vec<(i64, f64)> = d
            .probabilities
            .into_iter()
            .enumerate()
            .map(|(v, p)| (self.coordinate_of(v), p))
            .collect();
        out.sort_by_key(|&(j, _)| j);
        out
    }

    pub fn edge_probability(&self, s: &WalkState, j: i64) -> f64 {
        let e = self.vertex_of(j);
        s.amplitude(2 * e).norm_sqr() + s.amplitude(2 * e + 1).norm_sqr()
    }

    /// Total edge probability with `|j| > width`.
    pub fn probability_outside(&self, s: &WalkState, width: u64) -> f64 {
        self.edge_distribution(s)
            .into_iter()
            .filter(|&(j, _)| j.unsigned_abs() > width)
            .map(|(_, p)| p)
            .collect::<CompensatedSum>()
            .value()
    }

    /// Smallest `w` such that edges with `|j| <= w` hold at least `mass`.
    pub fn support_width(&self, s: &WalkState, mass: f64) -> u64 {
        let mut by_width: BTreeMap<u64, f64> = BTreeMap::new();
        for (j, p) in self.edge_distribution(s) {
            *by_width.entry(j.unsigned_abs()).or_insert(0.0) += p;
        }
        let mut acc = CompensatedSum::new();
        for (w, p) in &by_width {
            acc.add(*p);
            if acc.value() >= mass {
                return *w;
            }
        }
        by_width.keys().next_back().copied().unwrap_or(0)
    }
}
