//! Two-state coined walk on the ring and its equivalence with the edge walk.
//!
//! Coin basis order is `(R, L)`; a coined state stores `|j> (x) |c>` at index
//! `2j + c`. The intertwiner `E` sends the edge state `|j-1, j>` to
//! `|j> (x) |R>` and `|j+1, j>` to `|j> (x) |L>`, and satisfies `V E = E U`
//! for the coin `G|R> = t|R> + r|L>`, `G|L> = -r*|R> + t*|L>`.

use num_complex::Complex64;

use crate::error::{Result, WalkError};
use crate::graph::{DirectedEdge, Graph};
use crate::walk::{StepOperator, WalkState};
use crate::UNITARITY_TOL;

pub const COIN_R: usize = 0;
pub const COIN_L: usize = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct CoinedState {
    amplitudes: Vec<Complex64>,
}

impl CoinedState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if !amplitudes.len().is_multiple_of(2) {
            return Err(WalkError::InvalidParameter(
                "coined state needs two amplitudes per vertex".into(),
            ));
        }
        let s = CoinedState { amplitudes };
        if (s.norm() - 1.0).abs() > UNITARITY_TOL {
            return Err(WalkError::InvalidParameter(format!(
                "coined state norm is {}, expected 1",
                s.norm()
            )));
        }
        Ok(s)
    }

    /// `|j> (x) |coin>` on a ring of `n` vertices.
    pub fn basis(n: usize, j: usize, coin: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 2 * n];
        amplitudes[2 * (j % n) + coin] = Complex64::new(1.0, 0.0);
        CoinedState { amplitudes }
    }

    pub fn vertex_count(&self) -> usize {
        self.amplitudes.len() / 2
    }

    pub fn amplitude(&self, j: usize, coin: usize) -> Complex64 {
        self.amplitudes[2 * j + coin]
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Probability of each vertex, summed over the coin.
    pub fn vertex_probabilities(&self) -> Vec<f64> {
        self.amplitudes
            .chunks_exact(2)
            .map(|p| p[0].norm_sqr() + p[1].norm_sqr())
            .collect()
    }
}

/// Coin flip in the `(R, L)` basis; `matrix[out][inp]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinOperator {
    matrix: [[Complex64; 2]; 2],
}

impl CoinOperator {
    /// `G|R> = t|R> + r|L>`, `G|L> = -r*|R> + t*|L>`.
    pub fn from_amplitudes(t: Complex64, r: Complex64) -> Result<Self> {
        let norm = t.norm_sqr() + r.norm_sqr();
        if (norm - 1.0).abs() > UNITARITY_TOL {
            return Err(WalkError::NotUnitary(format!(
                "|t|^2 + |r|^2 = {norm} (expected 1)"
            )));
        }
        Ok(CoinOperator {
            matrix: [[t, -r.conj()], [r, t.conj()]],
        })
    }

    pub fn new(matrix: [[Complex64; 2]; 2]) -> Result<Self> {
        let g = CoinOperator { matrix };
        if g.unitarity_defect() > UNITARITY_TOL {
            return Err(WalkError::NotUnitary(format!(
                "coin defect {:.3e}",
                g.unitarity_defect()
            )));
        }
        Ok(g)
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        self.matrix
    }

    /// Coin with its two columns exchanged (still unitary, but no longer
    /// intertwined with the edge walk).
    pub fn swapped_columns(&self) -> Self {
        let m = self.matrix;
        CoinOperator {
            matrix: [[m[0][1], m[0][0]], [m[1][1], m[1][0]]],
        }
    }

    fn unitarity_defect(&self) -> f64 {
        let m = &self.matrix;
        let mut worst: f64 = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                let g = m[0][a].conj() * m[0][b] + m[1][a].conj() * m[1][b];
                worst = worst.max((g - if a == b { 1.0 } else { 0.0 }).norm());
            }
        }
        worst
    }
}

/// One coined step on a ring of `n` vertices: coin flip, then `R` moves to
/// `j+1` and `L` to `j-1`.
pub fn coined_step(s: &CoinedState, coin: &CoinOperator, n: usize) -> Result<CoinedState> {
    if s.vertex_count() != n {
        return Err(WalkError::StateLength {
            expected: 2 * n,
            got: s.amplitudes.len(),
        });
    }
    let g = coin.matrix;
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * n];
    for j in 0..n {
        let (ar, al) = (s.amplitude(j, COIN_R), s.amplitude(j, COIN_L));
        let fr = g[COIN_R][COIN_R] * ar + g[COIN_R][COIN_L] * al;
        let fl = g[COIN_L][COIN_R] * ar + g[COIN_L][COIN_L] * al;
        out[2 * ((j + 1) % n) + COIN_R] += fr;
        out[2 * ((j + n - 1) % n) + COIN_L] += fl;
    }
    Ok(CoinedState { amplitudes: out })
}

fn require_ring(graph: &Graph) -> Result<usize> {
    if graph.is_standard_ring() {
        Ok(graph.vertex_count())
    } else {
        Err(WalkError::NotARing(
            "expected the port/edge layout produced by Graph::cycle".into(),
        ))
    }
}

/// Coined-walk slot `(vertex, coin)` that the edge state maps to.
fn coined_slot(n: usize, s: DirectedEdge) -> usize {
    let head = s.head.0;
    let coin = if s.tail.0 == (head + n - 1) % n { COIN_R } else { COIN_L };
    2 * head + coin
}

/// Applies the intertwiner `E`.
pub fn edge_to_coined(graph: &Graph, s: &WalkState) -> Result<CoinedState> {
    let n = require_ring(graph)?;
    if s.len() != graph.state_count() {
        return Err(WalkError::StateLength {
            expected: graph.state_count(),
            got: s.len(),
        });
    }
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * n];
    for (i, &a) in s.amplitudes().iter().enumerate() {
        out[coined_slot(n, graph.state_of(i))] = a;
    }
    Ok(CoinedState { amplitudes: out })
}

/// Applies `E^{-1}`.
pub fn coined_to_edge(graph: &Graph, s: &CoinedState) -> Result<WalkState> {
    let n = require_ring(graph)?;
    if s.vertex_count() != n {
        return Err(WalkError::StateLength {
            expected: 2 * n,
            got: s.amplitudes.len(),
        });
    }
    let amplitudes = (0..graph.state_count())
        .map(|i| s.amplitudes[coined_slot(n, graph.state_of(i))])
        .collect();
    WalkState::new(amplitudes)
}

/// `max_e ||V E e - E U e||` over the `2N` edge basis states, with `U` the
/// uniform beam-splitter ring `(t, r)` and `V` the coined walk with `coin`.
pub fn intertwining_deviation(n: usize, t: Complex64, r: Complex64, coin: &CoinOperator) -> Result<f64> {
    let graph = Graph::cycle(n)?;
    let op = StepOperator::uniform_beam_splitters(&graph, t, r, &[])?;
    let mut worst: f64 = 0.0;
    for e in graph.states() {
        let basis = WalkState::basis(&graph, e)?;
        let lhs = coined_step(&edge_to_coined(&graph, &basis)?, coin, n)?;
        let rhs = edge_to_coined(&graph, &op.apply(&basis)?)?;
        let d = lhs
            .amplitudes
            .iter()
            .zip(&rhs.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(d);
    }
    Ok(worst)
}

/// [`intertwining_deviation`] with the coin matched to `(t, r)`.
pub fn verify_intertwining(n: usize, t: Complex64, r: Complex64) -> Result<f64> {
    intertwining_deviation(n, t, r, &CoinOperator::from_amplitudes(t, r)?)
}
