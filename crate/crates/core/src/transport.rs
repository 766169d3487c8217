//! Probability current and scattering on one-dimensional chains of beam
//! splitters.
//!
//! At a degree-two vertex `k` with inbound amplitudes `x = c_{k+1,k}` (from
//! the right) and `y = c_{k-1,k}` (from the left) the current is the
//! Hermitian form
//!
//! ```text
//! J_k = (x*, y*) [[ |t|^2,             t r e^{i phi}  ],
//!                 [ t* r* e^{-i phi},  -|t|^2         ]] (x, y)^T
//! ```
//!
//! and one step of the walk changes the probability of edge `(k, k+1)` by
//! exactly `J_{k+1} - J_k`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Result, WalkError};
use crate::graph::{DirectedEdge, Graph, LocalUnitary, PortPhase, VertexId};
use crate::walk::{StepOperator, WalkState};
use crate::UNITARITY_TOL;

/// Beam splitter `(t, r)` with a phase shifter `phi` just left of it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexScatterer {
    pub t: Complex64,
    pub r: Complex64,
    pub phi: f64,
}

impl VertexScatterer {
    pub fn new(t: Complex64, r: Complex64, phi: f64) -> Result<Self> {
        let norm = t.norm_sqr() + r.norm_sqr();
        if (norm - 1.0).abs() > UNITARITY_TOL {
            return Err(WalkError::NotUnitary(format!(
                "|t|^2 + |r|^2 = {norm} (expected 1)"
            )));
        }
        if !phi.is_finite() {
            return Err(WalkError::InvalidParameter("phi is not finite".into()));
        }
        Ok(VertexScatterer { t, r, phi })
    }

    pub fn free() -> Self {
        VertexScatterer {
            t: Complex64::new(1.0, 0.0),
            r: Complex64::new(0.0, 0.0),
            phi: 0.0,
        }
    }

    fn current_form(&self, x: Complex64, y: Complex64) -> Complex64 {
        let t2 = self.t.norm_sqr();
        let off = self.t * self.r * Complex64::from_polar(1.0, self.phi);
        x.conj() * (t2 * x + off * y) + y.conj() * (off.conj() * x - t2 * y)
    }
}

/// Ring whose vertex `k` is the beam splitter of `scatterers[k]`, with its
/// shifter on port 0 (the edge towards `k-1`).
pub fn scatterer_ring(scatterers: &[VertexScatterer]) -> Result<(Graph, StepOperator)> {
    let graph = Graph::cycle(scatterers.len())?;
    let mut unitaries = BTreeMap::new();
    let mut phases = Vec::new();
    for (k, sc) in scatterers.iter().enumerate() {
        unitaries.insert(VertexId(k), LocalUnitary::beam_splitter(sc.t, sc.r)?);
        if sc.phi != 0.0 {
            phases.push(PortPhase::new(k, 0, sc.phi));
        }
    }
    let op = StepOperator::build(&graph, &unitaries, &phases)?;
    Ok((graph, op))
}

fn inbound(graph: &Graph, s: &WalkState, k: VertexId) -> Result<(Complex64, Complex64)> {
    let degree = graph.degree(k);
    if degree != 2 {
        return Err(WalkError::NotDegreeTwo { vertex: k.0, degree });
    }
    let left = graph.neighbor_at(k, 0).expect("degree two");
    let right = graph.neighbor_at(k, 1).expect("degree two");
    let x = s.amplitude(graph.index_of(DirectedEdge { tail: right, head: k })?);
    let y = s.amplitude(graph.index_of(DirectedEdge { tail: left, head: k })?);
    Ok((x, y))
}

/// The current form before taking its (vanishing) imaginary part.
pub fn probability_current_complex(
    graph: &Graph,
    s: &WalkState,
    k: VertexId,
    sc: &VertexScatterer,
) -> Result<Complex64> {
    let (x, y) = inbound(graph, s, k)?;
    Ok(sc.current_form(x, y))
}

pub fn probability_current(
    graph: &Graph,
    s: &WalkState,
    k: VertexId,
    sc: &VertexScatterer,
) -> Result<f64> {
    Ok(probability_current_complex(graph, s, k, sc)?.re)
}

/// `max_k |Delta P_{k,k+1} - (J_{k+1} - J_k)|` for one step of `op` on a
/// standard ring whose vertex `k` is described by `scatterers[k]`.
pub fn continuity_check(
    graph: &Graph,
    op: &StepOperator,
    s: &WalkState,
    scatterers: &[VertexScatterer],
) -> Result<f64> {
    if !graph.is_standard_ring() {
        return Err(WalkError::NotARing(
            "continuity check runs on Graph::cycle layouts".into(),
        ));
    }
    let n = graph.vertex_count();
    if scatterers.len() != n {
        return Err(WalkError::InvalidParameter(format!(
            "{} scatterers for {n} vertices",
            scatterers.len()
        )));
    }
    let next = op.apply(s)?;
    let currents = (0..n)
        .map(|k| probability_current(graph, s, VertexId(k), &scatterers[k]))
        .collect::<Result<Vec<_>>>()?;
    let edge_p = |w: &WalkState, e: usize| w.amplitude(2 * e).norm_sqr() + w.amplitude(2 * e + 1).norm_sqr();
    Ok((0..n)
        .map(|k| {
            let dp = edge_p(&next, k) - edge_p(s, k);
            (dp - (currents[(k + 1) % n] - currents[k])).abs()
        })
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringResult {
    pub theta: f64,
    /// Reflected amplitude `c_{0,-1}` for unit incoming amplitude `c_{-1,0}`.
    pub rho: Complex64,
    /// Transmitted amplitude `c_{N,N+1}` leaving the last barrier vertex.
    pub tau_amp: Complex64,
    pub reflectance: f64,
    pub transmittance: f64,
}

impl ScatteringResult {
    fn new(theta: f64, rho: Complex64, tau_amp: Complex64) -> Self {
        ScatteringResult {
            theta,
            rho,
            tau_amp,
            reflectance: rho.norm_sqr(),
            transmittance: tau_amp.norm_sqr(),
        }
    }

    /// `|R + T - 1|`.
    pub fn flux_defect(&self) -> f64 {
        (self.reflectance + self.transmittance - 1.0).abs()
    }
}

type Mat2 = [[Complex64; 2]; 2];

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

/// Maps `(c_{k-1,k}, c_{k,k-1})` on the edge left of vertex `k` to
/// `(c_{k,k+1}, c_{k+1,k})` on the edge to its right, for an eigenstate with
/// eigenvalue `lambda`. Requires `t != 0`.
fn vertex_transfer(sc: &VertexScatterer, lambda: Complex64) -> Mat2 {
    let tc = sc.t.conj();
    let e = Complex64::from_polar(1.0, sc.phi);
    [
        [e / (lambda * tc), -sc.r.conj() * e.conj() / tc],
        [-sc.r * e / tc, lambda * e.conj() / tc],
    ]
}

/// Product of transfer matrices over `barrier`, rescaled to unit max entry
/// after every vertex; returns the rescaled matrix and `ln` of the scale.
fn chain_transfer(barrier: &[VertexScatterer], lambda: Complex64) -> (Mat2, f64) {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut m: Mat2 = [[one, zero], [zero, one]];
    let mut log_scale = 0.0;
    for sc in barrier {
        m = mat_mul(&vertex_transfer(sc, lambda), &m);
        let biggest = m.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
        if biggest > 0.0 {
            for z in m.iter_mut().flatten() {
                *z /= biggest;
            }
            log_scale += biggest.ln();
        }
    }
    (m, log_scale)
}

fn check_barrier(barrier: &[VertexScatterer]) -> Result<()> {
    if barrier.is_empty() {
        return Err(WalkError::InvalidParameter("empty barrier".into()));
    }
    for (k, sc) in barrier.iter().enumerate() {
        let norm = sc.t.norm_sqr() + sc.r.norm_sqr();
        if (norm - 1.0).abs() > UNITARITY_TOL || !sc.phi.is_finite() {
            return Err(WalkError::NotUnitary(format!("barrier vertex {k}: |t|^2 + |r|^2 = {norm}")));
        }
    }
    Ok(())
}

/// Reflection and transmission of the barrier embedded in free leads, for
/// the eigenstate with eigenvalue `e^{-i theta}` and unit amplitude incoming
/// from the left. A vertex with `t = 0` is an opaque mirror: everything left
/// of it is solved by transfer matrices and `T = 0`.
pub fn scattering_coefficients(barrier: &[VertexScatterer], theta: f64) -> Result<ScatteringResult> {
    check_barrier(barrier)?;
    if !theta.is_finite() {
        return Err(WalkError::InvalidParameter("theta is not finite".into()));
    }
    let lambda = Complex64::from_polar(1.0, -theta);
    let zero = Complex64::new(0.0, 0.0);

    if let Some(mirror) = barrier.iter().position(|sc| sc.t.norm() == 0.0) {
        let (m, _) = chain_transfer(&barrier[..mirror], lambda);
        let sc = &barrier[mirror];
        // lambda c_{k,k-1} = e^{2i phi} r c_{k-1,k} at the mirror vertex k
        let g = Complex64::from_polar(1.0, 2.0 * sc.phi) * sc.r / lambda;
        let rho = (g * m[0][0] - m[1][0]) / (m[1][1] - g * m[0][1]);
        return Ok(ScatteringResult::new(theta, rho, zero));
    }

    let (m, log_scale) = chain_transfer(barrier, lambda);
    // No wave enters from the right: (M (1, rho))_1 = 0.
    let rho = -m[1][0] / m[1][1];
    // tau = det(M)/M_22 with det of the vertex transfer equal to t/t*.
    let det: Complex64 = barrier.iter().map(|sc| sc.t / sc.t.conj()).product();
    let tau_amp = det / m[1][1] * (-log_scale).exp();
    Ok(ScatteringResult::new(theta, rho, tau_amp))
}

/// `(c_{j,j+1}, c_{j+1,j})` on edges `j = -1..=N` (barrier vertices `0..=N`)
/// for the scattering eigenstate, propagated without rescaling. Intended for
/// checking short barriers.
pub fn scattering_edge_amplitudes(
    barrier: &[VertexScatterer],
    theta: f64,
) -> Result<Vec<(Complex64, Complex64)>> {
    let res = scattering_coefficients(barrier, theta)?;
    let lambda = Complex64::from_polar(1.0, -theta);
    let mut cur = (Complex64::new(1.0, 0.0), res.rho);
    let mut out = vec![cur];
    for sc in barrier {
        if sc.t.norm() == 0.0 {
            break;
        }
        let m = vertex_transfer(sc, lambda);
        cur = (
            m[0][0] * cur.0 + m[0][1] * cur.1,
            m[1][0] * cur.0 + m[1][1] * cur.1,
        );
        out.push(cur);
    }
    Ok(out)
}

/// `n_points` values of theta evenly spaced in `[start, end)`.
pub fn theta_grid(start: f64, end: f64, n_points: usize) -> Vec<f64> {
    (0..n_points)
        .map(|i| start + (end - start) * i as f64 / n_points as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn free_vertex_current_is_flux_difference() {
        let g = Graph::cycle(5).unwrap();
        let s = WalkState::random(&g, &mut rand::rng());
        let k = VertexId(2);
        let j = probability_current(&g, &s, k, &VertexScatterer::free()).unwrap();
        let x = s.amplitude(g.index_of(DirectedEdge::new(3, 2)).unwrap());
        let y = s.amplitude(g.index_of(DirectedEdge::new(1, 2)).unwrap());
        assert!((j - (x.norm_sqr() - y.norm_sqr())).abs() < 1e-15);
    }

    #[test]
    fn current_vanishes_without_inbound_amplitude() {
        let g = Graph::cycle(6).unwrap();
        let s = WalkState::basis(&g, DirectedEdge::new(0, 1)).unwrap();
        let sc = VertexScatterer::new(c(0.6, 0.0), c(0.0, 0.8), 0.3).unwrap();
        for k in [0, 2, 3, 4, 5] {
            assert_eq!(probability_current(&g, &s, VertexId(k), &sc).unwrap(), 0.0);
        }
    }

    #[test]
    fn current_needs_degree_two() {
        let g = Graph::build(&[(0, 1), (0, 2), (0, 3)]).unwrap();
        let s = WalkState::uniform(&g);
        assert!(matches!(
            probability_current(&g, &s, VertexId(0), &VertexScatterer::free()),
            Err(WalkError::NotDegreeTwo { vertex: 0, degree: 3 })
        ));
    }

    #[test]
    fn single_vertex_scattering() {
        let sc = VertexScatterer::new(Complex64::from_polar(0.6, 0.2), Complex64::from_polar(0.8, -1.0), 0.0)
            .unwrap();
        for theta in theta_grid(0.0, 2.0 * PI, 16) {
            let res = scattering_coefficients(&[sc], theta).unwrap();
            assert!((res.reflectance - 0.64).abs() < 1e-14);
            assert!((res.transmittance - 0.36).abs() < 1e-14);
        }
        let free = scattering_coefficients(&[VertexScatterer::free()], 0.4).unwrap();
        assert!(free.reflectance < 1e-30);
        assert!((free.transmittance - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mirror_reflects_everything() {
        let bs = VertexScatterer::new(c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0), 0.1).unwrap();
        let mirror = VertexScatterer::new(c(0.0, 0.0), c(0.0, 1.0), 0.0).unwrap();
        let res = scattering_coefficients(&[bs, mirror, bs], 1.3).unwrap();
        assert_eq!(res.transmittance, 0.0);
        assert!((res.reflectance - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_barrier_rejected() {
        assert!(scattering_coefficients(&[], 0.0).is_err());
    }

    #[test]
    fn long_chain_stays_finite() {
        let sc = VertexScatterer::new(c(0.3, 0.0), c(0.0, (1.0f64 - 0.09).sqrt()), 0.0).unwrap();
        let barrier = vec![sc; 5000];
        let res = scattering_coefficients(&barrier, 0.05).unwrap();
        assert!(res.rho.is_finite() && res.tau_amp.is_finite());
        assert!(res.flux_defect() < 1e-10);
    }
}
