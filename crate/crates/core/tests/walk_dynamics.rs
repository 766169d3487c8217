use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use edgewalk_core::walk::{
    edge_probabilities, time_averaged_distribution, vertex_probabilities, LineWalk, PhasePattern,
};
use edgewalk_core::{Complex64, DirectedEdge, Graph, LocalUnitary, PortPhase, StepOperator, VertexId, WalkState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn h() -> Complex64 {
    Complex64::new(FRAC_1_SQRT_2, 0.0)
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

#[test]
fn free_ring_is_a_rotation() {
    let g = Graph::cycle(4).unwrap();
    let op = StepOperator::uniform_beam_splitters(&g, one(), zero(), &[]).unwrap();
    for j in 0..4 {
        let s = WalkState::basis(&g, DirectedEdge::new(j, (j + 1) % 4)).unwrap();
        let next = op.apply(&s).unwrap();
        let want = g.index_of(DirectedEdge::new((j + 1) % 4, (j + 2) % 4)).unwrap();
        assert_eq!(next.amplitude(want), one());
    }
}

#[test]
fn hadamard_columns_have_two_entries() {
    let g = Graph::cycle(4).unwrap();
    let op = StepOperator::uniform_beam_splitters(&g, h(), h(), &[]).unwrap();
    for src in 0..op.dim() {
        let col: Vec<_> = op.column(src).collect();
        assert_eq!(col.len(), 2);
        for (_, a) in col {
            assert!((a.norm() - FRAC_1_SQRT_2).abs() < 1e-15);
        }
    }
}

#[test]
fn two_step_distributions() {
    let g = Graph::cycle(8).unwrap();
    let op = StepOperator::uniform_beam_splitters(&g, h(), h(), &[]).unwrap();
    let s = op.evolve(&WalkState::basis(&g, DirectedEdge::new(0, 1)).unwrap(), 2).unwrap();

    let edges = edge_probabilities(&g, &s);
    let nonzero: Vec<_> = edges.probabilities.iter().filter(|&&p| p > 1e-15).collect();
    assert_eq!(nonzero.len(), 4);
    assert!(nonzero.iter().all(|&&p| (p - 0.25).abs() < 1e-15));

    // Grouped by the vertex each state points into: |2,1> and |0,1> share vertex 1.
    let vertices = vertex_probabilities(&g, &s);
    assert!((vertices.probabilities[1] - 0.5).abs() < 1e-15);
    assert!((vertices.probabilities[3] - 0.25).abs() < 1e-15);
    assert!((vertices.probabilities[7] - 0.25).abs() < 1e-15);
    assert!((vertices.total() - 1.0).abs() < 1e-15);
}

#[test]
fn evolve_zero_steps_is_identity() {
    let g = Graph::cycle(6).unwrap();
    let op = StepOperator::uniform_beam_splitters(&g, h(), h(), &[]).unwrap();
    let s = WalkState::uniform(&g);
    assert_eq!(op.evolve(&s, 0).unwrap(), s);
}

#[test]
fn fifty_steps_stay_inside_thirty_five() {
    let lw = LineWalk::new(50, h(), h(), PhasePattern::None).unwrap();
    assert!(lw.ring_size() >= 104);
    let s = lw.operator().evolve(&lw.basis(0, 1).unwrap(), 50).unwrap();
    // The front sits at |t| tau ~ 35.4; the peaks straddle it and the tail decays fast.
    assert!(lw.probability_outside(&s, 35) < 0.1);
    assert!(lw.support_width(&s, 0.99) <= 38);
    assert!(lw.probability_outside(&s, 45) < 1e-8);
    // Twin outer peaks: the largest edge probabilities lie near the front on both sides.
    let d = lw.edge_distribution(&s);
    let argmax = |range: std::ops::RangeInclusive<i64>| {
        d.iter()
            .filter(|(j, _)| range.contains(j))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
            .0
    };
    assert!(argmax(0..=60) > 25);
    assert!(argmax(-60..=0) < -25);
}

#[test]
fn line_embedding_does_not_depend_on_ring_size() {
    let tau = 40;
    let t = Complex64::from_polar(0.6, 0.3);
    let r = Complex64::from_polar(0.8, -1.1);
    let run = |n: usize| {
        let lw = LineWalk::with_ring_size(n, tau, t, r, PhasePattern::EvenEdges(0.7)).unwrap();
        let s = lw.operator().evolve(&lw.basis(0, 1).unwrap(), tau).unwrap();
        lw.edge_distribution(&s)
            .into_iter()
            .filter(|(_, p)| *p > 0.0)
            .collect::<BTreeMap<_, _>>()
    };
    let small = run(LineWalk::ring_size_for(tau));
    let large = run(LineWalk::ring_size_for(tau) + 40);
    for j in -(tau as i64) - 2..=tau as i64 + 2 {
        let a = small.get(&j).copied().unwrap_or(0.0);
        let b = large.get(&j).copied().unwrap_or(0.0);
        assert!((a - b).abs() < 1e-14, "edge {j}: {a} vs {b}");
    }
}

#[test]
fn support_grows_one_edge_per_side_per_step() {
    let lw = LineWalk::new(30, h(), h(), PhasePattern::None).unwrap();
    let mut s = lw.basis(0, 1).unwrap();
    for tau in 1..=30i64 {
        s = lw.operator().apply(&s).unwrap();
        for (j, p) in lw.edge_distribution(&s) {
            if j > tau || j < -tau {
                assert_eq!(p, 0.0, "edge {j} reached after {tau} steps");
            }
        }
    }
}

#[test]
fn locality_of_random_operator() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = Graph::build(&[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2), (0, 4)]).unwrap();
    let unitaries: BTreeMap<_, _> = (0..g.vertex_count())
        .map(|v| (VertexId(v), LocalUnitary::haar_random(g.degree(VertexId(v)), &mut rng)))
        .collect();
    let op = StepOperator::build(&g, &unitaries, &[PortPhase::new(2, 3, 0.4)]).unwrap();
    assert!(op.unitarity_defect() < 1e-12);
    for src in 0..op.dim() {
        let head = g.state_of(src).head;
        for (dst, _) in op.column(src) {
            assert_eq!(g.state_of(dst).tail, head);
        }
    }
}

#[test]
fn eigenstates_have_stationary_edge_distribution() {
    let g = Graph::cycle(10).unwrap();
    let t = Complex64::from_polar(0.5, 1.0);
    let r = Complex64::from_polar(0.75f64.sqrt(), 0.2);
    let op = StepOperator::uniform_beam_splitters(&g, t, r, &[]).unwrap();
    for e in edgewalk_core::spectral::cycle_eigensystem(10, t, r).unwrap() {
        let psi = e.state();
        let d = edge_probabilities(&g, &psi);
        assert!(d.max_abs_diff(&edge_probabilities(&g, &op.apply(&psi).unwrap())) < 1e-10);
        assert!(d.probabilities.iter().all(|p| (p - 0.1).abs() < 1e-10));
    }
}

#[test]
fn free_time_average_is_exactly_uniform_over_one_period() {
    let n = 12;
    let g = Graph::cycle(n).unwrap();
    let op = StepOperator::uniform_beam_splitters(&g, one(), zero(), &[]).unwrap();
    let s = WalkState::basis(&g, DirectedEdge::new(0, 1)).unwrap();
    let d = time_averaged_distribution(&g, &op, &s, n).unwrap();
    for p in &d.probabilities {
        assert!((p - 1.0 / n as f64).abs() < 1e-15);
    }
    assert!(time_averaged_distribution(&g, &op, &s, 0).is_err());
}

#[test]
fn edge_and_vertex_distributions_share_envelope() {
    let tau = 50;
    let lw = LineWalk::new(tau, h(), h(), PhasePattern::None).unwrap();
    let s = lw.operator().evolve(&lw.basis(0, 1).unwrap(), tau).unwrap();
    let edges = lw.edge_distribution(&s);
    let vertices = lw.vertex_distribution(&s);
    let mass_within = |d: &[(i64, f64)], w: i64| d.iter().filter(|(j, _)| j.abs() <= w).map(|(_, p)| p).sum::<f64>();
    assert!(mass_within(&edges, 40) > 0.999);
    assert!(mass_within(&vertices, 41) > 0.999);
    let pointwise = edges
        .iter()
        .zip(&vertices)
        .map(|((_, a), (_, b))| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(pointwise > 1e-3);
}

#[test]
fn random_states_keep_their_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = Graph::cycle(20).unwrap();
    let unitaries: BTreeMap<_, _> = (0..20)
        .map(|v| (VertexId(v), LocalUnitary::haar_random(2, &mut rng)))
        .collect();
    let phases = vec![PortPhase::new(3, 0, rng.random_range(-PI..PI))];
    let op = StepOperator::build(&g, &unitaries, &phases).unwrap();
    for _ in 0..50 {
        let s = WalkState::random(&g, &mut rng);
        assert!((op.apply(&s).unwrap().norm() - 1.0).abs() < 1e-12);
    }
}
