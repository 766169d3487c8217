use std::f64::consts::{FRAC_1_SQRT_2, PI};

use edgewalk_core::coined::{
    coined_step, coined_to_edge, edge_to_coined, intertwining_deviation, verify_intertwining, CoinOperator,
    CoinedState, COIN_L, COIN_R,
};
use edgewalk_core::walk::{vertex_probabilities, LineWalk, PhasePattern};
use edgewalk_core::{Complex64, Graph, StepOperator, WalkState};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn h() -> Complex64 {
    Complex64::new(FRAC_1_SQRT_2, 0.0)
}

#[test]
fn hadamard_coin_first_step() {
    let g = CoinOperator::from_amplitudes(h(), h()).unwrap();
    let s = coined_step(&CoinedState::basis(10, 0, COIN_R), &g, 10).unwrap();
    assert!((s.amplitude(1, COIN_R) - h()).norm() < 1e-15);
    assert!((s.amplitude(9, COIN_L) - h()).norm() < 1e-15);
}

#[test]
fn intertwining_examples() {
    assert!(verify_intertwining(32, h(), h()).unwrap() < 1e-12);
    let t = Complex64::from_polar(0.6, PI / 5.0);
    let r = Complex64::new(0.0, 0.8);
    assert!(verify_intertwining(16, t, r).unwrap() < 1e-12);
    let swapped = CoinOperator::from_amplitudes(t, r).unwrap().swapped_columns();
    assert!(intertwining_deviation(16, t, r, &swapped).unwrap() > 0.5);
}

#[test]
fn intertwiner_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let g = Graph::cycle(11).unwrap();
    let s = WalkState::random(&g, &mut rng);
    let back = coined_to_edge(&g, &edge_to_coined(&g, &s).unwrap()).unwrap();
    for (a, b) in s.amplitudes().iter().zip(back.amplitudes()) {
        assert_eq!(a, b);
    }
}

#[test]
fn vertex_probabilities_agree_at_every_step() {
    let n = 40;
    let t = Complex64::from_polar(0.8, 0.4);
    let r = Complex64::from_polar(0.6, -1.2);
    let g = Graph::cycle(n).unwrap();
    let op = StepOperator::uniform_beam_splitters(&g, t, r, &[]).unwrap();
    let coin = CoinOperator::from_amplitudes(t, r).unwrap();
    let mut edge = WalkState::basis(&g, edgewalk_core::DirectedEdge::new(0, 1)).unwrap();
    let mut coined = edge_to_coined(&g, &edge).unwrap();
    for _ in 0..60 {
        let a = vertex_probabilities(&g, &edge).probabilities;
        let b = coined.vertex_probabilities();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-13);
        }
        edge = op.apply(&edge).unwrap();
        coined = coined_step(&coined, &coin, n).unwrap();
    }
}

#[test]
fn edge_and_coined_distributions_differ_in_detail() {
    let tau = 50;
    let lw = LineWalk::new(tau, h(), h(), PhasePattern::None).unwrap();
    let s = lw.operator().evolve(&lw.basis(0, 1).unwrap(), tau).unwrap();
    let coined = edge_to_coined(lw.graph(), &s).unwrap().vertex_probabilities();
    let edges = lw.edge_distribution(&s);
    let mut max_diff: f64 = 0.0;
    for (j, p) in &edges {
        max_diff = max_diff.max((p - coined[lw.vertex_of(*j)]).abs());
    }
    assert!(max_diff > 1e-3);
    let outside = |f: &dyn Fn(i64) -> f64| (-(tau as i64)..=tau as i64).filter(|j| j.abs() > 41).map(f).sum::<f64>();
    assert!(outside(&|j| lw.edge_probability(&s, j)) < 1e-4);
    assert!(outside(&|j| coined[lw.vertex_of(j)]) < 1e-4);
}

#[test]
fn intertwiner_rejects_other_graphs() {
    let g = Graph::path(5).unwrap();
    assert!(edge_to_coined(&g, &WalkState::uniform(&g)).is_err());
}
