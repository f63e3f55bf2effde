use num_complex::Complex64;
use qrobot::lab::{sweep, Variant};
use qrobot::state::Budget;
use qrobot::{Coords, SparseState, TaskConfig, TaskMachine};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_superposition(m: &TaskMachine, rng: &mut ChaCha8Rng, terms: usize) -> SparseState {
    let s = SparseState::from_terms((0..terms).map(|_| {
        (m.random_label(rng), Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }));
    let norm = s.norm();
    s.scaled(Complex64::new(1.0 / norm, 0.0))
}

#[test]
fn step_preserves_inner_products() {
    let m = TaskMachine::build(TaskConfig::new(2, 4, Coords::from_slice(&[2, 3])).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let a = random_superposition(&m, &mut rng, 6);
        let b = random_superposition(&m, &mut rng, 6);
        let (ga, gb) = (m.step(&a).unwrap(), m.step(&b).unwrap());
        assert!((ga.norm() - 1.0).abs() < 1e-12);
        assert!((ga.inner(&gb) - a.inner(&b)).norm() < 1e-12);
    }
}

#[test]
fn cost_ordering() {
    let rows = sweep(&Variant::ALL, &[2], &[2, 4, 8], Budget::unlimited()).unwrap();
    let steps = |v: Variant, n: u32| rows.iter().find(|r| r.variant == v && r.n == n).unwrap().steps_total;
    for n in [2, 4, 8] {
        let coherent = steps(Variant::CoherentSearch, n);
        assert!(coherent <= steps(Variant::GroverAfterReturn, n));
        assert!(coherent <= steps(Variant::Classical, n));
    }
    for v in Variant::ALL {
        assert!(steps(v, 2) < steps(v, 4) && steps(v, 4) < steps(v, 8));
    }
    for r in &rows {
        assert_eq!(r.computation_steps + r.action_steps, r.steps_total);
        assert!(r.max_entropy_bits.is_nan() || r.max_entropy_bits <= r.d as f64 * (r.n as f64).log2() + 1e-9);
    }
}

#[test]
fn d3_grover_beats_sweep() {
    let rows = sweep(&[Variant::GroverAfterReturn, Variant::Classical], &[3], &[4, 8], Budget::unlimited()).unwrap();
    let steps = |v: Variant, n: u32| rows.iter().find(|r| r.variant == v && r.n == n).unwrap().steps_total as f64;
    let ratio = |n| steps(Variant::GroverAfterReturn, n) / steps(Variant::Classical, n);
    assert!(ratio(8) < 1.0);
    assert!(ratio(8) < ratio(4));
}
