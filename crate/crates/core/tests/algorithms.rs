use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use quect::algorithms::*;
use quect::gates::qft;
use quect::oracle;
use quect::ClassicalFunction;

fn unary(t: usize) -> ClassicalFunction {
    ClassicalFunction::from_table(1, 1, vec![t & 1, t >> 1]).unwrap()
}

/// Every balanced table on `m` bits, in lexicographic order.
fn balanced_tables(m: usize) -> Vec<Vec<usize>> {
    let size = 1usize << m;
    (0u32..1 << size)
        .filter(|mask| mask.count_ones() as usize == size / 2)
        .map(|mask| (0..size).map(|x| (mask >> x & 1) as usize).collect())
        .collect()
}

#[test]
fn deutsch_constant_functions() {
    for t in [0b00, 0b11] {
        let r = deutsch(&unary(t), 3).unwrap();
        assert!(!r.one_to_one);
        assert!((r.distribution[0] - 1.0).abs() < 1e-10);
    }
    assert!(deutsch(&unary(0b10), 3).unwrap().one_to_one);
}

#[test]
fn deutsch_jozsa_exhaustive_small() {
    for m in 1..=3 {
        for value in [false, true] {
            let r = deutsch_jozsa(&constant_function(m, value).unwrap(), 0).unwrap();
            assert_eq!(r.verdict, DjVerdict::Constant);
            assert!((r.p_zero - 1.0).abs() < 1e-10);
        }
        for table in balanced_tables(m) {
            let f = ClassicalFunction::from_table(m, 1, table).unwrap();
            let r = deutsch_jozsa(&f, 0).unwrap();
            assert_eq!(r.verdict, DjVerdict::Balanced, "{:?}", f.table());
            assert!(r.p_zero.abs() < 1e-10);
        }
    }
}

#[test]
fn deutsch_jozsa_one_bit_agrees_with_deutsch() {
    for t in 0..4 {
        let dj = deutsch_jozsa(&unary(t), 1).unwrap();
        let d = deutsch(&unary(t), 1).unwrap();
        assert_eq!(dj.verdict == DjVerdict::Balanced, d.one_to_one);
    }
}

#[test]
fn deutsch_jozsa_constant_one_on_three_bits() {
    let r = deutsch_jozsa(&constant_function(3, true).unwrap(), 0).unwrap();
    assert_eq!((r.verdict, r.outcome), (DjVerdict::Constant, 0));
}

#[test]
fn simon_promise_exhaustive_up_to_four_bits() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for n in 2..=4 {
        for b in 1..1usize << n {
            let f = random_simon_function(n, b, &mut rng).unwrap();
            let r = simon(&f, b as u64).unwrap();
            assert_eq!(r.period, b);
            assert!((0..1 << n).all(|x| f.eval(x ^ r.period) == f.eval(x)));
        }
    }
}

#[test]
fn simon_samples_are_orthogonal_to_the_period() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let b = 0b101;
    let f = random_simon_function(3, b, &mut rng).unwrap();
    let mut total = 0;
    for seed in 0..250 {
        let r = simon(&f, seed).unwrap();
        total += r.samples.len();
        assert!(r.samples.iter().all(|&y| gf2_dot(y as u64, b as u64) == 0));
    }
    assert!(total >= 500);
}

#[test]
fn simon_one_bit() {
    let f = ClassicalFunction::from_table(1, 1, vec![0, 0]).unwrap();
    assert_eq!(simon(&f, 0).unwrap().period, 1);
}

#[test]
fn simon_cap_is_a_convergence_error() {
    let f = random_simon_function(4, 0b0110, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    assert!(matches!(simon_with_cap(&f, 0, 1), Err(quect::Error::Convergence(_))));
}

#[test]
fn grover_matches_closed_form() {
    for n in 1..=6 {
        let target = (5 * n + 1) % (1 << n);
        let f = grover_oracle(n, target).unwrap();
        for t in 0..=grover_iterations(n) + 2 {
            let r = grover_with_iterations(&f, t, 0).unwrap();
            let expect = oracle::grover_closed_form(n, t);
            assert!((r.success_probability - expect).abs() < 1e-9, "n = {n}, t = {t}");
            assert!((r.distribution[target] - expect).abs() < 1e-9);
        }
    }
}

#[test]
fn grover_six_bits_finds_seven() {
    let r = grover(&grover_oracle(6, 7).unwrap(), 1).unwrap();
    assert_eq!(r.iterations, 6);
    assert!(r.success_probability > 0.9);
    assert_eq!(r.found, 7);
}

#[test]
fn grover_finds_target_at_three_bits() {
    let mut hits = 0;
    for seed in 0..50 {
        hits += (grover(&grover_oracle(3, 5).unwrap(), seed).unwrap().found == 5) as usize;
    }
    assert!(hits >= 40);
}

#[test]
fn qft_program_against_dft_and_gate() {
    for n in 1..=8 {
        let u = build_qft_program(n).unwrap().composite_unitary().unwrap();
        let dft = oracle::dft_matrix(n);
        assert!(oracle::max_abs_diff(&u.rows(), &dft) < 1e-9, "n = {n}");
        if n <= 4 {
            assert!(u.approx_eq(&qft(n).unwrap(), 1e-9));
        }
    }
}

#[test]
fn qft_program_on_one_qubit_is_hadamard() {
    let p = build_qft_program(1).unwrap();
    assert_eq!(p.steps.len(), 1);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!((p.composite_unitary().unwrap().entry(1, 1).re + h).abs() < 1e-15);
}
