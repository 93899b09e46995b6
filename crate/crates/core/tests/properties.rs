use std::collections::BTreeMap;

use lgt_core::analysis::*;
use lgt_core::basis::{MixedRadix, RotatorBasis};
use lgt_core::builder::{build_pure_gauge, lowering_dense, BuildOptions, PowerScheme};
use lgt_core::coefficients::replacement_coefficients;
use lgt_core::eigen::{dense_eigh, lowest_k, Method, SolverConfig};
use lgt_core::matter::{build_matter_system, total_charge, MatterOptions};
use lgt_core::sparse::CsrMatrix;
use lgt_core::{CouplingParams, GroupParams, Representation};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn rep() -> impl Strategy<Value = Representation> {
    prop_oneof![Just(Representation::Electric), Just(Representation::Magnetic)]
}

fn scheme() -> impl Strategy<Value = PowerScheme> {
    prop_oneof![Just(PowerScheme::WindowProjected), Just(PowerScheme::BandTruncated)]
}

/// (l, L) with 1 <= l <= L.
fn group(max_l: usize, max_gap: usize) -> impl Strategy<Value = GroupParams> {
    (1..=max_l, 0..=max_gap).prop_map(|(l, gap)| GroupParams::new(l, l + gap).unwrap())
}

fn coupling() -> impl Strategy<Value = CouplingParams> {
    (-2.0f64..2.0).prop_map(|e| CouplingParams::pure_gauge(10f64.powf(e)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn mixed_radix_round_trip(radices in prop::collection::vec(1usize..6, 1..5), seed in any::<u64>()) {
        let m = MixedRadix::new(radices).unwrap();
        let i = (seed as usize) % m.dim();
        let d = m.digits(i);
        prop_assert!(d.iter().zip(m.radices()).all(|(x, r)| x < r));
        prop_assert_eq!(m.index(&d), i);
    }

    #[test]
    fn rotator_values_round_trip(l in 0usize..5, n in 1usize..4, seed in any::<u64>()) {
        let b = RotatorBasis::new(n, l).unwrap();
        let i = (seed as usize) % b.dim();
        let v = b.values(i);
        prop_assert!(v.iter().all(|r| r.unsigned_abs() as usize <= l));
        prop_assert_eq!(b.index_of(&v).unwrap(), i);
    }

    #[test]
    fn pure_gauge_builds_are_hermitian(r in rep(), g in group(3, 4), c in coupling(), s in scheme()) {
        let h = build_pure_gauge(r, g, &c, &BuildOptions { scheme: s, ..Default::default() }).unwrap();
        prop_assert!(h.total.hermiticity_defect() < 1e-12);
        prop_assert!(h.h_e.hermiticity_defect() < 1e-12);
        prop_assert!(h.h_b.is_diagonal() == (r == Representation::Magnetic));
    }

    #[test]
    fn electric_builds_ignore_the_group_resolution(l in 1usize..4, a in 0usize..6, b in 0usize..6, c in coupling()) {
        let o = BuildOptions::default();
        let x = build_pure_gauge(Representation::Electric, GroupParams::new(l, l + a).unwrap(), &c, &o).unwrap();
        let y = build_pure_gauge(Representation::Electric, GroupParams::new(l, l + b).unwrap(), &c, &o).unwrap();
        prop_assert_eq!(x.total, y.total);
    }

    #[test]
    fn ground_state_is_reflection_symmetric(r in rep(), g in group(2, 4), c in coupling()) {
        let s = solve_pure_gauge(r, g, &c, &Pipeline::default()).unwrap();
        let basis = RotatorBasis::plaquette(g.l).unwrap();
        let n = s.space.vectors.len() as f64;
        let p: Vec<f64> = (0..basis.dim()).map(|i| s.space.vectors.iter().map(|v| v[i] * v[i]).sum::<f64>() / n).collect();
        for i in 0..basis.dim() {
            let neg: Vec<i64> = basis.values(i).iter().map(|x| -x).collect();
            prop_assert!((p[i] - p[basis.index_of(&neg).unwrap()]).abs() < 1e-9);
        }
    }

    #[test]
    fn fidelities_are_bounded(l in 1usize..3, gap in 1usize..6, c in coupling()) {
        let pipe = Pipeline::default();
        let s = fourier_fidelity_scan(l, &c, &[l + gap], &pipe).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&s.best));
        for r in [Representation::Electric, Representation::Magnetic] {
            let inf = sequence_infidelity(r, l, l + gap, &c, &pipe).unwrap();
            prop_assert!((-1e-12..=1.0).contains(&inf));
        }
    }

    #[test]
    fn sequence_fidelity_of_a_state_with_itself_is_one(r in rep(), g in group(2, 3), c in coupling()) {
        let s = solve_pure_gauge(r, g, &c, &Pipeline::default()).unwrap();
        let up: Vec<Vec<f64>> = s.space.vectors.iter().map(|v| embed(v, g.l, g.l + 1, 3)).collect();
        prop_assert!((sequence_fidelity(&s.space.vectors, &up, g.l + 1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotator_lowering_commutator(l in 1usize..8, x in prop::collection::vec(-1.0f64..1.0, 17)) {
        // Truncated lowering: [R, P] = -P exactly on the window.
        let d = 2 * l + 1;
        let p = lowering_dense(l, false);
        let r = DMatrix::from_diagonal(&DVector::from_fn(d, |i, _| i as f64 - l as f64));
        let v = DVector::from_column_slice(&x[..d]);
        let lhs = (&r * &p - &p * &r) * &v;
        prop_assert!((lhs + &p * &v).amax() < 1e-12);
    }

    #[test]
    fn replacement_coefficients_reproduce_powers(big_l in 1usize..13) {
        let c = replacement_coefficients(big_l).unwrap();
        for r in -(big_l as i64)..=big_l as i64 {
            prop_assert!((c.linear(r) - r as f64).abs() <= 1e-9);
            prop_assert!((c.quadratic(r) - (r * r) as f64).abs() <= 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn matter_builds_conserve_charge(r in rep(), gap in 0usize..3, m in 0.0f64..5.0, kappa in 0.0f64..5.0, g2 in 0.1f64..5.0) {
        let c = CouplingParams::new(g2, 1.0, m, kappa).unwrap();
        let h = build_matter_system(r, GroupParams::new(1, 1 + gap).unwrap(), &c, &MatterOptions::default()).unwrap();
        prop_assert!(h.total.hermiticity_defect() < 1e-12);
        let q = total_charge(1, [0.0; 4]).unwrap().to_complex();
        prop_assert!(h.total.commutator(&q).max_abs() < 1e-12);
    }

    #[test]
    fn krylov_agrees_with_dense_on_random_sparse_matrices(seed in any::<u64>(), density in 0.01f64..0.1) {
        use rand::{Rng, SeedableRng};
        let n = 200;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut entries = BTreeMap::new();
        for i in 0..n {
            entries.insert((i, i), rng.random::<f64>() * 4.0 - 2.0);
            for j in 0..i {
                if rng.random::<f64>() < density {
                    let v = rng.random::<f64>() - 0.5;
                    entries.insert((i, j), v);
                    entries.insert((j, i), v);
                }
            }
        }
        let t: Vec<(usize, usize, f64)> = entries.into_iter().map(|((i, j), v)| (i, j, v)).collect();
        let h = CsrMatrix::from_triplets(n, &t).unwrap();
        let cfg = SolverConfig { method: Method::Lanczos, ..Default::default() };
        let k = lowest_k(&h, 4, &cfg).unwrap();
        let (dense, _) = dense_eigh(&h);
        for i in 0..4 {
            prop_assert!((k.eigenvalues[i] - dense[i]).abs() < 1e-10, "level {}: {} vs {}", i, k.eigenvalues[i], dense[i]);
        }
    }
}
