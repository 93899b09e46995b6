use std::f64::consts::PI;

use lgt_core::analysis::*;
use lgt_core::basis::RotatorBasis;
use lgt_core::builder::{build_pure_gauge_electric, build_pure_gauge_magnetic, BuildOptions};
use lgt_core::eigen::ground_space;
use lgt_core::{Complex64, CouplingParams, GroupParams, Representation};
use nalgebra::{DMatrix, DVector, SymmetricEigen};

fn c64(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn kron3(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, c: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a.kronecker(b).kronecker(c)
}

fn on(m: &DMatrix<Complex64>, reg: usize) -> DMatrix<Complex64> {
    let id = DMatrix::identity(m.nrows(), m.ncols());
    match reg {
        0 => kron3(m, &id, &id),
        1 => kron3(&id, m, &id),
        _ => kron3(&id, &id, m),
    }
}

/// Electric-basis plaquette Hamiltonian written out from its definition.
fn electric_oracle(l: usize, g2: f64) -> DMatrix<Complex64> {
    let d = 2 * l + 1;
    // P|r> = |r-1>, truncated at the window edge.
    let p = DMatrix::from_fn(d, d, |a, b| if a + 1 == b { c64(1.0) } else { c64(0.0) });
    let (p1, p2, p3) = (on(&p, 0), on(&p, 1), on(&p, 2));
    let p123 = &p1 * &p2 * &p3;
    let mut hb = DMatrix::zeros(d * d * d, d * d * d);
    for u in [p1, p2, p3, p123] {
        hb += &u + u.adjoint();
    }
    electric_oracle_electric_part(l, g2) - hb * c64(1.0 / (2.0 * g2))
}

fn electric_oracle_electric_part(l: usize, g2: f64) -> DMatrix<Complex64> {
    let d = 2 * l + 1;
    let r = DMatrix::from_diagonal(&DVector::from_fn(d, |i, _| c64(i as f64 - l as f64)));
    let (r1, r2, r3) = (on(&r, 0), on(&r, 1), on(&r, 2));
    (&r1 * &r1 + &r2 * &r2 + &r3 * &r3 - &r2 * (&r1 + &r3)) * c64(2.0 * g2)
}

/// Magnetic-basis Hamiltonian from the full-group DFT images of R and R^2
/// cut to the window, plus the diagonal cosine plaquette term.
fn magnetic_oracle(l: usize, big_l: usize, g2: f64) -> DMatrix<Complex64> {
    let n = 2 * big_l + 1;
    let f = DMatrix::from_fn(n, n, |a, b| {
        Complex64::from_polar(1.0 / (n as f64).sqrt(), 2.0 * PI * ((a as f64 - big_l as f64) * (b as f64 - big_l as f64)) / n as f64)
    });
    let r = DMatrix::from_diagonal(&DVector::from_fn(n, |i, _| c64(i as f64 - big_l as f64)));
    let off = big_l - l;
    let d = 2 * l + 1;
    let win = |m: DMatrix<Complex64>| m.view((off, off), (d, d)).into_owned();
    let lin = win(&f * &r * f.adjoint());
    let quad = win(&f * &r * &r * f.adjoint());
    let he = (on(&quad, 0) + on(&quad, 1) + on(&quad, 2) - on(&lin, 1) * (on(&lin, 0) + on(&lin, 2))) * c64(2.0 * g2);
    let theta = 2.0 * PI / n as f64;
    let li = l as i64;
    let hb = DMatrix::from_fn(d * d * d, d * d * d, |a, b| {
        if a != b {
            return c64(0.0);
        }
        let v = [(a / (d * d)) as i64 - li, ((a / d) % d) as i64 - li, (a % d) as i64 - li];
        c64(-[v[0], v[1], v[2], v[0] + v[1] + v[2]].iter().map(|&x| (theta * x as f64).cos()).sum::<f64>() / g2)
    });
    he + hb
}

/// Non-degenerate ground vector of a dense Hermitian matrix.
fn dense_ground(h: DMatrix<Complex64>) -> DVector<Complex64> {
    let e = SymmetricEigen::new(h);
    let mut idx: Vec<usize> = (0..e.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    assert!(e.eigenvalues[idx[1]] - e.eigenvalues[idx[0]] > 1e-6, "degenerate oracle ground state");
    e.eigenvectors.column(idx[0]).into_owned()
}

/// |<b| F(L,l)^{x3} |e>|^2 summed entry by entry.
fn fourier_fidelity_oracle(l: usize, big_l: usize, g2: f64) -> f64 {
    let e = dense_ground(electric_oracle(l, g2));
    let b = dense_ground(magnetic_oracle(l, big_l, g2));
    let d = 2 * l + 1;
    let n = (2 * big_l + 1) as f64;
    let li = l as i64;
    let digits = |i: usize| [(i / (d * d)) as i64 - li, ((i / d) % d) as i64 - li, (i % d) as i64 - li];
    let mut s = Complex64::new(0.0, 0.0);
    for a in 0..d * d * d {
        let ja = digits(a);
        for c in 0..d * d * d {
            let kc = digits(c);
            let phase: i64 = (0..3).map(|k| ja[k] * kc[k]).sum();
            let f = Complex64::from_polar(n.powf(-1.5), 2.0 * PI * phase as f64 / n);
            s += b[a].conj() * f * e[c];
        }
    }
    s.norm_sqr()
}

fn pipe() -> Pipeline {
    Pipeline::default()
}

#[test]
fn electric_oracle_matches_builder() {
    for (l, g2) in [(1, 1.0), (2, 0.4)] {
        let c = CouplingParams::new(g2, 1.0, 0.0, 0.0).unwrap();
        let h = build_pure_gauge_electric(l, &c, &BuildOptions::default()).unwrap();
        let diff = (h.total.to_complex().to_dense() - electric_oracle(l, g2)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-12, "l={l}: {diff}");
    }
}

#[test]
fn truncated_dft_is_unitary_on_the_full_group() {
    for l in 1..=3 {
        let f = truncated_dft(l, l).unwrap().dense();
        let n = f.nrows();
        let defect = (f.adjoint() * &f - DMatrix::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(defect < 1e-12, "l={l}: {defect}");
    }
}

#[test]
fn truncated_dft_is_a_contraction() {
    for (l, big_l) in [(1, 2), (2, 3), (2, 7), (4, 5)] {
        let f = TruncatedDft::new(l, big_l, 1).unwrap().dense();
        let smax = f.singular_values().max();
        assert!(smax <= 1.0 + 1e-12, "l={l} L={big_l}: {smax}");
    }
}

#[test]
fn single_register_dft_matches_formula() {
    let f = TruncatedDft::new(1, 1, 1).unwrap().dense();
    let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
    for j in -1i32..=1 {
        for k in -1i32..=1 {
            let want = w.powi(j * k) / 3f64.sqrt();
            assert!((f[((j + 1) as usize, (k + 1) as usize)] - want).norm() < 1e-14);
        }
    }
}

#[test]
fn apply_agrees_with_dense_matrix() {
    let dft = truncated_dft(1, 3).unwrap();
    let x: Vec<f64> = (0..27).map(|i| ((i * 7) % 11) as f64 - 5.0).collect();
    let y = dft.apply(&x);
    let want = dft.dense() * DVector::from_iterator(27, x.iter().map(|&v| c64(v)));
    for (a, b) in y.iter().zip(want.iter()) {
        assert!((a - b).norm() < 1e-12);
    }
}

#[test]
fn fourier_fidelity_is_one_between_dual_full_group_states() {
    let solver = pipe().solver;
    for l in 1..=2 {
        let c = CouplingParams::new(0.8, 1.0, 0.0, 0.0).unwrap();
        let e = build_pure_gauge_electric(l, &c, &BuildOptions { cyclic: true, ..Default::default() }).unwrap();
        let b = build_pure_gauge_magnetic(GroupParams::new(l, l).unwrap(), &c, &BuildOptions::default()).unwrap();
        let se = ground_space(&e.total, &solver).unwrap();
        let sb = ground_space(&b.total, &solver).unwrap();
        let f = fourier_fidelity(&se.vectors, &sb.vectors, &truncated_dft(l, l).unwrap());
        assert!((f - 1.0).abs() < 1e-9, "l={l}: {f}");
    }
}

#[test]
fn fourier_fidelity_matches_dense_summation() {
    for (l, big_l, g2) in [(1, 2, 1.0), (1, 4, 0.5), (2, 3, 1.0)] {
        let c = CouplingParams::new(g2, 1.0, 0.0, 0.0).unwrap();
        let s = fourier_fidelity_scan(l, &c, &[big_l], &pipe()).unwrap();
        let want = fourier_fidelity_oracle(l, big_l, g2);
        assert!((s.best - want).abs() < 1e-9, "l={l} L={big_l}: {} vs {want}", s.best);
    }
}

#[test]
fn sequence_fidelity_matches_dense_overlap() {
    let g2 = 1.0;
    let a = dense_ground(electric_oracle(1, g2));
    let b = dense_ground(electric_oracle(2, g2));
    let small = RotatorBasis::plaquette(1).unwrap();
    let big = RotatorBasis::plaquette(2).unwrap();
    let overlap: Complex64 = (0..27).map(|i| a[i].conj() * b[big.index_of(&small.values(i)).unwrap()]).sum();
    let c = CouplingParams::pure_gauge(1.0).unwrap();
    let got = 1.0 - sequence_infidelity(Representation::Electric, 2, 2, &c, &pipe()).unwrap();
    assert!((got - overlap.norm()).abs() < 1e-9, "{got} vs {}", overlap.norm());
}

#[test]
fn sequence_fidelity_of_an_embedded_state_with_itself_is_one() {
    let c = CouplingParams::pure_gauge(2.0).unwrap();
    let s = solve_pure_gauge(Representation::Electric, GroupParams::new(2, 2).unwrap(), &c, &pipe()).unwrap();
    let up: Vec<Vec<f64>> = s.space.vectors.iter().map(|v| embed(v, 2, 3, 3)).collect();
    let f = sequence_fidelity(&s.space.vectors, &up, 3).unwrap();
    assert!((f - 1.0).abs() < 1e-12);
}

#[test]
fn electric_sequence_fidelity_approaches_one_at_strong_coupling() {
    let c = CouplingParams::pure_gauge(0.01).unwrap();
    let inf = sequence_infidelity(Representation::Electric, 3, 3, &c, &pipe()).unwrap();
    assert!(inf < 1e-8, "{inf}");
}

#[test]
fn greedy_l_opt_matches_exhaustive_scan() {
    let c = CouplingParams::pure_gauge(100.0).unwrap();
    let grid = default_l_grid(3);
    let greedy = find_l_opt(3, &c, &grid, &pipe()).unwrap();
    let full = find_l_opt_exhaustive(3, &c, &grid, &pipe()).unwrap();
    assert_eq!(greedy.l_opt, full.l_opt);
    assert_eq!(greedy.method, LOptMethod::LocalMinimum);
    assert_eq!(greedy.l_opt, 20);
    assert!(greedy.curve.len() < full.curve.len());
}

#[test]
fn l_opt_freezes_for_l_one_at_weak_coupling() {
    let c = CouplingParams::pure_gauge(3.0).unwrap();
    let p = find_l_opt(1, &c, &default_l_grid(1), &pipe()).unwrap();
    assert_eq!(p.l_opt, 2);
    assert!(p.frozen, "{p:?}");
}

#[test]
fn l_opt_rejects_bad_grids() {
    let c = CouplingParams::pure_gauge(1.0).unwrap();
    assert!(find_l_opt(2, &c, &[], &pipe()).is_err());
    assert!(find_l_opt(2, &c, &[2, 3], &pipe()).is_err());
    assert!(find_l_opt(2, &c, &[4, 3], &pipe()).is_err());
}

const GM_GRID: [f64; 10] = [0.1, 0.2, 0.3, 0.5, 0.7, 1.0, 1.5, 2.0, 3.0, 5.0];

#[test]
fn g_m_is_of_order_one() {
    for l in [2, 3] {
        let r = find_gm(l, &GM_GRID, &(l + 1..=l + 20).collect::<Vec<_>>(), &pipe()).unwrap();
        assert!(r.warning.is_none());
        assert!((0.3..=3.0).contains(&r.g_m), "l={l}: g_m={}", r.g_m);
    }
}

#[test]
fn g_m_matches_dense_fidelity_curve() {
    let l = 2;
    let grid: Vec<usize> = (3..=12).collect();
    let r = find_gm(l, &GM_GRID, &grid, &pipe()).unwrap();
    let oracle: Vec<f64> =
        GM_GRID.iter().map(|&g2| grid.iter().map(|&bl| fourier_fidelity_oracle(l, bl, g2)).fold(0.0, f64::max)).collect();
    for (p, want) in r.points.iter().zip(&oracle) {
        assert!((p.fidelity - want).abs() < 1e-8, "g2={}: {} vs {want}", p.g2, p.fidelity);
    }
    let best = (0..oracle.len()).max_by(|&a, &b| oracle[a].total_cmp(&oracle[b])).unwrap();
    assert_eq!(r.g_m, GM_GRID[best].sqrt());
}

#[test]
fn decomposition_at_full_group_has_identical_truncated_and_wrap_free_profiles() {
    let d = truncation_decomposition(2, 2, &pipe()).unwrap();
    assert_eq!(d.truncated.shells.len(), d.cyclic_removed.shells.len());
    for (a, b) in d.truncated.shells.iter().zip(&d.cyclic_removed.shells) {
        assert_eq!(a.0, b.0);
        assert!((a.1 - b.1).abs() < 1e-9);
    }
}

#[test]
fn truncation_moves_population_inward() {
    let d = truncation_decomposition(2, 3, &pipe()).unwrap();
    // With only the electric term the full-group ground state is flat.
    assert!(d.untruncated.distance_from_uniform() < 1e-8);
    for &(s, _, _) in &d.truncated.shells {
        assert!(d.truncated.cumulative(s) >= d.untruncated.cumulative(s) - 1e-12, "s={s}");
    }
    let total: f64 = d.truncated.shells.iter().map(|x| x.1).sum();
    assert!((total - 1.0).abs() < 1e-10);
}

#[test]
fn plaquette_limits() {
    for l in 1..=3 {
        let c = CouplingParams::pure_gauge(1e6).unwrap();
        let e = solve_pure_gauge(Representation::Electric, GroupParams::new(l, l).unwrap(), &c, &pipe()).unwrap();
        let limit = electric_weak_coupling_limit(l, &pipe()).unwrap();
        assert!((e.plaquette - limit).abs() < 1e-5, "l={l}: {} vs {limit}", e.plaquette);
        assert!(limit < electric_weak_coupling_bound(l));
        let c = CouplingParams::pure_gauge(1e-4).unwrap();
        let b = solve_pure_gauge(Representation::Magnetic, GroupParams::new(l, l).unwrap(), &c, &pipe()).unwrap();
        assert!(b.plaquette.abs() < 1e-3, "l={l}: {}", b.plaquette);
    }
    assert!((electric_weak_coupling_bound(3) - (PI / 8.0).cos()).abs() < 1e-15);
}

#[test]
fn electric_weak_coupling_limit_matches_dense_top_eigenvalue() {
    for l in 1..=2 {
        // At g^2 = 1/2 the magnetic part of the oracle is -(sum of U + U^dagger).
        let h = electric_oracle(l, 0.5) - electric_oracle_electric_part(l, 0.5);
        let top = SymmetricEigen::new(-h).eigenvalues.max() / 8.0;
        let got = electric_weak_coupling_limit(l, &pipe()).unwrap();
        assert!((got - top).abs() < 1e-10, "l={l}: {got} vs {top}");
    }
    // Values of the top eigenvalue for l = 1 and 2, independently obtained.
    assert!((electric_weak_coupling_limit(1, &pipe()).unwrap() - 0.632094868071).abs() < 1e-10);
    assert!((electric_weak_coupling_limit(2, &pipe()).unwrap() - 0.823576582116).abs() < 1e-10);
}

#[test]
fn representations_agree_on_the_full_group() {
    let solver = pipe().solver;
    for l in 1..=3 {
        for g2 in [0.5, 2.0] {
            let c = CouplingParams::new(g2, 1.0, 0.0, 0.0).unwrap();
            let e = build_pure_gauge_electric(l, &c, &BuildOptions { cyclic: true, ..Default::default() }).unwrap();
            let b = build_pure_gauge_magnetic(GroupParams::new(l, l).unwrap(), &c, &BuildOptions::default()).unwrap();
            let pe = plaquette_of_space(&ground_space(&e.total, &solver).unwrap(), &e.h_b, &c, PLAQUETTE_VOLUME);
            let pb = plaquette_of_space(&ground_space(&b.total, &solver).unwrap(), &b.h_b, &c, PLAQUETTE_VOLUME);
            assert!((pe - pb).abs() < 1e-10, "l={l} g2={g2}: {pe} vs {pb}");
        }
    }
}

#[test]
fn electric_plaquette_grows_with_l_at_weak_coupling() {
    let c = CouplingParams::pure_gauge(10.0).unwrap();
    let mut prev = f64::NEG_INFINITY;
    for l in 1..=6 {
        let p = solve_pure_gauge(Representation::Electric, GroupParams::new(l, l).unwrap(), &c, &pipe()).unwrap().plaquette;
        assert!(p >= prev - 1e-12, "l={l}: {p} < {prev}");
        prev = p;
    }
}

#[test]
fn magnetic_plaquette_falls_with_l_at_strong_coupling() {
    let c = CouplingParams::pure_gauge(0.1).unwrap();
    let mut prev = f64::INFINITY;
    for l in 1..=6 {
        let p = solve_pure_gauge(Representation::Magnetic, GroupParams::new(l, 7).unwrap(), &c, &pipe()).unwrap().plaquette;
        assert!(p <= prev + 1e-12, "l={l}: {p} > {prev}");
        prev = p;
    }
}

#[test]
fn window_leakage_trends() {
    let p = pipe();
    let leak = |l: usize, big_l: usize, inv_g2: f64| window_leakage(l, big_l, &CouplingParams::pure_gauge(inv_g2).unwrap(), &p).unwrap();
    // Fewer levels kept: more leakage.
    let by_l: Vec<f64> = (1..=3).map(|l| leak(l, 4, 3.0)).collect();
    assert!(by_l.windows(2).all(|w| w[1] < w[0]), "{by_l:?}");
    // Finer group resolution: more leakage.
    let by_big_l: Vec<f64> = (2..=4).map(|bl| leak(1, bl, 3.0)).collect();
    assert!(by_big_l.windows(2).all(|w| w[1] > w[0]), "{by_big_l:?}");
    // Stronger coupling: more leakage.
    let by_g: Vec<f64> = [10.0, 3.0, 1.0].iter().map(|&ig| leak(1, 3, ig)).collect();
    assert!(by_g.windows(2).all(|w| w[1] > w[0]), "{by_g:?}");
}

#[test]
fn ground_state_amplitudes_are_reflection_symmetric() {
    let c = CouplingParams::pure_gauge(1.3).unwrap();
    for rep in [Representation::Electric, Representation::Magnetic] {
        let s = solve_pure_gauge(rep, GroupParams::new(2, 4).unwrap(), &c, &pipe()).unwrap();
        let basis = RotatorBasis::plaquette(2).unwrap();
        let v = &s.space.vectors[0];
        for i in 0..basis.dim() {
            let neg: Vec<i64> = basis.values(i).iter().map(|r| -r).collect();
            let j = basis.index_of(&neg).unwrap();
            assert!((v[i].abs() - v[j].abs()).abs() < 1e-9);
        }
    }
}

#[test]
fn matter_reduces_to_pure_gauge_at_large_mass() {
    // Heavy fermions decouple; only the neutral vacuum sector remains.
    let c = CouplingParams::new(1.0, 1.0, 1e4, 1.0).unwrap();
    let g = GroupParams::new(1, 1).unwrap();
    let m = solve_matter(Representation::Electric, g, &c, [0.0; 4], &pipe()).unwrap();
    let pg = solve_pure_gauge(Representation::Electric, g, &CouplingParams::pure_gauge(1.0).unwrap(), &pipe()).unwrap();
    assert!((m.plaquette - pg.plaquette).abs() < 1e-3, "{} vs {}", m.plaquette, pg.plaquette);
}
