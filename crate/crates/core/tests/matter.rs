use lgt_core::basis::{apply_register_block, MatterBasis};
use lgt_core::builder::{build_pure_gauge_electric, dft_block, BuildOptions, PowerScheme, ReplacementBlocks};
use lgt_core::eigen::{ground_state, lowest_k, SolverConfig};
use lgt_core::matter::*;
use lgt_core::sparse::{norm, CsrMatrix};
use lgt_core::{Complex64, CouplingParams, GroupParams, Representation};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DIRAC: [u8; 4] = [0, 1, 0, 1];

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn charges(occ: [u8; 4]) -> [f64; 4] {
    // JW order (0,0), (0,1), (1,1), (1,0): odd sites carry an offset of -1.
    [occ[0] as f64, occ[1] as f64 - 1.0, occ[2] as f64, occ[3] as f64 - 1.0]
}

#[test]
fn jordan_wigner_anticommutation() {
    let fm = FermionMapping::default();
    let id = DMatrix::<f64>::identity(16, 16);
    for m in 0..4 {
        for n in 0..4 {
            let a = fm.annihilation(m);
            let b = fm.annihilation(n);
            let ac = &a * b.transpose() + b.transpose() * &a;
            let want = if m == n { id.clone() } else { DMatrix::zeros(16, 16) };
            assert_eq!(ac, want, "{{a_{m}, a_{n}^dag}}");
            assert_eq!(&a * &b + &b * &a, DMatrix::zeros(16, 16));
        }
    }
}

#[test]
fn charge_operator_examples() {
    let basis = MatterBasis::new(1).unwrap();
    let vac = basis.index_of(DIRAC, [0; 5]).unwrap();
    for site in [(0, 0), (0, 1), (1, 1), (1, 0)] {
        let q = charge_operator(site, 1, [0.0; 4]).unwrap();
        assert_eq!(q.get(vac, vac), 0.0, "{site:?}");
    }
    let occ00 = basis.index_of([1, 1, 0, 1], [0; 5]).unwrap();
    assert_eq!(charge_operator((0, 0), 1, [0.0; 4]).unwrap().get(occ00, occ00), 1.0);
    let fm = FermionMapping::default();
    let q10 = fm.charge(3);
    let mut ev: Vec<f64> = q10.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    assert_eq!(ev, vec![-1.0, 0.0]);
}

#[test]
fn mass_term_examples() {
    let m = 2.5;
    let h = mass_hamiltonian(m);
    let idx = |o: [u8; 4]| o.iter().fold(0, |a, &b| 2 * a + b as usize);
    assert_eq!(h.get(idx(DIRAC), idx(DIRAC)), -2.0 * m);
    // Pair on (0,0) and (1,0): particle at the even site, hole at the odd one.
    assert_eq!(h.get(idx([1, 1, 0, 0]), idx([1, 1, 0, 0])) - h.get(idx(DIRAC), idx(DIRAC)), 2.0 * m);
    let fm = FermionMapping::default();
    let signs = [1.0, -1.0, 1.0, -1.0];
    let mut brute = DMatrix::zeros(16, 16);
    for k in 0..4 {
        let a = fm.annihilation(k);
        brute += a.transpose() * &a * (m * signs[k]);
    }
    assert_eq!(h.to_dense(), brute);
    assert!(h.sub(&mass_hamiltonian_pauli(m)).max_abs() < 1e-15);
}

fn opts() -> MatterOptions {
    MatterOptions::default()
}

#[test]
fn zero_kappa_gives_zero_kinetic_term() {
    let g = GroupParams::new(1, 2).unwrap();
    let cp = CouplingParams::new(1.0, 1.0, 1.0, 0.0).unwrap();
    for rep in [Representation::Electric, Representation::Magnetic] {
        assert_eq!(kinetic_hamiltonian(rep, g, &cp, &opts()).unwrap().nnz(), 0);
    }
}

#[test]
fn magnetic_hop_phase() {
    let l = 1;
    let g = GroupParams::new(l, 2).unwrap();
    let cp = CouplingParams::new(1.0, 1.0, 0.0, 1.0).unwrap();
    let hk = kinetic_hamiltonian(Representation::Magnetic, g, &cp, &opts()).unwrap();
    let basis = MatterBasis::new(l).unwrap();
    let theta = 2.0 * std::f64::consts::PI / 5.0;
    for rx in -1..=1i64 {
        let gauge = [1, 0, -1, rx, 1];
        // psi_00^dag psi_10: from (0,0) empty, (1,0) filled to the reverse.
        let from = basis.index_of([0, 1, 0, 1], gauge).unwrap();
        let to = basis.index_of([1, 1, 0, 0], gauge).unwrap();
        let want = Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, -theta * rx as f64);
        // Jordan-Wigner sign: Z strings on (0,1), (1,1) between the two sites.
        let z = -1.0;
        assert!((hk.get(to, from) - want * z).norm() < 1e-14, "rx={rx}: {}", hk.get(to, from));
    }
}

/// Electric energy as printed for the plaquette with charges.
fn printed_electric(g2: f64, q: [f64; 4], r: [i64; 5]) -> f64 {
    let [q00, q01, q11, q10] = q;
    let _ = q00;
    let [r1, r2, r3, rx, ry] = r.map(|x| x as f64);
    g2 * (2.0 * (r1 * r1 + r2 * r2 + r3 * r3 - r2 * (r1 + r3)) + rx * rx + ry * ry + (r1 + r2 - r3) * rx
        - (r1 - r2 - r3) * ry
        - (q10 * (r1 + rx) + q01 * (r2 - r1 + ry) + q11 * (2.0 * r1 - r2 + rx))
        + (q10 * q10 + q01 * q01 + 2.0 * q11 * (q10 + q11)) / 2.0)
}

#[test]
fn electric_term_matches_printed_formula() {
    let l = 1;
    let g2 = 0.8;
    let cp = CouplingParams::new(g2, 1.0, 0.0, 0.0).unwrap();
    let h = electric_hamiltonian_with_charges(Representation::Electric, GroupParams::new(l, 1).unwrap(), &cp, &opts()).unwrap();
    assert!(h.is_diagonal());
    let basis = MatterBasis::new(l).unwrap();
    for i in 0..basis.dim() {
        let (occ, r) = basis.state_of(i).unwrap();
        let want = printed_electric(g2, charges(occ), r);
        assert!((h.get(i, i).re - want).abs() < 1e-12, "{occ:?} {r:?}");
    }
}

#[test]
fn dirac_vacuum_reduces_to_pure_gauge() {
    let l = 2;
    let g2 = 1.7;
    let cp = CouplingParams::new(g2, 1.0, 0.0, 0.0).unwrap();
    let h = electric_hamiltonian_with_charges(Representation::Electric, GroupParams::new(l, l).unwrap(), &cp, &opts()).unwrap();
    let pg = build_pure_gauge_electric(l, &cp, &BuildOptions::default()).unwrap();
    let basis = MatterBasis::new(l).unwrap();
    let rb = lgt_core::basis::RotatorBasis::plaquette(l).unwrap();
    for j in 0..rb.dim() {
        let r = rb.values(j);
        let i = basis.index_of(DIRAC, [r[0], r[1], r[2], 0, 0]).unwrap();
        assert!((h.get(i, i).re - pg.h_e.get(j, j)).abs() < 1e-12);
    }
}

#[test]
fn charge_charge_example() {
    // q_(1,0) = +1, q_(1,1) = -1, everything else zero, gauge at zero.
    let q = [0.0, 0.0, -1.0, 1.0];
    assert!((printed_electric(1.0, q, [0; 5]) - 0.5).abs() < 1e-15);
    // Same configuration from static charges on the neutral Dirac vacuum.
    let cp = CouplingParams::new(1.0, 1.0, 0.0, 0.0).unwrap();
    let o = MatterOptions { static_charges: [0.0, 0.0, -1.0, 1.0], ..Default::default() };
    let h = electric_hamiltonian_with_charges(Representation::Electric, GroupParams::new(1, 1).unwrap(), &cp, &o).unwrap();
    let i = MatterBasis::new(1).unwrap().index_of(DIRAC, [0; 5]).unwrap();
    assert!((h.get(i, i).re - 0.5).abs() < 1e-15);
}

fn kron_chain(ops: &[DMatrix<Complex64>]) -> DMatrix<Complex64> {
    ops.iter().fold(DMatrix::identity(1, 1), |acc, m| acc.kronecker(m))
}

fn on(reg: usize, m: &DMatrix<Complex64>, d: usize) -> DMatrix<Complex64> {
    let ops: Vec<DMatrix<Complex64>> = (0..5).map(|k| if k == reg { m.clone() } else { DMatrix::identity(d, d) }).collect();
    kron_chain(&ops)
}

/// Magnetic electric term for fixed charges, with the q_(1,1) string term
/// entering as +A_x.
fn printed_magnetic_block(group: GroupParams, g2: f64, q: [f64; 4], qx_sign: f64) -> DMatrix<Complex64> {
    let b = ReplacementBlocks::new(group, PowerScheme::WindowProjected).unwrap();
    let d = group.local_dim();
    let k: DMatrix<Complex64> = b.k.map(c);
    let a: DMatrix<Complex64> = b.a.map(c);
    let kk: Vec<_> = (0..5).map(|j| on(j, &k, d)).collect();
    let aa: Vec<_> = (0..5).map(|j| on(j, &a, d)).collect();
    let [_, q01, q11, q10] = q;
    let i = Complex64::i();
    let (a1, a2, a3, ax, ay) = (&aa[0], &aa[1], &aa[2], &aa[3], &aa[4]);
    let h = &kk[0] + &kk[1] + &kk[2] + (&kk[3] + &kk[4]) * c(0.5) + a2 * (a1 + a3) * c(0.5)
        - ax * (a1 + a2 - a3) * c(0.25)
        + ay * (a1 - a2 - a3) * c(0.25)
        + (a1 + ax) * (i * q10 / 2.0)
        + (a2 - a1 + ay) * (i * q01 / 2.0)
        + (a1 * c(2.0) - a2 + ax * c(qx_sign)) * (i * q11 / 2.0);
    let dim = h.nrows();
    h * c(g2) + DMatrix::identity(dim, dim) * c(g2 * (q10 * q10 + q01 * q01 + 2.0 * q11 * (q10 + q11)) / 2.0)
}

#[test]
fn magnetic_electric_term_matches_corrected_printed_formula() {
    let group = GroupParams::new(1, 2).unwrap();
    let g2 = 1.3;
    let cp = CouplingParams::new(g2, 1.0, 0.0, 0.0).unwrap();
    let h = electric_hamiltonian_with_charges(Representation::Magnetic, group, &cp, &opts()).unwrap();
    let basis = MatterBasis::new(1).unwrap();
    let gd = 243;
    for occ in [DIRAC, [1, 1, 0, 0], [0, 0, 1, 1], [1, 0, 1, 0]] {
        let q = charges(occ);
        let off = basis.index_of(occ, [-1; 5]).unwrap();
        let block = DMatrix::from_fn(gd, gd, |a, b| h.get(off + a, off + b));
        let want = printed_magnetic_block(group, g2, q, 1.0);
        assert!((&block - &want).norm() < 1e-11, "{occ:?}: {}", (&block - &want).norm());
        if q[2] != 0.0 {
            // The sign printed with -L_x for q_(1,1) does not match.
            let printed = printed_magnetic_block(group, g2, q, -1.0);
            assert!((&block - &printed).norm() > 1e-3);
        }
    }
}

fn random_state(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect()
}

/// F on every gauge register of the matter basis.
fn fourier(l: usize, x: &[Complex64]) -> Vec<Complex64> {
    let basis = MatterBasis::new(l).unwrap();
    let f = dft_block(l, l);
    (4..9).fold(x.to_vec(), |v, reg| apply_register_block(basis.layout(), reg, &f, &v))
}

#[test]
fn full_group_duality_of_every_term() {
    let l = 1;
    let group = GroupParams::new(l, l).unwrap();
    let cp = CouplingParams::new(0.9, 1.0, 1.1, 0.7).unwrap();
    let cyc = MatterOptions { build: BuildOptions { cyclic: true, ..Default::default() }, ..Default::default() };
    let e = build_matter_system(Representation::Electric, group, &cp, &cyc).unwrap();
    let b = build_matter_system(Representation::Magnetic, group, &cp, &opts()).unwrap();
    let x = random_state(e.total.dim(), 3);
    let fx = fourier(l, &x);
    for (name, he, hb, shift) in [
        ("E", &e.h_e, &b.h_e, b.energy_shift),
        ("B", &e.h_b, &b.h_b, 0.0),
        ("K", &e.h_k, &b.h_k, 0.0),
        ("M", &e.h_m, &b.h_m, 0.0),
    ] {
        let lhs = fourier(l, &he.matvec(&x));
        let mut rhs = hb.matvec(&fx);
        rhs.iter_mut().zip(&fx).for_each(|(r, v)| *r += v * shift);
        let d: Vec<Complex64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
        assert!(norm(&d) < 1e-11 * norm(&x), "{name}: {}", norm(&d));
    }
    let cfg = SolverConfig::default();
    let ee = lowest_k(&e.total, 4, &cfg).unwrap().eigenvalues;
    let eb = lowest_k(&b.total, 4, &cfg).unwrap().eigenvalues;
    for k in 0..4 {
        assert!((ee[k] - eb[k] - b.energy_shift).abs() < 1e-9, "{k}: {} vs {}", ee[k], eb[k] + b.energy_shift);
    }
}

#[test]
fn hermitian_and_charge_conserving() {
    let cp = CouplingParams::new(0.6, 1.0, 1.5, 2.0).unwrap();
    for (rep, group) in [
        (Representation::Electric, GroupParams::new(1, 1).unwrap()),
        (Representation::Magnetic, GroupParams::new(1, 1).unwrap()),
        (Representation::Magnetic, GroupParams::new(1, 3).unwrap()),
    ] {
        let h = build_matter_system(rep, group, &cp, &opts()).unwrap();
        let q = total_charge(1, [0.0; 4]).unwrap().to_complex();
        for (name, t) in [("E", &h.h_e), ("B", &h.h_b), ("K", &h.h_k), ("M", &h.h_m)] {
            assert!(t.hermiticity_defect() < 1e-13, "{rep} {name}");
        }
        assert!(h.total.commutator(&q).max_abs() < 1e-12, "{rep}");
    }
}

#[test]
fn decoupled_matter_leaves_pure_gauge_plaquette() {
    let l = 1;
    let cp = CouplingParams::new(1.0, 1.0, 3.0, 0.0).unwrap();
    let group = GroupParams::new(l, l).unwrap();
    let h = build_matter_system(Representation::Electric, group, &cp, &opts()).unwrap();
    let gs = ground_state(&h.total, &SolverConfig::default()).unwrap();
    let v = &gs.eigenvectors[0];
    let basis = MatterBasis::new(l).unwrap();
    let weight_vac: f64 = (0..basis.dim())
        .filter(|&i| basis.state_of(i).unwrap().0 == DIRAC)
        .map(|i| v[i].norm_sqr())
        .sum();
    assert!((weight_vac - 1.0).abs() < 1e-10);
    let plaq = -h.h_b.expectation(v) * cp.g2 / 4.0;
    let pg = build_pure_gauge_electric(l, &cp, &BuildOptions::default()).unwrap();
    let pgs = ground_state(&pg.total, &SolverConfig::default()).unwrap();
    let pplaq = -pg.h_b.expectation(&pgs.eigenvectors[0]) * cp.g2 / 4.0;
    assert!((plaq - pplaq).abs() < 1e-9, "{plaq} vs {pplaq}");
}

#[test]
fn charge_sector_sizes() {
    let cp = CouplingParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
    let h = build_matter_system(Representation::Electric, GroupParams::new(1, 1).unwrap(), &cp, &opts()).unwrap();
    // 6 neutral occupation patterns out of 16.
    assert_eq!(h.charge_sector(0.0).len(), 6 * 243);
    let sub: CsrMatrix<Complex64> = h.total.restrict(&h.charge_sector(0.0));
    assert!(sub.hermiticity_defect() < 1e-13);
}

#[test]
fn resource_cap_is_enforced() {
    let cp = CouplingParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
    let o = MatterOptions { build: BuildOptions { cap: Some(10_000), ..Default::default() }, ..Default::default() };
    let e = build_matter_system(Representation::Electric, GroupParams::new(2, 2).unwrap(), &cp, &o).unwrap_err();
    assert!(matches!(e, lgt_core::LgtError::Resource { .. }));
}
