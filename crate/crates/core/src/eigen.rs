//! Lowest eigenpairs of Hermitian sparse operators.
//!
//! Thick-restart Lanczos with full reorthogonalization; further levels are
//! found by deflating against converged vectors, so degenerate levels come
//! back as orthonormal bases. Small problems can go to a dense solver.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, LgtError, Result};
use crate::exec::Exec;
use crate::sparse::{dot, norm, CsrMatrix, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Dense below `dense_below`, Lanczos above.
    Auto,
    Lanczos,
    Dense,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Residual bound relative to the operator's row-sum norm.
    pub tol: f64,
    /// Matrix-vector products allowed per eigenpair.
    pub max_matvecs: usize,
    pub krylov_dim: usize,
    pub seed: u64,
    pub method: Method,
    pub dense_below: usize,
    /// Gap (relative to the norm) under which two levels count as degenerate.
    pub degeneracy_rtol: f64,
    /// Also solve for the second level to detect a degenerate ground space.
    pub check_degeneracy: bool,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_matvecs: 50_000,
            krylov_dim: 64,
            seed: 0x5eed,
            method: Method::Auto,
            dense_below: 400,
            degeneracy_rtol: 1e-10,
            check_degeneracy: true,
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult<T> {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<T>>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

/// Lowest level of an operator; several vectors when degenerate.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundSpace<T> {
    pub energy: f64,
    pub vectors: Vec<Vec<T>>,
    /// Next level above the ground space, when it was computed.
    pub next_energy: Option<f64>,
    pub residual: f64,
}

impl<T: Scalar> GroundSpace<T> {
    pub fn is_degenerate(&self) -> bool {
        self.vectors.len() > 1
    }

    pub fn state(&self) -> &[T] {
        &self.vectors[0]
    }

    /// Average of <v|A|v> over an orthonormal basis of the space.
    pub fn expectation(&self, a: &CsrMatrix<T>) -> f64 {
        self.vectors.iter().map(|v| a.expectation(v)).sum::<f64>() / self.vectors.len() as f64
    }
}

fn residual<T: Scalar>(h: &CsrMatrix<T>, exec: Exec, v: &[T], lambda: f64) -> f64 {
    let mut w = vec![T::zero(); v.len()];
    h.matvec_into(exec, v, &mut w);
    w.iter().zip(v).map(|(a, b)| (*a - *b * T::from_real(lambda)).modulus_squared()).sum::<f64>().sqrt()
}

fn axpy<T: Scalar>(y: &mut [T], a: T, x: &[T]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += a * *xi);
}

fn random_vector<T: Scalar>(n: usize, rng: &mut ChaCha8Rng) -> Vec<T> {
    (0..n)
        .map(|_| {
            let re: f64 = rng.random::<f64>() - 0.5;
            if T::IS_COMPLEX {
                let im: f64 = rng.random::<f64>() - 0.5;
                T::try_from_c64(num_complex::Complex64::new(re, im)).expect("complex scalar")
            } else {
                T::from_real(re)
            }
        })
        .collect()
}

/// Orthogonalize `w` against `vs` twice; returns the accumulated overlaps.
fn orthogonalize<T: Scalar>(w: &mut [T], vs: &[Vec<T>]) -> Vec<T> {
    let mut c = vec![T::zero(); vs.len()];
    for _ in 0..2 {
        for (k, v) in vs.iter().enumerate() {
            let h = dot(v, w);
            axpy(w, -h, v);
            c[k] += h;
        }
    }
    c
}

fn sorted_eigh<T: Scalar>(m: DMatrix<T>) -> (Vec<f64>, DMatrix<T>) {
    let n = m.nrows();
    let e = SymmetricEigen::new(m);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let vals = idx.iter().map(|&i| e.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(n, n, |r, c| e.eigenvectors[(r, idx[c])]);
    (vals, vecs)
}

/// Full spectrum and eigenvectors through a dense decomposition.
pub fn dense_eigh<T: Scalar>(h: &CsrMatrix<T>) -> (Vec<f64>, Vec<Vec<T>>) {
    let (vals, vecs) = sorted_eigh(h.to_dense());
    let n = h.dim();
    let cols = (0..n).map(|c| vecs.column(c).iter().copied().collect()).collect();
    (vals, cols)
}

struct Found<T> {
    vector: Vec<T>,
    matvecs: usize,
}

/// Lowest eigenpair of `h` restricted to the complement of `locked`.
fn lanczos_lowest<T: Scalar>(
    h: &CsrMatrix<T>,
    locked: &[Vec<T>],
    cfg: &SolverConfig,
    hnorm: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Found<T>> {
    let n = h.dim();
    let free = n - locked.len();
    let m = cfg.krylov_dim.max(4).min(free);
    let keep = (m / 2).max(1);
    let thresh = cfg.tol * hnorm.max(f64::MIN_POSITIVE);

    let fresh = |rng: &mut ChaCha8Rng, basis: &[Vec<T>]| -> Option<Vec<T>> {
        for _ in 0..8 {
            let mut v = random_vector::<T>(n, rng);
            orthogonalize(&mut v, locked);
            orthogonalize(&mut v, basis);
            let nv = norm(&v);
            if nv > 1e-8 {
                v.iter_mut().for_each(|x| *x /= T::from_real(nv));
                return Some(v);
            }
        }
        None
    };

    let mut basis: Vec<Vec<T>> = vec![fresh(rng, &[]).ok_or_else(|| LgtError::Domain("no free direction".into()))?];
    let mut hm = DMatrix::<T>::zeros(m + 1, m + 1);
    let mut w = vec![T::zero(); n];
    let mut matvecs = 0usize;
    let mut best = f64::INFINITY;

    loop {
        let j = basis.len() - 1;
        h.matvec_into(cfg.exec, &basis[j], &mut w);
        matvecs += 1;
        orthogonalize(&mut w, locked);
        let c = orthogonalize(&mut w, &basis);
        for (i, ci) in c.iter().enumerate() {
            hm[(i, j)] = *ci;
            hm[(j, i)] = ci.conjugate();
        }
        hm[(j, j)] = T::from_real(c[j].real());
        let beta = norm(&w);
        let size = j + 1;

        let (vals, vecs) = sorted_eigh(hm.view((0, 0), (size, size)).into_owned());
        let res = beta * vecs[(j, 0)].modulus();
        best = best.min(res);
        let exhausted = size == free;
        if res <= thresh || exhausted {
            let mut x = vec![T::zero(); n];
            for (i, b) in basis.iter().enumerate() {
                axpy(&mut x, vecs[(i, 0)], b);
            }
            orthogonalize(&mut x, locked);
            let nx = norm(&x);
            x.iter_mut().for_each(|v| *v /= T::from_real(nx));
            return Ok(Found { vector: x, matvecs });
        }
        if matvecs >= cfg.max_matvecs {
            return Err(LgtError::Convergence { iterations: matvecs, best_residual: best });
        }

        // A tiny beta leaves rounding noise in w; if re-orthogonalizing the
        // normalized vector loses most of it, the Krylov space is invariant.
        let mut next: Vec<T> = w.iter().map(|x| *x / T::from_real(beta.max(f64::MIN_POSITIVE))).collect();
        orthogonalize(&mut next, locked);
        orthogonalize(&mut next, &basis);
        let nn = norm(&next);
        let next = if nn > 0.5 {
            next.iter_mut().for_each(|x| *x /= T::from_real(nn));
            next
        } else {
            match fresh(rng, &basis) {
                Some(v) => v,
                None => {
                    return Err(LgtError::Convergence { iterations: matvecs, best_residual: best });
                }
            }
        };

        if size < m {
            basis.push(next);
            continue;
        }

        // Thick restart on the lowest `keep` Ritz vectors plus the residual.
        let mut kept: Vec<Vec<T>> = (0..keep)
            .map(|c| {
                let mut x = vec![T::zero(); n];
                for (i, b) in basis.iter().enumerate() {
                    axpy(&mut x, vecs[(i, c)], b);
                }
                x
            })
            .collect();
        kept.push(next);
        basis = kept;
        hm.fill(T::zero());
        for c in 0..keep {
            hm[(c, c)] = T::from_real(vals[c]);
        }
    }
}

fn check_square<T: Scalar>(h: &CsrMatrix<T>, k: usize) -> Result<()> {
    if h.dim() == 0 {
        return domain("empty operator");
    }
    if k == 0 || k > h.dim() {
        return domain(format!("requested {k} eigenpairs of a {}-dimensional operator", h.dim()));
    }
    Ok(())
}

fn use_dense(n: usize, cfg: &SolverConfig) -> bool {
    match cfg.method {
        Method::Dense => true,
        Method::Lanczos => false,
        Method::Auto => n < cfg.dense_below,
    }
}

/// The `k` lowest eigenpairs in ascending order.
pub fn lowest_k<T: Scalar>(h: &CsrMatrix<T>, k: usize, cfg: &SolverConfig) -> Result<EigenResult<T>> {
    check_square(h, k)?;
    if !(cfg.tol > 0.0 && cfg.tol <= 1e-4) {
        return domain(format!("solver tolerance {} outside (0, 1e-4]", cfg.tol));
    }
    let n = h.dim();
    if use_dense(n, cfg) {
        let (vals, vecs) = dense_eigh(h);
        let eigenvectors: Vec<Vec<T>> = vecs.into_iter().take(k).collect();
        let residuals = eigenvectors.iter().zip(&vals).map(|(v, &l)| residual(h, cfg.exec, v, l)).collect();
        return Ok(EigenResult { eigenvalues: vals[..k].to_vec(), eigenvectors, residuals, iterations: 0 });
    }
    let hnorm = h.norm_inf();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut locked: Vec<Vec<T>> = Vec::with_capacity(k);
    let mut iterations = 0;
    for _ in 0..k {
        let f = lanczos_lowest(h, &locked, cfg, hnorm, &mut rng)?;
        iterations += f.matvecs;
        locked.push(f.vector);
    }
    // Rayleigh-Ritz on the locked set sorts the levels.
    let hv: Vec<Vec<T>> = locked.iter().map(|v| h.matvec(v)).collect();
    let proj = DMatrix::from_fn(k, k, |a, b| dot(&locked[a], &hv[b]));
    let proj = (&proj + proj.adjoint()) * T::from_real(0.5);
    let (vals, y) = sorted_eigh(proj);
    let eigenvectors: Vec<Vec<T>> = (0..k)
        .map(|c| {
            let mut x = vec![T::zero(); n];
            for (i, v) in locked.iter().enumerate() {
                axpy(&mut x, y[(i, c)], v);
            }
            let nx = norm(&x);
            x.iter_mut().for_each(|v| *v /= T::from_real(nx));
            x
        })
        .collect();
    let residuals: Vec<f64> = eigenvectors.iter().zip(&vals).map(|(v, &l)| residual(h, cfg.exec, v, l)).collect();
    Ok(EigenResult { eigenvalues: vals, eigenvectors, residuals, iterations })
}

/// Lowest eigenpair.
pub fn ground_state<T: Scalar>(h: &CsrMatrix<T>, cfg: &SolverConfig) -> Result<EigenResult<T>> {
    lowest_k(h, 1, cfg)
}

/// Ground level with degeneracy detection: levels within
/// `degeneracy_rtol * |H|` of the lowest are collected together.
pub fn ground_space<T: Scalar>(h: &CsrMatrix<T>, cfg: &SolverConfig) -> Result<GroundSpace<T>> {
    let n = h.dim();
    if !cfg.check_degeneracy || n == 1 {
        let r = ground_state(h, cfg)?;
        return Ok(GroundSpace {
            energy: r.eigenvalues[0],
            residual: r.residuals[0],
            vectors: r.eigenvectors,
            next_energy: None,
        });
    }
    let gap_tol = cfg.degeneracy_rtol * h.norm_inf().max(f64::MIN_POSITIVE);
    let mut k = 2.min(n);
    loop {
        let r = lowest_k(h, k, cfg)?;
        let e0 = r.eigenvalues[0];
        let deg = r.eigenvalues.iter().take_while(|&&e| e - e0 <= gap_tol).count();
        if deg < k || k == n {
            let next_energy = r.eigenvalues.get(deg).copied();
            let residual = r.residuals[..deg].iter().copied().fold(0.0, f64::max);
            let vectors = r.eigenvectors.into_iter().take(deg).collect();
            return Ok(GroundSpace { energy: e0, vectors, next_energy, residual });
        }
        k = (k * 2).min(n);
    }
}
