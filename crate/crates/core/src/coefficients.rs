//! Expansion coefficients that rewrite r and r^2 on Z_{2L+1} as finite
//! Fourier sums, and the polygamma functions that give them in closed form.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;

use crate::error::{domain, Result};

const SHIFT: f64 = 10.0;

/// psi_0(x) for x > 0.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return domain(format!("digamma needs a positive finite argument, got {x}"));
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < SHIFT {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let z = 1.0 / (x * x);
    // Bernoulli tail: -sum B_2k / (2k x^2k)
    let tail = z
        * (-1.0 / 12.0
            + z * (1.0 / 120.0
                + z * (-1.0 / 252.0
                    + z * (1.0 / 240.0 + z * (-1.0 / 132.0 + z * (691.0 / 32760.0 - z / 12.0))))));
    Ok(acc + x.ln() - 0.5 / x + tail)
}

/// psi_1(x) for x > 0.
pub fn trigamma(x: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return domain(format!("trigamma needs a positive finite argument, got {x}"));
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < SHIFT {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let z = 1.0 / (x * x);
    let tail = z
        * (1.0 / 6.0
            + z * (-1.0 / 30.0
                + z * (1.0 / 42.0
                    + z * (-1.0 / 30.0 + z * (5.0 / 66.0 + z * (-691.0 / 2730.0 + z * 7.0 / 6.0))))));
    Ok(acc + 1.0 / x + 0.5 * z + tail / x)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplacementCoefficients {
    pub big_l: usize,
    /// f^s_nu for nu = 1..=2L
    pub sine: Vec<f64>,
    /// f^c_nu for nu = 1..=2L
    pub cosine: Vec<f64>,
    /// L(L+1)/3
    pub offset: f64,
}

impl ReplacementCoefficients {
    pub fn compute(big_l: usize) -> Result<Self> {
        if big_l == 0 {
            return domain("L must be at least 1");
        }
        let n = (2 * big_l + 1) as f64;
        let mut sine = Vec::with_capacity(2 * big_l);
        let mut cosine = Vec::with_capacity(2 * big_l);
        for nu in 1..=2 * big_l {
            let sign = if nu % 2 == 0 { 1.0 } else { -1.0 };
            let lo = nu as f64 / (2.0 * n);
            let hi = (n + nu as f64) / (2.0 * n);
            sine.push(-sign / (2.0 * PI) * (digamma(hi)? - digamma(lo)?));
            cosine.push(sign / (4.0 * PI * PI) * (trigamma(lo)? - trigamma(hi)?));
        }
        let lf = big_l as f64;
        Ok(Self { big_l, sine, cosine, offset: lf * (lf + 1.0) / 3.0 })
    }

    pub fn n(&self) -> usize {
        2 * self.big_l + 1
    }

    /// sum_nu f^s_nu sin(2 pi nu r / N), equal to r on the grid.
    pub fn linear(&self, r: i64) -> f64 {
        let th = 2.0 * PI / self.n() as f64;
        self.sine.iter().enumerate().map(|(k, f)| f * (th * (k + 1) as f64 * r as f64).sin()).sum()
    }

    /// sum_nu f^c_nu cos(2 pi nu r / N) + L(L+1)/3, equal to r^2 on the grid.
    pub fn quadratic(&self, r: i64) -> f64 {
        let th = 2.0 * PI / self.n() as f64;
        self.offset
            + self
                .cosine
                .iter()
                .enumerate()
                .map(|(k, f)| f * (th * (k + 1) as f64 * r as f64).cos())
                .sum::<f64>()
    }
}

/// Memoized coefficients for `big_l`.
pub fn replacement_coefficients(big_l: usize) -> Result<Arc<ReplacementCoefficients>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<ReplacementCoefficients>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(c) = cache.lock().expect("coefficient cache poisoned").get(&big_l) {
        return Ok(c.clone());
    }
    let c = Arc::new(ReplacementCoefficients::compute(big_l)?);
    cache.lock().expect("coefficient cache poisoned").insert(big_l, c.clone());
    Ok(c)
}
