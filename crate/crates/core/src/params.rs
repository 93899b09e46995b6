use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Truncation `l` and group resolution `big_l` (the `L` of Z_{2L+1}).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupParams {
    pub l: usize,
    pub big_l: usize,
}

impl GroupParams {
    pub fn new(l: usize, big_l: usize) -> Result<Self> {
        if big_l == 0 {
            return domain("L must be at least 1");
        }
        if l > big_l {
            return domain(format!("truncation l={l} exceeds group resolution L={big_l}"));
        }
        Ok(Self { l, big_l })
    }

    /// Order of the cyclic group, 2L+1.
    pub fn n(&self) -> usize {
        2 * self.big_l + 1
    }

    /// Registers hold values in [-l, l].
    pub fn local_dim(&self) -> usize {
        2 * self.l + 1
    }

    pub fn is_full(&self) -> bool {
        self.l == self.big_l
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingParams {
    pub g2: f64,
    #[serde(default = "one")]
    pub a: f64,
    #[serde(default)]
    pub m: f64,
    #[serde(default)]
    pub kappa: f64,
}

fn one() -> f64 {
    1.0
}

impl CouplingParams {
    pub fn new(g2: f64, a: f64, m: f64, kappa: f64) -> Result<Self> {
        if !(g2 > 0.0 && g2.is_finite()) {
            return domain(format!("g^2 must be positive and finite, got {g2}"));
        }
        if !(a > 0.0 && a.is_finite()) {
            return domain(format!("lattice spacing must be positive and finite, got {a}"));
        }
        if !m.is_finite() || !kappa.is_finite() {
            return domain("mass and kinetic strength must be finite");
        }
        Ok(Self { g2, a, m, kappa })
    }

    /// Pure gauge at unit lattice spacing, parametrized by beta = 1/g^2.
    pub fn pure_gauge(inv_g2: f64) -> Result<Self> {
        Self::new(1.0 / inv_g2, 1.0, 0.0, 0.0)
    }

    pub fn inv_g2(&self) -> f64 {
        1.0 / self.g2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Electric,
    Magnetic,
}

impl std::fmt::Display for Representation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Representation::Electric => "electric",
            Representation::Magnetic => "magnetic",
        })
    }
}

impl std::str::FromStr for Representation {
    type Err = crate::LgtError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "electric" | "e" => Ok(Representation::Electric),
            "magnetic" | "b" => Ok(Representation::Magnetic),
            _ => domain(format!("unknown representation '{s}'")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_validation() {
        assert!(GroupParams::new(3, 2).is_err());
        assert!(GroupParams::new(0, 0).is_err());
        let p = GroupParams::new(2, 5).unwrap();
        assert_eq!(p.n(), 11);
        assert_eq!(p.local_dim(), 5);
    }

    #[test]
    fn coupling_validation() {
        assert!(CouplingParams::new(0.0, 1.0, 0.0, 0.0).is_err());
        assert!(CouplingParams::new(1.0, -1.0, 0.0, 0.0).is_err());
        assert!(CouplingParams::new(1.0, 1.0, f64::NAN, 0.0).is_err());
        let c = CouplingParams::pure_gauge(10.0).unwrap();
        assert!((c.g2 - 0.1).abs() < 1e-15);
    }
}
