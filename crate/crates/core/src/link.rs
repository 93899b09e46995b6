//! Single plaquette written in five independent link fields instead of
//! rotators and strings. Used as an independent cross-check.

use crate::builder::BuildOptions;
use crate::error::Result;
use crate::model::{AssemblyOptions, LatticeModel, LinearForm, Monomial};
use crate::params::{CouplingParams, GroupParams, Representation};
use crate::sparse::CsrMatrix;

/// Register order of the retained links.
pub const E00X: usize = 0;
pub const E00Y: usize = 1;
pub const E01X: usize = 2;
pub const E10Y: usize = 3;
pub const E11X: usize = 4;

/// Charge-free link model. The plaquette sum carries a positive sign as
/// printed; flipping U on E11x, E00x and E01x maps it onto the usual
/// negative sign without changing the electric term.
pub fn link_model() -> LatticeModel {
    let f = |g: &[(usize, f64)]| LinearForm { gauge: g.to_vec(), charges: vec![], constant: 0.0 };
    LatticeModel {
        sites: vec![],
        n_gauge: 5,
        fields: vec![
            f(&[(E00X, 1.0)]),
            f(&[(E00Y, 1.0)]),
            f(&[(E01X, 1.0)]),
            f(&[(E10Y, 1.0)]),
            f(&[(E11X, 1.0)]),
            f(&[(E00Y, 1.0), (E01X, -1.0), (E11X, 1.0)]),
            f(&[(E01X, 1.0), (E11X, -1.0), (E10Y, 1.0)]),
            f(&[(E00X, 1.0), (E01X, 1.0), (E11X, -1.0)]),
        ],
        plaquettes: vec![
            Monomial::new(&[(E00X, 1), (E10Y, 1), (E01X, -1), (E00Y, -1)]),
            Monomial::new(&[(E00Y, 1), (E11X, -1), (E10Y, -1)]),
            Monomial::new(&[(E11X, 1)]),
            Monomial::new(&[(E01X, 1), (E00X, -1)]),
        ],
        hops: vec![],
        plaquette_sign: 1.0,
    }
}

#[derive(Debug, Clone)]
pub struct LinkHamiltonian {
    pub l: usize,
    pub h_e: CsrMatrix<f64>,
    pub h_b: CsrMatrix<f64>,
    pub total: CsrMatrix<f64>,
}

/// Electric-basis link Hamiltonian on (2l+1)^5 states.
pub fn build_link_formulation(l: usize, coupling: &CouplingParams, opts: &BuildOptions) -> Result<LinkHamiltonian> {
    let group = GroupParams::new(l, l.max(1))?;
    let aopts = AssemblyOptions {
        rep: Representation::Electric,
        group,
        cyclic: opts.cyclic,
        scheme: opts.scheme,
        exec: opts.exec,
        cap: opts.cap,
    };
    let parts = link_model().assemble::<f64>(coupling, &aopts)?;
    let total = parts.h_e.add(&parts.h_b);
    Ok(LinkHamiltonian { l, h_e: parts.h_e, h_b: parts.h_b, total })
}

/// Basis indices with both strings R_x = E00x + E01x and R_y = E00y + E10y zero.
pub fn zero_string_sector(l: usize) -> Vec<usize> {
    let d = 2 * l + 1;
    let li = l as i64;
    let layout = crate::basis::MixedRadix::new(vec![d; 5]).expect("small layout");
    (0..layout.dim())
        .filter(|&i| {
            let r: Vec<i64> = layout.digits(i).iter().map(|&x| x as i64 - li).collect();
            r[E00X] + r[E01X] == 0 && r[E00Y] + r[E10Y] == 0
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_and_hermiticity() {
        let c = CouplingParams::pure_gauge(1.0).unwrap();
        let h = build_link_formulation(1, &c, &BuildOptions::default()).unwrap();
        assert_eq!(h.total.dim(), 243);
        assert!(h.h_e.hermiticity_defect() < 1e-14);
        assert!(h.h_b.hermiticity_defect() < 1e-14);
    }

    #[test]
    fn plaquettes_conserve_strings() {
        let c = CouplingParams::pure_gauge(1.0).unwrap();
        let l = 1;
        let h = build_link_formulation(l, &c, &BuildOptions::default()).unwrap();
        let sector: std::collections::HashSet<usize> = zero_string_sector(l).into_iter().collect();
        for &i in &sector {
            for (j, _) in h.total.row(i) {
                assert!(sector.contains(&j));
            }
        }
    }
}
