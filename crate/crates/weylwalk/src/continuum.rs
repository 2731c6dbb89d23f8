//! Continuum-limit Hamiltonians H(p) = Σ_i B_i p_i + M.

use num_complex::Complex64 as C64;

use crate::linalg::CMat;
use crate::walk::{MassDecomposition, WalkSpec};

/// First-order momentum coefficients of the continuum Hamiltonian,
/// B_i = (a/dt) Σ_q A′_q q_i, plus the mass operator when present.
///
/// B_i is always built from the post-mass-extraction coins A′_q, so the
/// massless and massive formulas share one code path.
#[derive(Debug, Clone)]
pub struct BMatrices {
    pub b: Vec<CMat>,
    pub mass: Option<CMat>,
    pub d: usize,
    pub k: usize,
}

pub fn b_matrices(decomp: &MassDecomposition, spec: &WalkSpec) -> BMatrices {
    let d = spec.dim();
    let k = spec.internal_dim();
    let ratio = spec.scale().ratio();
    let mut b = vec![CMat::zeros((k, k)); d];
    for (q, coin) in &decomp.coins_prime {
        for i in 0..d {
            let weight = ratio * q[i] as f64;
            if weight != 0.0 {
                b[i].scaled_add(C64::new(weight, 0.0), coin);
            }
        }
    }
    BMatrices { b, mass: decomp.mass.clone(), d, k }
}

/// H(p) = Σ_i B_i p_i + M, with M absent meaning zero.
pub fn hamiltonian_symbol(bm: &BMatrices, p: &[f64]) -> CMat {
    assert_eq!(p.len(), bm.d, "momentum dimension mismatch");
    let mut h = match &bm.mass {
        Some(m) => m.clone(),
        None => CMat::zeros((bm.k, bm.k)),
    };
    for (bi, &pi) in bm.b.iter().zip(p) {
        if pi != 0.0 {
            h.scaled_add(C64::new(pi, 0.0), bi);
        }
    }
    h
}
