//! Named walk constructions, buildable by name with parameters.
//!
//! Coin families for product walks are expanded symbolically over the
//! displacement lattice (exact complex coefficients), so support sets and
//! the K, qmax constants of the convergence bounds come out exact.

use std::collections::BTreeMap;

use ndarray::concatenate;
use ndarray::Axis;
use num_complex::Complex64 as C64;

use crate::linalg::{self, CMat};
use crate::walk::{LatticeScale, WalkSpec};

/// The 1D two-state walk U_D = S|r⟩⟨r| + S†|l⟩⟨l|.
pub fn massless_1d(scale: LatticeScale) -> WalkSpec {
    let mut coins: BTreeMap<Vec<i64>, CMat> = BTreeMap::new();
    coins.insert(vec![1], projector_up(&linalg::pauli(2)));
    coins.insert(vec![-1], projector_down(&linalg::pauli(2)));
    WalkSpec::new(1, 2, coins, scale).expect("static construction")
}

/// The 1D massive walk W(S|r⟩⟨r| + S†|l⟩⟨l|) with W = e^{−i m dt σ_x}.
pub fn massive_1d(m: f64, scale: LatticeScale) -> WalkSpec {
    let w = linalg::expm_i_hermitian(&linalg::pauli(0), m * scale.dt);
    massless_1d(scale).premultiply(&w)
}

/// The 3D two-state walk U_D = T_x T_y T_z over the BCC neighbourhood
/// {±1}³, each T_b a conditional shift along σ_b. Its continuum limit is the
/// right-handed Weyl Hamiltonian.
pub fn bcc_weyl_3d(scale: LatticeScale) -> WalkSpec {
    bcc_chiral_3d(scale, false)
}

/// The same construction with the spin-up/spin-down roles swapped
/// (σ_b → −σ_b), giving the left-handed partner.
pub fn bcc_weyl_left_3d(scale: LatticeScale) -> WalkSpec {
    bcc_chiral_3d(scale, true)
}

fn bcc_chiral_3d(scale: LatticeScale, flip: bool) -> WalkSpec {
    let mut walk: Option<WalkSpec> = None;
    for axis in [0usize, 1, 2] {
        let sigma = linalg::pauli(axis);
        let (up, down) = if flip {
            (projector_down(&sigma), projector_up(&sigma))
        } else {
            (projector_up(&sigma), projector_down(&sigma))
        };
        let t = conditional_shift(3, axis, 2, &[(1, up), (-1, down)], scale);
        walk = Some(match walk {
            // product order T_x T_y T_z, leftmost applied last
            Some(acc) => acc.compose(&t),
            None => t,
        });
    }
    walk.unwrap()
}

/// The 3-state walk U_D = T_x T_y T_z with T_b = exp(−i a P_b J_b), support
/// {−1,0,1}³. Rotationally symmetric in the continuum (H = J·P) but not
/// Lorentz invariant.
pub fn spin1_3d(scale: LatticeScale) -> WalkSpec {
    let mut walk: Option<WalkSpec> = None;
    for axis in [0usize, 1, 2] {
        let j = linalg::spin1_generator(axis);
        // Eigenprojectors of J_b via its characteristic polynomial:
        // P_{±1} = J(J ± 1)/2, P_0 = 𝟙 − J².
        let jj = j.dot(&j);
        let p_plus = (&jj + &j).mapv(|z| z * 0.5);
        let p_minus = (&jj - &j).mapv(|z| z * 0.5);
        let p_zero = linalg::identity(3) - &jj;
        let t = conditional_shift(
            3,
            axis,
            3,
            &[(1, p_plus), (0, p_zero), (-1, p_minus)],
            scale,
        );
        walk = Some(match walk {
            Some(acc) => acc.compose(&t),
            None => t,
        });
    }
    walk.unwrap()
}

/// The 3D Dirac walk: a right-handed and a left-handed BCC Weyl walk in
/// 2×2 block form, premultiplied by W = e^{−i m dt β̂} where β̂ swaps the two
/// chiral blocks. Continuum eigenvalues are ±√(|p|² + m²).
pub fn dirac_3d(m: f64, scale: LatticeScale) -> WalkSpec {
    let right = bcc_weyl_3d(scale);
    let left = bcc_weyl_left_3d(scale);
    let mut coins: BTreeMap<Vec<i64>, CMat> = BTreeMap::new();
    for (q, ar) in right.coins() {
        let al = &left.coins()[q];
        coins.insert(q.clone(), block_diag(ar, al));
    }
    let massless = WalkSpec::new(3, 4, coins, scale).expect("static construction");
    let w = linalg::expm_i_hermitian(&beta_hat(), m * scale.dt);
    massless.premultiply(&w)
}

/// The block-swap involution β̂ = [[0, 𝟙], [𝟙, 0]] mixing the chiralities.
pub fn beta_hat() -> CMat {
    let mut b = CMat::zeros((4, 4));
    for i in 0..2 {
        b[[i, i + 2]] = C64::new(1.0, 0.0);
        b[[i + 2, i]] = C64::new(1.0, 0.0);
    }
    b
}

/// A single-axis conditional shift Σ_s S_{s·ê_axis} Π_s from (shift, coin)
/// pairs.
pub fn conditional_shift(
    d: usize,
    axis: usize,
    k: usize,
    terms: &[(i64, CMat)],
    scale: LatticeScale,
) -> WalkSpec {
    let mut coins: BTreeMap<Vec<i64>, CMat> = BTreeMap::new();
    for (shift, coin) in terms {
        let mut q = vec![0i64; d];
        q[axis] = *shift;
        coins
            .entry(q)
            .and_modify(|acc| *acc += coin)
            .or_insert_with(|| coin.clone());
    }
    WalkSpec::new(d, k, coins, scale).expect("conditional shift construction")
}

fn projector_up(sigma: &CMat) -> CMat {
    (linalg::identity(2) + sigma).mapv(|z| z * 0.5)
}

fn projector_down(sigma: &CMat) -> CMat {
    (linalg::identity(2) - sigma).mapv(|z| z * 0.5)
}

fn block_diag(a: &CMat, b: &CMat) -> CMat {
    let (n, m) = (a.nrows(), b.nrows());
    let top = concatenate![Axis(1), a.clone(), CMat::zeros((n, m))];
    let bottom = concatenate![Axis(1), CMat::zeros((m, n)), b.clone()];
    concatenate![Axis(0), top, bottom]
}

/// A named zoo entry.
pub struct ZooEntry {
    pub name: &'static str,
    pub description: &'static str,
    /// Whether the builder uses the mass parameter.
    pub massive: bool,
}

pub const ENTRIES: &[ZooEntry] = &[
    ZooEntry {
        name: "massless_1d",
        description: "1D two-state conditional shift; exact continuum limit H = σ_z p (a/dt)",
        massive: false,
    },
    ZooEntry {
        name: "massive_1d",
        description: "1D walk with W = e^{−i m dt σ_x}; continuum limit is the 1D Dirac Hamiltonian",
        massive: true,
    },
    ZooEntry {
        name: "bcc_weyl_3d",
        description: "3D two-state walk on the BCC neighbourhood; continuum limit is the right-handed Weyl Hamiltonian",
        massive: false,
    },
    ZooEntry {
        name: "spin1_3d",
        description: "3D three-state walk with H = J·P in the continuum; rotationally but not Lorentz symmetric",
        massive: false,
    },
    ZooEntry {
        name: "dirac_3d",
        description: "two chiral BCC walks mixed by a mass term; continuum eigenvalues ±sqrt(p² + m²)",
        massive: true,
    },
];

/// Build a zoo walk by name. `bb_weyl_3d` is accepted as an alias for
/// `bcc_weyl_3d`.
pub fn build(name: &str, mass: f64, scale: LatticeScale) -> Option<WalkSpec> {
    match name {
        "massless_1d" => Some(massless_1d(scale)),
        "massive_1d" => Some(massive_1d(mass, scale)),
        "bcc_weyl_3d" | "bb_weyl_3d" => Some(bcc_weyl_3d(scale)),
        "spin1_3d" => Some(spin1_3d(scale)),
        "dirac_3d" => Some(dirac_3d(mass, scale)),
        _ => None,
    }
}
