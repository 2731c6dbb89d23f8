//! Canonicalization of 2-level continuum Hamiltonians to Weyl form, and the
//! Lorentz diagnostics.
//!
//! Writing B_i = c_i𝟙 + n_i·σ, the drift c is removed and the real d×3
//! coupling matrix N (rows n_i) is brought to diagonal form by a real SVD:
//! N = Uᵀ-rotated momentum axes, γ-weighted, V-rotated spin axes. The sign
//! of det N is a physical output (chirality); the SVD's own sign freedom is
//! pushed into a fixed convention so outputs are deterministic.

use ndarray::{Array1, Array2};
use ndarray_linalg::SVD;
use num_complex::Complex64 as C64;

use crate::continuum::{hamiltonian_symbol, BMatrices};
use crate::error::WalkError;
use crate::linalg::{self, CMat};

/// B_i = c_i𝟙 + n_i·σ data for a 2-level system.
#[derive(Debug, Clone)]
pub struct PauliDecomposition {
    /// Drift coefficients c_i, one per spatial axis.
    pub drift: Vec<f64>,
    /// Coupling matrix N with rows n_i; N_{ij} = ½ Re tr(σ_j B_i).
    pub coupling: Array2<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Handedness {
    Right,
    Left,
    Degenerate,
}

impl std::fmt::Display for Handedness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Handedness::Right => write!(f, "right"),
            Handedness::Left => write!(f, "left"),
            Handedness::Degenerate => write!(f, "degenerate"),
        }
    }
}

/// The γ-weighted Weyl form H = Σ_i γ_i σ′_i P′_i + β·P.
#[derive(Debug, Clone)]
pub struct CanonicalForm {
    /// Singular values of N, descending.
    pub gamma: [f64; 3],
    pub handedness: Handedness,
    /// Orthogonal matrix acting on momentum axes: p′ = spatial_rotation · p.
    pub spatial_rotation: Array2<f64>,
    /// Orthogonal matrix acting on the Pauli vector: σ′_i = Σ_j R_{ij} σ_j.
    pub spin_rotation: Array2<f64>,
    /// Drift velocity β (the physically meaningless shift term).
    pub beta: Vec<f64>,
    /// Number of γ_i above the relative degeneracy threshold.
    pub effective_dim: usize,
}

/// Extract c_i = ½ Re tr(B_i) and N_{ij} = ½ Re tr(σ_j B_i).
///
/// Only defined for k = 2; larger internal spaces have no Pauli expansion
/// and are analyzed through the trace test instead.
pub fn pauli_decompose(bm: &BMatrices) -> Result<PauliDecomposition, WalkError> {
    if bm.k != 2 {
        return Err(WalkError::UnsupportedInternalDim { k: bm.k });
    }
    let mut drift = Vec::with_capacity(bm.d);
    let mut coupling = Array2::<f64>::zeros((bm.d, 3));
    for (i, bi) in bm.b.iter().enumerate() {
        drift.push(0.5 * trace(bi).re);
        for j in 0..3 {
            coupling[[i, j]] = 0.5 * trace(&linalg::pauli(j).dot(bi)).re;
        }
    }
    Ok(PauliDecomposition { drift, coupling })
}

fn trace(m: &CMat) -> C64 {
    (0..m.nrows()).map(|i| m[[i, i]]).sum()
}

/// Real SVD of the (zero-padded) 3×3 coupling matrix, with a deterministic
/// sign convention: each column of U gets a lexicographically positive
/// leading entry, then det U = +1 is restored by one final reflection of
/// the paired columns. Handedness is read off sign(det N).
pub fn canonicalize(pd: &PauliDecomposition, tol: f64) -> CanonicalForm {
    let d = pd.drift.len();
    assert!(d <= 3, "canonicalization supports d ≤ 3");
    let mut n3 = Array2::<f64>::zeros((3, 3));
    for i in 0..d {
        for j in 0..3 {
            n3[[i, j]] = pd.coupling[[i, j]];
        }
    }
    let det_n = det3(&n3);

    let (u_opt, s, vt_opt) = n3.svd(true, true).expect("svd of real 3×3");
    let mut u = u_opt.unwrap();
    let mut v = vt_opt.unwrap().reversed_axes().to_owned();
    let gamma = [s[0], s[1], s[2]];

    // Column sign fix: leading nonzero entry of each U column positive.
    for j in 0..3 {
        let lead = (0..3).map(|i| u[[i, j]]).find(|x| x.abs() > 1e-12);
        if let Some(x) = lead {
            if x < 0.0 {
                for i in 0..3 {
                    u[[i, j]] = -u[[i, j]];
                    v[[i, j]] = -v[[i, j]];
                }
            }
        }
    }
    // Single reflection to keep the spatial axes right-handed.
    if det3(&u) < 0.0 {
        for i in 0..3 {
            u[[i, 2]] = -u[[i, 2]];
            v[[i, 2]] = -v[[i, 2]];
        }
    }

    let degenerate = gamma[0] <= tol || gamma.iter().any(|&g| g <= tol * gamma[0]);
    let effective_dim = if gamma[0] <= tol {
        0
    } else {
        gamma.iter().filter(|&&g| g > tol * gamma[0]).count()
    };
    let handedness = if degenerate {
        Handedness::Degenerate
    } else if det_n > 0.0 {
        Handedness::Right
    } else {
        Handedness::Left
    };

    CanonicalForm {
        gamma,
        handedness,
        spatial_rotation: u.reversed_axes().to_owned(),
        spin_rotation: v.reversed_axes().to_owned(),
        beta: pd.drift.clone(),
        effective_dim,
    }
}

/// Max over samples of ‖(H(p) − (β·p)𝟙)² − (Σ_i γ_i² p′_i²)𝟙‖ with
/// p′ = spatial_rotation·p. Vanishing residual certifies the Pauli
/// anticommutation algebra, i.e. Weyl form up to axis relabeling.
pub fn weyl_residual(
    cf: &CanonicalForm,
    bm: &BMatrices,
    samples: &[Vec<f64>],
) -> Result<f64, WalkError> {
    if bm.k != 2 {
        return Err(WalkError::UnsupportedInternalDim { k: bm.k });
    }
    let mut worst = 0.0f64;
    for p in samples {
        let h = hamiltonian_symbol(bm, p);
        let drift: f64 = cf.beta.iter().zip(p).map(|(b, x)| b * x).sum();
        let shifted = h - linalg::identity(2).mapv(|z| z * drift);
        let mut p3 = [0.0; 3];
        for (i, &x) in p.iter().enumerate() {
            p3[i] = x;
        }
        let pprime: Vec<f64> = (0..3)
            .map(|i| (0..3).map(|j| cf.spatial_rotation[[i, j]] * p3[j]).sum())
            .collect();
        let target: f64 = cf
            .gamma
            .iter()
            .zip(&pprime)
            .map(|(g, pp)| g * g * pp * pp)
            .sum();
        let resid = linalg::norm2(
            &(shifted.dot(&shifted) - linalg::identity(2).mapv(|z| z * target)),
        );
        worst = worst.max(resid);
    }
    Ok(worst)
}

/// tr(H(p)²) − k·|p|².
///
/// Zero for any canonical 2-level Weyl Hamiltonian; −|p|² for the spin-1
/// walk, witnessing the failure of Lorentz invariance.
pub fn lorentz_trace_test(bm: &BMatrices, p: &[f64; 3]) -> f64 {
    let h = hamiltonian_symbol(bm, p);
    let h2 = h.dot(&h);
    let p2: f64 = p.iter().map(|x| x * x).sum();
    trace(&h2).re - bm.k as f64 * p2
}

fn det3(m: &Array2<f64>) -> f64 {
    m[[0, 0]] * (m[[1, 1]] * m[[2, 2]] - m[[1, 2]] * m[[2, 1]])
        - m[[0, 1]] * (m[[1, 0]] * m[[2, 2]] - m[[1, 2]] * m[[2, 0]])
        + m[[0, 2]] * (m[[1, 0]] * m[[2, 1]] - m[[1, 1]] * m[[2, 0]])
}

/// Rebuild B_i = c_i𝟙 + Σ_j N_{ij}σ_j from decomposition data; used by the
/// reconstruction checks.
pub fn assemble_b(drift: &[f64], coupling: &Array2<f64>, mass: Option<CMat>) -> BMatrices {
    let d = drift.len();
    let mut b = Vec::with_capacity(d);
    for i in 0..d {
        let mut bi = linalg::identity(2).mapv(|z| z * drift[i]);
        for j in 0..3 {
            bi.scaled_add(C64::new(coupling[[i, j]], 0.0), &linalg::pauli(j));
        }
        b.push(bi);
    }
    BMatrices { b, mass, d, k: 2 }
}

/// Verify N = spatial_rotationᵀ·diag(γ)·spin_rotation (zero-padded rows for
/// d < 3). Returns the reconstruction error.
pub fn reconstruction_residual(cf: &CanonicalForm, pd: &PauliDecomposition) -> f64 {
    let gamma = Array2::from_diag(&Array1::from(cf.gamma.to_vec()));
    let rebuilt = cf.spatial_rotation.t().dot(&gamma).dot(&cf.spin_rotation);
    let d = pd.drift.len();
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let want = if i < d { pd.coupling[[i, j]] } else { 0.0 };
            worst = worst.max((rebuilt[[i, j]] - want).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuum::b_matrices;
    use crate::linalg::{expm_i_hermitian, norm2, pauli, spin1_generator};
    use crate::walk::LatticeScale;
    use crate::zoo;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bcc_bm() -> BMatrices {
        let spec = zoo::bcc_weyl_3d(LatticeScale::unit());
        b_matrices(&spec.mass_decompose(1e-10).unwrap(), &spec)
    }

    #[test]
    fn decompose_sigma_z_1d() {
        let bm = BMatrices { b: vec![pauli(2)], mass: None, d: 1, k: 2 };
        let pd = pauli_decompose(&bm).unwrap();
        assert_eq!(pd.drift, vec![0.0]);
        assert_eq!(pd.coupling[[0, 0]], 0.0);
        assert_eq!(pd.coupling[[0, 1]], 0.0);
        assert_eq!(pd.coupling[[0, 2]], 1.0);
    }

    #[test]
    fn decompose_with_drift() {
        let b1 = crate::linalg::identity(2).mapv(|z| z * 2.0) + pauli(0);
        let bm = BMatrices { b: vec![b1], mass: None, d: 1, k: 2 };
        let pd = pauli_decompose(&bm).unwrap();
        assert!((pd.drift[0] - 2.0).abs() < 1e-15);
        assert!((pd.coupling[[0, 0]] - 1.0).abs() < 1e-15);
        assert!(pd.coupling[[0, 1]].abs() < 1e-15);
        assert!(pd.coupling[[0, 2]].abs() < 1e-15);
    }

    #[test]
    fn decompose_bcc_is_identity_coupling() {
        let pd = pauli_decompose(&bcc_bm()).unwrap();
        for i in 0..3 {
            assert!(pd.drift[i].abs() < 1e-13);
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((pd.coupling[[i, j]] - want).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn refuses_spin1() {
        let spec = zoo::spin1_3d(LatticeScale::unit());
        let bm = b_matrices(&spec.mass_decompose(1e-10).unwrap(), &spec);
        assert!(matches!(
            pauli_decompose(&bm),
            Err(WalkError::UnsupportedInternalDim { k: 3 })
        ));
    }

    #[test]
    fn canonicalize_identity_coupling() {
        let pd = pauli_decompose(&bcc_bm()).unwrap();
        let cf = canonicalize(&pd, 1e-10);
        for g in cf.gamma {
            assert!((g - 1.0).abs() < 1e-12);
        }
        assert_eq!(cf.handedness, Handedness::Right);
        assert_eq!(cf.effective_dim, 3);
        assert!(reconstruction_residual(&cf, &pd) < 1e-12);
    }

    #[test]
    fn reflection_gives_left_handed() {
        let mut coupling = Array2::<f64>::eye(3);
        coupling[[2, 2]] = -1.0;
        let pd = PauliDecomposition { drift: vec![0.0; 3], coupling };
        let cf = canonicalize(&pd, 1e-10);
        assert_eq!(cf.handedness, Handedness::Left);
        for g in cf.gamma {
            assert!((g - 1.0).abs() < 1e-14);
        }
        assert!(reconstruction_residual(&cf, &pd) < 1e-12);
    }

    #[test]
    fn rank_two_is_degenerate() {
        let coupling = Array2::from_diag(&Array1::from(vec![3.0, 2.0, 0.0]));
        let pd = PauliDecomposition { drift: vec![0.0; 3], coupling };
        let cf = canonicalize(&pd, 1e-10);
        assert_eq!(cf.handedness, Handedness::Degenerate);
        assert_eq!(cf.effective_dim, 2);
        assert!((cf.gamma[0] - 3.0).abs() < 1e-14);
        assert!((cf.gamma[1] - 2.0).abs() < 1e-14);
        assert!(cf.gamma[2].abs() < 1e-14);
    }

    #[test]
    fn rotations_are_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let coupling = Array2::from_shape_fn((3, 3), |_| rng.gen_range(-1.0..1.0));
            let pd = PauliDecomposition { drift: vec![0.0; 3], coupling };
            let cf = canonicalize(&pd, 1e-10);
            for r in [&cf.spatial_rotation, &cf.spin_rotation] {
                let res = r.dot(&r.t()) - Array2::<f64>::eye(3);
                let worst = res.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                assert!(worst < 1e-10);
            }
            assert!(reconstruction_residual(&cf, &pd) < 1e-10);
        }
    }

    fn rotation_matrix(axis: usize, theta: f64) -> Array2<f64> {
        // Adjoint action: exp(θ [ê]×) as a real matrix.
        let j = spin1_generator(axis);
        expm_i_hermitian(&j, theta).mapv(|z| z.re)
    }

    #[test]
    fn gamma_invariant_under_axis_rotations_and_spin_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let coupling = Array2::from_shape_fn((3, 3), |_| rng.gen_range(-1.0..1.0));
            let drift: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.5..0.5)).collect();
            let pd = PauliDecomposition { drift: drift.clone(), coupling: coupling.clone() };
            let base = canonicalize(&pd, 1e-10);

            // Rotate momentum axes: N → R N.
            let r = rotation_matrix(rng.gen_range(0..3), rng.gen_range(0.0..6.0));
            // Conjugate spins by an SU(2) element: n_i·σ → n_i·(Oᵀσ), N → N O... either
            // way an SO(3) action on the σ index.
            let o = rotation_matrix(rng.gen_range(0..3), rng.gen_range(0.0..6.0));
            let transformed = PauliDecomposition {
                drift,
                coupling: r.dot(&coupling).dot(&o),
            };
            let moved = canonicalize(&transformed, 1e-10);
            for i in 0..3 {
                assert!((base.gamma[i] - moved.gamma[i]).abs() < 1e-10);
            }
            assert_eq!(base.handedness, moved.handedness);

            // A single-axis momentum reflection flips handedness.
            let mut refl = coupling.clone();
            for j in 0..3 {
                refl[[0, j]] = -refl[[0, j]];
            }
            let flipped = canonicalize(
                &PauliDecomposition { drift: vec![0.0; 3], coupling: refl },
                1e-10,
            );
            match base.handedness {
                Handedness::Right => assert_eq!(flipped.handedness, Handedness::Left),
                Handedness::Left => assert_eq!(flipped.handedness, Handedness::Right),
                Handedness::Degenerate => assert_eq!(flipped.handedness, Handedness::Degenerate),
            }
        }
    }

    #[test]
    fn orthogonal_row_rescaling_scales_one_gamma() {
        let coupling = Array2::from_diag(&Array1::from(vec![1.0, 2.0, 4.0]));
        let pd = PauliDecomposition { drift: vec![0.0; 3], coupling: coupling.clone() };
        let base = canonicalize(&pd, 1e-10);
        let mut scaled = coupling;
        for j in 0..3 {
            scaled[[1, j]] *= 3.0;
        }
        let moved = canonicalize(
            &PauliDecomposition { drift: vec![0.0; 3], coupling: scaled },
            1e-10,
        );
        // Row 1 had singular value 2; scaled by 3 it becomes 6 (new γ₁).
        assert!((moved.gamma[0] - 6.0).abs() < 1e-13);
        assert!((moved.gamma[1] - base.gamma[0]).abs() < 1e-13);
        assert!((moved.gamma[2] - base.gamma[2]).abs() < 1e-13);
    }

    #[test]
    fn weyl_residual_of_bcc() {
        let bm = bcc_bm();
        let pd = pauli_decompose(&bm).unwrap();
        let cf = canonicalize(&pd, 1e-10);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let samples: Vec<Vec<f64>> = (0..50)
            .map(|_| (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect())
            .collect();
        assert!(weyl_residual(&cf, &bm, &samples).unwrap() < 1e-10);
    }

    #[test]
    fn weyl_residual_of_1d_walk() {
        let spec = zoo::massless_1d(LatticeScale::unit());
        let bm = b_matrices(&spec.mass_decompose(1e-10).unwrap(), &spec);
        let pd = pauli_decompose(&bm).unwrap();
        let cf = canonicalize(&pd, 1e-10);
        assert!((cf.gamma[0] - 1.0).abs() < 1e-13);
        assert!(cf.gamma[1].abs() < 1e-13);
        assert_eq!(cf.handedness, Handedness::Degenerate);
        let samples: Vec<Vec<f64>> = (-10..=10).map(|i| vec![0.3 * i as f64]).collect();
        assert!(weyl_residual(&cf, &bm, &samples).unwrap() < 1e-10);
    }

    #[test]
    fn degenerate_rank_one_residual() {
        // Parallel rows: N has rank 1, residual still vanishes with the
        // degenerate γ respected.
        let bm = BMatrices { b: vec![pauli(0), pauli(0)], mass: None, d: 2, k: 2 };
        let pd = pauli_decompose(&bm).unwrap();
        let cf = canonicalize(&pd, 1e-10);
        assert_eq!(cf.effective_dim, 1);
        let samples = vec![vec![0.7, -0.4], vec![1.0, 2.0]];
        assert!(weyl_residual(&cf, &bm, &samples).unwrap() < 1e-10);
    }

    #[test]
    fn residual_invariant_under_beta_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let coupling = Array2::from_shape_fn((3, 3), |_| rng.gen_range(-1.0..1.0));
        let samples: Vec<Vec<f64>> = (0..20)
            .map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let base_pd = PauliDecomposition { drift: vec![0.0; 3], coupling: coupling.clone() };
        let bm0 = assemble_b(&base_pd.drift, &base_pd.coupling, None);
        let r0 = weyl_residual(&canonicalize(&base_pd, 1e-10), &bm0, &samples).unwrap();
        let shift = vec![0.4, -1.1, 0.9];
        let shifted_pd = PauliDecomposition { drift: shift.clone(), coupling };
        let bm1 = assemble_b(&shifted_pd.drift, &shifted_pd.coupling, None);
        let r1 = weyl_residual(&canonicalize(&shifted_pd, 1e-10), &bm1, &samples).unwrap();
        assert!((r0 - r1).abs() < 1e-10);
    }

    #[test]
    fn trace_test_values() {
        let bm = bcc_bm();
        assert!(lorentz_trace_test(&bm, &[0.3, -0.2, 0.1]).abs() < 1e-12);

        let spec = zoo::spin1_3d(LatticeScale::unit());
        let bms = b_matrices(&spec.mass_decompose(1e-10).unwrap(), &spec);
        assert!((lorentz_trace_test(&bms, &[0.0, 0.0, 1.0]) + 1.0).abs() < 1e-12);
        assert!((lorentz_trace_test(&bms, &[0.6, 0.0, 0.8]) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn spin1_rotational_covariance() {
        let spec = zoo::spin1_3d(LatticeScale::unit());
        let bm = b_matrices(&spec.mass_decompose(1e-10).unwrap(), &spec);
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..10 {
            let axis: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
            let n: Vec<f64> = axis.iter().map(|x| x / norm).collect();
            let theta = rng.gen_range(0.0..6.0);
            let mut gen = CMat::zeros((3, 3));
            for i in 0..3 {
                gen.scaled_add(C64::new(n[i], 0.0), &spin1_generator(i));
            }
            // In the adjoint representation e^{−iθ n·J} *is* the rotation matrix.
            let u = expm_i_hermitian(&gen, theta);
            let r = u.mapv(|z| z.re);
            let p: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.5..1.5)).collect();
            let rp: Vec<f64> = (0..3)
                .map(|i| (0..3).map(|j| r[[i, j]] * p[j]).sum())
                .collect();
            let lhs = u
                .dot(&hamiltonian_symbol(&bm, &p))
                .dot(&crate::linalg::dagger(&u));
            let rhs = hamiltonian_symbol(&bm, &rp);
            assert!(norm2(&(lhs - rhs)) < 1e-8);
        }
    }
}
