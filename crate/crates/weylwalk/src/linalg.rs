//! Small dense complex matrix helpers shared across the crate.
//!
//! Everything here operates on k×k matrices with k of order 2..4, so
//! routines favour robustness over asymptotic cleverness.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, Eigh, Inverse, SVD, UPLO};
use num_complex::Complex64 as C64;

use crate::error::WalkError;

pub type CMat = Array2<C64>;

pub fn identity(k: usize) -> CMat {
    Array2::eye(k)
}

pub fn dagger(m: &CMat) -> CMat {
    m.t().mapv(|z| z.conj())
}

/// Operator 2-norm (largest singular value).
pub fn norm2(m: &CMat) -> f64 {
    let (_, s, _) = m.svd(false, false).expect("svd of finite matrix");
    s.iter().cloned().fold(0.0, f64::max)
}

/// ‖m − m†‖₂, zero for Hermitian matrices.
pub fn hermiticity_residual(m: &CMat) -> f64 {
    norm2(&(m - &dagger(m)))
}

/// ‖m†m − 𝟙‖₂, zero for unitaries.
pub fn unitarity_residual(m: &CMat) -> f64 {
    let k = m.nrows();
    norm2(&(dagger(m).dot(m) - identity(k)))
}

/// Eigendecomposition h = V diag(vals) V† of a Hermitian matrix, ascending
/// eigenvalues, V's columns the eigenvectors.
///
/// The backend's `eigh` hands back conjugated eigenvectors for row-major
/// complex input (it diagonalizes the column-major reinterpretation, which
/// for a Hermitian matrix is the conjugate). Normalize the layout and undo
/// the conjugation here so callers always get eigenvectors of `h` itself.
pub fn eigh_pairs(h: &CMat) -> (Array1<f64>, CMat) {
    let hc: CMat = h.as_standard_layout().to_owned();
    let (vals, vecs) = hc.eigh(UPLO::Lower).expect("eigh of Hermitian matrix");
    (vals, vecs.mapv(|z| z.conj()))
}

/// e^{−i·h·s} for Hermitian `h` via eigendecomposition.
pub fn expm_i_hermitian(h: &CMat, s: f64) -> CMat {
    let (vals, vecs) = eigh_pairs(h);
    let phases: Array1<C64> = vals.mapv(|w| (-C64::i() * w * s).exp());
    let scaled = &vecs * &phases.insert_axis(ndarray::Axis(0));
    scaled.dot(&dagger(&vecs))
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigvalsh(h: &CMat) -> Vec<f64> {
    let (vals, _) = h.eigh(UPLO::Lower).expect("eigh of Hermitian matrix");
    vals.to_vec()
}

/// Eigenphases θ_j of a unitary, defined by eigenvalues e^{−iθ_j} with
/// θ_j ∈ (−π, π], sorted ascending.
pub fn eigenphases(u: &CMat) -> Vec<f64> {
    let (vals, _) = u.eig().expect("eig of unitary matrix");
    let mut phases: Vec<f64> = vals.iter().map(|z| -z.arg()).collect();
    phases.sort_by(|a, b| a.partial_cmp(b).unwrap());
    phases
}

/// Principal logarithm of a unitary, returned as the Hermitian generator G
/// with `w = e^{iG}` and eigenvalues of G in (−π, π).
///
/// Eigenphases within `branch_tol` of ±π are rejected: there the principal
/// branch is ambiguous and the caller has to decide.
pub fn principal_log_unitary(w: &CMat, branch_tol: f64) -> Result<CMat, WalkError> {
    let (vals, vecs) = w.eig().expect("eig of unitary matrix");
    let mut log_diag = Array1::<C64>::zeros(vals.len());
    for (j, z) in vals.iter().enumerate() {
        let phi = z.arg();
        if std::f64::consts::PI - phi.abs() <= branch_tol {
            return Err(WalkError::BranchAmbiguity { eigenphase: phi });
        }
        log_diag[j] = C64::new(phi, 0.0);
    }
    let vinv = vecs.inv().map_err(|_| WalkError::SingularEigenbasis)?;
    let scaled = &vecs * &log_diag.insert_axis(ndarray::Axis(0));
    let g = scaled.dot(&vinv);
    // w is normal, so G is Hermitian up to roundoff; symmetrize.
    Ok((&g + &dagger(&g)).mapv(|z| z * 0.5))
}

/// u^n by binary powering.
pub fn matrix_power(u: &CMat, n: u64) -> CMat {
    let mut result = identity(u.nrows());
    let mut base = u.clone();
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            result = result.dot(&base);
        }
        base = base.dot(&base);
        e >>= 1;
    }
    result
}

/// The Pauli matrices σ_x, σ_y, σ_z.
pub fn pauli(axis: usize) -> CMat {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    let i = C64::i();
    match axis {
        0 => ndarray::array![[o, l], [l, o]],
        1 => ndarray::array![[o, -i], [i, o]],
        2 => ndarray::array![[l, o], [o, -l]],
        _ => panic!("pauli axis out of range: {axis}"),
    }
}

/// Spin-1 generators (J_i)_{jk} = −i ε_{ijk}, the adjoint representation
/// of so(3).
pub fn spin1_generator(axis: usize) -> CMat {
    let mut j = CMat::zeros((3, 3));
    for r in 0..3 {
        for c in 0..3 {
            let eps = levi_civita(axis, r, c);
            if eps != 0 {
                j[[r, c]] = C64::new(0.0, -(eps as f64));
            }
        }
    }
    j
}

fn levi_civita(i: usize, j: usize, k: usize) -> i32 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn pauli_algebra() {
        for i in 0..3 {
            let s = pauli(i);
            assert!(norm2(&(s.dot(&s) - identity(2))) < 1e-15);
            assert!(hermiticity_residual(&s) < 1e-15);
        }
        // σ_x σ_y = i σ_z
        let lhs = pauli(0).dot(&pauli(1));
        let rhs = pauli(2).mapv(|z| z * C64::i());
        assert!(norm2(&(lhs - rhs)) < 1e-15);
    }

    #[test]
    fn spin1_commutators() {
        // [J_x, J_y] = i J_z and cyclic.
        for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            let comm = spin1_generator(a).dot(&spin1_generator(b))
                - spin1_generator(b).dot(&spin1_generator(a));
            let rhs = spin1_generator(c).mapv(|z| z * C64::i());
            assert!(norm2(&(comm - rhs)) < 1e-15);
        }
    }

    #[test]
    fn expm_matches_scalar_rotation() {
        // e^{−iθσ_x} = cos θ − i sin θ σ_x
        let theta = 0.37;
        let got = expm_i_hermitian(&pauli(0), theta);
        let want = identity(2).mapv(|z| z * theta.cos())
            - pauli(0).mapv(|z| z * C64::i() * theta.sin());
        assert!(norm2(&(got - want)) < 1e-14);
    }

    #[test]
    fn eigh_pairs_reconstructs_complex_hermitian() {
        // σ_y exercises the complex row-major path where the raw backend
        // eigenvectors come back conjugated.
        for h in [pauli(0), pauli(1), pauli(2)] {
            let (vals, vecs) = eigh_pairs(&h);
            let lam = Array1::from_vec(vals.iter().map(|&w| C64::new(w, 0.0)).collect());
            let scaled = &vecs * &lam.insert_axis(ndarray::Axis(0));
            let back = scaled.dot(&dagger(&vecs));
            assert!(norm2(&(back - h)) < 1e-14);
        }
    }

    #[test]
    fn expm_matches_scalar_rotation_sigma_y() {
        let theta = 0.25;
        let got = expm_i_hermitian(&pauli(1), theta);
        let want = identity(2).mapv(|z| z * theta.cos())
            - pauli(1).mapv(|z| z * C64::i() * theta.sin());
        assert!(norm2(&(got - want)) < 1e-14);
    }

    #[test]
    fn log_recovers_generator() {
        let theta = 0.25;
        let w = expm_i_hermitian(&pauli(1), theta); // e^{−iθσ_y} = e^{i(−θσ_y)}
        let g = principal_log_unitary(&w, 1e-9).unwrap();
        let want = pauli(1).mapv(|z| z * (-theta));
        assert!(norm2(&(g - want)) < 1e-12);
    }

    #[test]
    fn log_rejects_branch_point() {
        let w = array![
            [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(-1.0, 0.0)]
        ];
        assert!(matches!(
            principal_log_unitary(&w, 1e-9),
            Err(WalkError::BranchAmbiguity { .. })
        ));
    }

    #[test]
    fn norm2_of_known_matrix() {
        let m = array![
            [C64::new(3.0, 0.0), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(-4.0, 0.0)]
        ];
        assert!((norm2(&m) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn matrix_power_agrees_with_repeated_product() {
        let u = expm_i_hermitian(&pauli(2), 0.3);
        let mut direct = identity(2);
        for _ in 0..7 {
            direct = direct.dot(&u);
        }
        assert!(norm2(&(matrix_power(&u, 7) - direct)) < 1e-13);
    }
}
