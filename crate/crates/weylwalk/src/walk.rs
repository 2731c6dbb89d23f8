//! Causal, translation-invariant quantum walks and their structural checks.
//!
//! A walk is U_D = Σ_q A_q S_q with finitely many nonzero coins A_q. All of
//! the analysis in this crate goes through the momentum-space symbol
//! U(p) = Σ_q A_q e^{−i a q·p}, which translation invariance makes exact.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use crate::error::WalkError;
use crate::linalg::{self, CMat};

/// Default tolerance for structural residuals.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Lattice spacing and timestep. Their ratio a/dt is the lattice speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeScale {
    pub a: f64,
    pub dt: f64,
}

impl LatticeScale {
    pub fn new(a: f64, dt: f64) -> Result<Self, WalkError> {
        if !(a > 0.0 && dt > 0.0 && (a / dt).is_finite()) {
            return Err(WalkError::BadScale { a, dt });
        }
        Ok(LatticeScale { a, dt })
    }

    pub fn unit() -> Self {
        LatticeScale { a: 1.0, dt: 1.0 }
    }

    /// The lattice speed a/dt.
    pub fn ratio(&self) -> f64 {
        self.a / self.dt
    }
}

/// A causal translation-invariant walk: dimension, internal dimension,
/// finite coin family and lattice scale.
///
/// Displacements are exact integer vectors; coins are stored in a BTreeMap so
/// every iteration order in the crate is deterministic.
#[derive(Debug, Clone)]
pub struct WalkSpec {
    d: usize,
    k: usize,
    coins: BTreeMap<Vec<i64>, CMat>,
    scale: LatticeScale,
}

impl WalkSpec {
    pub fn new(
        d: usize,
        k: usize,
        coins: BTreeMap<Vec<i64>, CMat>,
        scale: LatticeScale,
    ) -> Result<Self, WalkError> {
        if coins.is_empty() {
            return Err(WalkError::EmptySupport);
        }
        for (q, a) in &coins {
            if q.len() != d {
                return Err(WalkError::DisplacementDimension {
                    q: q.clone(),
                    expected: d,
                    found: q.len(),
                });
            }
            if a.nrows() != k || a.ncols() != k {
                return Err(WalkError::CoinShape {
                    q: q.clone(),
                    k,
                    rows: a.nrows(),
                    cols: a.ncols(),
                });
            }
        }
        Ok(WalkSpec { d, k, coins, scale })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn internal_dim(&self) -> usize {
        self.k
    }

    pub fn scale(&self) -> LatticeScale {
        self.scale
    }

    pub fn coins(&self) -> &BTreeMap<Vec<i64>, CMat> {
        &self.coins
    }

    /// Number of nonzero coins (the K of the convergence bounds).
    pub fn coin_count(&self) -> usize {
        self.coins
            .values()
            .filter(|a| a.iter().any(|z| z.norm() > 1e-15))
            .count()
    }

    /// Largest Euclidean |q| over the nonzero coins (the q of the bounds).
    pub fn max_displacement(&self) -> f64 {
        self.coins
            .iter()
            .filter(|(_, a)| a.iter().any(|z| z.norm() > 1e-15))
            .map(|(q, _)| (q.iter().map(|&c| (c * c) as f64).sum::<f64>()).sqrt())
            .fold(0.0, f64::max)
    }

    /// Same coins on a different lattice scale.
    pub fn with_scale(&self, scale: LatticeScale) -> WalkSpec {
        WalkSpec { scale, ..self.clone() }
    }

    /// Walk with spatial axes permuted: coin at q moves to q∘perm.
    pub fn permute_axes(&self, perm: &[usize]) -> WalkSpec {
        assert_eq!(perm.len(), self.d);
        let coins = self
            .coins
            .iter()
            .map(|(q, a)| {
                let nq: Vec<i64> = perm.iter().map(|&i| q[i]).collect();
                (nq, a.clone())
            })
            .collect();
        WalkSpec { coins, ..self.clone() }
    }

    /// Composition of walk unitaries: self ∘ other (self applied second).
    /// Coins multiply and displacements add, because coins commute with
    /// shifts.
    pub fn compose(&self, other: &WalkSpec) -> WalkSpec {
        assert_eq!(self.d, other.d);
        assert_eq!(self.k, other.k);
        let mut coins: BTreeMap<Vec<i64>, CMat> = BTreeMap::new();
        for (q1, a1) in &self.coins {
            for (q2, a2) in &other.coins {
                let q: Vec<i64> = q1.iter().zip(q2).map(|(x, y)| x + y).collect();
                let prod = a1.dot(a2);
                coins
                    .entry(q)
                    .and_modify(|acc| *acc += &prod)
                    .or_insert(prod);
            }
        }
        WalkSpec { d: self.d, k: self.k, coins, scale: self.scale }
    }

    /// Left-multiply every coin by a fixed internal-space operator.
    pub fn premultiply(&self, w: &CMat) -> WalkSpec {
        let coins = self
            .coins
            .iter()
            .map(|(q, a)| (q.clone(), w.dot(a)))
            .collect();
        WalkSpec { coins, ..self.clone() }
    }

    /// The momentum symbol U(p) = Σ_q A_q e^{−i a q·p}.
    pub fn momentum_symbol(&self, p: &[f64]) -> CMat {
        assert_eq!(p.len(), self.d, "momentum dimension mismatch");
        let a = self.scale.a;
        let mut u = CMat::zeros((self.k, self.k));
        for (q, coin) in &self.coins {
            let qp: f64 = q.iter().zip(p).map(|(&qi, &pi)| qi as f64 * pi).sum();
            let phase = (-C64::i() * a * qp).exp();
            u.scaled_add(phase, coin);
        }
        u
    }

    /// Check the per-displacement unitarity conditions.
    ///
    /// Unitarity of U_D forces, for every relative displacement d′ ≠ 0,
    /// Σ_q A_q† A_{q+d′} = 0, together with Σ_q A_q† A_q = 𝟙. This is
    /// strictly stronger than the aggregated sum of the off-diagonal terms
    /// and is what any correct walk satisfies.
    pub fn validate_unitarity(&self, tol: f64) -> ValidationReport {
        let mut residuals: BTreeMap<Vec<i64>, f64> = BTreeMap::new();
        let mut completeness = 0.0;
        let support: Vec<&Vec<i64>> = self.coins.keys().collect();
        let mut deltas: std::collections::BTreeSet<Vec<i64>> = std::collections::BTreeSet::new();
        for q in &support {
            for r in &support {
                let d: Vec<i64> = r.iter().zip(q.iter()).map(|(a, b)| a - b).collect();
                deltas.insert(d);
            }
        }
        for delta in deltas {
            let mut sum = CMat::zeros((self.k, self.k));
            for (q, a) in &self.coins {
                let shifted: Vec<i64> = q.iter().zip(&delta).map(|(x, y)| x + y).collect();
                if let Some(b) = self.coins.get(&shifted) {
                    sum += &linalg::dagger(a).dot(b);
                }
            }
            if delta.iter().all(|&c| c == 0) {
                completeness = linalg::norm2(&(sum - linalg::identity(self.k)));
            } else {
                residuals.insert(delta, linalg::norm2(&sum));
            }
        }
        ValidationReport { residuals, completeness, tol }
    }

    /// Split U_D = W Σ_q A′_q S_q with W = Σ_q A_q and Σ_q A′_q = 𝟙.
    ///
    /// W equal to the identity up to a global phase classifies the walk as
    /// massless; otherwise M = (i/dt)·log W on the principal branch, with
    /// eigenphases of W at ±π rejected as a branch ambiguity.
    pub fn mass_decompose(&self, tol: f64) -> Result<MassDecomposition, WalkError> {
        let mut w = CMat::zeros((self.k, self.k));
        for a in self.coins.values() {
            w += a;
        }
        let wdag = linalg::dagger(&w);
        let coins_prime: BTreeMap<Vec<i64>, CMat> = self
            .coins
            .iter()
            .map(|(q, a)| (q.clone(), wdag.dot(a)))
            .collect();
        let phi = w[[0, 0]].arg();
        let phase_residual =
            linalg::norm2(&(&w - &linalg::identity(self.k).mapv(|z| z * C64::from_polar(1.0, phi))));
        let massless = phase_residual <= tol;
        let mass = if massless {
            None
        } else {
            // W = e^{iG} with G Hermitian, eigenvalues in (−π, π);
            // W = e^{−iM dt} gives M = −G/dt.
            let g = linalg::principal_log_unitary(&w, 1e-9)?;
            Some(g.mapv(|z| z * (-1.0 / self.scale.dt)))
        };
        Ok(MassDecomposition { w, coins_prime, mass, massless })
    }
}

/// Per-displacement unitarity residuals.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    /// ‖Σ_q A_q† A_{q+d′}‖ for every realizable d′ ≠ 0.
    pub residuals: BTreeMap<Vec<i64>, f64>,
    /// ‖Σ_q A_q† A_q − 𝟙‖.
    pub completeness: f64,
    pub tol: f64,
}

impl ValidationReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals
            .values()
            .cloned()
            .fold(self.completeness, f64::max)
    }

    pub fn passes(&self) -> bool {
        self.max_residual() <= self.tol
    }
}

/// The W / A′_q split of a walk, with the mass operator when W ≠ e^{iφ}𝟙.
#[derive(Debug, Clone)]
pub struct MassDecomposition {
    pub w: CMat,
    pub coins_prime: BTreeMap<Vec<i64>, CMat>,
    pub mass: Option<CMat>,
    pub massless: bool,
}

impl MassDecomposition {
    /// Reassemble the original coins as W·A′_q. Exact by construction when W
    /// is unitary.
    pub fn reassemble(&self) -> BTreeMap<Vec<i64>, CMat> {
        self.coins_prime
            .iter()
            .map(|(q, a)| (q.clone(), self.w.dot(a)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, norm2, pauli};
    use crate::zoo;
    use ndarray::array;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn massless_1d_passes_unitarity() {
        let spec = zoo::massless_1d(LatticeScale::unit());
        let report = spec.validate_unitarity(1e-12);
        assert!(report.passes());
        assert!(report.max_residual() < 1e-15);
    }

    #[test]
    fn scaled_coin_fails_completeness() {
        let spec = zoo::massless_1d(LatticeScale::unit());
        let mut coins = spec.coins().clone();
        let a = coins.get_mut(&vec![1]).unwrap();
        *a = a.mapv(|z| z * 1.01);
        let bad = WalkSpec::new(1, 2, coins, spec.scale()).unwrap();
        let report = bad.validate_unitarity(1e-10);
        assert!(!report.passes());
        // ‖diag(1.01² − 1, 0)‖ = 0.0201
        assert!((report.completeness - 0.0201).abs() < 1e-12);
    }

    #[test]
    fn bcc_walk_passes_unitarity() {
        let spec = zoo::bcc_weyl_3d(LatticeScale::unit());
        assert!(spec.validate_unitarity(1e-12).passes());
    }

    #[test]
    fn symbol_of_massless_1d() {
        let spec = zoo::massless_1d(LatticeScale::unit());
        let u0 = spec.momentum_symbol(&[0.0]);
        assert!(norm2(&(u0 - identity(2))) < 1e-15);
        let p = 0.7;
        let u = spec.momentum_symbol(&[p]);
        let want = array![
            [(-C64::i() * p).exp(), c(0.0, 0.0)],
            [c(0.0, 0.0), (C64::i() * p).exp()]
        ];
        assert!(norm2(&(u - want)) < 1e-15);
    }

    #[test]
    fn bcc_symbol_on_axis_is_single_rotation() {
        // At p = (π/2a, 0, 0) only T_x acts: U = e^{−i(π/2)σ_x}.
        let spec = zoo::bcc_weyl_3d(LatticeScale::unit());
        let p = [std::f64::consts::FRAC_PI_2, 0.0, 0.0];
        let u = spec.momentum_symbol(&p);
        let want = crate::linalg::expm_i_hermitian(&pauli(0), std::f64::consts::FRAC_PI_2);
        assert!(norm2(&(u - want)) < 1e-14);
    }

    #[test]
    fn symbol_unitary_across_zone() {
        for spec in [
            zoo::bcc_weyl_3d(LatticeScale::unit()),
            zoo::spin1_3d(LatticeScale::unit()),
            zoo::dirac_3d(0.4, LatticeScale::unit()),
        ] {
            let n = 7;
            for ix in 0..n {
                for iy in 0..n {
                    for iz in 0..n {
                        let f = |i: usize| -std::f64::consts::PI
                            + 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / n as f64;
                        let u = spec.momentum_symbol(&[f(ix), f(iy), f(iz)]);
                        assert!(crate::linalg::unitarity_residual(&u) < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn mass_decompose_massless() {
        let spec = zoo::massless_1d(LatticeScale::unit());
        let d = spec.mass_decompose(1e-10).unwrap();
        assert!(d.massless);
        assert!(d.mass.is_none());
        assert!(norm2(&(&d.w - &identity(2))) < 1e-15);
    }

    #[test]
    fn mass_decompose_recovers_sigma_x_mass() {
        let m = 1.0;
        let scale = LatticeScale::new(0.1, 0.1).unwrap(); // m·dt = 0.1
        let spec = zoo::massive_1d(m, scale);
        let d = spec.mass_decompose(1e-10).unwrap();
        assert!(!d.massless);
        let mass = d.mass.unwrap();
        assert!(norm2(&(mass - pauli(0).mapv(|z| z * m))) < 1e-10);
    }

    #[test]
    fn global_phase_is_massless() {
        let spec = zoo::massless_1d(LatticeScale::unit());
        let phase = C64::from_polar(1.0, std::f64::consts::PI / 7.0);
        let w = identity(2).mapv(|z| z * phase);
        let phased = spec.premultiply(&w);
        let d = phased.mass_decompose(1e-10).unwrap();
        assert!(d.massless);
    }

    #[test]
    fn branch_cut_is_an_error() {
        // W = σ_z has eigenphases {0, π}: not a global phase, log ambiguous.
        let spec = zoo::massless_1d(LatticeScale::unit()).premultiply(&pauli(2));
        assert!(matches!(
            spec.mass_decompose(1e-10),
            Err(WalkError::BranchAmbiguity { .. })
        ));
    }

    #[test]
    fn reassembly_is_exact() {
        let spec = zoo::dirac_3d(0.3, LatticeScale::new(0.5, 0.25).unwrap());
        let d = spec.mass_decompose(1e-10).unwrap();
        let back = d.reassemble();
        for (q, a) in spec.coins() {
            let diff = norm2(&(a - &back[q]));
            assert!(diff < 1e-14, "coin {q:?} off by {diff}");
        }
    }

    #[test]
    fn structural_errors() {
        let mut coins: BTreeMap<Vec<i64>, CMat> = BTreeMap::new();
        coins.insert(vec![0, 0], CMat::zeros((3, 2)));
        assert!(matches!(
            WalkSpec::new(2, 2, coins, LatticeScale::unit()),
            Err(WalkError::CoinShape { .. })
        ));
        assert!(matches!(
            WalkSpec::new(1, 2, BTreeMap::new(), LatticeScale::unit()),
            Err(WalkError::EmptySupport)
        ));
        assert!(LatticeScale::new(-1.0, 1.0).is_err());
    }
}
