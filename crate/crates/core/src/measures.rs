//! Two-qubit density matrices and entanglement measures.
//!
//! Basis order is {|EE⟩, |EG⟩, |GE⟩, |GG⟩}, first label atom A. Entropies are
//! in bits.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::amplitudes::AmplitudeSet;
use crate::error::{Error, Result};
use crate::units::InitialState;

pub type Matrix4c = Matrix4<Complex64>;
pub type Matrix2c = Matrix2<Complex64>;

/// Tolerance for hermiticity, trace and positivity of a density matrix.
pub const DENSITY_TOLERANCE: f64 = 1e-12;

/// Negative eigenvalues below this make `rho_from_amplitudes` fail.
pub const POSITIVITY_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

/// Validated two-qubit density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitDensity {
    matrix: Matrix4c,
}

fn hermitian_eigenvalues4(m: &Matrix4c) -> Vec<f64> {
    let mut eig: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    eig
}

impl TwoQubitDensity {
    pub fn new(matrix: Matrix4c) -> Result<Self> {
        let mut asym = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                let d = matrix[(i, j)] - matrix[(j, i)].conj();
                if !(d.re.is_finite() && d.im.is_finite()) {
                    return Err(Error::InvalidDensity("non-finite entry".into()));
                }
                asym = asym.max(d.norm());
            }
        }
        if asym > DENSITY_TOLERANCE {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian (asymmetry {asym:e})"
            )));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > DENSITY_TOLERANCE || trace.im.abs() > DENSITY_TOLERANCE {
            return Err(Error::InvalidDensity(format!("trace {trace} is not 1")));
        }
        // symmetrize so the eigen-solver sees an exactly Hermitian matrix
        let matrix = (matrix + matrix.adjoint()) * c(0.5);
        let min = *hermitian_eigenvalues4(&matrix).last().unwrap_or(&0.0);
        if min < -DENSITY_TOLERANCE {
            return Err(Error::Positivity {
                min_eigenvalue: min,
            });
        }
        Ok(TwoQubitDensity { matrix })
    }

    pub fn matrix(&self) -> &Matrix4c {
        &self.matrix
    }

    pub fn element(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues4(&self.matrix)
    }

    /// |ψ⟩⟨ψ| for a (not necessarily normalized) state vector.
    pub fn pure(psi: [Complex64; 4]) -> Result<Self> {
        let norm2: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        if !(norm2 > 0.0) {
            return Err(Error::ZeroNorm);
        }
        let m = Matrix4c::from_fn(|i, j| psi[i] * psi[j].conj() / norm2);
        TwoQubitDensity::new(m)
    }

    /// (|EE⟩ + |GG⟩)/√2.
    pub fn bell_phi_plus() -> Self {
        TwoQubitDensity::pure([c(1.0), ZERO, ZERO, c(1.0)]).expect("valid Bell state")
    }

    pub fn maximally_mixed() -> Self {
        TwoQubitDensity {
            matrix: Matrix4c::identity() * c(0.25),
        }
    }

    /// p |Φ⁺⟩⟨Φ⁺| + (1−p) I/4.
    pub fn werner(p: f64) -> Result<Self> {
        let m = Self::bell_phi_plus().matrix * c(p) + Matrix4c::identity() * c((1.0 - p) / 4.0);
        TwoQubitDensity::new(m)
    }

    /// ρ_A ⊗ ρ_B.
    pub fn product(rho_a: &Matrix2c, rho_b: &Matrix2c) -> Result<Self> {
        TwoQubitDensity::new(rho_a.kronecker(rho_b))
    }

    /// Largest modulus among entries outside the diagonal and anti-diagonal.
    pub fn off_x_magnitude(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                if i != j && i + j != 3 {
                    worst = worst.max(self.matrix[(i, j)].norm());
                }
            }
        }
        worst
    }

    /// (U_A ⊗ U_B) ρ (U_A ⊗ U_B)†.
    pub fn local_transform(&self, u_a: &Matrix2c, u_b: &Matrix2c) -> Result<Self> {
        let u = u_a.kronecker(u_b);
        TwoQubitDensity::new(u * self.matrix * u.adjoint())
    }
}

/// Reduced state of one atom.
pub fn partial_trace(rho: &TwoQubitDensity, keep: Subsystem) -> Matrix2c {
    let m = &rho.matrix;
    Matrix2c::from_fn(|i, j| match keep {
        // trace over B
        Subsystem::A => m[(2 * i, 2 * j)] + m[(2 * i + 1, 2 * j + 1)],
        // trace over A
        Subsystem::B => m[(i, j)] + m[(2 + i, 2 + j)],
    })
}

/// Which branch states carry the two amplitudes of a one-photon sector.
fn branch_states(channel: InitialState) -> (usize, usize) {
    match channel {
        // (u|GG⟩ + v|EE⟩)/c₁
        InitialState::Eg => (3, 0),
        // atom A or atom B has emitted
        InitialState::Ee => (2, 1),
        InitialState::Gg => (1, 2),
    }
}

/// Two-branch pure state of the one-photon sector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PureBiphotonSectorState {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub channel: InitialState,
}

impl PureBiphotonSectorState {
    pub fn new(alpha: Complex64, beta: Complex64, channel: InitialState) -> Self {
        PureBiphotonSectorState {
            alpha,
            beta,
            channel,
        }
    }

    /// c₁ = sqrt(|α|² + |β|²).
    pub fn norm(&self) -> f64 {
        (self.alpha.norm_sqr() + self.beta.norm_sqr()).sqrt()
    }

    /// Weight of the β branch, |β|²/c₁².
    pub fn eta(&self) -> Result<f64> {
        let n2 = self.alpha.norm_sqr() + self.beta.norm_sqr();
        if !(n2 > 0.0) {
            return Err(Error::ZeroNorm);
        }
        Ok(self.beta.norm_sqr() / n2)
    }

    pub fn to_density(&self) -> Result<TwoQubitDensity> {
        let (ia, ib) = branch_states(self.channel);
        let mut psi = [ZERO; 4];
        psi[ia] = self.alpha;
        psi[ib] = self.beta;
        TwoQubitDensity::pure(psi)
    }
}

/// 2|αβ*| / (|α|² + |β|²).
pub fn pure_concurrence(state: &PureBiphotonSectorState) -> Result<f64> {
    let n2 = state.alpha.norm_sqr() + state.beta.norm_sqr();
    if !(n2 > 0.0) {
        return Err(Error::ZeroNorm);
    }
    Ok((2.0 * (state.alpha * state.beta.conj()).norm() / n2).min(1.0))
}

fn sqrt_psd(m: &Matrix4c) -> Matrix4c {
    let eig = (*m).symmetric_eigen();
    let d = Matrix4c::from_diagonal(&eig.eigenvalues.map(|e| c(e.max(0.0).sqrt())));
    eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// Wootters concurrence max(0, λ₁ − λ₂ − λ₃ − λ₄), λ the square roots of the
/// eigenvalues of √ρ ρ̃ √ρ with ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y).
///
/// √ρ ρ̃ √ρ = A A† with A = √ρ (σ_y⊗σ_y) √ρ*, so the λ are the singular values
/// of A; this keeps the small λ at roundoff level instead of √roundoff.
pub fn concurrence_wootters(rho: &TwoQubitDensity) -> Result<f64> {
    let sy = Matrix2c::new(
        ZERO,
        Complex64::new(0.0, -1.0),
        Complex64::new(0.0, 1.0),
        ZERO,
    );
    let yy = sy.kronecker(&sy);
    let root = sqrt_psd(&rho.matrix);
    let a = root * yy * root.conjugate();
    let mut lam: Vec<f64> = a.singular_values().iter().copied().collect();
    if lam.iter().any(|e| !e.is_finite()) {
        return Err(Error::Eigen("non-finite singular value".into()));
    }
    lam.sort_by(|x, y| y.total_cmp(x));
    Ok((lam[0] - lam[1] - lam[2] - lam[3]).clamp(0.0, 1.0))
}

/// Closed form 2 max(0, |ρ₁₄| − √(ρ₂₂ρ₃₃), |ρ₂₃| − √(ρ₁₁ρ₄₄)) for X states.
pub fn concurrence_xstate(rho: &TwoQubitDensity) -> Result<f64> {
    let off = rho.off_x_magnitude();
    if off > DENSITY_TOLERANCE {
        return Err(Error::NotXShaped { magnitude: off });
    }
    let m = &rho.matrix;
    let d = |i: usize| m[(i, i)].re.max(0.0);
    let outer = m[(0, 3)].norm() - (d(1) * d(2)).sqrt();
    let inner = m[(1, 2)].norm() - (d(0) * d(3)).sqrt();
    Ok((2.0 * outer.max(inner).max(0.0)).min(1.0))
}

/// Binary entropy of η in bits; exactly 0 at both endpoints.
pub fn entanglement_entropy(eta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::domain("eta", eta, "must lie in [0, 1]"));
    }
    if eta == 0.0 || eta == 1.0 {
        return Ok(0.0);
    }
    Ok(-(1.0 - eta) * (1.0 - eta).log2() - eta * eta.log2())
}

/// −Σ λ log₂ λ, with eigenvalues in (−1e-12, 0) treated as zero.
pub fn von_neumann_entropy(eigenvalues: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &e in eigenvalues {
        if e < -DENSITY_TOLERANCE {
            return Err(Error::Positivity { min_eigenvalue: e });
        }
        if e > 0.0 {
            s -= e * e.log2();
        }
    }
    Ok(s.max(0.0))
}

fn qubit_eigenvalues(m: &Matrix2c) -> Vec<f64> {
    let h = (m + m.adjoint()) * c(0.5);
    h.symmetric_eigenvalues().iter().copied().collect()
}

/// S(ρ_A) + S(ρ_B) − S(ρ_AB), in bits.
pub fn mutual_information(rho: &TwoQubitDensity) -> Result<f64> {
    let s_ab = von_neumann_entropy(&rho.eigenvalues())?;
    let s_a = von_neumann_entropy(&qubit_eigenvalues(&partial_trace(rho, Subsystem::A)))?;
    let s_b = von_neumann_entropy(&qubit_eigenvalues(&partial_trace(rho, Subsystem::B)))?;
    Ok((s_a + s_b - s_ab).clamp(0.0, 2.0))
}

/// Photon-traced two-atom state built from the amplitudes, divided by its
/// norm N.
///
/// EG: diagonal (v2, |1+a|²+f2, |b|²+g2, u2), coherences ρ₁₄ = l and
/// ρ₂₃ = (1+a)b* + fg*. EE and GG: the no-photon branch stays on the initial
/// state, the one-photon block sits on {|EG⟩, |GE⟩} with equal weights and
/// coherence l, and the two-photon weight f2 + g2 lands on the flipped state;
/// the exchange terms must be zero there.
pub fn rho_from_amplitudes(set: &AmplitudeSet) -> Result<TwoQubitDensity> {
    set.validate()?;
    let one_plus_a2 = (c(1.0) + set.a).norm_sqr();
    let mut m = Matrix4c::zeros();
    match set.channel {
        InitialState::Eg => {
            m[(0, 0)] = c(set.v2);
            m[(1, 1)] = c(one_plus_a2 + set.f2);
            m[(2, 2)] = c(set.b.norm_sqr() + set.g2);
            m[(3, 3)] = c(set.u2);
            m[(0, 3)] = set.l;
            m[(3, 0)] = set.l.conj();
            m[(1, 2)] = set.ab_cross;
            m[(2, 1)] = set.ab_cross.conj();
        }
        InitialState::Ee | InitialState::Gg => {
            if set.b != ZERO || set.ab_cross != ZERO {
                return Err(Error::InvalidDensity(
                    "exchange amplitude only enters the EG state".into(),
                ));
            }
            let (w, _) = set.branch_weights();
            let (initial, flipped) = match set.channel {
                InitialState::Ee => (0, 3),
                _ => (3, 0),
            };
            m[(initial, initial)] = c(one_plus_a2);
            m[(flipped, flipped)] = c(set.f2 + set.g2);
            m[(1, 1)] = c(w);
            m[(2, 2)] = c(w);
            m[(1, 2)] = set.l;
            m[(2, 1)] = set.l.conj();
        }
    }
    let n: f64 = (0..4).map(|i| m[(i, i)].re).sum();
    if !(n > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let m = m * c(1.0 / n);
    let min = *hermitian_eigenvalues4(&m).last().unwrap_or(&0.0);
    if min < -POSITIVITY_TOLERANCE {
        return Err(Error::Positivity {
            min_eigenvalue: min,
        });
    }
    // roundoff-level negatives are within the density tolerance
    TwoQubitDensity::new(m)
}

/// C⁽¹⁾, η₁ and S⁽¹⁾ of the one-photon sector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinglePhotonMeasures {
    pub concurrence: f64,
    pub eta: f64,
    pub entropy: f64,
}

/// C⁽¹⁾ = 2|l|/c₁², η₁ = weight of the second branch over c₁².
pub fn single_photon_measures(set: &AmplitudeSet) -> Result<SinglePhotonMeasures> {
    let (wa, wb) = set.branch_weights();
    let c1_sq = wa + wb;
    if !(c1_sq > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let eta = wb / c1_sq;
    Ok(SinglePhotonMeasures {
        concurrence: (2.0 * set.l.norm() / c1_sq).min(1.0),
        eta,
        entropy: entanglement_entropy(eta)?,
    })
}
