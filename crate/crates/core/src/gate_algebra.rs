//! Construction and decomposition of excitation-preserving two-qubit gates
//! and of single-qubit rotations.
//!
//! A two-qubit gate is described by five angles `(θ, ζ, χ, φ, γ)`:
//!
//! ```text
//!       | e^{iγ}                                              |
//!   W = |        e^{-iζ}cosθ      -i e^{iχ} sinθ              |
//!       |        -i e^{-iχ} sinθ  e^{iζ} cosθ                 |
//!       |                                      e^{-i(γ+φ)}    |
//! ```
//!
//! `(γ, ζ, χ)` and `(γ+π, ζ+π, χ+π)` describe the same gate up to a global
//! sign, so the canonical form keeps `γ` in `(−π/2, π/2]`.

use crate::error::{Error, Result};
use crate::linalg::{
    c, cis, direct_sum, even_block, kron, odd_block, off_block_mass, phase_aligned_distance,
    wrap_angle, x_rot, z_rot, Mat2, Mat4, Unitary2, Unitary4,
};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// Below this `sinθ` the azimuthal phase `χ` carries no information.
pub const CHI_DEFINED_FLOOR: f64 = 1e-9;
/// Tolerance on the off-block mass accepted by the decompositions.
pub const BLOCK_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateParams {
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub zeta: f64,
    #[serde(default)]
    pub chi: f64,
    #[serde(default)]
    pub phi: f64,
    #[serde(default)]
    pub gamma: f64,
}

impl Default for GateParams {
    fn default() -> Self {
        GateParams::identity()
    }
}

impl GateParams {
    pub fn new(theta: f64, zeta: f64, chi: f64, phi: f64, gamma: f64) -> Self {
        GateParams {
            theta,
            zeta,
            chi,
            phi,
            gamma,
        }
    }

    pub fn identity() -> Self {
        GateParams::new(0.0, 0.0, 0.0, 0.0, 0.0)
    }

    /// The ideal controlled-Z gate.
    pub fn cz() -> Self {
        GateParams::new(0.0, 0.0, 0.0, PI, 0.0)
    }

    /// The ideal iSWAP (`θ = π/2`).
    pub fn iswap() -> Self {
        GateParams::new(FRAC_PI_2, 0.0, 0.0, 0.0, 0.0)
    }

    /// The ideal √iSWAP (`θ = π/4`).
    pub fn sqrt_iswap() -> Self {
        GateParams::new(PI / 4.0, 0.0, 0.0, 0.0, 0.0)
    }

    /// Checks the parameterization domain.
    pub fn validate(&self) -> Result<()> {
        let all = [self.theta, self.zeta, self.chi, self.phi, self.gamma];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("gate", "angles must be finite"));
        }
        if !(0.0..=FRAC_PI_2).contains(&self.theta) {
            return Err(Error::config(
                "gate.theta",
                format!("{} is outside [0, π/2]", self.theta),
            ));
        }
        Ok(())
    }

    /// Wraps every phase into `(−π, π]` and removes the global-sign
    /// redundancy so that `γ ∈ (−π/2, π/2]`.
    pub fn canonical(&self) -> Self {
        let mut p = GateParams::new(
            self.theta,
            wrap_angle(self.zeta),
            wrap_angle(self.chi),
            wrap_angle(self.phi),
            wrap_angle(self.gamma),
        );
        if p.gamma > FRAC_PI_2 || p.gamma <= -FRAC_PI_2 {
            p.gamma = wrap_angle(p.gamma + PI);
            p.zeta = wrap_angle(p.zeta + PI);
            p.chi = wrap_angle(p.chi + PI);
        }
        p
    }

    pub fn unitary(&self) -> Unitary4 {
        build_two_qubit(self)
    }

    /// `γ' = γ + φ/2`, the phase shared symmetrically by both qubits.
    pub fn symmetric_phase(&self) -> f64 {
        self.gamma + self.phi / 2.0
    }
}

/// Parameters recovered from a matrix, with a flag for the
/// ill-defined azimuthal phase at `θ ≈ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractedParams {
    pub params: GateParams,
    pub chi_defined: bool,
}

/// Matrix of the excitation-preserving gate in the lexicographic basis.
pub fn build_two_qubit(p: &GateParams) -> Unitary4 {
    let (s, co) = p.theta.sin_cos();
    let mut w = Mat4::zeros();
    w[(0, 0)] = cis(p.gamma);
    w[(1, 1)] = cis(-p.zeta) * co;
    w[(1, 2)] = c(0.0, -1.0) * cis(p.chi) * s;
    w[(2, 1)] = c(0.0, -1.0) * cis(-p.chi) * s;
    w[(2, 2)] = cis(p.zeta) * co;
    w[(3, 3)] = cis(-(p.gamma + p.phi));
    w
}

/// Inverse of [`build_two_qubit`] up to global phase. The result is in
/// canonical form.
pub fn extract_params(u: &Unitary4) -> Result<ExtractedParams> {
    let mass = off_block_mass(u);
    if mass > BLOCK_TOLERANCE {
        return Err(Error::NotExcitationPreserving(mass));
    }
    let odd = odd_block(u);
    let alpha = odd.determinant().arg() / 2.0;
    let w = u * cis(-alpha);

    let theta = w[(1, 2)].norm().atan2(w[(1, 1)].norm());
    let gamma = w[(0, 0)].arg();
    let phi = -w[(3, 3)].arg() - gamma;
    let zeta = if theta.cos() > CHI_DEFINED_FLOOR {
        -w[(1, 1)].arg()
    } else {
        0.0
    };
    let chi_defined = theta.sin() >= CHI_DEFINED_FLOOR;
    let chi = if chi_defined {
        w[(1, 2)].arg() + FRAC_PI_2
    } else {
        0.0
    };
    let mut params = GateParams::new(theta, zeta, chi, phi, gamma).canonical();
    if !chi_defined {
        params.chi = 0.0;
    }
    Ok(ExtractedParams {
        params,
        chi_defined,
    })
}

/// Blocks of an excitation-preserving unitary:
/// `u = (e^{i·even_prefactor_phase}·even_block) ⊕ odd_block`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParityDecomposition {
    pub even_block: Unitary2,
    pub odd_block: Unitary2,
    pub even_prefactor_phase: f64,
}

impl ParityDecomposition {
    pub fn reassemble(&self) -> Unitary4 {
        direct_sum(
            &(self.even_block * cis(self.even_prefactor_phase)),
            &self.odd_block,
        )
    }
}

/// Splits `u` into parity sectors. The prefactor is chosen so that the even
/// block has the same determinant as the odd block; for gates built from
/// [`GateParams`] it equals `−φ/2` with `φ ∈ (−π, π]`.
pub fn parity_decompose(u: &Unitary4) -> Result<ParityDecomposition> {
    let mass = off_block_mass(u);
    if mass > BLOCK_TOLERANCE {
        return Err(Error::NotExcitationPreserving(mass));
    }
    let even = even_block(u);
    let odd = odd_block(u);
    let relative = wrap_angle(-(even.determinant() / odd.determinant()).arg());
    let prefactor = -relative / 2.0;
    Ok(ParityDecomposition {
        even_block: even * cis(-prefactor),
        odd_block: odd,
        even_prefactor_phase: prefactor,
    })
}

/// `F(θ, φ) = exp(−iθ(XX+YY)/2 − iφ ZZ/4)`.
pub fn fundamental_entangler(theta: f64, phi: f64) -> Unitary4 {
    let (s, co) = theta.sin_cos();
    let odd = Mat2::new(c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0)) * cis(phi / 4.0);
    let even = Mat2::identity() * cis(-phi / 4.0);
    direct_sum(&even, &odd)
}

/// Where the symmetric phase `γ'` sits relative to the entangler. Both
/// placements give the same unitary because `Z⊗Z`-symmetric phases commute
/// with `F`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetricPlacement {
    Before,
    After,
}

/// `(Z(post_l) ⊗ Z(post_r)) · F(θ, φ) · (Z(pre_l) ⊗ Z(pre_r))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KakFactors {
    pub pre_z_left: f64,
    pub pre_z_right: f64,
    pub post_z_left: f64,
    pub post_z_right: f64,
    pub entangler: (f64, f64),
}

impl KakFactors {
    /// `ζ+ = (ζ+χ)/2`.
    pub fn zeta_plus(&self) -> f64 {
        (self.pre_z_left - self.pre_z_right) / 2.0
    }

    /// `ζ− = (ζ−χ)/2`.
    pub fn zeta_minus(&self) -> f64 {
        (self.post_z_left - self.post_z_right) / 2.0
    }

    /// `γ'`, read off the symmetric part of both Z layers.
    pub fn symmetric_phase(&self) -> f64 {
        -(self.pre_z_left + self.pre_z_right + self.post_z_left + self.post_z_right) / 2.0
    }
}

pub fn kak_decompose(p: &GateParams) -> KakFactors {
    kak_decompose_with(p, SymmetricPlacement::After)
}

pub fn kak_decompose_with(p: &GateParams, placement: SymmetricPlacement) -> KakFactors {
    let zeta_plus = (p.zeta + p.chi) / 2.0;
    let zeta_minus = (p.zeta - p.chi) / 2.0;
    let sym = p.symmetric_phase();
    let (pre_sym, post_sym) = match placement {
        SymmetricPlacement::Before => (-sym, 0.0),
        SymmetricPlacement::After => (0.0, -sym),
    };
    KakFactors {
        pre_z_left: zeta_plus + pre_sym,
        pre_z_right: -zeta_plus + pre_sym,
        post_z_left: zeta_minus + post_sym,
        post_z_right: -zeta_minus + post_sym,
        entangler: (p.theta, p.phi),
    }
}

pub fn kak_compose(f: &KakFactors) -> Unitary4 {
    let pre = kron(&z_rot(f.pre_z_left), &z_rot(f.pre_z_right));
    let post = kron(&z_rot(f.post_z_left), &z_rot(f.post_z_right));
    post * fundamental_entangler(f.entangler.0, f.entangler.1) * pre
}

/// Single-qubit rotation `R(μ, ζ, χ) = Z(ζ−χ) X(μ) Z(ζ+χ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingleQubitParams {
    pub mu: f64,
    #[serde(default)]
    pub zeta: f64,
    #[serde(default)]
    pub chi: f64,
}

impl SingleQubitParams {
    pub fn new(mu: f64, zeta: f64, chi: f64) -> Self {
        SingleQubitParams { mu, zeta, chi }
    }

    pub fn x_pi() -> Self {
        SingleQubitParams::new(PI, 0.0, 0.0)
    }

    pub fn unitary(&self) -> Unitary2 {
        build_single_qubit(self)
    }

    /// Half the rotation angle, `θ = μ/2`.
    pub fn half_angle(&self) -> f64 {
        self.mu / 2.0
    }

    /// `Ω` with `cosΩ = cos(μ/2)·cosζ`.
    pub fn rabi_angle(&self) -> f64 {
        (self.half_angle().cos() * self.zeta.cos())
            .clamp(-1.0, 1.0)
            .acos()
    }

    /// Polar angle `ϱ` of the rotation axis measured from `+Z`.
    pub fn polar_angle(&self) -> f64 {
        let (_, a) = crate::linalg::su2_components(&self.unitary());
        let transverse = (a[0] * a[0] + a[1] * a[1]).sqrt();
        transverse.atan2(a[2])
    }
}

pub fn build_single_qubit(p: &SingleQubitParams) -> Unitary2 {
    z_rot(p.zeta - p.chi) * x_rot(p.mu) * z_rot(p.zeta + p.chi)
}

/// `PhX(μ, ϑ) = Z(ϑ) X(μ) Z(−ϑ)`.
pub fn phased_x(mu: f64, axis: f64) -> Unitary2 {
    z_rot(axis) * x_rot(mu) * z_rot(-axis)
}

/// Recovers `(μ, ζ, χ)` from a single-qubit unitary (global phase ignored).
///
/// The triple is not unique; the returned `μ ∈ [0, π]` when possible, and the
/// result always rebuilds `u` up to global phase.
pub fn euler_decompose(u: &Unitary2) -> SingleQubitParams {
    let phase = u.determinant().arg() / 2.0;
    let v = u * cis(-phase);
    // v = [[e^{-iζ}cos(μ/2), -i e^{iχ} sin(μ/2)], [-i e^{-iχ} sin(μ/2), e^{iζ}cos(μ/2)]]
    let mu = 2.0 * v[(0, 1)].norm().atan2(v[(0, 0)].norm());
    let zeta = if v[(0, 0)].norm() > 1e-12 {
        -v[(0, 0)].arg()
    } else {
        0.0
    };
    let chi = if v[(0, 1)].norm() > 1e-12 {
        (v[(0, 1)] * c(0.0, 1.0)).arg()
    } else {
        0.0
    };
    SingleQubitParams::new(mu, wrap_angle(zeta), wrap_angle(chi))
}

/// `Ω ∈ [θ, π−θ]` with `cosΩ = cosθ·cosζ`.
pub fn rabi_angle(theta: f64, zeta: f64) -> f64 {
    (theta.cos() * zeta.cos()).clamp(-1.0, 1.0).acos()
}

/// `true` when `a` and `b` agree up to a global phase within `tol`.
pub fn equal_up_to_phase<const D: usize>(
    a: &nalgebra::SMatrix<crate::linalg::C64, D, D>,
    b: &nalgebra::SMatrix<crate::linalg::C64, D, D>,
    tol: f64,
) -> bool {
    phase_aligned_distance(a, b) <= tol
}
