//! First-order robustness of decoupled cycles in the adjoint representation.
//!
//! Conjugation by a two-qubit unitary is an orthogonal map on the 15
//! traceless Hermitian generators. For excitation-preserving gates combined
//! with `X⊗X`-type layers it fixes `{XX, YY, ZZ}` and commutes with the swap
//! of the two qubits, so it splits into a 6×6 block on the symmetric and a
//! 6×6 block on the antisymmetric combinations of `IX, YZ, IY, ZX, IZ, XY`.
//! A static error `E` in every cycle survives to first order exactly when the
//! twirl `Σ_j Ad(cycle)^j (E)` fails to vanish.

use crate::circuits::DdSequence;
use crate::gate_algebra::{build_two_qubit, GateParams};
use crate::linalg::{c, kron, pauli_string, phase_aligned_distance, Mat4};
use crate::noise::noisy_pi_pulse;
use nalgebra::{DMatrix, SMatrix};
use serde::Serialize;
use std::f64::consts::FRAC_1_SQRT_2;

/// `|λ − 1|` below this counts as a trivial eigenvalue.
pub const TRIVIAL_THRESHOLD: f64 = 1e-9;
/// Largest cycle count tried when searching for cancellation.
pub const MAX_CANCEL_CYCLES: usize = 64;
/// Twirl residuals below this count as cancelled.
pub const CANCEL_TOLERANCE: f64 = 1e-9;

pub type Block6 = SMatrix<f64, 6, 6>;
pub type Adjoint15 = SMatrix<f64, 15, 15>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Symmetry {
    Invariant,
    Symmetric,
    Antisymmetric,
}

const INVARIANT: [&str; 3] = ["XX", "YY", "ZZ"];
const PAIRS: [&str; 6] = ["IX", "YZ", "IY", "ZX", "IZ", "XY"];
// Signs that align the combinations with the `F(θ, φ) = exp(−iθ(XX+YY)/2 −
// iφZZ/4)` convention so that the blocks read as plain rotations.
const SYMMETRIC_SIGNS: [f64; 6] = [1.0, -1.0, -1.0, 1.0, 1.0, 1.0];
const ANTISYMMETRIC_SIGNS: [f64; 6] = [1.0, -1.0, -1.0, 1.0, 1.0, -1.0];

/// One generator of the fixed basis: an invariant Pauli string, or the
/// symmetric or antisymmetric combination of a string with its mirror image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PauliBasisElement {
    pub label: &'static str,
    pub symmetry: Symmetry,
}

impl PauliBasisElement {
    pub fn symmetric(label: &str) -> Option<Self> {
        Self::in_sector(label, Symmetry::Symmetric)
    }

    pub fn antisymmetric(label: &str) -> Option<Self> {
        Self::in_sector(label, Symmetry::Antisymmetric)
    }

    fn in_sector(label: &str, symmetry: Symmetry) -> Option<Self> {
        let table: &[&'static str] = match symmetry {
            Symmetry::Invariant => &INVARIANT,
            _ => &PAIRS,
        };
        table
            .iter()
            .find(|l| **l == label)
            .map(|l| PauliBasisElement { label: l, symmetry })
    }

    /// Position in the 15-element basis: invariant triple, then the
    /// symmetric six, then the antisymmetric six.
    pub fn index(&self) -> usize {
        match self.symmetry {
            Symmetry::Invariant => INVARIANT.iter().position(|l| *l == self.label).unwrap_or(0),
            Symmetry::Symmetric => 3 + self.pair_index(),
            Symmetry::Antisymmetric => 9 + self.pair_index(),
        }
    }

    fn pair_index(&self) -> usize {
        PAIRS.iter().position(|l| *l == self.label).unwrap_or(0)
    }

    pub fn matrix(&self) -> Mat4 {
        let p = pauli_string(self.label).expect("basis labels are Pauli strings");
        match self.symmetry {
            Symmetry::Invariant => p,
            Symmetry::Symmetric | Symmetry::Antisymmetric => {
                let mirror: String = self.label.chars().rev().collect();
                let q = pauli_string(&mirror).expect("mirror of a Pauli string");
                let (mirror_sign, signs) = if self.symmetry == Symmetry::Symmetric {
                    (1.0, SYMMETRIC_SIGNS)
                } else {
                    (-1.0, ANTISYMMETRIC_SIGNS)
                };
                let k = self.pair_index();
                (p + q * c(mirror_sign, 0.0)) * c(signs[k] * FRAC_1_SQRT_2, 0.0)
            }
        }
    }
}

/// The 15 generators in the fixed order.
pub fn basis() -> Vec<PauliBasisElement> {
    let mut out: Vec<PauliBasisElement> = INVARIANT
        .iter()
        .map(|l| PauliBasisElement {
            label: l,
            symmetry: Symmetry::Invariant,
        })
        .collect();
    for symmetry in [Symmetry::Symmetric, Symmetry::Antisymmetric] {
        out.extend(
            PAIRS
                .iter()
                .map(|l| PauliBasisElement { label: l, symmetry }),
        );
    }
    out
}

/// Single-qubit error directions `{IX, IY, IZ, XI, YI, ZI}` as sector
/// elements, optionally with the symmetric `XY` combination. That one is
/// two-local and not excitation preserving, so it is left out by default.
pub fn error_directions(include_symmetric_xy: bool) -> Vec<PauliBasisElement> {
    let mut out = Vec::new();
    for symmetry in [Symmetry::Symmetric, Symmetry::Antisymmetric] {
        for label in ["IX", "IY", "IZ"] {
            out.push(PauliBasisElement::in_sector(label, symmetry).expect("pair label"));
        }
    }
    if include_symmetric_xy {
        out.push(PauliBasisElement::symmetric("XY").expect("pair label"));
    }
    out
}

/// Matrix of `A ↦ u A u†` in [`basis`] coordinates.
pub fn adjoint_matrix(u: &Mat4) -> Adjoint15 {
    let elements: Vec<Mat4> = basis().iter().map(|e| e.matrix()).collect();
    let norms: Vec<f64> = elements
        .iter()
        .map(|e| (e.adjoint() * e).trace().re)
        .collect();
    let mut out = Adjoint15::zeros();
    for (j, ej) in elements.iter().enumerate() {
        let image = u * ej * u.adjoint();
        for (i, ei) in elements.iter().enumerate() {
            out[(i, j)] = (ei.adjoint() * image).trace().re / norms[i];
        }
    }
    out
}

/// A `+1` eigenspace of one sector block.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrivialSubspace {
    pub symmetry: Symmetry,
    /// Basis labels the eigenspace is spread over, e.g. `["IZ", "XY"]`.
    pub labels: Vec<&'static str>,
    pub dimension: usize,
    /// Whether single-qubit error directions overlap the eigenspace.
    pub overlaps_errors: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdjointSpectrum {
    #[serde(skip)]
    pub full: Adjoint15,
    #[serde(skip)]
    pub invariant: SMatrix<f64, 3, 3>,
    #[serde(skip)]
    pub symmetric: Block6,
    #[serde(skip)]
    pub antisymmetric: Block6,
    /// Largest coupling between different sectors; zero for excitation
    /// preserving cycles with `X⊗X`-type layers.
    pub sector_coupling: f64,
    pub eigenphases_symmetric: Vec<f64>,
    pub eigenphases_antisymmetric: Vec<f64>,
    /// Fewest repetitions after which the twirl of every default error
    /// direction vanishes, or `None` within [`MAX_CANCEL_CYCLES`].
    pub min_cancel_cycles: Option<usize>,
    pub trivial_subspaces: Vec<TrivialSubspace>,
}

impl AdjointSpectrum {
    pub fn block(&self, symmetry: Symmetry) -> DMatrix<f64> {
        match symmetry {
            Symmetry::Invariant => DMatrix::from_column_slice(3, 3, self.invariant.as_slice()),
            Symmetry::Symmetric => DMatrix::from_column_slice(6, 6, self.symmetric.as_slice()),
            Symmetry::Antisymmetric => {
                DMatrix::from_column_slice(6, 6, self.antisymmetric.as_slice())
            }
        }
    }
}

fn eigenphases(block: &Block6) -> Vec<f64> {
    let mut phases: Vec<f64> = block
        .complex_eigenvalues()
        .iter()
        .map(|z| z.arg())
        .collect();
    phases.sort_by(f64::total_cmp);
    phases
}

fn trivial_subspace(
    block: &Block6,
    symmetry: Symmetry,
    error_coords: &[usize],
) -> Option<TrivialSubspace> {
    let shifted = block - Block6::identity();
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let null: Vec<_> = (0..6)
        .filter(|&k| svd.singular_values[k] < TRIVIAL_THRESHOLD)
        .map(|k| v_t.row(k).transpose())
        .collect();
    if null.is_empty() {
        return None;
    }
    let weight = |i: usize| null.iter().map(|v| v[i] * v[i]).sum::<f64>();
    let labels = (0..6)
        .filter(|&i| weight(i) > 1e-9)
        .map(|i| PAIRS[i])
        .collect();
    Some(TrivialSubspace {
        symmetry,
        labels,
        dimension: null.len(),
        overlaps_errors: error_coords.iter().any(|&i| weight(i) > 1e-9),
    })
}

/// Sector blocks, eigenphases and cancellation depth of `u` as the
/// repeated cycle.
pub fn adjoint_blocks(u: &Mat4) -> AdjointSpectrum {
    let full = adjoint_matrix(u);
    let symmetric: Block6 = full.fixed_view::<6, 6>(3, 3).into_owned();
    let antisymmetric: Block6 = full.fixed_view::<6, 6>(9, 9).into_owned();
    let mut sector_coupling = 0.0f64;
    for i in 0..15 {
        for j in 0..15 {
            let same = sector_of(i) == sector_of(j);
            if !same {
                sector_coupling = sector_coupling.max(full[(i, j)].abs());
            }
        }
    }
    let directions = error_directions(false);
    let coords = |symmetry: Symmetry| -> Vec<usize> {
        directions
            .iter()
            .filter(|d| d.symmetry == symmetry)
            .map(|d| d.pair_index())
            .collect()
    };
    let trivial_subspaces = [
        trivial_subspace(
            &symmetric,
            Symmetry::Symmetric,
            &coords(Symmetry::Symmetric),
        ),
        trivial_subspace(
            &antisymmetric,
            Symmetry::Antisymmetric,
            &coords(Symmetry::Antisymmetric),
        ),
    ]
    .into_iter()
    .flatten()
    .collect();
    AdjointSpectrum {
        full,
        invariant: full.fixed_view::<3, 3>(0, 0).into_owned(),
        symmetric,
        antisymmetric,
        sector_coupling,
        eigenphases_symmetric: eigenphases(&symmetric),
        eigenphases_antisymmetric: eigenphases(&antisymmetric),
        min_cancel_cycles: min_cancel_cycles(&[full], &directions),
        trivial_subspaces,
    }
}

fn sector_of(i: usize) -> usize {
    match i {
        0..=2 => 0,
        3..=8 => 1,
        _ => 2,
    }
}

/// Norm of `Σ_{j<n} Ad^j (e)` for each direction.
pub fn twirl_sum(
    spectrum: &AdjointSpectrum,
    directions: &[PauliBasisElement],
    n: usize,
) -> Vec<f64> {
    schedule_residuals(&[spectrum.full], directions, n)
}

/// Twirl residuals after each of the first `n` cycles of a periodic
/// schedule. The error of cycle `k` is carried to the end by the cycles
/// after it, `C_{n−1}⋯C_{k+1}`. Left-multiplying the sum by the inverse of
/// the full product keeps its norm and turns it into `Σ_k (C_k⋯C_0)ᵀ`,
/// which grows one term per cycle.
fn residual_history(
    cycles: &[Adjoint15],
    directions: &[PauliBasisElement],
    n: usize,
) -> Vec<Vec<f64>> {
    let mut prefix = Adjoint15::identity();
    let mut total = Adjoint15::zeros();
    (0..n)
        .map(|k| {
            prefix = cycles[k % cycles.len()] * prefix;
            total += prefix.transpose();
            directions
                .iter()
                .map(|e| total.column(e.index()).norm())
                .collect()
        })
        .collect()
}

fn schedule_residuals(
    cycles: &[Adjoint15],
    directions: &[PauliBasisElement],
    n: usize,
) -> Vec<f64> {
    residual_history(cycles, directions, n)
        .pop()
        .unwrap_or_else(|| vec![0.0; directions.len()])
}

fn min_cancel_cycles(cycles: &[Adjoint15], directions: &[PauliBasisElement]) -> Option<usize> {
    residual_history(cycles, directions, MAX_CANCEL_CYCLES)
        .iter()
        .position(|r| r.iter().all(|v| *v < CANCEL_TOLERANCE))
        .map(|k| k + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VerdictOptions {
    /// Replace the gate by an idle in every other cycle; the decoupling
    /// layer stays in every cycle.
    pub alternating_idle: bool,
    /// Count the symmetric `XY` combination as an error direction.
    pub include_symmetric_xy: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RobustnessReport {
    /// Spectrum of the first cycle, decoupling layer times gate.
    pub spectrum: AdjointSpectrum,
    /// Trivial subspaces of the cycle that are `−1` eigenspaces of the bare
    /// gate: the decoupling layer has turned an echo into amplification.
    pub flipped_degeneracies: Vec<TrivialSubspace>,
    pub min_cancel_cycles: Option<usize>,
    pub robust: bool,
    /// Twirl residual per direction at `min_cancel_cycles`, or at the search
    /// cap when nothing cancels.
    pub residuals: Vec<(PauliBasisElement, f64)>,
}

fn ideal_layer(dd: DdSequence, j: usize) -> Mat4 {
    match dd.axes(j) {
        Some((a, b)) => kron(&noisy_pi_pulse([0.0; 3], a), &noisy_pi_pulse([0.0; 3], b)),
        None => Mat4::identity(),
    }
}

/// Eigenphases, trivial subspaces and cancellation depth for a gate under a
/// decoupling sequence.
pub fn robustness_verdict(
    gate: &GateParams,
    dd: DdSequence,
    opts: VerdictOptions,
) -> RobustnessReport {
    let w = build_two_qubit(gate);
    let period = if opts.alternating_idle { 2 } else { 1 } * dd.period();
    let cycles: Vec<Mat4> = (0..period)
        .map(|j| {
            let g = if opts.alternating_idle && j % 2 == 1 {
                Mat4::identity()
            } else {
                w
            };
            ideal_layer(dd, j) * g
        })
        .collect();
    let spectrum = adjoint_blocks(&cycles[0]);
    let bare = adjoint_matrix(&w);
    let flipped_degeneracies = spectrum
        .trivial_subspaces
        .iter()
        .filter(|t| t.overlaps_errors && flips_sign(&bare, &spectrum, t))
        .cloned()
        .collect();

    let directions = error_directions(opts.include_symmetric_xy);
    let adjoints: Vec<Adjoint15> = cycles.iter().map(adjoint_matrix).collect();
    let min_cancel = min_cancel_cycles(&adjoints, &directions);
    let residuals = schedule_residuals(
        &adjoints,
        &directions,
        min_cancel.unwrap_or(MAX_CANCEL_CYCLES),
    );
    RobustnessReport {
        spectrum,
        flipped_degeneracies,
        min_cancel_cycles: min_cancel,
        robust: min_cancel.is_some(),
        residuals: directions.into_iter().zip(residuals).collect(),
    }
}

/// Whether the bare gate acts as `−1` on the coordinates of a trivial
/// subspace of the cycle.
fn flips_sign(bare: &Adjoint15, spectrum: &AdjointSpectrum, t: &TrivialSubspace) -> bool {
    let offset = match t.symmetry {
        Symmetry::Symmetric => 3,
        _ => 9,
    };
    let block = match t.symmetry {
        Symmetry::Symmetric => &spectrum.symmetric,
        _ => &spectrum.antisymmetric,
    };
    let shifted = block - Block6::identity();
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    (0..6)
        .filter(|&k| svd.singular_values[k] < TRIVIAL_THRESHOLD)
        .all(|k| {
            let v = v_t.row(k).transpose();
            let mut full = SMatrix::<f64, 15, 1>::zeros();
            full.fixed_view_mut::<6, 1>(offset, 0).copy_from(&v);
            (bare * full + full).norm() < 1e-9
        })
}

/// Deviation of the noisy cycle product from the ideal one per error size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CancellationScan {
    pub cycles: usize,
    pub eps: Vec<f64>,
    pub deviation: Vec<f64>,
    /// Least-squares slope of `log deviation` against `log ε` over the
    /// nonzero points.
    pub slope: f64,
}

/// Compares `cycles` noisy cycles (every decoupling pulse on both qubits
/// carries `exp(−iε·direction·σ)` in its own frame) with the ideal product,
/// up to global phase. First-order robust sequences deviate as `ε²`.
pub fn verify_first_order_cancellation(
    gate: &GateParams,
    dd: DdSequence,
    eps_grid: &[f64],
    direction: [f64; 3],
    cycles: usize,
) -> CancellationScan {
    let w = build_two_qubit(gate);
    let product = |eps: f64| {
        let e = [eps * direction[0], eps * direction[1], eps * direction[2]];
        (0..cycles).fold(Mat4::identity(), |acc, j| {
            let layer = match dd.axes(j) {
                Some((a, b)) => kron(&noisy_pi_pulse(e, a), &noisy_pi_pulse(e, b)),
                None => Mat4::identity(),
            };
            layer * w * acc
        })
    };
    let ideal = product(0.0);
    let deviation: Vec<f64> = eps_grid
        .iter()
        .map(|&e| phase_aligned_distance(&product(e), &ideal))
        .collect();
    let points: Vec<(f64, f64)> = eps_grid
        .iter()
        .zip(&deviation)
        .filter(|(e, d)| **e > 0.0 && **d > 0.0)
        .map(|(e, d)| (e.ln(), d.ln()))
        .collect();
    let slope = if points.len() >= 2 {
        let n = points.len() as f64;
        let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
        let my = points.iter().map(|p| p.1).sum::<f64>() / n;
        points.iter().map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
            / points.iter().map(|(x, _)| (x - mx).powi(2)).sum::<f64>()
    } else {
        f64::NAN
    };
    CancellationScan {
        cycles,
        eps: eps_grid.to_vec(),
        deviation,
        slope,
    }
}
