use crate::linalg::{c, Mat2, C64};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Product-state preparations, written left qubit first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Prep {
    /// `|+0>`
    Plus0,
    /// `|0+>`
    ZeroPlus,
    /// `|10>`
    One0,
    /// `|01>`
    Zero1,
    /// `|+1>`
    PlusOne,
    /// `|1+>`
    OnePlus,
}

impl Prep {
    pub fn index(self) -> u64 {
        self as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Qubit {
    Left,
    Right,
}

/// Measurement settings, realized as a basis change before a computational
/// readout of both qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Basis {
    Computational,
    /// Both qubits in X.
    Xx,
    /// Both qubits in Y.
    Yy,
    /// Odd-parity Bell basis diagonalizing `X_odd`.
    BellX,
    /// Odd-parity Bell basis diagonalizing `Y_odd`.
    BellY,
}

impl Basis {
    pub fn index(self) -> u64 {
        self as u64
    }
}

/// Observable keys of [`DepthRecord::complex_expectations`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Observable {
    /// `⟨X⟩ + i⟨Y⟩` of one qubit.
    Coherence(Qubit),
    /// `X_odd = |10><01| + |01><10|`.
    XOdd,
    /// `Y_odd`, with `|01>` as the `+Z_odd` state.
    YOdd,
    /// `Z_odd = |01><01| − |10><10|`.
    ZOdd,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DepthRecord {
    pub depth: usize,
    /// Complex expectations keyed by preparation and observable. Real-valued
    /// observables carry a zero imaginary part.
    pub complex_expectations: BTreeMap<(Prep, Observable), C64>,
    /// Computational-basis populations `[P00, P01, P10, P11]` per preparation.
    pub populations: BTreeMap<Prep, [f64; 4]>,
    /// Raw tallies per preparation and basis (absent in exact mode).
    pub counts: BTreeMap<(Prep, Basis), Vec<u64>>,
    /// Mean fraction of shots kept by odd-parity postselection.
    pub parity_postselected_fraction: f64,
}

impl DepthRecord {
    pub fn new(depth: usize) -> Self {
        DepthRecord {
            depth,
            parity_postselected_fraction: 1.0,
            ..DepthRecord::default()
        }
    }

    pub fn get(&self, prep: Prep, obs: Observable) -> Option<C64> {
        self.complex_expectations.get(&(prep, obs)).copied()
    }

    pub fn coherence(&self, prep: Prep, qubit: Qubit) -> Option<C64> {
        self.get(prep, Observable::Coherence(qubit))
    }

    /// Odd-block matrix referenced to `|00>`: column `|01>` from `|0+>`,
    /// column `|10>` from `|+0>`; row `|01>` from the right qubit, row `|10>`
    /// from the left qubit.
    pub fn matrix(&self) -> Option<Mat2> {
        let a = self.coherence(Prep::ZeroPlus, Qubit::Right)?;
        let b = self.coherence(Prep::ZeroPlus, Qubit::Left)?;
        let d = self.coherence(Prep::Plus0, Qubit::Right)?;
        let e = self.coherence(Prep::Plus0, Qubit::Left)?;
        Some(Mat2::new(a, d, b, e))
    }

    /// Odd-block matrix referenced to `|11>`. Its entries are
    /// `W11 · conj(W_odd)` entrywise.
    pub fn matrix_ref11(&self) -> Option<Mat2> {
        let a = self.coherence(Prep::PlusOne, Qubit::Left)?;
        let b = self.coherence(Prep::PlusOne, Qubit::Right)?;
        let d = self.coherence(Prep::OnePlus, Qubit::Left)?;
        let e = self.coherence(Prep::OnePlus, Qubit::Right)?;
        Some(Mat2::new(a, d, b, e))
    }

    /// `(X_odd, Y_odd, Z_odd)` for one preparation.
    pub fn bloch(&self, prep: Prep) -> Option<[f64; 3]> {
        Some([
            self.get(prep, Observable::XOdd)?.re,
            self.get(prep, Observable::YOdd)?.re,
            self.get(prep, Observable::ZOdd)?.re,
        ])
    }

    pub(crate) fn insert_real(&mut self, prep: Prep, obs: Observable, value: f64) {
        self.complex_expectations.insert((prep, obs), c(value, 0.0));
    }
}
