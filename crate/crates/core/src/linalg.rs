//! Small dense complex matrices and the handful of helpers the rest of the
//! crate shares. Basis ordering is lexicographic `{|00>, |01>, |10>, |11>}`
//! with the left qubit as the most significant bit.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use std::f64::consts::PI;

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;

/// Single-qubit unitary carrier.
pub type Unitary2 = Mat2;
/// Two-qubit unitary carrier.
pub type Unitary4 = Mat4;

/// Indices of the even-parity sector `{|00>, |11>}`.
pub const EVEN: [usize; 2] = [0, 3];
/// Indices of the odd-parity sector `{|01>, |10>}`.
pub const ODD: [usize; 2] = [1, 2];

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cis(angle: f64) -> C64 {
    C64::from_polar(1.0, angle)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> Mat2 {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match self {
            Pauli::I => Mat2::new(l, o, o, l),
            Pauli::X => Mat2::new(o, l, l, o),
            Pauli::Y => Mat2::new(o, -i, i, o),
            Pauli::Z => Mat2::new(l, o, o, -l),
        }
    }

    pub fn from_char(ch: char) -> Option<Pauli> {
        match ch {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Tensor product `a ⊗ b` with `a` acting on the left qubit.
pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    Mat4::from_fn(|r, col| a[(r / 2, col / 2)] * b[(r % 2, col % 2)])
}

/// Two-qubit Pauli string such as `"XY"`.
pub fn pauli_string(label: &str) -> Option<Mat4> {
    let mut chars = label.chars();
    let left = Pauli::from_char(chars.next()?)?;
    let right = Pauli::from_char(chars.next()?)?;
    if chars.next().is_some() {
        return None;
    }
    Some(kron(&left.matrix(), &right.matrix()))
}

/// `Z(a) = exp(-i a Z / 2)`.
pub fn z_rot(angle: f64) -> Mat2 {
    let o = C64::new(0.0, 0.0);
    Mat2::new(cis(-angle / 2.0), o, o, cis(angle / 2.0))
}

/// `X(a) = exp(-i a X / 2)`.
pub fn x_rot(angle: f64) -> Mat2 {
    let (s, co) = (angle / 2.0).sin_cos();
    Mat2::new(c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0))
}

/// `Y(a) = exp(-i a Y / 2)`.
pub fn y_rot(angle: f64) -> Mat2 {
    let (s, co) = (angle / 2.0).sin_cos();
    Mat2::new(c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0))
}

/// `exp(-i v·σ)` in closed form.
pub fn exp_pauli_vector(v: [f64; 3]) -> Mat2 {
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if norm == 0.0 {
        return Mat2::identity();
    }
    let (s, co) = norm.sin_cos();
    let (nx, ny, nz) = (v[0] / norm, v[1] / norm, v[2] / norm);
    Mat2::new(
        c(co, -s * nz),
        c(-s * ny, -s * nx),
        c(s * ny, -s * nx),
        c(co, s * nz),
    )
}

/// Writes `u = a0·I − i a·σ` for `u ∈ SU(2)` and returns `(a0, a)`.
/// For a general unitary the determinant phase is divided out first.
pub fn su2_components(u: &Mat2) -> (f64, [f64; 3]) {
    let half = u.determinant().arg() / 2.0;
    let v = u * cis(-half);
    let a0 = 0.5 * (v[(0, 0)] + v[(1, 1)]).re;
    let ax = -0.5 * (v[(0, 1)] + v[(1, 0)]).im;
    let ay = 0.5 * (v[(1, 0)] - v[(0, 1)]).re;
    let az = -0.5 * (v[(0, 0)] - v[(1, 1)]).im;
    (a0, [ax, ay, az])
}

/// Reduce an angle into `(-π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}

/// Frobenius norm of `U U† − I`.
pub fn unitarity_defect2(u: &Mat2) -> f64 {
    (u * u.adjoint() - Mat2::identity()).norm()
}

/// Frobenius norm of `U U† − I`.
pub fn unitarity_defect4(u: &Mat4) -> f64 {
    (u * u.adjoint() - Mat4::identity()).norm()
}

/// `min_φ ‖a − e^{iφ} b‖_F`, the distance after optimal global-phase alignment.
pub fn phase_aligned_distance<const D: usize>(
    a: &nalgebra::SMatrix<C64, D, D>,
    b: &nalgebra::SMatrix<C64, D, D>,
) -> f64 {
    let overlap = (b.adjoint() * a).trace();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    (a - b * phase).norm()
}

/// Assemble `even ⊕ odd` on `{|00>,|11>} ⊕ {|01>,|10>}`.
pub fn direct_sum(even: &Mat2, odd: &Mat2) -> Mat4 {
    let mut m = Mat4::zeros();
    for r in 0..2 {
        for col in 0..2 {
            m[(EVEN[r], EVEN[col])] = even[(r, col)];
            m[(ODD[r], ODD[col])] = odd[(r, col)];
        }
    }
    m
}

pub fn even_block(m: &Mat4) -> Mat2 {
    Mat2::from_fn(|r, col| m[(EVEN[r], EVEN[col])])
}

pub fn odd_block(m: &Mat4) -> Mat2 {
    Mat2::from_fn(|r, col| m[(ODD[r], ODD[col])])
}

/// Frobenius mass of the entries coupling the two parity sectors.
pub fn off_block_mass(m: &Mat4) -> f64 {
    let mut acc = 0.0;
    for r in 0..4 {
        for col in 0..4 {
            let r_even = r == 0 || r == 3;
            let c_even = col == 0 || col == 3;
            if r_even != c_even {
                acc += m[(r, col)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Unitary factor `U V†` of the polar decomposition of a 2×2 matrix.
pub fn polar_unitary(m: &Mat2) -> Mat2 {
    let svd = m.svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    u * v_t
}

pub fn matrix_power2(m: &Mat2, n: usize) -> Mat2 {
    let mut acc = Mat2::identity();
    for _ in 0..n {
        acc *= m;
    }
    acc
}

pub fn matrix_power4(m: &Mat4, n: usize) -> Mat4 {
    let mut acc = Mat4::identity();
    for _ in 0..n {
        acc *= m;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_angle_lands_in_half_open_interval() {
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert_eq!(wrap_angle(0.25), 0.25);
    }

    #[test]
    fn exp_pauli_vector_matches_series() {
        let v = [0.3, -0.2, 0.7];
        let gen = (Pauli::X.matrix() * c(v[0], 0.0)
            + Pauli::Y.matrix() * c(v[1], 0.0)
            + Pauli::Z.matrix() * c(v[2], 0.0))
            * c(0.0, -1.0);
        let mut term = Mat2::identity();
        let mut sum = Mat2::identity();
        for k in 1..40 {
            term = term * gen / c(k as f64, 0.0);
            sum += term;
        }
        assert!((exp_pauli_vector(v) - sum).norm() < 1e-14);
    }

    #[test]
    fn su2_components_round_trip() {
        let u = exp_pauli_vector([0.1, 0.4, -0.9]) * cis(0.37);
        let (a0, a) = su2_components(&u);
        let rebuilt = Mat2::identity() * c(a0, 0.0)
            - (Pauli::X.matrix() * c(a[0], 0.0)
                + Pauli::Y.matrix() * c(a[1], 0.0)
                + Pauli::Z.matrix() * c(a[2], 0.0))
                * c(0.0, 1.0);
        assert!(phase_aligned_distance(&u, &rebuilt) < 1e-14);
    }

    #[test]
    fn polar_factor_of_scaled_unitary_is_the_unitary() {
        let u = exp_pauli_vector([0.2, 0.1, 0.3]);
        let p = polar_unitary(&(u * c(0.4, 0.0)));
        assert!((p - u).norm() < 1e-13);
    }

    #[test]
    fn kron_places_left_qubit_on_the_high_bit() {
        let m = kron(&Pauli::X.matrix(), &Pauli::I.matrix());
        assert_eq!(m[(2, 0)], c(1.0, 0.0));
        assert_eq!(m[(1, 0)], c(0.0, 0.0));
    }
}
