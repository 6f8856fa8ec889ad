//! Matrix Lie groups viewed as groupoids over a single point.

use super::Groupoid;
use crate::numerics::{dot, square_identity, square_mul, square_transpose, Matrix, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixGroupKind {
    /// `SO(3)`, with Rodrigues' formula and orthogonality projection.
    SpecialOrthogonal3,
    /// A subgroup of `GL(n)` given only through a Lie algebra basis.
    General,
}

/// A matrix group `G ⊂ GL(n)` with chart `n²` row-major entries and a fixed
/// basis of its Lie algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixGroup {
    n: usize,
    basis: Vec<Vec<f64>>,
    kind: MatrixGroupKind,
}

/// `ξ̂` for `ξ ∈ ℝ³`, row-major.
pub fn so3_hat<S: Scalar>(xi: &[S]) -> Vec<S> {
    let z = S::zero();
    vec![z, -xi[2], xi[1], xi[2], z, -xi[0], -xi[1], xi[0], z]
}

/// Inverse of [`so3_hat`] on the skew part of a 3×3 matrix.
pub fn so3_vee(m: &[f64]) -> [f64; 3] {
    [
        0.5 * (m[7] - m[5]),
        0.5 * (m[2] - m[6]),
        0.5 * (m[3] - m[1]),
    ]
}

impl MatrixGroup {
    pub fn so3() -> Self {
        let basis = (0..3)
            .map(|k| {
                let mut e = [0.0; 3];
                e[k] = 1.0;
                so3_hat(&e)
            })
            .collect();
        Self {
            n: 3,
            basis,
            kind: MatrixGroupKind::SpecialOrthogonal3,
        }
    }

    /// A group described by `n×n` row-major algebra basis matrices.
    pub fn with_basis(n: usize, basis: Vec<Vec<f64>>) -> Self {
        assert!(
            basis.iter().all(|b| b.len() == n * n),
            "dimension mismatch in algebra basis"
        );
        Self {
            n,
            basis,
            kind: MatrixGroupKind::General,
        }
    }

    pub fn matrix_size(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> MatrixGroupKind {
        self.kind
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// `ξ̂ = Σ ξ_k E_k`.
    pub fn hat<S: Scalar>(&self, xi: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.n * self.n];
        for (coef, e) in xi.iter().zip(&self.basis) {
            for (o, &b) in out.iter_mut().zip(e) {
                *o += *coef * b;
            }
        }
        out
    }

    /// Coordinates of the algebra element closest to `m` in the Frobenius
    /// inner product.
    pub fn vee(&self, m: &[f64]) -> Vec<f64> {
        let r = self.basis.len();
        let gram = Matrix::from_rows(
            &(0..r)
                .map(|i| (0..r).map(|j| dot(&self.basis[i], &self.basis[j])).collect())
                .collect::<Vec<_>>(),
        );
        let rhs: Vec<f64> = self.basis.iter().map(|e| dot(e, m)).collect();
        gram.solve(&rhs).expect("algebra basis is linearly independent")
    }

    /// Matrix commutator `[A, B] = AB − BA`.
    pub fn commutator(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        let ab = square_mul(a, b, self.n);
        let ba = square_mul(b, a, self.n);
        ab.iter().zip(&ba).map(|(x, y)| x - y).collect()
    }

    /// `exp(ξ̂)`.
    pub fn exp<S: Scalar>(&self, xi: &[S]) -> Vec<S> {
        match self.kind {
            MatrixGroupKind::SpecialOrthogonal3 => rodrigues(xi),
            MatrixGroupKind::General => scaled_squaring_exp(&self.hat(xi), self.n),
        }
    }

    /// Unit quaternion `(w, x, y, z)` with `w ≥ 0` for a rotation matrix.
    pub fn quaternion(r: &[f64]) -> [f64; 4] {
        let tr = r[0] + r[4] + r[8];
        let q = if tr > 0.0 {
            let s = (tr + 1.0).sqrt() * 2.0;
            [0.25 * s, (r[7] - r[5]) / s, (r[2] - r[6]) / s, (r[3] - r[1]) / s]
        } else if r[0] > r[4] && r[0] > r[8] {
            let s = (1.0 + r[0] - r[4] - r[8]).sqrt() * 2.0;
            [(r[7] - r[5]) / s, 0.25 * s, (r[1] + r[3]) / s, (r[2] + r[6]) / s]
        } else if r[4] > r[8] {
            let s = (1.0 + r[4] - r[0] - r[8]).sqrt() * 2.0;
            [(r[2] - r[6]) / s, (r[1] + r[3]) / s, 0.25 * s, (r[5] + r[7]) / s]
        } else {
            let s = (1.0 + r[8] - r[0] - r[4]).sqrt() * 2.0;
            [(r[3] - r[1]) / s, (r[2] + r[6]) / s, (r[5] + r[7]) / s, 0.25 * s]
        };
        let norm = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        let sign = if q[0] < 0.0 { -1.0 } else { 1.0 };
        q.map(|v| sign * v / norm)
    }

    /// Rotation matrix of a unit quaternion `(w, x, y, z)`.
    pub fn rotation_from_quaternion(q: [f64; 4]) -> Vec<f64> {
        let norm = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        let [w, x, y, z] = q.map(|v| v / norm);
        vec![
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ]
    }
}

fn rodrigues<S: Scalar>(xi: &[S]) -> Vec<S> {
    let theta2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    // Series in θ² keep the map smooth (and dual-safe) at the origin.
    let (a, b) = if theta2.value() < 1e-4 {
        let t2 = theta2;
        let a = S::one() - t2 / 6.0 + t2 * t2 / 120.0 - t2 * t2 * t2 / 5040.0
            + t2 * t2 * t2 * t2 / 362_880.0;
        let b = S::from_f64(0.5) - t2 / 24.0 + t2 * t2 / 720.0 - t2 * t2 * t2 / 40_320.0
            + t2 * t2 * t2 * t2 / 3_628_800.0;
        (a, b)
    } else {
        let theta = theta2.sqrt();
        (theta.sin() / theta, (S::one() - theta.cos()) / theta2)
    };
    let k = so3_hat(xi);
    let k2 = square_mul(&k, &k, 3);
    let mut r = square_identity::<S>(3);
    for i in 0..9 {
        r[i] += a * k[i] + b * k2[i];
    }
    r
}

fn scaled_squaring_exp<S: Scalar>(x: &[S], n: usize) -> Vec<S> {
    let norm = x.iter().map(|v| v.value().abs()).fold(0.0, f64::max) * n as f64;
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scale = 0.5f64.powi(squarings as i32);
    let a: Vec<S> = x.iter().map(|&v| v * scale).collect();
    let mut sum = square_identity::<S>(n);
    let mut term = square_identity::<S>(n);
    for k in 1..=20 {
        term = square_mul(&term, &a, n)
            .into_iter()
            .map(|v| v / k as f64)
            .collect();
        for (s, &t) in sum.iter_mut().zip(&term) {
            *s += t;
        }
    }
    for _ in 0..squarings {
        sum = square_mul(&sum, &sum, n);
    }
    sum
}

/// Gauss–Jordan inverse with partial pivoting on the primal values.
fn inverse_generic<S: Scalar>(m: &[S], n: usize) -> Vec<S> {
    let mut a = m.to_vec();
    let mut inv = square_identity::<S>(n);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                a[i * n + col]
                    .value()
                    .abs()
                    .total_cmp(&a[j * n + col].value().abs())
            })
            .expect("nonempty range");
        if pivot != col {
            for c in 0..n {
                a.swap(col * n + c, pivot * n + c);
                inv.swap(col * n + c, pivot * n + c);
            }
        }
        let p = a[col * n + col];
        for c in 0..n {
            a[col * n + c] = a[col * n + c] / p;
            inv[col * n + c] = inv[col * n + c] / p;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = a[r * n + col];
            for c in 0..n {
                let ac = a[col * n + c];
                let ic = inv[col * n + c];
                a[r * n + c] -= factor * ac;
                inv[r * n + c] -= factor * ic;
            }
        }
    }
    inv
}

impl Groupoid for MatrixGroup {
    fn base_dim(&self) -> usize {
        0
    }

    fn chart_dim(&self) -> usize {
        self.n * self.n
    }

    fn rank(&self) -> usize {
        self.basis.len()
    }

    fn source_chart<S: Scalar>(&self, _g: &[S]) -> Vec<S> {
        Vec::new()
    }

    fn target_chart<S: Scalar>(&self, _g: &[S]) -> Vec<S> {
        Vec::new()
    }

    fn identity_chart<S: Scalar>(&self, _q: &[S]) -> Vec<S> {
        square_identity(self.n)
    }

    fn inverse_chart<S: Scalar>(&self, g: &[S]) -> Vec<S> {
        match self.kind {
            MatrixGroupKind::SpecialOrthogonal3 => square_transpose(g, 3),
            MatrixGroupKind::General => inverse_generic(g, self.n),
        }
    }

    fn compose_chart<S: Scalar>(&self, a: &[S], b: &[S]) -> Vec<S> {
        square_mul(a, b, self.n)
    }

    fn exp_chart_generic<S: Scalar>(&self, _q: &[S], xi: &[S]) -> Vec<S> {
        self.exp(xi)
    }

    fn extrapolate(&self, g_prev: &[f64]) -> Vec<f64> {
        g_prev.to_vec()
    }

    fn constraint_defect(&self, g: &[f64]) -> f64 {
        match self.kind {
            MatrixGroupKind::SpecialOrthogonal3 => {
                let m = Matrix::from_row_slice(3, 3, g);
                if m.determinant() <= 0.0 {
                    return f64::INFINITY;
                }
                (&m.transpose() * &m).sub(&Matrix::identity(3)).max_abs()
            }
            MatrixGroupKind::General => 0.0,
        }
    }

    fn project(&self, g: &[f64]) -> Vec<f64> {
        match self.kind {
            MatrixGroupKind::SpecialOrthogonal3 => polar_rotation(g),
            MatrixGroupKind::General => g.to_vec(),
        }
    }
}

/// Orthogonal polar factor of a nonsingular 3×3 matrix, by the Newton
/// iteration `X ← ½(X + X⁻ᵀ)`.
fn polar_rotation(g: &[f64]) -> Vec<f64> {
    let mut x = Matrix::from_row_slice(3, 3, g);
    for _ in 0..30 {
        let Some(inv) = x.inverse() else {
            break;
        };
        let next = x.add(&inv.transpose()).scale(0.5);
        let change = next.sub(&x).max_abs();
        x = next;
        if change < 1e-16 {
            break;
        }
    }
    x.into_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{check_admissible, AlgebroidVector, BasePoint, GroupoidElement};
    use std::f64::consts::FRAC_PI_2;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn quarter_turn_about_z() {
        let g = MatrixGroup::so3();
        let xi = AlgebroidVector::new(BasePoint::point(), vec![0.0, 0.0, FRAC_PI_2]);
        let r = g.exp_chart(&BasePoint::point(), &xi, 1.0);
        let expected = [0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0];
        assert!(close(r.coords(), &expected, 1e-15));
        let zero = g.exp_chart(&BasePoint::point(), &xi, 0.0);
        assert_eq!(zero, g.identity(&BasePoint::point()));
    }

    #[test]
    fn rodrigues_matches_series_exp() {
        let so3 = MatrixGroup::so3();
        let general = MatrixGroup::with_basis(3, so3.basis().to_vec());
        for xi in [[0.3, -0.2, 0.5], [1e-4, 2e-4, -1e-4], [2.0, -1.5, 0.7]] {
            let a: Vec<f64> = so3.exp(&xi);
            let b: Vec<f64> = general.exp(&xi);
            assert!(close(&a, &b, 1e-13), "{xi:?}");
        }
    }

    #[test]
    fn small_angle_branch_is_continuous() {
        let so3 = MatrixGroup::so3();
        let below = [0.0, 0.0, 0.99e-2];
        let above = [0.0, 0.0, 1.01e-2];
        for xi in [below, above] {
            let r: Vec<f64> = so3.exp(&xi);
            let t = xi[2];
            let exact = [t.cos(), -t.sin(), 0.0, t.sin(), t.cos(), 0.0, 0.0, 0.0, 1.0];
            assert!(close(&r, &exact, 1e-16));
        }
    }

    #[test]
    fn so3_structure_maps() {
        let g = MatrixGroup::so3();
        let r1 = GroupoidElement::new(g.exp(&[0.1, 0.2, 0.3]));
        let r2 = GroupoidElement::new(g.exp(&[-0.4, 0.0, 0.9]));
        let prod = g.compose(&r1, &r2).unwrap();
        assert_eq!(prod.coords(), &square_mul(r1.coords(), r2.coords(), 3)[..]);
        assert_eq!(g.inverse(&r1).coords(), &square_transpose(r1.coords(), 3)[..]);
        assert!(g.constraint_defect(prod.coords()) < 1e-15);
    }

    #[test]
    fn so3_admissible_sequence() {
        let g = MatrixGroup::so3();
        let r = GroupoidElement::new(g.exp(&[0.5, -0.1, 0.2]));
        let q = GroupoidElement::new(g.exp(&[-0.3, 0.8, 1.1]));
        let rt_q = g.compose(&g.inverse(&r), &q).unwrap();
        assert!(check_admissible(&g, &[r, rt_q], &q).is_ok());
    }

    #[test]
    fn vee_inverts_hat() {
        let g = MatrixGroup::so3();
        let xi = [0.3, -2.0, 1.5];
        let m: Vec<f64> = g.hat(&xi);
        assert!(close(&g.vee(&m), &xi, 1e-15));
        assert_eq!(so3_vee(&m), xi);
    }

    #[test]
    fn general_inverse() {
        let basis = vec![
            vec![0.0, 1.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0, -1.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ];
        let sl2 = MatrixGroup::with_basis(2, basis);
        let a: Vec<f64> = sl2.exp(&[0.4, -0.3, 1.2]);
        let inv = sl2.inverse_chart(&a);
        let id = square_mul(&a, &inv, 2);
        assert!(close(&id, &[1.0, 0.0, 0.0, 1.0], 1e-14));
        let det = a[0] * a[3] - a[1] * a[2];
        assert!((det - 1.0).abs() < 1e-13);
    }

    #[test]
    fn normalization_restores_orthogonality() {
        let g = MatrixGroup::so3();
        let mut r: Vec<f64> = g.exp(&[0.7, 0.1, -0.4]);
        r[0] += 1e-9;
        r[5] -= 2e-9;
        assert!(g.constraint_defect(&r) > 1e-12);
        let fixed = g.normalize(GroupoidElement::new(r.clone()));
        assert!(g.constraint_defect(fixed.coords()) < 1e-15);
        assert!(close(fixed.coords(), &r, 1e-8));
    }

    #[test]
    fn quaternion_round_trip() {
        let g = MatrixGroup::so3();
        for xi in [[0.1, 0.2, 0.3], [3.0, 0.0, 0.1], [0.0, -3.1, 0.2], [0.0, 0.0, 3.13]] {
            let r: Vec<f64> = g.exp(&xi);
            let q = MatrixGroup::quaternion(&r);
            assert!(q[0] >= 0.0);
            let back = MatrixGroup::rotation_from_quaternion(q);
            assert!(close(&back, &r, 1e-14), "{xi:?}");
        }
    }
}
