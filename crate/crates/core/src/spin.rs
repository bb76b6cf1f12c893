//! 2x2 spin algebra in the sigma_z eigenbasis.

use crate::C64;

/// Hermitian 2x2 matrix written as `scalar * 1 + vector . sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpinMatrix {
    pub scalar: f64,
    pub vector: [f64; 3],
}

impl SpinMatrix {
    pub const ZERO: SpinMatrix = SpinMatrix {
        scalar: 0.0,
        vector: [0.0; 3],
    };

    pub fn from_vector(vector: [f64; 3]) -> Self {
        SpinMatrix {
            scalar: 0.0,
            vector,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.scalar == 0.0 && self.vector == [0.0; 3]
    }

    /// Dense form `[[h00, h01], [h10, h11]]`.
    pub fn to_matrix(&self) -> [[C64; 2]; 2] {
        let [bx, by, bz] = self.vector;
        let a = self.scalar;
        [
            [C64::new(a + bz, 0.0), C64::new(bx, -by)],
            [C64::new(bx, by), C64::new(a - bz, 0.0)],
        ]
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let b = norm3(&self.vector);
        [self.scalar - b, self.scalar + b]
    }

    /// Exact propagator `exp(-i h t)`.
    pub fn propagator(&self, t: f64) -> Su2 {
        let b = norm3(&self.vector);
        let phase = C64::from_polar(1.0, -self.scalar * t);
        if b == 0.0 {
            return Su2 {
                m: [[phase, C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), phase]],
            };
        }
        let (s, c) = (b * t).sin_cos();
        let [nx, ny, nz] = self.vector.map(|v| v / b);
        // cos(bt) - i sin(bt) n.sigma
        let m00 = C64::new(c, -s * nz);
        let m11 = C64::new(c, s * nz);
        let m01 = C64::new(0.0, -s) * C64::new(nx, -ny);
        let m10 = C64::new(0.0, -s) * C64::new(nx, ny);
        Su2 {
            m: [[phase * m00, phase * m01], [phase * m10, phase * m11]],
        }
    }
}

/// A 2x2 unitary acting on `(up, down)` amplitude pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2 {
    pub m: [[C64; 2]; 2],
}

impl Su2 {
    #[inline(always)]
    pub fn apply(&self, up: &mut C64, down: &mut C64) {
        let u = *up;
        let d = *down;
        *up = self.m[0][0] * u + self.m[0][1] * d;
        *down = self.m[1][0] * u + self.m[1][1] * d;
    }
}

pub(crate) fn norm3(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Unit spinor `chi` with `(axis . sigma) chi = sign * chi`, phase fixed so
/// that the first nonzero component is real and positive.
pub fn axis_eigenspinor(axis: [f64; 3], sign: f64) -> [C64; 2] {
    let [nx, ny, nz] = axis;
    let a = [C64::new(1.0 + sign * nz, 0.0), C64::new(sign * nx, sign * ny)];
    let b = [C64::new(sign * nx, -sign * ny), C64::new(1.0 - sign * nz, 0.0)];
    let na = a[0].norm_sqr() + a[1].norm_sqr();
    let nb = b[0].norm_sqr() + b[1].norm_sqr();
    let (v, n) = if na >= nb { (a, na) } else { (b, nb) };
    let n = n.sqrt();
    let mut chi = [v[0] / n, v[1] / n];
    let lead = if chi[0].norm() > 1e-15 { chi[0] } else { chi[1] };
    let phase = lead.conj() / lead.norm();
    chi[0] *= phase;
    chi[1] *= phase;
    chi
}

/// `(<sigma_x>, <sigma_y>, <sigma_z>)` bilinears of one spinor, unnormalised.
#[inline(always)]
pub fn sigma_bilinears(up: C64, down: C64) -> [f64; 3] {
    let cross = up.conj() * down;
    [
        2.0 * cross.re,
        2.0 * cross.im,
        up.norm_sqr() - down.norm_sqr(),
    ]
}
