//! Scalar barriers and spin-coupling profiles, and their sampling onto a grid.

use std::f64::consts::PI;

use crate::grid::{Grid1D, SpinorField};
use crate::spin::SpinMatrix;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialProfile {
    None,
    /// `U(y) = u0` on the closed interval `|y| <= half_width`.
    Rectangular { u0: f64, half_width: f64 },
}

impl PotentialProfile {
    pub fn value(&self, y: f64) -> f64 {
        match *self {
            PotentialProfile::None => 0.0,
            PotentialProfile::Rectangular { u0, half_width } => {
                if y.abs() <= half_width {
                    u0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn height(&self) -> f64 {
        match *self {
            PotentialProfile::None => 0.0,
            PotentialProfile::Rectangular { u0, .. } => u0,
        }
    }

    pub fn support_half_width(&self) -> f64 {
        match *self {
            PotentialProfile::None => 0.0,
            PotentialProfile::Rectangular { half_width, .. } => half_width,
        }
    }
}

pub fn rectangular_barrier(u0: f64, half_width: f64) -> Result<PotentialProfile> {
    if !(u0 >= 0.0) || !u0.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "barrier height must be >= 0, got {u0}"
        )));
    }
    if !(half_width > 0.0) || !half_width.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "barrier half-width must be > 0, got {half_width}"
        )));
    }
    Ok(PotentialProfile::Rectangular { u0, half_width })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpinCouplingProfile {
    None,
    /// `-(omega0/2) g(y) sigma_z` with `g = 1` on `|y| <= d`.
    LarmorZ { omega0: f64, d: f64 },
    /// `(omega0/2) f(y) . sigma` with `f` rotating in the x-y plane across
    /// `|y| < d`, fixed at `-sgn(y) x` for `d <= |y| <= l`, zero beyond.
    RotatingXY { omega0: f64, d: f64, l: f64 },
}

impl SpinCouplingProfile {
    pub fn omega0(&self) -> f64 {
        match *self {
            SpinCouplingProfile::None => 0.0,
            SpinCouplingProfile::LarmorZ { omega0, .. } => omega0,
            SpinCouplingProfile::RotatingXY { omega0, .. } => omega0,
        }
    }

    pub fn support_half_width(&self) -> f64 {
        match *self {
            SpinCouplingProfile::None => 0.0,
            SpinCouplingProfile::LarmorZ { d, .. } => d,
            SpinCouplingProfile::RotatingXY { l, .. } => l,
        }
    }

    /// Unit field direction (zero vector where the field is off).
    pub fn direction(&self, y: f64) -> [f64; 3] {
        match *self {
            SpinCouplingProfile::None => [0.0; 3],
            SpinCouplingProfile::LarmorZ { d, .. } => {
                if y.abs() <= d {
                    [0.0, 0.0, -1.0]
                } else {
                    [0.0; 3]
                }
            }
            SpinCouplingProfile::RotatingXY { d, l, .. } => {
                if y.abs() < d {
                    let (s, c) = (PI * y / (2.0 * d)).sin_cos();
                    [-s, c, 0.0]
                } else if y.abs() <= l {
                    [-y.signum(), 0.0, 0.0]
                } else {
                    [0.0; 3]
                }
            }
        }
    }

    pub fn matrix(&self, y: f64) -> SpinMatrix {
        let half = 0.5 * self.omega0();
        SpinMatrix::from_vector(self.direction(y).map(|c| half * c))
    }
}

pub fn larmor_profile(omega0: f64, d: f64) -> Result<SpinCouplingProfile> {
    check_coupling(omega0)?;
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Larmor half-width must be > 0, got {d}"
        )));
    }
    Ok(SpinCouplingProfile::LarmorZ { omega0, d })
}

pub fn rotating_field_profile(omega0: f64, d: f64, l: f64) -> Result<SpinCouplingProfile> {
    check_coupling(omega0)?;
    if !(d > 0.0) || !d.is_finite() || !(l >= d) || !l.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "rotating field needs L >= D > 0, got D = {d}, L = {l}"
        )));
    }
    Ok(SpinCouplingProfile::RotatingXY { omega0, d, l })
}

fn check_coupling(omega0: f64) -> Result<()> {
    if !(omega0 >= 0.0) || !omega0.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "coupling omega0 must be >= 0, got {omega0}"
        )));
    }
    Ok(())
}

/// Grid-sampled Hamiltonian `k^2/2m + U(y) + h_sf(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedHamiltonian {
    pub grid: Grid1D,
    pub u: Vec<f64>,
    pub h_sf: Vec<SpinMatrix>,
    pub mass: f64,
}

/// Samples both profiles pointwise at the grid nodes. Both supports must lie
/// strictly inside the grid.
pub fn sample(
    grid: Grid1D,
    pot: &PotentialProfile,
    sf: &SpinCouplingProfile,
) -> Result<DiscretizedHamiltonian> {
    let reach = pot.support_half_width().max(sf.support_half_width());
    if reach > 0.0 && (-reach <= grid.y_min() || reach >= grid.y_max()) {
        return Err(Error::InvalidGrid(format!(
            "profile support [-{reach}, {reach}] not inside grid [{}, {}]",
            grid.y_min(),
            grid.y_max()
        )));
    }
    Ok(DiscretizedHamiltonian {
        grid,
        u: grid.nodes().map(|y| pot.value(y)).collect(),
        h_sf: grid.nodes().map(|y| sf.matrix(y)).collect(),
        mass: 1.0,
    })
}

impl DiscretizedHamiltonian {
    /// Three-point kinetic operator `-(1/2m) d^2/dy^2` with zero Dirichlet
    /// values outside the grid.
    pub fn apply_kinetic(&self, psi: &[C64], out: &mut [C64]) {
        apply_kinetic(self.grid.dy(), self.mass, psi, out);
    }

    pub fn apply(&self, field: &SpinorField) -> SpinorField {
        let mut out = SpinorField::zeros(field.grid);
        self.apply_kinetic(&field.up, &mut out.up);
        self.apply_kinetic(&field.down, &mut out.down);
        for j in 0..field.grid.n_points() {
            let (u, d) = (field.up[j], field.down[j]);
            let m = self.h_sf[j].to_matrix();
            out.up[j] += self.u[j] * u + m[0][0] * u + m[0][1] * d;
            out.down[j] += self.u[j] * d + m[1][0] * u + m[1][1] * d;
        }
        out
    }

    /// `<psi|H|psi> / <psi|psi>` in the discrete l2 inner product.
    pub fn energy(&self, field: &SpinorField) -> f64 {
        let h = self.apply(field);
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..field.grid.n_points() {
            num += (field.up[j].conj() * h.up[j] + field.down[j].conj() * h.down[j]).re;
            den += field.up[j].norm_sqr() + field.down[j].norm_sqr();
        }
        num / den
    }
}

pub(crate) fn apply_kinetic(dy: f64, mass: f64, psi: &[C64], out: &mut [C64]) {
    let n = psi.len();
    let c = -0.5 / (mass * dy * dy);
    let zero = C64::new(0.0, 0.0);
    for j in 0..n {
        let left = if j > 0 { psi[j - 1] } else { zero };
        let right = if j + 1 < n { psi[j + 1] } else { zero };
        out[j] = c * (left + right - 2.0 * psi[j]);
    }
}
