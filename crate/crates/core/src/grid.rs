//! Uniform 1D grid, two-component wavefunction and Gaussian packets.

use serde::{Deserialize, Serialize};

use crate::spin::{axis_eigenspinor, norm3, sigma_bilinears};
use crate::{Error, Result, C64};

/// Smallest grid accepted by [`Grid1D::new`].
pub const MIN_POINTS: usize = 16;

/// Packets must keep this many widths between their centre and either edge.
pub const TAIL_WIDTHS: f64 = 8.0;

/// Uniform grid with nodes `y_j = y_min + j * dy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    y_min: f64,
    dy: f64,
    n_points: usize,
}

impl Grid1D {
    pub fn new(y_min: f64, y_max: f64, n_points: usize) -> Result<Self> {
        if !y_min.is_finite() || !y_max.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "non-finite bounds [{y_min}, {y_max}]"
            )));
        }
        if y_min >= y_max {
            return Err(Error::InvalidGrid(format!(
                "empty domain [{y_min}, {y_max}]"
            )));
        }
        if n_points < MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "{n_points} points, need at least {MIN_POINTS}"
            )));
        }
        let dy = (y_max - y_min) / (n_points - 1) as f64;
        Ok(Grid1D {
            y_min,
            dy,
            n_points,
        })
    }

    /// Grid from its first node and spacing.
    pub fn with_spacing(y_min: f64, dy: f64, n_points: usize) -> Result<Self> {
        if !y_min.is_finite() || !dy.is_finite() || dy <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "bad origin/spacing ({y_min}, {dy})"
            )));
        }
        if n_points < MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "{n_points} points, need at least {MIN_POINTS}"
            )));
        }
        Ok(Grid1D {
            y_min,
            dy,
            n_points,
        })
    }

    pub fn y_min(&self) -> f64 {
        self.y_min
    }

    pub fn y_max(&self) -> f64 {
        self.y(self.n_points - 1)
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.y_min + j as f64 * self.dy
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |j| self.y(j))
    }

    /// Integral over `[lo, hi]` of the piecewise-linear interpolant of a
    /// nodal density, evaluated for `K` densities in one pass.
    pub fn window_integral<const K: usize>(
        &self,
        lo: f64,
        hi: f64,
        density: impl Fn(usize) -> [f64; K],
    ) -> Result<[f64; K]> {
        let (y_min, y_max) = (self.y_min, self.y_max());
        let slack = 1e-9 * self.dy;
        if !(lo < hi) || lo < y_min - slack || hi > y_max + slack {
            return Err(Error::WindowOutsideGrid {
                lo,
                hi,
                y_min,
                y_max,
            });
        }
        let last = (self.n_points - 1) as f64;
        let s_lo = ((lo - y_min) / self.dy).clamp(0.0, last);
        let s_hi = ((hi - y_min) / self.dy).clamp(0.0, last);
        let mut acc = [0.0; K];
        let first = (s_lo.floor() as usize).min(self.n_points - 2);
        let end = (s_hi.ceil() as usize).max(first + 1);
        let mut f_left = density(first);
        for j in first..end {
            let f_right = density(j + 1);
            let a = s_lo.max(j as f64) - j as f64;
            let b = s_hi.min((j + 1) as f64) - j as f64;
            if b > a {
                for k in 0..K {
                    let slope = f_right[k] - f_left[k];
                    let fa = f_left[k] + a * slope;
                    let fb = f_left[k] + b * slope;
                    acc[k] += 0.5 * (b - a) * (fa + fb);
                }
            }
            f_left = f_right;
        }
        Ok(acc.map(|v| v * self.dy))
    }
}

/// Spin label along a quantisation axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum SpinSign {
    Up,
    Down,
}

impl SpinSign {
    pub fn value(self) -> f64 {
        match self {
            SpinSign::Up => 1.0,
            SpinSign::Down => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SpinSign::Up => "up",
            SpinSign::Down => "down",
        }
    }
}

impl TryFrom<i8> for SpinSign {
    type Error = String;

    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(SpinSign::Up),
            -1 => Ok(SpinSign::Down),
            other => Err(format!("spin_sign must be +1 or -1, got {other}")),
        }
    }
}

impl From<SpinSign> for i8 {
    fn from(s: SpinSign) -> i8 {
        match s {
            SpinSign::Up => 1,
            SpinSign::Down => -1,
        }
    }
}

/// Gaussian packet `psi0(y) chi` with `chi` an eigenspinor of `spin_axis . sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketSpec {
    pub y0: f64,
    pub sigma_y: f64,
    pub k0: f64,
    pub spin_axis: [f64; 3],
    pub spin_sign: SpinSign,
}

impl PacketSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_y > 0.0) || !self.sigma_y.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sigma_y must be positive, got {}",
                self.sigma_y
            )));
        }
        if !(self.k0 > 0.0) || !self.k0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "k0 must be positive, got {}",
                self.k0
            )));
        }
        if !self.y0.is_finite() {
            return Err(Error::InvalidParameter("y0 is not finite".into()));
        }
        if (norm3(&self.spin_axis) - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "spin axis {:?} is not a unit vector",
                self.spin_axis
            )));
        }
        Ok(())
    }

    /// Spatial amplitude before discrete renormalisation.
    pub fn amplitude(&self, y: f64) -> C64 {
        let s2 = self.sigma_y * self.sigma_y;
        let pref = (2.0 * std::f64::consts::PI * s2).powf(-0.25);
        let d = y - self.y0;
        C64::from_polar(pref * (-d * d / (4.0 * s2)).exp(), self.k0 * y)
    }
}

/// Two-component wavefunction on a grid, in the sigma_z eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    pub grid: Grid1D,
    pub up: Vec<C64>,
    pub down: Vec<C64>,
}

impl SpinorField {
    pub fn zeros(grid: Grid1D) -> Self {
        let n = grid.n_points();
        SpinorField {
            grid,
            up: vec![C64::new(0.0, 0.0); n],
            down: vec![C64::new(0.0, 0.0); n],
        }
    }

    /// Total norm over the whole grid.
    pub fn total_norm(&self) -> f64 {
        norm(self, self.grid.y_min(), self.grid.y_max()).expect("full-grid window")
    }

    pub fn normalize(&mut self) {
        let n = self.total_norm();
        if n > 0.0 {
            let s = 1.0 / n.sqrt();
            self.up.iter_mut().chain(self.down.iter_mut()).for_each(|a| *a *= s);
        }
    }

    /// Global `(<sigma_x>, <sigma_y>, <sigma_z>)`, not divided by the norm.
    pub fn sigma_totals(&self) -> [f64; 3] {
        self.grid
            .window_integral(self.grid.y_min(), self.grid.y_max(), |j| {
                sigma_bilinears(self.up[j], self.down[j])
            })
            .expect("full-grid window")
    }

    pub fn is_finite(&self) -> bool {
        self.up
            .iter()
            .chain(self.down.iter())
            .all(|a| a.re.is_finite() && a.im.is_finite())
    }
}

pub fn make_grid(y_min: f64, y_max: f64, n_points: usize) -> Result<Grid1D> {
    Grid1D::new(y_min, y_max, n_points)
}

/// Samples the packet on the grid and renormalises it there.
pub fn init_gaussian(grid: Grid1D, spec: &PacketSpec) -> Result<SpinorField> {
    spec.validate()?;
    let tail = TAIL_WIDTHS * spec.sigma_y;
    if spec.y0 - grid.y_min() < tail || grid.y_max() - spec.y0 < tail {
        return Err(Error::BoundaryContamination(format!(
            "packet at y0 = {} with sigma_y = {} needs {} of room inside [{}, {}]",
            spec.y0,
            spec.sigma_y,
            tail,
            grid.y_min(),
            grid.y_max()
        )));
    }
    let chi = axis_eigenspinor(spec.spin_axis, spec.spin_sign.value());
    let mut field = SpinorField::zeros(grid);
    for (j, y) in grid.nodes().enumerate() {
        let a = spec.amplitude(y);
        field.up[j] = a * chi[0];
        field.down[j] = a * chi[1];
    }
    field.normalize();
    Ok(field)
}

/// Probability in `[y_lo, y_hi]`.
pub fn norm(field: &SpinorField, y_lo: f64, y_hi: f64) -> Result<f64> {
    let [n] = field.grid.window_integral(y_lo, y_hi, |j| {
        [field.up[j].norm_sqr() + field.down[j].norm_sqr()]
    })?;
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x_up(y0: f64, sigma_y: f64, k0: f64) -> PacketSpec {
        PacketSpec {
            y0,
            sigma_y,
            k0,
            spin_axis: [1.0, 0.0, 0.0],
            spin_sign: SpinSign::Up,
        }
    }

    #[test]
    fn grid_spacing_arithmetic() {
        let g = make_grid(-20.0, 20.0, 17).unwrap();
        assert_eq!(g.dy(), 2.5);
        assert_eq!(g.y(4), -10.0);
        assert_eq!(g.y_max(), 20.0);

        let g = make_grid(-60.0, 60.0, 4097).unwrap();
        assert!((g.dy() - 0.029296875).abs() < 1e-15);
    }

    #[test]
    fn grid_rejects_degenerate_input() {
        assert!(make_grid(0.0, 0.0, 100).is_err());
        assert!(make_grid(-20.0, 20.0, 5).is_err());
        assert!(make_grid(f64::NAN, 1.0, 100).is_err());
        assert!(make_grid(0.0, f64::INFINITY, 100).is_err());
        assert!(Grid1D::with_spacing(0.0, -1.0, 100).is_err());
    }

    #[test]
    fn x_polarised_packet_spin() {
        let g = make_grid(-20.0, 20.0, 2001).unwrap();
        let f = init_gaussian(g, &x_up(-9.5, 1.0, 5.0)).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let j = 525; // y = -9.5
        assert!((f.up[j] - f.down[j]).norm() < 1e-15);
        let total = (f.up[j].norm_sqr() + f.down[j].norm_sqr()).sqrt();
        assert!((f.up[j].norm() / total - r).abs() < 1e-15);
        let [sx, sy, sz] = f.sigma_totals();
        assert!((sx / 2.0 - 0.5).abs() < 1e-12);
        assert!(sy.abs() < 1e-12 && sz.abs() < 1e-12);
    }

    #[test]
    fn packet_centre_and_norm() {
        let g = make_grid(-20.0, 20.0, 4001).unwrap();
        let f = init_gaussian(g, &x_up(-9.5, 1.0, 3.0)).unwrap();
        assert!((f.total_norm() - 1.0).abs() < 1e-12);
        let [m] = g
            .window_integral(g.y_min(), g.y_max(), |j| {
                [g.y(j) * (f.up[j].norm_sqr() + f.down[j].norm_sqr())]
            })
            .unwrap();
        assert!((m + 9.5).abs() < 1e-10);
    }

    #[test]
    fn packet_too_close_to_edge_is_rejected() {
        let g = make_grid(-10.0, 10.0, 1001).unwrap();
        let err = init_gaussian(g, &x_up(-9.5, 1.0, 3.0)).unwrap_err();
        assert!(matches!(err, Error::BoundaryContamination(_)));
    }

    #[test]
    fn packet_spec_validation() {
        let g = make_grid(-20.0, 20.0, 401).unwrap();
        assert!(init_gaussian(g, &x_up(0.0, 0.0, 1.0)).is_err());
        assert!(init_gaussian(g, &x_up(0.0, 1.0, 0.0)).is_err());
        let mut bad = x_up(0.0, 1.0, 1.0);
        bad.spin_axis = [1.0, 1.0, 0.0];
        assert!(init_gaussian(g, &bad).is_err());
    }

    #[test]
    fn tail_window_is_empty() {
        let g = make_grid(-30.0, 30.0, 3001).unwrap();
        let f = init_gaussian(g, &x_up(-9.5, 1.0, 3.0)).unwrap();
        assert!(norm(&f, 5.0, 30.0).unwrap() < 1e-12);
        assert!(norm(&f, -40.0, 0.0).is_err());
        assert!(norm(&f, 1.0, 1.0).is_err());
    }

    #[test]
    fn window_integral_of_linear_function_is_exact() {
        let g = make_grid(0.0, 10.0, 101).unwrap();
        // f(y) = 2y + 1 on [0.37, 7.912]
        let [v] = g.window_integral(0.37, 7.912, |j| [2.0 * g.y(j) + 1.0]).unwrap();
        let exact = |y: f64| y * y + y;
        assert!((v - (exact(7.912) - exact(0.37))).abs() < 1e-12);
    }

    #[test]
    fn spin_sign_serde() {
        let s: SpinSign = serde_json::from_str("-1").unwrap();
        assert_eq!(s, SpinSign::Down);
        assert_eq!(serde_json::to_string(&SpinSign::Up).unwrap(), "1");
        assert!(serde_json::from_str::<SpinSign>("0").is_err());
    }

    fn axis_strategy() -> impl Strategy<Value = [f64; 3]> {
        (0.0..std::f64::consts::PI, 0.0..std::f64::consts::TAU).prop_map(|(th, ph)| {
            [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn fresh_packet_is_normalised_and_polarised(
            y0 in -5.0..5.0f64,
            sigma in 0.5..2.0f64,
            k0 in 0.1..4.0f64,
            axis in axis_strategy(),
            up in any::<bool>(),
        ) {
            let g = make_grid(-30.0, 30.0, 2400).unwrap();
            let spec = PacketSpec {
                y0, sigma_y: sigma, k0, spin_axis: axis,
                spin_sign: if up { SpinSign::Up } else { SpinSign::Down },
            };
            let f = init_gaussian(g, &spec).unwrap();
            prop_assert!((f.total_norm() - 1.0).abs() < 1e-12);
            let s = f.sigma_totals();
            for i in 0..3 {
                prop_assert!((s[i] / 2.0 - spec.spin_sign.value() * axis[i] / 2.0).abs() < 1e-12);
            }
        }

        #[test]
        fn norm_is_additive(a in -29.0..-1.0f64, b in -1.0..1.0f64, c in 1.0..29.0f64) {
            let g = make_grid(-30.0, 30.0, 1201).unwrap();
            let f = init_gaussian(g, &x_up(0.0, 3.0, 1.3)).unwrap();
            let whole = norm(&f, a, c).unwrap();
            let parts = norm(&f, a, b).unwrap() + norm(&f, b, c).unwrap();
            prop_assert!((whole - parts).abs() < 1e-12);
        }
    }
}
