//! Clock readouts computed from a final state.
//!
//! Every quantity is conditional on the part of the packet beyond a cut
//! `y_cut`, i.e. on transmission.

use std::f64::consts::{PI, TAU};

use crate::fields::apply_kinetic;
use crate::grid::{norm, SpinorField};
use crate::propagator::EvolveDiagnostics;
use crate::spin::sigma_bilinears;
use crate::{Error, Result, C64};

/// Smallest transmitted norm for which conditional spin readouts are formed.
pub const MIN_REGION_NORM: f64 = 1e-12;
/// Smallest transmitted norm for the kinetic-energy readout.
pub const MIN_KINETIC_NORM: f64 = 1e-10;
/// Width of the raised-cosine taper, in cells, applied before the kinetic
/// energy is measured.
pub const TAPER_CELLS: f64 = 4.0;

/// Conditional `<S_i>` (`hbar = 1`) on `y > y_cut`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinExpectations {
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
    pub region_norm: f64,
}

impl SpinExpectations {
    pub fn as_array(&self) -> [f64; 3] {
        [self.sx, self.sy, self.sz]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClockReadout {
    pub tau_y: Option<f64>,
    pub tau_z: Option<f64>,
    pub transmission: f64,
    pub flip_prob: Option<f64>,
    pub mean_kinetic_energy: Option<f64>,
    pub diagnostics: EvolveDiagnostics,
}

pub fn spin_expectations(field: &SpinorField, y_cut: f64) -> Result<SpinExpectations> {
    let g = field.grid;
    let [n, sx, sy, sz] = g.window_integral(y_cut, g.y_max(), |j| {
        let [a, b, c] = sigma_bilinears(field.up[j], field.down[j]);
        [field.up[j].norm_sqr() + field.down[j].norm_sqr(), a, b, c]
    })?;
    if n < MIN_REGION_NORM {
        return Err(Error::NoTransmission { y_cut, norm: n });
    }
    Ok(SpinExpectations {
        sx: 0.5 * sx / n,
        sy: 0.5 * sy / n,
        sz: 0.5 * sz / n,
        region_norm: n,
    })
}

/// Larmor times from the precession angles of the conditional spin.
///
/// `tau_y` uses the quadrant-aware angle of `(S_x, -S_y)` in `[0, 2 pi)`;
/// `tau_z` the principal arctangent of `S_z / |S_perp|`.
pub fn larmor_times(spins: &SpinExpectations, omega0: f64) -> Result<(f64, f64)> {
    if !(omega0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Larmor times need omega0 > 0, got {omega0}"
        )));
    }
    if spins.sx == 0.0 && spins.sy == 0.0 {
        return Err(Error::UndefinedPhase);
    }
    let mut angle = (-spins.sy).atan2(spins.sx);
    if angle < 0.0 {
        angle += TAU;
    }
    // atan2(-0.0, x<0) is -pi; keep the result inside [0, 2 pi)
    if angle >= TAU {
        angle -= TAU;
    }
    let perp = spins.sx.hypot(spins.sy);
    Ok((angle / omega0, (spins.sz / perp).atan() / omega0))
}

pub fn transmission_probability(field: &SpinorField, y_cut: f64) -> Result<f64> {
    norm(field, y_cut, field.grid.y_max())
}

/// Conditional probability that the transmitted spin is found opposite to
/// the adiabatic image of its initial state, i.e. with eigenvalue
/// `-initial_sign` of `exit_axis . sigma`.
pub fn spin_flip_probability(
    field: &SpinorField,
    y_cut: f64,
    exit_axis: [f64; 3],
    initial_sign: f64,
) -> Result<f64> {
    let s = spin_expectations(field, y_cut)?;
    let along = 2.0 * (exit_axis[0] * s.sx + exit_axis[1] * s.sy + exit_axis[2] * s.sz);
    Ok((0.5 * (1.0 - initial_sign * along)).clamp(0.0, 1.0))
}

/// `<k^2/2m>` of the transmitted packet, windowed with a raised-cosine edge
/// at `y_cut` and measured with the propagator's three-point stencil.
pub fn mean_kinetic_energy_transmitted(field: &SpinorField, y_cut: f64) -> Result<f64> {
    let g = field.grid;
    let region = norm(field, y_cut, g.y_max())?;
    if region < MIN_KINETIC_NORM {
        return Err(Error::NoTransmission {
            y_cut,
            norm: region,
        });
    }
    let width = TAPER_CELLS * g.dy();
    let taper = |y: f64| {
        if y <= y_cut {
            0.0
        } else if y >= y_cut + width {
            1.0
        } else {
            0.5 * (1.0 - (PI * (y - y_cut) / width).cos())
        }
    };
    let n = g.n_points();
    let mut num = 0.0;
    let mut den = 0.0;
    let mut windowed = vec![C64::new(0.0, 0.0); n];
    let mut kinetic = vec![C64::new(0.0, 0.0); n];
    for comp in [&field.up, &field.down] {
        for (j, w) in windowed.iter_mut().enumerate() {
            *w = comp[j] * taper(g.y(j));
        }
        apply_kinetic(g.dy(), 1.0, &windowed, &mut kinetic);
        for j in 0..n {
            num += (windowed[j].conj() * kinetic[j]).re;
            den += windowed[j].norm_sqr();
        }
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{larmor_profile, sample, PotentialProfile, SpinCouplingProfile};
    use crate::grid::{init_gaussian, make_grid, Grid1D, PacketSpec, SpinSign};
    use crate::oracles::barrier_transmission;
    use crate::propagator::{auto_resolution, evolve, EvolveParams, ResolutionRules};
    use proptest::prelude::*;

    fn spec(y0: f64, sigma_y: f64, k0: f64, axis: [f64; 3], sign: SpinSign) -> PacketSpec {
        PacketSpec {
            y0,
            sigma_y,
            k0,
            spin_axis: axis,
            spin_sign: sign,
        }
    }

    fn spins(sx: f64, sy: f64, sz: f64) -> SpinExpectations {
        SpinExpectations {
            sx,
            sy,
            sz,
            region_norm: 1.0,
        }
    }

    #[test]
    fn fresh_packet_spin() {
        let g = make_grid(-30.0, 30.0, 3001).unwrap();
        let f = init_gaussian(g, &spec(0.0, 1.0, 2.0, [1.0, 0.0, 0.0], SpinSign::Up)).unwrap();
        let s = spin_expectations(&f, -20.0).unwrap();
        assert!((s.sx - 0.5).abs() < 1e-12 && s.sy.abs() < 1e-12 && s.sz.abs() < 1e-12);
        assert!(matches!(spin_expectations(&f, 20.0), Err(Error::NoTransmission { .. })));
    }

    #[test]
    fn larmor_time_examples() {
        assert_eq!(larmor_times(&spins(0.5, 0.0, 0.0), 0.3).unwrap(), (0.0, 0.0));
        let (w, t) = (0.2f64, 1.7);
        let a = w * t;
        let (ty, tz) = larmor_times(&spins(0.5 * a.cos(), -0.5 * a.sin(), 0.0), w).unwrap();
        assert!((ty - t).abs() < 1e-13 && tz == 0.0);
        // beyond a quarter turn the angle is not aliased
        let a = 2.6f64;
        let (ty, _) = larmor_times(&spins(0.5 * a.cos(), -0.5 * a.sin(), 0.0), 1.0).unwrap();
        assert!((ty - 2.6).abs() < 1e-13);
        assert!(matches!(larmor_times(&spins(0.0, 0.0, 0.5), 1.0), Err(Error::UndefinedPhase)));
        assert!(larmor_times(&spins(0.5, 0.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn larmor_times_of_plane_wave_spinor_match_oracle() {
        let (e0, u0, w0, d) = (2.0, 2.4, 0.2, 1.0);
        let tu = barrier_transmission(e0, u0 - w0 / 2.0, d).t_amp;
        let td = barrier_transmission(e0, u0 + w0 / 2.0, d).t_amp;
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let [sx, sy, sz] = sigma_bilinears(tu * r, td * r);
        let n = 0.5 * (tu.norm_sqr() + td.norm_sqr());
        let s = spins(0.5 * sx / n, 0.5 * sy / n, 0.5 * sz / n);
        let (ty, tz) = larmor_times(&s, w0).unwrap();
        let (oy, oz) = crate::oracles::plane_wave_larmor_times(e0, u0, w0, d).unwrap();
        assert!((ty - oy).abs() < 1e-13 && (tz - oz).abs() < 1e-13);
    }

    #[test]
    fn flip_probability_limits() {
        let g = make_grid(-30.0, 30.0, 3001).unwrap();
        // spin unchanged along +x while the exit field points along -x
        let f = init_gaussian(g, &spec(0.0, 1.0, 2.0, [1.0, 0.0, 0.0], SpinSign::Up)).unwrap();
        let p = spin_flip_probability(&f, -20.0, [-1.0, 0.0, 0.0], 1.0).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        let p = spin_flip_probability(&f, -20.0, [-1.0, 0.0, 0.0], -1.0).unwrap();
        assert!(p.abs() < 1e-12);
        // complementary outcomes
        let f = init_gaussian(g, &spec(0.0, 1.0, 2.0, [0.6, 0.0, 0.8], SpinSign::Up)).unwrap();
        let up = spin_flip_probability(&f, -20.0, [0.0, 1.0, 0.0], 1.0).unwrap();
        let down = spin_flip_probability(&f, -20.0, [0.0, 1.0, 0.0], -1.0).unwrap();
        assert!((up + down - 1.0).abs() < 1e-15);
    }

    #[test]
    fn transmission_of_untouched_packet() {
        let g = make_grid(-30.0, 30.0, 3001).unwrap();
        let f = init_gaussian(g, &spec(5.0, 1.0, 2.0, [1.0, 0.0, 0.0], SpinSign::Up)).unwrap();
        assert!((transmission_probability(&f, -10.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(transmission_probability(&f, 20.0).unwrap() < 1e-12);
    }

    fn gaussian_kinetic(sigma: f64, k0: f64, ppw_cells: usize) -> f64 {
        let g = Grid1D::with_spacing(-20.0 + 0.5 / ppw_cells as f64, 1.0 / ppw_cells as f64, 50 * ppw_cells).unwrap();
        let f = init_gaussian(g, &spec(5.0, sigma, k0, [0.0, 0.0, 1.0], SpinSign::Up)).unwrap();
        mean_kinetic_energy_transmitted(&f, -10.0).unwrap()
    }

    #[test]
    fn kinetic_energy_of_gaussian_converges_at_second_order() {
        let (sigma, k0) = (1.0, 3.0);
        let exact = 0.5 * k0 * k0 + 1.0 / (8.0 * sigma * sigma);
        let errs: Vec<f64> = [8, 16, 32].iter().map(|&n| (gaussian_kinetic(sigma, k0, n) - exact).abs()).collect();
        let order = (errs[0] / errs[1]).log2();
        let order2 = (errs[1] / errs[2]).log2();
        assert!(order >= 1.8 && order2 >= 1.8, "{errs:?}");
        assert!(errs[2] / exact < 1e-3);
    }

    #[test]
    fn kinetic_energy_of_wide_packet_is_e0() {
        let g = Grid1D::with_spacing(-300.0 + 1.0 / 64.0, 1.0 / 32.0, 600 * 32).unwrap();
        let f = init_gaussian(g, &spec(0.0, 20.0, 2.0, [0.0, 0.0, 1.0], SpinSign::Up)).unwrap();
        let e = mean_kinetic_energy_transmitted(&f, -250.0).unwrap();
        assert!((e / 2.0 - 1.0).abs() < 0.01);
    }

    #[test]
    fn empty_region_errors() {
        let g = make_grid(-30.0, 30.0, 3001).unwrap();
        let f = init_gaussian(g, &spec(-10.0, 1.0, 2.0, [1.0, 0.0, 0.0], SpinSign::Up)).unwrap();
        assert!(matches!(mean_kinetic_energy_transmitted(&f, 15.0), Err(Error::NoTransmission { .. })));
    }

    #[test]
    fn global_sz_stays_zero_under_larmor_dynamics() {
        let p = spec(-9.5, 1.0, 6.0, [1.0, 0.0, 0.0], SpinSign::Up);
        let pot = PotentialProfile::None;
        let sf = larmor_profile(3.0, 1.0).unwrap();
        let t = 15.0 / 6.0;
        let res = auto_resolution(&p, &pot, &sf, t, &ResolutionRules::default()).unwrap();
        let h = sample(res.grid, &pot, &sf).unwrap();
        let f = init_gaussian(res.grid, &p).unwrap();
        let (out, diag) = evolve(&f, &h, &EvolveParams::new(res.dt, t), &mut []).unwrap();
        let s = spin_expectations(&out, res.grid.y_min()).unwrap();
        assert!(s.sz.abs() < 1e-10);
        assert!(diag.sigma_z_drift < 1e-10);
        // the transmitted part precessed by roughly omega0 * 2D / v0
        let s = spin_expectations(&out, 1.0).unwrap();
        let (ty, _) = larmor_times(&s, 3.0).unwrap();
        assert!((ty / (2.0 / 6.0) - 1.0).abs() < 0.05, "{ty}");
        let _ = SpinCouplingProfile::None;
    }

    proptest! {
        #[test]
        fn larmor_times_invariant_under_phase_and_scale(
            sx in -0.5..0.5f64, sy in -0.5..0.5f64, sz in -0.5..0.5f64,
            phase in 0.0..std::f64::consts::TAU, scale in 0.01..10.0f64,
        ) {
            prop_assume!(sx.abs() + sy.abs() > 1e-3);
            // Build a spinor with these bilinears, then compare readouts.
            let g = make_grid(-10.0, 10.0, 201).unwrap();
            let mut f = SpinorField::zeros(g);
            let len = (sx * sx + sy * sy + sz * sz).sqrt();
            let axis = [sx / len, sy / len, sz / len];
            let chi = crate::spin::axis_eigenspinor(axis, 1.0);
            for j in 0..g.n_points() {
                let env = (-(g.y(j) / 2.0).powi(2)).exp();
                f.up[j] = chi[0] * env;
                f.down[j] = chi[1] * env;
            }
            let base = larmor_times(&spin_expectations(&f, -9.0).unwrap(), 0.7).unwrap();
            let rot = C64::from_polar(scale, phase);
            for a in f.up.iter_mut().chain(f.down.iter_mut()) { *a *= rot; }
            let moved = larmor_times(&spin_expectations(&f, -9.0).unwrap(), 0.7).unwrap();
            prop_assert!((base.0 - moved.0).abs() < 1e-9 || (base.0 - moved.0).abs() > TAU / 0.7 - 1e-9);
            prop_assert!((base.1 - moved.1).abs() < 1e-9);
        }

        #[test]
        fn spin_expectations_are_bounded(
            a in proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64), 20),
            cut in -9.0..8.0f64,
        ) {
            let g = make_grid(-10.0, 10.0, 20).unwrap();
            let mut f = SpinorField::zeros(g);
            for (j, v) in a.iter().enumerate() {
                f.up[j] = C64::new(v.0, v.1);
                f.down[j] = C64::new(v.2, v.3);
            }
            if let Ok(s) = spin_expectations(&f, cut) {
                prop_assert!(s.sx * s.sx + s.sy * s.sy + s.sz * s.sz <= 0.25 + 1e-12);
            }
        }
    }
}
