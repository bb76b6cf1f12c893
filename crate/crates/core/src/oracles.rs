//! Closed-form references: the Rabi flip formula, the free-flight time, and
//! stationary scattering from a rectangular barrier (also averaged over a
//! Gaussian packet's momentum distribution).
//!
//! Nothing here touches a grid or the propagator.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::{Error, Result, C64};

/// Order of the Gauss-Hermite rule used for momentum averages.
pub const GAUSS_HERMITE_ORDER: usize = 41;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiParams {
    pub omega0: f64,
    pub v0: f64,
    pub d: f64,
}

impl RabiParams {
    pub fn new(omega0: f64, v0: f64, d: f64) -> Result<Self> {
        for (name, v) in [("omega0", omega0), ("v0", v0), ("D", d)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(RabiParams { omega0, v0, d })
    }

    /// Angular rate of the field direction seen by a spin moving at `v0`.
    pub fn omega_rot(&self) -> f64 {
        PI * self.v0 / (2.0 * self.d)
    }

    pub fn tau_d(&self) -> f64 {
        1.0 / self.omega_rot()
    }

    pub fn tau0(&self) -> f64 {
        1.0 / self.omega0
    }
}

/// `P = [sin((pi/2) sqrt(1 + x^2)) / sqrt(1 + x^2)]^2` with `x = omega0 / omega_rot`.
pub fn rabi_flip_probability(p: &RabiParams) -> f64 {
    let x = p.omega0 / p.omega_rot();
    let r = (1.0 + x * x).sqrt();
    let a = (FRAC_PI_2 * r).sin() / r;
    a * a
}

pub fn free_flight_time(d: f64, v0: f64) -> f64 {
    2.0 * d / v0
}

/// Stationary scattering off `U(y) = u_eff` on `|y| <= half_width` (`m = 1`).
///
/// Amplitudes are referred to the barrier edges' common origin: left of the
/// barrier `e^{iky} + r e^{-iky}`, right of it `t e^{iky}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierScattering {
    pub e: f64,
    pub u_eff: f64,
    pub half_width: f64,
    pub t_amp: C64,
    pub r_amp: C64,
    /// Evanescent decay constant when `e < u_eff`.
    pub kappa: Option<f64>,
}

impl BarrierScattering {
    pub fn transmission(&self) -> f64 {
        self.t_amp.norm_sqr()
    }

    pub fn reflection(&self) -> f64 {
        self.r_amp.norm_sqr()
    }
}

/// Below this `|q^2| w^2` the oscillatory and evanescent branches are replaced
/// by their common Taylor series.
const SERIES_THRESHOLD: f64 = 1e-4;

pub fn barrier_transmission(e: f64, u_eff: f64, half_width: f64) -> BarrierScattering {
    let w = 2.0 * half_width;
    let k = (2.0 * e).sqrt();
    let q2 = 2.0 * (e - u_eff);
    let z = q2 * w * w;
    // c = cos(qw), s = sin(qw)/q for either sign of q^2
    let (c, s, kappa) = if z.abs() < SERIES_THRESHOLD {
        (
            1.0 - z / 2.0 + z * z / 24.0 - z * z * z / 720.0,
            w * (1.0 - z / 6.0 + z * z / 120.0 - z * z * z / 5040.0),
            if q2 < 0.0 { Some((-q2).sqrt()) } else { None },
        )
    } else if q2 > 0.0 {
        let q = q2.sqrt();
        ((q * w).cos(), (q * w).sin() / q, None)
    } else {
        let kap = (-q2).sqrt();
        ((kap * w).cosh(), (kap * w).sinh() / kap, Some(kap))
    };
    let i = C64::new(0.0, 1.0);
    let delta = c - i * ((k * k + q2) / (2.0 * k) * s);
    let phase = C64::from_polar(1.0, -k * w);
    let t_amp = phase / delta;
    let r_amp = -i * ((k * k - q2) / (2.0 * k) * s) * phase / delta;
    BarrierScattering {
        e,
        u_eff,
        half_width,
        t_amp,
        r_amp,
        kappa,
    }
}

/// Spin components `(<S_x>, <S_y>, <S_z>)` of the normalised spinor
/// `(a, b) / |(a, b)|`.
fn spin_of(a: C64, b: C64) -> [f64; 3] {
    let n = a.norm_sqr() + b.norm_sqr();
    let cross = a.conj() * b;
    [cross.re / n, cross.im / n, 0.5 * (a.norm_sqr() - b.norm_sqr()) / n]
}

fn times_from_spin(s: [f64; 3], omega0: f64) -> Result<(f64, f64)> {
    if s[0] == 0.0 && s[1] == 0.0 {
        return Err(Error::UndefinedPhase);
    }
    let mut angle = (-s[1]).atan2(s[0]);
    if angle < 0.0 {
        angle += TAU;
    }
    if angle >= TAU {
        angle -= TAU;
    }
    Ok((angle / omega0, (s[2] / s[0].hypot(s[1])).atan() / omega0))
}

fn check_larmor_inputs(e0: f64, omega0: f64) -> Result<()> {
    if !(e0 > 0.0) || !(omega0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need E0 > 0 and omega0 > 0, got E0 = {e0}, omega0 = {omega0}"
        )));
    }
    Ok(())
}

/// Larmor times of an x-polarised plane wave of energy `e0` transmitted
/// through a barrier `u0` on `|y| <= d` in the field `-(omega0/2) sigma_z`.
pub fn plane_wave_larmor_times(e0: f64, u0: f64, omega0: f64, d: f64) -> Result<(f64, f64)> {
    check_larmor_inputs(e0, omega0)?;
    let up = barrier_transmission(e0, u0 - omega0 / 2.0, d).t_amp;
    let down = barrier_transmission(e0, u0 + omega0 / 2.0, d).t_amp;
    if up.norm_sqr() + down.norm_sqr() == 0.0 {
        return Err(Error::NoTransmission { y_cut: d, norm: 0.0 });
    }
    times_from_spin(spin_of(up, down), omega0)
}

/// Nodes and weights of the `n`-point Gauss-Hermite rule for `exp(-x^2)`,
/// found by Newton iteration on the normalised Hermite recurrence.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let pim4 = PI.powf(-0.25);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..(n + 1) / 2 {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-14 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Plane-wave results weighted by `|phi(k)|^2 ~ exp(-2 sigma_y^2 (k - k0)^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketAverage {
    pub transmission: f64,
    pub tau_y: Option<f64>,
    pub tau_z: Option<f64>,
    pub mean_kinetic_energy: f64,
}

/// Averages spin-resolved barrier scattering over the momentum distribution
/// of an x-polarised Gaussian packet. Spin expectations are formed from the
/// averaged bilinears, as they are for a transmitted packet. Components with
/// `k <= 0` carry negligible weight for the packets used here and are dropped.
pub fn packet_averaged_larmor(
    k0: f64,
    sigma_y: f64,
    u0: f64,
    omega0: f64,
    d: f64,
) -> Result<PacketAverage> {
    check_larmor_inputs(0.5 * k0 * k0, omega0.max(f64::MIN_POSITIVE))?;
    if !(sigma_y > 0.0) {
        return Err(Error::InvalidParameter(format!("sigma_y must be positive, got {sigma_y}")));
    }
    let (nodes, weights) = gauss_hermite(GAUSS_HERMITE_ORDER);
    let total: f64 = weights.iter().sum();
    let scale = 1.0 / (std::f64::consts::SQRT_2 * sigma_y);
    let (mut n, mut sx, mut sy, mut sz, mut ke) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&x, &w) in nodes.iter().zip(&weights) {
        let k = k0 + x * scale;
        if k <= 0.0 {
            continue;
        }
        let e = 0.5 * k * k;
        let up = barrier_transmission(e, u0 - omega0 / 2.0, d).t_amp;
        let down = barrier_transmission(e, u0 + omega0 / 2.0, d).t_amp;
        let p = 0.5 * (up.norm_sqr() + down.norm_sqr());
        let cross = up.conj() * down;
        n += w * p;
        sx += w * 0.5 * cross.re;
        sy += w * 0.5 * cross.im;
        sz += w * 0.25 * (up.norm_sqr() - down.norm_sqr());
        ke += w * p * e;
    }
    let (tau_y, tau_z) = if omega0 > 0.0 && n > 0.0 {
        match times_from_spin([sx / n, sy / n, sz / n], omega0) {
            Ok((a, b)) => (Some(a), Some(b)),
            Err(_) => (None, None),
        }
    } else {
        (None, None)
    };
    Ok(PacketAverage {
        transmission: n / total,
        tau_y,
        tau_z,
        mean_kinetic_energy: ke / n,
    })
}
