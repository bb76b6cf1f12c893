//! Time integration of `i d(psi)/dt = H psi` for the two-component field.
//!
//! One step is the Strang composition
//!
//! ```text
//! psi <- R(dt/2) . CN(dt) . R(dt/2) psi
//! ```
//!
//! where `R` is the exact cellwise spin propagator `exp(-i h_sf[j] dt/2)` and
//! `CN` is the Crank-Nicolson (Cayley) propagator of `K + U`, applied to each
//! spin component with one tridiagonal solve. Both factors are unitary, so
//! the norm is preserved up to roundoff.

use std::f64::consts::TAU;
use std::time::Instant;

use crate::fields::{DiscretizedHamiltonian, PotentialProfile, SpinCouplingProfile};
use crate::grid::{norm, Grid1D, PacketSpec, SpinSign, SpinorField, TAIL_WIDTHS};
use crate::spin::{axis_eigenspinor, Su2};
use crate::tridiag::Tridiagonal;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveParams {
    pub dt: f64,
    pub t_final: f64,
    /// Steps between observer callbacks and health checks.
    pub snapshot_stride: u64,
    /// Width of the edge strips whose final norm is reported.
    pub boundary_margin: f64,
    /// Largest acceptable final norm inside the edge strips.
    pub boundary_tol: f64,
}

impl EvolveParams {
    pub fn new(dt: f64, t_final: f64) -> Self {
        EvolveParams {
            dt,
            t_final,
            snapshot_stride: 100,
            boundary_margin: 2.0,
            boundary_tol: 1e-6,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.t_final >= 0.0) || !self.t_final.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "t_final must be >= 0, got {}",
                self.t_final
            )));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::InvalidParameter("snapshot_stride must be >= 1".into()));
        }
        Ok(())
    }

    /// `ceil(t_final / dt)`, ignoring roundoff just above an integer.
    pub fn step_count(&self) -> u64 {
        let ratio = self.t_final / self.dt;
        (ratio - 1e-9 * ratio.max(1.0)).ceil().max(0.0) as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EvolveDiagnostics {
    /// Largest `|norm(t) - norm(0)|` seen at the health checks.
    pub norm_drift: f64,
    /// Largest `|<sigma_z>(t) - <sigma_z>(0)|` seen at the health checks.
    pub sigma_z_drift: f64,
    /// Final norm within `boundary_margin` of either grid edge.
    pub boundary_norm: f64,
    pub steps_taken: u64,
    pub final_time: f64,
    pub wall_time: f64,
}

/// Callback invoked on the evolving thread every `snapshot_stride` steps
/// (and at steps 0 and the last step).
pub trait Observer {
    fn observe(&mut self, step: u64, time: f64, field: &SpinorField) -> Result<()>;
}

impl<F> Observer for F
where
    F: FnMut(u64, f64, &SpinorField) -> Result<()>,
{
    fn observe(&mut self, step: u64, time: f64, field: &SpinorField) -> Result<()> {
        self(step, time, field)
    }
}

/// Precomputed stepping operators for one Hamiltonian and time step.
#[derive(Debug, Clone)]
pub struct Propagator {
    grid: Grid1D,
    dt: f64,
    /// Per row of the forward sweep of `A = 1 + i dt/2 (K + U)`: `1 / p_j` and
    /// `a / p_j`, with `a` the off-diagonal of `A` and `p_j` its LU pivots.
    forward: Vec<[C64; 2]>,
    /// Back-substitution coefficients `c'_j`.
    c_prime: Vec<C64>,
    /// First cell with a nonzero spin term; rotations are stored from here.
    spin_start: usize,
    half: Vec<Su2>,
    full: Vec<Su2>,
}

impl Propagator {
    pub fn new(ham: &DiscretizedHamiltonian, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParameter(format!("dt must be > 0, got {dt}")));
        }
        let grid = ham.grid;
        let n = grid.n_points();
        let dy = grid.dy();
        let kin_diag = 1.0 / (ham.mass * dy * dy);
        let kin_off = -0.5 / (ham.mass * dy * dy);
        let half_i_dt = C64::new(0.0, 0.5 * dt);

        let lhs_off = half_i_dt * kin_off;
        let lhs = Tridiagonal {
            lower: vec![lhs_off; n],
            diag: ham
                .u
                .iter()
                .map(|&u| C64::new(1.0, 0.0) + half_i_dt * (kin_diag + u))
                .collect(),
            upper: vec![lhs_off; n],
        };
        let factor = lhs.factor()?;
        let forward = factor
            .inv_pivot()
            .iter()
            .map(|&ip| [ip, lhs_off * ip])
            .collect();

        let active: Vec<usize> = (0..n).filter(|&j| !ham.h_sf[j].is_zero()).collect();
        let (spin_start, spin_end) = match (active.first(), active.last()) {
            (Some(&a), Some(&b)) => (a, b + 1),
            _ => (0, 0),
        };
        let half = ham.h_sf[spin_start..spin_end]
            .iter()
            .map(|h| h.propagator(0.5 * dt))
            .collect();
        let full = ham.h_sf[spin_start..spin_end]
            .iter()
            .map(|h| h.propagator(dt))
            .collect();

        Ok(Propagator {
            grid,
            dt,
            forward,
            c_prime: factor.c_prime().to_vec(),
            spin_start,
            half,
            full,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    /// One full Strang step.
    pub fn step(&self, field: &mut SpinorField) {
        self.advance(field, 1);
    }

    /// `count` Strang steps, fusing adjacent half rotations.
    pub fn advance(&self, field: &mut SpinorField, count: u64) {
        if count == 0 {
            return;
        }
        let n = field.up.len();
        let mut scratch = (vec![C64::new(0.0, 0.0); n], vec![C64::new(0.0, 0.0); n]);
        self.rotate(field, &self.half);
        for k in 0..count {
            self.crank_nicolson(&mut field.up, &mut field.down, &mut scratch);
            let rot = if k + 1 == count { &self.half } else { &self.full };
            self.rotate(field, rot);
        }
    }

    fn rotate(&self, field: &mut SpinorField, rot: &[Su2]) {
        let s = self.spin_start;
        let up = &mut field.up[s..s + rot.len()];
        let down = &mut field.down[s..s + rot.len()];
        for ((u, d), r) in up.iter_mut().zip(down.iter_mut()).zip(rot) {
            r.apply(u, d);
        }
    }

    /// Applies the Cayley map `(1 + i dt/2 H)^-1 (1 - i dt/2 H)` to both
    /// components in place, written as `2 A^-1 psi - psi` with
    /// `A = 1 + i dt/2 H` so that only one tridiagonal solve is needed.
    fn crank_nicolson(&self, up: &mut [C64], down: &mut [C64], scratch: &mut (Vec<C64>, Vec<C64>)) {
        let n = up.len();
        let (su, sd) = (&mut scratch.0[..n], &mut scratch.1[..n]);
        assert!(n >= 2 && down.len() == n && self.forward.len() == n && self.c_prime.len() == n);
        let zero = C64::new(0.0, 0.0);
        let (mut dp_u, mut dp_d) = (zero, zero);
        for j in 0..n {
            let [ip, aip] = self.forward[j];
            dp_u = ip * up[j] - aip * dp_u;
            dp_d = ip * down[j] - aip * dp_d;
            su[j] = dp_u;
            sd[j] = dp_d;
        }
        let (mut yu, mut yd) = (zero, zero);
        for j in (0..n).rev() {
            let c = self.c_prime[j];
            yu = su[j] - c * yu;
            yd = sd[j] - c * yd;
            up[j] = 2.0 * yu - up[j];
            down[j] = 2.0 * yd - down[j];
        }
    }
}

/// One Strang step of length `dt`.
pub fn step(state: &SpinorField, ham: &DiscretizedHamiltonian, dt: f64) -> Result<SpinorField> {
    if state.grid != ham.grid {
        return Err(Error::GridMismatch);
    }
    let prop = Propagator::new(ham, dt)?;
    let mut out = state.clone();
    prop.step(&mut out);
    if !out.is_finite() {
        return Err(Error::NonFinite { step: 1 });
    }
    Ok(out)
}

/// Evolves to `t_final` in `ceil(t_final/dt)` equal steps (the step is
/// shrunk so the last one lands exactly on `t_final`).
pub fn evolve(
    state: &SpinorField,
    ham: &DiscretizedHamiltonian,
    params: &EvolveParams,
    observers: &mut [&mut dyn Observer],
) -> Result<(SpinorField, EvolveDiagnostics)> {
    params.validate()?;
    if state.grid != ham.grid {
        return Err(Error::GridMismatch);
    }
    let start = Instant::now();
    let n_steps = params.step_count();
    let mut field = state.clone();
    let mut diag = EvolveDiagnostics::default();

    for obs in observers.iter_mut() {
        obs.observe(0, 0.0, &field)?;
    }
    if n_steps > 0 {
        let dt = params.t_final / n_steps as f64;
        let prop = Propagator::new(ham, dt)?;
        let norm0 = field.total_norm();
        let sz0 = field.sigma_totals()[2];
        let mut done = 0;
        while done < n_steps {
            let chunk = params.snapshot_stride.min(n_steps - done);
            prop.advance(&mut field, chunk);
            done += chunk;
            if !field.is_finite() {
                return Err(Error::NonFinite { step: done });
            }
            diag.norm_drift = diag.norm_drift.max((field.total_norm() - norm0).abs());
            diag.sigma_z_drift = diag.sigma_z_drift.max((field.sigma_totals()[2] - sz0).abs());
            let t = if done == n_steps { params.t_final } else { done as f64 * dt };
            for obs in observers.iter_mut() {
                obs.observe(done, t, &field)?;
            }
        }
    }
    diag.steps_taken = n_steps;
    diag.final_time = params.t_final;
    diag.boundary_norm = boundary_norm(&field, params.boundary_margin)?;
    diag.wall_time = start.elapsed().as_secs_f64();
    if diag.boundary_norm > params.boundary_tol {
        return Err(Error::ReflectionContamination {
            boundary_norm: diag.boundary_norm,
            tolerance: params.boundary_tol,
            diagnostics: Box::new(diag),
        });
    }
    Ok((field, diag))
}

fn boundary_norm(field: &SpinorField, margin: f64) -> Result<f64> {
    let g = field.grid;
    let margin = margin.min(0.5 * (g.y_max() - g.y_min()));
    if margin <= 0.0 {
        return Ok(0.0);
    }
    Ok(norm(field, g.y_min(), g.y_min() + margin)? + norm(field, g.y_max() - margin, g.y_max())?)
}

/// Knobs of [`auto_resolution`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolutionRules {
    /// Grid points per shortest relevant wavelength.
    pub ppw: f64,
    /// `dt = eta * 2 m dy^2`.
    pub eta: f64,
    pub cell_cap: usize,
    /// Extra room added beyond the light-cone bound on each side.
    pub boundary_margin: f64,
}

impl Default for ResolutionRules {
    fn default() -> Self {
        ResolutionRules {
            ppw: 20.0,
            eta: 0.1,
            cell_cap: 1 << 20,
            boundary_margin: 2.0,
        }
    }
}

/// Grid and time step chosen for one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolution {
    pub grid: Grid1D,
    pub dt: f64,
    pub steps: u64,
}

impl Resolution {
    pub fn n_points(&self) -> usize {
        self.grid.n_points()
    }

    /// Same domain with `dy` and `dt` both divided by `factor`.
    pub fn refined(&self, factor: usize) -> Result<Resolution> {
        let g = self.grid;
        let left_edge = g.y_min() - 0.5 * g.dy();
        let dy = g.dy() / factor as f64;
        let grid = Grid1D::with_spacing(left_edge + 0.5 * dy, dy, g.n_points() * factor)?;
        Ok(Resolution {
            grid,
            dt: self.dt / factor as f64,
            steps: self.steps * factor as u64,
        })
    }
}

/// Picks `dy`, `dt` and the domain for a packet crossing the given profiles.
///
/// * `dy <= 2 pi / (k_max * ppw)` with `k_max = k0 + 6/sigma_y + sqrt(2m max(U0, omega0))`,
///   rounded down so that the smallest profile edge is a whole number of
///   cells; nodes sit at cell centres so no node falls on an edge.
/// * `dt = eta * 2m dy^2`, shrunk so `t_final` is a whole number of steps.
/// * the domain holds the packet's `TAIL_WIDTHS` envelope moving at the largest
///   asymptotic speed `sqrt((k0 + 6/sigma_y)^2 + 2m omega0) / m` in either
///   direction for `t_final`, plus `boundary_margin` on each side.
pub fn auto_resolution(
    packet: &PacketSpec,
    pot: &PotentialProfile,
    sf: &SpinCouplingProfile,
    t_final: f64,
    rules: &ResolutionRules,
) -> Result<Resolution> {
    packet.validate()?;
    if !(rules.ppw > 0.0) || !(rules.eta > 0.0) {
        return Err(Error::InvalidParameter("ppw and eta must be positive".into()));
    }
    if !(t_final >= 0.0) || !t_final.is_finite() {
        return Err(Error::InvalidParameter(format!("bad t_final {t_final}")));
    }
    let mass = 1.0;
    let omega0 = sf.omega0();
    let k_spread = packet.k0 + 6.0 / packet.sigma_y;
    let k_max = k_spread + (2.0 * mass * pot.height().max(omega0)).sqrt();
    let dy_max = TAU / (k_max * rules.ppw);

    let edges = [
        pot.support_half_width(),
        match *sf {
            SpinCouplingProfile::None => 0.0,
            SpinCouplingProfile::LarmorZ { d, .. } => d,
            SpinCouplingProfile::RotatingXY { d, .. } => d,
        },
        sf.support_half_width(),
    ];
    let align = edges
        .iter()
        .copied()
        .filter(|&e| e > 0.0)
        .fold(f64::INFINITY, f64::min);
    let align = if align.is_finite() { align } else { 1.0 };
    let dy = align / (align / dy_max).ceil();

    let speed = (k_spread * k_spread + 2.0 * mass * omega0).sqrt() / mass;
    let reach = speed * t_final + TAIL_WIDTHS * packet.sigma_y;
    let support = pot.support_half_width().max(sf.support_half_width());
    let left = (packet.y0 - reach).min(-support) - rules.boundary_margin;
    let right = (packet.y0 + reach).max(support) + rules.boundary_margin;
    let i_left = (left / dy).floor();
    let i_right = (right / dy).ceil();
    let n_points = (i_right - i_left) as usize;
    if n_points > rules.cell_cap {
        return Err(Error::CellCapExceeded {
            needed: n_points,
            cap: rules.cell_cap,
        });
    }
    let grid = Grid1D::with_spacing((i_left + 0.5) * dy, dy, n_points)?;

    let dt_rule = rules.eta * 2.0 * mass * dy * dy;
    let steps = (t_final / dt_rule).ceil() as u64;
    let dt = if steps == 0 { dt_rule } else { t_final / steps as f64 };
    Ok(Resolution { grid, dt, steps })
}

/// Spin-only reduction of the rotating-field problem: the spin sees
/// `profile` at `y(t) = -D + v0 t` for `0 <= t <= 2D/v0`, starting along the
/// field at `-D`. Returns the probability of ending opposite to the
/// adiabatically transported state, i.e. with sign `-initial` along the field
/// at `+D`. Uses exact 2x2 exponentials at the step midpoints.
pub fn spin_only_flip_probability(
    profile: &SpinCouplingProfile,
    v0: f64,
    initial: SpinSign,
    n_steps: usize,
) -> Result<f64> {
    let d = match *profile {
        SpinCouplingProfile::RotatingXY { d, .. } => d,
        _ => {
            return Err(Error::InvalidParameter(
                "spin-only reduction needs a rotating-field profile".into(),
            ))
        }
    };
    if !(v0 > 0.0) || n_steps == 0 {
        return Err(Error::InvalidParameter("need v0 > 0 and n_steps >= 1".into()));
    }
    let t_total = 2.0 * d / v0;
    let h = t_total / n_steps as f64;
    let s = initial.value();
    let mut chi = axis_eigenspinor(profile.direction(-d), s);
    for k in 0..n_steps {
        let y = -d + v0 * (k as f64 + 0.5) * h;
        let (mut u, mut w) = (chi[0], chi[1]);
        profile.matrix(y).propagator(h).apply(&mut u, &mut w);
        chi = [u, w];
    }
    let flipped = axis_eigenspinor(profile.direction(d), -s);
    let amp = flipped[0].conj() * chi[0] + flipped[1].conj() * chi[1];
    Ok(amp.norm_sqr())
}
