//! Experiment presets, the parallel sweep runner, and result files.
//!
//! A config holds dimensionless ratios plus one absolute scale (`omega0` or
//! `k0`); each sweep value turns into a [`PointSetup`] with concrete
//! profiles, packet and measurement time, which is then simulated
//! independently of every other point.

use std::fmt::{self, Write as _};
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fields::{
    larmor_profile, rectangular_barrier, rotating_field_profile, sample, PotentialProfile,
    SpinCouplingProfile,
};
use crate::grid::{init_gaussian, PacketSpec, SpinSign};
use crate::observables::{
    larmor_times, mean_kinetic_energy_transmitted, spin_expectations, spin_flip_probability,
    transmission_probability, ClockReadout,
};
use crate::oracles::{
    free_flight_time, packet_averaged_larmor, rabi_flip_probability, RabiParams,
    GAUSS_HERMITE_ORDER,
};
use crate::propagator::{
    auto_resolution, evolve, EvolveParams, Observer, Resolution, ResolutionRules,
};
use crate::snapshot::SnapshotWriter;
use crate::{Error, Result};

/// Number of health checks (and snapshots, when dumping) per row.
const CHECKS_PER_ROW: u64 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PresetName {
    Fig1,
    Fig2,
    Fig3,
    Fig5,
    Custom,
}

impl PresetName {
    pub const BUILTIN: [PresetName; 4] = [
        PresetName::Fig1,
        PresetName::Fig2,
        PresetName::Fig3,
        PresetName::Fig5,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PresetName::Fig1 => "fig1",
            PresetName::Fig2 => "fig2",
            PresetName::Fig3 => "fig3",
            PresetName::Fig5 => "fig5",
            PresetName::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    /// `-(omega0/2) sigma_z` on `|y| <= D`; the barrier spans the same interval.
    Larmor,
    /// Field rotating in the xy plane on `|y| < D`, fixed along `-sgn(y) x`
    /// on `D <= |y| <= L`; the barrier spans `|y| <= L`.
    Rotating,
}

/// The one absolute scale; everything else is a ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    /// Fixed field strength; `E0 = omega0 / (omega0/E0)`.
    Omega0(f64),
    /// Fixed carrier momentum; `omega0 = (omega0/E0) k0^2/2`.
    K0(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Physics {
    pub coupling: Coupling,
    pub d: f64,
    pub l_over_d: f64,
    pub omega0_over_e0: f64,
    pub u0_over_e0: f64,
    pub sigma_y_over_d: f64,
    pub y0_over_d: f64,
    pub spin_axis: [f64; 3],
    pub spin_sign: SpinSign,
    /// Measurement time in units of `D / v0`.
    pub measure_time_over_d_v0: f64,
    /// Transmitted region starts at `y_cut_over_d * D`.
    pub y_cut_over_d: f64,
    pub scale: Scale,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Numerics {
    pub ppw: f64,
    pub eta: f64,
    pub cell_cap: usize,
    pub boundary_tol: f64,
    pub boundary_margin: f64,
}

impl Default for Numerics {
    fn default() -> Self {
        let r = ResolutionRules::default();
        Numerics {
            ppw: r.ppw,
            eta: r.eta,
            cell_cap: r.cell_cap,
            boundary_tol: 1e-6,
            boundary_margin: r.boundary_margin,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Omega0OverE0,
    U0OverE0,
}

impl SweepParameter {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParameter::Omega0OverE0 => "omega0_over_e0",
            SweepParameter::U0OverE0 => "u0_over_e0",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

/// One experiment: physics ratios, numerics and a single sweep axis. The
/// swept ratio's value in `physics` is ignored during the sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub preset: PresetName,
    pub physics: Physics,
    #[serde(default)]
    pub numerics: Numerics,
    pub sweep: Sweep,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
        .collect()
}

fn geomspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| match i {
            0 => a,
            _ if i + 1 == n => b,
            _ => (la + (lb - la) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

/// Built-in configurations for the four figures.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let base = Physics {
        coupling: Coupling::Larmor,
        d: 1.0,
        l_over_d: 1.0,
        omega0_over_e0: 0.1,
        u0_over_e0: 0.0,
        sigma_y_over_d: 1.0,
        y0_over_d: -9.5,
        spin_axis: [1.0, 0.0, 0.0],
        spin_sign: SpinSign::Up,
        measure_time_over_d_v0: 15.0,
        y_cut_over_d: 1.0,
        scale: Scale::Omega0(26.0),
    };
    let wide = Physics {
        sigma_y_over_d: 10.0,
        y0_over_d: -50.0,
        measure_time_over_d_v0: 120.0,
        scale: Scale::K0(2.0),
        ..base.clone()
    };
    let (preset, physics, sweep) = match name {
        "fig1" => (
            PresetName::Fig1,
            base,
            Sweep {
                parameter: SweepParameter::Omega0OverE0,
                values: linspace(0.01, 0.13, 25),
            },
        ),
        "fig2" => (
            PresetName::Fig2,
            wide,
            Sweep {
                parameter: SweepParameter::U0OverE0,
                values: linspace(0.0, 2.0, 31),
            },
        ),
        "fig3" => (
            PresetName::Fig3,
            Physics {
                coupling: Coupling::Rotating,
                l_over_d: 2.0,
                scale: Scale::Omega0(50.0),
                ..base
            },
            Sweep {
                parameter: SweepParameter::Omega0OverE0,
                values: geomspace(0.01, 6.2, 25),
            },
        ),
        "fig5" => (
            PresetName::Fig5,
            Physics {
                coupling: Coupling::Rotating,
                ..wide
            },
            Sweep {
                parameter: SweepParameter::U0OverE0,
                values: linspace(0.0, 2.0, 31),
            },
        ),
        other => {
            return Err(Error::Config(format!(
                "unknown preset '{other}' (expected fig1, fig2, fig3 or fig5)"
            )))
        }
    };
    Ok(ExperimentConfig {
        preset,
        physics,
        numerics: Numerics::default(),
        sweep,
        output: None,
    })
}

/// Reads a JSON config; syntax and schema errors carry line and column.
pub fn read_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let config: ExperimentConfig = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    config.validate()?;
    Ok(config)
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive and finite, got {v}")))
    }
}

fn non_negative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be >= 0 and finite, got {v}")))
    }
}

/// Concrete inputs for one sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSetup {
    pub sweep_value: f64,
    pub e0: f64,
    pub k0: f64,
    pub omega0: f64,
    pub u0: f64,
    pub d: f64,
    pub t_final: f64,
    pub y_cut: f64,
    pub packet: PacketSpec,
    pub potential: PotentialProfile,
    pub coupling: SpinCouplingProfile,
}

impl ExperimentConfig {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.physics;
        positive("physics.d", p.d)?;
        positive("physics.sigma_y_over_d", p.sigma_y_over_d)?;
        positive("physics.measure_time_over_d_v0", p.measure_time_over_d_v0)?;
        positive("physics.omega0_over_e0", p.omega0_over_e0)?;
        non_negative("physics.u0_over_e0", p.u0_over_e0)?;
        if !p.y0_over_d.is_finite() {
            return Err(Error::Config("physics.y0_over_d must be finite".into()));
        }
        if !(p.l_over_d >= 1.0) || !p.l_over_d.is_finite() {
            return Err(Error::Config(format!(
                "physics.l_over_d must be >= 1, got {}",
                p.l_over_d
            )));
        }
        let edge = match p.coupling {
            Coupling::Larmor => 1.0,
            Coupling::Rotating => p.l_over_d,
        };
        if !(p.y_cut_over_d >= 1.0) || !p.y_cut_over_d.is_finite() {
            return Err(Error::Config(format!(
                "physics.y_cut_over_d must be >= 1 (beyond the coupling region), got {}",
                p.y_cut_over_d
            )));
        }
        if p.y0_over_d + p.sigma_y_over_d >= -edge {
            return Err(Error::Config(format!(
                "packet must start left of the interaction region: y0_over_d = {}",
                p.y0_over_d
            )));
        }
        let len = p.spin_axis.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (len - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "physics.spin_axis {:?} is not a unit vector",
                p.spin_axis
            )));
        }
        if p.coupling == Coupling::Rotating {
            let entry = [1.0, 0.0, 0.0];
            let off = p.spin_axis.iter().zip(entry).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            if off > 1e-12 {
                return Err(Error::Config(format!(
                    "rotating coupling needs spin_axis along the entry field [1, 0, 0], got {:?}",
                    p.spin_axis
                )));
            }
        }
        match p.scale {
            Scale::Omega0(w) => positive("physics.scale.omega0", w)?,
            Scale::K0(k) => positive("physics.scale.k0", k)?,
        }
        let n = &self.numerics;
        positive("numerics.ppw", n.ppw)?;
        positive("numerics.eta", n.eta)?;
        positive("numerics.boundary_tol", n.boundary_tol)?;
        non_negative("numerics.boundary_margin", n.boundary_margin)?;
        if n.cell_cap < crate::grid::MIN_POINTS {
            return Err(Error::Config(format!("numerics.cell_cap {} is too small", n.cell_cap)));
        }
        if self.sweep.values.is_empty() {
            return Err(Error::Config("sweep.values is empty".into()));
        }
        let name = format!("sweep value ({})", self.sweep.parameter.as_str());
        for &v in &self.sweep.values {
            match self.sweep.parameter {
                SweepParameter::Omega0OverE0 => positive(&name, v)?,
                SweepParameter::U0OverE0 => non_negative(&name, v)?,
            }
        }
        Ok(())
    }

    pub fn resolution_rules(&self, ppw_override: Option<f64>) -> Result<ResolutionRules> {
        let ppw = ppw_override.unwrap_or(self.numerics.ppw);
        positive("ppw", ppw)?;
        Ok(ResolutionRules {
            ppw,
            eta: self.numerics.eta,
            cell_cap: self.numerics.cell_cap,
            boundary_margin: self.numerics.boundary_margin,
        })
    }

    /// Concrete profiles, packet and timing for one sweep value.
    pub fn point(&self, sweep_value: f64) -> Result<PointSetup> {
        let p = &self.physics;
        let (mut w_ratio, mut u_ratio) = (p.omega0_over_e0, p.u0_over_e0);
        match self.sweep.parameter {
            SweepParameter::Omega0OverE0 => w_ratio = sweep_value,
            SweepParameter::U0OverE0 => u_ratio = sweep_value,
        }
        positive("omega0_over_e0", w_ratio)?;
        non_negative("u0_over_e0", u_ratio)?;
        let (e0, omega0) = match p.scale {
            Scale::Omega0(w) => (w / w_ratio, w),
            Scale::K0(k) => (0.5 * k * k, w_ratio * 0.5 * k * k),
        };
        let k0 = (2.0 * e0).sqrt();
        let d = p.d;
        let l = p.l_over_d * d;
        let u0 = u_ratio * e0;
        let (coupling, barrier_half_width) = match p.coupling {
            Coupling::Larmor => (larmor_profile(omega0, d)?, d),
            Coupling::Rotating => (rotating_field_profile(omega0, d, l)?, l),
        };
        let potential = if u0 > 0.0 {
            rectangular_barrier(u0, barrier_half_width)?
        } else {
            PotentialProfile::None
        };
        let packet = PacketSpec {
            y0: p.y0_over_d * d,
            sigma_y: p.sigma_y_over_d * d,
            k0,
            spin_axis: p.spin_axis,
            spin_sign: p.spin_sign,
        };
        packet.validate()?;
        Ok(PointSetup {
            sweep_value,
            e0,
            k0,
            omega0,
            u0,
            d,
            t_final: p.measure_time_over_d_v0 * d / k0,
            y_cut: p.y_cut_over_d * d,
            packet,
            potential,
            coupling,
        })
    }
}

impl PointSetup {
    pub fn v0(&self) -> f64 {
        self.k0
    }

    pub fn resolution(&self, rules: &ResolutionRules) -> Result<Resolution> {
        auto_resolution(&self.packet, &self.potential, &self.coupling, self.t_final, rules)
    }

    /// Evolves on `res` and reads the clock. The boundary norm is reported in
    /// the diagnostics but not enforced here.
    pub fn simulate(
        &self,
        res: &Resolution,
        boundary_margin: f64,
        observers: &mut [&mut dyn Observer],
    ) -> Result<ClockReadout> {
        let ham = sample(res.grid, &self.potential, &self.coupling)?;
        let psi0 = init_gaussian(res.grid, &self.packet)?;
        let params = EvolveParams {
            dt: res.dt,
            t_final: self.t_final,
            snapshot_stride: res.steps.div_ceil(CHECKS_PER_ROW).max(1),
            boundary_margin,
            boundary_tol: f64::INFINITY,
        };
        let (field, diagnostics) = evolve(&psi0, &ham, &params, observers)?;
        let transmission = transmission_probability(&field, self.y_cut)?;
        let (mut tau_y, mut tau_z, mut flip_prob) = (None, None, None);
        match self.coupling {
            SpinCouplingProfile::LarmorZ { omega0, .. } => {
                let s = spin_expectations(&field, self.y_cut)?;
                let (ty, tz) = larmor_times(&s, omega0)?;
                tau_y = Some(ty);
                tau_z = Some(tz);
            }
            SpinCouplingProfile::RotatingXY { d, .. } => {
                let exit = self.coupling.direction(d);
                let sign = self.packet.spin_sign.value();
                flip_prob = Some(spin_flip_probability(&field, self.y_cut, exit, sign)?);
            }
            SpinCouplingProfile::None => {}
        }
        Ok(ClockReadout {
            tau_y,
            tau_z,
            transmission,
            flip_prob,
            mean_kinetic_energy: mean_kinetic_energy_transmitted(&field, self.y_cut).ok(),
            diagnostics,
        })
    }

    /// Closed-form reference values for this point.
    pub fn oracle(&self) -> Vec<(&'static str, f64)> {
        let mut out = vec![("oracle_free_flight_time", free_flight_time(self.d, self.v0()))];
        match self.coupling {
            SpinCouplingProfile::LarmorZ { .. } => {
                let avg = packet_averaged_larmor(
                    self.k0,
                    self.packet.sigma_y,
                    self.u0,
                    self.omega0,
                    self.d,
                );
                let (ty, tz, tr) = match avg {
                    Ok(a) => (
                        a.tau_y.unwrap_or(f64::NAN),
                        a.tau_z.unwrap_or(f64::NAN),
                        a.transmission,
                    ),
                    Err(_) => (f64::NAN, f64::NAN, f64::NAN),
                };
                out.push(("oracle_tau_y", ty));
                out.push(("oracle_tau_z", tz));
                out.push(("oracle_transmission", tr));
            }
            SpinCouplingProfile::RotatingXY { .. } => {
                let (ratio, flip) = match RabiParams::new(self.omega0, self.v0(), self.d) {
                    Ok(r) => (r.omega0 / r.omega_rot(), rabi_flip_probability(&r)),
                    Err(_) => (f64::NAN, f64::NAN),
                };
                out.push(("oracle_omega0_over_omega_rot", ratio));
                out.push(("oracle_flip_prob", flip));
            }
            SpinCouplingProfile::None => {}
        }
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    /// Worker threads for the row pool; `None` uses rayon's global pool.
    pub threads: Option<usize>,
    pub ppw: Option<f64>,
    /// Writes one snapshot file per row into this directory.
    pub dump_snapshots: Option<PathBuf>,
    pub overlay_oracle: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    /// Completed, but more than `boundary_tol` of the norm reached the edges.
    Boundary,
    Failed(&'static str),
}

impl RowStatus {
    pub fn is_ok(&self) -> bool {
        *self == RowStatus::Ok
    }
}

impl fmt::Display for RowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowStatus::Ok => f.write_str("ok"),
            RowStatus::Boundary => f.write_str("boundary"),
            RowStatus::Failed(kind) => write!(f, "error:{kind}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub index: usize,
    pub sweep_value: f64,
    pub status: RowStatus,
    pub readout: Option<ClockReadout>,
    pub resolution: Option<Resolution>,
    pub oracle: Vec<(&'static str, f64)>,
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowMetadata {
    pub sweep_value: f64,
    pub status: String,
    pub n_points: Option<usize>,
    pub dy: Option<f64>,
    pub dt: Option<f64>,
    pub steps: Option<u64>,
    pub wall_time_s: Option<f64>,
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMetadata {
    pub config: ExperimentConfig,
    pub code_version: String,
    pub timestamp_unix: u64,
    pub gauss_hermite_order: usize,
    pub sweep_points: usize,
    pub ppw: f64,
    pub rows: Vec<RowMetadata>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub metadata: RunMetadata,
}

impl SweepResult {
    pub fn all_failed(&self) -> bool {
        self.rows.iter().all(|r| matches!(r.status, RowStatus::Failed(_)))
    }
}

fn run_row(
    config: &ExperimentConfig,
    index: usize,
    value: f64,
    rules: &ResolutionRules,
    opts: &RunOptions,
) -> SweepRow {
    let mut row = SweepRow {
        index,
        sweep_value: value,
        status: RowStatus::Ok,
        readout: None,
        resolution: None,
        oracle: Vec::new(),
        message: None,
    };
    let outcome = (|| -> Result<ClockReadout> {
        let setup = config.point(value)?;
        if opts.overlay_oracle {
            row.oracle = setup.oracle();
        }
        let res = setup.resolution(rules)?;
        row.resolution = Some(res);
        let margin = config.numerics.boundary_margin;
        match &opts.dump_snapshots {
            Some(dir) => {
                let file = File::create(dir.join(format!("row_{index:03}.spinor")))?;
                let mut writer = SnapshotWriter::new(BufWriter::new(file), res.grid)?;
                let readout = setup.simulate(&res, margin, &mut [&mut writer])?;
                writer.into_inner()?;
                Ok(readout)
            }
            None => setup.simulate(&res, margin, &mut []),
        }
    })();
    match outcome {
        Ok(readout) => {
            if readout.diagnostics.boundary_norm > config.numerics.boundary_tol {
                row.status = RowStatus::Boundary;
                row.message = Some(format!(
                    "boundary norm {:e} exceeds {:e}",
                    readout.diagnostics.boundary_norm, config.numerics.boundary_tol
                ));
            }
            row.readout = Some(readout);
        }
        Err(e) => {
            row.status = RowStatus::Failed(e.kind());
            row.message = Some(e.to_string());
        }
    }
    row
}

/// Runs every sweep point as an independent job and returns rows ordered by
/// sweep value. Per-row failures are recorded in the row; only an invalid
/// config is an error.
pub fn run(config: &ExperimentConfig, opts: &RunOptions) -> Result<SweepResult> {
    config.validate()?;
    let rules = config.resolution_rules(opts.ppw)?;
    if let Some(dir) = &opts.dump_snapshots {
        fs::create_dir_all(dir)?;
    }
    let job = |(i, &v): (usize, &f64)| run_row(config, i, v, &rules, opts);
    let values = &config.sweep.values;
    let mut rows: Vec<SweepRow> = match opts.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            pool.install(|| values.par_iter().enumerate().map(job).collect())
        }
        None => values.par_iter().enumerate().map(job).collect(),
    };
    rows.sort_by(|a, b| a.sweep_value.total_cmp(&b.sweep_value).then(a.index.cmp(&b.index)));

    let metadata = RunMetadata {
        config: config.clone(),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        gauss_hermite_order: GAUSS_HERMITE_ORDER,
        sweep_points: rows.len(),
        ppw: rules.ppw,
        rows: rows
            .iter()
            .map(|r| RowMetadata {
                sweep_value: r.sweep_value,
                status: r.status.to_string(),
                n_points: r.resolution.map(|s| s.n_points()),
                dy: r.resolution.map(|s| s.grid.dy()),
                dt: r.resolution.map(|s| s.dt),
                steps: r.resolution.map(|s| s.steps),
                wall_time_s: r.readout.map(|o| o.diagnostics.wall_time),
                message: r.message.clone(),
            })
            .collect(),
    };
    Ok(SweepResult { rows, metadata })
}

pub const CSV_COLUMNS: [&str; 10] = [
    "sweep_param",
    "sweep_value",
    "tau_y",
    "tau_z",
    "transmission",
    "flip_prob",
    "mean_kinetic_energy",
    "norm_drift",
    "boundary_norm",
    "status",
];

/// Renders the result table. Missing values are written as `NaN`; numbers use
/// the shortest decimal that round-trips.
pub fn to_csv(result: &SweepResult) -> String {
    let oracle_names: Vec<&str> = result
        .rows
        .iter()
        .find(|r| !r.oracle.is_empty())
        .map(|r| r.oracle.iter().map(|(n, _)| *n).collect())
        .unwrap_or_default();
    let mut out = CSV_COLUMNS.join(",");
    for n in &oracle_names {
        out.push(',');
        out.push_str(n);
    }
    out.push('\n');
    let param = result.metadata.config.sweep.parameter.as_str();
    let nan = f64::NAN;
    for row in &result.rows {
        let r = row.readout.as_ref();
        let nums = [
            row.sweep_value,
            r.and_then(|o| o.tau_y).unwrap_or(nan),
            r.and_then(|o| o.tau_z).unwrap_or(nan),
            r.map(|o| o.transmission).unwrap_or(nan),
            r.and_then(|o| o.flip_prob).unwrap_or(nan),
            r.and_then(|o| o.mean_kinetic_energy).unwrap_or(nan),
            r.map(|o| o.diagnostics.norm_drift).unwrap_or(nan),
            r.map(|o| o.diagnostics.boundary_norm).unwrap_or(nan),
        ];
        out.push_str(param);
        for v in nums {
            let _ = write!(out, ",{v}");
        }
        let _ = write!(out, ",{}", row.status);
        for name in &oracle_names {
            let v = row.oracle.iter().find(|(n, _)| n == name).map(|(_, v)| *v).unwrap_or(nan);
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

/// Path of the JSON metadata written next to a CSV.
pub fn metadata_path(csv: &Path) -> PathBuf {
    let mut name = csv.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".meta.json");
    csv.with_file_name(name)
}

/// Writes the CSV and its `<path>.meta.json` sidecar.
pub fn write_csv(result: &SweepResult, path: &Path) -> Result<()> {
    fs::write(path, to_csv(result))?;
    let meta = serde_json::to_string_pretty(&result.metadata)
        .map_err(|e| Error::Config(format!("metadata: {e}")))?;
    fs::write(metadata_path(path), meta + "\n")?;
    Ok(())
}
