//! Brute-force route: integrate the full time-dependent equations with a small
//! finite probe and read the sideband amplitudes off by demodulation.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::analytic::FirstOrderResponse;
use crate::bloch::ProbeAmplitudes;
use crate::density::{DensityMatrix, Level};
use crate::error::{Error, Result};
use crate::model::{derive, SystemParams};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest tolerated `|tr(rho) - 1|` during integration.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-7;

/// Largest tolerated product of the step and the fastest rate in the system.
pub const MAX_STEP_RATE_PRODUCT: f64 = 0.1;

/// Rotating-frame time derivative, written out element by element.
///
/// Only the ten independent elements are evaluated; the rest follow from
/// hermiticity, so `rho` is assumed Hermitian.
pub fn time_derivative(params: &SystemParams, rho: &DensityMatrix, probe: ProbeAmplitudes, t: f64) -> DensityMatrix {
    use Level::*;
    let r = |a: Level, b: Level| rho.get(a, b);
    let b = params.b_excited;
    let bp = params.b_ground;
    let cd = params.control_detuning;
    let g = params.control_rabi;
    let gc = g.conj();
    let (g1, g2) = (params.gamma1, params.gamma2);
    let gamma = 0.5 * (g1 + g2);
    let gamma_ee = g1 + g2;
    let gamma_gg = 0.0;

    let down = Complex64::from_polar(1.0, -params.omega12() * t);
    let up = down.conj();
    let gm = probe.g_minus * down;
    let gp = probe.g_plus * down;
    let gm_c = probe.g_minus.conj() * up;
    let gp_c = probe.g_plus.conj() * up;

    let d_ep_gm = -(I * (-cd + 2.0 * bp) + gamma) * r(EPlus, GMinus)
        + I * (gm * (r(GMinus, GMinus) - r(EPlus, EPlus)) + g * r(GPlus, GMinus) - g * r(EPlus, EMinus));
    let d_em_gp = -(I * (-cd - 2.0 * b) + gamma) * r(EMinus, GPlus)
        + I * (gp * (r(GPlus, GPlus) - r(EMinus, EMinus)) + g * r(GMinus, GPlus) - g * r(EMinus, EPlus));
    let d_ep_gp = -(-I * cd + gamma) * r(EPlus, GPlus)
        + I * (g * (r(GPlus, GPlus) - r(EPlus, EPlus)) + gm * r(GMinus, GPlus) - gp * r(EPlus, EMinus));
    let d_em_gm = -(I * (-cd - 2.0 * b + 2.0 * bp) + gamma) * r(EMinus, GMinus)
        + I * (gp * r(GPlus, GMinus) - gm * r(EMinus, EPlus) + g * (r(GMinus, GMinus) - r(EMinus, EMinus)));
    let d_gp_gm = -(2.0 * I * bp + gamma_gg) * r(GPlus, GMinus)
        + I * (gc * r(EPlus, GMinus) - g * r(GPlus, EMinus) + gp_c * r(EMinus, GMinus) - gm * r(GPlus, EPlus));
    let d_ep_em = -(2.0 * I * b + gamma_ee) * r(EPlus, EMinus)
        - I * (gc * r(EPlus, GMinus) - g * r(GPlus, EMinus) + gp_c * r(EPlus, GPlus) - gm * r(GMinus, EMinus));

    let pump = |z: Complex64| I * z + (I * z).conj();
    let d_gm_gm = g2 * r(EMinus, EMinus) + g1 * r(EPlus, EPlus) + pump(gm_c * r(EPlus, GMinus) + gc * r(EMinus, GMinus));
    let d_em_em = -(g2 + g1) * r(EMinus, EMinus) + pump(gp * r(GPlus, EMinus) + g * r(GMinus, EMinus));
    let d_ep_ep = -(g1 + g2) * r(EPlus, EPlus) + pump(gm * r(GMinus, EPlus) + g * r(GPlus, EPlus));
    let d_gp_gp = -(d_gm_gm + d_em_em + d_ep_ep);

    let mut d = DensityMatrix::zeros();
    for ((row, col), v) in [
        ((EPlus, GMinus), d_ep_gm),
        ((EMinus, GPlus), d_em_gp),
        ((EPlus, GPlus), d_ep_gp),
        ((EMinus, GMinus), d_em_gm),
        ((GPlus, GMinus), d_gp_gm),
        ((EPlus, EMinus), d_ep_em),
    ] {
        d.set(row, col, v);
        d.set(col, row, v.conj());
    }
    for (l, v) in [(GMinus, d_gm_gm), (EMinus, d_em_em), (EPlus, d_ep_ep), (GPlus, d_gp_gp)] {
        d.set(l, l, v);
    }
    d
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationConfig {
    /// Real amplitude `eps` given to both probe components.
    pub probe_amplitude: f64,
    pub t_end: f64,
    pub dt: f64,
    /// Trailing fraction of the run used for demodulation; snapped to whole
    /// beat periods.
    pub demod_window: f64,
    /// Record every `sample_stride`-th step inside the window.
    pub sample_stride: usize,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        Self { probe_amplitude: 1e-3, t_end: 2000.0, dt: 2e-3, demod_window: 0.25, sample_stride: 5 }
    }
}

impl IntegrationConfig {
    /// Relative accuracy promised by demodulation.
    pub fn tolerance(&self) -> f64 {
        (10.0 * self.probe_amplitude).max(1e-3)
    }

    fn validate(&self, params: &SystemParams) -> Result<()> {
        if !(self.probe_amplitude >= 0.0 && self.probe_amplitude.is_finite()) {
            return Err(Error::invalid("probe_amplitude", "must be finite and non-negative"));
        }
        if !(self.dt > 0.0 && self.t_end > self.dt) {
            return Err(Error::invalid("dt", format!("need 0 < dt < t_end, got dt={} t_end={}", self.dt, self.t_end)));
        }
        if !(self.demod_window > 0.0 && self.demod_window <= 1.0) {
            return Err(Error::invalid("demod_window", "must lie in (0, 1]"));
        }
        if self.sample_stride == 0 {
            return Err(Error::invalid("sample_stride", "must be at least 1"));
        }
        let rate = fastest_rate(params);
        if self.dt * rate > MAX_STEP_RATE_PRODUCT {
            return Err(Error::invalid(
                "dt",
                format!("dt * max rate = {:.3} exceeds {MAX_STEP_RATE_PRODUCT}", self.dt * rate),
            ));
        }
        Ok(())
    }
}

/// Upper bound on the fastest rate: the row-sum norm of the control-only
/// generator or the beat frequency, whichever is larger.
fn fastest_rate(params: &SystemParams) -> f64 {
    let mut worst = params.omega12().abs();
    for (row, col) in Level::ALL.iter().flat_map(|&a| Level::ALL.iter().map(move |&b| (a, b))) {
        let mut unit = DensityMatrix::zeros();
        unit.set(row, col, Complex64::new(1.0, 0.0));
        unit.set(col, row, Complex64::new(1.0, 0.0));
        let d = time_derivative(params, &unit, ProbeAmplitudes::none(), 0.0);
        let col_norm: f64 = d.0.iter().map(|z| z.norm()).sum();
        worst = worst.max(col_norm);
    }
    worst
}

/// States recorded over the demodulation window.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub final_state: DensityMatrix,
    pub omega12: f64,
    pub probe_amplitude: f64,
    /// Largest `|tr(rho) - 1|` seen at any step.
    pub max_trace_drift: f64,
}

/// Fixed-step RK4 integration from `|g-><g-|`.
pub fn integrate(params: &SystemParams, cfg: &IntegrationConfig) -> Result<Trajectory> {
    derive(params)?;
    cfg.validate(params)?;
    let omega12 = params.omega12();
    if omega12.abs() < crate::bloch::RESONANT_OMEGA12 {
        return Err(Error::ResonantDegeneracy { omega12 });
    }
    let period = 2.0 * PI / omega12.abs();
    let steps = (cfg.t_end / cfg.dt).round() as usize;
    let t_end = steps as f64 * cfg.dt;
    let periods = ((cfg.demod_window * t_end) / period).floor();
    if periods < 2.0 {
        return Err(Error::ShortTrajectory);
    }
    let window = (periods - periods % 2.0) * period;
    let h = cfg.sample_stride as f64 * cfg.dt;
    // Simpson on each half needs a multiple of four intervals.
    let intervals = (((window / h).floor() as usize) / 4) * 4;
    if intervals == 0 {
        return Err(Error::ShortTrajectory);
    }
    let first_recorded = steps - intervals * cfg.sample_stride;

    let probe = ProbeAmplitudes::equal(cfg.probe_amplitude);
    let f = |rho: &Matrix4<Complex64>, t: f64| time_derivative(params, &DensityMatrix(*rho), probe, t).0;

    let mut rho = DensityMatrix::pure(Level::GMinus).0;
    let mut times = Vec::with_capacity(intervals + 1);
    let mut states = Vec::with_capacity(intervals + 1);
    let mut max_drift = 0.0f64;
    let dt = cfg.dt;
    for n in 0..=steps {
        let t = n as f64 * dt;
        if n >= first_recorded && (n - first_recorded).is_multiple_of(cfg.sample_stride) {
            times.push(t);
            states.push(DensityMatrix(rho));
        }
        if n == steps {
            break;
        }
        let k1 = f(&rho, t);
        let k2 = f(&(rho + k1 * Complex64::from(0.5 * dt)), t + 0.5 * dt);
        let k3 = f(&(rho + k2 * Complex64::from(0.5 * dt)), t + 0.5 * dt);
        let k4 = f(&(rho + k3 * Complex64::from(dt)), t + dt);
        rho += (k1 + k2 * Complex64::from(2.0) + k3 * Complex64::from(2.0) + k4) * Complex64::from(dt / 6.0);
        let drift = (rho.trace() - 1.0).norm();
        max_drift = max_drift.max(drift);
        if drift > TRACE_DRIFT_LIMIT {
            return Err(Error::TraceDrift { drift, time: t + dt });
        }
    }
    Ok(Trajectory {
        times,
        states,
        final_state: DensityMatrix(rho),
        omega12,
        probe_amplitude: cfg.probe_amplitude,
        max_trace_drift: max_drift,
    })
}

/// Composite Simpson average of `values` over uniformly spaced samples.
fn simpson_mean(values: &[Complex64]) -> Complex64 {
    let n = values.len() - 1;
    debug_assert!(n.is_multiple_of(2) && n > 0);
    let mut acc = values[0] + values[n];
    for (k, v) in values.iter().enumerate().take(n).skip(1) {
        acc += v * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc / (3.0 * n as f64)
}

/// Demodulated sideband amplitudes and window-averaged populations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Demodulation {
    pub response: FirstOrderResponse,
    pub populations: [f64; 4],
    /// Relative spread between the two half-window estimates of `rho_ep_gm`.
    pub half_window_spread: f64,
}

pub fn demodulate(traj: &Trajectory, cfg: &IntegrationConfig) -> Result<Demodulation> {
    use Level::*;
    if traj.probe_amplitude <= 0.0 {
        return Err(Error::invalid("probe_amplitude", "demodulation needs a nonzero probe"));
    }
    let n = traj.states.len().saturating_sub(1);
    if n < 4 || !n.is_multiple_of(4) {
        return Err(Error::ShortTrajectory);
    }
    let project = |row: Level, col: Level, range: std::ops::RangeInclusive<usize>| {
        let vals: Vec<Complex64> = range
            .map(|k| traj.states[k].get(row, col) * Complex64::from_polar(1.0, traj.omega12 * traj.times[k]))
            .collect();
        simpson_mean(&vals) / traj.probe_amplitude
    };
    let full = 0..=n;
    let rho_ep_gm = project(EPlus, GMinus, full.clone());
    let rho_em_gp = project(EMinus, GPlus, full.clone());
    let first = project(EPlus, GMinus, 0..=n / 2);
    let second = project(EPlus, GMinus, n / 2..=n);
    let spread = (first - second).norm() / rho_ep_gm.norm();
    let tolerance = cfg.tolerance();
    if spread > tolerance {
        return Err(Error::NonConvergence { relative: spread, tolerance });
    }
    let populations = Level::ALL.map(|l| {
        let vals: Vec<Complex64> = traj.states.iter().map(|s| s.get(l, l)).collect();
        simpson_mean(&vals).re
    });
    Ok(Demodulation {
        response: FirstOrderResponse { rho_ep_gm, rho_em_gp, terms: None },
        populations,
        half_window_spread: spread,
    })
}

/// Integrate and demodulate in one call.
pub fn sideband_response(params: &SystemParams, cfg: &IntegrationConfig) -> Result<Demodulation> {
    demodulate(&integrate(params, cfg)?, cfg)
}

/// Dump the recorded samples as CSV: `t` followed by re/im pairs of the 16
/// elements in row-major order.
pub fn write_csv<W: Write>(traj: &Trajectory, mut out: W) -> std::io::Result<()> {
    const NAMES: [&str; 4] = ["ep", "em", "gp", "gm"];
    let mut header = vec!["t".to_string()];
    for a in NAMES {
        for b in NAMES {
            header.push(format!("re_{a}_{b}"));
            header.push(format!("im_{a}_{b}"));
        }
    }
    writeln!(out, "{}", header.join(","))?;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        write!(out, "{t:.8e}")?;
        for z in s.to_vector().iter() {
            write!(out, ",{:.8e},{:.8e}", z.re, z.im)?;
        }
        writeln!(out)?;
    }
    Ok(())
}
