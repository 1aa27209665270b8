//! Parameter sweeps and spectral feature detection.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::analytic::{self, TermDecomposition};
use crate::bloch::{self, RESONANT_OMEGA12};
use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::timedomain::{self, IntegrationConfig};

/// Which coordinate a scan sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Probe detuning `delta`.
    Probe,
    /// Control detuning `Delta`.
    Control,
    /// Control Rabi half-amplitude `G` (real).
    Rabi,
    /// `delta = Delta`, swept together.
    Locked,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Probe => "delta",
            Axis::Control => "Delta",
            Axis::Rabi => "G",
            Axis::Locked => "locked_delta_equals_Delta",
        }
    }

    pub fn apply(self, base: &SystemParams, x: f64) -> SystemParams {
        match self {
            Axis::Probe => base.with_probe_detuning(x),
            Axis::Control => SystemParams { control_detuning: x, ..*base },
            Axis::Rabi => base.with_control_rabi(x),
            Axis::Locked => base.with_detunings(x, x),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Engine {
    /// Closed-form four-level response.
    Analytic,
    /// Liouvillian null space plus sideband linear solve.
    Bloch,
    /// RK4 integration with a finite probe, then demodulation.
    TimeDomain(IntegrationConfig),
    /// Single Lambda subsystem without cross talk.
    Lambda,
}

impl Engine {
    pub fn name(&self) -> &'static str {
        match self {
            Engine::Analytic => "analytic",
            Engine::Bloch => "bloch",
            Engine::TimeDomain(_) => "timedomain",
            Engine::Lambda => "lambda",
        }
    }

    fn is_four_level(&self) -> bool {
        !matches!(self, Engine::Lambda)
    }

    fn is_deterministic(&self) -> bool {
        !matches!(self, Engine::TimeDomain(_))
    }
}

/// Probe susceptibilities at one setting, in units of `N |d|^2 / (hbar gamma)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SusceptibilityPoint {
    /// Value of the scanned coordinate.
    pub coordinate: f64,
    pub params: SystemParams,
    pub chi_minus: Complex64,
    /// Undefined for the Lambda engine.
    pub chi_plus: Option<Complex64>,
    pub terms: Option<TermDecomposition>,
    /// Zeroth-order populations `(e+, e-, g+, g-)`.
    pub populations: [f64; 4],
}

/// Evaluate a single point with `engine`.
pub fn evaluate(engine: &Engine, params: &SystemParams, coordinate: f64) -> Result<SusceptibilityPoint> {
    let point = |chi_minus, chi_plus, terms, populations| SusceptibilityPoint {
        coordinate,
        params: *params,
        chi_minus,
        chi_plus,
        terms,
        populations,
    };
    match engine {
        Engine::Analytic => {
            let r = analytic::first_order(params)?;
            let z = analytic::zeroth_order(params)?;
            Ok(point(r.rho_ep_gm, Some(r.rho_em_gp), r.terms, z.populations()))
        }
        Engine::Bloch => {
            let s = bloch::solve(params)?;
            Ok(point(s.response.rho_ep_gm, Some(s.response.rho_em_gp), s.response.terms, s.zeroth.populations()))
        }
        Engine::TimeDomain(cfg) => {
            let d = timedomain::sideband_response(params, cfg)?;
            Ok(point(d.response.rho_ep_gm, Some(d.response.rho_em_gp), None, d.populations))
        }
        Engine::Lambda => {
            let chi = analytic::lambda_system(params)?;
            let zero = Complex64::new(0.0, 0.0);
            // Without cross talk the response comes entirely from the population difference.
            let terms = TermDecomposition { coh_pp: zero, coh_mm: zero, pop: chi };
            Ok(point(chi, None, Some(terms), [0.0, 0.0, 0.0, 1.0]))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSpec {
    pub axis: Axis,
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    /// Values of every coordinate not being swept.
    pub base: SystemParams,
    pub engine: Engine,
}

impl ScanSpec {
    pub fn new(axis: Axis, lo: f64, hi: f64, points: usize, base: SystemParams, engine: Engine) -> Self {
        Self { axis, lo, hi, points, base, engine }
    }

    /// The absorption/dispersion profile grid: `delta` in `[-10, 20]`, 601 points.
    pub fn probe_profile(base: SystemParams, engine: Engine) -> Self {
        Self::new(Axis::Probe, -10.0, 20.0, 601, base, engine)
    }

    /// The two-photon-resonance line: `delta = Delta` in `[-10, 15]`, 501 points.
    pub fn locked_profile(base: SystemParams, engine: Engine) -> Self {
        Self::new(Axis::Locked, -10.0, 15.0, 501, base, engine)
    }

    /// Control-strength sweep `G` in `(0, 3]` on the `delta = Delta = B' - B` line.
    pub fn rabi_profile(base: SystemParams, engine: Engine) -> Self {
        Self::new(Axis::Rabi, 0.06, 3.0, 50, base.at_split_resonance(), engine)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(Error::invalid("range", format!("need lo < hi, got [{}, {}]", self.lo, self.hi)));
        }
        if self.points < 2 {
            return Err(Error::invalid("points", "a scan needs at least two points"));
        }
        self.base.validate()
    }

    pub fn coordinates(&self) -> impl Iterator<Item = f64> + '_ {
        let span = self.hi - self.lo;
        let last = (self.points - 1) as f64;
        (0..self.points).map(move |k| self.lo + span * k as f64 / last)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DropReason {
    /// `omega_12 = 0`: the sideband expansion does not apply.
    ResonantBeat,
    Engine(Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DroppedPoint {
    pub coordinate: f64,
    pub reason: DropReason,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub spec: ScanSpec,
    pub points: Vec<SusceptibilityPoint>,
    pub dropped: Vec<DroppedPoint>,
}

/// Evaluate every grid point; output order follows the grid regardless of
/// how the work is scheduled.
pub fn scan(spec: &ScanSpec) -> Result<ScanResult> {
    spec.validate()?;
    let coords: Vec<f64> = spec.coordinates().collect();
    let outcomes: Vec<std::result::Result<SusceptibilityPoint, DroppedPoint>> = coords
        .par_iter()
        .map(|&x| {
            let params = spec.axis.apply(&spec.base, x);
            if spec.engine.is_four_level() && params.omega12().abs() < RESONANT_OMEGA12 {
                return Err(DroppedPoint { coordinate: x, reason: DropReason::ResonantBeat });
            }
            evaluate(&spec.engine, &params, x)
                .map_err(|e| DroppedPoint { coordinate: x, reason: DropReason::Engine(e) })
        })
        .collect();

    let mut points = Vec::with_capacity(outcomes.len());
    let mut dropped = Vec::new();
    for o in outcomes {
        match o {
            Ok(p) => points.push(p),
            Err(d) => dropped.push(d),
        }
    }
    Ok(ScanResult { spec: *spec, points, dropped })
}

/// The same grid evaluated with the Lambda-subsystem response.
pub fn lambda_reference_scan(spec: &ScanSpec) -> Result<ScanResult> {
    scan(&ScanSpec { engine: Engine::Lambda, ..*spec })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureTolerances {
    /// `Im chi < -gain` marks amplification.
    pub gain: f64,
    /// `|Im chi| < transparency` marks a transparency point.
    pub transparency: f64,
    /// Target `|Re chi|` after refining a dispersion zero.
    pub zero: f64,
}

impl Default for FeatureTolerances {
    fn default() -> Self {
        Self { gain: 1e-9, transparency: 1e-8, zero: 1e-8 }
    }
}

/// Closed interval of grid coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionZero {
    pub coordinate: f64,
    /// `|Re chi|` at the reported coordinate.
    pub residual: f64,
    /// False when only interpolated between grid points.
    pub refined: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PredictedMarkers {
    /// Zero of the dispersion on the two-photon-resonance line.
    pub delta_zero: Option<f64>,
    /// `Delta + r` for each real Cardano root `r`; probe-axis scans only.
    pub cardano: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureReport {
    pub transparency: Vec<f64>,
    pub gain_intervals: Vec<Interval>,
    pub dispersion_zeros: Vec<DispersionZero>,
    /// Grid coordinates of local maxima of `Im chi`.
    pub absorption_peaks: Vec<f64>,
    pub predicted: PredictedMarkers,
}

#[derive(Clone, Copy)]
enum Part {
    Re,
    Im,
}

fn part(z: Complex64, which: Part) -> f64 {
    match which {
        Part::Re => z.re,
        Part::Im => z.im,
    }
}

/// Bisect `f` on `[a, b]`, where `f(a)` and `f(b)` have opposite signs.
fn bisect(mut a: f64, mut b: f64, mut fa: f64, f: impl Fn(f64) -> Option<f64>, target: f64) -> Option<(f64, f64)> {
    let mut best = None;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        best = Some((m, fm.abs()));
        if fm.abs() < target * 1e-4 || (b - a).abs() <= 4.0 * f64::EPSILON * m.abs().max(1.0) {
            break;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    best
}

/// Zeros of one component of `chi_minus`: grid points below `tol` plus
/// sign changes between neighbours.
fn zeros_of(result: &ScanResult, which: Part, tol: f64) -> Vec<DispersionZero> {
    let spec = &result.spec;
    let engine_value = |x: f64| {
        let p = spec.axis.apply(&spec.base, x);
        evaluate(&spec.engine, &p, x).ok().map(|pt| part(pt.chi_minus, which))
    };
    let pts = &result.points;
    let mut out: Vec<DispersionZero> = Vec::new();
    let push = |z: DispersionZero, out: &mut Vec<DispersionZero>| {
        let scale = (spec.hi - spec.lo) / (spec.points - 1) as f64;
        if !out.iter().any(|o| (o.coordinate - z.coordinate).abs() < 1e-6 * scale.max(1.0)) {
            out.push(z);
        }
    };
    for (k, p) in pts.iter().enumerate() {
        let v = part(p.chi_minus, which);
        if v.abs() < tol {
            push(DispersionZero { coordinate: p.coordinate, residual: v.abs(), refined: true }, &mut out);
        }
        let Some(next) = pts.get(k + 1) else { continue };
        let w = part(next.chi_minus, which);
        if v * w >= 0.0 {
            continue;
        }
        let refined = spec
            .engine
            .is_deterministic()
            .then(|| bisect(p.coordinate, next.coordinate, v, engine_value, tol))
            .flatten();
        let zero = match refined {
            Some((x, r)) => DispersionZero { coordinate: x, residual: r, refined: true },
            None => {
                let x = p.coordinate + (next.coordinate - p.coordinate) * v / (v - w);
                DispersionZero { coordinate: x, residual: f64::NAN, refined: false }
            }
        };
        push(zero, &mut out);
    }
    out.sort_by(|a, b| a.coordinate.total_cmp(&b.coordinate));
    out
}

pub fn detect_features(result: &ScanResult, tol: &FeatureTolerances) -> FeatureReport {
    let pts = &result.points;
    let mut report = FeatureReport {
        transparency: zeros_of(result, Part::Im, tol.transparency).into_iter().map(|z| z.coordinate).collect(),
        dispersion_zeros: zeros_of(result, Part::Re, tol.zero),
        ..Default::default()
    };

    let mut open: Option<Interval> = None;
    for p in pts {
        if p.chi_minus.im < -tol.gain {
            let iv = open.get_or_insert(Interval { lo: p.coordinate, hi: p.coordinate });
            iv.hi = p.coordinate;
        } else if let Some(iv) = open.take() {
            report.gain_intervals.push(iv);
        }
    }
    report.gain_intervals.extend(open);

    report.absorption_peaks = pts
        .windows(3)
        .filter(|w| w[1].chi_minus.im > w[0].chi_minus.im && w[1].chi_minus.im > w[2].chi_minus.im)
        .map(|w| w[1].coordinate)
        .collect();

    let base = &result.spec.base;
    report.predicted.delta_zero = analytic::delta_zero(base).ok();
    if result.spec.axis == Axis::Probe {
        if let Ok(roots) = analytic::cardano_roots(base) {
            let mut c: Vec<f64> =
                roots.real_roots(1e-9).into_iter().map(|r| base.control_detuning + r).collect();
            c.sort_by(f64::total_cmp);
            report.predicted.cardano = c;
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2() -> SystemParams {
        SystemParams::potassium_reference()
    }

    #[test]
    fn profile_at_two_photon_resonance() {
        let r = scan(&ScanSpec::probe_profile(fig2(), Engine::Analytic)).unwrap();
        // omega_12 = delta + 8 vanishes on the grid.
        assert_eq!(r.points.len(), 600);
        assert_eq!(r.dropped[0].coordinate, -8.0);
        let at4 = r.points.iter().find(|p| p.coordinate == 4.0).unwrap();
        assert!((at4.chi_minus.re + 4.0 / 51.0).abs() < 1e-12);
        assert!(at4.chi_minus.im.abs() < 1e-12);
    }

    #[test]
    fn four_level_features() {
        let r = scan(&ScanSpec::probe_profile(fig2(), Engine::Analytic)).unwrap();
        let f = detect_features(&r, &FeatureTolerances::default());
        assert!(f.transparency.iter().any(|&x| (x - 4.0).abs() < 1e-6), "{:?}", f.transparency);
        assert!(!f.gain_intervals.is_empty());
        assert!(f.gain_intervals[0].lo > 4.0);
        for z in &f.dispersion_zeros {
            assert!(z.refined && z.residual < 1e-8, "{z:?}");
        }
        assert_eq!(f.predicted.delta_zero, Some(10.25));
    }

    #[test]
    fn locked_line_dispersion_zero() {
        let r = scan(&ScanSpec::locked_profile(fig2(), Engine::Analytic)).unwrap();
        let f = detect_features(&r, &FeatureTolerances::default());
        assert_eq!(f.dispersion_zeros.len(), 1);
        assert!((f.dispersion_zeros[0].coordinate - 10.25).abs() < 1e-6);
    }

    #[test]
    fn lambda_reference() {
        let r = lambda_reference_scan(&ScanSpec::probe_profile(fig2(), Engine::Analytic)).unwrap();
        assert!(r.points.iter().all(|p| p.chi_minus.im >= -1e-12));
        let at4 = r.points.iter().find(|p| p.coordinate == 4.0).unwrap();
        assert_eq!(at4.chi_minus, Complex64::new(0.0, 0.0));
        let f = detect_features(&r, &FeatureTolerances::default());
        assert_eq!(f.absorption_peaks.len(), 2);
        assert!(f.gain_intervals.is_empty());
        // Re chi vanishes where (delta - Delta)(delta (delta - Delta) - |G|^2) = 0.
        let s = 17f64.sqrt();
        let expected = [(4.0 - s) / 2.0, 4.0, (4.0 + s) / 2.0];
        assert_eq!(f.dispersion_zeros.len(), 3, "{:?}", f.dispersion_zeros);
        for (z, e) in f.dispersion_zeros.iter().zip(expected) {
            assert!((z.coordinate - e).abs() < 1e-9, "{z:?} vs {e}");
            assert!(z.residual < 1e-8);
        }
        assert_eq!(f.predicted.cardano.len(), 3);
    }

    #[test]
    fn rabi_sweep_stays_dispersive() {
        let r = scan(&ScanSpec::rabi_profile(fig2(), Engine::Analytic)).unwrap();
        assert_eq!(r.points.len(), 50);
        assert!((r.points[49].coordinate - 3.0).abs() < 1e-15);
        assert!(r.points.iter().all(|p| p.chi_minus.re < 0.0));
    }

    #[test]
    fn resonant_beat_points_are_dropped() {
        // omega_12 = delta + 8 vanishes at delta = -8.
        let spec = ScanSpec::new(Axis::Probe, -10.0, -6.0, 5, fig2(), Engine::Bloch);
        let r = scan(&spec).unwrap();
        assert_eq!(r.points.len(), 4);
        assert_eq!(r.dropped, vec![DroppedPoint { coordinate: -8.0, reason: DropReason::ResonantBeat }]);
        let lam = lambda_reference_scan(&spec).unwrap();
        assert_eq!(lam.points.len(), 5);
    }

    #[test]
    fn engine_errors_become_records() {
        let spec = ScanSpec::new(
            Axis::Probe,
            -1.0,
            1.0,
            3,
            fig2(),
            Engine::TimeDomain(IntegrationConfig { dt: 1.0, ..Default::default() }),
        );
        let r = scan(&spec).unwrap();
        assert!(r.points.is_empty());
        assert_eq!(r.dropped.len(), 3);
        assert!(matches!(r.dropped[0].reason, DropReason::Engine(Error::InvalidParameter { .. })));
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(scan(&ScanSpec::new(Axis::Probe, 1.0, 1.0, 10, fig2(), Engine::Analytic)).is_err());
        assert!(scan(&ScanSpec::new(Axis::Probe, 0.0, 1.0, 1, fig2(), Engine::Analytic)).is_err());
    }

    #[test]
    fn parallel_scan_is_deterministic() {
        let spec = ScanSpec::probe_profile(fig2(), Engine::Bloch);
        let a = scan(&spec).unwrap();
        let b = scan(&spec).unwrap();
        assert_eq!(a, b);
        let serial: Vec<_> = spec
            .coordinates()
            .filter_map(|x| evaluate(&spec.engine, &spec.axis.apply(&spec.base, x), x).ok())
            .collect();
        assert_eq!(a.points, serial);
    }
}
