//! Physical parameters of the driven four-level system and every derived
//! coefficient the closed-form and numeric engines share.
//!
//! All frequencies and rates are in units of the reference decay rate
//! `gamma`. The level basis is ordered `(e+, e-, g+, g-)` throughout the crate.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Inputs of the model, in units of `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Half of the excited-state Zeeman splitting (splitting is `2B`).
    #[serde(rename = "B")]
    pub b_excited: f64,
    /// Half of the ground-state Zeeman splitting (splitting is `2B'`).
    #[serde(rename = "B_prime")]
    pub b_ground: f64,
    /// Control detuning from the `e+ <-> g+` transition.
    #[serde(rename = "Delta")]
    pub control_detuning: f64,
    /// Probe detuning from the `e+ <-> g-` transition.
    #[serde(rename = "delta")]
    pub probe_detuning: f64,
    /// Control Rabi half-amplitude `G`.
    #[serde(rename = "G", with = "complex_serde")]
    pub control_rabi: Complex64,
    /// Cross decay rate `e- -> g+` and `e+ -> g-`.
    pub gamma1: f64,
    /// Direct decay rate `e+ -> g+` and `e- -> g-`.
    pub gamma2: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self::potassium_reference()
    }
}

impl SystemParams {
    /// The reference working point used for the absorption/dispersion
    /// profiles: `B = 2`, `B' = 3B`, `Delta = delta = B' - B`, `G = 0.5`,
    /// `gamma1 = 4`, `gamma2 = 2`.
    pub fn potassium_reference() -> Self {
        Self {
            b_excited: 2.0,
            b_ground: 6.0,
            control_detuning: 4.0,
            probe_detuning: 4.0,
            control_rabi: Complex64::new(0.5, 0.0),
            gamma1: 4.0,
            gamma2: 2.0,
        }
    }

    pub fn with_detunings(mut self, probe: f64, control: f64) -> Self {
        self.probe_detuning = probe;
        self.control_detuning = control;
        self
    }

    pub fn with_probe_detuning(mut self, probe: f64) -> Self {
        self.probe_detuning = probe;
        self
    }

    pub fn with_control_rabi(mut self, g: f64) -> Self {
        self.control_rabi = Complex64::new(g, 0.0);
        self
    }

    /// Place both fields at two-photon resonance on the `delta = Delta = B' - B` line.
    pub fn at_split_resonance(mut self) -> Self {
        let d = self.b_ground - self.b_excited;
        self.probe_detuning = d;
        self.control_detuning = d;
        self
    }

    /// `|G|^2`
    pub fn rabi_sq(&self) -> f64 {
        self.control_rabi.norm_sqr()
    }

    /// Probe-control beat frequency `omega_12 = delta - Delta + 2B'`.
    pub fn omega12(&self) -> f64 {
        self.probe_detuning - self.control_detuning + 2.0 * self.b_ground
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("B", self.b_excited),
            ("B_prime", self.b_ground),
            ("Delta", self.control_detuning),
            ("delta", self.probe_detuning),
            ("G", self.control_rabi.re),
            ("G", self.control_rabi.im),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        if self.gamma1 <= 0.0 {
            return Err(Error::invalid("gamma1", format!("must be positive, got {}", self.gamma1)));
        }
        if self.gamma2 <= 0.0 {
            return Err(Error::invalid("gamma2", format!("must be positive, got {}", self.gamma2)));
        }
        if self.control_rabi.norm() == 0.0 {
            return Err(Error::invalid(
                "G",
                "control field must be nonzero; the control-only steady state is not unique at G = 0",
            ));
        }
        Ok(())
    }
}

/// Dephasing rates and the beat frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedRates {
    /// Optical coherence dephasing `(gamma1 + gamma2) / 2`.
    pub gamma: f64,
    /// Excited-state coherence dephasing `gamma1 + gamma2`.
    pub gamma_ee: f64,
    /// Ground-state coherence dephasing; zero for purely radiative decay.
    pub gamma_gg: f64,
    pub omega12: f64,
}

/// Optical-pumping factors of the control-only steady state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturationFactors {
    /// `i Delta + Gamma`
    pub c: Complex64,
    /// `-i(-Delta - 2B + 2B') + Gamma`
    pub d: Complex64,
    /// `2|G|^2 Gamma / |d|^2`
    pub x: f64,
    /// `2|G|^2 Gamma / |c|^2`
    pub y: f64,
    /// `(x + y)(gamma1 + gamma2) + 4xy`
    pub q: f64,
}

/// Sideband denominators at the beat frequency. `plus`/`minus` refer to the
/// sign in front of the splitting term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SidebandCoefficients {
    pub a_plus: Complex64,
    pub a_minus: Complex64,
    pub b_plus: Complex64,
    pub b_minus: Complex64,
    pub p_plus: Complex64,
    pub p_minus: Complex64,
    pub q_plus: Complex64,
    pub q_minus: Complex64,
    pub m1: Complex64,
    pub m2: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub rates: DerivedRates,
    pub saturation: SaturationFactors,
    pub sideband: SidebandCoefficients,
}

/// Validate `params` and evaluate every auxiliary coefficient.
pub fn derive(params: &SystemParams) -> Result<Coefficients> {
    params.validate()?;
    let SystemParams {
        b_excited: b,
        b_ground: bp,
        control_detuning: cdet,
        gamma1,
        gamma2,
        ..
    } = *params;

    let rates = DerivedRates {
        gamma: 0.5 * (gamma1 + gamma2),
        gamma_ee: gamma1 + gamma2,
        gamma_gg: 0.0,
        omega12: params.omega12(),
    };
    let g2 = params.rabi_sq();
    let gamma = rates.gamma;

    let c = I * cdet + gamma;
    let d = -I * (-cdet - 2.0 * b + 2.0 * bp) + gamma;
    let x = 2.0 * g2 * gamma / d.norm_sqr();
    let y = 2.0 * g2 * gamma / c.norm_sqr();
    let q = (x + y) * (gamma1 + gamma2) + 4.0 * x * y;
    let saturation = SaturationFactors { c, d, x, y, q };

    let w = -I * rates.omega12;
    let a = |s: f64| w + s * 2.0 * I * b + rates.gamma_ee;
    let bb = |s: f64| w + s * 2.0 * I * bp + rates.gamma_gg;
    let p = |s: f64| w + s * I * (cdet + 2.0 * b) + gamma;
    let qq = |s: f64| w + s * I * (-cdet + 2.0 * bp) + gamma;

    let (a_plus, a_minus) = (a(1.0), a(-1.0));
    let (b_plus, b_minus) = (bb(1.0), bb(-1.0));
    let (p_plus, p_minus) = (p(1.0), p(-1.0));
    let (q_plus, q_minus) = (qq(1.0), qq(-1.0));
    let m1 = a_plus * b_plus * p_plus * q_plus + g2 * (p_plus + q_plus) * (a_plus + b_plus);
    let m2 = a_minus * b_minus * p_minus * q_minus + g2 * (p_minus + q_minus) * (a_minus + b_minus);

    Ok(Coefficients {
        rates,
        saturation,
        sideband: SidebandCoefficients {
            a_plus,
            a_minus,
            b_plus,
            b_minus,
            p_plus,
            p_minus,
            q_plus,
            q_minus,
            m1,
            m2,
        },
    })
}

/// `G` is written as a bare number when real, otherwise as `[re, im]`.
mod complex_serde {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Real(f64),
        Pair([f64; 2]),
    }

    pub fn serialize<S: Serializer>(v: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        if v.im == 0.0 {
            Repr::Real(v.re).serialize(s)
        } else {
            Repr::Pair([v.re, v.im]).serialize(s)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        Ok(match Repr::deserialize(d)? {
            Repr::Real(re) => Complex64::new(re, 0.0),
            Repr::Pair([re, im]) => Complex64::new(re, im),
        })
    }
}
