//! Closed-form weak-probe response of the four-level system and of the
//! single Lambda subsystem it reduces to without cross talk.

use num_complex::Complex64;

use crate::density::{DensityMatrix, Level};
use crate::error::{Error, Result};
use crate::model::{derive, SystemParams};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Denominators below this magnitude (in natural `gamma` units) are treated as singular.
pub const SINGULAR_TOLERANCE: f64 = 1e-14;

/// Control-only steady state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZerothOrderState {
    pub pop_e_plus: f64,
    pub pop_e_minus: f64,
    pub pop_g_plus: f64,
    pub pop_g_minus: f64,
    /// `rho_{g+ e+}`
    pub coh_gp_ep: Complex64,
    /// `rho_{g- e-}`
    pub coh_gm_em: Complex64,
}

impl ZerothOrderState {
    /// Populations in basis order `(e+, e-, g+, g-)`.
    pub fn populations(&self) -> [f64; 4] {
        [self.pop_e_plus, self.pop_e_minus, self.pop_g_plus, self.pop_g_minus]
    }

    /// True when both ground populations exceed both excited populations.
    pub fn is_uninverted(&self) -> bool {
        let e = self.pop_e_plus.max(self.pop_e_minus);
        self.pop_g_plus > e && self.pop_g_minus > e
    }

    pub fn density_matrix(&self) -> DensityMatrix {
        use Level::*;
        let mut rho = DensityMatrix::zeros();
        for (l, p) in Level::ALL.iter().zip(self.populations()) {
            rho.set(*l, *l, Complex64::new(p, 0.0));
        }
        rho.set(GPlus, EPlus, self.coh_gp_ep);
        rho.set(EPlus, GPlus, self.coh_gp_ep.conj());
        rho.set(GMinus, EMinus, self.coh_gm_em);
        rho.set(EMinus, GMinus, self.coh_gm_em.conj());
        rho
    }
}

/// The three additive sources of `rho'_{e+ g-}`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TermDecomposition {
    /// Contribution of the zeroth-order coherence `rho_{g+ e+}`.
    pub coh_pp: Complex64,
    /// Contribution of the zeroth-order coherence `rho_{g- e-}`.
    pub coh_mm: Complex64,
    /// Contribution of the population difference `rho_{g- g-} - rho_{e+ e+}`.
    pub pop: Complex64,
}

impl TermDecomposition {
    pub fn sum(&self) -> Complex64 {
        self.coh_pp + self.coh_mm + self.pop
    }
}

/// First-order sideband coherences per unit probe amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstOrderResponse {
    /// `rho'^{(-1)}_{e+ g-}`, which sets the sigma- susceptibility.
    pub rho_ep_gm: Complex64,
    /// `rho'^{(+1)}_{e- g+}`, which sets the sigma+ susceptibility.
    pub rho_em_gp: Complex64,
    /// Source decomposition of `rho_ep_gm`; not available from demodulation.
    pub terms: Option<TermDecomposition>,
}

pub fn zeroth_order(params: &SystemParams) -> Result<ZerothOrderState> {
    let k = derive(params)?;
    let s = k.saturation;
    let total = params.gamma1 + params.gamma2;
    let g_conj = params.control_rabi.conj();
    Ok(ZerothOrderState {
        pop_e_plus: s.x * s.y / s.q,
        pop_e_minus: s.x * s.y / s.q,
        pop_g_minus: s.y * (total + s.x) / s.q,
        pop_g_plus: s.x * (total + s.y) / s.q,
        coh_gp_ep: -I * s.x * g_conj * total / (s.c * s.q),
        coh_gm_em: -I * s.y * g_conj * total / (s.d * s.q),
    })
}

pub fn first_order(params: &SystemParams) -> Result<FirstOrderResponse> {
    let k = derive(params)?;
    let z = zeroth_order(params)?;
    let sb = k.sideband;
    for (which, m) in [("M1", sb.m1), ("M2", sb.m2)] {
        if m.norm() < SINGULAR_TOLERANCE {
            return Err(Error::SingularDenominator { which, magnitude: m.norm() });
        }
    }
    let g = params.control_rabi;
    let g2 = params.rabi_sq();
    let (a, b, p) = (sb.a_plus, sb.b_plus, sb.p_plus);

    let terms = TermDecomposition {
        coh_pp: g * a * p * z.coh_gp_ep / sb.m1,
        coh_mm: g * b * p * z.coh_gm_em / sb.m1,
        pop: I * (a * b * p + g2 * (a + b)) * (z.pop_g_minus - z.pop_e_plus) / sb.m1,
    };

    let (a, b, q_) = (sb.a_minus, sb.b_minus, sb.q_minus);
    let rho_em_gp = (g * b * q_ * z.coh_gp_ep
        + g * a * q_ * z.coh_gm_em
        + I * (a * b * q_ + g2 * (a + b)) * (z.pop_g_plus - z.pop_e_minus))
        / sb.m2;

    Ok(FirstOrderResponse { rho_ep_gm: terms.sum(), rho_em_gp, terms: Some(terms) })
}

/// Probe response of the Lambda subsystem alone, with all population in `g-`.
pub fn lambda_system(params: &SystemParams) -> Result<Complex64> {
    let k = derive(params)?;
    let two_photon = I * (params.probe_detuning - params.control_detuning) - k.rates.gamma_gg;
    let denom = two_photon * (I * params.probe_detuning - k.rates.gamma) + params.rabi_sq();
    if denom.norm() < SINGULAR_TOLERANCE {
        return Err(Error::SingularDenominator { which: "Lambda denominator", magnitude: denom.norm() });
    }
    Ok(-I * two_photon / denom)
}

/// `rho'_{e+ g-}` on the `delta = Delta = B' - B` line, in reduced form.
/// The detunings in `params` are overridden.
pub fn two_photon_reduction(params: &SystemParams) -> Result<Complex64> {
    let p = params.at_split_resonance();
    let k = derive(&p)?;
    let split = p.b_ground - p.b_excited;
    let gamma = k.rates.gamma;
    let value = -split / (2.0 * (gamma * gamma + split * split + 2.0 * p.rabi_sq()));
    Ok(Complex64::new(value, 0.0))
}

/// Detuning on the two-photon-resonance line where the four-level
/// dispersion vanishes.
pub fn delta_zero(params: &SystemParams) -> Result<f64> {
    let k = derive(params)?;
    let split = params.b_ground - params.b_excited;
    if split == 0.0 {
        return Err(Error::DegenerateSplitting);
    }
    let gamma = k.rates.gamma;
    Ok((2.0 * split * split + gamma * gamma) / split)
}

/// Cardano solution of `r^3 + Delta r^2 + a1 r + a0 = 0` for the Lambda
/// dispersion-zero offsets `r = delta - Delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CardanoRoots {
    pub a0: f64,
    pub a1: f64,
    /// Cardano `Q`.
    pub qc: f64,
    /// Cardano `R`.
    pub rc: f64,
    pub a_plus: Complex64,
    pub a_minus: Complex64,
    pub roots: [Complex64; 3],
    /// Quadratic coefficient (the control detuning).
    pub a2: f64,
}

impl CardanoRoots {
    pub fn residual(&self, r: Complex64) -> f64 {
        cubic(self.a2, self.a1, self.a0, r).norm()
    }

    /// Roots whose imaginary part is below `tol`, as reals.
    pub fn real_roots(&self, tol: f64) -> Vec<f64> {
        self.roots.iter().filter(|r| r.im.abs() <= tol).map(|r| r.re).collect()
    }
}

fn cubic(a2: f64, a1: f64, a0: f64, r: Complex64) -> Complex64 {
    ((r + a2) * r + a1) * r + a0
}

fn cubic_slope(a2: f64, a1: f64, r: Complex64) -> Complex64 {
    (3.0 * r + 2.0 * a2) * r + a1
}

pub fn cardano_roots(params: &SystemParams) -> Result<CardanoRoots> {
    let k = derive(params)?;
    let gg = k.rates.gamma_gg;
    let delta = params.control_detuning;
    let a0 = delta * gg * gg;
    let a1 = gg * gg + 2.0 * k.rates.gamma * gg + params.rabi_sq();
    Ok(solve_cubic(delta, a1, a0))
}

/// Roots of the monic cubic `r^3 + a2 r^2 + a1 r + a0`.
///
/// The two cube roots are paired so their product is `-Q`; each root is then
/// polished with three Newton steps.
pub fn solve_cubic(a2: f64, a1: f64, a0: f64) -> CardanoRoots {
    let qc = (3.0 * a1 - a2 * a2) / 9.0;
    let rc = (9.0 * a2 * a1 - 27.0 * a0 - 2.0 * a2.powi(3)) / 54.0;
    let disc = Complex64::new(qc.powi(3) + rc * rc, 0.0).sqrt();
    let big = if (rc + disc).norm() >= (rc - disc).norm() { rc + disc } else { rc - disc };
    let (u, v) = if big.norm() == 0.0 {
        (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    } else {
        let u = big.cbrt();
        (u, -qc / u)
    };
    let a_plus = u + v;
    let a_minus = u - v;
    let shift = Complex64::new(-a2 / 3.0, 0.0);
    let half_sqrt3 = 0.5 * 3f64.sqrt();
    let mut roots = [
        shift + a_plus,
        shift - 0.5 * a_plus + I * half_sqrt3 * a_minus,
        shift - 0.5 * a_plus - I * half_sqrt3 * a_minus,
    ];
    for r in &mut roots {
        for _ in 0..3 {
            let slope = cubic_slope(a2, a1, *r);
            if slope.norm() == 0.0 {
                break;
            }
            *r -= cubic(a2, a1, a0, *r) / slope;
        }
    }
    CardanoRoots { a0, a1, qc, rc, a_plus, a_minus, roots, a2 }
}
