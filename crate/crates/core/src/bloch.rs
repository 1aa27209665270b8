//! Linear-algebra route to the weak-probe response.
//!
//! The density-matrix equations are read term by term into 16x16 operators on
//! the row-major density vector (see [`vec_index`]): a control-only generator
//! `L0` plus one coupling operator per probe harmonic. The control-only steady
//! state is the null vector of `L0`; the first-order sidebands solve
//! `(-i w12 - L0) x = V rho0`. Nothing here uses the closed forms.

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;

use crate::analytic::{FirstOrderResponse, TermDecomposition};
use crate::density::{vec_index, DensityMatrix, Level};
use crate::error::{Error, Result};
use crate::model::{derive, SystemParams};

pub type Operator = SMatrix<Complex64, 16, 16>;
pub type StateVector = SVector<Complex64, 16>;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative singular-value gap below which the null space is considered
/// more than one-dimensional.
pub const NULL_SPACE_GAP: f64 = 1e-8;

/// Beat frequencies below this magnitude are rejected.
pub const RESONANT_OMEGA12: f64 = 1e-12;

/// Which time dependence a term carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    /// Control field and free evolution; time independent in the rotating frame.
    Control,
    /// `g- e^{-i w12 t}`
    ProbeMinus,
    /// `g-* e^{+i w12 t}`
    ProbeMinusConj,
    /// `g+ e^{-i w12 t}`
    ProbePlus,
    /// `g+* e^{+i w12 t}`
    ProbePlusConj,
}

impl Channel {
    fn conj(self) -> Self {
        match self {
            Channel::Control => Channel::Control,
            Channel::ProbeMinus => Channel::ProbeMinusConj,
            Channel::ProbeMinusConj => Channel::ProbeMinus,
            Channel::ProbePlus => Channel::ProbePlusConj,
            Channel::ProbePlusConj => Channel::ProbePlus,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Term {
    channel: Channel,
    coeff: Complex64,
    row: Level,
    col: Level,
}

fn term(channel: Channel, coeff: Complex64, row: Level, col: Level) -> Term {
    Term { channel, coeff, row, col }
}

impl Term {
    /// The same term in the equation for the transposed element.
    fn conj(self) -> Self {
        Term { channel: self.channel.conj(), coeff: self.coeff.conj(), row: self.col, col: self.row }
    }
}

/// Right-hand side of the equation for one matrix element.
type Equation = ((Level, Level), Vec<Term>);

/// Right-hand sides of the rotating-frame equations, one entry per matrix element.
fn equations(params: &SystemParams) -> Result<Vec<Equation>> {
    use Channel::*;
    use Level::*;
    let k = derive(params)?;
    let gamma = k.rates.gamma;
    let SystemParams { b_excited: b, b_ground: bp, control_detuning: cd, gamma1, gamma2, .. } = *params;
    let g = params.control_rabi;
    let gc = g.conj();
    let one = Complex64::new(1.0, 0.0);

    let mut eqs: Vec<((Level, Level), Vec<Term>)> = vec![
        (
            (EPlus, GMinus),
            vec![
                term(Control, -(I * (-cd + 2.0 * bp) + gamma), EPlus, GMinus),
                term(ProbeMinus, I, GMinus, GMinus),
                term(ProbeMinus, -I, EPlus, EPlus),
                term(Control, I * g, GPlus, GMinus),
                term(Control, -I * g, EPlus, EMinus),
            ],
        ),
        (
            (EMinus, GPlus),
            vec![
                term(Control, -(I * (-cd - 2.0 * b) + gamma), EMinus, GPlus),
                term(ProbePlus, I, GPlus, GPlus),
                term(ProbePlus, -I, EMinus, EMinus),
                term(Control, I * g, GMinus, GPlus),
                term(Control, -I * g, EMinus, EPlus),
            ],
        ),
        (
            (EPlus, GPlus),
            vec![
                term(Control, -(-I * cd + gamma), EPlus, GPlus),
                term(Control, I * g, GPlus, GPlus),
                term(Control, -I * g, EPlus, EPlus),
                term(ProbeMinus, I, GMinus, GPlus),
                term(ProbePlus, -I, EPlus, EMinus),
            ],
        ),
        (
            (EMinus, GMinus),
            vec![
                term(Control, -(I * (-cd - 2.0 * b + 2.0 * bp) + gamma), EMinus, GMinus),
                term(ProbePlus, I, GPlus, GMinus),
                term(ProbeMinus, -I, EMinus, EPlus),
                term(Control, I * g, GMinus, GMinus),
                term(Control, -I * g, EMinus, EMinus),
            ],
        ),
        (
            (GPlus, GMinus),
            vec![
                term(Control, -(2.0 * I * bp + k.rates.gamma_gg), GPlus, GMinus),
                term(Control, I * gc, EPlus, GMinus),
                term(Control, -I * g, GPlus, EMinus),
                term(ProbePlusConj, I, EMinus, GMinus),
                term(ProbeMinus, -I, GPlus, EPlus),
            ],
        ),
        (
            (EPlus, EMinus),
            vec![
                term(Control, -(2.0 * I * b + k.rates.gamma_ee), EPlus, EMinus),
                term(Control, -I * gc, EPlus, GMinus),
                term(Control, I * g, GPlus, EMinus),
                term(ProbePlusConj, -I, EPlus, GPlus),
                term(ProbeMinus, I, GMinus, EMinus),
            ],
        ),
    ];

    // Population equations: decay feeding plus `i[X - h.c.]`, i.e. `iX + conj(iX)`.
    let with_hc = |mut base: Vec<Term>, coherent: Vec<Term>| {
        base.extend(coherent.iter().copied());
        base.extend(coherent.iter().map(|t| t.conj()));
        base
    };
    let pop_gm = with_hc(
        vec![term(Control, gamma2 * one, EMinus, EMinus), term(Control, gamma1 * one, EPlus, EPlus)],
        vec![term(ProbeMinusConj, I, EPlus, GMinus), term(Control, I * gc, EMinus, GMinus)],
    );
    let pop_em = with_hc(
        vec![term(Control, -(gamma1 + gamma2) * one, EMinus, EMinus)],
        vec![term(ProbePlus, I, GPlus, EMinus), term(Control, I * g, GMinus, EMinus)],
    );
    let pop_ep = with_hc(
        vec![term(Control, -(gamma1 + gamma2) * one, EPlus, EPlus)],
        vec![term(ProbeMinus, I, GMinus, EPlus), term(Control, I * g, GPlus, EPlus)],
    );
    // Trace conservation fixes the remaining population.
    let pop_gp: Vec<Term> = pop_gm
        .iter()
        .chain(&pop_em)
        .chain(&pop_ep)
        .map(|t| Term { coeff: -t.coeff, ..*t })
        .collect();

    let transposed: Vec<_> = eqs
        .iter()
        .map(|((r, c), terms)| ((*c, *r), terms.iter().map(|t| t.conj()).collect()))
        .collect();
    eqs.extend(transposed);
    eqs.push(((GMinus, GMinus), pop_gm));
    eqs.push(((EMinus, EMinus), pop_em));
    eqs.push(((EPlus, EPlus), pop_ep));
    eqs.push(((GPlus, GPlus), pop_gp));
    Ok(eqs)
}

/// Generator blocks of the density-vector dynamics.
///
/// `d vec(rho)/dt = [L0 + g- e^{-iwt} V- + g-* e^{iwt} V-' + g+ e^{-iwt} V+ + g+* e^{iwt} V+'] vec(rho)`
#[derive(Debug, Clone, PartialEq)]
pub struct LiouvillianBlocks {
    pub l0: Operator,
    pub v_minus: Operator,
    pub v_minus_conj: Operator,
    pub v_plus: Operator,
    pub v_plus_conj: Operator,
    pub omega12: f64,
}

/// Probe half-amplitudes of the two circular components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeAmplitudes {
    pub g_minus: Complex64,
    pub g_plus: Complex64,
}

impl ProbeAmplitudes {
    pub fn none() -> Self {
        Self { g_minus: Complex64::new(0.0, 0.0), g_plus: Complex64::new(0.0, 0.0) }
    }

    /// Equal real amplitude `eps` on both components.
    pub fn equal(eps: f64) -> Self {
        Self { g_minus: Complex64::new(eps, 0.0), g_plus: Complex64::new(eps, 0.0) }
    }
}

impl LiouvillianBlocks {
    fn block_mut(&mut self, channel: Channel) -> &mut Operator {
        match channel {
            Channel::Control => &mut self.l0,
            Channel::ProbeMinus => &mut self.v_minus,
            Channel::ProbeMinusConj => &mut self.v_minus_conj,
            Channel::ProbePlus => &mut self.v_plus,
            Channel::ProbePlusConj => &mut self.v_plus_conj,
        }
    }

    /// Full time derivative for finite probe amplitudes at time `t`.
    pub fn derivative(&self, rho: &DensityMatrix, probe: ProbeAmplitudes, t: f64) -> DensityMatrix {
        let v = rho.to_vector();
        let down = Complex64::from_polar(1.0, -self.omega12 * t);
        let up = down.conj();
        let dv = self.l0 * v
            + (self.v_minus * v) * (probe.g_minus * down)
            + (self.v_minus_conj * v) * (probe.g_minus.conj() * up)
            + (self.v_plus * v) * (probe.g_plus * down)
            + (self.v_plus_conj * v) * (probe.g_plus.conj() * up);
        DensityMatrix::from_vector(&dv)
    }
}

pub fn assemble(params: &SystemParams) -> Result<LiouvillianBlocks> {
    let mut blocks = LiouvillianBlocks {
        l0: Operator::zeros(),
        v_minus: Operator::zeros(),
        v_minus_conj: Operator::zeros(),
        v_plus: Operator::zeros(),
        v_plus_conj: Operator::zeros(),
        omega12: params.omega12(),
    };
    for ((row, col), terms) in equations(params)? {
        let target = vec_index(row, col);
        for t in terms {
            blocks.block_mut(t.channel)[(target, vec_index(t.row, t.col))] += t.coeff;
        }
    }
    Ok(blocks)
}

/// Null vector of `L0` and the diagnostics of its extraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullSpace {
    pub state: DensityMatrix,
    /// Smallest singular value of `L0`.
    pub residual: f64,
    /// Second-smallest over largest singular value.
    pub gap: f64,
}

pub fn null_space(blocks: &LiouvillianBlocks) -> Result<NullSpace> {
    let svd = blocks.l0.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors were requested");
    let sv = svd.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[a].total_cmp(&sv[b]));
    let largest = sv[order[sv.len() - 1]];
    let gap = sv[order[1]] / largest;
    if gap < NULL_SPACE_GAP {
        return Err(Error::DegenerateSteadyState { gap });
    }
    let row = v_t.row(order[0]);
    let v = StateVector::from_fn(|k, _| row[k].conj());
    let trace: Complex64 = (0..4).map(|i| v[5 * i]).sum();
    Ok(NullSpace { state: DensityMatrix::from_vector(&(v / trace)), residual: sv[order[0]], gap })
}

pub fn steady_state_zeroth(params: &SystemParams) -> Result<DensityMatrix> {
    Ok(null_space(&assemble(params)?)?.state)
}

/// Both first-order coherences together with the steady state they were computed from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloquetSolution {
    pub zeroth: DensityMatrix,
    pub response: FirstOrderResponse,
}

/// Solves `(-i w12 - L0) x = V rho0` for the `e^{-i w12 t}` harmonic driven by `V`.
fn sideband(blocks: &LiouvillianBlocks, drive: &Operator, source: &StateVector) -> Result<DensityMatrix> {
    let shifted = Operator::identity() * (-I * blocks.omega12) - blocks.l0;
    let x = shifted
        .lu()
        .solve(&(drive * source))
        .ok_or(Error::SingularDenominator { which: "sideband operator", magnitude: 0.0 })?;
    Ok(DensityMatrix::from_vector(&x))
}

pub fn solve(params: &SystemParams) -> Result<FloquetSolution> {
    let blocks = assemble(params)?;
    if blocks.omega12.abs() < RESONANT_OMEGA12 {
        return Err(Error::ResonantDegeneracy { omega12: blocks.omega12 });
    }
    let rho0 = null_space(&blocks)?.state;
    let source = rho0.to_vector();

    let minus = sideband(&blocks, &blocks.v_minus, &source)?;
    let plus = sideband(&blocks, &blocks.v_plus, &source)?;

    // Split rho0 into its three sources and propagate each separately.
    use Level::*;
    let part = |pairs: &[(Level, Level)]| {
        let mut m = DensityMatrix::zeros();
        for &(r, c) in pairs {
            m.set(r, c, rho0.get(r, c));
        }
        m.to_vector()
    };
    let coh_pp = part(&[(GPlus, EPlus), (EPlus, GPlus)]);
    let coh_mm = part(&[(GMinus, EMinus), (EMinus, GMinus)]);
    let pops = part(&[(EPlus, EPlus), (EMinus, EMinus), (GPlus, GPlus), (GMinus, GMinus)]);
    let pick = |src: &StateVector| -> Result<Complex64> {
        Ok(sideband(&blocks, &blocks.v_minus, src)?.get(EPlus, GMinus))
    };
    let terms = TermDecomposition { coh_pp: pick(&coh_pp)?, coh_mm: pick(&coh_mm)?, pop: pick(&pops)? };

    Ok(FloquetSolution {
        zeroth: rho0,
        response: FirstOrderResponse {
            rho_ep_gm: minus.get(EPlus, GMinus),
            rho_em_gp: plus.get(EMinus, GPlus),
            terms: Some(terms),
        },
    })
}

pub fn sideband_response(params: &SystemParams) -> Result<FirstOrderResponse> {
    Ok(solve(params)?.response)
}
