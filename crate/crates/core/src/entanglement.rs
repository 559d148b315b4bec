//! Three-tangle, generic fidelity witnesses and the local filters that move
//! states within (or between representatives of) SLOCC classes.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symstate::{d, delta5, DensityMatrix, Delta5Params, LocalOperator, ProjectorSpec, PureState};

/// Tangles below this are classified as W-class or not genuinely tripartite.
pub const TANGLE_ZERO: f64 = 1e-9;

/// Three-tangle of a pure three-qubit state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tangle {
    pub value: f64,
}

impl Tangle {
    pub fn is_ghz_class(&self) -> bool {
        self.value >= TANGLE_ZERO
    }
}

/// `4 |Det(a)|` where `Det` is Cayley's hyperdeterminant of the 2x2x2 amplitude tensor.
pub fn three_tangle(state: &PureState) -> Result<Tangle> {
    if state.n_qubits() != 3 {
        return Err(Error::domain(format!("three-tangle needs 3 qubits, got {}", state.n_qubits())));
    }
    let a = |i: usize, j: usize, k: usize| state.amplitudes()[(i << 2) | (j << 1) | k];
    let (a000, a001, a010, a011) = (a(0, 0, 0), a(0, 0, 1), a(0, 1, 0), a(0, 1, 1));
    let (a100, a101, a110, a111) = (a(1, 0, 0), a(1, 0, 1), a(1, 1, 0), a(1, 1, 1));

    let d1 = a000 * a000 * a111 * a111 + a001 * a001 * a110 * a110 + a010 * a010 * a101 * a101 + a100 * a100 * a011 * a011;
    let d2 = a000 * a111 * (a011 * a100 + a101 * a010 + a110 * a001)
        + a011 * a100 * (a101 * a010 + a110 * a001)
        + a101 * a010 * a110 * a001;
    let d3 = a000 * a110 * a101 * a011 + a111 * a001 * a010 * a100;
    let det = d1 - d2 * 2.0 + d3 * 4.0;
    Ok(Tangle { value: 4.0 * det.norm() })
}

/// Local filters used to steer symmetric states between SLOCC representatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FilterKind {
    /// Maps `|G3+>` to `|GHZ3>/3` when applied to all three qubits.
    TPlus,
    /// Maps `|G3->` to `|GHZ3>/3` (up to a global sign).
    TMinus,
    /// `diag(1, 1/r)`: reweights Dicke components by powers of `1/r`.
    Retarget(Complex64),
}

pub fn slocc_filter(kind: FilterKind) -> Result<LocalOperator> {
    let h = LocalOperator::hadamard();
    let k = 1.0 / 3f64.sqrt();
    let plus = Complex64::new(k, 1.0);
    let minus = Complex64::new(k, -1.0);
    let half = Complex64::new(0.5, 0.0);
    let inner = match kind {
        FilterKind::TPlus => LocalOperator::combine(
            half * plus,
            &LocalOperator::identity(),
            half * minus,
            &LocalOperator::pauli_z(),
        ),
        FilterKind::TMinus => LocalOperator::combine(
            half * plus,
            &LocalOperator::pauli_x(),
            half * Complex64::i() * minus,
            &LocalOperator::pauli_y(),
        ),
        FilterKind::Retarget(r) => {
            if r.norm() < 1e-300 || !r.re.is_finite() || !r.im.is_finite() {
                return Err(Error::domain("retargeting filter needs r != 0"));
            }
            let inv = r.inv();
            let one = Complex64::new(1.0, 0.0);
            let t = LocalOperator::combine(half * (one + inv), &LocalOperator::identity(), half * (one - inv), &LocalOperator::pauli_z());
            return LocalOperator::filter(t.matrix());
        }
    };
    LocalOperator::filter(h.mul(&inner).mul(&h).matrix())
}

/// Filter parameter `r` with `T_r^{⊗5} |Δ5(from)> ∝ |Δ5(to)>`, verified by
/// applying the filter.
pub fn retarget_r(from: Delta5Params, to: Delta5Params) -> Result<Complex64> {
    let (a, b) = (from.alpha, from.beta());
    let (ta, tb) = (to.alpha, to.beta());
    let tiny = 1e-12;
    if a < tiny || b < tiny || ta < tiny || tb < tiny {
        return Err(Error::NotRetargetable(
            "Dicke-only states (alpha or beta zero) form a separate SLOCC class".into(),
        ));
    }
    let r = Complex64::from_polar(b * ta / (tb * a), from.eps - to.eps);
    let filter = slocc_filter(FilterKind::Retarget(r))?;
    let (out, _) = delta5(a, from.eps)?.apply_uniform(&filter)?;
    let want = delta5(ta, to.eps)?;
    let f = out.fidelity(&want)?;
    if f < 1.0 - 1e-10 {
        return Err(Error::NotRetargetable(format!("filter check failed, fidelity {f}")));
    }
    Ok(r)
}

/// Generic witness `offset·1 - |target><target|`.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessSpec {
    pub target: PureState,
    pub offset: f64,
}

impl WitnessSpec {
    pub fn new(target: PureState, offset: f64) -> Result<Self> {
        if !(offset > 0.0 && offset < 1.0) {
            return Err(Error::domain(format!("witness offset {offset} must lie in (0,1)")));
        }
        Ok(Self { target, offset })
    }
}

/// Anything whose fidelity with a pure target is defined.
pub trait FidelityWith {
    fn fidelity_with(&self, target: &PureState) -> Result<f64>;
}

impl FidelityWith for PureState {
    fn fidelity_with(&self, target: &PureState) -> Result<f64> {
        self.fidelity(target)
    }
}

impl FidelityWith for DensityMatrix {
    fn fidelity_with(&self, target: &PureState) -> Result<f64> {
        self.fidelity(target)
    }
}

/// `Tr[W ρ] = offset - F`.
pub fn witness_value(w: &WitnessSpec, state: &impl FidelityWith) -> Result<f64> {
    Ok(w.offset - state.fidelity_with(&w.target)?)
}

/// Serializable witness evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub target: String,
    pub offset: f64,
    pub value: f64,
    pub entangled: bool,
}

impl WitnessReport {
    pub fn evaluate(label: &str, w: &WitnessSpec, state: &impl FidelityWith) -> Result<Self> {
        let value = witness_value(w, state)?;
        Ok(Self { target: label.to_string(), offset: w.offset, value, entangled: value < 0.0 })
    }
}

/// Three-qubit state left by projecting qubit 4 of `|D4^(2)>` onto `cos θ|H> + sin θ|V>`.
pub fn projected_d4(theta: f64) -> Result<PureState> {
    let p = ProjectorSpec::from_angle(theta, 0.0)?;
    Ok(d(4, 2).project_qubit(4, p)?.0)
}

/// Samples `θ ∈ [0, π/2]` and returns `(θ, τ3)` for the projected `|D4^(2)>`
/// states, optionally after a successful `T+^{⊗3}`.
pub fn tangle_curve(samples: usize, filtered: bool) -> Result<Vec<(f64, f64)>> {
    if samples < 2 {
        return Err(Error::domain("tangle curve needs at least two samples"));
    }
    let t_plus = slocc_filter(FilterKind::TPlus)?;
    (0..samples)
        .map(|k| {
            let theta = FRAC_PI_2 * k as f64 / (samples - 1) as f64;
            let mut psi = projected_d4(theta)?;
            if filtered {
                psi = psi.apply_uniform(&t_plus)?.0;
            }
            Ok((theta, three_tangle(&psi)?.value))
        })
        .collect()
}
