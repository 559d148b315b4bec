//! Named states and the parametrized families reached by projecting
//! superpositions of five-qubit Dicke states.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{dicke, DickeSpec, ProjectorSpec, PureState};
use crate::error::{Error, Result};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `|D_n^(m)>`; panics only for arguments outside `0 <= m <= n <= 8`.
pub fn d(n: usize, m: usize) -> PureState {
    dicke(DickeSpec { n, m }).expect("Dicke parameters in range")
}

pub fn ghz3() -> PureState {
    let a = vec![c(FRAC_1_SQRT_2), c(0.0), c(0.0), c(0.0), c(0.0), c(0.0), c(0.0), c(FRAC_1_SQRT_2)];
    PureState::from_normalized(3, a)
}

pub fn ghz3_minus() -> PureState {
    let mut s = ghz3();
    s.amp[7] = -s.amp[7];
    s
}

/// `sqrt(3/4)|D3^(1)> + sqrt(1/4)|D3^(3)>`, the Hadamard image of `|GHZ3->`.
pub fn ghz3_plus() -> PureState {
    super_pair(0.75f64.sqrt(), &d(3, 1), 0.5, &d(3, 3))
}

pub fn w3() -> PureState {
    d(3, 1)
}

pub fn w3_bar() -> PureState {
    d(3, 2)
}

/// `(|D3^(1)> + |D3^(2)>)/sqrt(2)`.
pub fn g3_plus() -> PureState {
    super_pair(FRAC_1_SQRT_2, &d(3, 1), FRAC_1_SQRT_2, &d(3, 2))
}

/// `(|D3^(1)> - |D3^(2)>)/sqrt(2)`.
pub fn g3_minus() -> PureState {
    super_pair(FRAC_1_SQRT_2, &d(3, 1), -FRAC_1_SQRT_2, &d(3, 2))
}

/// `(|HHHH> + |VVVV>)/sqrt(2)`.
pub fn ghz4() -> PureState {
    let mut a = vec![c(0.0); 16];
    a[0] = c(FRAC_1_SQRT_2);
    a[15] = c(FRAC_1_SQRT_2);
    PureState::from_normalized(4, a)
}

pub fn ghz4_minus() -> PureState {
    let mut s = ghz4();
    s.amp[15] = -s.amp[15];
    s
}

/// `(|D4^(1)> + |D4^(3)>)/sqrt(2)`.
pub fn ghz4_plus() -> PureState {
    super_pair(FRAC_1_SQRT_2, &d(4, 1), FRAC_1_SQRT_2, &d(4, 3))
}

pub fn w4() -> PureState {
    d(4, 1)
}

pub fn w4_bar() -> PureState {
    d(4, 3)
}

fn super_pair(a: f64, x: &PureState, b: f64, y: &PureState) -> PureState {
    PureState::superpose(&[(c(a), x), (c(b), y)]).expect("orthogonal Dicke components")
}

/// Weight `alpha` and phase `eps` of `alpha|D5^(2)> + beta e^{i eps}|D5^(3)>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Delta5Params {
    pub alpha: f64,
    pub eps: f64,
}

impl Delta5Params {
    pub fn new(alpha: f64, eps: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) || !eps.is_finite() {
            return Err(Error::domain(format!("Delta5 needs alpha in [0,1], got {alpha}")));
        }
        Ok(Self { alpha, eps: eps.rem_euclid(std::f64::consts::TAU) })
    }

    pub fn beta(&self) -> f64 {
        (1.0 - self.alpha * self.alpha).max(0.0).sqrt()
    }
}

/// `alpha|D5^(2)> + beta e^{i eps}|D5^(3)>`.
pub fn delta5(alpha: f64, eps: f64) -> Result<PureState> {
    let p = Delta5Params::new(alpha, eps)?;
    PureState::superpose(&[(c(p.alpha), &d(5, 2)), (Complex64::from_polar(p.beta(), p.eps), &d(5, 3))])
}

/// Closed form of the four-qubit state obtained by projecting qubit 5 of
/// `delta5(alpha, eps)` onto `proj`.
pub fn delta4_formula(alpha: f64, eps: f64, proj: ProjectorSpec) -> Result<PureState> {
    let p = Delta5Params::new(alpha, eps)?;
    let (a, b) = (p.alpha, p.beta());
    let (pa, pb, pe) = (proj.alpha(), proj.beta(), proj.eps());
    let c1 = Complex64::from_polar(a * pb, -pe);
    let c3 = Complex64::from_polar(pa * b, p.eps);
    let c2 = (c(a * pa) + Complex64::from_polar(b * pb, p.eps - pe)) * 1.5f64.sqrt();
    combine_dicke(4, &[(1, c1), (2, c2), (3, c3)])
}

/// Closed form of the three-qubit state obtained by projecting qubit 5 of
/// `delta5(alpha, eps)` onto `first` and then qubit 4 onto `second`.
pub fn delta3(alpha: f64, eps: f64, first: ProjectorSpec, second: ProjectorSpec) -> Result<PureState> {
    let p = Delta5Params::new(alpha, eps)?;
    let (a, b, e) = (p.alpha, p.beta(), p.eps);
    let (a1, b1, e1) = (first.alpha(), first.beta(), first.eps());
    let (a2, b2, e2) = (second.alpha(), second.beta(), second.eps());
    // Weight of |D4^(2)> in the intermediate four-qubit state, without the sqrt(6/4).
    let mid = c(a * a1) + Complex64::from_polar(b * b1, e - e1);
    let s3 = 3f64.sqrt();
    let c0 = Complex64::from_polar(a * b1 * b2, -(e1 + e2));
    let c3 = Complex64::from_polar(a1 * b * a2, e);
    let c1 = (Complex64::from_polar(a * b1 * a2, -e1) + mid * Complex64::from_polar(b2, -e2)) * s3;
    let c2 = (Complex64::from_polar(a1 * b * b2, e - e2) + mid * a2) * s3;
    combine_dicke(3, &[(0, c0), (1, c1), (2, c2), (3, c3)])
}

fn combine_dicke(n: usize, coeffs: &[(usize, Complex64)]) -> Result<PureState> {
    let states: Vec<_> = coeffs.iter().map(|&(m, _)| d(n, m)).collect();
    let terms: Vec<_> = coeffs.iter().zip(&states).map(|(&(_, c), s)| (c, s)).collect();
    PureState::superpose(&terms).map_err(|e| match e {
        Error::Degenerate(_) => Error::Annihilated { probability: 0.0 },
        other => other,
    })
}

/// Coefficients `(mu, nu)` with `state = mu|GHZ4+> + nu|D4^(2)>`.
pub fn decompose_ghz_dicke(state: &PureState) -> Result<(Complex64, Complex64)> {
    if state.n_qubits() != 4 {
        return Err(Error::domain("GHZ4/D4 decomposition needs a four-qubit state"));
    }
    let (g, dk) = (ghz4_plus(), d(4, 2));
    let mu = g.inner(state)?;
    let nu = dk.inner(state)?;
    let residual = state
        .amplitudes()
        .iter()
        .zip(g.amplitudes().iter().zip(dk.amplitudes()))
        .map(|(s, (x, y))| (s - mu * x - nu * y).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if residual > 1e-9 {
        return Err(Error::NotInFamily { residual });
    }
    Ok((mu, nu))
}
