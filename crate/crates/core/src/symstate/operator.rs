use std::f64::consts::{FRAC_1_SQRT_2, TAU};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Single-qubit projection direction `|a,e> = a|H> + b e^{ie}|V>` with `b = sqrt(1 - a^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectorSpec {
    alpha: f64,
    eps: f64,
}

impl ProjectorSpec {
    /// The phase is taken modulo 2π.
    pub fn new(alpha: f64, eps: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) || !eps.is_finite() {
            return Err(Error::domain(format!(
                "projector needs alpha in [0,1] and finite phase, got ({alpha}, {eps})"
            )));
        }
        Ok(Self { alpha, eps: eps.rem_euclid(TAU) })
    }

    /// Projector with `alpha = cos(theta)`, `beta = sin(theta)` for `theta` in `[0, π/2]`.
    pub fn from_angle(theta: f64, eps: f64) -> Result<Self> {
        Self::new(theta.cos().clamp(0.0, 1.0), eps)
    }

    pub fn h() -> Self {
        Self { alpha: 1.0, eps: 0.0 }
    }

    pub fn v() -> Self {
        Self { alpha: 0.0, eps: 0.0 }
    }

    pub fn diagonal(eps: f64) -> Self {
        Self { alpha: FRAC_1_SQRT_2, eps: eps.rem_euclid(TAU) }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        (1.0 - self.alpha * self.alpha).max(0.0).sqrt()
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Components of the ket `[<H|a,e>, <V|a,e>]`.
    pub fn ket(&self) -> [Complex64; 2] {
        [Complex64::new(self.alpha, 0.0), Complex64::from_polar(self.beta(), self.eps)]
    }

    /// Components of the orthogonal ket `b|H> - a e^{ie}|V>`.
    pub fn orthogonal_ket(&self) -> [Complex64; 2] {
        [Complex64::new(self.beta(), 0.0), -Complex64::from_polar(self.alpha, self.eps)]
    }

    /// The projector onto the orthogonal direction.
    pub fn orthogonal(&self) -> Self {
        // b|H> - a e^{ie}|V> = b|H> + a e^{i(e+π)}|V>
        Self { alpha: self.beta(), eps: (self.eps + std::f64::consts::PI).rem_euclid(TAU) }
    }
}

/// Whether a local operator is guaranteed to preserve norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatorKind {
    Unitary,
    Filter,
}

/// A 2x2 operator acting on one qubit, stored row-major in the H/V basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalOperator {
    m: [[Complex64; 2]; 2],
    kind: OperatorKind,
}

impl LocalOperator {
    /// Checks `M^† M = 1` within 1e-12.
    pub fn unitary(m: [[Complex64; 2]; 2]) -> Result<Self> {
        let op = Self { m, kind: OperatorKind::Unitary };
        let p = op.adjoint().mul(&op);
        let dev = (p.m[0][0] - C1).norm() + (p.m[1][1] - C1).norm() + p.m[0][1].norm() + p.m[1][0].norm();
        if dev > 1e-12 {
            return Err(Error::domain(format!("operator is not unitary (deviation {dev:.2e})")));
        }
        Ok(op)
    }

    /// Any invertible 2x2 matrix.
    pub fn filter(m: [[Complex64; 2]; 2]) -> Result<Self> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.norm() < 1e-14 {
            return Err(Error::domain("local filter must be invertible"));
        }
        Ok(Self { m, kind: OperatorKind::Filter })
    }

    pub fn identity() -> Self {
        Self { m: [[C1, C0], [C0, C1]], kind: OperatorKind::Unitary }
    }

    pub fn pauli_x() -> Self {
        Self { m: [[C0, C1], [C1, C0]], kind: OperatorKind::Unitary }
    }

    pub fn pauli_y() -> Self {
        Self { m: [[C0, -I], [I, C0]], kind: OperatorKind::Unitary }
    }

    pub fn pauli_z() -> Self {
        Self { m: [[C1, C0], [C0, -C1]], kind: OperatorKind::Unitary }
    }

    pub fn hadamard() -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self { m: [[h, h], [h, -h]], kind: OperatorKind::Unitary }
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        self.m
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    pub fn adjoint(&self) -> Self {
        let m = self.m;
        Self {
            m: [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]],
            kind: self.kind,
        }
    }

    /// Matrix product `self * rhs`. The result is unitary only if both factors are.
    pub fn mul(&self, rhs: &Self) -> Self {
        let (a, b) = (self.m, rhs.m);
        let mut m = [[C0; 2]; 2];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, x) in row.iter_mut().enumerate() {
                *x = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        let kind = if self.kind == OperatorKind::Unitary && rhs.kind == OperatorKind::Unitary {
            OperatorKind::Unitary
        } else {
            OperatorKind::Filter
        };
        Self { m, kind }
    }

    /// Linear combination `a*self + b*other`, flagged as a filter.
    pub(crate) fn combine(a: Complex64, x: &Self, b: Complex64, y: &Self) -> Self {
        let mut m = [[C0; 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                m[r][c] = a * x.m[r][c] + b * y.m[r][c];
            }
        }
        Self { m, kind: OperatorKind::Filter }
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self::combine(s, self, C0, self)
    }
}

impl fmt::Display for LocalOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.m;
        write!(f, "[[{}, {}], [{}, {}]]", m[0][0], m[0][1], m[1][0], m[1][1])
    }
}
