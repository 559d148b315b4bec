//! Dense few-qubit pure states and the operations used to engineer them:
//! symmetric Dicke states, superpositions, single-qubit projective
//! measurements and local (possibly non-unitary) operators.
//!
//! Qubit `1` is the most significant bit of the amplitude index. Bit value
//! `0` is `|H>`, bit value `1` is `|V>`.

mod density;
mod families;
mod operator;
mod registry;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use density::DensityMatrix;
pub use families::{
    d, decompose_ghz_dicke, delta3, delta4_formula, delta5, g3_minus, g3_plus, ghz3, ghz3_minus, ghz3_plus, ghz4,
    ghz4_minus, ghz4_plus, w3, w3_bar, w4, w4_bar, Delta5Params,
};
pub use operator::{LocalOperator, OperatorKind, ProjectorSpec};
pub use registry::{parse_state, NAMED_STATES};

/// Largest supported register.
pub const MAX_QUBITS: usize = 8;

/// Outcome probabilities below this are treated as annihilation.
pub const ANNIHILATION_THRESHOLD: f64 = 1e-12;

const C0: Complex64 = Complex64::new(0.0, 0.0);

/// Binomial coefficient for the small arguments used here.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Parameters of a symmetric Dicke state `|D_N^(m)>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DickeSpec {
    pub n: usize,
    pub m: usize,
}

/// Normalized pure state of `n` polarization qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n: usize,
    amp: Vec<Complex64>,
}

impl PureState {
    /// Builds a state from raw amplitudes and normalizes it.
    pub fn from_amplitudes(n: usize, amp: Vec<Complex64>) -> Result<Self> {
        check_qubits(n)?;
        if amp.len() != 1 << n {
            return Err(Error::domain(format!(
                "{n} qubits need {} amplitudes, got {}",
                1usize << n,
                amp.len()
            )));
        }
        if amp.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::domain("amplitudes must be finite"));
        }
        let norm = amp.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < ANNIHILATION_THRESHOLD {
            return Err(Error::Degenerate("zero-norm amplitude vector".into()));
        }
        Ok(Self { n, amp: amp.into_iter().map(|a| a / norm).collect() })
    }

    /// Product state from a string of `H`/`V` characters, e.g. `"HHV"`.
    pub fn product(pattern: &str) -> Result<Self> {
        let n = pattern.chars().count();
        check_qubits(n)?;
        let mut idx = 0usize;
        for ch in pattern.chars() {
            idx <<= 1;
            match ch {
                'H' | 'h' | '0' => {}
                'V' | 'v' | '1' => idx |= 1,
                other => return Err(Error::domain(format!("unknown polarization '{other}'"))),
            }
        }
        Ok(Self::basis(n, idx))
    }

    pub(crate) fn basis(n: usize, idx: usize) -> Self {
        let mut amp = vec![C0; 1 << n];
        amp[idx] = Complex64::new(1.0, 0.0);
        Self { n, amp }
    }

    /// Internal constructor for vectors that are normalized by construction.
    pub(crate) fn from_normalized(n: usize, amp: Vec<Complex64>) -> Self {
        debug_assert_eq!(amp.len(), 1 << n);
        Self { n, amp }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amp
    }

    /// Amplitude of the basis string, e.g. `amplitude("HVV")`.
    pub fn amplitude(&self, pattern: &str) -> Result<Complex64> {
        let basis = Self::product(pattern)?;
        if basis.n != self.n {
            return Err(Error::domain("pattern length differs from qubit count"));
        }
        let idx = basis.amp.iter().position(|a| a.re == 1.0).unwrap_or(0);
        Ok(self.amp[idx])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::domain(format!(
                "inner product of {}-qubit and {}-qubit states",
                self.n, other.n
            )));
        }
        Ok(self.amp.iter().zip(&other.amp).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr().min(1.0))
    }

    /// Representative with the first nonzero amplitude real and positive.
    pub fn canonical(&self) -> Self {
        let lead = self.amp.iter().find(|a| a.norm() > 1e-12).copied().unwrap_or(Complex64::new(1.0, 0.0));
        let phase = lead.conj() / lead.norm();
        Self { n: self.n, amp: self.amp.iter().map(|a| a * phase).collect() }
    }

    /// Phase-insensitive equality: `|<a|b>|^2 >= 1 - tol`.
    pub fn approx_eq_up_to_phase(&self, other: &Self, tol: f64) -> bool {
        self.n == other.n && self.fidelity(other).map(|f| f >= 1.0 - tol).unwrap_or(false)
    }

    /// Largest amplitude-wise difference (phase-sensitive).
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.amp.iter().zip(&other.amp).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Normalized linear combination `Σ c_k |ψ_k>`.
    pub fn superpose(terms: &[(Complex64, &PureState)]) -> Result<Self> {
        let first = terms.first().ok_or_else(|| Error::domain("superposition of zero terms"))?;
        let n = first.1.n;
        let mut amp = vec![C0; 1 << n];
        for (c, psi) in terms {
            if psi.n != n {
                return Err(Error::domain("superposed states must have the same qubit count"));
            }
            for (acc, a) in amp.iter_mut().zip(&psi.amp) {
                *acc += c * a;
            }
        }
        Self::from_amplitudes(n, amp)
    }

    /// Projects qubit `qubit` (1-based) onto `proj` and returns the normalized
    /// state of the remaining qubits together with the outcome probability.
    pub fn project_qubit(&self, qubit: usize, proj: ProjectorSpec) -> Result<(PureState, f64)> {
        if self.n < 2 {
            return Err(Error::domain("projection needs at least two qubits"));
        }
        if qubit == 0 || qubit > self.n {
            return Err(Error::domain(format!("qubit {qubit} outside 1..={}", self.n)));
        }
        let bra = proj.ket().map(|c| c.conj());
        let shift = self.n - qubit;
        let low_mask = (1usize << shift) - 1;
        let mut out = vec![C0; 1 << (self.n - 1)];
        for (idx, a) in self.amp.iter().enumerate() {
            let bit = (idx >> shift) & 1;
            let rest = ((idx >> (shift + 1)) << shift) | (idx & low_mask);
            out[rest] += bra[bit] * a;
        }
        let p: f64 = out.iter().map(|a| a.norm_sqr()).sum();
        if p < ANNIHILATION_THRESHOLD {
            return Err(Error::Annihilated { probability: p });
        }
        let s = p.sqrt();
        Ok((Self::from_normalized(self.n - 1, out.into_iter().map(|a| a / s).collect()), p))
    }

    /// Applies `ops[k]` to qubit `k + 1`; returns the renormalized state and
    /// the squared norm before renormalization.
    pub fn apply_local(&self, ops: &[LocalOperator]) -> Result<(PureState, f64)> {
        if ops.len() != self.n {
            return Err(Error::domain(format!("{} operators for {} qubits", ops.len(), self.n)));
        }
        let mut amp = self.amp.clone();
        for (k, op) in ops.iter().enumerate() {
            let shift = self.n - 1 - k;
            let m = op.matrix();
            for idx in 0..amp.len() {
                if (idx >> shift) & 1 == 0 {
                    let j = idx | (1 << shift);
                    let (a0, a1) = (amp[idx], amp[j]);
                    amp[idx] = m[0][0] * a0 + m[0][1] * a1;
                    amp[j] = m[1][0] * a0 + m[1][1] * a1;
                }
            }
        }
        let p: f64 = amp.iter().map(|a| a.norm_sqr()).sum();
        if p < ANNIHILATION_THRESHOLD {
            return Err(Error::Annihilated { probability: p });
        }
        let s = p.sqrt();
        Ok((Self::from_normalized(self.n, amp.into_iter().map(|a| a / s).collect()), p))
    }

    /// Unnormalized `(⊗ops)|ψ>`; used where the raw amplitudes matter.
    pub fn apply_local_raw(&self, ops: &[LocalOperator]) -> Result<Vec<Complex64>> {
        let (psi, p) = self.apply_local(ops)?;
        let s = p.sqrt();
        Ok(psi.amp.into_iter().map(|a| a * s).collect())
    }

    /// Same operator on every qubit.
    pub fn apply_uniform(&self, op: &LocalOperator) -> Result<(PureState, f64)> {
        self.apply_local(&vec![*op; self.n])
    }

    /// Reorders qubits so that new qubit `k` is old qubit `perm[k]` (both 0-based).
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.n];
        if perm.len() != self.n || perm.iter().any(|&p| p >= self.n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::domain("invalid qubit permutation"));
        }
        let mut out = vec![C0; self.amp.len()];
        for (idx, a) in self.amp.iter().enumerate() {
            let mut new = 0usize;
            for (k, &p) in perm.iter().enumerate() {
                let bit = (idx >> (self.n - 1 - p)) & 1;
                new |= bit << (self.n - 1 - k);
            }
            out[new] = *a;
        }
        Ok(Self::from_normalized(self.n, out))
    }

    /// Tensor product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        check_qubits(self.n + other.n)?;
        let amp = self.amp.iter().flat_map(|a| other.amp.iter().map(move |b| a * b)).collect();
        Ok(Self::from_normalized(self.n + other.n, amp))
    }
}

/// Symmetric Dicke state `|D_N^(m)>`: equal-weight superposition of all
/// strings with `m` vertical polarizations.
pub fn dicke(spec: DickeSpec) -> Result<PureState> {
    let DickeSpec { n, m } = spec;
    check_qubits(n)?;
    if m > n {
        return Err(Error::domain(format!("Dicke excitation {m} exceeds qubit count {n}")));
    }
    let a = Complex64::new(1.0 / (binomial(n, m) as f64).sqrt(), 0.0);
    let amp = (0..1usize << n).map(|idx| if idx.count_ones() as usize == m { a } else { C0 }).collect();
    Ok(PureState::from_normalized(n, amp))
}

/// `|<a|b>|^2`.
pub fn fidelity_pure(a: &PureState, b: &PureState) -> Result<f64> {
    a.fidelity(b)
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::domain(format!("qubit count {n} outside 1..={MAX_QUBITS}")));
    }
    Ok(())
}

impl fmt::Display for PureState {
    /// Lists nonzero amplitudes in canonical phase, e.g. `0.57735|HHV> + ...`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.canonical();
        let mut first = true;
        for (idx, a) in c.amp.iter().enumerate() {
            if a.norm() < 1e-10 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let label: String = (0..self.n)
                .map(|k| if (idx >> (self.n - 1 - k)) & 1 == 1 { 'V' } else { 'H' })
                .collect();
            if a.im.abs() < 1e-12 {
                write!(f, "({})|{label}>", crate::fmt_sig(a.re, 6))?;
            } else {
                let sign = if a.im < 0.0 { '-' } else { '+' };
                write!(f, "({}{sign}{}i)|{label}>", crate::fmt_sig(a.re, 6), crate::fmt_sig(a.im.abs(), 6))?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct PureStateRepr {
    n: usize,
    amp: Vec<[f64; 2]>,
}

impl Serialize for PureState {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PureStateRepr { n: self.n, amp: self.amp.iter().map(|a| [a.re, a.im]).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PureState {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = PureStateRepr::deserialize(d)?;
        let amp = r.amp.into_iter().map(|[re, im]| Complex64::new(re, im)).collect();
        PureState::from_amplitudes(r.n, amp).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn w3_is_d3_1() {
        let w = dicke(DickeSpec { n: 3, m: 1 }).unwrap();
        let s = 1.0 / 3f64.sqrt();
        for (p, want) in [("HHV", s), ("HVH", s), ("VHH", s), ("HHH", 0.0), ("VVH", 0.0)] {
            assert!((w.amplitude(p).unwrap() - c(want)).norm() < 1e-15, "{p}");
        }
    }

    #[test]
    fn d4_2_has_six_terms() {
        let d = dicke(DickeSpec { n: 4, m: 2 }).unwrap();
        let nz: Vec<_> = d.amplitudes().iter().filter(|a| a.norm() > 0.0).collect();
        assert_eq!(nz.len(), 6);
        assert!(nz.iter().all(|a| (**a - c(1.0 / 6f64.sqrt())).norm() < 1e-15));
    }

    #[test]
    fn dicke_zero_excitations_is_product() {
        let d = dicke(DickeSpec { n: 2, m: 0 }).unwrap();
        assert_eq!(d, PureState::product("HH").unwrap());
    }

    #[test]
    fn dicke_rejects_bad_excitation() {
        assert!(matches!(dicke(DickeSpec { n: 3, m: 4 }), Err(Error::Domain(_))));
        assert!(matches!(dicke(DickeSpec { n: 9, m: 1 }), Err(Error::Domain(_))));
    }

    #[test]
    fn superpose_ghz3_minus() {
        let hhh = PureState::product("HHH").unwrap();
        let vvv = PureState::product("VVV").unwrap();
        let s = PureState::superpose(&[(c(FRAC_1_SQRT_2), &hhh), (c(-FRAC_1_SQRT_2), &vvv)]).unwrap();
        assert!(s.max_abs_diff(&ghz3_minus()) < 1e-15);
    }

    #[test]
    fn superpose_errors() {
        let a = PureState::product("HH").unwrap();
        let b = PureState::product("HHH").unwrap();
        assert!(matches!(PureState::superpose(&[(c(1.0), &a), (c(1.0), &b)]), Err(Error::Domain(_))));
        assert!(matches!(PureState::superpose(&[(c(1.0), &a), (c(-1.0), &a)]), Err(Error::Degenerate(_))));
        let one = PureState::superpose(&[(c(1.0), &a)]).unwrap();
        assert_eq!(one, a);
    }

    #[test]
    fn project_d4_2_onto_v_gives_w3() {
        let d = dicke(DickeSpec { n: 4, m: 2 }).unwrap();
        let (w, p) = d.project_qubit(4, ProjectorSpec::v()).unwrap();
        assert!(w.approx_eq_up_to_phase(&w3(), 1e-14));
        assert!((p - 0.5).abs() < 1e-14);
    }

    #[test]
    fn project_d4_2_onto_plus_gives_g3_plus() {
        let d = dicke(DickeSpec { n: 4, m: 2 }).unwrap();
        let (g, p) = d.project_qubit(4, ProjectorSpec::diagonal(0.0)).unwrap();
        assert!(g.approx_eq_up_to_phase(&g3_plus(), 1e-14));
        assert!((p - 0.5).abs() < 1e-14);
    }

    #[test]
    fn project_product_state() {
        let hh = PureState::product("HH").unwrap();
        let (h, p) = hh.project_qubit(2, ProjectorSpec::h()).unwrap();
        assert_eq!(h, PureState::product("H").unwrap());
        assert!((p - 1.0).abs() < 1e-15);
        assert!(matches!(hh.project_qubit(2, ProjectorSpec::v()), Err(Error::Annihilated { .. })));
        assert!(matches!(hh.project_qubit(3, ProjectorSpec::v()), Err(Error::Domain(_))));
        assert!(PureState::product("H").unwrap().project_qubit(1, ProjectorSpec::h()).is_err());
    }

    #[test]
    fn project_middle_qubit_keeps_order() {
        let s = PureState::product("HVV").unwrap();
        let (r, _) = s.project_qubit(2, ProjectorSpec::v()).unwrap();
        assert_eq!(r, PureState::product("HV").unwrap());
    }

    #[test]
    fn hadamard_maps_ghz4_minus_to_ghz4_plus() {
        let (s, p) = ghz4_minus().apply_uniform(&LocalOperator::hadamard()).unwrap();
        assert!(s.max_abs_diff(&ghz4_plus()) < 1e-14);
        assert!((p - 1.0).abs() < 1e-14);
    }

    #[test]
    fn apply_local_checks_length() {
        let s = ghz3();
        assert!(s.apply_local(&[LocalOperator::identity()]).is_err());
        let (t, p) = s.apply_local(&[LocalOperator::identity(); 3]).unwrap();
        assert!(t.max_abs_diff(&s) < 1e-15);
        assert!((p - 1.0).abs() < 1e-14);
    }

    #[test]
    fn canonical_form() {
        let s = PureState::from_amplitudes(1, vec![Complex64::new(0.0, -1.0), Complex64::new(1.0, 0.0)]).unwrap();
        let c = s.canonical();
        assert!(c.amplitudes()[0].im.abs() < 1e-15 && c.amplitudes()[0].re > 0.0);
        assert!(c.approx_eq_up_to_phase(&s, 1e-15));
    }

    #[test]
    fn json_round_trip_and_validation() {
        let s = g3_minus();
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.starts_with("{\"n\":3,\"amp\":[["));
        let back: PureState = serde_json::from_str(&text).unwrap();
        assert!(back.max_abs_diff(&s) < 1e-15);
        assert!(serde_json::from_str::<PureState>(r#"{"n":2,"amp":[[1,0]]}"#).is_err());
        assert!(serde_json::from_str::<PureState>(r#"{"n":1,"amp":[[0,0],[0,0]]}"#).is_err());
    }

    #[test]
    fn permute_reorders_bits() {
        let s = PureState::product("HVV").unwrap();
        assert_eq!(s.permute(&[1, 0, 2]).unwrap(), PureState::product("VHV").unwrap());
        assert!(s.permute(&[0, 0, 1]).is_err());
    }

    #[test]
    fn display_lists_terms() {
        let text = PureState::product("HV").unwrap().to_string();
        assert_eq!(text, "(1.00000)|HV>");
    }
}
