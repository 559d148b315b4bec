use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::expansion::{FockExpansion, ModeId, Polarization, Spatial};
use crate::error::{Error, Result};
use crate::symstate::{DensityMatrix, ProjectorSpec};

/// Role of an analyzed spatial mode in a coincidence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Analysis {
    /// Photon defines a logical qubit; outcome 0 is the basis direction, 1 its orthogonal.
    Qubit(ProjectorSpec),
    /// Photon must be found along the given direction; the mode is not kept as a qubit.
    Herald(ProjectorSpec),
}

impl Analysis {
    fn basis(&self) -> ProjectorSpec {
        match self {
            Analysis::Qubit(p) | Analysis::Herald(p) => *p,
        }
    }
}

/// Required outcome per analyzed spatial mode, in qubit order.
#[derive(Debug, Clone, PartialEq)]
pub struct CoincidencePattern {
    entries: Vec<(Spatial, Analysis)>,
}

impl CoincidencePattern {
    pub fn new(entries: Vec<(Spatial, Analysis)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::domain("coincidence pattern is empty"));
        }
        for (i, (s, _)) in entries.iter().enumerate() {
            if !s.is_detectable() {
                return Err(Error::domain(format!("mode '{s}' cannot be detected")));
            }
            if entries[..i].iter().any(|(t, _)| t == s) {
                return Err(Error::domain(format!("mode '{s}' appears twice in the pattern")));
            }
        }
        Ok(Self { entries })
    }

    /// H/V qubits on `qubits`, followed by heralds.
    pub fn qubits_then_heralds(qubits: &[Spatial], heralds: &[(Spatial, ProjectorSpec)]) -> Result<Self> {
        let mut e: Vec<(Spatial, Analysis)> = qubits.iter().map(|&s| (s, Analysis::Qubit(ProjectorSpec::h()))).collect();
        e.extend(heralds.iter().map(|&(s, p)| (s, Analysis::Herald(p))));
        Self::new(e)
    }

    pub fn entries(&self) -> &[(Spatial, Analysis)] {
        &self.entries
    }

    pub fn n_qubits(&self) -> usize {
        self.entries.iter().filter(|(_, a)| matches!(a, Analysis::Qubit(_))).count()
    }
}

/// Photon-counting behaviour of the detectors behind each analyzer output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetectorModel {
    /// Click for one or more photons.
    Threshold,
    /// Exactly one photon per analyzed mode is accepted.
    #[default]
    NumberResolving,
}

/// Conditional state of the qubit modes and the probability of the coincidence.
#[derive(Debug, Clone, PartialEq)]
pub struct Postselected {
    pub rho: DensityMatrix,
    /// Event probability relative to the squared norm of the input expansion.
    pub probability: f64,
    /// Unnormalized squared weight of the accepted terms.
    pub weight: f64,
}

/// Rewrites the polarization modes of each analyzed spatial mode in its
/// analysis basis: slot `H` then holds the basis direction, slot `V` the
/// orthogonal one.
fn rotate_into_bases(state: &FockExpansion, pattern: &CoincidencePattern) -> FockExpansion {
    state.substitute(|m| {
        let (_, a) = pattern.entries.iter().find(|(s, _)| *s == m.spatial)?;
        let p = a.basis();
        if p == ProjectorSpec::h() {
            return None;
        }
        // |j> = <par|j> |par> + <perp|j> |perp>
        let par = p.ket();
        let perp = p.orthogonal_ket();
        let j = m.pol.index();
        Some(vec![
            (ModeId::tagged(m.spatial, Polarization::H, m.tag), par[j].conj()),
            (ModeId::tagged(m.spatial, Polarization::V, m.tag), perp[j].conj()),
        ])
    })
}

/// Conditions `state` on the coincidence `pattern` and returns the state of
/// the qubit modes.
///
/// Loss modes and unanalyzed modes are traced out. Photon numbers at the qubit
/// detectors are recorded per distinguishability tag, so events that differ
/// only in the number of photons behind a click add incoherently.
pub fn postselect(state: &FockExpansion, pattern: &CoincidencePattern, detector: DetectorModel) -> Result<Postselected> {
    for (s, _) in &pattern.entries {
        if !state.modes().iter().any(|m| m.spatial == *s) {
            return Err(Error::domain(format!("pattern mode '{s}' is not present in the state")));
        }
    }
    let total = state.norm_sqr();
    if total <= 0.0 {
        return Err(Error::EmptyPostselection);
    }
    let rotated = rotate_into_bases(state, pattern);
    let modes = rotated.modes();
    let slots: Vec<[Vec<usize>; 2]> = pattern
        .entries
        .iter()
        .map(|(s, _)| {
            let mut slot = [Vec::new(), Vec::new()];
            for (i, m) in modes.iter().enumerate() {
                if m.spatial == *s {
                    slot[m.pol.index()].push(i);
                }
            }
            slot
        })
        .collect();
    let n_tags = modes.iter().map(|m| m.tag as usize + 1).max().unwrap_or(1);

    let nq = pattern.n_qubits();
    let dim = 1usize << nq;
    let mut branches: BTreeMap<Vec<u8>, Vec<Complex64>> = BTreeMap::new();
    'terms: for (occ, amp) in rotated.terms() {
        let mut key = occ.to_vec();
        let mut index = 0usize;
        for ((_, analysis), slot) in pattern.entries.iter().zip(&slots) {
            let n0: usize = slot[0].iter().map(|&i| occ[i] as usize).sum();
            let n1: usize = slot[1].iter().map(|&i| occ[i] as usize).sum();
            let ok = match (analysis, detector) {
                (Analysis::Herald(_), DetectorModel::Threshold) => n0 >= 1 && n1 == 0,
                (Analysis::Herald(_), DetectorModel::NumberResolving) => n0 == 1 && n1 == 0,
                (Analysis::Qubit(_), DetectorModel::Threshold) => (n0 >= 1) != (n1 >= 1),
                (Analysis::Qubit(_), DetectorModel::NumberResolving) => n0 + n1 == 1,
            };
            if !ok {
                continue 'terms;
            }
            if let Analysis::Qubit(_) = analysis {
                index = (index << 1) | usize::from(n1 > 0);
                let mut per_tag = vec![0u8; n_tags];
                for &i in slot[0].iter().chain(&slot[1]) {
                    per_tag[modes[i].tag as usize] += occ[i];
                    key[i] = 0;
                }
                key.extend(per_tag);
            }
        }
        branches.entry(key).or_insert_with(|| vec![Complex64::default(); dim])[index] += amp;
    }

    let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
    for v in branches.values() {
        let col = DMatrix::from_column_slice(dim, 1, v);
        rho += &col * col.adjoint();
    }
    let weight = rho.trace().re;
    if weight <= 1e-300 {
        return Err(Error::EmptyPostselection);
    }
    Ok(Postselected { rho: DensityMatrix::from_matrix(nq, rho)?, probability: weight / total, weight })
}

/// Unnormalized weight of the event in which every listed mode fires along
/// its direction and not along the orthogonal one.
pub fn click_weight(state: &FockExpansion, clicks: &[(Spatial, ProjectorSpec)], detector: DetectorModel) -> Result<f64> {
    let pattern = CoincidencePattern::new(clicks.iter().map(|&(s, p)| (s, Analysis::Herald(p))).collect())?;
    match postselect(state, &pattern, detector) {
        Ok(p) => Ok(p.weight),
        Err(Error::EmptyPostselection) => Ok(0.0),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::network::{distribute, symmetric_ports};
    use crate::fock::source::spdc_state;
    use crate::symstate::{d, PureState};

    fn ideal_pairs(order: usize) -> FockExpansion {
        spdc_state(Complex64::new(0.2, 0.0), 2 * order).unwrap().sector(2 * order)
    }

    #[test]
    fn single_pair_two_modes_is_bell_like() {
        let (ports, w) = symmetric_ports(2);
        let out = distribute(&ideal_pairs(1), &ports, &w).unwrap();
        let pat = CoincidencePattern::qubits_then_heralds(&ports, &[]).unwrap();
        let ps = postselect(&out, &pat, DetectorModel::Threshold).unwrap();
        assert!((ps.probability - 0.5).abs() < 1e-14);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let psi = PureState::from_amplitudes(2, vec![0.0.into(), r.into(), r.into(), 0.0.into()]).unwrap();
        assert!((ps.rho.fidelity(&psi).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn two_pairs_four_modes_give_dicke() {
        let (ports, w) = symmetric_ports(4);
        let out = distribute(&ideal_pairs(2), &ports, &w).unwrap();
        let pat = CoincidencePattern::qubits_then_heralds(&ports, &[]).unwrap();
        for det in [DetectorModel::Threshold, DetectorModel::NumberResolving] {
            let ps = postselect(&out, &pat, det).unwrap();
            assert!((ps.rho.fidelity(&d(4, 2)).unwrap() - 1.0).abs() < 1e-12);
            assert!((ps.rho.purity() - 1.0).abs() < 1e-12);
            // 6 of the 4^4 arrangements, weighted by |<2,2|...>|^2: 6 * 4 / 256
            assert!((ps.probability - 6.0 * 4.0 / 256.0).abs() < 1e-14);
        }
    }

    #[test]
    fn herald_projects_in_rotated_basis() {
        // one H photon, heralded along diagonal: probability 1/2
        let sh = ModeId::new(Spatial::Out(0), Polarization::H);
        let s = FockExpansion::from_terms(vec![sh], [(vec![1], Complex64::new(1.0, 0.0))], 2).unwrap();
        let p = click_weight(&s, &[(Spatial::Out(0), ProjectorSpec::diagonal(0.3))], DetectorModel::Threshold).unwrap();
        assert!((p - 0.5).abs() < 1e-14);
        let p = click_weight(&s, &[(Spatial::Out(0), ProjectorSpec::v())], DetectorModel::Threshold).unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn threshold_accepts_bunched_photons() {
        let sh = ModeId::new(Spatial::Out(0), Polarization::H);
        let s = FockExpansion::from_terms(vec![sh], [(vec![2], Complex64::new(1.0, 0.0))], 2).unwrap();
        let pat = CoincidencePattern::qubits_then_heralds(&[Spatial::Out(0)], &[]).unwrap();
        assert!(postselect(&s, &pat, DetectorModel::Threshold).is_ok());
        assert_eq!(postselect(&s, &pat, DetectorModel::NumberResolving), Err(Error::EmptyPostselection));
    }

    #[test]
    fn pattern_validation() {
        let s = ideal_pairs(1);
        assert!(CoincidencePattern::new(vec![]).is_err());
        assert!(CoincidencePattern::qubits_then_heralds(&[Spatial::Out(0), Spatial::Out(0)], &[]).is_err());
        assert!(CoincidencePattern::qubits_then_heralds(&[Spatial::Loss(0)], &[]).is_err());
        let pat = CoincidencePattern::qubits_then_heralds(&[Spatial::Out(3)], &[]).unwrap();
        assert!(matches!(postselect(&s, &pat, DetectorModel::Threshold), Err(Error::Domain(_))));
    }
}
