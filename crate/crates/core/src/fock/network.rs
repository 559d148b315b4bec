use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::expansion::{FockExpansion, ModeId, Spatial};
use crate::error::{Error, Result};

/// Coupling and detection efficiencies; they act as one transmission `η = η_c η_d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossModel {
    pub eta_c: f64,
    pub eta_d: f64,
}

impl LossModel {
    pub const NONE: LossModel = LossModel { eta_c: 1.0, eta_d: 1.0 };

    pub fn new(eta_c: f64, eta_d: f64) -> Result<Self> {
        let m = Self { eta_c, eta_d };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, x) in [("eta_c", self.eta_c), ("eta_d", self.eta_d)] {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::domain(format!("{name} = {x} must lie in [0,1]")));
            }
        }
        Ok(())
    }

    pub fn eta(&self) -> f64 {
        self.eta_c * self.eta_d
    }
}

/// Output ports `a, b, ...` with equal weights `1/sqrt(k)`.
pub fn symmetric_ports(k: usize) -> (Vec<Spatial>, Vec<f64>) {
    let w = 1.0 / (k as f64).sqrt();
    ((0..k as u8).map(Spatial::Out).collect(), vec![w; k])
}

/// Linear multiport fed by mode `s`: `s_j† → Σ_k w_k out_{k,j}†` for each
/// polarization (and distinguishability tag).
pub fn distribute(state: &FockExpansion, outputs: &[Spatial], weights: &[f64]) -> Result<FockExpansion> {
    if outputs.is_empty() || outputs.len() != weights.len() {
        return Err(Error::domain("distribution needs one weight per output mode"));
    }
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::domain("distribution weights must be finite"));
    }
    let sum: f64 = weights.iter().map(|w| w * w).sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::domain(format!("distribution weights have squared sum {sum}, expected 1")));
    }
    for (i, o) in outputs.iter().enumerate() {
        if !matches!(o, Spatial::Out(_)) || outputs[..i].contains(o) {
            return Err(Error::domain(format!("output mode '{o}' is invalid or repeated")));
        }
        if state.modes().iter().any(|m| m.spatial == *o) {
            return Err(Error::domain(format!("output mode '{o}' is already occupied by the input")));
        }
    }
    Ok(state.substitute(|m| {
        (m.spatial == Spatial::S).then(|| {
            outputs
                .iter()
                .zip(weights)
                .map(|(&o, &w)| (ModeId::tagged(o, m.pol, m.tag), Complex64::new(w, 0.0)))
                .collect()
        })
    }))
}

/// Beam splitter with transmission `sqrt(η)` on every detectable mode; the
/// reflected part goes to a fresh loss mode.
pub fn apply_loss(state: &FockExpansion, loss: LossModel) -> Result<FockExpansion> {
    loss.validate()?;
    let eta = loss.eta();
    if eta == 1.0 {
        return Ok(state.clone());
    }
    let next_loss = state
        .modes()
        .iter()
        .filter_map(|m| match m.spatial {
            Spatial::Loss(k) => Some(k + 1),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    let detectable: Vec<ModeId> = state.modes().iter().copied().filter(|m| m.spatial.is_detectable()).collect();
    let t = Complex64::new(eta.sqrt(), 0.0);
    let r = Complex64::new((1.0 - eta).sqrt(), 0.0);
    Ok(state.substitute(|m| {
        let i = detectable.iter().position(|d| d == m)?;
        let lost = ModeId::tagged(Spatial::Loss(next_loss + i as u16), m.pol, m.tag);
        Some(vec![(*m, t), (lost, r)])
    }))
}
