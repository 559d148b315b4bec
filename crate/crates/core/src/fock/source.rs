use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::expansion::{FockExpansion, ModeId, Polarization, Spatial};
use crate::error::{Error, Result};

/// Source settings shared by the photonic pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceParams {
    /// SPDC squeezing amplitude (the pump phase is fixed to zero).
    pub z_dc: f64,
    /// Weak-coherent-beam amplitude `|z_w|`.
    pub z_w: f64,
    /// Weak-coherent-beam phase relative to the pump.
    pub phi_w: f64,
    /// Jones vector `[H, V]` of the coherent beam.
    pub wcb_polarization: [Complex64; 2],
    pub n_max: usize,
}

impl SourceParams {
    pub fn new(z_dc: f64, z_w: f64, phi_w: f64, wcb_polarization: [Complex64; 2], n_max: usize) -> Result<Self> {
        let p = Self { z_dc, z_w, phi_w, wcb_polarization, n_max };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.z_dc) {
            return Err(Error::domain(format!("|z_dc| = {} must lie in [0,1)", self.z_dc)));
        }
        if !(self.z_w >= 0.0 && self.z_w.is_finite()) {
            return Err(Error::domain(format!("|z_w| = {} must be finite and non-negative", self.z_w)));
        }
        if !self.phi_w.is_finite() {
            return Err(Error::domain("phi_w must be finite"));
        }
        if self.n_max < 1 {
            return Err(Error::domain("n_max must be at least 1"));
        }
        check_polarization(self.wcb_polarization)
    }

    pub fn z_w_complex(&self) -> Complex64 {
        Complex64::from_polar(self.z_w, self.phi_w)
    }
}

fn check_polarization(p: [Complex64; 2]) -> Result<()> {
    let n = p[0].norm_sqr() + p[1].norm_sqr();
    if (n - 1.0).abs() > 1e-12 {
        return Err(Error::domain(format!("polarization vector has squared norm {n}, expected 1")));
    }
    Ok(())
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Two-mode squeezed vacuum in mode `s`: `sqrt(1-|z|^2) Σ (i z)^n |n_H, n_V>`,
/// truncated at `2n <= n_max`.
pub fn spdc_state(z_dc: Complex64, n_max: usize) -> Result<FockExpansion> {
    if z_dc.norm() >= 1.0 || !z_dc.re.is_finite() || !z_dc.im.is_finite() {
        return Err(Error::domain(format!("|z_dc| = {} must be below 1", z_dc.norm())));
    }
    let pre = (1.0 - z_dc.norm_sqr()).sqrt();
    let iz = Complex64::i() * z_dc;
    let modes = vec![ModeId::new(Spatial::S, Polarization::H), ModeId::new(Spatial::S, Polarization::V)];
    let terms = (0..=n_max / 2).map(|n| (vec![n as u8, n as u8], iz.powu(n as u32) * pre));
    FockExpansion::from_terms(modes, terms, n_max)
}

/// Coherent state with amplitude `z_w` in mode `w` and polarization `pol`,
/// truncated at `n_max` photons.
pub fn wcb_state(z_w: Complex64, pol: [Complex64; 2], n_max: usize) -> Result<FockExpansion> {
    check_polarization(pol)?;
    if !z_w.re.is_finite() || !z_w.im.is_finite() {
        return Err(Error::domain("z_w must be finite"));
    }
    let pre = (-z_w.norm_sqr() / 2.0).exp();
    let modes = vec![ModeId::new(Spatial::W, Polarization::H), ModeId::new(Spatial::W, Polarization::V)];
    let mut terms = Vec::new();
    for m in 0..=n_max {
        for k in 0..=m {
            let amp = z_w.powu(m as u32) * pol[0].powu(k as u32) * pol[1].powu((m - k) as u32) * pre
                / (factorial(k) * factorial(m - k)).sqrt();
            terms.push((vec![k as u8, (m - k) as u8], amp));
        }
    }
    FockExpansion::from_terms(modes, terms, n_max)
}

/// Overlaps the coherent beam with the SPDC mode: `w_j† → s_j†` followed by
/// the product of both sources.
pub fn combine(spdc: &FockExpansion, wcb: &FockExpansion) -> Result<FockExpansion> {
    merge(spdc, wcb, 0)
}

/// Same as [`combine`] but with the coherent photons made distinguishable
/// from the SPDC photons, so they share the mode without interfering.
pub fn combine_incoherent(spdc: &FockExpansion, wcb: &FockExpansion) -> Result<FockExpansion> {
    merge(spdc, wcb, 1)
}

fn merge(spdc: &FockExpansion, wcb: &FockExpansion, tag: u8) -> Result<FockExpansion> {
    if spdc.modes().iter().any(|m| wcb.modes().contains(m)) {
        return Err(Error::domain("source expansions must use disjoint modes"));
    }
    let moved = wcb.relabel(|m| {
        if m.spatial == Spatial::W {
            ModeId::tagged(Spatial::S, m.pol, tag)
        } else {
            m
        }
    })?;
    Ok(spdc.product(&moved))
}

/// The three five-photon contributions (SPDC pairs times coherent photons),
/// before the coherent beam is overlapped with the SPDC mode. Common
/// prefactors are kept.
pub fn five_photon_terms(params: &SourceParams) -> Result<FockExpansion> {
    params.validate()?;
    if params.n_max < 5 {
        return Err(Error::domain("five-photon terms need n_max >= 5"));
    }
    let spdc = spdc_state(Complex64::new(params.z_dc, 0.0), params.n_max)?;
    let wcb = wcb_state(params.z_w_complex(), params.wcb_polarization, params.n_max)?;
    Ok(spdc.product(&wcb).sector(5))
}
