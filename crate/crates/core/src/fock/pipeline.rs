use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::detect::{click_weight, postselect, CoincidencePattern, DetectorModel, Postselected};
use super::expansion::FockExpansion;
use super::network::{apply_loss, distribute, symmetric_ports, LossModel};
use super::source::{combine, combine_incoherent, spdc_state, wcb_state, SourceParams};
use crate::error::{Error, Result};
use crate::symstate::{ghz4_plus, w4, DensityMatrix, ProjectorSpec, PureState};

/// Five-photon-only fidelity of the heralded W4 state.
pub fn f_w4_analytic(z_dc: f64, z_w: f64) -> Result<f64> {
    if !(z_dc > 0.0 && z_dc.is_finite()) || !z_w.is_finite() {
        return Err(Error::domain("F_W4 needs |z_dc| > 0"));
    }
    Ok(1.0 / (1.0 + z_w.powi(4) / (9.0 * z_dc * z_dc)))
}

/// Five-photon-only fidelity of the heralded GHZ4+ state.
pub fn f_ghz4_analytic(z_dc: f64, z_w: f64, phi_w: f64) -> Result<f64> {
    if !(z_dc > 0.0 && z_dc.is_finite()) || !(z_w > 0.0 && z_w.is_finite()) || !phi_w.is_finite() {
        return Err(Error::domain("F_GHZ4+ needs |z_dc| > 0 and |z_w| > 0"));
    }
    let denom = 2.0 + 36.0 * z_dc * z_dc / z_w.powi(4) - 12.0 * (z_dc / (z_w * z_w)) * (2.0 * phi_w).cos();
    Ok(1.0 - 1.0 / denom)
}

/// Four-qubit states prepared by heralding on the fifth mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FockTarget {
    W4,
    #[serde(rename = "GHZ4+")]
    Ghz4Plus,
}

impl FockTarget {
    pub fn state(self) -> PureState {
        match self {
            FockTarget::W4 => w4(),
            FockTarget::Ghz4Plus => ghz4_plus(),
        }
    }

    /// Jones vector of the coherent beam.
    pub fn wcb_polarization(self) -> [Complex64; 2] {
        match self {
            FockTarget::W4 => [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            FockTarget::Ghz4Plus => [Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(0.0, -FRAC_1_SQRT_2)],
        }
    }

    /// Analysis direction of the herald mode `e`.
    pub fn herald(self) -> ProjectorSpec {
        match self {
            FockTarget::W4 => ProjectorSpec::v(),
            FockTarget::Ghz4Plus => ProjectorSpec::diagonal(FRAC_PI_2),
        }
    }

    pub fn analytic(self, z_dc: f64, z_w: f64, phi_w: f64) -> Result<f64> {
        match self {
            FockTarget::W4 => f_w4_analytic(z_dc, z_w),
            FockTarget::Ghz4Plus => f_ghz4_analytic(z_dc, z_w, phi_w),
        }
    }

    pub fn parse(label: &str) -> Result<Self> {
        match label {
            "W4" | "w4" => Ok(FockTarget::W4),
            "GHZ4+" | "ghz4+" | "GHZ4" | "ghz4" => Ok(FockTarget::Ghz4Plus),
            other => Err(Error::domain(format!("unknown target '{other}' (expected W4 or GHZ4+)"))),
        }
    }
}

/// Pipeline settings other than the source amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub loss: LossModel,
    /// Keep all photon numbers up to `n_max` instead of only the five-photon sector.
    pub include_six: bool,
    pub detector: DetectorModel,
    pub n_max: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self { loss: LossModel::NONE, include_six: false, detector: DetectorModel::NumberResolving, n_max: 6 }
    }
}

impl PipelineConfig {
    /// Lossy pipeline with six-photon events, as used for the realistic surfaces.
    pub fn lossy(eta_c: f64, eta_d: f64) -> Result<Self> {
        Ok(Self { loss: LossModel::new(eta_c, eta_d)?, include_six: true, ..Self::default() })
    }
}

/// Sources, overlap and loss at the common mode `s`.
///
/// The loss acts before the symmetric multiport; with equal transmission on
/// every output this equals a loss stage behind each output.
pub fn source_state(params: &SourceParams, cfg: &PipelineConfig) -> Result<FockExpansion> {
    params.validate()?;
    let spdc = spdc_state(Complex64::new(params.z_dc, 0.0), params.n_max)?;
    let wcb = wcb_state(params.z_w_complex(), params.wcb_polarization, params.n_max)?;
    let mut s = combine(&spdc, &wcb)?;
    if !cfg.include_six {
        s = s.sector(5);
    }
    apply_loss(&s, cfg.loss)
}

/// Full chain for `target`: sources, overlap, loss, five outputs `a..e`, and
/// the coincidence with H/V qubits on `a..d` and the target's herald on `e`.
pub fn conditional_state(target: FockTarget, z_dc: f64, z_w: f64, phi_w: f64, cfg: &PipelineConfig) -> Result<Postselected> {
    let params = SourceParams::new(z_dc, z_w, phi_w, target.wcb_polarization(), cfg.n_max)?;
    let s = source_state(&params, cfg)?;
    let (ports, weights) = symmetric_ports(5);
    let out = distribute(&s, &ports, &weights)?;
    let pattern = CoincidencePattern::qubits_then_heralds(&ports[..4], &[(ports[4], target.herald())])?;
    postselect(&out, &pattern, cfg.detector)
}

/// Mixture over `samples` equally spaced coherent-beam phases.
pub fn phase_averaged_state(target: FockTarget, z_dc: f64, z_w: f64, samples: usize, cfg: &PipelineConfig) -> Result<Postselected> {
    if samples == 0 {
        return Err(Error::domain("phase average needs at least one sample"));
    }
    let parts: Vec<Postselected> = (0..samples)
        .map(|k| conditional_state(target, z_dc, z_w, TAU * k as f64 / samples as f64, cfg))
        .collect::<Result<_>>()?;
    let probability = parts.iter().map(|p| p.probability).sum::<f64>() / samples as f64;
    let weight = parts.iter().map(|p| p.weight).sum::<f64>() / samples as f64;
    let weighted: Vec<(f64, DensityMatrix)> = parts.into_iter().map(|p| (p.probability, p.rho)).collect();
    Ok(Postselected { rho: DensityMatrix::mixture(&weighted)?, probability, weight })
}

/// One grid point of a fidelity sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub z_w: f64,
    pub phi_w: f64,
    pub fidelity: f64,
    pub probability: f64,
}

/// Evaluates every `(z_w, phi_w)` pair, `z_w` major. Points run in parallel
/// when the `parallel` feature is enabled; the output order is fixed.
pub fn fidelity_sweep(target: FockTarget, z_dc: f64, z_ws: &[f64], phis: &[f64], cfg: &PipelineConfig) -> Result<Vec<SweepPoint>> {
    if z_ws.is_empty() || phis.is_empty() {
        return Err(Error::domain("sweep grid is empty"));
    }
    let grid: Vec<(f64, f64)> = z_ws.iter().flat_map(|&z| phis.iter().map(move |&p| (z, p))).collect();
    let want = target.state();
    let eval = |&(z_w, phi_w): &(f64, f64)| -> Result<SweepPoint> {
        let ps = conditional_state(target, z_dc, z_w, phi_w, cfg)?;
        Ok(SweepPoint { z_w, phi_w, fidelity: ps.rho.fidelity(&want)?, probability: ps.probability })
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        grid.par_iter().map(eval).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        grid.iter().map(eval).collect()
    }
}

/// Point of highest fidelity (the first one on ties).
pub fn sweep_maximum(points: &[SweepPoint]) -> Option<SweepPoint> {
    points.iter().copied().reduce(|best, p| if p.fidelity > best.fidelity { p } else { best })
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

pub const CSV_HEADER: &str = "z_w,phi_w,fidelity,probability";

pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in points {
        let row = [p.z_w, p.phi_w, p.fidelity, p.probability].map(|x| crate::fmt_sig(x, 6));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn three_fold_hhv(s: &FockExpansion, detector: DetectorModel) -> Result<f64> {
    let (ports, weights) = symmetric_ports(3);
    let out = distribute(s, &ports, &weights)?;
    click_weight(
        &out,
        &[(ports[0], ProjectorSpec::h()), (ports[1], ProjectorSpec::h()), (ports[2], ProjectorSpec::v())],
        detector,
    )
}

/// Ratio of the HHV three-fold rate with the H-polarized coherent beam
/// overlapped coherently versus distinguishably with the SPDC photons.
/// Rates are unnormalized weights of the source product, so the stimulated
/// increase of the coherent case is kept.
pub fn enhancement_ratio(z_dc: f64, z_w: f64, n_max: usize, detector: DetectorModel) -> Result<f64> {
    if z_w <= 0.0 || z_dc <= 0.0 {
        return Err(Error::domain("enhancement ratio needs |z_dc| > 0 and |z_w| > 0"));
    }
    let params = SourceParams::new(z_dc, z_w, 0.0, FockTarget::W4.wcb_polarization(), n_max)?;
    let spdc = spdc_state(Complex64::new(z_dc, 0.0), n_max)?;
    let wcb = wcb_state(params.z_w_complex(), params.wcb_polarization, n_max)?;
    let coherent = three_fold_hhv(&combine(&spdc, &wcb)?, detector)?;
    let incoherent = three_fold_hhv(&combine_incoherent(&spdc, &wcb)?, detector)?;
    if incoherent <= 0.0 {
        return Err(Error::Degenerate("no incoherent three-fold events".into()));
    }
    Ok(coherent / incoherent)
}

/// Weight of an H click in `a` and a V click in `b` after splitting the
/// overlapped sources onto two outputs.
pub fn hv_two_fold_rate(params: &SourceParams, detector: DetectorModel) -> Result<f64> {
    params.validate()?;
    let spdc = spdc_state(Complex64::new(params.z_dc, 0.0), params.n_max)?;
    let wcb = wcb_state(params.z_w_complex(), params.wcb_polarization, params.n_max)?;
    let (ports, weights) = symmetric_ports(2);
    let out = distribute(&combine(&spdc, &wcb)?, &ports, &weights)?;
    click_weight(&out, &[(ports[0], ProjectorSpec::h()), (ports[1], ProjectorSpec::v())], detector)
}
