//! JSON scenario files for `source-sim`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Deserialize;
use symproj_core::fock::{
    apply_loss, combine, distribute, postselect, spdc_state, wcb_state, Analysis, CoincidencePattern, DetectorModel,
    FockExpansion, LossModel, Postselected, SourceParams, Spatial,
};
use symproj_core::symstate::{ProjectorSpec, PureState};
use symproj_core::{Error, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub source: SourceSection,
    #[serde(default)]
    pub network: NetworkSection,
    #[serde(default = "no_loss")]
    pub loss: LossModel,
    pub pattern: Vec<String>,
    #[serde(default)]
    pub analysis: BTreeMap<String, AnalysisEntry>,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    /// Keep only this total photon number after combining the sources.
    #[serde(default)]
    pub photon_sector: Option<usize>,
    #[serde(default)]
    pub detector: DetectorModel,
    /// State spec (or JSON state file) to compare the conditional state with.
    #[serde(default)]
    pub target: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSection {
    pub z_dc: f64,
    pub z_w: f64,
    #[serde(default)]
    pub phi_w: f64,
    #[serde(default = "h_pol")]
    pub wcb_polarization: PolarizationSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PolarizationSpec {
    Named(String),
    Jones([[f64; 2]; 2]),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    /// Output ports; defaults to `a..e`.
    #[serde(default)]
    pub outputs: Vec<String>,
    /// Real weights with unit squared sum; default is symmetric.
    #[serde(default)]
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisEntry {
    pub alpha: f64,
    #[serde(default)]
    pub eps: f64,
    #[serde(default)]
    pub herald: bool,
}

fn no_loss() -> LossModel {
    LossModel::NONE
}

fn default_n_max() -> usize {
    6
}

fn h_pol() -> PolarizationSpec {
    PolarizationSpec::Named("H".into())
}

/// Jones vector for `H`, `V`, `D`, `A`, `R` = (H + iV)/sqrt2 and `L` = (H - iV)/sqrt2.
pub fn named_polarization(name: &str) -> Result<[Complex64; 2]> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let c = Complex64::new;
    Ok(match name {
        "H" => [c(1.0, 0.0), c(0.0, 0.0)],
        "V" => [c(0.0, 0.0), c(1.0, 0.0)],
        "D" => [c(r, 0.0), c(r, 0.0)],
        "A" => [c(r, 0.0), c(-r, 0.0)],
        "R" => [c(r, 0.0), c(0.0, r)],
        "L" => [c(r, 0.0), c(0.0, -r)],
        other => return Err(Error::Domain(format!("unknown polarization '{other}' (use H, V, D, A, R or L)"))),
    })
}

/// Everything `source-sim` needs, checked before any expansion is built.
pub struct Plan {
    pub params: SourceParams,
    pub loss: LossModel,
    pub outputs: Vec<Spatial>,
    pub weights: Vec<f64>,
    pub pattern: CoincidencePattern,
    pub photon_sector: Option<usize>,
    pub detector: DetectorModel,
}

pub struct Outcome {
    pub source_terms: usize,
    pub output: FockExpansion,
    pub result: Postselected,
}

impl Scenario {
    pub fn plan(&self) -> Result<Plan> {
        let pol = match &self.source.wcb_polarization {
            PolarizationSpec::Named(n) => named_polarization(n)?,
            PolarizationSpec::Jones(j) => [Complex64::new(j[0][0], j[0][1]), Complex64::new(j[1][0], j[1][1])],
        };
        let params = SourceParams::new(self.source.z_dc, self.source.z_w, self.source.phi_w, pol, self.n_max)?;
        self.loss.validate()?;

        let outputs: Vec<Spatial> = if self.network.outputs.is_empty() {
            (0..5).map(Spatial::Out).collect()
        } else {
            self.network.outputs.iter().map(|s| Spatial::parse(s)).collect::<Result<_>>()?
        };
        let weights = if self.network.weights.is_empty() {
            vec![1.0 / (outputs.len() as f64).sqrt(); outputs.len()]
        } else {
            self.network.weights.clone()
        };
        let sum: f64 = weights.iter().map(|w| w * w).sum();
        if weights.len() != outputs.len() || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Domain("network weights must match outputs and have unit squared sum".into()));
        }

        for key in self.analysis.keys() {
            if !self.pattern.contains(key) {
                return Err(Error::Domain(format!("analysis given for mode '{key}' which is not in the pattern")));
            }
        }
        let mut entries = Vec::new();
        for label in &self.pattern {
            let mode = Spatial::parse(label)?;
            if !outputs.contains(&mode) {
                return Err(Error::Domain(format!("pattern mode '{label}' is not a network output")));
            }
            let analysis = match self.analysis.get(label) {
                None => Analysis::Qubit(ProjectorSpec::h()),
                Some(a) => {
                    let p = ProjectorSpec::new(a.alpha, a.eps)?;
                    if a.herald {
                        Analysis::Herald(p)
                    } else {
                        Analysis::Qubit(p)
                    }
                }
            };
            entries.push((mode, analysis));
        }
        let pattern = CoincidencePattern::new(entries)?;
        if let Some(n) = self.photon_sector {
            if n > self.n_max {
                return Err(Error::Domain(format!("photon_sector {n} exceeds n_max {}", self.n_max)));
            }
        }
        Ok(Plan {
            params,
            loss: self.loss,
            outputs,
            weights,
            pattern,
            photon_sector: self.photon_sector,
            detector: self.detector,
        })
    }
}

impl Plan {
    pub fn n_qubits(&self) -> usize {
        self.pattern.n_qubits()
    }

    pub fn run(&self) -> Result<Outcome> {
        let spdc = spdc_state(Complex64::new(self.params.z_dc, 0.0), self.params.n_max)?;
        let wcb = wcb_state(self.params.z_w_complex(), self.params.wcb_polarization, self.params.n_max)?;
        let mut s = combine(&spdc, &wcb)?;
        if let Some(n) = self.photon_sector {
            s = s.sector(n);
        }
        let source_terms = s.len();
        let s = apply_loss(&s, self.loss)?;
        let output = distribute(&s, &self.outputs, &self.weights)?;
        let result = postselect(&output, &self.pattern, self.detector)?;
        Ok(Outcome { source_terms, output, result })
    }
}

pub fn check_target(plan: &Plan, target: &PureState) -> Result<()> {
    if target.n_qubits() != plan.n_qubits() {
        return Err(Error::Domain(format!(
            "target has {} qubits but the pattern defines {}",
            target.n_qubits(),
            plan.n_qubits()
        )));
    }
    Ok(())
}
