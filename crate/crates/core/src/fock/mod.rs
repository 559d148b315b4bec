//! Truncated multimode Fock-space simulation of the photonic set-up: SPDC and
//! weak-coherent-beam sources, a symmetric multiport, loss and coincidence
//! postselection onto polarization qubits.

mod detect;
mod expansion;
mod network;
mod pipeline;
mod source;

pub use detect::{click_weight, postselect, Analysis, CoincidencePattern, DetectorModel, Postselected};
pub use expansion::{FockExpansion, ModeId, Polarization, Spatial, PRUNE};
pub use network::{apply_loss, distribute, symmetric_ports, LossModel};
pub use pipeline::{
    conditional_state, enhancement_ratio, f_ghz4_analytic, f_w4_analytic, fidelity_sweep, hv_two_fold_rate, linspace,
    phase_averaged_state, source_state, sweep_csv, sweep_maximum, FockTarget, PipelineConfig, SweepPoint, CSV_HEADER,
};
pub use source::{combine, combine_incoherent, five_photon_terms, spdc_state, wcb_state, SourceParams};
