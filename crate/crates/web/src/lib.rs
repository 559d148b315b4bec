//! Browser bindings for the demo page in `www/`.

use wasm_bindgen::prelude::*;

use symproj_core::entanglement::tangle_curve as curve;
use symproj_core::fock::{fidelity_sweep, linspace, FockTarget, LossModel, PipelineConfig};
use symproj_core::symstate::{delta5, parse_state, ProjectorSpec, PureState};
use symproj_core::{fmt_sig, Error};

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Flat `[theta0, tau0, theta1, tau1, ...]` for the projected D4^(2) family.
#[wasm_bindgen]
pub fn tangle_curve(samples: usize, filtered: bool) -> Result<Vec<f64>, JsError> {
    if samples < 2 {
        return Err(JsError::new("need at least two samples"));
    }
    Ok(curve(samples, filtered).map_err(js)?.into_iter().flat_map(|(t, tau)| [t, tau]).collect())
}

fn fidelity_row(state: &PureState, names: &[&str]) -> String {
    names
        .iter()
        .filter_map(|n| {
            let t = parse_state(n).ok()?;
            let f = state.fidelity(&t).ok()?;
            Some(format!("\"{n}\":{}", fmt_sig(f, 6)))
        })
        .collect::<Vec<_>>()
        .join(",")
}

/// Projects qubit 5 of Delta5(alpha, eps) onto (alpha_bar, eps_bar).
/// Returns JSON `{probability, state, fidelity:{...}}`.
#[wasm_bindgen]
pub fn project_delta5(alpha: f64, eps: f64, alpha_bar: f64, eps_bar: f64) -> Result<String, JsError> {
    let src = delta5(alpha, eps).map_err(js)?;
    let p = ProjectorSpec::new(alpha_bar, eps_bar).map_err(js)?;
    let (d4, prob) = src.project_qubit(5, p).map_err(js)?;
    let fid = fidelity_row(&d4, &["D4_0", "D4_1", "D4_2", "D4_3", "D4_4", "W4", "W4bar", "GHZ4+", "GHZ4-"]);
    Ok(format!(
        "{{\"probability\":{},\"state\":\"{}\",\"fidelity\":{{{fid}}}}}",
        fmt_sig(prob, 6),
        d4
    ))
}

/// Row-major fidelities over `zw_steps` values of |z_w| in [0.05, 1] and
/// `phi_steps` phases in [0, pi].
#[wasm_bindgen]
pub fn fidelity_surface(
    target: &str,
    z_dc: f64,
    zw_steps: usize,
    phi_steps: usize,
    eta: f64,
    six_photons: bool,
) -> Result<Vec<f64>, JsError> {
    let target = FockTarget::parse(target).map_err(js)?;
    if !(z_dc > 0.0 && z_dc < 1.0) || zw_steps == 0 || phi_steps == 0 || zw_steps * phi_steps > 4096 {
        return Err(JsError::new("z_dc must lie in (0,1) and the grid must have 1..=4096 points"));
    }
    let cfg = PipelineConfig {
        loss: LossModel::new(eta, 1.0).map_err(js)?,
        include_six: six_photons,
        ..PipelineConfig::default()
    };
    let z_ws = linspace(0.05, 1.0, zw_steps);
    let phis = linspace(0.0, std::f64::consts::PI, phi_steps);
    let pts = fidelity_sweep(target, z_dc, &z_ws, &phis, &cfg).map_err(js)?;
    Ok(pts.into_iter().map(|p| p.fidelity).collect())
}
