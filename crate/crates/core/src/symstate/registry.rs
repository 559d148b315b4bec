//! Textual state specifications shared by the command line and the browser demo.

use super::families::*;
use super::{dicke, DickeSpec, PureState};
use crate::error::{Error, Result};

/// Names accepted by [`parse_state`] besides the `D{n}_{m}`, `delta5:a,e`
/// and H/V product forms.
pub const NAMED_STATES: &[&str] =
    &["GHZ3", "GHZ3+", "GHZ3-", "W3", "W3bar", "G3+", "G3-", "GHZ4", "GHZ4+", "GHZ4-", "W4", "W4bar"];

/// Parses a named state, `D4_2`, `delta5:0.7071,1.5708` or an H/V string like `HHV`.
pub fn parse_state(spec: &str) -> Result<PureState> {
    let spec = spec.trim();
    let named = match spec {
        "GHZ3" => Some(ghz3()),
        "GHZ3+" => Some(ghz3_plus()),
        "GHZ3-" => Some(ghz3_minus()),
        "W3" => Some(w3()),
        "W3bar" => Some(w3_bar()),
        "G3+" => Some(g3_plus()),
        "G3-" => Some(g3_minus()),
        "GHZ4" => Some(ghz4()),
        "GHZ4+" => Some(ghz4_plus()),
        "GHZ4-" => Some(ghz4_minus()),
        "W4" => Some(w4()),
        "W4bar" => Some(w4_bar()),
        _ => None,
    };
    if let Some(s) = named {
        return Ok(s);
    }
    if let Some(rest) = spec.strip_prefix("delta5:") {
        let parts: Vec<&str> = rest.split(',').collect();
        let nums: Vec<f64> = parts.iter().filter_map(|p| p.trim().parse().ok()).collect();
        if parts.len() != 2 || nums.len() != 2 {
            return Err(Error::domain(format!("expected delta5:<alpha>,<eps>, got '{spec}'")));
        }
        return delta5(nums[0], nums[1]);
    }
    if let Some(rest) = spec.strip_prefix('D') {
        if let Some((n, m)) = rest.split_once('_') {
            return match (n.parse(), m.parse()) {
                (Ok(n), Ok(m)) => dicke(DickeSpec { n, m }),
                _ => Err(Error::domain(format!("expected D<n>_<m>, got '{spec}'"))),
            };
        }
    }
    if !spec.is_empty() && spec.chars().all(|c| c == 'H' || c == 'V') {
        return PureState::product(spec);
    }
    Err(Error::domain(format!("unknown state '{spec}'")))
}
