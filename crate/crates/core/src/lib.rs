//! Engineering of SLOCC-inequivalent few-qubit states by projective
//! measurements on symmetric Dicke states, and a truncated Fock-space
//! simulator of their photonic preparation.

pub mod entanglement;
pub mod error;
pub mod fock;
pub mod symstate;

pub use error::{Error, Result};

/// Formats `x` with `digits` significant digits in fixed notation.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".to_string() } else { x.to_string() };
    }
    let mut mag = x.abs().log10().floor() as i32;
    // Rounding may carry into the next decade, e.g. 0.9999999 -> 1.00000.
    let scale = 10f64.powi(digits as i32 - 1 - mag);
    if (x.abs() * scale).round() >= 10f64.powi(digits as i32) {
        mag += 1;
    }
    let decimals = (digits as i32 - 1 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.starts_with("-0") && s.trim_start_matches(['-', '0', '.']).is_empty() {
        s[1..].to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::fmt_sig;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.776012345, 6), "0.776012");
        assert_eq!(fmt_sig(-0.17733333, 6), "-0.177333");
        assert_eq!(fmt_sig(1.0, 6), "1.00000");
        assert_eq!(fmt_sig(0.99999999, 6), "1.00000");
        assert_eq!(fmt_sig(-9.9999996, 6), "-10.0000");
        assert_eq!(fmt_sig(0.0, 6), "0");
        assert_eq!(fmt_sig(1234.5678, 6), "1234.57");
        assert_eq!(fmt_sig(3.2e-5, 3), "0.0000320");
    }
}
