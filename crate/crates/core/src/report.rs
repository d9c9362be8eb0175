//! The record every inequality checker returns.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// `lhs` against the value of a bound's right-hand side, without constants.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    /// Short descriptive name of the inequality being probed.
    pub label: String,
    pub lhs: f64,
    pub rhs_formula_value: f64,
    /// `lhs / rhs` when `rhs > 0`; `0` when both vanish; `+inf` otherwise.
    pub ratio: f64,
    pub parameters: Vec<(String, f64)>,
}

impl BoundReport {
    pub fn new(label: &str, lhs: f64, rhs_formula_value: f64) -> Self {
        let ratio = if rhs_formula_value > 0.0 {
            lhs / rhs_formula_value
        } else if lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        Self { label: label.to_string(), lhs, rhs_formula_value, ratio, parameters: Vec::new() }
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.parameters.push((name.to_string(), value));
        self
    }

    pub fn parameter(&self, name: &str) -> Option<f64> {
        self.parameters.iter().find(|(k, _)| k == name).map(|&(_, v)| v)
    }

    /// `lhs <= rhs`, the form used when a bound is asserted rather than
    /// estimated.
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs_formula_value
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_conventions() {
        assert_eq!(BoundReport::new("r", 3.0, 2.0).ratio, 1.5);
        assert_eq!(BoundReport::new("r", 0.0, 0.0).ratio, 0.0);
        assert!(BoundReport::new("r", 1.0, 0.0).ratio.is_infinite());
        let r = BoundReport::new("r", 1.0, 2.0).with("N", 64.0);
        assert_eq!(r.parameter("N"), Some(64.0));
        assert_eq!(r.parameter("Q"), None);
    }
}
