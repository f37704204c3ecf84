//! CSV renderings of designs and sensitivity curves.

use std::fmt::Write;

use super::{Design, DesignResult};

/// `x,weight` rows.
pub fn design_csv(design: &Design) -> String {
    let mut out = String::from("x,weight\n");
    for (x, w) in design.iter() {
        writeln!(out, "{x:.10},{w:.10}").unwrap();
    }
    out
}

/// `x,sensitivity,bound` rows.
pub fn sensitivity_csv(result: &DesignResult) -> String {
    let mut out = String::from("x,sensitivity,bound\n");
    for &(x, d) in &result.sensitivity_samples {
        writeln!(out, "{x:.10},{d:.10},{}", result.bound).unwrap();
    }
    out
}
