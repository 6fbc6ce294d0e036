//! Number formatting and metadata for CSV reports.

use std::io::Write;

use crate::error::Result;

pub const EXPERIMENT_SCHEMA: &str = "shazoo-experiment/1";

/// Formats `x` with 6 significant digits, trimming trailing zeros.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Writes `# key=value` header lines.
pub fn write_metadata<W: Write>(mut out: W, items: &[(String, String)]) -> Result<()> {
    for (k, v) in items {
        writeln!(out, "# {k}={v}")?;
    }
    Ok(())
}
