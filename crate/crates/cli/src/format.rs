//! Number formatting shared by the human-readable reports.

use std::f64::consts::LN_10;

/// Six significant figures, switching to scientific notation outside
/// `[1e-6, 1e6)`.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    let decimals = 5 - exp;
    if (0..=11).contains(&decimals) {
        format!("{x:.*}", decimals as usize)
    } else {
        sci
    }
}

/// `X.XXeNN` for the count whose natural log is `ln`.
pub fn count_from_ln(ln: f64) -> String {
    if ln == f64::NEG_INFINITY {
        return "0".into();
    }
    if !ln.is_finite() {
        return format!("{ln}");
    }
    let log10 = ln / LN_10;
    let mut exp = log10.floor();
    let mut mantissa = format!("{:.2}", 10f64.powf(log10 - exp));
    if mantissa == "10.00" {
        mantissa = "1.00".into();
        exp += 1.0;
    }
    format!("{mantissa}e{exp}")
}

/// Signed difference with four decimals.
pub fn delta(x: f64) -> String {
    format!("{x:+.4}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_figures() {
        assert_eq!(sig6(9.870603), "9.87060");
        assert_eq!(sig6(0.0123456789), "0.0123457");
        assert_eq!(sig6(123456.7), "123457");
        assert_eq!(sig6(-2.5), "-2.50000");
        assert_eq!(sig6(1.0e9), "1.00000e9");
        assert_eq!(sig6(9.999999), "10.0000");
        assert_eq!(sig6(0.0), "0");
    }

    #[test]
    fn counts_from_logs() {
        assert_eq!(count_from_ln(13_268_976f64.ln()), "1.33e7");
        assert_eq!(count_from_ln(0.0), "1.00e0");
        assert_eq!(count_from_ln(f64::NEG_INFINITY), "0");
        assert_eq!(count_from_ln(59.0 * LN_10 + 1.12f64.ln()), "1.12e59");
        assert_eq!(count_from_ln(9.9999 * LN_10), "1.00e10");
    }
}
