//! Locale-independent CSV output.

use qds_core::sweep::{ProfilePoint, RateRow};
use std::fmt::Write as _;

pub const RATE_SCHEMA: &str = "# schema: qds-rate-curve v1";
pub const RATE_HEADER: &str = "l_km,pulses,protocol,r_sig,signatures,n,n_z,h_min,h_max,h_total,feasible";
pub const PROFILE_SCHEMA: &str = "# schema: qds-entropy-profile v1";
pub const PROFILE_HEADER: &str = "l_km,pulses,n_z,h_min,h_max,h_total,h_min_frac,h_max_frac";

/// Round-trip scientific notation with a signed two-digit exponent, e.g. `6.1035156250000000e-05`.
pub fn sci(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.16e}");
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let e: i32 = exp.parse().expect("integer exponent");
    let sign = if e < 0 { '-' } else { '+' };
    format!("{mant}e{sign}{:02}", e.abs())
}

pub fn rate_csv(rows: &[RateRow]) -> String {
    let mut out = format!("{RATE_SCHEMA}\n{RATE_HEADER}\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            sci(r.distance_km),
            sci(r.pulses),
            r.protocol.label(),
            sci(r.r_sig),
            sci(r.signatures),
            r.n,
            sci(r.n_z),
            sci(r.h_min),
            sci(r.h_max),
            sci(r.h_total),
            r.feasible
        )
        .expect("writing to a String");
    }
    out
}

pub fn profile_csv(points: &[ProfilePoint], pulses: f64) -> String {
    let mut out = format!("{PROFILE_SCHEMA}\n{PROFILE_HEADER}\n");
    for p in points {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            sci(p.distance_km),
            sci(pulses),
            sci(p.n_z),
            sci(p.h_min_eps),
            sci(p.h_max_cor),
            sci(p.h_total),
            sci(p.h_min_frac),
            sci(p.h_max_frac)
        )
        .expect("writing to a String");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_digit_exponents() {
        assert_eq!(sci(6.103515625e-5), "6.1035156250000000e-05");
        assert_eq!(sci(0.0), "0.0000000000000000e+00");
        assert_eq!(sci(-2.0e123), "-2.0000000000000000e+123");
        assert_eq!(sci(12.0), "1.2000000000000000e+01");
    }

    #[test]
    fn round_trips() {
        for x in [0.1, 1.0 / 3.0, 6.02214076e23, 2.5e-10, -7.25] {
            assert_eq!(sci(x).parse::<f64>().unwrap(), x);
        }
    }
}
