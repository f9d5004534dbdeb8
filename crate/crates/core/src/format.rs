//! Number formatting shared by the CSV writers.

/// Decimal rendering with 17 significant digits, enough to round-trip any `f64`.
pub fn sig17(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..=16).contains(&exp) {
        return format!("{x:.16e}");
    }
    let decimals = (16 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    trim_zeros(s)
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    t.to_string()
}

/// Fixed four-decimal rendering used in the printed tables.
pub fn dec4(x: f64) -> String {
    format!("{x:.4}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-7, 123456.789, 1e300, std::f64::consts::PI, 0.0036] {
            let s = sig17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn short_values_stay_short() {
        assert_eq!(sig17(0.5), "0.5");
        assert_eq!(sig17(3.0), "3");
        assert_eq!(sig17(0.0), "0");
        assert_eq!(dec4(0.03594), "0.0359");
    }
}
