/// Formats `x` with 17 significant digits in scientific notation, enough to
/// round-trip any f64. Output is a valid JSON number for finite input.
pub fn sig17(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fixed_width_mantissa() {
        assert_eq!(sig17(1.0), "1.0000000000000000e0");
        assert_eq!(sig17(-0.25), "-2.5000000000000000e-1");
        assert_eq!(sig17(f64::NAN), "NaN");
    }

    proptest! {
        #[test]
        fn round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            let s = sig17(x);
            prop_assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
            prop_assert!(serde_json::from_str::<f64>(&s).is_ok());
        }
    }
}
