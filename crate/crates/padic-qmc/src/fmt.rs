//! Shared numeric formatting for CSV output.

/// A float with 17 significant digits, enough to round-trip any f64.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::sig17;

    #[test]
    fn sig17_round_trips() {
        for &x in &[0.0, 0.5, 1.0 / 3.0, 7.0 / 9.0, 1e-17, 123456.789] {
            let s = sig17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }
}
