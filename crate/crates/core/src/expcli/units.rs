//! Unit-suffixed quantities: "5.448 GHz", "20 mK", "5.2 us".

use std::f64::consts::PI;

use super::output::fmt_g12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    /// Stored as angular frequency in rad/µs.
    Frequency,
    /// Stored in µs.
    Time,
    /// Stored in K.
    Temperature,
}

impl Quantity {
    fn name(self) -> &'static str {
        match self {
            Quantity::Frequency => "frequency (GHz, MHz, kHz, Hz)",
            Quantity::Time => "time (s, ms, us, ns)",
            Quantity::Temperature => "temperature (K, mK, uK)",
        }
    }

    fn factor(self, unit: &str) -> Option<f64> {
        match self {
            Quantity::Frequency => match unit {
                "GHz" => Some(2.0 * PI * 1e3),
                "MHz" => Some(2.0 * PI),
                "kHz" => Some(2.0 * PI * 1e-3),
                "Hz" => Some(2.0 * PI * 1e-6),
                _ => None,
            },
            Quantity::Time => match unit {
                "s" => Some(1e6),
                "ms" => Some(1e3),
                "us" | "µs" | "μs" => Some(1.0),
                "ns" => Some(1e-3),
                _ => None,
            },
            Quantity::Temperature => match unit {
                "K" => Some(1.0),
                "mK" => Some(1e-3),
                "uK" | "µK" | "μK" => Some(1e-6),
                _ => None,
            },
        }
    }
}

/// Parses "<number> <unit>" into internal units.
pub fn parse_quantity(text: &str, q: Quantity) -> Result<f64, String> {
    let text = text.trim();
    let split = text
        .char_indices()
        .find(|&(_, c)| !(c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E')))
        .map(|(i, _)| i)
        .unwrap_or(text.len());
    let (num, unit) = text.split_at(split);
    let value: f64 = num.trim().parse().map_err(|_| format!("cannot read a number from \"{text}\""))?;
    let unit = unit.trim();
    if unit.is_empty() {
        return Err(format!("\"{text}\" needs a unit; expected a {}", q.name()));
    }
    let factor = q.factor(unit).ok_or_else(|| format!("unit \"{unit}\" is not a {}", q.name()))?;
    if !value.is_finite() {
        return Err(format!("\"{text}\" is not finite"));
    }
    Ok(value * factor)
}

/// Inverse of `parse_quantity` for the config echo.
pub fn format_quantity(value: f64, q: Quantity) -> String {
    match q {
        Quantity::Frequency => format!("{} MHz", fmt_g12(value / (2.0 * PI))),
        Quantity::Time => format!("{} us", fmt_g12(value)),
        Quantity::Temperature => format!("{} mK", fmt_g12(value * 1e3)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frequency_units_agree() {
        let a = parse_quantity("5448 MHz", Quantity::Frequency).unwrap();
        let b = parse_quantity("5.448 GHz", Quantity::Frequency).unwrap();
        assert!((a - b).abs() <= 1e-12 * a);
        assert!((a - 2.0 * PI * 5448.0).abs() < 1e-9);
        assert_eq!(parse_quantity("2MHz", Quantity::Frequency).unwrap(), 2.0 * PI * 2.0);
    }

    #[test]
    fn time_and_temperature() {
        assert_eq!(parse_quantity("5.2 us", Quantity::Time).unwrap(), 5.2);
        assert_eq!(parse_quantity("100 ns", Quantity::Time).unwrap(), 0.1);
        assert!((parse_quantity("20 mK", Quantity::Temperature).unwrap() - 0.02).abs() < 1e-15);
        assert!((parse_quantity("1e-3 K", Quantity::Temperature).unwrap() - 1e-3).abs() < 1e-18);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_quantity("5.2", Quantity::Time).is_err());
        assert!(parse_quantity("5.2 GHz", Quantity::Time).is_err());
        assert!(parse_quantity("fast us", Quantity::Time).is_err());
    }

    #[test]
    fn echo_round_trip() {
        for (v, q) in [(2.0 * PI * 5448.0, Quantity::Frequency), (5.2, Quantity::Time), (0.02, Quantity::Temperature)] {
            let back = parse_quantity(&format_quantity(v, q), q).unwrap();
            assert!((back - v).abs() <= 1e-12 * v);
        }
    }
}
