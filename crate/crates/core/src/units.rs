//! Quantity strings such as `"181 GPa"` or `"0.125 mm"`, resolved to SI.
//!
//! Power-of-ten prefixes are applied by shifting the decimal exponent before
//! the number is parsed, so `"10.3 GPa"` and `"10300000000 Pa"` give the same
//! `f64`. Imperial units fall back to a multiplication.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    /// Pa
    Pressure,
    /// m
    Length,
    /// N/m
    ForcePerWidth,
    /// N*m/m
    MomentPerWidth,
}

impl Dimension {
    /// SI unit written out when serializing.
    pub fn si_unit(self) -> &'static str {
        match self {
            Dimension::Pressure => "Pa",
            Dimension::Length => "m",
            Dimension::ForcePerWidth => "N/m",
            Dimension::MomentPerWidth => "N*m/m",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Dimension::Pressure => "pressure",
            Dimension::Length => "length",
            Dimension::ForcePerWidth => "force per unit width",
            Dimension::MomentPerWidth => "moment per unit width",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Copy)]
enum Scale {
    Pow10(i32),
    Factor(f64),
}

const LBF: f64 = 4.4482216152605;
const INCH: f64 = 0.0254;
const PSI: f64 = LBF / (INCH * INCH);

const UNITS: &[(&str, Dimension, Scale)] = &[
    ("Pa", Dimension::Pressure, Scale::Pow10(0)),
    ("kPa", Dimension::Pressure, Scale::Pow10(3)),
    ("MPa", Dimension::Pressure, Scale::Pow10(6)),
    ("GPa", Dimension::Pressure, Scale::Pow10(9)),
    ("psi", Dimension::Pressure, Scale::Factor(PSI)),
    ("ksi", Dimension::Pressure, Scale::Factor(PSI * 1e3)),
    ("Msi", Dimension::Pressure, Scale::Factor(PSI * 1e6)),
    ("m", Dimension::Length, Scale::Pow10(0)),
    ("cm", Dimension::Length, Scale::Pow10(-2)),
    ("mm", Dimension::Length, Scale::Pow10(-3)),
    ("um", Dimension::Length, Scale::Pow10(-6)),
    ("µm", Dimension::Length, Scale::Pow10(-6)),
    ("in", Dimension::Length, Scale::Factor(INCH)),
    ("N/m", Dimension::ForcePerWidth, Scale::Pow10(0)),
    ("N/mm", Dimension::ForcePerWidth, Scale::Pow10(3)),
    ("kN/m", Dimension::ForcePerWidth, Scale::Pow10(3)),
    ("lbf/in", Dimension::ForcePerWidth, Scale::Factor(LBF / INCH)),
    ("N*m/m", Dimension::MomentPerWidth, Scale::Pow10(0)),
    ("N", Dimension::MomentPerWidth, Scale::Pow10(0)),
    ("N*mm/mm", Dimension::MomentPerWidth, Scale::Pow10(0)),
    ("kN*m/m", Dimension::MomentPerWidth, Scale::Pow10(3)),
    ("lbf*in/in", Dimension::MomentPerWidth, Scale::Factor(LBF)),
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnitError {
    #[error("expected `<number> <unit>`, got {0:?}")]
    Malformed(String),
    #[error("not a finite number: {0:?}")]
    BadNumber(String),
    #[error("unknown unit {0:?}")]
    UnknownUnit(String),
    #[error("unit {unit:?} is not a {expected}")]
    WrongDimension { unit: String, expected: Dimension },
}

/// Scale a plain number by a unit symbol.
pub fn to_si(value: f64, unit: &str, dim: Dimension) -> Result<f64, UnitError> {
    let scale = lookup(unit, dim)?;
    let v = match scale {
        // format with `{:e}` so the decimal shift stays exact for the printed digits
        Scale::Pow10(p) => shift(&format!("{value:e}"), p)?,
        Scale::Factor(f) => value * f,
    };
    finite(v, &value.to_string())
}

/// Parse `"<number> <unit>"` into SI.
pub fn parse_quantity(text: &str, dim: Dimension) -> Result<f64, UnitError> {
    let trimmed = text.trim();
    let (num, unit) = trimmed.split_once(char::is_whitespace).ok_or_else(|| UnitError::Malformed(text.to_string()))?;
    let unit = unit.trim();
    let scale = lookup(unit, dim)?;
    let base: f64 = num.parse().map_err(|_| UnitError::BadNumber(num.to_string()))?;
    finite(base, num)?;
    let v = match scale {
        Scale::Pow10(p) => shift(num, p)?,
        Scale::Factor(f) => base * f,
    };
    finite(v, num)
}

/// SI value as a quantity string that parses back to the same `f64`.
pub fn format_si(value: f64, dim: Dimension) -> String {
    format!("{value} {}", dim.si_unit())
}

fn lookup(unit: &str, dim: Dimension) -> Result<Scale, UnitError> {
    let &(_, d, scale) =
        UNITS.iter().find(|(sym, _, _)| *sym == unit).ok_or_else(|| UnitError::UnknownUnit(unit.to_string()))?;
    if d != dim {
        return Err(UnitError::WrongDimension { unit: unit.to_string(), expected: dim });
    }
    Ok(scale)
}

fn shift(num: &str, pow: i32) -> Result<f64, UnitError> {
    let bad = || UnitError::BadNumber(num.to_string());
    let (mantissa, exp) = match num.find(['e', 'E']) {
        Some(i) => (&num[..i], num[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (num, 0),
    };
    format!("{mantissa}e{}", exp + pow).parse().map_err(|_| bad())
}

fn finite(v: f64, num: &str) -> Result<f64, UnitError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(UnitError::BadNumber(num.to_string()))
    }
}
