//! Working precisions.
//!
//! Two formats are supported: `Coarse` (IEEE binary32) and `Fine` (IEEE
//! binary64). All matrices are stored in binary64; coarse operations
//! down-convert their inputs and round every elementary result to binary32.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Precision {
    /// binary32, unit roundoff 2^-24.
    Coarse,
    /// binary64, unit roundoff 2^-53.
    Fine,
}

/// Unit roundoff of binary32.
pub const U_COARSE: f64 = 5.960_464_477_539_063e-8; // 2^-24
/// Unit roundoff of binary64.
pub const U_FINE: f64 = 1.110_223_024_625_156_5e-16; // 2^-53

impl Precision {
    pub fn unit_roundoff(self) -> f64 {
        match self {
            Precision::Coarse => U_COARSE,
            Precision::Fine => U_FINE,
        }
    }

    /// Rounds a binary64 value to this precision.
    ///
    /// A single binary64 operation on binary32 operands followed by this
    /// rounding reproduces the binary32 result exactly for `+ - * /` and
    /// `sqrt`, so coarse scalar code can be written in `f64` with a `round`
    /// after every operation.
    #[inline]
    pub fn round(self, x: f64) -> f64 {
        match self {
            Precision::Coarse => x as f32 as f64,
            Precision::Fine => x,
        }
    }

    pub fn is_coarse(self) -> bool {
        matches!(self, Precision::Coarse)
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Precision::Coarse => "f32",
            Precision::Fine => "f64",
        })
    }
}

impl FromStr for Precision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "f32" | "coarse" => Ok(Precision::Coarse),
            "f64" | "fine" => Ok(Precision::Fine),
            other => Err(invalid(format!("unknown precision '{other}'"))),
        }
    }
}

/// Precision pairing of a whole run: `(coarse, fine)` for the
/// high-dimensional projection and for sketches and small solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrecisionMode {
    UniqueCoarse,
    UniqueFine,
    Multi,
}

impl PrecisionMode {
    pub fn pair(self) -> (Precision, Precision) {
        match self {
            PrecisionMode::UniqueCoarse => (Precision::Coarse, Precision::Coarse),
            PrecisionMode::UniqueFine => (Precision::Fine, Precision::Fine),
            PrecisionMode::Multi => (Precision::Coarse, Precision::Fine),
        }
    }

    /// Working precision of the classical baselines.
    pub fn single(self) -> Precision {
        match self {
            PrecisionMode::UniqueFine => Precision::Fine,
            _ => Precision::Coarse,
        }
    }
}

impl fmt::Display for PrecisionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PrecisionMode::UniqueCoarse => "f32",
            PrecisionMode::UniqueFine => "f64",
            PrecisionMode::Multi => "multi",
        })
    }
}

impl FromStr for PrecisionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "f32" | "unique_coarse" => Ok(PrecisionMode::UniqueCoarse),
            "f64" | "unique_fine" => Ok(PrecisionMode::UniqueFine),
            "multi" => Ok(PrecisionMode::Multi),
            other => Err(invalid(format!("unknown precision mode '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundoffs_match_formats() {
        assert_eq!(U_COARSE, 2f64.powi(-24));
        assert_eq!(U_FINE, 2f64.powi(-53));
        assert!(Precision::Fine.unit_roundoff() <= Precision::Coarse.unit_roundoff());
        assert_eq!(U_COARSE, f32::EPSILON as f64 / 2.0);
        assert_eq!(U_FINE, f64::EPSILON / 2.0);
    }

    #[test]
    fn coarse_rounding_matches_native_f32() {
        let a = 0.1f32;
        let b = 0.7f32;
        let native = a * b + a;
        let emulated = Precision::Coarse
            .round(Precision::Coarse.round(a as f64 * b as f64) + a as f64);
        assert_eq!(native as f64, emulated);
    }

    #[test]
    fn modes_parse_and_print() {
        for m in [PrecisionMode::UniqueCoarse, PrecisionMode::UniqueFine, PrecisionMode::Multi] {
            assert_eq!(m.to_string().parse::<PrecisionMode>().unwrap(), m);
        }
        assert_eq!(PrecisionMode::Multi.pair(), (Precision::Coarse, Precision::Fine));
    }
}
