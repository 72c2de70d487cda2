//! Fixed-precision percentages with round-half-up semantics.
//!
//! Percentages are computed in integer arithmetic so that printed values
//! never depend on binary floating point representation (21/220 is 9.545…,
//! which must round to 9.55, not 9.54).

use std::fmt;

use serde::{Serialize, Serializer};

/// A percentage held as an integer count of `10^-decimals` units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Percent {
    scaled: u64,
    decimals: u32,
}

impl Percent {
    /// `100 * count / total`, rounded half-up to `decimals` places.
    /// A zero `total` yields zero.
    pub fn of(count: u64, total: u64, decimals: u32) -> Self {
        if total == 0 {
            return Percent {
                scaled: 0,
                decimals,
            };
        }
        let num = u128::from(count) * 100 * 10u128.pow(decimals);
        let den = u128::from(total);
        let scaled = (2 * num + den) / (2 * den);
        Percent {
            scaled: scaled as u64,
            decimals,
        }
    }

    pub fn scaled(&self) -> u64 {
        self.scaled
    }

    pub fn decimals(&self) -> u32 {
        self.decimals
    }

    pub fn value(&self) -> f64 {
        self.scaled as f64 / 10f64.powi(self.decimals as i32)
    }
}

impl fmt::Display for Percent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = if self.decimals == 0 {
            self.scaled.to_string()
        } else {
            let unit = 10u64.pow(self.decimals);
            format!(
                "{}.{:0width$}",
                self.scaled / unit,
                self.scaled % unit,
                width = self.decimals as usize
            )
        };
        f.pad(&text)
    }
}

impl Serialize for Percent {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.value())
    }
}
