//! `A:STEP:B` SNR grids.

use std::fmt;
use std::str::FromStr;

/// Inclusive arithmetic grid. `B` itself is included when `B - A` is a whole
/// number of steps; otherwise the grid stops at the last point below `B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrGrid {
    pub start: f64,
    pub step: f64,
    pub end: f64,
}

impl SnrGrid {
    pub fn points(&self) -> Vec<f64> {
        if self.step == 0.0 {
            return vec![self.start];
        }
        let span = (self.end - self.start) / self.step;
        // Absorb rounding so that 0:0.1:0.3 keeps its end point.
        let count = (span + 1e-9).floor() as usize;
        (0..=count).map(|i| self.start + self.step * i as f64).collect()
    }
}

impl FromStr for SnrGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| -> Result<f64, String> {
            let v: f64 = t.trim().parse().map_err(|_| format!("'{t}' is not a number"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("'{t}' is not finite"))
            }
        };
        let grid = match parts.as_slice() {
            [a] => {
                let a = num(a)?;
                SnrGrid { start: a, step: 0.0, end: a }
            }
            [a, step, b] => SnrGrid { start: num(a)?, step: num(step)?, end: num(b)? },
            _ => return Err(format!("expected A:STEP:B or a single value, got '{s}'")),
        };
        if parts.len() == 3 && grid.step <= 0.0 {
            return Err("grid step must be positive".into());
        }
        if grid.end < grid.start {
            return Err("grid end lies below its start".into());
        }
        Ok(grid)
    }
}

impl fmt::Display for SnrGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.step == 0.0 {
            write!(f, "{}", self.start)
        } else {
            write!(f, "{}:{}:{}", self.start, self.step, self.end)
        }
    }
}
