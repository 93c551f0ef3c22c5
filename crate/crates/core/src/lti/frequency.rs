use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_OMEGA_MIN: f64 = 1e-2;
pub const DEFAULT_OMEGA_MAX: f64 = 1e4;
pub const DEFAULT_POINTS: usize = 600;

/// `points` logarithmically spaced frequencies from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "frequency range",
            reason: format!("needs 0 < lo < hi, got [{lo}, {hi}]"),
        });
    }
    if points < 2 {
        return Err(Error::InvalidParameter {
            name: "points",
            reason: "must be >= 2".into(),
        });
    }
    let (a, b) = (lo.log10(), hi.log10());
    let step = (b - a) / (points - 1) as f64;
    let mut grid: Vec<f64> = (0..points)
        .map(|k| 10f64.powf(a + step * k as f64))
        .collect();
    grid[0] = lo;
    grid[points - 1] = hi;
    Ok(grid)
}

pub fn default_grid() -> Vec<f64> {
    log_grid(DEFAULT_OMEGA_MIN, DEFAULT_OMEGA_MAX, DEFAULT_POINTS).expect("default grid is valid")
}

/// Complex responses of several named channels on a shared frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyResponseTable {
    pub omega: Vec<f64>,
    pub channels: Vec<(String, Vec<Complex64>)>,
}

impl FrequencyResponseTable {
    pub fn new(omega: Vec<f64>) -> Result<Self> {
        if omega.is_empty() || omega[0] <= 0.0 || omega.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter {
                name: "omega",
                reason: "must be positive and strictly increasing".into(),
            });
        }
        Ok(Self {
            omega,
            channels: Vec::new(),
        })
    }

    pub fn push(&mut self, name: impl Into<String>, values: Vec<Complex64>) -> Result<()> {
        if values.len() != self.omega.len() {
            return Err(Error::Dimension(format!(
                "{} values for {} frequencies",
                values.len(),
                self.omega.len()
            )));
        }
        self.channels.push((name.into(), values));
        Ok(())
    }

    pub fn channel(&self, name: &str) -> Option<&[Complex64]> {
        self.channels
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }
}

/// Phase in degrees with 360-degree jumps removed.
pub fn unwrapped_phase_deg(values: &[Complex64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut offset = 0.0;
    let mut prev: Option<f64> = None;
    for v in values {
        let raw = v.arg().to_degrees();
        if let Some(p) = prev {
            let mut candidate = raw + offset;
            while candidate - p > 180.0 {
                offset -= 360.0;
                candidate -= 360.0;
            }
            while candidate - p < -180.0 {
                offset += 360.0;
                candidate += 360.0;
            }
        }
        let phase = raw + offset;
        out.push(phase);
        prev = Some(phase);
    }
    out
}

pub fn magnitude_db(v: Complex64) -> f64 {
    20.0 * v.norm().log10()
}
