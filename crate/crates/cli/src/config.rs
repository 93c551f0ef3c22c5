//! Experiment configuration: a TOML file with one table per concern, every
//! value overridable from the command line.

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub tuning: TuningSection,
    pub plant: PlantSection,
    pub sweep: SweepSection,
    pub simulation: SimulationSection,
    pub grid: GridSection,
    pub output: OutputSection,
    pub compare: CompareSection,
    pub verify: VerifySection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TuningSection {
    pub order: u8,
    pub ts: f64,
    pub g: f64,
    pub b0: f64,
}

impl Default for TuningSection {
    fn default() -> Self {
        Self {
            order: 1,
            ts: 1.0,
            g: 10.0,
            b0: 1.0,
        }
    }
}

/// Nominal plant. `d` is only used by second-order experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlantSection {
    pub k: f64,
    pub t: f64,
    pub d: f64,
}

impl Default for PlantSection {
    fn default() -> Self {
        Self {
            k: 1.0,
            t: 1.0,
            d: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub first_order_k: Vec<f64>,
    pub first_order_t: Vec<f64>,
    pub second_order_k: Vec<f64>,
    pub second_order_t: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        let first = vec![0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0];
        let second = vec![0.1, 0.2, 0.5, 1.0, 2.0, 5.0];
        Self {
            first_order_k: first.clone(),
            first_order_t: first,
            second_order_k: second.clone(),
            second_order_t: second,
        }
    }
}

impl SweepSection {
    pub fn gains(&self, order: u8) -> &[f64] {
        if order == 1 {
            &self.first_order_k
        } else {
            &self.second_order_k
        }
    }

    pub fn time_constants(&self, order: u8) -> &[f64] {
        if order == 1 {
            &self.first_order_t
        } else {
            &self.second_order_t
        }
    }
}

/// Step experiments run to `t_end_factor * ts` in `n_steps` samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationSection {
    pub t_end_factor: f64,
    pub n_steps: usize,
}

impl Default for SimulationSection {
    fn default() -> Self {
        Self {
            t_end_factor: 10.0,
            n_steps: 4000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            omega_min: adrc_pid::lti::DEFAULT_OMEGA_MIN,
            omega_max: adrc_pid::lti::DEFAULT_OMEGA_MAX,
            points: adrc_pid::lti::DEFAULT_POINTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: "out".into() }
    }
}

/// Optional extra controller shown next to ADRC and its equivalent:
/// `[kp, ki, kd, Tf, b]`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pid: Option<[f64; 5]>,
}

/// Relative error injected into `b0` for the equivalent controller used by
/// the y-channel checks of `verify`. Zero for a normal run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySection {
    pub b0_perturbation: f64,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub order: Option<u8>,
    pub ts: Option<f64>,
    pub g: Option<f64>,
    pub b0: Option<f64>,
    pub plant_k: Option<f64>,
    pub plant_t: Option<f64>,
    pub plant_d: Option<f64>,
    pub out: Option<String>,
    pub compare_pid: Option<[f64; 5]>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {}", e.message())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        let set = |dst: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        if let Some(order) = o.order {
            self.tuning.order = order;
        }
        set(&mut self.tuning.ts, o.ts);
        set(&mut self.tuning.g, o.g);
        set(&mut self.tuning.b0, o.b0);
        set(&mut self.plant.k, o.plant_k);
        set(&mut self.plant.t, o.plant_t);
        set(&mut self.plant.d, o.plant_d);
        if let Some(out) = &o.out {
            self.output.dir = out.clone();
        }
        if o.compare_pid.is_some() {
            self.compare.pid = o.compare_pid;
        }
    }

    /// Messages name the command-line flag (or config key) at fault.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Usage(msg));
        let positive = |name: &str, v: f64| -> Result<(), CliError> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                bad(format!("{name} must be > 0"))
            }
        };
        if !matches!(self.tuning.order, 1 | 2) {
            return bad("order must be 1 or 2".into());
        }
        positive("ts", self.tuning.ts)?;
        positive("g", self.tuning.g)?;
        positive("b0", self.tuning.b0)?;
        if !(self.plant.k.is_finite() && self.plant.k != 0.0) {
            return bad("plant-k must be finite and nonzero".into());
        }
        positive("plant-t", self.plant.t)?;
        if !(self.plant.d.is_finite() && self.plant.d >= 0.0) {
            return bad("plant-d must be >= 0".into());
        }
        let lists = [
            ("sweep.first_order_k", &self.sweep.first_order_k, false),
            ("sweep.first_order_t", &self.sweep.first_order_t, true),
            ("sweep.second_order_k", &self.sweep.second_order_k, false),
            ("sweep.second_order_t", &self.sweep.second_order_t, true),
        ];
        for (name, values, need_positive) in lists {
            if values.is_empty() {
                return bad(format!("{name} must not be empty"));
            }
            for &v in values {
                if !v.is_finite() || v == 0.0 || (need_positive && v < 0.0) {
                    return bad(format!("{name} has invalid entry {v}"));
                }
            }
        }
        positive("simulation.t_end_factor", self.simulation.t_end_factor)?;
        if self.simulation.n_steps < 2 {
            return bad("simulation.n_steps must be >= 2".into());
        }
        positive("grid.omega_min", self.grid.omega_min)?;
        if !(self.grid.omega_max.is_finite() && self.grid.omega_max > self.grid.omega_min) {
            return bad("grid.omega_max must be > grid.omega_min".into());
        }
        if self.grid.points < 2 {
            return bad("grid.points must be >= 2".into());
        }
        if self.output.dir.is_empty() {
            return bad("out must not be empty".into());
        }
        if let Some([kp, ki, kd, tf, b]) = self.compare.pid {
            if ![kp, ki, kd, tf, b].iter().all(|v| v.is_finite()) {
                return bad("compare-pid values must be finite".into());
            }
            if kd != 0.0 && tf <= 0.0 {
                return bad("compare-pid Tf must be > 0 when kd is nonzero".into());
            }
        }
        if !self.verify.b0_perturbation.is_finite() || self.verify.b0_perturbation <= -1.0 {
            return bad("verify.b0_perturbation must be > -1".into());
        }
        Ok(())
    }

    pub fn t_end(&self) -> f64 {
        self.simulation.t_end_factor * self.tuning.ts
    }

    pub fn omega(&self) -> Vec<f64> {
        adrc_pid::lti::log_grid(self.grid.omega_min, self.grid.omega_max, self.grid.points)
            .expect("grid validated")
    }
}

/// Parses `kp,ki,kd,Tf,b`.
pub fn parse_compare_pid(text: &str) -> Result<[f64; 5], CliError> {
    let err =
        || CliError::Usage("compare-pid expects five comma-separated numbers kp,ki,kd,Tf,b".into());
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| err())?;
    parts.try_into().map_err(|_| err())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = ExperimentConfig::default();
        assert_eq!(ExperimentConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn awkward_values_round_trip() {
        let mut c = ExperimentConfig::default();
        c.tuning.ts = 0.1 + 0.2;
        c.tuning.g = 1.0 / 3.0;
        c.plant.k = -7e-300;
        c.compare.pid = Some([1.0, 2.5, 0.0, 0.0, 0.7]);
        c.sweep.first_order_k = vec![f64::MIN_POSITIVE, 1e308];
        assert_eq!(ExperimentConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let c = ExperimentConfig::from_toml("[tuning]\nts = 2.0\n[plant]\nd = 0.5\n").unwrap();
        assert_eq!(c.tuning.ts, 2.0);
        assert_eq!(c.tuning.g, 10.0);
        assert_eq!(c.plant.d, 0.5);
        assert_eq!(c.plant.k, 1.0);
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(matches!(
            ExperimentConfig::from_toml("[tuning]\nwat = 1\n"),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn flags_override_file() {
        let mut c = ExperimentConfig::from_toml("[tuning]\nts = 2.0\ng = 5.0\n").unwrap();
        c.apply(&Overrides {
            ts: Some(0.5),
            out: Some("x".into()),
            ..Default::default()
        });
        assert_eq!(c.tuning.ts, 0.5);
        assert_eq!(c.tuning.g, 5.0);
        assert_eq!(c.output.dir, "x");
    }

    #[test]
    fn validation_names_the_flag() {
        let mut c = ExperimentConfig::default();
        c.tuning.ts = 0.0;
        assert_eq!(c.validate().unwrap_err().to_string(), "ts must be > 0");
        let mut c = ExperimentConfig::default();
        c.plant.t = -1.0;
        assert_eq!(c.validate().unwrap_err().to_string(), "plant-t must be > 0");
        let mut c = ExperimentConfig::default();
        c.sweep.second_order_k.clear();
        assert!(c
            .validate()
            .unwrap_err()
            .to_string()
            .contains("second_order_k"));
    }

    #[test]
    fn compare_pid_parsing() {
        assert_eq!(
            parse_compare_pid("1,2,3,0.1,0.5").unwrap(),
            [1.0, 2.0, 3.0, 0.1, 0.5]
        );
        assert!(parse_compare_pid("1,2,3").is_err());
        assert!(parse_compare_pid("1,2,x,4,5").is_err());
    }
}
