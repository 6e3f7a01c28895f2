//! Scenario files.
//!
//! A scenario file is a JSON object with the fields of
//! [`Scenario`](crate::sim::Scenario). It may name a builtin scenario in a
//! `"base"` key, in which case only the fields that differ need to be given;
//! nested objects are merged key by key. Unknown keys are rejected.
//!
//! ```
//! let s = tccbf::config::load_scenario_str(
//!     r#"{ "base": "unicycle-static", "name": "wider", "barrier": { "r_s": 1.0 } }"#,
//! ).unwrap();
//! assert_eq!(s.barrier.r_s, 1.0);
//! assert_eq!(s.goal_x, 40.0);
//! ```

use std::path::Path;

use serde_json::Value;

use crate::barrier::BarrierKind;
use crate::sim::{builtin_scenario, Scenario};
use crate::vehicle::VehicleModel;
use crate::{Error, Result};

fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

pub fn load_scenario_str(text: &str) -> Result<Scenario> {
    let mut value: Value = serde_json::from_str(text)?;
    let Some(obj) = value.as_object_mut() else {
        return Err(Error::InvalidConfig("a scenario file must hold a JSON object".into()));
    };
    let scenario: Scenario = match obj.remove("base") {
        None => serde_json::from_value(value)?,
        Some(Value::String(name)) => {
            let mut base = serde_json::to_value(builtin_scenario(&name)?)?;
            merge(&mut base, value);
            serde_json::from_value(base)?
        }
        Some(_) => return Err(Error::InvalidConfig("`base` must name a builtin scenario".into())),
    };
    scenario.validate()?;
    Ok(scenario)
}

pub fn load_scenario_file(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    load_scenario_str(&text)
}

/// Writes `text` to `path`, creating missing parent directories.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Command-line style parameter overrides.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub barrier: Option<BarrierKind>,
    pub alpha: Option<f64>,
    pub alpha_e: Option<f64>,
    pub alpha_t: Option<f64>,
    /// Also narrows the unicycle's turn-rate bound to the same value.
    pub r_max: Option<f64>,
    pub k: Option<f64>,
    pub r_s: Option<f64>,
    pub horizon: Option<usize>,
    pub ts: Option<f64>,
    pub max_time: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, s: &mut Scenario) -> Result<()> {
        let b = &mut s.barrier;
        if let Some(v) = self.barrier {
            b.kind = v;
        }
        if let Some(v) = self.alpha {
            b.alpha = v;
        }
        if let Some(v) = self.alpha_e {
            b.alpha_e = v;
        }
        if let Some(v) = self.alpha_t {
            b.alpha_t = v;
        }
        if let Some(v) = self.k {
            b.k = v;
        }
        if let Some(v) = self.r_s {
            b.r_s = v;
        }
        if let Some(v) = self.r_max {
            b.r_max = v;
            if matches!(s.vehicle, VehicleModel::Unicycle) {
                s.mpc.input_lower[0] = -v;
                s.mpc.input_upper[0] = v;
            }
        }
        if let Some(v) = self.horizon {
            s.mpc.horizon = v;
        }
        if let Some(v) = self.ts {
            s.mpc.ts = v;
        }
        if let Some(v) = self.max_time {
            s.max_time = v;
        }
        s.validate()
    }
}
