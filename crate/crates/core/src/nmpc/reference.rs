use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::vehicle::VehicleModel;
use crate::{Error, Result};

/// Straight reference path along the x-axis at constant speed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    pub speed: f64,
    #[serde(default)]
    pub heading: f64,
    #[serde(default)]
    pub lateral_offset: f64,
}

impl PathSpec {
    pub fn along_x(speed: f64) -> Self {
        Self {
            speed,
            heading: 0.0,
            lateral_offset: 0.0,
        }
    }
}

/// Reference states `r_0..r_N`. Only the x-axis path is supported; the
/// x-position (and vessel sway) entries are zero because their weights are.
pub fn build_reference(model: &VehicleModel, path: &PathSpec, horizon: usize) -> Result<Vec<DVector<f64>>> {
    if path.heading != 0.0 || path.lateral_offset != 0.0 {
        return Err(Error::UnsupportedReference(
            "only the straight path along the x-axis is supported".into(),
        ));
    }
    if !path.speed.is_finite() {
        return Err(Error::UnsupportedReference("reference speed must be finite".into()));
    }
    let mut r = DVector::zeros(model.state_dim());
    r[3] = path.speed;
    Ok(vec![r; horizon + 1])
}
