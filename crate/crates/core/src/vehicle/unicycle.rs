use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct UnicycleState {
    pub x: f64,
    pub y: f64,
    /// Heading, unwrapped.
    pub psi: f64,
    /// Forward speed. Negative values are allowed by the model.
    pub u: f64,
}

/// Turn rate and forward acceleration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct UnicycleInput {
    pub r: f64,
    pub a: f64,
}

impl UnicycleState {
    pub fn new(x: f64, y: f64, psi: f64, u: f64) -> Self {
        Self { x, y, psi, u }
    }

    pub fn from_slice(s: &[f64]) -> Self {
        Self::new(s[0], s[1], s[2], s[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x, self.y, self.psi, self.u]
    }
}

impl UnicycleInput {
    pub fn new(r: f64, a: f64) -> Self {
        Self { r, a }
    }

    pub fn from_slice(s: &[f64]) -> Self {
        Self::new(s[0], s[1])
    }

    pub fn to_array(self) -> [f64; 2] {
        [self.r, self.a]
    }
}

pub fn unicycle_deriv(s: &UnicycleState, input: &UnicycleInput) -> [f64; 4] {
    let (sin, cos) = s.psi.sin_cos();
    [s.u * cos, s.u * sin, input.r, input.a]
}

/// `(df/dx, df/du)`; the input Jacobian is constant.
pub fn unicycle_jacobians(s: &UnicycleState) -> ([[f64; 4]; 4], [[f64; 2]; 4]) {
    let (sin, cos) = s.psi.sin_cos();
    let a = [
        [0.0, 0.0, -s.u * sin, cos],
        [0.0, 0.0, s.u * cos, sin],
        [0.0; 4],
        [0.0; 4],
    ];
    let b = [[0.0, 0.0], [0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
    (a, b)
}
