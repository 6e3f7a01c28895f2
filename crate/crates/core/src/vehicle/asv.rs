use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Pose `(x, y, psi)` and body velocities `(u, v, r)` of the vessel.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AsvState {
    pub x: f64,
    pub y: f64,
    pub psi: f64,
    /// Surge speed.
    pub u: f64,
    /// Sway speed.
    pub v: f64,
    /// Yaw rate.
    pub r: f64,
}

/// Left and right thruster forces [N].
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AsvInput {
    pub f_l: f64,
    pub f_r: f64,
}

/// Rigid-body inertia, hydrodynamic damping and thruster geometry of a
/// port/starboard symmetric vessel.
///
/// The damping matrix is
///
/// ```text
///        | X_u + X_uu|u|   0                 0               |
/// D = -  | 0               Y_v + Y_vv|v|     Y_r             |
///        | 0               N_v               N_r + N_rrr r^2 |
/// ```
#[allow(non_snake_case)]
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsvParams {
    pub m11: f64,
    pub m22: f64,
    pub m33: f64,
    pub X_u: f64,
    pub X_uu: f64,
    pub Y_v: f64,
    pub Y_vv: f64,
    pub Y_r: f64,
    pub N_v: f64,
    pub N_r: f64,
    pub N_rrr: f64,
    /// Lateral offset of each thruster from the center of gravity [m].
    pub l: f64,
}

impl AsvParams {
    /// Catamaran-scale placeholder values (1.35 m hull, ~35 kg with added
    /// mass). These are not identified coefficients of any real vessel.
    pub fn heron_placeholder() -> Self {
        Self {
            m11: 36.0,
            m22: 60.0,
            m33: 10.0,
            X_u: -10.0,
            X_uu: -15.0,
            Y_v: -50.0,
            Y_vv: -40.0,
            Y_r: -2.0,
            N_v: -1.0,
            N_r: -12.0,
            N_rrr: -5.0,
            l: 0.3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            self.m11, self.m22, self.m33, self.X_u, self.X_uu, self.Y_v, self.Y_vv, self.Y_r,
            self.N_v, self.N_r, self.N_rrr, self.l,
        ];
        if fields.iter().any(|f| !f.is_finite()) {
            return Err(Error::InvalidConfig("vessel parameters must be finite".into()));
        }
        if self.m11 <= 0.0 || self.m22 <= 0.0 || self.m33 <= 0.0 {
            return Err(Error::InvalidConfig("inertia diagonal must be positive".into()));
        }
        if self.l <= 0.0 {
            return Err(Error::InvalidConfig("thruster moment arm must be positive".into()));
        }
        if self.X_u > 0.0 || self.Y_v > 0.0 || self.N_r > 0.0 {
            return Err(Error::InvalidConfig(
                "linear damping must be dissipative (X_u, Y_v, N_r <= 0)".into(),
            ));
        }
        Ok(())
    }

    /// Parses a flat JSON object carrying exactly the parameter names.
    pub fn from_json(text: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(text)?;
        p.validate()?;
        Ok(p)
    }
}

impl AsvState {
    pub fn new(x: f64, y: f64, psi: f64, u: f64, v: f64, r: f64) -> Self {
        Self { x, y, psi, u, v, r }
    }

    pub fn from_slice(s: &[f64]) -> Self {
        Self::new(s[0], s[1], s[2], s[3], s[4], s[5])
    }

    pub fn to_array(self) -> [f64; 6] {
        [self.x, self.y, self.psi, self.u, self.v, self.r]
    }
}

impl AsvInput {
    pub fn new(f_l: f64, f_r: f64) -> Self {
        Self { f_l, f_r }
    }

    pub fn from_slice(s: &[f64]) -> Self {
        Self::new(s[0], s[1])
    }
}

/// Surge force and yaw moment of a differential thruster pair.
pub fn thrust_allocation(f_l: f64, f_r: f64, l: f64) -> (f64, f64) {
    (f_l + f_r, (-f_l + f_r) * l)
}

/// Speed over ground and course over ground.
pub fn sog_cog(s: &AsvState) -> Result<(f64, f64)> {
    if s.u == 0.0 && s.v == 0.0 {
        return Err(Error::CourseUndefined);
    }
    Ok((s.u.hypot(s.v), s.psi + s.v.atan2(s.u)))
}

/// Coriolis-centripetal matrix `C(nu)`.
pub fn coriolis_matrix(u: f64, v: f64, p: &AsvParams) -> [[f64; 3]; 3] {
    [
        [0.0, 0.0, -p.m22 * v],
        [0.0, 0.0, p.m11 * u],
        [p.m22 * v, -p.m11 * u, 0.0],
    ]
}

pub fn asv_deriv(s: &AsvState, input: &AsvInput, p: &AsvParams) -> [f64; 6] {
    let (sin, cos) = s.psi.sin_cos();
    let (u, v, r) = (s.u, s.v, s.r);
    let (tau_x, tau_n) = thrust_allocation(input.f_l, input.f_r, p.l);

    // C(nu) nu expanded.
    let c = [-p.m22 * v * r, p.m11 * u * r, (p.m22 - p.m11) * u * v];
    // D(nu) nu expanded.
    let d = [
        -(p.X_u + p.X_uu * u.abs()) * u,
        -(p.Y_v + p.Y_vv * v.abs()) * v - p.Y_r * r,
        -p.N_v * v - (p.N_r + p.N_rrr * r * r) * r,
    ];

    [
        u * cos - v * sin,
        u * sin + v * cos,
        r,
        (tau_x - c[0] - d[0]) / p.m11,
        (-c[1] - d[1]) / p.m22,
        (tau_n - c[2] - d[2]) / p.m33,
    ]
}

/// `(df/dx, df/du)` of [`asv_deriv`].
pub fn asv_jacobians(s: &AsvState, p: &AsvParams) -> ([[f64; 6]; 6], [[f64; 2]; 6]) {
    let (sin, cos) = s.psi.sin_cos();
    let (u, v, r) = (s.u, s.v, s.r);
    let mut a = [[0.0; 6]; 6];

    a[0][2] = -u * sin - v * cos;
    a[0][3] = cos;
    a[0][4] = -sin;
    a[1][2] = u * cos - v * sin;
    a[1][3] = sin;
    a[1][4] = cos;
    a[2][5] = 1.0;

    a[3][3] = (p.X_u + 2.0 * p.X_uu * u.abs()) / p.m11;
    a[3][4] = p.m22 * r / p.m11;
    a[3][5] = p.m22 * v / p.m11;

    a[4][3] = -p.m11 * r / p.m22;
    a[4][4] = (p.Y_v + 2.0 * p.Y_vv * v.abs()) / p.m22;
    a[4][5] = (-p.m11 * u + p.Y_r) / p.m22;

    a[5][3] = -(p.m22 - p.m11) * v / p.m33;
    a[5][4] = (-(p.m22 - p.m11) * u + p.N_v) / p.m33;
    a[5][5] = (p.N_r + 3.0 * p.N_rrr * r * r) / p.m33;

    let mut b = [[0.0; 2]; 6];
    b[3][0] = 1.0 / p.m11;
    b[3][1] = 1.0 / p.m11;
    b[5][0] = -p.l / p.m33;
    b[5][1] = p.l / p.m33;
    (a, b)
}
