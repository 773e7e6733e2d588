//! Adaptive complex-path integration of the four-point equations and the
//! pointwise residual used as the independent check on every series result.
//!
//! Paths are polylines with certified clearance from the singular points;
//! each segment is integrated with an embedded Dormand-Prince 5(4) pair on
//! the state (F, F').

use num_complex::Complex64;

use crate::algebra::{CanonicalParams, FuchsianParams, SymmetricHeunParams, TOL_DEGENERATE};
use crate::error::{Error, Result};
use crate::transform::StandardHeunParams;

/// Default local tolerance for the integrator.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Default clearance floor in canonical scale.
pub const DEFAULT_CLEARANCE_FLOOR: f64 = 0.05;

/// The differential equation F'' + p(z) F' + q(z) F = 0 seen through its
/// coefficient functions.
pub trait HeunOde {
    /// (p, q) at an ordinary point.
    fn ode_coefficients(&self, z: Complex64) -> (Complex64, Complex64);

    /// Finite singular points (for clearance checks).
    fn singular_points(&self) -> Vec<Complex64>;
}

/// The four-finite-point equations additionally expose the P-multiplied form
/// used by the scaled residual.
pub trait FourPointOde: HeunOde {
    /// (P, P*p, P*q) at z; for the symmetric forms P*p = P'/2 and
    /// P*q = lambda + Q(z).
    fn multiplied_coefficients(&self, z: Complex64) -> (Complex64, Complex64, Complex64);

    fn accessory(&self) -> Complex64;

    fn configuration_scale(&self) -> f64;
}

impl HeunOde for CanonicalParams {
    fn ode_coefficients(&self, z: Complex64) -> (Complex64, Complex64) {
        let (p, dp) = self.eval_p(z);
        let q = self
            .accessory_q(z)
            .unwrap_or_else(|_| Complex64::new(f64::NAN, f64::NAN));
        (0.5 * dp / p, (self.lambda + q) / p)
    }

    fn singular_points(&self) -> Vec<Complex64> {
        self.points().points().to_vec()
    }
}

impl FourPointOde for CanonicalParams {
    fn multiplied_coefficients(&self, z: Complex64) -> (Complex64, Complex64, Complex64) {
        let (p, dp) = self.eval_p(z);
        let q = self
            .accessory_q(z)
            .unwrap_or_else(|_| Complex64::new(f64::NAN, f64::NAN));
        (p, 0.5 * dp, self.lambda + q)
    }

    fn accessory(&self) -> Complex64 {
        self.lambda
    }

    fn configuration_scale(&self) -> f64 {
        self.points().scale()
    }
}

impl HeunOde for SymmetricHeunParams {
    fn ode_coefficients(&self, z: Complex64) -> (Complex64, Complex64) {
        let (p, dp) = self.points.eval_p(z);
        let q = self
            .accessory_q(z)
            .unwrap_or_else(|_| Complex64::new(f64::NAN, f64::NAN));
        (0.5 * dp / p, (self.lambda + q) / p)
    }

    fn singular_points(&self) -> Vec<Complex64> {
        self.points.points().to_vec()
    }
}

impl FourPointOde for SymmetricHeunParams {
    fn multiplied_coefficients(&self, z: Complex64) -> (Complex64, Complex64, Complex64) {
        let (p, dp) = self.points.eval_p(z);
        let q = self
            .accessory_q(z)
            .unwrap_or_else(|_| Complex64::new(f64::NAN, f64::NAN));
        (p, 0.5 * dp, self.lambda + q)
    }

    fn accessory(&self) -> Complex64 {
        self.lambda
    }

    fn configuration_scale(&self) -> f64 {
        self.points.scale()
    }
}

impl HeunOde for FuchsianParams {
    fn ode_coefficients(&self, z: Complex64) -> (Complex64, Complex64) {
        let (p, _) = self.points.eval_p(z);
        let mut pw = Complex64::default();
        let mut qsum = Complex64::default();
        let q = self.q();
        for j in 0..4 {
            let d = z - self.points.points()[j];
            pw += (1.0 - self.alpha[j] - self.beta[j]) / d;
            qsum += q[j] / d;
        }
        (pw, (self.lambda + qsum) / p)
    }

    fn singular_points(&self) -> Vec<Complex64> {
        self.points.points().to_vec()
    }
}

impl FourPointOde for FuchsianParams {
    fn multiplied_coefficients(&self, z: Complex64) -> (Complex64, Complex64, Complex64) {
        let (p, _) = self.points.eval_p(z);
        let (pw, qq) = self.ode_coefficients(z);
        (p, p * pw, p * qq)
    }

    fn accessory(&self) -> Complex64 {
        self.lambda
    }

    fn configuration_scale(&self) -> f64 {
        self.points.scale()
    }
}

impl HeunOde for StandardHeunParams {
    fn ode_coefficients(&self, z: Complex64) -> (Complex64, Complex64) {
        let p = self.gamma / z + self.delta / (z - 1.0) + self.epsilon / (z - self.a);
        let q = (self.alpha * self.beta * z - self.lambda) / (z * (z - 1.0) * (z - self.a));
        (p, q)
    }

    fn singular_points(&self) -> Vec<Complex64> {
        vec![Complex64::default(), Complex64::new(1.0, 0.0), self.a]
    }
}

/// A polyline evaluation path with certified clearance from the singular set.
#[derive(Debug, Clone)]
pub struct Path {
    waypoints: Vec<Complex64>,
    clearance: f64,
}

fn point_segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).re * ab.re + (p - a).im * ab.im) / len2;
    let t = t.clamp(0.0, 1.0);
    (p - (a + t * ab)).norm()
}

impl Path {
    /// Build a path and verify every segment keeps at least `floor` distance
    /// from every singular point.
    pub fn new(waypoints: Vec<Complex64>, singular: &[Complex64], floor: f64) -> Result<Self> {
        if waypoints.len() < 2 {
            return Err(Error::InvalidParams(
                "a path needs at least two waypoints".into(),
            ));
        }
        let mut clearance = f64::INFINITY;
        for w in waypoints.windows(2) {
            for &s in singular {
                clearance = clearance.min(point_segment_distance(s, w[0], w[1]));
            }
        }
        if clearance < floor {
            return Err(Error::ClearanceViolation { clearance, floor });
        }
        Ok(Self {
            waypoints,
            clearance,
        })
    }

    pub fn waypoints(&self) -> &[Complex64] {
        &self.waypoints
    }

    pub fn clearance(&self) -> f64 {
        self.clearance
    }

    pub fn length(&self) -> f64 {
        self.waypoints
            .windows(2)
            .map(|w| (w[1] - w[0]).norm())
            .sum()
    }
}

/// Position and local solution data along a path.
#[derive(Debug, Clone, Copy)]
pub struct OdeState {
    pub z: Complex64,
    pub f: Complex64,
    pub df: Complex64,
}

// Dormand-Prince 5(4) tableau.
const DP_C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Clone, Copy)]
struct State2 {
    f: Complex64,
    df: Complex64,
}

/// Integrate one straight segment; `h_floor` is the absolute minimal step in
/// segment parameter (0..1) units below which StepUnderflow fires.
fn integrate_segment<E: HeunOde>(
    eq: &E,
    from: Complex64,
    to: Complex64,
    state: State2,
    tol: f64,
    h_floor: f64,
) -> Result<State2> {
    let dz = to - from;
    if dz.norm() == 0.0 {
        return Ok(state);
    }
    let rhs = |s: f64, y: State2| -> State2 {
        let z = from + s * dz;
        let (p, q) = eq.ode_coefficients(z);
        State2 {
            f: dz * y.df,
            df: dz * (-p * y.df - q * y.f),
        }
    };
    // tiny hops: a second-order Taylor step is enough and avoids stepping
    // machinery below rounding scale
    if dz.norm() < 1e-9 * (from.norm() + to.norm()).max(1.0) * 1e-3 {
        let k = rhs(0.0, state);
        let z = from;
        let (p, q) = eq.ode_coefficients(z);
        let ddf = -p * state.df - q * state.f;
        return Ok(State2 {
            f: state.f + k.f + 0.5 * dz * dz * ddf,
            df: state.df + k.df - 0.5 * dz * dz * (p * ddf + q * state.df),
        });
    }
    let mut y = state;
    let mut s = 0.0f64;
    let mut h = 0.25f64;
    let mut k = [State2 {
        f: Complex64::default(),
        df: Complex64::default(),
    }; 7];
    while s < 1.0 {
        h = h.min(1.0 - s);
        if h < h_floor {
            return Err(Error::StepUnderflow {
                at: format!("{}", from + s * dz),
            });
        }
        for i in 0..7 {
            let mut yi = y;
            for j in 0..i {
                yi.f += h * DP_A[i][j] * k[j].f;
                yi.df += h * DP_A[i][j] * k[j].df;
            }
            k[i] = rhs(s + DP_C[i] * h, yi);
        }
        let mut y5 = y;
        let mut y4 = y;
        for i in 0..7 {
            y5.f += h * DP_B5[i] * k[i].f;
            y5.df += h * DP_B5[i] * k[i].df;
            y4.f += h * DP_B4[i] * k[i].f;
            y4.df += h * DP_B4[i] * k[i].df;
        }
        let scale_f = tol + tol * y.f.norm().max(y5.f.norm());
        let scale_df = tol + tol * y.df.norm().max(y5.df.norm());
        let err = ((y5.f - y4.f).norm() / scale_f).max((y5.df - y4.df).norm() / scale_df);
        if err <= 1.0 {
            s += h;
            y = y5;
        }
        let factor = if err > 0.0 { 0.9 * err.powf(-0.2) } else { 5.0 };
        h *= factor.clamp(0.2, 5.0);
    }
    Ok(y)
}

/// Integrate along the polyline; returns the state at every waypoint,
/// starting with the initial one. `init.z` must be the first waypoint.
pub fn integrate_path<E: HeunOde>(
    eq: &E,
    path: &Path,
    init: &OdeState,
    tol: f64,
) -> Result<Vec<OdeState>> {
    let w = path.waypoints();
    if (init.z - w[0]).norm() > 1e-12 * (1.0 + w[0].norm()) {
        return Err(Error::InvalidParams(
            "initial state must sit on the first waypoint".into(),
        ));
    }
    let total = path.length().max(1e-300);
    let mut out = Vec::with_capacity(w.len());
    out.push(*init);
    let mut st = State2 {
        f: init.f,
        df: init.df,
    };
    for seg in w.windows(2) {
        let seg_len = (seg[1] - seg[0]).norm();
        // the underflow floor is measured against the whole path length
        let h_floor = (1e-13 * total / seg_len.max(1e-300)).min(0.5);
        st = integrate_segment(eq, seg[0], seg[1], st, tol, h_floor)?;
        out.push(OdeState {
            z: seg[1],
            f: st.f,
            df: st.df,
        });
    }
    Ok(out)
}

/// Convenience: integrate a single straight hop and return the final state.
pub fn integrate_to<E: HeunOde>(
    eq: &E,
    from: Complex64,
    to: Complex64,
    f: Complex64,
    df: Complex64,
    tol: f64,
) -> Result<OdeState> {
    let st = integrate_segment(eq, from, to, State2 { f, df }, tol, 1e-13)?;
    Ok(OdeState {
        z: to,
        f: st.f,
        df: st.df,
    })
}

/// Scaled defect |P F'' + (P p) F' + (P q) F| / (1 + |P F''| + |lambda F|).
pub fn residual_norm<E: FourPointOde>(
    eq: &E,
    f: Complex64,
    df: Complex64,
    ddf: Complex64,
    z: Complex64,
) -> Result<f64> {
    let scale = eq.configuration_scale();
    let near = eq
        .singular_points()
        .iter()
        .map(|s| (z - s).norm())
        .fold(f64::INFINITY, f64::min);
    if near <= TOL_DEGENERATE * scale {
        return Err(Error::DegeneratePoint(format!(
            "residual at singular point {z}"
        )));
    }
    let (p, pp, pq) = eq.multiplied_coefficients(z);
    let num = (p * ddf + pp * df + pq * f).norm();
    let den = 1.0 + (p * ddf).norm() + (eq.accessory() * f).norm();
    Ok(num / den)
}
