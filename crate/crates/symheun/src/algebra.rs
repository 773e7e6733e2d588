//! Parameter algebra shared by every module: the quartic P(z), elementary
//! symmetric functions, cross-ratio, index uniformization, and the parameter
//! records for the four-finite-point equations.
//!
//! All records are immutable after construction; derived quantities (sigma,
//! trig of phi) are computed once and cached.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative degeneracy tolerance: inputs closer than this (times the
/// configuration scale) to a forbidden coincidence are rejected.
pub const TOL_DEGENERATE: f64 = 1e-10;

/// Tolerance on the Fuchs exponent-sum constraint.
pub const FUCHS_TOL: f64 = 1e-12;

pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

pub(crate) fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn all_finite(zs: &[Complex64]) -> bool {
    zs.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Elementary symmetric functions (sigma1..sigma4) of four points, i.e. the
/// coefficients in prod(z - z_j) = z^4 - s1 z^3 + s2 z^2 - s3 z + s4.
pub fn elementary_symmetric(z: &[Complex64; 4]) -> [Complex64; 4] {
    let s1 = z[0] + z[1] + z[2] + z[3];
    let s2 = z[0] * z[1] + z[0] * z[2] + z[0] * z[3] + z[1] * z[2] + z[1] * z[3] + z[2] * z[3];
    let s3 = z[0] * z[1] * z[2] + z[0] * z[1] * z[3] + z[0] * z[2] * z[3] + z[1] * z[2] * z[3];
    let s4 = z[0] * z[1] * z[2] * z[3];
    [s1, s2, s3, s4]
}

/// Cross-ratio a = (z1-z3)(z2-z4) / ((z2-z3)(z1-z4)) of an ordered quadruple.
pub fn cross_ratio(z: &[Complex64; 4]) -> Result<Complex64> {
    let scale = z.iter().map(|w| w.norm()).fold(0.0, f64::max).max(1e-300);
    for j in 0..4 {
        for k in (j + 1)..4 {
            if (z[j] - z[k]).norm() <= TOL_DEGENERATE * scale {
                return Err(Error::DegeneratePoint(
                    "coincident points in cross-ratio".into(),
                ));
            }
        }
    }
    Ok((z[0] - z[2]) * (z[1] - z[3]) / ((z[1] - z[2]) * (z[0] - z[3])))
}

/// Index uniformization: alpha = cos^2(chi)/2, beta = sin^2(chi)/2, so that
/// alpha + beta = 1/2 exactly and alpha*beta = sin^2(2 chi)/16.
pub fn uniformize_indices(chi: Complex64) -> (Complex64, Complex64) {
    let c = chi.cos();
    let s = chi.sin();
    (0.5 * c * c, 0.5 * s * s)
}

/// Whether an ordered quadruple lies on a common circle (or line), detected
/// through the imaginary part of the cross-ratio: |Im a| <= tol * (1 + |a|).
pub fn is_circular_points(z: &[Complex64; 4], tol: f64) -> Result<bool> {
    let a = cross_ratio(z)?;
    Ok(a.im.abs() <= tol * (1.0 + a.norm()))
}

/// [`is_circular_points`] on a validated configuration.
pub fn is_circular(points: &PointConfig, tol: f64) -> Result<bool> {
    is_circular_points(points.points(), tol)
}

/// Branch choice for phi given the cross-ratio a = 1/sin^2(phi): principal
/// arcsine with Re(phi) in (0, pi/2]; boundary ties resolved toward Im >= 0.
pub fn phi_from_cross_ratio(a: Complex64) -> Result<Complex64> {
    let amag = a.norm();
    if amag <= TOL_DEGENERATE
        || (a - 1.0).norm() <= TOL_DEGENERATE * (1.0 + amag)
        || !amag.is_finite()
    {
        return Err(Error::DegenerateCrossRatio(format!("a = {a}")));
    }
    let mut phi = (1.0 / a.sqrt()).asin();
    if phi.re < 0.0 || (phi.re == 0.0 && phi.im < 0.0) {
        phi = -phi;
    }
    Ok(phi)
}

/// An ordered quadruple of pairwise-distinct, nonzero singular points with
/// its cached elementary symmetric functions.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfig {
    z: [Complex64; 4],
    sigma: [Complex64; 4],
    scale: f64,
}

impl PointConfig {
    pub fn new(z: [Complex64; 4]) -> Result<Self> {
        if !all_finite(&z) {
            return Err(Error::InvalidParams("non-finite singular point".into()));
        }
        let scale = z.iter().map(|w| w.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return Err(Error::ZeroSingularPoint("all points at the origin".into()));
        }
        for j in 0..4 {
            if z[j].norm() <= TOL_DEGENERATE * scale {
                return Err(Error::ZeroSingularPoint(format!("z_{} = {}", j + 1, z[j])));
            }
            for k in (j + 1)..4 {
                if (z[j] - z[k]).norm() <= TOL_DEGENERATE * scale {
                    return Err(Error::DegeneratePoint(format!(
                        "z_{} and z_{} coincide",
                        j + 1,
                        k + 1
                    )));
                }
            }
        }
        let sigma = elementary_symmetric(&z);
        Ok(Self { z, sigma, scale })
    }

    pub fn points(&self) -> &[Complex64; 4] {
        &self.z
    }

    pub fn sigma(&self) -> &[Complex64; 4] {
        &self.sigma
    }

    /// Configuration scale max_j |z_j|; all relative tolerances refer to it.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// P(z) and P'(z) for P = prod(z - z_j), evaluated through the sigma
    /// coefficients.
    pub fn eval_p(&self, z: Complex64) -> (Complex64, Complex64) {
        let [s1, s2, s3, s4] = self.sigma;
        let p = (((z - s1) * z + s2) * z - s3) * z + s4;
        let dp = ((4.0 * z - 3.0 * s1) * z + 2.0 * s2) * z - s3;
        (p, dp)
    }

    /// P'(z_j) = prod_{k != j} (z_j - z_k), formed directly from the roots.
    pub fn p_prime_at(&self, j: usize) -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for k in 0..4 {
            if k != j {
                acc *= self.z[j] - self.z[k];
            }
        }
        acc
    }

    /// Distance from z to the nearest singular point.
    pub fn min_distance_to(&self, z: Complex64) -> f64 {
        self.z
            .iter()
            .map(|w| (z - w).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Four finite regular singular points with free exponent pairs and one
/// accessory parameter; the exponents obey the Fuchs relation
/// sum(alpha_j + beta_j) = 2.
#[derive(Debug, Clone)]
pub struct FuchsianParams {
    pub points: PointConfig,
    pub alpha: [Complex64; 4],
    pub beta: [Complex64; 4],
    pub lambda: Complex64,
}

impl FuchsianParams {
    pub fn new(
        points: PointConfig,
        alpha: [Complex64; 4],
        beta: [Complex64; 4],
        lambda: Complex64,
    ) -> Result<Self> {
        if !all_finite(&alpha) || !all_finite(&beta) || !lambda.is_finite() {
            return Err(Error::InvalidParams("non-finite exponent data".into()));
        }
        let sum: Complex64 = (0..4).map(|j| alpha[j] + beta[j]).sum();
        if (sum - 2.0).norm() > FUCHS_TOL {
            return Err(Error::InvalidParams(format!(
                "Fuchs relation violated: sum(alpha+beta) = {sum}"
            )));
        }
        Ok(Self {
            points,
            alpha,
            beta,
            lambda,
        })
    }

    /// Accessory residues q_j = alpha_j beta_j P'(z_j).
    pub fn q(&self) -> [Complex64; 4] {
        let mut q = [Complex64::default(); 4];
        for j in 0..4 {
            q[j] = self.alpha[j] * self.beta[j] * self.points.p_prime_at(j);
        }
        q
    }
}

/// The symmetric record: every exponent pair is (cos^2, sin^2)(chi_j)/2, so
/// alpha_j + beta_j = 1/2 holds by construction.
#[derive(Debug, Clone)]
pub struct SymmetricHeunParams {
    pub points: PointConfig,
    pub chi: [Complex64; 4],
    pub lambda: Complex64,
}

impl SymmetricHeunParams {
    pub fn new(points: PointConfig, chi: [Complex64; 4], lambda: Complex64) -> Result<Self> {
        if !all_finite(&chi) || !lambda.is_finite() {
            return Err(Error::InvalidParams("non-finite chi or lambda".into()));
        }
        Ok(Self {
            points,
            chi,
            lambda,
        })
    }

    /// Implied exponent pair at singular point j.
    pub fn alpha_beta(&self, j: usize) -> (Complex64, Complex64) {
        uniformize_indices(self.chi[j])
    }

    /// sin^2(2 chi_j), the uniformized combination entering q_j.
    pub fn sin2_2chi(&self, j: usize) -> Complex64 {
        let s = (2.0 * self.chi[j]).sin();
        s * s
    }

    /// q_j = sin^2(2 chi_j)/16 * P'(z_j).
    pub fn q(&self) -> [Complex64; 4] {
        let mut q = [Complex64::default(); 4];
        for j in 0..4 {
            q[j] = self.sin2_2chi(j) / 16.0 * self.points.p_prime_at(j);
        }
        q
    }

    /// Q(z) = sum q_j / (z - z_j).
    pub fn accessory_q(&self, z: Complex64) -> Result<Complex64> {
        accessory_sum(&self.points, &self.q(), z)
    }
}

fn accessory_sum(points: &PointConfig, q: &[Complex64; 4], z: Complex64) -> Result<Complex64> {
    if points.min_distance_to(z) <= TOL_DEGENERATE * points.scale() {
        return Err(Error::DegeneratePoint(format!(
            "Q evaluated at singular point {z}"
        )));
    }
    let mut acc = Complex64::default();
    for j in 0..4 {
        acc += q[j] / (z - points.points()[j]);
    }
    Ok(acc)
}

/// Fully reduced data on the biquadratic configuration: singular points
/// e^{i phi}, -e^{-i phi}, -e^{i phi}, e^{-i phi}, so sigma1 = sigma3 = 0 and
/// sigma4 = 1, with P(z) = z^4 - 2 cos(2 phi) z^2 + 1.
#[derive(Debug, Clone)]
pub struct CanonicalParams {
    pub phi: Complex64,
    pub chi: [Complex64; 4],
    pub lambda: Complex64,
    cos2phi: Complex64,
    sin2phi: Complex64,
    points: PointConfig,
}

impl CanonicalParams {
    pub fn new(phi: Complex64, chi: [Complex64; 4], lambda: Complex64) -> Result<Self> {
        if !phi.is_finite() || !all_finite(&chi) || !lambda.is_finite() {
            return Err(Error::InvalidParams("non-finite canonical data".into()));
        }
        let two_phi = 2.0 * phi;
        let cos2phi = two_phi.cos();
        let sin2phi = two_phi.sin();
        if sin2phi.norm() <= TOL_DEGENERATE {
            return Err(Error::DegeneratePoint(format!(
                "sin(2 phi) = {sin2phi} too small: roots coincide"
            )));
        }
        let points = PointConfig::new(Self::points_of_phi(phi))?;
        Ok(Self {
            phi,
            chi,
            lambda,
            cos2phi,
            sin2phi,
            points,
        })
    }

    pub fn points_of_phi(phi: Complex64) -> [Complex64; 4] {
        let e = (I * phi).exp();
        let einv = (-I * phi).exp();
        [e, -einv, -e, einv]
    }

    pub fn points(&self) -> &PointConfig {
        &self.points
    }

    pub fn cos2phi(&self) -> Complex64 {
        self.cos2phi
    }

    pub fn sin2phi(&self) -> Complex64 {
        self.sin2phi
    }

    /// P and P' through the biquadratic form z^4 - 2 cos(2 phi) z^2 + 1.
    pub fn eval_p(&self, z: Complex64) -> (Complex64, Complex64) {
        let z2 = z * z;
        let p = (z2 - 2.0 * self.cos2phi) * z2 + 1.0;
        let dp = 4.0 * z * (z2 - self.cos2phi);
        (p, dp)
    }

    pub fn sin2_2chi(&self, j: usize) -> Complex64 {
        let s = (2.0 * self.chi[j]).sin();
        s * s
    }

    pub fn q(&self) -> [Complex64; 4] {
        let mut q = [Complex64::default(); 4];
        for j in 0..4 {
            let (_, dp) = self.eval_p(self.points.points()[j]);
            q[j] = self.sin2_2chi(j) / 16.0 * dp;
        }
        q
    }

    pub fn accessory_q(&self, z: Complex64) -> Result<Complex64> {
        accessory_sum(&self.points, &self.q(), z)
    }

    /// sum q_j / z_j; on the canonical configuration this equals
    /// (i/4) sin(2 phi) rho2, which the series and inversion laws rely on.
    pub fn sum_q_over_z(&self) -> Complex64 {
        let q = self.q();
        (0..4).map(|j| q[j] / self.points.points()[j]).sum()
    }

    /// The same symmetric record viewed as a general four-point one.
    pub fn to_symmetric(&self) -> SymmetricHeunParams {
        SymmetricHeunParams {
            points: self.points.clone(),
            chi: self.chi,
            lambda: self.lambda,
        }
    }
}
