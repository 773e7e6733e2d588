//! Reduction pipeline from the popular Heun form to the symmetric one:
//! relocate the singular point at infinity to a finite position, then shift
//! the exponents with the nu-transformation so every pair sums to 1/2.
//!
//! The transformed accessory parameter is not written out in closed form
//! anywhere; it is recovered numerically instead. Since every residue is
//! forced (q_j = alpha_j beta_j P'(z_j)), the accessory is the single unknown
//! in the transformed zeroth-order coefficient, extracted at one probe point
//! and verified at four more.

use num_complex::Complex64;

use crate::algebra::{c64, FuchsianParams, PointConfig, SymmetricHeunParams, TOL_DEGENERATE};
use crate::error::{Error, Result};
use crate::mobius::MobiusMap;

/// The popular form H'' + (gamma/z + delta/(z-1) + epsilon/(z-a)) H' +
/// (alpha beta z - lambda) / (z (z-1) (z-a)) H = 0, constrained by
/// gamma + delta + epsilon = alpha + beta + 1.
#[derive(Debug, Clone)]
pub struct StandardHeunParams {
    pub a: Complex64,
    pub gamma: Complex64,
    pub delta: Complex64,
    pub epsilon: Complex64,
    pub alpha: Complex64,
    pub beta: Complex64,
    pub lambda: Complex64,
}

impl StandardHeunParams {
    pub fn new(
        a: Complex64,
        gamma: Complex64,
        delta: Complex64,
        epsilon: Complex64,
        alpha: Complex64,
        beta: Complex64,
        lambda: Complex64,
    ) -> Result<Self> {
        for v in [a, gamma, delta, epsilon, alpha, beta, lambda] {
            if !v.is_finite() {
                return Err(Error::InvalidParams("non-finite parameter".into()));
            }
        }
        let defect = (gamma + delta + epsilon - alpha - beta - 1.0).norm();
        if defect > 1e-12 {
            return Err(Error::InvalidParams(format!(
                "gamma+delta+epsilon - alpha-beta-1 = {defect:.3e}"
            )));
        }
        let scale = a.norm().max(1.0);
        if a.norm() <= TOL_DEGENERATE * scale || (a - 1.0).norm() <= TOL_DEGENERATE * scale {
            return Err(Error::InvalidParams("a must stay away from 0 and 1".into()));
        }
        Ok(Self {
            a,
            gamma,
            delta,
            epsilon,
            alpha,
            beta,
            lambda,
        })
    }
}

/// Exponent shifts nu_j = (alpha_j + beta_j)/2 - 1/4 with sum zero.
#[derive(Debug, Clone, Copy)]
pub struct NuShift {
    pub nu: [Complex64; 4],
}

/// The multivalued factor prod (z - z_j)^{nu_j}, pinned to its principal
/// value at the anchor and continued along straight segments only.
#[derive(Debug, Clone)]
pub struct Prefactor {
    points: PointConfig,
    nu: NuShift,
    anchor: Complex64,
    anchor_logs: [Complex64; 4],
}

impl Prefactor {
    pub fn new(points: PointConfig, nu: NuShift, anchor: Complex64) -> Result<Self> {
        if points.min_distance_to(anchor) <= TOL_DEGENERATE * points.scale() {
            return Err(Error::DegeneratePoint(
                "prefactor anchor on a singular point".into(),
            ));
        }
        let mut anchor_logs = [Complex64::default(); 4];
        for j in 0..4 {
            anchor_logs[j] = (anchor - points.points()[j]).ln();
        }
        Ok(Self {
            points,
            nu,
            anchor,
            anchor_logs,
        })
    }

    pub fn anchor(&self) -> Complex64 {
        self.anchor
    }

    pub fn nu(&self) -> &NuShift {
        &self.nu
    }

    /// Same factor re-pinned at a different anchor (principal value there).
    pub fn with_anchor(&self, anchor: Complex64) -> Result<Self> {
        Self::new(self.points.clone(), self.nu, anchor)
    }

    /// Logarithmic derivative sum nu_j / (z - z_j); single-valued.
    pub fn log_derivative(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::default();
        for j in 0..4 {
            acc += self.nu.nu[j] / (z - self.points.points()[j]);
        }
        acc
    }

    /// Branch-continued evaluation along the straight segment anchor -> z.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let scale = self.points.scale();
        // segment clearance: every log increment below must stay well-defined
        let mut min_dist = f64::INFINITY;
        for &zj in self.points.points() {
            min_dist = min_dist.min(segment_distance(zj, self.anchor, z));
        }
        if min_dist <= TOL_DEGENERATE * scale {
            return Err(Error::BranchAmbiguity(format!(
                "segment from anchor to {z} passes within {min_dist:.3e} of a singular point"
            )));
        }
        let seg_len = (z - self.anchor).norm();
        // spacing under half the clearance keeps each log increment's turn
        // below ~0.5 rad, so the principal branch of every ratio is safe
        let steps = ((2.0 * seg_len / min_dist).ceil() as usize).clamp(1, 200_000);
        let mut logs = self.anchor_logs;
        let mut prev = self.anchor;
        for k in 1..=steps {
            let zc = self.anchor + (z - self.anchor) * (k as f64 / steps as f64);
            for j in 0..4 {
                let zj = self.points.points()[j];
                logs[j] += ((zc - zj) / (prev - zj)).ln();
            }
            prev = zc;
        }
        let mut s = Complex64::default();
        for j in 0..4 {
            s += self.nu.nu[j] * logs[j];
        }
        Ok(s.exp())
    }
}

fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a).re * ab.re + (p - a).im * ab.im) / len2).clamp(0.0, 1.0);
    (p - (a + t * ab)).norm()
}

/// Evaluate a prefactor (operation form of [`Prefactor::eval`]).
pub fn prefactor_eval(pf: &Prefactor, z: Complex64) -> Result<Complex64> {
    pf.eval(z)
}

/// nu_j = (alpha_j + beta_j)/2 - 1/4; the Fuchs relation forces sum nu_j = 0.
pub fn nu_shifts(fp: &FuchsianParams) -> NuShift {
    let mut nu = [Complex64::default(); 4];
    for j in 0..4 {
        nu[j] = 0.5 * (fp.alpha[j] + fp.beta[j]) - 0.25;
    }
    NuShift { nu }
}

// Deterministic probe directions (splitmix64 stream under a fixed seed);
// reproducibility over cleverness.
fn probe_angles(count: usize) -> Vec<f64> {
    let mut state = 0x5eed_0ddb_a11a_d0e5u64;
    let mut next = move || {
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z = z ^ (z >> 31);
        (z >> 11) as f64 / (1u64 << 53) as f64
    };
    (0..count).map(|_| next() * std::f64::consts::TAU).collect()
}

/// Extract the accessory parameter of a four-point equation whose zeroth
/// coefficient is known pointwise: lambda = C(w) P(w) - sum q_j/(w - w_j),
/// taken at probe 0 and verified at the remaining probes.
fn extract_lambda(
    points: &PointConfig,
    q: &[Complex64; 4],
    coeff: impl Fn(Complex64) -> Complex64,
    probes: &[Complex64],
) -> Result<Complex64> {
    let eval = |w: Complex64| -> Complex64 {
        let (p, _) = points.eval_p(w);
        let mut acc = coeff(w) * p;
        for j in 0..4 {
            acc -= q[j] / (w - points.points()[j]);
        }
        acc
    };
    let lambda = eval(probes[0]);
    let mut spread = 0.0f64;
    for &w in &probes[1..] {
        spread = spread.max((eval(w) - lambda).norm());
    }
    if spread > 1e-8 * lambda.norm().max(1.0) {
        return Err(Error::ProbeFailure { spread });
    }
    Ok(lambda)
}

fn probes_for(points: &PointConfig) -> Vec<Complex64> {
    let rmin = points
        .points()
        .iter()
        .map(|z| z.norm())
        .fold(f64::INFINITY, f64::min);
    let r = 0.5 * rmin;
    probe_angles(5)
        .into_iter()
        .map(|t| c64(r * t.cos(), r * t.sin()))
        .collect()
}

/// Relocate the singular point at infinity.
///
/// M(z) = (z - z*)/(z - z**) with default anchors z* = -1, z** = 2, both
/// perturbed by +0.31 together while they collide with {0, 1, a}; the images
/// of (0, 1, a, infinity) become the four finite singular points, exponents
/// ride along unchanged, and the accessory is probed out of the pulled-back
/// zeroth coefficient.
pub fn relocate_infinity(std: &StandardHeunParams) -> Result<(FuchsianParams, MobiusMap)> {
    let mut z_star = c64(-1.0, 0.0);
    let mut z_star2 = c64(2.0, 0.0);
    let special = [Complex64::default(), c64(1.0, 0.0), std.a];
    let mut placed = false;
    for _ in 0..5 {
        let collides = special
            .iter()
            .any(|&s| (z_star - s).norm() < 0.05 || (z_star2 - s).norm() < 0.05);
        if !collides {
            placed = true;
            break;
        }
        z_star += 0.31;
        z_star2 += 0.31;
    }
    if !placed {
        return Err(Error::CollidingPlacement { attempts: 5 });
    }

    let map = MobiusMap::new(c64(1.0, 0.0), -z_star, c64(1.0, 0.0), -z_star2)?;
    let w = [
        map.apply(Complex64::default()),
        map.apply(c64(1.0, 0.0)),
        map.apply(std.a),
        map.apply(crate::mobius::INFINITY),
    ];
    let points = PointConfig::new(w)?;

    let one = c64(1.0, 0.0);
    let zero = Complex64::default();
    let alpha = [zero, zero, zero, std.alpha];
    let beta = [
        one - std.gamma,
        one - std.delta,
        one - std.epsilon,
        std.beta,
    ];
    let mut q = [Complex64::default(); 4];
    for j in 0..4 {
        q[j] = alpha[j] * beta[j] * points.p_prime_at(j);
    }

    // pulled-back zeroth coefficient: q_std(z) / M'(z)^2 at z = M^{-1}(w)
    let m_inv = map.inverse();
    let coeff = |wp: Complex64| -> Complex64 {
        let z = m_inv.apply(wp);
        let q_std = (std.alpha * std.beta * z - std.lambda) / (z * (z - 1.0) * (z - std.a));
        let dm = map.derivative(z);
        q_std / (dm * dm)
    };
    let probes = probes_for(&points);
    let lambda = extract_lambda(&points, &q, coeff, &probes)?;

    // cross-check the first-order coefficient at the first probe
    let p_check = {
        let wp = probes[0];
        let z = m_inv.apply(wp);
        let p_std = std.gamma / z + std.delta / (z - 1.0) + std.epsilon / (z - std.a);
        let dm = map.derivative(z);
        let ddm = -2.0 * (z_star - z_star2) / ((z - z_star2) * (z - z_star2) * (z - z_star2));
        let pulled = (ddm + p_std * dm) / (dm * dm);
        let mut expect = Complex64::default();
        for j in 0..4 {
            expect += (1.0 - alpha[j] - beta[j]) / (wp - points.points()[j]);
        }
        (pulled - expect).norm()
    };
    if p_check > 1e-8 {
        return Err(Error::ProbeFailure { spread: p_check });
    }

    Ok((FuchsianParams::new(points, alpha, beta, lambda)?, map))
}

/// Apply the nu-transformation W = F prod (z - z_j)^{nu_j}: exponents shift to
/// alpha_j - nu_j and beta_j - nu_j (each pair now sums to 1/2 exactly), the
/// residues are re-forced, and the accessory is probed from the transformed
/// zeroth coefficient.
pub fn nu_transform(fp: &FuchsianParams) -> Result<(SymmetricHeunParams, Prefactor)> {
    let shifts = nu_shifts(fp);
    let points = fp.points.clone();
    let z = points.points();

    let mut chi = [Complex64::default(); 4];
    let mut q_new = [Complex64::default(); 4];
    for j in 0..4 {
        let alpha_hat = fp.alpha[j] - shifts.nu[j];
        // alpha = cos^2(chi)/2  =>  cos(2 chi) = 4 alpha - 1
        chi[j] = 0.5 * (4.0 * alpha_hat - 1.0).acos();
        let beta_hat = 0.5 - alpha_hat;
        q_new[j] = alpha_hat * beta_hat * points.p_prime_at(j);
    }

    let q_old = fp.q();
    let coeff = |w: Complex64| -> Complex64 {
        // transformed zeroth coefficient:
        // (L''/L) + p_W (L'/L) + q_W, with L'/L = sum nu_j/(w - z_j)
        let mut ld = Complex64::default();
        let mut ld2 = Complex64::default();
        let mut p_w = Complex64::default();
        let mut q_sum = Complex64::default();
        for j in 0..4 {
            let d = w - z[j];
            ld += shifts.nu[j] / d;
            ld2 += shifts.nu[j] / (d * d);
            p_w += (1.0 - fp.alpha[j] - fp.beta[j]) / d;
            q_sum += q_old[j] / d;
        }
        let (p, _) = points.eval_p(w);
        (ld * ld - ld2) + p_w * ld + (fp.lambda + q_sum) / p
    };
    let probes = probes_for(&points);
    let lambda = extract_lambda(&points, &q_new, coeff, &probes)?;

    let sym = SymmetricHeunParams::new(points.clone(), chi, lambda)?;
    let pf = Prefactor::new(points, shifts, Complex64::default())?;
    Ok((sym, pf))
}
