//! Fractional-linear maps, their decomposition into translation / dilatation /
//! inversion generators, and the extended action of those generators on the
//! full parameter tuple (z_1..z_4; q_1..q_4; lambda).
//!
//! The extended action is what makes canonical placement possible: a map is
//! built sending three singular points onto the biquadratic configuration,
//! decomposed into generators, and the accessory data is pushed through one
//! generator at a time.

use num_complex::Complex64;

use crate::algebra::{
    cross_ratio, phi_from_cross_ratio, CanonicalParams, PointConfig, SymmetricHeunParams,
    TOL_DEGENERATE,
};
use crate::error::{Error, Result};
use crate::series::rho_set;

/// Representable point at infinity for [`MobiusMap::apply`] and triple maps.
pub const INFINITY: Complex64 = Complex64::new(f64::INFINITY, f64::INFINITY);

fn is_inf(z: Complex64) -> bool {
    z.re.is_infinite() || z.im.is_infinite()
}

/// A fractional-linear map z -> (m11 z + m12) / (m21 z + m22).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusMap {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
}

impl MobiusMap {
    pub fn new(m11: Complex64, m12: Complex64, m21: Complex64, m22: Complex64) -> Result<Self> {
        let m = Self { m11, m12, m21, m22 };
        let scale = m.norm_sq();
        let det = m.det().norm();
        if det <= 1e-14 * scale.max(1e-300) {
            return Err(Error::SingularMap { det });
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        Self {
            m11: Complex64::new(1.0, 0.0),
            m12: Complex64::default(),
            m21: Complex64::default(),
            m22: Complex64::new(1.0, 0.0),
        }
    }

    pub fn det(&self) -> Complex64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    fn norm_sq(&self) -> f64 {
        self.m11.norm_sqr() + self.m12.norm_sqr() + self.m21.norm_sqr() + self.m22.norm_sqr()
    }

    /// Rescale the matrix so det = 1 (principal square root).
    pub fn normalize(&self) -> Self {
        let k = 1.0 / self.det().sqrt();
        Self {
            m11: self.m11 * k,
            m12: self.m12 * k,
            m21: self.m21 * k,
            m22: self.m22 * k,
        }
    }

    /// Apply the map; `INFINITY` in and out follows the usual conventions
    /// (infinity maps to m11/m21, the pole -m22/m21 maps to infinity).
    pub fn apply(&self, z: Complex64) -> Complex64 {
        if is_inf(z) {
            if self.m21.norm() == 0.0 {
                return INFINITY;
            }
            return self.m11 / self.m21;
        }
        let den = self.m21 * z + self.m22;
        if den.norm() == 0.0 {
            return INFINITY;
        }
        (self.m11 * z + self.m12) / den
    }

    /// Derivative det / (m21 z + m22)^2 at a finite non-pole point.
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let den = self.m21 * z + self.m22;
        self.det() / (den * den)
    }

    pub fn inverse(&self) -> Self {
        Self {
            m11: self.m22,
            m12: -self.m12,
            m21: -self.m21,
            m22: self.m11,
        }
    }

    /// self after other: (self * other)(z) = self(other(z)).
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            m11: self.m11 * other.m11 + self.m12 * other.m21,
            m12: self.m11 * other.m12 + self.m12 * other.m22,
            m21: self.m21 * other.m11 + self.m22 * other.m21,
            m22: self.m21 * other.m12 + self.m22 * other.m22,
        }
    }

    /// Map sending z1 -> 0, z2 -> 1, z3 -> infinity; any one entry of the
    /// triple may be `INFINITY`.
    fn to_zero_one_inf(t: &[Complex64; 3]) -> Self {
        let [z1, z2, z3] = *t;
        let one = Complex64::new(1.0, 0.0);
        if is_inf(z1) {
            Self {
                m11: Complex64::default(),
                m12: -(z2 - z3),
                m21: -one,
                m22: z3,
            }
        } else if is_inf(z2) {
            Self {
                m11: one,
                m12: -z1,
                m21: one,
                m22: -z3,
            }
        } else if is_inf(z3) {
            Self {
                m11: -one,
                m12: z1,
                m21: Complex64::default(),
                m22: -(z2 - z1),
            }
        } else {
            Self {
                m11: z2 - z3,
                m12: -z1 * (z2 - z3),
                m21: z2 - z1,
                m22: -z3 * (z2 - z1),
            }
        }
    }

    /// The unique map carrying src_k -> dst_k for two pairwise-distinct
    /// triples (entries may be `INFINITY`).
    pub fn from_triples(src: &[Complex64; 3], dst: &[Complex64; 3]) -> Result<Self> {
        for t in [src, dst] {
            for j in 0..3 {
                for k in (j + 1)..3 {
                    let same = (is_inf(t[j]) && is_inf(t[k]))
                        || (!is_inf(t[j]) && !is_inf(t[k]) && {
                            let scale = t[j].norm().max(t[k].norm()).max(1.0);
                            (t[j] - t[k]).norm() <= TOL_DEGENERATE * scale
                        });
                    if same {
                        return Err(Error::DegeneratePoint(format!(
                            "repeated entry in triple: {} and {}",
                            t[j], t[k]
                        )));
                    }
                }
            }
        }
        let a = Self::to_zero_one_inf(src);
        let b = Self::to_zero_one_inf(dst);
        let m = b.inverse().compose(&a);
        let det = m.det().norm();
        if det <= 1e-14 * m.norm_sq().max(1e-300) {
            return Err(Error::SingularMap { det });
        }
        Ok(m.normalize())
    }
}

/// One generator of the extended group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Generator {
    Translate(Complex64),
    Dilate(Complex64),
    Invert,
}

impl Generator {
    /// Dilatation with the t != 0 requirement enforced.
    pub fn dilate(t: Complex64) -> Result<Self> {
        if t.norm() == 0.0 || !t.is_finite() {
            return Err(Error::InvalidParams(
                "dilatation factor must be finite nonzero".into(),
            ));
        }
        Ok(Self::Dilate(t))
    }

    pub fn to_map(&self) -> MobiusMap {
        let one = Complex64::new(1.0, 0.0);
        match *self {
            Self::Translate(zeta) => MobiusMap {
                m11: one,
                m12: zeta,
                m21: Complex64::default(),
                m22: one,
            },
            Self::Dilate(t) => MobiusMap {
                m11: t,
                m12: Complex64::default(),
                m21: Complex64::default(),
                m22: one,
            },
            Self::Invert => MobiusMap {
                m11: Complex64::default(),
                m12: one,
                m21: one,
                m22: Complex64::default(),
            },
        }
    }

    fn is_noop(&self) -> bool {
        match *self {
            Self::Translate(z) => z.norm() == 0.0,
            Self::Dilate(t) => (t - 1.0).norm() == 0.0,
            Self::Invert => false,
        }
    }
}

/// An ordered word in the generators; entry 0 acts first.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GeneratorChain(pub Vec<Generator>);

impl GeneratorChain {
    /// Compose the chain into a single map (entry 0 applied first).
    pub fn compose_map(&self) -> MobiusMap {
        let mut m = MobiusMap::identity();
        for g in &self.0 {
            m = g.to_map().compose(&m);
        }
        m
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.0.iter().fold(z, |w, g| g.to_map().apply(w))
    }
}

/// Split a map into Translate / Invert / Dilate / Translate (lower-triangular
/// case: Dilate / Translate). The identity yields an empty chain. The map is
/// det-normalized first to stabilize the extracted parameters.
pub fn decompose_to_generators(m: &MobiusMap) -> Result<GeneratorChain> {
    let scale = m.norm_sq();
    let det = m.det().norm();
    if det <= 1e-14 * scale.max(1e-300) {
        return Err(Error::SingularMap { det });
    }
    let m = m.normalize();
    let chain: Vec<Generator> = if m.m21.norm() > 1e-14 * scale.sqrt() {
        // z -> m11/m21 - det / (m21^2 (z + m22/m21))
        let c = m.m21;
        vec![
            Generator::Translate(m.m22 / c),
            Generator::Invert,
            Generator::Dilate(-m.det() / (c * c)),
            Generator::Translate(m.m11 / c),
        ]
    } else {
        vec![
            Generator::Dilate(m.m11 / m.m22),
            Generator::Translate(m.m12 / m.m22),
        ]
    };
    Ok(GeneratorChain(
        chain.into_iter().filter(|g| !g.is_noop()).collect(),
    ))
}

/// Push a symmetric parameter record through one generator.
///
/// Translations leave (q, lambda) alone; dilatations scale q by t^3 and
/// lambda by t^2; inversion sends q_j to -q_j/(z_j^2 sigma4) and lambda to
/// (lambda - sum q_j/z_j)/sigma4. The chi values are re-derived afterwards so
/// that the transformed q_j still equal alpha_j beta_j P'(z_j).
pub fn act_generator(params: &SymmetricHeunParams, g: &Generator) -> Result<SymmetricHeunParams> {
    let z = params.points.points();
    let q = params.q();
    let scale = params.points.scale();
    let (new_z, new_q, new_lambda) = match *g {
        Generator::Translate(zeta) => {
            if !zeta.is_finite() {
                return Err(Error::InvalidParams("non-finite translation".into()));
            }
            let nz = [z[0] + zeta, z[1] + zeta, z[2] + zeta, z[3] + zeta];
            (nz, q, params.lambda)
        }
        Generator::Dilate(t) => {
            if t.norm() == 0.0 || !t.is_finite() {
                return Err(Error::InvalidParams(
                    "dilatation factor must be finite nonzero".into(),
                ));
            }
            let nz = [t * z[0], t * z[1], t * z[2], t * z[3]];
            let t3 = t * t * t;
            let nq = [t3 * q[0], t3 * q[1], t3 * q[2], t3 * q[3]];
            (nz, nq, t * t * params.lambda)
        }
        Generator::Invert => {
            for (j, zj) in z.iter().enumerate() {
                if zj.norm() <= TOL_DEGENERATE * scale {
                    return Err(Error::ZeroSingularPoint(format!(
                        "inversion with z_{} = {zj}",
                        j + 1
                    )));
                }
            }
            let sigma4 = params.points.sigma()[3];
            let nz = [1.0 / z[0], 1.0 / z[1], 1.0 / z[2], 1.0 / z[3]];
            let mut nq = [Complex64::default(); 4];
            let mut sum_q_over_z = Complex64::default();
            for j in 0..4 {
                nq[j] = -q[j] / (z[j] * z[j] * sigma4);
                sum_q_over_z += q[j] / z[j];
            }
            (nz, nq, (params.lambda - sum_q_over_z) / sigma4)
        }
    };
    let points = PointConfig::new(new_z)?;
    let chi = chi_from_q(&points, &new_q);
    SymmetricHeunParams::new(points, chi, new_lambda)
}

/// Recover chi_j from q_j = sin^2(2 chi_j)/16 * P'(z_j), principal branch.
fn chi_from_q(points: &PointConfig, q: &[Complex64; 4]) -> [Complex64; 4] {
    let mut chi = [Complex64::default(); 4];
    for j in 0..4 {
        let s2 = 16.0 * q[j] / points.p_prime_at(j);
        chi[j] = 0.5 * s2.sqrt().asin();
    }
    chi
}

/// Push a record through a whole chain, generator by generator.
pub fn act_chain(
    params: &SymmetricHeunParams,
    chain: &GeneratorChain,
) -> Result<SymmetricHeunParams> {
    let mut p = params.clone();
    for g in &chain.0 {
        p = act_generator(&p, g)?;
    }
    Ok(p)
}

/// Reduce a symmetric record onto the biquadratic configuration.
///
/// phi comes from the cross-ratio (a = 1/sin^2 phi); the map is built from
/// the first three points onto their canonical targets, the fourth image is
/// verified, and (q, lambda) are pushed through the generator decomposition.
/// If a chain step would park a point on the origin, a deterministic
/// pre-translation of 0.37 * scale (rescaled per retry, at most 5 retries)
/// moves the configuration first.
pub fn canonicalize(params: &SymmetricHeunParams) -> Result<(CanonicalParams, GeneratorChain)> {
    let mut attempt = 0usize;
    let mut pre: Option<Complex64> = None;
    loop {
        let mut work = params.clone();
        let mut chain = Vec::new();
        if let Some(zeta) = pre {
            let g = Generator::Translate(zeta);
            work = act_generator(&work, &g)?;
            chain.push(g);
        }
        match canonicalize_direct(&work) {
            Ok((canon, tail)) => {
                chain.extend(tail.0);
                return Ok((canon, GeneratorChain(chain)));
            }
            Err(Error::ZeroSingularPoint(_)) if attempt < 5 => {
                attempt += 1;
                pre = Some(Complex64::new(
                    0.37 * params.points.scale() * attempt as f64,
                    0.0,
                ));
            }
            Err(e) => return Err(e),
        }
    }
}

fn canonicalize_direct(params: &SymmetricHeunParams) -> Result<(CanonicalParams, GeneratorChain)> {
    let z = params.points.points();
    let a = cross_ratio(z)?;
    let phi = phi_from_cross_ratio(a)?;
    let targets = CanonicalParams::points_of_phi(phi);
    let map = MobiusMap::from_triples(&[z[0], z[1], z[2]], &[targets[0], targets[1], targets[2]])?;
    // cross-ratio invariance forces the fourth point onto its target
    let image4 = map.apply(z[3]);
    if (image4 - targets[3]).norm() > 1e-8 {
        return Err(Error::InvalidParams(format!(
            "fourth point missed its canonical target by {:.3e}",
            (image4 - targets[3]).norm()
        )));
    }
    let chain = decompose_to_generators(&map)?;
    let moved = act_chain(params, &chain)?;
    for j in 0..4 {
        let err = (moved.points.points()[j] - targets[j]).norm();
        if err > 1e-8 {
            return Err(Error::InvalidParams(format!(
                "chain image of z_{} missed its target by {err:.3e}",
                j + 1
            )));
        }
    }
    // re-read chi against the exact canonical positions
    let exact = PointConfig::new(targets)?;
    let chi = chi_from_q(&exact, &moved.q());
    let canon = CanonicalParams::new(phi, chi, moved.lambda)?;
    Ok((canon, chain))
}

/// Inversion z -> 1/z specialized to the canonical configuration: the point
/// set is preserved with labels reversed, lambda shifts by
/// -(i/4) sin(2 phi) rho2, and q_j -> -q_j/z_j^2. Applying it twice returns
/// the original record.
pub fn invert_canonical(params: &CanonicalParams) -> Result<CanonicalParams> {
    let rho = rho_set(params.phi, &params.chi);
    let shift = Complex64::new(0.0, 0.25) * params.sin2phi() * rho.rho2;
    let chi = [params.chi[3], params.chi[2], params.chi[1], params.chi[0]];
    CanonicalParams::new(params.phi, chi, params.lambda - shift)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{c64, elementary_symmetric};
    use std::f64::consts::PI;

    fn r(x: f64) -> Complex64 {
        c64(x, 0.0)
    }

    #[test]
    fn apply_basic() {
        let id = MobiusMap::identity();
        assert_eq!(id.apply(c64(2.0, 3.0)), c64(2.0, 3.0));

        let inv = Generator::Invert.to_map();
        assert!((inv.apply(r(2.0)) - r(0.5)).norm() < 1e-15);

        let tr = Generator::Translate(r(1.0)).to_map();
        assert!(is_inf(tr.apply(INFINITY)));
    }

    #[test]
    fn from_triples_identity_and_targets() {
        let t = [r(0.0), r(1.0), INFINITY];
        let m = MobiusMap::from_triples(&t, &t).unwrap();
        for &z in &[r(0.3), c64(1.0, 2.0), r(-4.0)] {
            assert!((m.apply(z) - z).norm() < 1e-13);
        }

        let phi = r(PI / 3.0);
        let targets = CanonicalParams::points_of_phi(phi);
        let m = MobiusMap::from_triples(
            &[r(0.0), r(1.0), INFINITY],
            &[targets[0], targets[1], targets[2]],
        )
        .unwrap();
        assert!((m.apply(r(0.0)) - targets[0]).norm() < 1e-13);
        assert!((m.apply(r(1.0)) - targets[1]).norm() < 1e-13);
        assert!((m.apply(INFINITY) - targets[2]).norm() < 1e-13);
    }

    #[test]
    fn from_triples_rejects_repeats() {
        assert!(
            MobiusMap::from_triples(&[r(1.0), r(1.0), r(2.0)], &[r(0.0), r(1.0), r(2.0)]).is_err()
        );
    }

    #[test]
    fn decompose_identity_and_inversion() {
        assert!(decompose_to_generators(&MobiusMap::identity())
            .unwrap()
            .0
            .is_empty());
        // z -> 1/z decomposes to the bare inversion generator
        let chain = decompose_to_generators(&Generator::Invert.to_map()).unwrap();
        assert_eq!(chain.0, vec![Generator::Invert]);
        let m = chain.compose_map();
        for &z in &[r(2.0), c64(0.5, 1.0)] {
            assert!((m.apply(z) - 1.0 / z).norm() < 1e-13);
        }
    }

    #[test]
    fn decompose_recompose_random() {
        let mut s = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((s >> 33) as f64) / (1u64 << 31) as f64 - 1.0
        };
        for _ in 0..50 {
            let m = MobiusMap::new(
                c64(next(), next()),
                c64(next(), next()),
                c64(next(), next()),
                c64(next(), next()),
            );
            let m = match m {
                Ok(m) => m.normalize(),
                Err(_) => continue,
            };
            let chain = decompose_to_generators(&m).unwrap();
            let rec = chain.compose_map();
            for &z in &[r(0.3), c64(-1.0, 0.7), c64(2.0, -0.4)] {
                let expect = m.apply(z);
                assert!(
                    (rec.apply(z) - expect).norm() <= 1e-12 * (1.0 + expect.norm()),
                    "recomposition mismatch"
                );
            }
        }
    }

    fn sample_params() -> SymmetricHeunParams {
        let pts = PointConfig::new([c64(1.1, 0.2), c64(-0.9, 0.4), c64(0.5, -1.3), c64(2.2, 1.0)])
            .unwrap();
        let chi = [c64(0.3, 0.1), c64(1.1, -0.2), c64(0.7, 0.0), c64(0.2, 0.5)];
        SymmetricHeunParams::new(pts, chi, c64(0.4, -0.2)).unwrap()
    }

    #[test]
    fn act_translate_dilate_laws() {
        let p = sample_params();
        let q0 = p.q();

        let t = act_generator(&p, &Generator::Translate(c64(0.3, -0.8))).unwrap();
        let qt = t.q();
        for j in 0..4 {
            assert!((qt[j] - q0[j]).norm() <= 1e-12 * (1.0 + q0[j].norm()));
        }
        assert_eq!(t.lambda, p.lambda);

        let d = act_generator(&p, &Generator::Dilate(r(2.0))).unwrap();
        let qd = d.q();
        for j in 0..4 {
            assert!((qd[j] - 8.0 * q0[j]).norm() <= 1e-12 * (1.0 + q0[j].norm()));
        }
        assert!((d.lambda - 4.0 * p.lambda).norm() < 1e-14);
    }

    #[test]
    fn invert_twice_is_identity() {
        let p = sample_params();
        let once = act_generator(&p, &Generator::Invert).unwrap();
        let twice = act_generator(&once, &Generator::Invert).unwrap();
        let (q0, q2) = (p.q(), twice.q());
        for j in 0..4 {
            assert!((twice.points.points()[j] - p.points.points()[j]).norm() < 1e-13);
            assert!((q2[j] - q0[j]).norm() <= 1e-13 * (1.0 + q0[j].norm()));
        }
        assert!((twice.lambda - p.lambda).norm() <= 1e-13 * (1.0 + p.lambda.norm()));
    }

    #[test]
    fn generator_action_preserves_index_constraint() {
        // q_j = alpha_j beta_j P'(z_j) must survive every generator
        let p = sample_params();
        for g in [
            Generator::Translate(c64(0.4, 0.2)),
            Generator::Dilate(c64(0.5, 1.2)),
            Generator::Invert,
        ] {
            let t = act_generator(&p, &g).unwrap();
            let q = t.q();
            for j in 0..4 {
                let (a, b) = t.alpha_beta(j);
                let expect = a * b * t.points.p_prime_at(j);
                assert!((q[j] - expect).norm() <= 1e-12 * (1.0 + expect.norm()));
            }
        }
    }

    #[test]
    fn canonicalize_real_quadruple() {
        // (2,3,5,7): a = 12/10, phi = asin(1/sqrt(1.2)) real
        let pts = PointConfig::new([r(2.0), r(3.0), r(5.0), r(7.0)]).unwrap();
        let p = SymmetricHeunParams::new(pts, [r(0.3), r(0.7), r(0.5), r(1.1)], r(0.9)).unwrap();
        let (canon, chain) = canonicalize(&p).unwrap();
        assert!(canon.phi.im.abs() < 1e-12);
        let a = cross_ratio(p.points.points()).unwrap();
        assert!((a - r(1.2)).norm() < 1e-14);
        let s = elementary_symmetric(canon.points().points());
        assert!(s[0].norm() <= 1e-12 && s[2].norm() <= 1e-12);
        assert!((s[3] - 1.0).norm() <= 1e-12);
        // the chain reproduces the canonical placement pointwise
        for (j, &zj) in p.points.points().iter().enumerate() {
            assert!((chain.apply(zj) - canon.points().points()[j]).norm() < 1e-9);
        }
    }

    #[test]
    fn canonicalize_already_canonical() {
        let phi = c64(0.75, 0.0);
        let canon0 =
            CanonicalParams::new(phi, [r(0.3), r(0.8), r(0.5), r(0.2)], c64(0.4, 0.1)).unwrap();
        let (canon, chain) = canonicalize(&canon0.to_symmetric()).unwrap();
        assert!((canon.phi - phi).norm() < 1e-12);
        assert!((canon.lambda - canon0.lambda).norm() < 1e-10);
        let m = chain.compose_map().normalize();
        // composes to +-identity
        let id_err = (m.m11 - 1.0).norm() + m.m12.norm() + m.m21.norm() + (m.m22 - 1.0).norm();
        let neg_err = (m.m11 + 1.0).norm() + m.m12.norm() + m.m21.norm() + (m.m22 + 1.0).norm();
        assert!(id_err.min(neg_err) < 1e-10);
    }

    #[test]
    fn invert_canonical_involution_and_general_law() {
        let p = CanonicalParams::new(
            c64(0.9, 0.1),
            [c64(0.4, 0.0), c64(0.9, -0.1), c64(0.3, 0.2), c64(1.0, 0.0)],
            c64(1.3, 0.4),
        )
        .unwrap();
        let inv = invert_canonical(&p).unwrap();
        let back = invert_canonical(&inv).unwrap();
        assert!((back.lambda - p.lambda).norm() < 1e-13 * (1.0 + p.lambda.norm()));
        for j in 0..4 {
            assert!((back.chi[j] - p.chi[j]).norm() < 1e-14);
        }

        // the lambda shift must equal the general inversion law at sigma4 = 1
        let via_general = act_generator(&p.to_symmetric(), &Generator::Invert).unwrap();
        assert!((via_general.lambda - inv.lambda).norm() <= 1e-12 * (1.0 + inv.lambda.norm()));
        // and the inverted point set is the canonical set with labels reversed
        for j in 0..4 {
            let got = via_general.points.points()[j];
            let expect = p.points().points()[3 - j];
            assert!((got - expect).norm() < 1e-13);
        }
    }

    #[test]
    fn invert_canonical_constant_case() {
        // sin(2 chi_j) = 0 for all j: q = 0, lambda unchanged
        let p = CanonicalParams::new(r(0.8), [r(0.0), r(PI / 2.0), r(0.0), r(PI)], c64(2.0, -1.0))
            .unwrap();
        let inv = invert_canonical(&p).unwrap();
        assert!((inv.lambda - p.lambda).norm() < 1e-15);
    }
}
