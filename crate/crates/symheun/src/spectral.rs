//! Two-point boundary machinery on the canonical configuration: singular
//! boundary conditions through Frobenius detachment, the Wronskian matching
//! defect whose zeros in lambda are the eigenvalues, a secant eigenvalue
//! search seeded by a dense grid scan, and the P^{-1/2}-weighted bilinear
//! pairing evaluated with tanh-sinh quadrature.
//!
//! Solutions near an endpoint behave like (z - z_j)^theta; detachment starts
//! the integration a small offset away using the local expansion
//! (z - z_j)^theta (1 + a1 (z - z_j)). The second term is kept because the
//! eigenvalues are required to be offset-stable to 1e-6 relative, which the
//! bare leading term does not reach at admissible offsets.

use num_complex::Complex64;

use crate::algebra::{c64, CanonicalParams};
use crate::error::{Error, Result};
use crate::odeint::integrate_to;

/// Which local exponent a boundary condition selects at its endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExponentChoice {
    Alpha,
    Beta,
    /// The exponent with the larger real part (ties go to alpha).
    Dominant,
}

/// One singular endpoint of a two-point problem.
#[derive(Debug, Clone, Copy)]
pub struct EndpointData {
    /// Singular-point index 0..3 (canonical ordering).
    pub index: usize,
    pub exponent: ExponentChoice,
    /// Detachment distance from the singular point along the contour.
    pub offset: f64,
}

impl EndpointData {
    pub fn new(index: usize, exponent: ExponentChoice, offset: f64) -> Result<Self> {
        if index > 3 {
            return Err(Error::InvalidParams(format!(
                "endpoint index {index} out of range"
            )));
        }
        if !(1e-4..=1e-2).contains(&offset) {
            return Err(Error::InvalidParams(format!(
                "detachment offset {offset:.3e} outside [1e-4, 1e-2]"
            )));
        }
        Ok(Self {
            index,
            exponent,
            offset,
        })
    }
}

/// A contour joining two singular points through interior waypoints.
#[derive(Debug, Clone)]
pub struct TwoPointContour {
    pub from: usize,
    pub to: usize,
    pub via: Vec<Complex64>,
}

impl TwoPointContour {
    pub fn new(from: usize, to: usize, via: Vec<Complex64>) -> Result<Self> {
        if from > 3 || to > 3 || from == to {
            return Err(Error::InvalidParams(
                "contour endpoints must be two distinct indices".into(),
            ));
        }
        if via.is_empty() {
            return Err(Error::InvalidParams(
                "contour needs at least one interior waypoint".into(),
            ));
        }
        Ok(Self { from, to, via })
    }
}

/// One converged eigenvalue.
#[derive(Debug, Clone, Copy)]
pub struct EigenResult {
    pub lambda: Complex64,
    /// Scaled matching defect at the reported eigenvalue.
    pub defect: f64,
    pub iterations: usize,
}

/// Search region for [`find_eigenvalues`].
#[derive(Debug, Clone, Copy)]
pub enum Region {
    RealInterval { min: f64, max: f64, step: f64 },
    Disk { center: Complex64, radius: f64 },
}

/// Selected exponent of `params` at endpoint j, with the integrability bound
/// Re(theta) > -1/4 enforced.
pub fn endpoint_exponent(params: &CanonicalParams, ep: &EndpointData) -> Result<Complex64> {
    let (alpha, beta) = crate::algebra::uniformize_indices(params.chi[ep.index]);
    let theta = match ep.exponent {
        ExponentChoice::Alpha => alpha,
        ExponentChoice::Beta => beta,
        ExponentChoice::Dominant => {
            if beta.re > alpha.re {
                beta
            } else {
                alpha
            }
        }
    };
    if theta.re <= -0.25 {
        return Err(Error::InvalidParams(format!(
            "endpoint exponent {theta} not integrable against P^(-1/2)"
        )));
    }
    Ok(theta)
}

/// Local solution (z - z_j)^theta (1 + a1 (z - z_j)) and its derivative at
/// offset `d` from singular point j; a1 comes from the first Frobenius
/// correction (dropped if the indicial factor nearly vanishes).
fn frobenius_init(
    params: &CanonicalParams,
    j: usize,
    theta: Complex64,
    d: Complex64,
) -> (Complex64, Complex64) {
    let z = params.points().points();
    let q = params.q();
    let (_, p_prime) = params.eval_p(z[j]);
    let p_second = 12.0 * z[j] * z[j] - 4.0 * params.cos2phi();
    let ab = q[j] / p_prime;

    let mut p0 = Complex64::default();
    let mut r0 = Complex64::default();
    for k in 0..4 {
        if k != j {
            p0 += 0.5 / (z[j] - z[k]);
            r0 += q[k] / (z[j] - z[k]);
        }
    }
    let u1 = p_second / (2.0 * p_prime);
    let q_m1 = (params.lambda + r0 - q[j] * u1) / p_prime;
    let indicial_next = (theta + 1.0) * (theta + 0.5) + ab;
    let a1 = if indicial_next.norm() < 1e-8 {
        Complex64::default()
    } else {
        -(p0 * theta + q_m1) / indicial_next
    };

    let d_theta = (theta * d.ln()).exp();
    let f = d_theta * (1.0 + a1 * d);
    let df = theta * d_theta / d + a1 * (theta + 1.0) * d_theta;
    (f, df)
}

/// Full polyline including the detached endpoints.
fn detached_polyline(
    params: &CanonicalParams,
    contour: &TwoPointContour,
    endpoints: &(EndpointData, EndpointData),
) -> Result<Vec<Complex64>> {
    let z = params.points().points();
    let z_from = z[contour.from];
    let z_to = z[contour.to];
    if endpoints.0.index != contour.from || endpoints.1.index != contour.to {
        return Err(Error::InvalidParams(
            "endpoint indices must match the contour".into(),
        ));
    }
    let dir_from = {
        let t = contour.via[0] - z_from;
        t / t.norm()
    };
    let dir_to = {
        let t = *contour.via.last().unwrap() - z_to;
        t / t.norm()
    };
    let mut w = Vec::with_capacity(contour.via.len() + 2);
    w.push(z_from + endpoints.0.offset * dir_from);
    w.extend_from_slice(&contour.via);
    w.push(z_to + endpoints.1.offset * dir_to);
    Ok(w)
}

fn polyline_length(w: &[Complex64]) -> f64 {
    w.windows(2).map(|s| (s[1] - s[0]).norm()).sum()
}

/// sqrt(P) continued by sign-continuity along a polyline from its start
/// (principal value there).
fn sqrt_p_along(params: &CanonicalParams, w: &[Complex64]) -> Complex64 {
    let mut prev = params.eval_p(w[0]).0.sqrt();
    for seg in w.windows(2) {
        for k in 1..=32 {
            let z = seg[0] + (seg[1] - seg[0]) * (k as f64 / 32.0);
            let mut s = params.eval_p(z).0.sqrt();
            if (s - prev).norm() > (s + prev).norm() {
                s = -s;
            }
            prev = s;
        }
    }
    prev
}

fn with_lambda(params: &CanonicalParams, lambda: Complex64) -> Result<CanonicalParams> {
    CanonicalParams::new(params.phi, params.chi, lambda)
}

/// Matching defect P^{1/2}(F_L F_R' - F_R F_L') at the given arclength
/// fraction of the contour, together with its scaled magnitude.
pub fn shoot_defect_at(
    params: &CanonicalParams,
    lambda: Complex64,
    contour: &TwoPointContour,
    endpoints: &(EndpointData, EndpointData),
    fraction: f64,
    tol: f64,
) -> Result<(Complex64, f64)> {
    let p = with_lambda(params, lambda)?;
    let w = detached_polyline(&p, contour, endpoints)?;
    let total = polyline_length(&w);
    let target = fraction.clamp(0.05, 0.95) * total;

    // locate the segment carrying the match point, once
    let mut seg_idx = w.len() - 2;
    let mut remaining = target;
    for (i, seg) in w.windows(2).enumerate() {
        let len = (seg[1] - seg[0]).norm();
        if remaining <= len {
            seg_idx = i;
            break;
        }
        remaining -= len;
    }
    let seg_vec = w[seg_idx + 1] - w[seg_idx];
    let zm = w[seg_idx] + seg_vec * (remaining / seg_vec.norm()).min(1.0);

    let theta_l = endpoint_exponent(&p, &endpoints.0)?;
    let theta_r = endpoint_exponent(&p, &endpoints.1)?;
    let z = p.points().points();

    // left solution forward through w[0..=seg_idx], then to the match point
    let d_l = w[0] - z[contour.from];
    let (mut f, mut df) = frobenius_init(&p, contour.from, theta_l, d_l);
    let mut pos = w[0];
    for &wp in w.iter().take(seg_idx + 1).skip(1) {
        let st = integrate_to(&p, pos, wp, f, df, tol)?;
        f = st.f;
        df = st.df;
        pos = wp;
    }
    let st = integrate_to(&p, pos, zm, f, df, tol)?;
    let (fl, dfl) = (st.f, st.df);

    // right solution backward through w[last..=seg_idx+1], then to the match
    let d_r = *w.last().unwrap() - z[contour.to];
    let (mut f, mut df) = frobenius_init(&p, contour.to, theta_r, d_r);
    let mut pos = *w.last().unwrap();
    for &wp in w.iter().skip(seg_idx + 1).rev().skip(1) {
        let st = integrate_to(&p, pos, wp, f, df, tol)?;
        f = st.f;
        df = st.df;
        pos = wp;
    }
    let st = integrate_to(&p, pos, zm, f, df, tol)?;
    let (fr, dfr) = (st.f, st.df);

    // branch continued from the left detachment point
    let mut left_path: Vec<Complex64> = w[..=seg_idx].to_vec();
    left_path.push(zm);
    let sqrt_p = sqrt_p_along(&p, &left_path);

    let wr = fl * dfr - fr * dfl;
    let scale = (fl * dfr).norm() + (fr * dfl).norm() + 1e-300;
    Ok((sqrt_p * wr, wr.norm() / scale))
}

/// Matching defect at the contour midpoint.
pub fn shoot_defect(
    params: &CanonicalParams,
    lambda: Complex64,
    contour: &TwoPointContour,
    endpoints: &(EndpointData, EndpointData),
) -> Result<Complex64> {
    Ok(shoot_defect_at(params, lambda, contour, endpoints, 0.5, 1e-10)?.0)
}

/// Local minima of the scaled defect over a real-lambda grid; the dense-scan
/// oracle that seeds (and double-checks) the secant iteration.
pub fn grid_scan_minima(
    params: &CanonicalParams,
    contour: &TwoPointContour,
    endpoints: &(EndpointData, EndpointData),
    min: f64,
    max: f64,
    step: f64,
) -> Result<Vec<f64>> {
    if step <= 0.0 || !step.is_finite() || max <= min {
        return Err(Error::InvalidParams("bad scan interval".into()));
    }
    let n = ((max - min) / step).round() as usize;
    let mut vals = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let lam = min + step * k as f64;
        let (_, scaled) = shoot_defect_at(params, c64(lam, 0.0), contour, endpoints, 0.5, 1e-9)?;
        vals.push((lam, scaled));
    }
    let mut minima = Vec::new();
    for k in 1..vals.len().saturating_sub(1) {
        if vals[k].1 < vals[k - 1].1 && vals[k].1 < vals[k + 1].1 {
            minima.push(vals[k].0);
        }
    }
    Ok(minima)
}

fn secant_refine(
    params: &CanonicalParams,
    contour: &TwoPointContour,
    endpoints: &(EndpointData, EndpointData),
    seed: Complex64,
    deflate: &[Complex64],
    tol: f64,
) -> Result<(Complex64, usize)> {
    let objective = |lam: Complex64| -> Result<Complex64> {
        let (d, _) = shoot_defect_at(params, lam, contour, endpoints, 0.5, tol)?;
        let mut v = d;
        for &r in deflate {
            v /= lam - r;
        }
        Ok(v)
    };
    let mut l0 = seed;
    let mut l1 = seed * (1.0 + 1e-3) + c64(0.0, 1e-3);
    let mut d0 = objective(l0)?;
    let mut d1 = objective(l1)?;
    for it in 0..200 {
        if (d1 - d0).norm() == 0.0 {
            return Err(Error::NoConvergence(it));
        }
        let l2 = l1 - d1 * (l1 - l0) / (d1 - d0);
        if !l2.is_finite() {
            return Err(Error::NoConvergence(it));
        }
        l0 = l1;
        d0 = d1;
        l1 = l2;
        d1 = objective(l1)?;
        if (l1 - l0).norm() <= 1e-12 * (1.0 + l1.norm()) {
            return Ok((l1, it + 1));
        }
    }
    Err(Error::NoConvergence(200))
}

fn halved(ep: &EndpointData) -> EndpointData {
    EndpointData {
        index: ep.index,
        exponent: ep.exponent,
        offset: ep.offset / 2.0,
    }
}

/// Relative eigenvalue shift under halving of both detachment offsets.
pub fn eps_stability(
    params: &CanonicalParams,
    contour: &TwoPointContour,
    endpoints: &(EndpointData, EndpointData),
    lambda: Complex64,
) -> Result<f64> {
    let fine = (halved(&endpoints.0), halved(&endpoints.1));
    let (refined, _) = secant_refine(params, contour, &fine, lambda, &[], 1e-10)?;
    Ok((refined - lambda).norm() / lambda.norm().max(1.0))
}

/// Secant eigenvalue search with grid seeding, deflation of found roots, a
/// scaled-defect acceptance of 1e-8, and an offset-halving stability check of
/// 1e-6 relative on every reported eigenvalue. Results are ordered by
/// descending real part; fewer than `count` may come back if the region is
/// exhausted.
pub fn find_eigenvalues(
    params: &CanonicalParams,
    contour: &TwoPointContour,
    endpoints: &(EndpointData, EndpointData),
    region: Region,
    count: usize,
) -> Result<Vec<EigenResult>> {
    let seeds: Vec<Complex64> = match region {
        Region::RealInterval { min, max, step } => {
            let mut m = grid_scan_minima(params, contour, endpoints, min, max, step)?;
            m.sort_by(|a, b| b.partial_cmp(a).unwrap());
            m.into_iter().map(|x| c64(x, 0.0)).collect()
        }
        Region::Disk { center, radius } => {
            let mut s = Vec::new();
            for ir in 1..=3 {
                let r = radius * ir as f64 / 3.0;
                for it in 0..12 {
                    let t = std::f64::consts::TAU * it as f64 / 12.0;
                    s.push(center + c64(r * t.cos(), r * t.sin()));
                }
            }
            s.push(center);
            s
        }
    };

    let in_region = |lam: Complex64| -> bool {
        match region {
            Region::RealInterval { min, max, .. } => lam.re >= min - 1e-9 && lam.re <= max + 1e-9,
            Region::Disk { center, radius } => (lam - center).norm() <= radius * (1.0 + 1e-9),
        }
    };

    let mut found: Vec<EigenResult> = Vec::new();
    let mut roots: Vec<Complex64> = Vec::new();
    for seed in seeds {
        if found.len() >= count {
            break;
        }
        let Ok((lam, iters)) = secant_refine(params, contour, endpoints, seed, &roots, 1e-10)
        else {
            continue;
        };
        if !in_region(lam)
            || roots
                .iter()
                .any(|r| (lam - r).norm() < 1e-6 * (1.0 + lam.norm()))
        {
            continue;
        }
        let (_, scaled) = shoot_defect_at(params, lam, contour, endpoints, 0.5, 1e-10)?;
        if scaled > 1e-8 {
            continue;
        }
        if eps_stability(params, contour, endpoints, lam)? > 1e-6 {
            continue;
        }
        roots.push(lam);
        found.push(EigenResult {
            lambda: lam,
            defect: scaled,
            iterations: iters,
        });
    }
    found.sort_by(|a, b| b.lambda.re.partial_cmp(&a.lambda.re).unwrap());
    Ok(found)
}

// ---------------------------------------------------------------------------
// tanh-sinh quadrature of the P^{-1/2} pairing
// ---------------------------------------------------------------------------

const QUAD_LEVEL_CAP: usize = 12;
const QUAD_T_MAX: f64 = 4.0;

/// One abscissa in endpoint-stable form: position tau in (0,1) along a
/// segment together with 1 - tau, both accurate near their own end.
struct QuadNode {
    tau: f64,
    one_minus_tau: f64,
    weight: f64,
}

fn tanh_sinh_nodes(level: usize) -> Vec<QuadNode> {
    let h = 0.5f64.powi(level as i32);
    let kmax = (QUAD_T_MAX / h) as i64;
    let mut out = Vec::with_capacity((2 * kmax + 1) as usize);
    for k in -kmax..=kmax {
        let t = k as f64 * h;
        let u = 0.5 * std::f64::consts::PI * t.sinh();
        let w = h * 0.5 * std::f64::consts::PI * t.cosh() / u.cosh().powi(2);
        // stable (1 +- x)/2 for x = tanh(u)
        let tau = 1.0 / (1.0 + (-2.0 * u).exp());
        let one_minus_tau = 1.0 / (1.0 + (2.0 * u).exp());
        if w > 1e-300 && tau > 0.0 && one_minus_tau > 0.0 {
            out.push(QuadNode {
                tau,
                one_minus_tau,
                weight: w,
            });
        }
    }
    out
}

/// Values of one boundary solution at every quadrature node of every contour
/// segment, walked once from the left detachment; nodes inside the detachment
/// offsets use the local Frobenius form (scaled at the right end by matching).
fn solution_at_nodes(
    params: &CanonicalParams,
    contour: &TwoPointContour,
    endpoints: &(EndpointData, EndpointData),
    segs: &[(Complex64, Complex64)],
    nodes: &[QuadNode],
    tol: f64,
) -> Result<Vec<Vec<Complex64>>> {
    let z = params.points().points();
    let theta_l = endpoint_exponent(params, &endpoints.0)?;
    let theta_r = endpoint_exponent(params, &endpoints.1)?;
    let z_from = z[contour.from];
    let z_to = z[contour.to];

    let dir_l = {
        let t = segs[0].1 - segs[0].0;
        t / t.norm()
    };
    let det_l = z_from + endpoints.0.offset * dir_l;
    let dir_r = {
        let t = segs.last().unwrap().0 - segs.last().unwrap().1;
        t / t.norm()
    };
    let det_r = z_to + endpoints.1.offset * dir_r;

    let (mut f, mut df) = frobenius_init(params, contour.from, theta_l, det_l - z_from);
    let mut pos = det_l;
    let mut right_scale: Option<Complex64> = None;
    let last = segs.len() - 1;

    let mut values = vec![Vec::with_capacity(nodes.len()); segs.len()];
    for (si, &(a, b)) in segs.iter().enumerate() {
        let seg_vec = b - a;
        for node in nodes {
            let d_from_a = node.tau * seg_vec;
            let d_from_b = -node.one_minus_tau * seg_vec;
            if si == 0 && d_from_a.norm() <= endpoints.0.offset {
                let (fv, _) = frobenius_init(params, contour.from, theta_l, d_from_a);
                values[si].push(fv);
                continue;
            }
            if si == last && d_from_b.norm() <= endpoints.1.offset {
                let scale = match right_scale {
                    Some(s) => s,
                    None => {
                        let st = integrate_to(params, pos, det_r, f, df, tol)?;
                        f = st.f;
                        df = st.df;
                        pos = det_r;
                        let (f_loc, _) = frobenius_init(params, contour.to, theta_r, det_r - z_to);
                        let s = f / f_loc;
                        right_scale = Some(s);
                        s
                    }
                };
                let (fv, _) = frobenius_init(params, contour.to, theta_r, d_from_b);
                values[si].push(scale * fv);
                continue;
            }
            let target = a + d_from_a;
            let st = integrate_to(params, pos, target, f, df, tol)?;
            f = st.f;
            df = st.df;
            pos = target;
            values[si].push(f);
        }
    }
    Ok(values)
}

/// P^{1/2} at every node, sign-continued along the contour, with P formed as
/// (z - z_endpoint) * reduced-product near the singular ends so the endpoint
/// offsets never round away.
fn sqrt_p_at_nodes(
    params: &CanonicalParams,
    contour: &TwoPointContour,
    segs: &[(Complex64, Complex64)],
    nodes: &[QuadNode],
) -> Vec<Vec<Complex64>> {
    let z = params.points().points();
    let last = segs.len() - 1;
    let mut prev: Option<Complex64> = None;
    let mut out = vec![Vec::with_capacity(nodes.len()); segs.len()];
    for (si, &(a, b)) in segs.iter().enumerate() {
        let seg_vec = b - a;
        for node in nodes {
            let d_from_a = node.tau * seg_vec;
            let d_from_b = -node.one_minus_tau * seg_vec;
            let p = if si == 0 && d_from_a.norm() < 1e-3 {
                let j = contour.from;
                let zp = z[j] + d_from_a;
                let mut red = Complex64::new(1.0, 0.0);
                for k in 0..4 {
                    if k != j {
                        red *= zp - z[k];
                    }
                }
                d_from_a * red
            } else if si == last && d_from_b.norm() < 1e-3 {
                let j = contour.to;
                let zp = z[j] + d_from_b;
                let mut red = Complex64::new(1.0, 0.0);
                for k in 0..4 {
                    if k != j {
                        red *= zp - z[k];
                    }
                }
                d_from_b * red
            } else {
                params.eval_p(a + d_from_a).0
            };
            let mut s = p.sqrt();
            if let Some(pv) = prev {
                if (s - pv).norm() > (s + pv).norm() {
                    s = -s;
                }
            }
            prev = Some(s);
            out[si].push(s);
        }
    }
    out
}

/// All three bilinear integrals (I_ab, I_aa, I_bb) of the pairing
/// int F_a F_b P^{-1/2} dz along the contour, refined level by level until
/// the change drops below `tol` relative.
pub fn bilinear_integrals(
    params: &CanonicalParams,
    lambda_a: Complex64,
    lambda_b: Complex64,
    contour: &TwoPointContour,
    endpoints: &(EndpointData, EndpointData),
    tol: f64,
) -> Result<(Complex64, Complex64, Complex64)> {
    let pa = with_lambda(params, lambda_a)?;
    let pb = with_lambda(params, lambda_b)?;
    let z = params.points().points();
    let mut pts = vec![z[contour.from]];
    pts.extend_from_slice(&contour.via);
    pts.push(z[contour.to]);
    let segs: Vec<(Complex64, Complex64)> = pts.windows(2).map(|w| (w[0], w[1])).collect();

    let same = (lambda_a - lambda_b).norm() == 0.0;
    let mut prev: Option<(Complex64, Complex64, Complex64)> = None;
    for level in 3..=QUAD_LEVEL_CAP {
        let nodes = tanh_sinh_nodes(level);
        let fa = solution_at_nodes(&pa, contour, endpoints, &segs, &nodes, 1e-11)?;
        let fb = if same {
            None
        } else {
            Some(solution_at_nodes(
                &pb, contour, endpoints, &segs, &nodes, 1e-11,
            )?)
        };
        let sq = sqrt_p_at_nodes(params, contour, &segs, &nodes);

        let mut i_ab = Complex64::default();
        let mut i_aa = Complex64::default();
        let mut i_bb = Complex64::default();
        for (si, &(a, b)) in segs.iter().enumerate() {
            let jac = 0.5 * (b - a);
            let mut s_ab = Complex64::default();
            let mut s_aa = Complex64::default();
            let mut s_bb = Complex64::default();
            for (ni, node) in nodes.iter().enumerate() {
                let va = fa[si][ni];
                let vb = match &fb {
                    Some(fb) => fb[si][ni],
                    None => va,
                };
                let w_over_sqrt = node.weight / sq[si][ni];
                s_ab += va * vb * w_over_sqrt;
                s_aa += va * va * w_over_sqrt;
                s_bb += vb * vb * w_over_sqrt;
            }
            i_ab += jac * s_ab;
            i_aa += jac * s_aa;
            i_bb += jac * s_bb;
        }
        if let Some((p_ab, p_aa, p_bb)) = prev {
            let rel = ((i_ab - p_ab).norm() / (1.0 + i_ab.norm()))
                .max((i_aa - p_aa).norm() / (1.0 + i_aa.norm()))
                .max((i_bb - p_bb).norm() / (1.0 + i_bb.norm()));
            if rel <= tol {
                return Ok((i_ab, i_aa, i_bb));
            }
        }
        prev = Some((i_ab, i_aa, i_bb));
    }
    Err(Error::QuadratureNotConverged(QUAD_LEVEL_CAP))
}

/// The pairing int F_{lambda_a} F_{lambda_b} P^{-1/2} dz; with
/// lambda_a = lambda_b this is the squared norm used as the normalizer.
pub fn orthogonality_integral(
    params: &CanonicalParams,
    lambda_a: Complex64,
    lambda_b: Complex64,
    contour: &TwoPointContour,
    endpoints: &(EndpointData, EndpointData),
    tol: f64,
) -> Result<Complex64> {
    Ok(bilinear_integrals(params, lambda_a, lambda_b, contour, endpoints, tol)?.0)
}

/// Normalized smallness |I_ab| / sqrt(|I_aa| |I_bb|).
pub fn orthogonality_ratio(
    params: &CanonicalParams,
    lambda_a: Complex64,
    lambda_b: Complex64,
    contour: &TwoPointContour,
    endpoints: &(EndpointData, EndpointData),
    tol: f64,
) -> Result<f64> {
    let (i_ab, i_aa, i_bb) =
        bilinear_integrals(params, lambda_a, lambda_b, contour, endpoints, tol)?;
    Ok(i_ab.norm() / (i_aa.norm() * i_bb.norm()).sqrt().max(1e-300))
}

/// The fixed configuration used by the golden spectral tests: phi = pi/3,
/// chi = (pi/4, pi/6, pi/8, pi/10), contour from z_4 to z_1 through z = 1.
pub fn golden_configuration() -> (CanonicalParams, TwoPointContour) {
    use std::f64::consts::PI;
    let params = CanonicalParams::new(
        c64(PI / 3.0, 0.0),
        [
            c64(PI / 4.0, 0.0),
            c64(PI / 6.0, 0.0),
            c64(PI / 8.0, 0.0),
            c64(PI / 10.0, 0.0),
        ],
        Complex64::default(),
    )
    .unwrap();
    let contour = TwoPointContour::new(3, 0, vec![c64(1.0, 0.0)]).unwrap();
    (params, contour)
}

/// Default endpoints (dominant exponents) at a common offset.
pub fn golden_endpoints(offset: f64) -> (EndpointData, EndpointData) {
    (
        EndpointData {
            index: 3,
            exponent: ExponentChoice::Dominant,
            offset,
        },
        EndpointData {
            index: 0,
            exponent: ExponentChoice::Dominant,
            offset,
        },
    )
}
