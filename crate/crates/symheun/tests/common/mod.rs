//! Deterministic sample generators shared by the integration suites.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use symheun::{CanonicalParams, Generator, PointConfig, StandardHeunParams, SymmetricHeunParams};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Circular-case canonical record: phi in (0.2, 1.37), real chi in (0, pi/2),
/// |lambda| <= 5.
pub fn random_circular_canonical(rng: &mut ChaCha8Rng) -> CanonicalParams {
    let phi = c(rng.gen_range(0.2..1.37), 0.0);
    let chi = [
        c(rng.gen_range(0.01..std::f64::consts::FRAC_PI_2), 0.0),
        c(rng.gen_range(0.01..std::f64::consts::FRAC_PI_2), 0.0),
        c(rng.gen_range(0.01..std::f64::consts::FRAC_PI_2), 0.0),
        c(rng.gen_range(0.01..std::f64::consts::FRAC_PI_2), 0.0),
    ];
    let lambda = c(rng.gen_range(-3.5..3.5), rng.gen_range(-3.5..3.5));
    CanonicalParams::new(phi, chi, lambda).unwrap()
}

/// Four well-separated nonzero points with moderate complex chi and lambda.
pub fn random_symmetric(rng: &mut ChaCha8Rng) -> SymmetricHeunParams {
    let points = loop {
        let mut pts = [Complex64::default(); 4];
        for p in &mut pts {
            let r = rng.gen_range(0.4..2.2);
            let t = rng.gen_range(0.0..std::f64::consts::TAU);
            *p = c(r * t.cos(), r * t.sin());
        }
        let mut ok = true;
        for j in 0..4 {
            for k in (j + 1)..4 {
                if (pts[j] - pts[k]).norm() < 0.35 {
                    ok = false;
                }
            }
        }
        if ok {
            break PointConfig::new(pts).unwrap();
        }
    };
    let mut chi = [Complex64::default(); 4];
    for x in &mut chi {
        *x = c(rng.gen_range(0.1..1.4), rng.gen_range(-0.3..0.3));
    }
    let lambda = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    SymmetricHeunParams::new(points, chi, lambda).unwrap()
}

/// Real a in (1.5, 10), exponents bounded by 2, constraint satisfied.
pub fn random_standard(rng: &mut ChaCha8Rng) -> StandardHeunParams {
    loop {
        let a = c(rng.gen_range(1.5..10.0), 0.0);
        let gamma = c(rng.gen_range(-1.5..1.5), 0.0);
        let delta = c(rng.gen_range(-1.5..1.5), 0.0);
        let alpha = c(rng.gen_range(-1.5..1.5), 0.0);
        let beta = c(rng.gen_range(-1.5..1.5), 0.0);
        let epsilon = alpha + beta + Complex64::new(1.0, 0.0) - gamma - delta;
        if epsilon.norm() > 2.0 {
            continue;
        }
        let lambda = c(rng.gen_range(-2.0..2.0), 0.0);
        if let Ok(p) = StandardHeunParams::new(a, gamma, delta, epsilon, alpha, beta, lambda) {
            return p;
        }
    }
}

/// A random generator chain of the given maximal length that stays safe to
/// act with (inversion only when every point is well away from the origin).
pub fn random_chain(
    rng: &mut ChaCha8Rng,
    start: &SymmetricHeunParams,
    max_len: usize,
) -> (Vec<Generator>, SymmetricHeunParams) {
    let len = rng.gen_range(1..=max_len);
    let mut chain = Vec::with_capacity(len);
    let mut current = start.clone();
    for _ in 0..len {
        let kind = rng.gen_range(0..3u8);
        let g = match kind {
            0 => Generator::Translate(c(rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8))),
            1 => {
                let mag = rng.gen_range(0.5..1.8);
                let t = rng.gen_range(0.0..std::f64::consts::TAU);
                Generator::Dilate(c(mag * t.cos(), mag * t.sin()))
            }
            _ => {
                let scale = current.points.scale();
                let min = current
                    .points
                    .points()
                    .iter()
                    .map(|z| z.norm())
                    .fold(f64::INFINITY, f64::min);
                if min > 0.25 * scale {
                    Generator::Invert
                } else {
                    Generator::Translate(c(rng.gen_range(-0.8..0.8), 0.0))
                }
            }
        };
        current = symheun::act_generator(&current, &g).expect("safe generator");
        chain.push(g);
    }
    (chain, current)
}

/// A disk (center, radius) keeping `margin` clearance from every listed
/// point; radius shrinks if placement is hard.
pub fn safe_disk(rng: &mut ChaCha8Rng, avoid: &[Complex64], margin: f64) -> (Complex64, f64) {
    let mut radius = 0.4;
    for attempt in 0..400 {
        if attempt > 0 && attempt % 80 == 0 {
            radius *= 0.7;
        }
        let center = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        if avoid
            .iter()
            .all(|&p| (center - p).norm() >= radius + margin)
        {
            return (center, radius);
        }
    }
    panic!("could not place a probe disk");
}
