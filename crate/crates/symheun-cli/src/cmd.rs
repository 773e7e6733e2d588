//! Command implementations. Numerical failures bubble up as
//! [`CmdError::Numerical`] so main can map them to the right exit code.

use num_complex::Complex64;
use serde::Serialize;
use std::path::Path;
use symheun::{
    act_generator, batch, canonicalize, elementary_symmetric, eval_series, integrate_to,
    invert_canonical, is_circular, laurent_solution, nu_transform, relocate_infinity,
    residual_norm, rho_set, taylor_coefficients, taylor_cross_check, verify_recurrence, wronskian,
    CanonicalParams, Engine, EngineDisagreement, Evaluation, Generator, GeneratorChain, HeunOde,
    Region, SeriesSolution, TwoPointContour,
};

use crate::io::{self, AnyParams, ChainEntry, ConvertReport, Cpx, ParamsFile};

pub enum CmdError {
    BadInput(String),
    Numerical(String),
    CheckFailed(usize),
}

impl From<symheun::Error> for CmdError {
    fn from(e: symheun::Error) -> Self {
        CmdError::Numerical(e.to_string())
    }
}

type CmdResult = Result<(), CmdError>;

fn bad(msg: impl Into<String>) -> CmdError {
    CmdError::BadInput(msg.into())
}

fn chain_entries(chain: &GeneratorChain) -> Vec<ChainEntry> {
    chain
        .0
        .iter()
        .map(|g| match *g {
            Generator::Translate(z) => ChainEntry {
                kind: "translate".into(),
                value: Some(io::from_c(z)),
            },
            Generator::Dilate(t) => ChainEntry {
                kind: "dilate".into(),
                value: Some(io::from_c(t)),
            },
            Generator::Invert => ChainEntry {
                kind: "invert".into(),
                value: None,
            },
        })
        .collect()
}

/// Reduce any ingested record to canonical form plus the chain that got it
/// there.
fn to_canonical(params: AnyParams) -> Result<(CanonicalParams, GeneratorChain), CmdError> {
    match params {
        AnyParams::Standard(std_p) => {
            let (fp, _) = relocate_infinity(&std_p)?;
            let (sym, _) = nu_transform(&fp)?;
            Ok(canonicalize(&sym)?)
        }
        AnyParams::Symmetric(sym) => Ok(canonicalize(&sym)?),
        AnyParams::Canonical(c) => Ok((c, GeneratorChain::default())),
    }
}

pub fn convert(params_path: &Path, out: &Path) -> CmdResult {
    let ingested = io::read_params(params_path).map_err(bad)?;
    let (canon, chain) = to_canonical(ingested)?;
    let sigma = elementary_symmetric(canon.points().points());
    let circular = is_circular(canon.points(), 1e-9)?;
    let file = ParamsFile::Canonical {
        phi: io::from_c(canon.phi),
        chi: [
            io::from_c(canon.chi[0]),
            io::from_c(canon.chi[1]),
            io::from_c(canon.chi[2]),
            io::from_c(canon.chi[3]),
        ],
        lambda: io::from_c(canon.lambda),
        report: Some(ConvertReport {
            sigma: [
                io::from_c(sigma[0]),
                io::from_c(sigma[1]),
                io::from_c(sigma[2]),
                io::from_c(sigma[3]),
            ],
            is_circular: circular,
            chain: chain_entries(&chain),
        }),
    };
    io::write_json(out, &file).map_err(CmdError::Numerical)?;
    println!(
        "converted: phi = {}, lambda = {}, circular = {}",
        canon.phi, canon.lambda, circular
    );
    Ok(())
}

/// Ray continuation into the near-circle annulus: start from the series at
/// radius 0.8 and integrate straight to the target, rotating the launch angle
/// by +0.07 (at most 5 tries) while the segment passes within 0.1 of a
/// singular point.
fn annulus_eval(
    params: &CanonicalParams,
    sol: &SeriesSolution,
    z: Complex64,
    tol: f64,
) -> Result<Evaluation, CmdError> {
    let base_angle = z.arg();
    for k in 0..5 {
        let theta = base_angle + 0.07 * k as f64;
        let start = 0.8 * Complex64::new(theta.cos(), theta.sin());
        let clear = params.points().points().iter().all(|&s| {
            let seg = z - start;
            let t = (((s - start).re * seg.re + (s - start).im * seg.im) / seg.norm_sqr())
                .clamp(0.0, 1.0);
            (s - (start + t * seg)).norm() >= 0.1
        });
        if !clear {
            continue;
        }
        let e0 = eval_series(sol, start)?;
        let st = integrate_to(params, start, z, e0.f, e0.df, tol)?;
        let (p, q) = params.ode_coefficients(st.z);
        let ddf = -p * st.df - q * st.f;
        return Ok(Evaluation {
            f: st.f,
            df: st.df,
            ddf,
            tail_estimate: e0.tail_estimate.max(tol),
        });
    }
    Err(CmdError::Numerical(format!(
        "no launch ray toward {z} clears the singular points"
    )))
}

#[allow(clippy::too_many_arguments)]
pub fn eval(
    params_path: &Path,
    points_path: &Path,
    out: &Path,
    tol: f64,
    max_terms: usize,
    f0: Complex64,
    f1: Complex64,
) -> CmdResult {
    let params = io::read_canonical(params_path).map_err(bad)?;
    let points = io::read_points(points_path).map_err(bad)?;
    let taylor = taylor_coefficients(&params, (f0, f1), max_terms, Engine::Oracle)?;
    let laurent = laurent_solution(&params, (f0, f1), max_terms)?;

    // batch over the points; order of the output rows follows the input
    let rows: Vec<Result<(Complex64, Evaluation, f64), CmdError>> =
        batch::par_map_indexed(points.len(), |i| {
            let z = points[i];
            let e = if z.norm() <= 0.95 {
                eval_series(&taylor, z).map_err(CmdError::from)?
            } else if z.norm() >= 1.05 {
                eval_series(&laurent, z).map_err(CmdError::from)?
            } else {
                annulus_eval(&params, &taylor, z, tol)?
            };
            let res = residual_norm(&params, e.f, e.df, e.ddf, z)?;
            Ok((z, e, res))
        });

    let mut text = String::from("re,im,F_re,F_im,dF_re,dF_im,tail,residual\n");
    for row in rows {
        match row {
            Ok((z, e, res)) => {
                text.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    io::fmt_f64(z.re),
                    io::fmt_f64(z.im),
                    io::fmt_f64(e.f.re),
                    io::fmt_f64(e.f.im),
                    io::fmt_f64(e.df.re),
                    io::fmt_f64(e.df.im),
                    io::fmt_f64(e.tail_estimate),
                    io::fmt_f64(res),
                ));
            }
            Err(e) => return Err(e),
        }
    }
    io::write_text(out, &text).map_err(CmdError::Numerical)?;
    println!("evaluated {} points -> {}", points.len(), out.display());
    Ok(())
}

#[derive(Serialize)]
struct ErratumOut {
    first_n: usize,
    first_offset: usize,
    paper_value: Cpx,
    oracle_value: Cpx,
    failing_offsets: Vec<usize>,
    max_coefficient_deviation: f64,
}

impl From<&EngineDisagreement> for ErratumOut {
    fn from(e: &EngineDisagreement) -> Self {
        Self {
            first_n: e.first_n,
            first_offset: e.first_offset,
            paper_value: io::from_c(e.paper_value),
            oracle_value: io::from_c(e.oracle_value),
            failing_offsets: e.failing_offsets.clone(),
            max_coefficient_deviation: e.max_coefficient_deviation,
        }
    }
}

#[derive(Serialize)]
struct SeriesOut {
    engine: String,
    n_max: usize,
    init: [Cpx; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    coefficients: Option<Vec<Cpx>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coefficients_paper: Option<Vec<Cpx>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coefficients_oracle: Option<Vec<Cpx>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_discrepancy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    erratum: Option<ErratumOut>,
}

fn coeffs_out(sol: &SeriesSolution) -> Vec<Cpx> {
    sol.coeffs.iter().map(|&z| io::from_c(z)).collect()
}

fn series_payload(
    params: &CanonicalParams,
    engine: &str,
    n: usize,
    init: (Complex64, Complex64),
) -> Result<(SeriesOut, bool), CmdError> {
    let init_out = [io::from_c(init.0), io::from_c(init.1)];
    match engine {
        "paper" | "oracle" => {
            let eng = if engine == "paper" {
                Engine::Paper
            } else {
                Engine::Oracle
            };
            let sol = taylor_coefficients(params, init, n, eng)?;
            Ok((
                SeriesOut {
                    engine: engine.into(),
                    n_max: n,
                    init: init_out,
                    coefficients: Some(coeffs_out(&sol)),
                    coefficients_paper: None,
                    coefficients_oracle: None,
                    max_discrepancy: None,
                    erratum: None,
                },
                false,
            ))
        }
        "both" => {
            let (oracle_sol, erratum) = taylor_cross_check(params, init, n)?;
            let paper_sol = taylor_coefficients(params, init, n, Engine::Paper)?;
            let mut maxdev = 0.0f64;
            for k in 0..=n {
                maxdev = maxdev.max(
                    (paper_sol.coeffs[k] - oracle_sol.coeffs[k]).norm()
                        / oracle_sol.coeffs[k].norm().max(1.0),
                );
            }
            let warn = erratum.is_some();
            Ok((
                SeriesOut {
                    engine: "both".into(),
                    n_max: n,
                    init: init_out,
                    coefficients: None,
                    coefficients_paper: Some(coeffs_out(&paper_sol)),
                    coefficients_oracle: Some(coeffs_out(&oracle_sol)),
                    max_discrepancy: Some(maxdev),
                    erratum: erratum.as_ref().map(ErratumOut::from),
                },
                warn,
            ))
        }
        other => Err(bad(format!("unknown engine `{other}`"))),
    }
}

pub fn series(
    params_path: &Path,
    out: &Path,
    n: usize,
    engine: &str,
    f0: Complex64,
    f1: Complex64,
) -> CmdResult {
    let params = io::read_canonical(params_path).map_err(bad)?;
    let (payload, warn) = series_payload(&params, engine, n, (f0, f1))?;
    io::write_json(out, &payload).map_err(CmdError::Numerical)?;
    if warn {
        println!("warning: engines disagree; erratum block written (oracle engine governs)");
    }
    println!("series dump -> {}", out.display());
    Ok(())
}

#[derive(Serialize)]
struct LaurentOut {
    inverted_phi: Cpx,
    inverted_chi: [Cpx; 4],
    inverted_lambda: Cpx,
    #[serde(flatten)]
    series: SeriesOut,
}

pub fn laurent(
    params_path: &Path,
    out: &Path,
    n: usize,
    engine: &str,
    f0: Complex64,
    f1: Complex64,
) -> CmdResult {
    let params = io::read_canonical(params_path).map_err(bad)?;
    let inverted = invert_canonical(&params)?;
    let (payload, warn) = series_payload(&inverted, engine, n, (f0, f1))?;
    let out_payload = LaurentOut {
        inverted_phi: io::from_c(inverted.phi),
        inverted_chi: [
            io::from_c(inverted.chi[0]),
            io::from_c(inverted.chi[1]),
            io::from_c(inverted.chi[2]),
            io::from_c(inverted.chi[3]),
        ],
        inverted_lambda: io::from_c(inverted.lambda),
        series: payload,
    };
    io::write_json(out, &out_payload).map_err(CmdError::Numerical)?;
    if warn {
        println!("warning: engines disagree; erratum block written (oracle engine governs)");
    }
    println!("laurent dump -> {}", out.display());
    Ok(())
}

pub struct ContourSpec {
    pub from: usize,
    pub to: usize,
    pub via: Vec<Complex64>,
    pub offset: f64,
}

fn build_contour(
    spec: &ContourSpec,
) -> Result<
    (
        TwoPointContour,
        (symheun::EndpointData, symheun::EndpointData),
    ),
    CmdError,
> {
    if spec.from == 0 || spec.from > 4 || spec.to == 0 || spec.to > 4 {
        return Err(bad("contour endpoints are 1-based indices in 1..=4"));
    }
    let contour = TwoPointContour::new(spec.from - 1, spec.to - 1, spec.via.clone())?;
    let endpoints = (
        symheun::EndpointData::new(
            spec.from - 1,
            symheun::ExponentChoice::Dominant,
            spec.offset,
        )?,
        symheun::EndpointData::new(spec.to - 1, symheun::ExponentChoice::Dominant, spec.offset)?,
    );
    Ok((contour, endpoints))
}

#[derive(Serialize)]
struct EigenOut {
    lambda: Cpx,
    defect: f64,
    iterations: usize,
}

pub fn eigen(
    params_path: &Path,
    out: &Path,
    lambda_min: f64,
    lambda_max: f64,
    step: f64,
    count: usize,
    spec: &ContourSpec,
) -> CmdResult {
    let params = io::read_canonical(params_path).map_err(bad)?;
    let (contour, endpoints) = build_contour(spec)?;
    let region = Region::RealInterval {
        min: lambda_min,
        max: lambda_max,
        step,
    };
    let found = symheun::find_eigenvalues(&params, &contour, &endpoints, region, count)?;
    let rows: Vec<EigenOut> = found
        .iter()
        .map(|e| EigenOut {
            lambda: io::from_c(e.lambda),
            defect: e.defect,
            iterations: e.iterations,
        })
        .collect();
    io::write_json(out, &rows).map_err(CmdError::Numerical)?;
    for e in &found {
        println!("eigenvalue {}  (defect {:.3e})", e.lambda, e.defect);
    }
    println!("{} eigenvalue(s) -> {}", found.len(), out.display());
    Ok(())
}

#[derive(Serialize)]
struct OrthoPair {
    i: usize,
    j: usize,
    integral: Cpx,
    ratio: f64,
}

#[derive(Serialize)]
struct OrthoOut {
    lambdas: Vec<Cpx>,
    norms_squared: Vec<Cpx>,
    pairs: Vec<OrthoPair>,
    /// P^{-1/2} branch convention used along the contour.
    branch: &'static str,
}

pub fn ortho(
    params_path: &Path,
    out: &Path,
    lambdas: &[Complex64],
    spec: &ContourSpec,
    tol: f64,
) -> CmdResult {
    if lambdas.len() < 2 {
        return Err(bad("need at least two lambda values"));
    }
    let params = io::read_canonical(params_path).map_err(bad)?;
    let (contour, endpoints) = build_contour(spec)?;
    let mut norms = Vec::with_capacity(lambdas.len());
    for &l in lambdas {
        let (n, _, _) = symheun::bilinear_integrals(&params, l, l, &contour, &endpoints, tol)?;
        norms.push(n);
    }
    let mut pairs = Vec::new();
    for i in 0..lambdas.len() {
        for j in (i + 1)..lambdas.len() {
            let (integral, n_i, n_j) = symheun::bilinear_integrals(
                &params, lambdas[i], lambdas[j], &contour, &endpoints, tol,
            )?;
            let ratio = integral.norm() / (n_i.norm() * n_j.norm()).sqrt().max(1e-300);
            pairs.push(OrthoPair {
                i,
                j,
                integral: io::from_c(integral),
                ratio,
            });
        }
    }
    let payload = OrthoOut {
        lambdas: lambdas.iter().map(|&l| io::from_c(l)).collect(),
        norms_squared: norms.iter().map(|&n| io::from_c(n)).collect(),
        pairs,
        branch: "principal value at the contour start, sign-continued along the contour",
    };
    io::write_json(out, &payload).map_err(CmdError::Numerical)?;
    println!(
        "{} pairing(s) -> {}",
        lambdas.len() * (lambdas.len() - 1) / 2,
        out.display()
    );
    Ok(())
}

/// The self-check suite: one line per invariant, nonzero exit on failure.
pub fn check() -> CmdResult {
    let mut failures = 0usize;
    let mut run = |name: &str, ok: bool| {
        println!("{} - {name}", if ok { "ok  " } else { "FAIL" });
        if !ok {
            failures += 1;
        }
    };
    let c = Complex64::new;
    let r = |x: f64| c(x, 0.0);

    // constant configuration: sin(2 chi) = 0, lambda = 0 -> F identically f0
    let constant = CanonicalParams::new(
        r(0.9),
        [
            r(0.0),
            r(std::f64::consts::FRAC_PI_2),
            r(std::f64::consts::PI),
            r(0.0),
        ],
        r(0.0),
    )
    .unwrap();
    let sol = taylor_coefficients(&constant, (r(1.0), r(0.0)), 64, Engine::Oracle).unwrap();
    run(
        "constant configuration yields the constant series",
        sol.coeffs[1..].iter().all(|v| v.norm() < 1e-14),
    );

    let sample =
        CanonicalParams::new(r(0.7), [r(0.3), r(0.8), r(1.1), r(0.5)], c(1.3, 0.4)).unwrap();

    let rho = rho_set(sample.phi, &sample.chi);
    let ident = c(0.0, 0.25) * sample.sin2phi() * rho.rho2;
    run(
        "canonical identity sum q_j/z_j = (i/4) sin(2 phi) rho2",
        (sample.sum_q_over_z() - ident).norm() <= 1e-12 * ident.norm().max(1.0),
    );

    let (oracle_sol, erratum) = taylor_cross_check(&sample, (r(1.0), r(0.0)), 120).unwrap();
    run(
        "dual-engine cross-check provides a governing oracle series",
        verify_recurrence(&oracle_sol).unwrap() < 1e-12,
    );
    if let Some(e) = erratum {
        println!(
            "note - engine disagreement documented (first failing r-offset {} at n = {})",
            e.first_offset, e.first_n
        );
    }

    let inv2 = invert_canonical(&invert_canonical(&sample).unwrap()).unwrap();
    run(
        "canonical inversion is an involution",
        (inv2.lambda - sample.lambda).norm() <= 1e-13 * sample.lambda.norm().max(1.0),
    );

    let once = act_generator(&sample.to_symmetric(), &Generator::Invert).unwrap();
    let twice = act_generator(&once, &Generator::Invert).unwrap();
    run(
        "general inversion law is an involution",
        (twice.lambda - sample.lambda).norm() <= 1e-12 * sample.lambda.norm().max(1.0),
    );

    let (canon, _) = canonicalize(&sample.to_symmetric()).unwrap();
    let sigma = elementary_symmetric(canon.points().points());
    run(
        "canonical placement satisfies sigma1 = sigma3 = 0, sigma4 = 1",
        sigma[0].norm() <= 1e-12 && sigma[2].norm() <= 1e-12 && (sigma[3] - 1.0).norm() <= 1e-12,
    );

    let s1 = taylor_coefficients(&sample, (r(1.0), r(0.0)), 300, Engine::Oracle).unwrap();
    let s2 = taylor_coefficients(&sample, (r(0.0), r(1.0)), 300, Engine::Oracle).unwrap();
    let w0 = wronskian(&sample, &s1, &s2, r(0.0)).unwrap();
    let w1 = wronskian(&sample, &s1, &s2, r(0.55)).unwrap();
    run(
        "weighted wronskian is constant",
        (w1 - w0).norm() <= 1e-9 * w0.norm(),
    );

    let e_half = eval_series(&s1, r(0.5)).unwrap();
    let transported = integrate_to(&sample, r(0.0), r(0.5), r(1.0), r(0.0), 1e-11).unwrap();
    run(
        "series matches adaptive integration at z = 1/2",
        (transported.f - e_half.f).norm() <= 1e-8 * e_half.f.norm().max(1.0),
    );

    let lau = laurent_solution(&sample, (r(1.0), r(0.0)), 300).unwrap();
    let z2 = c(1.2, 1.6); // |z| = 2
    let ev = eval_series(&lau, z2).unwrap();
    let res = residual_norm(&sample, ev.f, ev.df, ev.ddf, z2).unwrap();
    run(
        "laurent companion solves the original equation at |z| = 2",
        res <= 1e-8,
    );

    if failures > 0 {
        return Err(CmdError::CheckFailed(failures));
    }
    println!("all checks passed");
    Ok(())
}
