//! Parameter files (tagged JSON with complex numbers as [re, im] pairs),
//! point lists (CSV with header `re,im`), and the fixed-width float
//! formatting that keeps outputs byte-identical across runs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;
use symheun::{CanonicalParams, PointConfig, StandardHeunParams, SymmetricHeunParams};

pub type Cpx = [f64; 2];

pub fn to_c(v: Cpx) -> Complex64 {
    Complex64::new(v[0], v[1])
}

pub fn from_c(z: Complex64) -> Cpx {
    [z.re, z.im]
}

/// 17 significant digits: round-trip exact for doubles.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ParamsFile {
    Standard {
        a: Cpx,
        gamma: Cpx,
        delta: Cpx,
        epsilon: Cpx,
        alpha: Cpx,
        beta: Cpx,
        lambda: Cpx,
    },
    Symmetric {
        points: [Cpx; 4],
        chi: [Cpx; 4],
        lambda: Cpx,
    },
    Canonical {
        phi: Cpx,
        chi: [Cpx; 4],
        lambda: Cpx,
        #[serde(skip_serializing_if = "Option::is_none")]
        report: Option<ConvertReport>,
    },
}

/// Extra diagnostics written next to a converted parameter set; ignored on
/// re-ingestion.
#[derive(Debug, Serialize, Deserialize, Clone)]
pub struct ConvertReport {
    pub sigma: [Cpx; 4],
    pub is_circular: bool,
    pub chain: Vec<ChainEntry>,
}

#[derive(Debug, Serialize, Deserialize, Clone)]
pub struct ChainEntry {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<Cpx>,
}

pub enum AnyParams {
    Standard(StandardHeunParams),
    Symmetric(SymmetricHeunParams),
    Canonical(CanonicalParams),
}

pub fn read_params(path: &Path) -> Result<AnyParams, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let file: ParamsFile =
        serde_json::from_str(&text).map_err(|e| format!("bad parameter file: {e}"))?;
    build_params(file)
}

pub fn build_params(file: ParamsFile) -> Result<AnyParams, String> {
    match file {
        ParamsFile::Standard {
            a,
            gamma,
            delta,
            epsilon,
            alpha,
            beta,
            lambda,
        } => StandardHeunParams::new(
            to_c(a),
            to_c(gamma),
            to_c(delta),
            to_c(epsilon),
            to_c(alpha),
            to_c(beta),
            to_c(lambda),
        )
        .map(AnyParams::Standard)
        .map_err(|e| e.to_string()),
        ParamsFile::Symmetric {
            points,
            chi,
            lambda,
        } => {
            let pts = PointConfig::new([
                to_c(points[0]),
                to_c(points[1]),
                to_c(points[2]),
                to_c(points[3]),
            ])
            .map_err(|e| e.to_string())?;
            SymmetricHeunParams::new(
                pts,
                [to_c(chi[0]), to_c(chi[1]), to_c(chi[2]), to_c(chi[3])],
                to_c(lambda),
            )
            .map(AnyParams::Symmetric)
            .map_err(|e| e.to_string())
        }
        ParamsFile::Canonical {
            phi, chi, lambda, ..
        } => CanonicalParams::new(
            to_c(phi),
            [to_c(chi[0]), to_c(chi[1]), to_c(chi[2]), to_c(chi[3])],
            to_c(lambda),
        )
        .map(AnyParams::Canonical)
        .map_err(|e| e.to_string()),
    }
}

pub fn read_canonical(path: &Path) -> Result<CanonicalParams, String> {
    match read_params(path)? {
        AnyParams::Canonical(p) => Ok(p),
        _ => Err("this command needs a canonical parameter file; run `convert` first".into()),
    }
}

pub fn read_points(path: &Path) -> Result<Vec<Complex64>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (ln == 0 && line.eq_ignore_ascii_case("re,im")) {
            continue;
        }
        let mut cols = line.split(',');
        let (re, im) = (cols.next(), cols.next());
        match (re, im) {
            (Some(re), Some(im)) => {
                let re: f64 = re
                    .trim()
                    .parse()
                    .map_err(|e| format!("line {}: {e}", ln + 1))?;
                let im: f64 = im
                    .trim()
                    .parse()
                    .map_err(|e| format!("line {}: {e}", ln + 1))?;
                out.push(Complex64::new(re, im));
            }
            _ => return Err(format!("line {}: expected `re,im`", ln + 1)),
        }
    }
    if out.is_empty() {
        return Err("no points in file".into());
    }
    Ok(out)
}

pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let mut cols = s.split(',');
    match (cols.next(), cols.next(), cols.next()) {
        (Some(re), Some(im), None) => {
            let re: f64 = re
                .trim()
                .parse()
                .map_err(|e| format!("bad complex `{s}`: {e}"))?;
            let im: f64 = im
                .trim()
                .parse()
                .map_err(|e| format!("bad complex `{s}`: {e}"))?;
            Ok(Complex64::new(re, im))
        }
        _ => Err(format!("bad complex `{s}`: expected `re,im`")),
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), String> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| format!("serialization failed: {e}"))?;
    text.push('\n');
    write_text(path, &text)
}
