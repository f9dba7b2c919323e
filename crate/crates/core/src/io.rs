//! Output tables: `%.17g` CSV, JSON reports and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;
use crate::expansion::{ExpansionReport, ResidueTerm};
use crate::model::Field;
use crate::resonances::{Resonance, ResonanceScan};

/// C's `%.17g`: 17 significant digits, trailing zeros dropped, exponent
/// form when the decimal exponent is below −4 or at least 17.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", x);
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if !(-4..17).contains(&exp) {
        let m = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let prec = (16 - exp) as usize;
        trim_zeros(&format!("{:.*}", prec, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn cjson(z: Complex64) -> Value {
    json!([z.re, z.im])
}

/// `re,im,multiplicity,kind,newton_residual`, one row per zero.
pub fn resonances_csv(rs: &[Resonance]) -> String {
    let mut s = String::from("re,im,multiplicity,kind,newton_residual\n");
    for r in rs {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_g17(r.lambda0.re),
            fmt_g17(r.lambda0.im),
            r.multiplicity,
            r.kind.name(),
            fmt_g17(r.newton_residual)
        ));
    }
    s
}

pub fn resonances_json(scan: &ResonanceScan) -> Value {
    json!({
        "region": scan.region,
        "total_count": scan.total_count,
        "origin_multiplicity": scan.origin_multiplicity,
        "resonances": scan.resonances.iter().map(|r| json!({
            "lambda0": cjson(r.lambda0),
            "multiplicity": r.multiplicity,
            "kind": r.kind.name(),
            "newton_residual": r.newton_residual,
        })).collect::<Vec<_>>(),
    })
}

/// Long format for coupling sweeps: one row per (α, zero).
pub fn sweep_csv(rows: &[(Complex64, Vec<Resonance>)]) -> String {
    let mut s = String::from("alpha_re,alpha_im,lambda_re,lambda_im,multiplicity\n");
    for (a, rs) in rows {
        for r in rs {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt_g17(a.re),
                fmt_g17(a.im),
                fmt_g17(r.lambda0.re),
                fmt_g17(r.lambda0.im),
                r.multiplicity
            ));
        }
    }
    s
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_g17).unwrap_or_default()
}

/// `t,residual_norm,tail_norm,oracle_gap`; missing values are left empty.
pub fn series_csv(report: &ExpansionReport) -> String {
    let mut s = String::from("t,residual_norm,tail_norm,oracle_gap\n");
    for r in &report.series {
        s.push_str(&format!(
            "{},{},{},{}\n",
            fmt_g17(r.t),
            fmt_g17(r.residual_norm),
            opt(r.tail_norm),
            opt(r.oracle_gap)
        ));
    }
    s
}

fn field_json(f: &Field) -> Value {
    json!({
        "x_min": f.grid.x_min,
        "x_max": f.grid.x_max,
        "n_points": f.grid.n_points,
        "dim": f.dim,
        "re": f.values.iter().map(|z| z.re).collect::<Vec<_>>(),
        "im": f.values.iter().map(|z| z.im).collect::<Vec<_>>(),
    })
}

fn term_json(t: &ResidueTerm) -> Value {
    json!({
        "lambda0": cjson(t.lambda0),
        "kappa": t.kappa,
        "multiplicity": t.multiplicity,
        "degree": t.degree(),
        "route": t.route,
        "coefficient_norms": t.coefficients.iter().map(|c| c.l2_norm()).collect::<Vec<_>>(),
        "coefficients": t.coefficients.iter().map(field_json).collect::<Vec<_>>(),
    })
}

pub fn expansion_json(report: &ExpansionReport) -> Value {
    json!({
        "family": report.family,
        "times": report.times,
        "window": report.window,
        "n": report.n,
        "oracle": report.oracle,
        "t_min": report.t_min,
        "fitted_decay_rate": report.fitted_decay_rate,
        "resonances": report.resonances.iter().map(|r| json!({
            "lambda0": cjson(r.lambda0),
            "multiplicity": r.multiplicity,
            "kind": r.kind.name(),
        })).collect::<Vec<_>>(),
        "terms": report.terms.iter().map(term_json).collect::<Vec<_>>(),
        "zero_term": report.zero_term.as_ref().map(|z| json!({
            "order": z.order,
            "odd_part": z.odd_part.iter().map(field_json).collect::<Vec<_>>(),
            "even_part": z.even_part.iter().map(field_json).collect::<Vec<_>>(),
        })),
        "tail": report.tail.as_ref().map(|t| json!({
            "n": t.n,
            "s_max": t.s_max,
            "last_increment": t.last_increment,
        })),
        "series": report.series,
    })
}

/// `x,re,im` for a scalar field (component 0 otherwise).
pub fn snapshot_csv(f: &Field) -> String {
    let mut s = String::from("x,re,im\n");
    for i in 0..f.grid.n_points {
        let z = f.values[i * f.dim];
        s.push_str(&format!("{},{},{}\n", fmt_g17(f.grid.x(i)), fmt_g17(z.re), fmt_g17(z.im)));
    }
    s
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: PathBuf,
    pub out_dir: PathBuf,
    pub tol: Option<f64>,
    pub threads: usize,
    pub version: String,
    pub timings: Vec<(String, f64)>,
    pub files: Vec<String>,
}

/// Collects output files so the manifest names exactly what was written.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    files: Vec<String>,
}

impl OutputDir {
    /// Creates `root`; files listed by a previous run's manifest are removed
    /// so that the new manifest stays complete. Other files are left alone.
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root)?;
        let old = root.join("manifest.json");
        if let Ok(text) = fs::read_to_string(&old) {
            if let Ok(v) = serde_json::from_str::<Value>(&text) {
                for name in v["files"].as_array().into_iter().flatten().filter_map(Value::as_str) {
                    let p = root.join(name);
                    if !name.contains('/') && !name.contains("..") && p.is_file() {
                        fs::remove_file(p)?;
                    }
                }
            }
        }
        Ok(OutputDir {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        fs::write(self.root.join(name), contents)?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, v: &Value) -> Result<()> {
        let s = serde_json::to_string_pretty(v).map_err(|e| crate::Error::Parse(e.to_string()))?;
        self.write(name, &(s + "\n"))
    }

    /// Writes `manifest.json` listing every file, itself included.
    pub fn finish(mut self, mut manifest: RunManifest) -> Result<Vec<String>> {
        self.files.push("manifest.json".into());
        manifest.files = self.files.clone();
        let v = serde_json::to_value(&manifest).map_err(|e| crate::Error::Parse(e.to_string()))?;
        let s = serde_json::to_string_pretty(&v).map_err(|e| crate::Error::Parse(e.to_string()))?;
        fs::write(self.root.join("manifest.json"), s + "\n")?;
        Ok(self.files)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_c() {
        // reference strings from printf("%.17g")
        let cases = [
            (1.0, "1"),
            (0.1, "0.10000000000000001"),
            (-2.5, "-2.5"),
            (1e-5, "1.0000000000000001e-05"),
            (123456789.0, "123456789"),
            (1e17, "1e+17"),
            (0.0001, "0.0001"),
            (1.0 / 3.0, "0.33333333333333331"),
            (6.02214076e23, "6.0221407599999999e+23"),
        ];
        for (x, s) in cases {
            assert_eq!(fmt_g17(x), s, "{x}");
        }
    }

    #[test]
    fn g17_round_trips() {
        for x in [std::f64::consts::PI, 1e-300, -7.25e12, 2.0f64.powi(-40)] {
            assert_eq!(fmt_g17(x).parse::<f64>().unwrap(), x);
        }
    }
}
