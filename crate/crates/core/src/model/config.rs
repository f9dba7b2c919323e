//! Problem documents: JSON in, validated [`ProblemSpec`] out, and back.

use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::model::contour::ContourSpec;
use crate::model::grid::UniformGrid;
use crate::model::potential::PotentialSpec;
use crate::model::state::Shape;
use crate::model::{Family, ScanRegion};

#[derive(Clone, Debug, PartialEq)]
pub struct StateSpec {
    pub shape: Shape,
    pub direction: Option<Vec<Complex64>>,
}

/// Coupling sweep for `scan-alpha`: `steps` values from `from` to `to` inclusive.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaSweep {
    pub from: Complex64,
    pub to: Complex64,
    pub steps: usize,
}

impl AlphaSweep {
    pub fn values(&self) -> Vec<Complex64> {
        if self.steps == 1 {
            return vec![self.from];
        }
        (0..self.steps)
            .map(|k| self.from + (self.to - self.from) * (k as f64 / (self.steps - 1) as f64))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub potential: PotentialSpec,
    pub grid: UniformGrid,
    pub contour: ContourSpec,
    pub state: StateSpec,
    pub window: usize,
    pub scan: Option<ScanRegion>,
    pub times: Vec<f64>,
    pub family: Family,
    pub n: Option<usize>,
    pub sweep: Option<AlphaSweep>,
}

impl ProblemSpec {
    /// Scan region from the document, or a default box right of the shifted curve.
    pub fn scan_region(&self) -> ScanRegion {
        self.scan.clone().unwrap_or(ScanRegion {
            re_min: -3.0,
            re_max: 4.0,
            im_min: -6.0,
            im_max: 6.0,
        })
    }
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::config(join(path, key), "missing field"))
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| Error::config(path, "expected an object"))
}

fn number(v: &Value, path: &str) -> Result<f64> {
    let x = v
        .as_f64()
        .ok_or_else(|| Error::config(path, "expected a number"))?;
    if !x.is_finite() {
        return Err(Error::config(path, "must be finite"));
    }
    Ok(x)
}

fn integer(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::config(path, "expected a non-negative integer"))
}

/// A complex number written as `x`, `[re, im]` or `{"re": .., "im": ..}`.
pub fn complex(v: &Value, path: &str) -> Result<Complex64> {
    match v {
        Value::Number(_) => Ok(Complex64::new(number(v, path)?, 0.0)),
        Value::Array(a) if a.len() == 2 => Ok(Complex64::new(
            number(&a[0], &format!("{path}[0]"))?,
            number(&a[1], &format!("{path}[1]"))?,
        )),
        Value::Object(o) => Ok(Complex64::new(
            number(field(o, "re", path)?, &join(path, "re"))?,
            o.get("im")
                .map(|x| number(x, &join(path, "im")))
                .transpose()?
                .unwrap_or(0.0),
        )),
        _ => Err(Error::config(path, "expected a complex number")),
    }
}

fn complex_to_value(z: Complex64) -> Value {
    if z.im == 0.0 {
        json!(z.re)
    } else {
        json!([z.re, z.im])
    }
}

fn numbers(v: &Value, path: &str) -> Result<Vec<f64>> {
    let a = v
        .as_array()
        .ok_or_else(|| Error::config(path, "expected an array"))?;
    a.iter()
        .enumerate()
        .map(|(i, x)| number(x, &format!("{path}[{i}]")))
        .collect()
}

fn complexes(v: &Value, path: &str) -> Result<Vec<Complex64>> {
    let a = v
        .as_array()
        .ok_or_else(|| Error::config(path, "expected an array"))?;
    a.iter()
        .enumerate()
        .map(|(i, x)| complex(x, &format!("{path}[{i}]")))
        .collect()
}

/// A d×d block written as a scalar (d = 1) or a list of rows.
fn block(v: &Value, path: &str) -> Result<(usize, Vec<Complex64>)> {
    match v {
        Value::Array(rows) if rows.iter().all(Value::is_array) => {
            let d = rows.len();
            let mut out = Vec::with_capacity(d * d);
            for (i, r) in rows.iter().enumerate() {
                let row = complexes(r, &format!("{path}[{i}]"))?;
                if row.len() != d {
                    return Err(Error::config(format!("{path}[{i}]"), "block must be square"));
                }
                out.extend(row);
            }
            if d == 0 {
                return Err(Error::config(path, "empty block"));
            }
            Ok((d, out))
        }
        _ => Ok((1, vec![complex(v, path)?])),
    }
}

fn block_to_value(b: &[Complex64], d: usize) -> Value {
    if d == 1 {
        return complex_to_value(b[0]);
    }
    Value::Array(
        (0..d)
            .map(|i| Value::Array((0..d).map(|j| complex_to_value(b[i * d + j])).collect()))
            .collect(),
    )
}

fn kind_of<'a>(o: &'a Map<String, Value>, path: &str) -> Result<&'a str> {
    field(o, "kind", path)?
        .as_str()
        .ok_or_else(|| Error::config(join(path, "kind"), "expected a string"))
}

pub fn parse_potential(v: &Value) -> Result<PotentialSpec> {
    let path = "potential";
    let o = object(v, path)?;
    let pot = match kind_of(o, path)? {
        "free" => PotentialSpec::Free,
        "delta" => PotentialSpec::Delta {
            alpha: complex(field(o, "alpha", path)?, "potential.alpha")?,
            beta: o
                .get("beta")
                .map(|b| number(b, "potential.beta"))
                .transpose()?
                .unwrap_or(0.0),
        },
        "well" => {
            let breakpoints = match (o.get("breakpoints"), o.get("half_width")) {
                (Some(b), _) => numbers(b, "potential.breakpoints")?,
                (None, Some(a)) => {
                    let a = number(a, "potential.half_width")?;
                    if a <= 0.0 {
                        return Err(Error::config("potential.half_width", "must be positive"));
                    }
                    vec![-a, a]
                }
                (None, None) => vec![-1.0, 1.0],
            };
            if breakpoints.len() != 2 {
                return Err(Error::config(
                    "potential.breakpoints",
                    "a well takes exactly two breakpoints",
                ));
            }
            let (dim, b) = match (o.get("matrix"), o.get("alpha")) {
                (Some(m), _) => block(m, "potential.matrix")?,
                (None, Some(a)) => block(a, "potential.alpha")?,
                (None, None) => return Err(Error::config("potential.alpha", "missing field")),
            };
            PotentialSpec::PiecewiseConstant {
                breakpoints,
                blocks: vec![b],
                dim,
            }
        }
        "piecewise" => {
            let breakpoints = numbers(field(o, "breakpoints", path)?, "potential.breakpoints")?;
            let raw = field(o, "blocks", path)?
                .as_array()
                .ok_or_else(|| Error::config("potential.blocks", "expected an array"))?;
            let mut blocks = Vec::new();
            let mut dim = None;
            for (j, b) in raw.iter().enumerate() {
                let p = format!("potential.blocks[{j}]");
                let (d, vals) = block(b, &p)?;
                if *dim.get_or_insert(d) != d {
                    return Err(Error::config(p, "all blocks must have the same size"));
                }
                blocks.push(vals);
            }
            PotentialSpec::PiecewiseConstant {
                breakpoints,
                blocks,
                dim: dim.unwrap_or(1),
            }
        }
        other => {
            return Err(Error::config(
                "potential.kind",
                format!("unknown kind '{other}' (expected free, delta, well or piecewise)"),
            ))
        }
    };
    pot.validate()?;
    Ok(pot)
}

pub fn potential_to_value(p: &PotentialSpec) -> Value {
    match p {
        PotentialSpec::Free => json!({"kind": "free"}),
        PotentialSpec::Delta { alpha, beta } => {
            json!({"kind": "delta", "alpha": complex_to_value(*alpha), "beta": beta})
        }
        PotentialSpec::PiecewiseConstant {
            breakpoints,
            blocks,
            dim,
        } => json!({
            "kind": "piecewise",
            "breakpoints": breakpoints,
            "blocks": blocks.iter().map(|b| block_to_value(b, *dim)).collect::<Vec<_>>(),
        }),
    }
}

fn parse_grid(v: &Value) -> Result<UniformGrid> {
    let o = object(v, "grid")?;
    let x_min = number(field(o, "x_min", "grid")?, "grid.x_min")?;
    let x_max = number(field(o, "x_max", "grid")?, "grid.x_max")?;
    let n = integer(field(o, "n_points", "grid")?, "grid.n_points")?;
    if o.contains_key("nodes") {
        return Err(Error::config("grid.nodes", "only uniform grids are supported"));
    }
    UniformGrid::new(x_min, x_max, n)
}

fn parse_contour(v: Option<&Value>) -> Result<ContourSpec> {
    let mut c = ContourSpec::default();
    if let Some(v) = v {
        let o = object(v, "contour")?;
        let slots: [(&str, &mut f64); 6] = [
            ("eps", &mut c.eps),
            ("g0_level", &mut c.g0_level),
            ("eta", &mut c.eta),
            ("etatilde", &mut c.etatilde),
            ("im_truncation", &mut c.im_truncation),
            ("quad_tol", &mut c.quad_tol),
        ];
        for (k, slot) in slots {
            if let Some(x) = o.get(k) {
                *slot = number(x, &format!("contour.{k}"))?;
            }
        }
    }
    c.validate()?;
    Ok(c)
}

fn param(o: &Map<String, Value>, key: &str, default: Option<f64>) -> Result<f64> {
    match (o.get(key), default) {
        (Some(v), _) => number(v, &format!("state.params.{key}")),
        (None, Some(d)) => Ok(d),
        (None, None) => Err(Error::config(format!("state.params.{key}"), "missing field")),
    }
}

fn parse_state(v: &Value) -> Result<StateSpec> {
    let o = object(v, "state")?;
    let shape = field(o, "shape", "state")?
        .as_str()
        .ok_or_else(|| Error::config("state.shape", "expected a string"))?;
    let empty = Map::new();
    let p = match o.get("params") {
        Some(v) => object(v, "state.params")?,
        None => &empty,
    };
    let shape = match shape {
        "indicator" => Shape::Indicator {
            a: param(p, "a", None)?,
            b: param(p, "b", None)?,
        },
        "bump" => Shape::Bump {
            center: param(p, "center", Some(0.0))?,
            radius: param(p, "radius", Some(1.0))?,
            power: param(p, "power", Some(6.0))? as u32,
        },
        "gaussian" | "gaussian_bump" => Shape::Gaussian {
            center: param(p, "center", Some(0.0))?,
            width: param(p, "width", None)?,
            radius: param(p, "radius", None)?,
        },
        "exp" => Shape::Exp {
            alpha: complex(
                p.get("alpha")
                    .ok_or_else(|| Error::config("state.params.alpha", "missing field"))?,
                "state.params.alpha",
            )?,
            beta: param(p, "beta", Some(0.0))?,
            radius: param(p, "radius", None)?,
            taper: param(p, "taper", Some(0.0))?,
        },
        "samples" => Shape::Samples {
            values: complexes(
                p.get("values")
                    .ok_or_else(|| Error::config("state.params.values", "missing field"))?,
                "state.params.values",
            )?,
            kinks: match p.get("kinks") {
                Some(k) => k
                    .as_array()
                    .ok_or_else(|| Error::config("state.params.kinks", "expected an array"))?
                    .iter()
                    .enumerate()
                    .map(|(i, x)| integer(x, &format!("state.params.kinks[{i}]")))
                    .collect::<Result<_>>()?,
                None => vec![],
            },
        },
        other => {
            return Err(Error::config(
                "state.shape",
                format!("unknown shape '{other}' (expected indicator, bump, gaussian, exp or samples)"),
            ))
        }
    };
    let direction = o
        .get("direction")
        .map(|d| complexes(d, "state.direction"))
        .transpose()?;
    Ok(StateSpec { shape, direction })
}

fn state_to_value(s: &StateSpec) -> Value {
    let (shape, params) = match &s.shape {
        Shape::Indicator { a, b } => ("indicator", json!({"a": a, "b": b})),
        Shape::Bump {
            center,
            radius,
            power,
        } => ("bump", json!({"center": center, "radius": radius, "power": power})),
        Shape::Gaussian {
            center,
            width,
            radius,
        } => ("gaussian", json!({"center": center, "width": width, "radius": radius})),
        Shape::Exp {
            alpha,
            beta,
            radius,
            taper,
        } => (
            "exp",
            json!({"alpha": complex_to_value(*alpha), "beta": beta, "radius": radius, "taper": taper}),
        ),
        Shape::Samples { values, kinks } => (
            "samples",
            json!({"values": values.iter().map(|z| complex_to_value(*z)).collect::<Vec<_>>(), "kinks": kinks}),
        ),
    };
    let mut v = json!({"shape": shape, "params": params});
    if let Some(d) = &s.direction {
        v["direction"] = Value::Array(d.iter().map(|z| complex_to_value(*z)).collect());
    }
    v
}

fn parse_scan(v: &Value) -> Result<ScanRegion> {
    let o = object(v, "scan")?;
    let g = |k: &str| number(field(o, k, "scan")?, &format!("scan.{k}"));
    let r = ScanRegion {
        re_min: g("re_min")?,
        re_max: g("re_max")?,
        im_min: g("im_min")?,
        im_max: g("im_max")?,
    };
    if r.re_min >= r.re_max || r.im_min >= r.im_max {
        return Err(Error::config("scan", "empty scan region"));
    }
    Ok(r)
}

fn parse_sweep(v: &Value) -> Result<AlphaSweep> {
    let o = object(v, "sweep")?;
    let s = AlphaSweep {
        from: complex(field(o, "from", "sweep")?, "sweep.from")?,
        to: complex(field(o, "to", "sweep")?, "sweep.to")?,
        steps: integer(field(o, "steps", "sweep")?, "sweep.steps")?,
    };
    if s.steps == 0 {
        return Err(Error::config("sweep.steps", "must be positive"));
    }
    Ok(s)
}

/// Parse and validate a problem document.
pub fn load_problem(doc: &str) -> Result<ProblemSpec> {
    let v: Value = serde_json::from_str(doc).map_err(|e| Error::Parse(e.to_string()))?;
    problem_from_value(&v)
}

pub fn load_problem_file(path: &Path) -> Result<ProblemSpec> {
    let text = std::fs::read_to_string(path)?;
    load_problem(&text)
}

pub fn problem_from_value(v: &Value) -> Result<ProblemSpec> {
    let o = object(v, "")?;
    let potential = parse_potential(field(o, "potential", "")?)?;
    let grid = parse_grid(field(o, "grid", "")?)?;
    let contour = parse_contour(o.get("contour"))?;
    let state = parse_state(field(o, "state", "")?)?;
    let window = match o.get("window") {
        Some(w) => {
            let wo = object(w, "window")?;
            integer(field(wo, "i", "window")?, "window.i")?
        }
        None => 1,
    };
    if window == 0 {
        return Err(Error::config("window.i", "window index must be positive"));
    }
    let scan = o.get("scan").map(parse_scan).transpose()?;
    let times = match o.get("times") {
        Some(t) => numbers(t, "times")?,
        None => vec![1.0, 2.0, 3.0],
    };
    if times.iter().any(|t| *t < 0.0) {
        return Err(Error::config("times", "times must be non-negative"));
    }
    let family = match o.get("kind").map(|k| k.as_str()) {
        None | Some(Some("cosine")) => Family::Cosine,
        Some(Some("sine")) => Family::Sine,
        _ => return Err(Error::config("kind", "expected \"cosine\" or \"sine\"")),
    };
    let n = o.get("n").map(|x| integer(x, "n")).transpose()?;
    if n == Some(0) {
        return Err(Error::config("n", "must be at least 1"));
    }
    let sweep = o.get("sweep").map(parse_sweep).transpose()?;
    if let Some(d) = &state.direction {
        if d.len() != potential.dim() {
            return Err(Error::config(
                "state.direction",
                format!("expected {} components", potential.dim()),
            ));
        }
    }
    Ok(ProblemSpec {
        potential,
        grid,
        contour,
        state,
        window,
        scan,
        times,
        family,
        n,
        sweep,
    })
}

/// Canonical document for a problem; `load_problem` inverts it.
pub fn problem_to_value(p: &ProblemSpec) -> Value {
    let c = &p.contour;
    let mut v = json!({
        "potential": potential_to_value(&p.potential),
        "grid": {"x_min": p.grid.x_min, "x_max": p.grid.x_max, "n_points": p.grid.n_points},
        "contour": {
            "eps": c.eps, "g0_level": c.g0_level, "eta": c.eta, "etatilde": c.etatilde,
            "im_truncation": c.im_truncation, "quad_tol": c.quad_tol
        },
        "state": state_to_value(&p.state),
        "window": {"i": p.window},
        "times": p.times,
        "kind": p.family.name(),
    });
    if let Some(r) = &p.scan {
        v["scan"] = json!({"re_min": r.re_min, "re_max": r.re_max, "im_min": r.im_min, "im_max": r.im_max});
    }
    if let Some(n) = p.n {
        v["n"] = json!(n);
    }
    if let Some(s) = &p.sweep {
        v["sweep"] = json!({"from": complex_to_value(s.from), "to": complex_to_value(s.to), "steps": s.steps});
    }
    v
}

pub fn serialize_problem(p: &ProblemSpec) -> String {
    serde_json::to_string_pretty(&problem_to_value(p)).expect("problem documents are always serializable")
}
