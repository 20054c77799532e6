//! Interchange formats: Filter, Weight and Generator JSON, kernel CSV, and a
//! JSON writer with fixed 17-significant-digit floats.

use std::collections::BTreeMap;
use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::error::{Error, Result};
use crate::lattice::Filter;
use crate::splines::{Generator, LagrangeKernel};
use crate::weights::Weight;

/// Compact JSON with every float written as `d.dddddddddddddddde±x`.
#[derive(Clone, Copy, Debug, Default)]
pub struct FixedFloatFormatter;

impl Formatter for FixedFloatFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", fmt_f64(value))
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// `value` with 17 significant digits; exact round trip for `f64`.
pub fn fmt_f64(value: f64) -> String {
    format!("{value:.16e}")
}

/// Deterministic JSON text (no trailing newline).
pub fn to_json<S: Serialize + ?Sized>(value: &S) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFloatFormatter);
    value.serialize(&mut ser).map_err(|e| Error::Format(e.to_string()))?;
    String::from_utf8(out).map_err(|e| Error::Format(e.to_string()))
}

fn parse<'a, D: Deserialize<'a>>(text: &'a str, what: &str) -> Result<D> {
    serde_json::from_str(text).map_err(|e| Error::Format(format!("{what}: {e}")))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterJson {
    pub dim: usize,
    pub origin: Vec<i64>,
    pub shape: Vec<usize>,
    pub coeffs: Vec<f64>,
}

impl From<&Filter<f64>> for FilterJson {
    fn from(f: &Filter<f64>) -> Self {
        FilterJson {
            dim: f.dim(),
            origin: f.support().origin().to_vec(),
            shape: f.support().shape().to_vec(),
            coeffs: f.coeffs().to_vec(),
        }
    }
}

impl TryFrom<FilterJson> for Filter<f64> {
    type Error = Error;

    fn try_from(j: FilterJson) -> Result<Self> {
        if j.origin.len() != j.dim || j.shape.len() != j.dim {
            return Err(Error::Format(format!(
                "dim {} but origin has {} and shape {} entries",
                j.dim,
                j.origin.len(),
                j.shape.len()
            )));
        }
        Filter::new(j.origin, j.shape, j.coeffs)
    }
}

pub fn filter_to_json(f: &Filter<f64>) -> Result<String> {
    to_json(&FilterJson::from(f))
}

/// Parses Filter JSON; the support is trimmed to its canonical form.
pub fn filter_from_json(text: &str) -> Result<Filter<f64>> {
    parse::<FilterJson>(text, "filter")?.try_into()
}

type Params = BTreeMap<String, serde_json::Value>;

fn default_dim() -> usize {
    1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TaggedJson {
    #[serde(default = "default_dim")]
    dim: usize,
    kind: String,
    #[serde(default)]
    params: Params,
}

fn number(params: &Params, names: &[&str], kind: &str) -> Result<f64> {
    names
        .iter()
        .find_map(|n| params.get(*n))
        .ok_or_else(|| Error::Format(format!("{kind}: missing parameter {}", names[0])))?
        .as_f64()
        .ok_or_else(|| Error::Format(format!("{kind}: parameter {} must be a number", names[0])))
}

fn count(params: &Params, names: &[&str], kind: &str) -> Result<usize> {
    let v = number(params, names, kind)?;
    if v < 0.0 || v.fract() != 0.0 {
        return Err(Error::Format(format!("{kind}: parameter {} must be a nonnegative integer", names[0])));
    }
    Ok(v as usize)
}

fn check_params(params: &Params, allowed: &[&str], kind: &str) -> Result<()> {
    match params.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(Error::Format(format!("{kind}: unknown parameter {k}"))),
        None => Ok(()),
    }
}

/// Weight JSON: `{"dim": d, "kind": …, "params": {…}}` with parameters
/// `n` (polynomial), `r` (exponential), `r` and `b` (subexponential).
pub fn weight_from_json(text: &str) -> Result<Weight<f64>> {
    let j: TaggedJson = parse(text, "weight")?;
    let p = &j.params;
    match j.kind.as_str() {
        "polynomial" => {
            check_params(p, &["n", "order"], "polynomial")?;
            Weight::polynomial(j.dim, number(p, &["n", "order"], "polynomial")?)
        }
        "exponential" => {
            check_params(p, &["r", "rate"], "exponential")?;
            Weight::exponential(j.dim, number(p, &["r", "rate"], "exponential")?)
        }
        "subexponential" => {
            check_params(p, &["r", "rate", "b", "exponent"], "subexponential")?;
            Weight::subexponential(
                j.dim,
                number(p, &["r", "rate"], "subexponential")?,
                number(p, &["b", "exponent"], "subexponential")?,
            )
        }
        other => Err(Error::Format(format!("unknown weight kind {other:?}"))),
    }
}

/// Generator JSON: `bspline` with `degree` (and optional `dim`),
/// `green_power` with `m` (or the operator order `order = 2m`), or `custom`
/// with `oversampling` and a Filter JSON object `samples`.
pub fn generator_from_json(text: &str) -> Result<Generator<f64>> {
    let raw: serde_json::Value = parse(text, "generator")?;
    let mut j: TaggedJson = serde_json::from_value(raw).map_err(|e| Error::Format(format!("generator: {e}")))?;
    if let Some(d) = j.params.remove("dim") {
        j.dim = d.as_u64().ok_or_else(|| Error::Format("generator: dim must be a positive integer".into()))? as usize;
    }
    let p = &j.params;
    match j.kind.as_str() {
        "bspline" => {
            check_params(p, &["degree"], "bspline")?;
            Generator::bspline(count(p, &["degree"], "bspline")?, j.dim)
        }
        "green_power" => {
            check_params(p, &["m", "order"], "green_power")?;
            let m = match p.get("m") {
                Some(_) => count(p, &["m"], "green_power")?,
                None => {
                    let order = count(p, &["order"], "green_power")?;
                    if order % 2 != 0 {
                        return Err(Error::Format("green_power: order must be even".into()));
                    }
                    order / 2
                }
            };
            Generator::green_power(m, j.dim)
        }
        "custom" => {
            check_params(p, &["oversampling", "samples"], "custom")?;
            let m = count(p, &["oversampling"], "custom")?;
            let samples = p.get("samples").ok_or_else(|| Error::Format("custom: missing parameter samples".into()))?;
            let fj: FilterJson =
                serde_json::from_value(samples.clone()).map_err(|e| Error::Format(format!("custom samples: {e}")))?;
            Generator::custom(m, fj.try_into()?)
        }
        other => Err(Error::Format(format!("unknown generator kind {other:?}"))),
    }
}

/// Kernel CSV: a `#`-prefixed metadata line, a column header, then one row per
/// fine-lattice sample in row-major order.
pub fn kernel_to_csv(kernel: &LagrangeKernel<f64>) -> String {
    let d = kernel.dim();
    let mut meta = vec![format!("grid_step={}", fmt_f64(kernel.grid_step())), format!("K={}", kernel.radius)];
    match &kernel.decay {
        Some(r) => {
            let model = match r.model {
                crate::inversion::DecayModel::Exponential { .. } => "exponential",
                crate::inversion::DecayModel::Algebraic { .. } => "algebraic",
                crate::inversion::DecayModel::Mixed => "mixed",
            };
            meta.push(format!("decay={model}"));
            meta.push(format!("rate={}", fmt_f64(r.rate)));
        }
        None => meta.push("decay=compact".into()),
    }
    let mut out = format!("# {}\n", meta.join(";"));
    let header: Vec<String> = if d == 1 { vec!["x".into()] } else { (0..d).map(|a| format!("x{a}")).collect() };
    out.push_str(&header.join(","));
    out.push_str(",value\n");
    let window = crate::lattice::IndexBox::symmetric(d, kernel.radius * kernel.oversampling);
    let step = kernel.grid_step();
    for j in window.iter() {
        for &c in j.coords() {
            out.push_str(&fmt_f64(c as f64 * step));
            out.push(',');
        }
        out.push_str(&fmt_f64(kernel.at_fine(j.coords())));
        out.push('\n');
    }
    out
}
