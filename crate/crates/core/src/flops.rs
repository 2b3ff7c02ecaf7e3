//! Parameter and floating-point-operation (FPO) counts for declared layer
//! stacks.
//!
//! Conventions:
//! - forward pass only;
//! - with [`MacFactor::Two`] (the default) every scalar multiply and add is
//!   one FPO, so a length-`n` dot product costs `2n - 1` and a bias add one
//!   more; with [`MacFactor::One`] each multiply-accumulate counts once and
//!   each bias add counts once;
//! - padding taps are counted as if the padded zeros were real inputs;
//! - activation functions and element-wise gate combinations in recurrent
//!   cells are not counted. Recurrent cells count, per timestep and per
//!   gate, the affine map `W_ih x + b_ih + W_hh h + b_hh`.
//!
//! Shapes carry no batch dimension. `linear` accepts any rank and maps the
//! last dimension; `conv1d` expects `[channels, length]`, `conv2d`
//! `[channels, height, width]`, recurrent layers `[timesteps, features]`.
//!
//! Layer-stack files are TOML with one `[[layer]]` table per layer:
//!
//! ```toml
//! [[layer]]
//! kind = "conv1d"        # linear, conv1d, conv2d, rnn_tanh, gru, lstm
//! c_in = 2
//! c_out = 3
//! kernel = 5             # scalar or per-dimension list
//! stride = 1             # optional, default 1
//! padding = 0            # optional, default 0
//! bias = true            # optional, default true
//! ```
//!
//! Linear layers use `in`/`out`, recurrent layers `input_size`/`hidden_size`.
//! Dilation other than 1, grouping other than 1 and transposed convolutions
//! are rejected as unsupported rather than miscounted.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct TensorShape(Vec<usize>);

impl TensorShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Input("shape needs at least one dimension".into()));
        }
        if let Some(i) = dims.iter().position(|&d| d == 0) {
            return Err(Error::Input(format!("shape dimension {i} must be ≥ 1")));
        }
        Ok(Self(dims))
    }

    pub fn dims(&self) -> &[usize] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for TensorShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl FromStr for TensorShape {
    type Err = Error;

    /// Comma- or `x`-separated dimensions, e.g. `3,100` or `3x32x32`.
    fn from_str(s: &str) -> Result<Self> {
        let dims = s
            .split([',', 'x'])
            .map(|d| {
                d.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Input(format!("bad shape dimension {d:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dims)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MacFactor {
    One,
    #[default]
    Two,
}

impl MacFactor {
    pub fn from_factor(f: u8) -> Result<Self> {
        match f {
            1 => Ok(MacFactor::One),
            2 => Ok(MacFactor::Two),
            other => Err(Error::Input(format!("MAC factor must be 1 or 2, got {other}"))),
        }
    }

    pub fn factor(self) -> u8 {
        match self {
            MacFactor::One => 1,
            MacFactor::Two => 2,
        }
    }

    /// Cost of one output value computed as a length-`n` dot product plus
    /// `bias_adds` separate additions.
    fn dot_cost(self, n: u64, bias_adds: u64) -> u64 {
        match self {
            MacFactor::One => n + bias_adds,
            MacFactor::Two => 2 * n - 1 + bias_adds,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinearSpec {
    pub in_features: usize,
    pub out_features: usize,
    pub bias: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvSpec {
    pub c_in: usize,
    pub c_out: usize,
    pub kernel: Vec<usize>,
    pub stride: Vec<usize>,
    pub padding: Vec<usize>,
    pub bias: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecurrentSpec {
    pub input_size: usize,
    pub hidden_size: usize,
    pub bias: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LayerSpec {
    Linear(LinearSpec),
    Conv1d(ConvSpec),
    Conv2d(ConvSpec),
    RnnTanh(RecurrentSpec),
    Gru(RecurrentSpec),
    Lstm(RecurrentSpec),
}

impl LayerSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            LayerSpec::Linear(_) => "linear",
            LayerSpec::Conv1d(_) => "conv1d",
            LayerSpec::Conv2d(_) => "conv2d",
            LayerSpec::RnnTanh(_) => "rnn_tanh",
            LayerSpec::Gru(_) => "gru",
            LayerSpec::Lstm(_) => "lstm",
        }
    }

    /// Gate count of a recurrent kind.
    fn gates(&self) -> Option<(u64, &RecurrentSpec)> {
        match self {
            LayerSpec::RnnTanh(r) => Some((1, r)),
            LayerSpec::Gru(r) => Some((3, r)),
            LayerSpec::Lstm(r) => Some((4, r)),
            _ => None,
        }
    }

    fn conv(&self) -> Option<(usize, &ConvSpec)> {
        match self {
            LayerSpec::Conv1d(c) => Some((1, c)),
            LayerSpec::Conv2d(c) => Some((2, c)),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Input(format!("{}: {what}", self.kind())));
        match self {
            LayerSpec::Linear(l) => {
                if l.in_features == 0 || l.out_features == 0 {
                    return bad("in and out must be ≥ 1");
                }
            }
            LayerSpec::Conv1d(c) | LayerSpec::Conv2d(c) => {
                let rank = self.conv().unwrap().0;
                if c.c_in == 0 || c.c_out == 0 {
                    return bad("c_in and c_out must be ≥ 1");
                }
                if c.kernel.len() != rank || c.stride.len() != rank || c.padding.len() != rank {
                    return bad(&format!("kernel, stride and padding need {rank} value(s)"));
                }
                if c.kernel.contains(&0) {
                    return bad("kernel must be ≥ 1");
                }
                if c.stride.contains(&0) {
                    return bad("stride must be ≥ 1");
                }
            }
            LayerSpec::RnnTanh(r) | LayerSpec::Gru(r) | LayerSpec::Lstm(r) => {
                if r.input_size == 0 || r.hidden_size == 0 {
                    return bad("input_size and hidden_size must be ≥ 1");
                }
            }
        }
        Ok(())
    }
}

fn checked_product(values: impl IntoIterator<Item = u64>) -> Result<u64> {
    values
        .into_iter()
        .try_fold(1u64, |acc, v| acc.checked_mul(v))
        .ok_or_else(|| Error::Input("count overflows 64 bits".into()))
}

pub fn layer_params(layer: &LayerSpec) -> Result<u64> {
    layer.validate()?;
    let n = |v: usize| v as u64;
    Ok(match layer {
        LayerSpec::Linear(l) => {
            n(l.out_features) * n(l.in_features) + if l.bias { n(l.out_features) } else { 0 }
        }
        LayerSpec::Conv1d(c) | LayerSpec::Conv2d(c) => {
            let taps = checked_product(c.kernel.iter().map(|&k| n(k)))?;
            checked_product([n(c.c_out), n(c.c_in), taps])? + if c.bias { n(c.c_out) } else { 0 }
        }
        _ => {
            let (gates, r) = layer.gates().unwrap();
            let (i, h) = (n(r.input_size), n(r.hidden_size));
            gates * (h * (i + h) + if r.bias { 2 * h } else { 0 })
        }
    })
}

fn shape_err(layer: usize, message: String) -> Error {
    Error::Shape { layer, message }
}

fn output_shape_at(index: usize, layer: &LayerSpec, input: &TensorShape) -> Result<TensorShape> {
    layer.validate()?;
    let dims = input.dims();
    let expect_rank = |rank: usize| {
        if dims.len() != rank {
            Err(shape_err(
                index,
                format!("{} expects a rank-{rank} input, got {input}", layer.kind()),
            ))
        } else {
            Ok(())
        }
    };
    let mismatch = |what: &str, want: usize, got: usize| {
        shape_err(
            index,
            format!("{}: input {what} is {got}, layer expects {want}", layer.kind()),
        )
    };
    match layer {
        LayerSpec::Linear(l) => {
            let last = *dims.last().expect("shapes are non-empty");
            if last != l.in_features {
                return Err(mismatch("features", l.in_features, last));
            }
            let mut out = dims.to_vec();
            *out.last_mut().unwrap() = l.out_features;
            TensorShape::new(out)
        }
        LayerSpec::Conv1d(c) | LayerSpec::Conv2d(c) => {
            let rank = layer.conv().unwrap().0;
            expect_rank(rank + 1)?;
            if dims[0] != c.c_in {
                return Err(mismatch("channels", c.c_in, dims[0]));
            }
            let mut out = vec![c.c_out];
            for d in 0..rank {
                let padded = dims[d + 1] + 2 * c.padding[d];
                if padded < c.kernel[d] {
                    return Err(shape_err(
                        index,
                        format!(
                            "{}: spatial dimension {d} has padded size {padded}, smaller than kernel {}; output would be < 1",
                            layer.kind(),
                            c.kernel[d]
                        ),
                    ));
                }
                out.push((padded - c.kernel[d]) / c.stride[d] + 1);
            }
            TensorShape::new(out)
        }
        _ => {
            let (_, r) = layer.gates().unwrap();
            expect_rank(2)?;
            if dims[1] != r.input_size {
                return Err(mismatch("features", r.input_size, dims[1]));
            }
            TensorShape::new(vec![dims[0], r.hidden_size])
        }
    }
}

pub fn output_shape(layer: &LayerSpec, input: &TensorShape) -> Result<TensorShape> {
    output_shape_at(0, layer, input)
}

fn layer_fpo_at(
    index: usize,
    layer: &LayerSpec,
    input: &TensorShape,
    mac: MacFactor,
) -> Result<u64> {
    let out = output_shape_at(index, layer, input)?;
    let n = |v: usize| v as u64;
    match layer {
        LayerSpec::Linear(l) => {
            let dims = input.dims();
            let leading = checked_product(dims[..dims.len() - 1].iter().map(|&d| n(d)))?;
            let per_output = mac.dot_cost(n(l.in_features), u64::from(l.bias));
            checked_product([leading, n(l.out_features), per_output])
        }
        LayerSpec::Conv1d(c) | LayerSpec::Conv2d(c) => {
            let taps = checked_product(c.kernel.iter().map(|&k| n(k)))?;
            let per_output = mac.dot_cost(n(c.c_in) * taps, u64::from(c.bias));
            let positions = checked_product(out.dims()[1..].iter().map(|&d| n(d)))?;
            checked_product([per_output, n(c.c_out), positions])
        }
        _ => {
            let (gates, r) = layer.gates().unwrap();
            let timesteps = n(input.dims()[0]);
            let per_unit = mac.dot_cost(n(r.input_size + r.hidden_size), if r.bias { 2 } else { 0 });
            checked_product([timesteps, gates, n(r.hidden_size), per_unit])
        }
    }
}

/// Forward-pass FPO with a multiply-accumulate counted as two operations.
pub fn layer_fpo(layer: &LayerSpec, input: &TensorShape) -> Result<u64> {
    layer_fpo_at(0, layer, input, MacFactor::Two)
}

pub fn layer_fpo_with(layer: &LayerSpec, input: &TensorShape, mac: MacFactor) -> Result<u64> {
    layer_fpo_at(0, layer, input, mac)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LayerCount {
    pub kind: &'static str,
    pub output: TensorShape,
    pub params: u64,
    pub fpo: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StackTotals {
    pub params: u64,
    pub fpo: u64,
    pub input: TensorShape,
    /// One entry per layer, in order.
    pub layers: Vec<LayerCount>,
}

impl StackTotals {
    pub fn output(&self) -> &TensorShape {
        self.layers.last().map_or(&self.input, |l| &l.output)
    }
}

/// Chains shapes through `layers`, summing parameters and FPO. Errors carry
/// the index of the first failing layer.
pub fn stack_totals(layers: &[LayerSpec], input: &TensorShape, mac: MacFactor) -> Result<StackTotals> {
    let mut shape = input.clone();
    let mut counts = Vec::with_capacity(layers.len());
    let (mut params, mut fpo) = (0u64, 0u64);
    for (i, layer) in layers.iter().enumerate() {
        let output = output_shape_at(i, layer, &shape)?;
        let p = layer_params(layer)?;
        let f = layer_fpo_at(i, layer, &shape, mac)?;
        params = params
            .checked_add(p)
            .ok_or_else(|| Error::Input("parameter count overflows 64 bits".into()))?;
        fpo = fpo
            .checked_add(f)
            .ok_or_else(|| Error::Input("FPO count overflows 64 bits".into()))?;
        counts.push(LayerCount {
            kind: layer.kind(),
            output: output.clone(),
            params: p,
            fpo: f,
        });
        shape = output;
    }
    Ok(StackTotals {
        params,
        fpo,
        input: input.clone(),
        layers: counts,
    })
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum PerDim {
    One(usize),
    Many(Vec<usize>),
}

impl PerDim {
    fn expand(self, rank: usize, field: &str, kind: &str) -> Result<Vec<usize>> {
        match self {
            PerDim::One(v) => Ok(vec![v; rank]),
            PerDim::Many(v) if v.len() == rank => Ok(v),
            PerDim::Many(v) => Err(Error::Input(format!(
                "{kind}: {field} needs 1 or {rank} value(s), got {}",
                v.len()
            ))),
        }
    }

    fn all_one(&self) -> bool {
        match self {
            PerDim::One(v) => *v == 1,
            PerDim::Many(v) => v.iter().all(|&x| x == 1),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLayer {
    kind: String,
    #[serde(rename = "in")]
    in_features: Option<usize>,
    #[serde(rename = "out")]
    out_features: Option<usize>,
    c_in: Option<usize>,
    c_out: Option<usize>,
    kernel: Option<PerDim>,
    stride: Option<PerDim>,
    padding: Option<PerDim>,
    dilation: Option<PerDim>,
    groups: Option<usize>,
    transposed: Option<bool>,
    input_size: Option<usize>,
    hidden_size: Option<usize>,
    bias: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StackFile {
    #[serde(default)]
    layer: Vec<RawLayer>,
}

impl RawLayer {
    fn into_spec(self) -> Result<LayerSpec> {
        let kind = self.kind.clone();
        let unsupported = |reason: &str| {
            Err(Error::UnsupportedLayer {
                kind: kind.clone(),
                reason: reason.to_string(),
            })
        };
        if self.dilation.as_ref().is_some_and(|d| !d.all_one()) {
            return unsupported("dilated convolutions are not counted");
        }
        if self.groups.is_some_and(|g| g != 1) {
            return unsupported("grouped convolutions are not counted");
        }
        if self.transposed == Some(true) {
            return unsupported("transposed convolutions are not counted");
        }
        let require = |v: Option<usize>, field: &str| {
            v.ok_or_else(|| Error::Input(format!("{kind}: missing field {field}")))
        };
        let reject = |present: bool, field: &str| {
            if present {
                Err(Error::Input(format!("{kind}: field {field} does not apply")))
            } else {
                Ok(())
            }
        };
        let bias = self.bias.unwrap_or(true);
        let spec = match kind.as_str() {
            "linear" => {
                reject(self.c_in.is_some() || self.c_out.is_some(), "c_in/c_out")?;
                reject(self.kernel.is_some() || self.stride.is_some() || self.padding.is_some(), "kernel/stride/padding")?;
                reject(self.input_size.is_some() || self.hidden_size.is_some(), "input_size/hidden_size")?;
                reject(self.dilation.is_some() || self.groups.is_some() || self.transposed.is_some(), "dilation/groups/transposed")?;
                LayerSpec::Linear(LinearSpec {
                    in_features: require(self.in_features, "in")?,
                    out_features: require(self.out_features, "out")?,
                    bias,
                })
            }
            "conv1d" | "conv2d" => {
                let rank = if kind == "conv1d" { 1 } else { 2 };
                reject(self.in_features.is_some() || self.out_features.is_some(), "in/out")?;
                reject(self.input_size.is_some() || self.hidden_size.is_some(), "input_size/hidden_size")?;
                let conv = ConvSpec {
                    c_in: require(self.c_in, "c_in")?,
                    c_out: require(self.c_out, "c_out")?,
                    kernel: self
                        .kernel
                        .ok_or_else(|| Error::Input(format!("{kind}: missing field kernel")))?
                        .expand(rank, "kernel", &kind)?,
                    stride: self.stride.unwrap_or(PerDim::One(1)).expand(rank, "stride", &kind)?,
                    padding: self.padding.unwrap_or(PerDim::One(0)).expand(rank, "padding", &kind)?,
                    bias,
                };
                if rank == 1 {
                    LayerSpec::Conv1d(conv)
                } else {
                    LayerSpec::Conv2d(conv)
                }
            }
            "rnn_tanh" | "gru" | "lstm" => {
                reject(self.in_features.is_some() || self.out_features.is_some(), "in/out")?;
                reject(self.c_in.is_some() || self.c_out.is_some(), "c_in/c_out")?;
                reject(self.kernel.is_some() || self.stride.is_some() || self.padding.is_some(), "kernel/stride/padding")?;
                reject(self.dilation.is_some() || self.groups.is_some() || self.transposed.is_some(), "dilation/groups/transposed")?;
                let r = RecurrentSpec {
                    input_size: require(self.input_size, "input_size")?,
                    hidden_size: require(self.hidden_size, "hidden_size")?,
                    bias,
                };
                match kind.as_str() {
                    "rnn_tanh" => LayerSpec::RnnTanh(r),
                    "gru" => LayerSpec::Gru(r),
                    _ => LayerSpec::Lstm(r),
                }
            }
            _ => return unsupported("no counting rule for this layer kind"),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Parses a layer-stack document; see the module docs for the format.
pub fn parse_stack(source: &str) -> Result<Vec<LayerSpec>> {
    let file: StackFile = toml::from_str(source).map_err(|e| Error::Parse {
        line: e
            .span()
            .map_or(0, |s| source[..s.start.min(source.len())].matches('\n').count() + 1),
        message: e.message().to_string(),
    })?;
    file.layer
        .into_iter()
        .enumerate()
        .map(|(i, raw)| {
            raw.into_spec().map_err(|e| match e {
                Error::Input(m) => Error::Input(format!("layer {i}: {m}")),
                other => other,
            })
        })
        .collect()
}
