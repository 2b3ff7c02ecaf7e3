//! Scalar-operation counting oracle for layer FPO.
//!
//! Runs each layer's forward pass on concrete values with plain loops over
//! a zero-padded input and counts every multiply and add as it happens. It
//! shares no arithmetic with the closed-form counter: output extents come
//! from the loops themselves, not from the output-size formula.
//!
//! Activations and element-wise state updates of recurrent cells are
//! evaluated without counting, matching the counter's convention.

#![allow(dead_code)]

use greeneval::flops::{LayerSpec, MacFactor, TensorShape};

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct OpCounter {
    pub mults: u64,
    pub acc_adds: u64,
    pub bias_adds: u64,
}

impl OpCounter {
    fn mul(&mut self, a: f64, b: f64) -> f64 {
        self.mults += 1;
        a * b
    }

    fn acc(&mut self, a: f64, b: f64) -> f64 {
        self.acc_adds += 1;
        a + b
    }

    fn add_bias(&mut self, a: f64, b: f64) -> f64 {
        self.bias_adds += 1;
        a + b
    }

    /// Sum of pairwise products, accumulated left to right.
    fn dot(&mut self, xs: impl IntoIterator<Item = (f64, f64)>) -> f64 {
        let mut acc: Option<f64> = None;
        for (x, w) in xs {
            let p = self.mul(x, w);
            acc = Some(match acc {
                None => p,
                Some(a) => self.acc(a, p),
            });
        }
        acc.expect("dot product over at least one term")
    }

    pub fn fpo(&self, mac: MacFactor) -> u64 {
        match mac {
            MacFactor::Two => self.mults + self.acc_adds + self.bias_adds,
            MacFactor::One => self.mults + self.bias_adds,
        }
    }
}

const WEIGHTS: [f64; 8] = [0.5, -0.25, 0.75, -1.0, 0.125, 1.5, -0.625, 0.375];

fn weight(seed: usize) -> f64 {
    WEIGHTS[seed & 7]
}

fn linear(c: &mut OpCounter, x: &[f64], inp: usize, out: usize, bias: bool) -> Vec<f64> {
    (0..out)
        .map(|o| {
            let y = c.dot((0..inp).map(|i| (x[i], weight(o * inp + i))));
            if bias {
                c.add_bias(y, weight(o))
            } else {
                y
            }
        })
        .collect()
}

fn run_linear(c: &mut OpCounter, dims: &[usize], inp: usize, out: usize, bias: bool) -> Option<()> {
    if *dims.last()? != inp {
        return None;
    }
    let rows: usize = dims[..dims.len() - 1].iter().product();
    for r in 0..rows {
        let x: Vec<f64> = (0..inp).map(|i| weight(r + i) + 1.0).collect();
        linear(c, &x, inp, out, bias);
    }
    Some(())
}

fn run_conv1d(c: &mut OpCounter, dims: &[usize], spec: &greeneval::flops::ConvSpec) -> Option<()> {
    let [ch, len] = *dims else { return None };
    if ch != spec.c_in {
        return None;
    }
    let (k, s, p) = (spec.kernel[0], spec.stride[0], spec.padding[0]);
    let padded_len = len + 2 * p;
    let padded: Vec<Vec<f64>> = (0..ch)
        .map(|ci| {
            (0..padded_len)
                .map(|i| if i < p || i >= p + len { 0.0 } else { weight(ci + i) })
                .collect()
        })
        .collect();
    let mut produced = 0;
    for co in 0..spec.c_out {
        let mut start = 0;
        while start + k <= padded_len {
            let y = c.dot((0..ch).flat_map(|ci| {
                let row = &padded[ci];
                (0..k).map(move |t| (row[start + t], weight(co + ci + t)))
            }));
            if spec.bias {
                c.add_bias(y, weight(co));
            }
            produced += 1;
            start += s;
        }
    }
    (produced > 0).then_some(())
}

fn run_conv2d(c: &mut OpCounter, dims: &[usize], spec: &greeneval::flops::ConvSpec) -> Option<()> {
    let [ch, h, w] = *dims else { return None };
    if ch != spec.c_in {
        return None;
    }
    let (kh, kw) = (spec.kernel[0], spec.kernel[1]);
    let (sh, sw) = (spec.stride[0], spec.stride[1]);
    let (ph, pw) = (spec.padding[0], spec.padding[1]);
    let (hp, wp) = (h + 2 * ph, w + 2 * pw);
    let padded: Vec<f64> = (0..ch * hp * wp)
        .map(|i| {
            let (ci, y, x) = (i / (hp * wp), i / wp % hp, i % wp);
            if y < ph || y >= ph + h || x < pw || x >= pw + w {
                0.0
            } else {
                weight(ci + y * 3 + x)
            }
        })
        .collect();
    let at = |ci: usize, y: usize, x: usize| padded[(ci * hp + y) * wp + x];
    let mut produced = 0;
    for co in 0..spec.c_out {
        let mut y0 = 0;
        while y0 + kh <= hp {
            let mut x0 = 0;
            while x0 + kw <= wp {
                let mut v = 0.0;
                let mut first = true;
                for ci in 0..ch {
                    for dy in 0..kh {
                        for dx in 0..kw {
                            let p = c.mul(at(ci, y0 + dy, x0 + dx), weight(co + ci + dy + dx));
                            v = if first { p } else { c.acc(v, p) };
                            first = false;
                        }
                    }
                }
                if spec.bias {
                    c.add_bias(v, weight(co));
                }
                produced += 1;
                x0 += sw;
            }
            y0 += sh;
        }
    }
    (produced > 0).then_some(())
}

fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

fn run_recurrent(c: &mut OpCounter, dims: &[usize], layer: &LayerSpec) -> Option<()> {
    let (gates, r) = match layer {
        LayerSpec::RnnTanh(r) => (1, r),
        LayerSpec::Gru(r) => (3, r),
        LayerSpec::Lstm(r) => (4, r),
        _ => unreachable!(),
    };
    let [steps, features] = *dims else { return None };
    if features != r.input_size {
        return None;
    }
    let hs = r.hidden_size;
    let mut h = vec![0.0; hs];
    let mut cell = vec![0.0; hs];
    for t in 0..steps {
        let x: Vec<f64> = (0..features).map(|i| weight(t + i)).collect();
        // pre[g][u] = W_ih[g,u]·x + b_ih + W_hh[g,u]·h + b_hh
        let pre: Vec<Vec<f64>> = (0..gates)
            .map(|g| {
                (0..hs)
                    .map(|u| {
                        let xi = c.dot(x.iter().enumerate().map(|(i, &v)| (v, weight(g + u + i))));
                        let hh = c.dot(h.iter().enumerate().map(|(i, &v)| (v, weight(g * u + i))));
                        let mut v = c.acc(xi, hh);
                        if r.bias {
                            v = c.add_bias(v, weight(g));
                            v = c.add_bias(v, weight(u));
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        // uncounted activations and state updates
        match gates {
            1 => h = pre[0].iter().map(|v| v.tanh()).collect(),
            3 => {
                for u in 0..hs {
                    let z = sigmoid(pre[1][u]);
                    let n = (sigmoid(pre[0][u]) * pre[2][u]).tanh();
                    h[u] = (1.0 - z) * n + z * h[u];
                }
            }
            _ => {
                for u in 0..hs {
                    let (i, f, g, o) = (
                        sigmoid(pre[0][u]),
                        sigmoid(pre[1][u]),
                        pre[2][u].tanh(),
                        sigmoid(pre[3][u]),
                    );
                    cell[u] = f * cell[u] + i * g;
                    h[u] = o * cell[u].tanh();
                }
            }
        }
    }
    Some(())
}

/// Operation counts for one forward pass, or `None` when the input shape
/// does not fit the layer.
pub fn count(layer: &LayerSpec, input: &TensorShape) -> Option<OpCounter> {
    let mut c = OpCounter::default();
    let dims = input.dims();
    match layer {
        LayerSpec::Linear(l) => run_linear(&mut c, dims, l.in_features, l.out_features, l.bias)?,
        LayerSpec::Conv1d(s) => run_conv1d(&mut c, dims, s)?,
        LayerSpec::Conv2d(s) => run_conv2d(&mut c, dims, s)?,
        other => run_recurrent(&mut c, dims, other)?,
    }
    Some(c)
}

fn conv(c_in: usize, c_out: usize, kernel: Vec<usize>, stride: Vec<usize>, padding: Vec<usize>, bias: bool) -> greeneval::flops::ConvSpec {
    greeneval::flops::ConvSpec {
        c_in,
        c_out,
        kernel,
        stride,
        padding,
        bias,
    }
}

fn shape(dims: &[usize]) -> TensorShape {
    TensorShape::new(dims.to_vec()).unwrap()
}

/// Every supported layer with size hyperparameters in `1..=4`, padding in
/// `0..=4`, both bias settings, and every input extent in `1..=6`.
/// Channel counts of convolution inputs match the layer; other shape
/// mismatches are included so error agreement is exercised too.
pub fn exhaustive_cases(mut visit: impl FnMut(&LayerSpec, &TensorShape)) {
    use greeneval::flops::{LinearSpec, RecurrentSpec};
    const H: std::ops::RangeInclusive<usize> = 1..=4;
    const P: std::ops::RangeInclusive<usize> = 0..=4;
    const D: std::ops::RangeInclusive<usize> = 1..=6;
    for bias in [false, true] {
        for i in H {
            for o in H {
                let l = LayerSpec::Linear(LinearSpec { in_features: i, out_features: o, bias });
                for a in D {
                    visit(&l, &shape(&[a]));
                    for b in D {
                        visit(&l, &shape(&[a, b]));
                    }
                }
            }
        }
        for ci in H {
            for co in H {
                for k in H {
                    for s in H {
                        for p in P {
                            let l = LayerSpec::Conv1d(conv(ci, co, vec![k], vec![s], vec![p], bias));
                            for len in D {
                                visit(&l, &shape(&[ci, len]));
                            }
                        }
                    }
                }
            }
        }
        for ci in H {
            for co in H {
                for kh in H {
                    for kw in H {
                        for sh in H {
                            for sw in H {
                                for ph in P {
                                    for pw in P {
                                        let l = LayerSpec::Conv2d(conv(ci, co, vec![kh, kw], vec![sh, sw], vec![ph, pw], bias));
                                        for h in D {
                                            for w in D {
                                                visit(&l, &shape(&[ci, h, w]));
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        for input_size in H {
            for hidden_size in H {
                let r = RecurrentSpec { input_size, hidden_size, bias };
                for l in [LayerSpec::RnnTanh(r), LayerSpec::Gru(r), LayerSpec::Lstm(r)] {
                    for t in D {
                        for f in D {
                            visit(&l, &shape(&[t, f]));
                        }
                    }
                }
            }
        }
    }
}
