//! Residual-MLP vector field with exact reverse-mode gradients.
//!
//! The network maps [x, t, cond] through an input linear layer, a stack of
//! residual blocks
//!
//! Block(h) = ReLU(LN1(W2(ReLU(LN2(W1(h))))) + h)
//!
//! and an output linear layer with no final activation. Parameters live in
//! one flat f64 buffer; a layout table names each tensor, which is also the
//! checkpoint manifest. Gradients are computed by hand-rolled
//! backpropagation and validated against finite differences in the tests.

use crate::error::{Result, SfmgError};
use crate::numerics::RngState;
use serde::{Deserialize, Serialize};

const LN_EPS: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetMeta {
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub output_dim: usize,
    pub num_blocks: usize,
    /// 0 when the field is unconditioned.
    pub conditioning_dim: usize,
}

impl NetMeta {
    /// Width of the concatenated [x, t, cond] input.
    pub fn in_total(&self) -> usize {
        self.input_dim + 1 + self.conditioning_dim
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TensorSpec {
    pub name: String,
    pub shape: Vec<usize>,
    /// Offset into the parameter buffer, in elements.
    pub offset: usize,
}

impl TensorSpec {
    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn build_layout(meta: &NetMeta) -> Vec<TensorSpec> {
    let h = meta.hidden_dim;
    let mut layout = Vec::new();
    let mut offset = 0;
    let mut push = |name: String, shape: Vec<usize>, offset: &mut usize| {
        let len: usize = shape.iter().product();
        layout.push(TensorSpec {
            name,
            shape,
            offset: *offset,
        });
        *offset += len;
    };
    push("input.weight".into(), vec![h, meta.in_total()], &mut offset);
    push("input.bias".into(), vec![h], &mut offset);
    for b in 0..meta.num_blocks {
        push(format!("block{b}.w1.weight"), vec![h, h], &mut offset);
        push(format!("block{b}.w1.bias"), vec![h], &mut offset);
        push(format!("block{b}.ln2.gain"), vec![h], &mut offset);
        push(format!("block{b}.ln2.shift"), vec![h], &mut offset);
        push(format!("block{b}.w2.weight"), vec![h, h], &mut offset);
        push(format!("block{b}.w2.bias"), vec![h], &mut offset);
        push(format!("block{b}.ln1.gain"), vec![h], &mut offset);
        push(format!("block{b}.ln1.shift"), vec![h], &mut offset);
    }
    push(
        "output.weight".into(),
        vec![meta.output_dim, h],
        &mut offset,
    );
    push("output.bias".into(), vec![meta.output_dim], &mut offset);
    layout
}

#[derive(Clone, Debug)]
pub struct VectorFieldNet {
    meta: NetMeta,
    layout: Vec<TensorSpec>,
    params: Vec<f64>,
}

/// Gradients with the same flat layout as the network parameters.
#[derive(Clone, Debug)]
pub struct GradientSet {
    values: Vec<f64>,
}

impl GradientSet {
    pub fn zeros_like(net: &VectorFieldNet) -> Self {
        GradientSet {
            values: vec![0.0; net.params.len()],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn add_assign(&mut self, other: &GradientSet) {
        assert_eq!(self.values.len(), other.values.len());
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b;
        }
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.values {
            *v *= s;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Cached intermediates of one forward pass, consumed by `backward`.
pub struct ForwardCache {
    input: Vec<f64>,
    hidden_in: Vec<Vec<f64>>, // h entering each block
    a: Vec<Vec<f64>>,         // W1 h + b1
    ln2: Vec<LnCache>,
    r: Vec<Vec<f64>>, // ReLU(LN2(a))
    bvec: Vec<Vec<f64>>,
    ln1: Vec<LnCache>,
    z: Vec<Vec<f64>>,       // LN1(b) + h
    final_hidden: Vec<f64>, // output of the last block
}

struct LnCache {
    xhat: Vec<f64>,
    inv_std: f64,
}

impl VectorFieldNet {
    /// Fresh network: fan-in-scaled uniform weights, zero biases, unit
    /// layer-norm gains, and a zero-initialized output layer so the initial
    /// vector field is identically zero.
    pub fn new(meta: NetMeta, rng: &mut RngState) -> Self {
        let layout = build_layout(&meta);
        let total = layout.last().map_or(0, |t| t.offset + t.len());
        let mut params = vec![0.0; total];
        for spec in &layout {
            let slice = &mut params[spec.offset..spec.offset + spec.len()];
            if spec.name.ends_with(".gain") {
                slice.fill(1.0);
            } else if spec.name.ends_with(".weight") && spec.name != "output.weight" {
                let fan_in = spec.shape[1] as f64;
                let bound = 1.0 / fan_in.sqrt();
                for w in slice {
                    *w = rng.uniform_range(-bound, bound);
                }
            }
            // biases, shifts, and the output layer stay zero
        }
        VectorFieldNet {
            meta,
            layout,
            params,
        }
    }

    pub fn from_parts(meta: NetMeta, params: Vec<f64>) -> Result<Self> {
        let layout = build_layout(&meta);
        let total = layout.last().map_or(0, |t| t.offset + t.len());
        if params.len() != total {
            return Err(SfmgError::Shape(format!(
                "parameter buffer has {} values, layout requires {total}",
                params.len()
            )));
        }
        Ok(VectorFieldNet {
            meta,
            layout,
            params,
        })
    }

    pub fn meta(&self) -> &NetMeta {
        &self.meta
    }

    pub fn layout(&self) -> &[TensorSpec] {
        &self.layout
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    fn tensor(&self, index: usize) -> &[f64] {
        let spec = &self.layout[index];
        &self.params[spec.offset..spec.offset + spec.len()]
    }

    fn block_base(&self, b: usize) -> usize {
        2 + 8 * b
    }

    pub fn forward(&self, x: &[f64], t: f64, cond: Option<&[f64]>) -> Vec<f64> {
        let (out, _) = self.forward_cached(x, t, cond);
        out
    }

    pub fn forward_cached(
        &self,
        x: &[f64],
        t: f64,
        cond: Option<&[f64]>,
    ) -> (Vec<f64>, ForwardCache) {
        assert_eq!(x.len(), self.meta.input_dim, "input dim mismatch");
        let cond_len = cond.map_or(0, |c| c.len());
        assert_eq!(
            cond_len, self.meta.conditioning_dim,
            "conditioning dim mismatch"
        );
        let mut input = Vec::with_capacity(self.meta.in_total());
        input.extend_from_slice(x);
        input.push(t);
        if let Some(c) = cond {
            input.extend_from_slice(c);
        }

        let mut h = matvec(self.tensor(0), self.tensor(1), &input);
        let blocks = self.meta.num_blocks;
        let mut cache = ForwardCache {
            input,
            hidden_in: Vec::with_capacity(blocks),
            a: Vec::with_capacity(blocks),
            ln2: Vec::with_capacity(blocks),
            r: Vec::with_capacity(blocks),
            bvec: Vec::with_capacity(blocks),
            ln1: Vec::with_capacity(blocks),
            z: Vec::with_capacity(blocks),
            final_hidden: Vec::new(),
        };
        for b in 0..blocks {
            let base = self.block_base(b);
            let a = matvec(self.tensor(base), self.tensor(base + 1), &h);
            let (l2, ln2_cache) = layer_norm(&a, self.tensor(base + 2), self.tensor(base + 3));
            let r: Vec<f64> = l2.iter().map(|&v| v.max(0.0)).collect();
            let bvec = matvec(self.tensor(base + 4), self.tensor(base + 5), &r);
            let (l1, ln1_cache) = layer_norm(&bvec, self.tensor(base + 6), self.tensor(base + 7));
            let z: Vec<f64> = l1.iter().zip(&h).map(|(lv, hv)| lv + hv).collect();
            let h_next: Vec<f64> = z.iter().map(|&v| v.max(0.0)).collect();

            cache.hidden_in.push(h);
            cache.a.push(a);
            cache.ln2.push(ln2_cache);
            cache.r.push(r);
            cache.bvec.push(bvec);
            cache.ln1.push(ln1_cache);
            cache.z.push(z);
            h = h_next;
        }
        cache.final_hidden = h.clone();
        let out_idx = 2 + 8 * blocks;
        let out = matvec(self.tensor(out_idx), self.tensor(out_idx + 1), &h);
        (out, cache)
    }

    /// Gradients of <upstream, forward(x, t, cond)> with respect to every
    /// parameter.
    pub fn backward(&self, cache: &ForwardCache, upstream: &[f64]) -> GradientSet {
        assert_eq!(upstream.len(), self.meta.output_dim, "upstream dim mismatch");
        let mut grads = GradientSet {
            values: vec![0.0; self.params.len()],
        };
        let blocks = self.meta.num_blocks;
        let out_idx = 2 + 8 * blocks;

        // output layer
        let w_out = &self.layout[out_idx];
        let b_out = &self.layout[out_idx + 1];
        let hidden = &cache.final_hidden;
        for (o, &up) in upstream.iter().enumerate() {
            let row = w_out.offset + o * hidden.len();
            for (i, hv) in hidden.iter().enumerate() {
                grads.values[row + i] += up * hv;
            }
            grads.values[b_out.offset + o] += up;
        }
        let mut d_h = matvec_t(self.tensor(out_idx), upstream, hidden.len());

        for b in (0..blocks).rev() {
            let base = self.block_base(b);
            let z = &cache.z[b];
            // out = ReLU(z)
            let d_z: Vec<f64> = d_h
                .iter()
                .zip(z)
                .map(|(&d, &zv)| if zv > 0.0 { d } else { 0.0 })
                .collect();
            // z = LN1(bvec) + h_in: the skip path carries d_z directly
            let (d_bvec, g_gain1, g_shift1) = layer_norm_backward(
                &d_z,
                self.tensor(base + 6),
                &cache.ln1[b],
            );
            accumulate(&mut grads.values, &self.layout[base + 6], &g_gain1);
            accumulate(&mut grads.values, &self.layout[base + 7], &g_shift1);
            // bvec = W2 r + b2
            let r = &cache.r[b];
            let w2 = &self.layout[base + 4];
            for (o, &d) in d_bvec.iter().enumerate() {
                let row = w2.offset + o * r.len();
                for (i, rv) in r.iter().enumerate() {
                    grads.values[row + i] += d * rv;
                }
                grads.values[self.layout[base + 5].offset + o] += d;
            }
            let d_r = matvec_t(self.tensor(base + 4), &d_bvec, r.len());
            // r = ReLU(LN2(a))
            let d_l2: Vec<f64> = d_r
                .iter()
                .zip(r)
                .map(|(&d, &rv)| if rv > 0.0 { d } else { 0.0 })
                .collect();
            let (d_a, g_gain2, g_shift2) = layer_norm_backward(
                &d_l2,
                self.tensor(base + 2),
                &cache.ln2[b],
            );
            accumulate(&mut grads.values, &self.layout[base + 2], &g_gain2);
            accumulate(&mut grads.values, &self.layout[base + 3], &g_shift2);
            // a = W1 h_in + b1
            let h_in = &cache.hidden_in[b];
            let w1 = &self.layout[base];
            for (o, &d) in d_a.iter().enumerate() {
                let row = w1.offset + o * h_in.len();
                for (i, hv) in h_in.iter().enumerate() {
                    grads.values[row + i] += d * hv;
                }
                grads.values[self.layout[base + 1].offset + o] += d;
            }
            let d_h_main = matvec_t(self.tensor(base), &d_a, h_in.len());
            d_h = d_h_main.iter().zip(&d_z).map(|(a, b)| a + b).collect();
        }

        // input layer
        let w_in = &self.layout[0];
        for (o, &d) in d_h.iter().enumerate() {
            let row = w_in.offset + o * cache.input.len();
            for (i, xv) in cache.input.iter().enumerate() {
                grads.values[row + i] += d * xv;
            }
            grads.values[self.layout[1].offset + o] += d;
        }
        grads
    }
}

fn matvec(w: &[f64], b: &[f64], x: &[f64]) -> Vec<f64> {
    let out_dim = b.len();
    let in_dim = x.len();
    debug_assert_eq!(w.len(), out_dim * in_dim);
    let mut out = b.to_vec();
    for o in 0..out_dim {
        let row = &w[o * in_dim..(o + 1) * in_dim];
        let mut acc = 0.0;
        for (wv, xv) in row.iter().zip(x) {
            acc += wv * xv;
        }
        out[o] += acc;
    }
    out
}

/// W^T d for a row-major (out x in) weight matrix.
fn matvec_t(w: &[f64], d: &[f64], in_dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; in_dim];
    for (o, &dv) in d.iter().enumerate() {
        if dv == 0.0 {
            continue;
        }
        let row = &w[o * in_dim..(o + 1) * in_dim];
        for (ov, wv) in out.iter_mut().zip(row) {
            *ov += dv * wv;
        }
    }
    out
}

fn layer_norm(x: &[f64], gain: &[f64], shift: &[f64]) -> (Vec<f64>, LnCache) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let inv_std = 1.0 / (var + LN_EPS).sqrt();
    let xhat: Vec<f64> = x.iter().map(|v| (v - mean) * inv_std).collect();
    let out = xhat
        .iter()
        .zip(gain)
        .zip(shift)
        .map(|((xh, g), s)| g * xh + s)
        .collect();
    (out, LnCache { xhat, inv_std })
}

/// Returns (d_input, d_gain, d_shift).
fn layer_norm_backward(dy: &[f64], gain: &[f64], cache: &LnCache) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = dy.len() as f64;
    let d_gain: Vec<f64> = dy.iter().zip(&cache.xhat).map(|(d, xh)| d * xh).collect();
    let d_shift = dy.to_vec();
    let d: Vec<f64> = dy.iter().zip(gain).map(|(dv, g)| dv * g).collect();
    let mean_d = d.iter().sum::<f64>() / n;
    let mean_dx = d
        .iter()
        .zip(&cache.xhat)
        .map(|(dv, xh)| dv * xh)
        .sum::<f64>()
        / n;
    let dx = d
        .iter()
        .zip(&cache.xhat)
        .map(|(dv, xh)| cache.inv_std * (dv - mean_d - xh * mean_dx))
        .collect();
    (dx, d_gain, d_shift)
}

fn accumulate(values: &mut [f64], spec: &TensorSpec, grad: &[f64]) {
    let slice = &mut values[spec.offset..spec.offset + spec.len()];
    for (s, g) in slice.iter_mut().zip(grad) {
        *s += g;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_net(seed: u64) -> VectorFieldNet {
        let meta = NetMeta {
            input_dim: 3,
            hidden_dim: 8,
            output_dim: 2,
            num_blocks: 2,
            conditioning_dim: 2,
        };
        let mut rng = RngState::new(seed);
        let mut net = VectorFieldNet::new(meta, &mut rng);
        // randomize everything (including output layer) so gradients are generic
        for p in net.params_mut() {
            *p += 0.1 * rng.normal();
        }
        net
    }

    #[test]
    fn zero_output_layer_gives_zero_field() {
        let meta = NetMeta {
            input_dim: 4,
            hidden_dim: 16,
            output_dim: 4,
            num_blocks: 2,
            conditioning_dim: 0,
        };
        let mut rng = RngState::new(1);
        let net = VectorFieldNet::new(meta, &mut rng);
        let out = net.forward(&[0.3, -1.0, 2.0, 0.0], 0.5, None);
        assert!(out.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn forward_is_deterministic() {
        let net = small_net(3);
        let x = [0.1, 0.2, -0.4];
        let cond = [1.0, -1.0];
        let a = net.forward(&x, 0.3, Some(&cond));
        let b = net.forward(&x, 0.3, Some(&cond));
        assert_eq!(a, b);
    }

    #[test]
    fn single_block_with_zero_weights_is_relu() {
        // W1 = W2 = 0, LN gains 1 shifts 0: block output = ReLU(h)
        let meta = NetMeta {
            input_dim: 2,
            hidden_dim: 4,
            output_dim: 4,
            num_blocks: 1,
            conditioning_dim: 0,
        };
        let mut rng = RngState::new(2);
        let mut net = VectorFieldNet::new(meta, &mut rng);
        // zero W1/W2, identity-like input and output maps
        let specs: Vec<TensorSpec> = net.layout().to_vec();
        for spec in &specs {
            let slice =
                &mut net.params_mut()[spec.offset..spec.offset + spec.len()];
            match spec.name.as_str() {
                "block0.w1.weight" | "block0.w2.weight" => slice.fill(0.0),
                "input.weight" => {
                    // hidden = [x0, x1, t, 0] so the block input is known
                    slice.fill(0.0);
                    slice[0] = 1.0;
                    slice[3 + 1] = 1.0;
                    slice[2 * 3 + 2] = 1.0;
                }
                "output.weight" => {
                    slice.fill(0.0);
                    for i in 0..4 {
                        slice[i * 4 + i] = 1.0;
                    }
                }
                _ => {}
            }
        }
        let out = net.forward(&[2.0, -3.0], 0.5, None);
        // block output = ReLU([2.0, -3.0, 0.5, 0.0]) = [2.0, 0.0, 0.5, 0.0]
        assert_eq!(out, vec![2.0, 0.0, 0.5, 0.0]);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let net = small_net(4);
        let x = [0.4, -0.2, 0.9];
        let cond = [0.5, 1.5];
        let t = 0.7;
        let upstream = [1.3, -0.8];
        let (_, cache) = net.forward_cached(&x, t, Some(&cond));
        let grads = net.backward(&cache, &upstream);

        let h = 1e-5;
        let mut worst = 0.0f64;
        let objective = |net: &VectorFieldNet| {
            let out = net.forward(&x, t, Some(&cond));
            out.iter().zip(&upstream).map(|(o, u)| o * u).sum::<f64>()
        };
        for p in 0..net.num_params() {
            let mut plus = net.clone();
            plus.params_mut()[p] += h;
            let mut minus = net.clone();
            minus.params_mut()[p] -= h;
            let fd = (objective(&plus) - objective(&minus)) / (2.0 * h);
            let an = grads.values()[p];
            if an.abs() > 1e-8 || fd.abs() > 1e-8 {
                let rel = (an - fd).abs() / an.abs().max(fd.abs());
                worst = worst.max(rel);
            }
        }
        assert!(worst <= 1e-4, "worst relative gradient error {worst:.3e}");
    }

    #[test]
    fn zero_upstream_gives_zero_gradients() {
        let net = small_net(5);
        let (_, cache) = net.forward_cached(&[0.1, 0.1, 0.1], 0.2, Some(&[0.0, 0.0]));
        let grads = net.backward(&cache, &[0.0, 0.0]);
        assert_eq!(grads.max_abs(), 0.0);
    }

    #[test]
    fn output_bias_gradient_equals_upstream() {
        let net = small_net(6);
        let upstream = [2.5, -1.25];
        let (_, cache) = net.forward_cached(&[0.3, 0.1, -0.2], 0.9, Some(&[1.0, 2.0]));
        let grads = net.backward(&cache, &upstream);
        let bias_spec = net
            .layout()
            .iter()
            .find(|s| s.name == "output.bias")
            .unwrap();
        let got = &grads.values()[bias_spec.offset..bias_spec.offset + bias_spec.len()];
        assert_eq!(got, &upstream);
    }
}
