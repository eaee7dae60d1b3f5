//! Per-example forward pass with cached activations and its exact
//! reverse-mode gradient.

use rand::Rng;

use super::config::{ModelConfig, CLASSES};
use super::params::{Dense, Lstm, Offsets};
use crate::error::{Error, Result};
use crate::num::{sigmoid, Scalar};

struct ConvCache<T> {
    input: Vec<T>,
    len_in: usize,
    /// Masked ReLU output, `l_in x filters`.
    relu: Vec<T>,
    /// Source position of each pooled value.
    argmax: Vec<usize>,
}

struct LstmStep<T> {
    x: Vec<T>,
    h_prev: Vec<T>,
    c_prev: Vec<T>,
    i: Vec<T>,
    f: Vec<T>,
    g: Vec<T>,
    o: Vec<T>,
    tanh_c: Vec<T>,
}

pub(crate) struct Cache<T> {
    ids: Vec<u32>,
    conv: Vec<ConvCache<T>>,
    /// Input to the BiLSTM, `l3 x c3`, and its effective length.
    seq: Vec<T>,
    seq_len: usize,
    lstm: [Vec<LstmStep<T>>; 2],
    z: Vec<T>,
    mask_lstm: Option<Vec<T>>,
    u: Vec<T>,
    mask_dense: Option<Vec<T>>,
    v: Vec<T>,
    pub probs: [T; CLASSES],
}

pub(crate) struct Net<'a, T> {
    pub cfg: &'a ModelConfig,
    pub p: &'a [T],
    pub o: &'a Offsets,
}

fn check<T: Scalar>(xs: &[T], layer: &str) -> Result<()> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(layer.to_owned()))
    }
}

/// Inverted-dropout mask: kept units scaled by 1/(1-rate).
fn dropout_mask<T: Scalar, R: Rng>(n: usize, rate: f64, rng: &mut R) -> Vec<T> {
    let keep = T::lit(1.0 / (1.0 - rate));
    (0..n)
        .map(|_| if rng.gen::<f64>() < rate { T::zero() } else { keep })
        .collect()
}

/// `out = W x + b` for a row-major `W`.
fn affine<T: Scalar>(w: &[T], b: &[T], x: &[T], out: &mut [T]) {
    let n = x.len();
    for (r, o) in out.iter_mut().enumerate() {
        *o = b[r] + crate::num::dot(&w[r * n..(r + 1) * n], x);
    }
}

/// `dx += W^T dy`, `dW += dy x^T`, `db += dy`.
fn affine_back<T: Scalar>(
    w: &[T],
    x: &[T],
    dy: &[T],
    dx: Option<&mut [T]>,
    dw: &mut [T],
    db: &mut [T],
) {
    let n = x.len();
    for (r, &g) in dy.iter().enumerate() {
        if g == T::zero() {
            continue;
        }
        db[r] += g;
        crate::num::axpy(g, x, &mut dw[r * n..(r + 1) * n]);
    }
    if let Some(dx) = dx {
        for (r, &g) in dy.iter().enumerate() {
            if g != T::zero() {
                crate::num::axpy(g, &w[r * n..(r + 1) * n], dx);
            }
        }
    }
}

/// Effective length after pooling a sequence of real length `len`.
pub(crate) fn pooled_len(len: usize, pool: usize, l_out: usize) -> usize {
    len.div_ceil(pool).min(l_out).max(1)
}

impl<T: Scalar> Net<'_, T> {
    fn slice(&self, r: &std::ops::Range<usize>) -> &[T] {
        &self.p[r.clone()]
    }

    /// Forward pass over one example of `ids.len()` real tokens
    /// (1..=max_tokens). Dropout is applied only when `rng` is given.
    pub fn forward<R: Rng>(&self, ids: &[u32], mut rng: Option<&mut R>) -> Result<Cache<T>> {
        let cfg = self.cfg;
        let d = cfg.embed_dim;
        let lens = cfg.lengths();
        let ch = cfg.channels();
        debug_assert!(!ids.is_empty() && ids.len() <= cfg.max_tokens);

        let emb = self.slice(&self.o.embedding);
        let mut a = vec![T::zero(); lens[0] * d];
        for (t, &id) in ids.iter().enumerate() {
            let id = id as usize;
            a[t * d..(t + 1) * d].copy_from_slice(&emb[id * d..(id + 1) * d]);
        }
        let mut len = ids.len();

        let mut conv = Vec::with_capacity(3);
        for (k, spec) in cfg.conv_layers.iter().enumerate() {
            let (l_in, c_in, c_out, kw) = (lens[k], ch[k], spec.filters, spec.kernel_width);
            let w = self.slice(&self.o.conv[k].w);
            let b = self.slice(&self.o.conv[k].b);
            let lp = (kw - 1) / 2;
            let mut relu = vec![T::zero(); l_in * c_out];
            for t in 0..len {
                for f in 0..c_out {
                    let mut z = b[f];
                    for j in 0..kw {
                        let Some(src) = (t + j).checked_sub(lp).filter(|&s| s < l_in) else {
                            continue;
                        };
                        let wrow = &w[(f * c_in) * kw..];
                        let x = &a[src * c_in..(src + 1) * c_in];
                        for c in 0..c_in {
                            z += wrow[c * kw + j] * x[c];
                        }
                    }
                    relu[t * c_out + f] = z.max(T::zero());
                }
            }
            let l_out = lens[k + 1];
            let p = cfg.pool;
            let mut out = vec![T::zero(); l_out * c_out];
            let mut argmax = vec![0; l_out * c_out];
            for s in 0..l_out {
                for f in 0..c_out {
                    let mut best = s * p;
                    for u in 1..p {
                        if relu[(s * p + u) * c_out + f] > relu[best * c_out + f] {
                            best = s * p + u;
                        }
                    }
                    argmax[s * c_out + f] = best;
                    out[s * c_out + f] = relu[best * c_out + f];
                }
            }
            check(&out, &format!("conv{}", k + 1))?;
            conv.push(ConvCache {
                input: std::mem::replace(&mut a, out),
                len_in: len,
                relu,
                argmax,
            });
            len = pooled_len(len, p, l_out);
        }

        let seq = a;
        let seq_len = len;
        let c3 = ch[3];
        let steps_fwd: Vec<usize> = (0..seq_len).collect();
        let steps_bwd: Vec<usize> = (0..seq_len).rev().collect();
        let fwd = self.run_lstm(&self.o.lstm[0], &seq, c3, &steps_fwd);
        let bwd = self.run_lstm(&self.o.lstm[1], &seq, c3, &steps_bwd);
        let h = cfg.lstm_hidden;
        let mut z = Vec::with_capacity(2 * h);
        z.extend(final_h(&fwd, h));
        z.extend(final_h(&bwd, h));
        check(&z, "bilstm")?;

        let mask_lstm = match (&mut rng, cfg.dropout_lstm > 0.0) {
            (Some(r), true) => Some(dropout_mask(2 * h, cfg.dropout_lstm, *r)),
            _ => None,
        };
        let zd = apply(&z, mask_lstm.as_deref());
        let [d1, d2] = cfg.dense_sizes;
        let mut u = vec![T::zero(); d1];
        affine(self.slice(&self.o.dense[0].w), self.slice(&self.o.dense[0].b), &zd, &mut u);
        u.iter_mut().for_each(|x| *x = sigmoid(*x));
        check(&u, "dense1")?;

        let mask_dense = match (&mut rng, cfg.dropout_dense > 0.0) {
            (Some(r), true) => Some(dropout_mask(d1, cfg.dropout_dense, *r)),
            _ => None,
        };
        let ud = apply(&u, mask_dense.as_deref());
        let mut v = vec![T::zero(); d2];
        affine(self.slice(&self.o.dense[1].w), self.slice(&self.o.dense[1].b), &ud, &mut v);
        v.iter_mut().for_each(|x| *x = sigmoid(*x));
        check(&v, "dense2")?;

        let mut logits = [T::zero(); CLASSES];
        affine(self.slice(&self.o.output.w), self.slice(&self.o.output.b), &v, &mut logits);
        let probs = softmax(&logits);
        check(&probs, "output")?;

        Ok(Cache {
            ids: ids.to_vec(),
            conv,
            seq,
            seq_len,
            lstm: [fwd, bwd],
            z,
            mask_lstm,
            u,
            mask_dense,
            v,
            probs,
        })
    }

    fn run_lstm(&self, l: &Lstm, seq: &[T], c_in: usize, order: &[usize]) -> Vec<LstmStep<T>> {
        let h = self.cfg.lstm_hidden;
        let (w_ih, w_hh, b) = (self.slice(&l.w_ih), self.slice(&l.w_hh), self.slice(&l.b));
        let mut h_prev = vec![T::zero(); h];
        let mut c_prev = vec![T::zero(); h];
        let mut steps = Vec::with_capacity(order.len());
        let mut pre = vec![T::zero(); 4 * h];
        for &t in order {
            let x = seq[t * c_in..(t + 1) * c_in].to_vec();
            affine(w_ih, b, &x, &mut pre);
            for (r, p) in pre.iter_mut().enumerate() {
                *p += crate::num::dot(&w_hh[r * h..(r + 1) * h], &h_prev);
            }
            let i: Vec<T> = pre[..h].iter().map(|&x| sigmoid(x)).collect();
            let f: Vec<T> = pre[h..2 * h].iter().map(|&x| sigmoid(x)).collect();
            let g: Vec<T> = pre[2 * h..3 * h].iter().map(|&x| x.tanh()).collect();
            let o: Vec<T> = pre[3 * h..].iter().map(|&x| sigmoid(x)).collect();
            let c: Vec<T> = (0..h).map(|k| f[k] * c_prev[k] + i[k] * g[k]).collect();
            let tanh_c: Vec<T> = c.iter().map(|x| x.tanh()).collect();
            let hn: Vec<T> = (0..h).map(|k| o[k] * tanh_c[k]).collect();
            steps.push(LstmStep {
                x,
                h_prev: std::mem::replace(&mut h_prev, hn),
                c_prev: std::mem::replace(&mut c_prev, c),
                i,
                f,
                g,
                o,
                tanh_c,
            });
        }
        steps
    }

    /// Accumulate `scale * d(-log p[target]) / d(params)` into `grads`.
    pub fn backward(&self, cache: &Cache<T>, target: &[T; CLASSES], scale: T, grads: &mut [T], embed: bool) {
        let cfg = self.cfg;
        let o = self.o;
        let h = cfg.lstm_hidden;
        let [d1, d2] = cfg.dense_sizes;

        let dlogits: Vec<T> = (0..CLASSES).map(|k| (cache.probs[k] - target[k]) * scale).collect();
        let mut dv = vec![T::zero(); d2];
        let (gw, gb) = split2(grads, &o.output);
        affine_back(self.slice(&o.output.w), &cache.v, &dlogits, Some(&mut dv), gw, gb);

        let da2: Vec<T> = dv.iter().zip(&cache.v).map(|(&g, &v)| g * v * (T::one() - v)).collect();
        let ud = apply(&cache.u, cache.mask_dense.as_deref());
        let mut du = vec![T::zero(); d1];
        let (gw, gb) = split2(grads, &o.dense[1]);
        affine_back(self.slice(&o.dense[1].w), &ud, &da2, Some(&mut du), gw, gb);
        let du = apply(&du, cache.mask_dense.as_deref());

        let da1: Vec<T> = du.iter().zip(&cache.u).map(|(&g, &u)| g * u * (T::one() - u)).collect();
        let zd = apply(&cache.z, cache.mask_lstm.as_deref());
        let mut dz = vec![T::zero(); 2 * h];
        let (gw, gb) = split2(grads, &o.dense[0]);
        affine_back(self.slice(&o.dense[0].w), &zd, &da1, Some(&mut dz), gw, gb);
        let dz = apply(&dz, cache.mask_lstm.as_deref());

        let c3 = cfg.channels()[3];
        let mut dseq = vec![T::zero(); cache.seq.len()];
        let fwd_order: Vec<usize> = (0..cache.seq_len).collect();
        let bwd_order: Vec<usize> = (0..cache.seq_len).rev().collect();
        self.lstm_back(&o.lstm[0], &cache.lstm[0], &dz[..h], &fwd_order, c3, &mut dseq, grads);
        self.lstm_back(&o.lstm[1], &cache.lstm[1], &dz[h..], &bwd_order, c3, &mut dseq, grads);

        let lens = cfg.lengths();
        let ch = cfg.channels();
        let mut dout = dseq;
        for k in (0..3).rev() {
            let cc = &cache.conv[k];
            let spec = cfg.conv_layers[k];
            let (l_in, c_in, c_out, kw) = (lens[k], ch[k], spec.filters, spec.kernel_width);
            let lp = (kw - 1) / 2;
            let mut dz = vec![T::zero(); l_in * c_out];
            for (idx, &g) in dout.iter().enumerate() {
                let f = idx % c_out;
                let src = cc.argmax[idx];
                if cc.relu[src * c_out + f] > T::zero() {
                    dz[src * c_out + f] += g;
                }
            }
            let w = self.slice(&o.conv[k].w);
            let need_input_grad = k > 0 || embed;
            let mut din = vec![T::zero(); if need_input_grad { l_in * c_in } else { 0 }];
            let (gw, gb) = split2(grads, &o.conv[k]);
            for t in 0..cc.len_in {
                for f in 0..c_out {
                    let g = dz[t * c_out + f];
                    if g == T::zero() {
                        continue;
                    }
                    gb[f] += g;
                    for j in 0..kw {
                        let Some(src) = (t + j).checked_sub(lp).filter(|&s| s < l_in) else {
                            continue;
                        };
                        let base = f * c_in * kw;
                        for c in 0..c_in {
                            gw[base + c * kw + j] += g * cc.input[src * c_in + c];
                            if need_input_grad {
                                din[src * c_in + c] += g * w[base + c * kw + j];
                            }
                        }
                    }
                }
            }
            dout = din;
        }

        if embed {
            let d = cfg.embed_dim;
            let ge = &mut grads[o.embedding.clone()];
            for (t, &id) in cache.ids.iter().enumerate() {
                if id == super::params::PAD {
                    continue;
                }
                let id = id as usize;
                crate::num::axpy(T::one(), &dout[t * d..(t + 1) * d], &mut ge[id * d..(id + 1) * d]);
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn lstm_back(
        &self,
        l: &Lstm,
        steps: &[LstmStep<T>],
        dh_final: &[T],
        order: &[usize],
        c_in: usize,
        dseq: &mut [T],
        grads: &mut [T],
    ) {
        let h = self.cfg.lstm_hidden;
        let (w_ih, w_hh) = (self.slice(&l.w_ih), self.slice(&l.w_hh));
        let mut dh = dh_final.to_vec();
        let mut dc = vec![T::zero(); h];
        let mut da = vec![T::zero(); 4 * h];
        for (s, &t) in steps.iter().zip(order).rev() {
            for k in 0..h {
                let one = T::one();
                let do_ = dh[k] * s.tanh_c[k];
                dc[k] += dh[k] * s.o[k] * (one - s.tanh_c[k] * s.tanh_c[k]);
                let di = dc[k] * s.g[k];
                let dg = dc[k] * s.i[k];
                let df = dc[k] * s.c_prev[k];
                da[k] = di * s.i[k] * (one - s.i[k]);
                da[h + k] = df * s.f[k] * (one - s.f[k]);
                da[2 * h + k] = dg * (one - s.g[k] * s.g[k]);
                da[3 * h + k] = do_ * s.o[k] * (one - s.o[k]);
                dc[k] *= s.f[k];
            }
            let (gw_ih, gw_hh, gb) = split3(grads, l);
            let mut dx = vec![T::zero(); c_in];
            affine_back(w_ih, &s.x, &da, Some(&mut dx), gw_ih, gb);
            let mut dh_prev = vec![T::zero(); h];
            let mut dummy_b = vec![T::zero(); 4 * h];
            affine_back(w_hh, &s.h_prev, &da, Some(&mut dh_prev), gw_hh, &mut dummy_b);
            crate::num::axpy(T::one(), &dx, &mut dseq[t * c_in..(t + 1) * c_in]);
            dh = dh_prev;
        }
    }
}

fn final_h<T: Scalar>(steps: &[LstmStep<T>], h: usize) -> Vec<T> {
    match steps.last() {
        Some(s) => (0..h).map(|k| s.o[k] * s.tanh_c[k]).collect(),
        None => vec![T::zero(); h],
    }
}

fn apply<T: Scalar>(x: &[T], mask: Option<&[T]>) -> Vec<T> {
    match mask {
        Some(m) => x.iter().zip(m).map(|(&a, &b)| a * b).collect(),
        None => x.to_vec(),
    }
}

fn split2<'g, T>(grads: &'g mut [T], d: &Dense) -> (&'g mut [T], &'g mut [T]) {
    debug_assert_eq!(d.w.end, d.b.start);
    let (w, b) = grads[d.w.start..d.b.end].split_at_mut(d.w.len());
    (w, b)
}

fn split3<'g, T>(grads: &'g mut [T], l: &Lstm) -> (&'g mut [T], &'g mut [T], &'g mut [T]) {
    let (a, rest) = grads[l.w_ih.start..l.b.end].split_at_mut(l.w_ih.len());
    let (b, c) = rest.split_at_mut(l.w_hh.len());
    (a, b, c)
}

pub(crate) fn softmax<T: Scalar>(logits: &[T; CLASSES]) -> [T; CLASSES] {
    let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
    let mut out = [T::zero(); CLASSES];
    let mut sum = T::zero();
    for (o, &l) in out.iter_mut().zip(logits) {
        *o = (l - max).exp();
        sum += *o;
    }
    out.iter_mut().for_each(|o| *o /= sum);
    out
}
