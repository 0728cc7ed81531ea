use ndarray::linalg::general_mat_mul;
use ndarray::{Array1, Array2, ArrayView1, ArrayView2, ArrayViewMut1, ArrayViewMut2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::real::Real;
use crate::error::{GlideError, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetShape {
    pub input_dim: usize,
    pub hidden: Vec<usize>,
    pub n_actions: usize,
}

impl NetShape {
    pub fn new(input_dim: usize, hidden: Vec<usize>, n_actions: usize) -> Result<NetShape> {
        if input_dim == 0 || n_actions == 0 || hidden.is_empty() || hidden.contains(&0) {
            return Err(GlideError::Config(format!(
                "invalid network shape: input {input_dim}, hidden {hidden:?}, actions {n_actions}"
            )));
        }
        Ok(NetShape {
            input_dim,
            hidden,
            n_actions,
        })
    }

    /// Dense layers in parameter order: trunk, value head, advantage head.
    fn layers(&self) -> Vec<Layer> {
        let mut out = Vec::with_capacity(self.hidden.len() + 2);
        let mut offset = 0;
        let mut push = |n_in: usize, n_out: usize| {
            out.push(Layer {
                n_in,
                n_out,
                w: offset,
                b: offset + n_in * n_out,
            });
            offset += n_in * n_out + n_out;
        };
        let mut n_in = self.input_dim;
        for &h in &self.hidden {
            push(n_in, h);
            n_in = h;
        }
        push(n_in, 1);
        push(n_in, self.n_actions);
        out
    }

    pub fn n_params(&self) -> usize {
        self.layers().last().map(|l| l.b + l.n_out).unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug)]
struct Layer {
    n_in: usize,
    n_out: usize,
    w: usize,
    b: usize,
}

impl Layer {
    fn weight<'a, T: Real>(&self, p: &'a [T]) -> ArrayView2<'a, T> {
        ArrayView2::from_shape((self.n_in, self.n_out), &p[self.w..self.b]).unwrap()
    }

    fn bias<'a, T: Real>(&self, p: &'a [T]) -> ArrayView1<'a, T> {
        ArrayView1::from(&p[self.b..self.b + self.n_out])
    }

    fn weight_mut<'a, T: Real>(&self, p: &'a mut [T]) -> ArrayViewMut2<'a, T> {
        ArrayViewMut2::from_shape((self.n_in, self.n_out), &mut p[self.w..self.b]).unwrap()
    }

    fn bias_mut<'a, T: Real>(&self, p: &'a mut [T]) -> ArrayViewMut1<'a, T> {
        ArrayViewMut1::from(&mut p[self.b..self.b + self.n_out])
    }

    fn apply<T: Real>(&self, p: &[T], x: ArrayView2<T>) -> Array2<T> {
        let mut z = x.dot(&self.weight(p));
        z += &self.bias(p);
        z
    }
}

/// Dueling aggregation: `q[a] = v + adv[a] - mean(adv)`.
pub fn dueling_combine<T: Real>(value: T, advantage: &[T]) -> Vec<T> {
    let mean = advantage.iter().copied().sum::<T>() / T::of(advantage.len() as f64);
    advantage.iter().map(|&a| value + a - mean).collect()
}

/// Dueling Q-network: ReLU MLP trunk feeding a scalar value head and a
/// per-action advantage head. Parameters live in one flat vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QNet<T> {
    shape: NetShape,
    params: Vec<T>,
}

/// Activations kept from a forward pass for backpropagation.
pub struct Trace<T> {
    /// `acts[0]` is the input; `acts[i]` the output of trunk layer `i`.
    acts: Vec<Array2<T>>,
    pub value: Array1<T>,
    pub advantage: Array2<T>,
    pub q: Array2<T>,
}

impl<T: Real> QNet<T> {
    /// Uniform fan-in initialization, `U(-1/sqrt(n_in), 1/sqrt(n_in))`.
    pub fn new(shape: NetShape, rng: &mut impl Rng) -> QNet<T> {
        let mut params = vec![T::zero(); shape.n_params()];
        for layer in shape.layers() {
            let bound = 1.0 / (layer.n_in as f64).sqrt();
            for p in &mut params[layer.w..layer.b + layer.n_out] {
                *p = T::of(rng.gen_range(-bound..bound));
            }
        }
        QNet { shape, params }
    }

    pub fn from_params(shape: NetShape, params: Vec<T>) -> Result<QNet<T>> {
        if params.len() != shape.n_params() {
            return Err(GlideError::Shape {
                expected: shape.n_params(),
                got: params.len(),
            });
        }
        Ok(QNet { shape, params })
    }

    pub fn shape(&self) -> &NetShape {
        &self.shape
    }

    pub fn input_dim(&self) -> usize {
        self.shape.input_dim
    }

    pub fn n_actions(&self) -> usize {
        self.shape.n_actions
    }

    pub fn params(&self) -> &[T] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [T] {
        &mut self.params
    }

    fn check_input(&self, cols: usize) -> Result<()> {
        if cols != self.shape.input_dim {
            return Err(GlideError::Shape {
                expected: self.shape.input_dim,
                got: cols,
            });
        }
        Ok(())
    }

    pub fn forward_trace(&self, x: ArrayView2<T>) -> Result<Trace<T>> {
        self.check_input(x.ncols())?;
        let layers = self.shape.layers();
        let (trunk, heads) = layers.split_at(layers.len() - 2);
        let mut acts = Vec::with_capacity(trunk.len() + 1);
        acts.push(x.to_owned());
        for layer in trunk {
            let input = acts.last().unwrap().view();
            let mut h = layer.apply(&self.params, input);
            h.mapv_inplace(|v| v.max(T::zero()));
            acts.push(h);
        }
        let feat = acts.last().unwrap().view();
        let value = heads[0].apply(&self.params, feat).index_axis_move(Axis(1), 0);
        let advantage = heads[1].apply(&self.params, feat);
        let mean = advantage.mean_axis(Axis(1)).unwrap();
        let mut q = advantage.clone();
        for ((mut row, &v), &m) in q.rows_mut().into_iter().zip(&value).zip(&mean) {
            row.mapv_inplace(|a| v + a - m);
        }
        Ok(Trace {
            acts,
            value,
            advantage,
            q,
        })
    }

    /// Batched Q-values, one row per input row.
    pub fn forward(&self, x: ArrayView2<T>) -> Result<Array2<T>> {
        Ok(self.forward_trace(x)?.q)
    }

    pub fn forward_one(&self, x: &[T]) -> Result<Vec<T>> {
        let view = ArrayView2::from_shape((1, x.len()), x).unwrap();
        Ok(self.forward(view)?.row(0).to_vec())
    }

    /// Accumulates parameter gradients for upstream gradient `dq` (same shape
    /// as `trace.q`) into `grad`.
    pub fn backward(&self, trace: &Trace<T>, dq: ArrayView2<T>, grad: &mut [T]) {
        assert_eq!(grad.len(), self.params.len());
        assert_eq!(dq.dim(), trace.q.dim());
        let layers = self.shape.layers();
        let (trunk, heads) = layers.split_at(layers.len() - 2);
        let n = T::of(self.shape.n_actions as f64);

        let dv = dq.sum_axis(Axis(1)).insert_axis(Axis(1));
        let mut da = dq.to_owned();
        for (mut row, &s) in da.rows_mut().into_iter().zip(dv.iter()) {
            row.mapv_inplace(|g| g - s / n);
        }
        let feat = trace.acts.last().unwrap();

        let mut dh = Array2::<T>::zeros(feat.dim());
        for (head, d) in [(&heads[0], dv.view()), (&heads[1], da.view())] {
            general_mat_mul(T::one(), &feat.t(), &d, T::one(), &mut head.weight_mut(grad));
            head.bias_mut(grad).scaled_add(T::one(), &d.sum_axis(Axis(0)));
            general_mat_mul(T::one(), &d, &head.weight(&self.params).t(), T::one(), &mut dh);
        }

        for (i, layer) in trunk.iter().enumerate().rev() {
            let out = &trace.acts[i + 1];
            ndarray::Zip::from(&mut dh).and(out).for_each(|g, &h| {
                if h <= T::zero() {
                    *g = T::zero();
                }
            });
            let input = &trace.acts[i];
            general_mat_mul(T::one(), &input.t(), &dh, T::one(), &mut layer.weight_mut(grad));
            layer.bias_mut(grad).scaled_add(T::one(), &dh.sum_axis(Axis(0)));
            if i > 0 {
                dh = dh.dot(&layer.weight(&self.params).t());
            }
        }
    }

    /// Overwrites the value and advantage head biases and zeroes their
    /// weights, so every input maps to the given heads. Used to build
    /// reference networks.
    pub fn force_heads(&mut self, value: T, advantage: &[T]) -> Result<()> {
        if advantage.len() != self.shape.n_actions {
            return Err(GlideError::Shape {
                expected: self.shape.n_actions,
                got: advantage.len(),
            });
        }
        let layers = self.shape.layers();
        let (v, a) = (layers[layers.len() - 2], layers[layers.len() - 1]);
        self.params[v.w..v.b].fill(T::zero());
        self.params[v.b] = value;
        self.params[a.w..a.b].fill(T::zero());
        self.params[a.b..a.b + a.n_out].copy_from_slice(advantage);
        Ok(())
    }

    /// Mutable views of one dense layer's weight matrix (`n_in x n_out`)
    /// and bias. Index `hidden.len()` is the value head, the next one the
    /// advantage head.
    pub fn layer_mut(&mut self, index: usize) -> (ArrayViewMut2<'_, T>, ArrayViewMut1<'_, T>) {
        let layer = self.shape.layers()[index];
        let (w, b) = self.params[layer.w..layer.b + layer.n_out].split_at_mut(layer.n_in * layer.n_out);
        (
            ArrayViewMut2::from_shape((layer.n_in, layer.n_out), w).unwrap(),
            ArrayViewMut1::from(b),
        )
    }

    pub fn cast<U: Real>(&self) -> QNet<U> {
        QNet {
            shape: self.shape.clone(),
            params: self.params.iter().map(|&p| U::of(p.f64())).collect(),
        }
    }
}

/// Polyak averaging: `target <- tau * online + (1 - tau) * target`.
pub fn soft_update<T: Real>(online: &QNet<T>, target: &mut QNet<T>, tau: T) -> Result<()> {
    if online.shape != target.shape {
        return Err(GlideError::Shape {
            expected: online.params.len(),
            got: target.params.len(),
        });
    }
    let keep = T::one() - tau;
    for (t, &o) in target.params.iter_mut().zip(&online.params) {
        *t = tau * o + keep * *t;
    }
    Ok(())
}
