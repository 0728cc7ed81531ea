use ndarray::{Array2, ArrayView2};

use super::net::QNet;
use super::real::Real;
use crate::error::{GlideError, Result};

/// Flat gradient vector matching a network's parameter layout.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients<T>(pub Vec<T>);

impl<T: Real> Gradients<T> {
    pub fn zeros(n: usize) -> Self {
        Gradients(vec![T::zero(); n])
    }

    pub fn norm(&self) -> T {
        self.0.iter().map(|&g| g * g).sum::<T>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|g| g.is_finite())
    }

    pub fn scale(&mut self, s: T) {
        self.0.iter_mut().for_each(|g| *g *= s);
    }

    /// `self += s * other`
    pub fn add_scaled(&mut self, other: &Gradients<T>, s: T) {
        assert_eq!(self.0.len(), other.0.len());
        for (a, &b) in self.0.iter_mut().zip(&other.0) {
            *a += s * b;
        }
    }
}

#[derive(Clone, Debug)]
pub struct LossOutput<T> {
    pub loss: T,
    pub grads: Gradients<T>,
}

/// One TD-learning minibatch in network-input form.
#[derive(Clone, Debug)]
pub struct QBatch<T> {
    pub obs: Array2<T>,
    pub actions: Vec<usize>,
    pub rewards: Vec<T>,
    pub next_obs: Array2<T>,
    pub dones: Vec<bool>,
}

impl<T: Real> QBatch<T> {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

/// Index of the largest score; ties go to the lowest index.
pub fn argmax<T: Real>(q: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in q.iter().enumerate().skip(1) {
        if v > q[best] {
            best = i;
        }
    }
    best
}

/// Double-DQN target for one transition: the online scores pick the next
/// action, the target scores evaluate it.
pub fn double_dqn_target<T: Real>(reward: T, done: bool, discount: T, q_online_next: &[T], q_target_next: &[T]) -> T {
    if done {
        reward
    } else {
        reward + discount * q_target_next[argmax(q_online_next)]
    }
}

pub fn td_targets<T: Real>(batch: &QBatch<T>, online: &QNet<T>, target: &QNet<T>, discount: T) -> Result<Vec<T>> {
    let q_online = online.forward(batch.next_obs.view())?;
    let q_target = target.forward(batch.next_obs.view())?;
    Ok((0..batch.len())
        .map(|i| {
            double_dqn_target(
                batch.rewards[i],
                batch.dones[i],
                discount,
                q_online.row(i).as_slice().unwrap(),
                q_target.row(i).as_slice().unwrap(),
            )
        })
        .collect())
}

/// Mean squared TD error against frozen double-DQN targets. Gradients flow
/// only through `Q_online(s, a)`.
pub fn d3qn_loss<T: Real>(batch: &QBatch<T>, online: &QNet<T>, target: &QNet<T>, discount: T) -> Result<LossOutput<T>> {
    if batch.is_empty() {
        return Err(GlideError::Training("empty batch".into()));
    }
    let y = td_targets(batch, online, target, discount)?;
    q_regression_loss(online, batch.obs.view(), &batch.actions, &y)
}

/// `mean_i (Q(s_i, a_i) - y_i)^2` and its gradient.
pub fn q_regression_loss<T: Real>(net: &QNet<T>, obs: ArrayView2<T>, actions: &[usize], y: &[T]) -> Result<LossOutput<T>> {
    let trace = net.forward_trace(obs)?;
    let n = T::of(actions.len() as f64);
    let mut dq = Array2::zeros(trace.q.dim());
    let mut loss = T::zero();
    for (i, (&a, &yi)) in actions.iter().zip(y).enumerate() {
        let err = trace.q[[i, a]] - yi;
        loss += err * err;
        dq[[i, a]] = T::of(2.0) * err / n;
    }
    let mut grads = Gradients::zeros(net.params().len());
    net.backward(&trace, dq.view(), &mut grads.0);
    Ok(LossOutput { loss: loss / n, grads })
}

/// `-log softmax(q)[a]`, computed stably.
pub fn softmax_cross_entropy<T: Real>(q: &[T], action: usize) -> T {
    let max = q.iter().copied().fold(T::neg_infinity(), T::max);
    let lse = max + q.iter().map(|&v| (v - max).exp()).sum::<T>().ln();
    lse - q[action]
}

/// Behavioral cloning loss: cross-entropy of the demonstrated action under a
/// softmax over the network's Q-values.
pub fn bc_loss<T: Real>(net: &QNet<T>, obs: ArrayView2<T>, actions: &[usize]) -> Result<LossOutput<T>> {
    if actions.is_empty() {
        return Err(GlideError::Training("empty behavioral cloning batch".into()));
    }
    let trace = net.forward_trace(obs)?;
    let n = T::of(actions.len() as f64);
    let mut dq = Array2::zeros(trace.q.dim());
    let mut loss = T::zero();
    for (i, &a) in actions.iter().enumerate() {
        let row = trace.q.row(i);
        let row = row.as_slice().unwrap();
        loss += softmax_cross_entropy(row, a);
        let max = row.iter().copied().fold(T::neg_infinity(), T::max);
        let z: T = row.iter().map(|&v| (v - max).exp()).sum();
        for (j, &v) in row.iter().enumerate() {
            let p = (v - max).exp() / z;
            let target = if j == a { T::one() } else { T::zero() };
            dq[[i, j]] = (p - target) / n;
        }
    }
    let mut grads = Gradients::zeros(net.params().len());
    net.backward(&trace, dq.view(), &mut grads.0);
    Ok(LossOutput { loss: loss / n, grads })
}

/// `L = L_rl + weight * L_bc`.
pub fn total_student_loss<T: Real>(rl: T, bc: T, bc_weight: T) -> T {
    rl + bc_weight * bc
}

/// Gradients of [`total_student_loss`].
pub fn mix_gradients<T: Real>(rl: &Gradients<T>, bc: &Gradients<T>, bc_weight: T) -> Gradients<T> {
    let mut out = rl.clone();
    out.add_scaled(bc, bc_weight);
    out
}

/// Adaptive BC weight: `w + (ratio * L_rl - L_bc) * rate`, clamped to
/// `[0, max]`.
pub fn update_bc_weight(weight: f64, rl_loss: f64, bc_loss: f64, ratio: f64, rate: f64, max: f64) -> f64 {
    (weight + (ratio * rl_loss - bc_loss) * rate).clamp(0.0, max)
}
