use serde::{Deserialize, Serialize};

use super::loss::Gradients;
use super::net::QNet;
use super::real::Real;
use crate::error::{GlideError, Result};

/// Adaptive-moment optimizer state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Adam<T> {
    pub lr: T,
    pub beta1: T,
    pub beta2: T,
    pub eps: T,
    pub m: Vec<T>,
    pub v: Vec<T>,
    pub t: u64,
}

impl<T: Real> Adam<T> {
    pub fn new(n_params: usize, lr: T) -> Self {
        Adam {
            lr,
            beta1: T::of(0.9),
            beta2: T::of(0.999),
            eps: T::of(1e-8),
            m: vec![T::zero(); n_params],
            v: vec![T::zero(); n_params],
            t: 0,
        }
    }

    pub fn update(&mut self, params: &mut [T], grads: &[T]) {
        assert_eq!(params.len(), self.m.len());
        assert_eq!(grads.len(), self.m.len());
        self.t += 1;
        let one = T::one();
        let bias1 = one - self.beta1.powi(self.t.min(i32::MAX as u64) as i32);
        let bias2 = one - self.beta2.powi(self.t.min(i32::MAX as u64) as i32);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = self.beta1 * self.m[i] + (one - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (one - self.beta2) * g * g;
            let m_hat = self.m[i] / bias1;
            let v_hat = self.v[i] / bias2;
            params[i] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}

/// Rescales `grads` so its global L2 norm is at most `max_norm`. Returns the
/// norm before clipping.
pub fn clip_global_norm<T: Real>(grads: &mut Gradients<T>, max_norm: T) -> T {
    let norm = grads.norm();
    if norm > max_norm {
        grads.scale(max_norm / norm);
    }
    norm
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepStats {
    pub grad_norm: f64,
    pub clipped: bool,
}

/// Clip then apply one optimizer update. Non-finite gradients abort the step
/// without touching the network.
pub fn grad_step<T: Real>(net: &mut QNet<T>, mut grads: Gradients<T>, opt: &mut Adam<T>, clip: T) -> Result<StepStats> {
    if !grads.is_finite() {
        return Err(GlideError::Training("non-finite gradient".into()));
    }
    let norm = clip_global_norm(&mut grads, clip);
    opt.update(net.params_mut(), &grads.0);
    Ok(StepStats {
        grad_norm: norm.f64(),
        clipped: norm > clip,
    })
}
