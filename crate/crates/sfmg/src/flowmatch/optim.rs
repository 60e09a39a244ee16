//! AdamW: adaptive moments with decoupled weight decay.

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const EPS: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct AdamWState {
    m: Vec<f64>,
    v: Vec<f64>,
    step: u64,
}

impl AdamWState {
    pub fn new(num_params: usize) -> Self {
        AdamWState {
            m: vec![0.0; num_params],
            v: vec![0.0; num_params],
            step: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }
}

/// One decoupled-weight-decay update with bias correction:
/// p <- p (1 - lr wd) - lr m_hat / (sqrt(v_hat) + eps).
pub fn adamw_step(
    params: &mut [f64],
    grads: &[f64],
    state: &mut AdamWState,
    lr: f64,
    weight_decay: f64,
) {
    assert_eq!(params.len(), grads.len());
    assert_eq!(params.len(), state.m.len());
    state.step += 1;
    let bc1 = 1.0 - BETA1.powi(state.step as i32);
    let bc2 = 1.0 - BETA2.powi(state.step as i32);
    for i in 0..params.len() {
        let g = grads[i];
        state.m[i] = BETA1 * state.m[i] + (1.0 - BETA1) * g;
        state.v[i] = BETA2 * state.v[i] + (1.0 - BETA2) * g * g;
        let m_hat = state.m[i] / bc1;
        let v_hat = state.v[i] / bc2;
        params[i] = params[i] * (1.0 - lr * weight_decay) - lr * m_hat / (v_hat.sqrt() + EPS);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_grads_zero_decay_leave_params_unchanged() {
        let mut p = vec![1.0, -2.0, 0.5];
        let mut state = AdamWState::new(3);
        adamw_step(&mut p, &[0.0; 3], &mut state, 1e-3, 0.0);
        assert_eq!(p, vec![1.0, -2.0, 0.5]);
    }

    #[test]
    fn first_step_single_scalar_hand_case() {
        // m_hat = g, v_hat = g^2 after bias correction:
        // p' = p - lr * g / (|g| + eps)
        let g = 0.37;
        let lr = 1e-2;
        let mut p = vec![1.0];
        let mut state = AdamWState::new(1);
        adamw_step(&mut p, &[g], &mut state, lr, 0.0);
        let expected = 1.0 - lr * g / (g.abs() + EPS);
        assert!((p[0] - expected).abs() < 1e-15, "{} vs {expected}", p[0]);
    }

    #[test]
    fn decoupled_decay_shrinks_params() {
        let lr = 0.1;
        let wd = 0.2;
        let mut p = vec![2.0];
        let mut state = AdamWState::new(1);
        adamw_step(&mut p, &[0.0], &mut state, lr, wd);
        assert!((p[0] - 2.0 * (1.0 - lr * wd)).abs() < 1e-15);
    }
}
