//! The three conditional-flow-matching training loops and the noise-to-graph
//! ablation baseline.
//!
//! Each optimization step draws a batch of (t, endpoint) pairs, evaluates
//! per-sample losses and gradients (in parallel), reduces them in index
//! order so results do not depend on thread count, and applies one AdamW
//! update. "Epochs" in the architecture tables are optimization steps.

use crate::error::{Result, SfmgError};
use crate::flowmatch::loss::{cfm_loss_euclidean, cfm_loss_stiefel};
use crate::flowmatch::net::{GradientSet, NetMeta, VectorFieldNet};
use crate::flowmatch::optim::{adamw_step, AdamWState};
use crate::flowmatch::sample::{euler_sample_euclidean, euler_sample_stiefel};
use crate::graph::{Graph, SpectralData};
use crate::numerics::{gaussian_matrix, gaussian_vector, Matrix, RngState};
use crate::stiefel::{haar_sample, StiefelPoint};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Configuration of one training stage.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Optimization steps (one batch each).
    pub steps: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub hidden_dim: usize,
    pub num_blocks: usize,
    /// Euler step size for sampling.
    pub step_size: f64,
    /// Spectrum truncation order.
    pub k: usize,
    pub seed: u64,
}

impl TrainConfig {
    /// Desk-scale defaults: hidden 128, 2 blocks, 2000 steps, batch 32,
    /// learning rate 1e-4, sampler step 0.01.
    pub fn desk_scale(k: usize, seed: u64) -> Self {
        TrainConfig {
            steps: 2000,
            batch_size: 32,
            learning_rate: 1e-4,
            weight_decay: 0.0,
            hidden_dim: 128,
            num_blocks: 2,
            step_size: 0.01,
            k,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 || self.batch_size == 0 || self.hidden_dim == 0 || self.num_blocks == 0
        {
            return Err(SfmgError::Invalid("counts must be positive".into()));
        }
        if !(self.step_size > 0.0 && self.step_size <= 1.0) {
            return Err(SfmgError::Invalid(format!(
                "step size {} outside (0, 1]",
                self.step_size
            )));
        }
        if self.k == 0 {
            return Err(SfmgError::Invalid("k must be at least 1".into()));
        }
        Ok(())
    }
}

/// A trained field plus its loss trace and any skipped samples.
pub struct TrainResult {
    pub net: VectorFieldNet,
    pub losses: Vec<f64>,
    /// Samples dropped after repeated logarithm non-convergence.
    pub skipped_samples: usize,
}

const LOG_RETRY_LIMIT: usize = 5;

/// Train the eigenvalue field: straight-line flow from white noise to the
/// data eigenvalues in R^k.
pub fn train_eigenvalues(dataset: &[SpectralData], cfg: &TrainConfig) -> Result<TrainResult> {
    cfg.validate()?;
    if dataset.is_empty() {
        return Err(SfmgError::Invalid("empty training dataset".into()));
    }
    for s in dataset {
        if s.k() != cfg.k {
            return Err(SfmgError::Shape(format!(
                "spectrum with k={} in a k={} run",
                s.k(),
                cfg.k
            )));
        }
    }
    let mut rng = RngState::new(cfg.seed);
    let meta = NetMeta {
        input_dim: cfg.k,
        hidden_dim: cfg.hidden_dim,
        output_dim: cfg.k,
        num_blocks: cfg.num_blocks,
        conditioning_dim: 0,
    };
    let mut net = VectorFieldNet::new(meta, &mut rng);
    let mut opt = AdamWState::new(net.num_params());
    let mut losses = Vec::with_capacity(cfg.steps);

    for _ in 0..cfg.steps {
        let batch: Vec<(f64, usize, Vec<f64>)> = (0..cfg.batch_size)
            .map(|_| {
                let t = rng.uniform();
                let idx = rng.uniform_int(0, dataset.len() - 1);
                let x0 = gaussian_vector(cfg.k, &mut rng);
                (t, idx, x0)
            })
            .collect();
        let results: Vec<(f64, GradientSet)> = batch
            .par_iter()
            .map(|(t, idx, x0)| cfm_loss_euclidean(&net, x0, dataset[*idx].lambdas(), *t, None))
            .collect();
        let loss = reduce_and_step(&mut net, &mut opt, results, cfg);
        losses.push(loss);
    }
    Ok(TrainResult {
        net,
        losses,
        skipped_samples: 0,
    })
}

/// Train the eigenvector field: geodesic flow from Haar noise to the data
/// frames on V_k(R^n), conditioned on the true eigenvalues.
pub fn train_eigenvectors(dataset: &[SpectralData], cfg: &TrainConfig) -> Result<TrainResult> {
    cfg.validate()?;
    if dataset.is_empty() {
        return Err(SfmgError::Invalid("empty training dataset".into()));
    }
    let n = dataset[0].n();
    for s in dataset {
        if s.k() != cfg.k || s.n() != n {
            return Err(SfmgError::Shape(
                "all spectra must share the same (n, k)".into(),
            ));
        }
    }
    let frames: Vec<StiefelPoint> = dataset
        .iter()
        .map(|s| StiefelPoint::new(s.frame().clone()))
        .collect::<Result<_>>()?;
    let mut rng = RngState::new(cfg.seed);
    let meta = NetMeta {
        input_dim: n * cfg.k,
        hidden_dim: cfg.hidden_dim,
        output_dim: n * cfg.k,
        num_blocks: cfg.num_blocks,
        conditioning_dim: cfg.k,
    };
    let mut net = VectorFieldNet::new(meta, &mut rng);
    let mut opt = AdamWState::new(net.num_params());
    let mut losses = Vec::with_capacity(cfg.steps);
    let mut skipped = 0usize;

    for step in 0..cfg.steps {
        let batch: Vec<(f64, usize, u64)> = (0..cfg.batch_size)
            .map(|item| {
                let t = rng.uniform();
                let idx = rng.uniform_int(0, dataset.len() - 1);
                let stream = (step * cfg.batch_size + item) as u64;
                (t, idx, stream)
            })
            .collect();
        let results: Vec<Option<(f64, GradientSet)>> = batch
            .par_iter()
            .map(|&(t, idx, stream)| {
                let u1 = &frames[idx];
                let mut item_rng = rng.derive(stream);
                for _ in 0..=LOG_RETRY_LIMIT {
                    let u0 = haar_sample(n, cfg.k, &mut item_rng);
                    match cfm_loss_stiefel(&net, &u0, u1, t, dataset[idx].lambdas()) {
                        Ok(out) => return Some(out),
                        Err(SfmgError::NonConvergence { .. }) => continue,
                        Err(SfmgError::BranchCut(_)) => continue,
                        Err(_) => return None,
                    }
                }
                None
            })
            .collect();
        skipped += results.iter().filter(|r| r.is_none()).count();
        let loss = reduce_and_step(&mut net, &mut opt, results.into_iter().flatten().collect(), cfg);
        losses.push(loss);
    }
    Ok(TrainResult {
        net,
        losses,
        skipped_samples: skipped,
    })
}

/// Source of the starting matrix for the postprocess flow.
enum StartKind<'a> {
    /// Reconstructed Laplacian from the trained spectral generators.
    Spectral {
        eigval_net: &'a VectorFieldNet,
        eigvec_net: &'a VectorFieldNet,
    },
    /// Plain white noise on the adjacency matrix ("Noise FM" ablation).
    Noise,
}

/// Train the postprocess field: straight-line flow from reconstructed
/// Laplacians (sampled fresh from the trained spectral generators each
/// step) to the padded data adjacency matrices, jointly with node features
/// when the dataset carries them.
pub fn train_postprocess(
    dataset: &[Graph],
    eigval_net: &VectorFieldNet,
    eigvec_net: &VectorFieldNet,
    cfg: &TrainConfig,
) -> Result<TrainResult> {
    train_matrix_flow(
        dataset,
        StartKind::Spectral {
            eigval_net,
            eigvec_net,
        },
        cfg,
    )
}

/// Ablation baseline: identical machinery with L0 ~ N(0, I_{n x n}).
pub fn noise_fm_baseline(dataset: &[Graph], cfg: &TrainConfig) -> Result<TrainResult> {
    train_matrix_flow(dataset, StartKind::Noise, cfg)
}

fn train_matrix_flow(
    dataset: &[Graph],
    start: StartKind,
    cfg: &TrainConfig,
) -> Result<TrainResult> {
    cfg.validate()?;
    if dataset.is_empty() {
        return Err(SfmgError::Invalid("empty training dataset".into()));
    }
    let n = dataset[0].n();
    let m = dataset[0].features().map_or(0, |f| f.cols());
    for g in dataset {
        if g.n() != n {
            return Err(SfmgError::Shape(
                "postprocess training requires pre-padded graphs of equal size".into(),
            ));
        }
        if g.features().map_or(0, |f| f.cols()) != m {
            return Err(SfmgError::Shape(
                "featured and featureless graphs mixed in one dataset".into(),
            ));
        }
    }
    if let StartKind::Spectral { eigval_net, eigvec_net } = &start {
        if eigval_net.meta().output_dim != cfg.k
            || eigvec_net.meta().output_dim != n * cfg.k
        {
            return Err(SfmgError::MissingDependency(format!(
                "upstream generators do not match n={n}, k={}",
                cfg.k
            )));
        }
    }
    let dim = n * n + n * m;
    let mut rng = RngState::new(cfg.seed);
    let meta = NetMeta {
        input_dim: dim,
        hidden_dim: cfg.hidden_dim,
        output_dim: dim,
        num_blocks: cfg.num_blocks,
        conditioning_dim: 0,
    };
    let mut net = VectorFieldNet::new(meta, &mut rng);
    let mut opt = AdamWState::new(net.num_params());
    let mut losses = Vec::with_capacity(cfg.steps);

    // flattened targets: adjacency (+ features)
    let targets: Vec<Vec<f64>> = dataset
        .iter()
        .map(|g| {
            let mut x = g.adjacency().data().to_vec();
            if let Some(f) = g.features() {
                x.extend_from_slice(f.data());
            }
            x
        })
        .collect();

    for step in 0..cfg.steps {
        let batch: Vec<(f64, usize, u64)> = (0..cfg.batch_size)
            .map(|item| {
                let t = rng.uniform();
                let idx = rng.uniform_int(0, targets.len() - 1);
                let stream = (step * cfg.batch_size + item) as u64;
                (t, idx, stream)
            })
            .collect();
        let results: Vec<Result<(f64, GradientSet)>> = batch
            .par_iter()
            .map(|&(t, idx, stream)| {
                let mut item_rng = rng.derive(stream);
                let mut x0 = match &start {
                    StartKind::Spectral {
                        eigval_net,
                        eigvec_net,
                    } => reconstructed_start(eigval_net, eigvec_net, n, cfg, &mut item_rng)?,
                    StartKind::Noise => gaussian_matrix(n, n, &mut item_rng).into_data(),
                };
                if m > 0 {
                    x0.extend(gaussian_matrix(n, m, &mut item_rng).into_data());
                }
                Ok(cfm_loss_euclidean(&net, &x0, &targets[idx], t, None))
            })
            .collect();
        let mut ok = Vec::with_capacity(results.len());
        for r in results {
            ok.push(r?);
        }
        let loss = reduce_and_step(&mut net, &mut opt, ok, cfg);
        losses.push(loss);
    }
    Ok(TrainResult {
        net,
        losses,
        skipped_samples: 0,
    })
}

/// L0 = U diag(lambda) U^T drawn from the trained spectral generators.
fn reconstructed_start(
    eigval_net: &VectorFieldNet,
    eigvec_net: &VectorFieldNet,
    n: usize,
    cfg: &TrainConfig,
    rng: &mut RngState,
) -> Result<Vec<f64>> {
    let lambda0 = gaussian_vector(cfg.k, rng);
    let lambda1 = euler_sample_euclidean(eigval_net, &lambda0, cfg.step_size, None);
    let u0 = haar_sample(n, cfg.k, rng);
    let u1 = euler_sample_stiefel(eigvec_net, &u0, cfg.step_size, Some(&lambda1))?;
    let l0 = u1
        .frame()
        .matmul(&Matrix::diagonal(&lambda1))
        .matmul(&u1.frame().transpose());
    Ok(l0.into_data())
}

/// Mean the per-sample losses and gradients in index order and apply one
/// optimizer step. An empty batch (all samples skipped) leaves the
/// parameters untouched and records a zero loss.
fn reduce_and_step(
    net: &mut VectorFieldNet,
    opt: &mut AdamWState,
    results: Vec<(f64, GradientSet)>,
    cfg: &TrainConfig,
) -> f64 {
    if results.is_empty() {
        return 0.0;
    }
    let count = results.len() as f64;
    let mut loss_sum = 0.0;
    let mut grad_sum = GradientSet::zeros_like(net);
    for (loss, grads) in results {
        loss_sum += loss;
        grad_sum.add_assign(&grads);
    }
    grad_sum.scale(1.0 / count);
    adamw_step(
        net.params_mut(),
        grad_sum.values(),
        opt,
        cfg.learning_rate,
        cfg.weight_decay,
    );
    loss_sum / count
}

/// Mean of the first and last `window` entries; used by the convergence
/// smoke checks.
pub fn loss_window_means(losses: &[f64], window: usize) -> (f64, f64) {
    let w = window.min(losses.len());
    let first = losses[..w].iter().sum::<f64>() / w as f64;
    let last = losses[losses.len() - w..].iter().sum::<f64>() / w as f64;
    (first, last)
}
