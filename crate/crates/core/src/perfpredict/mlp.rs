//! Small feed-forward regressor: ReLU hidden layers, linear output,
//! mean-squared-error loss, full-batch gradient descent.

use rand::Rng;

use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::seeded_rng;

/// Optimizer settings for [`MlpModel::train`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlpTraining {
    pub learning_rate: f64,
    pub max_iterations: usize,
    /// Training stops once one step improves the loss by less than this.
    pub min_improvement: f64,
}

impl Default for MlpTraining {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            max_iterations: 5000,
            min_improvement: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Layer<T> {
    /// `fan_out × fan_in`
    weights: Matrix<T>,
    bias: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel<T> {
    layers: Vec<Layer<T>>,
    /// Loss after the final step.
    pub final_loss: T,
    pub iterations: usize,
}

impl<T: Scalar> MlpModel<T> {
    /// Weights drawn uniformly from `±1/sqrt(fan_in)`, biases zero.
    pub fn init(n_inputs: usize, hidden: &[usize], n_outputs: usize, seed: u64) -> Self {
        let mut rng = seeded_rng(seed);
        let mut widths = vec![n_inputs];
        widths.extend_from_slice(hidden);
        widths.push(n_outputs);
        let layers = widths
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let bound = 1.0 / (fan_in.max(1) as f64).sqrt();
                let data = (0..fan_in * fan_out)
                    .map(|_| T::lit(rng.random_range(-bound..bound)))
                    .collect();
                Layer {
                    weights: Matrix::from_vec(fan_out, fan_in, data).expect("layer shape"),
                    bias: vec![T::zero(); fan_out],
                }
            })
            .collect();
        Self {
            layers,
            final_loss: T::infinity(),
            iterations: 0,
        }
    }

    pub fn train(
        inputs: &Matrix<T>,
        targets: &Matrix<T>,
        hidden: &[usize],
        seed: u64,
        cfg: MlpTraining,
    ) -> Self {
        let mut model = Self::init(inputs.cols(), hidden, targets.cols(), seed);
        let lr = T::lit(cfg.learning_rate);
        let tol = T::lit(cfg.min_improvement);
        let mut params = model.params();
        let mut previous: Option<T> = None;
        let mut iterations = 0;
        for _ in 0..cfg.max_iterations {
            let (loss, grad) = model.loss_and_gradient(inputs, targets);
            if let Some(prev) = previous {
                if !(prev - loss >= tol) {
                    break;
                }
            }
            previous = Some(loss);
            for (p, g) in params.iter_mut().zip(&grad) {
                *p -= lr * *g;
            }
            model.set_params(&params);
            iterations += 1;
        }
        model.final_loss = model.loss(inputs, targets);
        model.iterations = iterations;
        model
    }

    pub fn n_params(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.as_slice().len() + l.bias.len())
            .sum()
    }

    /// Flattened parameters: per layer, weights row-major then biases.
    pub fn params(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.n_params());
        for l in &self.layers {
            out.extend_from_slice(l.weights.as_slice());
            out.extend_from_slice(&l.bias);
        }
        out
    }

    pub fn set_params(&mut self, params: &[T]) {
        assert_eq!(params.len(), self.n_params(), "parameter count");
        let mut at = 0;
        for l in &mut self.layers {
            let (rows, cols) = (l.weights.rows(), l.weights.cols());
            l.weights = Matrix::from_vec(rows, cols, params[at..at + rows * cols].to_vec())
                .expect("layer shape");
            at += rows * cols;
            l.bias.copy_from_slice(&params[at..at + rows]);
            at += rows;
        }
    }

    /// Pre-activations and activations of every layer for one input row.
    fn forward_row(&self, x: &[T]) -> Vec<Vec<T>> {
        let last = self.layers.len() - 1;
        let mut acts = vec![x.to_vec()];
        for (li, l) in self.layers.iter().enumerate() {
            let input = acts.last().unwrap();
            let z: Vec<T> = (0..l.weights.rows())
                .map(|o| {
                    l.bias[o]
                        + l.weights
                            .row(o)
                            .iter()
                            .zip(input)
                            .map(|(&w, &a)| w * a)
                            .sum::<T>()
                })
                .collect();
            acts.push(if li == last {
                z
            } else {
                z.into_iter().map(|v| v.max(T::zero())).collect()
            });
        }
        acts
    }

    /// Network outputs without clamping.
    pub fn predict_raw(&self, inputs: &Matrix<T>) -> Matrix<T> {
        let o = self.layers.last().map_or(0, |l| l.weights.rows());
        let mut out = Matrix::zeros(inputs.rows(), o);
        for r in 0..inputs.rows() {
            let acts = self.forward_row(inputs.row(r));
            out.row_mut(r).copy_from_slice(acts.last().unwrap());
        }
        out
    }

    /// Mean squared error over every (row, output) cell.
    pub fn loss(&self, inputs: &Matrix<T>, targets: &Matrix<T>) -> T {
        self.predict_raw(inputs).mse(targets).unwrap_or_else(|_| T::nan())
    }

    /// Loss and its gradient with respect to [`MlpModel::params`].
    pub fn loss_and_gradient(&self, inputs: &Matrix<T>, targets: &Matrix<T>) -> (T, Vec<T>) {
        let n_cells = T::from_count(inputs.rows() * targets.cols());
        let two = T::lit(2.0);
        let mut grads: Vec<(Matrix<T>, Vec<T>)> = self
            .layers
            .iter()
            .map(|l| (Matrix::zeros(l.weights.rows(), l.weights.cols()), vec![T::zero(); l.bias.len()]))
            .collect();
        let mut loss = T::zero();
        for r in 0..inputs.rows() {
            let acts = self.forward_row(inputs.row(r));
            let out = acts.last().unwrap();
            let mut delta: Vec<T> = out
                .iter()
                .zip(targets.row(r))
                .map(|(&p, &t)| {
                    loss += (p - t) * (p - t);
                    two * (p - t) / n_cells
                })
                .collect();
            for li in (0..self.layers.len()).rev() {
                let input = &acts[li];
                let (gw, gb) = &mut grads[li];
                for (o, &dv) in delta.iter().enumerate() {
                    gb[o] += dv;
                    for (i, &a) in input.iter().enumerate() {
                        gw.set(o, i, gw.get(o, i) + dv * a);
                    }
                }
                if li > 0 {
                    let w = &self.layers[li].weights;
                    // acts[li] is post-ReLU, positive exactly where the unit was active
                    delta = (0..w.cols())
                        .map(|i| {
                            if input[i] > T::zero() {
                                delta.iter().enumerate().map(|(o, &dv)| dv * w.get(o, i)).sum()
                            } else {
                                T::zero()
                            }
                        })
                        .collect();
                }
            }
        }
        let mut flat = Vec::with_capacity(self.n_params());
        for (gw, gb) in grads {
            flat.extend_from_slice(gw.as_slice());
            flat.extend(gb);
        }
        (loss / n_cells, flat)
    }
}
