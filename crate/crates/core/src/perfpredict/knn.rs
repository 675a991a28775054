//! k-nearest-neighbour regression: Euclidean distance, uniform weights.

use crate::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel<T> {
    inputs: Matrix<T>,
    targets: Matrix<T>,
    k: usize,
}

impl<T: Scalar> KnnModel<T> {
    /// Stores the training set; the effective `k` is capped at its size.
    pub fn fit(inputs: &Matrix<T>, targets: &Matrix<T>, k: usize) -> Self {
        Self {
            inputs: inputs.clone(),
            targets: targets.clone(),
            k: k.clamp(1, inputs.rows().max(1)),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Average target of the `k` closest training rows; equidistant rows
    /// are taken in training order.
    pub fn predict(&self, inputs: &Matrix<T>) -> Matrix<T> {
        let o = self.targets.cols();
        let mut out = Matrix::zeros(inputs.rows(), o);
        let kk = T::from_count(self.k);
        for r in 0..inputs.rows() {
            let query = inputs.row(r);
            let mut dist: Vec<(T, usize)> = (0..self.inputs.rows())
                .map(|t| {
                    let d2: T = self
                        .inputs
                        .row(t)
                        .iter()
                        .zip(query)
                        .map(|(&a, &b)| (a - b) * (a - b))
                        .sum();
                    (d2, t)
                })
                .collect();
            dist.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite distance").then(a.1.cmp(&b.1)));
            for c in 0..o {
                let s: T = dist[..self.k].iter().map(|&(_, t)| self.targets.get(t, c)).sum();
                out.set(r, c, s / kk);
            }
        }
        out
    }
}
