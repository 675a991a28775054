//! Closed-form ridge regression with an unpenalized intercept.

use crate::error::{Error, Result};
use crate::matrix::{cholesky_solve, Matrix};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct RidgeModel<T> {
    /// `n_inputs × n_outputs`
    pub coefficients: Matrix<T>,
    pub intercepts: Vec<T>,
}

fn column_means<T: Scalar>(m: &Matrix<T>) -> Vec<T> {
    let n = T::from_count(m.rows());
    (0..m.cols())
        .map(|c| (0..m.rows()).map(|r| m.get(r, c)).sum::<T>() / n)
        .collect()
}

impl<T: Scalar> RidgeModel<T> {
    /// Solves `(Xcᵀ Xc + λI) β = Xcᵀ Yc` on centered data; the intercept
    /// is recovered from the means.
    pub fn fit(inputs: &Matrix<T>, targets: &Matrix<T>, lambda: T) -> Result<Self> {
        if !(lambda >= T::zero()) {
            return Err(Error::Config(format!("ridge lambda {lambda} must be non-negative")));
        }
        let (n, p, o) = (inputs.rows(), inputs.cols(), targets.cols());
        let xm = column_means(inputs);
        let ym = column_means(targets);
        let mut gram = Matrix::zeros(p, p);
        let mut cross = Matrix::zeros(p, o);
        for r in 0..n {
            let xc: Vec<T> = (0..p).map(|a| inputs.get(r, a) - xm[a]).collect();
            for a in 0..p {
                for b in a..p {
                    let v = gram.get(a, b) + xc[a] * xc[b];
                    gram.set(a, b, v);
                }
                for c in 0..o {
                    let v = cross.get(a, c) + xc[a] * (targets.get(r, c) - ym[c]);
                    cross.set(a, c, v);
                }
            }
        }
        for a in 0..p {
            for b in 0..a {
                gram.set(a, b, gram.get(b, a));
            }
            gram.set(a, a, gram.get(a, a) + lambda);
        }
        let coefficients = cholesky_solve(&gram, &cross)?;
        let intercepts = (0..o)
            .map(|c| ym[c] - (0..p).map(|a| xm[a] * coefficients.get(a, c)).sum::<T>())
            .collect();
        Ok(Self {
            coefficients,
            intercepts,
        })
    }

    /// Linear predictions without output clamping.
    pub fn predict_raw(&self, inputs: &Matrix<T>) -> Matrix<T> {
        let (p, o) = (self.coefficients.rows(), self.coefficients.cols());
        let mut out = Matrix::zeros(inputs.rows(), o);
        for r in 0..inputs.rows() {
            for c in 0..o {
                let v = self.intercepts[c]
                    + (0..p).map(|a| inputs.get(r, a) * self.coefficients.get(a, c)).sum::<T>();
                out.set(r, c, v);
            }
        }
        out
    }
}
