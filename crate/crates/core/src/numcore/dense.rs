use rand::Rng;
use rand_distr::{Distribution, Uniform};

use crate::error::{Error, Result};
use crate::numcore::matrix::dot;
use crate::numcore::{Matrix, Scalar};

/// Fully-connected layer `y = W x + b`, with `W` shaped `(out, in)`.
///
/// Inputs are not cached inside the layer: one layer is applied to many
/// inputs per batch (every clip/query pair), so callers keep the inputs they
/// need for [`DenseLayer::backward`].
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer<T> {
    weight: Matrix<T>,
    bias: Vec<T>,
}

impl<T: Scalar> DenseLayer<T> {
    pub fn new(weight: Matrix<T>, bias: Vec<T>) -> Result<Self> {
        if bias.len() != weight.rows() {
            return Err(Error::shape(
                "DenseLayer::new",
                format!("bias of length {}", weight.rows()),
                format!("length {}", bias.len()),
            ));
        }
        Ok(Self { weight, bias })
    }

    pub fn zeros(input: usize, output: usize) -> Self {
        Self {
            weight: Matrix::zeros(output, input),
            bias: vec![T::zero(); output],
        }
    }

    /// Glorot-uniform weights in `(-a, a)`, `a = sqrt(6 / (in + out))`, zero bias.
    pub fn xavier<R: Rng + ?Sized>(input: usize, output: usize, rng: &mut R) -> Self {
        let limit = (6.0 / (input + output) as f64).sqrt();
        let dist = Uniform::new(-limit, limit).expect("finite, non-empty range");
        let data = (0..input * output).map(|_| T::lit(dist.sample(rng))).collect();
        Self {
            weight: Matrix::new(output, input, data).expect("sized by construction"),
            bias: vec![T::zero(); output],
        }
    }

    pub fn zeros_like(&self) -> Self {
        Self::zeros(self.input_dim(), self.output_dim())
    }

    #[inline]
    pub fn input_dim(&self) -> usize {
        self.weight.cols()
    }

    #[inline]
    pub fn output_dim(&self) -> usize {
        self.weight.rows()
    }

    pub fn weight(&self) -> &Matrix<T> {
        &self.weight
    }

    pub fn weight_mut(&mut self) -> &mut Matrix<T> {
        &mut self.weight
    }

    pub fn bias(&self) -> &[T] {
        &self.bias
    }

    pub fn bias_mut(&mut self) -> &mut [T] {
        &mut self.bias
    }

    /// `W x + b`.
    pub fn apply(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_input(x)?;
        Ok((0..self.output_dim())
            .map(|r| dot(self.weight.row(r), x) + self.bias[r])
            .collect())
    }

    /// Accumulates `dL/dW` and `dL/db` into `grads` and returns `dL/dx`.
    pub fn backward(&self, x: &[T], grad_out: &[T], grads: &mut DenseLayer<T>) -> Result<Vec<T>> {
        self.accumulate_grads(x, grad_out, grads)?;
        let mut grad_in = vec![T::zero(); self.input_dim()];
        for (r, &g) in grad_out.iter().enumerate() {
            if g == T::zero() {
                continue;
            }
            for (gi, &w) in grad_in.iter_mut().zip(self.weight.row(r)) {
                *gi += g * w;
            }
        }
        Ok(grad_in)
    }

    /// Parameter-only half of [`DenseLayer::backward`], for layers whose input
    /// is data rather than an upstream activation.
    pub fn accumulate_grads(&self, x: &[T], grad_out: &[T], grads: &mut DenseLayer<T>) -> Result<()> {
        self.check_input(x)?;
        if grad_out.len() != self.output_dim() {
            return Err(Error::shape(
                "DenseLayer::backward",
                format!("output gradient of length {}", self.output_dim()),
                format!("length {}", grad_out.len()),
            ));
        }
        if grads.weight.shape() != self.weight.shape() {
            return Err(Error::shape(
                "DenseLayer::backward",
                format!("gradient buffer {:?}", self.weight.shape()),
                format!("{:?}", grads.weight.shape()),
            ));
        }
        for (r, &g) in grad_out.iter().enumerate() {
            if g == T::zero() {
                continue;
            }
            grads.bias[r] += g;
            for (gw, &xi) in grads.weight.row_mut(r).iter_mut().zip(x) {
                *gw += g * xi;
            }
        }
        Ok(())
    }

    fn check_input(&self, x: &[T]) -> Result<()> {
        if x.len() != self.input_dim() {
            return Err(Error::shape(
                "dense_apply",
                format!("input of length {} for a {}x{} layer", self.input_dim(), self.output_dim(), self.input_dim()),
                format!("input of length {}", x.len()),
            ));
        }
        Ok(())
    }

    /// Elementwise `self += other`; used to reduce gradient buffers.
    pub fn add_assign(&mut self, other: &DenseLayer<T>) -> Result<()> {
        if self.weight.shape() != other.weight.shape() {
            return Err(Error::shape(
                "DenseLayer::add_assign",
                format!("{:?}", self.weight.shape()),
                format!("{:?}", other.weight.shape()),
            ));
        }
        for (a, &b) in self.weight.data_mut().iter_mut().zip(other.weight.data()) {
            *a += b;
        }
        for (a, &b) in self.bias.iter_mut().zip(&other.bias) {
            *a += b;
        }
        Ok(())
    }

    pub(crate) fn tensors(&self) -> [(&'static str, Vec<usize>, &[T]); 2] {
        [
            ("weight", vec![self.output_dim(), self.input_dim()], self.weight.data()),
            ("bias", vec![self.output_dim()], &self.bias),
        ]
    }

    pub(crate) fn tensors_mut(&mut self) -> [(&'static str, Vec<usize>, &mut [T]); 2] {
        let shape_w = vec![self.output_dim(), self.input_dim()];
        let shape_b = vec![self.output_dim()];
        [("weight", shape_w, self.weight.data_mut()), ("bias", shape_b, &mut self.bias)]
    }
}
