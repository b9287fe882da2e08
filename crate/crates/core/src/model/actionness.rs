use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};
use crate::numcore::params::{assign_named_tensors, to_named_tensors, visit_layer, visit_layer_mut};
use crate::numcore::{
    bce, bce_with_logit, read_checkpoint, relu, relu_backward, sigmoid_scalar, write_checkpoint, DenseLayer, NamedTensor,
    ParamSet, Scalar,
};

/// Two-layer MLP `3·d_v → h → 1` with a sigmoid output: the probability that
/// a window contains any activity.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionnessParams<T> {
    hidden: DenseLayer<T>,
    out: DenseLayer<T>,
}

impl<T: Scalar> ActionnessParams<T> {
    pub fn init<R: Rng + ?Sized>(input: usize, hidden: usize, rng: &mut R) -> Self {
        Self {
            hidden: DenseLayer::xavier(input, hidden, rng),
            out: DenseLayer::xavier(hidden, 1, rng),
        }
    }

    pub fn zeros(input: usize, hidden: usize) -> Self {
        Self {
            hidden: DenseLayer::zeros(input, hidden),
            out: DenseLayer::zeros(hidden, 1),
        }
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            hidden: self.hidden.zeros_like(),
            out: self.out.zeros_like(),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.hidden.input_dim()
    }

    pub fn hidden_dim(&self) -> usize {
        self.hidden.output_dim()
    }

    pub fn logit(&self, x: &[T]) -> Result<T> {
        let h = relu(&self.hidden.apply(x)?);
        Ok(self.out.apply(&h)?[0])
    }

    /// η in (0, 1).
    pub fn forward(&self, x: &[T]) -> Result<T> {
        self.logit(x).map(sigmoid_scalar)
    }

    /// Mean clamped binary cross-entropy of a batch; gradients are added to
    /// `grads` when given.
    pub fn batch_loss(&self, xs: &[&[T]], labels: &[bool], mut grads: Option<&mut Self>) -> Result<T> {
        if xs.len() != labels.len() || xs.is_empty() {
            return Err(Error::shape("actionness batch", format!("{} labels, non-empty", xs.len()), labels.len()));
        }
        let inv = T::one() / T::lit(xs.len() as f64);
        let mut total = T::zero();
        for (x, &y) in xs.iter().zip(labels) {
            let pre = self.hidden.apply(x)?;
            let h = relu(&pre);
            let z = self.out.apply(&h)?[0];
            let (loss, g) = bce_with_logit(z, y);
            total += loss;
            if let Some(grads) = grads.as_deref_mut() {
                let mut gh = self.out.backward(&h, &[g * inv], &mut grads.out)?;
                relu_backward(&pre, &mut gh);
                self.hidden.accumulate_grads(x, &gh, &mut grads.hidden)?;
            }
        }
        Ok(total * inv)
    }

    pub fn to_tensors(&self) -> Vec<NamedTensor> {
        let mut out = vec![NamedTensor {
            name: "meta.actionness".into(),
            shape: vec![2],
            data: vec![self.input_dim() as f32, self.hidden_dim() as f32],
        }];
        out.extend(to_named_tensors(self));
        out
    }

    pub fn from_tensors(tensors: &[NamedTensor]) -> Result<Self> {
        let meta = tensors
            .iter()
            .find(|t| t.name == "meta.actionness")
            .ok_or_else(|| Error::validation("meta.actionness", "not an actionness checkpoint"))?;
        if meta.data.len() != 2 || meta.data.iter().any(|&d| !(d >= 1.0 && d.fract() == 0.0)) {
            return Err(Error::validation("meta.actionness", "expected 2 positive integer dimensions"));
        }
        let mut params = Self::zeros(meta.data[0] as usize, meta.data[1] as usize);
        if tensors.len() != 5 {
            return Err(Error::validation("checkpoint", format!("expected 5 tensors, found {}", tensors.len())));
        }
        assign_named_tensors(&mut params, tensors)?;
        Ok(params)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_checkpoint(path, &self.to_tensors())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_tensors(&read_checkpoint(path)?)
    }

    pub fn cast<U: Scalar>(&self) -> ActionnessParams<U> {
        let layer = |l: &DenseLayer<T>| {
            DenseLayer::new(l.weight().cast(), l.bias().iter().map(|v| U::lit(v.as_f64())).collect())
                .expect("cast keeps shapes")
        };
        ActionnessParams {
            hidden: layer(&self.hidden),
            out: layer(&self.out),
        }
    }
}

/// Clamped binary cross-entropy of a probability.
pub fn bce_loss<T: Scalar>(eta: T, label: bool) -> T {
    bce(eta, label)
}

impl<T: Scalar> ParamSet<T> for ActionnessParams<T> {
    fn visit(&self, f: &mut dyn FnMut(&str, &[usize], &[T])) {
        visit_layer("actionness.hidden", &self.hidden, f);
        visit_layer("actionness.out", &self.out, f);
    }

    fn visit_mut(&mut self, f: &mut dyn FnMut(&str, &[usize], &mut [T])) {
        visit_layer_mut("actionness.hidden", &mut self.hidden, f);
        visit_layer_mut("actionness.out", &mut self.out, f);
    }
}
