use crate::error::{Error, Result};
use crate::numcore::checkpoint::NamedTensor;
use crate::numcore::{DenseLayer, Scalar};

/// A collection of named parameter tensors visited in a fixed order. The order
/// defines the flat layout used by the optimizer and by gradient checks.
pub trait ParamSet<T: Scalar> {
    fn visit(&self, f: &mut dyn FnMut(&str, &[usize], &[T]));
    fn visit_mut(&mut self, f: &mut dyn FnMut(&str, &[usize], &mut [T]));

    fn num_params(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_, _, data| n += data.len());
        n
    }
}

impl<T: Scalar> ParamSet<T> for DenseLayer<T> {
    fn visit(&self, f: &mut dyn FnMut(&str, &[usize], &[T])) {
        for (name, shape, data) in self.tensors() {
            f(name, &shape, data);
        }
    }

    fn visit_mut(&mut self, f: &mut dyn FnMut(&str, &[usize], &mut [T])) {
        for (name, shape, data) in self.tensors_mut() {
            f(name, &shape, data);
        }
    }
}

/// Visits a layer's tensors under `prefix.`.
pub(crate) fn visit_layer<T: Scalar>(prefix: &str, layer: &DenseLayer<T>, f: &mut dyn FnMut(&str, &[usize], &[T])) {
    for (name, shape, data) in layer.tensors() {
        f(&format!("{prefix}.{name}"), &shape, data);
    }
}

pub(crate) fn visit_layer_mut<T: Scalar>(
    prefix: &str,
    layer: &mut DenseLayer<T>,
    f: &mut dyn FnMut(&str, &[usize], &mut [T]),
) {
    for (name, shape, data) in layer.tensors_mut() {
        f(&format!("{prefix}.{name}"), &shape, data);
    }
}

pub fn flatten<T: Scalar, P: ParamSet<T> + ?Sized>(set: &P) -> Vec<T> {
    let mut out = Vec::with_capacity(set.num_params());
    set.visit(&mut |_, _, data| out.extend_from_slice(data));
    out
}

pub fn assign_flat<T: Scalar, P: ParamSet<T> + ?Sized>(set: &mut P, flat: &[T]) -> Result<()> {
    let expected = set.num_params();
    if flat.len() != expected {
        return Err(Error::shape("assign_flat", format!("{expected} values"), format!("{} values", flat.len())));
    }
    let mut offset = 0;
    set.visit_mut(&mut |_, _, data| {
        data.copy_from_slice(&flat[offset..offset + data.len()]);
        offset += data.len();
    });
    Ok(())
}

/// Snapshot as 32-bit named tensors for checkpointing.
pub fn to_named_tensors<T: Scalar, P: ParamSet<T> + ?Sized>(set: &P) -> Vec<NamedTensor> {
    let mut out = Vec::new();
    set.visit(&mut |name, shape, data| {
        out.push(NamedTensor {
            name: name.to_owned(),
            shape: shape.to_vec(),
            data: data.iter().map(|v| v.as_f32()).collect(),
        });
    });
    out
}

/// Overwrites every tensor of `set` from `tensors`; names and shapes must match.
pub fn assign_named_tensors<T: Scalar, P: ParamSet<T> + ?Sized>(set: &mut P, tensors: &[NamedTensor]) -> Result<()> {
    let mut failure = None;
    set.visit_mut(&mut |name, shape, data| {
        if failure.is_some() {
            return;
        }
        match tensors.iter().find(|t| t.name == name) {
            None => failure = Some(Error::validation(name, "tensor missing from checkpoint")),
            Some(t) if t.shape != shape => {
                failure = Some(Error::shape("assign_named_tensors", format!("{name} {shape:?}"), format!("{:?}", t.shape)))
            }
            Some(t) => {
                for (d, &s) in data.iter_mut().zip(&t.data) {
                    *d = T::widen(s);
                }
            }
        }
    });
    failure.map_or(Ok(()), Err)
}
