use crate::error::{Error, Result};
use crate::numcore::Scalar;

fn check(op: &'static str, a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::shape(op, format!("equal lengths ({a})"), b))
    }
}

/// `(x⊗x') ∥ (x⊕x') ∥ x ∥ x'`, width `4d`.
pub fn mpu<T: Scalar>(x: &[T], y: &[T]) -> Result<Vec<T>> {
    check("mpu", x.len(), y.len())?;
    let mut out = Vec::with_capacity(4 * x.len());
    mpu_into(x, y, &mut out);
    Ok(out)
}

pub(crate) fn mpu_into<T: Scalar>(x: &[T], y: &[T], out: &mut Vec<T>) {
    out.extend(x.iter().zip(y).map(|(&a, &b)| a * b));
    out.extend(x.iter().zip(y).map(|(&a, &b)| a + b));
    out.extend_from_slice(x);
    out.extend_from_slice(y);
}

/// Accumulates the gradients of an `mpu(x, y)` output `grad` into `gx`, `gy`.
pub fn mpu_backward<T: Scalar>(x: &[T], y: &[T], grad: &[T], gx: &mut [T], gy: &mut [T]) -> Result<()> {
    let d = x.len();
    check("mpu_backward", d, y.len())?;
    check("mpu_backward", 4 * d, grad.len())?;
    let (prod, rest) = grad.split_at(d);
    let (sum, rest) = rest.split_at(d);
    let (gcx, gcy) = rest.split_at(d);
    for k in 0..d {
        gx[k] += prod[k] * y[k] + sum[k] + gcx[k];
        gy[k] += prod[k] * x[k] + sum[k] + gcy[k];
    }
    Ok(())
}

pub(crate) fn concat_into<T: Scalar>(x: &[T], y: &[T], out: &mut Vec<T>) {
    out.extend_from_slice(x);
    out.extend_from_slice(y);
}
