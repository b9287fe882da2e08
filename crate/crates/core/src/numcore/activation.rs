use crate::numcore::Scalar;

pub fn relu<T: Scalar>(x: &[T]) -> Vec<T> {
    x.iter().map(|&v| v.max(T::zero())).collect()
}

/// Multiplies `grad` in place by the ReLU derivative at `pre_activation`.
pub fn relu_backward<T: Scalar>(pre_activation: &[T], grad: &mut [T]) {
    for (g, &z) in grad.iter_mut().zip(pre_activation) {
        if z <= T::zero() {
            *g = T::zero();
        }
    }
}

#[inline]
pub fn sigmoid_scalar<T: Scalar>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

pub fn sigmoid<T: Scalar>(x: &[T]) -> Vec<T> {
    x.iter().map(|&v| sigmoid_scalar(v)).collect()
}

/// `ln(1 + e^x)` without overflow.
#[inline]
pub fn softplus<T: Scalar>(x: T) -> T {
    if x > T::zero() {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Numerically stable softmax.
pub fn softmax<T: Scalar>(x: &[T]) -> Vec<T> {
    let max = x.iter().copied().fold(T::neg_infinity(), T::max);
    if !max.is_finite() {
        return vec![T::one() / T::lit(x.len().max(1) as f64); x.len()];
    }
    let exps: Vec<T> = x.iter().map(|&v| (v - max).exp()).collect();
    let total: T = exps.iter().copied().sum();
    exps.into_iter().map(|e| e / total).collect()
}
