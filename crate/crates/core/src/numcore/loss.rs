use crate::numcore::activation::sigmoid_scalar;
use crate::numcore::Scalar;

/// Probabilities are clamped to `[BCE_CLAMP, 1 - BCE_CLAMP]` before taking logs.
pub const BCE_CLAMP: f64 = 1e-7;

/// Smooth L1: `0.5 x²` for `|x| < 1`, otherwise `|x| − 0.5`.
#[inline]
pub fn smooth_l1<T: Scalar>(x: T) -> T {
    if x.abs() < T::one() {
        T::lit(0.5) * x * x
    } else {
        x.abs() - T::lit(0.5)
    }
}

#[inline]
pub fn smooth_l1_grad<T: Scalar>(x: T) -> T {
    if x.abs() < T::one() {
        x
    } else {
        x.signum()
    }
}

/// Binomial cross-entropy of a probability against a 0/1 label.
pub fn bce<T: Scalar>(prob: T, label: bool) -> T {
    let eps = T::lit(BCE_CLAMP);
    let p = prob.max(eps).min(T::one() - eps);
    if label {
        -p.ln()
    } else {
        -(T::one() - p).ln()
    }
}

/// BCE evaluated on a logit, returning `(loss, dloss/dlogit)`. The gradient is
/// exact, including the flat region introduced by clamping.
pub fn bce_with_logit<T: Scalar>(logit: T, label: bool) -> (T, T) {
    let eps = T::lit(BCE_CLAMP);
    let p = sigmoid_scalar(logit);
    let loss = bce(p, label);
    let grad = if p < eps || p > T::one() - eps {
        T::zero()
    } else if label {
        p - T::one()
    } else {
        p
    };
    (loss, grad)
}
