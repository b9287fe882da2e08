use crate::error::{Error, Result};
use crate::numcore::{sigmoid_scalar, smooth_l1, smooth_l1_grad, softplus, Matrix, Scalar};

fn check_square<T: Scalar>(delta: &Matrix<T>) -> Result<usize> {
    let (r, c) = delta.shape();
    if r != c {
        return Err(Error::shape("alignment_loss", "a square score matrix", format!("{r}x{c}")));
    }
    if r < 2 {
        return Err(Error::shape("alignment_loss", "at least 2 pairs so negatives exist", r));
    }
    Ok(r)
}

/// `(1/N)·Σ_i [γ·log(1+e^(−δ_ii)) + Σ_{j≠i} log(1+e^(δ_ij))]`; rows are clips,
/// columns queries, the diagonal holds the aligned pairs.
pub fn alignment_loss<T: Scalar>(delta: &Matrix<T>, gamma: T) -> Result<T> {
    let n = check_square(delta)?;
    let mut total = T::zero();
    for i in 0..n {
        for j in 0..n {
            let d = delta.get(i, j);
            total += if i == j { gamma * softplus(-d) } else { softplus(d) };
        }
    }
    Ok(total / T::lit(n as f64))
}

/// `∂L_aln/∂δ_ij` for one entry of an `n`-pair batch.
pub fn alignment_grad<T: Scalar>(d: T, aligned: bool, gamma: T, n: usize) -> T {
    let inv = T::one() / T::lit(n as f64);
    if aligned {
        -gamma * sigmoid_scalar(-d) * inv
    } else {
        sigmoid_scalar(d) * inv
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionLoss<T> {
    pub value: T,
    /// Set when the mask selected nothing; `value` is then zero.
    pub no_aligned: bool,
}

/// Mean over masked samples of `S(o*_s − o_s) + S(o*_e − o_e)`.
pub fn regression_loss<T: Scalar>(pred: &[(T, T)], targets: &[(T, T)], mask: &[bool]) -> Result<RegressionLoss<T>> {
    if pred.len() != targets.len() || pred.len() != mask.len() {
        return Err(Error::shape(
            "regression_loss",
            format!("{} targets and mask entries", pred.len()),
            format!("{} targets, {} mask entries", targets.len(), mask.len()),
        ));
    }
    let mut sum = T::zero();
    let mut count = 0usize;
    for ((p, t), &m) in pred.iter().zip(targets).zip(mask) {
        if m {
            sum += smooth_l1(t.0 - p.0) + smooth_l1(t.1 - p.1);
            count += 1;
        }
    }
    Ok(if count == 0 {
        RegressionLoss {
            value: T::zero(),
            no_aligned: true,
        }
    } else {
        RegressionLoss {
            value: sum / T::lit(count as f64),
            no_aligned: false,
        }
    })
}

/// Gradient of one sample's regression term w.r.t. `(o_s, o_e)`, for a mean over `n`.
pub fn regression_grad<T: Scalar>(pred: (T, T), target: (T, T), n: usize) -> (T, T) {
    let inv = T::one() / T::lit(n as f64);
    (-smooth_l1_grad(target.0 - pred.0) * inv, -smooth_l1_grad(target.1 - pred.1) * inv)
}

/// `L_aln + β·L_rgr` with the regression term on the diagonal pairs.
pub fn total_loss<T: Scalar>(delta: &Matrix<T>, offsets: &[(T, T)], targets: &[(T, T)], gamma: T, beta: T) -> Result<T> {
    let aln = alignment_loss(delta, gamma)?;
    let mask = vec![true; offsets.len()];
    if offsets.len() != delta.rows() {
        return Err(Error::shape("total_loss", format!("{} offset pairs", delta.rows()), offsets.len()));
    }
    let rgr = regression_loss(offsets, targets, &mask)?;
    Ok(aln + beta * rgr.value)
}
