use crate::error::{Error, Result};

/// Outcome of a finite-difference gradient comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub max_rel_error: f64,
    pub worst_coordinate: Option<usize>,
    pub coordinates_checked: usize,
}

impl GradCheckReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_rel_error < tol
    }
}

/// Compares `analytic` against central differences of `loss` around `params`.
///
/// The error per coordinate is `|a − fd| / max(|a|, |fd|, 1e-8)`. When
/// `coordinates` is `None` every coordinate is checked.
pub fn grad_check<F>(
    mut loss: F,
    params: &[f64],
    analytic: &[f64],
    eps: f64,
    coordinates: Option<&[usize]>,
) -> Result<GradCheckReport>
where
    F: FnMut(&[f64]) -> f64,
{
    if params.len() != analytic.len() {
        return Err(Error::shape(
            "grad_check",
            format!("{} analytic gradients", params.len()),
            format!("{}", analytic.len()),
        ));
    }
    let all: Vec<usize>;
    let coords = match coordinates {
        Some(c) => c,
        None => {
            all = (0..params.len()).collect();
            &all
        }
    };
    let mut probe = params.to_vec();
    let mut report = GradCheckReport {
        max_rel_error: 0.0,
        worst_coordinate: None,
        coordinates_checked: 0,
    };
    for &i in coords {
        if i >= params.len() {
            return Err(Error::shape("grad_check", format!("coordinate < {}", params.len()), i));
        }
        let orig = probe[i];
        probe[i] = orig + eps;
        let up = loss(&probe);
        probe[i] = orig - eps;
        let down = loss(&probe);
        probe[i] = orig;
        if !up.is_finite() || !down.is_finite() {
            return Err(Error::Numeric(format!("non-finite loss while probing coordinate {i}")));
        }
        let fd = (up - down) / (2.0 * eps);
        let a = analytic[i];
        let rel = (a - fd).abs() / a.abs().max(fd.abs()).max(1e-8);
        if report.worst_coordinate.is_none() || rel > report.max_rel_error {
            report.max_rel_error = rel;
            report.worst_coordinate = Some(i);
        }
        report.coordinates_checked += 1;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_square(p: &[f64]) -> f64 {
        0.5 * p.iter().map(|x| x * x).sum::<f64>()
    }

    #[test]
    fn quadratic_is_exact() {
        let p = vec![0.3, -1.2, 2.5, 0.0, 7.0];
        let report = grad_check(half_square, &p, &p, 1e-5, None).unwrap();
        assert!(report.max_rel_error < 1e-7, "{report:?}");
        assert_eq!(report.coordinates_checked, 5);
    }

    #[test]
    fn doubled_gradient_is_caught() {
        let p = vec![0.3, -1.2, 2.5];
        let wrong: Vec<f64> = p.iter().map(|x| 2.0 * x).collect();
        let report = grad_check(half_square, &p, &wrong, 1e-5, None).unwrap();
        assert!((report.max_rel_error - 0.5).abs() < 1e-6, "{report:?}");
        assert!(!report.passes(1e-4));
    }

    #[test]
    fn non_finite_loss_rejected() {
        let p = vec![1.0];
        assert!(grad_check(|_| f64::NAN, &p, &[0.0], 1e-5, None).is_err());
    }

    #[test]
    fn sampled_coordinates_only() {
        let p = vec![1.0, 2.0, 3.0];
        let mut wrong = p.clone();
        wrong[0] = 100.0;
        let report = grad_check(half_square, &p, &wrong, 1e-5, Some(&[1, 2])).unwrap();
        assert!(report.passes(1e-7));
        assert_eq!(report.coordinates_checked, 2);
    }
}
