use crate::numcore::{Matrix, Scalar};
use crate::temporal::ClipSpec;

/// Mean of rows `[from, to)`, or zeros when the range is empty.
fn mean_rows<T: Scalar>(units: &Matrix<f32>, from: usize, to: usize, out: &mut [T]) {
    let to = to.min(units.rows());
    if from >= to {
        out.iter_mut().for_each(|v| *v = T::zero());
        return;
    }
    out.iter_mut().for_each(|v| *v = T::zero());
    for r in from..to {
        for (o, &x) in out.iter_mut().zip(units.row(r)) {
            *o += T::widen(x);
        }
    }
    let n = T::lit((to - from) as f64);
    out.iter_mut().for_each(|v| *v /= n);
}

/// Pre-context ∥ central ∥ post-context mean pooling of unit features.
///
/// The contexts are the `context_units` units immediately before and after
/// the central clip, clipped to the video; an empty context is a zero block.
pub fn clip_feature<T: Scalar>(features: &Matrix<f32>, clip: &ClipSpec) -> Vec<T> {
    let d = features.cols();
    let mut out = vec![T::zero(); 3 * d];
    let (s, e) = (clip.start_unit, clip.end_unit());
    let (pre, rest) = out.split_at_mut(d);
    let (mid, post) = rest.split_at_mut(d);
    mean_rows(features, s.saturating_sub(clip.context_units), s, pre);
    mean_rows(features, s, e, mid);
    mean_rows(features, e, e + clip.context_units, post);
    out
}

/// Mean of the central units' concept vectors; contexts are not used.
pub fn clip_concept<T: Scalar>(concepts: &Matrix<f32>, clip: &ClipSpec) -> Vec<T> {
    let mut out = vec![T::zero(); concepts.cols()];
    mean_rows(concepts, clip.start_unit, clip.end_unit(), &mut out);
    out
}
