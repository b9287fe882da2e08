use std::path::Path;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::config::{BranchSpec, Fusion, ModelDims, QuerySource, Variant, VideoSource};
use crate::model::losses::{alignment_grad, regression_grad};
use crate::model::mpu::{concat_into, mpu_backward, mpu_into};
use crate::numcore::params::{assign_named_tensors, to_named_tensors, visit_layer, visit_layer_mut};
use crate::numcore::{
    read_checkpoint, relu, relu_backward, smooth_l1, softplus, write_checkpoint, DenseLayer, Matrix, NamedTensor,
    ParamSet, Scalar,
};

/// Video-side inputs of one clip.
#[derive(Debug, Clone, PartialEq)]
pub struct ClipInput<T> {
    /// Pooled context/central/context feature, `3·d_v`.
    pub feature: Vec<T>,
    /// Pooled central concept vector, `d_c`.
    pub concept: Vec<T>,
}

/// Query-side inputs of one sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryInput<T> {
    pub sentence: Vec<T>,
    /// `emb(verb) ∥ emb(object)`, zeros when there is no usable pair.
    pub vo: Vec<T>,
}

impl<T> ClipInput<T> {
    pub fn source(&self, s: VideoSource) -> &[T] {
        match s {
            VideoSource::ClipFeature => &self.feature,
            VideoSource::ClipConcept => &self.concept,
        }
    }
}

impl<T> QueryInput<T> {
    pub fn source(&self, s: QuerySource) -> &[T] {
        match s {
            QuerySource::Sentence => &self.sentence,
            QuerySource::VoEmbedding => &self.vo,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch<T> {
    pub spec: BranchSpec,
    pub video: DenseLayer<T>,
    pub query: DenseLayer<T>,
}

/// Head output for one clip/query pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AclOutput<T> {
    /// Pre-alignment score δ.
    pub delta: T,
    /// Start offset `o_s`, in units.
    pub start_offset: T,
    /// End offset `o_e`, in units.
    pub end_offset: T,
}

/// Loss of one batch plus the scores it was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchLoss<T> {
    pub alignment: T,
    pub regression: T,
    pub total: T,
    pub delta: Matrix<T>,
    pub offsets: Vec<(T, T)>,
}

/// Learnable parameters of the alignment network: per-branch projections and
/// the two-layer head producing `(δ, o_s, o_e)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AclParams<T> {
    variant: Variant,
    dims: ModelDims,
    branches: Vec<Branch<T>>,
    head_hidden: DenseLayer<T>,
    head_out: DenseLayer<T>,
}

struct RowResult<T> {
    aln: T,
    rgr: T,
    deltas: Vec<T>,
    offsets: (T, T),
    grads: Option<RowGrads<T>>,
}

struct RowGrads<T> {
    head_hidden: DenseLayer<T>,
    head_out: DenseLayer<T>,
    /// `[branch][k]` gradient w.r.t. the projected clip of this row.
    video: Vec<Vec<T>>,
    /// `[branch][j][k]` gradient w.r.t. every projected query.
    query: Vec<Vec<Vec<T>>>,
}

impl<T: Scalar> AclParams<T> {
    fn build(variant: Variant, dims: ModelDims, mut layer: impl FnMut(usize, usize) -> DenseLayer<T>) -> Result<Self> {
        dims.validate()?;
        let branches = variant
            .branches()
            .into_iter()
            .map(|spec| {
                let d = dims.width(spec.width);
                let video = layer(dims.video_dim(spec.video), d);
                let query = layer(dims.query_dim(spec.query), d);
                Branch { spec, video, query }
            })
            .collect();
        let head_hidden = layer(dims.head_input(variant), dims.hidden);
        let head_out = layer(dims.hidden, 3);
        Ok(Self {
            variant,
            dims,
            branches,
            head_hidden,
            head_out,
        })
    }

    /// Xavier-uniform weights, zero biases.
    pub fn init<R: Rng + ?Sized>(variant: Variant, dims: ModelDims, rng: &mut R) -> Result<Self> {
        Self::build(variant, dims, |i, o| DenseLayer::xavier(i, o, rng))
    }

    pub fn zeros(variant: Variant, dims: ModelDims) -> Result<Self> {
        Self::build(variant, dims, DenseLayer::zeros)
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            variant: self.variant,
            dims: self.dims,
            branches: self
                .branches
                .iter()
                .map(|b| Branch {
                    spec: b.spec,
                    video: b.video.zeros_like(),
                    query: b.query.zeros_like(),
                })
                .collect(),
            head_hidden: self.head_hidden.zeros_like(),
            head_out: self.head_out.zeros_like(),
        }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn dims(&self) -> &ModelDims {
        &self.dims
    }

    pub fn branches(&self) -> &[Branch<T>] {
        &self.branches
    }

    pub fn head_hidden(&self) -> &DenseLayer<T> {
        &self.head_hidden
    }

    pub fn head_out(&self) -> &DenseLayer<T> {
        &self.head_out
    }

    pub fn head_out_mut(&mut self) -> &mut DenseLayer<T> {
        &mut self.head_out
    }

    /// Per-branch video-side projections of one clip.
    pub fn project_clip(&self, clip: &ClipInput<T>) -> Result<Vec<Vec<T>>> {
        self.branches.iter().map(|b| b.video.apply(clip.source(b.spec.video))).collect()
    }

    /// Per-branch query-side projections of one query.
    pub fn project_query(&self, query: &QueryInput<T>) -> Result<Vec<Vec<T>>> {
        self.branches.iter().map(|b| b.query.apply(query.source(b.spec.query))).collect()
    }

    fn head_input(&self, v: &[Vec<T>], q: &[Vec<T>]) -> Vec<T> {
        let mut x = Vec::with_capacity(self.head_hidden.input_dim());
        for ((b, vb), qb) in self.branches.iter().zip(v).zip(q) {
            match b.spec.fusion {
                Fusion::Mpu => mpu_into(vb, qb, &mut x),
                Fusion::Concat => concat_into(vb, qb, &mut x),
            }
        }
        x
    }

    /// Head pre-activation and output for projected inputs.
    fn head(&self, x: &[T]) -> Result<(Vec<T>, Vec<T>, Vec<T>)> {
        let pre = self.head_hidden.apply(x)?;
        let h = relu(&pre);
        let out = self.head_out.apply(&h)?;
        Ok((pre, h, out))
    }

    pub fn forward_projected(&self, v: &[Vec<T>], q: &[Vec<T>]) -> Result<AclOutput<T>> {
        let (_, _, out) = self.head(&self.head_input(v, q))?;
        Ok(AclOutput {
            delta: out[0],
            start_offset: out[1],
            end_offset: out[2],
        })
    }

    pub fn forward(&self, clip: &ClipInput<T>, query: &QueryInput<T>) -> Result<AclOutput<T>> {
        self.forward_projected(&self.project_clip(clip)?, &self.project_query(query)?)
    }

    /// Scores many clips against one query, projecting the query once.
    pub fn score_clips(&self, clips: &[ClipInput<T>], query: &QueryInput<T>) -> Result<Vec<AclOutput<T>>> {
        let q = self.project_query(query)?;
        clips.iter().map(|c| self.forward_projected(&self.project_clip(c)?, &q)).collect()
    }

    /// `L_aln + β·L_rgr` over all `N×N` clip/query pairs of a batch whose
    /// `i`-th clip is aligned with the `i`-th query. When `grads` is given the
    /// parameter gradients are added to it.
    pub fn batch_loss(
        &self,
        clips: &[&ClipInput<T>],
        queries: &[&QueryInput<T>],
        targets: &[(T, T)],
        gamma: T,
        beta: T,
        grads: Option<&mut AclParams<T>>,
    ) -> Result<BatchLoss<T>> {
        let n = clips.len();
        if queries.len() != n || targets.len() != n {
            return Err(Error::shape(
                "batch_loss",
                format!("{n} queries and targets"),
                format!("{} queries, {} targets", queries.len(), targets.len()),
            ));
        }
        if n < 2 {
            return Err(Error::shape("batch_loss", "at least 2 aligned pairs", n));
        }
        let vp: Vec<Vec<Vec<T>>> = clips.iter().map(|c| self.project_clip(c)).collect::<Result<_>>()?;
        let qp: Vec<Vec<Vec<T>>> = queries.iter().map(|q| self.project_query(q)).collect::<Result<_>>()?;
        let want_grads = grads.is_some();

        let rows: Vec<RowResult<T>> = (0..n)
            .into_par_iter()
            .map(|i| self.batch_row(i, &vp, &qp, targets[i], gamma, beta, want_grads))
            .collect::<Result<_>>()?;

        let inv = T::one() / T::lit(n as f64);
        let mut aln = T::zero();
        let mut rgr = T::zero();
        let mut delta = Matrix::zeros(n, n);
        let mut offsets = Vec::with_capacity(n);
        for (i, r) in rows.iter().enumerate() {
            aln += r.aln;
            rgr += r.rgr;
            delta.row_mut(i).copy_from_slice(&r.deltas);
            offsets.push(r.offsets);
        }
        let (alignment, regression) = (aln * inv, rgr * inv);

        if let Some(grads) = grads {
            let nb = self.branches.len();
            let mut gq: Vec<Vec<Vec<T>>> = (0..nb)
                .map(|b| vec![vec![T::zero(); self.branches[b].query.output_dim()]; n])
                .collect();
            for (i, r) in rows.into_iter().enumerate() {
                let rg = r.grads.expect("row gradients requested");
                grads.head_hidden.add_assign(&rg.head_hidden)?;
                grads.head_out.add_assign(&rg.head_out)?;
                for b in 0..nb {
                    let branch = &self.branches[b];
                    branch
                        .video
                        .accumulate_grads(clips[i].source(branch.spec.video), &rg.video[b], &mut grads.branches[b].video)?;
                    for (acc, g) in gq[b].iter_mut().zip(&rg.query[b]) {
                        for (a, &x) in acc.iter_mut().zip(g) {
                            *a += x;
                        }
                    }
                }
            }
            for (b, per_query) in gq.iter().enumerate() {
                let branch = &self.branches[b];
                for (j, g) in per_query.iter().enumerate() {
                    branch
                        .query
                        .accumulate_grads(queries[j].source(branch.spec.query), g, &mut grads.branches[b].query)?;
                }
            }
        }

        Ok(BatchLoss {
            alignment,
            regression,
            total: alignment + beta * regression,
            delta,
            offsets,
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn batch_row(
        &self,
        i: usize,
        vp: &[Vec<Vec<T>>],
        qp: &[Vec<Vec<T>>],
        target: (T, T),
        gamma: T,
        beta: T,
        want_grads: bool,
    ) -> Result<RowResult<T>> {
        let n = vp.len();
        let mut res = RowResult {
            aln: T::zero(),
            rgr: T::zero(),
            deltas: Vec::with_capacity(n),
            offsets: (T::zero(), T::zero()),
            grads: want_grads.then(|| RowGrads {
                head_hidden: self.head_hidden.zeros_like(),
                head_out: self.head_out.zeros_like(),
                video: self.branches.iter().map(|b| vec![T::zero(); b.video.output_dim()]).collect(),
                query: self
                    .branches
                    .iter()
                    .map(|b| vec![vec![T::zero(); b.query.output_dim()]; n])
                    .collect(),
            }),
        };
        for j in 0..n {
            let x = self.head_input(&vp[i], &qp[j]);
            let (mut pre, h, out) = self.head(&x)?;
            let d = out[0];
            let aligned = i == j;
            res.deltas.push(d);
            res.aln += if aligned { gamma * softplus(-d) } else { softplus(d) };
            if aligned {
                res.offsets = (out[1], out[2]);
                res.rgr = smooth_l1(target.0 - out[1]) + smooth_l1(target.1 - out[2]);
            }
            let Some(g) = res.grads.as_mut() else { continue };

            let mut g_out = vec![alignment_grad(d, aligned, gamma, n), T::zero(), T::zero()];
            if aligned {
                let (gs, ge) = regression_grad((out[1], out[2]), target, n);
                g_out[1] = beta * gs;
                g_out[2] = beta * ge;
            }
            let mut gh = self.head_out.backward(&h, &g_out, &mut g.head_out)?;
            relu_backward(&pre, &mut gh);
            pre.clear();
            let gx = self.head_hidden.backward(&x, &gh, &mut g.head_hidden)?;

            let mut offset = 0;
            for (b, branch) in self.branches.iter().enumerate() {
                let dim = branch.video.output_dim();
                let (v, q) = (&vp[i][b], &qp[j][b]);
                match branch.spec.fusion {
                    Fusion::Mpu => {
                        mpu_backward(v, q, &gx[offset..offset + 4 * dim], &mut g.video[b], &mut g.query[b][j])?;
                        offset += 4 * dim;
                    }
                    Fusion::Concat => {
                        for k in 0..dim {
                            g.video[b][k] += gx[offset + k];
                            g.query[b][j][k] += gx[offset + dim + k];
                        }
                        offset += 2 * dim;
                    }
                }
            }
        }
        Ok(res)
    }

    /// Named 32-bit tensors, including the variant and dimension metadata.
    pub fn to_tensors(&self) -> Vec<NamedTensor> {
        let mut out = vec![
            NamedTensor {
                name: "meta.variant".into(),
                shape: vec![1],
                data: vec![self.variant.code() as f32],
            },
            NamedTensor {
                name: "meta.dims".into(),
                shape: vec![7],
                data: self.dims.to_array().iter().map(|&d| d as f32).collect(),
            },
        ];
        out.extend(to_named_tensors(self));
        out
    }

    pub fn from_tensors(tensors: &[NamedTensor]) -> Result<Self> {
        let find = |name: &str| {
            tensors
                .iter()
                .find(|t| t.name == name)
                .ok_or_else(|| Error::validation(name, "not an alignment-network checkpoint"))
        };
        let variant_t = find("meta.variant")?;
        let variant = variant_t
            .data
            .first()
            .and_then(|&c| Variant::from_code(c as u8))
            .ok_or_else(|| Error::validation("meta.variant", "unknown variant code"))?;
        let dims_t = find("meta.dims")?;
        if dims_t.data.len() != 7 || dims_t.data.iter().any(|&d| !(d >= 1.0 && d.fract() == 0.0)) {
            return Err(Error::validation("meta.dims", "expected 7 positive integer dimensions"));
        }
        let mut arr = [0usize; 7];
        for (a, &d) in arr.iter_mut().zip(&dims_t.data) {
            *a = d as usize;
        }
        let mut params = Self::zeros(variant, ModelDims::from_array(arr))?;
        let mut expected = 2;
        params.visit(&mut |_, _, _| expected += 1);
        if expected != tensors.len() {
            return Err(Error::validation(
                "checkpoint",
                format!("expected {expected} tensors for variant {variant}, found {}", tensors.len()),
            ));
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

    pub fn cast<U: Scalar>(&self) -> AclParams<U> {
        let layer = |l: &DenseLayer<T>| {
            DenseLayer::new(l.weight().cast(), l.bias().iter().map(|v| U::lit(v.as_f64())).collect())
                .expect("cast keeps shapes")
        };
        AclParams {
            variant: self.variant,
            dims: self.dims,
            branches: self
                .branches
                .iter()
                .map(|b| Branch {
                    spec: b.spec,
                    video: layer(&b.video),
                    query: layer(&b.query),
                })
                .collect(),
            head_hidden: layer(&self.head_hidden),
            head_out: layer(&self.head_out),
        }
    }
}

impl<T: Scalar> ParamSet<T> for AclParams<T> {
    fn visit(&self, f: &mut dyn FnMut(&str, &[usize], &[T])) {
        for b in &self.branches {
            visit_layer(&format!("{}.video", b.spec.name), &b.video, f);
            visit_layer(&format!("{}.query", b.spec.name), &b.query, f);
        }
        visit_layer("head.hidden", &self.head_hidden, f);
        visit_layer("head.out", &self.head_out, f);
    }

    fn visit_mut(&mut self, f: &mut dyn FnMut(&str, &[usize], &mut [T])) {
        for b in &mut self.branches {
            visit_layer_mut(&format!("{}.video", b.spec.name), &mut b.video, f);
            visit_layer_mut(&format!("{}.query", b.spec.name), &mut b.query, f);
        }
        visit_layer_mut("head.hidden", &mut self.head_hidden, f);
        visit_layer_mut("head.out", &mut self.head_out, f);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::losses::total_loss;
    use crate::numcore::params::{assign_flat, flatten};
    use crate::numcore::grad_check;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dims() -> ModelDims {
        ModelDims::new(12, 5, 7, 8).with_widths(6, 4, 10)
    }

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    fn inputs(rng: &mut ChaCha8Rng, d: &ModelDims, n: usize) -> (Vec<ClipInput<f64>>, Vec<QueryInput<f64>>, Vec<(f64, f64)>) {
        let clips = (0..n)
            .map(|_| ClipInput {
                feature: random_vec(rng, d.clip_dim),
                concept: random_vec(rng, d.concept_dim),
            })
            .collect();
        let queries = (0..n)
            .map(|_| QueryInput {
                sentence: random_vec(rng, d.sentence_dim),
                vo: random_vec(rng, d.vo_dim),
            })
            .collect();
        let targets = (0..n).map(|_| (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0))).collect();
        (clips, queries, targets)
    }

    fn matvec(l: &DenseLayer<f64>, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; l.output_dim()];
        for r in 0..l.output_dim() {
            out[r] = l.bias()[r];
            for c in 0..l.input_dim() {
                out[r] += l.weight().get(r, c) * x[c];
            }
        }
        out
    }

    #[test]
    fn zero_params_give_bias_only_outputs() {
        let mut p = AclParams::<f64>::zeros(Variant::Full, dims()).unwrap();
        p.head_out_mut().bias_mut().copy_from_slice(&[0.5, -1.0, 2.0]);
        let d = dims();
        let c = ClipInput {
            feature: vec![0.0; d.clip_dim],
            concept: vec![0.0; d.concept_dim],
        };
        let q = QueryInput {
            sentence: vec![0.0; d.sentence_dim],
            vo: vec![0.0; d.vo_dim],
        };
        let out = p.forward(&c, &q).unwrap();
        assert_eq!((out.delta, out.start_offset, out.end_offset), (0.5, -1.0, 2.0));
    }

    #[test]
    fn head_input_width() {
        let p = AclParams::<f64>::zeros(Variant::Full, dims()).unwrap();
        assert_eq!(p.head_hidden().input_dim(), 4 * (6 + 4));
        let p = AclParams::<f64>::zeros(Variant::Concat, dims()).unwrap();
        assert_eq!(p.head_hidden().input_dim(), 2 * 6 + 2 * 4);
    }

    #[test]
    fn wrong_input_dims_rejected() {
        let p = AclParams::<f64>::zeros(Variant::Full, dims()).unwrap();
        let c = ClipInput {
            feature: vec![0.0; 3],
            concept: vec![0.0; 5],
        };
        let q = QueryInput {
            sentence: vec![0.0; 7],
            vo: vec![0.0; 8],
        };
        assert!(p.forward(&c, &q).is_err());
    }

    #[test]
    fn forward_matches_straight_line_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let d = dims();
        let p = AclParams::<f64>::init(Variant::Full, d, &mut rng).unwrap();
        let (clips, queries, _) = inputs(&mut rng, &d, 1);
        let (c, q) = (&clips[0], &queries[0]);
        let b = p.branches();
        let xt = matvec(&b[0].video, &c.feature);
        let st = matvec(&b[0].query, &q.sentence);
        let ya = matvec(&b[1].video, &c.concept);
        let va = matvec(&b[1].query, &q.vo);
        let mut x = Vec::new();
        for (a, bb) in [(&xt, &st), (&ya, &va)] {
            for k in 0..a.len() {
                x.push(a[k] * bb[k]);
            }
            for k in 0..a.len() {
                x.push(a[k] + bb[k]);
            }
            x.extend(a.iter());
            x.extend(bb.iter());
        }
        let h: Vec<f64> = matvec(p.head_hidden(), &x).into_iter().map(|v| v.max(0.0)).collect();
        let o = matvec(p.head_out(), &h);
        let out = p.forward(c, q).unwrap();
        assert!((out.delta - o[0]).abs() < 1e-12);
        assert!((out.start_offset - o[1]).abs() < 1e-12);
        assert!((out.end_offset - o[2]).abs() < 1e-12);
    }

    #[test]
    fn batch_loss_matches_pairwise_forward() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let d = dims();
        let p = AclParams::<f64>::init(Variant::WoVac, d, &mut rng).unwrap();
        let (clips, queries, targets) = inputs(&mut rng, &d, 3);
        let cr: Vec<&ClipInput<f64>> = clips.iter().collect();
        let qr: Vec<&QueryInput<f64>> = queries.iter().collect();
        let bl = p.batch_loss(&cr, &qr, &targets, 1.0, 0.01, None).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let o = p.forward(&clips[i], &queries[j]).unwrap();
                assert!((bl.delta.get(i, j) - o.delta).abs() < 1e-12);
                if i == j {
                    assert!((bl.offsets[i].0 - o.start_offset).abs() < 1e-12);
                }
            }
        }
        let t = total_loss(&bl.delta, &bl.offsets, &targets, 1.0, 0.01).unwrap();
        assert!((bl.total - t).abs() < 1e-12);
    }

    fn check_variant(variant: Variant, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = dims();
        let p = AclParams::<f64>::init(variant, d, &mut rng).unwrap();
        let (clips, queries, targets) = inputs(&mut rng, &d, 3);
        let cr: Vec<&ClipInput<f64>> = clips.iter().collect();
        let qr: Vec<&QueryInput<f64>> = queries.iter().collect();
        let mut g = p.zeros_like();
        // a larger β makes the regression path visible to the check
        p.batch_loss(&cr, &qr, &targets, 1.3, 0.5, Some(&mut g)).unwrap();
        let flat = flatten(&p);
        let analytic = flatten(&g);
        let mut probe = p.clone();
        let report = grad_check(
            |x| {
                assign_flat(&mut probe, x).unwrap();
                probe.batch_loss(&cr, &qr, &targets, 1.3, 0.5, None).unwrap().total
            },
            &flat,
            &analytic,
            1e-5,
            None,
        )
        .unwrap();
        assert!(report.passes(1e-4), "{variant}: {report:?}");
    }

    #[test]
    fn gradients_match_finite_differences_for_every_variant() {
        for (k, v) in Variant::ALL.into_iter().enumerate() {
            check_variant(v, 100 + k as u64);
        }
    }

    #[test]
    fn checkpoint_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = AclParams::<f32>::init(Variant::WoSac, dims(), &mut rng).unwrap();
        let back = AclParams::<f32>::from_tensors(&p.to_tensors()).unwrap();
        assert_eq!(back, p);
        let mut t = p.to_tensors();
        t.pop();
        assert!(AclParams::<f32>::from_tensors(&t).is_err());
    }
}
