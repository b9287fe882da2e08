use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::concepts::{PosLexicon, PosTag};
use crate::datastore::{save_manifest, save_unit_matrix, EmbeddingTable, ManifestFile, QueryEntry, VideoEntry};
use crate::error::{Error, Result};
use crate::numcore::Matrix;
use crate::synth::config::{SynthConfig, VOCABULARY};

/// A planted activity segment, in units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub class: usize,
    pub start_unit: usize,
    pub num_units: usize,
}

/// Ground truth kept beside the manifests: class and VO phrasing of every query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Truth {
    pub query_class: BTreeMap<String, usize>,
    pub query_has_vo: BTreeMap<String, bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSummary {
    pub videos: usize,
    pub queries: usize,
    pub vo_queries: usize,
    pub train_videos: usize,
    pub test_videos: usize,
    pub foreground_units: usize,
    pub total_units: usize,
}

pub const TRAIN_MANIFEST: &str = "train.json";
pub const TEST_MANIFEST: &str = "test.json";
pub const TRUTH_FILE: &str = "truth.json";

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

fn normalize(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

/// `k` mutually orthogonal unit vectors in `d` dimensions (Gram–Schmidt).
fn orthonormal(rng: &mut ChaCha8Rng, k: usize, d: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k);
    while basis.len() < k {
        let mut v = gaussian(rng, d);
        for b in &basis {
            let p: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
        }
        if v.iter().map(|x| x * x).sum::<f64>() > 1e-6 {
            normalize(&mut v);
            basis.push(v);
        }
    }
    basis
}

/// Non-overlapping segments with distinct classes. Starts are odd units and
/// lengths even, so no boundary lands on the even-unit window grid.
fn plant_segments(rng: &mut ChaCha8Rng, cfg: &SynthConfig, units: usize) -> Result<Vec<Segment>> {
    let budget = ((1.0 - cfg.background_ratio) * units as f64).floor() as usize;
    let wanted = rng.random_range(1..=cfg.max_segments.min(cfg.num_classes));
    let mut classes: Vec<usize> = (0..cfg.num_classes).collect();
    classes.shuffle(rng);
    let even_lengths: Vec<usize> = (cfg.min_segment_units..=cfg.max_segment_units).filter(|l| l % 2 == 0).collect();
    let mut segs: Vec<Segment> = Vec::new();
    let mut used = 0;
    for &class in classes.iter().take(wanted) {
        for _ in 0..50 {
            let len = if even_lengths.is_empty() {
                rng.random_range(cfg.min_segment_units..=cfg.max_segment_units)
            } else {
                even_lengths[rng.random_range(0..even_lengths.len())]
            };
            if used + len > budget || len + 1 > units {
                continue;
            }
            let odd_starts = (units - len).div_ceil(2);
            if odd_starts == 0 {
                continue;
            }
            let start = 2 * rng.random_range(0..odd_starts) + 1;
            // keep at least two background units between segments
            let clear = segs
                .iter()
                .all(|s| start >= s.start_unit + s.num_units + 2 || start + len + 2 <= s.start_unit);
            if clear {
                segs.push(Segment {
                    class,
                    start_unit: start,
                    num_units: len,
                });
                used += len;
                break;
            }
        }
    }
    if segs.is_empty() {
        return Err(Error::Config(format!("infeasible packing: no segment fits a {units}-unit video")));
    }
    segs.sort_by_key(|s| s.start_unit);
    Ok(segs)
}

struct Words {
    table: EmbeddingTable,
    pos: PosLexicon,
    labels: String,
}

fn build_words(rng: &mut ChaCha8Rng, cfg: &SynthConfig) -> Result<Words> {
    let d = cfg.word_dim;
    let mut table = EmbeddingTable::new(d);
    let mut pos = PosLexicon::new();
    let mut labels = String::new();
    let word = |rng: &mut ChaCha8Rng, table: &mut EmbeddingTable, w: &str, centre: Option<&[f64]>| -> Result<()> {
        let noise = gaussian(rng, d);
        let v: Vec<f32> = match centre {
            Some(c) => c
                .iter()
                .zip(&noise)
                .map(|(c, n)| (c + cfg.word_noise * n / (d as f64).sqrt()) as f32)
                .collect(),
            None => {
                let mut n = noise;
                normalize(&mut n);
                n.into_iter().map(|x| x as f32).collect()
            }
        };
        table.insert(w, &v)
    };
    for w in ["person", "the", "a", "is"] {
        word(rng, &mut table, w, None)?;
    }
    pos.insert("person", PosTag::Noun);
    pos.insert("the", PosTag::Other);
    pos.insert("a", PosTag::Other);
    pos.insert("is", PosTag::Verb);
    for (k, (lemma, third, gerund, object)) in VOCABULARY.iter().take(cfg.num_classes).enumerate() {
        let mut centre = gaussian(rng, d);
        normalize(&mut centre);
        for w in [lemma, third, gerund] {
            word(rng, &mut table, w, Some(&centre))?;
            pos.insert(w, PosTag::Verb);
        }
        word(rng, &mut table, object, Some(&centre))?;
        pos.insert(object, PosTag::Noun);
        labels.push_str(&format!("{k}\t{lemma} {object}\n"));
    }
    Ok(Words { table, pos, labels })
}

fn tokens(class: usize, with_vo: bool) -> Vec<String> {
    let (_, third, gerund, object) = VOCABULARY[class];
    let words: Vec<&str> = if with_vo {
        vec!["person", third, "the", object]
    } else {
        vec!["a", "person", "is", gerund]
    };
    words.into_iter().map(String::from).collect()
}

/// Writes a synthetic dataset under `out`: unit feature and concept files,
/// word resources, `train.json`/`test.json` manifests over disjoint videos
/// and `truth.json` with each query's class. Byte-identical for a given config.
pub fn generate(cfg: &SynthConfig, out: &Path) -> Result<SynthSummary> {
    cfg.validate()?;
    let mkdir = |p: &Path| fs::create_dir_all(p).map_err(|e| Error::io(p, e));
    mkdir(&out.join("features"))?;
    mkdir(&out.join("concepts"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let means = orthonormal(&mut rng, cfg.num_classes + 1, cfg.feature_dim);
    let background = &means[cfg.num_classes];
    let words = build_words(&mut rng, cfg)?;
    let write_text = |name: &str, text: &str| {
        let p = out.join(name);
        fs::write(&p, text).map_err(|e| Error::io(&p, e))
    };
    words.table.save(&out.join("embeddings.txt"))?;
    write_text("pos.txt", &words.pos.to_text())?;
    write_text("labels.txt", &words.labels)?;

    let feature_sd = cfg.noise / (cfg.feature_dim as f64).sqrt();
    let concept_sd = cfg.noise * cfg.concept_noise_scale;
    let mut videos = Vec::with_capacity(cfg.num_videos);
    let mut queries: Vec<(usize, QueryEntry, usize)> = Vec::new();
    let (mut fg_units, mut total_units) = (0, 0);
    for vi in 0..cfg.num_videos {
        let id = format!("v{vi:04}");
        let units = rng.random_range(cfg.min_units..=cfg.max_units);
        let segs = plant_segments(&mut rng, cfg, units)?;
        let mut label = vec![None; units];
        for s in &segs {
            label[s.start_unit..s.start_unit + s.num_units].iter_mut().for_each(|l| *l = Some(s.class));
        }
        let mut feat = Vec::with_capacity(units * cfg.feature_dim);
        let mut conc = Vec::with_capacity(units * cfg.num_classes);
        for l in &label {
            let mean = l.map_or(background, |c| &means[c]);
            for m in mean {
                feat.push((m + feature_sd * rng.sample::<f64, _>(StandardNormal)) as f32);
            }
            for c in 0..cfg.num_classes {
                let hot = if *l == Some(c) { 1.0 } else { 0.0 };
                conc.push((hot + concept_sd * rng.sample::<f64, _>(StandardNormal)) as f32);
            }
        }
        let fpath = format!("features/{id}.aclf");
        let cpath = format!("concepts/{id}.aclf");
        save_unit_matrix(&out.join(&fpath), &Matrix::new(units, cfg.feature_dim, feat)?)?;
        save_unit_matrix(&out.join(&cpath), &Matrix::new(units, cfg.num_classes, conc)?)?;
        let unit_sec = cfg.unit_frames as f64 / cfg.fps;
        for s in &segs {
            let qid = format!("q{:05}", queries.len());
            queries.push((
                vi,
                QueryEntry {
                    id: qid,
                    video: id.clone(),
                    start_sec: s.start_unit as f64 * unit_sec,
                    end_sec: (s.start_unit + s.num_units) as f64 * unit_sec,
                    tokens: Vec::new(),
                    sentence_embedding_path: None,
                    vo: None,
                },
                s.class,
            ));
            fg_units += s.num_units;
        }
        total_units += units;
        videos.push(VideoEntry {
            id,
            frames: (units * cfg.unit_frames) as u64,
            features: fpath,
            concepts: cpath,
        });
    }

    // exact coverage: a fixed number of queries, chosen at random, carries a VO pair
    let n_vo = (cfg.vo_coverage * queries.len() as f64).round() as usize;
    let mut pick: Vec<usize> = (0..queries.len()).collect();
    pick.shuffle(&mut rng);
    let mut has_vo = vec![false; queries.len()];
    pick.iter().take(n_vo).for_each(|&i| has_vo[i] = true);
    let mut truth = Truth {
        query_class: BTreeMap::new(),
        query_has_vo: BTreeMap::new(),
    };
    for (i, (_, q, class)) in queries.iter_mut().enumerate() {
        q.tokens = tokens(*class, has_vo[i]);
        truth.query_class.insert(q.id.clone(), *class);
        truth.query_has_vo.insert(q.id.clone(), has_vo[i]);
    }

    let mut order: Vec<usize> = (0..cfg.num_videos).collect();
    order.shuffle(&mut rng);
    let n_test = ((cfg.test_fraction * cfg.num_videos as f64).round() as usize).clamp(1, cfg.num_videos - 1);
    let mut is_test = vec![false; cfg.num_videos];
    order.iter().take(n_test).for_each(|&v| is_test[v] = true);

    let manifest = |name: &str, test: bool| ManifestFile {
        name: name.to_owned(),
        fps: cfg.fps,
        unit_frames: cfg.unit_frames,
        feature_dim: cfg.feature_dim,
        concept_dim: cfg.num_classes,
        sentence_dim: Some(cfg.word_dim),
        embeddings: Some("embeddings.txt".into()),
        pos_lexicon: Some("pos.txt".into()),
        label_lexicon: Some("labels.txt".into()),
        videos: videos.iter().enumerate().filter(|(i, _)| is_test[*i] == test).map(|(_, v)| v.clone()).collect(),
        queries: queries.iter().filter(|(v, _, _)| is_test[*v] == test).map(|(_, q, _)| q.clone()).collect(),
    };
    save_manifest(&manifest("synthetic-train", false), &out.join(TRAIN_MANIFEST))?;
    save_manifest(&manifest("synthetic-test", true), &out.join(TEST_MANIFEST))?;
    let truth_json = serde_json::to_string_pretty(&truth).expect("truth serializes");
    write_text(TRUTH_FILE, &truth_json)?;

    Ok(SynthSummary {
        videos: cfg.num_videos,
        queries: queries.len(),
        vo_queries: n_vo,
        train_videos: cfg.num_videos - n_test,
        test_videos: n_test,
        foreground_units: fg_units,
        total_units,
    })
}

pub fn load_truth(path: &Path) -> Result<Truth> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::format("truth file", path, e.to_string()))
}
