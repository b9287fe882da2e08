use crate::datastore::DatasetManifest;
use crate::error::{Error, Result};
use crate::temporal::{sliding_windows, ClipSpec, Interval};

/// `(o*_s, o*_e)` in units: the shift that moves `clip` onto `gt`.
pub fn regression_targets(clip: Interval, gt: Interval, unit_frames: usize) -> (f64, f64) {
    let l = unit_frames as f64;
    ((gt.start - clip.start) / l, (gt.end - clip.end) / l)
}

/// Shifts the clip boundaries by unit offsets and clamps them to the video.
/// If the result is empty or inverted the unrefined clip is returned.
pub fn apply_offsets(clip: Interval, start_offset: f64, end_offset: f64, unit_frames: usize, video_frames: f64) -> Interval {
    let l = unit_frames as f64;
    let start = (clip.start + start_offset * l).clamp(0.0, video_frames);
    let end = (clip.end + end_offset * l).clamp(0.0, video_frames);
    Interval::new(start, end).unwrap_or(clip)
}

/// An aligned (window, query) pair with its regression targets.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSample {
    pub video_index: usize,
    pub query_index: usize,
    pub clip: ClipSpec,
    pub window: Interval,
    pub targets: (f64, f64),
    pub tiou: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub samples: Vec<TrainingSample>,
    pub windows_scanned: usize,
    pub pairs_considered: usize,
}

/// Every (window, same-video query) pair with `tIoU ≥ pos_tiou`, scanning
/// each video at the given window lengths.
pub fn collect_training_samples(
    manifest: &DatasetManifest,
    scales_frames: &[usize],
    overlap: f64,
    context_frames: usize,
    pos_tiou: f64,
) -> Result<SampleSet> {
    let l_u = manifest.unit_frames();
    let by_video = manifest.queries_by_video();
    let mut set = SampleSet {
        samples: Vec::new(),
        windows_scanned: 0,
        pairs_considered: 0,
    };
    for (vi, video) in manifest.videos.iter().enumerate() {
        let windows = sliding_windows(video.num_units, l_u, scales_frames, overlap, context_frames)?;
        set.windows_scanned += windows.len();
        for clip in &windows {
            let window = clip.interval(l_u, video.frames);
            for &qi in &by_video[vi] {
                set.pairs_considered += 1;
                let gt = manifest.queries[qi].ground_truth(manifest.fps());
                let t = window.tiou(gt);
                if t >= pos_tiou {
                    set.samples.push(TrainingSample {
                        video_index: vi,
                        query_index: qi,
                        clip: *clip,
                        window,
                        targets: regression_targets(window, gt, l_u),
                        tiou: t,
                    });
                }
            }
        }
    }
    Ok(set)
}

/// Foreground/background label of a window: `Some(true)` when its best tIoU
/// against any ground truth is at least `pos`, `Some(false)` below `neg`,
/// otherwise `None` (ignored for training).
pub fn actionness_labels(windows: &[Interval], gts: &[Interval], pos: f64, neg: f64) -> Result<Vec<Option<bool>>> {
    if !(0.0 <= neg && neg <= pos && pos <= 1.0) {
        return Err(Error::Config(format!("need 0 <= neg_tiou <= pos_tiou <= 1, got neg={neg} pos={pos}")));
    }
    Ok(windows
        .iter()
        .map(|w| {
            let best = gts.iter().map(|g| w.tiou(*g)).fold(0.0, f64::max);
            if best >= pos {
                Some(true)
            } else if best < neg {
                Some(false)
            } else {
                None
            }
        })
        .collect())
}
