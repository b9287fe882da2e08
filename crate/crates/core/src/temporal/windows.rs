use std::io::Write;

use crate::error::{Error, Result};
use crate::temporal::Interval;

/// A candidate window in unit coordinates: central units
/// `[start_unit, start_unit + num_units)` plus `context_units` of context on
/// each side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClipSpec {
    pub start_unit: usize,
    pub num_units: usize,
    pub context_units: usize,
}

impl ClipSpec {
    #[inline]
    pub fn end_unit(&self) -> usize {
        self.start_unit + self.num_units
    }

    /// Frame interval, with the end clamped to the video's last frame.
    pub fn interval(&self, unit_frames: usize, total_frames: u64) -> Interval {
        let start = (self.start_unit * unit_frames) as f64;
        let end = ((self.end_unit() * unit_frames) as f64).min(total_frames as f64);
        Interval { start, end }
    }

    /// Snaps a frame interval to the nearest unit boundaries (at least one
    /// unit, inside `[0, num_units_in_video]`).
    pub fn from_interval(iv: Interval, unit_frames: usize, video_units: usize, context_units: usize) -> Self {
        let l = unit_frames as f64;
        let s = ((iv.start / l).round().max(0.0) as usize).min(video_units.saturating_sub(1));
        let e = ((iv.end / l).round() as usize).clamp(s + 1, video_units.max(s + 1));
        Self {
            start_unit: s,
            num_units: e - s,
            context_units,
        }
    }
}

/// Multi-scale sliding windows.
///
/// For each length `L` the stride is `L · (1 − overlap)` rounded down to
/// whole units (at least one unit). Windows start at unit 0; when the grid
/// does not reach the end of the video a final window is placed flush with
/// the end. A video shorter than `L` yields one window covering all of it.
/// The result is sorted by start, then length, without duplicates.
pub fn sliding_windows(
    video_units: usize,
    unit_frames: usize,
    lengths_frames: &[usize],
    overlap: f64,
    context_frames: usize,
) -> Result<Vec<ClipSpec>> {
    if unit_frames == 0 {
        return Err(Error::Config("unit length must be positive".into()));
    }
    if !(0.0..1.0).contains(&overlap) {
        return Err(Error::Config(format!("overlap must lie in [0, 1), got {overlap}")));
    }
    let context_units = context_frames / unit_frames;
    let mut out = Vec::new();
    if video_units == 0 {
        return Ok(out);
    }
    for &len in lengths_frames {
        if len == 0 || len % unit_frames != 0 {
            return Err(Error::Config(format!("window length {len} is not a positive multiple of {unit_frames}")));
        }
        let n = len / unit_frames;
        if n >= video_units {
            out.push(ClipSpec {
                start_unit: 0,
                num_units: video_units,
                context_units,
            });
            continue;
        }
        let stride = ((len as f64 * (1.0 - overlap) / unit_frames as f64 + 1e-9).floor() as usize).max(1);
        let mut s = 0;
        while s + n <= video_units {
            out.push(ClipSpec {
                start_unit: s,
                num_units: n,
                context_units,
            });
            s += stride;
        }
        let last = out.last().expect("at least one window");
        if last.end_unit() < video_units {
            out.push(ClipSpec {
                start_unit: video_units - n,
                num_units: n,
                context_units,
            });
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Debug dump: `video_id,start_frame,end_frame` rows.
pub fn write_windows_csv<W: Write>(
    mut w: W,
    video_id: &str,
    windows: &[ClipSpec],
    unit_frames: usize,
    total_frames: u64,
) -> std::io::Result<()> {
    writeln!(w, "video_id,start_frame,end_frame")?;
    for c in windows {
        let iv = c.interval(unit_frames, total_frames);
        writeln!(w, "{video_id},{},{}", iv.start, iv.end)?;
    }
    Ok(())
}
