/// Half-open temporal interval `[start, end)` in frames.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
}

impl Interval {
    /// Returns `None` unless `start < end` and both are finite.
    pub fn new(start: f64, end: f64) -> Option<Self> {
        (start.is_finite() && end.is_finite() && start < end).then_some(Self { start, end })
    }

    pub fn from_seconds(start_sec: f64, end_sec: f64, fps: f64) -> Self {
        Self {
            start: start_sec * fps,
            end: end_sec * fps,
        }
    }

    pub fn from_units(start_unit: usize, end_unit: usize, unit_frames: usize) -> Self {
        Self {
            start: (start_unit * unit_frames) as f64,
            end: (end_unit * unit_frames) as f64,
        }
    }

    pub fn to_seconds(self, fps: f64) -> (f64, f64) {
        (self.start / fps, self.end / fps)
    }

    /// Boundaries expressed in (fractional) units.
    pub fn to_units(self, unit_frames: usize) -> (f64, f64) {
        let l = unit_frames as f64;
        (self.start / l, self.end / l)
    }

    #[inline]
    pub fn length(self) -> f64 {
        self.end - self.start
    }

    pub fn intersection(self, other: Interval) -> f64 {
        (self.end.min(other.end) - self.start.max(other.start)).max(0.0)
    }

    /// Temporal intersection over union.
    pub fn tiou(self, other: Interval) -> f64 {
        let inter = self.intersection(other);
        let union = self.length() + other.length() - inter;
        if union <= 0.0 {
            return 0.0;
        }
        (inter / union).clamp(0.0, 1.0)
    }
}

pub fn tiou(a: Interval, b: Interval) -> f64 {
    a.tiou(b)
}
