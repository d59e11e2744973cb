use std::time::{Duration, Instant};

/// Smallest step between recorded timestamps; matches the six decimals the
/// CSV writer prints.
const MIN_STEP: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TracePoint {
    pub elapsed: f64,
    pub value: f64,
}

/// Time-stamped sequence of bounds or incumbent values.
///
/// Timestamps are kept strictly increasing: a point recorded at or before
/// the previous one is moved just after it.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trace {
    points: Vec<TracePoint>,
}

/// Anytime upper bounds of an iterative solver.
pub type BoundTrace = Trace;

impl Trace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, elapsed: f64, value: f64) {
        let elapsed = match self.points.last() {
            Some(p) if elapsed < p.elapsed + MIN_STEP => p.elapsed + MIN_STEP,
            _ => elapsed.max(0.0),
        };
        self.points.push(TracePoint { elapsed, value });
    }

    pub fn points(&self) -> &[TracePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last(&self) -> Option<TracePoint> {
        self.points.last().copied()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.iter().map(|p| (p.elapsed, p.value))
    }

    /// No point exceeds its predecessor by more than `slack`.
    pub fn is_non_increasing(&self, slack: f64) -> bool {
        self.points
            .windows(2)
            .all(|w| w[1].value <= w[0].value + slack)
    }

    pub fn is_non_decreasing(&self, slack: f64) -> bool {
        self.points
            .windows(2)
            .all(|w| w[1].value + slack >= w[0].value)
    }
}

/// Wall-clock start plus an optional limit.
#[derive(Clone, Copy, Debug)]
pub struct Clock {
    start: Instant,
    deadline: Option<Instant>,
}

impl Clock {
    pub fn start(limit: Option<Duration>) -> Self {
        let start = Instant::now();
        Clock {
            start,
            deadline: limit.and_then(|d| start.checked_add(d)),
        }
    }

    pub fn elapsed(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }

    pub fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timestamps_are_forced_apart() {
        let mut t = Trace::new();
        t.record(0.0, 3.0);
        t.record(0.0, 2.0);
        t.record(0.5, 2.0);
        t.record(0.2, 1.0);
        let times: Vec<f64> = t.points().iter().map(|p| p.elapsed).collect();
        assert_eq!(times, vec![0.0, 1e-6, 0.5, 0.5 + 1e-6]);
        assert!(t.is_non_increasing(0.0));
        assert!(!t.is_non_decreasing(0.0));
    }

    #[test]
    fn zero_limit_expires_at_once() {
        assert!(Clock::start(Some(Duration::ZERO)).expired());
        assert!(!Clock::start(None).expired());
    }
}
