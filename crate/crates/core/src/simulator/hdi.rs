use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed integer interval `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: u64,
    pub upper: u64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lower as f64 <= x && x <= self.upper as f64
    }

    pub fn width(&self) -> u64 {
        self.upper - self.lower
    }
}

/// Number of samples a window must hold: `ceil(mass * n)`, at least one.
pub fn window_len(n: usize, mass: f64) -> usize {
    // the epsilon absorbs products like 0.95 * 20 landing a hair above 19
    let m = (mass * n as f64 - 1e-9).ceil();
    (m.max(1.0) as usize).min(n)
}

/// Narrowest interval spanned by `ceil(mass * n)` consecutive order
/// statistics; ties go to the window with the smallest lower bound.
pub fn hdi_from_samples(samples: &[u64], mass: f64) -> Result<Interval> {
    if samples.is_empty() {
        return Err(Error::Parameter("no samples for an interval".to_owned()));
    }
    if !(mass > 0.0 && mass <= 1.0) {
        return Err(Error::Parameter(format!(
            "interval mass {mass} is not in (0, 1]"
        )));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable();
    let m = window_len(sorted.len(), mass);
    let (start, _) = sorted
        .windows(m)
        .enumerate()
        .map(|(i, w)| (i, w[m - 1] - w[0]))
        .fold(
            (0, u64::MAX),
            |best, cur| if cur.1 < best.1 { cur } else { best },
        );
    Ok(Interval {
        lower: sorted[start],
        upper: sorted[start + m - 1],
    })
}
