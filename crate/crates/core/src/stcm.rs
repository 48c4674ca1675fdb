//! Short-term contextual memory: a fixed window of days whose observations are
//! handed to the reasoner once and then discarded.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vocab::LatentVariable;

pub const DEFAULT_WINDOW_DAYS: u32 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StcmBuffer {
    window_days: u32,
    window_start_day: u32,
    entries: Vec<LatentVariable>,
}

impl Default for StcmBuffer {
    fn default() -> Self {
        Self::new(DEFAULT_WINDOW_DAYS).expect("default window is positive")
    }
}

impl StcmBuffer {
    pub fn new(window_days: u32) -> Result<Self> {
        Self::starting_at(window_days, 0)
    }

    pub fn starting_at(window_days: u32, window_start_day: u32) -> Result<Self> {
        if window_days == 0 {
            return Err(Error::InvalidParameter("windowDays must be positive".into()));
        }
        Ok(Self {
            window_days,
            window_start_day,
            entries: Vec::new(),
        })
    }

    pub fn window_days(&self) -> u32 {
        self.window_days
    }

    pub fn window_start_day(&self) -> u32 {
        self.window_start_day
    }

    /// Last day (inclusive) accepted by the current window.
    pub fn window_last_day(&self) -> u32 {
        self.window_start_day + self.window_days - 1
    }

    pub fn contains_day(&self, day: u32) -> bool {
        (self.window_start_day..=self.window_last_day()).contains(&day)
    }

    pub fn entries(&self) -> &[LatentVariable] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn store(&mut self, lv: LatentVariable) -> Result<()> {
        if !self.contains_day(lv.day) {
            return Err(Error::DayOutsideWindow {
                day: lv.day,
                start: self.window_start_day,
                end: self.window_last_day(),
            });
        }
        self.entries.push(lv);
        Ok(())
    }

    /// Hands out every entry of the current window and moves to the next one.
    pub fn drain_window(&mut self) -> Vec<LatentVariable> {
        self.window_start_day += self.window_days;
        std::mem::take(&mut self.entries)
    }

    pub(crate) fn validate(&self, dim: usize) -> Result<()> {
        if self.window_days == 0 {
            return Err(Error::Inconsistent("windowDays must be positive".into()));
        }
        for lv in &self.entries {
            if lv.dim() != dim {
                return Err(Error::Inconsistent(format!(
                    "short-term entry has dimension {} but vocabulary has {dim}",
                    lv.dim()
                )));
            }
            if !self.contains_day(lv.day) {
                return Err(Error::Inconsistent(format!(
                    "short-term entry for day {} lies outside window starting at {}",
                    lv.day, self.window_start_day
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lv(day: u32) -> LatentVariable {
        LatentVariable::observation(vec![1.0, 0.0], day, None)
    }

    #[test]
    fn store_within_window() {
        let mut buf = StcmBuffer::new(2).unwrap();
        buf.store(lv(1)).unwrap();
        assert_eq!(buf.len(), 1);
        let err = buf.store(lv(2)).unwrap_err();
        assert!(matches!(
            err,
            Error::DayOutsideWindow {
                day: 2,
                start: 0,
                end: 1
            }
        ));
    }

    #[test]
    fn three_visits_a_day_for_two_days() {
        let mut buf = StcmBuffer::new(2).unwrap();
        for day in 0..2 {
            for _ in 0..3 {
                buf.store(lv(day)).unwrap();
            }
        }
        assert_eq!(buf.len(), 6);
        let drained = buf.drain_window();
        assert_eq!(drained.len(), 6);
        assert!(buf.is_empty());
        assert_eq!(buf.window_start_day(), 2);
        assert!(buf.store(lv(1)).is_err());
        buf.store(lv(2)).unwrap();
    }

    #[test]
    fn empty_drain_still_advances() {
        let mut buf = StcmBuffer::new(3).unwrap();
        assert!(buf.drain_window().is_empty());
        assert_eq!(buf.window_start_day(), 3);
    }

    #[test]
    fn zero_window_rejected() {
        assert!(StcmBuffer::new(0).is_err());
    }

    proptest! {
        #[test]
        fn observations_are_conserved(window in 1u32..5, days in proptest::collection::vec(0u32..4, 0..40)) {
            // days are offsets within successive windows
            let mut buf = StcmBuffer::new(window).unwrap();
            let mut stored = 0usize;
            let mut processed = 0usize;
            let mut seen_days = Vec::new();
            for chunk in days.chunks(5) {
                for off in chunk {
                    let day = buf.window_start_day() + off % window;
                    buf.store(lv(day)).unwrap();
                    stored += 1;
                }
                let start = buf.window_start_day();
                let drained = buf.drain_window();
                prop_assert!(drained.iter().all(|e| e.day >= start && e.day < start + window));
                seen_days.extend(drained.iter().map(|e| e.day));
                processed += drained.len();
            }
            prop_assert_eq!(stored, processed);
        }
    }
}
