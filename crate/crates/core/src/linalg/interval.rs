use std::fmt;

use crate::scalar::Real;

/// Real interval with per-endpoint open/closed flags. Infinite endpoints are
/// represented by `T::infinity()` and are always open.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl<T: Real> Interval<T> {
    pub fn closed(lo: T, hi: T) -> Self {
        assert!(lo <= hi, "interval needs lo <= hi");
        Interval {
            lo,
            hi,
            lo_open: false,
            hi_open: false,
        }
    }

    pub fn open(lo: T, hi: T) -> Self {
        assert!(lo <= hi, "interval needs lo <= hi");
        Interval {
            lo,
            hi,
            lo_open: true,
            hi_open: true,
        }
    }

    /// `(0, inf)`
    pub fn positive() -> Self {
        Self::open(T::zero(), T::infinity())
    }

    /// `(-inf, inf)`
    pub fn real_line() -> Self {
        Self::open(T::neg_infinity(), T::infinity())
    }

    pub fn contains(&self, x: T) -> bool {
        let above = if self.lo_open { x > self.lo } else { x >= self.lo };
        let below = if self.hi_open { x < self.hi } else { x <= self.hi };
        above && below
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }
}

impl<T: Real> fmt::Display for Interval<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_open { '(' } else { '[' },
            self.lo,
            self.hi,
            if self.hi_open { ')' } else { ']' }
        )
    }
}
