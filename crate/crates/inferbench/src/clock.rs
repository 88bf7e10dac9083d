//! Time sources. Real runs measure with a monotonic wall clock; tests
//! and fast full-rules runs use a virtual clock that only moves when
//! someone advances it.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

/// Nanosecond clock the harness stamps every record with.
pub trait Clock: Send + Sync {
    fn now_ns(&self) -> u64;
    /// Block (or virtually advance) for the given duration.
    fn sleep(&self, duration: Duration);
}

/// `Instant`-anchored monotonic clock; 0 is the moment of construction.
pub struct MonotonicClock {
    origin: Instant,
}

impl MonotonicClock {
    pub fn new() -> Self {
        MonotonicClock { origin: Instant::now() }
    }
}

impl Default for MonotonicClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for MonotonicClock {
    fn now_ns(&self) -> u64 {
        self.origin.elapsed().as_nanos() as u64
    }

    fn sleep(&self, duration: Duration) {
        std::thread::sleep(duration);
    }
}

/// Deterministic clock: `sleep` advances it, nothing else does. Multiple
/// writers may race to advance; time never goes backward.
pub struct VirtualClock {
    now: AtomicU64,
}

impl VirtualClock {
    pub fn new() -> Self {
        VirtualClock { now: AtomicU64::new(0) }
    }

    /// Move forward to `ts_ns` if that is later than now.
    pub fn advance_to(&self, ts_ns: u64) {
        self.now.fetch_max(ts_ns, Ordering::SeqCst);
    }
}

impl Default for VirtualClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for VirtualClock {
    fn now_ns(&self) -> u64 {
        self.now.load(Ordering::SeqCst)
    }

    fn sleep(&self, duration: Duration) {
        self.now.fetch_add(duration.as_nanos() as u64, Ordering::SeqCst);
    }
}

/// A shared time base for a whole suite. Virtual-clock backends need
/// the concrete handle so they can advance time; everything else takes
/// the trait object.
#[derive(Clone)]
pub enum ClockHandle {
    Monotonic(Arc<MonotonicClock>),
    Virtual(Arc<VirtualClock>),
}

impl ClockHandle {
    pub fn new_monotonic() -> Self {
        ClockHandle::Monotonic(Arc::new(MonotonicClock::new()))
    }

    pub fn new_virtual() -> Self {
        ClockHandle::Virtual(Arc::new(VirtualClock::new()))
    }

    pub fn as_clock(&self) -> Arc<dyn Clock> {
        match self {
            ClockHandle::Monotonic(c) => c.clone(),
            ClockHandle::Virtual(c) => c.clone(),
        }
    }

    pub fn is_virtual(&self) -> bool {
        matches!(self, ClockHandle::Virtual(_))
    }
}
