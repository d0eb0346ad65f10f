//! Cooperative deadline support for long-running computations.
//!
//! A process-wide deadline can be armed before starting an expensive
//! computation. Inner loops call [`checkpoint`], which unwinds with a
//! [`DeadlineExceeded`] payload once the deadline has passed;
//! [`run_with_deadline`] catches exactly that payload at the boundary.

use std::panic::{self, AssertUnwindSafe};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

/// Panic payload used to unwind out of a computation that ran too long.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeadlineExceeded;

static ANCHOR: OnceLock<Instant> = OnceLock::new();
// Nanoseconds since the anchor; zero means no deadline armed.
static DEADLINE: AtomicU64 = AtomicU64::new(0);

fn anchor() -> Instant {
    *ANCHOR.get_or_init(Instant::now)
}

fn now_nanos() -> u64 {
    anchor().elapsed().as_nanos() as u64
}

pub fn arm(timeout: Duration) {
    let at = now_nanos().saturating_add(timeout.as_nanos() as u64).max(1);
    DEADLINE.store(at, Ordering::Relaxed);
}

pub fn disarm() {
    DEADLINE.store(0, Ordering::Relaxed);
}

/// Cheap check suitable for inner loops.
#[inline]
pub fn checkpoint() {
    let at = DEADLINE.load(Ordering::Relaxed);
    if at != 0 && now_nanos() > at {
        panic::panic_any(DeadlineExceeded);
    }
}

static QUIET_HOOK: OnceLock<()> = OnceLock::new();

// The expected unwind must not spam stderr with a backtrace, so the first
// deadline-guarded run wraps the current hook with a filtering one.
fn install_quiet_hook() {
    QUIET_HOOK.get_or_init(|| {
        let previous = panic::take_hook();
        panic::set_hook(Box::new(move |info| {
            if info.payload().downcast_ref::<DeadlineExceeded>().is_none() {
                previous(info);
            }
        }));
    });
}

/// Runs `f` under the given time budget (no budget if `None`). Other panics
/// are propagated unchanged.
pub fn run_with_deadline<T>(
    timeout: Option<Duration>,
    f: impl FnOnce() -> T,
) -> Result<T, DeadlineExceeded> {
    match timeout {
        None => {
            disarm();
            Ok(f())
        }
        Some(t) => {
            install_quiet_hook();
            arm(t);
            let result = panic::catch_unwind(AssertUnwindSafe(f));
            disarm();
            match result {
                Ok(v) => Ok(v),
                Err(payload) => {
                    if payload.downcast_ref::<DeadlineExceeded>().is_some() {
                        Err(DeadlineExceeded)
                    } else {
                        panic::resume_unwind(payload)
                    }
                }
            }
        }
    }
}

