//! Deadline behavior runs in its own process: the deadline is global state,
//! so these checks stay in one sequential test.

use mds_core::deadline::{checkpoint, run_with_deadline, DeadlineExceeded};
use std::time::Duration;

#[test]
fn deadline_lifecycle() {
    // Generous budget: value passes through.
    let r = run_with_deadline(Some(Duration::from_secs(600)), || {
        checkpoint();
        "done"
    });
    assert_eq!(r, Ok("done"));

    // Expired budget: unwinds at the next checkpoint.
    let r = run_with_deadline(Some(Duration::from_nanos(1)), || {
        std::thread::sleep(Duration::from_millis(5));
        for _ in 0..1000 {
            checkpoint();
        }
        42
    });
    assert_eq!(r, Err(DeadlineExceeded));

    // Disarmed afterwards: checkpoints are free again.
    checkpoint();

    // No budget at all.
    assert_eq!(run_with_deadline(None, || 7), Ok(7));

    // Unrelated panics are not swallowed.
    let caught = std::panic::catch_unwind(|| {
        let _ = run_with_deadline(Some(Duration::from_secs(600)), || panic!("boom"));
    });
    assert!(caught.is_err());
}
