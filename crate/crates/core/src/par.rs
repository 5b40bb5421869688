//! Deterministic task parallelism for ensemble computations.
//!
//! Work items are indexed `0..n` and every item derives all of its
//! randomness from its own index, so the result vector is a pure function
//! of the inputs: thread count and scheduling order cannot change it. The
//! worker count is the available parallelism, optionally capped by the
//! `RID_THREADS` environment variable.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;

/// Maximum number of worker threads: available parallelism, capped by
/// `RID_THREADS` when that is set to a positive integer (other values are
/// ignored).
pub fn thread_cap() -> usize {
    let hw = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    match std::env::var("RID_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
    {
        Some(cap) if cap >= 1 => hw.min(cap),
        _ => hw,
    }
}

/// Evaluates `f(0), ..., f(n-1)` on a worker pool and returns the results
/// in index order.
///
/// `f` must be pure up to its index argument for the determinism guarantee
/// to hold; the helper itself never reorders or drops results.
pub fn run_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = thread_cap().min(n);
    if workers <= 1 {
        return (0..n).map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let next = &next;
            let f = &f;
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                if tx.send((i, f(i))).is_err() {
                    break;
                }
            });
        }
    });
    drop(tx);
    let mut slots: Vec<Option<T>> = (0..n).map(|_| None).collect();
    for (i, value) in rx.iter() {
        slots[i] = Some(value);
    }
    slots
        .into_iter()
        .map(|slot| slot.expect("every index is computed exactly once"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_arrive_in_index_order() {
        let out = run_indexed(1000, |i| i * i);
        let expected: Vec<usize> = (0..1000).map(|i| i * i).collect();
        assert_eq!(out, expected);
    }

    #[test]
    fn zero_tasks() {
        let out: Vec<u8> = run_indexed(0, |_| unreachable!());
        assert!(out.is_empty());
    }

    #[test]
    fn cap_is_positive() {
        assert!(thread_cap() >= 1);
    }
}
