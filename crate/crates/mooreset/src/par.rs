//! Deterministic parallel scans over index ranges.
//!
//! Work is split into fixed chunks consumed by rayon workers. Searches keep
//! an atomic lowest-hit index so late chunks can be skipped, and the reported
//! hit is always the one with the smallest canonical index, independent of
//! the worker count.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use rayon::prelude::*;

/// Worker-count hint; 0 means the rayon default.
#[derive(Copy, Clone, Debug, Default)]
pub struct ParHint {
    pub jobs: usize,
}

impl ParHint {
    pub fn new(jobs: usize) -> ParHint {
        ParHint { jobs }
    }

    fn run<T: Send>(self, f: impl FnOnce() -> T + Send) -> T {
        if self.jobs == 0 {
            f()
        } else {
            rayon::ThreadPoolBuilder::new()
                .num_threads(self.jobs)
                .build()
                .expect("thread pool")
                .install(f)
        }
    }
}

const CHUNK: u64 = 4096;

/// Finds the smallest index in [0, total) for which `probe` returns Some.
pub fn find_first<T: Send>(
    total: u64,
    hint: ParHint,
    probe: impl Fn(u64) -> Option<T> + Sync,
) -> Option<(u64, T)> {
    let best = AtomicU64::new(u64::MAX);
    let found: Mutex<Option<(u64, T)>> = Mutex::new(None);
    let chunks = total.div_ceil(CHUNK);
    hint.run(|| {
        (0..chunks).into_par_iter().for_each(|c| {
            let lo = c * CHUNK;
            if lo >= best.load(Ordering::Relaxed) {
                return;
            }
            let hi = (lo + CHUNK).min(total);
            for i in lo..hi {
                if i >= best.load(Ordering::Relaxed) {
                    return;
                }
                if let Some(hit) = probe(i) {
                    best.fetch_min(i, Ordering::Relaxed);
                    let mut slot = found.lock().unwrap();
                    if slot.as_ref().is_none_or(|(j, _)| i < *j) {
                        *slot = Some((i, hit));
                    }
                    return;
                }
            }
        });
    });
    found.into_inner().unwrap()
}

/// Additive tally over [0, total); the accumulator must be order independent.
pub fn tally<A>(
    total: u64,
    hint: ParHint,
    zero: impl Fn() -> A + Sync,
    visit: impl Fn(&mut A, u64) + Sync,
    merge: impl Fn(A, A) -> A + Sync,
) -> A
where
    A: Send,
{
    let chunks = total.div_ceil(CHUNK);
    hint.run(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let lo = c * CHUNK;
                let hi = (lo + CHUNK).min(total);
                let mut acc = zero();
                for i in lo..hi {
                    visit(&mut acc, i);
                }
                acc
            })
            .reduce(&zero, &merge)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn find_first_returns_lowest_hit() {
        // Matches at 9000 and 17; the lowest must win for any job count.
        for jobs in [0, 1, 3, 8] {
            let hit = find_first(100_000, ParHint::new(jobs), |i| {
                (i == 9000 || i == 17).then_some(i * 2)
            });
            assert_eq!(hit, Some((17, 34)));
        }
        assert_eq!(find_first(50, ParHint::default(), |_| None::<()>), None);
    }

    #[test]
    fn tally_sums_exactly() {
        let s = tally(
            10_001,
            ParHint::new(4),
            || 0u64,
            |acc, i| *acc += i,
            |a, b| a + b,
        );
        assert_eq!(s, 10_000 * 10_001 / 2);
    }
}
