//! Bounded scoped worker pools. Work is split into fixed pieces up front so
//! results never depend on scheduling.

use std::num::NonZeroUsize;
use std::ops::Range;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use cpn_core::morphsem::{deformable_dilate_rows, DilationInput};
use cpn_core::GridMap;

/// Threads to use when the caller asks for 0.
pub fn default_threads() -> usize {
    std::thread::available_parallelism().map(NonZeroUsize::get).unwrap_or(1)
}

fn resolve(threads: usize) -> usize {
    if threads == 0 {
        default_threads()
    } else {
        threads
    }
}

/// Fills `out` (row-major, `width` values per row) band by band, calling
/// `fill(rows, band)` from up to `threads` workers.
pub fn par_rows<T, F>(out: &mut [T], width: usize, rows_per_task: usize, threads: usize, fill: F)
where
    T: Send,
    F: Fn(Range<usize>, &mut [T]) + Sync,
{
    if width == 0 || out.is_empty() {
        return;
    }
    let rows_per_task = rows_per_task.max(1);
    let bands: Vec<(usize, &mut [T])> = out
        .chunks_mut(width * rows_per_task)
        .enumerate()
        .map(|(i, c)| (i * rows_per_task, c))
        .collect();
    let threads = resolve(threads).min(bands.len());
    if threads <= 1 {
        for (y0, band) in bands {
            let n = band.len() / width;
            fill(y0..y0 + n, band);
        }
        return;
    }
    let queue = Mutex::new(bands.into_iter());
    std::thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| loop {
                let next = queue.lock().expect("row queue poisoned").next();
                let Some((y0, band)) = next else { break };
                let n = band.len() / width;
                fill(y0..y0 + n, band);
            });
        }
    });
}

/// Row-parallel deformable dilation. Each output pixel is computed exactly as
/// in the sequential kernel, so the result is bitwise independent of
/// `threads`.
pub fn par_deformable_dilate(input: &DilationInput<'_>, threads: usize) -> GridMap {
    let (w, h) = input.dims();
    let mut out = vec![0.0; w * h];
    // 64-row bands match the kernel's own blocking
    par_rows(&mut out, w, 64, threads, |rows, band| deformable_dilate_rows(input, rows, band));
    GridMap::new(w, h, out).expect("output has the input dimensions")
}

/// Maps `f` over `items` on up to `threads` workers, keeping input order.
pub fn par_map<I, R, F>(items: &[I], threads: usize, f: F) -> Vec<R>
where
    I: Sync,
    R: Send,
    F: Fn(&I) -> R + Sync,
{
    let threads = resolve(threads).min(items.len());
    if threads <= 1 {
        return items.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let mut parts: Vec<(usize, R)> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|_| {
                s.spawn(|| {
                    let mut mine = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        if i >= items.len() {
                            break mine;
                        }
                        mine.push((i, f(&items[i])));
                    }
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    });
    parts.sort_by_key(|p| p.0);
    parts.into_iter().map(|p| p.1).collect()
}
