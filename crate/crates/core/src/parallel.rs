//! Index-sharded fan-out for embarrassingly parallel cell evaluations.
//! Results are merged by index, so output never depends on scheduling or
//! on the worker count.

/// Evaluate `f(0..count)` across up to `workers` scoped threads and return
/// the results in index order.
pub fn par_map_indexed<T, F>(count: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = workers.max(1).min(count.max(1));
    if workers <= 1 || count <= 1 {
        return (0..count).map(f).collect();
    }
    let chunk = count.div_ceil(workers);
    let mut slots: Vec<Option<T>> = Vec::with_capacity(count);
    slots.resize_with(count, || None);
    let f = &f;
    std::thread::scope(|scope| {
        let mut rest = slots.as_mut_slice();
        let mut start = 0;
        while !rest.is_empty() {
            let take = chunk.min(rest.len());
            let (head, tail) = rest.split_at_mut(take);
            let base = start;
            scope.spawn(move || {
                for (offset, slot) in head.iter_mut().enumerate() {
                    *slot = Some(f(base + offset));
                }
            });
            rest = tail;
            start += take;
        }
    });
    slots
        .into_iter()
        .map(|s| s.expect("worker filled slot"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_index_order_for_any_worker_count() {
        let expect: Vec<usize> = (0..97).map(|i| i * i).collect();
        for workers in [1, 2, 3, 8, 97, 200] {
            assert_eq!(par_map_indexed(97, workers, |i| i * i), expect);
        }
        assert_eq!(par_map_indexed(0, 4, |i| i), Vec::<usize>::new());
    }
}
