//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature the maps run on the rayon pool; without it
//! they are plain iterator maps. Either way results come back in input
//! order, so callers see the same output under every schedule.

/// How independent work items are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    #[default]
    Parallel,
    Sequential,
}

impl Schedule {
    /// True when work will actually be spread across threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Schedule::Parallel
    }
}

/// Maps `f` over `items`, preserving order.
pub fn map<T, R, F>(schedule: Schedule, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if schedule == Schedule::Parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = schedule;
    items.iter().map(f).collect()
}

/// Maps a fallible `f` over `items` and returns the first error in input
/// order, if any.
pub fn try_map<T, R, E, F>(schedule: Schedule, items: &[T], f: F) -> Result<Vec<R>, E>
where
    T: Sync,
    R: Send,
    E: Send,
    F: Fn(&T) -> Result<R, E> + Sync + Send,
{
    map(schedule, items, f).into_iter().collect()
}

/// Index of the first item (in input order) for which `f` returns `Some`,
/// together with that value. Later items may be evaluated speculatively
/// when running in parallel; their results are discarded.
pub fn find_first<T, R, F>(schedule: Schedule, items: &[T], f: F) -> Option<(usize, R)>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Option<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if schedule == Schedule::Parallel {
        use rayon::prelude::*;
        return items
            .par_iter()
            .enumerate()
            .filter_map(|(i, t)| f(t).map(|r| (i, r)))
            .find_first(|_| true);
    }
    let _ = schedule;
    items.iter().enumerate().find_map(|(i, t)| f(t).map(|r| (i, r)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedules_agree() {
        let xs: Vec<u64> = (0..500).collect();
        let a = map(Schedule::Parallel, &xs, |x| x * x);
        let b = map(Schedule::Sequential, &xs, |x| x * x);
        assert_eq!(a, b);
        let fa = find_first(Schedule::Parallel, &xs, |&x| (x % 37 == 36).then_some(x));
        let fb = find_first(Schedule::Sequential, &xs, |&x| (x % 37 == 36).then_some(x));
        assert_eq!(fa, Some((36, 36)));
        assert_eq!(fa, fb);
    }

    #[test]
    fn try_map_reports_first_error() {
        let xs = [1, 2, 3, 4];
        let r: Result<Vec<i32>, i32> = try_map(Schedule::Parallel, &xs, |&x| if x >= 3 { Err(x) } else { Ok(x) });
        assert_eq!(r, Err(3));
    }
}
