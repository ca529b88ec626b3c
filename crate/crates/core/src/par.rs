//! Replicate-level parallelism.
//!
//! Every parallel entry point collects results in index order, so reductions
//! performed afterwards are bit-identical for any thread count. Without the
//! `parallel` feature all work runs on the calling thread.

/// How replicate loops are scheduled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// `threads: None` uses the global rayon pool.
    #[default]
    Parallel,
    Threads(usize),
}

impl Execution {
    pub fn from_threads(threads: Option<usize>) -> Self {
        match threads {
            None => Execution::Parallel,
            Some(0) | Some(1) => Execution::Sequential,
            Some(n) => Execution::Threads(n),
        }
    }
}

/// Evaluates `f(0..n)` and returns the results in index order.
pub fn map_indexed<T, F>(n: u64, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    imp::map_indexed(n, exec, f)
}

/// Fills `out[i] = f(i)` for every index.
pub fn fill_indexed<T, F>(out: &mut [T], exec: Execution, f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    imp::fill_indexed(out, exec, f)
}

#[cfg(feature = "parallel")]
mod imp {
    use super::Execution;
    use rayon::prelude::*;

    pub fn map_indexed<T, F>(n: u64, exec: Execution, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        match exec {
            Execution::Sequential => (0..n).map(f).collect(),
            Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
            Execution::Threads(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
                Ok(pool) => pool.install(|| (0..n).into_par_iter().map(&f).collect()),
                Err(_) => (0..n).map(f).collect(),
            },
        }
    }

    pub fn fill_indexed<T, F>(out: &mut [T], exec: Execution, f: F)
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        const MIN_PAR: usize = 1 << 14;
        if exec == Execution::Sequential || out.len() < MIN_PAR {
            out.iter_mut().enumerate().for_each(|(i, o)| *o = f(i));
        } else {
            out.par_iter_mut()
                .with_min_len(4096)
                .enumerate()
                .for_each(|(i, o)| *o = f(i));
        }
    }
}

#[cfg(not(feature = "parallel"))]
mod imp {
    use super::Execution;

    pub fn map_indexed<T, F>(n: u64, _exec: Execution, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        (0..n).map(f).collect()
    }

    pub fn fill_indexed<T, F>(out: &mut [T], _exec: Execution, f: F)
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        out.iter_mut().enumerate().for_each(|(i, o)| *o = f(i));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_are_in_index_order_for_every_schedule() {
        for exec in [
            Execution::Sequential,
            Execution::Parallel,
            Execution::Threads(3),
        ] {
            let v = map_indexed(100, exec, |i| i * i);
            assert_eq!(v, (0..100).map(|i| i * i).collect::<Vec<_>>());
        }
    }

    #[test]
    fn fill_matches_sequential() {
        let mut a = vec![0.0; 50_000];
        fill_indexed(&mut a, Execution::Parallel, |i| (i as f64).sqrt());
        assert!(a.iter().enumerate().all(|(i, &x)| x == (i as f64).sqrt()));
    }
}
