//! Data-parallel map over sweep points.
//!
//! With the `parallel` feature the map runs on rayon, optionally inside a
//! pool of a fixed size; without it every mode runs sequentially. Results
//! always come back in input order.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether `Parallel` actually uses threads in this build.
    pub const fn threads_available() -> bool {
        cfg!(feature = "parallel")
    }
}

pub fn par_map<T, R, F>(items: &[T], exec: Execution, workers: Option<usize>, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        Execution::Sequential => items.iter().map(f).collect(),
        Execution::Parallel => parallel(items, workers, f),
    }
}

#[cfg(feature = "parallel")]
fn parallel<T, R, F>(items: &[T], workers: Option<usize>, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    match workers {
        Some(k) if k > 0 => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
            Err(_) => items.par_iter().map(&f).collect(),
        },
        _ => items.par_iter().map(&f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
fn parallel<T, R, F>(items: &[T], _workers: Option<usize>, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let xs: Vec<u64> = (0..1000).collect();
        let seq = par_map(&xs, Execution::Sequential, None, |x| x * x);
        let par = par_map(&xs, Execution::Parallel, Some(3), |x| x * x);
        assert_eq!(seq, par);
    }
}
