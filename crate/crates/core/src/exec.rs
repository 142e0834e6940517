//! Parallelism context handed to every data-parallel loop.
//!
//! With the `parallel` feature (default) work is spread over a rayon pool of
//! the requested size; without it every context runs sequentially. Results
//! are always collected in input order, so outputs do not depend on the
//! number of workers.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Exec {
    workers: usize,
}

impl Default for Exec {
    fn default() -> Self {
        Self::parallel(0)
    }
}

impl Exec {
    pub const fn sequential() -> Self {
        Self { workers: 1 }
    }

    /// `workers == 0` means one worker per available core.
    pub const fn parallel(workers: usize) -> Self {
        Self { workers }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn is_sequential(&self) -> bool {
        self.workers == 1 || !cfg!(feature = "parallel")
    }

    /// Order-preserving map.
    pub fn map<I, T, F>(&self, items: &[I], f: F) -> Vec<T>
    where
        I: Sync,
        T: Send,
        F: Fn(&I) -> T + Sync + Send,
    {
        if self.is_sequential() || items.len() < 2 {
            return items.iter().map(f).collect();
        }
        self.map_parallel(items, f)
    }

    #[cfg(feature = "parallel")]
    fn map_parallel<I, T, F>(&self, items: &[I], f: F) -> Vec<T>
    where
        I: Sync,
        T: Send,
        F: Fn(&I) -> T + Sync + Send,
    {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build();
        match pool {
            Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
            Err(_) => items.iter().map(f).collect(),
        }
    }

    #[cfg(not(feature = "parallel"))]
    fn map_parallel<I, T, F>(&self, items: &[I], f: F) -> Vec<T>
    where
        I: Sync,
        T: Send,
        F: Fn(&I) -> T + Sync + Send,
    {
        items.iter().map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let items: Vec<u64> = (0..1000).collect();
        let seq = Exec::sequential().map(&items, |x| x * x);
        let par = Exec::parallel(4).map(&items, |x| x * x);
        assert_eq!(seq, par);
    }
}
