//! Execution policy for data-parallel loops.
//!
//! With the `parallel` feature the `Parallel` policy dispatches to rayon;
//! without it every policy runs sequentially.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// `Parallel` only when the crate was built with rayon.
    pub fn effective(self) -> Exec {
        if cfg!(feature = "parallel") {
            self
        } else {
            Exec::Sequential
        }
    }

    /// `(0..n).map(f).collect()` under this policy, order preserved.
    pub fn map_range<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match self.effective() {
            Exec::Sequential => (0..n).map(f).collect(),
            Exec::Parallel => par_map_range(n, f),
        }
    }

    /// Map over a slice under this policy, order preserved.
    pub fn map_slice<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        self.map_range(items.len(), |i| f(&items[i]))
    }

    /// Fill `out[i] = f(i)` under this policy.
    pub fn fill<R, F>(self, out: &mut [R], f: F)
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match self.effective() {
            Exec::Sequential => out.iter_mut().enumerate().for_each(|(i, o)| *o = f(i)),
            Exec::Parallel => par_fill(out, f),
        }
    }
}

#[cfg(feature = "parallel")]
fn par_map_range<R: Send, F: Fn(usize) -> R + Sync + Send>(n: usize, f: F) -> Vec<R> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map_range<R: Send, F: Fn(usize) -> R + Sync + Send>(n: usize, f: F) -> Vec<R> {
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
fn par_fill<R: Send, F: Fn(usize) -> R + Sync + Send>(out: &mut [R], f: F) {
    use rayon::prelude::*;
    out.par_iter_mut().enumerate().with_min_len(256).for_each(|(i, o)| *o = f(i));
}

#[cfg(not(feature = "parallel"))]
fn par_fill<R: Send, F: Fn(usize) -> R + Sync + Send>(out: &mut [R], f: F) {
    out.iter_mut().enumerate().for_each(|(i, o)| *o = f(i));
}
