//! Point-wise sweeps, run on the rayon pool when the `parallel` feature is on.

/// How a sweep distributes its points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// `Parallel` silently degrades to `Sequential` without the feature.
    pub fn effective(self) -> Self {
        if cfg!(feature = "parallel") {
            self
        } else {
            Execution::Sequential
        }
    }
}

/// Apply `f` to every point, preserving order. Results are identical in both modes.
pub fn map_points<P, R, F>(points: &[P], exec: Execution, f: F) -> Vec<R>
where
    P: Sync,
    R: Send,
    F: Fn(&P) -> R + Sync + Send,
{
    match exec.effective() {
        Execution::Sequential => points.iter().map(f).collect(),
        Execution::Parallel => parallel_map(points, f),
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<P, R, F>(points: &[P], f: F) -> Vec<R>
where
    P: Sync,
    R: Send,
    F: Fn(&P) -> R + Sync + Send,
{
    use rayon::prelude::*;
    points.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<P, R, F>(points: &[P], f: F) -> Vec<R>
where
    P: Sync,
    R: Send,
    F: Fn(&P) -> R + Sync + Send,
{
    points.iter().map(f).collect()
}
