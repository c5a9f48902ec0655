//! Thin dispatch layer between the rayon-backed data-parallel paths and
//! their sequential fallbacks. Compiled without the `parallel` feature,
//! every entry point degrades to a plain iterator, so results are
//! byte-for-byte identical either way.

/// Maps `f` over `0..n`, in parallel when requested and available.
pub fn map_indexed<R, F>(n: usize, par: bool, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if par && n > 1 {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    let _ = par;
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree() {
        let a = map_indexed(64, true, |i| i * i);
        let b = map_indexed(64, false, |i| i * i);
        assert_eq!(a, b);
    }
}
