//! Sequential / parallel execution of the crate's data-parallel loops.
//!
//! Every helper here returns results in index order, so callers see the
//! same output whichever strategy ran.

/// How a data-parallel loop is executed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Strategy {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Strategy::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            Strategy::Sequential
        }
    }
}

impl Strategy {
    pub fn all() -> Vec<Strategy> {
        vec![
            Strategy::Sequential,
            #[cfg(feature = "parallel")]
            Strategy::Parallel,
        ]
    }

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Sequential => "sequential",
            #[cfg(feature = "parallel")]
            Strategy::Parallel => "parallel",
        }
    }

    /// `f(0), f(1), …, f(len-1)` collected in order.
    pub fn map_range<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Strategy::Sequential => (0..len).map(f).collect(),
            #[cfg(feature = "parallel")]
            Strategy::Parallel => {
                use rayon::prelude::*;
                (0..len).into_par_iter().map(f).collect()
            }
        }
    }

    /// Maps `f` over `items`, preserving order.
    pub fn map_slice<I, T, F>(self, items: &[I], f: F) -> Vec<T>
    where
        I: Sync,
        T: Send,
        F: Fn(&I) -> T + Sync + Send,
    {
        match self {
            Strategy::Sequential => items.iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Strategy::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
        }
    }

    /// The first `Some(_)` produced by `f` over `0..len`, by index. The
    /// parallel path may evaluate later indices speculatively but always
    /// returns the lowest-index hit.
    pub fn find_map_first<T, F>(self, len: usize, f: F) -> Option<T>
    where
        T: Send,
        F: Fn(usize) -> Option<T> + Sync + Send,
    {
        match self {
            Strategy::Sequential => (0..len).find_map(f),
            #[cfg(feature = "parallel")]
            Strategy::Parallel => {
                use rayon::prelude::*;
                (0..len).into_par_iter().find_map_first(f)
            }
        }
    }
}

/// Splits `0..total` into at most `chunks` contiguous ranges of near-equal
/// length. Used to hand subset-rank ranges to workers.
pub(crate) fn chunk_ranges(total: u128, chunks: usize) -> Vec<(u128, u128)> {
    if total == 0 {
        return Vec::new();
    }
    let chunks = (chunks.max(1) as u128).min(total);
    let base = total / chunks;
    let extra = total % chunks;
    let mut out = Vec::with_capacity(chunks as usize);
    let mut start = 0u128;
    for c in 0..chunks {
        let len = base + u128::from(c < extra);
        out.push((start, start + len));
        start += len;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunks_cover_range_exactly() {
        for total in [0u128, 1, 7, 100, 1001] {
            for chunks in [1usize, 3, 8, 2000] {
                let r = chunk_ranges(total, chunks);
                let sum: u128 = r.iter().map(|(a, b)| b - a).sum();
                assert_eq!(sum, total);
                for w in r.windows(2) {
                    assert_eq!(w[0].1, w[1].0);
                }
            }
        }
    }

    #[test]
    fn strategies_agree_on_first_hit() {
        for s in Strategy::all() {
            let hit = s.find_map_first(1000, |i| (i % 37 == 36 && i > 100).then_some(i));
            assert_eq!(hit, Some(110), "{}", s.name());
            let v = s.map_range(5, |i| i * i);
            assert_eq!(v, vec![0, 1, 4, 9, 16]);
        }
    }
}
