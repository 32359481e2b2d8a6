//! Index-ordered parallel map: the output is the same vector, bit for bit,
//! whatever the thread count.

use rayon::prelude::*;

use crate::error::{LabError, Result};

pub fn ordered_map<T, F>(n: u64, threads: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match threads {
        1 => Ok((0..n).map(f).collect()),
        0 => Ok((0..n).into_par_iter().map(f).collect()),
        k => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| LabError::Usage(format!("thread pool: {e}")))?;
            Ok(pool.install(|| (0..n).into_par_iter().map(f).collect()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let f = |i: u64| (i as f64).sqrt().to_bits();
        let a = ordered_map(1000, 1, f).unwrap();
        assert_eq!(a, ordered_map(1000, 4, f).unwrap());
        assert_eq!(a, ordered_map(1000, 0, f).unwrap());
    }
}
