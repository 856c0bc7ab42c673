//! Fixed-block reductions.
//!
//! Every parallel sum in the crate is split into blocks of [`BLOCK`]
//! elements whose partial sums are added left to right. The block layout
//! depends only on the input length, so results are bit-identical for any
//! worker count.

use rayon::prelude::*;

pub(crate) const BLOCK: usize = 4096;

pub(crate) fn sum(values: &[f64]) -> f64 {
    values
        .par_chunks(BLOCK)
        .map(|chunk| chunk.iter().sum::<f64>())
        .collect::<Vec<_>>()
        .into_iter()
        .sum()
}

pub(crate) fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.par_chunks(BLOCK)
        .zip(b.par_chunks(BLOCK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()).sum::<f64>())
        .collect::<Vec<_>>()
        .into_iter()
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_is_independent_of_thread_count() {
        let values: Vec<f64> = (0..50_000).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| sum(&values));
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(8)
            .build()
            .unwrap()
            .install(|| sum(&values));
        assert_eq!(one.to_bits(), many.to_bits());
    }
}
