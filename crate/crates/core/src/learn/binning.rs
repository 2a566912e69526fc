//! Quantile binning of feature columns for histogram-based tree growth.
//!
//! A value `x` falls in bin `b = #{t in thresholds : t < x}`, so a split
//! "bins <= b go left" is the same as "x <= thresholds[b] goes left" and
//! fitted trees can store real thresholds.

use super::Matrix;

pub const MAX_BINS: usize = 64;

#[derive(Debug, Clone)]
pub struct BinnedMatrix {
    pub n_rows: usize,
    /// Column-major bin codes.
    codes: Vec<u8>,
    pub thresholds: Vec<Vec<f64>>,
}

impl BinnedMatrix {
    pub fn fit(x: &Matrix, max_bins: usize) -> Self {
        let max_bins = max_bins.clamp(2, 256);
        let n = x.rows();
        let mut thresholds = Vec::with_capacity(x.cols());
        let mut codes = Vec::with_capacity(n * x.cols());
        for c in 0..x.cols() {
            let column = x.column(c);
            let mut sorted = column.clone();
            sorted.sort_by(f64::total_cmp);
            sorted.dedup();
            let t: Vec<f64> = if sorted.len() <= max_bins {
                let mut t: Vec<f64> = sorted.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
                t.dedup();
                t
            } else {
                let mut t: Vec<f64> = (1..max_bins)
                    .map(|q| {
                        let i = q * sorted.len() / max_bins;
                        0.5 * (sorted[i - 1] + sorted[i])
                    })
                    .collect();
                t.dedup();
                t
            };
            codes.extend(column.iter().map(|&v| t.partition_point(|&th| th < v) as u8));
            thresholds.push(t);
        }
        Self {
            n_rows: n,
            codes,
            thresholds,
        }
    }

    pub fn n_cols(&self) -> usize {
        self.thresholds.len()
    }

    pub fn n_bins(&self, col: usize) -> usize {
        self.thresholds[col].len() + 1
    }

    #[inline]
    pub fn column(&self, col: usize) -> &[u8] {
        &self.codes[col * self.n_rows..(col + 1) * self.n_rows]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_agree_with_thresholds() {
        let x = Matrix::new(6, 1, vec![3.0, 1.0, 2.0, 2.0, 5.0, 4.0]);
        let b = BinnedMatrix::fit(&x, 64);
        assert_eq!(b.thresholds[0], vec![1.5, 2.5, 3.5, 4.5]);
        assert_eq!(b.column(0), &[2, 0, 1, 1, 4, 3]);
        for r in 0..6 {
            let code = b.column(0)[r] as usize;
            let v = x.get(r, 0);
            for (j, &t) in b.thresholds[0].iter().enumerate() {
                assert_eq!(code <= j, v <= t);
            }
        }
    }

    #[test]
    fn many_values_capped() {
        let x = Matrix::new(1000, 1, (0..1000).map(f64::from).collect());
        let b = BinnedMatrix::fit(&x, 64);
        assert!(b.n_bins(0) <= 64);
        assert!(b.column(0).windows(2).all(|w| w[0] <= w[1]));
    }
}
