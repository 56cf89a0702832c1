use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Complex channel matrix, one row per transmit antenna and one column per user.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ChannelMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    /// Builds a matrix from row vectors. Panics if the rows have different lengths.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged channel rows");
        Self {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// I.i.d. circularly-symmetric complex Gaussian entries with unit variance.
    pub fn rayleigh<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let scale = std::f64::consts::FRAC_1_SQRT_2;
        let data = (0..rows * cols)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re * scale, im * scale)
            })
            .collect();
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    /// The submatrix made of the listed rows, in the listed order.
    pub fn select_rows(&self, rows: &[usize]) -> ChannelMatrix {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        ChannelMatrix {
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }

    /// Row `i` as interleaved (re, im) pairs.
    pub fn row_as_reals(&self, i: usize) -> Vec<f64> {
        self.row(i).iter().flat_map(|z| [z.re, z.im]).collect()
    }

    pub fn squared_row_norm(&self, i: usize) -> f64 {
        self.row(i).iter().map(Complex64::norm_sqr).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Decodes interleaved (re, im) pairs. Returns `None` for odd lengths.
pub fn complex_row(reals: &[f64]) -> Option<Vec<Complex64>> {
    if !reals.len().is_multiple_of(2) {
        return None;
    }
    Some(reals.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect())
}
