use crate::CMat;
use num_complex::Complex64;

/// Product basis of N modes truncated at n_max; index = Σ x_m (n_max+1)^{N−1−m}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockSpace {
    pub modes: usize,
    pub n_max: usize,
    dim: usize,
    strides: Vec<usize>,
}

impl FockSpace {
    pub fn new(modes: usize, n_max: usize) -> Self {
        let levels = n_max + 1;
        let strides: Vec<usize> = (0..modes).map(|m| levels.pow((modes - 1 - m) as u32)).collect();
        FockSpace { modes, n_max, dim: levels.pow(modes as u32), strides }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn stride(&self, mode: usize) -> usize {
        self.strides[mode]
    }

    pub fn occupation(&self, index: usize, mode: usize) -> usize {
        (index / self.strides[mode]) % (self.n_max + 1)
    }

    pub fn index(&self, occupations: &[usize]) -> usize {
        occupations.iter().zip(&self.strides).map(|(x, s)| x * s).sum()
    }

    /// a_m ρ
    pub fn left_a(&self, mode: usize, rho: &CMat) -> CMat {
        let d = self.dim;
        let st = self.strides[mode];
        let mut out = CMat::zeros(d, d);
        for i in 0..d {
            let x = self.occupation(i, mode);
            if x < self.n_max {
                let f = ((x + 1) as f64).sqrt();
                for j in 0..d {
                    out[(i, j)] = rho[(i + st, j)] * f;
                }
            }
        }
        out
    }

    /// a†_m ρ
    pub fn left_adag(&self, mode: usize, rho: &CMat) -> CMat {
        let d = self.dim;
        let st = self.strides[mode];
        let mut out = CMat::zeros(d, d);
        for i in 0..d {
            let x = self.occupation(i, mode);
            if x > 0 {
                let f = (x as f64).sqrt();
                for j in 0..d {
                    out[(i, j)] = rho[(i - st, j)] * f;
                }
            }
        }
        out
    }

    /// ρ a_m
    pub fn right_a(&self, rho: &CMat, mode: usize) -> CMat {
        let d = self.dim;
        let st = self.strides[mode];
        let mut out = CMat::zeros(d, d);
        for j in 0..d {
            let x = self.occupation(j, mode);
            if x > 0 {
                let f = (x as f64).sqrt();
                for i in 0..d {
                    out[(i, j)] = rho[(i, j - st)] * f;
                }
            }
        }
        out
    }

    /// ρ a†_m
    pub fn right_adag(&self, rho: &CMat, mode: usize) -> CMat {
        let d = self.dim;
        let st = self.strides[mode];
        let mut out = CMat::zeros(d, d);
        for j in 0..d {
            let x = self.occupation(j, mode);
            if x < self.n_max {
                let f = ((x + 1) as f64).sqrt();
                for i in 0..d {
                    out[(i, j)] = rho[(i, j + st)] * f;
                }
            }
        }
        out
    }

    /// Dense a_m, used only by tests and small checks.
    pub fn annihilator(&self, mode: usize) -> CMat {
        self.left_a(mode, &CMat::identity(self.dim, self.dim))
    }

    pub fn top_level_probability(&self, rho: &CMat, mode: usize) -> f64 {
        (0..self.dim)
            .filter(|&i| self.occupation(i, mode) == self.n_max)
            .map(|i| rho[(i, i)].re)
            .sum()
    }
}

pub(crate) fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}
