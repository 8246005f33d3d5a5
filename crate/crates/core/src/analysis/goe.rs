use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::Mat;

/// Gaussian orthogonal ensemble sample: diagonal entries `N(0, 1)`,
/// off-diagonal `N(0, 1/2)`, symmetric, reproducible per seed.
pub fn goe_sample(dim: usize, seed: u64) -> Result<Mat> {
    if dim < 2 {
        return Err(Error::InvalidArgument(format!("GOE dimension must be >= 2, got {dim}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = Mat::zeros(dim, dim);
    let off_scale = 0.5_f64.sqrt();
    for i in 0..dim {
        let z: f64 = rng.sample(StandardNormal);
        m[(i, i)] = z;
        for j in i + 1..dim {
            let z: f64 = rng.sample(StandardNormal);
            m[(i, j)] = off_scale * z;
            m[(j, i)] = off_scale * z;
        }
    }
    Ok(m)
}

/// Uncorrelated levels: running sums of `count` i.i.d. unit exponentials.
pub fn poisson_levels(count: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut level = 0.0;
    (0..count)
        .map(|_| {
            let s: f64 = rng.sample(Exp1);
            level += s;
            level
        })
        .collect()
}
