//! Uniform grids on `T^d` and separable FFTs over them.
//!
//! Samples are stored row-major: the last coordinate varies fastest, and node
//! `(j_0, .., j_{d-1})` sits at `theta_i = j_i / res`.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Number of nodes of a `res^dim` grid.
pub fn grid_len(dim: usize, res: usize) -> usize {
    res.pow(dim as u32)
}

/// Multi-index of a flat grid index.
pub fn unflatten(dim: usize, res: usize, mut idx: usize) -> Vec<usize> {
    let mut out = vec![0; dim];
    for i in (0..dim).rev() {
        out[i] = idx % res;
        idx /= res;
    }
    out
}

/// Torus coordinates of a flat grid index.
pub fn node(dim: usize, res: usize, idx: usize) -> Vec<f64> {
    unflatten(dim, res, idx)
        .into_iter()
        .map(|j| j as f64 / res as f64)
        .collect()
}

/// Flat index of the bin holding mode `n`, i.e. `n mod res` per axis.
pub fn bin_of(n: &[i64], res: usize) -> usize {
    let r = res as i64;
    n.iter()
        .fold(0usize, |acc, &ni| acc * res + ni.rem_euclid(r) as usize)
}

/// Signed mode represented by a bin, components in `(-res/2, res/2]`.
pub fn mode_of(dim: usize, res: usize, idx: usize) -> Vec<i64> {
    let half = (res / 2) as i64;
    unflatten(dim, res, idx)
        .into_iter()
        .map(|j| {
            let j = j as i64;
            if j > half {
                j - res as i64
            } else {
                j
            }
        })
        .collect()
}

/// In-place separable transform. `inverse = false` computes
/// `sum_j x_j exp(-2 pi i n.j/res)`, `inverse = true` uses the opposite sign;
/// neither is normalized.
pub fn fft_nd(data: &mut [Complex64], dim: usize, res: usize, inverse: bool) {
    assert_eq!(data.len(), grid_len(dim, res));
    if res <= 1 {
        return;
    }
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(res)
    } else {
        planner.plan_fft_forward(res)
    };
    let mut line = vec![Complex64::new(0.0, 0.0); res];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for axis in 0..dim {
        let stride = res.pow((dim - 1 - axis) as u32);
        let block = stride * res;
        for start in (0..data.len()).step_by(block) {
            for off in 0..stride {
                let base = start + off;
                for (k, v) in line.iter_mut().enumerate() {
                    *v = data[base + k * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (k, v) in line.iter().enumerate() {
                    data[base + k * stride] = *v;
                }
            }
        }
    }
}
