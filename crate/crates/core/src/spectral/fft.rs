use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use std::cell::RefCell;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place unnormalized d-dimensional FFT over a row-major cube with `n` points per axis.
/// `inverse` selects the e^{+i} kernel.
pub(crate) fn fft_nd(data: &mut [C64], n: usize, dim: usize, inverse: bool) {
    debug_assert_eq!(data.len(), n.pow(dim as u32));
    let fft = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    });
    let total = data.len();
    let mut scratch = vec![C64::new(0.0, 0.0); total];
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        if stride == 1 {
            fft.process(data);
            continue;
        }
        let block = n * stride;
        // gather lines along `axis` into contiguous chunks
        let mut line = 0;
        for outer in (0..total).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                let dst = &mut scratch[line * n..(line + 1) * n];
                for (j, v) in dst.iter_mut().enumerate() {
                    *v = data[base + j * stride];
                }
                line += 1;
            }
        }
        fft.process(&mut scratch);
        line = 0;
        for outer in (0..total).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                let src = &scratch[line * n..(line + 1) * n];
                for (j, v) in src.iter().enumerate() {
                    data[base + j * stride] = *v;
                }
                line += 1;
            }
        }
    }
}

/// Flat index of frequency k on an n-point grid (negative frequencies wrap).
pub(crate) fn grid_index(k: &[i32], n: usize) -> usize {
    let mut idx = 0usize;
    for &ki in k {
        let m = ki.rem_euclid(n as i32) as usize;
        idx = idx * n + m;
    }
    idx
}

/// Inverse of `grid_index`: signed frequency for each flat index.
pub(crate) fn index_freq(mut idx: usize, n: usize, dim: usize, out: &mut [i32]) {
    for a in (0..dim).rev() {
        let m = idx % n;
        idx /= n;
        out[a] = if m <= n / 2 { m as i32 } else { m as i32 - n as i32 };
    }
}
