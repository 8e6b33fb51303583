//! Principal-value Hilbert transform of piecewise-constant data.
//!
//! With the kernel `1/(x-y)` and piecewise-constant `f`, the transform at a
//! cell midpoint has the exact log form
//! `Hf(x) = sum_j f_j (ln|x - c_j| - ln|x - c_(j+1)|)`; the self-cell term
//! vanishes by symmetry, so this needs no quadrature at all.

use crate::sampled::SampledFunction;

pub fn hilbert_transform_pc(f: &SampledFunction) -> SampledFunction {
    let n = f.n();
    let h = f.cell_width();
    let mut out = vec![0.0f64; n];
    let edges: Vec<f64> = (0..=n).map(|j| f.left + j as f64 * h).collect();
    for (i, o) in out.iter_mut().enumerate() {
        let x = f.midpoint(i);
        let mut acc = 0.0;
        for j in 0..n {
            if j == i {
                continue; // exact zero: the cell is symmetric about x
            }
            acc += f.samples[j] * ((x - edges[j]).abs().ln() - (x - edges[j + 1]).abs().ln());
        }
        *o = acc;
    }
    SampledFunction {
        left: f.left,
        len: f.len,
        samples: out,
    }
}
