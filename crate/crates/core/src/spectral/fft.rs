use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::Grid;

struct Plans {
    planner: FftPlanner<f64>,
    forward: HashMap<usize, Arc<dyn Fft<f64>>>,
    inverse: HashMap<usize, Arc<dyn Fft<f64>>>,
}

thread_local! {
    static PLANS: RefCell<Plans> = RefCell::new(Plans {
        planner: FftPlanner::new(),
        forward: HashMap::new(),
        inverse: HashMap::new(),
    });
}

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|p| {
        let mut p = p.borrow_mut();
        let Plans {
            planner,
            forward: fwd,
            inverse: inv,
        } = &mut *p;
        if forward {
            fwd.entry(n)
                .or_insert_with(|| planner.plan_fft_forward(n))
                .clone()
        } else {
            inv.entry(n)
                .or_insert_with(|| planner.plan_fft_inverse(n))
                .clone()
        }
    })
}

/// In-place unnormalized multidimensional DFT over a row-major buffer.
pub(crate) fn transform_in_place(grid: &Grid, data: &mut [Complex64], forward: bool) {
    let n = grid.n();
    let fft = plan(n, forward);
    match grid.dim() {
        1 => fft.process(data),
        _ => {
            // rows (axis 1, contiguous)
            fft.process(data);
            // columns (axis 0)
            let mut column = vec![Complex64::default(); n];
            for j in 0..n {
                for i in 0..n {
                    column[i] = data[i * n + j];
                }
                fft.process(&mut column);
                for i in 0..n {
                    data[i * n + j] = column[i];
                }
            }
        }
    }
}
