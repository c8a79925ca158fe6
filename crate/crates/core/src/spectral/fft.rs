//! Per-thread FFT plan cache.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

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

/// Unnormalized forward DFT `X_k = Σ x_n e^{-2πikn/N}` in place.
pub fn forward(buf: &mut [Complex64]) {
    let n = buf.len();
    let plan = PLANS.with(|p| {
        let mut p = p.borrow_mut();
        if let Some(plan) = p.forward.get(&n) {
            return plan.clone();
        }
        let plan = p.planner.plan_fft_forward(n);
        p.forward.insert(n, plan.clone());
        plan
    });
    plan.process(buf);
}

/// Unnormalized inverse DFT `x_n = Σ X_k e^{2πikn/N}` in place.
pub fn inverse(buf: &mut [Complex64]) {
    let n = buf.len();
    let plan = PLANS.with(|p| {
        let mut p = p.borrow_mut();
        if let Some(plan) = p.inverse.get(&n) {
            return plan.clone();
        }
        let plan = p.planner.plan_fft_inverse(n);
        p.inverse.insert(n, plan.clone());
        plan
    });
    plan.process(buf);
}
