#![no_main]

use libfuzzer_sys::fuzz_target;

use delayrd_core::model::{DelayKernel, KernelShape};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(shape) = KernelShape::parse_tabulated(text) else {
        return;
    };
    let Ok(kernel) = DelayKernel::new(shape, 1.0) else {
        return;
    };
    if let Ok(w) = kernel.discretize(0.05) {
        let total: f64 = w.as_slice().iter().sum();
        assert!(w.as_slice().iter().all(|&x| x >= 0.0));
        assert!((total - 1.0).abs() < 1e-9);
    }
});
