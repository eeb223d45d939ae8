#![no_main]

use libfuzzer_sys::fuzz_target;

use delayrd_core::model::{ReactionPair, TabulatedPair};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(table) = TabulatedPair::parse(text) else { return };
    let end = table.s_end();
    let Ok(rp) = ReactionPair::custom(table, None) else {
        return;
    };
    for i in 0..=16 {
        let s = end * i as f64 / 16.0;
        assert!(rp.f(s).is_finite() && rp.g(s).is_finite());
    }
});
