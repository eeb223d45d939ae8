#![no_main]

use std::path::Path;

use libfuzzer_sys::fuzz_target;

use delayrd_core::config::parse_config_str;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    // Table paths resolve under a directory that does not exist.
    let Ok(cfg) = parse_config_str(text, "fuzz.cfg", Path::new("/nonexistent-fuzz-dir")) else {
        return;
    };
    assert!(cfg.reaction_pair().is_ok());
    assert!(cfg.kernel.lag_steps(cfg.solver.dt).is_ok());
    if let Some(sweep) = &cfg.sweep {
        if sweep.cell_count() <= 64 {
            assert_eq!(cfg.sweep_configs().map(|c| c.len()).ok(), Some(sweep.cell_count()));
        }
    }
});
