#![no_main]

use libfuzzer_sys::fuzz_target;

use delayrd_core::model::SpatialGrid;
use delayrd_core::simulator::{HistoryTable, InitialHistory};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(table) = HistoryTable::parse(text) else { return };
    let grid = SpatialGrid::new(1.0, 8).unwrap();
    if let Ok(fields) = InitialHistory::Table(table).sample(&grid, 5, 0.25) {
        assert_eq!(fields.len(), 5);
        assert!(fields.iter().all(|f| f.iter().all(|u| u.is_finite() && *u >= 0.0)));
    }
});
