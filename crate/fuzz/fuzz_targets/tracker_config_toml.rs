#![no_main]

use libfuzzer_sys::fuzz_target;
use pairtrack::io::parse_tracker_config;
use pairtrack::tracker::{GreedyTracker, Tracker};

fuzz_target!(|data: &[u8]| {
    // an accepted config must build both trackers
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(config) = parse_tracker_config(s) {
            Tracker::new(config).expect("validated config");
            GreedyTracker::new(config).expect("validated config");
        }
    }
});
