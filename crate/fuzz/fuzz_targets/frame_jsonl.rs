#![no_main]
//! Frame JSONL reader: must not panic, and anything it accepts must survive
//! a write/read round trip unchanged and be trackable.

use libfuzzer_sys::fuzz_target;
use pairtrack::io::{parse_frames, to_jsonl_string};
use pairtrack::tracker::{Tracker, TrackerConfig};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(frames) = parse_frames(text) else {
        return;
    };
    let again = parse_frames(&to_jsonl_string(&frames)).expect("written frames parse");
    assert_eq!(again, frames);

    let mut tracker = Tracker::new(TrackerConfig::default()).unwrap();
    for f in &frames {
        // out-of-order input is a reported error, not a panic
        if tracker.step(f).is_err() {
            break;
        }
    }
});
