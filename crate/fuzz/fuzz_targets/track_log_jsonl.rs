#![no_main]

use libfuzzer_sys::fuzz_target;
use pairtrack::io::{parse_track_log, to_jsonl_string};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(log) = parse_track_log(text) {
            assert_eq!(parse_track_log(&to_jsonl_string(&log)).unwrap(), log);
        }
    }
});
