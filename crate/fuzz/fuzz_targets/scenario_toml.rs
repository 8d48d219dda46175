#![no_main]
//! Scenario TOML: parsing and validation must not panic; small valid
//! scenarios are simulated and their frames must pass frame validation.

use libfuzzer_sys::fuzz_target;
use pairtrack::simulator::{simulate, synthesize_points, ScenarioSpec};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(spec) = ScenarioSpec::from_toml_str(text) else {
        return;
    };
    let small = spec.duration_frames <= 40
        && spec.objects.len() <= 12
        && spec.sensor.clutter_rate <= 10.0
        && spec.points.points_per_object <= 64
        && spec.points.background_points <= 64;
    if !small {
        return;
    }
    if let Ok(sim) = simulate(&spec) {
        for f in &sim.frames {
            f.validate().expect("simulated frames are valid");
        }
        if spec.duration_frames > 0 {
            synthesize_points(&spec, 0)
                .validate()
                .expect("simulated points are valid");
        }
    }
});
