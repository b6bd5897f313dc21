#![no_main]

use hz_arith::intersection::IntersectionReport;
use libfuzzer_sys::fuzz_target;

// Exercises the hand-written deserializers for log-linear values and
// arbitrary-size integers carried by reports.
fuzz_target!(|data: &[u8]| {
    if let Ok(r) = serde_json::from_slice::<IntersectionReport>(data) {
        let again: IntersectionReport =
            serde_json::from_str(&r.to_json_string()).expect("re-parses");
        assert_eq!(again.to_json_string(), r.to_json_string());
    }
});
