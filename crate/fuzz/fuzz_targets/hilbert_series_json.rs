#![no_main]

use hz_arith::borcherds::HilbertSeries;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(f) = HilbertSeries::from_json_str(s) {
        let text = f.to_json_string();
        let again = HilbertSeries::from_json_str(&text).expect("re-parses");
        assert_eq!(again.to_json_string(), text);
    }
});
