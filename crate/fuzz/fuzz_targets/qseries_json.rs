#![no_main]

use hz_arith::qseries::QLaurentSeries;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(f) = QLaurentSeries::from_json_str(s) {
        let text = f.to_json_value().to_string();
        assert_eq!(QLaurentSeries::from_json_str(&text).expect("re-parses"), f);
    }
});
