#![no_main]

use hz_arith::obstruction::CuspBasis;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(b) = CuspBasis::from_json_str(s) {
        let again = CuspBasis::from_json_str(&b.to_json_string()).expect("re-parses");
        assert_eq!(again, b);
    }
});
