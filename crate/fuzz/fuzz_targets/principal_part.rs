#![no_main]

use hz_arith::obstruction::PrincipalPart;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    for d in [5, 13, 29] {
        if let Ok(pp) = PrincipalPart::parse(d, s) {
            // the display form parses back to the same principal part
            let again = PrincipalPart::parse(d, &pp.to_string()).expect("display re-parses");
            assert_eq!(again, pp);
        }
    }
});
