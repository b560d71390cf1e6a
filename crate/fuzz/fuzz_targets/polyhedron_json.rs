#![no_main]
use libfuzzer_sys::fuzz_target;
use npmod::io::parse_polyhedron_json as parse;

fuzz_target!(|data: &[u8]| { let s = std::str::from_utf8(data).unwrap_or(""); let _ = parse(s); });
