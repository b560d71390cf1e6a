#![no_main]
use libfuzzer_sys::fuzz_target;
use npmod::charp::parse_poly;
use npmod::ff::Field;
use std::sync::{Arc, OnceLock};

static F25: OnceLock<Arc<Field>> = OnceLock::new();

fn parse(s: &str) -> npmod::Result<npmod::charp::LaurentPoly> {
    let fq = F25.get_or_init(|| Arc::new(Field::new(5, 2).unwrap()));
    parse_poly(s, None, fq.clone())
}

fuzz_target!(|data: &[u8]| { let s = std::str::from_utf8(data).unwrap_or(""); let _ = parse(s); });
