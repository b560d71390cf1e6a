#![no_main]
use libfuzzer_sys::fuzz_target;
use npmod::padic::Ctx;
use std::sync::{Arc, OnceLock};

static K: OnceLock<Arc<Ctx>> = OnceLock::new();

fn parse(s: &str) -> npmod::Result<impl Sized> {
    let k = K.get_or_init(|| Ctx::new(3, 1, 2, 20).unwrap());
    npmod::io::parse_matrix_json(k, s)
}

fuzz_target!(|data: &[u8]| { let s = std::str::from_utf8(data).unwrap_or(""); let _ = parse(s); });
