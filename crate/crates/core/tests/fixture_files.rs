//! The JSON files under `fixtures/` are the serialized in-code fixtures.
//! Set `EPTL_BLESS=1` to rewrite them.

use std::path::PathBuf;

use eptl::{fixtures, load_execution, TraceDocument};

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

#[test]
fn files_match_fixtures() {
    let bless = std::env::var_os("EPTL_BLESS").is_some();
    for (name, exec) in fixtures::named() {
        let path = fixture_dir().join(name);
        let expected = TraceDocument::from_execution(&exec).to_json();
        if bless {
            std::fs::write(&path, &expected).unwrap();
            continue;
        }
        let text =
            std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(text, expected, "{name} is stale; rerun with EPTL_BLESS=1");
        assert_eq!(load_execution(&text).unwrap(), exec, "{name}");
    }
}
