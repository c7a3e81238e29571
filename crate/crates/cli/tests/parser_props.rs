use std::collections::BTreeMap;

use deckmap_cli::parse_map;
use proptest::prelude::*;
use serde_json::json;

fn leaf() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("z".to_string()),
        Just("i".to_string()),
        (1i64..9).prop_map(|n| n.to_string()),
        (1i64..9, 1i64..9).prop_map(|(a, b)| format!("{a}/{b}i")),
        (1i64..9).prop_map(|n| format!("{n}i")),
        (0i64..99).prop_map(|n| format!("0.{n:02}")),
    ]
}

fn expr() -> impl Strategy<Value = String> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) + ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a} - {b}")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})*({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})/({b})")),
            (inner.clone(), 0u32..4).prop_map(|(a, n)| format!("({a})^{n}")),
            inner.prop_map(|a| format!("-({a})")),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn canonical_text_reparses_to_the_same_map(src in expr()) {
        let params = BTreeMap::new();
        let parsed = parse_map(&src, &params);
        prop_assume!(parsed.is_ok());
        let f = parsed.unwrap();
        let again = parse_map(&f.to_string(), &params).unwrap();
        prop_assert_eq!(&again, &f, "{} printed as {}", src, f);
        let wrapped = parse_map(&format!("(({src}))"), &params).unwrap();
        prop_assert_eq!(wrapped, f);
    }

    #[test]
    fn unary_minus_binds_looser_than_power(n in 1u32..5) {
        let params = BTreeMap::new();
        let a = parse_map(&format!("-z^{n}"), &params).unwrap();
        let b = parse_map(&format!("-(z^{n})"), &params).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn schema_rejects_malformed_documents() {
    let path = std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schema/deckmap-1.schema.json");
    let schema: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let v = jsonschema::validator_for(&schema).unwrap();
    let ok = json!({"schema": "deckmap/1", "command": "deck", "error": {"kind": "x", "message": "y", "position": null}});
    assert!(v.is_valid(&ok));
    let wrong_version = json!({"schema": "deckmap/2", "command": "deck", "error": {"kind": "x", "message": "y", "position": null}});
    assert!(!v.is_valid(&wrong_version));
    let float_coefficient = json!({
        "schema": "deckmap/1", "command": "sample", "input": {"params": {}, "precision": 53},
        "result": {"maps": [{"expression": "z^2", "degree": 2, "num": ["0", "0", 1.0], "den": ["1"]}]}
    });
    assert!(!v.is_valid(&float_coefficient));
}
