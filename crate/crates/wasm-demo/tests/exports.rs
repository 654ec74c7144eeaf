use cifc_wasm::{channel_info_json, det_region_json, frontier_json, scheme_table_json};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn det_region_for_uniform_input() {
    let w = vec!["1"; 32].join(" ");
    let v = parse(&det_region_json("asymmetric_clipper", &w).unwrap());
    assert_eq!(
        v["region"]["vertices"],
        parse("[[0,0],[2,0],[2,2],[1,3],[0,3]]")
    );
    assert_eq!(v["H(Y2)"], 3);
}

#[test]
fn det_region_rejects_bad_weights() {
    assert!(det_region_json("asymmetric_clipper", "1 2 3").is_err());
    assert!(det_region_json("symmetric_clipper", &["0"; 12].join(",")).is_err());
    assert!(det_region_json("symmetric_clipper", &["x"; 12].join(",")).is_err());
    assert!(det_region_json("nope", "1").is_err());
}

#[test]
fn frontier_points() {
    let v = parse(&frontier_json("symmetric_clipper", "det", 20, 0, 3).unwrap());
    let pts = v.as_array().unwrap();
    assert_eq!(pts.len(), 3);
    assert_eq!(
        (&pts[1]["R1"], &pts[1]["R2"]),
        (&Value::from(1), &Value::from(2))
    );
    assert!(frontier_json("symmetric_clipper", "det", 0, 0, 3).is_err());
}

#[test]
fn scheme_tables() {
    let v = parse(&scheme_table_json("symmetric12").unwrap());
    assert_eq!(v["ok"], true);
    assert_eq!(v["rows"].as_array().unwrap().len(), 8);
    assert_eq!(v["rates"], parse("[1,2]"));
    assert_eq!(
        parse(&channel_info_json("symmetric_clipper").unwrap())["x2"],
        3
    );
}
